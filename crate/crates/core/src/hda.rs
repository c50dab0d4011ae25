//! Labeled higher-dimensional automata over the free monoid on string tokens.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::automata::Nfa;
use crate::dipath::Path;
use crate::error::{Error, Result};
use crate::pcs::{CubeId, PrecubicalSet, PrecubicalSubset, Side, ValidationReport, Violation};

/// A finite word over action tokens. Ordinary edges carry one-letter words;
/// merged edges carry the concatenation of the labels they replace.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<String>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(s: impl Into<String>) -> Self {
        Word(vec![s.into()])
    }

    /// Splits a `;`-joined token list, trimming whitespace around each token.
    pub fn parse(s: &str) -> Self {
        if s.trim().is_empty() {
            return Word::empty();
        }
        Word(s.split(';').map(|t| t.trim().to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[String] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.join(";"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hda {
    pcs: PrecubicalSet,
    init: BTreeSet<CubeId>,
    fin: BTreeSet<CubeId>,
    labels: BTreeMap<CubeId, Word>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Accessibility {
    pub accessible: bool,
    pub coaccessible: bool,
    /// Vertices not reachable from an initial state.
    pub unreachable: BTreeSet<CubeId>,
    /// Vertices from which no final state is reachable.
    pub blocked: BTreeSet<CubeId>,
}

impl Accessibility {
    pub fn offenders(&self) -> BTreeSet<CubeId> {
        self.unreachable.union(&self.blocked).copied().collect()
    }
}

impl Hda {
    /// Assembles an HDA without checking it; see [`Hda::validate`].
    pub fn new(
        pcs: PrecubicalSet,
        init: BTreeSet<CubeId>,
        fin: BTreeSet<CubeId>,
        labels: BTreeMap<CubeId, Word>,
    ) -> Self {
        Hda {
            pcs,
            init,
            fin,
            labels,
        }
    }

    /// Like [`Hda::new`] but fails unless the result validates.
    pub fn checked(
        pcs: PrecubicalSet,
        init: BTreeSet<CubeId>,
        fin: BTreeSet<CubeId>,
        labels: BTreeMap<CubeId, Word>,
    ) -> Result<Self> {
        let a = Hda::new(pcs, init, fin, labels);
        let rep = a.validate();
        match rep.violations.first() {
            None => Ok(a),
            Some(v) => Err(Error::arg(format!("invalid HDA: {v}"))),
        }
    }

    pub fn pcs(&self) -> &PrecubicalSet {
        &self.pcs
    }

    pub fn initial(&self) -> &BTreeSet<CubeId> {
        &self.init
    }

    pub fn finals(&self) -> &BTreeSet<CubeId> {
        &self.fin
    }

    pub fn labels(&self) -> &BTreeMap<CubeId, Word> {
        &self.labels
    }

    pub fn label(&self, e: CubeId) -> Option<&Word> {
        self.labels.get(&e)
    }

    pub fn is_distinguished_endpoint(&self, v: CubeId) -> bool {
        self.init.contains(&v) || self.fin.contains(&v)
    }

    /// Distinct edge labels.
    pub fn alphabet(&self) -> BTreeSet<Word> {
        self.labels.values().cloned().collect()
    }

    /// Distinct tokens occurring inside edge labels.
    pub fn letters(&self) -> BTreeSet<String> {
        self.labels
            .values()
            .flat_map(|w| w.0.iter().cloned())
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let p = &self.pcs;
        let mut violations = p.validate().violations;
        for &v in &self.init {
            if p.degree(v) != Some(0) {
                violations.push(Violation::InitialNotVertex(v));
            }
        }
        for &v in &self.fin {
            if p.degree(v) != Some(0) {
                violations.push(Violation::FinalNotVertex(v));
            }
        }
        for e in p.edges() {
            if !self.labels.contains_key(&e) {
                violations.push(Violation::MissingLabel(e));
            }
        }
        for &x in self.labels.keys() {
            if p.degree(x) != Some(1) {
                violations.push(Violation::LabelOnNonEdge(x));
            }
        }
        for x in p.cubes_of_degree(2) {
            for i in 1..=2 {
                let a = self.labels.get(&p.face(x, Side::Front, i));
                let b = self.labels.get(&p.face(x, Side::Back, i));
                if a.is_some() && b.is_some() && a != b {
                    violations.push(Violation::LabelCoherence { cube: x, index: i });
                }
            }
        }
        ValidationReport::from_violations(violations)
    }

    /// `λ̄(ω)`: concatenation of the edge labels along a path.
    pub fn extended_label(&self, path: &Path) -> Result<Word> {
        path.check_in(&self.pcs)?;
        let mut out = Vec::new();
        for e in path.edges() {
            let w = self
                .labels
                .get(e)
                .ok_or_else(|| Error::arg(format!("edge {e} has no label")))?;
            out.extend(w.0.iter().cloned());
        }
        Ok(Word(out))
    }

    /// The 1-skeleton as an automaton over edge labels: states are vertices.
    pub fn language_automaton(&self) -> Nfa<Word> {
        let mut nfa = Nfa::new(self.alphabet());
        let mut state = BTreeMap::new();
        for v in self.pcs.vertices() {
            state.insert(v, nfa.add_state());
        }
        for e in self.pcs.edges() {
            if let Some(w) = self.labels.get(&e) {
                let (s, t) = (self.pcs.source(e), self.pcs.target(e));
                nfa.add_transition(state[&s], w.clone(), state[&t]);
            }
        }
        for v in &self.init {
            if let Some(&s) = state.get(v) {
                nfa.set_initial(s);
            }
        }
        for v in &self.fin {
            if let Some(&s) = state.get(v) {
                nfa.set_accepting(s);
            }
        }
        nfa
    }

    /// Same language read letter by letter: a composite label becomes a chain
    /// of fresh intermediate states.
    pub fn letter_automaton(&self) -> Nfa<String> {
        let mut nfa = Nfa::new(self.letters());
        let mut state = BTreeMap::new();
        for v in self.pcs.vertices() {
            state.insert(v, nfa.add_state());
        }
        for e in self.pcs.edges() {
            let Some(w) = self.labels.get(&e) else { continue };
            let (s, t) = (state[&self.pcs.source(e)], state[&self.pcs.target(e)]);
            if w.is_empty() {
                nfa.add_epsilon(s, t);
                continue;
            }
            let mut cur = s;
            for (j, a) in w.0.iter().enumerate() {
                let next = if j + 1 == w.len() { t } else { nfa.add_state() };
                nfa.add_transition(cur, a.clone(), next);
                cur = next;
            }
        }
        for v in &self.init {
            nfa.set_initial(state[v]);
        }
        for v in &self.fin {
            nfa.set_accepting(state[v]);
        }
        nfa
    }

    pub fn accessibility(&self) -> Accessibility {
        let r = self.pcs.reachability();
        let mut unreachable = BTreeSet::new();
        let mut blocked = BTreeSet::new();
        for v in self.pcs.vertices() {
            if !self.init.iter().any(|&i| r.reaches(i, v)) {
                unreachable.insert(v);
            }
            if !self.fin.iter().any(|&f| r.reaches(v, f)) {
                blocked.insert(v);
            }
        }
        Accessibility {
            accessible: unreachable.is_empty(),
            coaccessible: blocked.is_empty(),
            unreachable,
            blocked,
        }
    }

    /// The sub-HDA on a precubical subset containing all initial and final states.
    pub fn restrict(&self, q: &PrecubicalSubset) -> Result<Hda> {
        if let Some(v) = self.init.iter().chain(&self.fin).find(|v| !q.contains(**v)) {
            return Err(Error::pre(format!(
                "distinguished vertex {v} is not in the subset"
            )));
        }
        let pcs = self.pcs.restrict(q)?;
        Ok(self.with_pcs(pcs))
    }

    /// Replaces the underlying set, keeping labels of surviving edges.
    pub(crate) fn with_pcs(&self, pcs: PrecubicalSet) -> Hda {
        let labels = self
            .labels
            .iter()
            .filter(|(e, _)| pcs.contains(**e))
            .map(|(&e, w)| (e, w.clone()))
            .collect();
        Hda {
            init: self.init.iter().copied().filter(|v| pcs.contains(*v)).collect(),
            fin: self.fin.iter().copied().filter(|v| pcs.contains(*v)).collect(),
            pcs,
            labels,
        }
    }

    pub(crate) fn with_parts(
        &self,
        pcs: PrecubicalSet,
        labels: BTreeMap<CubeId, Word>,
    ) -> Hda {
        Hda {
            pcs,
            init: self.init.clone(),
            fin: self.fin.clone(),
            labels,
        }
    }

    /// Checks for an isomorphism of labeled HDAs, searching vertex bijections
    /// by backtracking. Only intended for small, low-dimensional models: it
    /// compares vertices, labeled edges (as a multiset per vertex pair) and the
    /// number of squares.
    pub fn isomorphic_1skeleton(&self, other: &Hda) -> bool {
        let (p, q) = (&self.pcs, &other.pcs);
        if p.counts() != q.counts() {
            return false;
        }
        let edge_multiset = |a: &Hda| {
            let mut m: BTreeMap<(CubeId, CubeId), Vec<Word>> = BTreeMap::new();
            for e in a.pcs.edges() {
                m.entry((a.pcs.source(e), a.pcs.target(e)))
                    .or_default()
                    .push(a.labels.get(&e).cloned().unwrap_or_default());
            }
            for v in m.values_mut() {
                v.sort();
            }
            m
        };
        let em_p = edge_multiset(self);
        let em_q = edge_multiset(other);
        let vp: Vec<CubeId> = p.vertices().collect();
        let vq: Vec<CubeId> = q.vertices().collect();
        let role = |a: &Hda, v: CubeId| (a.init.contains(&v), a.fin.contains(&v));
        let mut map: BTreeMap<CubeId, CubeId> = BTreeMap::new();
        let mut used = BTreeSet::new();

        fn consistent(
            map: &BTreeMap<CubeId, CubeId>,
            em_p: &BTreeMap<(CubeId, CubeId), Vec<Word>>,
            em_q: &BTreeMap<(CubeId, CubeId), Vec<Word>>,
        ) -> bool {
            for (&(s, t), ws) in em_p {
                if let (Some(ms), Some(mt)) = (map.get(&s), map.get(&t)) {
                    if em_q.get(&(*ms, *mt)) != Some(ws) {
                        return false;
                    }
                }
            }
            for &(s, t) in em_q.keys() {
                let pre_s = map.iter().find(|(_, &b)| b == s).map(|(&a, _)| a);
                let pre_t = map.iter().find(|(_, &b)| b == t).map(|(&a, _)| a);
                if let (Some(a), Some(b)) = (pre_s, pre_t) {
                    if !em_p.contains_key(&(a, b)) {
                        return false;
                    }
                }
            }
            true
        }

        #[allow(clippy::too_many_arguments)]
        fn go(
            idx: usize,
            vp: &[CubeId],
            vq: &[CubeId],
            ok_pair: &dyn Fn(CubeId, CubeId) -> bool,
            map: &mut BTreeMap<CubeId, CubeId>,
            used: &mut BTreeSet<CubeId>,
            em_p: &BTreeMap<(CubeId, CubeId), Vec<Word>>,
            em_q: &BTreeMap<(CubeId, CubeId), Vec<Word>>,
        ) -> bool {
            if idx == vp.len() {
                return true;
            }
            for &w in vq {
                if used.contains(&w) || !ok_pair(vp[idx], w) {
                    continue;
                }
                map.insert(vp[idx], w);
                used.insert(w);
                if consistent(map, em_p, em_q) && go(idx + 1, vp, vq, ok_pair, map, used, em_p, em_q)
                {
                    return true;
                }
                map.remove(&vp[idx]);
                used.remove(&w);
            }
            false
        }

        let ok_pair = |a: CubeId, b: CubeId| {
            role(self, a) == role(other, b)
                && p.cofaces(a).len() == q.cofaces(b).len()
        };
        go(0, &vp, &vq, &ok_pair, &mut map, &mut used, &em_p, &em_q)
    }
}
