//! Finite automata over an ordered alphabet.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};

/// Nondeterministic automaton with ε-moves. States are `0..len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa<S: Ord> {
    alphabet: BTreeSet<S>,
    trans: Vec<BTreeMap<S, BTreeSet<usize>>>,
    eps: Vec<BTreeSet<usize>>,
    initial: BTreeSet<usize>,
    accepting: BTreeSet<usize>,
}

impl<S: Ord + Clone> Nfa<S> {
    pub fn new(alphabet: BTreeSet<S>) -> Self {
        Nfa {
            alphabet,
            trans: Vec::new(),
            eps: Vec::new(),
            initial: BTreeSet::new(),
            accepting: BTreeSet::new(),
        }
    }

    /// The automaton accepting every word over `alphabet`.
    pub fn universal(alphabet: BTreeSet<S>) -> Self {
        let mut n = Nfa::new(alphabet);
        let s = n.add_state();
        n.set_initial(s);
        n.set_accepting(s);
        for a in n.alphabet.clone() {
            n.add_transition(s, a, s);
        }
        n
    }

    pub fn alphabet(&self) -> &BTreeSet<S> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.trans.len()
    }

    /// Whether the automaton has no states (not whether its language is empty).
    pub fn is_empty(&self) -> bool {
        self.trans.is_empty()
    }

    pub fn is_empty_automaton(&self) -> bool {
        self.trans.is_empty()
    }

    pub fn initial(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn add_state(&mut self) -> usize {
        self.trans.push(BTreeMap::new());
        self.eps.push(BTreeSet::new());
        self.trans.len() - 1
    }

    /// Adds `from --a--> to`, extending the alphabet with `a` if needed.
    pub fn add_transition(&mut self, from: usize, a: S, to: usize) {
        self.alphabet.insert(a.clone());
        self.trans[from].entry(a).or_default().insert(to);
    }

    pub fn add_epsilon(&mut self, from: usize, to: usize) {
        self.eps[from].insert(to);
    }

    pub fn set_initial(&mut self, s: usize) {
        self.initial.insert(s);
    }

    pub fn set_accepting(&mut self, s: usize) {
        self.accepting.insert(s);
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, &S, usize)> + '_ {
        self.trans.iter().enumerate().flat_map(|(q, m)| {
            m.iter()
                .flat_map(move |(a, ts)| ts.iter().map(move |&t| (q, a, t)))
        })
    }

    pub fn epsilons(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.eps
            .iter()
            .enumerate()
            .flat_map(|(q, ts)| ts.iter().map(move |&t| (q, t)))
    }

    /// Returns a copy whose alphabet is extended by `extra`.
    pub fn with_alphabet(&self, extra: &BTreeSet<S>) -> Self {
        let mut n = self.clone();
        n.alphabet.extend(extra.iter().cloned());
        n
    }

    fn eps_closure(&self, set: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &t in &self.eps[q] {
                if set.insert(t) {
                    stack.push(t);
                }
            }
        }
    }

    fn step(&self, from: &BTreeSet<usize>, a: &S) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &q in from {
            if let Some(ts) = self.trans[q].get(a) {
                out.extend(ts.iter().copied());
            }
        }
        self.eps_closure(&mut out);
        out
    }

    fn start_set(&self) -> BTreeSet<usize> {
        let mut s = self.initial.clone();
        self.eps_closure(&mut s);
        s
    }

    pub fn accepts(&self, word: &[S]) -> bool {
        let mut cur = self.start_set();
        for a in word {
            cur = self.step(&cur, a);
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|q| self.accepting.contains(q))
    }

    /// Subset construction. The result is deterministic, ε-free and complete
    /// over the alphabet (it contains a sink state when needed).
    pub fn determinize(&self) -> Nfa<S> {
        let mut out = Nfa::new(self.alphabet.clone());
        let mut index: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
        let start = self.start_set();
        let s0 = out.add_state();
        out.set_initial(s0);
        index.insert(start.clone(), s0);
        let mut queue = VecDeque::from([start]);
        while let Some(set) = queue.pop_front() {
            let id = index[&set];
            if set.iter().any(|q| self.accepting.contains(q)) {
                out.set_accepting(id);
            }
            for a in &self.alphabet {
                let next = self.step(&set, a);
                let nid = match index.get(&next) {
                    Some(&n) => n,
                    None => {
                        let n = out.add_state();
                        index.insert(next.clone(), n);
                        queue.push_back(next);
                        n
                    }
                };
                out.add_transition(id, a.clone(), nid);
            }
        }
        out
    }

    /// Complement relative to the words over this automaton's alphabet.
    pub fn complement(&self) -> Nfa<S> {
        let mut d = self.determinize();
        d.accepting = (0..d.len()).filter(|q| !d.accepting.contains(q)).collect();
        d
    }

    fn check_alphabet(&self, other: &Nfa<S>) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::arg("automata over different alphabets"));
        }
        Ok(())
    }

    /// Product automaton; both operands must share an alphabet.
    pub fn intersect(&self, other: &Nfa<S>) -> Result<Nfa<S>> {
        self.check_alphabet(other)?;
        Ok(self.product(other))
    }

    fn product(&self, other: &Nfa<S>) -> Nfa<S> {
        let mut out = Nfa::new(self.alphabet.clone());
        let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut queue = VecDeque::new();
        let a0 = self.start_set();
        let b0 = other.start_set();
        for &p in &a0 {
            for &q in &b0 {
                let id = out.add_state();
                out.set_initial(id);
                index.insert((p, q), id);
                queue.push_back((p, q));
            }
        }
        while let Some((p, q)) = queue.pop_front() {
            let id = index[&(p, q)];
            if self.accepting.contains(&p) && other.accepting.contains(&q) {
                out.set_accepting(id);
            }
            let mut succ: Vec<(Option<&S>, usize, usize)> = Vec::new();
            for &t in &self.eps[p] {
                succ.push((None, t, q));
            }
            for &t in &other.eps[q] {
                succ.push((None, p, t));
            }
            for (a, ts) in &self.trans[p] {
                if let Some(us) = other.trans[q].get(a) {
                    for &t in ts {
                        for &u in us {
                            succ.push((Some(a), t, u));
                        }
                    }
                }
            }
            for (a, t, u) in succ {
                let nid = *index.entry((t, u)).or_insert_with(|| {
                    queue.push_back((t, u));
                    out.add_state()
                });
                match a {
                    Some(a) => out.add_transition(id, a.clone(), nid),
                    None => out.add_epsilon(id, nid),
                }
            }
        }
        out
    }

    /// Disjoint sum; both operands must share an alphabet.
    pub fn union(&self, other: &Nfa<S>) -> Result<Nfa<S>> {
        self.check_alphabet(other)?;
        let mut out = self.clone();
        let off = out.len();
        for _ in 0..other.len() {
            out.add_state();
        }
        for (q, a, t) in other.transitions() {
            out.add_transition(q + off, a.clone(), t + off);
        }
        for (q, t) in other.epsilons() {
            out.add_epsilon(q + off, t + off);
        }
        for &q in &other.initial {
            out.set_initial(q + off);
        }
        for &q in &other.accepting {
            out.set_accepting(q + off);
        }
        Ok(out)
    }

    /// Shortest accepted word; among those of minimal length, the
    /// lexicographically least one.
    pub fn shortest_accepted(&self) -> Option<Vec<S>> {
        type Parent<S> = BTreeMap<usize, Option<(usize, Option<S>)>>;
        // Each layer lists states reached by words of one length, ordered by
        // the word that first reached them; ε-successors are placed directly
        // after their source so the order stays lexicographic.
        let visit = |seeds: Vec<(usize, Option<(usize, Option<S>)>)>, parent: &mut Parent<S>| {
            let mut out = Vec::new();
            for (q, par) in seeds {
                if parent.contains_key(&q) {
                    continue;
                }
                parent.insert(q, par);
                let mut stack = vec![q];
                while let Some(r) = stack.pop() {
                    out.push(r);
                    for &t in self.eps[r].iter().rev() {
                        if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(t) {
                            e.insert(Some((r, None)));
                            stack.push(t);
                        }
                    }
                }
            }
            out
        };
        let mut parent: Parent<S> = BTreeMap::new();
        let seeds = self.initial.iter().map(|&q| (q, None)).collect();
        let mut layer = visit(seeds, &mut parent);
        loop {
            if let Some(&hit) = layer.iter().find(|q| self.accepting.contains(q)) {
                let mut word = Vec::new();
                let mut cur = hit;
                while let Some(Some((prev, a))) = parent.get(&cur).cloned() {
                    if let Some(a) = a {
                        word.push(a);
                    }
                    cur = prev;
                }
                word.reverse();
                return Some(word);
            }
            if layer.is_empty() {
                return None;
            }
            let mut seeds = Vec::new();
            for &q in &layer {
                for (a, ts) in &self.trans[q] {
                    for &t in ts {
                        seeds.push((t, Some((q, Some(a.clone())))));
                    }
                }
            }
            // Stable sort keeps prefix order for equal symbols.
            let rank: BTreeMap<usize, usize> =
                layer.iter().enumerate().map(|(i, &q)| (q, i)).collect();
            seeds.sort_by(|x, y| {
                let (px, ax) = x.1.as_ref().map(|(p, a)| (rank[p], a.as_ref())).unwrap();
                let (py, ay) = y.1.as_ref().map(|(p, a)| (rank[p], a.as_ref())).unwrap();
                (px, ax).cmp(&(py, ay))
            });
            layer = visit(seeds, &mut parent);
        }
    }

    pub fn is_empty_language(&self) -> bool {
        self.shortest_accepted().is_none()
    }

    /// `L(self) ⊆ L(other)`, with a shortest witness word when it fails.
    pub fn included_in(&self, other: &Nfa<S>) -> Result<Option<Vec<S>>> {
        let sigma: BTreeSet<S> = self.alphabet.union(&other.alphabet).cloned().collect();
        let a = self.with_alphabet(&sigma);
        let b = other.with_alphabet(&sigma).complement();
        Ok(a.intersect(&b)?.shortest_accepted())
    }

    pub fn equivalent(&self, other: &Nfa<S>) -> Result<bool> {
        Ok(self.included_in(other)?.is_none() && other.included_in(self)?.is_none())
    }

    /// Image under a letter-to-letter map; used to compare automata over
    /// different symbol types.
    pub fn map_symbols<T: Ord + Clone>(&self, f: impl Fn(&S) -> T) -> Nfa<T> {
        let mut out = Nfa::new(self.alphabet.iter().map(&f).collect());
        for _ in 0..self.len() {
            out.add_state();
        }
        for (q, a, t) in self.transitions() {
            out.add_transition(q, f(a), t);
        }
        for (q, t) in self.epsilons() {
            out.add_epsilon(q, t);
        }
        out.initial = self.initial.clone();
        out.accepting = self.accepting.clone();
        out
    }
}
