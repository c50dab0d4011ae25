//! Regular properties of HDA languages, local independence and
//! trace-closure checks.
//!
//! Properties are read letter by letter: an edge carrying a composite word
//! contributes each of its actions in order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::automata::Nfa;
use crate::error::{Error, Result};
use crate::hda::{Hda, Word};
use crate::pcs::Side;

/// A regular language `L ⊆ Σ*` over action letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Property {
    pub name: String,
    pub nfa: Nfa<String>,
}

impl Property {
    pub fn alphabet(&self) -> &BTreeSet<String> {
        self.nfa.alphabet()
    }

    pub fn accepts<S: AsRef<str>>(&self, word: &[S]) -> bool {
        let w: Vec<String> = word.iter().map(|s| s.as_ref().to_string()).collect();
        self.nfa.accepts(&w)
    }
}

/// Unordered pairs of labels realized by the two front faces of a square.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IndependenceRelation {
    pairs: BTreeSet<(Word, Word)>,
}

impl IndependenceRelation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: Word, b: Word) {
        let pair = if a <= b { (a, b) } else { (b, a) };
        self.pairs.insert(pair);
    }

    pub fn contains(&self, a: &Word, b: &Word) -> bool {
        let pair = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        self.pairs.contains(&pair)
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(Word, Word)> + '_ {
        self.pairs.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_subset(&self, other: &IndependenceRelation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }
}

impl fmt::Display for IndependenceRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in &self.pairs {
            writeln!(f, "{{{a}, {b}}}")?;
        }
        Ok(())
    }
}

/// Label pairs `{λ(d^0_1 z), λ(d^0_2 z)}` over all squares `z`.
pub fn local_independence(a: &Hda) -> IndependenceRelation {
    let p = a.pcs();
    let mut r = IndependenceRelation::new();
    for z in p.cubes_of_degree(2) {
        let (e1, e2) = (p.face(z, Side::Front, 1), p.face(z, Side::Front, 2));
        if let (Some(w1), Some(w2)) = (a.label(e1), a.label(e2)) {
            r.insert(w1.clone(), w2.clone());
        }
    }
    r
}

enum Atom {
    Sym(BTreeSet<String>),
    Star(BTreeSet<String>),
}

/// The language of a sequence of letter-set atoms and starred letter sets.
fn sequence(sigma: &BTreeSet<String>, atoms: &[Atom]) -> Nfa<String> {
    let mut n = Nfa::new(sigma.clone());
    let mut cur = n.add_state();
    n.set_initial(cur);
    for atom in atoms {
        let next = n.add_state();
        match atom {
            Atom::Sym(set) => {
                for a in set {
                    n.add_transition(cur, a.clone(), next);
                }
            }
            Atom::Star(set) => {
                n.add_epsilon(cur, next);
                for a in set {
                    n.add_transition(next, a.clone(), next);
                }
            }
        }
        cur = next;
    }
    n.set_accepting(cur);
    n
}

fn all(sigma: &BTreeSet<String>) -> Atom {
    Atom::Star(sigma.clone())
}

fn sym(a: &str) -> Atom {
    Atom::Sym(BTreeSet::from([a.to_string()]))
}

fn star_without(sigma: &BTreeSet<String>, excluded: &[&str]) -> Atom {
    Atom::Star(
        sigma
            .iter()
            .filter(|a| !excluded.contains(&a.as_str()))
            .cloned()
            .collect(),
    )
}

fn avoid(sigma: &BTreeSet<String>, atoms: &[Atom]) -> Nfa<String> {
    sequence(sigma, atoms).complement()
}

fn intersect_all(sigma: &BTreeSet<String>, parts: Vec<Nfa<String>>) -> Nfa<String> {
    parts
        .into_iter()
        .reduce(|a, b| a.intersect(&b).expect("same alphabet"))
        .unwrap_or_else(|| Nfa::universal(sigma.clone()))
}

pub const TEMPLATES: [&str; 5] = ["order", "mutex", "starvation-finite", "no-repeat", "overtake"];

/// Instantiates a property template over the alphabet `sigma`:
///
/// - `order a b`: `Σ*·a·Σ*·b·Σ*`
/// - `mutex c0 c1 r0 r1`: no `c_i` followed by `c_{1−i}` without `r_i` in between
/// - `starvation-finite r c [r' c' …]`: every `r` is eventually followed by `c`
/// - `no-repeat a b…`: no two `a` without one of `b…` in between
/// - `overtake r c o`: after `r`, `o` does not occur twice before `c`
pub fn build_property(template: &str, args: &[String], sigma: &BTreeSet<String>) -> Result<Property> {
    for a in args {
        if !sigma.contains(a) {
            return Err(Error::arg(format!("symbol `{a}` is not in the alphabet")));
        }
    }
    let arity = |ok: bool, expected: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::arg(format!(
                "template `{template}` expects {expected}, got {} arguments",
                args.len()
            )))
        }
    };
    let s = |i: usize| args[i].as_str();
    let nfa = match template {
        "order" => {
            arity(args.len() == 2, "2 symbols")?;
            sequence(sigma, &[all(sigma), sym(s(0)), all(sigma), sym(s(1)), all(sigma)])
        }
        "mutex" => {
            arity(args.len() == 4, "crit_0 crit_1 release_0 release_1")?;
            let part = |i: usize| {
                avoid(
                    sigma,
                    &[
                        all(sigma),
                        sym(s(i)),
                        star_without(sigma, &[s(2 + i)]),
                        sym(s(1 - i)),
                        all(sigma),
                    ],
                )
            };
            intersect_all(sigma, vec![part(0), part(1)])
        }
        "starvation-finite" => {
            arity(!args.is_empty() && args.len().is_multiple_of(2), "request/crit pairs")?;
            let parts = args
                .chunks(2)
                .map(|rc| {
                    avoid(
                        sigma,
                        &[all(sigma), sym(&rc[0]), star_without(sigma, &[&rc[1]])],
                    )
                })
                .collect();
            intersect_all(sigma, parts)
        }
        "no-repeat" => {
            arity(args.len() >= 2, "a symbol and at least one separator")?;
            let seps: Vec<&str> = args[1..].iter().map(String::as_str).collect();
            avoid(
                sigma,
                &[all(sigma), sym(s(0)), star_without(sigma, &seps), sym(s(0)), all(sigma)],
            )
        }
        "overtake" => {
            arity(args.len() == 3, "request crit other")?;
            avoid(
                sigma,
                &[
                    all(sigma),
                    sym(s(0)),
                    star_without(sigma, &[s(1)]),
                    sym(s(2)),
                    star_without(sigma, &[s(1)]),
                    sym(s(2)),
                    all(sigma),
                ],
            )
        }
        other => {
            return Err(Error::arg(format!(
                "unknown template `{other}`; known: {}",
                TEMPLATES.join(", ")
            )))
        }
    };
    Ok(Property {
        name: format!("{template}({})", args.join(", ")),
        nfa,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    Complement,
    Intersect,
    Union,
}

/// Boolean combination of properties over one alphabet.
pub fn combine(op: BoolOp, args: &[Property]) -> Result<Property> {
    let first = args.first().ok_or_else(|| Error::arg("no operands"))?;
    if let Some(p) = args.iter().find(|p| p.alphabet() != first.alphabet()) {
        return Err(Error::arg(format!(
            "alphabet of `{}` differs from that of `{}`",
            p.name, first.name
        )));
    }
    let names: Vec<&str> = args.iter().map(|p| p.name.as_str()).collect();
    let (name, nfa) = match op {
        BoolOp::Complement => {
            if args.len() != 1 {
                return Err(Error::arg("complement takes one operand"));
            }
            (format!("not {}", first.name), first.nfa.complement())
        }
        BoolOp::Intersect => {
            let mut n = first.nfa.clone();
            for p in &args[1..] {
                n = n.intersect(&p.nfa)?;
            }
            (names.join(" and "), n)
        }
        BoolOp::Union => {
            let mut n = first.nfa.clone();
            for p in &args[1..] {
                n = n.union(&p.nfa)?;
            }
            (names.join(" or "), n)
        }
    };
    Ok(Property { name, nfa })
}

/// Decides `L(A) ⊆ L`. On failure returns a shortest violating word,
/// lexicographically least among those.
pub fn has_property(a: &Hda, l: &Property) -> Result<(bool, Option<Word>)> {
    let lang = a.letter_automaton();
    match lang.included_in(&l.nfa)? {
        None => Ok((true, None)),
        Some(w) => Ok((false, Some(Word(w)))),
    }
}

/// Transition function of a deterministic automaton.
fn delta(d: &Nfa<String>) -> BTreeMap<(usize, String), usize> {
    d.transitions().map(|(q, a, t)| ((q, a.clone()), t)).collect()
}

/// Words of `L` with one factor `u·v` replaced by `v·u`.
fn swap_image(l: &Nfa<String>, u: &[String], v: &[String]) -> Nfa<String> {
    let mut sigma = l.alphabet().clone();
    sigma.extend(u.iter().chain(v).cloned());
    let d = l.with_alphabet(&sigma).determinize();
    let dt = delta(&d);
    let n = d.len();
    let mut out = Nfa::new(sigma);
    for _ in 0..2 * n {
        out.add_state();
    }
    for (q, a, t) in d.transitions() {
        out.add_transition(q, a.clone(), t);
        out.add_transition(n + q, a.clone(), n + t);
    }
    for &q in d.initial() {
        out.set_initial(q);
    }
    for &q in d.accepting() {
        out.set_accepting(n + q);
    }
    let read: Vec<&String> = u.iter().chain(v).collect();
    let write: Vec<&String> = v.iter().chain(u).collect();
    for q in 0..n {
        let mut r = Some(q);
        for a in &read {
            r = r.and_then(|s| dt.get(&(s, (*a).clone())).copied());
        }
        let Some(r) = r else { continue };
        let mut cur = q;
        for (j, a) in write.iter().enumerate() {
            let next = if j + 1 == write.len() { n + r } else { out.add_state() };
            out.add_transition(cur, (*a).clone(), next);
            cur = next;
        }
    }
    out
}

/// A word of `L` that leaves `L` after swapping one adjacent pair of
/// independent labels, or `None` if `L` is closed under such swaps.
pub fn trace_closure_violation(
    l: &Property,
    r: &IndependenceRelation,
) -> Result<Option<(Word, Word, Word)>> {
    for (a, b) in r.pairs() {
        if a == b || a.is_empty() || b.is_empty() {
            continue;
        }
        for (u, v) in [(a, b), (b, a)] {
            let image = swap_image(&l.nfa, u.letters(), v.letters());
            if let Some(w) = image.included_in(&l.nfa)? {
                return Ok(Some((u.clone(), v.clone(), Word(w))));
            }
        }
    }
    Ok(None)
}

/// Sufficient condition for dihomotopy invariance: `L` is closed under
/// swapping adjacent labels that are independent according to `r`.
pub fn is_trace_closed(l: &Property, r: &IndependenceRelation) -> Result<bool> {
    Ok(trace_closure_violation(l, r)?.is_none())
}

/// [`is_trace_closed`] against the local independence of `a`.
pub fn is_invariant_for(a: &Hda, l: &Property) -> Result<bool> {
    is_trace_closed(l, &local_independence(a))
}

/// An unresolved property file: templates are instantiated against the
/// alphabet of the model being checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropertySpec {
    /// Intersection of template instances.
    Templates(Vec<(String, Vec<String>)>),
    Automaton(Nfa<String>),
}

impl PropertySpec {
    pub fn resolve(&self, sigma: &BTreeSet<String>) -> Result<Property> {
        match self {
            PropertySpec::Templates(list) => {
                let mut sigma = sigma.clone();
                // Symbols named by templates belong to the alphabet even when the model lacks them.
                sigma.extend(list.iter().flat_map(|(_, a)| a.iter().cloned()));
                let parts: Vec<Property> = list
                    .iter()
                    .map(|(t, args)| build_property(t, args, &sigma))
                    .collect::<Result<_>>()?;
                match parts.len() {
                    0 => Ok(Property {
                        name: "true".into(),
                        nfa: Nfa::universal(sigma),
                    }),
                    1 => Ok(parts.into_iter().next().expect("one part")),
                    _ => combine(BoolOp::Intersect, &parts),
                }
            }
            PropertySpec::Automaton(n) => {
                let mut s = n.alphabet().clone();
                s.extend(sigma.iter().cloned());
                Ok(Property {
                    name: "automaton".into(),
                    nfa: n.with_alphabet(&s),
                })
            }
        }
    }
}
