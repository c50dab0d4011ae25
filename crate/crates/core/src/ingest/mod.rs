//! Program graphs, their parallel composition into an HDA, and built-in
//! example models.

mod fixtures;
mod parse;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::hda::{Hda, Word};
use crate::pcs::{CubeId, PcsBuilder};
use crate::Limits;

pub use fixtures::{builtin, builtin_names, fig2, fig6, fig1_program, peterson_program, Builtin};
pub use parse::parse_program_graph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    /// Largest value; the domain is `0..=max`.
    pub max: u32,
    /// Initial values; more than one yields several initial states.
    pub init: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Guard {
    True,
    Atom { var: String, value: u32, negated: bool },
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::True => f.write_str("true"),
            Guard::Atom { var, value, negated } => {
                write!(f, "{var} {} {value}", if *negated { "!=" } else { "=" })
            }
            Guard::And(gs) => write!(f, "({})", gs.iter().join(" & ")),
            Guard::Or(gs) => write!(f, "({})", gs.iter().join(" | ")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    Assign(Vec<(String, u32)>),
    /// An action without effect on the variables, such as `crit`.
    Named(String),
}

impl Action {
    /// The transition label of this action executed by process `pid`:
    /// `x:=_0 1` for assignments, `crit_0` for named actions.
    pub fn label(&self, pid: usize) -> String {
        match self {
            Action::Assign(list) => list
                .iter()
                .map(|(v, x)| format!("{v}:=_{pid} {x}"))
                .join(","),
            Action::Named(n) => format!("{n}_{pid}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instruction {
    pub from: usize,
    pub to: usize,
    pub guard: Guard,
    pub action: Action,
}

/// A sequential process: locations, finite-domain variables and guarded
/// instructions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramGraph {
    pub name: Option<String>,
    pub vars: Vec<VarDecl>,
    pub locations: Vec<String>,
    pub init: usize,
    pub finals: Vec<usize>,
    pub instructions: Vec<Instruction>,
}

/// Process locations followed by the values of all variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GlobalState {
    pub locations: Vec<usize>,
    pub valuation: Vec<u32>,
}

#[derive(Clone, Debug, Default)]
pub struct ComposeOptions {
    /// Variables that may be declared by several processes. `None` shares
    /// every variable by name.
    pub shared: Option<BTreeSet<String>>,
    /// Explicit initial valuations, each overriding the declared defaults for
    /// the listed variables. `None` uses every combination of declared initial values.
    pub initial_valuations: Option<Vec<BTreeMap<String, u32>>>,
    /// Final location tuples by name. `None` takes every combination of the
    /// processes' `final` locations (a process without any counts its initial location).
    pub finals: Option<Vec<Vec<String>>>,
    pub limits: Limits,
}

/// An HDA built from program graphs together with the global state of every vertex.
#[derive(Clone, Debug)]
pub struct Composed {
    pub hda: Hda,
    pub variables: Vec<String>,
    pub states: BTreeMap<CubeId, GlobalState>,
    location_names: Vec<Vec<String>>,
}

impl Composed {
    /// Renders a state as `(l0,l1,x=0,y=1)`.
    pub fn state_name(&self, v: CubeId) -> Option<String> {
        let s = self.states.get(&v)?;
        let locs = s
            .locations
            .iter()
            .enumerate()
            .map(|(p, &l)| self.location_names[p][l].clone());
        let vals = self
            .variables
            .iter()
            .zip(&s.valuation)
            .map(|(n, x)| format!("{n}={x}"));
        Some(format!("({})", locs.chain(vals).join(",")))
    }

    /// The vertex for the given location names and variable values.
    pub fn vertex(&self, locations: &[&str], valuation: &[(&str, u32)]) -> Option<CubeId> {
        let locs: Option<Vec<usize>> = locations
            .iter()
            .enumerate()
            .map(|(p, l)| self.location_names.get(p)?.iter().position(|x| x == l))
            .collect();
        let locs = locs?;
        self.states
            .iter()
            .find(|(_, s)| {
                s.locations == locs
                    && valuation.iter().all(|(n, x)| {
                        self.variables
                            .iter()
                            .position(|v| v == n)
                            .is_some_and(|i| s.valuation[i] == *x)
                    })
            })
            .map(|(&v, _)| v)
    }
}

struct Compiled {
    from: usize,
    to: usize,
    guard: CGuard,
    effect: Vec<(usize, u32)>,
    label: String,
}

enum CGuard {
    True,
    Atom(usize, u32, bool),
    And(Vec<CGuard>),
    Or(Vec<CGuard>),
}

impl CGuard {
    fn holds(&self, val: &[u32]) -> bool {
        match self {
            CGuard::True => true,
            CGuard::Atom(v, x, neg) => (val[*v] == *x) != *neg,
            CGuard::And(gs) => gs.iter().all(|g| g.holds(val)),
            CGuard::Or(gs) => gs.iter().any(|g| g.holds(val)),
        }
    }
}

fn compile_guard(g: &Guard, index: &BTreeMap<String, usize>) -> CGuard {
    match g {
        Guard::True => CGuard::True,
        Guard::Atom { var, value, negated } => CGuard::Atom(index[var], *value, *negated),
        Guard::And(gs) => CGuard::And(gs.iter().map(|g| compile_guard(g, index)).collect()),
        Guard::Or(gs) => CGuard::Or(gs.iter().map(|g| compile_guard(g, index)).collect()),
    }
}

fn guard_vars<'a>(g: &'a Guard, out: &mut Vec<&'a str>) {
    match g {
        Guard::True => {}
        Guard::Atom { var, .. } => out.push(var),
        Guard::And(gs) | Guard::Or(gs) => gs.iter().for_each(|g| guard_vars(g, out)),
    }
}

/// Step of process `pid` by instruction `instr` from `s`, if enabled.
fn step(procs: &[Vec<Compiled>], s: &GlobalState, pid: usize, instr: usize) -> Option<GlobalState> {
    let c = &procs[pid][instr];
    if s.locations[pid] != c.from || !c.guard.holds(&s.valuation) {
        return None;
    }
    let mut t = s.clone();
    t.locations[pid] = c.to;
    for &(v, x) in &c.effect {
        t.valuation[v] = x;
    }
    Some(t)
}

type CubeKey = (GlobalState, Vec<(usize, usize)>);

/// Parallel composition of program graphs over shared variables.
///
/// Vertices are the global states reachable from the initial ones, edges the
/// enabled instructions, labeled with the process index as subscript. A set of
/// k ≥ 2 actions of distinct processes enabled in a state spans a k-cube when
/// every execution order stays enabled and all orders end in the same state,
/// and all its (k−1)-faces exist. Ids are assigned in canonical state order,
/// so the output does not depend on exploration order.
pub fn compose(pgs: &[ProgramGraph], opts: &ComposeOptions) -> Result<Composed> {
    if pgs.is_empty() {
        return Err(Error::arg("no program graphs to compose"));
    }
    let mut decls: Vec<VarDecl> = Vec::new();
    let mut declared_by: BTreeMap<String, usize> = BTreeMap::new();
    for pg in pgs {
        for d in &pg.vars {
            match decls.iter().find(|e| e.name == d.name) {
                None => decls.push(d.clone()),
                Some(e) => {
                    if e.max != d.max || e.init != d.init {
                        return Err(Error::pre(format!(
                            "inconsistent declarations of shared variable `{}`",
                            d.name
                        )));
                    }
                }
            }
            *declared_by.entry(d.name.clone()).or_default() += 1;
        }
    }
    if let Some(shared) = &opts.shared {
        if let Some(v) = shared.iter().find(|v| !declared_by.contains_key(*v)) {
            return Err(Error::arg(format!("shared variable `{v}` is not declared")));
        }
        if let Some((v, _)) = declared_by.iter().find(|(v, &n)| n > 1 && !shared.contains(*v)) {
            return Err(Error::pre(format!(
                "variable `{v}` is declared by several processes but not listed as shared"
            )));
        }
    }
    let index: BTreeMap<String, usize> =
        decls.iter().enumerate().map(|(i, d)| (d.name.clone(), i)).collect();
    let mut procs: Vec<Vec<Compiled>> = Vec::new();
    for (pid, pg) in pgs.iter().enumerate() {
        let mut list = Vec::new();
        for ins in &pg.instructions {
            let mut used = Vec::new();
            guard_vars(&ins.guard, &mut used);
            if let Action::Assign(a) = &ins.action {
                used.extend(a.iter().map(|(v, _)| v.as_str()));
            }
            if let Some(v) = used.iter().find(|v| !index.contains_key(**v)) {
                return Err(Error::arg(format!("process {pid}: undeclared variable `{v}`")));
            }
            let effect = match &ins.action {
                Action::Assign(a) => a.iter().map(|(v, x)| (index[v], *x)).collect(),
                Action::Named(_) => Vec::new(),
            };
            list.push(Compiled {
                from: ins.from,
                to: ins.to,
                guard: compile_guard(&ins.guard, &index),
                effect,
                label: ins.action.label(pid),
            });
        }
        procs.push(list);
    }

    let default_val: Vec<Vec<u32>> = decls.iter().map(|d| d.init.clone()).collect();
    let valuations: Vec<Vec<u32>> = match &opts.initial_valuations {
        None => default_val.iter().map(|v| v.iter().copied()).multi_cartesian_product().collect(),
        Some(list) => {
            let mut out = Vec::new();
            for over in list {
                let mut v: Vec<u32> = default_val.iter().map(|x| x[0]).collect();
                for (name, &x) in over {
                    let &i = index
                        .get(name)
                        .ok_or_else(|| Error::arg(format!("unknown variable `{name}`")))?;
                    if x > decls[i].max {
                        return Err(Error::arg(format!("value {x} outside the domain of `{name}`")));
                    }
                    v[i] = x;
                }
                out.push(v);
            }
            out
        }
    };
    // multi_cartesian_product of zero iterators yields nothing; no variables means one empty valuation.
    let valuations = if decls.is_empty() { vec![Vec::new()] } else { valuations };
    let init_locs: Vec<usize> = pgs.iter().map(|pg| pg.init).collect();
    let initial: BTreeSet<GlobalState> = valuations
        .into_iter()
        .map(|valuation| GlobalState {
            locations: init_locs.clone(),
            valuation,
        })
        .collect();

    // Exploration.
    let mut seen: BTreeSet<GlobalState> = initial.clone();
    let mut queue: VecDeque<GlobalState> = initial.iter().cloned().collect();
    let mut moves: BTreeMap<GlobalState, Vec<((usize, usize), GlobalState)>> = BTreeMap::new();
    if seen.len() > opts.limits.states {
        return Err(Error::budget("global states", opts.limits.states));
    }
    while let Some(s) = queue.pop_front() {
        let mut out = Vec::new();
        for (pid, list) in procs.iter().enumerate() {
            for instr in 0..list.len() {
                if let Some(t) = step(&procs, &s, pid, instr) {
                    if seen.insert(t.clone()) {
                        if seen.len() > opts.limits.states {
                            return Err(Error::budget("global states", opts.limits.states));
                        }
                        queue.push_back(t.clone());
                    }
                    out.push(((pid, instr), t));
                }
            }
        }
        moves.insert(s, out);
    }

    let mut b = PcsBuilder::new();
    let mut vertex: BTreeMap<GlobalState, CubeId> = BTreeMap::new();
    let mut states = BTreeMap::new();
    for s in &seen {
        let v = b.vertex();
        vertex.insert(s.clone(), v);
        states.insert(v, s.clone());
    }
    let mut cubes: BTreeMap<CubeKey, CubeId> = BTreeMap::new();
    let mut labels = BTreeMap::new();
    for (s, out) in &moves {
        for (act, t) in out {
            let e = b.edge(vertex[s], vertex[t]);
            labels.insert(e, Word::letter(procs[act.0][act.1].label.clone()));
            cubes.insert((s.clone(), vec![*act]), e);
        }
    }
    for k in 2..=pgs.len() {
        for (s, out) in &moves {
            let acts: Vec<(usize, usize)> = out.iter().map(|(a, _)| *a).collect();
            for set in acts.iter().copied().combinations(k) {
                if set.iter().map(|a| a.0).dedup().count() != k {
                    continue;
                }
                if !diamond_complete(&procs, s, &set) {
                    continue;
                }
                let mut faces = Vec::with_capacity(k);
                for j in 0..k {
                    let mut rest = set.clone();
                    let a = rest.remove(j);
                    let Some(t) = step(&procs, s, a.0, a.1) else { break };
                    let (Some(&f0), Some(&f1)) = (
                        cubes.get(&(s.clone(), rest.clone())),
                        cubes.get(&(t, rest)),
                    ) else {
                        break;
                    };
                    faces.push((f0, f1));
                }
                if faces.len() == k {
                    let c = b.cube(&faces);
                    cubes.insert((s.clone(), set), c);
                }
            }
        }
    }
    let pcs = b.build()?;

    let location_names: Vec<Vec<String>> = pgs.iter().map(|pg| pg.locations.clone()).collect();
    let final_tuples: BTreeSet<Vec<usize>> = match &opts.finals {
        Some(tuples) => {
            let mut out = BTreeSet::new();
            for t in tuples {
                if t.len() != pgs.len() {
                    return Err(Error::arg(format!(
                        "final tuple of length {} for {} processes",
                        t.len(),
                        pgs.len()
                    )));
                }
                let idx: Result<Vec<usize>> = t
                    .iter()
                    .enumerate()
                    .map(|(p, l)| {
                        location_names[p]
                            .iter()
                            .position(|x| x == l)
                            .ok_or_else(|| Error::arg(format!("process {p} has no location `{l}`")))
                    })
                    .collect();
                out.insert(idx?);
            }
            out
        }
        None => pgs
            .iter()
            .map(|pg| {
                if pg.finals.is_empty() {
                    vec![pg.init]
                } else {
                    pg.finals.clone()
                }
            })
            .multi_cartesian_product()
            .collect(),
    };
    let init = initial.iter().map(|s| vertex[s]).collect();
    let fin = seen
        .iter()
        .filter(|s| final_tuples.contains(&s.locations))
        .map(|s| vertex[s])
        .collect();
    Ok(Composed {
        hda: Hda::new(pcs, init, fin, labels),
        variables: decls.into_iter().map(|d| d.name).collect(),
        states,
        location_names,
    })
}

/// Every order of `set` is executable from `s` and all orders end in one state.
fn diamond_complete(procs: &[Vec<Compiled>], s: &GlobalState, set: &[(usize, usize)]) -> bool {
    let mut end: Option<GlobalState> = None;
    for order in set.iter().permutations(set.len()) {
        let mut cur = s.clone();
        for a in order {
            match step(procs, &cur, a.0, a.1) {
                Some(t) => cur = t,
                None => return false,
            }
        }
        match &end {
            None => end = Some(cur),
            Some(e) if *e != cur => return false,
            Some(_) => {}
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_program_parses() {
        let pg = fig1_program();
        assert_eq!(pg.instructions.len(), 4);
        assert_eq!(pg.locations.len(), 5);
    }

    #[test]
    fn peterson_program_parses() {
        let pg = peterson_program(0);
        assert_eq!(pg.instructions.len(), 4);
        let guarded: Vec<_> = pg
            .instructions
            .iter()
            .filter(|i| i.guard != Guard::True)
            .collect();
        assert_eq!(guarded.len(), 1);
        assert_eq!(guarded[0].action, Action::Named("crit".into()));
    }

    #[test]
    fn empty_source_is_an_error() {
        assert!(matches!(parse_program_graph(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn fig2_counts() {
        let c = compose(&[fig1_program(), fig1_program()], &ComposeOptions::default()).unwrap();
        let p = c.hda.pcs();
        assert_eq!(p.counts(), vec![23, 32, 8]);
        assert_eq!(c.hda.initial().len(), 1);
        assert_eq!(c.hda.finals().len(), 1);
        let f = *c.hda.finals().iter().next().unwrap();
        assert_eq!(c.state_name(f).unwrap(), "(l4,l4,x=0,y=0)");
        assert!(c.hda.validate().violations.is_empty());
        let acc = c.hda.accessibility();
        assert!(acc.accessible && acc.coaccessible);
    }

    #[test]
    fn peterson_counts() {
        let c = fig6();
        assert_eq!(c.hda.pcs().counts(), vec![20, 34, 10]);
        assert_eq!(c.hda.initial().len(), 2);
        assert_eq!(c.hda.initial(), c.hda.finals());
        assert!(c.hda.validate().violations.is_empty());
    }

    #[test]
    fn single_process_is_one_dimensional() {
        let c = compose(&[fig1_program()], &ComposeOptions::default()).unwrap();
        assert_eq!(c.hda.pcs().counts(), vec![5, 4]);
    }

    #[test]
    fn three_independent_processes_fill_a_cube() {
        let src = "loc a b\ninit a\nfinal b\nedge a -> b go";
        let pg = parse_program_graph(src).unwrap();
        let c = compose(&[pg.clone(), pg.clone(), pg], &ComposeOptions::default()).unwrap();
        assert_eq!(c.hda.pcs().counts(), vec![8, 12, 6, 1]);
        assert!(c.hda.validate().violations.is_empty());
    }

    #[test]
    fn state_budget() {
        let opts = ComposeOptions {
            limits: Limits {
                states: 5,
                ..Limits::default()
            },
            ..ComposeOptions::default()
        };
        let err = compose(&[fig1_program(), fig1_program()], &opts).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
    }

    #[test]
    fn shared_list_is_checked() {
        let opts = ComposeOptions {
            shared: Some(BTreeSet::from(["x".to_string()])),
            ..ComposeOptions::default()
        };
        assert!(compose(&[fig1_program(), fig1_program()], &opts).is_err());
        let opts = ComposeOptions {
            shared: Some(BTreeSet::from(["x".to_string(), "y".to_string()])),
            ..ComposeOptions::default()
        };
        assert!(compose(&[fig1_program(), fig1_program()], &opts).is_ok());
    }

    #[test]
    fn process_order_only_renames_subscripts() {
        let a = fig1_program();
        let b = parse_program_graph(
            "var x : 0..1 = 0\nvar y : 0..1 = 0\nloc m0 m1 m2\ninit m0\nfinal m2\n\
             edge m0 -> m1 [y = 0] y := 1\nedge m1 -> m2 y := 0",
        )
        .unwrap();
        let ab = compose(&[a.clone(), b.clone()], &ComposeOptions::default()).unwrap();
        let ba = compose(&[b, a], &ComposeOptions::default()).unwrap();
        assert_eq!(ab.hda.pcs().counts(), ba.hda.pcs().counts());
        let swap = |w: &Word| {
            Word(
                w.letters()
                    .iter()
                    .map(|l| l.replace("_0", "_#").replace("_1", "_0").replace("_#", "_1"))
                    .collect(),
            )
        };
        let relabeled = Hda::new(
            ba.hda.pcs().clone(),
            ba.hda.initial().clone(),
            ba.hda.finals().clone(),
            ba.hda.labels().iter().map(|(e, w)| (*e, swap(w))).collect(),
        );
        assert!(ab.hda.isomorphic_1skeleton(&relabeled));
    }
}
