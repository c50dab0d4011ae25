//! Free-face collapse of a 2-cube whose trace-category and homology-graph
//! conditions are checked individually, for cases where the corner vertex is
//! reached by more than one edge.

use std::collections::BTreeSet;

use super::collapse::{
    alternative_edge_check, check_index, free_face_check, regular_check, unique_edge_check,
    weakly_regular_check,
};
use super::{Check, Judgment, Status, Theorem};
use crate::dipath::{cancellation_sufficient, divides, Path};
use crate::error::{Error, Result};
use crate::hda::Hda;
use crate::homology::{homology_iso_as_graphs, GraphMode, GraphPairing, IsoVerdict};
use crate::pcs::{CubeId, PrecubicalSet, Side};
use crate::Limits;

fn unknown(name: &'static str, witness: String) -> Check {
    Check {
        name: name.into(),
        status: Status::Unknown,
        witness: Some(witness),
    }
}

/// Every path in `q` from `targets` to the corner (k = 1), or from the corner
/// to `targets` (k = 0), is `k`-divisible by the corner edge.
fn divisibility_check(
    q: &PrecubicalSet,
    e: &Path,
    k: Side,
    targets: &BTreeSet<CubeId>,
    limits: &Limits,
) -> Result<Check> {
    let name = "divisibility";
    let corner = match k {
        Side::Back => e.end(),
        Side::Front => e.start(),
    };
    let max_len = 2 * q.count_of_degree(0) + 2;
    let mut stack = vec![Path::vertex(corner)];
    let mut seen = 0usize;
    let mut bounded = None;
    while let Some(s) = stack.pop() {
        seen += 1;
        if seen > limits.paths {
            return Ok(unknown(name, format!("more than {} suffixes explored", limits.paths)));
        }
        let d = match divides(q, e, &s, k, limits) {
            Ok(d) => d,
            Err(Error::Budget { .. }) => {
                return Ok(unknown(name, format!("dihomotopy class of {s} too large")))
            }
            Err(err) => return Err(err),
        };
        if d.divisible {
            continue;
        }
        let open_end = match k {
            Side::Back => s.start(),
            Side::Front => s.end(),
        };
        if targets.contains(&open_end) {
            return Ok(Check::new(name, false, Some(format!("path {s} is not divisible"))));
        }
        if s.len() >= max_len {
            bounded.get_or_insert(s);
            continue;
        }
        let next: Vec<Path> = match k {
            Side::Back => q
                .in_edges(open_end)
                .map(|y| Path::edge(q, y).and_then(|p| p.concat(&s).ok_or_else(|| Error::arg("path"))))
                .collect::<Result<_>>()?,
            Side::Front => q
                .out_edges(open_end)
                .map(|y| Path::edge(q, y).and_then(|p| s.concat(&p).ok_or_else(|| Error::arg("path"))))
                .collect::<Result<_>>()?,
        };
        stack.extend(next.into_iter().rev());
    }
    Ok(match bounded {
        Some(s) => unknown(name, format!("undecided beyond length {max_len}, e.g. {s}")),
        None => Check::new(name, true, None),
    })
}

/// Cancellation of the corner edge, directly or through a chain of unique
/// incoming (k = 1) or outgoing (k = 0) edges.
fn uniqueness_check(q: &PrecubicalSet, e: &Path, k: Side, limits: &Limits) -> Result<Check> {
    let name = "unique-quotient";
    let mut g = e.clone();
    for _ in 0..=q.count_of_degree(0) {
        match cancellation_sufficient(q, &g, k, limits) {
            Ok(Some(reason)) => {
                return Ok(Check::new(
                    name,
                    true,
                    Some(format!("{reason:?} for {g}")),
                ))
            }
            Ok(None) => {}
            Err(Error::Budget { .. }) => break,
            Err(err) => return Err(err),
        }
        let ext: Vec<CubeId> = match k {
            Side::Back => q.in_edges(g.start()).collect(),
            Side::Front => q.out_edges(g.end()).collect(),
        };
        let [y] = ext[..] else { break };
        let y = Path::edge(q, y)?;
        let longer = match k {
            Side::Back => y.concat(&g),
            Side::Front => g.concat(&y),
        };
        match longer {
            Some(l) => g = l,
            None => break,
        }
    }
    Ok(unknown(name, format!("no cancellation argument found for {e}")))
}

fn homology_graph_check(
    p: &PrecubicalSet,
    q: &PrecubicalSet,
    unique_edge: bool,
    limits: &Limits,
) -> Result<Check> {
    let name = "homology-graph";
    if unique_edge {
        return Ok(Check::new(name, true, Some("unique-edge criterion".into())));
    }
    let mode = if p.len() <= limits.oracle_cells {
        GraphMode::Bruteforce
    } else {
        GraphMode::Exact
    };
    let pairing = GraphPairing::inclusion(p, q)?;
    match homology_iso_as_graphs(p, q, &pairing, mode, limits) {
        Ok(IsoVerdict::Iso) => Ok(Check::new(name, true, Some(format!("{mode:?} comparison")))),
        Ok(IsoVerdict::NotIso(w)) => Ok(Check::new(name, false, Some(w))),
        Ok(IsoVerdict::Inconclusive(u)) => Ok(unknown(name, format!("{} undecided pairs", u.len()))),
        Err(Error::Budget { what, limit }) => Ok(unknown(name, format!("{what} over {limit}"))),
        Err(e) => Err(e),
    }
}

/// Checks that collapsing the free face `d^k_i x` of a regular 2-cube is a
/// topological abstraction, testing its trace-category conditions by path
/// enumeration and its homology-graph condition exhaustively.
pub fn check_manual_2cube(
    a: &Hda,
    x: CubeId,
    k: Side,
    i: usize,
    limits: &Limits,
) -> Result<Judgment> {
    let p = a.pcs();
    let n = check_index(p, x, i)?;
    if n != 2 {
        return Err(Error::pre(format!("cube {x} has degree {n}, not 2")));
    }
    let mut checks = vec![weakly_regular_check(p), regular_check(p, x, n)];
    checks.push(free_face_check(p, x, k, i)?);
    if checks.iter().any(|c| !c.passed()) {
        return Ok(Judgment::from_checks(Theorem::Manual2Cube, checks));
    }
    checks.push(alternative_edge_check(p, x, k, i));
    let free = p.face(x, k, i);
    let q = p.without(&p.star(free)?);
    let e = Path::edge(&q, p.corner_edge(x, k, i)?)?;
    let reach = p.reachability();
    let mut targets: BTreeSet<CubeId> = a.initial().iter().chain(a.finals()).copied().collect();
    targets.extend(&reach.m0);
    targets.extend(&reach.m1);
    let own = match k {
        Side::Back => p.final_vertex(x),
        Side::Front => p.initial_vertex(x),
    };
    targets.insert(own);
    checks.push(divisibility_check(&q, &e, k, &targets, limits)?);
    checks.push(uniqueness_check(&q, &e, k, limits)?);
    let unique_edge = unique_edge_check(p, x, k, i)?.passed();
    checks.push(homology_graph_check(p, &q, unique_edge, limits)?);
    let b = a.with_pcs(q);
    let same = a.accessibility() == b.accessibility();
    checks.push(Check::new("accessibility-equal", same, None));
    Ok(Judgment::from_checks(Theorem::Manual2Cube, checks))
}

pub fn collapse_manual_2cube(
    a: &Hda,
    x: CubeId,
    k: Side,
    i: usize,
    force: bool,
    limits: &Limits,
) -> Result<(Hda, Judgment)> {
    let j = check_manual_2cube(a, x, k, i, limits)?;
    if !j.applicable && !force {
        return Err(Error::Refused(Box::new(j)));
    }
    let b = super::collapse::remove_star_keeping_states(a, a.pcs().face(x, k, i))?;
    Ok((b, if j.applicable { j } else { j.forced() }))
}
