//! Random weakly regular complexes for property tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use hda_core::pcs::tensor_with_map;
use hda_core::{CubeId, Hda, PcsBuilder, PrecubicalSet, Word};
use rand::seq::IteratorRandom;
use rand::Rng;

/// A directed cycle on `n ≥ 2` vertices.
pub fn cycle(n: usize) -> PrecubicalSet {
    let mut b = PcsBuilder::new();
    let vs: Vec<CubeId> = (0..n).map(|_| b.vertex()).collect();
    for i in 0..n {
        b.edge(vs[i], vs[(i + 1) % n]);
    }
    b.build().unwrap()
}

/// Tensor product of the factors, with each edge labeled by the factor it
/// moves in (`a`, `b`, `c`, ...).
pub fn labeled_product(factors: &[PrecubicalSet]) -> (PrecubicalSet, BTreeMap<CubeId, Word>) {
    let mut acc = PrecubicalSet::point();
    // Product id -> index of the factor whose edge it contains, for edges.
    let mut dir: BTreeMap<CubeId, usize> = BTreeMap::new();
    for (k, f) in factors.iter().enumerate() {
        let (next, map) = tensor_with_map(&acc, f);
        let mut ndir = BTreeMap::new();
        for (&(x, y), &c) in &map {
            match (acc.dim(x), f.dim(y)) {
                (1, 0) => {
                    ndir.insert(c, dir[&x]);
                }
                (0, 1) => {
                    ndir.insert(c, k);
                }
                _ => {}
            }
        }
        acc = next;
        dir = ndir;
    }
    let labels = dir
        .into_iter()
        .map(|(e, k)| (e, Word::letter(((b'a' + k as u8) as char).to_string())))
        .collect();
    (acc, labels)
}

fn shape(rng: &mut impl Rng) -> Vec<PrecubicalSet> {
    let i = |n| PrecubicalSet::interval(0, n).unwrap();
    match rng.gen_range(0..8) {
        0 => vec![i(2), i(2)],
        1 => vec![i(3), i(2)],
        2 => vec![i(3), i(3)],
        3 => vec![i(1), i(1), i(1)],
        4 => vec![i(2), i(1), i(1)],
        5 => vec![cycle(3), i(2)],
        6 => vec![cycle(3), i(1), i(1)],
        _ => vec![i(2), i(2), i(1)],
    }
}

/// A random precubical subset of a small grid or cylinder with at most
/// `max_cells` cells, labeled by direction, with random initial and final
/// states. Cylinders make some samples cyclic.
pub fn random_complex(rng: &mut impl Rng, max_cells: usize) -> Hda {
    loop {
        let (p, labels) = labeled_product(&shape(rng));
        let top = p.max_degree().unwrap_or(0);
        let seed: Vec<CubeId> = p
            .ids()
            .filter(|&x| {
                let keep = if p.dim(x) == top { 0.6 } else { 0.08 };
                rng.gen_bool(keep)
            })
            .collect();
        if seed.is_empty() {
            continue;
        }
        let q = p.restrict(&p.closure(seed).unwrap()).unwrap();
        if q.len() > max_cells {
            continue;
        }
        let r = q.reachability();
        let pick = |rng: &mut _, set: &std::collections::BTreeSet<CubeId>| {
            set.iter()
                .copied()
                .choose(rng)
                .unwrap_or_else(|| q.vertices().choose(rng).unwrap())
        };
        let init = pick(rng, &r.m1);
        let mut fin = vec![pick(rng, &r.m0)];
        if rng.gen_bool(0.3) {
            fin.push(q.vertices().choose(rng).unwrap());
        }
        let labels = labels
            .into_iter()
            .filter(|(e, _)| q.contains(*e))
            .collect();
        return Hda::new(q, [init].into(), fin.into_iter().collect(), labels);
    }
}
