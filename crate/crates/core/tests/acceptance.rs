//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hda_core::dipath::{dihomotopy_class, trace_category, Bound, Path};
use hda_core::homology::{
    chain_boundary, homology, homology_graph, homology_iso_as_graphs, Chain, GraphMode,
    GraphPairing, Homology, IsoVerdict, Ring,
};
use hda_core::ingest::{builtin, compose, peterson_program, ComposeOptions};
use hda_core::props::{build_property, has_property, is_trace_closed, local_independence};
use hda_core::reduce::{
    check_elementary, check_manual_2cube, check_vertex_star, collapse_elementary, reduce, replay,
    Guarantee, Judgment, ReduceOptions,
};
use hda_core::{CubeId, Hda, Limits, PrecubicalSet, Side, Word};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn peterson_end_to_end() -> Outcome {
    let pgs = [peterson_program(0), peterson_program(1)];
    let a = compose(&pgs, &ComposeOptions::default()).map_err(err)?.hda;
    let counts = a.pcs().counts();
    ensure(counts == [20, 34, 10], format!("composed counts {counts:?}"))?;
    let t = Instant::now();
    let opts = ReduceOptions {
        enable_manual: true,
        ..ReduceOptions::default()
    };
    let (b, report) = reduce(&a, &opts).map_err(err)?;
    let elapsed = t.elapsed();
    ensure(elapsed.as_secs_f64() < 10.0, format!("reduce took {elapsed:?}"))?;
    let fig8 = builtin("fig8").map_err(err)?.into_hda().map_err(err)?;
    ensure(b.pcs().counts() == [4, 8], format!("reduced counts {:?}", b.pcs().counts()))?;
    ensure(b.isomorphic_1skeleton(&fig8), "reduced model differs from the fig8 model")?;
    let again = replay(&a, &report).map_err(err)?;
    ensure(again == b, "replay differs")?;
    let (_, report2) = reduce(&a, &opts).map_err(err)?;
    ensure(report2 == report, "second run gives a different report")?;
    Ok(format!(
        "compose 20 vertices / 34 edges / 10 squares; reduce -> 4 vertices / 8 edges / 0 squares, labeled 1-skeleton isomorphic to fig8; {} steps in {:.2?}; replay exact",
        report.steps.len(),
        elapsed
    ))
}

fn properties_transfer() -> Outcome {
    let fig6 = builtin("fig6").map_err(err)?.into_hda().map_err(err)?;
    let fig8 = builtin("fig8").map_err(err)?.into_hda().map_err(err)?;
    let sigma = fig6.letters();
    let s = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let mut props = vec![
        build_property("mutex", &s(&["crit_0", "crit_1", "b_0:=_0 0", "b_1:=_1 0"]), &sigma),
        build_property(
            "starvation-finite",
            &s(&["b_0:=_0 1", "crit_0", "b_1:=_1 1", "crit_1"]),
            &sigma,
        ),
    ];
    for i in 0..2 {
        props.push(build_property(
            "overtake",
            &[format!("b_{i}:=_{i} 1"), format!("crit_{i}"), format!("crit_{}", 1 - i)],
            &sigma,
        ));
    }
    for a in sigma.iter().filter(|a| !a.starts_with("crit")) {
        props.push(build_property("no-repeat", &[a.clone(), "crit_0".into(), "crit_1".into()], &sigma));
    }
    let props: Vec<_> = props.into_iter().collect::<Result<_, _>>().map_err(err)?;
    let indep = local_independence(&fig6);
    for l in &props {
        for (name, m) in [("fig6", &fig6), ("fig8", &fig8)] {
            let (ok, w) = has_property(m, l).map_err(err)?;
            ensure(ok, format!("{} fails on {name}: {w:?}", l.name))?;
        }
        ensure(is_trace_closed(l, &indep).map_err(err)?, format!("{} not trace-closed", l.name))?;
    }
    let crit = (Word::letter("crit_0"), Word::letter("crit_1"));
    ensure(!indep.contains(&crit.0, &crit.1), "(crit_0, crit_1) is locally independent")?;
    Ok(format!(
        "{} template properties hold on both models and are trace-closed; {} independent pairs, (crit_0, crit_1) not among them",
        props.len(),
        indep.len()
    ))
}

fn edge_between(p: &PrecubicalSet, from: CubeId, to: CubeId) -> Result<CubeId, String> {
    p.out_edges(from)
        .find(|&e| p.target(e) == to)
        .ok_or_else(|| format!("no edge {from} -> {to}"))
}

/// The 1-cycle `upper − lower` for two vertex paths with common ends.
fn loop_chain(
    p: &PrecubicalSet,
    names: &BTreeMap<String, CubeId>,
    upper: &[&str],
    lower: &[&str],
) -> Result<Chain, String> {
    let mut c = Chain::new();
    for (path, sign) in [(upper, 1), (lower, -1)] {
        for w in path.windows(2) {
            let e = edge_between(p, names[w[0]], names[w[1]])?;
            *c.entry(e).or_default() += BigInt::from(sign);
        }
    }
    Ok(c)
}

fn node_of(h: &Homology, nodes: &[hda_core::homology::HomologyClassRef], c: &Chain) -> Result<usize, String> {
    let coords = h.coordinates(1, c).map_err(err)?;
    let neg: Vec<BigInt> = coords.iter().map(|x| -x).collect();
    nodes
        .iter()
        .position(|n| n.degree == 1 && (n.coords == coords || n.coords == neg))
        .ok_or_else(|| format!("class {coords:?} is not a graph node"))
}

fn fig2_metrics() -> Outcome {
    let fx = builtin("fig2").map_err(err)?;
    let names = fx.names.clone();
    let a = fx.into_hda().map_err(err)?;
    let p = a.pcs();
    let betti = homology(p, Ring::Integers).betti_trimmed();
    ensure(betti == [1, 2], format!("betti {betti:?}"))?;

    let tc = trace_category(&a, Bound::Auto, &Limits::default()).map_err(err)?;
    let (i, f) = (*a.initial().first().unwrap(), *a.finals().first().unwrap());
    let n = tc.hom(i, f).len();
    ensure(n == 4 && tc.complete, format!("{n} morphisms init -> final, complete = {}", tc.complete))?;

    let st = |l0: usize, l1: usize, x: u32, y: u32| format!("(l{l0},l{l1},x={x},y={y})");
    let around = |lo: usize, var_x: bool| -> Result<Chain, String> {
        let val = |a: usize, b: usize| {
            let busy = u32::from(a == lo + 1 || b == lo + 1);
            if var_x { st(a, b, busy, 0) } else { st(a, b, 0, busy) }
        };
        let upper: Vec<String> = vec![val(lo, lo), val(lo + 1, lo), val(lo + 2, lo), val(lo + 2, lo + 1), val(lo + 2, lo + 2)];
        let lower: Vec<String> = vec![val(lo, lo), val(lo, lo + 1), val(lo, lo + 2), val(lo + 1, lo + 2), val(lo + 2, lo + 2)];
        let u: Vec<&str> = upper.iter().map(String::as_str).collect();
        let l: Vec<&str> = lower.iter().map(String::as_str).collect();
        loop_chain(p, &names, &u, &l)
    };
    let h = Homology::compute(p);
    let g = homology_graph(p, GraphMode::Exact, &Limits::default()).map_err(err)?;
    let ul = node_of(&h, &g.nodes, &around(0, true)?)?;
    let lr = node_of(&h, &g.nodes, &around(2, false)?)?;
    ensure(ul != lr, "both holes give the same class")?;
    ensure(g.points(ul, lr), "the first hole does not point to the second")?;
    ensure(g.status(lr, ul).is_no(), "the second hole is not shown to miss the first")?;
    Ok(format!("betti {betti:?}; {n} morphisms init -> final (complete); homology graph has the early -> late hole edge only"))
}

fn fig4_regression() -> Outcome {
    let fx = builtin("fig4").map_err(err)?;
    let x = fx.id("x").map_err(err)?;
    let a = Hda::new(fx.pcs.clone(), BTreeSet::new(), BTreeSet::new(), BTreeMap::new());
    let (b, _) = collapse_elementary(&a, x, Side::Back, 2, true).map_err(err)?;
    let limits = Limits {
        oracle_cells: 21,
        ..Limits::default()
    };
    let pairing = GraphPairing::inclusion(a.pcs(), b.pcs()).map_err(err)?;
    match homology_iso_as_graphs(a.pcs(), b.pcs(), &pairing, GraphMode::Bruteforce, &limits).map_err(err)? {
        IsoVerdict::Iso => Ok(format!(
            "collapse of (x, 1, 2) leaves {:?}; bruteforce homology graphs identical",
            b.pcs().counts()
        )),
        other => Err(format!("{other:?}")),
    }
}

/// Identity-on-objects comparison of trace categories of a subset `b` of `a`.
fn trace_iso(a: &Hda, b: &Hda) -> Result<bool, String> {
    let limits = Limits::default();
    let ta = trace_category(a, Bound::Auto, &limits).map_err(err)?;
    let tb = trace_category(b, Bound::Auto, &limits).map_err(err)?;
    if ta.objects != tb.objects {
        return Ok(false);
    }
    for &v in &ta.objects {
        for &w in &ta.objects {
            let (ha, hb) = (ta.hom(v, w), tb.hom(v, w));
            if ha.len() != hb.len() {
                return Ok(false);
            }
            let images: BTreeSet<usize> = hb
                .iter()
                .filter_map(|c| ha.iter().position(|d| d.contains(c.canonical())))
                .collect();
            if images.len() != hb.len() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn candidate_steps(a: &Hda) -> Result<Vec<(Judgment, Hda)>, String> {
    let p = a.pcs();
    let mut out = Vec::new();
    for f in p.free_faces() {
        if p.dim(f.cube) < 2 {
            continue;
        }
        let j = check_elementary(a, f.cube, f.side, f.index).map_err(err)?;
        if j.applicable {
            let (b, j) = collapse_elementary(a, f.cube, f.side, f.index, false).map_err(err)?;
            out.push((j, b));
        } else if p.dim(f.cube) == 2 && p.len() <= 40 {
            let j = check_manual_2cube(a, f.cube, f.side, f.index, &Limits::default()).map_err(err)?;
            if j.applicable {
                let (b, j) = hda_core::reduce::collapse_manual_2cube(
                    a, f.cube, f.side, f.index, false, &Limits::default(),
                )
                .map_err(err)?;
                out.push((j, b));
            }
        }
    }
    for x in p.ids().filter(|&x| p.dim(x) >= 2 && p.is_regular(x)) {
        let n = p.dim(x);
        for bits in 1..(1usize << n) - 1 {
            let ks: Vec<Side> = (0..n)
                .map(|j| if bits >> j & 1 == 1 { Side::Back } else { Side::Front })
                .collect();
            let j = check_vertex_star(a, x, &ks).map_err(err)?;
            if j.applicable {
                let (b, j) = hda_core::reduce::collapse_vertex_star(a, x, &ks, false).map_err(err)?;
                out.push((j, b));
            }
        }
    }
    Ok(out)
}

fn collapse_invariance() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut complexes, mut steps, mut acyclic_steps) = (0, 0, 0);
    while complexes < 200 {
        let a = common::random_complex(&mut rng, 60);
        let p = a.pcs();
        ensure(p.is_weakly_regular().0, "generator produced a non weakly regular complex")?;
        complexes += 1;
        let before = homology(p, Ring::Integers);
        let r = p.reachability();
        for (j, b) in candidate_steps(&a)? {
            steps += 1;
            let q = b.pcs();
            if j.guarantees.contains(&Guarantee::HomotopyEquiv) {
                let after = homology(q, Ring::Integers);
                ensure(
                    before.betti_trimmed() == after.betti_trimmed(),
                    format!("homology changed: {:?} -> {:?}", before.betti(), after.betti()),
                )?;
            }
            if j.guarantees.contains(&Guarantee::ExtremalPreserved) {
                let s = q.reachability();
                ensure(r.m0 == s.m0 && r.m1 == s.m1, "extremal vertices changed")?;
            }
            if j.guarantees.contains(&Guarantee::AccessPreserved) {
                let (x, y) = (a.accessibility(), b.accessibility());
                ensure(
                    (x.accessible, x.coaccessible) == (y.accessible, y.coaccessible),
                    format!("accessibility changed: {x:?} -> {y:?} by {}", j.summary()),
                )?;
            }
            if j.guarantees.contains(&Guarantee::TraceIso) && r.is_acyclic() {
                acyclic_steps += 1;
                ensure(trace_iso(&a, &b)?, "trace category changed")?;
            }
        }
    }
    let elapsed = t.elapsed();
    ensure(elapsed.as_secs() < 120, format!("took {elapsed:?}"))?;
    ensure(steps > 0, "no collapse was applicable")?;
    Ok(format!(
        "{complexes} complexes, {steps} gated collapses ({acyclic_steps} with trace check) preserved homology, extremal vertices and accessibility in {elapsed:.2?}"
    ))
}

fn boundary_squares_to_zero(p: &PrecubicalSet) -> bool {
    let top = p.max_degree().unwrap_or(0);
    (1..top).all(|n| {
        let d1 = chain_boundary(p, n).unwrap();
        let d2 = chain_boundary(p, n + 1).unwrap();
        d1.compose(&d2).is_zero()
    })
}

fn oracle_agreement() -> Outcome {
    let mut models: Vec<(String, PrecubicalSet)> = Vec::new();
    for name in [
        "fig3b", "fig8", "circle", "two-circles", "torus", "grid1x1", "grid2x1", "grid1x2", "cube2",
        "cube1",
    ] {
        models.push((name.into(), builtin(name).map_err(err)?.pcs));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut generated = 0;
    let mut bad_boundary = 0;
    for k in 0..400 {
        let a = common::random_complex(&mut rng, 60);
        generated += 1;
        if !boundary_squares_to_zero(a.pcs()) {
            bad_boundary += 1;
        }
        if a.pcs().len() <= 20 && models.len() < 80 {
            models.push((format!("random-{k}"), a.pcs().clone()));
        }
    }
    let limits = Limits::default();
    let mut violations = 0;
    let mut pairs = 0;
    for (name, p) in &models {
        ensure(p.len() <= limits.oracle_cells, format!("{name} exceeds the oracle bound"))?;
        if !boundary_squares_to_zero(p) {
            bad_boundary += 1;
        }
        let search = homology_graph(p, GraphMode::search(), &limits).map_err(err)?;
        let oracle = homology_graph(p, GraphMode::Bruteforce, &limits).map_err(err)?;
        pairs += oracle.edges.len();
        violations += search.yes_edges().difference(&oracle.yes_edges()).count();
    }
    ensure(violations == 0, format!("{violations} search edges not confirmed by the oracle"))?;
    ensure(bad_boundary == 0, format!("{bad_boundary} complexes with nonzero boundary of boundary"))?;
    Ok(format!(
        "{} models <= 20 cells, {pairs} node pairs, 0 violations; boundary of boundary vanishes on {} complexes",
        models.len(),
        generated + models.len()
    ))
}

fn binomial(n: u64, k: u64) -> u64 {
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}

fn grid_combinatorics() -> Outcome {
    let mut violations = 0;
    let mut sizes = Vec::new();
    for m in 1..=4u64 {
        for n in 1..=4u64 {
            let fx = builtin(&format!("grid{m}x{n}")).map_err(err)?;
            let start = fx.id("start").map_err(err)?;
            let a = fx.into_hda().map_err(err)?;
            let p = a.pcs();
            let mut edges = Vec::new();
            let mut v = start;
            for letter in std::iter::repeat_n("a", m as usize).chain(std::iter::repeat_n("b", n as usize)) {
                let e = p
                    .out_edges(v)
                    .find(|&e| a.label(e) == Some(&Word::letter(letter)))
                    .ok_or("corner path missing")?;
                edges.push(e);
                v = p.target(e);
            }
            let w = Path::new(p, start, edges).map_err(err)?;
            let class = dihomotopy_class(p, &w, &Limits::default()).map_err(err)?;
            ensure(
                class.len() as u64 == binomial(m + n, m),
                format!("grid {m}x{n}: class size {} != {}", class.len(), binomial(m + n, m)),
            )?;
            sizes.push(class.len());
            let multiset = |q: &Path| {
                let mut ls: Vec<Word> = q.edges().iter().map(|e| a.label(*e).cloned().unwrap_or_default()).collect();
                ls.sort();
                ls
            };
            let reference = multiset(&w);
            violations += class
                .members()
                .iter()
                .filter(|q| q.len() != w.len() || multiset(q) != reference)
                .count();
        }
    }
    ensure(violations == 0, format!("{violations} members differ in length or labels"))?;
    Ok(format!("16 grids up to 4x4, class sizes {sizes:?} = binomial(m+n, m); 0 length/label violations"))
}

fn torus_and_circle() -> Outcome {
    let profile = |name: &str| -> Result<(Vec<usize>, bool), String> {
        let h = homology(&builtin(name).map_err(err)?.pcs, Ring::Integers);
        let torsion_free = h.degrees.iter().all(|d| d.torsion.is_empty());
        Ok((h.betti_trimmed(), torsion_free))
    };
    let circle = profile("circle")?;
    let torus = profile("torus")?;
    ensure(circle == (vec![1, 1], true), format!("circle {circle:?}"))?;
    ensure(torus == (vec![1, 2, 1], true), format!("torus {torus:?}"))?;
    Ok("circle (Z, Z); torus (Z, Z^2, Z)".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("peterson end-to-end", peterson_end_to_end),
        ("property transfer", properties_transfer),
        ("two-hole example metrics", fig2_metrics),
        ("three-square collapse regression", fig4_regression),
        ("collapse invariance suite", collapse_invariance),
        ("oracle agreement", oracle_agreement),
        ("dihomotopy combinatorics", grid_combinatorics),
        ("torus and circle homology", torus_and_circle),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
