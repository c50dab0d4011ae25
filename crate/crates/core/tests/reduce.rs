use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use hda_core::homology::{homology, homology_iso_as_graphs, GraphMode, GraphPairing, IsoVerdict, Ring};
use hda_core::ingest::builtin;
use hda_core::reduce::{
    certify, check_elementary, check_manual_2cube, check_merge, check_vertex_star,
    collapse_elementary, collapse_vertex_star, merge_edges, reduce, replay, Abstraction,
    CertifyOptions, Guarantee, ReduceOptions, ReductionReport, StepKind, Verdict,
};
use hda_core::{CubeId, Error, Hda, Limits, PcsBuilder, PrecubicalSet, Side, Word};

fn manual_opts() -> ReduceOptions {
    ReduceOptions {
        enable_manual: true,
        ..ReduceOptions::default()
    }
}

fn corners(p: &PrecubicalSet, x: CubeId) -> BTreeSet<CubeId> {
    let n = p.dim(x);
    (0..1usize << n)
        .map(|bits| {
            let ks: Vec<Side> = (0..n)
                .map(|j| if bits >> j & 1 == 1 { Side::Back } else { Side::Front })
                .collect();
            p.vertex_at(x, &ks).unwrap()
        })
        .collect()
}

/// The square spanned by the named vertices.
fn square(p: &PrecubicalSet, names: &BTreeMap<String, CubeId>, vs: &[&str]) -> CubeId {
    let want: BTreeSet<CubeId> = vs.iter().map(|v| names[*v]).collect();
    p.cubes_of_degree(2)
        .find(|&x| corners(p, x) == want)
        .unwrap_or_else(|| panic!("no square on {vs:?}"))
}

/// The (side, index) under which `e` is a face of `x`.
fn face_of(p: &PrecubicalSet, x: CubeId, e: CubeId) -> (Side, usize) {
    for i in 1..=p.dim(x) {
        for k in [Side::Front, Side::Back] {
            if p.face(x, k, i) == e {
                return (k, i);
            }
        }
    }
    panic!("{e} is not a face of {x}")
}

fn edge_between(p: &PrecubicalSet, from: CubeId, to: CubeId) -> CubeId {
    p.out_edges(from).find(|&e| p.target(e) == to).expect("edge exists")
}

fn labeled(pcs: PrecubicalSet, init: &[CubeId], fin: &[CubeId]) -> Hda {
    let labels = pcs.edges().map(|e| (e, Word::letter("a"))).collect();
    Hda::new(
        pcs,
        init.iter().copied().collect(),
        fin.iter().copied().collect(),
        labels,
    )
}

#[test]
fn peterson_reduces_to_four_states() {
    let a = builtin("fig6").unwrap().into_hda().unwrap();
    let t = Instant::now();
    let (b, report) = reduce(&a, &manual_opts()).unwrap();
    assert!(t.elapsed().as_secs() < 60);
    let fig8 = builtin("fig8").unwrap().into_hda().unwrap();
    assert_eq!(b.pcs().counts(), vec![4, 8]);
    assert!(b.isomorphic_1skeleton(&fig8));
    assert_eq!(replay(&a, &report).unwrap(), b);
    assert!(report.steps.iter().any(|s| matches!(s.kind, StepKind::Manual { .. })));
    assert_eq!(report.before, vec![20, 34, 10]);
    assert_eq!(report.after, vec![4, 8]);
    let words: BTreeSet<String> = b.labels().values().map(|w| w.to_string()).collect();
    assert!(words.iter().any(|w| w.ends_with("crit_1;b_1:=_1 0")), "{words:?}");
}

#[test]
fn reduce_is_deterministic() {
    let a = builtin("fig6").unwrap().into_hda().unwrap();
    let (b1, r1) = reduce(&a, &manual_opts()).unwrap();
    let (b2, r2) = reduce(&a, &manual_opts()).unwrap();
    assert_eq!(r1, r2);
    assert_eq!(b1, b2);
}

#[test]
fn reduce_without_manual_steps_stops_early() {
    let a = builtin("fig6").unwrap().into_hda().unwrap();
    let (b, report) = reduce(&a, &ReduceOptions::default()).unwrap();
    assert!(report.steps.iter().all(|s| !matches!(s.kind, StepKind::Manual { .. })));
    assert!(b.pcs().count_of_degree(2) > 0);
}

#[test]
fn lower_left_square_collapses_with_its_left_edge() {
    let fx = builtin("fig6").unwrap();
    let names = fx.names.clone();
    let a = fx.into_hda().unwrap();
    let p = a.pcs();
    let x = square(p, &names, &["q5", "q6", "q14", "q13"]);
    let e = edge_between(p, names["q5"], names["q13"]);
    assert_eq!(a.label(e).unwrap().to_string(), "t:=_0 1");
    let (k, i) = face_of(p, x, e);
    let j = check_elementary(&a, x, k, i).unwrap();
    assert!(j.applicable, "{}", j.summary());
    assert!(j.guarantees.contains(&Guarantee::HomotopyEquiv));
    let (b, _) = collapse_elementary(&a, x, k, i, false).unwrap();
    assert_eq!(p.len() - b.pcs().len(), 2);
    assert_eq!(homology(p, Ring::Integers).betti(), homology(b.pcs(), Ring::Integers).betti());
    assert_eq!(a.accessibility(), b.accessibility());

    // The lower left vertex of the upper left square is now collapsible.
    let up = square(b.pcs(), &names, &["q0", "U", "q6", "q5"]);
    let corner = b
        .pcs()
        .cubes_of_degree(0)
        .find(|&v| v == names["q5"])
        .unwrap();
    let ks = [Side::Back, Side::Front]
        .into_iter()
        .flat_map(|s| [[s, Side::Front], [s, Side::Back]])
        .find(|ks| b.pcs().vertex_at(up, ks).unwrap() == corner)
        .unwrap();
    let j = check_vertex_star(&b, up, &ks).unwrap();
    assert!(j.applicable, "{}", j.summary());
    let (c, _) = collapse_vertex_star(&b, up, &ks, false).unwrap();
    assert_eq!(b.pcs().len() - c.pcs().len(), 4);
}

#[test]
fn upper_right_square_needs_the_manual_argument() {
    let fx = builtin("fig7").unwrap();
    let names = fx.names.clone();
    let a = fx.into_hda().unwrap();
    let p = a.pcs();
    let x = square(p, &names, &["q2", "q3", "q8", "q7"]);
    let free: Vec<_> = p
        .free_faces()
        .into_iter()
        .filter(|f| f.cube == x && f.side == Side::Back)
        .collect();
    assert_eq!(free.len(), 1);
    let (k, i) = (free[0].side, free[0].index);
    let face = p.face(x, k, i);
    let ends = BTreeSet::from([p.source(face), p.target(face)]);
    assert_eq!(ends, BTreeSet::from([names["q7"], names["q8"]]));

    let j = check_elementary(&a, x, k, i).unwrap();
    assert!(!j.applicable);
    assert!(!j.check("unique-edge").unwrap().passed());
    match collapse_elementary(&a, x, k, i, false) {
        Err(Error::Refused(j)) => assert!(!j.check("unique-edge").unwrap().passed()),
        other => panic!("expected refusal, got {other:?}"),
    }
    let (_, forced) = collapse_elementary(&a, x, k, i, true).unwrap();
    assert!(forced.guarantees.is_empty());

    let m = check_manual_2cube(&a, x, k, i, &Limits::default()).unwrap();
    assert!(m.applicable, "{}", m.summary());
}

#[test]
fn manual_check_on_front_face_with_initial_corner_fails() {
    let fx = builtin("grid1x1").unwrap();
    let a = fx.into_hda().unwrap();
    let p = a.pcs();
    let x = p.cubes_of_degree(2).next().unwrap();
    // Both mixed corners become final: every face collapse now lands on one.
    let mut fin: Vec<CubeId> = a.finals().iter().copied().collect();
    fin.push(p.vertex_at(x, &[Side::Back, Side::Front]).unwrap());
    fin.push(p.vertex_at(x, &[Side::Front, Side::Back]).unwrap());
    let a = Hda::new(p.clone(), a.initial().clone(), fin.into_iter().collect(), a.labels().clone());
    for f in p.free_faces().into_iter().filter(|f| f.cube == x) {
        let j = check_elementary(&a, x, f.side, f.index).unwrap();
        assert!(!j.check("corner-not-distinguished").unwrap().passed());
        assert!(!j.applicable);
    }
}

#[test]
fn manual_check_needs_a_square() {
    let a = labeled(PrecubicalSet::interval(0, 2).unwrap(), &[CubeId(0)], &[CubeId(2)]);
    assert!(matches!(
        check_manual_2cube(&a, CubeId(3), Side::Back, 1, &Limits::default()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn unknown_cube_and_bad_index_are_argument_errors() {
    let a = builtin("grid1x1").unwrap().into_hda().unwrap();
    let x = a.pcs().cubes_of_degree(2).next().unwrap();
    assert!(check_elementary(&a, CubeId(999), Side::Back, 1).is_err());
    assert!(matches!(check_elementary(&a, x, Side::Back, 3), Err(Error::Argument(_))));
    assert!(matches!(check_vertex_star(&a, x, &[Side::Back]), Err(Error::Argument(_))));
}

#[test]
fn vertex_star_conditions() {
    let a = builtin("grid1x1").unwrap().into_hda().unwrap();
    let p = a.pcs();
    let x = p.cubes_of_degree(2).next().unwrap();
    let j = check_vertex_star(&a, x, &[Side::Front, Side::Front]).unwrap();
    assert!(!j.check("has-back").unwrap().passed());

    let ks = [Side::Back, Side::Front];
    let j = check_vertex_star(&a, x, &ks).unwrap();
    assert!(j.applicable, "{}", j.summary());
    let (b, _) = collapse_vertex_star(&a, x, &ks, false).unwrap();
    assert_eq!(p.len() - b.pcs().len(), 4);
}

#[test]
fn vertex_star_shared_corner_is_refused() {
    let a = builtin("grid2x1").unwrap().into_hda().unwrap();
    let p = a.pcs();
    let squares: Vec<CubeId> = p.cubes_of_degree(2).collect();
    let (x, y) = (squares[0], squares[1]);
    let shared: BTreeSet<CubeId> = corners(p, x).intersection(&corners(p, y)).copied().collect();
    let mut seen = 0;
    for ks in [[Side::Back, Side::Front], [Side::Front, Side::Back]] {
        let v = p.vertex_at(x, &ks).unwrap();
        if shared.contains(&v) {
            seen += 1;
            let j = check_vertex_star(&a, x, &ks).unwrap();
            assert!(!j.check("star-contained").unwrap().passed());
            assert!(collapse_vertex_star(&a, x, &ks, false).is_err());
            let (b, forced) = collapse_vertex_star(&a, x, &ks, true).unwrap();
            assert!(forced.guarantees.is_empty());
            assert!(b.pcs().count_of_degree(2) == 0);
        }
    }
    assert_eq!(seen, 1);
}

#[test]
fn vertex_star_of_three_cube_removes_eight_cells() {
    let pcs = PrecubicalSet::standard_cube(3);
    let x = pcs.cubes_of_degree(3).next().unwrap();
    let (s, t) = (pcs.initial_vertex(x), pcs.final_vertex(x));
    let a = labeled(pcs, &[s], &[t]);
    let ks = [Side::Back, Side::Front, Side::Back];
    let j = check_vertex_star(&a, x, &ks).unwrap();
    assert!(j.applicable, "{}", j.summary());
    let (b, _) = collapse_vertex_star(&a, x, &ks, false).unwrap();
    assert_eq!(a.pcs().len() - b.pcs().len(), 8);
    assert_eq!(b.pcs().counts(), vec![7, 9, 3]);
}

#[test]
fn merging_a_path_of_two_edges() {
    let pcs = PrecubicalSet::interval(0, 2).unwrap();
    let labels = BTreeMap::from([(CubeId(3), Word::letter("a")), (CubeId(4), Word::letter("b"))]);
    let a = Hda::new(pcs, BTreeSet::from([CubeId(0)]), BTreeSet::from([CubeId(2)]), labels);
    let (b, rec, _) = merge_edges(&a, CubeId(1)).unwrap();
    assert_eq!(b.pcs().counts(), vec![2, 1]);
    assert_eq!(rec.label, Word::parse("a;b"));
    assert_eq!(b.label(rec.merged).unwrap().to_string(), "a;b");
    assert!(b.language_automaton().accepts(&[Word::parse("a;b")]));
}

#[test]
fn merge_refuses_a_branching_vertex() {
    let mut pb = PcsBuilder::new();
    let v: Vec<CubeId> = (0..4).map(|_| pb.vertex()).collect();
    pb.edge(v[0], v[1]);
    pb.edge(v[1], v[2]);
    pb.edge(v[1], v[3]);
    let a = labeled(pb.build().unwrap(), &[v[0]], &[v[2], v[3]]);
    let j = check_merge(&a, v[1]).unwrap();
    assert!(!j.check("one-in-one-out").unwrap().passed());
    assert!(matches!(merge_edges(&a, v[1]), Err(Error::Refused(_))));
    assert!(matches!(merge_edges(&a, v[0]), Err(Error::Refused(_))));
}

#[test]
fn lone_square_with_distinguished_corners_is_a_fixpoint() {
    let a = builtin("grid1x1").unwrap().into_hda().unwrap();
    let p = a.pcs();
    let x = p.cubes_of_degree(2).next().unwrap();
    let all: BTreeSet<CubeId> = corners(p, x);
    let a = Hda::new(p.clone(), a.initial().clone(), all, a.labels().clone());
    let (b, report) = reduce(&a, &manual_opts()).unwrap();
    assert_eq!(a, b);
    assert!(report.is_empty());
}

#[test]
fn lone_square_between_opposite_corners_becomes_one_edge() {
    // Only the start and end corners are distinguished, so a mixed corner's
    // star can go and the remaining path merges.
    let a = builtin("grid1x1").unwrap().into_hda().unwrap();
    let (b, report) = reduce(&a, &manual_opts()).unwrap();
    assert_eq!(b.pcs().counts(), vec![2, 1]);
    assert!(matches!(report.steps[0].kind, StepKind::VertexStar { .. }));
    let w = b.labels().values().next().unwrap().to_string();
    assert!(w == "a;b" || w == "b;a", "{w}");
}

#[test]
fn reduced_peterson_is_a_fixpoint() {
    let a = builtin("fig8").unwrap().into_hda().unwrap();
    let (b, report) = reduce(&a, &manual_opts()).unwrap();
    assert_eq!(a, b);
    assert!(report.is_empty());
}

#[test]
fn forced_collapse_in_fig4_keeps_the_homology_graph() {
    let fx = builtin("fig4").unwrap();
    let x = fx.id("x").unwrap();
    let a = Hda::new(fx.pcs.clone(), BTreeSet::new(), BTreeSet::new(), BTreeMap::new());
    let j = check_elementary(&a, x, Side::Back, 2).unwrap();
    assert!(!j.applicable);
    let (b, forced) = collapse_elementary(&a, x, Side::Back, 2, true).unwrap();
    assert!(forced.guarantees.is_empty());
    assert_eq!(b.pcs().counts(), vec![8, 9, 2]);
    let limits = Limits {
        oracle_cells: 21,
        ..Limits::default()
    };
    let pairing = GraphPairing::inclusion(a.pcs(), b.pcs()).unwrap();
    let v = homology_iso_as_graphs(a.pcs(), b.pcs(), &pairing, GraphMode::Bruteforce, &limits).unwrap();
    assert!(matches!(v, IsoVerdict::Iso), "{v:?}");
}

#[test]
fn every_guaranteed_step_preserves_invariants() {
    let a = builtin("fig6").unwrap().into_hda().unwrap();
    let (_, report) = reduce(&a, &manual_opts()).unwrap();
    let mut cur = a;
    for s in &report.steps {
        let next = hda_core::reduce::apply_step(&cur, &s.kind).unwrap();
        assert!(next.pcs().len() < cur.pcs().len() || next.pcs().counts()[1] < cur.pcs().counts()[1]);
        if s.judgment.guarantees.contains(&Guarantee::HomotopyEquiv) {
            assert_eq!(
                homology(cur.pcs(), Ring::Integers).betti_trimmed(),
                homology(next.pcs(), Ring::Integers).betti_trimmed(),
                "{}",
                s.kind
            );
        }
        if s.judgment.guarantees.contains(&Guarantee::ExtremalPreserved) {
            let (r0, r1) = (cur.pcs().reachability(), next.pcs().reachability());
            assert_eq!((r0.m0, r0.m1), (r1.m0, r1.m1), "{}", s.kind);
        }
        if s.judgment.guarantees.contains(&Guarantee::AccessPreserved) {
            assert_eq!(cur.accessibility(), next.accessibility(), "{}", s.kind);
        }
        cur = next;
    }
}

#[test]
fn certify_peterson_reduction() {
    let a = builtin("fig6").unwrap().into_hda().unwrap();
    let (b, report) = reduce(&a, &manual_opts()).unwrap();
    let c = certify(&a, &b, &report, &CertifyOptions::default()).unwrap();
    assert_eq!(c.verdict, Verdict::CertifiedBounded, "{c}");
    assert!(c.clause("trace-category").unwrap().bounded);
}

#[test]
fn certify_identity() {
    for name in ["fig2", "fig8", "grid2x2"] {
        let a = builtin(name).unwrap().into_hda().unwrap();
        let c = certify(&a, &a, &ReductionReport::default(), &CertifyOptions::default()).unwrap();
        let expected = if a.pcs().reachability().is_acyclic() {
            Verdict::Certified
        } else {
            Verdict::CertifiedBounded
        };
        assert_eq!(c.verdict, expected, "{name}: {c}");
    }
}

#[test]
fn certify_hand_written_abstraction_of_fig2() {
    let fx2 = builtin("fig2").unwrap();
    let fx3 = builtin("fig3b").unwrap();
    let a = fx2.hda.clone().unwrap();
    let b = fx3.hda.clone().unwrap();
    let (p, q) = (a.pcs(), b.pcs());
    let mut f = Abstraction::default();
    // Vertices go to the corresponding global states.
    let image = |n: &str| match n {
        "q0" => a.initial().iter().next().copied().unwrap(),
        "p12" => a.finals().iter().next().copied().unwrap(),
        _ => fx2.names["(l2,l2,x=0,y=0)"],
    };
    for (n, &v) in &fx3.names {
        if q.degree(v) == Some(0) {
            f.vertices.insert(v, image(n));
        }
    }
    // Each edge goes to the unique edge path spelling its label.
    for e in q.edges() {
        let (s, t) = (f.vertices[&q.source(e)], f.vertices[&q.target(e)]);
        let want = b.label(e).unwrap().clone();
        let path = spell(&a, p, s, t, &want).expect("label path exists");
        f.edges.insert(e, path);
    }
    let report = ReductionReport {
        abstraction: Some(f),
        ..ReductionReport::default()
    };
    let c = certify(&a, &b, &report, &CertifyOptions::default()).unwrap();
    let trace = c.clause("trace-category").unwrap();
    assert!(trace.detail.contains("initial to final: 4"), "{c}");
    // Homotopy is only attested by equal homology for a hand-written map.
    assert_eq!(c.verdict, Verdict::CertifiedBounded, "{c}");
}

fn spell(a: &Hda, p: &PrecubicalSet, s: CubeId, t: CubeId, w: &Word) -> Option<Vec<CubeId>> {
    if w.is_empty() {
        return (s == t).then(Vec::new);
    }
    let first = Word::letter(w.letters()[0].clone());
    let rest = Word::parse(&w.letters()[1..].join(";"));
    p.out_edges(s)
        .filter(|&e| a.label(e) == Some(&first))
        .find_map(|e| {
            spell(a, p, p.target(e), t, &rest).map(|mut tail| {
                tail.insert(0, e);
                tail
            })
        })
}

#[test]
fn tampered_report_is_an_integrity_error() {
    let a = builtin("fig6").unwrap().into_hda().unwrap();
    let (b, report) = reduce(&a, &manual_opts()).unwrap();
    let mut truncated = report.clone();
    truncated.steps.pop();
    assert!(matches!(
        certify(&a, &b, &truncated, &CertifyOptions::default()),
        Err(Error::Integrity(_))
    ));
    let mut relabeled = report.clone();
    for s in relabeled.steps.iter_mut().rev() {
        if let StepKind::Merge(m) = &mut s.kind {
            m.label = Word::letter("forged");
            break;
        }
    }
    assert!(matches!(replay(&a, &relabeled), Err(Error::Integrity(_))));
    assert!(matches!(
        certify(&a, &b, &relabeled, &CertifyOptions::default()),
        Err(Error::Integrity(_))
    ));
}
