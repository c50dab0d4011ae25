use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use hda_core::dipath::{dihomotopy_class, trace_category, Bound, Path};
use hda_core::homology::{homology, homology_graph, GraphMode, Ring};
use hda_core::ingest::{builtin, compose, peterson_program, ComposeOptions};
use hda_core::props::{build_property, has_property};
use hda_core::reduce::{reduce, ReduceOptions};
use hda_core::{Hda, Limits};

fn model(name: &str) -> Hda {
    builtin(name).unwrap().into_hda().unwrap()
}

fn peterson(c: &mut Criterion) {
    let pgs = [peterson_program(0), peterson_program(1)];
    c.bench_function("compose peterson", |b| {
        b.iter(|| compose(black_box(&pgs), &ComposeOptions::default()).unwrap())
    });
    let a = model("fig6");
    let opts = ReduceOptions {
        enable_manual: true,
        ..ReduceOptions::default()
    };
    c.bench_function("reduce peterson (manual)", |b| {
        b.iter(|| reduce(black_box(&a), &opts).unwrap())
    });
    let sigma = a.letters();
    let args: Vec<String> = ["crit_0", "crit_1", "b_0:=_0 0", "b_1:=_1 0"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mutex = build_property("mutex", &args, &sigma).unwrap();
    c.bench_function("check mutex on peterson", |b| {
        b.iter(|| has_property(black_box(&a), &mutex).unwrap())
    });
}

fn topology(c: &mut Criterion) {
    let a = model("fig2");
    c.bench_function("homology two-hole example", |b| {
        b.iter(|| homology(black_box(a.pcs()), Ring::Integers))
    });
    c.bench_function("homology graph (exact) two-hole example", |b| {
        b.iter(|| homology_graph(black_box(a.pcs()), GraphMode::Exact, &Limits::default()).unwrap())
    });
    c.bench_function("trace category two-hole example", |b| {
        b.iter(|| trace_category(black_box(&a), Bound::Auto, &Limits::default()).unwrap())
    });
    let g = builtin("grid4x4").unwrap();
    let start = g.id("start").unwrap();
    let p = g.pcs.clone();
    let mut edges = Vec::new();
    let mut v = start;
    while let Some(e) = p.out_edges(v).next() {
        edges.push(e);
        v = p.target(e);
    }
    let w = Path::new(&p, start, edges).unwrap();
    c.bench_function("dihomotopy class grid 4x4", |b| {
        b.iter(|| dihomotopy_class(black_box(&p), &w, &Limits::default()).unwrap())
    });
}

criterion_group!(benches, peterson, topology);
criterion_main!(benches);
