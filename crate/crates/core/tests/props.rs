use std::collections::BTreeSet;

use hda_core::ingest::builtin;
use hda_core::props::{
    build_property, has_property, is_trace_closed, local_independence, Property,
};
use hda_core::{Hda, Word};

fn model(name: &str) -> Hda {
    builtin(name).unwrap().into_hda().unwrap()
}

fn s(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn sigma() -> BTreeSet<String> {
    model("fig6").letters()
}

fn mutex() -> Property {
    build_property("mutex", &s(&["crit_0", "crit_1", "b_0:=_0 0", "b_1:=_1 0"]), &sigma()).unwrap()
}

fn starvation() -> Property {
    build_property(
        "starvation-finite",
        &s(&["b_0:=_0 1", "crit_0", "b_1:=_1 1", "crit_1"]),
        &sigma(),
    )
    .unwrap()
}

/// The finite-execution properties listed for Peterson's protocol.
fn battery() -> Vec<Property> {
    let sig = sigma();
    let mut out = vec![mutex(), starvation()];
    for a in sig.iter().filter(|a| !a.starts_with("crit")) {
        out.push(build_property("no-repeat", &[a.clone(), "crit_0".into(), "crit_1".into()], &sig).unwrap());
    }
    for i in 0..2 {
        let req = format!("b_{i}:=_{i} 1");
        let other = format!("crit_{}", 1 - i);
        out.push(build_property("overtake", &[req, format!("crit_{i}"), other], &sig).unwrap());
    }
    out
}

#[test]
fn peterson_alphabet() {
    assert_eq!(sigma().len(), 8);
}

#[test]
fn critical_sections_are_not_independent() {
    let r = local_independence(&model("fig6"));
    assert!(!r.contains(&Word::letter("crit_0"), &Word::letter("crit_1")));
    assert!(!r.is_empty());
}

#[test]
fn peterson_properties_hold_on_both_models() {
    for p in battery() {
        for m in ["fig6", "fig7", "fig8"] {
            let (ok, w) = has_property(&model(m), &p).unwrap();
            assert!(ok, "{} fails on {m}: {:?}", p.name, w);
        }
    }
}

#[test]
fn peterson_properties_are_trace_closed() {
    let r = local_independence(&model("fig6"));
    for p in battery() {
        assert!(is_trace_closed(&p, &r).unwrap(), "{}", p.name);
    }
}

/// The reduced models keep every trace class but not every interleaving:
/// their languages are strictly contained in the original one.
#[test]
fn reduced_languages_are_contained() {
    let a = model("fig6").letter_automaton();
    for m in ["fig7", "fig8"] {
        let b = model(m).letter_automaton();
        assert_eq!(b.included_in(&a).unwrap(), None, "{m}");
        let missing = a.included_in(&b).unwrap().expect("some interleaving is dropped");
        eprintln!("{m} lacks {missing:?}");
    }
}

#[test]
fn restriction_keeps_properties() {
    // Dropping a square cannot add words.
    let a = model("fig6");
    let p = a.pcs();
    let sq = p.cubes_of_degree(2).next().unwrap();
    let q: hda_core::PrecubicalSubset = p.ids().filter(|&x| x != sq).collect();
    let b = a.restrict(&q).unwrap();
    for prop in battery() {
        assert!(has_property(&b, &prop).unwrap().0);
    }
}
