//! Hand-encoded example models. Square faces are listed per direction as
//! `(d^0_i, d^1_i)`; direction 1 is the "vertical" one in the drawings.

use std::collections::{BTreeMap, BTreeSet};

use super::{compose, parse_program_graph, ComposeOptions, Composed, ProgramGraph};
use crate::error::{Error, Result};
use crate::hda::{Hda, Word};
use crate::pcs::{tensor_with_map, CubeId, PcsBuilder, PrecubicalSet};

/// A built-in object. `hda` is set for automata; `names` gives readable names
/// for selected cubes.
#[derive(Clone, Debug)]
pub struct Builtin {
    pub pcs: PrecubicalSet,
    pub hda: Option<Hda>,
    pub names: BTreeMap<String, CubeId>,
}

impl Builtin {
    pub fn id(&self, name: &str) -> Result<CubeId> {
        self.names
            .get(name)
            .copied()
            .ok_or_else(|| Error::arg(format!("no cube named `{name}`")))
    }

    pub fn into_hda(self) -> Result<Hda> {
        self.hda
            .ok_or_else(|| Error::arg("built-in object is a precubical set, not an HDA"))
    }
}

#[derive(Default)]
struct Sketch {
    b: PcsBuilder,
    names: BTreeMap<String, CubeId>,
    labels: BTreeMap<CubeId, Word>,
}

impl Sketch {
    fn v(&mut self, name: &str) -> CubeId {
        let id = self.b.vertex();
        self.names.insert(name.to_string(), id);
        id
    }

    fn e(&mut self, name: &str, from: &str, to: &str, label: &str) -> CubeId {
        let id = self.b.edge(self.names[from], self.names[to]);
        if !name.is_empty() {
            self.names.insert(name.to_string(), id);
        }
        if !label.is_empty() {
            self.labels.insert(id, Word::parse(label));
        }
        id
    }

    /// A square from its direction-1 and direction-2 face pairs, by edge name.
    fn sq(&mut self, name: &str, dir1: (&str, &str), dir2: (&str, &str)) -> CubeId {
        let n = |s: &str| self.names[s];
        let faces = [(n(dir1.0), n(dir1.1)), (n(dir2.0), n(dir2.1))];
        let id = self.b.cube(&faces);
        self.names.insert(name.to_string(), id);
        id
    }

    fn finish(self, init: &[&str], fin: &[&str]) -> Builtin {
        let pcs = self.b.build().expect("fixture is well formed");
        let hda = (!init.is_empty()).then(|| {
            Hda::new(
                pcs.clone(),
                init.iter().map(|s| self.names[*s]).collect(),
                fin.iter().map(|s| self.names[*s]).collect(),
                self.labels.clone(),
            )
        });
        Builtin {
            pcs,
            hda,
            names: self.names,
        }
    }
}

const FIG1: &str = "\
process fig1
var x : 0..1 = 0
var y : 0..1 = 0
loc l0 l1 l2 l3 l4
init l0
final l4
edge l0 -> l1 [x = 0] x := 1
edge l1 -> l2 x := 0
edge l2 -> l3 [y = 0] y := 1
edge l3 -> l4 y := 0
";

/// The process with two guarded critical sections on `x` and `y`.
pub fn fig1_program() -> ProgramGraph {
    parse_program_graph(FIG1).expect("built-in program parses")
}

/// Peterson's mutual exclusion protocol for process `i ∈ {0, 1}`.
pub fn peterson_program(i: usize) -> ProgramGraph {
    assert!(i < 2, "Peterson's protocol has processes 0 and 1");
    let j = 1 - i;
    let src = format!(
        "process peterson_{i}
var b_0 : 0..1 = 0
var b_1 : 0..1 = 0
var t : 0..1 = 0, 1
loc l0 l1 l2 l3
init l0
final l0
edge l0 -> l1 b_{i} := 1
edge l1 -> l2 t := {j}
edge l2 -> l3 [b_{j} = 0 | t = {i}] crit
edge l3 -> l0 b_{i} := 0
"
    );
    parse_program_graph(&src).expect("built-in program parses")
}

/// Two copies of the guarded-section process.
pub fn fig2() -> Composed {
    compose(&[fig1_program(), fig1_program()], &ComposeOptions::default())
        .expect("fixture composes")
}

/// Peterson's protocol for two processes, started with either value of `t`.
pub fn fig6() -> Composed {
    compose(
        &[peterson_program(0), peterson_program(1)],
        &ComposeOptions::default(),
    )
    .expect("fixture composes")
}

/// Names of the Peterson states as (location of process 0, location of
/// process 1, t). `U` and `L` are the two initial and final states.
const PETERSON_NAMES: [(&str, &str, &str, u32); 20] = [
    ("U", "l0", "l0", 0),
    ("L", "l0", "l0", 1),
    ("q2", "l0", "l1", 0),
    ("q3", "l0", "l2", 0),
    ("q0", "l0", "l3", 0),
    ("q6", "l1", "l0", 0),
    ("q5", "l1", "l3", 0),
    ("q7", "l1", "l1", 0),
    ("q8", "l1", "l2", 0),
    ("q9", "l2", "l1", 1),
    ("q13", "l2", "l3", 1),
    ("q14", "l2", "l0", 1),
    ("p1", "l2", "l2", 1),
    ("q17", "l3", "l0", 1),
    ("q15", "l1", "l0", 1),
    ("q11", "l0", "l1", 1),
    ("q12", "l3", "l1", 1),
    ("q4", "l3", "l2", 0),
    ("p0", "l2", "l2", 0),
    ("q10", "l1", "l1", 1),
];

fn peterson_names(c: &Composed) -> BTreeMap<String, CubeId> {
    PETERSON_NAMES
        .iter()
        .map(|&(n, a, b, t)| {
            let v = c.vertex(&[a, b], &[("t", t)]).expect("named state is reachable");
            (n.to_string(), v)
        })
        .collect()
}

fn composed(c: Composed, names: BTreeMap<String, CubeId>) -> Builtin {
    Builtin {
        pcs: c.hda.pcs().clone(),
        hda: Some(c.hda),
        names,
    }
}

/// The Peterson model after removing the corner states of the critical
/// sections and merging through the eight removed vertices' neighbours.
fn fig7() -> Builtin {
    let c = fig6();
    let names = peterson_names(&c);
    let removed: BTreeSet<CubeId> = ["q0", "q5", "q13", "p1", "q4", "q12", "q17", "p0"]
        .iter()
        .map(|n| names[*n])
        .collect();
    let p = c.hda.pcs();
    let keep: Vec<CubeId> = p
        .ids()
        .filter(|&x| {
            p.cube_image(x)
                .map(|(img, _)| img.vertices(p).all(|v| !removed.contains(&v)))
                .unwrap_or(false)
        })
        .collect();
    let sub = p.closure(keep).expect("ids belong to the set");
    let base = c.hda.restrict(&sub).expect("distinguished states are kept");
    let mut b = base.pcs().to_builder();
    let mut labels = base.labels().clone();
    let merged = [
        ("q3", "U", "crit_1;b_1:=_1 0"),
        ("q14", "L", "crit_0;b_0:=_0 0"),
        ("q8", "q14", "t:=_0 1;crit_1;b_1:=_1 0"),
        ("q9", "q3", "t:=_1 0;crit_0;b_0:=_0 0"),
    ];
    for (from, to, w) in merged {
        let e = b.edge(names[from], names[to]);
        labels.insert(e, Word::parse(w));
    }
    let pcs = b.build().expect("fixture is well formed");
    let hda = Hda::new(pcs.clone(), base.initial().clone(), base.finals().clone(), labels);
    let names = names.into_iter().filter(|(_, v)| !removed.contains(v)).collect();
    Builtin {
        pcs,
        hda: Some(hda),
        names,
    }
}

/// The fully reduced Peterson model: four states, eight composite edges.
fn fig8() -> Builtin {
    let mut s = Sketch::default();
    for v in ["U", "L", "q3", "q14"] {
        s.v(v);
    }
    s.e("", "U", "q3", "b_1:=_1 1;t:=_1 0");
    s.e("", "L", "q3", "b_1:=_1 1;t:=_1 0");
    s.e("", "U", "q14", "b_0:=_0 1;t:=_0 1");
    s.e("", "L", "q14", "b_0:=_0 1;t:=_0 1");
    s.e("", "q3", "U", "crit_1;b_1:=_1 0");
    s.e("", "q14", "L", "crit_0;b_0:=_0 0");
    s.e("", "q3", "q14", "b_0:=_0 1;t:=_0 1;crit_1;b_1:=_1 0");
    s.e("", "q14", "q3", "b_1:=_1 1;t:=_1 0;crit_0;b_0:=_0 0");
    s.finish(&["U", "L"], &["U", "L"])
}

/// A 3×3 grid of states with the two diagonal squares filled; horizontal
/// edges run the two sections of process 0, vertical ones those of process 1.
fn fig3a() -> Builtin {
    let mut s = Sketch::default();
    let rows = [["q11", "q13", "p12"], ["q6", "q8", "p7"], ["q0", "q2", "p1"]];
    for row in rows {
        for v in row {
            s.v(v);
        }
    }
    let h = ["x:=_0 1;x:=_0 0", "y:=_0 1;y:=_0 0"];
    let vt = ["x:=_1 1;x:=_1 0", "y:=_1 1;y:=_1 0"];
    for (r, row) in rows.iter().enumerate() {
        for c in 0..2 {
            s.e(&format!("h{r}{c}"), row[c], row[c + 1], h[c]);
        }
    }
    for r in 0..2 {
        for c in 0..3 {
            s.e(&format!("v{r}{c}"), rows[r][c], rows[r + 1][c], vt[r]);
        }
    }
    s.sq("lower", ("v10", "v11"), ("h10", "h20"));
    s.sq("upper", ("v01", "v02"), ("h01", "h11"));
    s.finish(&["q11"], &["p1"])
}

/// Two states joined twice in sequence, each edge carrying one interleaving.
fn fig3b() -> Builtin {
    let mut s = Sketch::default();
    for v in ["q0", "q8", "p12"] {
        s.v(v);
    }
    s.e("x01", "q0", "q8", "x:=_0 1;x:=_0 0;x:=_1 1;x:=_1 0");
    s.e("x10", "q0", "q8", "x:=_1 1;x:=_1 0;x:=_0 1;x:=_0 0");
    s.e("y01", "q8", "p12", "y:=_0 1;y:=_0 0;y:=_1 1;y:=_1 0");
    s.e("y10", "q8", "p12", "y:=_1 1;y:=_1 0;y:=_0 1;y:=_0 0");
    s.finish(&["q0"], &["p12"])
}

/// Three squares `y`, `x`, `z` around a vertex, with `d^1_2 x` free.
fn fig4() -> Builtin {
    let mut s = Sketch::default();
    for v in ["q0", "p1", "q1", "p0", "p2", "p4", "p3", "p5"] {
        s.v(v);
    }
    s.e("q0-p1", "q0", "p1", "");
    s.e("q0-p0", "q0", "p0", "");
    s.e("p1-p2", "p1", "p2", "");
    s.e("p1-q1", "p1", "q1", "");
    s.e("q1-p4", "q1", "p4", "");
    s.e("p0-p2", "p0", "p2", "");
    s.e("p3-p5", "p3", "p5", "");
    s.e("p0-p3", "p0", "p3", "");
    s.e("p2-p5", "p2", "p5", "");
    s.e("p2-p4", "p2", "p4", "");
    s.sq("y", ("q0-p0", "p1-p2"), ("q0-p1", "p0-p2"));
    s.sq("x", ("p1-p2", "q1-p4"), ("p1-q1", "p2-p4"));
    s.sq("z", ("p0-p3", "p2-p5"), ("p0-p2", "p3-p5"));
    s.finish(&[], &[])
}

fn circle() -> Builtin {
    let mut s = Sketch::default();
    s.v("v");
    s.e("a", "v", "v", "a");
    s.finish(&["v"], &["v"])
}

fn torus() -> Builtin {
    let mut s = Sketch::default();
    s.v("v");
    s.e("a", "v", "v", "a");
    s.e("b", "v", "v", "b");
    s.sq("s", ("b", "b"), ("a", "a"));
    s.finish(&["v"], &["v"])
}

/// Two directed loops at one vertex.
fn two_circles() -> Builtin {
    let mut s = Sketch::default();
    s.v("v");
    s.e("a", "v", "v", "a");
    s.e("b", "v", "v", "b");
    s.finish(&["v"], &["v"])
}

/// The full `m × n` grid `⟦0,m⟧ ⊗ ⟦0,n⟧`, edges labeled by direction `a`/`b`,
/// from corner `start` to corner `end`.
fn grid(m: usize, n: usize) -> Result<Builtin> {
    let (pm, pn) = (
        PrecubicalSet::interval(0, m as i64)?,
        PrecubicalSet::interval(0, n as i64)?,
    );
    let (pcs, map) = tensor_with_map(&pm, &pn);
    let mut labels = BTreeMap::new();
    for (&(x, y), &c) in &map {
        match (pm.dim(x), pn.dim(y)) {
            (1, 0) => labels.insert(c, Word::letter("a")),
            (0, 1) => labels.insert(c, Word::letter("b")),
            _ => None,
        };
    }
    let start = map[&(CubeId(0), CubeId(0))];
    let end = map[&(CubeId(m as u32), CubeId(n as u32))];
    let names = BTreeMap::from([("start".to_string(), start), ("end".to_string(), end)]);
    let hda = Hda::new(pcs.clone(), BTreeSet::from([start]), BTreeSet::from([end]), labels);
    Ok(Builtin {
        pcs,
        hda: Some(hda),
        names,
    })
}

fn cube(n: usize) -> Builtin {
    let pcs = PrecubicalSet::standard_cube(n);
    let start = pcs.vertices().next().expect("cube has vertices");
    let end = pcs.vertices().last().expect("cube has vertices");
    let names = BTreeMap::from([("start".to_string(), start), ("end".to_string(), end)]);
    Builtin {
        pcs,
        hda: None,
        names,
    }
}

pub fn builtin_names() -> Vec<&'static str> {
    vec![
        "fig2", "fig3a", "fig3b", "fig4", "fig6", "fig7", "fig8", "circle", "two-circles", "torus",
        "grid<m>x<n>", "cube<n>",
    ]
}

/// Looks up a built-in model by name; see [`builtin_names`].
pub fn builtin(name: &str) -> Result<Builtin> {
    let b = match name {
        "fig2" => {
            let c = fig2();
            let names = c
                .states
                .keys()
                .map(|&v| (c.state_name(v).expect("state exists"), v))
                .collect();
            composed(c, names)
        }
        "fig3a" => fig3a(),
        "fig3b" => fig3b(),
        "fig4" => fig4(),
        "fig6" => {
            let c = fig6();
            let names = peterson_names(&c);
            composed(c, names)
        }
        "fig7" => fig7(),
        "fig8" => fig8(),
        "circle" => circle(),
        "two-circles" => two_circles(),
        "torus" => torus(),
        _ => {
            if let Some(rest) = name.strip_prefix("grid") {
                let parsed = rest
                    .split_once('x')
                    .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)));
                match parsed {
                    Some((m, n)) if m <= 64 && n <= 64 => return grid(m, n),
                    _ => {}
                }
            } else if let Some(n) = name.strip_prefix("cube").and_then(|r| r.parse().ok()) {
                if n <= 6 {
                    return Ok(cube(n));
                }
            }
            return Err(Error::arg(format!(
                "unknown built-in `{name}`; known: {}",
                builtin_names().join(", ")
            )));
        }
    };
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let expect: [(&str, &[usize]); 9] = [
            ("fig3a", &[9, 12, 2]),
            ("fig3b", &[3, 4]),
            ("fig4", &[8, 10, 3]),
            ("fig6", &[20, 34, 10]),
            ("fig7", &[12, 22, 6]),
            ("fig8", &[4, 8]),
            ("circle", &[1, 1]),
            ("torus", &[1, 2, 1]),
            ("grid2x3", &[12, 17, 6]),
        ];
        for (name, c) in expect {
            let b = builtin(name).unwrap();
            assert_eq!(b.pcs.counts(), c, "{name}");
            assert!(b.pcs.validate().violations.is_empty(), "{name}");
            if let Some(h) = &b.hda {
                assert!(h.validate().violations.is_empty(), "{name}: {:?}", h.validate());
            }
        }
        assert_eq!(builtin("cube3").unwrap().pcs.counts(), vec![8, 12, 6, 1]);
        assert!(builtin("fig5").is_err());
        assert!(builtin("gridAxB").is_err());
    }

    #[test]
    fn fig4_faces() {
        let b = builtin("fig4").unwrap();
        let p = &b.pcs;
        let x = b.id("x").unwrap();
        use crate::pcs::Side;
        assert_eq!(p.face(x, Side::Back, 2), b.id("p2-p4").unwrap());
        assert!(p.is_free_face(x, Side::Back, 2).unwrap());
    }

    #[test]
    fn fig8_matches_peterson_states() {
        let b = builtin("fig7").unwrap();
        for n in ["U", "L", "q3", "q14"] {
            assert!(b.names.contains_key(n));
        }
    }
}
