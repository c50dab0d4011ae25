//! Directed paths, dihomotopy classes and trace categories.
//!
//! Elementary dihomotopy preserves length, so every class is a finite set of
//! paths of one length. Classes are materialized explicitly and bounded by
//! [`Limits::paths`]; running out is an error rather than an approximation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::hda::Hda;
use crate::pcs::{CubeId, PrecubicalSet, Side};
use crate::Limits;

/// A sequence of edges, each starting where the previous one ends. Ordered by
/// edge sequence first, which makes the least member of a class canonical.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    edges: Vec<CubeId>,
    start: CubeId,
    end: CubeId,
}

impl Path {
    /// The constant path at `v`.
    pub fn vertex(v: CubeId) -> Self {
        Path {
            edges: Vec::new(),
            start: v,
            end: v,
        }
    }

    pub fn new(p: &PrecubicalSet, start: CubeId, edges: Vec<CubeId>) -> Result<Self> {
        if p.degree(start) != Some(0) {
            return Err(Error::arg(format!("path start {start} is not a vertex")));
        }
        let mut cur = start;
        for &e in &edges {
            if p.degree(e) != Some(1) {
                return Err(Error::arg(format!("path element {e} is not an edge")));
            }
            if p.source(e) != cur {
                return Err(Error::arg(format!(
                    "edge {e} starts at {} but the path is at {cur}",
                    p.source(e)
                )));
            }
            cur = p.target(e);
        }
        Ok(Path {
            edges,
            start,
            end: cur,
        })
    }

    pub fn edge(p: &PrecubicalSet, e: CubeId) -> Result<Self> {
        if p.degree(e) != Some(1) {
            return Err(Error::arg(format!("{e} is not an edge")));
        }
        Ok(Path {
            edges: vec![e],
            start: p.source(e),
            end: p.target(e),
        })
    }

    pub fn start(&self) -> CubeId {
        self.start
    }

    pub fn end(&self) -> CubeId {
        self.end
    }

    pub fn edges(&self) -> &[CubeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `self · other`, defined when `self` ends where `other` starts.
    pub fn concat(&self, other: &Path) -> Option<Path> {
        if self.end != other.start {
            return None;
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Some(Path {
            edges,
            start: self.start,
            end: other.end,
        })
    }

    /// Re-checks the chaining against `p`, e.g. after moving a path between sets.
    pub fn check_in(&self, p: &PrecubicalSet) -> Result<()> {
        let again = Path::new(p, self.start, self.edges.clone())?;
        if again.end != self.end {
            return Err(Error::arg("path endpoint mismatch"));
        }
        Ok(())
    }

    pub fn lies_in(&self, p: &PrecubicalSet) -> bool {
        self.check_in(p).is_ok()
    }

    /// Sub-path `edges[a..b]`. The caller supplies the vertex at position `a`.
    fn slice(&self, p: &PrecubicalSet, a: usize, b: usize) -> Path {
        let start = if a == 0 {
            self.start
        } else {
            p.target(self.edges[a - 1])
        };
        let end = if b == 0 { self.start } else { p.target(self.edges[b - 1]) };
        Path {
            edges: self.edges[a..b].to_vec(),
            start,
            end,
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :", self.start)?;
        for e in &self.edges {
            write!(f, " {e}")?;
        }
        Ok(())
    }
}

/// The full equivalence class of a path under dihomotopy.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DihomotopyClass {
    members: BTreeSet<Path>,
}

impl DihomotopyClass {
    /// Lexicographically least member.
    pub fn canonical(&self) -> &Path {
        self.members.iter().next().expect("classes are non-empty")
    }

    pub fn members(&self) -> &BTreeSet<Path> {
        &self.members
    }

    pub fn contains(&self, w: &Path) -> bool {
        self.members.contains(w)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn path_length(&self) -> usize {
        self.canonical().len()
    }
}

/// The two factorizations of the boundary of a square: `(d^0_1 z, d^1_2 z)`
/// and `(d^0_2 z, d^1_1 z)`.
fn square_sides(p: &PrecubicalSet, z: CubeId) -> [(CubeId, CubeId); 2] {
    [
        (p.face(z, Side::Front, 1), p.face(z, Side::Back, 2)),
        (p.face(z, Side::Front, 2), p.face(z, Side::Back, 1)),
    ]
}

/// Paths obtained from `w` by one elementary dihomotopy, excluding `w`.
pub fn adjacent_paths(p: &PrecubicalSet, w: &Path) -> BTreeSet<Path> {
    let mut out = BTreeSet::new();
    for j in 1..w.edges.len() {
        let (e, f) = (w.edges[j - 1], w.edges[j]);
        for &z in p.cofaces(e) {
            let sides = square_sides(p, z);
            for s in 0..2 {
                if sides[s] == (e, f) {
                    let (a, b) = sides[1 - s];
                    let mut edges = w.edges.clone();
                    edges[j - 1] = a;
                    edges[j] = b;
                    if edges != w.edges {
                        out.insert(Path {
                            edges,
                            start: w.start,
                            end: w.end,
                        });
                    }
                }
            }
        }
    }
    out
}

pub fn dihomotopy_class(p: &PrecubicalSet, w: &Path, limits: &Limits) -> Result<DihomotopyClass> {
    let mut members = BTreeSet::from([w.clone()]);
    let mut queue = VecDeque::from([w.clone()]);
    while let Some(cur) = queue.pop_front() {
        for nb in adjacent_paths(p, &cur) {
            if !members.contains(&nb) {
                if members.len() >= limits.paths {
                    return Err(Error::budget("paths in a dihomotopy class", limits.paths));
                }
                members.insert(nb.clone());
                queue.push_back(nb);
            }
        }
    }
    Ok(DihomotopyClass { members })
}

pub fn are_dihomotopic(p: &PrecubicalSet, w: &Path, v: &Path, limits: &Limits) -> Result<bool> {
    if w.start != v.start || w.end != v.end || w.len() != v.len() {
        return Ok(false);
    }
    Ok(dihomotopy_class(p, w, limits)?.contains(v))
}

/// Every path starting at `v` of length at most `max_len`, in depth-first order.
pub fn paths_from(
    p: &PrecubicalSet,
    v: CubeId,
    max_len: usize,
    limits: &Limits,
) -> Result<Vec<Path>> {
    let mut out = Vec::new();
    let mut stack = vec![Path::vertex(v)];
    while let Some(w) = stack.pop() {
        if out.len() >= limits.paths {
            return Err(Error::budget("enumerated paths", limits.paths));
        }
        if w.len() < max_len {
            let outs: Vec<CubeId> = p.out_edges(w.end).collect();
            for &e in outs.iter().rev() {
                let mut edges = w.edges.clone();
                edges.push(e);
                stack.push(Path {
                    edges,
                    start: w.start,
                    end: p.target(e),
                });
            }
        }
        out.push(w);
    }
    Ok(out)
}

/// Every path ending at `v` of length at most `max_len`.
pub fn paths_to(
    p: &PrecubicalSet,
    v: CubeId,
    max_len: usize,
    limits: &Limits,
) -> Result<Vec<Path>> {
    let mut out = Vec::new();
    let mut stack = vec![Path::vertex(v)];
    while let Some(w) = stack.pop() {
        if out.len() >= limits.paths {
            return Err(Error::budget("enumerated paths", limits.paths));
        }
        if w.len() < max_len {
            for e in p.in_edges(w.start) {
                let mut edges = vec![e];
                edges.extend_from_slice(&w.edges);
                stack.push(Path {
                    edges,
                    start: p.source(e),
                    end: w.end,
                });
            }
        }
        out.push(w);
    }
    Ok(out)
}

/// Splits a set of paths with common endpoints into dihomotopy classes.
fn partition(p: &PrecubicalSet, paths: Vec<Path>, limits: &Limits) -> Result<Vec<DihomotopyClass>> {
    let mut remaining: BTreeSet<Path> = paths.into_iter().collect();
    let mut classes = Vec::new();
    while let Some(w) = remaining.pop_first() {
        let class = dihomotopy_class(p, &w, limits)?;
        for m in class.members() {
            remaining.remove(m);
        }
        classes.push(class);
    }
    classes.sort_by(|a, b| a.canonical().cmp(b.canonical()));
    Ok(classes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    /// The vertex count: exact on inputs with acyclic reachability.
    Auto,
    Length(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceCategory {
    pub objects: BTreeSet<CubeId>,
    /// Classes of paths between objects, sorted by canonical representative.
    pub homs: BTreeMap<(CubeId, CubeId), Vec<DihomotopyClass>>,
    /// Paths longer than this were not enumerated.
    pub max_len: usize,
    /// Whether every hom-set is known to be exhaustive.
    pub complete: bool,
}

impl TraceCategory {
    pub fn hom(&self, v: CubeId, w: CubeId) -> &[DihomotopyClass] {
        self.homs.get(&(v, w)).map_or(&[], |c| c.as_slice())
    }

    /// The class of `w`, if `w` is a morphism of this category within the bound.
    pub fn class_of(&self, w: &Path) -> Option<&DihomotopyClass> {
        self.hom(w.start, w.end).iter().find(|c| c.contains(w))
    }

    /// Composition `[w]·[v]` of two morphisms.
    pub fn compose(
        &self,
        p: &PrecubicalSet,
        a: &DihomotopyClass,
        b: &DihomotopyClass,
        limits: &Limits,
    ) -> Result<DihomotopyClass> {
        let w = a
            .canonical()
            .concat(b.canonical())
            .ok_or_else(|| Error::arg("classes are not composable"))?;
        dihomotopy_class(p, &w, limits)
    }

    pub fn morphism_count(&self) -> usize {
        self.homs.values().map(Vec::len).sum()
    }
}

/// Initial, final, maximal and minimal vertices.
pub fn distinguished_vertices(a: &Hda) -> BTreeSet<CubeId> {
    let r = a.pcs().reachability();
    a.initial()
        .iter()
        .chain(a.finals())
        .chain(&r.m0)
        .chain(&r.m1)
        .copied()
        .collect()
}

pub fn trace_category(a: &Hda, bound: Bound, limits: &Limits) -> Result<TraceCategory> {
    let p = a.pcs();
    let acyclic = p.reachability().is_acyclic();
    let max_len = match bound {
        Bound::Auto => p.count_of_degree(0),
        Bound::Length(n) => n,
    };
    let complete = acyclic && max_len + 1 >= p.count_of_degree(0);
    let objects = distinguished_vertices(a);
    let mut homs = BTreeMap::new();
    for &v in &objects {
        let mut buckets: BTreeMap<CubeId, Vec<Path>> = BTreeMap::new();
        for w in paths_from(p, v, max_len, limits)? {
            if objects.contains(&w.end) {
                buckets.entry(w.end).or_default().push(w);
            }
        }
        for (w, paths) in buckets {
            homs.insert((v, w), partition(p, paths, limits)?);
        }
    }
    Ok(TraceCategory {
        objects,
        homs,
        max_len,
        complete,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Division {
    pub divisible: bool,
    /// The complementary factor of the first matching representative.
    pub quotient: Option<Path>,
    /// Whether all quotients are dihomotopic; `None` when not divisible.
    pub unique: Option<bool>,
}

/// Tests whether `[w]` factors as `[g]·[β]` (`side` front, `g` on the left)
/// or `[β]·[g]` (`side` back, `g` on the right).
pub fn divides(
    p: &PrecubicalSet,
    g: &Path,
    w: &Path,
    side: Side,
    limits: &Limits,
) -> Result<Division> {
    match side {
        Side::Front if g.start != w.start => {
            return Err(Error::pre("left divisor must start where the path starts"))
        }
        Side::Back if g.end != w.end => {
            return Err(Error::pre("right divisor must end where the path ends"))
        }
        _ => {}
    }
    if g.len() > w.len() {
        return Ok(Division {
            divisible: false,
            quotient: None,
            unique: None,
        });
    }
    let class = dihomotopy_class(p, w, limits)?;
    let n = w.len();
    let m = g.len();
    let mut quotients = BTreeSet::new();
    for rep in class.members() {
        let matches = match side {
            Side::Front => rep.edges[..m] == g.edges[..],
            Side::Back => rep.edges[n - m..] == g.edges[..],
        };
        if matches {
            let q = match side {
                Side::Front => rep.slice(p, m, n),
                Side::Back => rep.slice(p, 0, n - m),
            };
            quotients.insert(q);
        }
    }
    let Some(first) = quotients.iter().next().cloned() else {
        return Ok(Division {
            divisible: false,
            quotient: None,
            unique: None,
        });
    };
    let qclass = dihomotopy_class(p, &first, limits)?;
    let unique = quotients.iter().all(|q| qclass.contains(q));
    Ok(Division {
        divisible: true,
        quotient: Some(first),
        unique: Some(unique),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CancellationReason {
    /// No path dihomotopic to γ begins (resp. ends) with a back (resp. front)
    /// face of a square.
    ClassAvoidsSquareFaces,
    /// No edge ending in γ(0) is a front face of a square (resp. no edge
    /// starting in γ(1) is a back face).
    NeighbourhoodAvoidsSquareFaces,
}

fn is_face_of_square(p: &PrecubicalSet, e: CubeId, side: Side) -> bool {
    p.cofaces(e).iter().any(|&z| {
        p.dim(z) == 2 && (1..=2).any(|j| p.face(z, side, j) == e)
    })
}

/// Sufficient conditions for `γ` to be cancellable: on the right (`side`
/// back: `[w]·[γ] = [v]·[γ]` implies `[w] = [v]`) or on the left (`side` front).
pub fn cancellation_sufficient(
    p: &PrecubicalSet,
    g: &Path,
    side: Side,
    limits: &Limits,
) -> Result<Option<CancellationReason>> {
    let class = dihomotopy_class(p, g, limits)?;
    let class_ok = class.members().iter().all(|m| {
        let edge = match side {
            Side::Back => m.edges.first(),
            Side::Front => m.edges.last(),
        };
        edge.is_none_or(|&e| !is_face_of_square(p, e, side))
    });
    if class_ok {
        return Ok(Some(CancellationReason::ClassAvoidsSquareFaces));
    }
    let neighbours: Vec<CubeId> = match side {
        Side::Back => p.in_edges(g.start).collect(),
        Side::Front => p.out_edges(g.end).collect(),
    };
    if neighbours.iter().all(|&e| !is_face_of_square(p, e, side.flip())) {
        return Ok(Some(CancellationReason::NeighbourhoodAvoidsSquareFaces));
    }
    Ok(None)
}

/// Moves a path off the star of the free face `d^k_i x` of a regular 2-cube,
/// replacing each traversal of `d^k_i x` by the opposite corner of `x`. The
/// result lies in `P ∖ star(d^k_i x)` and is dihomotopic to `w` in `P`.
pub fn transport_path(
    p: &PrecubicalSet,
    x: CubeId,
    k: Side,
    i: usize,
    w: &Path,
    limits: &Limits,
) -> Result<Path> {
    if p.degree(x) != Some(2) || !(1..=2).contains(&i) {
        return Err(Error::arg(format!("{x} is not a 2-cube or index {i} is invalid")));
    }
    w.check_in(p)?;
    let free = p.face(x, k, i);
    if !w.edges.contains(&free) {
        return Ok(w.clone());
    }
    let q = p.remove_star(free)?;
    let corner = Path::edge(&q, p.corner_edge(x, k, i)?)?;
    // Replacement for the free face followed by (k = 0) or preceded by (k = 1)
    // the corner edge.
    let detour = match k {
        Side::Back => [p.face(x, Side::Front, i), p.face(x, Side::Back, 3 - i)],
        Side::Front => [p.face(x, Side::Front, 3 - i), p.face(x, Side::Back, i)],
    };
    let cuts: Vec<usize> = w
        .edges
        .iter()
        .enumerate()
        .filter(|(_, &e)| e == free)
        .map(|(j, _)| j)
        .collect();
    let mut segments = Vec::new();
    let mut prev = 0;
    for &c in &cuts {
        segments.push(w.slice(p, prev, c));
        prev = c + 1;
    }
    segments.push(w.slice(p, prev, w.len()));

    let mut edges: Vec<CubeId> = Vec::new();
    match k {
        Side::Back => {
            let last = segments.len() - 1;
            for (j, seg) in segments.iter().enumerate() {
                if j == last {
                    edges.extend_from_slice(&seg.edges);
                    break;
                }
                let d = divides(&q, &corner, seg, Side::Back, limits)?;
                let bar = d.quotient.ok_or_else(|| {
                    Error::Certification(format!(
                        "segment {seg} is not right-divisible by the corner edge"
                    ))
                })?;
                edges.extend_from_slice(&bar.edges);
                edges.extend_from_slice(&detour);
            }
        }
        Side::Front => {
            edges.extend_from_slice(&segments[0].edges);
            for seg in &segments[1..] {
                let d = divides(&q, &corner, seg, Side::Front, limits)?;
                let bar = d.quotient.ok_or_else(|| {
                    Error::Certification(format!(
                        "segment {seg} is not left-divisible by the corner edge"
                    ))
                })?;
                edges.extend_from_slice(&detour);
                edges.extend_from_slice(&bar.edges);
            }
        }
    }
    Path::new(&q, w.start, edges)
}
