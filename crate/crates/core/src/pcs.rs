//! Precubical sets.
//!
//! A precubical set is stored as a map from [`CubeId`] to a cube record holding
//! its degree and its `2n` faces. Ids are stable: removing cubes never renames
//! the survivors, so subsets, reports and paths stay meaningful across a
//! reduction pipeline. All sets are immutable once built.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Largest cube degree accepted by [`PcsBuilder`].
pub const MAX_DEGREE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CubeId(pub u32);

impl fmt::Display for CubeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which of the two parallel faces in a direction: front (`k = 0`) or back (`k = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Front,
    Back,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Front, Side::Back];

    pub fn bit(self) -> u8 {
        match self {
            Side::Front => 0,
            Side::Back => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Result<Side> {
        match bit {
            0 => Ok(Side::Front),
            1 => Ok(Side::Back),
            _ => Err(Error::arg(format!("side must be 0 or 1, got {bit}"))),
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Front => Side::Back,
            Side::Back => Side::Front,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Cube {
    dim: usize,
    /// `faces[2 * (i - 1) + k]` is `d^k_i`.
    faces: Vec<CubeId>,
}

impl Cube {
    fn face(&self, side: Side, i: usize) -> CubeId {
        self.faces[2 * (i - 1) + side.bit() as usize]
    }
}

#[derive(Clone, Debug, Default)]
pub struct PrecubicalSet {
    cubes: BTreeMap<CubeId, Cube>,
    cofaces: BTreeMap<CubeId, Vec<CubeId>>,
}

impl PartialEq for PrecubicalSet {
    fn eq(&self, other: &Self) -> bool {
        self.cubes == other.cubes
    }
}

impl Eq for PrecubicalSet {}

/// Incremental constructor. Ids are assigned sequentially unless given
/// explicitly through [`PcsBuilder::insert`].
#[derive(Clone, Debug, Default)]
pub struct PcsBuilder {
    cubes: BTreeMap<CubeId, Cube>,
    next: u32,
}

impl PcsBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self) -> CubeId {
        self.push(0, Vec::new())
    }

    pub fn edge(&mut self, from: CubeId, to: CubeId) -> CubeId {
        self.push(1, vec![from, to])
    }

    /// Adds a cube from its faces listed per direction as `(d^0_i, d^1_i)`.
    pub fn cube(&mut self, faces: &[(CubeId, CubeId)]) -> CubeId {
        let flat = faces.iter().flat_map(|&(a, b)| [a, b]).collect();
        self.push(faces.len(), flat)
    }

    fn push(&mut self, dim: usize, faces: Vec<CubeId>) -> CubeId {
        let id = CubeId(self.next);
        self.next += 1;
        self.cubes.insert(id, Cube { dim, faces });
        id
    }

    /// Inserts a cube under an explicit id. Faces are listed per direction as `(d^0_i, d^1_i)`.
    pub fn insert(&mut self, id: CubeId, faces: &[(CubeId, CubeId)]) -> Result<()> {
        if self.cubes.contains_key(&id) {
            return Err(Error::arg(format!("duplicate cube id {id}")));
        }
        let flat = faces.iter().flat_map(|&(a, b)| [a, b]).collect();
        self.cubes.insert(
            id,
            Cube {
                dim: faces.len(),
                faces: flat,
            },
        );
        self.next = self.next.max(id.0 + 1);
        Ok(())
    }

    pub fn build(self) -> Result<PrecubicalSet> {
        for (&id, cube) in &self.cubes {
            if cube.dim > MAX_DEGREE {
                return Err(Error::arg(format!(
                    "cube {id} has degree {} above the supported maximum {MAX_DEGREE}",
                    cube.dim
                )));
            }
            for (slot, f) in cube.faces.iter().enumerate() {
                let target = self.cubes.get(f).ok_or_else(|| {
                    Error::arg(format!("cube {id}: face {} refers to unknown cube {f}", slot))
                })?;
                if target.dim + 1 != cube.dim {
                    return Err(Error::arg(format!(
                        "cube {id} of degree {}: face d^{}_{} = {f} has degree {}",
                        cube.dim,
                        slot % 2,
                        slot / 2 + 1,
                        target.dim
                    )));
                }
            }
        }
        Ok(PrecubicalSet::from_cubes(self.cubes))
    }
}

/// A face `d^k_i x` that is free, i.e. whose star is exactly `{x, d^k_i x}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreeFace {
    pub cube: CubeId,
    pub side: Side,
    pub index: usize,
}

/// A subset of the cubes of some precubical set. Produced closed under faces
/// by every operation in this module.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrecubicalSubset {
    pub members: BTreeSet<CubeId>,
}

impl PrecubicalSubset {
    pub fn contains(&self, x: CubeId) -> bool {
        self.members.contains(&x)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn vertices<'a>(&'a self, p: &'a PrecubicalSet) -> impl Iterator<Item = CubeId> + 'a {
        self.members
            .iter()
            .copied()
            .filter(move |&x| p.degree(x) == Some(0))
    }

    pub fn is_closed_in(&self, p: &PrecubicalSet) -> bool {
        self.members.iter().all(|&x| {
            p.contains(x) && p.direct_faces(x).iter().all(|f| self.members.contains(f))
        })
    }
}

impl FromIterator<CubeId> for PrecubicalSubset {
    fn from_iter<T: IntoIterator<Item = CubeId>>(iter: T) -> Self {
        PrecubicalSubset {
            members: iter.into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `d^k_i d^l_j x != d^l_{j-1} d^k_i x` for `i < j`.
    Identity {
        cube: CubeId,
        k: Side,
        i: usize,
        l: Side,
        j: usize,
    },
    InitialNotVertex(CubeId),
    FinalNotVertex(CubeId),
    MissingLabel(CubeId),
    LabelOnNonEdge(CubeId),
    /// `λ(d^0_i x) != λ(d^1_i x)` for a 2-cube `x`.
    LabelCoherence { cube: CubeId, index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Identity { cube, k, i, l, j } => write!(
                f,
                "identity d^{k}_{i} d^{l}_{j} = d^{l}_{} d^{k}_{i} fails on cube {cube}",
                j - 1
            ),
            Violation::InitialNotVertex(x) => write!(f, "initial state {x} is not a vertex"),
            Violation::FinalNotVertex(x) => write!(f, "final state {x} is not a vertex"),
            Violation::MissingLabel(e) => write!(f, "edge {e} has no label"),
            Violation::LabelOnNonEdge(x) => write!(f, "label attached to non-edge {x}"),
            Violation::LabelCoherence { cube, index } => {
                write!(f, "opposite faces of cube {cube} in direction {index} carry different labels")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport {
            ok: violations.is_empty(),
            violations,
        }
    }
}

/// Vertex accessibility: the reflexive-transitive closure of `d^0_1 e -> d^1_1 e`.
#[derive(Clone, Debug)]
pub struct Reachability {
    vertices: Vec<CubeId>,
    index: BTreeMap<CubeId, usize>,
    reach: Vec<FixedBitSet>,
    acyclic: bool,
    /// Vertices with no outgoing edge.
    pub m0: BTreeSet<CubeId>,
    /// Vertices with no incoming edge.
    pub m1: BTreeSet<CubeId>,
}

impl Reachability {
    pub fn vertices(&self) -> &[CubeId] {
        &self.vertices
    }

    pub fn index_of(&self, v: CubeId) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn reaches(&self, v: CubeId, w: CubeId) -> bool {
        match (self.index.get(&v), self.index.get(&w)) {
            (Some(&a), Some(&b)) => self.reach[a].contains(b),
            _ => false,
        }
    }

    /// Bitset (over [`Reachability::vertices`] positions) of everything reachable from `v`.
    pub fn successors(&self, v: CubeId) -> Option<&FixedBitSet> {
        self.index.get(&v).map(|&a| &self.reach[a])
    }

    /// No non-constant path returns to its start (self-loops count as cycles).
    pub fn is_acyclic(&self) -> bool {
        self.acyclic
    }
}

impl PrecubicalSet {
    fn from_cubes(cubes: BTreeMap<CubeId, Cube>) -> Self {
        let mut cofaces: BTreeMap<CubeId, Vec<CubeId>> =
            cubes.keys().map(|&k| (k, Vec::new())).collect();
        for (&id, cube) in &cubes {
            for f in &cube.faces {
                let list = cofaces.get_mut(f).expect("faces checked by builder");
                if list.last() != Some(&id) {
                    list.push(id);
                }
            }
        }
        for list in cofaces.values_mut() {
            list.sort();
            list.dedup();
        }
        PrecubicalSet { cubes, cofaces }
    }

    /// The one-point precubical set `⟦0,1⟧^{⊗0}`.
    pub fn point() -> Self {
        let mut b = PcsBuilder::new();
        b.vertex();
        b.build().expect("point is well formed")
    }

    /// The precubical interval `⟦k,l⟧`. Vertex `j` gets id `j - k`; edge `[j-1,j]`
    /// gets id `(l - k) + (j - k)`.
    pub fn interval(k: i64, l: i64) -> Result<Self> {
        if k > l {
            return Err(Error::arg(format!("interval bounds {k} > {l}")));
        }
        let n = usize::try_from(l - k).map_err(|_| Error::arg("interval too long"))?;
        let mut b = PcsBuilder::new();
        let vs: Vec<CubeId> = (0..=n).map(|_| b.vertex()).collect();
        for w in vs.windows(2) {
            b.edge(w[0], w[1]);
        }
        b.build()
    }

    /// `⟦0,1⟧^{⊗n}`.
    pub fn standard_cube(n: usize) -> Self {
        let unit = Self::interval(0, 1).expect("unit interval");
        (0..n).fold(Self::point(), |acc, _| tensor(&acc, &unit))
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn contains(&self, x: CubeId) -> bool {
        self.cubes.contains_key(&x)
    }

    pub fn degree(&self, x: CubeId) -> Option<usize> {
        self.cubes.get(&x).map(|c| c.dim)
    }

    /// Degree of a cube known to exist. Panics otherwise.
    pub fn dim(&self, x: CubeId) -> usize {
        self.cubes[&x].dim
    }

    pub fn ids(&self) -> impl Iterator<Item = CubeId> + '_ {
        self.cubes.keys().copied()
    }

    pub fn cubes_of_degree(&self, n: usize) -> impl Iterator<Item = CubeId> + '_ {
        self.cubes
            .iter()
            .filter(move |(_, c)| c.dim == n)
            .map(|(&id, _)| id)
    }

    pub fn vertices(&self) -> impl Iterator<Item = CubeId> + '_ {
        self.cubes_of_degree(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = CubeId> + '_ {
        self.cubes_of_degree(1)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.cubes.values().map(|c| c.dim).max()
    }

    /// Number of cubes per degree, `counts()[n] = |P_n|`.
    pub fn counts(&self) -> Vec<usize> {
        let top = self.max_degree().map_or(0, |d| d + 1);
        let mut out = vec![0; top];
        for c in self.cubes.values() {
            out[c.dim] += 1;
        }
        out
    }

    pub fn count_of_degree(&self, n: usize) -> usize {
        self.cubes.values().filter(|c| c.dim == n).count()
    }

    pub fn next_id(&self) -> CubeId {
        CubeId(self.cubes.keys().next_back().map_or(0, |c| c.0 + 1))
    }

    /// `d^k_i x`. Panics on an unknown cube or an index outside `1..=deg(x)`.
    pub fn face(&self, x: CubeId, side: Side, i: usize) -> CubeId {
        let cube = &self.cubes[&x];
        assert!(
            (1..=cube.dim).contains(&i),
            "face index {i} out of range for cube {x} of degree {}",
            cube.dim
        );
        cube.face(side, i)
    }

    pub fn try_face(&self, x: CubeId, side: Side, i: usize) -> Result<CubeId> {
        let cube = self.cubes.get(&x).ok_or(Error::UnknownCube(x))?;
        if !(1..=cube.dim).contains(&i) {
            return Err(Error::arg(format!(
                "face index {i} out of range for cube {x} of degree {}",
                cube.dim
            )));
        }
        Ok(cube.face(side, i))
    }

    /// All `2n` faces, in `(d^0_1, d^1_1, d^0_2, ...)` order.
    pub fn direct_faces(&self, x: CubeId) -> &[CubeId] {
        &self.cubes[&x].faces
    }

    /// Cubes having `x` as a direct face, sorted, without repetition.
    pub fn cofaces(&self, x: CubeId) -> &[CubeId] {
        self.cofaces.get(&x).map_or(&[], |v| v.as_slice())
    }

    /// Start vertex `d^0_1 e` of an edge.
    pub fn source(&self, e: CubeId) -> CubeId {
        self.face(e, Side::Front, 1)
    }

    /// End vertex `d^1_1 e` of an edge.
    pub fn target(&self, e: CubeId) -> CubeId {
        self.face(e, Side::Back, 1)
    }

    /// Edges starting in `v`, in id order.
    pub fn out_edges(&self, v: CubeId) -> impl Iterator<Item = CubeId> + '_ {
        self.cofaces(v)
            .iter()
            .copied()
            .filter(move |&e| self.source(e) == v)
    }

    /// Edges ending in `v`, in id order.
    pub fn in_edges(&self, v: CubeId) -> impl Iterator<Item = CubeId> + '_ {
        self.cofaces(v)
            .iter()
            .copied()
            .filter(move |&e| self.target(e) == v)
    }

    fn check(&self, x: CubeId) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::UnknownCube(x))
        }
    }

    /// The vertex `d^{k_n}_1 ⋯ d^{k_1}_1 x` sitting at corner `(k_1, …, k_n)` of `x`.
    pub fn vertex_at(&self, x: CubeId, corner: &[Side]) -> Result<CubeId> {
        self.check(x)?;
        if corner.len() != self.dim(x) {
            return Err(Error::arg(format!(
                "corner of length {} for cube {x} of degree {}",
                corner.len(),
                self.dim(x)
            )));
        }
        Ok(corner.iter().fold(x, |cur, &k| self.face(cur, k, 1)))
    }

    /// `d^0_1 ⋯ d^0_1 x`.
    pub fn initial_vertex(&self, x: CubeId) -> CubeId {
        (0..self.dim(x)).fold(x, |cur, _| self.face(cur, Side::Front, 1))
    }

    /// `d^1_1 ⋯ d^1_1 x`.
    pub fn final_vertex(&self, x: CubeId) -> CubeId {
        (0..self.dim(x)).fold(x, |cur, _| self.face(cur, Side::Back, 1))
    }

    /// Image of the element of `⟦0,1⟧^{⊗n}` given by `coords` under `x_♯`.
    /// `None` marks a spanning coordinate `[0,1]`.
    pub(crate) fn image_of(&self, x: CubeId, coords: &[Option<Side>]) -> CubeId {
        debug_assert_eq!(coords.len(), self.dim(x));
        let mut cur = x;
        for (j, c) in coords.iter().enumerate().rev() {
            if let Some(k) = c {
                cur = self.face(cur, *k, j + 1);
            }
        }
        cur
    }

    /// The image `x_♯(⟦0,1⟧^{⊗n})` and whether `x_♯` is injective (`x` regular).
    pub fn cube_image(&self, x: CubeId) -> Result<(PrecubicalSubset, bool)> {
        self.check(x)?;
        let n = self.dim(x);
        let mut members = BTreeSet::new();
        let mut formal = 0usize;
        for coords in all_coords(n) {
            members.insert(self.image_of(x, &coords));
            formal += 1;
        }
        let injective = members.len() == formal;
        Ok((PrecubicalSubset { members }, injective))
    }

    pub fn is_regular(&self, x: CubeId) -> bool {
        self.cube_image(x).map(|(_, inj)| inj).unwrap_or(false)
    }

    /// All cubes having `x` among their iterated faces, including `x`.
    pub fn star(&self, x: CubeId) -> Result<BTreeSet<CubeId>> {
        self.check(x)?;
        let mut out = BTreeSet::from([x]);
        let mut queue = VecDeque::from([x]);
        while let Some(y) = queue.pop_front() {
            for &z in self.cofaces(y) {
                if out.insert(z) {
                    queue.push_back(z);
                }
            }
        }
        Ok(out)
    }

    /// Free faces sorted by cube id, then side, then index.
    pub fn free_faces(&self) -> Vec<FreeFace> {
        let mut out = Vec::new();
        for (&x, cube) in &self.cubes {
            for side in Side::BOTH {
                for i in 1..=cube.dim {
                    let f = cube.face(side, i);
                    if self.face_is_free(x, f) {
                        out.push(FreeFace {
                            cube: x,
                            side,
                            index: i,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn is_free_face(&self, x: CubeId, side: Side, i: usize) -> Result<bool> {
        let f = self.try_face(x, side, i)?;
        Ok(self.face_is_free(x, f))
    }

    /// `star(f) = {x, f}`, with `f` attached to `x` exactly once. The second
    /// clause only matters for non-regular `x` (e.g. the torus square, whose
    /// edges each occur twice among its faces).
    fn face_is_free(&self, x: CubeId, f: CubeId) -> bool {
        self.cofaces(f) == [x]
            && self.cofaces(x).is_empty()
            && self.direct_faces(x).iter().filter(|&&g| g == f).count() == 1
    }

    /// The edge `e^k_i x`: the image of the element with `[0,1]` at position `i`
    /// and `1-k` everywhere else.
    pub fn corner_edge(&self, x: CubeId, side: Side, i: usize) -> Result<CubeId> {
        self.check(x)?;
        let n = self.dim(x);
        if n == 0 || !(1..=n).contains(&i) {
            return Err(Error::arg(format!(
                "corner edge index {i} out of range for cube {x} of degree {n}"
            )));
        }
        let coords: Vec<Option<Side>> = (1..=n)
            .map(|j| if j == i { None } else { Some(side.flip()) })
            .collect();
        Ok(self.image_of(x, &coords))
    }

    /// The vertex `d_1^{1-k} ⋯ d_1^{1-k} d^k_i x`: corner with `k` at position `i`
    /// and `1-k` elsewhere.
    pub fn face_corner(&self, x: CubeId, side: Side, i: usize) -> Result<CubeId> {
        self.check(x)?;
        let n = self.dim(x);
        if !(1..=n).contains(&i) {
            return Err(Error::arg(format!("index {i} out of range for degree {n}")));
        }
        let corner: Vec<Side> = (1..=n)
            .map(|j| if j == i { side } else { side.flip() })
            .collect();
        self.vertex_at(x, &corner)
    }

    pub fn remove_star(&self, x: CubeId) -> Result<PrecubicalSet> {
        let star = self.star(x)?;
        Ok(self.without(&star))
    }

    /// The precubical subset `P ∖ S`. `S` must be upward closed for the result
    /// to be well formed, which holds for unions of stars.
    pub(crate) fn without(&self, removed: &BTreeSet<CubeId>) -> PrecubicalSet {
        let cubes = self
            .cubes
            .iter()
            .filter(|(id, _)| !removed.contains(id))
            .map(|(&id, c)| (id, c.clone()))
            .collect();
        PrecubicalSet::from_cubes(cubes)
    }

    /// Restriction to a subset closed under faces.
    pub fn restrict(&self, subset: &PrecubicalSubset) -> Result<PrecubicalSet> {
        if !subset.is_closed_in(self) {
            return Err(Error::pre("subset is not a precubical subset"));
        }
        let cubes = subset
            .members
            .iter()
            .map(|id| (*id, self.cubes[id].clone()))
            .collect();
        Ok(PrecubicalSet::from_cubes(cubes))
    }

    /// Returns a builder seeded with all cubes of `self`, keeping their ids.
    pub fn to_builder(&self) -> PcsBuilder {
        PcsBuilder {
            cubes: self.cubes.clone(),
            next: self.next_id().0,
        }
    }

    /// Removes the listed cubes from a builder-backed copy. Used by edge merging,
    /// where the removed cubes have no cofaces left.
    pub(crate) fn builder_without(&self, removed: &BTreeSet<CubeId>) -> PcsBuilder {
        let mut b = self.to_builder();
        for r in removed {
            b.cubes.remove(r);
        }
        b
    }

    /// Smallest precubical subset containing `seed`.
    pub fn closure<I: IntoIterator<Item = CubeId>>(&self, seed: I) -> Result<PrecubicalSubset> {
        let mut members = BTreeSet::new();
        let mut stack = Vec::new();
        for x in seed {
            self.check(x)?;
            if members.insert(x) {
                stack.push(x);
            }
        }
        while let Some(x) = stack.pop() {
            for &f in self.direct_faces(x) {
                if members.insert(f) {
                    stack.push(f);
                }
            }
        }
        Ok(PrecubicalSubset { members })
    }

    pub fn full(&self) -> PrecubicalSubset {
        self.ids().collect()
    }

    pub fn reachability(&self) -> Reachability {
        let vertices: Vec<CubeId> = self.vertices().collect();
        let index: BTreeMap<CubeId, usize> =
            vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = vertices.len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut m0: BTreeSet<CubeId> = vertices.iter().copied().collect();
        let mut m1 = m0.clone();
        for e in self.edges() {
            let (s, t) = (self.source(e), self.target(e));
            succ[index[&s]].push(index[&t]);
            m0.remove(&s);
            m1.remove(&t);
        }
        let reach = (0..n)
            .map(|start| {
                let mut seen = FixedBitSet::with_capacity(n);
                seen.insert(start);
                let mut stack = vec![start];
                while let Some(a) = stack.pop() {
                    for &b in &succ[a] {
                        if !seen.put(b) {
                            stack.push(b);
                        }
                    }
                }
                seen
            })
            .collect::<Vec<FixedBitSet>>();
        let acyclic = succ
            .iter()
            .enumerate()
            .all(|(a, ts)| ts.iter().all(|&b| !reach[b].contains(a)));
        Reachability {
            vertices,
            index,
            reach,
            acyclic,
            m0,
            m1,
        }
    }

    /// Every 2-cube `x` satisfies `d^0_1 x != d^0_2 x` and `d^1_1 x != d^1_2 x`.
    /// Returns the first failing 2-cube otherwise.
    pub fn is_weakly_regular(&self) -> (bool, Option<CubeId>) {
        for x in self.cubes_of_degree(2) {
            let c = &self.cubes[&x];
            if c.face(Side::Front, 1) == c.face(Side::Front, 2)
                || c.face(Side::Back, 1) == c.face(Side::Back, 2)
            {
                return (false, Some(x));
            }
        }
        (true, None)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (&x, cube) in &self.cubes {
            let n = cube.dim;
            for j in 2..=n {
                for i in 1..j {
                    for k in Side::BOTH {
                        for l in Side::BOTH {
                            let lhs = self.face(cube.face(l, j), k, i);
                            let rhs = self.face(cube.face(k, i), l, j - 1);
                            if lhs != rhs {
                                violations.push(Violation::Identity { cube: x, k, i, l, j });
                            }
                        }
                    }
                }
            }
        }
        ValidationReport::from_violations(violations)
    }
}

/// Every element of `⟦0,1⟧^{⊗n}` as a coordinate vector, `None` meaning `[0,1]`.
pub(crate) fn all_coords(n: usize) -> Vec<Vec<Option<Side>>> {
    let choices = [Some(Side::Front), Some(Side::Back), None];
    let mut out = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut v = prefix.clone();
                    v.push(*c);
                    v
                })
            })
            .collect();
    }
    out
}

/// Tensor product together with the map from factor pairs to product ids.
pub fn tensor_with_map(
    p: &PrecubicalSet,
    q: &PrecubicalSet,
) -> (PrecubicalSet, BTreeMap<(CubeId, CubeId), CubeId>) {
    let mut pairs: Vec<(usize, CubeId, CubeId)> = Vec::new();
    for a in p.ids() {
        for b in q.ids() {
            pairs.push((p.dim(a) + q.dim(b), a, b));
        }
    }
    pairs.sort();
    let ids: BTreeMap<(CubeId, CubeId), CubeId> = pairs
        .iter()
        .enumerate()
        .map(|(n, &(_, a, b))| ((a, b), CubeId(n as u32)))
        .collect();
    let mut builder = PcsBuilder::new();
    for &(_, a, b) in &pairs {
        let (da, db) = (p.dim(a), q.dim(b));
        let faces: Vec<(CubeId, CubeId)> = (1..=da + db)
            .map(|i| {
                let f = |side| {
                    if i <= da {
                        ids[&(p.face(a, side, i), b)]
                    } else {
                        ids[&(a, q.face(b, side, i - da))]
                    }
                };
                (f(Side::Front), f(Side::Back))
            })
            .collect();
        builder
            .insert(ids[&(a, b)], &faces)
            .expect("pair ids are distinct");
    }
    (builder.build().expect("tensor of well formed sets"), ids)
}

pub fn tensor(p: &PrecubicalSet, q: &PrecubicalSet) -> PrecubicalSet {
    tensor_with_map(p, q).0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn directed_circle() -> (PrecubicalSet, CubeId, CubeId) {
        let mut b = PcsBuilder::new();
        let v = b.vertex();
        let e = b.edge(v, v);
        (b.build().unwrap(), v, e)
    }

    pub(crate) fn torus() -> (PrecubicalSet, CubeId) {
        let mut b = PcsBuilder::new();
        let v = b.vertex();
        let a = b.edge(v, v);
        let bb = b.edge(v, v);
        let z = b.cube(&[(a, a), (bb, bb)]);
        (b.build().unwrap(), z)
    }

    fn square() -> PrecubicalSet {
        PrecubicalSet::standard_cube(2)
    }

    fn top(p: &PrecubicalSet) -> CubeId {
        let d = p.max_degree().unwrap();
        p.cubes_of_degree(d).next().unwrap()
    }

    #[test]
    fn standard_square_is_valid() {
        let p = square();
        assert!(p.validate().ok);
        assert_eq!(p.counts(), vec![4, 4, 1]);
    }

    #[test]
    fn corner_mismatch_is_reported() {
        let mut b = PcsBuilder::new();
        let v: Vec<_> = (0..5).map(|_| b.vertex()).collect();
        // d^0_1 x: v0 -> v1, d^1_1 x: v2 -> v3, d^0_2 x: v4 -> v2, d^1_2 x: v1 -> v3
        let e01 = b.edge(v[0], v[1]);
        let e23 = b.edge(v[2], v[3]);
        let e42 = b.edge(v[4], v[2]);
        let e13 = b.edge(v[1], v[3]);
        let x = b.cube(&[(e01, e23), (e42, e13)]);
        let p = b.build().unwrap();
        let rep = p.validate();
        assert!(!rep.ok);
        assert!(rep.violations.contains(&Violation::Identity {
            cube: x,
            k: Side::Front,
            i: 1,
            l: Side::Front,
            j: 2
        }));
    }

    #[test]
    fn torus_is_valid() {
        let (t, _) = torus();
        assert!(t.validate().ok);
    }

    #[test]
    fn intervals() {
        let i01 = PrecubicalSet::interval(0, 1).unwrap();
        assert_eq!(i01.counts(), vec![2, 1]);
        assert_eq!(PrecubicalSet::interval(3, 3).unwrap().counts(), vec![1]);
        let i04 = PrecubicalSet::interval(0, 4).unwrap();
        assert_eq!(i04.counts(), vec![5, 4]);
        let r = i04.reachability();
        assert!(r.reaches(CubeId(0), CubeId(4)));
        assert!(PrecubicalSet::interval(2, 1).is_err());
    }

    #[test]
    fn tensor_counts() {
        let unit = PrecubicalSet::interval(0, 1).unwrap();
        assert_eq!(tensor(&unit, &unit).counts(), vec![4, 4, 1]);
        let i02 = PrecubicalSet::interval(0, 2).unwrap();
        let t = tensor(&i02, &unit);
        assert_eq!(t.counts(), vec![6, 7, 2]);
        assert!(t.validate().ok);
        let sq = square();
        assert_eq!(tensor(&sq, &PrecubicalSet::point()), sq);
    }

    #[test]
    fn cube_images() {
        let sq = square();
        let (img, inj) = sq.cube_image(top(&sq)).unwrap();
        assert_eq!(img.len(), 9);
        assert!(inj);

        let (t, z) = torus();
        let (img, inj) = t.cube_image(z).unwrap();
        assert_eq!(img.len(), 4);
        assert!(!inj);

        let (c, v, e) = directed_circle();
        let (img, inj) = c.cube_image(e).unwrap();
        assert_eq!(img.members, BTreeSet::from([v, e]));
        assert!(!inj);
        assert!(c.cube_image(CubeId(99)).is_err());
    }

    #[test]
    fn weak_regularity() {
        let (c, _, _) = directed_circle();
        assert_eq!(c.is_weakly_regular(), (true, None));
        let (t, _) = torus();
        assert_eq!(t.is_weakly_regular(), (true, None));

        let mut b = PcsBuilder::new();
        let v0 = b.vertex();
        let v1 = b.vertex();
        let v2 = b.vertex();
        let a = b.edge(v0, v1);
        let c1 = b.edge(v1, v2);
        let c2 = b.edge(v1, v2);
        // d^0_1 = d^0_2 = a
        let x = b.cube(&[(a, c1), (a, c2)]);
        let pinched = b.build().unwrap();
        assert!(pinched.validate().ok);
        assert_eq!(pinched.is_weakly_regular(), (false, Some(x)));
    }

    #[test]
    fn stars_and_free_faces() {
        let sq = square();
        let x = top(&sq);
        assert_eq!(sq.star(x).unwrap(), BTreeSet::from([x]));
        let ff = sq.free_faces();
        assert_eq!(ff.len(), 4);
        for f in &ff {
            let e = sq.face(f.cube, f.side, f.index);
            assert_eq!(sq.star(e).unwrap(), BTreeSet::from([e, x]));
        }
        let (t, _) = torus();
        assert!(t.free_faces().is_empty());
    }

    #[test]
    fn corner_edges() {
        let unit = PrecubicalSet::interval(0, 1).unwrap();
        let e = unit.edges().next().unwrap();
        assert_eq!(unit.corner_edge(e, Side::Front, 1).unwrap(), e);
        let sq = square();
        let x = top(&sq);
        assert_eq!(
            sq.corner_edge(x, Side::Back, 1).unwrap(),
            sq.face(x, Side::Front, 2)
        );
        let c3 = PrecubicalSet::standard_cube(3);
        let x = top(&c3);
        let expected = c3.face(c3.face(x, Side::Back, 3), Side::Back, 1);
        assert_eq!(c3.corner_edge(x, Side::Front, 2).unwrap(), expected);
        assert!(sq.corner_edge(x, Side::Front, 3).is_err());
    }

    #[test]
    fn star_removal() {
        let sq = square();
        let x = top(&sq);
        let bottom = sq.face(x, Side::Front, 2);
        let r = sq.remove_star(bottom).unwrap();
        assert_eq!(r.counts(), vec![4, 3]);
        let c3 = PrecubicalSet::standard_cube(3);
        let r = c3.remove_star(top(&c3)).unwrap();
        assert_eq!(r.len(), 26);
        assert!(r.validate().ok);
    }

    #[test]
    fn reachability_and_extremal_vertices() {
        let i03 = PrecubicalSet::interval(0, 3).unwrap();
        let r = i03.reachability();
        assert!(r.reaches(CubeId(0), CubeId(3)));
        assert!(!r.reaches(CubeId(3), CubeId(0)));
        assert_eq!(r.m0, BTreeSet::from([CubeId(3)]));
        assert_eq!(r.m1, BTreeSet::from([CubeId(0)]));
        assert!(r.is_acyclic());

        let (c, v, _) = directed_circle();
        let r = c.reachability();
        assert!(r.reaches(v, v));
        assert!(r.m0.is_empty() && r.m1.is_empty());
        assert!(!r.is_acyclic());
    }

    #[test]
    fn closures() {
        let sq = square();
        let x = top(&sq);
        assert_eq!(sq.closure([x]).unwrap().len(), 9);
        assert!(sq.closure([]).unwrap().is_empty());
        let a = sq.face(x, Side::Front, 1);
        let b = sq.face(x, Side::Back, 1);
        let c = sq.closure([a, b]).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(c.vertices(&sq).count(), 4);
    }
}
