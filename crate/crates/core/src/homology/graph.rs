//! The pointing relation between homology classes.
//!
//! `α` points to `β` when there are precubical subsets `X`, `Y` carrying them
//! (`α ∈ im H(X)`, `β ∈ im H(Y)`) such that every vertex of `X` reaches every
//! vertex of `Y`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{cube_boundary, snf, Chain, Homology, HomologyClassRef};
use crate::error::{Error, Result};
use crate::pcs::{CubeId, PrecubicalSet, PrecubicalSubset, Reachability};
use crate::Limits;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointingCertificate {
    pub x: PrecubicalSubset,
    pub y: PrecubicalSubset,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NoSource {
    /// Exhaustive enumeration of precubical subsets.
    Oracle,
    /// Exhaustive over maximal reachability rectangles.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeStatus {
    Yes(PointingCertificate),
    No(NoSource),
    Unknown,
}

impl EdgeStatus {
    pub fn is_yes(&self) -> bool {
        matches!(self, EdgeStatus::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, EdgeStatus::No(_))
    }
}

impl fmt::Display for EdgeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeStatus::Yes(_) => f.write_str("yes"),
            EdgeStatus::No(_) => f.write_str("no"),
            EdgeStatus::Unknown => f.write_str("unknown"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphMode {
    /// Certificates from perturbed representatives; sound but incomplete.
    Search { depth: usize },
    /// Decides every pair through the maximal sets `A × B ⊆ →`.
    Exact,
    /// Enumerates every closed subset; bounded by [`Limits::oracle_cells`].
    Bruteforce,
}

impl GraphMode {
    pub fn search() -> Self {
        GraphMode::Search { depth: 2 }
    }
}

#[derive(Clone, Debug)]
pub struct HomologyGraph {
    pub nodes: Vec<HomologyClassRef>,
    pub mode: GraphMode,
    /// Status of every ordered node pair.
    pub edges: BTreeMap<(usize, usize), EdgeStatus>,
}

impl HomologyGraph {
    pub fn status(&self, a: usize, b: usize) -> &EdgeStatus {
        &self.edges[&(a, b)]
    }

    pub fn points(&self, a: usize, b: usize) -> bool {
        self.status(a, b).is_yes()
    }

    pub fn yes_edges(&self) -> BTreeSet<(usize, usize)> {
        self.pairs(EdgeStatus::is_yes)
    }

    pub fn no_edges(&self) -> BTreeSet<(usize, usize)> {
        self.pairs(EdgeStatus::is_no)
    }

    pub fn unknown_edges(&self) -> BTreeSet<(usize, usize)> {
        self.pairs(|s| matches!(s, EdgeStatus::Unknown))
    }

    fn pairs(&self, f: impl Fn(&EdgeStatus) -> bool) -> BTreeSet<(usize, usize)> {
        self.edges
            .iter()
            .filter(|(_, s)| f(s))
            .map(|(&k, _)| k)
            .collect()
    }

    /// `degree:index` with the index counted within the node's degree.
    pub fn node_label(&self, i: usize) -> String {
        let d = self.nodes[i].degree;
        let idx = self.nodes[..i].iter().filter(|n| n.degree == d).count();
        format!("{d}:{idx}")
    }
}

impl fmt::Display for HomologyGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((a, b), s) in &self.edges {
            if s.is_yes() {
                let how = if self.mode == GraphMode::Bruteforce { "oracle" } else { "cert" };
                writeln!(f, "point {} -> {} [{how}]", self.node_label(*a), self.node_label(*b))?;
            }
        }
        let fmt_set = |set: BTreeSet<(usize, usize)>| {
            set.iter()
                .map(|(a, b)| format!("{}->{}", self.node_label(*a), self.node_label(*b)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let unknown = self.unknown_edges();
        writeln!(f, "unknown {} {}", unknown.len(), fmt_set(unknown.clone()).trim_end())?;
        let no = self.no_edges();
        writeln!(f, "no {} {}", no.len(), fmt_set(no.clone()).trim_end())
    }
}

struct Context<'a> {
    p: &'a PrecubicalSet,
    h: &'a Homology,
    nodes: &'a [HomologyClassRef],
    reach: Reachability,
    /// Vertex positions (in `reach`) spanned by each cube.
    spans: BTreeMap<CubeId, FixedBitSet>,
    cache: HashMap<PrecubicalSubset, Vec<bool>>,
}

impl<'a> Context<'a> {
    fn new(p: &'a PrecubicalSet, h: &'a Homology, nodes: &'a [HomologyClassRef]) -> Self {
        let reach = p.reachability();
        let nv = reach.vertices().len();
        let mut spans = BTreeMap::new();
        for n in 0..=p.max_degree().unwrap_or(0) {
            for x in p.cubes_of_degree(n) {
                let mut s = FixedBitSet::with_capacity(nv);
                if n == 0 {
                    s.insert(reach.index_of(x).expect("vertex"));
                } else {
                    for f in p.direct_faces(x) {
                        s.union_with(&spans[f]);
                    }
                }
                spans.insert(x, s);
            }
        }
        Context {
            p,
            h,
            nodes,
            reach,
            spans,
            cache: HashMap::new(),
        }
    }

    fn vertex_mask(&self, x: &PrecubicalSubset) -> FixedBitSet {
        let mut m = FixedBitSet::with_capacity(self.reach.vertices().len());
        for c in &x.members {
            m.union_with(&self.spans[c]);
        }
        m
    }

    /// Every vertex of `a` reaches every vertex of `b`.
    fn rectangle(&self, a: &FixedBitSet, b: &FixedBitSet) -> bool {
        a.ones()
            .all(|i| b.is_subset(self.reach.successors(self.reach.vertices()[i]).unwrap()))
    }

    /// Which nodes lie in the image of `H(X) → H(P)`.
    fn membership(&mut self, x: &PrecubicalSubset) -> Result<Vec<bool>> {
        if let Some(m) = self.cache.get(x) {
            return Ok(m.clone());
        }
        let degrees: BTreeSet<usize> = self.nodes.iter().map(|n| n.degree).collect();
        let mut images = BTreeMap::new();
        for n in degrees {
            images.insert(n, self.h.induced_image(self.p, x, n)?);
        }
        let m: Vec<bool> = self
            .nodes
            .iter()
            .map(|a| self.h.in_span(a.degree, &images[&a.degree], &a.coords))
            .collect();
        self.cache.insert(x.clone(), m.clone());
        Ok(m)
    }

    fn verify(&mut self, a: usize, b: usize, cert: &PointingCertificate) -> Result<bool> {
        let (va, vb) = (self.vertex_mask(&cert.x), self.vertex_mask(&cert.y));
        if !self.rectangle(&va, &vb) {
            return Ok(false);
        }
        Ok(self.membership(&cert.x)?[a] && self.membership(&cert.y)?[b])
    }

    /// All cubes whose vertices lie in `a`.
    fn full(&self, a: &FixedBitSet) -> PrecubicalSubset {
        self.spans
            .iter()
            .filter(|(_, s)| s.is_subset(a))
            .map(|(&c, _)| c)
            .collect()
    }

    /// Closures of supports of cycles homologous to the node's representative.
    fn candidates(&self, a: usize, depth: usize) -> Result<Vec<PrecubicalSubset>> {
        let node = &self.nodes[a];
        let rep = &node.representative;
        let mut adjacent: BTreeSet<CubeId> = BTreeSet::new();
        for c in rep.keys() {
            adjacent.extend(
                self.p
                    .cofaces(*c)
                    .iter()
                    .filter(|&&y| self.p.dim(y) == node.degree + 1),
            );
        }
        let boundaries: Vec<Chain> = adjacent.iter().map(|&y| cube_boundary(self.p, y)).collect();
        let mut chains = vec![rep.clone()];
        let mut frontier = vec![(rep.clone(), 0usize)];
        for _ in 0..depth {
            let mut next = Vec::new();
            for (c, start) in &frontier {
                for (k, b) in boundaries.iter().enumerate().skip(*start) {
                    for sign in [1i32, -1] {
                        let mut d = c.clone();
                        for (x, v) in b {
                            *d.entry(*x).or_default() += v * BigInt::from(sign);
                        }
                        d.retain(|_, v| !v.is_zero());
                        next.push((d.clone(), k + 1));
                        chains.push(d);
                    }
                }
            }
            frontier = next;
        }
        let mut out: BTreeSet<(usize, PrecubicalSubset)> = BTreeSet::new();
        for c in chains {
            if c.is_empty() {
                continue;
            }
            let x = self.p.closure(c.keys().copied())?;
            out.insert((x.len(), x));
        }
        if node.degree == 0 {
            for v in self.p.vertices() {
                let single = Chain::from([(v, BigInt::one())]);
                if self.h.coordinates(0, &single)? == node.coords {
                    let x: PrecubicalSubset = [v].into_iter().collect();
                    out.insert((1, x));
                }
            }
        }
        Ok(out.into_iter().map(|(_, x)| x).collect())
    }
}

fn normalized_nodes(h: &Homology, nodes: Vec<HomologyClassRef>) -> Result<Vec<HomologyClassRef>> {
    nodes
        .into_iter()
        .map(|n| {
            let c = h.class_of(n.degree, &n.representative)?;
            if c.coords.iter().all(Zero::is_zero) {
                return Err(Error::arg("homology graph nodes must be nonzero classes"));
            }
            Ok(c)
        })
        .collect()
}

/// The homology graph on the free basis of `H_*(P)`.
pub fn homology_graph(p: &PrecubicalSet, mode: GraphMode, limits: &Limits) -> Result<HomologyGraph> {
    let h = Homology::compute(p);
    let nodes = h.all_basis();
    homology_graph_with_nodes(p, &h, nodes, mode, limits)
}

/// The pointing relation restricted to the given classes (given by their
/// representatives; coordinates are recomputed against `h`).
pub fn homology_graph_with_nodes(
    p: &PrecubicalSet,
    h: &Homology,
    nodes: Vec<HomologyClassRef>,
    mode: GraphMode,
    limits: &Limits,
) -> Result<HomologyGraph> {
    let nodes = normalized_nodes(h, nodes)?;
    let mut ctx = Context::new(p, h, &nodes);
    let edges = match mode {
        GraphMode::Search { depth } => search(&mut ctx, depth)?,
        GraphMode::Exact => exact(&mut ctx, limits)?,
        GraphMode::Bruteforce => bruteforce(&mut ctx, limits)?,
    };
    Ok(HomologyGraph { nodes, mode, edges })
}

fn search(ctx: &mut Context, depth: usize) -> Result<BTreeMap<(usize, usize), EdgeStatus>> {
    let n = ctx.nodes.len();
    let cands: Vec<Vec<PrecubicalSubset>> =
        (0..n).map(|a| ctx.candidates(a, depth)).collect::<Result<_>>()?;
    let masks: Vec<Vec<FixedBitSet>> = cands
        .iter()
        .map(|cs| cs.iter().map(|x| ctx.vertex_mask(x)).collect())
        .collect();
    let mut edges = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            let mut status = EdgeStatus::Unknown;
            'found: for (x, mx) in cands[a].iter().zip(&masks[a]) {
                for (y, my) in cands[b].iter().zip(&masks[b]) {
                    if !ctx.rectangle(mx, my) {
                        continue;
                    }
                    let cert = PointingCertificate {
                        x: x.clone(),
                        y: y.clone(),
                    };
                    if ctx.verify(a, b, &cert)? {
                        status = EdgeStatus::Yes(cert);
                        break 'found;
                    }
                }
            }
            edges.insert((a, b), status);
        }
    }
    Ok(edges)
}

fn exact(ctx: &mut Context, limits: &Limits) -> Result<BTreeMap<(usize, usize), EdgeStatus>> {
    let verts = ctx.reach.vertices().to_vec();
    let nv = verts.len();
    // intents: intersections of successor sets (the empty intersection is everything)
    let mut top = FixedBitSet::with_capacity(nv);
    top.insert_range(..);
    let mut intents: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut list = vec![top.clone()];
    intents.insert(top.ones().collect());
    for &v in &verts {
        let succ = ctx.reach.successors(v).unwrap().clone();
        let mut added = Vec::new();
        for i in &list {
            let mut m = i.clone();
            m.intersect_with(&succ);
            if intents.insert(m.ones().collect()) {
                added.push(m);
            }
        }
        list.extend(added);
        if list.len() > limits.states {
            return Err(Error::budget("reachability rectangles", limits.states));
        }
    }
    let n = ctx.nodes.len();
    let mut edges: BTreeMap<(usize, usize), EdgeStatus> = BTreeMap::new();
    for b in &list {
        if b.is_clear() {
            continue;
        }
        let mut a = FixedBitSet::with_capacity(nv);
        for (i, &v) in verts.iter().enumerate() {
            if b.is_subset(ctx.reach.successors(v).unwrap()) {
                a.insert(i);
            }
        }
        if a.is_clear() {
            continue;
        }
        let x = ctx.full(&a);
        let y = ctx.full(b);
        let mx = ctx.membership(&x)?;
        let my = ctx.membership(&y)?;
        for s in (0..n).filter(|&s| mx[s]) {
            for t in (0..n).filter(|&t| my[t]) {
                edges.entry((s, t)).or_insert_with(|| {
                    EdgeStatus::Yes(PointingCertificate {
                        x: x.clone(),
                        y: y.clone(),
                    })
                });
            }
        }
    }
    for s in 0..n {
        for t in 0..n {
            edges.entry((s, t)).or_insert(EdgeStatus::No(NoSource::Exact));
        }
    }
    Ok(edges)
}

/// Every subset of `p` closed under faces, in a deterministic order.
pub(crate) fn closed_subsets(p: &PrecubicalSet, limits: &Limits) -> Result<Vec<PrecubicalSubset>> {
    if p.len() > limits.oracle_cells {
        return Err(Error::budget("oracle cell count", limits.oracle_cells));
    }
    let cells: Vec<CubeId> = (0..=p.max_degree().unwrap_or(0))
        .flat_map(|n| p.cubes_of_degree(n))
        .collect();
    let mut out = Vec::new();
    let mut current = BTreeSet::new();
    fn go(
        p: &PrecubicalSet,
        cells: &[CubeId],
        k: usize,
        current: &mut BTreeSet<CubeId>,
        out: &mut Vec<PrecubicalSubset>,
    ) {
        if k == cells.len() {
            out.push(PrecubicalSubset {
                members: current.clone(),
            });
            return;
        }
        go(p, cells, k + 1, current, out);
        let x = cells[k];
        if p.direct_faces(x).iter().all(|f| current.contains(f)) {
            current.insert(x);
            go(p, cells, k + 1, current, out);
            current.remove(&x);
        }
    }
    go(p, &cells, 0, &mut current, &mut out);
    Ok(out)
}

fn bruteforce(ctx: &mut Context, limits: &Limits) -> Result<BTreeMap<(usize, usize), EdgeStatus>> {
    let n = ctx.nodes.len();
    // per vertex set: first witness subset for each node
    let mut groups: BTreeMap<Vec<usize>, (FixedBitSet, Vec<Option<PrecubicalSubset>>)> =
        BTreeMap::new();
    for x in closed_subsets(ctx.p, limits)? {
        if x.is_empty() {
            continue;
        }
        let m = ctx.membership(&x)?;
        if !m.iter().any(|&b| b) {
            continue;
        }
        let vm = ctx.vertex_mask(&x);
        let entry = groups
            .entry(vm.ones().collect())
            .or_insert_with(|| (vm.clone(), vec![None; n]));
        for (s, &inside) in m.iter().enumerate() {
            if inside && entry.1[s].is_none() {
                entry.1[s] = Some(x.clone());
            }
        }
    }
    let groups: Vec<_> = groups.into_values().collect();
    let mut edges = BTreeMap::new();
    for (ma, wa) in &groups {
        for (mb, wb) in &groups {
            if !ctx.rectangle(ma, mb) {
                continue;
            }
            for (s, x) in wa.iter().enumerate() {
                let Some(x) = x else { continue };
                for (t, y) in wb.iter().enumerate() {
                    let Some(y) = y else { continue };
                    edges.entry((s, t)).or_insert_with(|| {
                        EdgeStatus::Yes(PointingCertificate {
                            x: x.clone(),
                            y: y.clone(),
                        })
                    });
                }
            }
        }
    }
    for s in 0..n {
        for t in 0..n {
            edges.entry((s, t)).or_insert(EdgeStatus::No(NoSource::Oracle));
        }
    }
    Ok(edges)
}

/// Checks a pointing certificate against the integer homology of `p`
/// (classes are given in the basis of [`Homology::compute`]).
pub fn verify_pointing(
    p: &PrecubicalSet,
    alpha: &HomologyClassRef,
    beta: &HomologyClassRef,
    cert: &PointingCertificate,
) -> Result<bool> {
    if !cert.x.is_closed_in(p) || !cert.y.is_closed_in(p) {
        return Err(Error::pre("certificate subsets must be closed under faces"));
    }
    let h = Homology::compute(p);
    let nodes = [alpha.clone(), beta.clone()];
    let mut ctx = Context::new(p, &h, &nodes);
    ctx.verify(0, 1, cert)
}

/// Corresponding node lists: `q_nodes[i]` in `Q` is paired with `p_nodes[i]` in `P`.
#[derive(Clone, Debug)]
pub struct GraphPairing {
    pub q_nodes: Vec<HomologyClassRef>,
    pub p_nodes: Vec<HomologyClassRef>,
}

impl GraphPairing {
    /// `Q`'s free basis paired with its images under a chain map `Q → P`
    /// (cubes absent from `map` are sent to themselves).
    pub fn chain_map(
        p: &PrecubicalSet,
        q: &PrecubicalSet,
        map: &BTreeMap<CubeId, Chain>,
    ) -> Result<GraphPairing> {
        let hq = Homology::compute(q);
        let hp = Homology::compute(p);
        let q_nodes = hq.all_basis();
        let p_nodes = q_nodes
            .iter()
            .map(|n| {
                let mut image = Chain::new();
                for (x, c) in &n.representative {
                    let target = map
                        .get(x)
                        .cloned()
                        .unwrap_or_else(|| Chain::from([(*x, BigInt::one())]));
                    for (y, d) in target {
                        *image.entry(y).or_default() += c * d;
                    }
                }
                image.retain(|_, v| !v.is_zero());
                hp.class_of(n.degree, &image)
            })
            .collect::<Result<_>>()?;
        Ok(GraphPairing { q_nodes, p_nodes })
    }

    /// Pairing induced by the inclusion of a subcomplex `Q ⊆ P` sharing cube ids.
    pub fn inclusion(p: &PrecubicalSet, q: &PrecubicalSet) -> Result<GraphPairing> {
        GraphPairing::chain_map(p, q, &BTreeMap::new())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoVerdict {
    Iso,
    /// A profile difference or a pair pointing on one side only.
    NotIso(String),
    /// No contradiction, but some pairs are undecided.
    Inconclusive(Vec<(usize, usize)>),
}

fn is_basis(h: &Homology, nodes: &[HomologyClassRef]) -> bool {
    for n in 0..=h.top_degree() {
        let b = h.betti(n);
        let cols: Vec<&HomologyClassRef> = nodes.iter().filter(|c| c.degree == n).collect();
        if cols.len() != b {
            return false;
        }
        if b == 0 {
            continue;
        }
        let mut m = snf::zeros(b, b);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..b {
                m[i][j] = c.coords[i].clone();
            }
        }
        let s = snf::smith(&m, b, b);
        if s.rank() != b || s.diag.iter().any(|d| !d.is_one()) {
            return false;
        }
    }
    nodes.iter().all(|c| c.degree <= h.top_degree())
}

/// Compares pointing relations of `P` and `Q` under the pairing.
pub fn homology_iso_as_graphs(
    p: &PrecubicalSet,
    q: &PrecubicalSet,
    pairing: &GraphPairing,
    mode: GraphMode,
    limits: &Limits,
) -> Result<IsoVerdict> {
    let hp = Homology::compute(p);
    let hq = Homology::compute(q);
    let (pp, pq) = (hp.profile(), hq.profile());
    let trimmed = |h: &super::HomologyProfile| {
        let mut d = h.degrees.clone();
        while d.last().is_some_and(|x| x.betti == 0 && x.torsion.is_empty()) {
            d.pop();
        }
        d
    };
    if trimmed(pp) != trimmed(pq) {
        return Ok(IsoVerdict::NotIso(format!(
            "homology differs: {:?} vs {:?}",
            pp.betti(),
            pq.betti()
        )));
    }
    if pairing.q_nodes.len() != pairing.p_nodes.len() {
        return Err(Error::pre("pairing has unequal sides"));
    }
    let p_nodes = normalized_nodes(&hp, pairing.p_nodes.clone())?;
    let q_nodes = normalized_nodes(&hq, pairing.q_nodes.clone())?;
    if p_nodes
        .iter()
        .zip(&q_nodes)
        .any(|(a, b)| a.degree != b.degree)
        || !is_basis(&hp, &p_nodes)
        || !is_basis(&hq, &q_nodes)
    {
        return Err(Error::pre("pairing is not a bijection between free bases"));
    }
    let gp = homology_graph_with_nodes(p, &hp, p_nodes, mode, limits)?;
    let gq = homology_graph_with_nodes(q, &hq, q_nodes, mode, limits)?;
    let mut unknown = Vec::new();
    for (&(a, b), sq) in &gq.edges {
        let sp = gp.status(a, b);
        match (sq, sp) {
            (EdgeStatus::Yes(_), EdgeStatus::No(_)) | (EdgeStatus::No(_), EdgeStatus::Yes(_)) => {
                return Ok(IsoVerdict::NotIso(format!(
                    "pair {} -> {} is {sq} in the reduced set but {sp} in the original",
                    gq.node_label(a),
                    gq.node_label(b)
                )));
            }
            (EdgeStatus::Unknown, _) | (_, EdgeStatus::Unknown) => unknown.push((a, b)),
            _ => {}
        }
    }
    Ok(if unknown.is_empty() {
        IsoVerdict::Iso
    } else {
        IsoVerdict::Inconclusive(unknown)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcs::PcsBuilder;

    fn circle() -> PrecubicalSet {
        let mut b = PcsBuilder::new();
        let v = b.vertex();
        b.edge(v, v);
        b.build().unwrap()
    }

    /// Two directed circles joined by an edge from the first to the second.
    fn two_circles() -> PrecubicalSet {
        let mut b = PcsBuilder::new();
        let u = b.vertex();
        let v = b.vertex();
        b.edge(u, u);
        b.edge(u, v);
        b.edge(v, v);
        b.build().unwrap()
    }

    #[test]
    fn modes_agree_on_small_sets() {
        let limits = Limits::default();
        for p in [circle(), two_circles(), PrecubicalSet::standard_cube(2)] {
            let brute = homology_graph(&p, GraphMode::Bruteforce, &limits).unwrap();
            let exact = homology_graph(&p, GraphMode::Exact, &limits).unwrap();
            let search = homology_graph(&p, GraphMode::search(), &limits).unwrap();
            assert_eq!(brute.yes_edges(), exact.yes_edges());
            assert!(search.yes_edges().is_subset(&brute.yes_edges()));
            for (&(a, b), s) in &exact.edges {
                if let EdgeStatus::Yes(c) = s {
                    assert!(verify_pointing(&p, &exact.nodes[a], &exact.nodes[b], c).unwrap());
                }
            }
        }
    }

    #[test]
    fn one_way_pointing() {
        let p = two_circles();
        let g = homology_graph(&p, GraphMode::Exact, &Limits::default()).unwrap();
        let loops: Vec<usize> = (0..g.nodes.len()).filter(|&i| g.nodes[i].degree == 1).collect();
        assert_eq!(loops.len(), 2);
        let (a, b) = (loops[0], loops[1]);
        assert_ne!(g.points(a, b), g.points(b, a));
        assert!(g.points(a, a) && g.points(b, b));
        let swapped = GraphPairing {
            q_nodes: vec![g.nodes[0].clone(), g.nodes[a].clone(), g.nodes[b].clone()],
            p_nodes: vec![g.nodes[0].clone(), g.nodes[b].clone(), g.nodes[a].clone()],
        };
        let v = homology_iso_as_graphs(&p, &p, &swapped, GraphMode::Exact, &Limits::default());
        assert!(matches!(v.unwrap(), IsoVerdict::NotIso(_)));
        let same = GraphPairing::inclusion(&p, &p).unwrap();
        let v = homology_iso_as_graphs(&p, &p, &same, GraphMode::Bruteforce, &Limits::default());
        assert_eq!(v.unwrap(), IsoVerdict::Iso);
    }

    #[test]
    fn oracle_bound() {
        let limits = Limits {
            oracle_cells: 3,
            ..Limits::default()
        };
        let p = PrecubicalSet::standard_cube(2);
        assert!(matches!(
            homology_graph(&p, GraphMode::Bruteforce, &limits),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn bad_pairing() {
        let p = two_circles();
        let h = Homology::compute(&p);
        let b1 = h.basis(1);
        let pairing = GraphPairing {
            q_nodes: h.all_basis(),
            p_nodes: vec![h.basis(0)[0].clone(), b1[0].clone(), b1[0].clone()],
        };
        assert!(matches!(
            homology_iso_as_graphs(&p, &p, &pairing, GraphMode::Exact, &Limits::default()),
            Err(Error::Precondition(_))
        ));
    }
}
