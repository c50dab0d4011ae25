//! Cellular homology of precubical sets.
//!
//! The chain complex has the cubes of degree `n` as basis in degree `n` and
//! boundary `∂x = Σ_i (-1)^i (d^0_i x - d^1_i x)`. Integer homology is read off
//! Smith normal forms; field coefficients follow from the integer invariant
//! factors.

mod graph;
pub mod snf;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::pcs::{CubeId, PrecubicalSet, PrecubicalSubset, Side};

pub use graph::{
    homology_graph, homology_graph_with_nodes, homology_iso_as_graphs, verify_pointing,
    EdgeStatus, GraphMode, GraphPairing, HomologyGraph, IsoVerdict, NoSource, PointingCertificate,
};
use snf::{smith, Matrix, Smith};

/// Sparse integer chain.
pub type Chain = BTreeMap<CubeId, BigInt>;

/// A boundary matrix with its row and column cubes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: Vec<CubeId>,
    pub cols: Vec<CubeId>,
    pub data: Matrix,
}

impl IntMatrix {
    pub fn get(&self, r: CubeId, c: CubeId) -> BigInt {
        let i = self.rows.iter().position(|&x| x == r);
        let j = self.cols.iter().position(|&x| x == c);
        match (i, j) {
            (Some(i), Some(j)) => self.data[i][j].clone(),
            _ => BigInt::zero(),
        }
    }

    pub fn column(&self, c: CubeId) -> Chain {
        let Some(j) = self.cols.iter().position(|&x| x == c) else {
            return Chain::new();
        };
        self.rows
            .iter()
            .zip(&self.data)
            .filter(|(_, row)| !row[j].is_zero())
            .map(|(&r, row)| (r, row[j].clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().flatten().all(Zero::is_zero)
    }

    /// `self · other` (the column cubes of `self` must be the row cubes of `other`).
    pub fn compose(&self, other: &IntMatrix) -> IntMatrix {
        let data = snf::mul(&self.data, &other.data, self.cols.len(), other.cols.len());
        IntMatrix {
            rows: self.rows.clone(),
            cols: other.cols.clone(),
            data,
        }
    }
}

/// Boundary of a single cube as a chain.
pub fn cube_boundary(p: &PrecubicalSet, x: CubeId) -> Chain {
    let mut out = Chain::new();
    let n = p.dim(x);
    for i in 1..=n {
        let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        *out.entry(p.face(x, Side::Front, i)).or_default() += &sign;
        *out.entry(p.face(x, Side::Back, i)).or_default() -= &sign;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn chain_boundary_of(p: &PrecubicalSet, c: &Chain) -> Chain {
    let mut out = Chain::new();
    for (&x, coef) in c {
        for (f, s) in cube_boundary(p, x) {
            *out.entry(f).or_default() += coef * s;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn cells(p: &PrecubicalSet, within: Option<&PrecubicalSubset>, n: usize) -> Vec<CubeId> {
    p.cubes_of_degree(n)
        .filter(|x| within.is_none_or(|s| s.contains(*x)))
        .collect()
}

fn boundary_matrix(p: &PrecubicalSet, within: Option<&PrecubicalSubset>, n: usize) -> IntMatrix {
    let cols = cells(p, within, n);
    let rows = if n == 0 { Vec::new() } else { cells(p, within, n - 1) };
    let index: BTreeMap<CubeId, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut data = snf::zeros(rows.len(), cols.len());
    for (j, &x) in cols.iter().enumerate() {
        for (f, s) in cube_boundary(p, x) {
            data[index[&f]][j] += s;
        }
    }
    IntMatrix { rows, cols, data }
}

/// The matrix of `∂_n` from degree-`n` chains to degree-`(n-1)` chains.
pub fn chain_boundary(p: &PrecubicalSet, n: usize) -> Result<IntMatrix> {
    if n == 0 {
        return Err(Error::arg("boundary degree must be at least 1"));
    }
    Ok(boundary_matrix(p, None, n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ring {
    Integers,
    Rationals,
    /// The prime field with the given characteristic.
    Prime(u32),
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => f.write_str("Z"),
            Ring::Rationals => f.write_str("Q"),
            Ring::Prime(p) => write!(f, "F{p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeHomology {
    pub betti: usize,
    /// Invariant factors greater than one; always empty over a field.
    pub torsion: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyProfile {
    pub ring: Ring,
    /// Indexed by degree, up to the top degree of the set.
    pub degrees: Vec<DegreeHomology>,
}

impl HomologyProfile {
    pub fn betti(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.betti).collect()
    }

    /// Betti numbers with trailing zeros removed.
    pub fn betti_trimmed(&self) -> Vec<usize> {
        let mut b = self.betti();
        while b.last() == Some(&0) {
            b.pop();
        }
        b
    }
}

impl fmt::Display for HomologyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, d) in self.degrees.iter().enumerate() {
            write!(f, "H{n}({}) = ", self.ring)?;
            let mut parts = Vec::new();
            if d.betti > 0 {
                parts.push(match (self.ring, d.betti) {
                    (Ring::Integers, 1) => "Z".to_string(),
                    (Ring::Integers, b) => format!("Z^{b}"),
                    (r, 1) => r.to_string(),
                    (r, b) => format!("{r}^{b}"),
                });
            }
            for t in &d.torsion {
                parts.push(format!("Z/{t}"));
            }
            if parts.is_empty() {
                parts.push("0".into());
            }
            writeln!(f, "{}", parts.join(" + "))?;
        }
        Ok(())
    }
}

/// Homology profile over the given coefficients.
pub fn homology(p: &PrecubicalSet, ring: Ring) -> HomologyProfile {
    homology_of(p, None, ring)
}

fn homology_of(p: &PrecubicalSet, within: Option<&PrecubicalSubset>, ring: Ring) -> HomologyProfile {
    let top = p.max_degree().unwrap_or(0);
    // invariant factors of ∂_n for n = 0..=top+1 (∂_0 and ∂_{top+1} are zero maps)
    let factors: Vec<Vec<BigInt>> = (0..=top + 1)
        .map(|n| {
            if n == 0 || n > top {
                return Vec::new();
            }
            let m = boundary_matrix(p, within, n);
            smith(&m.data, m.rows.len(), m.cols.len()).diag
        })
        .collect();
    let rank = |n: usize, ring: Ring| -> usize {
        match ring {
            Ring::Integers | Ring::Rationals => factors[n].len(),
            Ring::Prime(q) => {
                let q = BigInt::from(q);
                factors[n].iter().filter(|d| !d.is_multiple_of(&q)).count()
            }
        }
    };
    let degrees = (0..=top)
        .map(|n| {
            let c = cells(p, within, n).len();
            let betti = c - rank(n, ring) - rank(n + 1, ring);
            let torsion = match ring {
                Ring::Integers => factors[n + 1]
                    .iter()
                    .filter(|d| !d.is_one())
                    .cloned()
                    .collect(),
                _ => Vec::new(),
            };
            DegreeHomology { betti, torsion }
        })
        .collect();
    HomologyProfile { ring, degrees }
}

/// A homology class with its coordinates in a [`Homology`] basis and a cycle
/// representing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyClassRef {
    pub degree: usize,
    /// Free coordinates followed by torsion coordinates (reduced modulo their order).
    pub coords: Vec<BigInt>,
    pub representative: Chain,
}

#[derive(Clone, Debug)]
struct DegreeData {
    cells: Vec<CubeId>,
    index: BTreeMap<CubeId, usize>,
    /// Rank of `∂_n`; the first `rank` coordinates of `v_inv · z` vanish on cycles.
    rank: usize,
    v_inv: Matrix,
    /// Row transform of the image of `∂_{n+1}` in cycle coordinates.
    u: Matrix,
    /// Nonzero invariant factors of that image.
    factors: Vec<BigInt>,
    /// Generators of `Z_n` adapted to the image, as columns over `cells`.
    generators: Vec<Vec<BigInt>>,
    /// Sign applied to each free coordinate so that representatives are
    /// orientation-normalized.
    signs: Vec<BigInt>,
}

impl DegreeData {
    fn kernel_dim(&self) -> usize {
        self.cells.len() - self.rank
    }

    fn free_range(&self) -> std::ops::Range<usize> {
        self.factors.len()..self.kernel_dim()
    }

    fn torsion_positions(&self) -> Vec<usize> {
        (0..self.factors.len())
            .filter(|&j| !self.factors[j].is_one())
            .collect()
    }
}

/// Integer homology of a precubical set with an explicit basis.
#[derive(Clone, Debug)]
pub struct Homology {
    degrees: Vec<DegreeData>,
    profile: HomologyProfile,
}

impl Homology {
    pub fn compute(p: &PrecubicalSet) -> Homology {
        let top = p.max_degree().unwrap_or(0);
        let mut smiths: Vec<Option<Smith>> = Vec::new();
        for n in 0..=top + 1 {
            if n == 0 || n > top {
                smiths.push(None);
            } else {
                let m = boundary_matrix(p, None, n);
                smiths.push(Some(smith(&m.data, m.rows.len(), m.cols.len())));
            }
        }
        let mut degrees = Vec::new();
        for n in 0..=top {
            let cells = cells(p, None, n);
            let k = cells.len();
            let index = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
            let (rank, v, v_inv) = match &smiths[n] {
                Some(s) => (s.rank(), s.v.clone(), s.v_inv.clone()),
                None => (0, snf::identity(k), snf::identity(k)),
            };
            let kd = k - rank;
            // image of ∂_{n+1} in kernel coordinates
            let img_cols: Vec<Vec<BigInt>> = if n < top {
                let b = boundary_matrix(p, None, n + 1);
                (0..b.cols.len())
                    .map(|j| {
                        let col: Vec<BigInt> = b.data.iter().map(|r| r[j].clone()).collect();
                        snf::mul_vec(&v_inv, &col)[rank..].to_vec()
                    })
                    .collect()
            } else {
                Vec::new()
            };
            let mut c = snf::zeros(kd, img_cols.len());
            for (j, col) in img_cols.iter().enumerate() {
                for i in 0..kd {
                    c[i][j] = col[i].clone();
                }
            }
            let s2 = smith(&c, kd, img_cols.len());
            // generators: kernel basis (columns rank.. of v) times u_inv
            let generators: Vec<Vec<BigInt>> = (0..kd)
                .map(|j| {
                    (0..k)
                        .map(|row| {
                            (0..kd)
                                .map(|t| &v[row][rank + t] * &s2.u_inv[t][j])
                                .sum::<BigInt>()
                        })
                        .collect()
                })
                .collect();
            let signs = (0..kd)
                .map(|j| {
                    let first = generators[j].iter().find(|x| !x.is_zero());
                    if first.is_some_and(|x| x.is_negative()) {
                        -BigInt::one()
                    } else {
                        BigInt::one()
                    }
                })
                .collect();
            degrees.push(DegreeData {
                cells,
                index,
                rank,
                v_inv,
                u: s2.u,
                factors: s2.diag,
                generators,
                signs,
            });
        }
        let profile = HomologyProfile {
            ring: Ring::Integers,
            degrees: degrees
                .iter()
                .map(|d| DegreeHomology {
                    betti: d.free_range().len(),
                    torsion: d
                        .factors
                        .iter()
                        .filter(|f| !f.is_one())
                        .cloned()
                        .collect(),
                })
                .collect(),
        };
        Homology { degrees, profile }
    }

    pub fn profile(&self) -> &HomologyProfile {
        &self.profile
    }

    pub fn top_degree(&self) -> usize {
        self.degrees.len().saturating_sub(1)
    }

    pub fn betti(&self, n: usize) -> usize {
        self.profile.degrees.get(n).map_or(0, |d| d.betti)
    }

    fn vector(&self, n: usize, c: &Chain) -> Result<Vec<BigInt>> {
        let d = self
            .degrees
            .get(n)
            .ok_or_else(|| Error::arg(format!("no cells of degree {n}")))?;
        let mut v = vec![BigInt::zero(); d.cells.len()];
        for (x, coef) in c {
            let i = d
                .index
                .get(x)
                .ok_or_else(|| Error::arg(format!("cube {x} is not a cell of degree {n}")))?;
            v[*i] += coef;
        }
        Ok(v)
    }

    /// Coordinates of the class of a cycle: free part, then torsion part.
    pub fn coordinates(&self, n: usize, cycle: &Chain) -> Result<Vec<BigInt>> {
        let z = self.vector(n, cycle)?;
        let d = &self.degrees[n];
        let y = snf::mul_vec(&d.v_inv, &z);
        if y[..d.rank].iter().any(|x| !x.is_zero()) {
            return Err(Error::arg("chain is not a cycle"));
        }
        let t = snf::mul_vec(&d.u, &y[d.rank..]);
        let mut coords: Vec<BigInt> = d
            .free_range()
            .map(|j| &t[j] * &d.signs[j])
            .collect();
        for j in d.torsion_positions() {
            coords.push(t[j].mod_floor(&d.factors[j]));
        }
        Ok(coords)
    }

    /// The class of a cycle.
    pub fn class_of(&self, n: usize, cycle: &Chain) -> Result<HomologyClassRef> {
        Ok(HomologyClassRef {
            degree: n,
            coords: self.coordinates(n, cycle)?,
            representative: cycle.clone(),
        })
    }

    fn chain_of(&self, n: usize, v: &[BigInt], sign: &BigInt) -> Chain {
        self.degrees[n]
            .cells
            .iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&x, c)| (x, c * sign))
            .collect()
    }

    /// Free generators of `H_n`, in basis order.
    pub fn basis(&self, n: usize) -> Vec<HomologyClassRef> {
        let Some(d) = self.degrees.get(n) else {
            return Vec::new();
        };
        let width = d.free_range().len() + d.torsion_positions().len();
        d.free_range()
            .enumerate()
            .map(|(pos, j)| {
                let mut coords = vec![BigInt::zero(); width];
                coords[pos] = BigInt::one();
                HomologyClassRef {
                    degree: n,
                    coords,
                    representative: self.chain_of(n, &d.generators[j], &d.signs[j]),
                }
            })
            .collect()
    }

    /// Torsion generators of `H_n` with their orders.
    pub fn torsion_basis(&self, n: usize) -> Vec<(HomologyClassRef, BigInt)> {
        let Some(d) = self.degrees.get(n) else {
            return Vec::new();
        };
        let free = d.free_range().len();
        let tors = d.torsion_positions();
        let width = free + tors.len();
        tors.iter()
            .enumerate()
            .map(|(pos, &j)| {
                let mut coords = vec![BigInt::zero(); width];
                coords[free + pos] = BigInt::one();
                let class = HomologyClassRef {
                    degree: n,
                    coords,
                    representative: self.chain_of(n, &d.generators[j], &BigInt::one()),
                };
                (class, d.factors[j].clone())
            })
            .collect()
    }

    /// Free basis classes of every degree.
    pub fn all_basis(&self) -> Vec<HomologyClassRef> {
        (0..self.degrees.len()).flat_map(|n| self.basis(n)).collect()
    }

    fn torsion_orders(&self, n: usize) -> Vec<BigInt> {
        let d = &self.degrees[n];
        d.torsion_positions()
            .into_iter()
            .map(|j| d.factors[j].clone())
            .collect()
    }

    /// Coordinates (in this basis) of a generating set of the image of
    /// `H_n(X) → H_n(P)` for a precubical subset `X`.
    pub fn induced_image(
        &self,
        p: &PrecubicalSet,
        x: &PrecubicalSubset,
        n: usize,
    ) -> Result<Vec<Vec<BigInt>>> {
        if !x.is_closed_in(p) {
            return Err(Error::pre("subset is not closed under faces"));
        }
        if n >= self.degrees.len() {
            return Ok(Vec::new());
        }
        let cycles = subset_cycles(p, x, n);
        let mut out: Vec<Vec<BigInt>> = Vec::new();
        for z in cycles {
            let c = self.coordinates(n, &z)?;
            if c.iter().any(|v| !v.is_zero()) && !out.contains(&c) {
                out.push(c);
            }
        }
        Ok(out)
    }

    /// Whether the class with coordinates `coords` lies in the span of
    /// `generators`, accounting for torsion relations.
    pub fn in_span(&self, n: usize, generators: &[Vec<BigInt>], coords: &[BigInt]) -> bool {
        let free = self.betti(n);
        let mut cols = generators.to_vec();
        for (pos, ord) in self.torsion_orders(n).into_iter().enumerate() {
            let mut rel = vec![BigInt::zero(); coords.len()];
            rel[free + pos] = ord;
            cols.push(rel);
        }
        snf::in_lattice(&cols, coords)
    }

    pub fn in_image(
        &self,
        p: &PrecubicalSet,
        x: &PrecubicalSubset,
        class: &HomologyClassRef,
    ) -> Result<bool> {
        let gens = self.induced_image(p, x, class.degree)?;
        Ok(self.in_span(class.degree, &gens, &class.coords))
    }
}

/// A basis of the cycle group `Z_n(X)` of a precubical subset, as chains.
pub fn subset_cycles(p: &PrecubicalSet, x: &PrecubicalSubset, n: usize) -> Vec<Chain> {
    let m = boundary_matrix(p, Some(x), n);
    let k = m.cols.len();
    if k == 0 {
        return Vec::new();
    }
    if n == 0 || m.rows.is_empty() {
        return m
            .cols
            .iter()
            .map(|&c| Chain::from([(c, BigInt::one())]))
            .collect();
    }
    let s = smith(&m.data, m.rows.len(), k);
    (s.rank()..k)
        .map(|j| {
            m.cols
                .iter()
                .enumerate()
                .filter(|(row, _)| !s.v[*row][j].is_zero())
                .map(|(row, &c)| (c, s.v[row][j].clone()))
                .collect()
        })
        .collect()
}
