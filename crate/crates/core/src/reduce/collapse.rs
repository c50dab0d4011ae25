use std::collections::BTreeSet;

use super::{Check, Judgment, Theorem};
use crate::error::{Error, Result};
use crate::hda::{Hda, Word};
use crate::pcs::{CubeId, PrecubicalSet, Side};

pub(crate) fn check_index(p: &PrecubicalSet, x: CubeId, i: usize) -> Result<usize> {
    let n = p.degree(x).ok_or(Error::UnknownCube(x))?;
    if !(1..=n).contains(&i) {
        return Err(Error::arg(format!("index {i} out of range for cube {x} of degree {n}")));
    }
    Ok(n)
}

pub(crate) fn weakly_regular_check(p: &PrecubicalSet) -> Check {
    let (ok, bad) = p.is_weakly_regular();
    Check::new("weakly-regular", ok, bad.map(|x| format!("2-cube {x}")))
}

pub(crate) fn regular_check(p: &PrecubicalSet, x: CubeId, n: usize) -> Check {
    let ok = n >= 2 && p.is_regular(x);
    let witness = if n < 2 {
        Some(format!("degree {n}"))
    } else if !ok {
        Some(format!("cube {x} is not regular"))
    } else {
        None
    };
    Check::new("regular", ok, witness)
}

pub(crate) fn free_face_check(p: &PrecubicalSet, x: CubeId, k: Side, i: usize) -> Result<Check> {
    let f = p.face(x, k, i);
    let ok = p.is_free_face(x, k, i)?;
    let witness = (!ok).then(|| {
        let star = p.star(f).unwrap_or_default();
        format!("star of {f} is {:?}", star.iter().map(|c| c.0).collect::<Vec<_>>())
    });
    Ok(Check::new("free-face", ok, witness))
}

/// No edge other than `e^k_i x` ends (k = 1) or starts (k = 0) in the corner
/// `d_1^{1-k} ⋯ d_1^{1-k} d^k_i x`.
pub(crate) fn unique_edge_check(p: &PrecubicalSet, x: CubeId, k: Side, i: usize) -> Result<Check> {
    let corner = p.face_corner(x, k, i)?;
    let e = p.corner_edge(x, k, i)?;
    let others: Vec<CubeId> = match k {
        Side::Back => p.in_edges(corner).filter(|&y| y != e).collect(),
        Side::Front => p.out_edges(corner).filter(|&y| y != e).collect(),
    };
    Ok(Check::new(
        "unique-edge",
        others.is_empty(),
        others.first().map(|y| format!("edge {y} also meets corner {corner}")),
    ))
}

/// Condition (i) of the 2-cube case: another edge leaves (k = 1) or enters
/// (k = 0) the vertex `d_1^{1-k} d^k_i x`.
pub(crate) fn alternative_edge_check(p: &PrecubicalSet, x: CubeId, k: Side, i: usize) -> Check {
    let f = p.face(x, k, i);
    let v = p.face(f, k.flip(), 1);
    let found = match k {
        Side::Back => p.out_edges(v).find(|&y| y != f),
        Side::Front => p.in_edges(v).find(|&y| y != f),
    };
    Check::new(
        "alternative-edge",
        found.is_some(),
        found
            .map(|y| format!("edge {y}"))
            .or_else(|| Some(format!("no second edge at {v}"))),
    )
}

/// Checks the hypotheses of the free-face collapse theorem for `d^k_i x`.
pub fn check_elementary(a: &Hda, x: CubeId, k: Side, i: usize) -> Result<Judgment> {
    let p = a.pcs();
    let n = check_index(p, x, i)?;
    let mut checks = vec![weakly_regular_check(p), regular_check(p, x, n)];
    checks.push(free_face_check(p, x, k, i)?);
    if n >= 2 {
        checks.push(unique_edge_check(p, x, k, i)?);
        if n <= 3 {
            let corner = p.face_corner(x, k, i)?;
            let bad = a.is_distinguished_endpoint(corner);
            checks.push(Check::new(
                "corner-not-distinguished",
                !bad,
                bad.then(|| format!("corner {corner} is initial or final")),
            ));
        }
        if n == 2 {
            checks.push(alternative_edge_check(p, x, k, i));
        }
    }
    let mut j = Judgment::from_checks(Theorem::for_degree(n), checks);
    if n < 2 {
        j.applicable = false;
        j.guarantees.clear();
    }
    Ok(j)
}

pub(crate) fn remove_star_keeping_states(a: &Hda, v: CubeId) -> Result<Hda> {
    let star = a.pcs().star(v)?;
    if let Some(s) = star.iter().find(|s| a.is_distinguished_endpoint(**s)) {
        return Err(Error::pre(format!("collapse would remove distinguished vertex {s}")));
    }
    Ok(a.with_pcs(a.pcs().without(&star)))
}

/// Removes `star(d^k_i x)`. Without `force` the step must pass
/// [`check_elementary`]; a forced step carries no guarantees.
pub fn collapse_elementary(
    a: &Hda,
    x: CubeId,
    k: Side,
    i: usize,
    force: bool,
) -> Result<(Hda, Judgment)> {
    let j = check_elementary(a, x, k, i)?;
    if !j.applicable && !force {
        return Err(Error::Refused(Box::new(j)));
    }
    let b = remove_star_keeping_states(a, a.pcs().face(x, k, i))?;
    Ok((b, if j.applicable { j } else { j.forced() }))
}

/// Checks the hypotheses of the vertex-star collapse at corner `ks` of `x`.
pub fn check_vertex_star(a: &Hda, x: CubeId, ks: &[Side]) -> Result<Judgment> {
    let p = a.pcs();
    let n = p.degree(x).ok_or(Error::UnknownCube(x))?;
    if ks.len() != n {
        return Err(Error::arg(format!(
            "corner of length {} for cube {x} of degree {n}",
            ks.len()
        )));
    }
    let mut checks = vec![regular_check(p, x, n)];
    checks.push(Check::new(
        "has-front",
        ks.contains(&Side::Front),
        None,
    ));
    checks.push(Check::new("has-back", ks.contains(&Side::Back), None));
    let v = p.vertex_at(x, ks)?;
    let bad = a.is_distinguished_endpoint(v);
    checks.push(Check::new(
        "vertex-not-distinguished",
        !bad,
        bad.then(|| format!("vertex {v} is initial or final")),
    ));
    let (image, _) = p.cube_image(x)?;
    let outside: Vec<CubeId> = p.star(v)?.into_iter().filter(|c| !image.contains(*c)).collect();
    checks.push(Check::new(
        "star-contained",
        outside.is_empty(),
        outside.first().map(|c| format!("cube {c} in star({v}) lies outside the image of {x}")),
    ));
    Ok(Judgment::from_checks(Theorem::VertexStar, checks))
}

pub fn collapse_vertex_star(
    a: &Hda,
    x: CubeId,
    ks: &[Side],
    force: bool,
) -> Result<(Hda, Judgment)> {
    let j = check_vertex_star(a, x, ks)?;
    if !j.applicable && !force {
        return Err(Error::Refused(Box::new(j)));
    }
    let b = remove_star_keeping_states(a, a.pcs().vertex_at(x, ks)?)?;
    Ok((b, if j.applicable { j } else { j.forced() }))
}

/// Result of joining the two edges through a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeRecord {
    pub vertex: CubeId,
    pub incoming: CubeId,
    pub outgoing: CubeId,
    pub merged: CubeId,
    pub label: Word,
}

/// Conditions for merging the edges through `v`.
pub fn check_merge(a: &Hda, v: CubeId) -> Result<Judgment> {
    let p = a.pcs();
    match p.degree(v) {
        None => return Err(Error::UnknownCube(v)),
        Some(0) => {}
        Some(n) => return Err(Error::arg(format!("{v} has degree {n}, not a vertex"))),
    }
    let mut checks = vec![weakly_regular_check(p)];
    let bad = a.is_distinguished_endpoint(v);
    checks.push(Check::new(
        "vertex-not-distinguished",
        !bad,
        bad.then(|| format!("vertex {v} is initial or final")),
    ));
    let ins: Vec<CubeId> = p.in_edges(v).collect();
    let outs: Vec<CubeId> = p.out_edges(v).collect();
    let shape = ins.len() == 1 && outs.len() == 1 && ins[0] != outs[0];
    checks.push(Check::new(
        "one-in-one-out",
        shape,
        (!shape).then(|| format!("{} incoming, {} outgoing edges", ins.len(), outs.len())),
    ));
    let higher: Vec<CubeId> = p
        .star(v)?
        .into_iter()
        .filter(|&c| p.dim(c) >= 2)
        .collect();
    checks.push(Check::new(
        "no-higher-cubes",
        higher.is_empty(),
        higher.first().map(|c| format!("vertex touches cube {c}")),
    ));
    Ok(Judgment::from_checks(Theorem::Merge, checks))
}

/// Replaces the edges `e_in → v → e_out` by one edge labeled with the
/// concatenated word. The new edge gets the next free id.
pub fn merge_edges(a: &Hda, v: CubeId) -> Result<(Hda, MergeRecord, Judgment)> {
    let j = check_merge(a, v)?;
    if !j.applicable {
        return Err(Error::Refused(Box::new(j)));
    }
    let (b, rec) = apply_merge(a, v)?;
    Ok((b, rec, j))
}

pub(crate) fn apply_merge(a: &Hda, v: CubeId) -> Result<(Hda, MergeRecord)> {
    let p = a.pcs();
    let (Some(e_in), Some(e_out)) = (p.in_edges(v).next(), p.out_edges(v).next()) else {
        return Err(Error::pre(format!("vertex {v} has no edge pair to merge")));
    };
    let removed = BTreeSet::from([v, e_in, e_out]);
    let mut builder = p.builder_without(&removed);
    let merged = builder.edge(p.source(e_in), p.target(e_out));
    let pcs = builder.build()?;
    let empty = Word::empty();
    let label = a
        .label(e_in)
        .unwrap_or(&empty)
        .concat(a.label(e_out).unwrap_or(&empty));
    let mut labels = a.labels().clone();
    labels.remove(&e_in);
    labels.remove(&e_out);
    labels.insert(merged, label.clone());
    let rec = MergeRecord {
        vertex: v,
        incoming: e_in,
        outgoing: e_out,
        merged,
        label,
    };
    Ok((a.with_parts(pcs, labels), rec))
}
