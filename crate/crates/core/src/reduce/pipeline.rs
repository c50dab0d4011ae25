use std::collections::BTreeMap;
use std::fmt;

use super::collapse::{
    apply_merge, check_elementary, check_merge, check_vertex_star, remove_star_keeping_states,
    MergeRecord,
};
use super::manual::check_manual_2cube;
use super::Judgment;
use crate::error::{Error, Result};
use crate::hda::{Hda, Word};
use crate::pcs::{CubeId, Side};
use crate::Limits;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepKind {
    Elementary { cube: CubeId, side: Side, index: usize },
    VertexStar { cube: CubeId, corner: Vec<Side> },
    Manual { cube: CubeId, side: Side, index: usize },
    Merge(MergeRecord),
}

impl StepKind {
    pub fn tag(&self) -> &'static str {
        match self {
            StepKind::Elementary { .. } => "elementary",
            StepKind::VertexStar { .. } => "vertex-star",
            StepKind::Manual { .. } => "manual",
            StepKind::Merge(_) => "merge",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepKind::Elementary { cube, side, index } | StepKind::Manual { cube, side, index } => {
                write!(f, "{} {cube} {side} {index}", self.tag())
            }
            StepKind::VertexStar { cube, corner } => {
                let ks: String = corner.iter().map(|k| k.to_string()).collect();
                write!(f, "{} {cube} {ks} -", self.tag())
            }
            StepKind::Merge(m) => write!(f, "merge {} - -", m.vertex),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub kind: StepKind,
    pub judgment: Judgment,
    pub forced: bool,
}

/// An explicit vertex map and edge-to-path map from a reduced HDA into the
/// original, for abstractions not produced by the pipeline.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Abstraction {
    pub vertices: BTreeMap<CubeId, CubeId>,
    pub edges: BTreeMap<CubeId, Vec<CubeId>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionReport {
    pub steps: Vec<Step>,
    /// Cube counts per degree before and after.
    pub before: Vec<usize>,
    pub after: Vec<usize>,
    /// Set for hand-written reports; such reports are checked through the maps
    /// instead of by replay.
    pub abstraction: Option<Abstraction>,
}

impl ReductionReport {
    /// New edge id ↦ (label, the two edges it replaced).
    pub fn merged_labels(&self) -> BTreeMap<CubeId, (Word, [CubeId; 2])> {
        self.steps
            .iter()
            .filter_map(|s| match &s.kind {
                StepKind::Merge(m) => Some((m.merged, (m.label.clone(), [m.incoming, m.outgoing]))),
                _ => None,
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[derive(Default)]
pub struct ReduceOptions {
    /// Also try 2-cube collapses whose conditions need path enumeration.
    pub enable_manual: bool,
    pub limits: Limits,
}


fn mixed_corners(n: usize) -> Vec<Vec<Side>> {
    (1..(1usize << n) - 1)
        .map(|bits| {
            (0..n)
                .map(|j| {
                    if bits >> (n - 1 - j) & 1 == 1 {
                        Side::Back
                    } else {
                        Side::Front
                    }
                })
                .collect()
        })
        .collect()
}

fn next_step(a: &Hda, opts: &ReduceOptions) -> Result<Option<(StepKind, Judgment, Hda)>> {
    let p = a.pcs();
    for f in p.free_faces() {
        if p.dim(f.cube) < 2 {
            continue;
        }
        let j = check_elementary(a, f.cube, f.side, f.index)?;
        if j.applicable {
            let b = remove_star_keeping_states(a, p.face(f.cube, f.side, f.index))?;
            let kind = StepKind::Elementary {
                cube: f.cube,
                side: f.side,
                index: f.index,
            };
            return Ok(Some((kind, j, b)));
        }
    }
    for x in p.ids().filter(|&x| p.dim(x) >= 2) {
        if !p.is_regular(x) {
            continue;
        }
        for ks in mixed_corners(p.dim(x)) {
            let j = check_vertex_star(a, x, &ks)?;
            if j.applicable {
                let b = remove_star_keeping_states(a, p.vertex_at(x, &ks)?)?;
                return Ok(Some((StepKind::VertexStar { cube: x, corner: ks }, j, b)));
            }
        }
    }
    if opts.enable_manual {
        for f in p.free_faces() {
            if p.dim(f.cube) != 2 {
                continue;
            }
            let j = check_manual_2cube(a, f.cube, f.side, f.index, &opts.limits)?;
            if j.applicable {
                let b = remove_star_keeping_states(a, p.face(f.cube, f.side, f.index))?;
                let kind = StepKind::Manual {
                    cube: f.cube,
                    side: f.side,
                    index: f.index,
                };
                return Ok(Some((kind, j, b)));
            }
        }
    }
    for v in p.vertices() {
        let j = check_merge(a, v)?;
        if j.applicable {
            let (b, rec) = apply_merge(a, v)?;
            return Ok(Some((StepKind::Merge(rec), j, b)));
        }
    }
    Ok(None)
}

/// Applies theorem-gated steps until none applies: elementary collapses,
/// then vertex-star collapses, then (optionally) checked 2-cube collapses,
/// then edge merges, always taking the lowest cube id first and restarting
/// after each step.
pub fn reduce(a: &Hda, opts: &ReduceOptions) -> Result<(Hda, ReductionReport)> {
    let mut cur = a.clone();
    let mut steps = Vec::new();
    while let Some((kind, judgment, next)) = next_step(&cur, opts)? {
        steps.push(Step {
            kind,
            judgment,
            forced: false,
        });
        cur = next;
    }
    let report = ReductionReport {
        steps,
        before: a.pcs().counts(),
        after: cur.pcs().counts(),
        abstraction: None,
    };
    Ok((cur, report))
}

/// Applies one step without re-checking its hypotheses.
pub fn apply_step(a: &Hda, kind: &StepKind) -> Result<Hda> {
    let p = a.pcs();
    let integrity = |e: Error| Error::Integrity(format!("step `{kind}`: {e}"));
    match kind {
        StepKind::Elementary { cube, side, index } | StepKind::Manual { cube, side, index } => {
            p.try_face(*cube, *side, *index)
                .and_then(|f| remove_star_keeping_states(a, f))
                .map_err(integrity)
        }
        StepKind::VertexStar { cube, corner } => p
            .vertex_at(*cube, corner)
            .and_then(|v| remove_star_keeping_states(a, v))
            .map_err(integrity),
        StepKind::Merge(rec) => {
            if p.degree(rec.vertex) != Some(0) {
                return Err(integrity(Error::UnknownCube(rec.vertex)));
            }
            let (b, got) = apply_merge(a, rec.vertex).map_err(integrity)?;
            if &got != rec {
                return Err(Error::Integrity(format!(
                    "merge at {} produced {} = {};{} instead of {} = {};{}",
                    rec.vertex, got.merged, got.incoming, got.outgoing, rec.merged, rec.incoming,
                    rec.outgoing
                )));
            }
            Ok(b)
        }
    }
}

/// Replays the steps of a report on its input.
pub fn replay(a: &Hda, report: &ReductionReport) -> Result<Hda> {
    if !report.before.is_empty() && a.pcs().counts() != report.before {
        return Err(Error::Integrity(format!(
            "input has counts {:?}, report expects {:?}",
            a.pcs().counts(),
            report.before
        )));
    }
    let mut cur = a.clone();
    for s in &report.steps {
        cur = apply_step(&cur, &s.kind)?;
    }
    if !report.after.is_empty() && cur.pcs().counts() != report.after {
        return Err(Error::Integrity(format!(
            "replay gives counts {:?}, report claims {:?}",
            cur.pcs().counts(),
            report.after
        )));
    }
    Ok(cur)
}
