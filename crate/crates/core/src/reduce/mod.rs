//! Safe model reduction: theorem-gated collapses, edge merging, a greedy
//! pipeline with replayable reports, and certification of the result.

mod certify;
mod collapse;
mod judgment;
mod manual;
mod pipeline;

pub use certify::{certify, CertificationReport, CertifyOptions, ClauseResult, Verdict};
pub use collapse::{
    check_elementary, check_merge, check_vertex_star, collapse_elementary, collapse_vertex_star,
    merge_edges, MergeRecord,
};
pub use judgment::{Check, Guarantee, Judgment, Status, Theorem};
pub use manual::{check_manual_2cube, collapse_manual_2cube};
pub use pipeline::{
    apply_step, reduce, replay, Abstraction, ReduceOptions, ReductionReport, Step, StepKind,
};
