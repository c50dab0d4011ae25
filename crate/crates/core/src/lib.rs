//! Higher-dimensional automata over precubical sets: construction, homology,
//! dihomotopy, safe model reduction and property checking.

pub mod automata;
pub mod dipath;
pub mod error;
pub mod format;
pub mod hda;
pub mod homology;
pub mod ingest;
pub mod pcs;
pub mod props;
pub mod reduce;

pub use error::{Error, Result};
pub use hda::{Hda, Word};
pub use pcs::{CubeId, PcsBuilder, PrecubicalSet, PrecubicalSubset, Side};

/// Resource bounds shared by the exhaustive procedures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Paths held in one dihomotopy class or one enumeration.
    pub paths: usize,
    /// Global states explored when composing program graphs.
    pub states: usize,
    /// Largest cell count for exhaustive subset enumeration.
    pub oracle_cells: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            paths: 1_000_000,
            states: 1_000_000,
            oracle_cells: 20,
        }
    }
}
