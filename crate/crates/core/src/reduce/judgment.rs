use std::collections::BTreeSet;
use std::fmt;

/// The result which licenses a reduction step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Theorem {
    /// Free-face collapse of a cube of degree at least 4.
    ElemHighDim,
    ElemDim3,
    ElemDim2,
    VertexStar,
    /// Free-face collapse of a 2-cube whose trace-category and homology-graph
    /// conditions were checked individually.
    Manual2Cube,
    /// Merging two edges through a plain vertex.
    Merge,
}

impl Theorem {
    pub fn tag(self) -> &'static str {
        match self {
            Theorem::ElemHighDim => "elem-dim>=4",
            Theorem::ElemDim3 => "elem-dim3",
            Theorem::ElemDim2 => "elem-dim2",
            Theorem::VertexStar => "vertex-star",
            Theorem::Manual2Cube => "manual-2cube",
            Theorem::Merge => "merge",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Theorem> {
        [
            Theorem::ElemHighDim,
            Theorem::ElemDim3,
            Theorem::ElemDim2,
            Theorem::VertexStar,
            Theorem::Manual2Cube,
            Theorem::Merge,
        ]
        .into_iter()
        .find(|t| t.tag() == tag)
    }

    pub fn for_degree(n: usize) -> Theorem {
        match n {
            0..=2 => Theorem::ElemDim2,
            3 => Theorem::ElemDim3,
            _ => Theorem::ElemHighDim,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Guarantee {
    TraceIso,
    HomologyGraphIso,
    HomotopyEquiv,
    ExtremalPreserved,
    AccessPreserved,
}

impl Guarantee {
    pub const ALL: [Guarantee; 5] = [
        Guarantee::TraceIso,
        Guarantee::HomologyGraphIso,
        Guarantee::HomotopyEquiv,
        Guarantee::ExtremalPreserved,
        Guarantee::AccessPreserved,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Guarantee::TraceIso => "trace-iso",
            Guarantee::HomologyGraphIso => "homology-graph-iso",
            Guarantee::HomotopyEquiv => "homotopy-equiv",
            Guarantee::ExtremalPreserved => "extremal-preserved",
            Guarantee::AccessPreserved => "access-preserved",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Guarantee> {
        Guarantee::ALL.into_iter().find(|g| g.tag() == tag)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Could not be decided within the configured limits.
    Unknown,
}

impl Status {
    pub fn tag(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Unknown => "unknown",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Status> {
        [Status::Pass, Status::Fail, Status::Unknown]
            .into_iter()
            .find(|s| s.tag() == tag)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub witness: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, witness: Option<String>) -> Self {
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            witness,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Judgment {
    pub applicable: bool,
    pub theorem: Theorem,
    pub checks: Vec<Check>,
    pub guarantees: BTreeSet<Guarantee>,
}

impl Judgment {
    /// Applicable iff every check passed; then all guarantees of the theorem hold.
    pub fn from_checks(theorem: Theorem, checks: Vec<Check>) -> Self {
        let applicable = checks.iter().all(Check::passed);
        let guarantees = if applicable {
            Guarantee::ALL.into_iter().collect()
        } else {
            BTreeSet::new()
        };
        Judgment {
            applicable,
            theorem,
            checks,
            guarantees,
        }
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Drops all guarantees, as for a forced step.
    pub fn forced(mut self) -> Self {
        self.guarantees.clear();
        self
    }

    pub fn summary(&self) -> String {
        let failed: Vec<String> = self
            .failed()
            .map(|c| match &c.witness {
                Some(w) => format!("{} ({w})", c.name),
                None => c.name.clone(),
            })
            .collect();
        if failed.is_empty() {
            format!("{}: all checks pass", self.theorem)
        } else {
            format!("{}: failed {}", self.theorem, failed.join(", "))
        }
    }
}
