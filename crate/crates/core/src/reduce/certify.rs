use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use super::pipeline::{replay, Abstraction, ReductionReport, StepKind};
use super::{Guarantee, Status};
use crate::dipath::{trace_category, Bound, Path, TraceCategory};
use crate::error::{Error, Result};
use crate::hda::Hda;
use crate::homology::{homology, homology_iso_as_graphs, Chain, GraphMode, GraphPairing, IsoVerdict, Ring};
use crate::pcs::CubeId;
use crate::Limits;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertifyOptions {
    pub limits: Limits,
    /// Path length bound for trace categories of cyclic models.
    pub trace_length: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            limits: Limits::default(),
            trace_length: 8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Certified,
    /// Every clause holds, some only up to a path-length bound or on weaker
    /// evidence than a proof-carrying step.
    CertifiedBounded,
    Inconclusive,
    /// Some clause was shown to fail.
    Refuted,
}

impl Verdict {
    pub fn tag(self) -> &'static str {
        match self {
            Verdict::Certified => "certified",
            Verdict::CertifiedBounded => "certified-bounded",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Refuted => "refuted",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseResult {
    pub clause: &'static str,
    pub status: Status,
    pub bounded: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificationReport {
    pub verdict: Verdict,
    pub clauses: Vec<ClauseResult>,
}

impl CertificationReport {
    pub fn clause(&self, name: &str) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.clause == name)
    }
}

impl fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            let bound = if c.bounded { " (bounded)" } else { "" };
            writeln!(f, "{} {}{bound}: {}", c.clause, c.status.tag(), c.detail)?;
        }
        writeln!(f, "verdict {}", self.verdict)
    }
}

/// The map `B → A` of a reduction: identity on surviving cubes, merged edges
/// expanded into the edge paths they replaced.
fn morphism_of_steps(b: &Hda, report: &ReductionReport) -> Abstraction {
    let mut expand: BTreeMap<CubeId, Vec<CubeId>> = BTreeMap::new();
    for s in &report.steps {
        if let StepKind::Merge(m) = &s.kind {
            let mut path = expand.get(&m.incoming).cloned().unwrap_or(vec![m.incoming]);
            path.extend(expand.get(&m.outgoing).cloned().unwrap_or(vec![m.outgoing]));
            expand.insert(m.merged, path);
        }
    }
    Abstraction {
        vertices: b.pcs().vertices().map(|v| (v, v)).collect(),
        edges: b
            .pcs()
            .edges()
            .map(|e| (e, expand.get(&e).cloned().unwrap_or(vec![e])))
            .collect(),
    }
}

fn check_abstraction(a: &Hda, b: &Hda, f: &Abstraction) -> Result<()> {
    let (p, q) = (a.pcs(), b.pcs());
    for v in q.vertices() {
        match f.vertices.get(&v) {
            Some(w) if p.degree(*w) == Some(0) => {}
            _ => return Err(Error::Integrity(format!("vertex {v} has no image vertex"))),
        }
    }
    for e in q.edges() {
        let edges = f
            .edges
            .get(&e)
            .ok_or_else(|| Error::Integrity(format!("edge {e} has no image path")))?;
        let start = f.vertices[&q.source(e)];
        let path = Path::new(p, start, edges.clone())
            .map_err(|err| Error::Integrity(format!("image of edge {e}: {err}")))?;
        if path.end() != f.vertices[&q.target(e)] {
            return Err(Error::Integrity(format!("image of edge {e} ends in the wrong vertex")));
        }
        let label = a.extended_label(&path)?;
        let own = b.label(e).cloned().unwrap_or_default();
        if label != own {
            return Err(Error::Integrity(format!(
                "edge {e} is labeled {own} but its image reads {label}"
            )));
        }
    }
    Ok(())
}

fn image_path(p: &crate::pcs::PrecubicalSet, f: &Abstraction, w: &Path) -> Result<Path> {
    let edges = w.edges().iter().flat_map(|e| f.edges[e].iter().copied()).collect();
    Path::new(p, f.vertices[&w.start()], edges)
}

fn clause(name: &'static str, status: Status, bounded: bool, detail: String) -> ClauseResult {
    ClauseResult {
        clause: name,
        status,
        bounded,
        detail,
    }
}

fn distinguished_clause(a: &Hda, b: &Hda, f: &Abstraction) -> ClauseResult {
    let map = |s: &BTreeSet<CubeId>| -> BTreeSet<CubeId> { s.iter().map(|v| f.vertices[v]).collect() };
    let (ra, rb) = (a.pcs().reachability(), b.pcs().reachability());
    let mut bad = Vec::new();
    if map(b.initial()) != *a.initial() {
        bad.push("initial");
    }
    if map(b.finals()) != *a.finals() {
        bad.push("final");
    }
    if map(&rb.m0) != ra.m0 {
        bad.push("maximal");
    }
    if map(&rb.m1) != ra.m1 {
        bad.push("minimal");
    }
    let status = if bad.is_empty() { Status::Pass } else { Status::Fail };
    let detail = if bad.is_empty() {
        "initial, final, maximal and minimal vertices correspond".into()
    } else {
        format!("mismatch in {} vertices", bad.join(", "))
    };
    clause("distinguished", status, false, detail)
}

fn homotopy_clause(a: &Hda, b: &Hda, report: &ReductionReport) -> ClauseResult {
    let (ha, hb) = (homology(a.pcs(), Ring::Integers), homology(b.pcs(), Ring::Integers));
    let same = ha.betti_trimmed() == hb.betti_trimmed()
        && ha.degrees.iter().map(|d| &d.torsion).filter(|t| !t.is_empty()).collect::<Vec<_>>()
            == hb.degrees.iter().map(|d| &d.torsion).filter(|t| !t.is_empty()).collect::<Vec<_>>();
    if !same {
        return clause(
            "homotopy",
            Status::Fail,
            false,
            format!("homology {:?} vs {:?}", ha.betti(), hb.betti()),
        );
    }
    if report.abstraction.is_some() {
        return clause("homotopy", Status::Pass, true, "equal homology only".into());
    }
    let unproven: Vec<String> = report
        .steps
        .iter()
        .filter(|s| s.forced || !s.judgment.guarantees.contains(&Guarantee::HomotopyEquiv))
        .map(|s| s.kind.to_string())
        .collect();
    if unproven.is_empty() {
        clause(
            "homotopy",
            Status::Pass,
            false,
            format!("{} steps carry homotopy-equiv; homology equal", report.steps.len()),
        )
    } else {
        clause(
            "homotopy",
            Status::Pass,
            true,
            format!("equal homology; steps without guarantee: {}", unproven.join(", ")),
        )
    }
}

fn compare_categories(
    a: &Hda,
    f: &Abstraction,
    ta: &TraceCategory,
    tb: &TraceCategory,
) -> Result<std::result::Result<usize, String>> {
    let objects: BTreeSet<CubeId> = tb.objects.iter().map(|v| f.vertices[v]).collect();
    if objects != ta.objects || objects.len() != tb.objects.len() {
        return Ok(Err("object sets do not correspond".into()));
    }
    let mut total = 0;
    for &v in &tb.objects {
        for &w in &tb.objects {
            let targets = ta.hom(f.vertices[&v], f.vertices[&w]);
            let mut hit: BTreeSet<&Path> = BTreeSet::new();
            for class in tb.hom(v, w) {
                let img = image_path(a.pcs(), f, class.canonical())?;
                if img.len() > ta.max_len {
                    continue;
                }
                let Some(c) = ta.class_of(&img) else {
                    return Ok(Err(format!("no class for image of {}", class.canonical())));
                };
                if !hit.insert(c.canonical()) {
                    return Ok(Err(format!("two classes {v} -> {w} are identified")));
                }
            }
            if hit.len() != targets.len() {
                return Ok(Err(format!(
                    "hom({v}, {w}) has {} classes but only {} are hit",
                    targets.len(),
                    hit.len()
                )));
            }
            total += hit.len();
        }
    }
    Ok(Ok(total))
}

fn trace_clause(a: &Hda, b: &Hda, f: &Abstraction, opts: &CertifyOptions) -> Result<ClauseResult> {
    let acyclic = a.pcs().reachability().is_acyclic() && b.pcs().reachability().is_acyclic();
    let bound = if acyclic {
        Bound::Auto
    } else {
        Bound::Length(opts.trace_length)
    };
    let cats = trace_category(a, bound, &opts.limits)
        .and_then(|ta| trace_category(b, bound, &opts.limits).map(|tb| (ta, tb)));
    let (ta, tb) = match cats {
        Ok(c) => c,
        Err(Error::Budget { what, limit }) => {
            return Ok(clause("trace-category", Status::Unknown, !acyclic, format!("{what} over {limit}")))
        }
        Err(e) => return Err(e),
    };
    let bounded = !(ta.complete && tb.complete);
    Ok(match compare_categories(a, f, &ta, &tb)? {
        Ok(n) => {
            let hom: Vec<String> = a
                .initial()
                .iter()
                .flat_map(|&i| a.finals().iter().map(move |&t| (i, t)))
                .map(|(i, t)| format!("{}", ta.hom(i, t).len()))
                .collect();
            clause(
                "trace-category",
                Status::Pass,
                bounded,
                format!(
                    "{n} morphisms correspond (initial to final: {}){}",
                    hom.join(","),
                    if bounded {
                        format!(", paths up to length {}", ta.max_len)
                    } else {
                        String::new()
                    }
                ),
            )
        }
        Err(w) => clause("trace-category", Status::Fail, bounded, w),
    })
}

fn homology_graph_clause(a: &Hda, b: &Hda, f: &Abstraction, limits: &Limits) -> Result<ClauseResult> {
    let (p, q) = (a.pcs(), b.pcs());
    if q.max_degree().unwrap_or(0) >= 2 && q.ids().any(|x| q.dim(x) >= 2 && !p.contains(x)) {
        return Ok(clause(
            "homology-graph",
            Status::Unknown,
            false,
            "no chain map for higher cubes".into(),
        ));
    }
    let mut map: BTreeMap<CubeId, Chain> = BTreeMap::new();
    for (&v, &w) in &f.vertices {
        map.insert(v, Chain::from([(w, BigInt::one())]));
    }
    for (&e, path) in &f.edges {
        let mut c = Chain::new();
        for x in path {
            *c.entry(*x).or_default() += 1;
        }
        map.insert(e, c);
    }
    let mode = if p.len() <= limits.oracle_cells && q.len() <= limits.oracle_cells {
        GraphMode::Bruteforce
    } else {
        GraphMode::Exact
    };
    let pairing = GraphPairing::chain_map(p, q, &map)?;
    Ok(match homology_iso_as_graphs(p, q, &pairing, mode, limits) {
        Ok(IsoVerdict::Iso) => clause("homology-graph", Status::Pass, false, format!("{mode:?} comparison")),
        Ok(IsoVerdict::NotIso(w)) => clause("homology-graph", Status::Fail, false, w),
        Ok(IsoVerdict::Inconclusive(u)) => clause(
            "homology-graph",
            Status::Unknown,
            false,
            format!("{} undecided pairs", u.len()),
        ),
        Err(Error::Budget { what, limit }) => {
            clause("homology-graph", Status::Unknown, false, format!("{what} over {limit}"))
        }
        Err(Error::Precondition(w)) => clause("homology-graph", Status::Fail, false, w),
        Err(e) => return Err(e),
    })
}

/// Collects evidence that `b` is a topological abstraction of `a`: it replays
/// the report (or checks its explicit maps) and then compares distinguished
/// vertices, homology, trace categories and homology graphs.
pub fn certify(
    a: &Hda,
    b: &Hda,
    report: &ReductionReport,
    opts: &CertifyOptions,
) -> Result<CertificationReport> {
    let f = match &report.abstraction {
        Some(f) => {
            check_abstraction(a, b, f)?;
            f.clone()
        }
        None => {
            let replayed = replay(a, report)?;
            if replayed != *b {
                return Err(Error::Integrity("replaying the report does not give the claimed output".into()));
            }
            morphism_of_steps(b, report)
        }
    };
    let clauses = vec![
        distinguished_clause(a, b, &f),
        homotopy_clause(a, b, report),
        trace_clause(a, b, &f, opts)?,
        homology_graph_clause(a, b, &f, &opts.limits)?,
    ];
    let verdict = if clauses.iter().any(|c| c.status == Status::Fail) {
        Verdict::Refuted
    } else if clauses.iter().any(|c| c.status == Status::Unknown) {
        Verdict::Inconclusive
    } else if clauses.iter().any(|c| c.bounded) {
        Verdict::CertifiedBounded
    } else {
        Verdict::Certified
    };
    Ok(CertificationReport { verdict, clauses })
}
