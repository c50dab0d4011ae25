use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hda_core::dipath::{trace_category, Bound};
use hda_core::format::{read_hda, read_property, read_report, write_hda, write_report};
use hda_core::homology::{homology, homology_graph, GraphMode, Ring};
use hda_core::ingest::{builtin, compose, parse_program_graph, ComposeOptions};
use hda_core::props::{has_property, is_trace_closed, local_independence};
use hda_core::reduce::{certify, reduce, CertifyOptions, ReduceOptions, Verdict};
use hda_core::{Error, Hda, Limits};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "hda", version, about = "Higher-dimensional automata: reduction and property checking")]
struct Cli {
    #[command(flatten)]
    budget: Budget,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Budget {
    /// Maximum number of paths enumerated by path searches.
    #[arg(long, global = true, env = "HDA_BUDGET_PATHS")]
    budget_paths: Option<usize>,
    /// Maximum number of global states explored by `compose`.
    #[arg(long, global = true, env = "HDA_BUDGET_STATES")]
    budget_states: Option<usize>,
    /// Largest cell count for exhaustive homology-graph enumeration.
    #[arg(long, global = true, env = "HDA_BUDGET_ORACLE")]
    oracle_bound: Option<usize>,
}

impl Budget {
    fn limits(&self) -> Limits {
        let d = Limits::default();
        Limits {
            paths: self.budget_paths.unwrap_or(d.paths),
            states: self.budget_states.unwrap_or(d.states),
            oracle_cells: self.oracle_bound.unwrap_or(d.oracle_cells),
        }
    }
}

/// Models are read from a file, or taken from the built-in fixtures when no
/// such file exists (e.g. `fig6`, `grid3x2`).
#[derive(Subcommand)]
enum Command {
    /// Check the precubical identities and HDA conditions of a model.
    Validate {
        #[arg(long = "in")]
        input: String,
    },
    /// Print cube counts, distinguished states and structural flags.
    Info {
        #[arg(long = "in")]
        input: String,
    },
    /// Build the product HDA of program graphs.
    Compose {
        #[arg(required = true)]
        programs: Vec<PathBuf>,
        /// Variables shared between processes, comma separated.
        #[arg(long, value_delimiter = ',')]
        shared: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply theorem-gated collapses and edge merges until none applies.
    Reduce {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also try 2-cube collapses checked by path enumeration.
        #[arg(long)]
        enable_manual: bool,
        /// Never apply steps whose checks fail (the only mode of `reduce`).
        #[arg(long)]
        force_none: bool,
    },
    /// Collect evidence that a reduced model abstracts the original.
    Certify {
        #[arg(long)]
        original: String,
        #[arg(long)]
        reduced: String,
        #[arg(long)]
        report: PathBuf,
        /// Path length bound for trace categories of cyclic models.
        #[arg(long, default_value_t = 8)]
        trace_length: usize,
    },
    /// Print homology groups.
    Homology {
        #[arg(long = "in")]
        input: String,
        /// `z`, `q` or a prime such as `2`.
        #[arg(long, default_value = "z")]
        coeff: String,
    },
    /// Print the homology graph.
    Hgraph {
        #[arg(long = "in")]
        input: String,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
    },
    /// Print the trace category: dihomotopy classes between distinguished vertices.
    Trace {
        #[arg(long = "in")]
        input: String,
        /// Path length bound; defaults to the vertex count.
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Decide whether every accepted word of the model lies in a property.
    Check {
        #[arg(long)]
        model: String,
        #[arg(long)]
        property: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Bruteforce within the oracle bound, exact otherwise.
    Auto,
    Search,
    Exact,
    Bruteforce,
}

enum Failure {
    /// The command ran but its answer is negative.
    Negative(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<String, Failure>;

fn read_text(path: &FsPath) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &FsPath, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Argument(format!("cannot write {}: {e}", path.display())))
}

fn load(input: &str) -> Result<Hda, Error> {
    let path = FsPath::new(input);
    if path.exists() {
        return read_hda(&read_text(path)?);
    }
    match builtin(input) {
        Ok(b) => Ok(b.hda.unwrap_or_else(|| {
            Hda::new(b.pcs, BTreeSet::new(), BTreeSet::new(), BTreeMap::new())
        })),
        Err(_) => Err(Error::Argument(format!("{input}: no such file or built-in model"))),
    }
}

fn validate(input: &str) -> Outcome {
    let a = load(input)?;
    let rep = a.validate();
    if rep.ok {
        Ok("valid\n".into())
    } else {
        let mut out = String::new();
        for v in &rep.violations {
            writeln!(out, "violation {v}").unwrap();
        }
        Err(Failure::Negative(out))
    }
}

fn ids<'a>(it: impl IntoIterator<Item = &'a hda_core::CubeId>) -> String {
    it.into_iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

fn info(input: &str) -> Outcome {
    let a = load(input)?;
    let p = a.pcs();
    let r = p.reachability();
    let acc = a.accessibility();
    let mut out = String::new();
    let counts = p.counts();
    writeln!(out, "counts {}", counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")).unwrap();
    writeln!(out, "init {}", ids(a.initial())).unwrap();
    writeln!(out, "final {}", ids(a.finals())).unwrap();
    writeln!(out, "maximal {}", ids(&r.m0)).unwrap();
    writeln!(out, "minimal {}", ids(&r.m1)).unwrap();
    writeln!(out, "weakly-regular {}", p.is_weakly_regular().0).unwrap();
    writeln!(out, "acyclic {}", r.is_acyclic()).unwrap();
    writeln!(out, "accessible {}", acc.accessible).unwrap();
    writeln!(out, "coaccessible {}", acc.coaccessible).unwrap();
    let alphabet: Vec<String> = a.alphabet().iter().map(|w| format!("\"{w}\"")).collect();
    writeln!(out, "alphabet {}", alphabet.join(" ")).unwrap();
    Ok(out)
}

fn compose_cmd(programs: &[PathBuf], shared: Option<Vec<String>>, out: Option<&FsPath>, limits: Limits) -> Outcome {
    let pgs = programs
        .iter()
        .map(|p| read_text(p).and_then(|t| parse_program_graph(&t)))
        .collect::<Result<Vec<_>, _>>()?;
    let opts = ComposeOptions {
        shared: shared.map(|s| s.into_iter().collect()),
        limits,
        ..ComposeOptions::default()
    };
    let c = compose(&pgs, &opts)?;
    let text = write_hda(&c.hda);
    match out {
        Some(path) => {
            write_text(path, &text)?;
            Ok(format!("counts {:?}\n", c.hda.pcs().counts()))
        }
        None => Ok(text),
    }
}

fn reduce_cmd(
    input: &str,
    out: Option<&FsPath>,
    report: Option<&FsPath>,
    enable_manual: bool,
    limits: Limits,
) -> Outcome {
    let a = load(input)?;
    let opts = ReduceOptions { enable_manual, limits };
    let (b, rep) = reduce(&a, &opts)?;
    if let Some(path) = out {
        write_text(path, &write_hda(&b))?;
    }
    let rep_text = write_report(&rep);
    match report {
        Some(path) => write_text(path, &rep_text)?,
        None if out.is_none() => return Ok(rep_text),
        None => {}
    }
    Ok(format!(
        "{} steps: {:?} -> {:?}\n",
        rep.steps.len(),
        rep.before,
        rep.after
    ))
}

fn certify_cmd(original: &str, reduced: &str, report: &FsPath, trace_length: usize, limits: Limits) -> Outcome {
    let a = load(original)?;
    let b = load(reduced)?;
    let rep = read_report(&read_text(report)?)?;
    let c = certify(&a, &b, &rep, &CertifyOptions { limits, trace_length })?;
    match c.verdict {
        Verdict::Certified | Verdict::CertifiedBounded => Ok(c.to_string()),
        Verdict::Inconclusive | Verdict::Refuted => Err(Failure::Negative(c.to_string())),
    }
}

fn parse_ring(coeff: &str) -> Result<Ring, Error> {
    match coeff.to_ascii_lowercase().as_str() {
        "z" => Ok(Ring::Integers),
        "q" => Ok(Ring::Rationals),
        other => match other.parse::<u32>() {
            Ok(p) if p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) => Ok(Ring::Prime(p)),
            _ => Err(Error::Argument(format!("coefficients must be z, q or a prime, got {coeff}"))),
        },
    }
}

fn homology_cmd(input: &str, coeff: &str) -> Outcome {
    let ring = parse_ring(coeff)?;
    let a = load(input)?;
    let h = homology(a.pcs(), ring);
    let betti: Vec<String> = h.betti_trimmed().iter().map(|b| b.to_string()).collect();
    Ok(format!("{h}betti {}\n", betti.join(",")))
}

fn hgraph_cmd(input: &str, mode: Mode, limits: Limits) -> Outcome {
    let a = load(input)?;
    let p = a.pcs();
    let mode = match mode {
        Mode::Auto if p.len() <= limits.oracle_cells => GraphMode::Bruteforce,
        Mode::Auto | Mode::Exact => GraphMode::Exact,
        Mode::Search => GraphMode::search(),
        Mode::Bruteforce => GraphMode::Bruteforce,
    };
    let g = homology_graph(p, mode, &limits)?;
    let mut out = String::new();
    for (i, n) in g.nodes.iter().enumerate() {
        let support = ids(n.representative.keys());
        writeln!(out, "node {} : {support}", g.node_label(i)).unwrap();
    }
    write!(out, "{g}").unwrap();
    Ok(out)
}

fn trace_cmd(input: &str, bound: Option<usize>, limits: Limits) -> Outcome {
    let a = load(input)?;
    let bound = bound.map_or(Bound::Auto, Bound::Length);
    let tc = trace_category(&a, bound, &limits)?;
    let mut out = String::new();
    writeln!(out, "objects {}", ids(&tc.objects)).unwrap();
    for ((v, w), classes) in &tc.homs {
        writeln!(out, "hom {v} {w} : {} classes", classes.len()).unwrap();
        for c in classes {
            writeln!(out, "  {} ({} paths)", c.canonical(), c.len()).unwrap();
        }
    }
    writeln!(out, "morphisms {}", tc.morphism_count()).unwrap();
    writeln!(out, "max-length {}", tc.max_len).unwrap();
    writeln!(out, "complete {}", tc.complete).unwrap();
    Ok(out)
}

fn check_cmd(model: &str, property: &FsPath) -> Outcome {
    let a = load(model)?;
    let spec = read_property(&read_text(property)?)?;
    let l = spec.resolve(&a.letters())?;
    let invariant = is_trace_closed(&l, &local_independence(&a))?;
    let (holds, witness) = has_property(&a, &l)?;
    let note = if invariant {
        "trace-closed under local independence"
    } else {
        "not trace-closed under local independence"
    };
    if holds {
        Ok(format!("holds {} ({note})\n", l.name))
    } else {
        let w = witness.map(|w| w.to_string()).unwrap_or_default();
        Err(Failure::Negative(format!("fails {} ({note})\ncounterexample \"{w}\"\n", l.name)))
    }
}

fn run(cli: Cli) -> Outcome {
    let limits = cli.budget.limits();
    match cli.command {
        Command::Validate { input } => validate(&input),
        Command::Info { input } => info(&input),
        Command::Compose { programs, shared, out } => {
            compose_cmd(&programs, shared, out.as_deref(), limits)
        }
        Command::Reduce {
            input,
            out,
            report,
            enable_manual,
            force_none: _,
        } => reduce_cmd(&input, out.as_deref(), report.as_deref(), enable_manual, limits),
        Command::Certify {
            original,
            reduced,
            report,
            trace_length,
        } => certify_cmd(&original, &reduced, &report, trace_length, limits),
        Command::Homology { input, coeff } => homology_cmd(&input, &coeff),
        Command::Hgraph { input, mode } => hgraph_cmd(&input, mode, limits),
        Command::Trace { input, bound } => trace_cmd(&input, bound, limits),
        Command::Check { model, property } => check_cmd(&model, &property),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } => EXIT_BUDGET,
        Error::Argument(_) | Error::Parse { .. } | Error::Io(_) | Error::UnknownCube(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Negative(out)) => {
            print!("{out}");
            ExitCode::from(EXIT_FAIL)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
