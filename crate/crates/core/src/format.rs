//! Line-based text formats for precubical sets, HDAs, paths, reduction
//! reports and properties. `#` starts a comment; tokens are separated by
//! whitespace and may be double-quoted (with `\"` and `\\` escapes).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::automata::Nfa;
use crate::dipath::Path;
use crate::error::{Error, Result};
use crate::hda::{Hda, Word};
use crate::pcs::{CubeId, PcsBuilder, PrecubicalSet, Side};
use crate::props::PropertySpec;
use crate::reduce::{
    Abstraction, Check, Guarantee, Judgment, MergeRecord, ReductionReport, Status, Step, StepKind,
    Theorem,
};

#[derive(Clone, Debug)]
struct Tok {
    text: String,
    col: usize,
}

struct Line {
    no: usize,
    toks: Vec<Tok>,
    end: usize,
}

impl Line {
    fn err(&self, idx: usize, msg: impl Into<String>) -> Error {
        let col = self.toks.get(idx).map_or(self.end, |t| t.col);
        Error::parse(self.no, col, msg)
    }

    fn get(&self, idx: usize, what: &str) -> Result<&str> {
        self.toks
            .get(idx)
            .map(|t| t.text.as_str())
            .ok_or_else(|| self.err(idx, format!("expected {what}")))
    }

    fn num<T: std::str::FromStr>(&self, idx: usize, what: &str) -> Result<T> {
        let s = self.get(idx, what)?;
        s.parse()
            .map_err(|_| self.err(idx, format!("expected {what}, found `{s}`")))
    }

    fn id(&self, idx: usize) -> Result<CubeId> {
        Ok(CubeId(self.num(idx, "a cube id")?))
    }

    fn keyword(&self, idx: usize, kw: &str) -> Result<()> {
        match self.toks.get(idx) {
            Some(t) if t.text == kw => Ok(()),
            _ => Err(self.err(idx, format!("expected `{kw}`"))),
        }
    }

    fn arity(&self, n: usize) -> Result<()> {
        if self.toks.len() > n {
            Err(self.err(n, "unexpected trailing token"))
        } else if self.toks.len() < n {
            Err(self.err(self.toks.len(), "missing field"))
        } else {
            Ok(())
        }
    }
}

fn lex(text: &str) -> Result<Vec<Line>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut toks = Vec::new();
        let mut j = 0;
        while j < chars.len() {
            let c = chars[j];
            if c.is_whitespace() {
                j += 1;
                continue;
            }
            if c == '#' {
                break;
            }
            let col = j + 1;
            let mut s = String::new();
            if c == '"' {
                j += 1;
                loop {
                    match chars.get(j) {
                        None => return Err(Error::parse(no, col, "unterminated string")),
                        Some('"') => {
                            j += 1;
                            break;
                        }
                        Some('\\') => {
                            match chars.get(j + 1) {
                                Some(&e @ ('"' | '\\')) => s.push(e),
                                Some('n') => s.push('\n'),
                                _ => return Err(Error::parse(no, j + 1, "bad escape")),
                            }
                            j += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            j += 1;
                        }
                    }
                }
            } else {
                while j < chars.len() && !chars[j].is_whitespace() {
                    s.push(chars[j]);
                    j += 1;
                }
            }
            toks.push(Tok { text: s, col });
        }
        if !toks.is_empty() {
            out.push(Line {
                no,
                toks,
                end: chars.len() + 1,
            });
        }
    }
    Ok(out)
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn header<'a>(lines: &'a [Line], accepted: &[&str]) -> Result<&'a [Line]> {
    let Some(first) = lines.first() else {
        return Err(Error::parse(1, 1, "empty input"));
    };
    let h = format!(
        "{} {}",
        first.get(0, "a header")?,
        first.toks.get(1).map_or("", |t| t.text.as_str())
    );
    if first.toks.len() != 2 || !accepted.contains(&h.as_str()) {
        return Err(first.err(0, format!("expected header `{}`", accepted[0])));
    }
    Ok(&lines[1..])
}

/// Precubical set records plus optional HDA records.
struct ModelParts {
    pcs: PrecubicalSet,
    init: BTreeSet<CubeId>,
    fin: BTreeSet<CubeId>,
    labels: BTreeMap<CubeId, Word>,
}

fn read_model(text: &str) -> Result<ModelParts> {
    let lines = lex(text)?;
    let body = header(&lines, &["pcs v1", "hda v1"])?;
    let mut dims: BTreeMap<CubeId, (usize, &Line)> = BTreeMap::new();
    let mut faces: BTreeMap<(CubeId, usize, usize), (CubeId, &Line)> = BTreeMap::new();
    let mut init = BTreeSet::new();
    let mut fin = BTreeSet::new();
    let mut labels: BTreeMap<CubeId, (Word, &Line)> = BTreeMap::new();
    for l in body {
        match l.get(0, "a record")? {
            "cube" => {
                l.arity(4)?;
                let id = l.id(1)?;
                l.keyword(2, "dim")?;
                let n: usize = l.num(3, "a degree")?;
                if let Some((m, _)) = dims.get(&id) {
                    if *m != n {
                        return Err(l.err(3, format!("cube {id} declared with degrees {m} and {n}")));
                    }
                }
                dims.insert(id, (n, l));
            }
            "face" => {
                l.arity(5)?;
                let id = l.id(1)?;
                let k: u8 = l.num(2, "0 or 1")?;
                if k > 1 {
                    return Err(l.err(2, "face side must be 0 or 1"));
                }
                let i: usize = l.num(3, "a face index")?;
                let target = l.id(4)?;
                if let Some((prev, _)) = faces.get(&(id, k as usize, i)) {
                    if *prev != target {
                        return Err(l.err(
                            4,
                            format!("conflicting face d^{k}_{i} of cube {id}: {prev} and {target}"),
                        ));
                    }
                }
                faces.insert((id, k as usize, i), (target, l));
            }
            "init" => {
                l.arity(2)?;
                init.insert(l.id(1)?);
            }
            "final" => {
                l.arity(2)?;
                fin.insert(l.id(1)?);
            }
            "label" => {
                l.arity(3)?;
                let e = l.id(1)?;
                let w = Word::parse(l.get(2, "a label")?);
                if let Some((prev, _)) = labels.get(&e) {
                    if *prev != w {
                        return Err(l.err(2, format!("edge {e} labeled twice")));
                    }
                }
                labels.insert(e, (w, l));
            }
            other => return Err(l.err(0, format!("unknown record `{other}`"))),
        }
    }
    for (&(id, k, i), &(target, l)) in &faces {
        let Some(&(n, _)) = dims.get(&id) else {
            return Err(l.err(1, format!("face of undeclared cube {id}")));
        };
        if i == 0 || i > n {
            return Err(l.err(3, format!("index {i} out of range for cube {id} of degree {n}")));
        }
        match dims.get(&target) {
            None => return Err(l.err(4, format!("face refers to undeclared cube {target}"))),
            Some(&(m, _)) if m + 1 != n => {
                return Err(l.err(
                    4,
                    format!("face d^{k}_{i} of {id} (degree {n}) is {target} of degree {m}"),
                ))
            }
            _ => {}
        }
    }
    let mut b = PcsBuilder::new();
    for (&id, &(n, l)) in &dims {
        let mut list = Vec::with_capacity(n);
        for i in 1..=n {
            let f = |k: usize| {
                faces
                    .get(&(id, k, i))
                    .map(|(t, _)| *t)
                    .ok_or_else(|| l.err(1, format!("cube {id} lacks face d^{k}_{i}")))
            };
            list.push((f(0)?, f(1)?));
        }
        b.insert(id, &list)?;
    }
    let pcs = b.build()?;
    for (e, (_, l)) in &labels {
        if !pcs.contains(*e) {
            return Err(l.err(1, format!("label for undeclared cube {e}")));
        }
    }
    for v in init.iter().chain(&fin) {
        if !pcs.contains(*v) {
            return Err(Error::parse(1, 1, format!("distinguished state {v} is not declared")));
        }
    }
    Ok(ModelParts {
        pcs,
        init,
        fin,
        labels: labels.into_iter().map(|(e, (w, _))| (e, w)).collect(),
    })
}

/// Reads a `pcs v1` file; HDA records, if present, are ignored.
pub fn read_pcs(text: &str) -> Result<PrecubicalSet> {
    Ok(read_model(text)?.pcs)
}

/// Reads a `pcs v1` file with `init`, `final` and `label` records.
pub fn read_hda(text: &str) -> Result<Hda> {
    let m = read_model(text)?;
    Ok(Hda::new(m.pcs, m.init, m.fin, m.labels))
}

fn write_cubes(out: &mut String, p: &PrecubicalSet) {
    out.push_str("pcs v1\n");
    for x in p.ids() {
        writeln!(out, "cube {x} dim {}", p.dim(x)).unwrap();
    }
    for x in p.ids() {
        for i in 1..=p.dim(x) {
            for k in [Side::Front, Side::Back] {
                writeln!(out, "face {x} {k} {i} {}", p.face(x, k, i)).unwrap();
            }
        }
    }
}

pub fn write_pcs(p: &PrecubicalSet) -> String {
    let mut out = String::new();
    write_cubes(&mut out, p);
    out
}

pub fn write_hda(a: &Hda) -> String {
    let mut out = String::new();
    write_cubes(&mut out, a.pcs());
    for v in a.initial() {
        writeln!(out, "init {v}").unwrap();
    }
    for v in a.finals() {
        writeln!(out, "final {v}").unwrap();
    }
    for (e, w) in a.labels() {
        writeln!(out, "label {e} {}", quote(&w.to_string())).unwrap();
    }
    out
}

/// `path <start> : <edge> …`
pub fn write_path(w: &Path) -> String {
    let mut s = format!("path {} :", w.start());
    for e in w.edges() {
        write!(s, " {e}").unwrap();
    }
    s
}

/// Reads one `path` record and checks it against `p`.
pub fn read_path(text: &str, p: &PrecubicalSet) -> Result<Path> {
    let lines = lex(text)?;
    let [l] = &lines[..] else {
        return Err(Error::parse(1, 1, "expected exactly one path record"));
    };
    l.keyword(0, "path")?;
    let start = l.id(1)?;
    l.keyword(2, ":")?;
    let edges = (3..l.toks.len()).map(|i| l.id(i)).collect::<Result<Vec<_>>>()?;
    Path::new(p, start, edges).map_err(|e| l.err(0, e.to_string()))
}

fn side_of(l: &Line, idx: usize) -> Result<Side> {
    let b: u8 = l.num(idx, "0 or 1")?;
    Side::from_bit(b).map_err(|_| l.err(idx, "expected 0 or 1"))
}

fn default_theorem(kind: &StepKind) -> Theorem {
    match kind {
        StepKind::Elementary { .. } => Theorem::ElemDim2,
        StepKind::VertexStar { .. } => Theorem::VertexStar,
        StepKind::Manual { .. } => Theorem::Manual2Cube,
        StepKind::Merge(_) => Theorem::Merge,
    }
}

pub fn write_report(r: &ReductionReport) -> String {
    let mut out = String::from("report v1\n");
    let counts = |c: &[usize]| c.iter().map(|n| format!(" {n}")).collect::<String>();
    writeln!(out, "before{}", counts(&r.before)).unwrap();
    writeln!(out, "after{}", counts(&r.after)).unwrap();
    for s in &r.steps {
        writeln!(out, "step {}", s.kind).unwrap();
        if let StepKind::Merge(m) = &s.kind {
            writeln!(
                out,
                "merged {} = {};{} {}",
                m.merged,
                m.incoming,
                m.outgoing,
                quote(&m.label.to_string())
            )
            .unwrap();
        }
        let j = &s.judgment;
        writeln!(out, "theorem {}", j.theorem).unwrap();
        let g: String = j.guarantees.iter().map(|g| format!(" {}", g.tag())).collect();
        writeln!(out, "guarantees{g}").unwrap();
        for c in &j.checks {
            write!(out, "check {} {}", quote(&c.name), c.status.tag()).unwrap();
            if let Some(w) = &c.witness {
                write!(out, " {}", quote(w)).unwrap();
            }
            out.push('\n');
        }
        if s.forced {
            out.push_str("forced\n");
        }
    }
    if let Some(f) = &r.abstraction {
        out.push_str("abstraction\n");
        for (v, w) in &f.vertices {
            writeln!(out, "vertex {v} {w}").unwrap();
        }
        for (e, path) in &f.edges {
            let es: String = path.iter().map(|x| format!(" {x}")).collect();
            writeln!(out, "edge {e} :{es}").unwrap();
        }
    }
    out
}

/// Reads a reduction report. Steps without `theorem`/`check` lines get an
/// empty judgment without guarantees.
pub fn read_report(text: &str) -> Result<ReductionReport> {
    let lines = lex(text)?;
    let body = header(&lines, &["report v1"])?;
    let mut r = ReductionReport::default();
    let mut in_abstraction = false;
    // Judgment fields of the step being read.
    struct Pending {
        kind: StepKind,
        theorem: Option<Theorem>,
        guarantees: BTreeSet<Guarantee>,
        checks: Vec<Check>,
        forced: bool,
        merge_line: Option<usize>,
    }
    let mut cur: Option<Pending> = None;
    let flush = |p: Pending, r: &mut ReductionReport| -> Result<()> {
        if let (StepKind::Merge(m), Some(no)) = (&p.kind, p.merge_line) {
            if m.merged == CubeId(u32::MAX) {
                return Err(Error::parse(no, 1, "merge step without `merged` record"));
            }
        }
        let applicable = !p.checks.is_empty() && p.checks.iter().all(Check::passed);
        let judgment = Judgment {
            applicable,
            theorem: p.theorem.unwrap_or_else(|| default_theorem(&p.kind)),
            checks: p.checks,
            guarantees: p.guarantees,
        };
        r.steps.push(Step {
            kind: p.kind,
            judgment,
            forced: p.forced,
        });
        Ok(())
    };
    for l in body {
        let kw = l.get(0, "a record")?;
        if in_abstraction {
            let f = r.abstraction.get_or_insert_with(Abstraction::default);
            match kw {
                "vertex" => {
                    l.arity(3)?;
                    f.vertices.insert(l.id(1)?, l.id(2)?);
                }
                "edge" => {
                    l.keyword(2, ":")?;
                    let path = (3..l.toks.len()).map(|i| l.id(i)).collect::<Result<Vec<_>>>()?;
                    f.edges.insert(l.id(1)?, path);
                }
                other => return Err(l.err(0, format!("unknown abstraction record `{other}`"))),
            }
            continue;
        }
        match kw {
            "before" | "after" => {
                let c = (1..l.toks.len())
                    .map(|i| l.num(i, "a count"))
                    .collect::<Result<Vec<usize>>>()?;
                if kw == "before" {
                    r.before = c;
                } else {
                    r.after = c;
                }
            }
            "step" => {
                if let Some(p) = cur.take() {
                    flush(p, &mut r)?;
                }
                l.arity(5)?;
                let cube = l.id(2)?;
                let kind = match l.get(1, "a step kind")? {
                    "elementary" | "manual" => {
                        let side = side_of(l, 3)?;
                        let index = l.num(4, "a face index")?;
                        if l.toks[1].text == "manual" {
                            StepKind::Manual { cube, side, index }
                        } else {
                            StepKind::Elementary { cube, side, index }
                        }
                    }
                    "vertex-star" => {
                        let ks = l.get(3, "a corner")?;
                        let corner = ks
                            .chars()
                            .map(|c| match c {
                                '0' => Ok(Side::Front),
                                '1' => Ok(Side::Back),
                                _ => Err(l.err(3, "corner must be a string of 0 and 1")),
                            })
                            .collect::<Result<Vec<_>>>()?;
                        StepKind::VertexStar { cube, corner }
                    }
                    "merge" => StepKind::Merge(MergeRecord {
                        vertex: cube,
                        incoming: cube,
                        outgoing: cube,
                        merged: CubeId(u32::MAX),
                        label: Word::empty(),
                    }),
                    other => return Err(l.err(1, format!("unknown step kind `{other}`"))),
                };
                let merge_line = matches!(kind, StepKind::Merge(_)).then_some(l.no);
                cur = Some(Pending {
                    kind,
                    theorem: None,
                    guarantees: BTreeSet::new(),
                    checks: Vec::new(),
                    forced: false,
                    merge_line,
                });
            }
            "abstraction" => {
                l.arity(1)?;
                if let Some(p) = cur.take() {
                    flush(p, &mut r)?;
                }
                r.abstraction = Some(Abstraction::default());
                in_abstraction = true;
            }
            _ => {
                let Some(p) = cur.as_mut() else {
                    return Err(l.err(0, format!("`{kw}` outside a step")));
                };
                match kw {
                    "merged" => {
                        let StepKind::Merge(m) = &mut p.kind else {
                            return Err(l.err(0, "`merged` after a non-merge step"));
                        };
                        if !(4..=5).contains(&l.toks.len()) {
                            return Err(l.err(l.toks.len().min(4), "expected `merged <new> = <e1>;<e2> [label]`"));
                        }
                        m.merged = l.id(1)?;
                        l.keyword(2, "=")?;
                        let pair = l.get(3, "<e1>;<e2>")?;
                        let (a, b) = pair
                            .split_once(';')
                            .ok_or_else(|| l.err(3, "expected <e1>;<e2>"))?;
                        let parse = |s: &str| {
                            s.parse::<u32>()
                                .map(CubeId)
                                .map_err(|_| l.err(3, format!("bad edge id `{s}`")))
                        };
                        m.incoming = parse(a)?;
                        m.outgoing = parse(b)?;
                        if let Some(t) = l.toks.get(4) {
                            m.label = Word::parse(&t.text);
                        }
                    }
                    "theorem" => {
                        l.arity(2)?;
                        let t = l.get(1, "a theorem")?;
                        p.theorem = Some(
                            Theorem::from_tag(t).ok_or_else(|| l.err(1, format!("unknown theorem `{t}`")))?,
                        );
                    }
                    "guarantees" => {
                        for i in 1..l.toks.len() {
                            let g = &l.toks[i].text;
                            p.guarantees.insert(
                                Guarantee::from_tag(g)
                                    .ok_or_else(|| l.err(i, format!("unknown guarantee `{g}`")))?,
                            );
                        }
                    }
                    "check" => {
                        if !(3..=4).contains(&l.toks.len()) {
                            return Err(l.err(l.toks.len().min(3), "expected `check <name> <status> [witness]`"));
                        }
                        let s = l.get(2, "a status")?;
                        p.checks.push(Check {
                            name: l.get(1, "a name")?.to_string(),
                            status: Status::from_tag(s)
                                .ok_or_else(|| l.err(2, format!("unknown status `{s}`")))?,
                            witness: l.toks.get(3).map(|t| t.text.clone()),
                        });
                    }
                    "forced" => {
                        l.arity(1)?;
                        p.forced = true;
                    }
                    other => return Err(l.err(0, format!("unknown record `{other}`"))),
                }
            }
        }
    }
    if let Some(p) = cur.take() {
        flush(p, &mut r)?;
    }
    Ok(r)
}

/// Reads a `prop v1` file: either `template <name> <args…>` lines (read as
/// their intersection) or an explicit automaton given by `alphabet`,
/// `state <n> [initial]`, `trans <from> <symbol> <to>`, `eps <from> <to>`
/// and `acc <n>` records.
pub fn read_property(text: &str) -> Result<PropertySpec> {
    let lines = lex(text)?;
    let body = header(&lines, &["prop v1"])?;
    let mut templates = Vec::new();
    let mut nfa: Nfa<String> = Nfa::new(BTreeSet::new());
    let mut explicit = false;
    for l in body {
        let kw = l.get(0, "a record")?;
        if kw == "template" {
            let name = l.get(1, "a template name")?.to_string();
            let args = l.toks[2..].iter().map(|t| t.text.clone()).collect();
            templates.push((name, args));
            continue;
        }
        explicit = true;
        let state = |nfa: &Nfa<String>, idx: usize| -> Result<usize> {
            let q: usize = l.num(idx, "a state number")?;
            if q >= nfa.len() {
                return Err(l.err(idx, format!("state {q} is not declared")));
            }
            Ok(q)
        };
        match kw {
            "alphabet" => {
                let extra = l.toks[1..].iter().map(|t| t.text.clone()).collect();
                nfa = nfa.with_alphabet(&extra);
            }
            "state" => {
                let q: usize = l.num(1, "a state number")?;
                if q != nfa.len() {
                    return Err(l.err(1, format!("expected state {}", nfa.len())));
                }
                nfa.add_state();
                match l.toks.len() {
                    2 => {}
                    3 => {
                        l.keyword(2, "initial")?;
                        nfa.set_initial(q);
                    }
                    _ => return Err(l.err(3, "unexpected trailing token")),
                }
            }
            "trans" => {
                l.arity(4)?;
                let (q, t) = (state(&nfa, 1)?, state(&nfa, 3)?);
                nfa.add_transition(q, l.get(2, "a symbol")?.to_string(), t);
            }
            "eps" => {
                l.arity(3)?;
                let (q, t) = (state(&nfa, 1)?, state(&nfa, 2)?);
                nfa.add_epsilon(q, t);
            }
            "acc" => {
                l.arity(2)?;
                let q = state(&nfa, 1)?;
                nfa.set_accepting(q);
            }
            other => return Err(l.err(0, format!("unknown record `{other}`"))),
        }
    }
    match (explicit, templates.is_empty()) {
        (true, false) => Err(Error::parse(1, 1, "a property file holds templates or an automaton, not both")),
        (true, true) => Ok(PropertySpec::Automaton(nfa)),
        (false, _) => Ok(PropertySpec::Templates(templates)),
    }
}

pub fn write_property(p: &PropertySpec) -> String {
    let mut out = String::from("prop v1\n");
    match p {
        PropertySpec::Templates(list) => {
            for (name, args) in list {
                let a: String = args.iter().map(|x| format!(" {}", quote(x))).collect();
                writeln!(out, "template {name}{a}").unwrap();
            }
        }
        PropertySpec::Automaton(n) => {
            let a: String = n.alphabet().iter().map(|x| format!(" {}", quote(x))).collect();
            writeln!(out, "alphabet{a}").unwrap();
            for q in 0..n.len() {
                let init = if n.initial().contains(&q) { " initial" } else { "" };
                writeln!(out, "state {q}{init}").unwrap();
            }
            for (q, a, t) in n.transitions() {
                writeln!(out, "trans {q} {} {t}", quote(a)).unwrap();
            }
            for (q, t) in n.epsilons() {
                writeln!(out, "eps {q} {t}").unwrap();
            }
            for q in n.accepting() {
                writeln!(out, "acc {q}").unwrap();
            }
        }
    }
    out
}
