use std::collections::BTreeMap;

use super::{Action, Guard, Instruction, ProgramGraph, VarDecl};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u32),
    Sym(&'static str),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

const SYMBOLS: [(&str, &str); 16] = [
    ("->", "->"),
    (":=", ":="),
    ("..", ".."),
    ("!=", "!="),
    ("≠", "!="),
    ("∨", "|"),
    ("∧", "&"),
    ("||", "|"),
    ("&&", "&"),
    ("|", "|"),
    ("&", "&"),
    ("=", "="),
    (":", ":"),
    (",", ","),
    ("(", "("),
    (")", ")"),
];

fn tokenize(line: &str, lineno: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (byte, c) = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '[' || c == ']' {
            out.push(Token {
                tok: Tok::Sym(if c == '[' { "[" } else { "]" }),
                col,
            });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            let v = s
                .parse()
                .map_err(|_| Error::parse(lineno, col, format!("integer `{s}` out of range")))?;
            out.push(Token { tok: Tok::Int(v), col });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            out.push(Token { tok: Tok::Ident(s), col });
            continue;
        }
        let rest = &line[byte..];
        match SYMBOLS.iter().find(|(s, _)| rest.starts_with(s)) {
            Some(&(s, canon)) => {
                out.push(Token { tok: Tok::Sym(canon), col });
                i += s.chars().count();
            }
            None => return Err(Error::parse(lineno, col, format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Cursor<'_> {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.col)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.col(), msg)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize)> {
        let col = self.col();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok((s, col))
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn int(&mut self) -> Result<u32> {
        match self.peek() {
            Some(&Tok::Int(v)) => {
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.err("expected an integer")),
        }
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<()> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{sym}`")))
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn finish(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }
}

struct Ctx<'a> {
    vars: &'a BTreeMap<String, u32>,
}

impl Ctx<'_> {
    fn check_value(&self, c: &Cursor, var: &str, col: usize, value: u32) -> Result<()> {
        let max = *self
            .vars
            .get(var)
            .ok_or_else(|| Error::parse(c.line, col, format!("undeclared variable `{var}`")))?;
        if value > max {
            return Err(Error::parse(
                c.line,
                col,
                format!("value {value} outside the domain 0..{max} of `{var}`"),
            ));
        }
        Ok(())
    }

    fn guard(&self, c: &mut Cursor) -> Result<Guard> {
        let mut parts = vec![self.conj(c)?];
        while c.eat("|") || c.eat_word("or") {
            parts.push(self.conj(c)?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Guard::Or(parts) })
    }

    fn conj(&self, c: &mut Cursor) -> Result<Guard> {
        let mut parts = vec![self.atom(c)?];
        while c.eat("&") || c.eat_word("and") {
            parts.push(self.atom(c)?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Guard::And(parts) })
    }

    fn atom(&self, c: &mut Cursor) -> Result<Guard> {
        if c.eat("(") {
            let g = self.guard(c)?;
            c.expect(")")?;
            return Ok(g);
        }
        if c.eat_word("true") {
            return Ok(Guard::True);
        }
        let (var, col) = c.ident("a variable, `true` or `(`")?;
        let negated = if c.eat("=") {
            false
        } else if c.eat("!=") {
            true
        } else {
            return Err(c.err("expected `=` or `!=`"));
        };
        let value = c.int()?;
        self.check_value(c, &var, col, value)?;
        Ok(Guard::Atom {
            var,
            value,
            negated,
        })
    }

    fn action(&self, c: &mut Cursor) -> Result<Action> {
        let (name, col) = c.ident("an action")?;
        if !c.eat(":=") {
            c.finish()?;
            return Ok(Action::Named(name));
        }
        let value = c.int()?;
        self.check_value(c, &name, col, value)?;
        let mut assigns = vec![(name, value)];
        while c.eat(",") {
            let (var, col) = c.ident("a variable")?;
            c.expect(":=")?;
            let value = c.int()?;
            self.check_value(c, &var, col, value)?;
            if assigns.iter().any(|(v, _)| *v == var) {
                return Err(Error::parse(c.line, col, format!("`{var}` assigned twice")));
            }
            assigns.push((var, value));
        }
        c.finish()?;
        Ok(Action::Assign(assigns))
    }
}

/// Parses the program-graph language:
///
/// ```text
/// var x : 0..1 = 0
/// loc l0 l1
/// init l0
/// final l1
/// edge l0 -> l1 [x = 0] x := 1
/// ```
///
/// Guards combine `v = n` / `v != n` atoms with `&`, `|` and parentheses.
/// An action is either an assignment list or a bare name. A variable may list
/// several initial values (`= 0, 1`), each giving its own initial state.
pub fn parse_program_graph(text: &str) -> Result<ProgramGraph> {
    let mut vars: Vec<VarDecl> = Vec::new();
    let mut domains: BTreeMap<String, u32> = BTreeMap::new();
    let mut locations: Vec<String> = Vec::new();
    let mut init: Option<usize> = None;
    let mut finals: Vec<usize> = Vec::new();
    let mut instructions = Vec::new();
    let mut name = None;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let toks = tokenize(raw, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor {
            toks: &toks,
            pos: 0,
            line: lineno,
            end_col: raw.chars().count() + 1,
        };
        let loc_index = |c: &Cursor, locations: &[String], s: &str, col: usize| {
            locations
                .iter()
                .position(|l| l == s)
                .ok_or_else(|| Error::parse(c.line, col, format!("undeclared location `{s}`")))
        };
        let (kw, kw_col) = c.ident("a keyword")?;
        match kw.as_str() {
            "process" => {
                name = Some(c.ident("a process name")?.0);
                c.finish()?;
            }
            "var" => {
                let (v, col) = c.ident("a variable name")?;
                if domains.contains_key(&v) {
                    return Err(Error::parse(lineno, col, format!("variable `{v}` declared twice")));
                }
                c.expect(":")?;
                let lo = c.int()?;
                if lo != 0 {
                    return Err(c.err("domains must start at 0"));
                }
                c.expect("..")?;
                let max = c.int()?;
                c.expect("=")?;
                let mut init_values = vec![c.int()?];
                while c.eat(",") {
                    init_values.push(c.int()?);
                }
                c.finish()?;
                if let Some(bad) = init_values.iter().find(|&&x| x > max) {
                    return Err(Error::parse(
                        lineno,
                        col,
                        format!("initial value {bad} outside 0..{max}"),
                    ));
                }
                init_values.sort_unstable();
                init_values.dedup();
                domains.insert(v.clone(), max);
                vars.push(VarDecl {
                    name: v,
                    max,
                    init: init_values,
                });
            }
            "loc" => {
                if c.at_end() {
                    return Err(c.err("expected a location name"));
                }
                while !c.at_end() {
                    let (l, col) = c.ident("a location name")?;
                    if locations.contains(&l) {
                        return Err(Error::parse(lineno, col, format!("location `{l}` declared twice")));
                    }
                    locations.push(l);
                }
            }
            "init" => {
                let (l, col) = c.ident("a location name")?;
                c.finish()?;
                if init.is_some() {
                    return Err(Error::parse(lineno, kw_col, "second `init` declaration"));
                }
                init = Some(loc_index(&c, &locations, &l, col)?);
            }
            "final" => {
                if c.at_end() {
                    return Err(c.err("expected a location name"));
                }
                while !c.at_end() {
                    let (l, col) = c.ident("a location name")?;
                    let i = loc_index(&c, &locations, &l, col)?;
                    if !finals.contains(&i) {
                        finals.push(i);
                    }
                }
            }
            "edge" => {
                let (from, fcol) = c.ident("a source location")?;
                c.expect("->")?;
                let (to, tcol) = c.ident("a target location")?;
                let from = loc_index(&c, &locations, &from, fcol)?;
                let to = loc_index(&c, &locations, &to, tcol)?;
                let ctx = Ctx { vars: &domains };
                let guard = if c.eat("[") {
                    let g = ctx.guard(&mut c)?;
                    c.expect("]")?;
                    g
                } else {
                    Guard::True
                };
                let action = ctx.action(&mut c)?;
                instructions.push(Instruction {
                    from,
                    to,
                    guard,
                    action,
                });
            }
            other => {
                return Err(Error::parse(lineno, kw_col, format!("unknown keyword `{other}`")));
            }
        }
    }
    if locations.is_empty() {
        return Err(Error::parse(last_line.max(1), 1, "no locations declared"));
    }
    let init = init.ok_or_else(|| Error::parse(last_line.max(1), 1, "missing `init` declaration"))?;
    Ok(ProgramGraph {
        name,
        vars,
        locations,
        init,
        finals,
        instructions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_in_errors() {
        let err = parse_program_graph("loc a\ninit a\nedge a -> b x := 1").unwrap_err();
        match err {
            Error::Parse { line, column, message } => {
                assert_eq!((line, column), (3, 11));
                assert!(message.contains("undeclared location"));
            }
            e => panic!("unexpected {e}"),
        }
        let err = parse_program_graph("var x : 0..1 = 0\nloc a\ninit a\nedge a -> a [x = 2] x := 0")
            .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, column: 14, .. }), "{err}");
        let err = parse_program_graph("loc a\ninit a\nedge a -> a [x = 0 crit").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_program_graph("loc a\ninit a\nedge a -> a $").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, column: 13, .. }), "{err}");
    }

    #[test]
    fn guards_and_actions() {
        let g = parse_program_graph(
            "var b : 0..1 = 0\nvar t : 0..1 = 0, 1\nloc q0 q1\ninit q0\n\
             edge q0 -> q1 [(b = 0 ∨ t = 1) & t != 0] crit\nedge q1 -> q0 b := 1, t := 0",
        )
        .unwrap();
        assert_eq!(g.vars[1].init, vec![0, 1]);
        assert_eq!(g.instructions.len(), 2);
        assert_eq!(g.instructions[0].action, Action::Named("crit".into()));
        assert!(matches!(&g.instructions[0].guard, Guard::And(parts) if parts.len() == 2));
        assert_eq!(
            g.instructions[1].action,
            Action::Assign(vec![("b".into(), 1), ("t".into(), 0)])
        );
    }
}
