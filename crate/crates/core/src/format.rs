//! Text formats for automata, ε-automata and counter machines.
//!
//! The line format starts with a header (`parikh 1`, `eps-parikh 1` or
//! `machine 1`) followed by keyword lines. Any line with a `->` token is a
//! transition. Whole-line comments start with `#` or `//`. A document
//! starting with `{` is read as JSON.
//!
//! ```text
//! parikh 1
//! alphabet a b
//! dim 2
//! states p q
//! initial p
//! accepting p q
//! p a 1 0 -> p
//! p b 0 1 -> q
//! q b 0 1 -> q
//! set constraint 2
//!   clause x0 - x1 = 0
//!   clause 2x0 - x1 = 0
//! end
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::hd::{PositionalResolver, PositionalRule};
use crate::pa::{EpsTransition, EpsilonPA, ParikhAutomaton, StateId, Transition};
use crate::rbcm::{CmTransition, CounterMachine, Guard, Symbol};
use crate::semilinear::{
    Atom, ConstraintSet, EpsilonClosureSet, ExplicitSemilinear, LinearSet, Relation, SemilinearSet,
};

pub const VERSION: u32 = 1;
const EPS: &str = "eps";

#[derive(Debug, Clone)]
pub enum Document {
    Pa {
        automaton: ParikhAutomaton,
        resolver: Option<PositionalResolver>,
    },
    Epsilon(EpsilonPA),
    Machine(CounterMachine),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Pa { .. } => "parikh",
            Document::Epsilon(_) => "eps-parikh",
            Document::Machine(_) => "machine",
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Document::Pa { automaton, resolver } => write_pa(automaton, resolver.as_ref()),
            Document::Epsilon(e) => write_epsilon(e),
            Document::Machine(m) => write_machine(m),
        }
    }

    pub fn to_json(&self) -> String {
        let doc = match self {
            Document::Pa { automaton, resolver } => json_pa(automaton, resolver.as_ref()),
            Document::Epsilon(e) => json_epsilon(e),
            Document::Machine(m) => json_machine(m),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("documents serialize");
        s.push('\n');
        s
    }
}

pub fn parse_document(text: &str) -> Result<Document> {
    if text.trim_start().starts_with('{') {
        return parse_json(text);
    }
    let mut lines = Lines::new(text);
    let (row, toks) = lines.next_line().ok_or_else(|| parse_err(1, 1, "empty document"))?;
    let header = toks.first().map(|t| t.1).unwrap_or("");
    match toks.as_slice() {
        [(_, kind), (c, v)] if *kind == "parikh" || *kind == "eps-parikh" || *kind == "machine" => {
            if *v != VERSION.to_string() {
                return Err(parse_err(row, *c, format!("unsupported version {v}")));
            }
        }
        _ => {
            return Err(parse_err(
                row,
                1,
                format!("expected a header `parikh 1`, `eps-parikh 1` or `machine 1`, found {header:?}"),
            ))
        }
    }
    match header {
        "parikh" => parse_pa_body(&mut lines, false),
        "eps-parikh" => parse_pa_body(&mut lines, true),
        _ => parse_machine_body(&mut lines).map(Document::Machine),
    }
}

/// Parses a document that must hold a PA.
pub fn parse_pa(text: &str) -> Result<(ParikhAutomaton, Option<PositionalResolver>)> {
    match parse_document(text)? {
        Document::Pa { automaton, resolver } => Ok((automaton, resolver)),
        other => Err(Error::invalid(format!(
            "expected a parikh document, found {}",
            other.kind()
        ))),
    }
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

type Tokens<'a> = Vec<(usize, &'a str)>;

/// Non-blank, non-comment lines split into tokens with 1-based columns.
struct Lines<'a> {
    rows: Vec<(usize, Tokens<'a>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let rows = text
            .lines()
            .enumerate()
            .filter_map(|(i, line)| {
                let t = line.trim_start();
                if t.is_empty() || t.starts_with('#') || t.starts_with("//") {
                    return None;
                }
                let mut toks = Vec::new();
                let mut start = None;
                for (j, ch) in line.char_indices() {
                    match (ch.is_whitespace(), start) {
                        (false, None) => start = Some(j),
                        (true, Some(s)) => {
                            toks.push((line[..s].chars().count() + 1, &line[s..j]));
                            start = None;
                        }
                        _ => {}
                    }
                }
                if let Some(s) = start {
                    toks.push((line[..s].chars().count() + 1, &line[s..]));
                }
                Some((i + 1, toks))
            })
            .collect();
        Lines { rows, pos: 0 }
    }

    fn peek(&self) -> Option<&(usize, Tokens<'a>)> {
        self.rows.get(self.pos)
    }

    fn next_line(&mut self) -> Option<(usize, Tokens<'a>)> {
        let r = self.rows.get(self.pos).cloned();
        self.pos += 1;
        r
    }

    fn last_row(&self) -> usize {
        self.rows.last().map_or(1, |r| r.0)
    }
}

fn is_edge(toks: &Tokens<'_>) -> bool {
    toks.iter().any(|t| t.1 == "->")
}

fn parse_num<T: std::str::FromStr>(row: usize, (col, tok): (usize, &str), what: &str) -> Result<T> {
    tok.trim_start_matches('+')
        .parse()
        .map_err(|_| parse_err(row, col, format!("expected {what}, found {tok:?}")))
}

/// Header fields shared by all document kinds.
#[derive(Default)]
struct Header {
    alphabet: Option<Alphabet>,
    dim: Option<usize>,
    counters: Option<usize>,
    states: Option<Vec<String>>,
    initial: Option<(usize, usize, String)>,
    accepting: Option<Vec<(usize, usize, String)>>,
    reversals: Option<usize>,
}

impl Header {
    fn state(&self, row: usize, col: usize, name: &str) -> Result<StateId> {
        let states = self
            .states
            .as_ref()
            .ok_or_else(|| parse_err(row, col, "`states` must come before use"))?;
        states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| parse_err(row, col, format!("unknown state {name:?}")))
    }

    fn alphabet(&self, row: usize, col: usize) -> Result<&Alphabet> {
        self.alphabet
            .as_ref()
            .ok_or_else(|| parse_err(row, col, "`alphabet` must come first"))
    }

    /// Consumes a header keyword line; false if the line is something else.
    fn take(&mut self, row: usize, toks: &Tokens<'_>) -> Result<bool> {
        let (col, key) = toks[0];
        let args: Vec<&str> = toks[1..].iter().map(|t| t.1).collect();
        let one = |what: &str| -> Result<(usize, &str)> {
            match toks.len() {
                2 => Ok(toks[1]),
                _ => Err(parse_err(row, col, format!("`{key}` takes one {what}"))),
            }
        };
        match key {
            "alphabet" => {
                self.alphabet = Some(Alphabet::new(args).map_err(|e| parse_err(row, col, e.to_string()))?);
            }
            "dim" => self.dim = Some(parse_num(row, one("number")?, "a dimension")?),
            "counters" => self.counters = Some(parse_num(row, one("number")?, "a counter count")?),
            "reversals" => self.reversals = Some(parse_num(row, one("number")?, "a reversal bound")?),
            "states" => {
                let mut seen = std::collections::HashSet::new();
                for (c, s) in &toks[1..] {
                    if !seen.insert(*s) {
                        return Err(parse_err(row, *c, format!("duplicate state {s:?}")));
                    }
                }
                if args.is_empty() {
                    return Err(parse_err(row, col, "no states"));
                }
                self.states = Some(args.iter().map(|s| s.to_string()).collect());
            }
            "initial" => {
                let (c, s) = one("state")?;
                self.initial = Some((row, c, s.to_string()));
            }
            "accepting" => {
                self.accepting = Some(toks[1..].iter().map(|(c, s)| (row, *c, s.to_string())).collect());
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn finish(&self) -> Result<(Alphabet, Vec<String>, StateId, Vec<StateId>)> {
        let missing = |what: &str| parse_err(1, 1, format!("missing `{what}` line"));
        let alphabet = self.alphabet.clone().ok_or_else(|| missing("alphabet"))?;
        let states = self.states.clone().ok_or_else(|| missing("states"))?;
        let (r, c, name) = self.initial.clone().ok_or_else(|| missing("initial"))?;
        let initial = self.state(r, c, &name)?;
        let accepting = self
            .accepting
            .clone()
            .unwrap_or_default()
            .iter()
            .map(|(r, c, s)| self.state(*r, *c, s))
            .collect::<Result<_>>()?;
        Ok((alphabet, states, initial, accepting))
    }
}

fn parse_pa_body(lines: &mut Lines<'_>, epsilon: bool) -> Result<Document> {
    let mut h = Header::default();
    let mut edges: Vec<(usize, usize, Option<Letter>, Vec<u64>, usize)> = Vec::new();
    let mut set = None;
    let mut rules = None;
    while let Some((row, toks)) = lines.next_line() {
        if is_edge(&toks) {
            let dim = h
                .dim
                .ok_or_else(|| parse_err(row, 1, "`dim` must come before transitions"))?;
            let alphabet = h.alphabet(row, 1)?;
            let arrow = toks.iter().position(|t| t.1 == "->").unwrap();
            if arrow < 2 || toks.len() != arrow + 2 {
                return Err(parse_err(row, 1, "expected `state letter v1 … vd -> state`"));
            }
            let source = h.state(row, toks[0].0, toks[0].1)?;
            let target = h.state(row, toks[arrow + 1].0, toks[arrow + 1].1)?;
            let (lc, lt) = toks[1];
            let letter = if epsilon && (lt == EPS || lt == "ε") {
                None
            } else {
                Some(
                    alphabet
                        .lookup(lt)
                        .ok_or_else(|| parse_err(row, lc, format!("letter {lt:?} is not in the alphabet")))?,
                )
            };
            let vector: Vec<u64> = toks[2..arrow]
                .iter()
                .map(|t| parse_num(row, *t, "a natural number"))
                .collect::<Result<_>>()?;
            if vector.len() != dim {
                return Err(parse_err(
                    row,
                    toks[0].0,
                    format!(
                        "transition {} {} -> {}: vector has {} entries, expected {dim}",
                        toks[0].1,
                        lt,
                        toks[arrow + 1].1,
                        vector.len()
                    ),
                ));
            }
            edges.push((row, source, letter, vector, target));
            continue;
        }
        match toks[0].1 {
            "set" => {
                lines.pos -= 1;
                set = Some(parse_set(lines)?);
            }
            "resolver" if !epsilon => {
                rules = Some(parse_rules(lines, &h, row)?);
            }
            _ => {
                if !h.take(row, &toks)? {
                    return Err(parse_err(row, toks[0].0, format!("unknown keyword {:?}", toks[0].1)));
                }
            }
        }
    }
    let (alphabet, states, initial, accepting) = h.finish()?;
    let dim = h.dim.ok_or_else(|| parse_err(1, 1, "missing `dim` line"))?;
    let acceptance = set.ok_or_else(|| parse_err(lines.last_row(), 1, "missing acceptance `set` block"))?;
    if acceptance.dim() != dim {
        return Err(parse_err(
            1,
            1,
            format!("acceptance set has dimension {}, expected {dim}", acceptance.dim()),
        ));
    }
    if epsilon {
        let ts = edges
            .into_iter()
            .map(|(_, source, letter, vector, target)| EpsTransition {
                source,
                letter,
                vector,
                target,
            })
            .collect();
        return Ok(Document::Epsilon(EpsilonPA::new(
            alphabet, states, initial, accepting, ts, acceptance,
        )?));
    }
    let ts = edges
        .into_iter()
        .map(|(_, source, letter, vector, target)| Transition {
            source,
            letter: letter.unwrap(),
            vector,
            target,
        })
        .collect();
    let automaton = ParikhAutomaton::new(alphabet, states, initial, accepting, ts, acceptance)?;
    if let Some(r) = &rules {
        r.check(&automaton)?;
    }
    Ok(Document::Pa {
        automaton,
        resolver: rules,
    })
}

fn parse_rules(lines: &mut Lines<'_>, h: &Header, start: usize) -> Result<PositionalResolver> {
    let dim = h
        .dim
        .ok_or_else(|| parse_err(start, 1, "`dim` must come before the resolver"))?;
    let mut rules = Vec::new();
    loop {
        let (row, toks) = lines
            .next_line()
            .ok_or_else(|| parse_err(start, 1, "resolver block is missing `end`"))?;
        match toks[0].1 {
            "end" => return Ok(PositionalResolver::new(rules)),
            "rule" => {
                if toks.len() < 4 {
                    return Err(parse_err(
                        row,
                        toks[0].0,
                        "expected `rule state letter transition [if atoms]`",
                    ));
                }
                let state = h.state(row, toks[1].0, toks[1].1)?;
                let letter = h.alphabet(row, 1)?.lookup(toks[2].1).ok_or_else(|| {
                    parse_err(row, toks[2].0, format!("letter {:?} is not in the alphabet", toks[2].1))
                })?;
                let transition = parse_num(row, toks[3], "a transition index")?;
                let guard = match toks.get(4) {
                    None => Vec::new(),
                    Some((_, "if")) => parse_clause(row, &toks[5..], dim)?,
                    Some((c, t)) => return Err(parse_err(row, *c, format!("expected `if`, found {t:?}"))),
                };
                rules.push(PositionalRule {
                    state,
                    letter,
                    guard,
                    transition,
                });
            }
            other => {
                return Err(parse_err(
                    row,
                    toks[0].0,
                    format!("expected `rule` or `end`, found {other:?}"),
                ))
            }
        }
    }
}

fn parse_symbol(alphabet: &Alphabet, row: usize, (col, tok): (usize, &str)) -> Result<Symbol> {
    match tok {
        ">" | "▷" => Ok(Symbol::Left),
        "<" | "◁" => Ok(Symbol::Right),
        _ => alphabet
            .lookup(tok)
            .map(Symbol::Letter)
            .ok_or_else(|| parse_err(row, col, format!("symbol {tok:?} is not a letter or endmarker"))),
    }
}

fn parse_machine_body(lines: &mut Lines<'_>) -> Result<CounterMachine> {
    let mut h = Header::default();
    let mut ts = Vec::new();
    let mut set = None;
    while let Some((row, toks)) = lines.next_line() {
        if is_edge(&toks) {
            let k = h
                .counters
                .ok_or_else(|| parse_err(row, 1, "`counters` must come before transitions"))?;
            let alphabet = h.alphabet(row, 1)?.clone();
            let arrow = toks.iter().position(|t| t.1 == "->").unwrap();
            if arrow != 2 + k || toks.len() != arrow + 3 + k {
                return Err(parse_err(
                    row,
                    1,
                    format!("expected `state symbol g1 … g{k} -> state move v1 … v{k}`"),
                ));
            }
            let source = h.state(row, toks[0].0, toks[0].1)?;
            let symbol = parse_symbol(&alphabet, row, toks[1])?;
            let guard = toks[2..arrow]
                .iter()
                .map(|(c, g)| match *g {
                    "0" => Ok(Guard::Zero),
                    "1" => Ok(Guard::Positive),
                    "*" => Ok(Guard::Any),
                    _ => Err(parse_err(row, *c, format!("guard must be 0, 1 or *, found {g:?}"))),
                })
                .collect::<Result<_>>()?;
            let target = h.state(row, toks[arrow + 1].0, toks[arrow + 1].1)?;
            let mv = parse_num(row, toks[arrow + 2], "a head move")?;
            let update = toks[arrow + 3..]
                .iter()
                .map(|t| parse_num(row, *t, "a counter update"))
                .collect::<Result<_>>()?;
            ts.push(CmTransition {
                source,
                symbol,
                guard,
                target,
                mv,
                update,
            });
            continue;
        }
        if toks[0].1 == "set" {
            lines.pos -= 1;
            set = Some(parse_set(lines)?);
        } else if !h.take(row, &toks)? {
            return Err(parse_err(row, toks[0].0, format!("unknown keyword {:?}", toks[0].1)));
        }
    }
    let (alphabet, states, initial, accepting) = h.finish()?;
    let k = h.counters.ok_or_else(|| parse_err(1, 1, "missing `counters` line"))?;
    let mut m = CounterMachine::new(k, alphabet, states, initial, accepting, ts)?;
    m.reversal_bound = h.reversals;
    if let Some(s) = set {
        m = m.with_end_test(s)?;
    }
    Ok(m)
}

fn parse_set(lines: &mut Lines<'_>) -> Result<SemilinearSet> {
    let (row, toks) = lines.next_line().ok_or_else(|| parse_err(1, 1, "expected a set"))?;
    if toks[0].1 != "set" || toks.len() < 2 {
        return Err(parse_err(row, toks[0].0, "expected `set <form> …`"));
    }
    let form = toks[1];
    let dim_arg = |i: usize| -> Result<usize> {
        let t = toks
            .get(i)
            .copied()
            .ok_or_else(|| parse_err(row, form.0, format!("`set {}` needs a dimension", form.1)))?;
        parse_num(row, t, "a dimension")
    };
    let located = |e: Error| match e {
        Error::Parse { .. } => e,
        other => parse_err(row, form.0, other.to_string()),
    };
    let mut body = Vec::new();
    let mut children = Vec::new();
    loop {
        let Some((r, t)) = lines.peek().cloned() else {
            return Err(parse_err(row, toks[0].0, "set block is missing `end`"));
        };
        if t[0].1 == "end" {
            lines.pos += 1;
            break;
        }
        if t[0].1 == "set" {
            children.push(parse_set(lines)?);
        } else {
            lines.pos += 1;
            body.push((r, t));
        }
    }
    let only = |allowed: bool, what: &str| -> Result<()> {
        if allowed {
            Ok(())
        } else {
            Err(parse_err(
                row,
                form.0,
                format!("`set {}` cannot contain {what}", form.1),
            ))
        }
    };
    match form.1 {
        "explicit" => {
            only(children.is_empty(), "nested sets")?;
            let dim = dim_arg(2)?;
            let mut parts = Vec::new();
            for (r, t) in body {
                if t[0].1 != "linear" {
                    return Err(parse_err(r, t[0].0, format!("expected `linear`, found {:?}", t[0].1)));
                }
                let mut groups: Vec<Vec<u64>> = vec![Vec::new()];
                for tok in &t[1..] {
                    if tok.1 == "|" {
                        groups.push(Vec::new());
                    } else {
                        groups.last_mut().unwrap().push(parse_num(r, *tok, "a natural number")?);
                    }
                }
                for g in &groups {
                    if g.len() != dim {
                        return Err(parse_err(
                            r,
                            t[0].0,
                            format!("vector has {} entries, expected {dim}", g.len()),
                        ));
                    }
                }
                let offset = groups.remove(0);
                parts.push(LinearSet::new(offset, groups).map_err(|e| parse_err(r, t[0].0, e.to_string()))?);
            }
            Ok(SemilinearSet::Explicit(
                ExplicitSemilinear::new(dim, parts).map_err(located)?,
            ))
        }
        "constraint" => {
            only(children.is_empty(), "nested sets")?;
            let dim = dim_arg(2)?;
            let mut clauses = Vec::new();
            for (r, t) in body {
                if t[0].1 != "clause" {
                    return Err(parse_err(r, t[0].0, format!("expected `clause`, found {:?}", t[0].1)));
                }
                clauses.push(parse_clause(r, &t[1..], dim)?);
            }
            Ok(SemilinearSet::Constraint(
                ConstraintSet::new(dim, clauses).map_err(located)?,
            ))
        }
        "union" => {
            only(body.is_empty(), "lines other than sets")?;
            let dim = dim_arg(2)?;
            for c in &children {
                if c.dim() != dim {
                    return Err(parse_err(
                        row,
                        form.0,
                        format!("union part has dimension {}, expected {dim}", c.dim()),
                    ));
                }
            }
            Ok(SemilinearSet::Union { dim, parts: children })
        }
        "product" => {
            only(body.is_empty(), "lines other than sets")?;
            if children.is_empty() {
                return Err(parse_err(row, form.0, "empty product"));
            }
            Ok(SemilinearSet::Product { parts: children })
        }
        "closure" => {
            if children.len() != 1 {
                return Err(parse_err(row, form.0, "`set closure` holds exactly one base set"));
            }
            let base = children.pop().unwrap();
            let mut cycles = Vec::new();
            for (r, t) in body {
                if t[0].1 != "cycle" {
                    return Err(parse_err(r, t[0].0, format!("expected `cycle`, found {:?}", t[0].1)));
                }
                cycles.push(
                    t[1..]
                        .iter()
                        .map(|tok| parse_num(r, *tok, "a natural number"))
                        .collect::<Result<Vec<u64>>>()?,
                );
            }
            Ok(SemilinearSet::Closure(Box::new(
                EpsilonClosureSet::new(base, cycles).map_err(located)?,
            )))
        }
        other => Err(parse_err(row, form.0, format!("unknown set form {other:?}"))),
    }
}

/// `atom & atom & …`, or `true`.
fn parse_clause(row: usize, toks: &[(usize, &str)], dim: usize) -> Result<Vec<Atom>> {
    if toks.len() == 1 && toks[0].1 == "true" {
        return Ok(Vec::new());
    }
    if toks.is_empty() {
        return Err(parse_err(row, 1, "empty clause; write `true`"));
    }
    toks.split(|t| t.1 == "&")
        .map(|atom| parse_atom(row, atom, dim))
        .collect()
}

/// `expr REL n` or `expr = r mod m`, where `expr` is a sum of terms like
/// `x0`, `-2x1` or `3*x2`.
fn parse_atom(row: usize, toks: &[(usize, &str)], dim: usize) -> Result<Atom> {
    let col = toks.first().map_or(1, |t| t.0);
    let rel_at = toks
        .iter()
        .position(|t| Relation::parse(t.1).is_some())
        .ok_or_else(|| parse_err(row, col, "atom has no relation (<, <=, =, >=, >, !=)"))?;
    let mut coeffs = vec![0i64; dim];
    let mut sign = 1i64;
    for &(c, tok) in &toks[..rel_at] {
        match tok {
            "+" => sign = 1,
            "-" => sign = -1,
            "0" => {}
            _ => {
                let (neg, body) = match tok.strip_prefix('-') {
                    Some(b) => (-1, b),
                    None => (1, tok),
                };
                let (coef, var) = body
                    .split_once('x')
                    .ok_or_else(|| parse_err(row, c, format!("expected a term like `2x0`, found {tok:?}")))?;
                let coef = coef.trim_end_matches('*');
                let coef: i64 = if coef.is_empty() {
                    1
                } else {
                    coef.parse()
                        .map_err(|_| parse_err(row, c, format!("bad coefficient in {tok:?}")))?
                };
                let var: usize = var
                    .parse()
                    .map_err(|_| parse_err(row, c, format!("bad variable in {tok:?}")))?;
                if var >= dim {
                    return Err(parse_err(
                        row,
                        c,
                        format!("variable x{var} out of range for dimension {dim}"),
                    ));
                }
                coeffs[var] += sign * neg * coef;
                sign = 1;
            }
        }
    }
    let (rc, rel_tok) = toks[rel_at];
    let rel = Relation::parse(rel_tok).unwrap();
    let rhs_tok = toks
        .get(rel_at + 1)
        .copied()
        .ok_or_else(|| parse_err(row, rc, "missing right-hand side"))?;
    match &toks[rel_at + 2..] {
        [] => Ok(Atom::linear(coeffs, rel, parse_num(row, rhs_tok, "an integer")?)),
        [(mc, "mod"), m] => {
            if rel != Relation::Eq {
                return Err(parse_err(row, *mc, "congruences use `=`"));
            }
            let residue: u64 = parse_num(row, rhs_tok, "a residue")?;
            let modulus: u64 = parse_num(row, *m, "a modulus")?;
            Atom::congruence(coeffs, modulus, residue).map_err(|e| parse_err(row, *mc, e.to_string()))
        }
        [(c, t), ..] => Err(parse_err(row, *c, format!("unexpected {t:?} after the atom"))),
    }
}

fn write_expr(coeffs: &[i64]) -> String {
    let mut out = String::new();
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mag = c.unsigned_abs();
        let term = if mag == 1 {
            format!("x{i}")
        } else {
            format!("{mag}x{i}")
        };
        if out.is_empty() {
            out = if c < 0 { format!("-{term}") } else { term };
        } else {
            let _ = write!(out, " {} {term}", if c < 0 { '-' } else { '+' });
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn write_atom(a: &Atom) -> String {
    match a {
        Atom::Linear(l) => format!("{} {} {}", write_expr(&l.coeffs), l.rel, l.rhs),
        Atom::Congruence(c) => format!("{} = {} mod {}", write_expr(&c.coeffs), c.residue, c.modulus),
    }
}

fn write_clause(atoms: &[Atom]) -> String {
    if atoms.is_empty() {
        return "true".into();
    }
    atoms.iter().map(write_atom).collect::<Vec<_>>().join(" & ")
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

pub fn write_set(s: &SemilinearSet) -> String {
    let mut out = String::new();
    write_set_into(s, 0, &mut out);
    out
}

fn write_set_into(s: &SemilinearSet, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let inner = "  ".repeat(depth + 1);
    match s {
        SemilinearSet::Explicit(e) => {
            let _ = writeln!(out, "{pad}set explicit {}", e.dim());
            for p in e.parts() {
                let mut line = join(p.offset());
                for q in p.periods() {
                    let _ = write!(line, " | {}", join(q));
                }
                let _ = writeln!(out, "{inner}linear {line}");
            }
        }
        SemilinearSet::Constraint(c) => {
            let _ = writeln!(out, "{pad}set constraint {}", c.dim());
            for clause in c.clauses() {
                let _ = writeln!(out, "{inner}clause {}", write_clause(clause));
            }
        }
        SemilinearSet::Union { dim, parts } => {
            let _ = writeln!(out, "{pad}set union {dim}");
            for p in parts {
                write_set_into(p, depth + 1, out);
            }
        }
        SemilinearSet::Product { parts } => {
            let _ = writeln!(out, "{pad}set product");
            for p in parts {
                write_set_into(p, depth + 1, out);
            }
        }
        SemilinearSet::Closure(c) => {
            let _ = writeln!(out, "{pad}set closure");
            for cyc in &c.cycles {
                let _ = writeln!(out, "{inner}cycle {}", join(cyc));
            }
            write_set_into(&c.base, depth + 1, out);
        }
    }
    let _ = writeln!(out, "{pad}end");
}

fn write_header(
    out: &mut String,
    kind: &str,
    alphabet: &Alphabet,
    size: (&str, usize),
    states: &[String],
    initial: StateId,
    accepting: &[StateId],
) {
    let _ = writeln!(out, "{kind} {VERSION}");
    let _ = writeln!(out, "alphabet {}", alphabet.tokens().join(" "));
    let _ = writeln!(out, "{} {}", size.0, size.1);
    let _ = writeln!(out, "states {}", states.join(" "));
    let _ = writeln!(out, "initial {}", states[initial]);
    let acc: Vec<&str> = accepting.iter().map(|q| states[*q].as_str()).collect();
    if acc.is_empty() {
        let _ = writeln!(out, "accepting");
    } else {
        let _ = writeln!(out, "accepting {}", acc.join(" "));
    }
}

fn edge_line(from: &str, letter: &str, v: &[u64], to: &str) -> String {
    if v.is_empty() {
        format!("{from} {letter} -> {to}")
    } else {
        format!("{from} {letter} {} -> {to}", join(v))
    }
}

pub fn write_pa(a: &ParikhAutomaton, resolver: Option<&PositionalResolver>) -> String {
    let mut out = String::new();
    let names = a.state_names();
    write_header(
        &mut out,
        "parikh",
        a.alphabet(),
        ("dim", a.dim()),
        names,
        a.initial(),
        &a.accepting_states(),
    );
    for t in a.transitions() {
        let line = edge_line(
            &names[t.source],
            a.alphabet().token(t.letter),
            &t.vector,
            &names[t.target],
        );
        let _ = writeln!(out, "{line}");
    }
    out.push_str(&write_set(a.acceptance()));
    if let Some(r) = resolver {
        out.push_str("resolver\n");
        for rule in &r.rules {
            let _ = write!(
                out,
                "  rule {} {} {}",
                names[rule.state],
                a.alphabet().token(rule.letter),
                rule.transition
            );
            if !rule.guard.is_empty() {
                let _ = write!(out, " if {}", write_clause(&rule.guard));
            }
            out.push('\n');
        }
        out.push_str("end\n");
    }
    out
}

pub fn write_epsilon(e: &EpsilonPA) -> String {
    let mut out = String::new();
    let names = e.state_names();
    write_header(
        &mut out,
        "eps-parikh",
        e.alphabet(),
        ("dim", e.dim()),
        names,
        e.initial(),
        &e.accepting_states(),
    );
    for t in e.transitions() {
        let letter = t.letter.map_or(EPS, |l| e.alphabet().token(l));
        let _ = writeln!(
            out,
            "{}",
            edge_line(&names[t.source], letter, &t.vector, &names[t.target])
        );
    }
    out.push_str(&write_set(e.acceptance()));
    out
}

pub fn write_machine(m: &CounterMachine) -> String {
    let mut out = String::new();
    let names = m.state_names();
    write_header(
        &mut out,
        "machine",
        m.alphabet(),
        ("counters", m.counters()),
        names,
        m.initial(),
        &m.accepting_states(),
    );
    if let Some(b) = m.reversal_bound {
        let _ = writeln!(out, "reversals {b}");
    }
    for t in m.transitions() {
        let mut line = format!("{} {}", names[t.source], m.symbol_token(t.symbol));
        for g in &t.guard {
            let _ = write!(line, " {}", g.token());
        }
        let _ = write!(line, " -> {} {}", names[t.target], t.mv);
        for u in &t.update {
            let _ = write!(line, " {u}");
        }
        let _ = writeln!(out, "{line}");
    }
    if let Some(s) = m.end_test() {
        out.push_str(&write_set(s));
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonEdge {
    from: String,
    letter: Option<String>,
    vector: Vec<u64>,
    to: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonRule {
    state: String,
    letter: String,
    transition: usize,
    #[serde(default)]
    guard: Vec<Atom>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonCmEdge {
    from: String,
    symbol: String,
    guard: String,
    to: String,
    #[serde(rename = "move")]
    mv: i8,
    update: Vec<i8>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "format", rename_all = "kebab-case")]
enum JsonDoc {
    Parikh {
        version: u32,
        alphabet: Vec<String>,
        states: Vec<String>,
        initial: String,
        accepting: Vec<String>,
        transitions: Vec<JsonEdge>,
        acceptance: SemilinearSet,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolver: Option<Vec<JsonRule>>,
    },
    EpsParikh {
        version: u32,
        alphabet: Vec<String>,
        states: Vec<String>,
        initial: String,
        accepting: Vec<String>,
        transitions: Vec<JsonEdge>,
        acceptance: SemilinearSet,
    },
    Machine {
        version: u32,
        alphabet: Vec<String>,
        counters: usize,
        states: Vec<String>,
        initial: String,
        accepting: Vec<String>,
        transitions: Vec<JsonCmEdge>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reversals: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        end_test: Option<SemilinearSet>,
    },
}

fn names_of(states: &[String], ids: &[StateId]) -> Vec<String> {
    ids.iter().map(|q| states[*q].clone()).collect()
}

fn json_pa(a: &ParikhAutomaton, r: Option<&PositionalResolver>) -> JsonDoc {
    let s = a.state_names();
    JsonDoc::Parikh {
        version: VERSION,
        alphabet: a.alphabet().tokens().to_vec(),
        states: s.to_vec(),
        initial: s[a.initial()].clone(),
        accepting: names_of(s, &a.accepting_states()),
        transitions: a
            .transitions()
            .iter()
            .map(|t| JsonEdge {
                from: s[t.source].clone(),
                letter: Some(a.alphabet().token(t.letter).to_string()),
                vector: t.vector.clone(),
                to: s[t.target].clone(),
            })
            .collect(),
        acceptance: a.acceptance().clone(),
        resolver: r.map(|r| {
            r.rules
                .iter()
                .map(|rule| JsonRule {
                    state: s[rule.state].clone(),
                    letter: a.alphabet().token(rule.letter).to_string(),
                    transition: rule.transition,
                    guard: rule.guard.clone(),
                })
                .collect()
        }),
    }
}

fn json_epsilon(e: &EpsilonPA) -> JsonDoc {
    let s = e.state_names();
    JsonDoc::EpsParikh {
        version: VERSION,
        alphabet: e.alphabet().tokens().to_vec(),
        states: s.to_vec(),
        initial: s[e.initial()].clone(),
        accepting: names_of(s, &e.accepting_states()),
        transitions: e
            .transitions()
            .iter()
            .map(|t| JsonEdge {
                from: s[t.source].clone(),
                letter: t.letter.map(|l| e.alphabet().token(l).to_string()),
                vector: t.vector.clone(),
                to: s[t.target].clone(),
            })
            .collect(),
        acceptance: e.acceptance().clone(),
    }
}

fn json_machine(m: &CounterMachine) -> JsonDoc {
    let s = m.state_names();
    JsonDoc::Machine {
        version: VERSION,
        alphabet: m.alphabet().tokens().to_vec(),
        counters: m.counters(),
        states: s.to_vec(),
        initial: s[m.initial()].clone(),
        accepting: names_of(s, &m.accepting_states()),
        transitions: m
            .transitions()
            .iter()
            .map(|t| JsonCmEdge {
                from: s[t.source].clone(),
                symbol: m.symbol_token(t.symbol),
                guard: t.guard.iter().map(|g| g.token()).collect(),
                to: s[t.target].clone(),
                mv: t.mv,
                update: t.update.clone(),
            })
            .collect(),
        reversals: m.reversal_bound,
        end_test: m.end_test().cloned(),
    }
}

fn lookup_state(states: &[String], name: &str) -> Result<StateId> {
    states
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| Error::invalid(format!("unknown state {name:?}")))
}

fn lookup_letter(alphabet: &Alphabet, token: &str) -> Result<Letter> {
    alphabet
        .lookup(token)
        .ok_or_else(|| Error::invalid(format!("letter {token:?} is not in the alphabet")))
}

fn parse_json(text: &str) -> Result<Document> {
    let doc: JsonDoc = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.column(), e.to_string()))?;
    let check_version = |v: u32| {
        if v == VERSION {
            Ok(())
        } else {
            Err(Error::invalid(format!("unsupported version {v}")))
        }
    };
    match doc {
        JsonDoc::Parikh {
            version,
            alphabet,
            states,
            initial,
            accepting,
            transitions,
            acceptance,
            resolver,
        } => {
            check_version(version)?;
            let alphabet = Alphabet::new(alphabet)?;
            let ts = transitions
                .iter()
                .map(|t| {
                    let letter = t
                        .letter
                        .as_deref()
                        .ok_or_else(|| Error::invalid("ε-transition in a parikh document"))?;
                    Ok(Transition {
                        source: lookup_state(&states, &t.from)?,
                        letter: lookup_letter(&alphabet, letter)?,
                        vector: t.vector.clone(),
                        target: lookup_state(&states, &t.to)?,
                    })
                })
                .collect::<Result<_>>()?;
            let initial = lookup_state(&states, &initial)?;
            let accepting = accepting
                .iter()
                .map(|q| lookup_state(&states, q))
                .collect::<Result<_>>()?;
            let rules = resolver
                .map(|rules| {
                    rules
                        .into_iter()
                        .map(|r| {
                            Ok(PositionalRule {
                                state: lookup_state(&states, &r.state)?,
                                letter: lookup_letter(&alphabet, &r.letter)?,
                                guard: r.guard,
                                transition: r.transition,
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                        .map(PositionalResolver::new)
                })
                .transpose()?;
            let automaton = ParikhAutomaton::new(alphabet, states, initial, accepting, ts, acceptance)?;
            if let Some(r) = &rules {
                r.check(&automaton)?;
            }
            Ok(Document::Pa {
                automaton,
                resolver: rules,
            })
        }
        JsonDoc::EpsParikh {
            version,
            alphabet,
            states,
            initial,
            accepting,
            transitions,
            acceptance,
        } => {
            check_version(version)?;
            let alphabet = Alphabet::new(alphabet)?;
            let ts = transitions
                .iter()
                .map(|t| {
                    Ok(EpsTransition {
                        source: lookup_state(&states, &t.from)?,
                        letter: t.letter.as_deref().map(|l| lookup_letter(&alphabet, l)).transpose()?,
                        vector: t.vector.clone(),
                        target: lookup_state(&states, &t.to)?,
                    })
                })
                .collect::<Result<_>>()?;
            let initial = lookup_state(&states, &initial)?;
            let accepting = accepting
                .iter()
                .map(|q| lookup_state(&states, q))
                .collect::<Result<_>>()?;
            Ok(Document::Epsilon(EpsilonPA::new(
                alphabet, states, initial, accepting, ts, acceptance,
            )?))
        }
        JsonDoc::Machine {
            version,
            alphabet,
            counters,
            states,
            initial,
            accepting,
            transitions,
            reversals,
            end_test,
        } => {
            check_version(version)?;
            let alphabet = Alphabet::new(alphabet)?;
            let ts = transitions
                .iter()
                .map(|t| {
                    let guard = t
                        .guard
                        .chars()
                        .map(|c| match c {
                            '0' => Ok(Guard::Zero),
                            '1' => Ok(Guard::Positive),
                            '*' => Ok(Guard::Any),
                            _ => Err(Error::invalid(format!("bad guard {:?}", t.guard))),
                        })
                        .collect::<Result<_>>()?;
                    Ok(CmTransition {
                        source: lookup_state(&states, &t.from)?,
                        symbol: parse_symbol(&alphabet, 0, (0, &t.symbol))?,
                        guard,
                        target: lookup_state(&states, &t.to)?,
                        mv: t.mv,
                        update: t.update.clone(),
                    })
                })
                .collect::<Result<_>>()?;
            let initial = lookup_state(&states, &initial)?;
            let accepting = accepting
                .iter()
                .map(|q| lookup_state(&states, q))
                .collect::<Result<_>>()?;
            let mut m = CounterMachine::new(counters, alphabet, states, initial, accepting, ts)?;
            m.reversal_bound = reversals;
            if let Some(s) = end_test {
                m = m.with_end_test(s)?;
            }
            Ok(Document::Machine(m))
        }
    }
}
