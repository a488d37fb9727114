//! Two-counter machines and the automata built from them: the error
//! predicate on line-number words, the safety DPA, the universality and
//! regularity HDPAs, and the constructions behind the undecidability of
//! history-determinism.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Letter, Word};
use crate::closures::union_pa;
use crate::corpus::corpus_get;
use crate::error::{Error, Result};
use crate::hd::{PositionalResolver, Resolver, ResolverSession, RunView, ScriptedResolver};
use crate::pa::{ParikhAutomaton, StateId, Transition};
use crate::semilinear::{Atom, ConstraintSet, Relation, SemilinearSet};
use crate::vector::{self, VectorN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Instr {
    Inc(usize),
    Dec(usize),
    /// `IF i ZERO then ELSE otherwise`
    Ite(usize, usize, usize),
    Stop,
}

/// A program `(0: I_0) ⋯ (k−1: STOP)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinskyMachine {
    lines: Vec<Instr>,
}

impl MinskyMachine {
    /// Checks the syntax: counters in {0,1}, targets in range, and a single
    /// STOP on the last line.
    pub fn new(lines: Vec<Instr>) -> Result<Self> {
        let k = lines.len();
        if k == 0 || lines[k - 1] != Instr::Stop {
            return Err(Error::invalid("the last line must be STOP"));
        }
        for (l, ins) in lines.iter().enumerate() {
            match *ins {
                Instr::Stop if l + 1 != k => {
                    return Err(Error::invalid(format!("line {l}: STOP before the last line")))
                }
                Instr::Inc(i) | Instr::Dec(i) | Instr::Ite(i, _, _) if i > 1 => {
                    return Err(Error::invalid(format!("line {l}: counter {i} is not 0 or 1")))
                }
                Instr::Ite(_, a, b) if a >= k || b >= k => {
                    return Err(Error::invalid(format!("line {l}: jump target out of range")))
                }
                _ => {}
            }
        }
        Ok(MinskyMachine { lines })
    }

    pub fn lines(&self) -> &[Instr] {
        &self.lines
    }

    /// Number of lines `k`; the STOP line is `k − 1`.
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn stop_line(&self) -> usize {
        self.lines.len() - 1
    }

    /// Every `DEC i` at line ℓ follows `IF i ZERO ℓ+1 ELSE ℓ`, and no other
    /// jump targets a decrement.
    pub fn is_guarded(&self) -> bool {
        let is_dec = |l: usize| matches!(self.lines[l], Instr::Dec(_));
        self.lines.iter().enumerate().all(|(l, ins)| match *ins {
            Instr::Dec(i) => l > 0 && self.lines[l - 1] == Instr::Ite(i, l + 1, l),
            Instr::Ite(_, a, b) => !is_dec(a) && (!is_dec(b) || b == l + 1),
            _ => true,
        })
    }

    fn require_guarded(&self) -> Result<()> {
        if self.is_guarded() {
            Ok(())
        } else {
            Err(Error::Precondition(
                "machine lacks the guarded-decrement property".into(),
            ))
        }
    }

    /// Line numbers as letters `0`, …, `k−1`.
    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new((0..self.len()).map(|l| l.to_string())).expect("distinct tokens")
    }

    /// Increments and decrements of each counter among the lines of `w`.
    fn counts(&self, w: &[Letter]) -> [[u64; 2]; 2] {
        let mut c = [[0u64; 2]; 2];
        for l in w {
            match self.lines[l.0] {
                Instr::Inc(i) => c[i][0] += 1,
                Instr::Dec(i) => c[i][1] += 1,
                _ => {}
            }
        }
        c
    }
}

impl fmt::Display for MinskyMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (l, ins) in self.lines.iter().enumerate() {
            match ins {
                Instr::Inc(i) => writeln!(f, "{l}: INC {i}")?,
                Instr::Dec(i) => writeln!(f, "{l}: DEC {i}")?,
                Instr::Ite(i, a, b) => writeln!(f, "{l}: IF {i} ZERO {a} ELSE {b}")?,
                Instr::Stop => writeln!(f, "{l}: STOP")?,
            }
        }
        Ok(())
    }
}

impl FromStr for MinskyMachine {
    type Err = Error;

    /// One `ℓ: INSTR` per line; blank lines and `#` comments are skipped.
    fn from_str(text: &str) -> Result<Self> {
        let mut lines = Vec::new();
        for (row, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let err = |column: usize, message: String| Error::Parse {
                line: row + 1,
                column: column + 1,
                message,
            };
            let indent = content.len() - content.trim_start().len();
            let (label, rest) = content
                .split_once(':')
                .ok_or_else(|| err(indent, "expected `ℓ: INSTRUCTION`".into()))?;
            let number: usize = label
                .trim()
                .parse()
                .map_err(|_| err(indent, format!("bad line number {:?}", label.trim())))?;
            if number != lines.len() {
                return Err(err(indent, format!("expected line {}, found {number}", lines.len())));
            }
            let col = label.len() + 1;
            let words: Vec<&str> = rest.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| err(col, format!("expected a number, found {s:?}")))
            };
            let ins = match words.as_slice() {
                ["INC", i] => Instr::Inc(num(i)?),
                ["DEC", i] => Instr::Dec(num(i)?),
                ["IF", i, "ZERO", a, "ELSE", b] => Instr::Ite(num(i)?, num(a)?, num(b)?),
                ["STOP"] => Instr::Stop,
                _ => return Err(err(col, format!("unknown instruction {:?}", rest.trim()))),
            };
            lines.push(ins);
        }
        MinskyMachine::new(lines)
    }
}

/// Inserts `IF i ZERO ℓ+1 ELSE ℓ` before every unguarded `DEC i` at ℓ and
/// sends jumps that targeted a decrement to its guard.
pub fn guard_decrements(m: &MinskyMachine) -> MinskyMachine {
    let k = m.len();
    let lines = &m.lines;
    let guarded = |l: usize| matches!(lines[l], Instr::Dec(i) if l > 0 && lines[l - 1] == Instr::Ite(i, l + 1, l));
    // New position of each old line, and of the guard in front of each decrement.
    let mut at = vec![0; k];
    let mut guard = vec![None; k];
    let mut next = 0;
    for l in 0..k {
        if let Instr::Dec(_) = lines[l] {
            if guarded(l) {
                guard[l] = Some(at[l - 1]);
            } else {
                guard[l] = Some(next);
                next += 1;
            }
        }
        at[l] = next;
        next += 1;
    }
    let jump = |t: usize| guard[t].unwrap_or(at[t]);
    let mut out = Vec::with_capacity(next);
    for l in 0..k {
        match lines[l] {
            Instr::Dec(i) if !guarded(l) => out.push(Instr::Ite(i, at[l] + 1, at[l])),
            _ => {}
        }
        out.push(match lines[l] {
            // An existing guard keeps pointing at its own decrement.
            Instr::Ite(i, a, b) if l + 1 < k && b == l + 1 && a == l + 2 && guarded(l + 1) => {
                Instr::Ite(i, jump(a), at[b])
            }
            Instr::Ite(i, a, b) => Instr::Ite(i, jump(a), jump(b)),
            ins => ins,
        });
    }
    MinskyMachine { lines: out }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MinskyConfig {
    pub line: usize,
    pub counters: [u64; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinskyRun {
    /// The full run, ending on the STOP line.
    Terminated(Vec<MinskyConfig>),
    /// The first configurations of a run still going after the step limit.
    Running(Vec<MinskyConfig>),
}

impl MinskyRun {
    pub fn trace(&self) -> &[MinskyConfig] {
        match self {
            MinskyRun::Terminated(t) | MinskyRun::Running(t) => t,
        }
    }

    pub fn terminated(&self) -> bool {
        matches!(self, MinskyRun::Terminated(_))
    }

    /// The run projected to its line numbers.
    pub fn projection(&self) -> Word {
        self.trace().iter().map(|c| Letter(c.line)).collect()
    }
}

pub fn minsky_step(m: &MinskyMachine, c: &MinskyConfig) -> Option<MinskyConfig> {
    let mut n = *c;
    match m.lines[c.line] {
        Instr::Inc(i) => {
            n.counters[i] += 1;
            n.line += 1;
        }
        Instr::Dec(i) => {
            n.counters[i] = n.counters[i].saturating_sub(1);
            n.line += 1;
        }
        Instr::Ite(i, a, b) => n.line = if c.counters[i] == 0 { a } else { b },
        Instr::Stop => return None,
    }
    Some(n)
}

/// Runs from `(0,0,0)` for at most `max_steps` steps.
pub fn minsky_run(m: &MinskyMachine, max_steps: usize) -> MinskyRun {
    let mut c = MinskyConfig {
        line: 0,
        counters: [0, 0],
    };
    let mut trace = vec![c];
    for _ in 0..max_steps {
        match minsky_step(m, &c) {
            Some(n) => {
                c = n;
                trace.push(c);
            }
            None => return MinskyRun::Terminated(trace),
        }
    }
    if m.lines[c.line] == Instr::Stop {
        MinskyRun::Terminated(trace)
    } else {
        MinskyRun::Running(trace)
    }
}

/// Whether the line-number word `w` has an error at position `n`.
pub fn has_error_at(m: &MinskyMachine, w: &[Letter], n: usize) -> Result<bool> {
    if n + 1 >= w.len() {
        return Err(Error::invalid(format!(
            "position {n} needs a successor in a word of length {}",
            w.len()
        )));
    }
    if w.iter().any(|l| l.0 >= m.len()) {
        return Err(Error::invalid("letter is not a line number"));
    }
    let (cur, next) = (w[n].0, w[n + 1].0);
    Ok(match m.lines[cur] {
        Instr::Stop => true,
        Instr::Inc(_) | Instr::Dec(_) => next != cur + 1,
        Instr::Ite(i, a, b) => {
            let c = m.counts(&w[..=n]);
            if c[i][0] == c[i][1] {
                next != a
            } else {
                next != b
            }
        }
    })
}

/// Lowest position with an error, if any.
pub fn first_error(m: &MinskyMachine, w: &[Letter]) -> Result<Option<usize>> {
    for n in 0..w.len().saturating_sub(1) {
        if has_error_at(m, w, n)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// An automaton together with a resolver for it.
#[derive(Clone)]
pub struct HdArtifact {
    pub automaton: ParikhAutomaton,
    pub resolver: Arc<dyn Resolver>,
}

impl fmt::Debug for HdArtifact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HdArtifact")
            .field("automaton", &self.automaton)
            .finish_non_exhaustive()
    }
}

fn unit(dim: usize, i: usize, by: u64) -> VectorN {
    let mut v = vector::zeros(dim);
    v[i] = by;
    v
}

fn coeffs(dim: usize, terms: &[(usize, i64)]) -> Vec<i64> {
    let mut c = vec![0; dim];
    for (i, x) in terms {
        c[*i] = *x;
    }
    c
}

/// Builds an automaton by exploring keyed states from `start`.
struct Explorer<K> {
    ids: HashMap<K, StateId>,
    keys: Vec<K>,
    queue: VecDeque<StateId>,
}

impl<K: Clone + Eq + std::hash::Hash> Explorer<K> {
    fn new(start: K) -> Self {
        Explorer {
            ids: HashMap::from([(start.clone(), 0)]),
            keys: vec![start],
            queue: VecDeque::from([0]),
        }
    }

    fn id(&mut self, key: K) -> StateId {
        if let Some(&q) = self.ids.get(&key) {
            return q;
        }
        self.keys.push(key.clone());
        self.ids.insert(key, self.keys.len() - 1);
        self.queue.push_back(self.keys.len() - 1);
        self.keys.len() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum SafetyKey {
    Init,
    First(usize),
    Later { last: usize, goto: [u64; 2], ok: bool },
}

/// Goto residues for the pair (previous line, current line).
fn goto_residues(m: &MinskyMachine, prev: usize, cur: usize) -> [u64; 2] {
    let mut r = [0, 0];
    if let Instr::Ite(i, a, b) = m.lines[prev] {
        r[i] = match (cur == a, cur == b) {
            // Both branches agree: no error either way.
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
    }
    r
}

/// Deterministic PA over line numbers accepting `ε`, `0`, and the words of
/// length at least 2 without an error at their second-to-last position.
///
/// Coordinates are `(inc0, dec0, goto0, inc1, dec1, goto1)`; counts lag one
/// letter behind, and `goto_i mod 4` encodes which branch the last letter
/// took after a test of counter `i`.
pub fn build_safety_dpa(m: &MinskyMachine) -> Result<ParikhAutomaton> {
    m.require_guarded()?;
    const DIM: usize = 6;
    let slot = |i: usize, kind: usize| 3 * i + kind;
    let stop = m.stop_line();
    let mut ex = Explorer::new(SafetyKey::Init);
    let mut ts = Vec::new();
    while let Some(s) = ex.queue.pop_front() {
        for cur in 0..m.len() {
            let (key, v) = match ex.keys[s] {
                SafetyKey::Init => (SafetyKey::First(cur), vector::zeros(DIM)),
                SafetyKey::First(prev) | SafetyKey::Later { last: prev, .. } => {
                    let before = match ex.keys[s] {
                        SafetyKey::Later { goto, .. } => goto,
                        _ => [0, 0],
                    };
                    let goto = goto_residues(m, prev, cur);
                    let mut v = vector::zeros(DIM);
                    match m.lines[prev] {
                        Instr::Inc(i) => v[slot(i, 0)] = 1,
                        Instr::Dec(i) => v[slot(i, 1)] = 1,
                        _ => {}
                    }
                    for i in 0..2 {
                        v[slot(i, 2)] = (goto[i] + 4 - before[i]) % 4;
                    }
                    let ok = match m.lines[prev] {
                        Instr::Stop => false,
                        Instr::Inc(_) | Instr::Dec(_) => cur == prev + 1,
                        Instr::Ite(..) => true,
                    };
                    debug_assert!(prev != stop || !ok);
                    (SafetyKey::Later { last: cur, goto, ok }, v)
                }
            };
            let target = ex.id(key);
            ts.push(Transition {
                source: s,
                letter: Letter(cur),
                vector: v,
                target,
            });
        }
    }
    let names = ex
        .keys
        .iter()
        .map(|k| match k {
            SafetyKey::Init => "init".to_string(),
            SafetyKey::First(l) => format!("first{l}"),
            SafetyKey::Later { last, goto, ok } => {
                format!("{last}/{}{}/{}", goto[0], goto[1], if *ok { "ok" } else { "bad" })
            }
        })
        .collect();
    let accepting = ex
        .keys
        .iter()
        .enumerate()
        .filter(|(_, k)| {
            matches!(
                k,
                SafetyKey::Init | SafetyKey::First(0) | SafetyKey::Later { ok: true, .. }
            )
        })
        .map(|(q, _)| q)
        .collect();
    let residue = |i: usize, r: u64| Atom::congruence(coeffs(DIM, &[(slot(i, 2), 1)]), 4, r);
    let balance = |i: usize, rel: Relation| Atom::linear(coeffs(DIM, &[(slot(i, 0), 1), (slot(i, 1), -1)]), rel, 0);
    let mut clauses = vec![vec![residue(0, 0)?, residue(1, 0)?]];
    for i in 0..2 {
        clauses.push(vec![residue(i, 1)?, balance(i, Relation::Eq)]);
        clauses.push(vec![residue(i, 2)?, balance(i, Relation::Ne)]);
    }
    let acceptance = SemilinearSet::Constraint(ConstraintSet::new(DIM, clauses)?);
    ParikhAutomaton::new(m.alphabet(), names, 0, accepting, ts, acceptance)
}

fn full(dim: usize) -> Result<SemilinearSet> {
    Ok(SemilinearSet::Constraint(ConstraintSet::total(dim)?))
}

/// Words not starting with 0, or without the STOP line.
fn no_run_prefix(m: &MinskyMachine) -> Result<ParikhAutomaton> {
    let stop = m.stop_line();
    let names = ["start", "other", "open", "stopped"].map(String::from).to_vec();
    let mut ts = Vec::new();
    let edge = |s, l: usize, t| Transition {
        source: s,
        letter: Letter(l),
        vector: vec![0],
        target: t,
    };
    for l in 0..m.len() {
        ts.push(edge(
            0,
            l,
            if l != 0 {
                1
            } else if l == stop {
                3
            } else {
                2
            },
        ));
        ts.push(edge(1, l, 1));
        ts.push(edge(2, l, if l == stop { 3 } else { 2 }));
        ts.push(edge(3, l, 3));
    }
    ParikhAutomaton::new(m.alphabet(), names, 0, vec![0, 1, 2], ts, full(1)?)
}

/// Flag values on the commit transition of the error-guessing automaton.
fn commit_flag(m: &MinskyMachine, prev: usize, cur: usize) -> Option<u64> {
    match m.lines[prev] {
        Instr::Stop => Some(1),
        Instr::Inc(_) | Instr::Dec(_) => (cur != prev + 1).then_some(1),
        Instr::Ite(i, a, b) => match (cur == a, cur == b) {
            (true, true) => None,
            // Took the zero branch: an error iff the counter is nonzero.
            (true, false) => Some(2 + 2 * i as u64),
            (false, true) => Some(3 + 2 * i as u64),
            (false, false) => Some(1),
        },
    }
}

/// Words starting with 0 that contain the STOP line and have an error
/// strictly before its first occurrence. The automaton counts increments
/// and decrements `(inc0, dec0, inc1, dec1)` until it guesses the error,
/// records the kind of error in a flag coordinate, and then freezes.
fn error_guess(m: &MinskyMachine) -> Result<HdArtifact> {
    const DIM: usize = 5;
    const FLAG: usize = 4;
    let k = m.len();
    let stop = m.stop_line();
    // 0: start, 1 + p: running with last line p, k + 1: wait, k + 2: done
    let run = |p: usize| 1 + p;
    let (wait, done) = (k + 1, k + 2);
    let mut names = vec!["start".to_string()];
    names.extend((0..k).map(|p| format!("run{p}")));
    names.push("wait".into());
    names.push("done".into());
    let count = |l: usize| {
        let mut v = vector::zeros(DIM);
        match m.lines[l] {
            Instr::Inc(i) => v[2 * i] = 1,
            Instr::Dec(i) => v[2 * i + 1] = 1,
            _ => {}
        }
        v
    };
    let mut ts = Vec::new();
    let mut continues = HashMap::new();
    let mut commits = HashMap::new();
    if stop != 0 {
        ts.push(Transition {
            source: 0,
            letter: Letter(0),
            vector: count(0),
            target: run(0),
        });
    }
    for p in (0..k).filter(|p| *p != stop) {
        for l in 0..k {
            if l != stop {
                continues.insert((p, l), ts.len());
                ts.push(Transition {
                    source: run(p),
                    letter: Letter(l),
                    vector: count(l),
                    target: run(l),
                });
            }
            if let Some(flag) = commit_flag(m, p, l) {
                commits.insert((p, l), ts.len());
                ts.push(Transition {
                    source: run(p),
                    letter: Letter(l),
                    vector: unit(DIM, FLAG, flag),
                    target: if l == stop { done } else { wait },
                });
            }
        }
    }
    for l in 0..k {
        let zero = vector::zeros(DIM);
        ts.push(Transition {
            source: wait,
            letter: Letter(l),
            vector: zero.clone(),
            target: if l == stop { done } else { wait },
        });
        ts.push(Transition {
            source: done,
            letter: Letter(l),
            vector: zero,
            target: done,
        });
    }
    let flag = |x: i64| Atom::linear(coeffs(DIM, &[(FLAG, 1)]), Relation::Eq, x);
    let balance = |i: usize, rel| Atom::linear(coeffs(DIM, &[(2 * i, 1), (2 * i + 1, -1)]), rel, 0);
    let mut clauses = vec![vec![flag(1)]];
    for i in 0..2 {
        clauses.push(vec![flag(2 + 2 * i as i64), balance(i, Relation::Ne)]);
        clauses.push(vec![flag(3 + 2 * i as i64), balance(i, Relation::Eq)]);
    }
    let acceptance = SemilinearSet::Constraint(ConstraintSet::new(DIM, clauses)?);
    let automaton = ParikhAutomaton::new(m.alphabet(), names, 0, vec![done], ts, acceptance)?;

    let machine = m.clone();
    let resolver = ScriptedResolver::new("commit at the first error", move |view: &RunView<'_>, letter| {
        let a = view.automaton;
        let state = view.state;
        if (1..=k).contains(&state) && !view.history.is_empty() {
            let p = state - 1;
            let mut w = view.history.clone();
            w.push(letter);
            let n = w.len() - 2;
            // The run is only in `run p` while no error has been committed,
            // so the first error is the one at n.
            if has_error_at(&machine, &w, n).unwrap_or(false) {
                return commits.get(&(p, letter.0)).copied();
            }
            return continues.get(&(p, letter.0)).copied();
        }
        a.successors(state, letter).first().copied()
    });
    Ok(HdArtifact {
        automaton,
        resolver: Arc::new(resolver),
    })
}

/// HDPA for the words that are not a terminating run projection: the
/// union of `no_run_prefix` and `error_guess`. It is universal iff the
/// machine does not terminate.
pub fn build_universality_hdpa(m: &MinskyMachine) -> Result<HdArtifact> {
    m.require_guarded()?;
    let regular = no_run_prefix(m)?;
    let guess = error_guess(m)?;
    let product = union_pa(&regular, &guess.automaton)?;
    let resolver = product.resolver(Arc::new(PositionalResolver::deterministic()), guess.resolver);
    Ok(HdArtifact {
        automaton: product.automaton,
        resolver: Arc::new(resolver),
    })
}

/// Words starting with 0, containing the STOP line, whose suffix after the
/// first STOP line is not `0^n 1^n` with `n > 0`. Coordinates count the
/// 0s and 1s of the suffix plus a phase flag that is 1 exactly while the
/// suffix is in `0^+ 1^+`.
fn bad_suffix(m: &MinskyMachine) -> Result<ParikhAutomaton> {
    let stop = m.stop_line();
    if stop < 1 {
        return Err(Error::Precondition("needs a line besides STOP".into()));
    }
    let names = ["start", "prefix", "suffix", "zeros", "ones", "other", "reject"]
        .map(String::from)
        .to_vec();
    let (start, prefix, suffix, zeros, ones, other, reject) = (0, 1, 2, 3, 4, 5, 6);
    let mut ts = Vec::new();
    let mut edge = |s, l: usize, v: [u64; 3], t| {
        ts.push(Transition {
            source: s,
            letter: Letter(l),
            vector: v.to_vec(),
            target: t,
        })
    };
    for l in 0..m.len() {
        let first = if l != 0 {
            reject
        } else if l == stop {
            suffix
        } else {
            prefix
        };
        edge(start, l, [0; 3], first);
        edge(prefix, l, [0; 3], if l == stop { suffix } else { prefix });
        match l {
            0 => {
                edge(suffix, l, [1, 0, 0], zeros);
                edge(zeros, l, [1, 0, 0], zeros);
                edge(ones, l, [0, 0, 1], other);
            }
            1 => {
                edge(suffix, l, [0; 3], other);
                edge(zeros, l, [0, 1, 1], ones);
                edge(ones, l, [0, 1, 0], ones);
            }
            _ => {
                edge(suffix, l, [0; 3], other);
                edge(zeros, l, [0; 3], other);
                edge(ones, l, [0, 0, 1], other);
            }
        }
        edge(other, l, [0; 3], other);
        edge(reject, l, [0; 3], reject);
    }
    let acceptance = SemilinearSet::Constraint(ConstraintSet::new(
        3,
        vec![
            vec![Atom::linear(vec![0, 0, 1], Relation::Ne, 1)],
            vec![Atom::linear(vec![1, -1, 0], Relation::Ne, 0)],
        ],
    )?);
    ParikhAutomaton::new(
        m.alphabet(),
        names,
        start,
        vec![suffix, zeros, ones, other],
        ts,
        acceptance,
    )
}

/// The universality HDPA extended by the words with a bad suffix; regular
/// iff the machine does not terminate.
pub fn build_regularity_hdpa(m: &MinskyMachine) -> Result<HdArtifact> {
    let univ = build_universality_hdpa(m)?;
    let suffix = bad_suffix(m)?;
    let product = union_pa(&univ.automaton, &suffix)?;
    let resolver = product.resolver(univ.resolver, Arc::new(PositionalResolver::deterministic()));
    Ok(HdArtifact {
        automaton: product.automaton,
        resolver: Arc::new(resolver),
    })
}

/// Every letter relabelled `#`.
pub fn collapse_alphabet(a: &ParikhAutomaton) -> Result<ParikhAutomaton> {
    let ts = a
        .transitions()
        .iter()
        .map(|t| Transition {
            letter: Letter(0),
            ..t.clone()
        })
        .collect();
    ParikhAutomaton::new(
        Alphabet::new(["#"])?,
        a.state_names().to_vec(),
        a.initial(),
        a.accepting_states(),
        ts,
        a.acceptance().clone(),
    )
}

pub const HASH: &str = "#";

/// Token for the pair letter `(x, y)`.
pub fn pair_token(x: &str, y: &str) -> String {
    format!("{x}/{y}")
}

fn split_pair(token: &str) -> Result<(&str, &str)> {
    token
        .rsplit_once('/')
        .ok_or_else(|| Error::invalid(format!("letter {token:?} is not a pair `x/y`")))
}

/// Over `(Σ ∪ {#}) × {a,b}`: the pairs whose first component is in
/// `L·(ε + #·(Σ ∪ {#})*)` or whose second component is in `E`.
pub fn build_pairing(a: &ParikhAutomaton) -> Result<ParikhAutomaton> {
    if a.alphabet().lookup(HASH).is_some() {
        return Err(Error::Precondition(format!("alphabet already contains {HASH}")));
    }
    let e = corpus_get("E")?.automaton;
    let mut first: Vec<String> = a.alphabet().tokens().to_vec();
    first.push(HASH.into());
    let hash = first.len() - 1;
    let second = e.alphabet().tokens().to_vec();
    let pairs = Alphabet::new(first.iter().flat_map(|x| second.iter().map(move |y| pair_token(x, y))))?;
    let pair = |x: usize, y: usize| Letter(x * second.len() + y);

    // L·(ε + #·(Σ ∪ {#})*), lifted to the pair alphabet.
    let mut states = a.state_names().to_vec();
    let mut tail = HASH.to_string();
    while states.contains(&tail) {
        tail.push('\'');
    }
    states.push(tail);
    let h = states.len() - 1;
    let zero = vector::zeros(a.dim());
    let mut ts = Vec::new();
    for t in a.transitions() {
        for y in 0..second.len() {
            ts.push(Transition {
                letter: pair(t.letter.0, y),
                ..t.clone()
            });
        }
    }
    for y in 0..second.len() {
        for f in a.accepting_states() {
            ts.push(Transition {
                source: f,
                letter: pair(hash, y),
                vector: zero.clone(),
                target: h,
            });
        }
        for x in 0..first.len() {
            ts.push(Transition {
                source: h,
                letter: pair(x, y),
                vector: zero.clone(),
                target: h,
            });
        }
    }
    let mut accepting = a.accepting_states();
    accepting.push(h);
    let left = ParikhAutomaton::new(
        pairs.clone(),
        states,
        a.initial(),
        accepting,
        ts,
        a.acceptance().clone(),
    )?;

    let mut ts = Vec::new();
    for t in e.transitions() {
        for x in 0..first.len() {
            ts.push(Transition {
                letter: pair(x, t.letter.0),
                ..t.clone()
            });
        }
    }
    let right = ParikhAutomaton::new(
        pairs,
        e.state_names().to_vec(),
        e.initial(),
        e.accepting_states(),
        ts,
        e.acceptance().clone(),
    )?;
    Ok(union_pa(&left, &right)?.automaton)
}

/// A restricted automaton with its transition correspondence.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub automaton: ParikhAutomaton,
    /// Pair-alphabet letter fed to the source at each position past `|u|`
    /// is `hash`; before that it is `u_j`.
    pub u: Vec<String>,
    pub hash: String,
    pub source: ParikhAutomaton,
    /// `(source transition, position min |u|)` to restricted transition.
    pub index: HashMap<(usize, usize), usize>,
}

/// Over a pair alphabet `x/y`: keeps the runs whose first components
/// spell `u·#*` and projects to the second components. The position in `u`
/// is stored in the state.
pub fn restrict_first(a: &ParikhAutomaton, u: &[String], hash: &str) -> Result<Restriction> {
    let mut second: Vec<String> = Vec::new();
    let mut decoded = Vec::new();
    for tok in a.alphabet().tokens() {
        let (x, y) = split_pair(tok)?;
        if !second.iter().any(|s| s == y) {
            second.push(y.to_string());
        }
        decoded.push((x.to_string(), second.iter().position(|s| s == y).unwrap()));
    }
    let alphabet = Alphabet::new(second)?;
    let n = u.len();
    let mut ex = Explorer::new((a.initial(), 0usize));
    let mut ts = Vec::new();
    let mut index = HashMap::new();
    while let Some(s) = ex.queue.pop_front() {
        let (q, j) = ex.keys[s];
        let want = if j < n { u[j].as_str() } else { hash };
        for (i, t) in a.transitions().iter().enumerate() {
            let (x, y) = &decoded[t.letter.0];
            if t.source != q || x != want {
                continue;
            }
            let target = ex.id((t.target, (j + 1).min(n)));
            index.insert((i, j), ts.len());
            ts.push(Transition {
                source: s,
                letter: Letter(*y),
                vector: t.vector.clone(),
                target,
            });
        }
    }
    let names = ex
        .keys
        .iter()
        .map(|(q, j)| format!("({},{j})", a.state_name(*q)))
        .collect();
    let accepting = (0..ex.keys.len())
        .filter(|s| ex.keys[*s].1 == n && a.is_accepting(ex.keys[*s].0))
        .collect();
    let automaton = ParikhAutomaton::new(alphabet, names, 0, accepting, ts, a.acceptance().clone())?;
    Ok(Restriction {
        automaton,
        u: u.to_vec(),
        hash: hash.to_string(),
        source: a.clone(),
        index,
    })
}

impl Restriction {
    /// Feeds `(u_j or #, y)` to `r` on the source automaton.
    pub fn resolver(&self, r: Arc<dyn Resolver>) -> RestrictedResolver {
        RestrictedResolver {
            inner: r,
            restriction: self.clone(),
        }
    }
}

pub struct RestrictedResolver {
    inner: Arc<dyn Resolver>,
    restriction: Restriction,
}

struct RestrictedSession<'a> {
    inner: Box<dyn ResolverSession + 'a>,
    owner: &'a Restriction,
    position: usize,
}

impl ResolverSession for RestrictedSession<'_> {
    fn next(&mut self, letter: Letter) -> Option<usize> {
        let r = self.owner;
        let x = r.u.get(self.position).map_or(r.hash.as_str(), String::as_str);
        let y = r.automaton.alphabet().token(letter);
        let pair = r.source.alphabet().lookup(&pair_token(x, y))?;
        let t = self.inner.next(pair)?;
        let j = self.position.min(r.u.len());
        self.position += 1;
        r.index.get(&(t, j)).copied()
    }
}

impl Resolver for RestrictedResolver {
    fn start<'a>(&'a self, _a: &'a ParikhAutomaton) -> Box<dyn ResolverSession + 'a> {
        Box::new(RestrictedSession {
            inner: self.inner.start(&self.restriction.source),
            owner: &self.restriction,
            position: 0,
        })
    }
}

/// Test machines: one that halts, one that loops, and one using both
/// counters and both branches.
pub mod machines {
    use super::*;

    pub fn m_halt() -> MinskyMachine {
        MinskyMachine::new(vec![Instr::Ite(0, 1, 1), Instr::Stop]).unwrap()
    }

    pub fn m_loop() -> MinskyMachine {
        MinskyMachine::new(vec![Instr::Inc(0), Instr::Ite(0, 0, 0), Instr::Stop]).unwrap()
    }

    pub fn m_six() -> MinskyMachine {
        MinskyMachine::new(vec![
            Instr::Inc(0),
            Instr::Ite(0, 3, 2),
            Instr::Dec(0),
            Instr::Inc(1),
            Instr::Ite(0, 5, 0),
            Instr::Stop,
        ])
        .unwrap()
    }

    /// Counts counter 0 up to two and back down, then bumps counter 1 and
    /// starts over; never stops.
    pub fn m_pingpong() -> MinskyMachine {
        MinskyMachine::new(vec![
            Instr::Inc(0),
            Instr::Inc(0),
            Instr::Ite(0, 4, 3),
            Instr::Dec(0),
            Instr::Ite(0, 5, 2),
            Instr::Inc(1),
            Instr::Ite(1, 6, 0),
            Instr::Stop,
        ])
        .unwrap()
    }

    pub fn suite() -> Vec<(&'static str, MinskyMachine)> {
        vec![
            ("M_halt", m_halt()),
            ("M_loop", m_loop()),
            ("M_six", m_six()),
            ("M_pingpong", m_pingpong()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::machines::*;
    use super::*;
    use crate::alphabet::words_up_to;
    use crate::hd::{validate_resolver, ResolverVerdict};
    use crate::pa::{is_deterministic, member};

    fn word(m: &MinskyMachine, s: &str) -> Word {
        m.alphabet().parse_word(s).unwrap()
    }

    #[test]
    fn suite_is_guarded() {
        for (name, m) in suite() {
            assert!(m.is_guarded(), "{name}");
            assert_eq!(guard_decrements(&m), m, "{name}");
        }
    }

    #[test]
    fn runs() {
        let halt = minsky_run(&m_halt(), 10);
        assert!(halt.terminated());
        assert_eq!(halt.projection(), word(&m_halt(), "01"));
        assert!(!minsky_run(&m_loop(), 50).terminated());
        let six = minsky_run(&m_six(), 100);
        assert_eq!(six.projection(), word(&m_six(), "012345"));
        assert_eq!(
            minsky_run(&m_halt(), 0).trace()[0],
            MinskyConfig {
                line: 0,
                counters: [0, 0]
            }
        );
        assert!(!minsky_run(&m_pingpong(), 200).terminated());
    }

    #[test]
    fn guard_insertion() {
        let raw: MinskyMachine = "0: INC 1\n1: DEC 1\n2: IF 1 ZERO 1 ELSE 3\n3: STOP\n".parse().unwrap();
        assert!(!raw.is_guarded());
        let g = guard_decrements(&raw);
        assert!(g.is_guarded());
        assert_eq!(g.len(), raw.len() + 1);
        assert_eq!(g.lines()[1], Instr::Ite(1, 3, 2));
        assert_eq!(g.lines()[3], Instr::Ite(1, 1, 4));
        let (a, b) = (minsky_run(&raw, 20), minsky_run(&g, 20));
        assert_eq!(a.terminated(), b.terminated());
    }

    #[test]
    fn parse_round_trip() {
        for (_, m) in suite() {
            let text = m.to_string();
            assert_eq!(text.parse::<MinskyMachine>().unwrap(), m);
        }
        let err = "0: JMP 3\n1: STOP".parse::<MinskyMachine>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn error_predicate() {
        let m = m_halt();
        assert!(!has_error_at(&m, &word(&m, "01"), 0).unwrap());
        assert!(has_error_at(&m, &word(&m, "00"), 0).unwrap());
        assert!(has_error_at(&m, &word(&m, "010"), 1).unwrap());
        assert!(has_error_at(&m, &word(&m, "01"), 1).is_err());
    }

    #[test]
    fn error_free_iff_run_prefix() {
        for (name, m) in suite() {
            let proj = minsky_run(&m, 50).projection();
            for w in words_up_to(m.len(), 4) {
                if w.first() != Some(&Letter(0)) {
                    continue;
                }
                let clean = first_error(&m, &w).unwrap().is_none();
                assert_eq!(clean, proj.starts_with(&w), "{name} {w:?}");
            }
        }
    }

    #[test]
    fn safety_dpa() {
        for (name, m) in suite() {
            let a = build_safety_dpa(&m).unwrap();
            assert!(is_deterministic(&a), "{name}");
            for w in words_up_to(m.len(), 4) {
                let expected = w.len() < 2 && w.iter().all(|l| l.0 == 0)
                    || w.len() >= 2 && !has_error_at(&m, &w, w.len() - 2).unwrap();
                assert_eq!(member(&a, &w).unwrap(), expected, "{name} {w:?}");
            }
        }
        let m = m_loop();
        let a = build_safety_dpa(&m).unwrap();
        let proj = minsky_run(&m, 19).projection();
        for n in 0..=proj.len() {
            assert!(member(&a, &proj[..n]).unwrap());
        }
    }

    fn universality_reference(m: &MinskyMachine, w: &[Letter]) -> bool {
        let stop = m.stop_line();
        let Some(f) = w.iter().position(|l| l.0 == stop) else {
            return true;
        };
        if w[0].0 != 0 {
            return true;
        }
        first_error(m, &w[..=f]).unwrap().is_some()
    }

    #[test]
    fn universality_hdpa() {
        for (name, m) in suite() {
            let art = build_universality_hdpa(&m).unwrap();
            let max = if m.len() > 4 { 3 } else { 5 };
            for w in words_up_to(m.len(), max) {
                assert_eq!(
                    member(&art.automaton, &w).unwrap(),
                    universality_reference(&m, &w),
                    "{name} {w:?}"
                );
            }
            assert_eq!(
                validate_resolver(&art.automaton, &*art.resolver, max).unwrap(),
                ResolverVerdict::ValidToBound(max),
                "{name}"
            );
        }
        let m = m_halt();
        let art = build_universality_hdpa(&m).unwrap();
        assert!(!member(&art.automaton, &word(&m, "01")).unwrap());
    }

    #[test]
    fn regularity_hdpa() {
        let m = m_halt();
        let art = build_regularity_hdpa(&m).unwrap();
        assert!(!member(&art.automaton, &word(&m, "010011")).unwrap());
        assert!(member(&art.automaton, &word(&m, "01001")).unwrap());
        assert!(member(&art.automaton, &word(&m, "01")).unwrap());
        assert!(is_deterministic(&bad_suffix(&m).unwrap()));
        assert_eq!(
            validate_resolver(&art.automaton, &*art.resolver, 6).unwrap(),
            ResolverVerdict::ValidToBound(6)
        );
    }

    #[test]
    fn collapse() {
        let ex1 = corpus_get("ex1").unwrap().automaton;
        let c = collapse_alphabet(&ex1).unwrap();
        let hashes = |n| vec![Letter(0); n];
        assert!(member(&c, &hashes(0)).unwrap());
        assert!(!member(&c, &hashes(1)).unwrap());
        assert!(member(&c, &hashes(2)).unwrap());
        assert!(member(&c, &hashes(3)).unwrap());
    }

    #[test]
    fn pairing_and_restriction() {
        let ex1 = corpus_get("ex1").unwrap().automaton;
        let e = corpus_get("E").unwrap();
        let p = build_pairing(&ex1).unwrap();
        assert_eq!(p.alphabet().len(), 6);
        // u = "ba" is not in ex1's language.
        let u = vec!["b".to_string(), "a".to_string()];
        let r = restrict_first(&p, &u, HASH).unwrap();
        for w in words_up_to(2, u.len() + 3) {
            let expected = w.len() >= u.len() && member(&e.automaton, &w).unwrap();
            assert_eq!(member(&r.automaton, &w).unwrap(), expected, "{w:?}");
        }
    }
}
