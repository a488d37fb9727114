//! Reversal-bounded counter machines: interpreter, reversal monitor,
//! normal form, and translations to and from Parikh automata.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Letter};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::pa::{EpsTransition, EpsilonPA, ParikhAutomaton, StateId};
use crate::semilinear::{Atom, ConstraintSet, Relation, SemilinearSet};
use crate::vector;

/// A tape cell: the endmarkers `▷`, `◁` or an input letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    Left,
    Right,
    Letter(Letter),
}

/// Guard entry. `Any` is shorthand for both the zero and the nonzero
/// guard, so that untested counters need no duplicated transitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Guard {
    Zero,
    Positive,
    Any,
}

impl Guard {
    pub fn admits(self, c: u64) -> bool {
        match self {
            Guard::Zero => c == 0,
            Guard::Positive => c > 0,
            Guard::Any => true,
        }
    }

    pub fn token(self) -> char {
        match self {
            Guard::Zero => '0',
            Guard::Positive => '1',
            Guard::Any => '*',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CmTransition {
    pub source: StateId,
    pub symbol: Symbol,
    pub guard: Vec<Guard>,
    pub target: StateId,
    pub mv: i8,
    pub update: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterMachine {
    counters: usize,
    alphabet: Alphabet,
    states: Vec<String>,
    initial: StateId,
    accepting: Vec<bool>,
    transitions: Vec<CmTransition>,
    /// Declared bound on head and counter reversals, checked by monitoring.
    pub reversal_bound: Option<usize>,
    /// Extra acceptance test on the counters of the final configuration.
    end_test: Option<SemilinearSet>,
}

impl CounterMachine {
    pub fn new(
        counters: usize,
        alphabet: Alphabet,
        states: Vec<String>,
        initial: StateId,
        accepting: Vec<StateId>,
        transitions: Vec<CmTransition>,
    ) -> Result<Self> {
        let n = states.len();
        if n == 0 || initial >= n {
            return Err(Error::invalid("machine needs a valid initial state"));
        }
        let mut acc = vec![false; n];
        for f in accepting {
            *acc.get_mut(f)
                .ok_or_else(|| Error::invalid("accepting state out of range"))? = true;
        }
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        for t in transitions {
            if seen.insert(t.clone()) {
                kept.push(t);
            }
        }
        let m = CounterMachine {
            counters,
            alphabet,
            states,
            initial,
            accepting: acc,
            transitions: kept,
            reversal_bound: None,
            end_test: None,
        };
        m.check_invariants()?;
        Ok(m)
    }

    pub fn with_end_test(mut self, test: SemilinearSet) -> Result<Self> {
        Error::check_dim(self.counters, test.dim())?;
        self.end_test = Some(test);
        Ok(self)
    }

    pub fn counters(&self) -> usize {
        self.counters
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> Vec<StateId> {
        (0..self.states.len()).filter(|q| self.accepting[*q]).collect()
    }

    pub fn transitions(&self) -> &[CmTransition] {
        &self.transitions
    }

    pub fn end_test(&self) -> Option<&SemilinearSet> {
        self.end_test.as_ref()
    }

    pub fn symbol_token(&self, s: Symbol) -> String {
        match s {
            Symbol::Left => ">".into(),
            Symbol::Right => "<".into(),
            Symbol::Letter(l) => self.alphabet.token(l).into(),
        }
    }

    /// Endmarker and guard-compatibility conditions on every transition.
    pub fn check_invariants(&self) -> Result<()> {
        for t in &self.transitions {
            let bad = |m: &str| {
                Err(Error::invalid(format!(
                    "transition {} {} -> {}: {m}",
                    self.states.get(t.source).map_or("?", String::as_str),
                    match t.symbol {
                        Symbol::Letter(l) if l.0 < self.alphabet.len() => self.alphabet.token(l).to_string(),
                        Symbol::Letter(_) => "?".to_string(),
                        s => self.symbol_token(s),
                    },
                    self.states.get(t.target).map_or("?", String::as_str)
                )))
            };
            if t.source >= self.states.len() || t.target >= self.states.len() {
                return bad("state out of range");
            }
            if let Symbol::Letter(l) = t.symbol {
                if !self.alphabet.contains(l) {
                    return bad("letter not in alphabet");
                }
            }
            if t.guard.len() != self.counters || t.update.len() != self.counters {
                return bad("guard or update has the wrong number of counters");
            }
            if !(-1..=1).contains(&t.mv) || t.update.iter().any(|u| !(-1..=1).contains(u)) {
                return bad("moves and updates must be in {-1,0,1}");
            }
            if t.symbol == Symbol::Left && t.mv < 0 {
                return bad("moves left of the left endmarker");
            }
            if t.symbol == Symbol::Right && t.mv > 0 {
                return bad("moves right of the right endmarker");
            }
            if t.guard
                .iter()
                .zip(&t.update)
                .any(|(g, u)| *u < 0 && *g != Guard::Positive)
            {
                return bad("decrements a counter that may be zero");
            }
        }
        Ok(())
    }

    pub fn is_one_way(&self) -> bool {
        self.transitions.iter().all(|t| t.mv >= 0)
    }

    /// `▷ w ◁`
    pub fn tape(&self, w: &[Letter]) -> Vec<Symbol> {
        let mut tape = vec![Symbol::Left];
        tape.extend(w.iter().map(|l| Symbol::Letter(*l)));
        tape.push(Symbol::Right);
        tape
    }

    fn accepts_config(&self, c: &Config) -> Result<bool> {
        if !self.accepting[c.state] {
            return Ok(false);
        }
        match &self.end_test {
            None => Ok(true),
            Some(test) => test.contains(&c.counters),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Config {
    pub state: StateId,
    pub head: usize,
    pub counters: Vec<u64>,
}

impl Config {
    pub fn initial(m: &CounterMachine) -> Self {
        Config {
            state: m.initial,
            head: 0,
            counters: vec![0; m.counters],
        }
    }
}

/// Successors of `cfg` on the tape, with the transition taken.
pub fn cm_step(m: &CounterMachine, tape: &[Symbol], cfg: &Config) -> Vec<(usize, Config)> {
    let symbol = tape[cfg.head];
    let mut out = Vec::new();
    for (i, t) in m.transitions.iter().enumerate() {
        if t.source != cfg.state || t.symbol != symbol {
            continue;
        }
        if !t.guard.iter().zip(&cfg.counters).all(|(g, c)| g.admits(*c)) {
            continue;
        }
        let head = cfg.head as i64 + t.mv as i64;
        if head < 0 || head as usize >= tape.len() {
            continue;
        }
        let counters = cfg
            .counters
            .iter()
            .zip(&t.update)
            .map(|(c, u)| (*c as i64 + *u as i64) as u64)
            .collect();
        out.push((
            i,
            Config {
                state: t.target,
                head: head as usize,
                counters,
            },
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Accept,
    Reject,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmOutcome {
    pub verdict: Verdict,
    /// An accepting run, as transition indices.
    pub run: Option<Vec<usize>>,
    /// Some configuration was dropped for exceeding the counter cap, so a
    /// rejection is only relative to the cap.
    pub cap_hit: bool,
}

pub fn default_cap(m: &CounterMachine, w: &[Letter]) -> u64 {
    (w.len() * m.counters + 8) as u64
}

pub fn cm_accepts(m: &CounterMachine, w: &[Letter], budget: &mut Budget) -> Result<CmOutcome> {
    cm_accepts_with(m, w, budget, default_cap(m, w))
}

/// Breadth-first search over configurations with counters capped at
/// `cap`.
pub fn cm_accepts_with(m: &CounterMachine, w: &[Letter], budget: &mut Budget, cap: u64) -> Result<CmOutcome> {
    m.alphabet.check_word(w)?;
    let tape = m.tape(w);
    let start = Config::initial(m);
    let mut configs = vec![start.clone()];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([0usize]);
    let mut cap_hit = false;
    while let Some(i) = queue.pop_front() {
        if m.accepts_config(&configs[i])? {
            let mut run = Vec::new();
            let mut at = i;
            while let Some((p, t)) = parent[at] {
                run.push(t);
                at = p;
            }
            run.reverse();
            return Ok(CmOutcome {
                verdict: Verdict::Accept,
                run: Some(run),
                cap_hit,
            });
        }
        if !budget.spend(1) {
            return Ok(CmOutcome {
                verdict: Verdict::Unknown,
                run: None,
                cap_hit,
            });
        }
        for (t, next) in cm_step(m, &tape, &configs[i]) {
            if next.counters.iter().any(|c| *c > cap) {
                cap_hit = true;
                continue;
            }
            if seen.insert(next.clone()) {
                configs.push(next);
                parent.push(Some((i, t)));
                queue.push_back(configs.len() - 1);
            }
        }
    }
    Ok(CmOutcome {
        verdict: Verdict::Reject,
        run: None,
        cap_hit,
    })
}

/// Follows the given transitions from the initial configuration and
/// reports whether the run is enabled throughout and ends accepting.
pub fn cm_replay(m: &CounterMachine, w: &[Letter], run: &[usize]) -> Result<bool> {
    m.alphabet.check_word(w)?;
    let tape = m.tape(w);
    let mut cfg = Config::initial(m);
    for (i, &t) in run.iter().enumerate() {
        cfg = cm_step(m, &tape, &cfg)
            .into_iter()
            .find(|(j, _)| *j == t)
            .map(|(_, c)| c)
            .ok_or_else(|| Error::InvalidRun(format!("step {i}: transition {t} is not enabled")))?;
    }
    m.accepts_config(&cfg)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reversals {
    pub head: usize,
    pub counters: Vec<usize>,
}

/// Sign alternations in the sequence, zeros ignored.
pub fn sign_alternations(values: impl IntoIterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for v in values {
        if v == 0 {
            continue;
        }
        if last != 0 && v.signum() != last {
            count += 1;
        }
        last = v.signum();
    }
    count
}

pub fn reversal_monitor(m: &CounterMachine, run: &[usize]) -> Reversals {
    let ts: Vec<&CmTransition> = run.iter().map(|t| &m.transitions[*t]).collect();
    Reversals {
        head: sign_alternations(ts.iter().map(|t| t.mv)),
        counters: (0..m.counters)
            .map(|j| sign_alternations(ts.iter().map(|t| t.update[j])))
            .collect(),
    }
}

fn fresh(states: &[String], base: &str) -> String {
    let mut name = base.to_string();
    while states.contains(&name) {
        name.push('\'');
    }
    name
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Status {
    Ini,
    Inc,
    Dec,
    Zero,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ini => "INI",
            Status::Inc => "INC",
            Status::Dec => "DEC",
            Status::Zero => "ZERO",
        })
    }
}

impl Status {
    fn assumed_zero(self) -> bool {
        matches!(self, Status::Ini | Status::Zero)
    }

    fn after(self, update: i8) -> Vec<Status> {
        match (update, self) {
            (0, s) => vec![s],
            (1, Status::Ini | Status::Inc) => vec![Status::Inc],
            (-1, Status::Inc | Status::Dec) => vec![Status::Dec, Status::Zero],
            _ => vec![],
        }
    }
}

/// Makes accepting runs end on `◁` with empty counters in a fresh
/// accepting state without outgoing transitions: from any old accepting
/// state the machine may scan to `◁` and drain the counters.
fn accept_at_end(m: &CounterMachine) -> CounterMachine {
    let k = m.counters;
    let mut states = m.states.clone();
    let scan = states.len();
    states.push(fresh(&states, "scan"));
    let drain = states.len();
    states.push(fresh(&states, "drain"));
    let acc = states.len();
    states.push(fresh(&states, "acc"));
    let mut ts = m.transitions.clone();
    let any = vec![Guard::Any; k];
    let still = vec![0i8; k];
    let mut symbols = vec![Symbol::Left, Symbol::Right];
    symbols.extend(m.alphabet.letters().map(Symbol::Letter));
    for q in m.accepting_states() {
        for &s in &symbols {
            ts.push(CmTransition {
                source: q,
                symbol: s,
                guard: any.clone(),
                target: scan,
                mv: 0,
                update: still.clone(),
            });
        }
    }
    for &s in &symbols {
        let (target, mv) = if s == Symbol::Right { (drain, 0) } else { (scan, 1) };
        ts.push(CmTransition {
            source: scan,
            symbol: s,
            guard: any.clone(),
            target,
            mv,
            update: still.clone(),
        });
    }
    for j in 0..k {
        let mut guard = any.clone();
        guard[j] = Guard::Positive;
        let mut update = still.clone();
        update[j] = -1;
        ts.push(CmTransition {
            source: drain,
            symbol: Symbol::Right,
            guard,
            target: drain,
            mv: 0,
            update,
        });
    }
    ts.push(CmTransition {
        source: drain,
        symbol: Symbol::Right,
        guard: vec![Guard::Zero; k],
        target: acc,
        mv: 0,
        update: still,
    });
    CounterMachine::new(k, m.alphabet.clone(), states, m.initial, vec![acc], ts).expect("valid by construction")
}

/// Normal form for one-way machines whose counters reverse at most once:
/// zero tests are replaced by guessed counter statuses, and acceptance
/// happens only on `◁` with all counters zero.
pub fn normalize(m: &CounterMachine) -> Result<CounterMachine> {
    if !m.is_one_way() {
        return Err(Error::invalid("normal form needs a one-way machine"));
    }
    if m.end_test.is_some() {
        return Err(Error::invalid("normal form needs a machine without an end test"));
    }
    let m1 = accept_at_end(m);
    let k = m1.counters;
    let final_state = m1.accepting_states()[0];
    let mut ids: HashMap<(StateId, Vec<Status>), StateId> = HashMap::new();
    let mut keys = vec![(m1.initial, vec![Status::Ini; k])];
    ids.insert(keys[0].clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    let mut ts = Vec::new();
    let mut id_of = |key: (StateId, Vec<Status>), keys: &mut Vec<_>, queue: &mut VecDeque<usize>| -> StateId {
        *ids.entry(key.clone()).or_insert_with(|| {
            keys.push(key);
            queue.push_back(keys.len() - 1);
            keys.len() - 1
        })
    };
    while let Some(s) = queue.pop_front() {
        let (q, status) = keys[s].clone();
        for t in m1.transitions.iter().filter(|t| t.source == q) {
            let consistent = t.guard.iter().zip(&status).all(|(g, st)| match g {
                Guard::Zero => st.assumed_zero(),
                Guard::Positive => !st.assumed_zero(),
                Guard::Any => true,
            });
            if !consistent {
                continue;
            }
            if t.target == final_state {
                let target = id_of((t.target, status.clone()), &mut keys, &mut queue);
                ts.push(CmTransition {
                    source: s,
                    symbol: t.symbol,
                    guard: vec![Guard::Zero; k],
                    target,
                    mv: t.mv,
                    update: t.update.clone(),
                });
                continue;
            }
            let mut options: Vec<Vec<Status>> = vec![vec![]];
            for (st, u) in status.iter().zip(&t.update) {
                let nexts = st.after(*u);
                options = options
                    .into_iter()
                    .flat_map(|prefix| {
                        nexts.iter().map(move |n| {
                            let mut p = prefix.clone();
                            p.push(*n);
                            p
                        })
                    })
                    .collect();
            }
            let guard: Vec<Guard> = t
                .update
                .iter()
                .map(|u| if *u < 0 { Guard::Positive } else { Guard::Any })
                .collect();
            for next in options {
                let target = id_of((t.target, next), &mut keys, &mut queue);
                ts.push(CmTransition {
                    source: s,
                    symbol: t.symbol,
                    guard: guard.clone(),
                    target,
                    mv: t.mv,
                    update: t.update.clone(),
                });
            }
        }
    }
    let names: Vec<String> = keys
        .iter()
        .map(|(q, st)| {
            if k == 0 {
                m1.states[*q].clone()
            } else {
                let parts: Vec<String> = st.iter().map(Status::to_string).collect();
                format!("{}[{}]", m1.states[*q], parts.join(","))
            }
        })
        .collect();
    let accepting = (0..keys.len()).filter(|s| keys[*s].0 == final_state).collect();
    let mut out = CounterMachine::new(k, m.alphabet.clone(), names, 0, accepting, ts)?;
    out.reversal_bound = m.reversal_bound;
    Ok(out)
}

/// Conditions of the normal form that can be checked syntactically.
pub fn is_normal_form(m: &CounterMachine) -> bool {
    m.is_one_way()
        && m.end_test.is_none()
        && m.transitions.iter().all(|t| {
            if m.accepting[t.target] {
                t.symbol == Symbol::Right
                    && t.guard.iter().all(|g| *g == Guard::Zero)
                    && t.update.iter().all(|u| *u == 0)
            } else {
                t.guard.iter().zip(&t.update).all(|(g, u)| {
                    if *u < 0 {
                        *g == Guard::Positive
                    } else {
                        *g == Guard::Any
                    }
                })
            }
        })
        && m.transitions.iter().all(|t| !m.accepting[t.source])
}

/// ε-PA simulating a normal-form machine. Counter `j` feeds coordinate
/// `2j` on increments and `2j+1` on decrements; acceptance requires the two
/// to agree. A state also records the symbol under the head, guessed when
/// the head moves right and confirmed when that letter is read.
pub fn rbcm_to_epsilon_pa(m: &CounterMachine) -> Result<EpsilonPA> {
    if !is_normal_form(m) {
        return Err(Error::Precondition("machine is not in normal form".into()));
    }
    let k = m.counters;
    let dim = (2 * k).max(1);
    let image = |u: &[i8]| {
        let mut v = vector::zeros(dim);
        for (j, x) in u.iter().enumerate() {
            match x {
                1 => v[2 * j] += 1,
                -1 => v[2 * j + 1] += 1,
                _ => {}
            }
        }
        v
    };
    let mut ahead: Vec<Symbol> = m.alphabet.letters().map(Symbol::Letter).collect();
    ahead.push(Symbol::Right);

    let mut ids: HashMap<(StateId, Symbol), StateId> = HashMap::new();
    let mut keys = vec![(m.initial, Symbol::Left)];
    ids.insert(keys[0], 0);
    let mut queue = VecDeque::from([0usize]);
    let mut ts = Vec::new();
    while let Some(s) = queue.pop_front() {
        let (q, sym) = keys[s];
        for t in m.transitions.iter().filter(|t| t.source == q && t.symbol == sym) {
            let v = image(&t.update);
            let (letter, nexts): (Option<Letter>, Vec<Symbol>) = match (t.mv, sym) {
                (0, _) => (None, vec![sym]),
                (_, Symbol::Left) => (None, ahead.clone()),
                (_, Symbol::Letter(l)) => (Some(l), ahead.clone()),
                (_, Symbol::Right) => unreachable!("checked by the machine invariants"),
            };
            for n in nexts {
                let key = (t.target, n);
                let target = *ids.entry(key).or_insert_with(|| {
                    keys.push(key);
                    queue.push_back(keys.len() - 1);
                    keys.len() - 1
                });
                ts.push(EpsTransition {
                    source: s,
                    letter,
                    vector: v.clone(),
                    target,
                });
            }
        }
    }
    let accepting: Vec<StateId> = (0..keys.len())
        .filter(|s| m.accepting[keys[*s].0] && keys[*s].1 == Symbol::Right)
        .collect();

    // Drop states that cannot reach acceptance.
    let mut alive = vec![false; keys.len()];
    for &f in &accepting {
        alive[f] = true;
    }
    let mut changed = true;
    while changed {
        changed = false;
        for t in &ts {
            if alive[t.target] && !alive[t.source] {
                alive[t.source] = true;
                changed = true;
            }
        }
    }
    alive[0] = true;
    let mut renumber = vec![usize::MAX; keys.len()];
    let mut names = Vec::new();
    for (s, (q, sym)) in keys.iter().enumerate() {
        if alive[s] {
            renumber[s] = names.len();
            names.push(format!("{}@{}", m.states[*q], m.symbol_token(*sym)));
        }
    }
    let ts = ts
        .into_iter()
        .filter(|t| alive[t.source] && alive[t.target])
        .map(|t| EpsTransition {
            source: renumber[t.source],
            target: renumber[t.target],
            ..t
        })
        .collect();
    let atoms = (0..k)
        .map(|j| {
            let mut c = vec![0i64; dim];
            c[2 * j] = 1;
            c[2 * j + 1] = -1;
            Atom::linear(c, Relation::Eq, 0)
        })
        .collect();
    let acceptance = SemilinearSet::Constraint(ConstraintSet::conjunction(dim, atoms)?);
    EpsilonPA::new(
        m.alphabet.clone(),
        names,
        0,
        accepting.into_iter().map(|f| renumber[f]).collect(),
        ts,
        acceptance,
    )
}

/// A one-way machine simulating a PA, with the transition correspondence.
#[derive(Debug, Clone)]
pub struct SimulatingMachine {
    pub machine: CounterMachine,
    /// Reads `▷`.
    pub start: usize,
    /// Machine transitions for each PA transition, in order.
    pub steps: Vec<Vec<usize>>,
    /// Final transition on `◁` from each accepting PA state.
    pub finish: HashMap<StateId, usize>,
}

impl SimulatingMachine {
    /// Machine run for a PA run followed by the final step.
    pub fn translate_run(&self, a: &ParikhAutomaton, run: &[usize]) -> Option<Vec<usize>> {
        let mut out = vec![self.start];
        let mut q = a.initial();
        for &t in run {
            out.extend_from_slice(&self.steps[t]);
            q = a.transition(t).target;
        }
        out.push(*self.finish.get(&q)?);
        Some(out)
    }
}

/// One counter per coordinate; a transition adding `v` becomes a chain of
/// unit increments on the same cell, the last of which moves right. The
/// acceptance set is evaluated on the counters at the end.
pub fn pa_to_rbcm(a: &ParikhAutomaton) -> Result<SimulatingMachine> {
    let d = a.dim();
    let mut states = a.state_names().to_vec();
    let any = vec![Guard::Any; d];
    let mut ts = Vec::new();
    let start = ts.len();
    ts.push(CmTransition {
        source: a.initial(),
        symbol: Symbol::Left,
        guard: any.clone(),
        target: a.initial(),
        mv: 1,
        update: vec![0; d],
    });
    let mut steps = Vec::new();
    for (i, t) in a.transitions().iter().enumerate() {
        let mut units: Vec<usize> = Vec::new();
        for (j, x) in t.vector.iter().enumerate() {
            units.extend(std::iter::repeat_n(j, *x as usize));
        }
        let mut chain = Vec::new();
        let mut from = t.source;
        let n = units.len().max(1);
        for s in 0..n {
            let last = s + 1 == n;
            let to = if last {
                t.target
            } else {
                states.push(fresh(&states, &format!("t{i}.{s}")));
                states.len() - 1
            };
            let mut update = vec![0i8; d];
            if let Some(&j) = units.get(s) {
                update[j] = 1;
            }
            chain.push(ts.len());
            ts.push(CmTransition {
                source: from,
                symbol: Symbol::Letter(t.letter),
                guard: any.clone(),
                target: to,
                mv: if last { 1 } else { 0 },
                update,
            });
            from = to;
        }
        steps.push(chain);
    }
    let end = states.len();
    states.push(fresh(&states, "end"));
    let mut finish = HashMap::new();
    for f in a.accepting_states() {
        finish.insert(f, ts.len());
        ts.push(CmTransition {
            source: f,
            symbol: Symbol::Right,
            guard: any.clone(),
            target: end,
            mv: 0,
            update: vec![0; d],
        });
    }
    let machine = CounterMachine::new(d, a.alphabet().clone(), states, a.initial(), vec![end], ts)?
        .with_end_test(a.acceptance().clone())?;
    Ok(SimulatingMachine {
        machine,
        start,
        steps,
        finish,
    })
}

/// Scans right to `◁` and back to `▷` with the counters untouched, then
/// behaves like `m`.
pub fn scan_wrapper(m: &CounterMachine) -> CounterMachine {
    let k = m.counters;
    let mut states = m.states.clone();
    let right = states.len();
    states.push(fresh(&states, "scan>"));
    let left = states.len();
    states.push(fresh(&states, "scan<"));
    let mut ts = m.transitions.clone();
    let step = |source, symbol, target, mv| CmTransition {
        source,
        symbol,
        guard: vec![Guard::Any; k],
        target,
        mv,
        update: vec![0; k],
    };
    ts.push(step(right, Symbol::Left, right, 1));
    ts.push(step(right, Symbol::Right, left, -1));
    ts.push(step(left, Symbol::Left, m.initial, 0));
    for l in m.alphabet.letters() {
        ts.push(step(right, Symbol::Letter(l), right, 1));
        ts.push(step(left, Symbol::Letter(l), left, -1));
    }
    let mut out = CounterMachine::new(k, m.alphabet.clone(), states, right, m.accepting_states(), ts)
        .expect("valid by construction");
    out.reversal_bound = m.reversal_bound.map(|b| b + 2);
    out.end_test = m.end_test.clone();
    out
}

/// Small machines used in tests and by the command line.
pub mod examples {
    use super::*;

    fn t(source: StateId, symbol: Symbol, guard: &[Guard], target: StateId, mv: i8, update: &[i8]) -> CmTransition {
        CmTransition {
            source,
            symbol,
            guard: guard.to_vec(),
            target,
            mv,
            update: update.to_vec(),
        }
    }

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    const A: Symbol = Symbol::Letter(Letter(0));
    const B: Symbol = Symbol::Letter(Letter(1));
    use Guard::{Any, Positive as P, Zero as Z};

    /// `a^n b^n` with one counter.
    pub fn equal_ab() -> CounterMachine {
        let ts = vec![
            t(0, Symbol::Left, &[Z], 0, 1, &[0]),
            t(0, A, &[Any], 0, 1, &[1]),
            t(0, B, &[P], 1, 1, &[-1]),
            t(1, B, &[P], 1, 1, &[-1]),
            t(0, Symbol::Right, &[Z], 2, 0, &[0]),
            t(1, Symbol::Right, &[Z], 2, 0, &[0]),
        ];
        CounterMachine::new(1, ab(), vec!["p".into(), "r".into(), "f".into()], 0, vec![2], ts).unwrap()
    }

    /// `a^n b^m` with `m ≤ n`; accepts with a nonzero counter.
    pub fn at_most() -> CounterMachine {
        let ts = vec![
            t(0, Symbol::Left, &[Z], 0, 1, &[0]),
            t(0, A, &[Any], 0, 1, &[1]),
            t(0, B, &[P], 1, 1, &[-1]),
            t(1, B, &[P], 1, 1, &[-1]),
            t(0, Symbol::Right, &[Any], 2, 0, &[0]),
            t(1, Symbol::Right, &[Any], 2, 0, &[0]),
        ];
        CounterMachine::new(1, ab(), vec!["p".into(), "r".into(), "f".into()], 0, vec![2], ts).unwrap()
    }

    /// `a^n b^2n`: each `a` adds two, the second on a stationary step.
    pub fn double() -> CounterMachine {
        let mut ts = vec![
            t(0, Symbol::Left, &[Z], 0, 1, &[0]),
            t(0, A, &[Any], 3, 1, &[1]),
            t(0, B, &[P], 1, 1, &[-1]),
            t(1, B, &[P], 1, 1, &[-1]),
            t(0, Symbol::Right, &[Z], 2, 0, &[0]),
            t(1, Symbol::Right, &[Z], 2, 0, &[0]),
        ];
        for s in [A, B, Symbol::Right] {
            ts.push(t(3, s, &[P], 0, 0, &[1]));
        }
        let names = vec!["p".into(), "r".into(), "f".into(), "p2".into()];
        CounterMachine::new(1, ab(), names, 0, vec![2], ts).unwrap()
    }

    /// Words containing `ab`, without counters.
    pub fn contains_ab() -> CounterMachine {
        let ts = vec![
            t(0, Symbol::Left, &[], 0, 1, &[]),
            t(0, A, &[], 0, 1, &[]),
            t(0, B, &[], 0, 1, &[]),
            t(0, A, &[], 1, 1, &[]),
            t(1, B, &[], 2, 1, &[]),
            t(2, A, &[], 2, 1, &[]),
            t(2, B, &[], 2, 1, &[]),
        ];
        CounterMachine::new(0, ab(), vec!["s".into(), "x".into(), "y".into()], 0, vec![2], ts).unwrap()
    }

    /// `a^n b^m a^n b^m` with two counters; each counter reverses once.
    pub fn two_blocks() -> CounterMachine {
        // p0: a's (c0++), p1: b's (c1++), p2: a's (c0--), p3: b's (c1--)
        let ts = vec![
            t(0, Symbol::Left, &[Z, Z], 0, 1, &[0, 0]),
            t(0, A, &[Any, Z], 0, 1, &[1, 0]),
            t(0, B, &[Any, Any], 1, 1, &[0, 1]),
            t(1, B, &[Any, P], 1, 1, &[0, 1]),
            t(1, A, &[P, P], 2, 1, &[-1, 0]),
            t(2, A, &[P, P], 2, 1, &[-1, 0]),
            t(2, B, &[Z, P], 3, 1, &[0, -1]),
            t(3, B, &[Z, P], 3, 1, &[0, -1]),
            t(3, Symbol::Right, &[Z, Z], 4, 0, &[0, 0]),
            t(0, Symbol::Right, &[Z, Z], 4, 0, &[0, 0]),
        ];
        let names = ["p0", "p1", "p2", "p3", "f"].iter().map(|s| s.to_string()).collect();
        CounterMachine::new(2, ab(), names, 0, vec![4], ts).unwrap()
    }

    pub fn suite() -> Vec<(&'static str, CounterMachine)> {
        vec![
            ("equal_ab", equal_ab()),
            ("at_most", at_most()),
            ("double", double()),
            ("contains_ab", contains_ab()),
            ("two_blocks", two_blocks()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;
    use crate::alphabet::words_up_to;
    use crate::pa::{eliminate_epsilon, member, member_epsilon};

    fn accepts(m: &CounterMachine, w: &[Letter]) -> bool {
        let out = cm_accepts(m, w, &mut Budget::default()).unwrap();
        assert_ne!(out.verdict, Verdict::Unknown);
        out.verdict == Verdict::Accept
    }

    fn reference(name: &str, w: &[Letter]) -> bool {
        let s: String = w.iter().map(|l| if l.0 == 0 { 'a' } else { 'b' }).collect();
        let na = s.chars().take_while(|c| *c == 'a').count();
        let rest = &s[na..];
        let nb = rest.chars().take_while(|c| *c == 'b').count();
        match name {
            "equal_ab" => rest.len() == nb && nb == na,
            "at_most" => rest.len() == nb && nb <= na,
            "double" => rest.len() == nb && nb == 2 * na,
            "contains_ab" => s.contains("ab"),
            "two_blocks" => {
                let blocks: Vec<(char, usize)> = s.chars().fold(Vec::new(), |mut acc: Vec<(char, usize)>, c| {
                    match acc.last_mut() {
                        Some((d, n)) if *d == c => *n += 1,
                        _ => acc.push((c, 1)),
                    }
                    acc
                });
                match blocks.as_slice() {
                    [] => true,
                    [('a', n), ('b', m), ('a', n2), ('b', m2)] => n == n2 && m == m2,
                    [('a', n), ('a', n2)] => n == n2,
                    _ => false,
                }
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn interpreter_matches_reference() {
        for (name, m) in suite() {
            for w in words_up_to(2, 6) {
                assert_eq!(accepts(&m, &w), reference(name, &w), "{name} on {w:?}");
            }
        }
    }

    #[test]
    fn reversal_counts() {
        assert_eq!(sign_alternations([1, 1, 0, 1]), 0);
        assert_eq!(sign_alternations([1, 0, -1, 1]), 2);
        assert_eq!(sign_alternations([1, 1, -1, 0, -1]), 1);
    }

    #[test]
    fn guard_semantics() {
        let m = equal_ab();
        let tape = m.tape(&[Letter(1)]);
        let cfg = Config {
            state: 0,
            head: 1,
            counters: vec![0],
        };
        assert!(cm_step(&m, &tape, &cfg).is_empty());
    }

    #[test]
    fn normal_form_preserves_language() {
        for (name, m) in suite() {
            let n = normalize(&m).unwrap();
            assert!(is_normal_form(&n), "{name}");
            for w in words_up_to(2, 5) {
                assert_eq!(accepts(&n, &w), accepts(&m, &w), "{name} on {w:?}");
            }
        }
    }

    #[test]
    fn epsilon_pipeline() {
        for (name, m) in suite() {
            let e = rbcm_to_epsilon_pa(&normalize(&m).unwrap()).unwrap();
            let a = eliminate_epsilon(&e).unwrap();
            for w in words_up_to(2, 5) {
                let expected = accepts(&m, &w);
                assert_eq!(member_epsilon(&e, &w, None).unwrap(), expected, "{name} ε-PA on {w:?}");
                assert_eq!(member(&a, &w).unwrap(), expected, "{name} eliminated on {w:?}");
            }
        }
    }

    #[test]
    fn scan_adds_two_head_reversals() {
        let m = equal_ab();
        let wrapped = scan_wrapper(&m);
        let w = vec![Letter(0), Letter(1)];
        let out = cm_accepts(&wrapped, &w, &mut Budget::default()).unwrap();
        let run = out.run.unwrap();
        assert_eq!(reversal_monitor(&wrapped, &run).head, 2);
        let plain = cm_accepts(&m, &w, &mut Budget::default()).unwrap().run.unwrap();
        assert_eq!(reversal_monitor(&m, &plain).head, 0);
        for w in words_up_to(2, 5) {
            assert_eq!(accepts(&wrapped, &w), accepts(&m, &w));
        }
    }

    #[test]
    fn rejects_left_move_off_tape() {
        let ts = vec![CmTransition {
            source: 0,
            symbol: Symbol::Left,
            guard: vec![],
            target: 0,
            mv: -1,
            update: vec![],
        }];
        let err = CounterMachine::new(0, Alphabet::new(["a"]).unwrap(), vec!["q".into()], 0, vec![], ts);
        assert!(err.is_err());
    }

    #[test]
    fn simulating_machine_matches_member() {
        for entry in crate::corpus::corpus_all() {
            let a = &entry.automaton;
            let sim = pa_to_rbcm(a).unwrap();
            let max = if a.alphabet().len() > 2 { 4 } else { 6 };
            for w in words_up_to(a.alphabet().len(), max) {
                let expected = member(a, &w).unwrap();
                let out = cm_accepts(&sim.machine, &w, &mut Budget::default()).unwrap();
                assert_eq!(out.verdict == Verdict::Accept, expected, "{} on {w:?}", entry.name);
            }
        }
    }

    #[test]
    fn translated_runs_replay() {
        let entry = crate::corpus::corpus_get("ex1").unwrap();
        let a = &entry.automaton;
        let sim = pa_to_rbcm(a).unwrap();
        let r = entry.resolver.clone().unwrap();
        for w in words_up_to(2, 6) {
            if member(a, &w).unwrap() {
                let run = crate::hd::run_resolver(a, &*r, &w).unwrap();
                let mrun = sim.translate_run(a, &run.transitions).unwrap();
                assert!(cm_replay(&sim.machine, &w, &mrun).unwrap());
            }
        }
    }
}
