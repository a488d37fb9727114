use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Letter, Word};
use crate::error::{Error, Result};
use crate::pa::{accepts_run, for_each_word, ParikhAutomaton, Run, StateId};
use crate::semilinear::Atom;
use crate::vector::{self, VectorN};

/// A strategy that picks the next transition from the letters read so far.
///
/// A session is started per word and fed one letter at a time; it sees the
/// letter history only. Sessions may keep whatever state they derive from
/// that history (the run built so far, counters, ...).
pub trait Resolver: Send + Sync {
    fn start<'a>(&'a self, a: &'a ParikhAutomaton) -> Box<dyn ResolverSession + 'a>;
}

pub trait ResolverSession {
    /// Transition for the history extended by `letter`, or `None` if the
    /// strategy is undefined there.
    fn next(&mut self, letter: Letter) -> Option<usize>;
}

impl<R: Resolver + ?Sized> Resolver for &R {
    fn start<'a>(&'a self, a: &'a ParikhAutomaton) -> Box<dyn ResolverSession + 'a> {
        (**self).start(a)
    }
}

impl<R: Resolver + ?Sized> Resolver for Arc<R> {
    fn start<'a>(&'a self, a: &'a ParikhAutomaton) -> Box<dyn ResolverSession + 'a> {
        (**self).start(a)
    }
}

/// The run built so far, reconstructed from the session's own choices.
#[derive(Debug, Clone)]
pub struct RunView<'a> {
    pub automaton: &'a ParikhAutomaton,
    pub history: Word,
    pub state: StateId,
    pub image: VectorN,
}

impl<'a> RunView<'a> {
    fn new(a: &'a ParikhAutomaton) -> Self {
        RunView {
            automaton: a,
            history: Vec::new(),
            state: a.initial(),
            image: vector::zeros(a.dim()),
        }
    }

    fn record(&mut self, letter: Letter, t: Option<usize>) {
        self.history.push(letter);
        if let Some(t) = t {
            let tr = self.automaton.transition(t);
            if tr.source == self.state && tr.letter == letter {
                self.state = tr.target;
                vector::add_assign(&mut self.image, &tr.vector);
            }
        }
    }
}

type Rule = dyn Fn(&RunView<'_>, Letter) -> Option<usize> + Send + Sync;

/// A resolver given as a decision procedure over the history.
pub struct ScriptedResolver {
    name: String,
    rule: Box<Rule>,
}

impl ScriptedResolver {
    pub fn new<F>(name: &str, rule: F) -> Self
    where
        F: Fn(&RunView<'_>, Letter) -> Option<usize> + Send + Sync + 'static,
    {
        ScriptedResolver {
            name: name.to_string(),
            rule: Box::new(rule),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl std::fmt::Debug for ScriptedResolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ScriptedResolver({})", self.name)
    }
}

struct ScriptedSession<'a> {
    rule: &'a Rule,
    view: RunView<'a>,
}

impl ResolverSession for ScriptedSession<'_> {
    fn next(&mut self, letter: Letter) -> Option<usize> {
        let t = (self.rule)(&self.view, letter);
        self.view.record(letter, t);
        t
    }
}

impl Resolver for ScriptedResolver {
    fn start<'a>(&'a self, a: &'a ParikhAutomaton) -> Box<dyn ResolverSession + 'a> {
        Box::new(ScriptedSession {
            rule: &*self.rule,
            view: RunView::new(a),
        })
    }
}

/// In `state`, reading `letter`, with the current image satisfying every
/// atom of `guard`, take `transition`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionalRule {
    pub state: StateId,
    pub letter: Letter,
    pub guard: Vec<Atom>,
    pub transition: usize,
}

/// First matching rule wins; otherwise the first transition leaving the
/// current state with the letter. With no rules this is the resolver of a
/// deterministic automaton.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionalResolver {
    pub rules: Vec<PositionalRule>,
}

impl PositionalResolver {
    pub fn new(rules: Vec<PositionalRule>) -> Self {
        PositionalResolver { rules }
    }

    pub fn deterministic() -> Self {
        PositionalResolver::default()
    }

    pub fn choose(&self, a: &ParikhAutomaton, state: StateId, image: &[u64], letter: Letter) -> Option<usize> {
        for r in &self.rules {
            if r.state == state && r.letter == letter && r.guard.iter().all(|g| g.holds(image)) {
                return Some(r.transition);
            }
        }
        a.successors(state, letter).first().copied()
    }

    /// Checks rule indices and that each rule's transition leaves its state
    /// with its letter.
    pub fn check(&self, a: &ParikhAutomaton) -> Result<()> {
        for (i, r) in self.rules.iter().enumerate() {
            let bad = |m: &str| Err(Error::invalid(format!("resolver rule {i}: {m}")));
            if r.transition >= a.transitions().len() {
                return bad("transition index out of range");
            }
            let tr = a.transition(r.transition);
            if tr.source != r.state || tr.letter != r.letter {
                return bad("transition does not match the rule's state and letter");
            }
            if r.guard.iter().any(|g| g.coeffs().len() != a.dim()) {
                return bad("guard dimension differs from the automaton");
            }
        }
        Ok(())
    }
}

struct PositionalSession<'a> {
    table: &'a PositionalResolver,
    view: RunView<'a>,
}

impl ResolverSession for PositionalSession<'_> {
    fn next(&mut self, letter: Letter) -> Option<usize> {
        let v = &self.view;
        let t = self.table.choose(v.automaton, v.state, &v.image, letter);
        self.view.record(letter, t);
        t
    }
}

impl Resolver for PositionalResolver {
    fn start<'a>(&'a self, a: &'a ParikhAutomaton) -> Box<dyn ResolverSession + 'a> {
        Box::new(PositionalSession {
            table: self,
            view: RunView::new(a),
        })
    }
}

/// Follows `inner` while its choices chain; afterwards (or when it has no
/// answer) takes the first available transition. Over a completed
/// automaton this makes any resolver total.
pub struct Totalize<R> {
    pub inner: R,
}

struct TotalSession<'a> {
    inner: Box<dyn ResolverSession + 'a>,
    view: RunView<'a>,
    diverged: bool,
}

impl ResolverSession for TotalSession<'_> {
    fn next(&mut self, letter: Letter) -> Option<usize> {
        let proposed = self.inner.next(letter);
        let a = self.view.automaton;
        let fits = |t: usize| {
            t < a.transitions().len() && a.transition(t).source == self.view.state && a.transition(t).letter == letter
        };
        let t = match proposed {
            Some(t) if !self.diverged && fits(t) => Some(t),
            _ => {
                self.diverged = true;
                a.successors(self.view.state, letter).first().copied()
            }
        };
        self.view.record(letter, t);
        t
    }
}

impl<R: Resolver> Resolver for Totalize<R> {
    fn start<'a>(&'a self, a: &'a ParikhAutomaton) -> Box<dyn ResolverSession + 'a> {
        Box::new(TotalSession {
            inner: self.inner.start(a),
            view: RunView::new(a),
            diverged: false,
        })
    }
}

/// Runs `inner` on `source` and translates each chosen transition into the
/// automaton the session is started on: through `first` on the first
/// letter and `rest` afterwards. Indices missing from a map pass through.
pub struct MappedResolver {
    pub inner: Arc<dyn Resolver>,
    pub source: ParikhAutomaton,
    pub first: HashMap<usize, usize>,
    pub rest: HashMap<usize, usize>,
}

struct MappedSession<'a> {
    inner: Box<dyn ResolverSession + 'a>,
    owner: &'a MappedResolver,
    steps: usize,
}

impl ResolverSession for MappedSession<'_> {
    fn next(&mut self, letter: Letter) -> Option<usize> {
        let t = self.inner.next(letter)?;
        let map = if self.steps == 0 {
            &self.owner.first
        } else {
            &self.owner.rest
        };
        self.steps += 1;
        Some(map.get(&t).copied().unwrap_or(t))
    }
}

impl Resolver for MappedResolver {
    fn start<'a>(&'a self, _a: &'a ParikhAutomaton) -> Box<dyn ResolverSession + 'a> {
        Box::new(MappedSession {
            inner: self.inner.start(&self.source),
            owner: self,
            steps: 0,
        })
    }
}

/// Drives two component resolvers in lockstep and combines their choices
/// through a pair-to-transition table.
pub struct PairResolver {
    pub left: Arc<dyn Resolver>,
    pub right: Arc<dyn Resolver>,
    pub left_automaton: ParikhAutomaton,
    pub right_automaton: ParikhAutomaton,
    pub index: HashMap<(usize, usize), usize>,
}

struct PairSession<'a> {
    left: Box<dyn ResolverSession + 'a>,
    right: Box<dyn ResolverSession + 'a>,
    index: &'a HashMap<(usize, usize), usize>,
}

impl ResolverSession for PairSession<'_> {
    fn next(&mut self, letter: Letter) -> Option<usize> {
        let l = self.left.next(letter);
        let r = self.right.next(letter);
        self.index.get(&(l?, r?)).copied()
    }
}

impl Resolver for PairResolver {
    fn start<'a>(&'a self, _a: &'a ParikhAutomaton) -> Box<dyn ResolverSession + 'a> {
        Box::new(PairSession {
            left: self.left.start(&self.left_automaton),
            right: self.right.start(&self.right_automaton),
            index: &self.index,
        })
    }
}

/// `r*(w)`: the run obtained by feeding `w` letter by letter.
pub fn run_resolver(a: &ParikhAutomaton, r: &dyn Resolver, w: &[Letter]) -> Result<Run> {
    a.alphabet().check_word(w)?;
    let mut session = r.start(a);
    let mut state = a.initial();
    let mut run = Vec::with_capacity(w.len());
    for (i, &l) in w.iter().enumerate() {
        let fault = |reason: String| Error::ResolverFault {
            prefix: w[..=i].to_vec(),
            reason,
        };
        let t = session
            .next(l)
            .ok_or_else(|| fault("no transition chosen".to_string()))?;
        if t >= a.transitions().len() {
            return Err(fault(format!("transition index {t} out of range")));
        }
        let tr = a.transition(t);
        if tr.letter != l {
            return Err(fault(format!(
                "chose a transition for {} while reading {}",
                a.alphabet().token(tr.letter),
                a.alphabet().token(l)
            )));
        }
        if tr.source != state {
            return Err(fault(format!(
                "chose a transition leaving {} while the run is in {}",
                a.state_name(tr.source),
                a.state_name(state)
            )));
        }
        state = tr.target;
        run.push(t);
    }
    Ok(Run::new(run))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResolverVerdict {
    ValidToBound(usize),
    Counterexample(Word),
}

/// Checks `r*(w)` is accepting for every member `w` up to `max_len`,
/// returning the first failing word in length-then-lexicographic order.
pub fn validate_resolver(a: &ParikhAutomaton, r: &dyn Resolver, max_len: usize) -> Result<ResolverVerdict> {
    let mut bad: Option<Word> = None;
    for_each_word(a, max_len, |w, accepted| {
        if accepted && bad.is_none() {
            let run = run_resolver(a, r, w)?;
            if !accepts_run(a, &run)? {
                bad = Some(w.to_vec());
            }
        }
        Ok(())
    })?;
    Ok(match bad {
        Some(w) => ResolverVerdict::Counterexample(w),
        None => ResolverVerdict::ValidToBound(max_len),
    })
}
