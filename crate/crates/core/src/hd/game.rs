use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Letter, Word};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::pa::{accepts_run, complete, member, ForwardSet, ParikhAutomaton, Run, StateId};
use crate::vector::{self, VectorN};

/// Adam's winning strategy: stop, or play a letter and answer every
/// transition Eve may take. Transition indices refer to `complete(a)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdamStrategy {
    Stop,
    Play {
        letter: Letter,
        replies: Vec<(usize, AdamStrategy)>,
    },
}

impl AdamStrategy {
    /// Longest word Adam may play.
    pub fn depth(&self) -> usize {
        match self {
            AdamStrategy::Stop => 0,
            AdamStrategy::Play { replies, .. } => 1 + replies.iter().map(|(_, s)| s.depth()).max().unwrap_or(0),
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            AdamStrategy::Stop => 1,
            AdamStrategy::Play { replies, .. } => replies.iter().map(|(_, s)| s.leaves()).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GameOutcome {
    /// Eve survives every play of at most `horizon` letters.
    EveWinsToHorizon(usize),
    AdamWins(AdamStrategy),
    Unknown,
}

/// A position: the frontier of all runs on the word so far, Eve's run
/// state and image, and the remaining horizon.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameNode {
    pub frontier: Vec<(StateId, VectorN)>,
    pub state: StateId,
    pub image: VectorN,
    pub remaining: usize,
}

struct Game<'a> {
    a: &'a ParikhAutomaton,
    // Eve moves in the completed automaton so she always has a move.
    eve: ParikhAutomaton,
    memo: HashMap<GameNode, bool>,
    budget: &'a mut Budget,
}

impl Game<'_> {
    fn node(&self, f: &ForwardSet, state: StateId, image: VectorN, remaining: usize) -> GameNode {
        let mut frontier = f.pairs().to_vec();
        frontier.sort();
        GameNode {
            frontier,
            state,
            image,
            remaining,
        }
    }

    fn adam_stops(&self, f: &ForwardSet, state: StateId, image: &[u64]) -> Result<bool> {
        Ok(f.accepts(self.a)? && !self.eve.accepts_config(state, image)?)
    }

    /// Some(true) when Eve survives from this position.
    fn eve_wins(&mut self, f: &ForwardSet, state: StateId, image: &[u64], remaining: usize) -> Result<Option<bool>> {
        let key = self.node(f, state, image.to_vec(), remaining);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(Some(v));
        }
        if !self.budget.spend(1) {
            return Ok(None);
        }
        let result = self.solve(f, state, image, remaining)?;
        if let Some(v) = result {
            self.memo.insert(key, v);
        }
        Ok(result)
    }

    fn solve(&mut self, f: &ForwardSet, state: StateId, image: &[u64], remaining: usize) -> Result<Option<bool>> {
        if self.adam_stops(f, state, image)? {
            return Ok(Some(false));
        }
        if remaining == 0 {
            return Ok(Some(true));
        }
        for l in self.a.alphabet().letters() {
            let next = f.advance(self.a, l);
            if next.is_empty() {
                // No extension of this word is accepted.
                continue;
            }
            let mut survives = false;
            for t in self.eve.successors(state, l).to_vec() {
                let tr = self.eve.transition(t);
                let (q, v) = (tr.target, vector::add(image, &tr.vector));
                match self.eve_wins(&next, q, &v, remaining - 1)? {
                    None => return Ok(None),
                    Some(true) => {
                        survives = true;
                        break;
                    }
                    Some(false) => {}
                }
            }
            if !survives {
                return Ok(Some(false));
            }
        }
        Ok(Some(true))
    }

    // Called only on positions already known to be lost for Eve.
    fn strategy(&mut self, f: &ForwardSet, state: StateId, image: &[u64], remaining: usize) -> Result<AdamStrategy> {
        if self.adam_stops(f, state, image)? {
            return Ok(AdamStrategy::Stop);
        }
        for l in self.a.alphabet().letters() {
            let next = f.advance(self.a, l);
            if next.is_empty() {
                continue;
            }
            let mut replies = Vec::new();
            let mut all_lost = true;
            for t in self.eve.successors(state, l).to_vec() {
                let tr = self.eve.transition(t);
                let (q, v) = (tr.target, vector::add(image, &tr.vector));
                match self.eve_wins(&next, q, &v, remaining - 1)? {
                    Some(false) => replies.push((t, (q, v))),
                    _ => {
                        all_lost = false;
                        break;
                    }
                }
            }
            if all_lost {
                let mut out = Vec::new();
                for (t, (q, v)) in replies {
                    out.push((t, self.strategy(&next, q, &v, remaining - 1)?));
                }
                return Ok(AdamStrategy::Play {
                    letter: l,
                    replies: out,
                });
            }
        }
        Err(Error::Invariant(
            "lost position without a winning letter for Adam".into(),
        ))
    }
}

pub fn letter_game(a: &ParikhAutomaton, horizon: usize) -> Result<GameOutcome> {
    letter_game_with(a, horizon, &mut Budget::default())
}

/// Exact minimax of the letter game cut off after `horizon` letters.
/// Adam wins if at some point the word read is accepted while Eve's run is
/// not; a win refutes history-determinism outright.
pub fn letter_game_with(a: &ParikhAutomaton, horizon: usize, budget: &mut Budget) -> Result<GameOutcome> {
    let mut game = Game {
        a,
        eve: complete(a),
        memo: HashMap::new(),
        budget,
    };
    let start = ForwardSet::initial(a);
    let zero = vector::zeros(a.dim());
    match game.eve_wins(&start, a.initial(), &zero, horizon)? {
        None => Ok(GameOutcome::Unknown),
        Some(true) => Ok(GameOutcome::EveWinsToHorizon(horizon)),
        Some(false) => Ok(GameOutcome::AdamWins(game.strategy(
            &start,
            a.initial(),
            &zero,
            horizon,
        )?)),
    }
}

/// Smallest horizon up to `max_horizon` at which Adam wins.
pub fn shortest_adam_win(
    a: &ParikhAutomaton,
    max_horizon: usize,
    budget: &mut Budget,
) -> Result<Option<(usize, AdamStrategy)>> {
    for h in 0..=max_horizon {
        match letter_game_with(a, h, budget)? {
            GameOutcome::AdamWins(s) => return Ok(Some((h, s))),
            GameOutcome::Unknown => return Err(Error::Budget(format!("letter game at horizon {h}"))),
            GameOutcome::EveWinsToHorizon(_) => {}
        }
    }
    Ok(None)
}

/// Replays the strategy against every choice Eve can make and checks each
/// leaf independently: the word is a member and Eve's run rejects.
pub fn verify_adam_strategy(a: &ParikhAutomaton, strategy: &AdamStrategy) -> Result<bool> {
    let eve = complete(a);
    let mut word = Vec::new();
    let mut run = Vec::new();
    check_leaf(a, &eve, strategy, &mut word, &mut run)
}

fn check_leaf(
    a: &ParikhAutomaton,
    eve: &ParikhAutomaton,
    s: &AdamStrategy,
    word: &mut Word,
    run: &mut Vec<usize>,
) -> Result<bool> {
    match s {
        AdamStrategy::Stop => {
            let eve_run = Run::new(run.clone());
            Ok(member(a, word)? && !accepts_run(eve, &eve_run)?)
        }
        AdamStrategy::Play { letter, replies } => {
            let state = run.last().map_or(eve.initial(), |t| eve.transition(*t).target);
            let mut options = eve.successors(state, *letter).to_vec();
            let mut answered: Vec<usize> = replies.iter().map(|(t, _)| *t).collect();
            options.sort_unstable();
            answered.sort_unstable();
            if options != answered {
                return Ok(false);
            }
            word.push(*letter);
            for (t, sub) in replies {
                run.push(*t);
                let ok = check_leaf(a, eve, sub, word, run)?;
                run.pop();
                if !ok {
                    word.pop();
                    return Ok(false);
                }
            }
            word.pop();
            Ok(true)
        }
    }
}
