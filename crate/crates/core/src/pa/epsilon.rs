//! Automata with ε-transitions and their elimination.
//!
//! Elimination replaces every path `ε* a ε*` by one letter transition. The
//! ε-parts are kept simple by cutting out each ε-cycle as soon as it
//! closes; the cut is recorded in a flag coordinate, and the acceptance set
//! becomes an [`EpsilonClosureSet`] that adds back any positive number of
//! copies of each flagged cycle.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use super::automaton::{ParikhAutomaton, StateId, Transition};
use super::emptiness::{is_empty, Emptiness};
use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::semilinear::{Atom, ConstraintSet, EpsilonClosureSet, Relation, SemilinearSet};
use crate::vector::{self, VectorN};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpsTransition {
    pub source: StateId,
    /// `None` is ε.
    pub letter: Option<Letter>,
    pub vector: VectorN,
    pub target: StateId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonPA {
    alphabet: Alphabet,
    states: Vec<String>,
    initial: StateId,
    accepting: Vec<bool>,
    transitions: Vec<EpsTransition>,
    acceptance: SemilinearSet,
}

impl EpsilonPA {
    pub fn new(
        alphabet: Alphabet,
        states: Vec<String>,
        initial: StateId,
        accepting: Vec<StateId>,
        transitions: Vec<EpsTransition>,
        acceptance: SemilinearSet,
    ) -> Result<Self> {
        let n = states.len();
        let d = acceptance.dim();
        if n == 0 || initial >= n {
            return Err(Error::invalid("ε-PA needs a valid initial state"));
        }
        let mut acc = vec![false; n];
        for f in accepting {
            if f >= n {
                return Err(Error::invalid("accepting state out of range"));
            }
            acc[f] = true;
        }
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        for t in transitions {
            if t.source >= n || t.target >= n {
                return Err(Error::invalid("transition endpoint out of range"));
            }
            if t.letter.is_some_and(|l| !alphabet.contains(l)) {
                return Err(Error::invalid("transition letter not in alphabet"));
            }
            Error::check_dim(d, t.vector.len())?;
            if seen.insert(t.clone()) {
                kept.push(t);
            }
        }
        Ok(EpsilonPA {
            alphabet,
            states,
            initial,
            accepting: acc,
            transitions: kept,
            acceptance,
        })
    }

    /// The same automaton, seen as an ε-PA without ε-transitions.
    pub fn from_pa(a: &ParikhAutomaton) -> Self {
        EpsilonPA {
            alphabet: a.alphabet().clone(),
            states: a.state_names().to_vec(),
            initial: a.initial(),
            accepting: (0..a.num_states()).map(|q| a.is_accepting(q)).collect(),
            transitions: a
                .transitions()
                .iter()
                .map(|t| EpsTransition {
                    source: t.source,
                    letter: Some(t.letter),
                    vector: t.vector.clone(),
                    target: t.target,
                })
                .collect(),
            acceptance: a.acceptance().clone(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.acceptance.dim()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
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

    pub fn transitions(&self) -> &[EpsTransition] {
        &self.transitions
    }

    pub fn acceptance(&self) -> &SemilinearSet {
        &self.acceptance
    }

    fn eps_out(&self, q: StateId) -> impl Iterator<Item = (usize, &EpsTransition)> {
        self.transitions
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.source == q && t.letter.is_none())
    }

    /// The ε-transitions alone, as a PA over a one-letter alphabet. Its
    /// language is nonempty iff the ε-PA accepts the empty word.
    fn epsilon_part(&self) -> ParikhAutomaton {
        let alphabet = Alphabet::new(["ε"]).expect("valid alphabet");
        let transitions = self
            .transitions
            .iter()
            .filter(|t| t.letter.is_none())
            .map(|t| Transition {
                source: t.source,
                letter: Letter(0),
                vector: t.vector.clone(),
                target: t.target,
            })
            .collect();
        ParikhAutomaton::new(
            alphabet,
            self.states.clone(),
            self.initial,
            self.accepting_states(),
            transitions,
            self.acceptance.clone(),
        )
        .expect("sub-automaton of a valid ε-PA")
    }
}

/// Direct ε-semantics by bounded search; a test oracle for elimination.
/// Each maximal block of ε-steps is cut off after
/// `|Q|·(s·(|w|+1)·d + 1)` steps, where `s` is the largest coordinate sum
/// of an ε-transition vector, unless `eps_bound` overrides it. The default
/// ignores the constants of the acceptance set, so it can miss runs that
/// need to loop longer to reach them; pass a bound when that matters.
pub fn member_epsilon(e: &EpsilonPA, w: &[Letter], eps_bound: Option<usize>) -> Result<bool> {
    e.alphabet.check_word(w)?;
    let s = e
        .transitions
        .iter()
        .filter(|t| t.letter.is_none())
        .map(|t| t.vector.iter().sum::<u64>() as usize)
        .max()
        .unwrap_or(0)
        .max(1);
    let bound = eps_bound.unwrap_or(e.num_states() * (s * (w.len() + 1) * e.dim() + 1));
    let closure = |start: Vec<(StateId, VectorN)>| -> Vec<(StateId, VectorN)> {
        let mut seen: HashSet<(StateId, VectorN)> = start.iter().cloned().collect();
        let mut out = start.clone();
        let mut frontier = start;
        for _ in 0..bound {
            let mut next = Vec::new();
            for (q, v) in &frontier {
                for (_, t) in e.eps_out(*q) {
                    let c = (t.target, vector::add(v, &t.vector));
                    if seen.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    };
    let mut cur = closure(vec![(e.initial, vector::zeros(e.dim()))]);
    for &a in w {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for (q, v) in &cur {
            for t in &e.transitions {
                if t.source == *q && t.letter == Some(a) {
                    let c = (t.target, vector::add(v, &t.vector));
                    if seen.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
        }
        cur = closure(next);
    }
    for (q, v) in &cur {
        if e.accepting[*q] && e.acceptance.contains(v)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// A reduced ε-path: simple sequence of ε-transitions plus the set of
/// cycles cut out of it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Reduced {
    path: Vec<usize>,
    flags: BTreeSet<usize>,
}

struct CycleTable {
    ids: HashMap<Vec<usize>, usize>,
    images: Vec<VectorN>,
}

impl CycleTable {
    fn id(&mut self, e: &EpsilonPA, cycle: Vec<usize>) -> usize {
        let min = (0..cycle.len()).min_by_key(|i| cycle[*i]).unwrap_or(0);
        let mut canon = cycle[min..].to_vec();
        canon.extend_from_slice(&cycle[..min]);
        if let Some(&id) = self.ids.get(&canon) {
            return id;
        }
        let mut img = vector::zeros(e.dim());
        for t in &canon {
            vector::add_assign(&mut img, &e.transitions[*t].vector);
        }
        self.images.push(img);
        self.ids.insert(canon, self.images.len() - 1);
        self.images.len() - 1
    }
}

/// All reduced ε-paths from `q`, with their end states.
fn reduced_paths(e: &EpsilonPA, q: StateId, cycles: &mut CycleTable) -> Vec<(StateId, Reduced)> {
    let start = Reduced {
        path: Vec::new(),
        flags: BTreeSet::new(),
    };
    let mut seen: HashSet<Reduced> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut out = Vec::new();
    while let Some(r) = queue.pop_front() {
        let visited: Vec<StateId> = std::iter::once(q)
            .chain(r.path.iter().map(|t| e.transitions[*t].target))
            .collect();
        let end = *visited.last().expect("nonempty");
        out.push((end, r.clone()));
        for (ti, t) in e.eps_out(end) {
            let next = match visited.iter().position(|s| *s == t.target) {
                Some(i) => {
                    let mut cycle = r.path[i..].to_vec();
                    cycle.push(ti);
                    let id = cycles.id(e, cycle);
                    let mut flags = r.flags.clone();
                    flags.insert(id);
                    Reduced {
                        path: r.path[..i].to_vec(),
                        flags,
                    }
                }
                None => {
                    let mut path = r.path.clone();
                    path.push(ti);
                    Reduced {
                        path,
                        flags: r.flags.clone(),
                    }
                }
            };
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    out
}

pub fn eliminate_epsilon(e: &EpsilonPA) -> Result<ParikhAutomaton> {
    let d = e.dim();
    let mut cycles = CycleTable {
        ids: HashMap::new(),
        images: Vec::new(),
    };
    let reduced: Vec<Vec<(StateId, Reduced)>> = (0..e.num_states()).map(|q| reduced_paths(e, q, &mut cycles)).collect();
    let m = cycles.images.len();
    let image = |r: &Reduced| -> VectorN {
        let mut v = vector::zeros(d);
        for t in &r.path {
            vector::add_assign(&mut v, &e.transitions[*t].vector);
        }
        v
    };

    let mut transitions = Vec::new();
    for q in 0..e.num_states() {
        for (p, r0) in &reduced[q] {
            for t in e.transitions.iter().filter(|t| t.source == *p) {
                let Some(a) = t.letter else { continue };
                for (q2, r1) in &reduced[t.target] {
                    let mut v = image(r0);
                    vector::add_assign(&mut v, &t.vector);
                    vector::add_assign(&mut v, &image(r1));
                    let mut flags = vector::zeros(m);
                    for id in r0.flags.iter().chain(&r1.flags) {
                        flags[*id] = 1;
                    }
                    transitions.push(Transition {
                        source: q,
                        letter: a,
                        vector: vector::concat(&v, &flags),
                        target: *q2,
                    });
                }
            }
        }
    }
    let closure: SemilinearSet = EpsilonClosureSet::new(e.acceptance.clone(), cycles.images)?.into();
    let empty_ok = e.accepting[e.initial] && e.acceptance.contains(&vector::zeros(d))?;
    let epsilon_accepted = match is_empty(&e.epsilon_part())? {
        Emptiness::Empty => false,
        Emptiness::Witness(_) => true,
        Emptiness::Unknown => return Err(Error::Budget("deciding whether ε is accepted".into())),
    };
    if !epsilon_accepted || empty_ok {
        return ParikhAutomaton::new(
            e.alphabet.clone(),
            e.states.clone(),
            e.initial,
            e.accepting_states(),
            transitions,
            closure,
        );
    }

    // ε is accepted only through ε-transitions, which no longer exist. A
    // fresh accepting initial state takes over; a marker coordinate counts
    // the steps leaving it so that only the empty run may end with image 0.
    let mut states = e.states.clone();
    let mut name = "init".to_string();
    while states.contains(&name) {
        name.push('\'');
    }
    states.push(name);
    let fresh = states.len() - 1;
    let mut marked: Vec<Transition> = transitions
        .iter()
        .map(|t| Transition {
            vector: vector::concat(&t.vector, &[0]),
            ..t.clone()
        })
        .collect();
    for t in &transitions {
        if t.source == e.initial {
            marked.push(Transition {
                source: fresh,
                letter: t.letter,
                vector: vector::concat(&t.vector, &[1]),
                target: t.target,
            });
        }
    }
    let total = d + m + 1;
    let started = ConstraintSet::conjunction(1, vec![Atom::linear(vec![1], Relation::Ge, 1)])?;
    let acceptance = SemilinearSet::union(
        SemilinearSet::product(closure, started.into())?,
        SemilinearSet::zero(total)?,
    )?;
    let mut accepting = e.accepting_states();
    accepting.push(fresh);
    ParikhAutomaton::new(e.alphabet.clone(), states, fresh, accepting, marked, acceptance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::words_up_to;
    use crate::pa::member::member;

    fn eps(source: StateId, v: &[u64], target: StateId) -> EpsTransition {
        EpsTransition {
            source,
            letter: None,
            vector: v.to_vec(),
            target,
        }
    }

    fn sym(source: StateId, a: usize, v: &[u64], target: StateId) -> EpsTransition {
        EpsTransition {
            source,
            letter: Some(Letter(a)),
            vector: v.to_vec(),
            target,
        }
    }

    fn ge(k: i64) -> SemilinearSet {
        ConstraintSet::conjunction(1, vec![Atom::linear(vec![1], Relation::Ge, k)])
            .unwrap()
            .into()
    }

    fn agree(e: &EpsilonPA, max_len: usize) {
        let a = eliminate_epsilon(e).unwrap();
        for w in words_up_to(e.alphabet().len(), max_len) {
            assert_eq!(
                member(&a, &w).unwrap(),
                member_epsilon(e, &w, None).unwrap(),
                "word {}",
                e.alphabet().render(&w)
            );
        }
    }

    #[test]
    fn loop_before_letter() {
        let e = EpsilonPA::new(
            Alphabet::new(["a"]).unwrap(),
            vec!["p".into(), "q".into()],
            0,
            vec![1],
            vec![eps(0, &[1], 0), sym(0, 0, &[0], 1)],
            ge(2),
        )
        .unwrap();
        let a = eliminate_epsilon(&e).unwrap();
        assert!(member(&a, &[Letter(0)]).unwrap());
        agree(&e, 6);
    }

    #[test]
    fn epsilon_only_acceptance() {
        let e = EpsilonPA::new(
            Alphabet::new(["a"]).unwrap(),
            vec!["p".into(), "q".into()],
            0,
            vec![1],
            vec![eps(0, &[1], 1), sym(1, 0, &[0], 1)],
            ge(1),
        )
        .unwrap();
        let a = eliminate_epsilon(&e).unwrap();
        assert!(member(&a, &[]).unwrap());
        agree(&e, 6);
    }

    #[test]
    fn no_epsilon_is_identity() {
        let e = EpsilonPA::new(
            Alphabet::new(["a", "b"]).unwrap(),
            vec!["p".into()],
            0,
            vec![0],
            vec![sym(0, 0, &[1], 0), sym(0, 1, &[0], 0)],
            ge(1),
        )
        .unwrap();
        let a = eliminate_epsilon(&e).unwrap();
        assert_eq!(a.transitions().len(), 2);
        assert_eq!(a.dim(), 1);
        agree(&e, 6);
    }
}
