use std::collections::{HashMap, HashSet};

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::semilinear::SemilinearSet;
use crate::vector::{self, VectorN};

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub source: StateId,
    pub letter: Letter,
    pub vector: VectorN,
    pub target: StateId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParikhAutomaton {
    alphabet: Alphabet,
    dim: usize,
    states: Vec<String>,
    initial: StateId,
    accepting: Vec<bool>,
    transitions: Vec<Transition>,
    acceptance: SemilinearSet,
    // out[state * |Σ| + letter] lists transition indices in insertion order.
    out: Vec<Vec<usize>>,
}

impl ParikhAutomaton {
    /// Validates and builds an automaton. Exact duplicate transitions are
    /// collapsed, keeping the first occurrence.
    pub fn new(
        alphabet: Alphabet,
        states: Vec<String>,
        initial: StateId,
        accepting: Vec<StateId>,
        transitions: Vec<Transition>,
        acceptance: SemilinearSet,
    ) -> Result<Self> {
        let dim = acceptance.dim();
        let n = states.len();
        if n == 0 {
            return Err(Error::invalid("automaton needs at least one state"));
        }
        let mut names = HashSet::new();
        for s in &states {
            if !names.insert(s.as_str()) {
                return Err(Error::invalid(format!("duplicate state name {s:?}")));
            }
        }
        if initial >= n {
            return Err(Error::invalid("initial state out of range"));
        }
        let mut acc = vec![false; n];
        for f in accepting {
            if f >= n {
                return Err(Error::invalid("accepting state out of range"));
            }
            acc[f] = true;
        }
        let mut seen = HashSet::new();
        let mut kept = Vec::with_capacity(transitions.len());
        for t in transitions {
            if t.source >= n || t.target >= n {
                return Err(Error::invalid("transition endpoint out of range"));
            }
            if !alphabet.contains(t.letter) {
                return Err(Error::invalid("transition letter not in alphabet"));
            }
            if t.vector.len() != dim {
                return Err(Error::invalid(format!(
                    "transition {} -{}-> {} has a vector of dimension {}, expected {dim}",
                    states[t.source],
                    alphabet.token(t.letter),
                    states[t.target],
                    t.vector.len()
                )));
            }
            if seen.insert(t.clone()) {
                kept.push(t);
            }
        }
        let mut out = vec![Vec::new(); n * alphabet.len()];
        for (i, t) in kept.iter().enumerate() {
            out[t.source * alphabet.len() + t.letter.0].push(i);
        }
        Ok(ParikhAutomaton {
            alphabet,
            dim,
            states,
            initial,
            accepting: acc,
            transitions: kept,
            acceptance,
            out,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.dim
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

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
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

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, i: usize) -> &Transition {
        &self.transitions[i]
    }

    pub fn acceptance(&self) -> &SemilinearSet {
        &self.acceptance
    }

    /// Transition indices leaving `q` on `a`, in insertion order.
    pub fn successors(&self, q: StateId, a: Letter) -> &[usize] {
        &self.out[q * self.alphabet.len() + a.0]
    }

    pub fn with_acceptance(&self, acceptance: SemilinearSet) -> Result<Self> {
        ParikhAutomaton::new(
            self.alphabet.clone(),
            self.states.clone(),
            self.initial,
            self.accepting_states(),
            self.transitions.clone(),
            acceptance,
        )
    }

    /// Whether the pair `(q, v)` is accepting: `q ∈ F` and `v ∈ C`.
    pub fn accepts_config(&self, q: StateId, v: &[u64]) -> Result<bool> {
        Ok(self.accepting[q] && self.acceptance.contains(v)?)
    }

    /// Simple cycles of the transition graph, each as a transition-index
    /// sequence starting at its smallest index.
    pub fn simple_cycles(&self) -> Vec<Vec<usize>> {
        let edges: Vec<(StateId, StateId)> = self.transitions.iter().map(|t| (t.source, t.target)).collect();
        simple_cycles(self.states.len(), &edges)
    }

    /// States reachable from the initial state.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(q) = stack.pop() {
            for t in &self.transitions {
                if t.source == q && !seen[t.target] {
                    seen[t.target] = true;
                    stack.push(t.target);
                }
            }
        }
        seen
    }
}

/// Enumerates simple cycles of a multigraph given as an edge list. Each
/// cycle is returned once, rotated to start at its smallest edge index.
pub(crate) fn simple_cycles(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, (s, _)) in edges.iter().enumerate() {
        adj[*s].push(i);
    }
    // Cycles whose smallest edge is `first`: search paths from that edge's
    // target back to its source using only larger edges and no repeated
    // states.
    for (first, (s0, t0)) in edges.iter().enumerate() {
        let mut on_path = vec![false; n];
        on_path[*s0] = true;
        let mut path = vec![first];
        if t0 == s0 {
            out.push(path);
            continue;
        }
        on_path[*t0] = true;
        extend(*t0, *s0, first, &adj, edges, &mut on_path, &mut path, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn extend(
    at: usize,
    goal: usize,
    first: usize,
    adj: &[Vec<usize>],
    edges: &[(usize, usize)],
    on_path: &mut [bool],
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    for &e in &adj[at] {
        if e <= first {
            continue;
        }
        let next = edges[e].1;
        if next == goal {
            path.push(e);
            out.push(path.clone());
            path.pop();
        } else if !on_path[next] {
            on_path[next] = true;
            path.push(e);
            extend(next, goal, first, adj, edges, on_path, path, out);
            path.pop();
            on_path[next] = false;
        }
    }
}

/// True iff every `(state, letter)` has at most one `(vector, target)`.
pub fn is_deterministic(a: &ParikhAutomaton) -> bool {
    (0..a.num_states()).all(|q| a.alphabet().letters().all(|l| a.successors(q, l).len() <= 1))
}

/// Adds a nonaccepting sink so that every `(state, letter)` has a
/// transition. Returns the automaton unchanged when already total.
pub fn complete(a: &ParikhAutomaton) -> ParikhAutomaton {
    let missing: Vec<(StateId, Letter)> = (0..a.num_states())
        .flat_map(|q| a.alphabet().letters().map(move |l| (q, l)))
        .filter(|(q, l)| a.successors(*q, *l).is_empty())
        .collect();
    if missing.is_empty() {
        return a.clone();
    }
    let mut states = a.states.clone();
    let mut sink_name = "sink".to_string();
    while states.contains(&sink_name) {
        sink_name.push('\'');
    }
    states.push(sink_name);
    let sink = states.len() - 1;
    let zero = vector::zeros(a.dim());
    let mut transitions = a.transitions.clone();
    for (q, l) in missing {
        transitions.push(Transition {
            source: q,
            letter: l,
            vector: zero.clone(),
            target: sink,
        });
    }
    for l in a.alphabet().letters() {
        transitions.push(Transition {
            source: sink,
            letter: l,
            vector: zero.clone(),
            target: sink,
        });
    }
    ParikhAutomaton::new(
        a.alphabet.clone(),
        states,
        a.initial,
        a.accepting_states(),
        transitions,
        a.acceptance.clone(),
    )
    .expect("completion preserves validity")
}

/// Incremental construction with named states and letter tokens.
#[derive(Debug, Clone)]
pub struct PaBuilder {
    alphabet: Alphabet,
    states: Vec<String>,
    index: HashMap<String, StateId>,
    accepting: Vec<StateId>,
    transitions: Vec<Transition>,
}

impl PaBuilder {
    pub fn new(alphabet: Alphabet) -> Self {
        PaBuilder {
            alphabet,
            states: Vec::new(),
            index: HashMap::new(),
            accepting: Vec::new(),
            transitions: Vec::new(),
        }
    }

    /// Returns the id of the named state, creating it if needed.
    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&q) = self.index.get(name) {
            return q;
        }
        self.states.push(name.to_string());
        self.index.insert(name.to_string(), self.states.len() - 1);
        self.states.len() - 1
    }

    pub fn accept(&mut self, name: &str) -> &mut Self {
        let q = self.state(name);
        if !self.accepting.contains(&q) {
            self.accepting.push(q);
        }
        self
    }

    pub fn edge(&mut self, from: &str, letter: &str, vector: &[u64], to: &str) -> &mut Self {
        let letter = self
            .alphabet
            .lookup(letter)
            .unwrap_or_else(|| panic!("letter {letter:?} not in alphabet"));
        let source = self.state(from);
        let target = self.state(to);
        self.transitions.push(Transition {
            source,
            letter,
            vector: vector.to_vec(),
            target,
        });
        self
    }

    /// The first state created is initial.
    pub fn build(&self, acceptance: SemilinearSet) -> Result<ParikhAutomaton> {
        ParikhAutomaton::new(
            self.alphabet.clone(),
            self.states.clone(),
            0,
            self.accepting.clone(),
            self.transitions.clone(),
            acceptance,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycles_of_a_small_graph() {
        // 0 -> 0, 0 -> 1, 1 -> 0, 1 -> 1
        let edges = [(0, 0), (0, 1), (1, 0), (1, 1)];
        let cycles = simple_cycles(2, &edges);
        assert_eq!(cycles, vec![vec![0], vec![1, 2], vec![3]]);
    }

    #[test]
    fn parallel_edges_give_distinct_cycles() {
        let edges = [(0, 1), (0, 1), (1, 0)];
        assert_eq!(simple_cycles(2, &edges).len(), 2);
    }

    #[test]
    fn rejects_wrong_dimension() {
        let alphabet = Alphabet::new(["a"]).unwrap();
        let mut b = PaBuilder::new(alphabet);
        b.edge("p", "a", &[1, 2], "p");
        let err = b.build(SemilinearSet::full(1).unwrap()).unwrap_err();
        assert!(err.to_string().contains("p -a-> p"));
    }

    #[test]
    fn completion_adds_sink_once() {
        let alphabet = Alphabet::new(["a", "b"]).unwrap();
        let mut b = PaBuilder::new(alphabet);
        b.edge("p", "a", &[0], "p").accept("p");
        let a = b.build(SemilinearSet::full(1).unwrap()).unwrap();
        let c = complete(&a);
        assert_eq!(c.num_states(), 2);
        assert_eq!(complete(&c).num_states(), 2);
        assert!(is_deterministic(&c));
    }
}
