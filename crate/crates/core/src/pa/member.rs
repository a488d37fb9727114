use std::collections::HashSet;

use super::automaton::{ParikhAutomaton, StateId};
use crate::alphabet::{Letter, Word};
use crate::error::Result;
use crate::vector::{self, VectorN};

/// The `(state, image)` pairs reached by all runs on a prefix, without
/// duplicates, in discovery order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForwardSet {
    pairs: Vec<(StateId, VectorN)>,
}

impl ForwardSet {
    pub fn initial(a: &ParikhAutomaton) -> Self {
        ForwardSet {
            pairs: vec![(a.initial(), vector::zeros(a.dim()))],
        }
    }

    pub fn pairs(&self) -> &[(StateId, VectorN)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Successor set after one letter; transitions are tried in insertion
    /// order.
    pub fn advance(&self, a: &ParikhAutomaton, letter: Letter) -> ForwardSet {
        let mut seen = HashSet::new();
        let mut pairs = Vec::new();
        for (q, v) in &self.pairs {
            for &t in a.successors(*q, letter) {
                let tr = a.transition(t);
                let next = (tr.target, vector::add(v, &tr.vector));
                if seen.insert(next.clone()) {
                    pairs.push(next);
                }
            }
        }
        ForwardSet { pairs }
    }

    pub fn accepts(&self, a: &ParikhAutomaton) -> Result<bool> {
        for (q, v) in &self.pairs {
            if a.accepts_config(*q, v)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

pub fn member(a: &ParikhAutomaton, w: &[Letter]) -> Result<bool> {
    a.alphabet().check_word(w)?;
    let mut f = ForwardSet::initial(a);
    for &l in w {
        f = f.advance(a, l);
        if f.is_empty() {
            return Ok(false);
        }
    }
    f.accepts(a)
}

/// Calls `visit(word, accepted)` for every word up to `max_len`, in
/// length-then-lexicographic order. Forward sets are shared between words
/// with a common prefix.
pub fn for_each_word<F>(a: &ParikhAutomaton, max_len: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&[Letter], bool) -> Result<()>,
{
    // Breadth-first by length keeps the output order fixed.
    let mut layer: Vec<(Word, ForwardSet)> = vec![(Vec::new(), ForwardSet::initial(a))];
    for len in 0..=max_len {
        for (w, f) in &layer {
            visit(w, f.accepts(a)?)?;
        }
        if len == max_len {
            break;
        }
        let mut next = Vec::with_capacity(layer.len() * a.alphabet().len());
        for (w, f) in &layer {
            for l in a.alphabet().letters() {
                let mut w2 = w.clone();
                w2.push(l);
                next.push((w2, f.advance(a, l)));
            }
        }
        layer = next;
    }
    Ok(())
}

/// Members up to `max_len`, in enumeration order.
pub fn members_up_to(a: &ParikhAutomaton, max_len: usize) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for_each_word(a, max_len, |w, acc| {
        if acc {
            out.push(w.to_vec());
        }
        Ok(())
    })?;
    Ok(out)
}
