use serde::{Deserialize, Serialize};

use super::automaton::{ParikhAutomaton, StateId};
use crate::alphabet::Word;
use crate::error::{Error, Result};
use crate::vector::{self, VectorN};

/// A transition sequence, by index into the automaton's transition list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Run {
    pub transitions: Vec<usize>,
}

impl Run {
    pub fn new(transitions: Vec<usize>) -> Self {
        Run { transitions }
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn word(&self, a: &ParikhAutomaton) -> Word {
        self.transitions.iter().map(|t| a.transition(*t).letter).collect()
    }

    /// Extended Parikh image: the sum of the transition vectors.
    pub fn image(&self, a: &ParikhAutomaton) -> VectorN {
        let mut v = vector::zeros(a.dim());
        for t in &self.transitions {
            vector::add_assign(&mut v, &a.transition(*t).vector);
        }
        v
    }

    pub fn final_state(&self, a: &ParikhAutomaton) -> StateId {
        self.transitions.last().map_or(a.initial(), |t| a.transition(*t).target)
    }

    /// Checks that the run starts at the initial state and is chained.
    pub fn check(&self, a: &ParikhAutomaton) -> Result<()> {
        let mut q = a.initial();
        for (i, &t) in self.transitions.iter().enumerate() {
            if t >= a.transitions().len() {
                return Err(Error::InvalidRun(format!("transition index {t} out of range")));
            }
            let tr = a.transition(t);
            if tr.source != q {
                return Err(Error::InvalidRun(format!(
                    "step {i} leaves {} but the run is in {}",
                    a.state_name(tr.source),
                    a.state_name(q)
                )));
            }
            q = tr.target;
        }
        Ok(())
    }
}

/// The empty run is accepted iff `q_I ∈ F` and `0 ∈ C`; a nonempty run iff
/// it ends in `F` with image in `C`. Both reduce to the same test.
pub fn accepts_run(a: &ParikhAutomaton, run: &Run) -> Result<bool> {
    run.check(a)?;
    a.accepts_config(run.final_state(a), &run.image(a))
}
