//! The automaton model, its run semantics and decision procedures.

mod automaton;
mod emptiness;
mod epsilon;
mod member;
mod run;

pub use automaton::{complete, is_deterministic, PaBuilder, ParikhAutomaton, StateId, Transition};
pub use emptiness::{is_empty, is_empty_with, is_finite, is_finite_with, Emptiness, Finiteness, InfiniteCertificate};
pub use epsilon::{eliminate_epsilon, member_epsilon, EpsTransition, EpsilonPA};
pub use member::{for_each_word, member, members_up_to, ForwardSet};
pub use run::{accepts_run, Run};
