//! Resolvers, the bounded letter game, and the pumping harness.

mod game;
mod pumping;
mod resolver;

pub use game::{
    letter_game, letter_game_with, shortest_adam_win, verify_adam_strategy, AdamStrategy, GameNode, GameOutcome,
};
pub use pumping::{pumping_check, pumping_decompose, pumping_parameters, PumpDecomposition, PumpViolation};
pub use resolver::{
    run_resolver, validate_resolver, MappedResolver, PairResolver, PositionalResolver, PositionalRule, Resolver,
    ResolverSession, ResolverVerdict, RunView, ScriptedResolver, Totalize,
};
