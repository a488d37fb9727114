//! Vector-set arithmetic and the integer solver behind the decision
//! procedures.

mod closure;
mod constraint;
pub mod ilp;
mod linear;
pub mod lower;
mod set;

pub use closure::{member_closure, member_closure_with, EpsilonClosureSet};
pub use constraint::{
    bool_constraint, member_constraint, Atom, BoolOp, CongruenceAtom, ConstraintSet, LinearAtom, Relation,
};
pub use ilp::{ilp_solve, ilp_solve_with, small_solution_bound, IlpOutcome, IntSystem};
pub use linear::{concat_sets, member_explicit, union_sets, ExplicitSemilinear, LinearSet};
pub use set::SemilinearSet;
