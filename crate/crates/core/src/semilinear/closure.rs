use serde::{Deserialize, Serialize};

use super::ilp::{ilp_solve_with, IlpOutcome, IntSystem};
use super::lower::{lower, AffineExpr};
use super::set::SemilinearSet;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::vector::{self, VectorN};

/// Acceptance set produced by ε-elimination. Coordinates `0..d` are the
/// image of the reduced run; coordinate `d + j` counts how often cycle `j`
/// was cut out. A vector is a member when some choice of repetition counts
/// `y_j`, positive exactly where the flag is positive, puts
/// `x + Σ y_j·cycles[j]` into `base`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonClosureSet {
    pub base: SemilinearSet,
    pub cycles: Vec<VectorN>,
}

impl EpsilonClosureSet {
    pub fn new(base: SemilinearSet, cycles: Vec<VectorN>) -> Result<Self> {
        for c in &cycles {
            Error::check_dim(base.dim(), c.len())?;
        }
        Ok(EpsilonClosureSet { base, cycles })
    }

    pub fn dim(&self) -> usize {
        self.base.dim() + self.cycles.len()
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn contains(&self, x: &[u64]) -> Result<bool> {
        member_closure(self, x)
    }
}

pub fn member_closure(k: &EpsilonClosureSet, x: &[u64]) -> Result<bool> {
    member_closure_with(k, x, &mut Budget::default())
}

pub fn member_closure_with(k: &EpsilonClosureSet, x: &[u64], budget: &mut Budget) -> Result<bool> {
    Error::check_dim(k.dim(), x.len())?;
    let d = k.base_dim();
    let mut fixed = x[..d].to_vec();
    let mut open = Vec::new();
    for (j, cycle) in k.cycles.iter().enumerate() {
        if x[d + j] == 0 {
            continue;
        }
        if vector::is_zero(cycle) {
            continue;
        }
        // y_j = 1 is the least choice; larger counts are free variables.
        vector::add_assign(&mut fixed, cycle);
        open.push(j);
    }
    if open.is_empty() {
        return k.base.contains(&fixed);
    }
    let sys = IntSystem::new(open.len());
    let exprs: Vec<AffineExpr> = (0..d)
        .map(|i| {
            let terms = open
                .iter()
                .enumerate()
                .filter(|(_, j)| k.cycles[**j][i] > 0)
                .map(|(v, j)| (v, k.cycles[*j][i] as i64))
                .collect();
            AffineExpr {
                terms,
                constant: fixed[i] as i64,
            }
        })
        .collect();
    for system in lower(&k.base, &exprs, sys)? {
        match ilp_solve_with(&system, budget) {
            IlpOutcome::Solution(_) => return Ok(true),
            IlpOutcome::Infeasible => {}
            IlpOutcome::Unknown => {
                return Err(Error::Budget("closure membership search".into()));
            }
        }
    }
    Ok(false)
}
