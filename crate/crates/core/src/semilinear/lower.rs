//! Translation of acceptance sets into integer systems.
//!
//! Each coordinate of the set is given as an affine expression over the
//! system's variables; the result is a disjunction of systems, each
//! extending the input system with fresh variables and rows.

use super::constraint::Atom;
use super::ilp::IntSystem;
use super::set::SemilinearSet;
use crate::error::{Error, Result};

/// Disjunctions beyond this size indicate a set the solver cannot handle at
/// desk scale.
const MAX_DISJUNCTS: usize = 1 << 14;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AffineExpr {
    pub terms: Vec<(usize, i64)>,
    pub constant: i64,
}

impl AffineExpr {
    pub fn var(v: usize) -> Self {
        AffineExpr {
            terms: vec![(v, 1)],
            constant: 0,
        }
    }

    pub fn constant(c: i64) -> Self {
        AffineExpr {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn add_scaled(&mut self, other: &AffineExpr, k: i64) {
        self.terms.extend(other.terms.iter().map(|(v, c)| (*v, c * k)));
        self.constant += other.constant * k;
    }
}

fn combine(coeffs: &[i64], exprs: &[AffineExpr]) -> AffineExpr {
    let mut out = AffineExpr::default();
    for (c, e) in coeffs.iter().zip(exprs) {
        if *c != 0 {
            out.add_scaled(e, *c);
        }
    }
    out
}

pub fn lower(set: &SemilinearSet, exprs: &[AffineExpr], sys: IntSystem) -> Result<Vec<IntSystem>> {
    Error::check_dim(set.dim(), exprs.len())?;
    let out = match set {
        SemilinearSet::Explicit(s) => s
            .parts()
            .iter()
            .map(|part| {
                let mut sys = sys.clone();
                let coef: Vec<usize> = part.periods().iter().map(|_| sys.fresh_var()).collect();
                for (k, e) in exprs.iter().enumerate() {
                    let mut terms = e.terms.clone();
                    for (p, c) in part.periods().iter().zip(&coef) {
                        if p[k] != 0 {
                            terms.push((*c, -(p[k] as i64)));
                        }
                    }
                    sys.add_row(terms, super::Relation::Eq, part.offset()[k] as i64 - e.constant);
                }
                sys
            })
            .collect(),
        SemilinearSet::Constraint(k) => k
            .clauses()
            .iter()
            .map(|clause| {
                let mut sys = sys.clone();
                for atom in clause {
                    let e = combine(atom.coeffs(), exprs);
                    match atom {
                        Atom::Linear(a) => sys.add_row(e.terms, a.rel, a.rhs - e.constant),
                        Atom::Congruence(a) => {
                            let m = a.modulus as i64;
                            let r = (a.residue as i64 - e.constant).rem_euclid(m);
                            sys.add_congruence(e.terms, a.modulus, r as u64);
                        }
                    }
                }
                sys
            })
            .collect(),
        SemilinearSet::Union { parts, .. } => {
            let mut out = Vec::new();
            for p in parts {
                out.extend(lower(p, exprs, sys.clone())?);
            }
            out
        }
        SemilinearSet::Product { parts } => {
            let mut systems = vec![sys];
            let mut at = 0;
            for p in parts {
                let d = p.dim();
                let mut next = Vec::new();
                for s in systems {
                    next.extend(lower(p, &exprs[at..at + d], s)?);
                }
                check_size(next.len())?;
                systems = next;
                at += d;
            }
            systems
        }
        SemilinearSet::Closure(k) => {
            let d = k.base_dim();
            let mut branches = vec![(sys, exprs[..d].to_vec())];
            for (j, cycle) in k.cycles.iter().enumerate() {
                let flag = &exprs[d + j];
                let mut next = Vec::with_capacity(branches.len() * 2);
                for (s, base) in branches {
                    let mut off = s.clone();
                    off.add_row(flag.terms.clone(), super::Relation::Eq, -flag.constant);
                    next.push((off, base.clone()));

                    let mut on = s;
                    on.add_row(flag.terms.clone(), super::Relation::Ge, 1 - flag.constant);
                    let y = on.fresh_var();
                    on.add_row([(y, 1)], super::Relation::Ge, 1);
                    let mut base = base;
                    for (i, c) in cycle.iter().enumerate() {
                        if *c != 0 {
                            base[i].terms.push((y, *c as i64));
                        }
                    }
                    next.push((on, base));
                }
                check_size(next.len())?;
                branches = next;
            }
            let mut out = Vec::new();
            for (s, base) in branches {
                out.extend(lower(&k.base, &base, s)?);
            }
            out
        }
    };
    check_size(out.len())?;
    Ok(out)
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_DISJUNCTS {
        Err(Error::Budget(format!(
            "acceptance set expands to more than {MAX_DISJUNCTS} systems"
        )))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semilinear::ilp::{ilp_solve, IlpOutcome};
    use crate::semilinear::{ConstraintSet, ExplicitSemilinear, LinearSet, Relation};

    #[test]
    fn explicit_lowering_finds_coefficients() {
        let s: SemilinearSet = ExplicitSemilinear::new(2, vec![LinearSet::new(vec![1, 0], vec![vec![1, 2]]).unwrap()])
            .unwrap()
            .into();
        let sys = IntSystem::new(2);
        let exprs = vec![AffineExpr::var(0), AffineExpr::var(1)];
        let systems = lower(&s, &exprs, sys).unwrap();
        assert_eq!(systems.len(), 1);
        let mut fixed = systems[0].clone();
        fixed.add_row([(0, 1)], Relation::Eq, 4);
        match ilp_solve(&fixed) {
            IlpOutcome::Solution(x) => assert_eq!(&x[..2], &[4, 6]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constraint_constants_shift_rhs() {
        let s: SemilinearSet =
            ConstraintSet::conjunction(1, vec![crate::semilinear::Atom::linear(vec![2], Relation::Eq, 11)])
                .unwrap()
                .into();
        let mut e = AffineExpr::var(0);
        e.constant = 3;
        let systems = lower(&s, &[e], IntSystem::new(1)).unwrap();
        assert_eq!(ilp_solve(&systems[0]), IlpOutcome::Infeasible);
    }
}
