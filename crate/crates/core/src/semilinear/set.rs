use serde::{Deserialize, Serialize};

use super::closure::EpsilonClosureSet;
use super::constraint::ConstraintSet;
use super::linear::{concat_sets, union_sets, ExplicitSemilinear, LinearSet};
use crate::error::{Error, Result};
use crate::vector;

/// An acceptance set. Explicit and constraint forms are never converted
/// into each other; unions and products of mixed forms are kept as nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum SemilinearSet {
    Explicit(ExplicitSemilinear),
    Constraint(ConstraintSet),
    Union {
        dim: usize,
        parts: Vec<SemilinearSet>,
    },
    /// Concatenation of the parts' coordinates, in order.
    Product {
        parts: Vec<SemilinearSet>,
    },
    Closure(Box<EpsilonClosureSet>),
}

impl From<ExplicitSemilinear> for SemilinearSet {
    fn from(s: ExplicitSemilinear) -> Self {
        SemilinearSet::Explicit(s)
    }
}

impl From<ConstraintSet> for SemilinearSet {
    fn from(s: ConstraintSet) -> Self {
        SemilinearSet::Constraint(s)
    }
}

impl From<EpsilonClosureSet> for SemilinearSet {
    fn from(s: EpsilonClosureSet) -> Self {
        SemilinearSet::Closure(Box::new(s))
    }
}

impl SemilinearSet {
    pub fn dim(&self) -> usize {
        match self {
            SemilinearSet::Explicit(s) => s.dim(),
            SemilinearSet::Constraint(s) => s.dim(),
            SemilinearSet::Union { dim, .. } => *dim,
            SemilinearSet::Product { parts } => parts.iter().map(SemilinearSet::dim).sum(),
            SemilinearSet::Closure(c) => c.dim(),
        }
    }

    pub fn full(dim: usize) -> Result<Self> {
        Ok(ConstraintSet::total(dim)?.into())
    }

    pub fn empty(dim: usize) -> Result<Self> {
        Ok(ConstraintSet::empty(dim)?.into())
    }

    /// `{0}`
    pub fn zero(dim: usize) -> Result<Self> {
        Ok(ExplicitSemilinear::new(dim, vec![LinearSet::singleton(vector::zeros(dim))?])?.into())
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool> {
        Error::check_dim(self.dim(), v.len())?;
        match self {
            SemilinearSet::Explicit(s) => s.contains(v),
            SemilinearSet::Constraint(s) => s.contains(v),
            SemilinearSet::Union { parts, .. } => {
                for p in parts {
                    if p.contains(v)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            SemilinearSet::Product { parts } => {
                let mut at = 0;
                for p in parts {
                    let d = p.dim();
                    if !p.contains(&v[at..at + d])? {
                        return Ok(false);
                    }
                    at += d;
                }
                Ok(true)
            }
            SemilinearSet::Closure(c) => c.contains(v),
        }
    }

    pub fn union(a: SemilinearSet, b: SemilinearSet) -> Result<SemilinearSet> {
        Error::check_dim(a.dim(), b.dim())?;
        let dim = a.dim();
        Ok(match (a, b) {
            (SemilinearSet::Explicit(x), SemilinearSet::Explicit(y)) => union_sets(&x, &y)?.into(),
            (SemilinearSet::Constraint(x), SemilinearSet::Constraint(y)) => x.or(&y)?.into(),
            (a, b) => {
                let mut parts = Vec::new();
                for s in [a, b] {
                    match s {
                        SemilinearSet::Union { parts: inner, .. } => parts.extend(inner),
                        other => parts.push(other),
                    }
                }
                SemilinearSet::Union { dim, parts }
            }
        })
    }

    pub fn union_all(dim: usize, sets: Vec<SemilinearSet>) -> Result<SemilinearSet> {
        let mut acc = SemilinearSet::empty(dim)?;
        let mut first = true;
        for s in sets {
            acc = if first { s } else { SemilinearSet::union(acc, s)? };
            first = false;
        }
        Error::check_dim(dim, acc.dim())?;
        Ok(acc)
    }

    /// `A·B`, the set of concatenations.
    pub fn product(a: SemilinearSet, b: SemilinearSet) -> Result<SemilinearSet> {
        let (da, db) = (a.dim(), b.dim());
        Ok(match (a, b) {
            (SemilinearSet::Explicit(x), SemilinearSet::Explicit(y)) => concat_sets(&x, &y).into(),
            (SemilinearSet::Constraint(x), SemilinearSet::Constraint(y)) => {
                x.embed(0, da + db)?.and(&y.embed(da, da + db)?)?.into()
            }
            (a, b) => {
                let mut parts = Vec::new();
                for s in [a, b] {
                    match s {
                        SemilinearSet::Product { parts: inner } => parts.extend(inner),
                        other => parts.push(other),
                    }
                }
                SemilinearSet::Product { parts }
            }
        })
    }

    pub fn product_all(sets: Vec<SemilinearSet>) -> Result<SemilinearSet> {
        let mut it = sets.into_iter();
        let mut acc = it.next().ok_or_else(|| Error::invalid("product of no sets"))?;
        for s in it {
            acc = SemilinearSet::product(acc, s)?;
        }
        Ok(acc)
    }

    pub fn is_constraint(&self) -> bool {
        matches!(self, SemilinearSet::Constraint(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semilinear::constraint::{Atom, Relation};

    fn diag() -> SemilinearSet {
        ExplicitSemilinear::new(2, vec![LinearSet::new(vec![0, 0], vec![vec![1, 1]]).unwrap()])
            .unwrap()
            .into()
    }

    fn lt() -> SemilinearSet {
        ConstraintSet::conjunction(2, vec![Atom::linear(vec![1, -1], Relation::Lt, 0)])
            .unwrap()
            .into()
    }

    #[test]
    fn mixed_union() {
        let u = SemilinearSet::union(diag(), lt()).unwrap();
        assert!(matches!(u, SemilinearSet::Union { .. }));
        assert!(u.contains(&[2, 2]).unwrap());
        assert!(u.contains(&[1, 2]).unwrap());
        assert!(!u.contains(&[2, 1]).unwrap());
    }

    #[test]
    fn mixed_product() {
        let p = SemilinearSet::product(diag(), lt()).unwrap();
        assert_eq!(p.dim(), 4);
        assert!(p.contains(&[3, 3, 0, 1]).unwrap());
        assert!(!p.contains(&[3, 3, 1, 1]).unwrap());
        let q = SemilinearSet::product(lt(), lt()).unwrap();
        assert!(q.is_constraint());
        assert!(q.contains(&[0, 1, 2, 3]).unwrap());
    }

    #[test]
    fn zero_full_empty() {
        assert!(SemilinearSet::zero(2).unwrap().contains(&[0, 0]).unwrap());
        assert!(!SemilinearSet::zero(2).unwrap().contains(&[0, 1]).unwrap());
        assert!(SemilinearSet::full(2).unwrap().contains(&[7, 1]).unwrap());
        assert!(!SemilinearSet::empty(2).unwrap().contains(&[0, 0]).unwrap());
    }
}
