use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{self, VectorN};

/// `offset + N·periods`. Zero periods are dropped and duplicates removed on
/// construction, so every stored period is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearSet {
    offset: VectorN,
    periods: Vec<VectorN>,
}

impl LinearSet {
    pub fn new(offset: VectorN, periods: Vec<VectorN>) -> Result<Self> {
        if offset.is_empty() {
            return Err(Error::invalid("linear set must have dimension at least 1"));
        }
        let d = offset.len();
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        for p in periods {
            Error::check_dim(d, p.len())?;
            if !vector::is_zero(&p) && seen.insert(p.clone()) {
                kept.push(p);
            }
        }
        Ok(LinearSet { offset, periods: kept })
    }

    pub fn singleton(v: VectorN) -> Result<Self> {
        LinearSet::new(v, Vec::new())
    }

    /// All of `N^d`.
    pub fn full(d: usize) -> Result<Self> {
        LinearSet::new(vector::zeros(d), (0..d).map(|i| vector::unit(d, i)).collect())
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn offset(&self) -> &[u64] {
        &self.offset
    }

    pub fn periods(&self) -> &[VectorN] {
        &self.periods
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool> {
        Error::check_dim(self.dim(), v.len())?;
        let mut target = Vec::with_capacity(v.len());
        for (x, o) in v.iter().zip(&self.offset) {
            match x.checked_sub(*o) {
                Some(t) => target.push(t),
                None => return Ok(false),
            }
        }
        let mut failed = HashSet::new();
        Ok(self.solve(0, &mut target, &mut failed))
    }

    // Depth-first over periods. Each coefficient is bounded by the target
    // because periods are nonzero and nonnegative; failures are memoized on
    // (period index, remaining target).
    fn solve(&self, i: usize, target: &mut Vec<u64>, failed: &mut HashSet<(usize, VectorN)>) -> bool {
        if vector::is_zero(target) {
            return true;
        }
        if i == self.periods.len() {
            return false;
        }
        if failed.contains(&(i, target.clone())) {
            return false;
        }
        let p = &self.periods[i];
        let max_c = p
            .iter()
            .zip(target.iter())
            .filter(|(pj, _)| **pj > 0)
            .map(|(pj, tj)| tj / pj)
            .min()
            .unwrap_or(0);
        let original = target.clone();
        for c in 0..=max_c {
            if c > 0 {
                for (t, pj) in target.iter_mut().zip(p) {
                    *t -= pj;
                }
            }
            if self.solve(i + 1, target, failed) {
                return true;
            }
        }
        *target = original;
        failed.insert((i, target.clone()));
        false
    }
}

/// Finite union of linear sets. No parts denotes the empty set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplicitSemilinear {
    dim: usize,
    parts: Vec<LinearSet>,
}

impl ExplicitSemilinear {
    pub fn new(dim: usize, parts: Vec<LinearSet>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("semilinear set must have dimension at least 1"));
        }
        for p in &parts {
            Error::check_dim(dim, p.dim())?;
        }
        Ok(ExplicitSemilinear { dim, parts })
    }

    pub fn empty(dim: usize) -> Result<Self> {
        ExplicitSemilinear::new(dim, Vec::new())
    }

    pub fn full(dim: usize) -> Result<Self> {
        ExplicitSemilinear::new(dim, vec![LinearSet::full(dim)?])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parts(&self) -> &[LinearSet] {
        &self.parts
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool> {
        Error::check_dim(self.dim, v.len())?;
        for part in &self.parts {
            if part.contains(v)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

pub fn member_explicit(s: &ExplicitSemilinear, v: &[u64]) -> Result<bool> {
    s.contains(v)
}

pub fn union_sets(s: &ExplicitSemilinear, t: &ExplicitSemilinear) -> Result<ExplicitSemilinear> {
    Error::check_dim(s.dim, t.dim)?;
    let mut parts = s.parts.clone();
    parts.extend(t.parts.iter().cloned());
    ExplicitSemilinear::new(s.dim, parts)
}

/// `S·T`: offsets concatenated, periods padded with zeros on the other side.
pub fn concat_sets(s: &ExplicitSemilinear, t: &ExplicitSemilinear) -> ExplicitSemilinear {
    let (d, e) = (s.dim, t.dim);
    let mut parts = Vec::new();
    for ls in &s.parts {
        for lt in &t.parts {
            let offset = vector::concat(&ls.offset, &lt.offset);
            let mut periods: Vec<VectorN> = ls
                .periods
                .iter()
                .map(|p| vector::concat(p, &vector::zeros(e)))
                .collect();
            periods.extend(lt.periods.iter().map(|p| vector::concat(&vector::zeros(d), p)));
            parts.push(LinearSet { offset, periods });
        }
    }
    ExplicitSemilinear { dim: d + e, parts }
}
