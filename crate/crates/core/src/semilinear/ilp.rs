//! Nonnegative integer feasibility.
//!
//! Exact rational simplex for the relaxations, depth-first branch and bound
//! on fractional variables, and an integer-lattice test on the equality rows
//! at every node. Branches that would force some variable above the
//! small-solution bound
//!
//! ```text
//! B = (n+1) · ((m+1) · (1 + a))^(2m+1)
//! ```
//!
//! are pruned, where `n` counts variables after congruences are lowered,
//! `m` counts rows, and `a` is the largest absolute coefficient or
//! right-hand side. A feasible system always has a solution with every
//! entry at most `B`, so pruning keeps the search complete; what it buys is
//! termination.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::constraint::Relation;
use crate::budget::Budget;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRow {
    pub terms: Vec<(usize, i64)>,
    pub rel: Relation,
    pub rhs: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntCongruence {
    pub terms: Vec<(usize, i64)>,
    pub modulus: u64,
    pub residue: u64,
}

/// Conjunction of linear rows and congruences over `num_vars` nonnegative
/// integer variables. `positive_sum`, when set, additionally requires the
/// listed variables to sum to at least one.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntSystem {
    pub num_vars: usize,
    pub rows: Vec<IntRow>,
    pub congruences: Vec<IntCongruence>,
    pub positive_sum: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IlpOutcome {
    Solution(Vec<u64>),
    Infeasible,
    Unknown,
}

impl IlpOutcome {
    pub fn is_solution(&self) -> bool {
        matches!(self, IlpOutcome::Solution(_))
    }
}

fn merge_terms(terms: impl IntoIterator<Item = (usize, i64)>) -> Vec<(usize, i64)> {
    let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
    for (v, c) in terms {
        *acc.entry(v).or_insert(0) += c;
    }
    acc.into_iter().filter(|(_, c)| *c != 0).collect()
}

fn eval(terms: &[(usize, i64)], x: &[u64]) -> i128 {
    terms.iter().map(|(v, c)| *c as i128 * x[*v] as i128).sum()
}

impl IntSystem {
    pub fn new(num_vars: usize) -> Self {
        IntSystem {
            num_vars,
            ..Default::default()
        }
    }

    pub fn fresh_var(&mut self) -> usize {
        self.num_vars += 1;
        self.num_vars - 1
    }

    pub fn add_row(&mut self, terms: impl IntoIterator<Item = (usize, i64)>, rel: Relation, rhs: i64) {
        let terms = merge_terms(terms);
        debug_assert!(terms.iter().all(|(v, _)| *v < self.num_vars));
        self.rows.push(IntRow { terms, rel, rhs });
    }

    pub fn add_congruence(&mut self, terms: impl IntoIterator<Item = (usize, i64)>, modulus: u64, residue: u64) {
        let terms = merge_terms(terms);
        self.congruences.push(IntCongruence {
            terms,
            modulus,
            residue: residue % modulus,
        });
    }

    pub fn require_positive_sum(&mut self, vars: Vec<usize>) {
        self.positive_sum = Some(vars);
    }

    pub fn check(&self, x: &[u64]) -> bool {
        if x.len() != self.num_vars {
            return false;
        }
        let rows_ok = self.rows.iter().all(|r| r.rel.holds(eval(&r.terms, x), r.rhs as i128));
        let congr_ok = self
            .congruences
            .iter()
            .all(|c| eval(&c.terms, x).rem_euclid(c.modulus as i128) == c.residue as i128);
        let pos_ok = match &self.positive_sum {
            Some(vars) => vars.iter().any(|v| x[*v] > 0),
            None => true,
        };
        rows_ok && congr_ok && pos_ok
    }

    /// Replaces every congruence by an equality with one fresh quotient
    /// variable. Coefficients are first reduced mod m, so the left side is
    /// nonnegative and the quotient is too. A signed quotient would leave
    /// the relaxation an unbounded direction to wander along.
    pub fn lower_congruences(&self) -> IntSystem {
        let mut out = self.clone();
        out.congruences.clear();
        for c in &self.congruences {
            let m = c.modulus as i64;
            let mut terms: Vec<(usize, i64)> = c
                .terms
                .iter()
                .map(|&(v, k)| (v, k.rem_euclid(m)))
                .filter(|&(_, k)| k != 0)
                .collect();
            let q = out.fresh_var();
            terms.push((q, -m));
            out.add_row(terms, Relation::Eq, c.residue as i64);
        }
        if let Some(vars) = out.positive_sum.take() {
            out.add_row(vars.into_iter().map(|v| (v, 1)), Relation::Ge, 1);
        }
        out
    }

    /// Splits every `≠` row into `<` and `>` alternatives.
    pub fn split_ne(&self) -> Vec<IntSystem> {
        let mut out = vec![self.clone()];
        for (i, row) in self.rows.iter().enumerate() {
            if row.rel != Relation::Ne {
                continue;
            }
            out = out
                .into_iter()
                .flat_map(|s| {
                    [Relation::Lt, Relation::Gt].map(|rel| {
                        let mut t = s.clone();
                        t.rows[i].rel = rel;
                        t
                    })
                })
                .collect();
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Rel3 {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub(crate) struct DenseRow {
    pub coeffs: Vec<i128>,
    pub rel: Rel3,
    pub rhs: i128,
}

/// A congruence-free, `≠`-free system in dense form.
#[derive(Debug, Clone)]
pub(crate) struct Dense {
    pub n: usize,
    pub rows: Vec<DenseRow>,
}

impl Dense {
    /// Expects a system with no congruences, no positive-sum flag and no
    /// `≠` rows.
    pub fn from_system(sys: &IntSystem) -> Dense {
        debug_assert!(sys.congruences.is_empty() && sys.positive_sum.is_none());
        let rows = sys
            .rows
            .iter()
            .map(|r| {
                let mut coeffs = vec![0i128; sys.num_vars];
                for (v, c) in &r.terms {
                    coeffs[*v] += *c as i128;
                }
                let (rel, rhs) = match r.rel {
                    Relation::Lt => (Rel3::Le, r.rhs as i128 - 1),
                    Relation::Le => (Rel3::Le, r.rhs as i128),
                    Relation::Eq => (Rel3::Eq, r.rhs as i128),
                    Relation::Ge => (Rel3::Ge, r.rhs as i128),
                    Relation::Gt => (Rel3::Ge, r.rhs as i128 + 1),
                    Relation::Ne => unreachable!("split before densifying"),
                };
                DenseRow { coeffs, rel, rhs }
            })
            .collect();
        Dense { n: sys.num_vars, rows }
    }
}

/// The small-solution bound from the module documentation, as a big
/// integer.
pub fn small_solution_bound(sys: &IntSystem) -> BigInt {
    let lowered = sys.lower_congruences();
    let n = lowered.num_vars as u64;
    let m = lowered.rows.len() as u64;
    let a = lowered
        .rows
        .iter()
        .flat_map(|r| {
            r.terms
                .iter()
                .map(|(_, c)| c.unsigned_abs())
                .chain([r.rhs.unsigned_abs()])
        })
        .max()
        .unwrap_or(0);
    bound_from(n, m, a as u128)
}

fn bound_from(n: u64, m: u64, a: u128) -> BigInt {
    let base = BigInt::from(m + 1) * BigInt::from(1 + a);
    BigInt::from(n + 1) * Pow::pow(base, (2 * m + 1) as u32)
}

fn dense_bound(d: &Dense) -> i128 {
    let a = d
        .rows
        .iter()
        .flat_map(|r| r.coeffs.iter().chain([&r.rhs]).map(|c| c.unsigned_abs()))
        .max()
        .unwrap_or(0);
    let b = bound_from(d.n as u64, d.rows.len() as u64, a);
    // Values beyond i128 range are far outside anything the search could
    // reach within a budget, so clamping only matters for termination.
    b.to_i128().unwrap_or(i128::MAX / 4).min(i128::MAX / 4)
}

pub fn ilp_solve(sys: &IntSystem) -> IlpOutcome {
    ilp_solve_with(sys, &mut Budget::default())
}

pub fn ilp_solve_with(sys: &IntSystem, budget: &mut Budget) -> IlpOutcome {
    let lowered = sys.lower_congruences();
    let mut unknown = false;
    for variant in lowered.split_ne() {
        let dense = Dense::from_system(&variant);
        match branch_and_bound(&dense, budget) {
            IlpOutcome::Solution(x) => {
                let x: Vec<u64> = x[..sys.num_vars].to_vec();
                debug_assert!(sys.check(&x), "solver returned a non-solution");
                return IlpOutcome::Solution(x);
            }
            IlpOutcome::Unknown => {
                unknown = true;
                if budget.exhausted() {
                    return IlpOutcome::Unknown;
                }
            }
            IlpOutcome::Infeasible => {}
        }
    }
    if unknown {
        IlpOutcome::Unknown
    } else {
        IlpOutcome::Infeasible
    }
}

/// Rational feasibility of a system's relaxation: congruences are lowered
/// and `≠` rows must already be gone.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Feasible(Vec<BigRational>),
    Infeasible,
    Unknown,
}

pub fn lp_feasible(sys: &IntSystem, budget: &mut Budget) -> LpOutcome {
    let lowered = sys.lower_congruences();
    if lowered.rows.iter().any(|r| r.rel == Relation::Ne) {
        return LpOutcome::Unknown;
    }
    let dense = Dense::from_system(&lowered);
    match solve_lp_any(&dense.rows, dense.n, false, budget) {
        Err(()) => LpOutcome::Unknown,
        Ok(None) => LpOutcome::Infeasible,
        Ok(Some(x)) => LpOutcome::Feasible(x[..sys.num_vars].to_vec()),
    }
}

#[derive(Debug, Clone)]
struct Node {
    lo: Vec<i128>,
    hi: Vec<Option<i128>>,
}

/// Best-first on the relaxation's objective `Σx`. Once some solution with
/// sum `s` exists, only boxes inside `[0, s]^n` are ever expanded, so the
/// search terminates on feasible systems; on infeasible ones the bound `B`
/// does.
fn branch_and_bound(d: &Dense, budget: &mut Budget) -> IlpOutcome {
    let bound = dense_bound(d);
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let root = Node {
        lo: vec![0; d.n],
        hi: vec![None; d.n],
    };
    match relax(d, &root, budget) {
        Err(()) => return IlpOutcome::Unknown,
        Ok(None) => return IlpOutcome::Infeasible,
        Ok(Some((obj, x))) => heap.push(Reverse(Entry {
            obj,
            seq,
            node: root,
            x,
        })),
    }
    while let Some(Reverse(entry)) = heap.pop() {
        if !budget.spend(1) {
            return IlpOutcome::Unknown;
        }
        let Entry { node, x, .. } = entry;
        let Some(j) = x.iter().position(|v| !v.is_integer()) else {
            let sol: Option<Vec<u64>> = x.iter().map(|v| v.to_integer().to_u64()).collect();
            return match sol {
                Some(sol) => IlpOutcome::Solution(sol),
                None => IlpOutcome::Unknown,
            };
        };
        let Some(fl) = x[j].floor().to_integer().to_i128() else {
            return IlpOutcome::Unknown;
        };
        let mut children = Vec::with_capacity(2);
        let mut down = node.clone();
        down.hi[j] = Some(fl);
        children.push(down);
        if fl < bound {
            let mut up = node;
            up.lo[j] = fl + 1;
            children.push(up);
        }
        for child in children {
            match relax(d, &child, budget) {
                Err(()) => return IlpOutcome::Unknown,
                Ok(None) => {}
                Ok(Some((obj, x))) => {
                    seq += 1;
                    heap.push(Reverse(Entry {
                        obj,
                        seq,
                        node: child,
                        x,
                    }));
                }
            }
        }
    }
    IlpOutcome::Infeasible
}

struct Entry {
    obj: BigRational,
    seq: u64,
    node: Node,
    x: Vec<BigRational>,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.obj.cmp(&other.obj).then(self.seq.cmp(&other.seq))
    }
}

/// Solves the relaxation at a node; returns the objective and the point in
/// original coordinates.
fn relax(d: &Dense, node: &Node, budget: &mut Budget) -> Result<Option<(BigRational, Vec<BigRational>)>, ()> {
    let free: Vec<usize> = (0..d.n).filter(|j| node.hi[*j] != Some(node.lo[*j])).collect();
    let Some(rows) = node_rows(d, node, &free) else {
        return Ok(None);
    };
    if !lattice_feasible(&rows, free.len()) {
        return Ok(None);
    }
    let Some(y) = solve_lp_any(&rows, free.len(), true, budget)? else {
        return Ok(None);
    };
    let mut x: Vec<BigRational> = node
        .lo
        .iter()
        .map(|v| BigRational::from_integer(BigInt::from(*v)))
        .collect();
    for (k, j) in free.iter().enumerate() {
        x[*j] += &y[k];
    }
    let obj = x.iter().fold(BigRational::zero(), |acc, v| acc + v);
    Ok(Some((obj, x)))
}

/// Rows of the relaxation at a node, over the free variables shifted by
/// their lower bounds. `None` when a row without free variables fails.
fn node_rows(d: &Dense, node: &Node, free: &[usize]) -> Option<Vec<DenseRow>> {
    let mut rows = Vec::with_capacity(d.rows.len() + free.len());
    for r in &d.rows {
        let shift: i128 = r.coeffs.iter().zip(&node.lo).map(|(a, l)| a * l).sum();
        let rhs = r.rhs - shift;
        let coeffs: Vec<i128> = free.iter().map(|j| r.coeffs[*j]).collect();
        if coeffs.iter().all(|c| *c == 0) {
            let ok = match r.rel {
                Rel3::Le => 0 <= rhs,
                Rel3::Eq => 0 == rhs,
                Rel3::Ge => 0 >= rhs,
            };
            if !ok {
                return None;
            }
            continue;
        }
        rows.push(DenseRow {
            coeffs,
            rel: r.rel,
            rhs,
        });
    }
    for (k, j) in free.iter().enumerate() {
        if let Some(h) = node.hi[*j] {
            if h < node.lo[*j] {
                return None;
            }
            let mut coeffs = vec![0; free.len()];
            coeffs[k] = 1;
            rows.push(DenseRow {
                coeffs,
                rel: Rel3::Le,
                rhs: h - node.lo[*j],
            });
        }
    }
    Some(rows)
}

/// Integer solvability of the equality rows, ignoring signs, via column
/// Hermite reduction.
pub(crate) fn lattice_feasible(rows: &[DenseRow], n: usize) -> bool {
    let eqs: Vec<&DenseRow> = rows.iter().filter(|r| r.rel == Rel3::Eq).collect();
    if eqs.is_empty() {
        return true;
    }
    let mut a: Vec<Vec<BigInt>> = eqs
        .iter()
        .map(|r| r.coeffs.iter().map(|c| BigInt::from(*c)).collect())
        .collect();
    let b: Vec<BigInt> = eqs.iter().map(|r| BigInt::from(r.rhs)).collect();
    let m = a.len();
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; m];
    let mut col = 0;
    for i in 0..m {
        if col == n {
            break;
        }
        for c in col + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            if a[i][col].is_zero() {
                for row in a.iter_mut() {
                    row.swap(col, c);
                }
                continue;
            }
            let p = a[i][col].clone();
            let q = a[i][c].clone();
            let eg = p.extended_gcd(&q);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let pg = &p / &g;
            let qg = &q / &g;
            for row in a.iter_mut() {
                let u = row[col].clone();
                let v = row[c].clone();
                row[col] = &s * &u + &t * &v;
                row[c] = &qg * &u - &pg * &v;
            }
        }
        if !a[i][col].is_zero() {
            pivot_of_row[i] = Some(col);
            col += 1;
        }
    }
    let mut y: Vec<BigInt> = vec![BigInt::zero(); n];
    for i in 0..m {
        let mut s = b[i].clone();
        for c in 0..n {
            if Some(c) != pivot_of_row[i] && !a[i][c].is_zero() {
                s -= &a[i][c] * &y[c];
            }
        }
        match pivot_of_row[i] {
            Some(c) => {
                let (q, r) = s.div_rem(&a[i][c]);
                if !r.is_zero() {
                    return false;
                }
                y[c] = q;
            }
            None => {
                if !s.is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

trait Field: Clone + PartialOrd + std::fmt::Debug {
    fn from_i128(v: i128) -> Self;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn div(&self, o: &Self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn is_positive(&self) -> bool;
    fn to_big(&self) -> BigRational;
}

impl Field for Ratio<i128> {
    fn from_i128(v: i128) -> Self {
        Ratio::from_integer(v)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        self.checked_div(o)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

impl Field for BigRational {
    fn from_i128(v: i128) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        if Zero::is_zero(o) {
            None
        } else {
            Some(self / o)
        }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn to_big(&self) -> BigRational {
        self.clone()
    }
}

enum LpFail {
    Overflow,
    Budget,
}

fn ck<S>(v: Option<S>) -> Result<S, LpFail> {
    v.ok_or(LpFail::Overflow)
}

/// `Ok(None)` is infeasible; `Err(())` means the budget ran out.
pub(crate) fn solve_lp_any(
    rows: &[DenseRow],
    n: usize,
    minimize: bool,
    budget: &mut Budget,
) -> Result<Option<Vec<BigRational>>, ()> {
    match simplex::<Ratio<i128>>(rows, n, minimize, budget) {
        Ok(r) => Ok(r.map(|x| x.iter().map(Field::to_big).collect())),
        Err(LpFail::Budget) => Err(()),
        Err(LpFail::Overflow) => match simplex::<BigRational>(rows, n, minimize, budget) {
            Ok(r) => Ok(r),
            Err(_) => Err(()),
        },
    }
}

struct Tableau<S> {
    t: Vec<Vec<S>>,
    basis: Vec<usize>,
    z: Vec<S>,
    width: usize,
}

impl<S: Field> Tableau<S> {
    fn rhs(&self) -> usize {
        self.width
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<(), LpFail> {
        let p = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            if !v.is_zero() {
                *v = ck(v.div(&p))?;
            }
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v = ck(v.sub(&ck(f.mul(pv))?))?;
                }
            }
        }
        if !self.z[c].is_zero() {
            let f = self.z[c].clone();
            for (v, pv) in self.z.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v = ck(v.sub(&ck(f.mul(pv))?))?;
                }
            }
        }
        self.basis[r] = c;
        Ok(())
    }

    /// Bland's rule keeps the pivoting finite.
    fn optimize(&mut self, allowed: usize, budget: &mut Budget) -> Result<(), LpFail> {
        let rhs = self.rhs();
        loop {
            if !budget.spend(1) {
                return Err(LpFail::Budget);
            }
            let Some(c) = (0..allowed).find(|j| self.z[*j].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(usize, S)> = None;
            for i in 0..self.t.len() {
                if !self.t[i][c].is_positive() {
                    continue;
                }
                let ratio = ck(self.t[i][rhs].div(&self.t[i][c]))?;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                // Unbounded direction; cannot happen for the objectives used
                // here, which are bounded below by zero.
                None => return Ok(()),
                Some((r, _)) => self.pivot(r, c)?,
            }
        }
    }
}

fn simplex<S: Field>(
    rows: &[DenseRow],
    n: usize,
    minimize: bool,
    budget: &mut Budget,
) -> Result<Option<Vec<S>>, LpFail> {
    let norm: Vec<DenseRow> = rows
        .iter()
        .map(|r| {
            if r.rhs < 0 {
                DenseRow {
                    coeffs: r.coeffs.iter().map(|c| -c).collect(),
                    rel: match r.rel {
                        Rel3::Le => Rel3::Ge,
                        Rel3::Ge => Rel3::Le,
                        Rel3::Eq => Rel3::Eq,
                    },
                    rhs: -r.rhs,
                }
            } else {
                r.clone()
            }
        })
        .collect();
    let n_slack = norm.iter().filter(|r| r.rel != Rel3::Eq).count();
    let n_art = norm.iter().filter(|r| r.rel != Rel3::Le).count();
    let first_art = n + n_slack;
    let width = first_art + n_art;
    let zero = S::from_i128(0);
    let one = S::from_i128(1);
    let mut t = Vec::with_capacity(norm.len());
    let mut basis = Vec::with_capacity(norm.len());
    let (mut s_idx, mut a_idx) = (n, first_art);
    for r in &norm {
        let mut row = vec![zero.clone(); width + 1];
        for (j, c) in r.coeffs.iter().enumerate() {
            if *c != 0 {
                row[j] = S::from_i128(*c);
            }
        }
        row[width] = S::from_i128(r.rhs);
        match r.rel {
            Rel3::Le => {
                row[s_idx] = one.clone();
                basis.push(s_idx);
                s_idx += 1;
            }
            Rel3::Ge => {
                row[s_idx] = S::from_i128(-1);
                s_idx += 1;
                row[a_idx] = one.clone();
                basis.push(a_idx);
                a_idx += 1;
            }
            Rel3::Eq => {
                row[a_idx] = one.clone();
                basis.push(a_idx);
                a_idx += 1;
            }
        }
        t.push(row);
    }
    let mut tab = Tableau {
        t,
        basis,
        z: vec![zero.clone(); width + 1],
        width,
    };

    if n_art > 0 {
        for j in first_art..width {
            tab.z[j] = one.clone();
        }
        for i in 0..tab.t.len() {
            if tab.basis[i] >= first_art {
                for j in 0..=width {
                    if !tab.t[i][j].is_zero() {
                        tab.z[j] = ck(tab.z[j].sub(&tab.t[i][j]))?;
                    }
                }
            }
        }
        tab.optimize(width, budget)?;
        if !tab.z[width].is_zero() {
            return Ok(None);
        }
        let mut i = 0;
        while i < tab.t.len() {
            if tab.basis[i] >= first_art {
                match (0..first_art).find(|j| !tab.t[i][*j].is_zero()) {
                    Some(j) => tab.pivot(i, j)?,
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    if minimize {
        let mut z = vec![zero.clone(); width + 1];
        for zj in z.iter_mut().take(n) {
            *zj = one.clone();
        }
        for i in 0..tab.t.len() {
            if tab.basis[i] < n {
                for j in 0..=width {
                    if !tab.t[i][j].is_zero() {
                        z[j] = ck(z[j].sub(&tab.t[i][j]))?;
                    }
                }
            }
        }
        tab.z = z;
        tab.optimize(first_art, budget)?;
    }

    let mut x = vec![zero; n];
    for (i, b) in tab.basis.iter().enumerate() {
        if *b < n {
            x[*b] = tab.t[i][width].clone();
        }
    }
    Ok(Some(x))
}

/// Exhaustive search over `[0, limit]^n`; test oracle only.
pub fn brute_force(sys: &IntSystem, limit: u64) -> Option<Vec<u64>> {
    let n = sys.num_vars;
    let mut x = vec![0u64; n];
    loop {
        if sys.check(&x) {
            return Some(x);
        }
        let mut i = 0;
        loop {
            if i == n {
                return None;
            }
            if x[i] < limit {
                x[i] += 1;
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}
