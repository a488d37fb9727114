//! Nonemptiness and finiteness through integer programs over transition
//! counts.
//!
//! For an accepting state `f`, a vector of transition counts is the count
//! vector of some run from `q_I` to `f` exactly when it satisfies flow
//! balance and its support is connected to `q_I`. Flow balance and the
//! acceptance set are linear; connectivity is enforced lazily by branching
//! on a disconnected component `U`: either nothing touching `U` is used, or
//! some transition crossing into or out of `U` is.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::automaton::{ParikhAutomaton, StateId};
use super::member::member;
use crate::alphabet::Word;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::semilinear::ilp::{ilp_solve_with, lp_feasible, IlpOutcome, IntSystem, LpOutcome};
use crate::semilinear::lower::{lower, AffineExpr};
use crate::semilinear::Relation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    Witness(Word),
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finiteness {
    Finite,
    Infinite(InfiniteCertificate),
    Unknown,
}

/// A member realised by `counts`, and a circulation `pump` on the same
/// support such that `counts + λ·pump` is realised by a member for every
/// `λ ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfiniteCertificate {
    pub base: Word,
    pub final_state: StateId,
    pub counts: Vec<(usize, u64)>,
    pub pump: Vec<(usize, u64)>,
}

impl InfiniteCertificate {
    pub fn pumped(&self, a: &ParikhAutomaton, lambda: u64) -> Word {
        let mut total: HashMap<usize, u64> = self.counts.iter().copied().collect();
        for (t, k) in &self.pump {
            *total.entry(*t).or_insert(0) += lambda * k;
        }
        let mut counts: Vec<(usize, u64)> = total.into_iter().collect();
        counts.sort_unstable();
        euler_word(a, &counts, self.final_state)
    }
}

/// Transitions that can occur on a run from `q_I` to `f`, with one
/// variable each, plus the flow-balance system.
struct FlowModel {
    trans: Vec<usize>,
    base: IntSystem,
    image: Vec<AffineExpr>,
}

impl FlowModel {
    fn new(a: &ParikhAutomaton, f: StateId) -> FlowModel {
        let reach = a.reachable();
        let coreach = coreachable(a, f);
        let trans: Vec<usize> = (0..a.transitions().len())
            .filter(|&t| {
                let tr = a.transition(t);
                reach[tr.source] && coreach[tr.target]
            })
            .collect();
        let mut base = IntSystem::new(trans.len());
        let mut states: BTreeSet<StateId> = [a.initial(), f].into_iter().collect();
        for &t in &trans {
            states.insert(a.transition(t).source);
            states.insert(a.transition(t).target);
        }
        for &q in &states {
            let mut terms = Vec::new();
            for (v, &t) in trans.iter().enumerate() {
                let tr = a.transition(t);
                if tr.source == q {
                    terms.push((v, 1));
                }
                if tr.target == q {
                    terms.push((v, -1));
                }
            }
            let rhs = i64::from(q == a.initial()) - i64::from(q == f);
            base.add_row(terms, Relation::Eq, rhs);
        }
        base.add_row((0..trans.len()).map(|v| (v, 1)), Relation::Ge, 1);
        let image = (0..a.dim())
            .map(|k| AffineExpr {
                terms: trans
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| a.transition(**t).vector[k] > 0)
                    .map(|(v, t)| (v, a.transition(*t).vector[k] as i64))
                    .collect(),
                constant: 0,
            })
            .collect();
        FlowModel { trans, base, image }
    }

    fn has_cycle(&self, a: &ParikhAutomaton) -> bool {
        let edges: Vec<(usize, usize)> = self
            .trans
            .iter()
            .map(|t| (a.transition(*t).source, a.transition(*t).target))
            .collect();
        has_cycle(a.num_states(), &edges)
    }

    fn counts(&self, x: &[u64]) -> Vec<(usize, u64)> {
        self.trans
            .iter()
            .enumerate()
            .filter(|(v, _)| x[*v] > 0)
            .map(|(v, t)| (*t, x[v]))
            .collect()
    }
}

fn coreachable(a: &ParikhAutomaton, f: StateId) -> Vec<bool> {
    let mut seen = vec![false; a.num_states()];
    seen[f] = true;
    let mut stack = vec![f];
    while let Some(q) = stack.pop() {
        for t in a.transitions() {
            if t.target == q && !seen[t.source] {
                seen[t.source] = true;
                stack.push(t.source);
            }
        }
    }
    seen
}

fn has_cycle(n: usize, edges: &[(usize, usize)]) -> bool {
    // Kahn's algorithm: a cycle exists iff some node is never freed.
    let mut indeg = vec![0usize; n];
    for (_, t) in edges {
        indeg[*t] += 1;
    }
    let mut queue: Vec<usize> = (0..n).filter(|q| indeg[*q] == 0).collect();
    let mut removed = 0;
    while let Some(q) = queue.pop() {
        removed += 1;
        for (s, t) in edges {
            if *s == q {
                indeg[*t] -= 1;
                if indeg[*t] == 0 {
                    queue.push(*t);
                }
            }
        }
    }
    removed < n
}

type ExtraRow = (Vec<(usize, i64)>, Relation, i64);

enum Connected {
    Solution(Vec<u64>),
    Infeasible,
    Unknown,
}

/// Finds a solution of `sys` whose transition support is connected to the
/// initial state.
fn connected_solve(a: &ParikhAutomaton, model: &FlowModel, sys: &IntSystem, budget: &mut Budget) -> Connected {
    let mut stack: Vec<Vec<ExtraRow>> = vec![Vec::new()];
    while let Some(extra) = stack.pop() {
        let mut s = sys.clone();
        for (terms, rel, rhs) in &extra {
            s.add_row(terms.clone(), *rel, *rhs);
        }
        let x = match ilp_solve_with(&s, budget) {
            IlpOutcome::Unknown => return Connected::Unknown,
            IlpOutcome::Infeasible => continue,
            IlpOutcome::Solution(x) => x,
        };
        match stray_component(a, model, &x) {
            None => return Connected::Solution(x),
            Some(u) => {
                let mut touching = Vec::new();
                let mut crossing = Vec::new();
                for (v, &t) in model.trans.iter().enumerate() {
                    let tr = a.transition(t);
                    let (si, ti) = (u[tr.source], u[tr.target]);
                    if si || ti {
                        touching.push((v, 1));
                    }
                    if si != ti {
                        crossing.push((v, 1));
                    }
                }
                if !crossing.is_empty() {
                    let mut b = extra.clone();
                    b.push((crossing, Relation::Ge, 1));
                    stack.push(b);
                }
                let mut z = extra;
                z.push((touching, Relation::Eq, 0));
                stack.push(z);
            }
        }
    }
    Connected::Infeasible
}

/// Some weakly connected component of the support that misses `q_I`, as a
/// state mask.
fn stray_component(a: &ParikhAutomaton, model: &FlowModel, x: &[u64]) -> Option<Vec<bool>> {
    let n = a.num_states();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let used: Vec<usize> = model
        .trans
        .iter()
        .enumerate()
        .filter(|(v, _)| x[*v] > 0)
        .map(|(_, t)| *t)
        .collect();
    for &t in &used {
        let tr = a.transition(t);
        let (r1, r2) = (find(&mut parent, tr.source), find(&mut parent, tr.target));
        parent[r1] = r2;
    }
    let root = find(&mut parent, a.initial());
    let stray = used.iter().find_map(|&t| {
        let r = find(&mut parent, a.transition(t).source);
        (r != root).then_some(r)
    })?;
    Some((0..n).map(|q| find(&mut parent, q) == stray).collect())
}

/// An Euler path from `q_I` to `f` through the given transition
/// multiplicities; the caller guarantees balance and connectivity.
fn euler_word(a: &ParikhAutomaton, counts: &[(usize, u64)], _f: StateId) -> Word {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); a.num_states()];
    for &(t, k) in counts {
        for _ in 0..k {
            adj[a.transition(t).source].push(t);
        }
    }
    let mut ptr = vec![0usize; a.num_states()];
    let mut stack: Vec<(StateId, Option<usize>)> = vec![(a.initial(), None)];
    let mut path = Vec::new();
    while let Some(&(q, via)) = stack.last() {
        if ptr[q] < adj[q].len() {
            let t = adj[q][ptr[q]];
            ptr[q] += 1;
            stack.push((a.transition(t).target, Some(t)));
        } else {
            stack.pop();
            if let Some(t) = via {
                path.push(t);
            }
        }
    }
    path.reverse();
    path.into_iter().map(|t| a.transition(t).letter).collect()
}

pub fn is_empty(a: &ParikhAutomaton) -> Result<Emptiness> {
    is_empty_with(a, &mut Budget::default())
}

pub fn is_empty_with(a: &ParikhAutomaton, budget: &mut Budget) -> Result<Emptiness> {
    if a.accepts_config(a.initial(), &vec![0; a.dim()])? {
        return Ok(Emptiness::Witness(Vec::new()));
    }
    let reach = a.reachable();
    let mut unknown = false;
    for f in a.accepting_states() {
        if !reach[f] {
            continue;
        }
        let model = FlowModel::new(a, f);
        if model.trans.is_empty() {
            continue;
        }
        for sys in lower(a.acceptance(), &model.image, model.base.clone())? {
            match connected_solve(a, &model, &sys, budget) {
                Connected::Unknown => {
                    unknown = true;
                    if budget.exhausted() {
                        return Ok(Emptiness::Unknown);
                    }
                }
                Connected::Infeasible => {}
                Connected::Solution(x) => {
                    let w = euler_word(a, &model.counts(&x), f);
                    if !member(a, &w)? {
                        return Err(Error::Invariant("emptiness witness is not accepted".into()));
                    }
                    return Ok(Emptiness::Witness(w));
                }
            }
        }
    }
    Ok(if unknown { Emptiness::Unknown } else { Emptiness::Empty })
}

pub fn is_finite(a: &ParikhAutomaton) -> Result<Finiteness> {
    is_finite_with(a, &mut Budget::default())
}

/// The language is infinite iff, for some accepting state, disjunct and
/// connected support `S`, the solutions with support exactly `S` form an
/// unbounded set. Supports are enumerated by branching; unboundedness is a
/// rational recession direction on `S`.
pub fn is_finite_with(a: &ParikhAutomaton, budget: &mut Budget) -> Result<Finiteness> {
    let reach = a.reachable();
    let mut unknown = false;
    for f in a.accepting_states() {
        if !reach[f] {
            continue;
        }
        let model = FlowModel::new(a, f);
        if model.trans.is_empty() || !model.has_cycle(a) {
            continue;
        }
        for sys in lower(a.acceptance(), &model.image, model.base.clone())? {
            for variant in sys.lower_congruences().split_ne() {
                match supports_search(a, &model, &variant, f, budget)? {
                    Finiteness::Finite => {}
                    Finiteness::Unknown => {
                        unknown = true;
                        if budget.exhausted() {
                            return Ok(Finiteness::Unknown);
                        }
                    }
                    inf => return Ok(inf),
                }
            }
        }
    }
    Ok(if unknown {
        Finiteness::Unknown
    } else {
        Finiteness::Finite
    })
}

fn supports_search(
    a: &ParikhAutomaton,
    model: &FlowModel,
    sys: &IntSystem,
    f: StateId,
    budget: &mut Budget,
) -> Result<Finiteness> {
    let k = model.trans.len();
    let mut stack: Vec<Vec<ExtraRow>> = vec![Vec::new()];
    let mut unknown = false;
    while let Some(extra) = stack.pop() {
        let mut s = sys.clone();
        for (terms, rel, rhs) in &extra {
            s.add_row(terms.clone(), *rel, *rhs);
        }
        let x = match connected_solve(a, model, &s, budget) {
            Connected::Unknown => {
                unknown = true;
                if budget.exhausted() {
                    return Ok(Finiteness::Unknown);
                }
                continue;
            }
            Connected::Infeasible => continue,
            Connected::Solution(x) => x,
        };
        let support: Vec<usize> = (0..k).filter(|v| x[*v] > 0).collect();
        match recession_ray(sys, k, &support, budget) {
            Ray::Unknown => {
                unknown = true;
                if budget.exhausted() {
                    return Ok(Finiteness::Unknown);
                }
            }
            Ray::Found(r) => {
                let counts = model.counts(&x);
                let pump = model.counts(&r);
                let base = euler_word(a, &counts, f);
                return Ok(Finiteness::Infinite(InfiniteCertificate {
                    base,
                    final_state: f,
                    counts,
                    pump,
                }));
            }
            Ray::None => {}
        }
        // Partition the remaining supports: the i-th child keeps the first
        // i - 1 support variables and drops the i-th; the last child keeps
        // all of them and adds something outside.
        for i in 0..support.len() {
            let mut child = extra.clone();
            for &v in &support[..i] {
                child.push((vec![(v, 1)], Relation::Ge, 1));
            }
            child.push((vec![(support[i], 1)], Relation::Eq, 0));
            stack.push(child);
        }
        let outside: Vec<(usize, i64)> = (0..k).filter(|v| x[*v] == 0).map(|v| (v, 1)).collect();
        if !outside.is_empty() {
            let mut child = extra;
            for &v in &support {
                child.push((vec![(v, 1)], Relation::Ge, 1));
            }
            child.push((outside, Relation::Ge, 1));
            stack.push(child);
        }
    }
    Ok(if unknown {
        Finiteness::Unknown
    } else {
        Finiteness::Finite
    })
}

enum Ray {
    Found(Vec<u64>),
    None,
    Unknown,
}

/// A nonnegative integer direction `r` with `A·r` sign-compatible with
/// every row of `sys`, zero on transitions outside `support`, and at least
/// one unit of transition mass.
fn recession_ray(sys: &IntSystem, k: usize, support: &[usize], budget: &mut Budget) -> Ray {
    let mut h = IntSystem::new(sys.num_vars);
    for row in &sys.rows {
        let rel = match row.rel {
            Relation::Lt | Relation::Le => Relation::Le,
            Relation::Gt | Relation::Ge => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ne => continue,
        };
        h.add_row(row.terms.clone(), rel, 0);
    }
    for v in 0..k {
        if !support.contains(&v) {
            h.add_row([(v, 1)], Relation::Eq, 0);
        }
    }
    h.add_row(support.iter().map(|v| (*v, 1)), Relation::Ge, 1);
    match lp_feasible(&h, budget) {
        LpOutcome::Unknown => Ray::Unknown,
        LpOutcome::Infeasible => Ray::None,
        LpOutcome::Feasible(r) => {
            let l = r.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            let scaled: Option<Vec<u64>> = r.iter().map(|v| (v * &l).to_integer().to_u64()).collect();
            match scaled {
                Some(s) => Ray::Found(s),
                None => Ray::Unknown,
            }
        }
    }
}
