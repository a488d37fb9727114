use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::resolver::{run_resolver, Resolver, Totalize};
use crate::alphabet::{Letter, Word};
use crate::error::{Error, Result};
use crate::pa::{complete, member, ParikhAutomaton};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PumpDecomposition {
    pub u: Word,
    pub v: Word,
    pub x: Word,
    pub z: Word,
    pub p: usize,
    pub m: usize,
    pub ell: usize,
}

impl PumpDecomposition {
    /// `u·v^i·x·v^j·z`
    pub fn assemble(&self, i: usize, j: usize, z: &[Letter]) -> Word {
        let mut w = self.u.clone();
        for _ in 0..i {
            w.extend_from_slice(&self.v);
        }
        w.extend_from_slice(&self.x);
        for _ in 0..j {
            w.extend_from_slice(&self.v);
        }
        w.extend_from_slice(z);
        w
    }

    pub fn sizes_ok(&self) -> bool {
        let uvxv = self.u.len() + 2 * self.v.len() + self.x.len();
        !self.v.is_empty() && self.v.len() <= self.p && self.x.len() > self.p && uvxv <= self.ell
    }
}

/// `(p, m, ℓ)` for the completed automaton. Cycles are run infixes, so
/// each rotation of a simple cycle counts separately.
pub fn pumping_parameters(a: &ParikhAutomaton) -> (usize, usize, usize) {
    let c = complete(a);
    let p = c.num_states();
    let m: usize = c.simple_cycles().iter().map(Vec::len).sum();
    (p, m, (p + 1) * (2 * m + 1))
}

/// Simple cycles occurring as infixes of `seg`, in order of first position.
fn cycles_in(a: &ParikhAutomaton, seg: &[usize]) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    for i in 0..seg.len() {
        let start = a.transition(seg[i]).source;
        let mut seen = HashSet::from([start]);
        for k in i..seg.len() {
            let target = a.transition(seg[k]).target;
            if target == start {
                out.push((i, seg[i..=k].to_vec()));
                break;
            }
            if !seen.insert(target) {
                break;
            }
        }
    }
    out
}

/// Splits `w` as in the pumping argument: the resolver's run is cut into
/// `2m+1` blocks of `p+1` transitions and a cycle shared by two
/// non-adjacent blocks gives `v`.
pub fn pumping_decompose(a: &ParikhAutomaton, r: &dyn Resolver, w: &[Letter]) -> Result<PumpDecomposition> {
    let (p, m, ell) = pumping_parameters(a);
    if w.len() <= ell {
        return Err(Error::Precondition(format!(
            "word length {} must exceed ℓ = {ell}",
            w.len()
        )));
    }
    let c = complete(a);
    let run = run_resolver(&c, &Totalize { inner: r }, w)?;
    let block = p + 1;
    let found: Vec<Vec<(usize, Vec<usize>)>> = (0..=2 * m)
        .map(|j| cycles_in(&c, &run.transitions[j * block..(j + 1) * block]))
        .collect();
    for j0 in 0..found.len() {
        for (i0, cyc) in &found[j0] {
            for (j1, later) in found.iter().enumerate().skip(j0 + 2) {
                if let Some((i1, _)) = later.iter().find(|(_, c1)| c1 == cyc) {
                    let s0 = j0 * block + i0;
                    let s1 = j1 * block + i1;
                    let len = cyc.len();
                    return Ok(PumpDecomposition {
                        u: w[..s0].to_vec(),
                        v: w[s0..s0 + len].to_vec(),
                        x: w[s0 + len..s1].to_vec(),
                        z: w[s1 + len..].to_vec(),
                        p,
                        m,
                        ell,
                    });
                }
            }
        }
    }
    Err(Error::Invariant("no cycle repeats in non-adjacent blocks".into()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PumpViolation {
    pub suffix: Word,
    /// `uv²xz′` is rejected.
    pub left_fails: bool,
    /// `uxv²z′` is rejected.
    pub right_fails: bool,
}

/// Every suffix `z′` with `uvxvz′` accepted must also accept `uv²xz′` and
/// `uxv²z′`; returns the suffixes where that fails.
pub fn pumping_check(a: &ParikhAutomaton, dec: &PumpDecomposition, suffixes: &[Word]) -> Result<Vec<PumpViolation>> {
    let mut out = Vec::new();
    for z in suffixes {
        if !member(a, &dec.assemble(1, 1, z))? {
            continue;
        }
        let left_fails = !member(a, &dec.assemble(2, 0, z))?;
        let right_fails = !member(a, &dec.assemble(0, 2, z))?;
        if left_fails || right_fails {
            out.push(PumpViolation {
                suffix: z.clone(),
                left_fails,
                right_fails,
            });
        }
    }
    Ok(out)
}
