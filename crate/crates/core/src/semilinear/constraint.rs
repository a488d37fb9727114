use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Ne,
}

impl Relation {
    pub fn holds(self, lhs: i128, rhs: i128) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Ne => lhs != rhs,
        }
    }

    pub fn negate(self) -> Relation {
        match self {
            Relation::Lt => Relation::Ge,
            Relation::Le => Relation::Gt,
            Relation::Eq => Relation::Ne,
            Relation::Ge => Relation::Lt,
            Relation::Gt => Relation::Le,
            Relation::Ne => Relation::Eq,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Ne => "!=",
        }
    }

    pub fn parse(token: &str) -> Option<Relation> {
        Some(match token {
            "<" => Relation::Lt,
            "<=" => Relation::Le,
            "=" | "==" => Relation::Eq,
            ">=" => Relation::Ge,
            ">" => Relation::Gt,
            "!=" => Relation::Ne,
            _ => return None,
        })
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `Σ coeffs[i]·x_i REL rhs`
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearAtom {
    pub coeffs: Vec<i64>,
    pub rel: Relation,
    pub rhs: i64,
}

/// `Σ coeffs[i]·x_i ≡ residue (mod modulus)`
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CongruenceAtom {
    pub coeffs: Vec<i64>,
    pub modulus: u64,
    pub residue: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Atom {
    Linear(LinearAtom),
    Congruence(CongruenceAtom),
}

fn dot(coeffs: &[i64], v: &[u64]) -> i128 {
    coeffs.iter().zip(v).map(|(c, x)| *c as i128 * *x as i128).sum()
}

impl Atom {
    pub fn linear(coeffs: Vec<i64>, rel: Relation, rhs: i64) -> Atom {
        Atom::Linear(LinearAtom { coeffs, rel, rhs })
    }

    pub fn congruence(coeffs: Vec<i64>, modulus: u64, residue: u64) -> Result<Atom> {
        if modulus < 2 {
            return Err(Error::invalid("congruence modulus must be at least 2"));
        }
        if residue >= modulus {
            return Err(Error::invalid("congruence residue must be below the modulus"));
        }
        Ok(Atom::Congruence(CongruenceAtom {
            coeffs,
            modulus,
            residue,
        }))
    }

    pub fn coeffs(&self) -> &[i64] {
        match self {
            Atom::Linear(a) => &a.coeffs,
            Atom::Congruence(a) => &a.coeffs,
        }
    }

    fn coeffs_mut(&mut self) -> &mut Vec<i64> {
        match self {
            Atom::Linear(a) => &mut a.coeffs,
            Atom::Congruence(a) => &mut a.coeffs,
        }
    }

    pub fn holds(&self, v: &[u64]) -> bool {
        match self {
            Atom::Linear(a) => a.rel.holds(dot(&a.coeffs, v), a.rhs as i128),
            Atom::Congruence(a) => dot(&a.coeffs, v).rem_euclid(a.modulus as i128) == a.residue as i128,
        }
    }

    /// Negation as a disjunction of atoms.
    pub fn negate(&self) -> Vec<Atom> {
        match self {
            Atom::Linear(a) => match a.rel {
                Relation::Eq => vec![
                    Atom::linear(a.coeffs.clone(), Relation::Lt, a.rhs),
                    Atom::linear(a.coeffs.clone(), Relation::Gt, a.rhs),
                ],
                rel => vec![Atom::linear(a.coeffs.clone(), rel.negate(), a.rhs)],
            },
            Atom::Congruence(a) => (0..a.modulus)
                .filter(|r| *r != a.residue)
                .map(|r| {
                    Atom::Congruence(CongruenceAtom {
                        coeffs: a.coeffs.clone(),
                        modulus: a.modulus,
                        residue: r,
                    })
                })
                .collect(),
        }
    }
}

/// Quantifier-free formula in disjunctive normal form. No clauses is
/// `false`; a clause with no atoms is `true`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSet {
    dim: usize,
    clauses: Vec<Vec<Atom>>,
}

impl ConstraintSet {
    pub fn new(dim: usize, clauses: Vec<Vec<Atom>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("constraint set must have dimension at least 1"));
        }
        for atom in clauses.iter().flatten() {
            Error::check_dim(dim, atom.coeffs().len())?;
            if let Atom::Congruence(c) = atom {
                if c.modulus < 2 || c.residue >= c.modulus {
                    return Err(Error::invalid("malformed congruence atom"));
                }
            }
        }
        Ok(ConstraintSet { dim, clauses })
    }

    pub fn conjunction(dim: usize, atoms: Vec<Atom>) -> Result<Self> {
        ConstraintSet::new(dim, vec![atoms])
    }

    pub fn total(dim: usize) -> Result<Self> {
        ConstraintSet::new(dim, vec![Vec::new()])
    }

    pub fn empty(dim: usize) -> Result<Self> {
        ConstraintSet::new(dim, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn clauses(&self) -> &[Vec<Atom>] {
        &self.clauses
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool> {
        Error::check_dim(self.dim, v.len())?;
        Ok(self.clauses.iter().any(|clause| clause.iter().all(|a| a.holds(v))))
    }

    pub fn or(&self, other: &ConstraintSet) -> Result<ConstraintSet> {
        Error::check_dim(self.dim, other.dim)?;
        let mut clauses = self.clauses.clone();
        clauses.extend(other.clauses.iter().cloned());
        Ok(ConstraintSet { dim: self.dim, clauses })
    }

    pub fn and(&self, other: &ConstraintSet) -> Result<ConstraintSet> {
        Error::check_dim(self.dim, other.dim)?;
        let mut clauses = Vec::new();
        for a in &self.clauses {
            for b in &other.clauses {
                let mut c = a.clone();
                c.extend(b.iter().cloned());
                clauses.push(c);
            }
        }
        Ok(ConstraintSet { dim: self.dim, clauses })
    }

    /// De Morgan: the negation of a disjunction of conjunctions is the
    /// product of the per-clause negated disjunctions.
    pub fn not(&self) -> ConstraintSet {
        let mut result = vec![Vec::new()];
        for clause in &self.clauses {
            let alternatives: Vec<Atom> = clause.iter().flat_map(Atom::negate).collect();
            let mut next = Vec::with_capacity(result.len() * alternatives.len());
            for partial in &result {
                for alt in &alternatives {
                    let mut c: Vec<Atom> = partial.clone();
                    c.push(alt.clone());
                    next.push(c);
                }
            }
            result = next;
            if result.is_empty() {
                break;
            }
        }
        ConstraintSet {
            dim: self.dim,
            clauses: result,
        }
    }

    /// Embeds into dimension `total`, occupying coordinates
    /// `at..at + self.dim()`.
    pub fn embed(&self, at: usize, total: usize) -> Result<ConstraintSet> {
        if at + self.dim > total {
            return Err(Error::invalid("embedding exceeds target dimension"));
        }
        let clauses = self
            .clauses
            .iter()
            .map(|clause| {
                clause
                    .iter()
                    .map(|atom| {
                        let mut a = atom.clone();
                        let mut coeffs = vec![0; total];
                        coeffs[at..at + self.dim].copy_from_slice(atom.coeffs());
                        *a.coeffs_mut() = coeffs;
                        a
                    })
                    .collect()
            })
            .collect();
        Ok(ConstraintSet { dim: total, clauses })
    }
}

pub fn member_constraint(k: &ConstraintSet, v: &[u64]) -> Result<bool> {
    k.contains(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    Not,
}

pub fn bool_constraint(op: BoolOp, k1: &ConstraintSet, k2: Option<&ConstraintSet>) -> Result<ConstraintSet> {
    match (op, k2) {
        (BoolOp::Not, None) => Ok(k1.not()),
        (BoolOp::Not, Some(_)) => Err(Error::invalid("`not` takes one operand")),
        (BoolOp::And, Some(k2)) => k1.and(k2),
        (BoolOp::Or, Some(k2)) => k1.or(k2),
        (_, None) => Err(Error::invalid("binary operation needs two operands")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lt01() -> ConstraintSet {
        ConstraintSet::conjunction(2, vec![Atom::linear(vec![1, -1], Relation::Lt, 0)]).unwrap()
    }

    #[test]
    fn evaluation() {
        let k = lt01();
        assert!(member_constraint(&k, &[1, 2]).unwrap());
        assert!(!member_constraint(&k, &[2, 2]).unwrap());
        let m = ConstraintSet::conjunction(2, vec![Atom::congruence(vec![1, 0], 4, 0).unwrap()]).unwrap();
        assert!(m.contains(&[0, 7]).unwrap());
        assert!(m.contains(&[8, 7]).unwrap());
        assert!(!m.contains(&[2, 7]).unwrap());
    }

    #[test]
    fn negation_of_equality_is_trichotomy() {
        let eq = ConstraintSet::conjunction(2, vec![Atom::linear(vec![1, -1], Relation::Eq, 0)]).unwrap();
        let ne = bool_constraint(BoolOp::Not, &eq, None).unwrap();
        assert_eq!(ne.clauses().len(), 2);
        assert!(ne.contains(&[1, 2]).unwrap());
        assert!(!ne.contains(&[3, 3]).unwrap());
    }

    #[test]
    fn and_with_congruence() {
        let c = ConstraintSet::conjunction(2, vec![Atom::congruence(vec![1, 0], 4, 1).unwrap()]).unwrap();
        let k = bool_constraint(BoolOp::And, &lt01(), Some(&c)).unwrap();
        assert!(k.contains(&[1, 5]).unwrap());
        assert!(!k.contains(&[2, 5]).unwrap());
    }

    #[test]
    fn negated_congruence_expands_residues() {
        let c = ConstraintSet::conjunction(1, vec![Atom::congruence(vec![1], 3, 1).unwrap()]).unwrap();
        let n = c.not();
        assert_eq!(n.clauses().len(), 2);
        for x in 0..9u64 {
            assert_ne!(c.contains(&[x]).unwrap(), n.contains(&[x]).unwrap());
        }
    }

    #[test]
    fn not_of_empty_and_total() {
        assert!(ConstraintSet::empty(1).unwrap().not().contains(&[4]).unwrap());
        assert!(!ConstraintSet::total(1).unwrap().not().contains(&[4]).unwrap());
    }

    #[test]
    fn embedding_shifts_coordinates() {
        let e = lt01().embed(1, 4).unwrap();
        assert!(e.contains(&[9, 1, 2, 0]).unwrap());
        assert!(!e.contains(&[0, 2, 1, 0]).unwrap());
    }
}
