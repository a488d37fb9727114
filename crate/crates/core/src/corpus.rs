//! Built-in automata with resolvers and independent reference predicates.

use std::sync::Arc;

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::hd::{PositionalResolver, PositionalRule, Resolver, ScriptedResolver};
use crate::pa::{PaBuilder, ParikhAutomaton};
use crate::semilinear::{Atom, ConstraintSet, ExplicitSemilinear, LinearSet, Relation, SemilinearSet};

pub const NAMES: [&str; 6] = ["ex1", "nonDyck", "D", "Eprime", "Nprime", "E"];

#[derive(Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub automaton: ParikhAutomaton,
    pub resolver: Option<Arc<dyn Resolver>>,
    /// The resolver as a rule table, when it has one.
    pub table: Option<PositionalResolver>,
    reference: fn(&[char]) -> bool,
}

impl std::fmt::Debug for CorpusEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CorpusEntry")
            .field("name", &self.name)
            .field("has_resolver", &self.resolver.is_some())
            .finish()
    }
}

impl CorpusEntry {
    pub fn alphabet(&self) -> &Alphabet {
        self.automaton.alphabet()
    }
}

pub fn corpus_names() -> &'static [&'static str] {
    &NAMES
}

pub fn corpus_get(name: &str) -> Result<CorpusEntry> {
    let entry = match name {
        "ex1" => ex1(),
        "nonDyck" => non_dyck(),
        "D" => doubling(),
        "Eprime" => e_prime(),
        "Nprime" => n_prime(),
        "E" => e_lang(),
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(entry.expect("corpus automata are well-formed"))
}

pub fn corpus_all() -> Vec<CorpusEntry> {
    NAMES.iter().map(|n| corpus_get(n).unwrap()).collect()
}

/// Evaluates the language definition directly on the word.
pub fn reference_member(entry: &CorpusEntry, w: &[Letter]) -> Result<bool> {
    entry.alphabet().check_word(w)?;
    let chars: Vec<char> = w
        .iter()
        .map(|l| entry.alphabet().token(*l).chars().next().unwrap_or('?'))
        .collect();
    Ok((entry.reference)(&chars))
}

fn alphabet(tokens: &[&str]) -> Alphabet {
    Alphabet::new(tokens.iter().copied()).unwrap()
}

fn constraint(dim: usize, clauses: Vec<Vec<Atom>>) -> Result<SemilinearSet> {
    Ok(SemilinearSet::Constraint(ConstraintSet::new(dim, clauses)?))
}

fn rule(a: &ParikhAutomaton, state: &str, letter: &str, guard: Vec<Atom>, transition: usize) -> PositionalRule {
    PositionalRule {
        state: a.state_id(state).unwrap(),
        letter: a.alphabet().lookup(letter).unwrap(),
        guard,
        transition,
    }
}

// {a^n b^n} ∪ {a^n b^2n}
fn ex1() -> Result<CorpusEntry> {
    let mut b = PaBuilder::new(alphabet(&["a", "b"]));
    b.accept("p").accept("q");
    b.edge("p", "a", &[1, 0], "p")
        .edge("p", "b", &[0, 1], "q")
        .edge("q", "b", &[0, 1], "q");
    let c = ExplicitSemilinear::new(
        2,
        vec![
            LinearSet::new(vec![0, 0], vec![vec![1, 1]])?,
            LinearSet::new(vec![0, 0], vec![vec![1, 2]])?,
        ],
    )?;
    Ok(CorpusEntry {
        name: "ex1",
        description: "a^n b^n or a^n b^2n",
        automaton: b.build(SemilinearSet::Explicit(c))?,
        resolver: Some(Arc::new(PositionalResolver::deterministic())),
        table: Some(PositionalResolver::deterministic()),
        reference: ref_ex1,
    })
}

fn ref_ex1(w: &[char]) -> bool {
    let n = w.iter().take_while(|c| **c == 'a').count();
    let rest = &w[n..];
    rest.iter().all(|c| *c == 'b') && (rest.len() == n || rest.len() == 2 * n)
}

// Words over {0,1} with a prefix holding more 1s than 0s.
fn non_dyck() -> Result<CorpusEntry> {
    let mut b = PaBuilder::new(alphabet(&["0", "1"]));
    b.state("qc");
    b.accept("qn");
    b.edge("qc", "0", &[1, 0], "qc") // 0
        .edge("qc", "1", &[0, 1], "qc") // 1
        .edge("qc", "0", &[1, 0], "qn") // 2
        .edge("qc", "1", &[0, 1], "qn") // 3
        .edge("qn", "0", &[0, 0], "qn") // 4
        .edge("qn", "1", &[0, 0], "qn"); // 5
    let c = constraint(2, vec![vec![Atom::linear(vec![1, -1], Relation::Lt, 0)]])?;
    let automaton = b.build(c)?;
    // Move to qn with the first non-Dyck prefix, stay there afterwards.
    let resolver = ScriptedResolver::new("first-non-dyck-prefix", |view, letter| {
        let one = letter.0 == 1;
        if view.state == 1 {
            return Some(if one { 5 } else { 4 });
        }
        let (zeros, ones) = (view.image[0] + !one as u64, view.image[1] + one as u64);
        Some(match (zeros < ones, one) {
            (false, false) => 0,
            (false, true) => 1,
            (true, false) => 2,
            (true, true) => 3,
        })
    });
    Ok(CorpusEntry {
        name: "nonDyck",
        description: "words with a non-Dyck prefix",
        automaton,
        resolver: Some(Arc::new(resolver)),
        table: None,
        reference: ref_non_dyck,
    })
}

fn ref_non_dyck(w: &[char]) -> bool {
    let mut balance = 0i64;
    for c in w {
        balance += if *c == '1' { 1 } else { -1 };
        if balance > 0 {
            return true;
        }
    }
    false
}

// c^n0 d c^n1 d ... c^nk d with k ≥ 1, n0 = 1 and n_{j+1} ≠ 2 n_j for some j.
fn doubling() -> Result<CorpusEntry> {
    let mut b = PaBuilder::new(alphabet(&["c", "d"]));
    for s in ["s0", "s1", "odd", "even"] {
        b.state(s);
    }
    b.accept("acc");
    b.edge("s0", "c", &[1, 0, 0], "s1") // 0
        .edge("s1", "d", &[0, 0, 1], "odd") // 1
        .edge("odd", "c", &[0, 1, 0], "odd") // 2
        .edge("odd", "d", &[0, 0, 1], "even") // 3
        .edge("even", "c", &[1, 0, 0], "even") // 4
        .edge("even", "d", &[0, 0, 1], "odd") // 5
        .edge("odd", "d", &[0, 0, 1], "acc") // 6
        .edge("even", "d", &[0, 0, 1], "acc") // 7
        .edge("acc", "d", &[0, 0, 0], "acc") // 8
        .edge("acc", "c", &[0, 0, 0], "tail") // 9
        .edge("tail", "c", &[0, 0, 0], "tail") // 10
        .edge("tail", "d", &[0, 0, 0], "acc"); // 11
                                               // (e, o, j): sums over even and odd blocks and the number of d's. The
                                               // equations 2e = o (after an odd block) and e = 2o + 1 (after an even
                                               // one) hold until the first violation; on commit j counts the closing d.
    let j_even = Atom::congruence(vec![0, 0, 1], 2, 0)?;
    let j_odd = Atom::congruence(vec![0, 0, 1], 2, 1)?;
    let c = constraint(
        3,
        vec![
            vec![j_even, Atom::linear(vec![2, -1, 0], Relation::Ne, 0)],
            vec![j_odd, Atom::linear(vec![1, -2, 0], Relation::Ne, 1)],
        ],
    )?;
    let automaton = b.build(c)?;
    let resolver = PositionalResolver::new(vec![
        rule(
            &automaton,
            "odd",
            "d",
            vec![Atom::linear(vec![2, -1, 0], Relation::Ne, 0)],
            6,
        ),
        rule(
            &automaton,
            "even",
            "d",
            vec![Atom::linear(vec![1, -2, 0], Relation::Ne, 1)],
            7,
        ),
    ]);
    Ok(CorpusEntry {
        name: "D",
        description: "c d c^n1 d ... c^nk d where some block breaks the doubling",
        automaton,
        table: Some(resolver.clone()),
        resolver: Some(Arc::new(resolver)),
        reference: ref_doubling,
    })
}

fn ref_doubling(w: &[char]) -> bool {
    if w.last() != Some(&'d') {
        return false;
    }
    let blocks: Vec<usize> = w[..w.len() - 1].split(|c| *c == 'd').map(<[char]>::len).collect();
    blocks.len() >= 2 && blocks[0] == 1 && blocks.windows(2).any(|p| p[1] != 2 * p[0])
}

// c^m {a,b}^(m-1) b a^n b^n with m, n > 0.
fn e_prime() -> Result<CorpusEntry> {
    let mut b = PaBuilder::new(alphabet(&["a", "b", "c"]));
    b.state("s1");
    b.state("s2");
    b.state("q");
    b.state("s4");
    b.accept("s5");
    b.edge("s1", "c", &[1, 0, 0, 0], "s1") // 0
        .edge("s1", "a", &[0, 1, 0, 0], "s2") // 1
        .edge("s1", "b", &[0, 1, 0, 0], "s2") // 2
        .edge("s1", "b", &[0, 1, 0, 0], "q") // 3
        .edge("s2", "a", &[0, 1, 0, 0], "s2") // 4
        .edge("s2", "b", &[0, 1, 0, 0], "s2") // 5
        .edge("s2", "b", &[0, 1, 0, 0], "q") // 6
        .edge("q", "a", &[0, 0, 1, 0], "s4") // 7
        .edge("s4", "a", &[0, 0, 1, 0], "s4") // 8
        .edge("s4", "b", &[0, 0, 0, 1], "s5") // 9
        .edge("s5", "b", &[0, 0, 0, 1], "s5"); // 10
    let c = constraint(
        4,
        vec![vec![
            Atom::linear(vec![1, -1, 0, 0], Relation::Eq, 0),
            Atom::linear(vec![0, 0, 1, -1], Relation::Eq, 0),
        ]],
    )?;
    let automaton = b.build(c)?;
    // Reach q with the m-th letter after the c's, m being the number of c's.
    let resolver = PositionalResolver::new(vec![
        rule(
            &automaton,
            "s1",
            "b",
            vec![Atom::linear(vec![1, 0, 0, 0], Relation::Eq, 1)],
            3,
        ),
        rule(
            &automaton,
            "s2",
            "b",
            vec![Atom::linear(vec![1, -1, 0, 0], Relation::Eq, 1)],
            6,
        ),
    ]);
    Ok(CorpusEntry {
        name: "Eprime",
        description: "c^m {a,b}^(m-1) b a^n b^n",
        automaton,
        table: Some(resolver.clone()),
        resolver: Some(Arc::new(resolver)),
        reference: ref_e_prime,
    })
}

fn ref_e_prime(w: &[char]) -> bool {
    let m = w.iter().take_while(|c| **c == 'c').count();
    let rest = &w[m..];
    if m == 0 || rest.len() < m || rest.contains(&'c') || rest[m - 1] != 'b' {
        return false;
    }
    let tail = &rest[m..];
    let n = tail.iter().take_while(|c| **c == 'a').count();
    n > 0 && tail.len() == 2 * n && tail[n..].iter().all(|c| *c == 'b')
}

// c^n w with |w| ≥ n and w_0..w_{n-1} non-Dyck.
fn n_prime() -> Result<CorpusEntry> {
    let mut b = PaBuilder::new(alphabet(&["0", "1", "c"]));
    b.state("s1");
    b.accept("q").accept("s3");
    b.edge("s1", "c", &[0, 0, 1], "s1") // 0
        .edge("s1", "0", &[1, 0, 0], "q") // 1
        .edge("s1", "1", &[0, 1, 0], "q") // 2
        .edge("q", "0", &[1, 0, 0], "q") // 3
        .edge("q", "1", &[0, 1, 0], "q") // 4
        .edge("q", "0", &[0, 0, 0], "s3") // 5
        .edge("q", "1", &[0, 0, 0], "s3") // 6
        .edge("s3", "0", &[0, 0, 0], "s3") // 7
        .edge("s3", "1", &[0, 0, 0], "s3"); // 8
    let c = constraint(
        3,
        vec![vec![
            Atom::linear(vec![1, -1, 0], Relation::Lt, 0),
            Atom::linear(vec![1, 1, -1], Relation::Eq, 0),
        ]],
    )?;
    let automaton = b.build(c)?;
    // Leave q once n letters after the c's have been counted.
    let full = || vec![Atom::linear(vec![1, 1, -1], Relation::Ge, 0)];
    let resolver = PositionalResolver::new(vec![
        rule(&automaton, "q", "0", full(), 5),
        rule(&automaton, "q", "1", full(), 6),
    ]);
    Ok(CorpusEntry {
        name: "Nprime",
        description: "c^n w with a non-Dyck prefix of length n",
        automaton,
        table: Some(resolver.clone()),
        resolver: Some(Arc::new(resolver)),
        reference: ref_n_prime,
    })
}

fn ref_n_prime(w: &[char]) -> bool {
    let n = w.iter().take_while(|c| **c == 'c').count();
    let rest = &w[n..];
    if rest.len() < n || rest.contains(&'c') {
        return false;
    }
    let ones = rest[..n].iter().filter(|c| **c == '1').count();
    n - ones < ones
}

// {a,b}* · a^n b^n with n > 0.
fn e_lang() -> Result<CorpusEntry> {
    let mut b = PaBuilder::new(alphabet(&["a", "b"]));
    b.state("g");
    b.state("s1");
    b.accept("s2");
    b.edge("g", "a", &[0, 0], "g")
        .edge("g", "b", &[0, 0], "g")
        .edge("g", "a", &[1, 0], "s1")
        .edge("s1", "a", &[1, 0], "s1")
        .edge("s1", "b", &[0, 1], "s2")
        .edge("s2", "b", &[0, 1], "s2");
    let c = constraint(2, vec![vec![Atom::linear(vec![1, -1], Relation::Eq, 0)]])?;
    Ok(CorpusEntry {
        name: "E",
        description: "{a,b}* a^n b^n with n > 0",
        automaton: b.build(c)?,
        resolver: None,
        table: None,
        reference: ref_e,
    })
}

fn ref_e(w: &[char]) -> bool {
    let n = w.iter().rev().take_while(|c| **c == 'b').count();
    let before = &w[..w.len() - n];
    n > 0 && before.len() >= n && before[before.len() - n..].iter().all(|c| *c == 'a')
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pa::member;

    fn word(e: &CorpusEntry, s: &str) -> Vec<Letter> {
        e.alphabet().parse_word(s).unwrap()
    }

    #[test]
    fn doubling_examples() {
        let d = corpus_get("D").unwrap();
        assert!(member(&d.automaton, &word(&d, "cdcd")).unwrap());
        assert!(!member(&d.automaton, &word(&d, "cdccd")).unwrap());
        assert!(!reference_member(&d, &word(&d, "dcd")).unwrap());
        assert!(reference_member(&d, &word(&d, "cdcd")).unwrap());
    }

    #[test]
    fn small_examples() {
        let ex1 = corpus_get("ex1").unwrap();
        assert!(member(&ex1.automaton, &[]).unwrap());
        let np = corpus_get("Nprime").unwrap();
        assert!(member(&np.automaton, &word(&np, "c10")).unwrap());
        assert!(reference_member(&np, &word(&np, "c10")).unwrap());
        let e = corpus_get("E").unwrap();
        assert!(reference_member(&e, &word(&e, "abaabb")).unwrap());
        assert!(!reference_member(&e, &word(&e, "aba")).unwrap());
        let nd = corpus_get("nonDyck").unwrap();
        assert!(!reference_member(&nd, &[]).unwrap());
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(corpus_get("F"), Err(Error::UnknownName(_))));
    }
}
