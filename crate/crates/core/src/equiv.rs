//! Bounded language equivalence by joint enumeration.

use crate::alphabet::Word;
use crate::error::{Error, Result};
use crate::pa::{ForwardSet, ParikhAutomaton};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    /// Same members on every word up to this length.
    EqualToBound(usize),
    /// A shortest, then lexicographically least, word accepted by exactly one side.
    Counterexample(Word),
}

pub fn bounded_equiv(a1: &ParikhAutomaton, a2: &ParikhAutomaton, max_len: usize) -> Result<Equivalence> {
    if a1.alphabet().tokens() != a2.alphabet().tokens() {
        return Err(Error::invalid(format!(
            "alphabets differ: {} vs {}",
            a1.alphabet(),
            a2.alphabet()
        )));
    }
    let letters: Vec<_> = a1.alphabet().letters().collect();
    let mut layer = vec![(Vec::new(), ForwardSet::initial(a1), ForwardSet::initial(a2))];
    for len in 0..=max_len {
        for (w, f1, f2) in &layer {
            if f1.accepts(a1)? != f2.accepts(a2)? {
                return Ok(Equivalence::Counterexample(w.clone()));
            }
        }
        if len == max_len {
            break;
        }
        let mut next = Vec::with_capacity(layer.len() * letters.len());
        for (w, f1, f2) in &layer {
            // Both sides dead: every extension is rejected by both.
            if f1.is_empty() && f2.is_empty() {
                continue;
            }
            for &l in &letters {
                let mut w2 = w.clone();
                w2.push(l);
                next.push((w2, f1.advance(a1, l), f2.advance(a2, l)));
            }
        }
        layer = next;
    }
    Ok(Equivalence::EqualToBound(max_len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{corpus_all, corpus_get};
    use crate::pa::{eliminate_epsilon, EpsilonPA};

    #[test]
    fn reflexive() {
        for e in corpus_all() {
            let n = if e.alphabet().len() > 2 { 5 } else { 8 };
            assert_eq!(
                bounded_equiv(&e.automaton, &e.automaton, n).unwrap(),
                Equivalence::EqualToBound(n)
            );
        }
    }

    #[test]
    fn epsilon_embedding_round_trip() {
        let a = corpus_get("ex1").unwrap().automaton;
        let b = eliminate_epsilon(&EpsilonPA::from_pa(&a)).unwrap();
        assert_eq!(bounded_equiv(&a, &b, 8).unwrap(), Equivalence::EqualToBound(8));
    }

    #[test]
    fn ex1_and_non_dyck_differ() {
        use crate::closures::{inverse_hom, Homomorphism};
        use crate::pa::member;
        let a = corpus_get("ex1").unwrap().automaton;
        let b = corpus_get("nonDyck").unwrap().automaton;
        // ex1 is over {a,b}; read it over {0,1} with 0 -> a, 1 -> b.
        let h = Homomorphism::parse(a.alphabet(), &["0=a".into(), "1=b".into()]).unwrap();
        let a01 = inverse_hom(&a, &h).unwrap().automaton;
        // ε is in ex1 and not in nonDyck, so it is the first difference.
        assert_eq!(bounded_equiv(&a01, &b, 8).unwrap(), Equivalence::Counterexample(vec![]));
        let one = b.alphabet().parse_word("1").unwrap();
        assert_ne!(member(&a01, &one).unwrap(), member(&b, &one).unwrap());
    }

    #[test]
    fn alphabet_mismatch_is_an_error() {
        let a = corpus_get("ex1").unwrap().automaton;
        let b = corpus_get("nonDyck").unwrap().automaton;
        assert!(bounded_equiv(&a, &b, 3).is_err());
    }
}
