//! Acceptance criteria 1 to 10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::HashSet;
use std::process::Command;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use parikh_core::alphabet::words_up_to;
use parikh_core::closures::{intersect_pa, inverse_hom, union_pa, Homomorphism};
use parikh_core::corpus::{corpus_all, corpus_get, reference_member, CorpusEntry};
use parikh_core::format::{parse_document, Document};
use parikh_core::hd::{
    letter_game, pumping_check, pumping_decompose, validate_resolver, GameOutcome, Resolver, ResolverVerdict,
};
use parikh_core::pa::{
    eliminate_epsilon, is_deterministic, is_empty, is_finite, member, Emptiness, EpsilonPA, Finiteness,
};
use parikh_core::rbcm::{cm_accepts, examples, normalize, pa_to_rbcm, rbcm_to_epsilon_pa, Verdict};
use parikh_core::reductions::machines::{m_halt, m_loop};
use parikh_core::reductions::{build_safety_dpa, build_universality_hdpa, first_error, machines, minsky_run};
use parikh_core::{Budget, Letter, ParikhAutomaton, Word};

// Pinned bounds.
const FIDELITY_LEN: usize = 10;
const FIDELITY_LEN_3: usize = 8;
const RESOLVER_LEN: usize = 10;
const GAME_HORIZON: usize = 3;
const GAME_HORIZON_MAX: usize = 12;
const PUMP_WORDS: usize = 100;
const PUMP_SUFFIXES: usize = 50;
const PUMP_SUFFIX_MAX_LEN: usize = 6;
const PUMP_SEED: u64 = 0x5eed;
const CLOSURE_LEN: usize = 8;
const EPS_LEN: usize = 6;
/// ε-steps allowed per maximal ε-block in the direct-semantics oracle.
/// The suite's constants are small enough that 16 is never binding.
const EPS_BLOCK: usize = 16;
const RBCM_LEN: usize = 6;
const EMPTY_LEN: usize = 10;
const CENSUS_LEN: usize = 20;
const UNIVERSAL_LEN: usize = 7;
const SAFE_PREFIXES: usize = 20;
const ERROR_PREDICATE_LEN: usize = 5;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Debug>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| format!("{x:?}"))
}

fn entry(name: &str) -> CorpusEntry {
    corpus_get(name).expect("corpus entry")
}

fn criterion_1() -> Outcome {
    let mut total = 0;
    for en in corpus_all() {
        let max = if en.alphabet().len() > 2 {
            FIDELITY_LEN_3
        } else {
            FIDELITY_LEN
        };
        for w in words_up_to(en.alphabet().len(), max) {
            let got = e(member(&en.automaton, &w))?;
            let want = e(reference_member(&en, &w))?;
            check(got == want, || {
                format!(
                    "{} on {}: member {got}, reference {want}",
                    en.name,
                    en.alphabet().render(&w)
                )
            })?;
            total += 1;
        }
    }
    Ok(format!("{total} words agree"))
}

fn criterion_2() -> Outcome {
    let mut names = Vec::new();
    for en in corpus_all() {
        let Some(r) = &en.resolver else { continue };
        let v = e(validate_resolver(&en.automaton, &**r, RESOLVER_LEN))?;
        check(v == ResolverVerdict::ValidToBound(RESOLVER_LEN), || {
            format!("{}: {v:?}", en.name)
        })?;
        names.push(en.name);
    }
    Ok(format!("valid to length {RESOLVER_LEN}: {}", names.join(", ")))
}

fn criterion_3() -> Outcome {
    let a = entry("E").automaton;
    match e(letter_game(&a, GAME_HORIZON))? {
        GameOutcome::AdamWins(s) => {
            check(s.depth() <= GAME_HORIZON_MAX, || {
                format!("strategy depth {}", s.depth())
            })?;
            Ok(format!(
                "Adam wins at horizon {GAME_HORIZON}, strategy depth {}",
                s.depth()
            ))
        }
        other => Err(format!("{other:?}")),
    }
}

fn random_word(rng: &mut ChaCha8Rng, letters: usize, len: usize) -> Word {
    (0..len).map(|_| Letter(rng.gen_range(0..letters))).collect()
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(PUMP_SEED);
    let mut summary = Vec::new();
    for en in corpus_all() {
        let Some(r) = &en.resolver else { continue };
        let k = en.alphabet().len();
        let mut ell = 0;
        for _ in 0..PUMP_WORDS {
            let (_, _, l) = parikh_core::hd::pumping_parameters(&en.automaton);
            ell = l;
            let len = l + 1 + rng.gen_range(0..8);
            let w = random_word(&mut rng, k, len);
            let dec = e(pumping_decompose(&en.automaton, &**r, &w))?;
            check(dec.sizes_ok(), || {
                format!("{}: size constraints fail for {}", en.name, en.alphabet().render(&w))
            })?;
            check(dec.assemble(1, 1, &dec.z) == w, || {
                format!("{}: decomposition does not reassemble", en.name)
            })?;
            let suffixes: Vec<Word> = (0..PUMP_SUFFIXES)
                .map(|_| {
                    let n = rng.gen_range(0..=PUMP_SUFFIX_MAX_LEN);
                    random_word(&mut rng, k, n)
                })
                .collect();
            let bad = e(pumping_check(&en.automaton, &dec, &suffixes))?;
            check(bad.is_empty(), || format!("{}: {} violations", en.name, bad.len()))?;
        }
        summary.push(format!("{} (ℓ={ell})", en.name));
    }
    Ok(format!(
        "{PUMP_WORDS} words each, no violations: {}",
        summary.join(", ")
    ))
}

struct Named {
    name: String,
    automaton: ParikhAutomaton,
    resolver: Option<Arc<dyn Resolver>>,
}

fn named(name: &str) -> Named {
    let en = entry(name);
    Named {
        name: name.into(),
        automaton: en.automaton,
        resolver: en.resolver,
    }
}

/// nonDyck read over {a,b}, so it pairs with the {a,b} entries.
fn non_dyck_ab() -> Result<Named, String> {
    let nd = entry("nonDyck");
    let h = e(Homomorphism::parse(nd.alphabet(), &["a=0".into(), "b=1".into()]))?;
    let inv = e(inverse_hom(&nd.automaton, &h))?;
    let r = Arc::new(inv.resolver(nd.resolver.clone().unwrap())) as Arc<dyn Resolver>;
    Ok(Named {
        name: "nonDyck[ab]".into(),
        automaton: inv.automaton,
        resolver: Some(r),
    })
}

fn resolver_ok(a: &ParikhAutomaton, r: &dyn Resolver, len: usize) -> Result<(), String> {
    let v = e(validate_resolver(a, r, len))?;
    check(v == ResolverVerdict::ValidToBound(len), || format!("{v:?}"))
}

fn criterion_5() -> Outcome {
    let pairs: Vec<(Named, Named)> = vec![
        (named("ex1"), named("ex1")),
        (named("ex1"), named("E")),
        (named("E"), named("ex1")),
        (named("E"), named("E")),
        (named("nonDyck"), named("nonDyck")),
        (named("D"), named("D")),
        (named("Eprime"), named("Eprime")),
        (named("Nprime"), named("Nprime")),
        (named("ex1"), non_dyck_ab()?),
        (non_dyck_ab()?, named("E")),
    ];
    let mut resolvers = 0;
    for (l, r) in &pairs {
        let tag = format!("{} / {}", l.name, r.name);
        let u = e(union_pa(&l.automaton, &r.automaton))?;
        let i = e(intersect_pa(&l.automaton, &r.automaton))?;
        let alpha = l.automaton.alphabet();
        // x -> first·second, y -> second
        let toks = alpha.tokens();
        let h = e(Homomorphism::parse(
            alpha,
            &[format!("x={} {}", toks[0], toks[1]), format!("y={}", toks[1])],
        ))?;
        let inv = e(inverse_hom(&l.automaton, &h))?;
        for w in words_up_to(alpha.len(), CLOSURE_LEN) {
            let (ml, mr) = (e(member(&l.automaton, &w))?, e(member(&r.automaton, &w))?);
            check(e(member(&u.automaton, &w))? == (ml || mr), || {
                format!("{tag}: union on {}", alpha.render(&w))
            })?;
            check(e(member(&i.automaton, &w))? == (ml && mr), || {
                format!("{tag}: intersection on {}", alpha.render(&w))
            })?;
        }
        for w in words_up_to(2, CLOSURE_LEN) {
            let want = e(member(&l.automaton, &h.apply(&w)))?;
            check(e(member(&inv.automaton, &w))? == want, || {
                format!("{tag}: inverse image on {w:?}")
            })?;
        }
        if let (Some(r1), Some(r2)) = (&l.resolver, &r.resolver) {
            resolver_ok(&u.automaton, &u.resolver(r1.clone(), r2.clone()), CLOSURE_LEN)
                .map_err(|m| format!("{tag} union resolver: {m}"))?;
            resolver_ok(&i.automaton, &i.resolver(r1.clone(), r2.clone()), CLOSURE_LEN)
                .map_err(|m| format!("{tag} intersection resolver: {m}"))?;
            resolvers += 2;
        }
        if let Some(r1) = &l.resolver {
            resolver_ok(&inv.automaton, &inv.resolver(r1.clone()), CLOSURE_LEN)
                .map_err(|m| format!("{tag} inverse resolver: {m}"))?;
            resolvers += 1;
        }
    }
    Ok(format!(
        "{} pairs agree to length {CLOSURE_LEN}, {resolvers} combined resolvers valid",
        pairs.len()
    ))
}

/// Ten ε-automata. The first seven have ε-cycles; cycles marked `zero`
/// carry the zero vector.
const EPS_SUITE: [(&str, &str); 10] = [
    (
        "nonzero self-loop",
        "eps-parikh 1\nalphabet a\ndim 1\nstates p q\ninitial p\naccepting q\n\
         p eps 1 -> p\np a 0 -> q\nset constraint 1\n  clause x0 >= 2\nend\n",
    ),
    (
        "zero two-cycle",
        "eps-parikh 1\nalphabet a b\ndim 1\nstates p q\ninitial p\naccepting q\n\
         p eps 0 -> q\nq eps 0 -> p\np a 1 -> p\nq b 0 -> q\nset constraint 1\n  clause x0 = 1 mod 2\nend\n",
    ),
    (
        "nonzero two-cycle",
        "eps-parikh 1\nalphabet a b\ndim 2\nstates p q r\ninitial p\naccepting r\n\
         p eps 1 0 -> q\nq eps 0 1 -> p\np a 1 0 -> r\nr b 0 1 -> r\nset constraint 2\n  clause x0 - x1 = 0\nend\n",
    ),
    (
        "trailing nonzero loop",
        "eps-parikh 1\nalphabet a\ndim 1\nstates p f\ninitial p\naccepting f\n\
         p a 1 -> p\np eps 0 -> f\nf eps 1 -> f\nset constraint 1\n  clause x0 = 0 mod 3\nend\n",
    ),
    (
        "zero and nonzero loops",
        "eps-parikh 1\nalphabet a\ndim 2\nstates p q\ninitial p\naccepting q\n\
         p eps 0 0 -> p\np eps 1 0 -> q\nq a 0 1 -> q\nq eps 0 0 -> p\nset constraint 2\n  clause x0 <= 2 & x1 >= 1\nend\n",
    ),
    (
        "three-cycle",
        "eps-parikh 1\nalphabet a b\ndim 1\nstates p q r s\ninitial p\naccepting s\n\
         p eps 1 -> q\nq eps 0 -> r\nr eps 1 -> p\nr a 0 -> s\ns b 0 -> s\n\
         set constraint 1\n  clause x0 = 4\n  clause x0 = 1\nend\n",
    ),
    (
        "loop between letters",
        "eps-parikh 1\nalphabet a b\ndim 2\nstates p\ninitial p\naccepting p\n\
         p eps 1 0 -> p\np a 0 1 -> p\nset explicit 2\n  linear 0 0 | 1 1\nend\n",
    ),
    (
        "ε-only acceptance",
        "eps-parikh 1\nalphabet a\ndim 1\nstates p q\ninitial p\naccepting q\n\
         p eps 1 -> q\nq a 0 -> q\nset constraint 1\n  clause x0 >= 1\nend\n",
    ),
    (
        "ε bridge",
        "eps-parikh 1\nalphabet a b\ndim 1\nstates p q\ninitial p\naccepting p q\n\
         p a 1 -> p\np eps 0 -> q\nq b 1 -> q\nset constraint 1\n  clause x0 != 3\nend\n",
    ),
    (
        "ε after each letter",
        "eps-parikh 1\nalphabet a b\ndim 1\nstates p q\ninitial p\naccepting q\n\
         p a 0 -> q\nq eps 1 -> p\nq b 0 -> q\nset constraint 1\n  clause x0 = 1 mod 2\nend\n",
    ),
];

/// Direct ε-semantics: configurations `(state, vector)` after each letter,
/// closed under at most `EPS_BLOCK` ε-steps.
fn eps_oracle(a: &EpsilonPA, w: &[Letter]) -> bool {
    let close = |start: HashSet<(usize, Vec<u64>)>| {
        let mut all = start.clone();
        let mut frontier = start;
        for _ in 0..EPS_BLOCK {
            let mut next = HashSet::new();
            for (q, v) in &frontier {
                for t in a.transitions().iter().filter(|t| t.source == *q && t.letter.is_none()) {
                    let v2: Vec<u64> = v.iter().zip(&t.vector).map(|(x, y)| x + y).collect();
                    if all.insert((t.target, v2.clone())) {
                        next.insert((t.target, v2));
                    }
                }
            }
            frontier = next;
        }
        all
    };
    let mut cur = close(HashSet::from([(a.initial(), vec![0; a.dim()])]));
    for &l in w {
        let mut next = HashSet::new();
        for (q, v) in &cur {
            for t in a.transitions().iter().filter(|t| t.source == *q && t.letter == Some(l)) {
                next.insert((t.target, v.iter().zip(&t.vector).map(|(x, y)| x + y).collect()));
            }
        }
        cur = close(next);
    }
    cur.iter()
        .any(|(q, v)| a.is_accepting(*q) && a.acceptance().contains(v).unwrap())
}

fn criterion_6() -> Outcome {
    for (name, text) in EPS_SUITE {
        let Document::Epsilon(eps) = e(parse_document(text))? else {
            return Err(format!("{name}: not an ε-automaton"));
        };
        let a = e(eliminate_epsilon(&eps))?;
        for w in words_up_to(eps.alphabet().len(), EPS_LEN) {
            let want = eps_oracle(&eps, &w);
            check(e(member(&a, &w))? == want, || {
                format!("{name} on {}: expected {want}", eps.alphabet().render(&w))
            })?;
        }
    }
    Ok(format!("{} ε-automata agree to length {EPS_LEN}", EPS_SUITE.len()))
}

fn criterion_7() -> Outcome {
    for (name, m) in examples::suite() {
        let a = e(normalize(&m)
            .and_then(|n| rbcm_to_epsilon_pa(&n))
            .and_then(|x| eliminate_epsilon(&x)))?;
        for w in words_up_to(m.alphabet().len(), RBCM_LEN) {
            let out = e(cm_accepts(&m, &w, &mut Budget::default()))?;
            check(out.verdict != Verdict::Unknown, || {
                format!("{name}: interpreter budget")
            })?;
            let want = out.verdict == Verdict::Accept;
            check(e(member(&a, &w))? == want, || {
                format!("{name} on {}: machine says {want}", m.alphabet().render(&w))
            })?;
        }
    }
    for en in corpus_all() {
        let sim = e(pa_to_rbcm(&en.automaton))?;
        for w in words_up_to(en.alphabet().len(), RBCM_LEN) {
            let out = e(cm_accepts(&sim.machine, &w, &mut Budget::default()))?;
            let want = e(member(&en.automaton, &w))?;
            check(
                out.verdict == if want { Verdict::Accept } else { Verdict::Reject },
                || {
                    format!(
                        "{} on {}: machine {:?}, automaton {want}",
                        en.name,
                        en.alphabet().render(&w),
                        out.verdict
                    )
                },
            )?;
        }
    }
    Ok(format!(
        "{} machines through the ε pipeline and {} corpus automata through the simulation, to length {RBCM_LEN}",
        examples::suite().len(),
        corpus_all().len()
    ))
}

/// Text-format automata for the decision procedures; with the corpus they
/// make twenty.
const DECISION_SUITE: [(&str, &str); 14] = [
    ("a-loop x=5", "alphabet a\ndim 1\nstates p\ninitial p\naccepting p\np a 1 -> p\nset constraint 1\n  clause x0 = 5\nend\n"),
    ("a-loop odd", "alphabet a\ndim 1\nstates p\ninitial p\naccepting p\np a 1 -> p\nset constraint 1\n  clause x0 = 1 mod 2\nend\n"),
    ("no accepting state", "alphabet a\ndim 1\nstates p\ninitial p\naccepting\np a 1 -> p\nset constraint 1\n  clause true\nend\n"),
    (
        "detached cycle",
        "alphabet a b c\ndim 2\nstates p f r\ninitial p\naccepting f\np a 0 0 -> f\np c 0 1 -> r\nr b 1 0 -> r\nr c 0 0 -> f\n\
         set constraint 2\n  clause x0 >= 1 & x1 = 0\nend\n",
    ),
    ("false constraint", "alphabet a b\ndim 1\nstates p\ninitial p\naccepting p\np a 1 -> p\np b 0 -> p\nset constraint 1\nend\n"),
    (
        "ab or ba",
        "alphabet a b\ndim 1\nstates p q r f\ninitial p\naccepting f\np a 0 -> q\nq b 0 -> f\np b 0 -> r\nr a 0 -> f\n\
         set constraint 1\n  clause true\nend\n",
    ),
    (
        "a^n b^n, n<=3",
        "alphabet a b\ndim 2\nstates p q\ninitial p\naccepting p q\np a 1 0 -> p\np b 0 1 -> q\nq b 0 1 -> q\n\
         set constraint 2\n  clause x0 - x1 = 0 & x0 <= 3\nend\n",
    ),
    (
        "a^2m b^m",
        "alphabet a b\ndim 2\nstates p q\ninitial p\naccepting p q\np a 1 0 -> p\np b 0 1 -> q\nq b 0 1 -> q\n\
         set constraint 2\n  clause x0 - 2x1 = 0\nend\n",
    ),
    (
        "more a than b",
        "alphabet a b\ndim 2\nstates p\ninitial p\naccepting p\np a 1 0 -> p\np b 0 1 -> p\nset constraint 2\n  clause x0 - x1 > 0\nend\n",
    ),
    (
        "free b loop",
        "alphabet a b\ndim 1\nstates p\ninitial p\naccepting p\np a 1 -> p\np b 0 -> p\nset constraint 1\n  clause x0 <= 2\nend\n",
    ),
    (
        "difference mod 3",
        "alphabet a b\ndim 2\nstates p\ninitial p\naccepting p\np a 1 0 -> p\np b 0 1 -> p\nset constraint 2\n  clause x0 - x1 = 0 mod 3\nend\n",
    ),
    (
        "seven a three b",
        "alphabet a b\ndim 2\nstates p\ninitial p\naccepting p\np a 1 0 -> p\np b 0 1 -> p\n\
         set constraint 2\n  clause x0 = 7 & x1 = 3\nend\n",
    ),
    (
        "product set",
        "alphabet a b\ndim 2\nstates p\ninitial p\naccepting p\np a 1 0 -> p\np b 0 1 -> p\n\
         set product\n  set constraint 1\n    clause x0 >= 2\n  end\n  set constraint 1\n    clause x0 = 1\n  end\nend\n",
    ),
    (
        "union {1,3}",
        "alphabet a\ndim 1\nstates p\ninitial p\naccepting p\np a 1 -> p\n\
         set union 1\n  set explicit 1\n    linear 1\n  end\n  set explicit 1\n    linear 3\n  end\nend\n",
    ),
];

/// Lengths `n ≤ max` at which some run of length `n` ends in an accepting
/// configuration. Layers are sets of `(state, vector)`, independent of words.
fn member_lengths(a: &ParikhAutomaton, max: usize) -> Vec<bool> {
    let mut layer: HashSet<(usize, Vec<u64>)> = HashSet::from([(a.initial(), vec![0; a.dim()])]);
    let mut out = Vec::new();
    for n in 0..=max {
        out.push(layer.iter().any(|(q, v)| a.accepts_config(*q, v).unwrap()));
        if n == max {
            break;
        }
        let mut next = HashSet::new();
        for (q, v) in &layer {
            for t in a.transitions().iter().filter(|t| t.source == *q) {
                next.insert((
                    t.target,
                    v.iter().zip(&t.vector).map(|(x, y)| x + y).collect::<Vec<u64>>(),
                ));
            }
        }
        layer = next;
    }
    out
}

fn criterion_8() -> Outcome {
    let mut suite: Vec<(String, ParikhAutomaton)> = corpus_all()
        .into_iter()
        .map(|c| (c.name.to_string(), c.automaton))
        .collect();
    for (name, body) in DECISION_SUITE {
        let (a, _) = e(parikh_core::format::parse_pa(&format!("parikh 1\n{body}")))?;
        suite.push((name.to_string(), a));
    }
    check(suite.len() == 20, || format!("suite has {} automata", suite.len()))?;
    let (mut empties, mut finites) = (0, 0);
    for (name, a) in &suite {
        let lengths = member_lengths(a, CENSUS_LEN);
        let nonempty = lengths[..=EMPTY_LEN].iter().any(|b| *b);
        let long = lengths[EMPTY_LEN + 1..].iter().any(|b| *b);
        match e(is_empty(a))? {
            Emptiness::Empty => check(!nonempty, || format!("{name}: reported empty"))?,
            Emptiness::Witness(w) => {
                check(nonempty, || format!("{name}: witness but brute force finds none"))?;
                check(e(member(a, &w))?, || format!("{name}: witness rejected"))?;
            }
            Emptiness::Unknown => return Err(format!("{name}: emptiness unknown")),
        }
        match e(is_finite(a))? {
            Finiteness::Finite => check(!long, || format!("{name}: reported finite"))?,
            Finiteness::Infinite(c) => {
                check(long, || {
                    format!("{name}: reported infinite, census finds nothing past {EMPTY_LEN}")
                })?;
                for lambda in 0..3 {
                    check(e(member(a, &c.pumped(a, lambda)))?, || {
                        format!("{name}: pumped word {lambda} rejected")
                    })?;
                }
            }
            Finiteness::Unknown => return Err(format!("{name}: finiteness unknown")),
        }
        empties += usize::from(!nonempty);
        finites += usize::from(!long);
    }
    Ok(format!("20 automata agree ({empties} empty, {finites} finite)"))
}

fn criterion_9() -> Outcome {
    let halt = m_halt();
    let art = e(build_universality_hdpa(&halt))?;
    let first_non_member = words_up_to(halt.len(), 4).find(|w| !member(&art.automaton, w).unwrap());
    let w01 = e(halt.alphabet().parse_word("01"))?;
    check(first_non_member.as_ref() == Some(&w01), || {
        format!("M_halt: first non-member {first_non_member:?}")
    })?;

    let lp = m_loop();
    let art = e(build_universality_hdpa(&lp))?;
    for w in words_up_to(lp.len(), UNIVERSAL_LEN) {
        check(e(member(&art.automaton, &w))?, || {
            format!("M_loop: {} rejected", lp.alphabet().render(&w))
        })?;
    }
    let safety = e(build_safety_dpa(&lp))?;
    let proj = minsky_run(&lp, SAFE_PREFIXES).projection();
    for n in 1..=SAFE_PREFIXES {
        check(e(member(&safety, &proj[..n]))?, || {
            format!("M_loop: safety rejects prefix {n}")
        })?;
    }

    let mut checked = 0;
    for (name, m) in machines::suite() {
        let proj = minsky_run(&m, 100).projection();
        for w in words_up_to(m.len(), ERROR_PREDICATE_LEN) {
            if w.first() != Some(&Letter(0)) {
                continue;
            }
            let clean = e(first_error(&m, &w))?.is_none();
            check(clean == proj.starts_with(&w), || {
                format!("{name}: error predicate vs projection on {w:?}")
            })?;
            checked += 1;
        }
    }
    Ok(format!(
        "M_halt witness 01, M_loop universal to {UNIVERSAL_LEN} and safe, {checked} words for the error predicate"
    ))
}

fn criterion_10() -> Outcome {
    for (name, m) in machines::suite() {
        check(is_deterministic(&e(build_safety_dpa(&m))?), || {
            format!("safety DPA for {name}")
        })?;
    }
    check(is_deterministic(&entry("ex1").automaton), || "ex1".into())?;

    let dir = std::env::temp_dir().join(format!("parikh-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|x| x.to_string())?;
    let six = dir.join("six.m");
    std::fs::write(&six, machines::m_six().to_string()).map_err(|x| x.to_string())?;
    let six = six.to_string_lossy().to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["corpus", "get", "D"],
        vec!["corpus", "get", "Eprime", "--json"],
        vec!["member", "corpus:E", "--word", "abaabb"],
        vec!["finite", "corpus:D"],
        vec!["equiv", "corpus:ex1", "corpus:E"],
        vec!["hd", "game", "corpus:E"],
        vec!["hd", "pump", "corpus:nonDyck", "--word", "0011001100110011001100110011"],
        vec!["product", "--op", "intersect", "corpus:ex1", "corpus:E"],
        vec!["minsky", "compile", &six, "--target", "universality"],
        vec!["minsky", "compile", &six, "--target", "regularity", "--json"],
        vec!["pa", "to-rbcm", "corpus:Nprime"],
    ];
    let bin = env!("CARGO_BIN_EXE_parikh");
    for args in &commands {
        let run = || Command::new(bin).args(args).output().map_err(|x| x.to_string());
        let (a, b) = (run()?, run()?);
        check(a.status.code() == b.status.code() && a.stdout == b.stdout, || {
            format!("`parikh {}` differs", args.join(" "))
        })?;
        check(!a.stdout.is_empty(), || {
            format!("`parikh {}` printed nothing", args.join(" "))
        })?;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!(
        "DPAs deterministic, {} CLI commands byte-identical",
        commands.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("corpus fidelity", criterion_1),
        ("resolvers validate", criterion_2),
        ("letter game on E", criterion_3),
        ("pumping", criterion_4),
        ("closure constructions", criterion_5),
        ("ε-elimination", criterion_6),
        ("counter machines", criterion_7),
        ("emptiness and finiteness", criterion_8),
        ("reductions", criterion_9),
        ("determinism", criterion_10),
    ];
    let results: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria.iter().map(|(_, f)| s.spawn(f)).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err("panicked".into())))
            .collect()
    });
    let mut failed = 0;
    for (i, ((name, _), r)) in criteria.iter().zip(&results).enumerate() {
        match r {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
