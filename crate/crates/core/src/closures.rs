//! Union, intersection and inverse homomorphic images with resolver
//! transfer, and membership in the commutative closure.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Letter, Word};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::hd::{MappedResolver, PairResolver, Resolver, ResolverSession, Totalize};
use crate::pa::{complete, is_empty_with, member, Emptiness, ParikhAutomaton, StateId, Transition};
use crate::semilinear::{Atom, ConstraintSet, Relation, SemilinearSet};
use crate::vector::{self, VectorN};

fn same_alphabet(a1: &ParikhAutomaton, a2: &ParikhAutomaton) -> Result<()> {
    if a1.alphabet() != a2.alphabet() {
        return Err(Error::invalid(format!(
            "alphabets differ: {{{}}} vs {{{}}}",
            a1.alphabet().tokens().join(","),
            a2.alphabet().tokens().join(",")
        )));
    }
    Ok(())
}

fn fresh_name(states: &[String], base: &str) -> String {
    let mut name = base.to_string();
    while states.contains(&name) {
        name.push('\'');
    }
    name
}

/// A copy of the initial state without incoming transitions becomes the
/// new initial state. Returns the map from transitions leaving the old
/// initial state to their copies.
pub fn clone_initial(a: &ParikhAutomaton) -> (ParikhAutomaton, HashMap<usize, usize>) {
    let mut states = a.state_names().to_vec();
    let init = states.len();
    states.push(fresh_name(&states, &format!("{}^", a.state_name(a.initial()))));
    let mut transitions = a.transitions().to_vec();
    let mut map = HashMap::new();
    for (i, t) in a.transitions().iter().enumerate() {
        if t.source == a.initial() {
            map.insert(i, transitions.len());
            transitions.push(Transition {
                source: init,
                ..t.clone()
            });
        }
    }
    let mut accepting = a.accepting_states();
    if a.is_accepting(a.initial()) {
        accepting.push(init);
    }
    let cloned = ParikhAutomaton::new(
        a.alphabet().clone(),
        states,
        init,
        accepting,
        transitions,
        a.acceptance().clone(),
    )
    .expect("cloning the initial state preserves validity");
    (cloned, map)
}

/// A synchronized product together with the table from component
/// transition pairs to product transitions.
#[derive(Debug, Clone)]
pub struct Product {
    pub automaton: ParikhAutomaton,
    pub left: ParikhAutomaton,
    pub right: ParikhAutomaton,
    pub index: HashMap<(usize, usize), usize>,
    left_first: HashMap<usize, usize>,
    right_first: HashMap<usize, usize>,
    left_source: ParikhAutomaton,
    right_source: ParikhAutomaton,
    totalize: bool,
}

impl Product {
    /// Combines resolvers of the two input automata into one for the
    /// product.
    pub fn resolver(&self, r1: Arc<dyn Resolver>, r2: Arc<dyn Resolver>) -> PairResolver {
        let wrap =
            |r: Arc<dyn Resolver>, source: &ParikhAutomaton, first: &HashMap<usize, usize>| -> Arc<dyn Resolver> {
                let mapped = MappedResolver {
                    inner: r,
                    source: source.clone(),
                    first: first.clone(),
                    rest: HashMap::new(),
                };
                if self.totalize {
                    Arc::new(Totalize { inner: mapped })
                } else {
                    Arc::new(mapped)
                }
            };
        PairResolver {
            left: wrap(r1, &self.left_source, &self.left_first),
            right: wrap(r2, &self.right_source, &self.right_first),
            left_automaton: self.left.clone(),
            right_automaton: self.right.clone(),
            index: self.index.clone(),
        }
    }
}

/// Product over the reachable state pairs. `label` gives the vector of a
/// product transition from the two component transitions.
fn product<F>(
    a1: &ParikhAutomaton,
    a2: &ParikhAutomaton,
    accepting: impl Fn(StateId, StateId) -> bool,
    label: F,
    acceptance: SemilinearSet,
) -> Result<(ParikhAutomaton, HashMap<(usize, usize), usize>)>
where
    F: Fn(&Transition, &Transition) -> VectorN,
{
    let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut pairs = vec![(a1.initial(), a2.initial())];
    ids.insert(pairs[0], 0);
    let mut queue = VecDeque::from([0usize]);
    let mut transitions = Vec::new();
    let mut index = HashMap::new();
    while let Some(s) = queue.pop_front() {
        let (q1, q2) = pairs[s];
        for l in a1.alphabet().letters() {
            for &t1 in a1.successors(q1, l) {
                for &t2 in a2.successors(q2, l) {
                    let (tr1, tr2) = (a1.transition(t1), a2.transition(t2));
                    let key = (tr1.target, tr2.target);
                    let target = *ids.entry(key).or_insert_with(|| {
                        pairs.push(key);
                        queue.push_back(pairs.len() - 1);
                        pairs.len() - 1
                    });
                    index.insert((t1, t2), transitions.len());
                    transitions.push(Transition {
                        source: s,
                        letter: l,
                        vector: label(tr1, tr2),
                        target,
                    });
                }
            }
        }
    }
    let names = pairs
        .iter()
        .map(|(q1, q2)| format!("({},{})", a1.state_name(*q1), a2.state_name(*q2)))
        .collect();
    let acc = (0..pairs.len())
        .filter(|s| accepting(pairs[*s].0, pairs[*s].1))
        .collect();
    let automaton = ParikhAutomaton::new(a1.alphabet().clone(), names, 0, acc, transitions, acceptance)?;
    Ok((automaton, index))
}

/// Even and positive. Every letter adds 1 or 2, so a zero flag means the
/// empty word, which the zero part of the union decides.
fn even_flag() -> SemilinearSet {
    let even = Atom::congruence(vec![1], 2, 0).expect("modulus 2");
    let moved = Atom::linear(vec![1], Relation::Ge, 1);
    SemilinearSet::Constraint(ConstraintSet::conjunction(1, vec![even, moved]).expect("dimension 1"))
}

/// Union with parity flags recording whether each simulated run currently
/// sits in an accepting state. Every product state accepts; the flags
/// decide which side's acceptance set applies.
pub fn union_pa(a1: &ParikhAutomaton, a2: &ParikhAutomaton) -> Result<Product> {
    same_alphabet(a1, a2)?;
    let (c1, first1) = clone_initial(a1);
    let (c2, first2) = clone_initial(a2);
    let (p1, p2) = (complete(&c1), complete(&c2));
    let (d1, d2) = (a1.dim(), a2.dim());
    let flag = |a: &ParikhAutomaton, t: &Transition| -> u64 {
        let before = t.source != a.initial() && a.is_accepting(t.source);
        let entered = t.source == a.initial();
        if (entered && a.is_accepting(t.target)) || (!entered && before == a.is_accepting(t.target)) {
            2
        } else {
            1
        }
    };
    let left = SemilinearSet::product_all(vec![
        even_flag(),
        SemilinearSet::full(1)?,
        a1.acceptance().clone(),
        SemilinearSet::full(d2)?,
    ])?;
    let right = SemilinearSet::product_all(vec![
        SemilinearSet::full(1)?,
        even_flag(),
        SemilinearSet::full(d1)?,
        a2.acceptance().clone(),
    ])?;
    let dim = 2 + d1 + d2;
    let mut parts = vec![left, right];
    if member(a1, &[])? || member(a2, &[])? {
        parts.push(SemilinearSet::zero(dim)?);
    }
    let acceptance = SemilinearSet::union_all(dim, parts)?;
    let (automaton, index) = product(
        &p1,
        &p2,
        |_, _| true,
        |t1, t2| {
            let mut v = vec![flag(&p1, t1), flag(&p2, t2)];
            v.extend_from_slice(&t1.vector);
            v.extend_from_slice(&t2.vector);
            v
        },
        acceptance,
    )?;
    Ok(Product {
        automaton,
        left: p1,
        right: p2,
        index,
        left_first: first1,
        right_first: first2,
        left_source: a1.clone(),
        right_source: a2.clone(),
        totalize: true,
    })
}

/// Synchronized product with concatenated vectors and `C1·C2`.
pub fn intersect_pa(a1: &ParikhAutomaton, a2: &ParikhAutomaton) -> Result<Product> {
    same_alphabet(a1, a2)?;
    let acceptance = SemilinearSet::product(a1.acceptance().clone(), a2.acceptance().clone())?;
    let (automaton, index) = product(
        a1,
        a2,
        |q1, q2| a1.is_accepting(q1) && a2.is_accepting(q2),
        |t1, t2| vector::concat(&t1.vector, &t2.vector),
        acceptance,
    )?;
    Ok(Product {
        automaton,
        left: a1.clone(),
        right: a2.clone(),
        index,
        left_first: HashMap::new(),
        right_first: HashMap::new(),
        left_source: a1.clone(),
        right_source: a2.clone(),
        totalize: false,
    })
}

/// `h: Σ* → Γ*`, given by the image of each letter of Σ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homomorphism {
    pub source: Alphabet,
    pub target: Alphabet,
    pub images: Vec<Word>,
}

impl Homomorphism {
    pub fn new(source: Alphabet, target: Alphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::invalid("homomorphism must map every source letter"));
        }
        for w in &images {
            target.check_word(w)?;
        }
        Ok(Homomorphism { source, target, images })
    }

    /// Parses `a=bb` style pairs. The source alphabet is the set of mapped
    /// letters in the order given; an empty right side maps to ε.
    pub fn parse(target: &Alphabet, maps: &[String]) -> Result<Self> {
        let mut letters = Vec::new();
        let mut images = Vec::new();
        for m in maps {
            let (lhs, rhs) = m
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected letter=word, found {m:?}")))?;
            letters.push(lhs.trim().to_string());
            images.push(target.parse_word(rhs.trim())?);
        }
        Homomorphism::new(Alphabet::new(letters)?, target.clone(), images)
    }

    pub fn image(&self, letter: Letter) -> &[Letter] {
        &self.images[letter.0]
    }

    pub fn apply(&self, w: &[Letter]) -> Word {
        w.iter().flat_map(|l| self.images[l.0].iter().copied()).collect()
    }
}

/// Automaton over Σ reading `a` wherever the input automaton can read
/// `h(a)`, with the summed vector of the path. Same states and acceptance.
#[derive(Debug, Clone)]
pub struct InverseImage {
    pub automaton: ParikhAutomaton,
    pub source: ParikhAutomaton,
    pub hom: Homomorphism,
    index: HashMap<(StateId, Letter, VectorN, StateId), usize>,
}

pub fn inverse_hom(a: &ParikhAutomaton, h: &Homomorphism) -> Result<InverseImage> {
    if a.alphabet() != &h.target {
        return Err(Error::invalid(
            "homomorphism target differs from the automaton alphabet",
        ));
    }
    let mut transitions = Vec::new();
    let mut index = HashMap::new();
    for p in 0..a.num_states() {
        for l in h.source.letters() {
            // (state, image) pairs reachable from p on h(l)
            let mut frontier = vec![(p, vector::zeros(a.dim()))];
            for &b in h.image(l) {
                let mut next = Vec::new();
                for (q, v) in &frontier {
                    for &t in a.successors(*q, b) {
                        let tr = a.transition(t);
                        let item = (tr.target, vector::add(v, &tr.vector));
                        if !next.contains(&item) {
                            next.push(item);
                        }
                    }
                }
                frontier = next;
            }
            for (q, v) in frontier {
                index.insert((p, l, v.clone(), q), transitions.len());
                transitions.push(Transition {
                    source: p,
                    letter: l,
                    vector: v,
                    target: q,
                });
            }
        }
    }
    let automaton = ParikhAutomaton::new(
        h.source.clone(),
        a.state_names().to_vec(),
        a.initial(),
        a.accepting_states(),
        transitions,
        a.acceptance().clone(),
    )?;
    Ok(InverseImage {
        automaton,
        source: a.clone(),
        hom: h.clone(),
        index,
    })
}

impl InverseImage {
    /// Transfers a resolver of the input automaton: the letter `a` is
    /// answered by the transition summarizing the resolver's run on `h(a)`.
    pub fn resolver(&self, r: Arc<dyn Resolver>) -> InverseResolver {
        InverseResolver {
            inner: r,
            image: self.clone(),
        }
    }
}

pub struct InverseResolver {
    inner: Arc<dyn Resolver>,
    image: InverseImage,
}

struct InverseSession<'a> {
    inner: Box<dyn ResolverSession + 'a>,
    image: &'a InverseImage,
    state: StateId,
}

impl ResolverSession for InverseSession<'_> {
    fn next(&mut self, letter: Letter) -> Option<usize> {
        let src = &self.image.source;
        let mut q = self.state;
        let mut v = vector::zeros(src.dim());
        for &b in self.image.hom.image(letter) {
            let t = self.inner.next(b)?;
            let tr = src.transition(t);
            if tr.source != q || tr.letter != b {
                return None;
            }
            q = tr.target;
            vector::add_assign(&mut v, &tr.vector);
        }
        let t = *self.image.index.get(&(self.state, letter, v, q))?;
        self.state = q;
        Some(t)
    }
}

impl Resolver for InverseResolver {
    fn start<'a>(&'a self, _a: &'a ParikhAutomaton) -> Box<dyn ResolverSession + 'a> {
        Box::new(InverseSession {
            inner: self.inner.start(&self.image.source),
            image: &self.image,
            state: self.image.source.initial(),
        })
    }
}

/// Whether some accepted word has the same Parikh image as `w`.
/// Each transition also counts its letter; the counts are pinned to those
/// of `w` and the result is handed to the emptiness check.
pub fn commutative_member(a: &ParikhAutomaton, w: &[Letter], budget: &mut Budget) -> Result<bool> {
    a.alphabet().check_word(w)?;
    let k = a.alphabet().len();
    let mut counts = vec![0i64; k];
    for l in w {
        counts[l.0] += 1;
    }
    let transitions = a
        .transitions()
        .iter()
        .map(|t| Transition {
            vector: vector::concat(&t.vector, &vector::unit(k, t.letter.0)),
            ..t.clone()
        })
        .collect();
    let pin = (0..k)
        .map(|i| {
            Atom::linear(
                vector::unit(k, i).iter().map(|x| *x as i64).collect(),
                Relation::Eq,
                counts[i],
            )
        })
        .collect();
    let acceptance = SemilinearSet::product(
        a.acceptance().clone(),
        SemilinearSet::Constraint(ConstraintSet::conjunction(k, pin)?),
    )?;
    let counted = ParikhAutomaton::new(
        a.alphabet().clone(),
        a.state_names().to_vec(),
        a.initial(),
        a.accepting_states(),
        transitions,
        acceptance,
    )?;
    match is_empty_with(&counted, budget)? {
        Emptiness::Witness(_) => Ok(true),
        Emptiness::Empty => Ok(false),
        Emptiness::Unknown => Err(Error::Budget("commutative membership".into())),
    }
}
