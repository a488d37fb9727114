//! `parikh`: command-line front end.
//!
//! Exit codes: 0 yes/success, 1 no, 2 unknown or budget exhausted, 3 input
//! error.

use std::io::{self, Read, Write};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use parikh_core::budget::DEFAULT_STEPS;
use parikh_core::closures::{commutative_member, intersect_pa, inverse_hom, union_pa, Homomorphism};
use parikh_core::corpus::{corpus_all, corpus_get};
use parikh_core::equiv::{bounded_equiv, Equivalence};
use parikh_core::format::{parse_document, Document};
use parikh_core::hd::{
    letter_game_with, pumping_check, pumping_decompose, validate_resolver, GameOutcome, Resolver, ResolverVerdict,
};
use parikh_core::pa::{eliminate_epsilon, is_empty_with, is_finite_with, member, Emptiness, EpsilonPA, Finiteness};
use parikh_core::rbcm::{
    cm_accepts, is_normal_form, normalize, pa_to_rbcm, rbcm_to_epsilon_pa, CounterMachine, Verdict,
};
use parikh_core::reductions::{
    build_pairing, build_regularity_hdpa, build_safety_dpa, build_universality_hdpa, collapse_alphabet,
    guard_decrements, minsky_run, restrict_first, MinskyMachine, MinskyRun, HASH,
};
use parikh_core::{alphabet::words_up_to, Alphabet, Budget, Error, ParikhAutomaton, Word};

#[derive(Parser)]
#[command(name = "parikh", version, about = "Parikh automata toolkit")]
struct Cli {
    /// Step budget for searches
    #[arg(long, global = true, default_value_t = DEFAULT_STEPS)]
    budget_steps: u64,
    /// Length bound for enumerations
    #[arg(long, global = true, default_value_t = 8)]
    max_len: usize,
    /// Print JSON instead of the line format
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

/// An input: a path, `-` for stdin, or `corpus:NAME`.
#[derive(Args)]
struct Input {
    #[arg(default_value = "-")]
    input: String,
}

#[derive(Args)]
struct WordInput {
    #[arg(default_value = "-")]
    input: String,
    /// Word to test; `ε` or an empty string for the empty word
    #[arg(long, short, allow_hyphen_values = true)]
    word: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Membership of a word
    Member(WordInput),
    /// Language emptiness
    Empty(Input),
    /// Language finiteness
    Finite(Input),
    /// Union or intersection of two automata
    Product {
        #[arg(long)]
        op: ProductOp,
        left: String,
        right: String,
    },
    /// Inverse homomorphic image
    Invhom {
        #[arg(default_value = "-")]
        input: String,
        /// `letter=word`, repeated; the image word is over the automaton alphabet
        #[arg(long = "map", required = true)]
        maps: Vec<String>,
    },
    /// Membership in the commutative closure
    CommMember(WordInput),
    /// Remove ε-transitions
    EpsEliminate(Input),
    /// History-determinism tools
    #[command(subcommand)]
    Hd(HdCmd),
    /// Reversal-bounded counter machines
    #[command(subcommand)]
    Rbcm(RbcmCmd),
    /// Automaton to machine translation
    #[command(subcommand)]
    Pa(PaCmd),
    /// Minsky machines and their compiled automata
    #[command(subcommand)]
    Minsky(MinskyCmd),
    /// Map every letter to a single one
    Collapse(Input),
    /// Pairing construction over `x/y` letters
    Pair(Input),
    /// Fix the first components of a pairing automaton to a word
    Restrict {
        #[arg(default_value = "-")]
        input: String,
        /// Space-separated first-component tokens
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Built-in automata
    #[command(subcommand)]
    Corpus(CorpusCmd),
    /// Compare two automata on all words up to --max-len
    Equiv { left: String, right: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProductOp {
    Union,
    Intersect,
}

#[derive(Subcommand)]
enum HdCmd {
    /// Check the attached resolver on all members up to --max-len
    Validate(Input),
    /// Bounded letter game
    Game {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long, default_value_t = 3)]
        horizon: usize,
    },
    /// Pumping decomposition of a word, checked against suffixes
    Pump {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long, short, allow_hyphen_values = true)]
        word: String,
        /// Suffix to check, repeated; default is every word up to length 3
        #[arg(long = "suffix", allow_hyphen_values = true)]
        suffixes: Vec<String>,
    },
}

#[derive(Subcommand)]
enum RbcmCmd {
    Run(WordInput),
    Normalize(Input),
    /// Translate to an automaton
    ToPa {
        #[arg(default_value = "-")]
        input: String,
        /// Print the intermediate ε-automaton
        #[arg(long)]
        keep_epsilon: bool,
    },
}

#[derive(Subcommand)]
enum PaCmd {
    ToRbcm(Input),
}

#[derive(Subcommand)]
enum MinskyCmd {
    Run {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    Compile {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long)]
        target: Target,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Safety,
    Universality,
    Regularity,
}

#[derive(Subcommand)]
enum CorpusCmd {
    List,
    Get { name: String },
}

enum Output {
    Doc(Document),
    /// Keyed fields, printed as `key: value` lines or one JSON object.
    Report(u8, Vec<(&'static str, Value)>),
}

fn yes_no(b: bool) -> u8 {
    if b {
        0
    } else {
        1
    }
}

fn result(code: u8) -> (&'static str, Value) {
    let r = match code {
        0 => "yes",
        1 => "no",
        _ => "unknown",
    };
    ("result", r.into())
}

fn report(code: u8, mut fields: Vec<(&'static str, Value)>) -> Output {
    fields.insert(0, result(code));
    Output::Report(code, fields)
}

struct Loaded {
    doc: Document,
    resolver: Option<Arc<dyn Resolver>>,
}

fn read_text(path: &str) -> Result<String, Error> {
    if path == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::InvalidInput(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{path}: {e}")))
    }
}

fn load(path: &str) -> Result<Loaded, Error> {
    if let Some(name) = path.strip_prefix("corpus:") {
        let e = corpus_get(name)?;
        return Ok(Loaded {
            doc: Document::Pa {
                automaton: e.automaton,
                resolver: e.table,
            },
            resolver: e.resolver,
        });
    }
    let doc = parse_document(&read_text(path)?).map_err(|e| match e {
        Error::Parse { line, column, message } => Error::Parse {
            line,
            column,
            message: format!("{path}: {message}"),
        },
        other => other,
    })?;
    let resolver = match &doc {
        Document::Pa {
            resolver: Some(table), ..
        } => Some(Arc::new(table.clone()) as Arc<dyn Resolver>),
        _ => None,
    };
    Ok(Loaded { doc, resolver })
}

/// The automaton of a document; ε-automata are eliminated first.
fn automaton(doc: &Document) -> Result<ParikhAutomaton, Error> {
    match doc {
        Document::Pa { automaton, .. } => Ok(automaton.clone()),
        Document::Epsilon(e) => eliminate_epsilon(e),
        Document::Machine(_) => Err(Error::InvalidInput("expected an automaton, found a machine".into())),
    }
}

fn load_pa(path: &str) -> Result<ParikhAutomaton, Error> {
    automaton(&load(path)?.doc)
}

fn machine(doc: Document) -> Result<CounterMachine, Error> {
    match doc {
        Document::Machine(m) => Ok(m),
        other => Err(Error::InvalidInput(format!(
            "expected a machine, found {}",
            other.kind()
        ))),
    }
}

fn pa_doc(automaton: ParikhAutomaton) -> Output {
    Output::Doc(Document::Pa {
        automaton,
        resolver: None,
    })
}

fn words(a: &Alphabet, ws: &[Word]) -> Value {
    Value::Array(ws.iter().map(|w| a.render(w).into()).collect())
}

fn minsky(path: &str) -> Result<MinskyMachine, Error> {
    read_text(path)?.parse()
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let mut budget = Budget::new(cli.budget_steps);
    let budget = &mut budget;
    Ok(match &cli.cmd {
        Cmd::Member(wi) => {
            let doc = load(&wi.input)?.doc;
            match &doc {
                Document::Pa { automaton: a, .. } => {
                    report(yes_no(member(a, &a.alphabet().parse_word(&wi.word)?)?), vec![])
                }
                Document::Epsilon(e) => {
                    let w = e.alphabet().parse_word(&wi.word)?;
                    report(yes_no(member(&eliminate_epsilon(e)?, &w)?), vec![])
                }
                Document::Machine(m) => machine_run(m, &wi.word, budget)?,
            }
        }
        Cmd::Empty(i) => {
            let a = load_pa(&i.input)?;
            match is_empty_with(&a, budget)? {
                Emptiness::Empty => report(0, vec![]),
                Emptiness::Witness(w) => report(1, vec![("witness", a.alphabet().render(&w).into())]),
                Emptiness::Unknown => report(2, vec![("reason", "budget exhausted".into())]),
            }
        }
        Cmd::Finite(i) => {
            let a = load_pa(&i.input)?;
            match is_finite_with(&a, budget)? {
                Finiteness::Finite => report(0, vec![]),
                Finiteness::Infinite(c) => report(
                    1,
                    vec![
                        ("witness", a.alphabet().render(&c.base).into()),
                        ("pumped", a.alphabet().render(&c.pumped(&a, 1)).into()),
                    ],
                ),
                Finiteness::Unknown => report(2, vec![("reason", "budget exhausted".into())]),
            }
        }
        Cmd::Product { op, left, right } => {
            let (l, r) = (load_pa(left)?, load_pa(right)?);
            let p = match op {
                ProductOp::Union => union_pa(&l, &r)?,
                ProductOp::Intersect => intersect_pa(&l, &r)?,
            };
            pa_doc(p.automaton)
        }
        Cmd::Invhom { input, maps } => {
            let a = load_pa(input)?;
            let h = Homomorphism::parse(a.alphabet(), maps)?;
            pa_doc(inverse_hom(&a, &h)?.automaton)
        }
        Cmd::CommMember(wi) => {
            let a = load_pa(&wi.input)?;
            let w = a.alphabet().parse_word(&wi.word)?;
            report(yes_no(commutative_member(&a, &w, budget)?), vec![])
        }
        Cmd::EpsEliminate(i) => {
            let e = match load(&i.input)?.doc {
                Document::Epsilon(e) => e,
                Document::Pa { automaton, .. } => EpsilonPA::from_pa(&automaton),
                Document::Machine(_) => return Err(Error::InvalidInput("expected an ε-automaton".into())),
            };
            pa_doc(eliminate_epsilon(&e)?)
        }
        Cmd::Hd(HdCmd::Validate(i)) => {
            let l = load(&i.input)?;
            let a = automaton(&l.doc)?;
            let r = l
                .resolver
                .ok_or_else(|| Error::InvalidInput("the input has no resolver".into()))?;
            match validate_resolver(&a, &*r, cli.max_len) {
                Ok(ResolverVerdict::ValidToBound(n)) => report(0, vec![("bound", n.into())]),
                Ok(ResolverVerdict::Counterexample(w)) => {
                    report(1, vec![("counterexample", a.alphabet().render(&w).into())])
                }
                Err(Error::ResolverFault { prefix, reason }) => report(
                    1,
                    vec![
                        ("fault_prefix", a.alphabet().render(&prefix).into()),
                        ("reason", reason.into()),
                    ],
                ),
                Err(e) => return Err(e),
            }
        }
        Cmd::Hd(HdCmd::Game { input, horizon }) => {
            let a = load_pa(input)?;
            match letter_game_with(&a, *horizon, budget)? {
                GameOutcome::AdamWins(s) => report(
                    1,
                    vec![
                        ("winner", "adam".into()),
                        ("depth", s.depth().into()),
                        ("horizon", (*horizon).into()),
                    ],
                ),
                GameOutcome::EveWinsToHorizon(h) => report(2, vec![("winner", "eve".into()), ("horizon", h.into())]),
                GameOutcome::Unknown => report(2, vec![("reason", "budget exhausted".into())]),
            }
        }
        Cmd::Hd(HdCmd::Pump { input, word, suffixes }) => {
            let l = load(input)?;
            let a = automaton(&l.doc)?;
            let r = l
                .resolver
                .ok_or_else(|| Error::InvalidInput("the input has no resolver".into()))?;
            let alpha = a.alphabet();
            let w = alpha.parse_word(word)?;
            let dec = pumping_decompose(&a, &*r, &w)?;
            let zs: Vec<Word> = if suffixes.is_empty() {
                words_up_to(alpha.len(), 3).collect()
            } else {
                suffixes.iter().map(|s| alpha.parse_word(s)).collect::<Result<_, _>>()?
            };
            let bad = pumping_check(&a, &dec, &zs)?;
            let bad_words: Vec<Word> = bad.iter().map(|v| v.suffix.clone()).collect();
            report(
                yes_no(bad.is_empty() && dec.sizes_ok()),
                vec![
                    ("p", dec.p.into()),
                    ("m", dec.m.into()),
                    ("ell", dec.ell.into()),
                    ("u", alpha.render(&dec.u).into()),
                    ("v", alpha.render(&dec.v).into()),
                    ("x", alpha.render(&dec.x).into()),
                    ("z", alpha.render(&dec.z).into()),
                    ("sizes_ok", dec.sizes_ok().into()),
                    ("suffixes", zs.len().into()),
                    ("violations", words(alpha, &bad_words)),
                ],
            )
        }
        Cmd::Rbcm(RbcmCmd::Run(wi)) => machine_run(&machine(load(&wi.input)?.doc)?, &wi.word, budget)?,
        Cmd::Rbcm(RbcmCmd::Normalize(i)) => Output::Doc(Document::Machine(normalize(&machine(load(&i.input)?.doc)?)?)),
        Cmd::Rbcm(RbcmCmd::ToPa { input, keep_epsilon }) => {
            let m = machine(load(input)?.doc)?;
            let m = if is_normal_form(&m) { m } else { normalize(&m)? };
            let e = rbcm_to_epsilon_pa(&m)?;
            if *keep_epsilon {
                Output::Doc(Document::Epsilon(e))
            } else {
                pa_doc(eliminate_epsilon(&e)?)
            }
        }
        Cmd::Pa(PaCmd::ToRbcm(i)) => Output::Doc(Document::Machine(pa_to_rbcm(&load_pa(&i.input)?)?.machine)),
        Cmd::Minsky(MinskyCmd::Run { input, steps }) => {
            let m = minsky(input)?;
            let run = minsky_run(&m, *steps);
            let last = *run.trace().last().expect("runs start with a configuration");
            let fields = vec![
                ("steps", (run.trace().len() - 1).into()),
                ("line", last.line.into()),
                ("counters", json!(last.counters)),
                ("projection", m.alphabet().render(&run.projection()).into()),
            ];
            match run {
                MinskyRun::Terminated(_) => report(0, fields),
                MinskyRun::Running(_) => report(2, fields),
            }
        }
        Cmd::Minsky(MinskyCmd::Compile { input, target }) => {
            let m = minsky(input)?;
            let m = if m.is_guarded() { m } else { guard_decrements(&m) };
            pa_doc(match target {
                Target::Safety => build_safety_dpa(&m)?,
                Target::Universality => build_universality_hdpa(&m)?.automaton,
                Target::Regularity => build_regularity_hdpa(&m)?.automaton,
            })
        }
        Cmd::Collapse(i) => pa_doc(collapse_alphabet(&load_pa(&i.input)?)?),
        Cmd::Pair(i) => pa_doc(build_pairing(&load_pa(&i.input)?)?),
        Cmd::Restrict { input, word } => {
            let a = load_pa(input)?;
            let u: Vec<String> = word.split_whitespace().map(str::to_owned).collect();
            pa_doc(restrict_first(&a, &u, HASH)?.automaton)
        }
        Cmd::Corpus(CorpusCmd::List) => {
            let all = corpus_all();
            if cli.json {
                let v: Vec<Value> = all
                    .iter()
                    .map(|e| json!({"name": e.name, "description": e.description, "alphabet": e.alphabet().tokens()}))
                    .collect();
                Output::Report(0, vec![("corpus", Value::Array(v))])
            } else {
                let names: Vec<Value> = all
                    .iter()
                    .map(|e| format!("{} ({})", e.name, e.description).into())
                    .collect();
                Output::Report(0, vec![("corpus", Value::Array(names))])
            }
        }
        Cmd::Corpus(CorpusCmd::Get { name }) => {
            let e = corpus_get(name)?;
            Output::Doc(Document::Pa {
                automaton: e.automaton,
                resolver: e.table,
            })
        }
        Cmd::Equiv { left, right } => {
            let (l, r) = (load_pa(left)?, load_pa(right)?);
            match bounded_equiv(&l, &r, cli.max_len)? {
                Equivalence::EqualToBound(n) => report(0, vec![("bound", n.into())]),
                Equivalence::Counterexample(w) => {
                    let fields = vec![
                        ("counterexample", l.alphabet().render(&w).into()),
                        ("left", member(&l, &w)?.into()),
                        ("right", member(&r, &w)?.into()),
                    ];
                    report(1, fields)
                }
            }
        }
    })
}

fn machine_run(m: &CounterMachine, word: &str, budget: &mut Budget) -> Result<Output, Error> {
    let w = m.alphabet().parse_word(word)?;
    let out = cm_accepts(m, &w, budget)?;
    let mut fields = vec![("cap_hit", out.cap_hit.into())];
    if let Some(run) = &out.run {
        fields.push(("run", json!(run)));
    }
    let code = match out.verdict {
        Verdict::Accept => 0,
        Verdict::Reject if !out.cap_hit => 1,
        _ => 2,
    };
    Ok(report(code, fields))
}

fn render_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(render_value).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn render(out: &Output, as_json: bool) -> (u8, String) {
    match out {
        Output::Doc(d) => (0, if as_json { d.to_json() } else { d.to_text() }),
        Output::Report(code, fields) if as_json => {
            let obj: serde_json::Map<String, Value> = fields.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            (*code, format!("{}\n", serde_json::to_string_pretty(&obj).unwrap()))
        }
        Output::Report(code, fields) => {
            let mut s = String::new();
            for (k, v) in fields {
                match (k, v) {
                    // One line per list entry reads better for listings.
                    (&"corpus", Value::Array(items)) => {
                        for i in items {
                            s.push_str(&render_value(i));
                            s.push('\n');
                        }
                    }
                    _ => s.push_str(&format!("{k}: {}\n", render_value(v))),
                }
            }
            (*code, s)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let (code, text) = match run(&cli) {
        Ok(out) => render(&out, cli.json),
        Err(Error::Budget(reason)) => render(&report(2, vec![("reason", reason.into())]), cli.json),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let mut stdout = io::stdout().lock();
    if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(3);
    }
    ExitCode::from(code)
}
