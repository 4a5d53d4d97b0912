//! Seeded property suites: closure of execution, refinement soundness,
//! confluence of stack-word rewriting and representation independence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compiler::compile;
use crate::corpus::corpus;
use crate::error::{Error, Result};
use crate::execution::{plug, ExecOptions};
use crate::graphing::{equivalent, is_refinement, GraphingRep};
use crate::measure_space::{Letter, Symbol};
use crate::measurement::{check_uniformity, parse_test};
use crate::random::{random_graphing, random_pair, random_refinement, DENOM_FAMILIES};
use crate::stack_monoid::{ThetaLetter, ThetaWord};

pub const SUITES: [&str; 5] = ["det-closure", "subprob-closure", "uniformity", "theta-confluence", "refinement"];

#[derive(Debug, Clone)]
pub struct Failure {
    pub case: usize,
    pub message: String,
    /// Counterexample files: (name, contents).
    pub dumps: Vec<(String, String)>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} cases, {} failures -> {}",
            self.suite,
            self.cases,
            self.failures.len(),
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

fn graph_dumps(case: usize, named: &[(&str, &GraphingRep)]) -> Vec<(String, String)> {
    named.iter().map(|(n, g)| (format!("case{case}_{n}.graphing"), g.to_text(None))).collect()
}

fn closure(suite: &str, seed: u64, count: usize, deterministic: bool) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = ExecOptions::default();
    let mut failures = Vec::new();
    for case in 0..count {
        let (f, g, cut) = random_pair(&mut rng, deterministic);
        let verdict = plug(&f, &g, &cut, &opts).map(|h| {
            let ok = h.validate().is_ok()
                && if deterministic { h.is_deterministic() } else { h.is_subprobabilistic() };
            (ok, h)
        });
        match verdict {
            Ok((true, _)) => {}
            Ok((false, h)) => failures.push(Failure {
                case,
                message: "execution left the class".into(),
                dumps: graph_dumps(case, &[("f", &f), ("g", &g), ("result", &h)]),
            }),
            Err(e) => failures.push(Failure {
                case,
                message: e.to_string(),
                dumps: graph_dumps(case, &[("f", &f), ("g", &g)]),
            }),
        }
    }
    SuiteReport { suite: suite.into(), cases: count, failures }
}

pub fn det_closure(seed: u64, count: usize) -> SuiteReport {
    closure("det-closure", seed, count, true)
}

pub fn subprob_closure(seed: u64, count: usize) -> SuiteReport {
    closure("subprob-closure", seed, count, false)
}

/// Random source splitting gives a refinement, an equivalent graphing, and
/// equivalent executions against a random partner.
pub fn refinement(seed: u64, count: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = ExecOptions::default();
    let mut failures = Vec::new();
    for case in 0..count {
        let det = case % 2 == 0;
        let syms = [Symbol::ZeroIn, Symbol::OneIn, Symbol::StarOut];
        let (k, dialect) = (rng.gen_range(1..=3), rng.gen_range(1..=2));
        let denoms = DENOM_FAMILIES[case % DENOM_FAMILIES.len()];
        let g = random_graphing(&mut rng, &syms[..k], dialect, det, denoms);
        let r = random_refinement(&mut rng, &g);
        if !is_refinement(&r, &g) || !equivalent(&r, &g) {
            failures.push(Failure {
                case,
                message: "split graphing is not a refinement".into(),
                dumps: graph_dumps(case, &[("g", &g), ("split", &r)]),
            });
            continue;
        }
        let (f, h, cut) = random_pair(&mut rng, det);
        let f2 = random_refinement(&mut rng, &f);
        let outcome = plug(&f, &h, &cut, &opts).and_then(|a| Ok((a, plug(&f2, &h, &cut, &opts)?)));
        match outcome {
            Ok((a, b)) if equivalent(&a, &b) => {}
            Ok((a, b)) => failures.push(Failure {
                case,
                message: "executions of equivalent inputs differ".into(),
                dumps: graph_dumps(case, &[("f", &f), ("f_split", &f2), ("g", &h), ("out", &a), ("out_split", &b)]),
            }),
            Err(e) => failures.push(Failure { case, message: e.to_string(), dumps: vec![] }),
        }
    }
    SuiteReport { suite: "refinement".into(), cases: count, failures }
}

/// Every word over `{0,1,*,c}` of length at most `max_len`.
fn theta_words(max_len: usize) -> Vec<Vec<ThetaLetter>> {
    let alphabet = [
        ThetaLetter::Push(Letter::Zero),
        ThetaLetter::Push(Letter::One),
        ThetaLetter::Push(Letter::Star),
        ThetaLetter::C,
    ];
    let mut all = vec![vec![]];
    let mut layer: Vec<Vec<ThetaLetter>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| alphabet.iter().map(move |&l| [w.as_slice(), &[l]].concat()))
            .collect();
        all.extend(layer.iter().cloned());
    }
    all
}

/// Normal forms do not depend on the order in which redexes are rewritten.
pub fn theta_confluence(seed: u64, max_len: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = theta_words(max_len);
    let mut failures = Vec::new();
    for (case, letters) in words.iter().enumerate() {
        let w = ThetaWord::raw(letters.clone());
        let nf = w.reduce();
        let other = w.reduce_randomly(&mut rng);
        if nf != other || !nf.is_normal() {
            failures.push(Failure {
                case,
                message: format!("{w}: reduce gives {nf}, random order gives {other}"),
                dumps: vec![],
            });
        }
    }
    SuiteReport { suite: "theta-confluence".into(), cases: words.len(), failures }
}

fn random_word(rng: &mut impl Rng, max_len: usize) -> String {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| if rng.gen_bool(0.5) { '1' } else { '0' }).collect()
}

/// Verdicts for `count` corpus machines, five words and five representations each.
pub fn uniformity(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let machines: Vec<_> = corpus().into_iter().filter(|e| e.automaton.heads <= 2).collect();
    if machines.is_empty() {
        return Err(Error::Parameter("empty corpus".into()));
    }
    let stride = (machines.len() / count.max(1)).max(1);
    let opts = ExecOptions::default();
    let mut failures = Vec::new();
    let mut cases = 0;
    for (i, e) in machines.iter().step_by(stride).take(count).enumerate() {
        let cm = compile(&e.automaton)?;
        let n_max = e.automaton.heads + 1;
        let tests = [parse_test("neg", n_max)?, parse_test("pos", n_max)?, parse_test("prob:1/2", n_max)?];
        for _ in 0..5 {
            let w = random_word(&mut rng, 4);
            for (t, name) in tests.iter().zip(["neg", "pos", "prob:1/2"]) {
                cases += 1;
                let (uniform, verdicts) = check_uniformity(&cm, &w, t, 5, rng.gen(), &opts)?;
                if !uniform {
                    failures.push(Failure {
                        case: i,
                        message: format!("{} on {w:?} under {name}: verdicts {verdicts:?}", e.name),
                        dumps: vec![],
                    });
                }
            }
        }
    }
    Ok(SuiteReport { suite: "uniformity".into(), cases, failures })
}

/// Runs a suite by name; `count` is the length bound for theta-confluence.
pub fn run_suite(name: &str, seed: u64, count: usize) -> Result<SuiteReport> {
    match name {
        "det-closure" => Ok(det_closure(seed, count)),
        "subprob-closure" => Ok(subprob_closure(seed, count)),
        "refinement" => Ok(refinement(seed, count)),
        "theta-confluence" => Ok(theta_confluence(seed, count)),
        "uniformity" => uniformity(seed, count),
        _ => Err(Error::Parameter(format!("unknown suite `{name}`; expected one of {}", SUITES.join(", ")))),
    }
}
