//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use igc::compiler::{compile, CompiledMachine};
use igc::corpus::{by_name, corpus, words_up_to};
use igc::execution::{enumerate_paths, ExecOptions};
use igc::measure_space::{Cylinder, Letter, Symbol};
use igc::measurement::{orthogonal_to_test, parse_test};
use igc::properties;
use igc::rational::{fmt_q, q};
use igc::words::canonical;
use igc::Q;

type Outcome = Result<String, String>;

fn opts() -> ExecOptions {
    ExecOptions { stack_depth: 16, ..ExecOptions::default() }
}

fn oracle_equivalence() -> Outcome {
    let tol = q(1, 1_000_000);
    let words = words_up_to(6);
    let machines = corpus();
    let mut checked = 0;
    for e in &machines {
        let a = &e.automaton;
        let cm = compile(a).map_err(|x| format!("{}: {x}", e.name))?;
        for w in &words {
            let want = a.accept_probability(w, 16).map_err(|x| x.to_string())?;
            let (acc, rej) = cm.accept_reject(&canonical(w).unwrap(), &opts()).map_err(|x| x.to_string())?;
            let (got_a, got_r) = (acc.neutral(), rej.neutral());
            let agree = if a.stack {
                (&got_a - &want.accept).abs() <= tol && (&got_r - &want.reject).abs() <= tol
            } else {
                got_a == want.accept && got_r == want.reject && acc.exact && rej.exact
            };
            if !agree {
                return Err(format!(
                    "{} on {w:?}: graphing {}/{} vs oracle {}/{}",
                    e.name,
                    fmt_q(&got_a),
                    fmt_q(&got_r),
                    fmt_q(&want.accept),
                    fmt_q(&want.reject)
                ));
            }
            checked += 1;
        }
    }
    Ok(format!("{} machines, {checked} (machine, word) pairs", machines.len()))
}

const TRACE_MACHINES: [&str; 10] = [
    "even_ones",
    "first_equals_last",
    "coin",
    "retry",
    "noisy_parity",
    "equal_counts",
    "race",
    "three_sweep",
    "push_pop",
    "dyck",
];

fn cycle_weights(cm: &CompiledMachine, w: &str) -> Vec<Q> {
    let rep = canonical(w).unwrap();
    let mut out = Vec::new();
    for sym in [Symbol::Accept, Symbol::Reject] {
        let start = cm.start_point(&rep, sym);
        for p in enumerate_paths(&cm.graphing, &rep.graph, &start, 40, &opts()).unwrap() {
            let n = &p.exit.node;
            if n.sym == sym && n.cube == start.cube && n.states[0] == start.state {
                out.push(p.weight.p);
            }
        }
    }
    out.sort();
    out
}

fn trace_bijection() -> Outcome {
    let mut pairs = 0;
    for name in TRACE_MACHINES {
        let a = by_name(name).ok_or(format!("missing machine {name}"))?.automaton;
        let cm = compile(&a).map_err(|e| e.to_string())?;
        for w in words_up_to(4) {
            let mut traces: Vec<Q> = a.trace_enumerate(&w, 20).unwrap().into_iter().map(|t| t.prob).collect();
            traces.sort();
            let paths = cycle_weights(&cm, &w);
            if traces != paths {
                return Err(format!("{name} on {w:?}: {} traces vs {} cycles", traces.len(), paths.len()));
            }
            pairs += 1;
        }
    }
    Ok(format!("{} machines, {pairs} words", TRACE_MACHINES.len()))
}

fn suite(r: properties::SuiteReport) -> Outcome {
    match r.failures.first() {
        None => Ok(r.summary()),
        Some(f) => Err(format!("{}; first: case {} {}", r.summary(), f.case, f.message)),
    }
}

fn test_laws() -> Outcome {
    let words = words_up_to(4);
    let mut checks = 0;
    for e in corpus() {
        let a = &e.automaton;
        let cm = compile(a).map_err(|x| x.to_string())?;
        let n = a.heads + 1;
        let mut tests = vec![
            ("neg".to_string(), parse_test("neg", n).unwrap()),
            ("pos".to_string(), parse_test("pos", n).unwrap()),
        ];
        for eps in ["1/4", "1/2", "3/4"] {
            tests.push((format!("prob:{eps}"), parse_test(&format!("prob:{eps}"), n).unwrap()));
        }
        for w in &words {
            let want = a.accept_probability(w, 16).map_err(|x| x.to_string())?;
            let rep = canonical(w).unwrap();
            for (name, t) in &tests {
                let expected = match name.as_str() {
                    "neg" => want.reject == q(0, 1),
                    "pos" => want.accept > q(0, 1),
                    s => want.accept > igc::rational::parse_q(&s[5..]).unwrap(),
                };
                let got = orthogonal_to_test(&cm, &rep, t, &opts()).map_err(|x| x.to_string())?.orthogonal;
                if got != expected {
                    return Err(format!("{} on {w:?} under {name}: orthogonal={got}, oracle says {expected}", e.name));
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} verdicts"))
}

fn regular_desk_check() -> Outcome {
    let a = by_name("even_ones").unwrap().automaton;
    let cm = compile(&a).map_err(|e| e.to_string())?;
    let t = parse_test("pos", 2).unwrap();
    let words = words_up_to(8);
    for w in &words {
        let member = orthogonal_to_test(&cm, &canonical(w).unwrap(), &t, &opts()).map_err(|e| e.to_string())?.orthogonal;
        let parity = w.chars().filter(|&c| c == '1').count() % 2 == 0;
        if member != parity {
            return Err(format!("{w:?}: member={member}, parity={parity}"));
        }
    }
    Ok(format!("{} words", words.len()))
}

fn measure_and_monoid() -> Outcome {
    let mut layer: Vec<Vec<Letter>> = vec![vec![]];
    let mut cylinders = 0;
    for len in 0..=6u32 {
        let expected = Q::new(BigInt::one(), BigInt::from(3u32.pow(len)));
        for letters in &layer {
            let c = Cylinder::of(letters);
            let kids: Q = c.children().iter().map(Cylinder::measure).sum();
            if c.measure() != expected || kids != expected {
                return Err(format!("V({letters:?}) has measure {}", fmt_q(&c.measure())));
            }
            cylinders += 1;
        }
        layer = layer.iter().flat_map(|w| Letter::ALL.map(|l| [w.as_slice(), &[l]].concat())).collect();
    }
    let conf = suite(properties::theta_confluence(8, 8))?;
    Ok(format!("{cylinders} cylinders; {conf}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("trace bijection", trace_bijection),
        ("deterministic closure", || suite(properties::det_closure(3, 200))),
        ("sub-probabilistic closure", || suite(properties::subprob_closure(4, 200))),
        ("test laws", test_laws),
        ("uniformity", || properties::uniformity(6, 10).map_err(|e| e.to_string()).and_then(suite)),
        ("regular desk check", regular_desk_check),
        ("measure and monoid", measure_and_monoid),
        ("refinement soundness", || suite(properties::refinement(9, 100))),
    ];
    let only: Vec<usize> = std::env::var("IGC_CRITERIA")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect())
        .unwrap_or_default();
    let mut failed = false;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let r = run();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("criterion {n} ({name}): PASS [{secs:.1}s] {detail}"),
            Err(detail) => {
                failed = true;
                println!("criterion {n} ({name}): FAIL [{secs:.1}s] {detail}");
            }
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
