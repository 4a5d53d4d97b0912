//! Command-line front end. `run` returns the process exit code:
//! 0 on success, 1 on a failed property or a disagreement, 2 on bad input.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::automata::Automaton;
use crate::compiler::{compile, finite_view, prune, summary, CompiledMachine};
use crate::corpus::{by_name, corpus, words_up_to};
use crate::error::Error;
use crate::execution::{accept_path_sum, ExecOptions, StartPoint};
use crate::graphing::{equivalent, GraphingRep};
use crate::measure_space::{Letter, Symbol};
use crate::measurement::{check_uniformity, orthogonal_to_test, parse_test, Test, TestKind};
use crate::properties::run_suite;
use crate::rational::{approx, fmt_q, Q};
use crate::words::{bang_representation, canonical, word_graph};

#[derive(Parser, Debug)]
#[command(name = "igc", version, about = "Graphing semantics for probabilistic multihead automata")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile an automaton file (or `corpus:<name>`) to a graphing file.
    Compile {
        automaton: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Drop dialect states unreachable from the start state.
        #[arg(long)]
        prune: bool,
    },
    /// Acceptance probability of a word: oracle against graphing path sums.
    Accept {
        /// Automaton file, graphing file or `corpus:<name>`.
        input: String,
        word: String,
        #[arg(long, default_value_t = 16)]
        stack_depth: usize,
        /// Start dialect state, for graphing files only.
        #[arg(long, default_value_t = 0)]
        state: u32,
    },
    /// Language membership through orthogonality to a test.
    Membership {
        automaton: String,
        /// Comma-separated words; an empty entry is the empty word.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        words: Vec<String>,
        /// All words up to this length (used when no words are given).
        #[arg(long)]
        max_len: Option<usize>,
        /// `neg`, `neg:<z1>,..`, `pos` or `prob:<eps>`.
        #[arg(long, default_value = "pos")]
        test: String,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        stack_depth: usize,
    },
    /// Seeded property suite: det-closure, subprob-closure, uniformity,
    /// theta-confluence (count = word length bound) or refinement.
    Properties {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Where failing counterexamples are written.
        #[arg(long, default_value = "counterexamples")]
        dump_dir: PathBuf,
    },
    /// Equivalence of two graphing files.
    Equiv { left: PathBuf, right: PathBuf },
    /// Finite thick-graph view of a compiled machine against a word.
    Dump {
        automaton: String,
        word: String,
        /// Slots of the word representation (default |w|+1).
        #[arg(long)]
        grid: Option<u32>,
    },
    /// Names of the built-in corpus machines.
    Corpus,
}

enum Failure {
    Input(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Input(e.to_string())
    }
}

type Outcome = std::result::Result<String, Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_automaton(arg: &str) -> std::result::Result<Automaton, Failure> {
    if let Some(name) = arg.strip_prefix("corpus:") {
        return by_name(name)
            .map(|e| e.automaton)
            .ok_or_else(|| Failure::Input(format!("no corpus machine `{name}`")));
    }
    Ok(Automaton::parse(&read(Path::new(arg))?)?)
}

fn is_graphing_file(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l == "graphing")
}

fn opts(stack_depth: usize) -> std::result::Result<ExecOptions, Failure> {
    if stack_depth == 0 {
        return Err(Failure::Input("--stack-depth must be at least 1".into()));
    }
    Ok(ExecOptions { stack_depth, ..ExecOptions::default() })
}

fn cmd_compile(automaton: &str, output: Option<&Path>, pruned: bool) -> Outcome {
    let a = load_automaton(automaton)?;
    let mut cm = compile(&a)?;
    if pruned {
        cm = prune(&cm);
    }
    let text = cm.graphing.to_text(Some(&cm.provenance));
    let mut out = String::new();
    match output {
        Some(p) => {
            std::fs::write(p, &text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            writeln!(out, "wrote {}", p.display()).unwrap();
        }
        None => out.push_str(&text),
    }
    writeln!(out, "{}", summary(&cm)).unwrap();
    Ok(out)
}

fn show(p: &Q) -> String {
    format!("{} (~{:.6})", fmt_q(p), approx(p))
}

fn cmd_accept(input: &str, word: &str, stack_depth: usize, state: u32) -> Outcome {
    let o = opts(stack_depth)?;
    let rep = canonical(word)?;
    let mut out = String::new();
    let graphing_text = match input.strip_prefix("corpus:") {
        Some(_) => None,
        None => Some(read(Path::new(input))?).filter(|t| is_graphing_file(t)),
    };
    if let Some(text) = graphing_text {
        let g = GraphingRep::parse(&text)?;
        let start = StartPoint {
            sym: Symbol::Accept,
            cube: rep.anchor_cube(g.coords),
            state,
            stack: vec![Letter::Star],
        };
        let ps = accept_path_sum(&g, &rep.graph, &start, &o)?;
        writeln!(out, "path-sum {}{}", show(&ps.neutral()), if ps.exact { "" } else { " lower bound" }).unwrap();
        out.push_str(&ps.dump());
        return Ok(out);
    }
    let a = load_automaton(input)?;
    let cm = compile(&a)?;
    let oracle = a.accept_probability(word, stack_depth)?;
    let (acc, _) = cm.accept_reject(&rep, &o)?;
    let exact = oracle.exact && acc.exact;
    let tag = if exact { "" } else { " lower bound" };
    writeln!(out, "word {:?}", word).unwrap();
    writeln!(out, "oracle {}{tag}", show(&oracle.accept)).unwrap();
    writeln!(out, "path-sum {}{tag}", show(&acc.neutral())).unwrap();
    out.push_str(&acc.dump());
    if !exact {
        writeln!(out, "warning: stack depth {stack_depth} truncated some runs").unwrap();
    }
    let agree = oracle.accept == acc.neutral();
    writeln!(out, "agree {agree}").unwrap();
    if agree {
        Ok(out)
    } else {
        Err(Failure::Check(out))
    }
}

/// Verdict the oracle predicts for a test.
fn expected(t: &Test, accept: &Q, reject: &Q) -> bool {
    match &t.kind {
        TestKind::DetNeg { .. } => num_traits::Zero::is_zero(reject),
        TestKind::DetPos { .. } => num_traits::Signed::is_positive(accept),
        TestKind::Prob { eps, .. } => accept > eps,
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_membership(
    automaton: &str,
    words: &[String],
    max_len: Option<usize>,
    test: &str,
    reps: usize,
    seed: u64,
    stack_depth: usize,
) -> Outcome {
    let a = load_automaton(automaton)?;
    let cm = compile(&a)?;
    let o = opts(stack_depth)?;
    let t = parse_test(test, a.heads + 1)?;
    let list: Vec<String> = match (words.is_empty(), max_len) {
        (false, _) => words.to_vec(),
        (true, Some(n)) => words_up_to(n),
        (true, None) => return Err(Failure::Input("give --words or --max-len".into())),
    };
    let mut out = String::new();
    let mut ok = true;
    writeln!(out, "{:<10} {:<7} {:<7} {:<7} {}", "word", "member", "oracle", "uniform", "accept-probability").unwrap();
    for w in &list {
        let verdict = membership_row(&cm, w, &t, &o)?;
        let oracle = a.accept_probability(w, stack_depth)?;
        let want = expected(&t, &oracle.accept, &oracle.reject);
        let uniform = if reps > 1 { check_uniformity(&cm, w, &t, reps, seed, &o)?.0 } else { true };
        ok &= verdict == want && uniform;
        let shown = if w.is_empty() { "(empty)" } else { w.as_str() };
        writeln!(out, "{shown:<10} {verdict:<7} {want:<7} {uniform:<7} {}", fmt_q(&oracle.accept)).unwrap();
    }
    writeln!(out, "{} words, {}", list.len(), if ok { "all agree" } else { "DISAGREEMENT" }).unwrap();
    if ok {
        Ok(out)
    } else {
        Err(Failure::Check(out))
    }
}

fn membership_row(cm: &CompiledMachine, w: &str, t: &Test, o: &ExecOptions) -> std::result::Result<bool, Failure> {
    Ok(orthogonal_to_test(cm, &canonical(w)?, t, o)?.orthogonal)
}

fn cmd_properties(suite: &str, seed: u64, count: usize, dump_dir: &Path) -> Outcome {
    let report = run_suite(suite, seed, count)?;
    let mut out = String::new();
    writeln!(out, "{}", report.summary()).unwrap();
    for f in &report.failures {
        writeln!(out, "case {}: {}", f.case, f.message).unwrap();
        for (name, text) in &f.dumps {
            std::fs::create_dir_all(dump_dir)
                .and_then(|_| std::fs::write(dump_dir.join(name), text))
                .map_err(|e| Failure::Input(format!("{}: {e}", dump_dir.display())))?;
            writeln!(out, "  wrote {}", dump_dir.join(name).display()).unwrap();
        }
    }
    if report.passed() {
        Ok(out)
    } else {
        Err(Failure::Check(out))
    }
}

fn cmd_equiv(left: &Path, right: &Path) -> Outcome {
    let f = GraphingRep::parse(&read(left)?)?;
    let g = GraphingRep::parse(&read(right)?)?;
    if equivalent(&f, &g) {
        Ok("equivalent\n".into())
    } else {
        Err(Failure::Check("not equivalent\n".into()))
    }
}

fn cmd_dump(automaton: &str, word: &str, grid: Option<u32>) -> Outcome {
    let a = load_automaton(automaton)?;
    let cm = compile(&a)?;
    let g = word_graph(word)?;
    let n = g.positions();
    let slots = grid.unwrap_or(n as u32) as usize;
    if slots < n {
        return Err(Failure::Input(format!("--grid {slots} is below |w|+1 = {n}")));
    }
    let rep = bang_representation(&g, &(0..n).collect::<Vec<_>>(), slots - 1)?;
    let (m, w) = finite_view(&cm, &rep)?;
    let mut out = String::new();
    writeln!(out, "# machine").unwrap();
    out.push_str(&m.dump());
    writeln!(out, "# word").unwrap();
    out.push_str(&w.dump());
    Ok(out)
}

fn dispatch(cli: Cli) -> Outcome {
    match cli.command {
        Command::Compile { automaton, output, prune } => cmd_compile(&automaton, output.as_deref(), prune),
        Command::Accept { input, word, stack_depth, state } => cmd_accept(&input, &word, stack_depth, state),
        Command::Membership { automaton, words, max_len, test, reps, seed, stack_depth } => {
            cmd_membership(&automaton, &words, max_len, &test, reps, seed, stack_depth)
        }
        Command::Properties { suite, seed, count, dump_dir } => cmd_properties(&suite, seed, count, &dump_dir),
        Command::Equiv { left, right } => cmd_equiv(&left, &right),
        Command::Dump { automaton, word, grid } => cmd_dump(&automaton, &word, grid),
        Command::Corpus => Ok(corpus()
            .iter()
            .map(|e| format!("{} heads={} stack={} {:?}\n", e.name, e.automaton.heads, e.automaton.stack, e.kind))
            .collect()),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(if code == 0 { out as &mut dyn Write } else { err as &mut dyn Write }, "{e}");
            return code;
        }
    };
    match dispatch(cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(Failure::Check(text)) => {
            let _ = out.write_all(text.as_bytes());
            1
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}
