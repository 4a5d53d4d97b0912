//! A fixed corpus of small automata used by the test suites and the CLI.
//!
//! Machines are written as rule functions `(state, read, popped) -> moves`,
//! where `read` spells the letters under the heads (`*`, `0`, `1`) and
//! `popped` is the last popped letter (always `*` for stack-free machines).

use crate::automata::{Automaton, Key, Transition};
use crate::measure_space::{Dir, Letter};
use crate::rational::{q, Q};
use crate::stack_monoid::StackOp;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Deterministic,
    /// Probabilities in {0,1} with missing entries: some runs get stuck.
    ZeroOne,
    Probabilistic,
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub name: &'static str,
    pub kind: Kind,
    pub automaton: Automaton,
}

struct T {
    p: Q,
    moves: Vec<(usize, Dir)>,
    op: StackOp,
    next: String,
}

fn fwd(h: usize, next: &str) -> T {
    T { p: q(1, 1), moves: vec![(h, Dir::Out)], op: StackOp::Id, next: next.into() }
}

fn back(h: usize, next: &str) -> T {
    T { p: q(1, 1), moves: vec![(h, Dir::In)], op: StackOp::Id, next: next.into() }
}

fn acc() -> T {
    T { p: q(1, 1), moves: vec![], op: StackOp::Id, next: "acc".into() }
}

fn rej() -> T {
    T { p: q(1, 1), moves: vec![], op: StackOp::Id, next: "rej".into() }
}

fn halt(accept: bool) -> T {
    if accept {
        acc()
    } else {
        rej()
    }
}

impl T {
    fn p(mut self, n: i64, d: i64) -> T {
        self.p = q(n, d);
        self
    }

    fn push(mut self, c: char) -> T {
        self.op = StackOp::Push(letter(c));
        self
    }

    fn pop(mut self) -> T {
        self.op = StackOp::Pop;
        self
    }
}

fn letter(c: char) -> Letter {
    Letter::from_char(c).expect("corpus letter")
}

fn nth(read: &str, h: usize) -> char {
    read.as_bytes()[h] as char
}

/// Walks every head forward onto the marker, then halts.
fn home(read: &str, accept: bool, me: &str) -> Vec<T> {
    match read.find(|c| c != '*') {
        Some(h) => vec![fwd(h, me)],
        None => vec![halt(accept)],
    }
}

fn reads(heads: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..heads {
        out = out
            .into_iter()
            .flat_map(|s| ['*', '0', '1'].map(|c| format!("{s}{c}")))
            .collect();
    }
    out
}

/// Tabulates `f`; the first listed state is initial, `acc` and `rej` are appended.
fn build<S: AsRef<str>>(heads: usize, stack: bool, states: &[S], f: impl Fn(&str, &str, char) -> Vec<T>) -> Automaton {
    let mut names: Vec<&str> = states.iter().map(AsRef::as_ref).collect();
    let n = names.len();
    names.extend(["acc", "rej"]);
    let mut a = Automaton::new(heads, stack, &names, 0, n, n + 1);
    let pops: &[char] = if stack { &['*', '0', '1'] } else { &['*'] };
    for (qi, name) in names[..n].iter().enumerate() {
        for read in reads(heads) {
            for &popped in pops {
                for t in f(name, &read, popped) {
                    // Halting needs every head on the marker; other reads are unreachable there.
                    if t.moves.is_empty() && read.contains(['0', '1']) {
                        continue;
                    }
                    let next = a.state(&t.next).unwrap_or_else(|| panic!("unknown state {}", t.next));
                    let key = Key {
                        read: read.chars().map(letter).collect(),
                        state: qi,
                        popped: stack.then(|| letter(popped)),
                    };
                    a.add(key, Transition { moves: t.moves, op: t.op, next, p: t.p });
                }
            }
        }
    }
    a
}

fn one_head(states: &[&str], f: impl Fn(&str, char) -> Vec<T>) -> Automaton {
    build(1, false, states, |s, r, _| f(s, nth(r, 0)))
}

fn immediate(accept: bool) -> Automaton {
    one_head(&["s"], |_, r| if r == '*' { vec![halt(accept)] } else { vec![] })
}

/// Counts ones modulo `k`; accepts on residue `target`.
fn ones_mod(k: usize, target: usize) -> Automaton {
    let states: Vec<String> = std::iter::once("s".to_string()).chain((0..k).map(|i| format!("c{i}"))).collect();
    build(1, false, &states, |s, r, _| {
        if s == "s" {
            return vec![fwd(0, "c0")];
        }
        let i: usize = s[1..].parse().unwrap_or(0);
        match nth(r, 0) {
            '0' => vec![fwd(0, s)],
            '1' => vec![fwd(0, &format!("c{}", (i + 1) % k))],
            _ => vec![halt(i == target)],
        }
    })
}

fn even_length() -> Automaton {
    one_head(&["s", "e", "o"], |s, r| match (s, r) {
        ("s", _) => vec![fwd(0, "e")],
        (_, '*') => vec![halt(s == "e")],
        ("e", _) => vec![fwd(0, "o")],
        _ => vec![fwd(0, "e")],
    })
}

fn ends_with_one() -> Automaton {
    one_head(&["s", "l0", "l1"], |s, r| match (s, r) {
        ("s", _) => vec![fwd(0, "l0")],
        (_, '*') => vec![halt(s == "l1")],
        (_, '0') => vec![fwd(0, "l0")],
        _ => vec![fwd(0, "l1")],
    })
}

fn starts_with_zero() -> Automaton {
    one_head(&["s", "f", "y", "n"], |s, r| match (s, r) {
        ("s", _) => vec![fwd(0, "f")],
        ("f", '0') => vec![back(0, "y")],
        ("f", '1') => vec![back(0, "n")],
        ("f", _) | ("n", '*') => vec![rej()],
        ("y", '*') => vec![acc()],
        _ => vec![],
    })
}

fn contains_00() -> Automaton {
    one_head(&["s", "a", "b", "f"], |s, r| match (s, r) {
        ("s", _) => vec![fwd(0, "a")],
        (_, '*') => vec![halt(s == "f")],
        ("f", _) => vec![fwd(0, "f")],
        ("b", '0') => vec![fwd(0, "f")],
        (_, '0') => vec![fwd(0, "b")],
        _ => vec![fwd(0, "a")],
    })
}

fn all_zeros() -> Automaton {
    one_head(&["s", "a", "bad"], |s, r| match (s, r) {
        ("s", _) => vec![fwd(0, "a")],
        (_, '*') => vec![halt(s == "a")],
        ("a", '0') => vec![fwd(0, "a")],
        _ => vec![fwd(0, "bad")],
    })
}

/// First letter equals last letter; reaches the last letter by stepping left
/// across the marker.
fn first_equals_last() -> Automaton {
    one_head(&["s", "f", "g0", "g1", "c0", "c1", "r", "x"], |s, r| match (s, r) {
        ("s", _) => vec![fwd(0, "f")],
        ("f", '*') | ("r", '*') => vec![acc()],
        ("f", '0') => vec![back(0, "g0")],
        ("f", '1') => vec![back(0, "g1")],
        ("g0", '*') => vec![back(0, "c0")],
        ("g1", '*') => vec![back(0, "c1")],
        ("c0", '0') | ("c1", '1') => vec![fwd(0, "r")],
        ("c0", '1') | ("c1", '0') => vec![fwd(0, "x")],
        ("x", '*') => vec![rej()],
        _ => vec![],
    })
}

fn alternating() -> Automaton {
    one_head(&["s", "a", "p0", "p1", "bad"], |s, r| match (s, r) {
        ("s", _) => vec![fwd(0, "a")],
        (_, '*') => vec![halt(s != "bad")],
        ("bad", _) | ("p0", '0') | ("p1", '1') => vec![fwd(0, "bad")],
        (_, '0') => vec![fwd(0, "p0")],
        _ => vec![fwd(0, "p1")],
    })
}

/// Two passes: ones parity, then zeros parity; accepts when both are even.
fn two_pass_parity() -> Automaton {
    let states = ["s", "pe", "po", "ee", "eo", "oe", "oo"];
    one_head(&states, |s, r| {
        let flip = |c: u8| if c == b'e' { "o" } else { "e" };
        let b = s.as_bytes();
        match (s.len(), r) {
            (1, _) => vec![fwd(0, "pe")],
            (2, '*') if b[0] == b'p' => vec![fwd(0, &format!("{}e", b[1] as char))],
            (2, '1') if b[0] == b'p' => vec![fwd(0, &format!("p{}", flip(b[1])))],
            (2, _) if b[0] == b'p' => vec![fwd(0, s)],
            (2, '*') => vec![halt(s == "ee")],
            (2, '0') => vec![fwd(0, &format!("{}{}", b[0] as char, flip(b[1])))],
            _ => vec![fwd(0, s)],
        }
    })
}

fn no_00_partial() -> Automaton {
    one_head(&["s", "a", "b"], |s, r| match (s, r) {
        ("s", _) => vec![fwd(0, "a")],
        (_, '*') => vec![acc()],
        (_, '1') => vec![fwd(0, "a")],
        ("a", '0') => vec![fwd(0, "b")],
        _ => vec![],
    })
}

fn reject_odd_partial() -> Automaton {
    one_head(&["s", "e", "o"], |s, r| match (s, r) {
        ("s", _) => vec![fwd(0, "e")],
        ("o", '*') => vec![rej()],
        ("e", '*') => vec![],
        ("e", '1') | ("o", '0') => vec![fwd(0, "o")],
        _ => vec![fwd(0, "e")],
    })
}

fn ones_only_partial() -> Automaton {
    one_head(&["s", "a"], |s, r| match (s, r) {
        ("s", _) | ("a", '1') => vec![fwd(0, "a")],
        ("a", '*') => vec![acc()],
        _ => vec![],
    })
}

fn coin(n: i64, d: i64) -> Automaton {
    one_head(&["s"], |_, r| if r == '*' { vec![acc().p(n, d), rej().p(d - n, d)] } else { vec![] })
}

/// Accept with probability 1/2 at the marker, otherwise circle the word and retry.
fn retry() -> Automaton {
    one_head(&["s", "l"], |s, r| match (s, r) {
        (_, '*') => vec![acc().p(1, 2), fwd(0, "l").p(1, 2)],
        _ => vec![fwd(0, "l")],
    })
}

fn geometric_circle() -> Automaton {
    one_head(&["s", "c"], |_, r| match r {
        '*' => vec![acc().p(1, 3), rej().p(1, 3), fwd(0, "c").p(1, 3)],
        _ => vec![fwd(0, "c")],
    })
}

/// Each 1 lets the run continue with probability 3/4; the rest of the mass is lost.
fn leaky_ones() -> Automaton {
    one_head(&["s", "a"], |s, r| match (s, r) {
        ("s", _) | ("a", '0') => vec![fwd(0, "a")],
        ("a", '1') => vec![fwd(0, "a").p(3, 4)],
        _ => vec![acc()],
    })
}

fn noisy_parity() -> Automaton {
    one_head(&["s", "e", "o"], |s, r| {
        let other = if s == "e" { "o" } else { "e" };
        match (s, r) {
            ("s", _) => vec![fwd(0, "e")],
            (_, '*') => vec![halt(s == "e")],
            (_, '1') => vec![fwd(0, other).p(2, 3), fwd(0, s).p(1, 3)],
            _ => vec![fwd(0, s)],
        }
    })
}

fn random_stop() -> Automaton {
    one_head(&["s", "a", "g"], |s, r| match (s, r) {
        ("s", _) => vec![fwd(0, "a")],
        (_, '*') => vec![halt(s == "g")],
        ("a", _) => vec![fwd(0, "g").p(1, 2), fwd(0, "a").p(1, 2)],
        _ => vec![fwd(0, "g")],
    })
}

/// Three fair coins flipped on the first three steps; accepts on a majority of heads.
fn majority_coin() -> Automaton {
    let states = ["s", "c10", "c11", "c20", "c21", "c22", "fa", "fr"];
    one_head(&states, |s, r| match s {
        "s" => vec![fwd(0, "c10").p(1, 2), fwd(0, "c11").p(1, 2)],
        "c10" => vec![fwd(0, "c20").p(1, 2), fwd(0, "c21").p(1, 2)],
        "c11" => vec![fwd(0, "c21").p(1, 2), fwd(0, "c22").p(1, 2)],
        "c20" => vec![fwd(0, "fr")],
        "c21" => vec![fwd(0, "fa").p(1, 2), fwd(0, "fr").p(1, 2)],
        "c22" => vec![fwd(0, "fa")],
        _ if r == '*' => vec![halt(s == "fa")],
        _ => vec![fwd(0, s)],
    })
}

fn ones_penalty() -> Automaton {
    one_head(&["s", "a", "r"], |s, r| match (s, r) {
        ("s", _) | ("a", '0') => vec![fwd(0, "a")],
        ("a", '1') => vec![fwd(0, "a").p(1, 2), fwd(0, "r").p(1, 2)],
        (_, '*') => vec![halt(s == "a")],
        _ => vec![fwd(0, "r")],
    })
}

/// Two-way random walk; halts only on the marker.
fn random_walk() -> Automaton {
    one_head(&["s", "w"], |s, r| match (s, r) {
        ("s", _) => vec![fwd(0, "w")],
        (_, '*') => vec![acc().p(1, 2), fwd(0, "w").p(1, 4), rej().p(1, 4)],
        _ => vec![fwd(0, "w").p(2, 3), back(0, "w").p(1, 3)],
    })
}

fn two_head_walk() -> Automaton {
    build(2, false, &["s", "h1", "h0"], |s, r, _| match (s, r) {
        ("s", "**") => vec![fwd(1, "h1")],
        ("h1", "**") => vec![back(0, "h0").p(1, 2), rej().p(1, 2)],
        ("h1", _) if nth(r, 0) == '*' => vec![fwd(1, "h1")],
        ("h0", "**") => vec![acc()],
        ("h0", _) if nth(r, 1) == '*' => vec![fwd(0, "h0")],
        _ => vec![],
    })
}

/// Head 0 finds zeros, head 1 finds ones; equal counts when both run out together.
/// With `partial`, unmatched letters leave the run stuck instead of rejecting.
fn equal_counts(partial: bool) -> Automaton {
    build(2, false, &["s", "a", "b", "c", "r0", "r1"], move |s, r, _| {
        let (x, y) = (nth(r, 0), nth(r, 1));
        match s {
            "s" => vec![fwd(0, "a")],
            "a" => match x {
                '1' => vec![fwd(0, "a")],
                '0' => vec![fwd(1, "b")],
                _ => vec![fwd(1, "c")],
            },
            "b" => match y {
                '0' => vec![fwd(1, "b")],
                '1' => vec![fwd(0, "a")],
                _ if partial => vec![],
                _ => vec![fwd(0, "r0")],
            },
            "c" => match y {
                '0' => vec![fwd(1, "c")],
                '1' if partial => vec![],
                '1' => vec![fwd(1, "r1")],
                _ if x == '*' => vec![acc()],
                _ => vec![],
            },
            _ => home(r, false, s),
        }
    })
}

fn first_last_two_heads() -> Automaton {
    build(2, false, &["s", "t", "cmp", "ha", "hr"], |s, r, _| {
        let (x, y) = (nth(r, 0), nth(r, 1));
        match s {
            "s" => vec![fwd(0, "t")],
            "t" if r == "**" => vec![acc()],
            "t" => vec![back(1, "cmp")],
            "cmp" => vec![fwd(1, if x == y { "ha" } else { "hr" })],
            _ => home(r, s == "ha", s),
        }
    })
}

/// Heads advance at random; accepts when head 0 completes its pass first.
fn race() -> Automaton {
    build(2, false, &["s", "t", "r", "ha", "hr"], |s, r, _| {
        let (x, y) = (nth(r, 0), nth(r, 1));
        match s {
            "s" => vec![fwd(0, "t")],
            "t" => vec![fwd(1, "r")],
            "r" => match (x, y) {
                ('*', '*') => vec![acc()],
                ('*', _) => vec![fwd(1, "ha")],
                (_, '*') => vec![fwd(0, "hr")],
                _ => vec![fwd(0, "r").p(1, 2), fwd(1, "r").p(1, 2)],
            },
            _ => home(r, s == "ha", s),
        }
    })
}

/// Head 0 computes the parity of ones; head 1 then flips it with probability 1/2 at each 0.
fn parity_then_coins() -> Automaton {
    build(2, false, &["s", "e", "o", "pe", "po"], |s, r, _| {
        let (x, y) = (nth(r, 0), nth(r, 1));
        let other = |s: &str| -> &'static str {
            match s {
                "e" => "o",
                "o" => "e",
                "pe" => "po",
                _ => "pe",
            }
        };
        match s {
            "s" => vec![fwd(0, "e")],
            "e" | "o" => match x {
                '*' => vec![fwd(1, if s == "e" { "pe" } else { "po" })],
                '1' => vec![fwd(0, other(s))],
                _ => vec![fwd(0, s)],
            },
            _ => match y {
                '*' => vec![halt(s == "pe")],
                '0' => vec![fwd(1, s).p(1, 2), fwd(1, other(s)).p(1, 2)],
                _ => vec![fwd(1, s)],
            },
        }
    })
}

/// Head 1 runs one cell ahead of head 0; accepts words with a single repeated letter.
fn constant_word() -> Automaton {
    build(2, false, &["s", "p", "q", "q2", "ha", "hr"], |s, r, _| {
        let (x, y) = (nth(r, 0), nth(r, 1));
        match s {
            "s" => vec![fwd(1, "p")],
            "p" if y == '*' => vec![acc()],
            "p" => vec![fwd(0, "q2")],
            "q" if y == '*' => vec![fwd(0, "ha")],
            "q" => vec![fwd(0, if x == y { "q2" } else { "hr" })],
            "q2" => vec![fwd(1, "q")],
            _ => home(r, s == "ha", s),
        }
    })
}

/// Head 1 circles the word while head 0 waits on the marker.
fn two_head_geometric() -> Automaton {
    build(2, false, &["s", "c"], |_, r, _| match r {
        "**" => vec![acc().p(1, 4), rej().p(1, 4), fwd(1, "c").p(1, 2)],
        _ if nth(r, 0) == '*' => vec![fwd(1, "c")],
        _ => vec![],
    })
}

/// Each head sweeps the word in turn. With `partial`, head 2 gets stuck on a 0.
fn three_sweep(partial: bool) -> Automaton {
    build(3, false, &["s", "h0", "h1", "h2"], move |s, r, _| {
        let h = match s {
            "s" => return vec![fwd(0, "h0")],
            "h0" => 0,
            "h1" => 1,
            _ => 2,
        };
        match nth(r, h) {
            '*' if h == 2 => vec![acc()],
            '*' => vec![fwd(h + 1, ["h1", "h2"][h])],
            '0' if partial && h == 2 => vec![],
            _ => vec![fwd(h, s)],
        }
    })
}

/// Each head flips a coin biased by the first letter it reads; majority accepts.
fn three_coin_majority() -> Automaton {
    let mut states = vec!["s".to_string()];
    for h in 0..3 {
        for c in 0..=3 {
            states.push(format!("k{h}{c}"));
            states.push(format!("w{h}{c}"));
        }
    }
    build(3, false, &states, |s, r, _| {
        if s == "s" {
            return vec![fwd(0, "k00")];
        }
        let b = s.as_bytes();
        let (h, c) = ((b[1] - b'0') as usize, (b[2] - b'0') as usize);
        let x = nth(r, h);
        if b[0] == b'k' {
            if c > h {
                return vec![];
            }
            let (n, d) = match x {
                '1' => (2, 3),
                '0' => (1, 3),
                _ => (1, 2),
            };
            return vec![fwd(h, &format!("w{h}{}", c + 1)).p(n, d), fwd(h, &format!("w{h}{c}")).p(d - n, d)];
        }
        match x {
            '*' if h == 2 => vec![halt(c >= 2)],
            '*' => vec![fwd(h + 1, &format!("k{}{c}", h + 1))],
            _ => vec![fwd(h, s)],
        }
    })
}

/// Zeros parity on head 0, ones parity on head 1, a final sweep on head 2.
fn three_head_parities() -> Automaton {
    let mut states = vec!["s".to_string(), "z0".into(), "z1".into()];
    for a in 0..2 {
        for b in 0..2 {
            states.push(format!("o{a}{b}"));
            states.push(format!("f{a}{b}"));
        }
    }
    build(3, false, &states, |s, r, _| {
        let b = s.as_bytes();
        let bit = |i: usize| (b[i] - b'0') as usize;
        match b[0] {
            b's' => vec![fwd(0, "z0")],
            b'z' => match nth(r, 0) {
                '*' => vec![fwd(1, &format!("o{}0", bit(1)))],
                '0' => vec![fwd(0, &format!("z{}", 1 - bit(1)))],
                _ => vec![fwd(0, s)],
            },
            b'o' => match nth(r, 1) {
                '*' => vec![fwd(2, &format!("f{}{}", bit(1), bit(2)))],
                '1' => vec![fwd(1, &format!("o{}{}", bit(1), 1 - bit(2)))],
                _ => vec![fwd(1, s)],
            },
            _ => match nth(r, 2) {
                '*' => vec![halt(bit(1) == bit(2))],
                _ => vec![fwd(2, s)],
            },
        }
    })
}

/// Pushes a 0, pops it on the next step, then walks home.
fn push_pop() -> Automaton {
    build(1, true, &["s", "pushed", "back"], |s, r, p| match (s, nth(r, 0), p) {
        ("s", '*', _) => vec![fwd(0, "pushed").push('0')],
        ("pushed", '*', _) => vec![back(0, "back").pop()],
        ("pushed", _, _) => vec![fwd(0, "back").pop()],
        ("back", '*', '0') => vec![acc()],
        ("back", _, '0') => vec![fwd(0, "back")],
        _ => vec![],
    })
}

/// After a pop reveals the marker: push it back and walk home.
fn restore(next: &str) -> Vec<T> {
    vec![fwd(0, next).push('*')]
}

/// Balanced words: each 0 pushes, each 1 pops; never below the marker, empty at the end.
fn dyck() -> Automaton {
    build(1, true, &["s", "m", "u", "e", "dr", "fa", "fr", "bad"], |s, r, p| {
        let x = nth(r, 0);
        let main = || match x {
            '0' => vec![fwd(0, "m").push('0')],
            '1' => vec![fwd(0, "u").pop()],
            _ => vec![fwd(0, "e").pop()],
        };
        match s {
            "s" => vec![fwd(0, "m")],
            "m" => main(),
            "u" => match p {
                '*' => restore("bad"),
                '0' => main(),
                _ => vec![],
            },
            "e" | "dr" => match p {
                '*' => restore(if s == "e" { "fa" } else { "fr" }),
                _ => vec![fwd(0, "dr").pop()],
            },
            _ => home(r, s == "fa", s),
        }
    })
}

/// Pushes the word, then pops while reading it again from the left.
fn palindrome() -> Automaton {
    build(1, true, &["s", "p", "c", "k0", "k1", "dr", "bad"], |s, r, p| {
        let x = nth(r, 0);
        let compare = || match x {
            '*' => vec![acc()],
            '0' => vec![fwd(0, "k0").pop()],
            _ => vec![fwd(0, "k1").pop()],
        };
        match s {
            "s" => vec![fwd(0, "p")],
            "p" if x == '*' => vec![fwd(0, "c")],
            "p" => vec![fwd(0, "p").push(x)],
            "c" => compare(),
            "k0" | "k1" | "dr" if p == '*' => restore("bad"),
            "k0" | "k1" if s.ends_with(p) => compare(),
            "k0" | "k1" | "dr" => vec![fwd(0, "dr").pop()],
            _ => home(r, false, s),
        }
    })
}

/// Pushes a 0 with probability 1/2 per letter; accepts when an even number was pushed.
fn push_parity() -> Automaton {
    build(1, true, &["s", "m", "e0", "e1", "ha", "hr"], |s, r, p| {
        let x = nth(r, 0);
        match s {
            "s" => vec![fwd(0, "m")],
            "m" if x == '*' => vec![fwd(0, "e0").pop()],
            "m" => vec![fwd(0, "m").push('0').p(1, 2), fwd(0, "m").p(1, 2)],
            "e0" | "e1" if p == '*' => restore(if s == "e0" { "ha" } else { "hr" }),
            "e0" => vec![fwd(0, "e1").pop()],
            "e1" => vec![fwd(0, "e0").pop()],
            _ => home(r, s == "ha", s),
        }
    })
}

/// Head 0 pushes a 0 per 0; head 1 pops one per 1.
fn two_head_balanced() -> Automaton {
    build(2, true, &["s", "a", "b", "u", "e", "dr", "ha", "hr"], |s, r, p| {
        let (x, y) = (nth(r, 0), nth(r, 1));
        let scan = || match y {
            '1' => vec![fwd(1, "u").pop()],
            '0' => vec![fwd(1, "b")],
            _ => vec![fwd(1, "e").pop()],
        };
        let restore2 = |next: &str| vec![fwd(1, next).push('*')];
        match s {
            "s" => vec![fwd(0, "a")],
            "a" => match x {
                '0' => vec![fwd(0, "a").push('0')],
                '1' => vec![fwd(0, "a")],
                _ => vec![fwd(1, "b")],
            },
            "b" => scan(),
            "u" if p == '*' => restore2("hr"),
            "u" => scan(),
            "e" | "dr" if p == '*' => restore2(if s == "e" { "ha" } else { "hr" }),
            "e" | "dr" => vec![fwd(1, "dr").pop()],
            _ => home(r, s == "ha", s),
        }
    })
}

/// The whole corpus, in a fixed order.
pub fn corpus() -> Vec<Entry> {
    use Kind::*;
    let list: Vec<(&'static str, Kind, Automaton)> = vec![
        ("immediate_accept", Deterministic, immediate(true)),
        ("immediate_reject", Deterministic, immediate(false)),
        ("even_ones", Deterministic, ones_mod(2, 0)),
        ("odd_ones", Deterministic, ones_mod(2, 1)),
        ("ones_mod3", Deterministic, ones_mod(3, 0)),
        ("even_length", Deterministic, even_length()),
        ("ends_with_one", Deterministic, ends_with_one()),
        ("starts_with_zero", Deterministic, starts_with_zero()),
        ("contains_00", Deterministic, contains_00()),
        ("all_zeros", Deterministic, all_zeros()),
        ("first_equals_last", Deterministic, first_equals_last()),
        ("alternating", Deterministic, alternating()),
        ("two_pass_parity", Deterministic, two_pass_parity()),
        ("no_00_partial", ZeroOne, no_00_partial()),
        ("reject_odd_partial", ZeroOne, reject_odd_partial()),
        ("ones_only_partial", ZeroOne, ones_only_partial()),
        ("coin", Probabilistic, coin(1, 2)),
        ("biased_coin", Probabilistic, coin(1, 3)),
        ("retry", Probabilistic, retry()),
        ("geometric_circle", Probabilistic, geometric_circle()),
        ("leaky_ones", Probabilistic, leaky_ones()),
        ("noisy_parity", Probabilistic, noisy_parity()),
        ("random_stop", Probabilistic, random_stop()),
        ("majority_coin", Probabilistic, majority_coin()),
        ("ones_penalty", Probabilistic, ones_penalty()),
        ("random_walk", Probabilistic, random_walk()),
        ("two_head_walk", Probabilistic, two_head_walk()),
        ("equal_counts", Deterministic, equal_counts(false)),
        ("equal_counts_partial", ZeroOne, equal_counts(true)),
        ("first_last_two_heads", Deterministic, first_last_two_heads()),
        ("race", Probabilistic, race()),
        ("parity_then_coins", Probabilistic, parity_then_coins()),
        ("constant_word", Deterministic, constant_word()),
        ("two_head_geometric", Probabilistic, two_head_geometric()),
        ("three_sweep", Deterministic, three_sweep(false)),
        ("three_sweep_partial", ZeroOne, three_sweep(true)),
        ("three_coin_majority", Probabilistic, three_coin_majority()),
        ("three_head_parities", Deterministic, three_head_parities()),
        ("push_pop", Deterministic, push_pop()),
        ("dyck", Deterministic, dyck()),
        ("palindrome", Deterministic, palindrome()),
        ("push_parity", Probabilistic, push_parity()),
        ("two_head_balanced", Deterministic, two_head_balanced()),
    ];
    list.into_iter().map(|(name, kind, automaton)| Entry { name, kind, automaton }).collect()
}

pub fn by_name(name: &str) -> Option<Entry> {
    corpus().into_iter().find(|e| e.name == name)
}

/// All words over `{0,1}` of length at most `n`, shortest first.
pub fn words_up_to(n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..n {
        layer = layer.iter().flat_map(|w| [format!("{w}0"), format!("{w}1")]).collect();
        out.extend(layer.iter().cloned());
    }
    out
}
