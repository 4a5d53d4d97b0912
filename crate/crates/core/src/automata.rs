//! Two-way multihead probabilistic automata, optionally with a pushdown stack,
//! and a direct simulator used as an oracle for the graphing semantics.
//!
//! Heads range over positions `0..=|w|` of `*w` and move cyclically: `out`
//! steps to the next position, `in` to the previous one. Halting transitions
//! move no head, leave the stack alone, fire only when every head reads `*`,
//! and are enabled only when the stack is exactly the bottom marker.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linsolve::Absorbing;
use crate::measure_space::{Dir, Letter};
use crate::rational::{fmt_q, parse_q, Q};
use crate::stack_monoid::StackOp;
use crate::words::parse_word;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub read: Vec<Letter>,
    pub state: usize,
    /// Last popped letter; `None` matches any.
    pub popped: Option<Letter>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    /// Head moves; exactly one for a step, none for a halt.
    pub moves: Vec<(usize, Dir)>,
    pub op: StackOp,
    pub next: usize,
    pub p: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    pub heads: usize,
    pub stack: bool,
    pub states: Vec<String>,
    pub init: usize,
    pub accept: usize,
    pub reject: usize,
    pub delta: BTreeMap<Key, Vec<Transition>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Acceptance {
    pub accept: Q,
    pub reject: Q,
    /// False when configurations beyond the stack bound were dropped.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    /// `(key, index into delta[key])` for each step.
    pub steps: Vec<(Key, usize)>,
    pub ops: Vec<StackOp>,
    pub prob: Q,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Config {
    state: usize,
    pos: Vec<usize>,
    /// Bottom first.
    stack: Vec<Letter>,
    popped: Letter,
}

fn letter_str(l: &[Letter]) -> String {
    l.iter().map(|x| x.as_char()).collect()
}

impl Automaton {
    pub fn new(heads: usize, stack: bool, states: &[&str], init: usize, accept: usize, reject: usize) -> Automaton {
        Automaton {
            heads,
            stack,
            states: states.iter().map(|s| s.to_string()).collect(),
            init,
            accept,
            reject,
            delta: BTreeMap::new(),
        }
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn is_halting(&self, q: usize) -> bool {
        q == self.accept || q == self.reject
    }

    pub fn add(&mut self, key: Key, t: Transition) {
        self.delta.entry(key).or_default().push(t);
    }

    /// Transitions available in a configuration.
    pub fn lookup(&self, read: &[Letter], state: usize, popped: Letter) -> &[Transition] {
        let mut key = Key { read: read.to_vec(), state, popped: Some(popped) };
        if let Some(ts) = self.delta.get(&key) {
            return ts;
        }
        key.popped = None;
        self.delta.get(&key).map_or(&[], Vec::as_slice)
    }

    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        let nq = self.states.len();
        if self.heads == 0 {
            v.push("at least one head is required".into());
        }
        for (i, s) in self.states.iter().enumerate() {
            if self.states[..i].contains(s) {
                v.push(format!("state `{s}` declared twice"));
            }
        }
        for (what, q) in [("init", self.init), ("accept", self.accept), ("reject", self.reject)] {
            if q >= nq {
                v.push(format!("{what} state out of range"));
            }
        }
        if self.init == self.accept || self.init == self.reject || self.accept == self.reject {
            v.push("init, accept and reject must be distinct".into());
        }
        for (key, ts) in &self.delta {
            let at = format!("{} {}", letter_str(&key.read), self.states.get(key.state).map_or("?", String::as_str));
            if key.read.len() != self.heads {
                v.push(format!("{at}: read vector has {} letters", key.read.len()));
            }
            if key.state >= nq {
                v.push(format!("{at}: unknown state"));
                continue;
            }
            if self.is_halting(key.state) {
                v.push(format!("{at}: halting states have no transitions"));
            }
            if key.popped.is_some() && !self.stack {
                v.push(format!("{at}: popped-letter key without a stack"));
            }
            if key.popped.is_some()
                && self.delta.contains_key(&Key { popped: None, ..key.clone() })
            {
                v.push(format!("{at}: both a wildcard and a specific popped-letter entry"));
            }
            let total: Q = ts.iter().map(|t| t.p.clone()).sum();
            if total > Q::one() {
                v.push(format!("{at}: probabilities sum to {}", fmt_q(&total)));
            }
            for t in ts {
                if t.p <= Q::zero() || t.p > Q::one() {
                    v.push(format!("{at}: probability {} outside (0,1]", fmt_q(&t.p)));
                }
                if t.next >= nq {
                    v.push(format!("{at}: unknown target state"));
                    continue;
                }
                if t.next == self.init {
                    v.push(format!("{at}: transition back into the initial state"));
                }
                if !self.stack && t.op != StackOp::Id {
                    v.push(format!("{at}: stack operation without a stack"));
                }
                if self.is_halting(t.next) {
                    if !t.moves.is_empty() || t.op != StackOp::Id {
                        v.push(format!("{at}: halting transitions must not move heads or touch the stack"));
                    }
                    if key.read.iter().any(|&l| l != Letter::Star) {
                        v.push(format!("{at}: halting requires every head on the marker"));
                    }
                } else if t.moves.len() != 1 {
                    v.push(format!("{at}: a step moves exactly one head, found {}", t.moves.len()));
                }
                if t.moves.iter().any(|&(h, _)| h >= self.heads) {
                    v.push(format!("{at}: head index out of range"));
                }
                if t.op == StackOp::Pop {
                    self.check_repush(t.next, &at, &mut v);
                }
            }
        }
        v
    }

    /// After a pop, whatever reads `*` as the popped letter must push it back.
    fn check_repush(&self, q: usize, at: &str, v: &mut Vec<String>) {
        for (key, ts) in &self.delta {
            if key.state != q || !matches!(key.popped, None | Some(Letter::Star)) {
                continue;
            }
            if ts.iter().any(|t| t.op != StackOp::Push(Letter::Star)) {
                v.push(format!(
                    "{at}: pop into `{}` may expose the marker without pushing it back",
                    self.states[q]
                ));
                return;
            }
        }
    }

    /// Every listed probability is one and every key has at most one transition.
    pub fn is_deterministic(&self) -> bool {
        self.delta.values().all(|ts| ts.len() <= 1 && ts.iter().all(|t| t.p.is_one()))
    }

    fn successors(&self, word: &[Letter], c: &Config) -> Result<Vec<(Q, Step)>> {
        let n = word.len();
        let read: Vec<Letter> = c.pos.iter().map(|&p| word[p]).collect();
        let mut out = Vec::new();
        for (idx, t) in self.lookup(&read, c.state, c.popped).iter().enumerate() {
            if t.next == self.accept || t.next == self.reject {
                if c.stack == [Letter::Star] {
                    let o = if t.next == self.accept { Outcome::Accept } else { Outcome::Reject };
                    out.push((t.p.clone(), Step::Halt(o, idx)));
                }
                continue;
            }
            let mut next = c.clone();
            next.state = t.next;
            for &(h, d) in &t.moves {
                next.pos[h] = match d {
                    Dir::Out => (c.pos[h] + 1) % n,
                    Dir::In => (c.pos[h] + n - 1) % n,
                };
            }
            match t.op {
                StackOp::Id => {}
                StackOp::Push(l) => next.stack.push(l),
                StackOp::Pop => {
                    next.popped = next
                        .stack
                        .pop()
                        .ok_or_else(|| Error::Validation("pop on an empty stack".into()))?;
                }
            }
            out.push((t.p.clone(), Step::Go(next, idx)));
        }
        Ok(out)
    }

    fn start(&self) -> Config {
        Config { state: self.init, pos: vec![0; self.heads], stack: vec![Letter::Star], popped: Letter::Star }
    }

    fn read_key(&self, word: &[Letter], c: &Config) -> Key {
        let read: Vec<Letter> = c.pos.iter().map(|&p| word[p]).collect();
        let specific = Key { read: read.clone(), state: c.state, popped: Some(c.popped) };
        if self.delta.contains_key(&specific) {
            specific
        } else {
            Key { read, state: c.state, popped: None }
        }
    }

    /// Probability of accepting and of rejecting `w`, by exact absorption over
    /// configurations. Stacks longer than `stack_depth` are dropped.
    pub fn accept_probability(&self, w: &str, stack_depth: usize) -> Result<Acceptance> {
        if self.stack && stack_depth == 0 {
            return Err(Error::Parameter("stack depth must be positive for a pushdown automaton".into()));
        }
        let mut word = vec![Letter::Star];
        word.extend(parse_word(w)?);
        let mut sys: Absorbing<Outcome> = Absorbing::new();
        let mut ids: HashMap<Config, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let s = self.start();
        ids.insert(s.clone(), sys.add_state());
        queue.push_back(s);
        let mut exact = true;
        while let Some(c) = queue.pop_front() {
            let from = ids[&c];
            for (p, step) in self.successors(&word, &c)? {
                match step {
                    Step::Halt(o, _) => sys.add_exit(from, o, p),
                    Step::Go(next, _) => {
                        if next.stack.len() > stack_depth {
                            exact = false;
                            continue;
                        }
                        let to = match ids.get(&next) {
                            Some(&to) => to,
                            None => {
                                let to = sys.add_state();
                                ids.insert(next.clone(), to);
                                queue.push_back(next);
                                to
                            }
                        };
                        sys.add_transition(from, to, p);
                    }
                }
            }
        }
        let sol = sys.solve()?.swap_remove(0);
        let get = |o| sol.get(&o).cloned().unwrap_or_else(Q::zero);
        Ok(Acceptance { accept: get(Outcome::Accept), reject: get(Outcome::Reject), exact })
    }

    /// Halting computations of at most `max_len` steps.
    pub fn trace_enumerate(&self, w: &str, max_len: usize) -> Result<Vec<Trace>> {
        let mut word = vec![Letter::Star];
        word.extend(parse_word(w)?);
        let mut out = Vec::new();
        let mut stack = vec![(self.start(), Vec::new(), Vec::new(), Q::one())];
        while let Some((c, steps, ops, prob)) = stack.pop() {
            if steps.len() == max_len {
                continue;
            }
            let key = self.read_key(&word, &c);
            for (p, step) in self.successors(&word, &c)? {
                let prob = &prob * &p;
                let mut steps = steps.clone();
                let idx = match &step {
                    Step::Halt(_, i) | Step::Go(_, i) => *i,
                };
                steps.push((key.clone(), idx));
                let mut ops = ops.clone();
                ops.push(self.delta[&key][idx].op);
                match step {
                    Step::Halt(outcome, _) => out.push(Trace { steps, ops, prob, outcome }),
                    Step::Go(next, _) => stack.push((next, steps, ops, prob)),
                }
            }
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "automaton").unwrap();
        writeln!(s, "heads {}", self.heads).unwrap();
        writeln!(s, "stack {}", if self.stack { "yes" } else { "no" }).unwrap();
        writeln!(s, "states {}", self.states.join(" ")).unwrap();
        writeln!(s, "init {}", self.states[self.init]).unwrap();
        writeln!(s, "accept {}", self.states[self.accept]).unwrap();
        writeln!(s, "reject {}", self.states[self.reject]).unwrap();
        for (key, ts) in &self.delta {
            for t in ts {
                let popped = key.popped.map_or("-".to_string(), |l| l.as_char().to_string());
                let moves = if t.moves.is_empty() {
                    "halt".to_string()
                } else {
                    t.moves
                        .iter()
                        .map(|(h, d)| format!("{h}:{}", d.as_str()))
                        .collect::<Vec<_>>()
                        .join(",")
                };
                writeln!(
                    s,
                    "trans {} {} {} -> {} {} {} {}",
                    letter_str(&key.read),
                    self.states[key.state],
                    popped,
                    moves,
                    t.op.name(),
                    self.states[t.next],
                    fmt_q(&t.p)
                )
                .unwrap();
            }
        }
        s
    }

    /// Parses the text format and validates the result.
    pub fn parse(text: &str) -> Result<Automaton> {
        let mut heads = None;
        let mut stack = None;
        let mut states: Option<Vec<String>> = None;
        let mut names: [Option<(String, usize)>; 3] = [None, None, None];
        let mut rows = Vec::new();
        let mut header = false;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |msg: String| Error::Parse { line, msg };
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let toks: Vec<&str> = l.split_whitespace().collect();
            match (toks[0], toks.len()) {
                ("automaton", 1) if !header => header = true,
                ("heads", 2) => {
                    heads = Some(toks[1].parse::<usize>().map_err(|_| err("bad head count".into()))?)
                }
                ("stack", 2) => {
                    stack = Some(match toks[1] {
                        "yes" => true,
                        "no" => false,
                        _ => return Err(err("stack must be yes or no".into())),
                    })
                }
                ("states", k) if k >= 2 => states = Some(toks[1..].iter().map(|s| s.to_string()).collect()),
                ("init", 2) => names[0] = Some((toks[1].to_string(), line)),
                ("accept", 2) => names[1] = Some((toks[1].to_string(), line)),
                ("reject", 2) => names[2] = Some((toks[1].to_string(), line)),
                ("trans", 9) if toks[4] == "->" => rows.push((line, toks.iter().map(|s| s.to_string()).collect::<Vec<_>>())),
                _ => return Err(err(format!("unrecognised line `{l}`"))),
            }
        }
        let missing = |what: &str| Error::Parse { line: 0, msg: format!("missing `{what}`") };
        if !header {
            return Err(missing("automaton"));
        }
        let states = states.ok_or_else(|| missing("states"))?;
        let find = |name: &str, line: usize| {
            states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::Parse { line, msg: format!("unknown state `{name}`") })
        };
        let mut idx = [0usize; 3];
        for (i, what) in ["init", "accept", "reject"].iter().enumerate() {
            let (name, line) = names[i].clone().ok_or_else(|| missing(what))?;
            idx[i] = find(&name, line)?;
        }
        let mut a = Automaton {
            heads: heads.ok_or_else(|| missing("heads"))?,
            stack: stack.ok_or_else(|| missing("stack"))?,
            states: states.clone(),
            init: idx[0],
            accept: idx[1],
            reject: idx[2],
            delta: BTreeMap::new(),
        };
        for (line, t) in rows {
            let err = |msg: String| Error::Parse { line, msg };
            let read = t[1]
                .chars()
                .map(|c| Letter::from_char(c).ok_or_else(|| err(format!("bad read letter `{c}`"))))
                .collect::<Result<Vec<_>>>()?;
            let state = find(&t[2], line)?;
            let popped = match t[3].as_str() {
                "-" => None,
                s if s.chars().count() == 1 => Some(
                    Letter::from_char(s.chars().next().unwrap_or(' '))
                        .ok_or_else(|| err(format!("bad popped letter `{s}`")))?,
                ),
                s => return Err(err(format!("bad popped letter `{s}`"))),
            };
            let moves = if t[5] == "halt" {
                Vec::new()
            } else {
                t[5].split(',')
                    .map(|m| {
                        let (h, d) = m.split_once(':').ok_or_else(|| err(format!("bad move `{m}`")))?;
                        let h = h.parse::<usize>().map_err(|_| err(format!("bad head `{h}`")))?;
                        let d = match d {
                            "in" => Dir::In,
                            "out" => Dir::Out,
                            _ => return Err(err(format!("bad direction `{d}`"))),
                        };
                        Ok((h, d))
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            let op = StackOp::from_name(&t[6]).ok_or_else(|| err(format!("bad stack operation `{}`", t[6])))?;
            let next = find(&t[7], line)?;
            let p = parse_q(&t[8]).map_err(|e| err(e.to_string()))?;
            a.add(Key { read, state, popped }, Transition { moves, op, next, p });
        }
        let v = a.validate();
        if !v.is_empty() {
            return Err(Error::Validation(v.join("; ")));
        }
        Ok(a)
    }
}

enum Step {
    Halt(Outcome, usize),
    Go(Config, usize),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use crate::stack_monoid::ThetaWord;

    const S: Letter = Letter::Star;

    fn key(read: &[Letter], state: usize) -> Key {
        Key { read: read.to_vec(), state, popped: None }
    }

    fn step(h: usize, d: Dir, next: usize, p: Q) -> Transition {
        Transition { moves: vec![(h, d)], op: StackOp::Id, next, p }
    }

    fn halt(next: usize, p: Q) -> Transition {
        Transition { moves: vec![], op: StackOp::Id, next, p }
    }

    /// Even number of ones: scan right, flip parity on 1, halt back on the marker.
    fn even_ones() -> Automaton {
        let mut a = Automaton::new(1, false, &["init", "even", "odd", "acc", "rej"], 0, 3, 4);
        a.add(key(&[S], 0), step(0, Dir::Out, 1, qi(1)));
        for (l, flip) in [(Letter::Zero, false), (Letter::One, true)] {
            a.add(key(&[l], 1), step(0, Dir::Out, if flip { 2 } else { 1 }, qi(1)));
            a.add(key(&[l], 2), step(0, Dir::Out, if flip { 1 } else { 2 }, qi(1)));
        }
        a.add(key(&[S], 1), halt(3, qi(1)));
        a.add(key(&[S], 2), halt(4, qi(1)));
        a
    }

    fn coin() -> Automaton {
        let mut a = Automaton::new(1, false, &["init", "acc", "rej"], 0, 1, 2);
        a.add(key(&[S], 0), halt(1, q(1, 2)));
        a.add(key(&[S], 0), halt(2, q(1, 2)));
        a
    }

    fn retry() -> Automaton {
        let mut a = Automaton::new(1, false, &["init", "loop", "acc", "rej"], 0, 2, 3);
        a.add(key(&[S], 0), halt(2, q(1, 2)));
        a.add(key(&[S], 0), step(0, Dir::Out, 1, q(1, 2)));
        a.add(key(&[S], 1), halt(2, q(1, 2)));
        a.add(key(&[S], 1), step(0, Dir::Out, 1, q(1, 2)));
        for l in [Letter::Zero, Letter::One] {
            a.add(key(&[l], 1), step(0, Dir::Out, 1, qi(1)));
        }
        a
    }

    fn push_pop() -> Automaton {
        let mut a = Automaton::new(1, true, &["init", "pushed", "back", "acc", "rej"], 0, 3, 4);
        a.add(key(&[S], 0), Transition { moves: vec![(0, Dir::Out)], op: StackOp::Push(Letter::Zero), next: 1, p: qi(1) });
        for l in [Letter::Zero, Letter::One, S] {
            let (h, d) = if l == S { (0, Dir::In) } else { (0, Dir::Out) };
            let t = Transition { moves: vec![(h, d)], op: StackOp::Pop, next: 2, p: qi(1) };
            a.add(key(&[l], 1), t);
        }
        let back = |read: Letter| Key { read: vec![read], state: 2, popped: Some(Letter::Zero) };
        for l in [Letter::Zero, Letter::One] {
            a.add(back(l), step(0, Dir::Out, 2, qi(1)));
        }
        a.add(back(S), halt(3, qi(1)));
        a
    }

    #[test]
    fn validation_examples() {
        assert!(even_ones().validate().is_empty());
        let mut two = even_ones();
        two.delta.get_mut(&key(&[S], 0)).unwrap()[0].moves.push((0, Dir::In));
        assert!(two.validate().iter().any(|v| v.contains("exactly one head")));
        let mut heavy = coin();
        heavy.delta.get_mut(&key(&[S], 0)).unwrap()[0].p = q(5, 8);
        assert!(heavy.validate().iter().any(|v| v.contains("9/8")));
    }

    #[test]
    fn repush_rule() {
        let mut a = Automaton::new(1, true, &["init", "p", "acc", "rej"], 0, 2, 3);
        a.add(key(&[S], 0), Transition { moves: vec![(0, Dir::Out)], op: StackOp::Pop, next: 1, p: qi(1) });
        a.add(key(&[Letter::Zero], 1), step(0, Dir::In, 1, qi(1)));
        assert!(a.validate().iter().any(|v| v.contains("pushing it back")));
    }

    #[test]
    fn oracle_examples() {
        let e = even_ones();
        assert_eq!(e.accept_probability("11", 16).unwrap().accept, qi(1));
        assert_eq!(e.accept_probability("1", 16).unwrap().accept, qi(0));
        assert_eq!(e.accept_probability("", 16).unwrap().accept, qi(1));
        assert_eq!(coin().accept_probability("0101", 16).unwrap().accept, q(1, 2));
        let r = retry().accept_probability("01", 16).unwrap();
        assert_eq!((r.accept, r.exact), (qi(1), true));
        assert_eq!(push_pop().accept_probability("1", 16).unwrap().accept, qi(1));
    }

    #[test]
    fn zero_depth_is_rejected() {
        assert!(matches!(push_pop().accept_probability("1", 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn trace_examples() {
        let mut imm = Automaton::new(1, false, &["init", "acc", "rej"], 0, 1, 2);
        imm.add(key(&[S], 0), halt(1, qi(1)));
        let t = imm.trace_enumerate("01", 2).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].prob, qi(1));
        let c = coin().trace_enumerate("", 2).unwrap();
        assert_eq!(c.iter().map(|t| t.prob.clone()).collect::<Vec<_>>(), vec![q(1, 2), q(1, 2)]);
        let pp = push_pop().trace_enumerate("0", 10).unwrap();
        assert_eq!(pp.len(), 1);
        assert!(ThetaWord::from_ops(&pp[0].ops).is_epsilon());
    }

    #[test]
    fn traces_account_for_all_mass() {
        let r = retry();
        let traces = r.trace_enumerate("1", 12).unwrap();
        let total: Q = traces.iter().map(|t| t.prob.clone()).sum();
        // Rounds take two steps; halting attempts after 1, 3, ..., 11 steps.
        assert_eq!(total, q(63, 64));
    }

    #[test]
    fn text_round_trip() {
        for a in [even_ones(), coin(), retry(), push_pop()] {
            let t = a.to_text();
            let b = Automaton::parse(&t).unwrap();
            assert_eq!(a, b);
            assert_eq!(t, b.to_text());
        }
    }

    #[test]
    fn malformed_probability_reports_line() {
        let t = coin().to_text().replace("1/2", "0.5");
        match Automaton::parse(&t) {
            Err(Error::Parse { line, .. }) => assert!(line >= 8),
            other => panic!("unexpected {other:?}"),
        }
    }
}
