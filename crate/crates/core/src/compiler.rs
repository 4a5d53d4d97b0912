//! Translation of automata into graphings.
//!
//! The dialect of a compiled `k`-head machine is `Q x S_k x {*,0,1}^k x {*,0,1}`:
//! control state, the permutation `sigma` recording which coordinate holds each
//! head (`sigma[h]`), the letters last read by each head, and the last popped
//! letter. Coordinate 0 always holds the head the word is about to move.

use std::collections::{BTreeSet, VecDeque};

use crate::automata::{Automaton, Key, Transition};
use crate::error::{Error, Result};
use crate::execution::{discretize, path_sums, ExecOptions, PathSum, StartPoint, ThickGraph};
use crate::graphing::{Edge, GraphingRep, Weight};
use crate::measure_space::{Atom, BoxN, Cylinder, Letter, Region, Symbol};
use crate::microcosm::Realizer;
use crate::stack_monoid::StackOp;
use crate::words::WordRep;

/// Control part of a compiled dialect state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DialectState {
    pub q: usize,
    pub sigma: Vec<usize>,
    pub read: Vec<Letter>,
    pub popped: Letter,
}

#[derive(Debug, Clone)]
pub struct CompiledMachine {
    pub graphing: GraphingRep,
    /// Source transition and dialect context of each edge.
    pub provenance: Vec<String>,
    pub heads: usize,
    pub n_states: usize,
    perms: Vec<Vec<usize>>,
    init: usize,
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn go(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in 0..k {
            if !cur.contains(&j) {
                cur.push(j);
                go(k, cur, out);
                cur.pop();
            }
        }
    }
    go(k, &mut cur, &mut out);
    out
}

fn read_vectors(k: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p: Vec<Letter>| {
                Letter::ALL.iter().map(move |&l| {
                    let mut q = p.clone();
                    q.push(l);
                    q
                })
            })
            .collect();
    }
    out
}

impl CompiledMachine {
    pub fn dialect_size(&self) -> u32 {
        self.graphing.dialect
    }

    pub fn index(&self, s: &DialectState) -> u32 {
        let k = self.heads;
        let rank = self.perms.iter().position(|p| *p == s.sigma).expect("permutation of the heads");
        let read = s.read.iter().fold(0usize, |acc, l| acc * 3 + l.index());
        let idx = ((s.q * self.perms.len() + rank) * 3usize.pow(k as u32) + read) * 3 + s.popped.index();
        idx as u32
    }

    pub fn decode(&self, idx: u32) -> DialectState {
        let k = self.heads;
        let mut i = idx as usize;
        let popped = Letter::ALL[i % 3];
        i /= 3;
        let pk = 3usize.pow(k as u32);
        let mut r = i % pk;
        i /= pk;
        let rank = i % self.perms.len();
        let q = i / self.perms.len();
        let mut read = vec![Letter::Star; k];
        for h in (0..k).rev() {
            read[h] = Letter::ALL[r % 3];
            r /= 3;
        }
        DialectState { q, sigma: self.perms[rank].clone(), read, popped }
    }

    /// `(init, id, *...*, *)`: where computations start and where halting lands.
    pub fn start_state(&self) -> u32 {
        self.init as u32
    }

    pub fn start_point(&self, rep: &WordRep, sym: Symbol) -> StartPoint {
        StartPoint { sym, cube: rep.anchor_cube(self.heads), state: self.start_state(), stack: vec![Letter::Star] }
    }

    /// Cycle sums through `a` and through `r` at the anchor cube.
    pub fn accept_reject(&self, rep: &WordRep, opts: &ExecOptions) -> Result<(PathSum, PathSum)> {
        let starts = [self.start_point(rep, Symbol::Accept), self.start_point(rep, Symbol::Reject)];
        let mut sums = path_sums(&self.graphing, &rep.graph, &starts, opts)?;
        let r = sums.pop().expect("two sums");
        let a = sums.pop().expect("two sums");
        Ok((a, r))
    }
}

fn stack_realizer(op: StackOp) -> Realizer {
    Realizer::stack_op(op)
}

/// Realizer and successor state of a moving transition taken in `st` on head `h`.
fn step(
    from: Symbol,
    st: &DialectState,
    t: &Transition,
    popped_after: Letter,
) -> (Realizer, DialectState) {
    let (h, d) = t.moves[0];
    let to = Symbol::ext(st.read[h], d);
    let c = st.sigma[h];
    let realizer = Realizer::symbol_shift(from, to)
        .then(&Realizer::transposition(0, c))
        .then(&stack_realizer(t.op));
    let sigma: Vec<usize> = st
        .sigma
        .iter()
        .map(|&x| if x == 0 { c } else if x == c { 0 } else { x })
        .collect();
    let next = DialectState { q: t.next, sigma, read: st.read.clone(), popped: popped_after };
    (realizer, next)
}

fn halt_realizer(from: Symbol, to: Symbol, sigma: &[usize]) -> Realizer {
    let mut inv = vec![0; sigma.len()];
    for (h, &c) in sigma.iter().enumerate() {
        inv[c] = h;
    }
    Realizer::symbol_shift(from, to).then(&Realizer::permutation(inv).expect("inverse permutation"))
}

fn source(sym: Symbol, cyl: Cylinder) -> Region {
    Region::from_atom(Atom::new(sym, BoxN::full(), cyl, 0))
}

/// `[[a]]`: one edge per transition, dialect context and popped letter.
pub fn compile(a: &Automaton) -> Result<CompiledMachine> {
    let v = a.validate();
    if !v.is_empty() {
        return Err(Error::Validation(v.join("; ")));
    }
    let k = a.heads;
    let perms = permutations(k);
    let nq = a.states.len();
    let dialect = nq * perms.len() * 3usize.pow(k as u32) * 3;
    let dialect = u32::try_from(dialect).map_err(|_| Error::Parameter("dialect too large".into()))?;
    let mut cm = CompiledMachine {
        graphing: GraphingRep::new(k, Region::symbols(&Symbol::ALL), dialect),
        provenance: Vec::new(),
        heads: k,
        n_states: nq,
        perms: perms.clone(),
        init: 0,
    };
    let start = DialectState {
        q: a.init,
        sigma: (0..k).collect(),
        read: vec![Letter::Star; k],
        popped: Letter::Star,
    };
    cm.init = cm.index(&start) as usize;
    let halt_sym = |q: usize| if q == a.accept { Symbol::Accept } else { Symbol::Reject };
    let mut edges: Vec<(Edge, String)> = Vec::new();

    let describe = |key: &Key, i: usize, st: &DialectState| {
        format!(
            "{} {} {} #{i} sigma={:?} u={}",
            key.read.iter().map(|l| l.as_char()).collect::<String>(),
            a.states[key.state],
            key.popped.map_or('-', Letter::as_char),
            st.sigma,
            st.popped.as_char()
        )
    };
    // Transitions enabled in `st` after arriving on `from`, leaving dialect state `in_state`.
    let emit = |from: Symbol, st: &DialectState, in_state: u32, cyl: Cylinder, edges: &mut Vec<(Edge, String)>| {
        let key_some = Key { read: st.read.clone(), state: st.q, popped: Some(st.popped) };
        let key = if a.delta.contains_key(&key_some) {
            key_some
        } else {
            Key { popped: None, ..key_some }
        };
        let Some(ts) = a.delta.get(&key) else { return };
        for (i, t) in ts.iter().enumerate() {
            let w = Weight::plain(t.p.clone());
            if a.is_halting(t.next) {
                let r = halt_realizer(from, halt_sym(t.next), &st.sigma);
                let e = Edge::new(source(from, cyl.clone()), in_state, cm.init as u32, r, w);
                edges.push((e, describe(&key, i, st)));
            } else if t.op == StackOp::Pop {
                for x in Letter::ALL {
                    let Some(c) = cyl.intersect(&Cylinder::of(&[x])) else { continue };
                    let (r, next) = step(from, st, t, x);
                    let e = Edge::new(source(from, c), in_state, cm.index(&next), r, w.clone());
                    edges.push((e, describe(&key, i, st)));
                }
            } else {
                let (r, next) = step(from, st, t, st.popped);
                let e = Edge::new(source(from, cyl.clone()), in_state, cm.index(&next), r, w.clone());
                edges.push((e, describe(&key, i, st)));
            }
        }
    };

    for v in [Symbol::Accept, Symbol::Reject] {
        emit(v, &start, cm.init as u32, Cylinder::of(&[Letter::Star]), &mut edges);
    }
    let reads = read_vectors(k);
    for q in 0..nq {
        if q == a.init || a.is_halting(q) {
            continue;
        }
        for sigma in &perms {
            let head_at_0 = sigma.iter().position(|&c| c == 0).expect("some head on coordinate 0");
            for read in &reads {
                for u in Letter::ALL {
                    for sym in &Symbol::ALL[..6] {
                        let (l, _) = sym.split().expect("extended symbol");
                        let mut now = read.clone();
                        now[head_at_0] = l;
                        let st = DialectState { q, sigma: sigma.clone(), read: now, popped: u };
                        // The point still carries the letters read before this arrival.
                        let pre = DialectState { read: read.clone(), ..st.clone() };
                        emit(*sym, &st, cm.index(&pre), Cylinder::any(), &mut edges);
                    }
                }
            }
        }
    }
    for (e, p) in edges {
        cm.graphing.push(e);
        cm.provenance.push(p);
    }
    Ok(cm)
}

/// Drops edges leaving dialect states unreachable from the start state.
pub fn prune(cm: &CompiledMachine) -> CompiledMachine {
    let mut reach = BTreeSet::from([cm.init as u32]);
    let mut queue = VecDeque::from([cm.init as u32]);
    let mut out_of: std::collections::HashMap<u32, Vec<u32>> = std::collections::HashMap::new();
    for e in &cm.graphing.edges {
        out_of.entry(e.in_state).or_default().push(e.out_state);
    }
    while let Some(s) = queue.pop_front() {
        for &t in out_of.get(&s).into_iter().flatten() {
            if reach.insert(t) {
                queue.push_back(t);
            }
        }
    }
    let mut pruned = cm.clone();
    pruned.graphing.edges.clear();
    pruned.provenance.clear();
    for (e, p) in cm.graphing.edges.iter().zip(&cm.provenance) {
        if reach.contains(&e.in_state) {
            pruned.graphing.edges.push(e.clone());
            pruned.provenance.push(p.clone());
        }
    }
    pruned
}

/// The finite graphs of the machine and of a word representation.
pub fn finite_view(cm: &CompiledMachine, rep: &WordRep) -> Result<(ThickGraph, ThickGraph)> {
    discretize(&cm.graphing, &rep.graph, rep.grid())
}

/// Summary line for reports: dialect size, edge count and microcosm.
pub fn summary(cm: &CompiledMachine) -> String {
    let (stack, i) = cm.graphing.microcosm_class();
    format!(
        "dialect {} edges {} microcosm {}{}",
        cm.graphing.dialect,
        cm.graphing.edges.len(),
        if stack { "n" } else { "m" },
        i
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Transition;
    use crate::measure_space::Dir;
    use crate::rational::{q, qi, Q};
    use crate::words::canonical;

    const S: Letter = Letter::Star;

    fn key(read: &[Letter], state: usize) -> Key {
        Key { read: read.to_vec(), state, popped: None }
    }

    fn mv(h: usize, d: Dir, next: usize, p: Q) -> Transition {
        Transition { moves: vec![(h, d)], op: StackOp::Id, next, p }
    }

    fn halt(next: usize, p: Q) -> Transition {
        Transition { moves: vec![], op: StackOp::Id, next, p }
    }

    fn even_ones() -> Automaton {
        let mut a = Automaton::new(1, false, &["init", "even", "odd", "acc", "rej"], 0, 3, 4);
        a.add(key(&[S], 0), mv(0, Dir::Out, 1, qi(1)));
        for (l, flip) in [(Letter::Zero, false), (Letter::One, true)] {
            a.add(key(&[l], 1), mv(0, Dir::Out, if flip { 2 } else { 1 }, qi(1)));
            a.add(key(&[l], 2), mv(0, Dir::Out, if flip { 1 } else { 2 }, qi(1)));
        }
        a.add(key(&[S], 1), halt(3, qi(1)));
        a.add(key(&[S], 2), halt(4, qi(1)));
        a
    }

    /// Two heads: head 1 runs to the end and back, then head 0 walks right; accept.
    fn two_head_walk() -> Automaton {
        let mut a = Automaton::new(2, false, &["init", "h1", "h0", "acc", "rej"], 0, 3, 4);
        a.add(key(&[S, S], 0), mv(1, Dir::Out, 1, qi(1)));
        for l in [Letter::Zero, Letter::One] {
            a.add(key(&[S, l], 1), mv(1, Dir::Out, 1, qi(1)));
            a.add(key(&[l, S], 2), mv(0, Dir::Out, 2, q(1, 1)));
        }
        a.add(key(&[S, S], 1), mv(0, Dir::In, 2, q(1, 2)));
        a.add(key(&[S, S], 1), halt(4, q(1, 2)));
        a.add(key(&[S, S], 2), halt(3, qi(1)));
        a
    }

    #[test]
    fn dialect_layout() {
        let cm = compile(&two_head_walk()).unwrap();
        assert_eq!(cm.dialect_size(), 5 * 2 * 9 * 3);
        for i in [0, 7, 100, cm.dialect_size() - 1] {
            assert_eq!(cm.index(&cm.decode(i)), i);
        }
        assert_eq!(cm.perms.len(), 2);
    }

    #[test]
    fn matches_oracle_on_small_words() {
        for a in [even_ones(), two_head_walk()] {
            let cm = compile(&a).unwrap();
            assert!(cm.graphing.validate().is_ok());
            for w in ["", "0", "1", "11", "101", "0110"] {
                let rep = canonical(w).unwrap();
                let (acc, rej) = cm.accept_reject(&rep, &ExecOptions::default()).unwrap();
                let o = a.accept_probability(w, 16).unwrap();
                assert_eq!(acc.neutral(), o.accept, "accept on {w:?}");
                assert_eq!(rej.neutral(), o.reject, "reject on {w:?}");
            }
        }
    }

    #[test]
    fn realizers_stay_in_the_head_microcosm() {
        let cm = compile(&two_head_walk()).unwrap();
        assert_eq!(cm.graphing.microcosm_class(), (false, 2));
        assert!(compile(&even_ones()).unwrap().graphing.is_deterministic());
    }

    #[test]
    fn pruning_keeps_path_sums() {
        let a = two_head_walk();
        let cm = compile(&a).unwrap();
        let small = prune(&cm);
        assert!(small.graphing.edges.len() < cm.graphing.edges.len());
        let rep = canonical("10").unwrap();
        let opts = ExecOptions::default();
        assert_eq!(
            cm.accept_reject(&rep, &opts).unwrap(),
            small.accept_reject(&rep, &opts).unwrap()
        );
    }
}
