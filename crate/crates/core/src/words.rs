//! Binary words as graphs and as positional graphings.

use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::graphing::{Edge, GraphingRep, Weight};
use crate::measure_space::{Atom, BoxN, Cylinder, Dir, Interval, Letter, Region, Symbol};
use crate::microcosm::Realizer;
use crate::rational::Q;

/// Reads a word over `{0,1}`.
pub fn parse_word(w: &str) -> Result<Vec<Letter>> {
    w.chars()
        .map(|c| match c {
            '0' => Ok(Letter::Zero),
            '1' => Ok(Letter::One),
            _ => Err(Error::Validation(format!("word letter `{c}` is not 0 or 1"))),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    R,
    L,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordEdge {
    pub side: Side,
    pub index: usize,
    pub from: (Symbol, usize),
    pub to: (Symbol, usize),
}

/// Cyclic two-way graph of `*w`: positions `0..=|w|`, position 0 holding `*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordGraph {
    pub letters: Vec<Letter>,
    pub edges: Vec<WordEdge>,
}

impl WordGraph {
    pub fn positions(&self) -> usize {
        self.letters.len()
    }
}

pub fn word_graph(w: &str) -> Result<WordGraph> {
    let mut letters = vec![Letter::Star];
    letters.extend(parse_word(w)?);
    let n = letters.len();
    let mut edges = Vec::with_capacity(2 * n);
    for i in 0..n {
        let next = (i + 1) % n;
        edges.push(WordEdge {
            side: Side::R,
            index: i,
            from: (Symbol::ext(letters[i], Dir::Out), i),
            to: (Symbol::ext(letters[next], Dir::In), next),
        });
    }
    for i in 0..n {
        let prev = (i + n - 1) % n;
        edges.push(WordEdge {
            side: Side::L,
            index: i,
            from: (Symbol::ext(letters[i], Dir::In), i),
            to: (Symbol::ext(letters[prev], Dir::Out), prev),
        });
    }
    Ok(WordGraph { letters, edges })
}

/// A word graphing: positions stored as slots of the first coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordRep {
    pub graph: GraphingRep,
    /// Slot of each position among `m + 1` slots.
    pub iota: Vec<usize>,
    pub m: usize,
}

impl WordRep {
    pub fn grid(&self) -> u32 {
        (self.m + 1) as u32
    }

    /// Cube where every head sits on the `*` position.
    pub fn anchor_cube(&self, heads: usize) -> Vec<u32> {
        vec![self.iota[0] as u32; heads.max(1)]
    }
}

fn ext_support() -> Region {
    Region::symbols(&Symbol::ALL[..6])
}

fn slot(i: usize, m: usize) -> Interval {
    let d = (m + 1) as i64;
    Interval::new(Q::new((i as i64).into(), d.into()), Q::new((i as i64 + 1).into(), d.into()))
        .expect("slot inside [0,1]")
}

pub fn bang_representation(g: &WordGraph, iota: &[usize], m: usize) -> Result<WordRep> {
    if iota.len() != g.positions() {
        return Err(Error::Validation("injection must cover every position".into()));
    }
    let mut seen = vec![false; m + 1];
    for &j in iota {
        if j > m || seen[j] {
            return Err(Error::Validation(format!("{iota:?} is not an injection into 0..={m}")));
        }
        seen[j] = true;
    }
    let mut graph = GraphingRep::new(1, ext_support(), 1);
    let d = (m + 1) as i64;
    for e in &g.edges {
        let (f, i) = e.from;
        let (t, j) = e.to;
        let source = Region::from_atom(Atom::new(f, BoxN::on_coord(0, slot(iota[i], m)), Cylinder::any(), 0));
        let delta = Q::new((iota[j] as i64 - iota[i] as i64).into(), d.into());
        let realizer = Realizer::symbol_shift(f, t).then(&Realizer::coord_shift(0, delta));
        graph.push(Edge::new(source, 0, 0, realizer, Weight::one()));
    }
    Ok(WordRep { graph, iota: iota.to_vec(), m })
}

/// The representation with the identity injection and `|w| + 1` slots.
pub fn canonical(w: &str) -> Result<WordRep> {
    let g = word_graph(w)?;
    let n = g.positions();
    bang_representation(&g, &(0..n).collect::<Vec<_>>(), n - 1)
}

fn injections(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    let mut used = vec![false; m + 1];
    fn go(n: usize, m: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for j in 0..=m {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                go(n, m, cur, used, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    go(n, m, &mut cur, &mut used, &mut out);
    out
}

/// All representations of `w` on `m + 1` slots, in lexicographic order of the injection.
pub fn rep_family(w: &str, m: usize) -> Result<Vec<WordRep>> {
    let g = word_graph(w)?;
    if m + 1 < g.positions() {
        return Err(Error::Validation(format!("{m} + 1 slots cannot hold {} positions", g.positions())));
    }
    injections(g.positions(), m).iter().map(|i| bang_representation(&g, i, m)).collect()
}

/// `count` distinct representations: the canonical one, then seeded random injections
/// on `|w| + 1 + extra` slots.
pub fn sample_reps(w: &str, extra: usize, count: usize, seed: u64) -> Result<Vec<WordRep>> {
    let g = word_graph(w)?;
    let n = g.positions();
    let m = n - 1 + extra;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<Vec<usize>> = vec![(0..n).collect()];
    let slots: Vec<usize> = (0..=m).collect();
    let mut attempts = 0;
    while chosen.len() < count && attempts < 1000 {
        attempts += 1;
        let pick: Vec<usize> = slots.choose_multiple(&mut rng, n).copied().collect();
        if !chosen.contains(&pick) {
            chosen.push(pick);
        }
    }
    let mut out = Vec::with_capacity(chosen.len());
    out.push(canonical(w)?);
    for iota in &chosen[1..] {
        out.push(bang_representation(&g, iota, m)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn empty_word_graph() {
        let g = word_graph("").unwrap();
        assert_eq!(g.edges.len(), 2);
        assert_eq!(g.edges[0].from, (Symbol::StarOut, 0));
        assert_eq!(g.edges[0].to, (Symbol::StarIn, 0));
    }

    #[test]
    fn single_letter_graph() {
        let g = word_graph("0").unwrap();
        assert_eq!(g.edges.len(), 4);
        let r0 = &g.edges[0];
        assert_eq!((r0.from, r0.to), ((Symbol::StarOut, 0), (Symbol::ZeroIn, 1)));
        let r1 = &g.edges[1];
        assert_eq!((r1.from, r1.to), ((Symbol::ZeroOut, 1), (Symbol::StarIn, 0)));
        let l1 = &g.edges[3];
        assert_eq!((l1.from, l1.to), ((Symbol::ZeroIn, 1), (Symbol::StarOut, 0)));
    }

    #[test]
    fn two_letter_graph_matches_brute_force() {
        let g = word_graph("01").unwrap();
        assert_eq!(g.edges.len(), 6);
        let letters = [Letter::Star, Letter::Zero, Letter::One];
        for e in &g.edges {
            let (fs, i) = e.from;
            let (ts, j) = e.to;
            let (fl, fd) = fs.split().unwrap();
            let (tl, td) = ts.split().unwrap();
            assert_eq!(fl, letters[i]);
            assert_eq!(tl, letters[j]);
            match e.side {
                Side::R => assert_eq!((fd, td, j), (Dir::Out, Dir::In, (i + 1) % 3)),
                Side::L => assert_eq!((fd, td, j), (Dir::In, Dir::Out, (i + 2) % 3)),
            }
        }
    }

    #[test]
    fn bad_letter_rejected() {
        assert!(matches!(word_graph("012"), Err(Error::Validation(_))));
    }

    #[test]
    fn canonical_edge_moves_first_slot() {
        let rep = canonical("0").unwrap();
        let e = &rep.graph.edges[0];
        let expect = Region::from_atom(Atom::new(
            Symbol::StarOut,
            BoxN::on_coord(0, Interval::new(q(0, 1), q(1, 2)).unwrap()),
            Cylinder::any(),
            0,
        ));
        assert!(e.source.ae_equal(&expect));
        let t = e.target().unwrap();
        assert_eq!(t.atoms()[0].sym, Symbol::ZeroIn);
        assert_eq!(t.atoms()[0].bx.get(0), Interval::new(q(1, 2), q(1, 1)).unwrap());
        assert!(rep.graph.is_deterministic());
        assert!(rep.graph.validate().is_ok());
    }

    #[test]
    fn empty_word_rep() {
        let rep = canonical("").unwrap();
        assert_eq!(rep.graph.edges.len(), 2);
        assert_eq!(rep.grid(), 1);
    }

    #[test]
    fn family_sizes() {
        assert_eq!(rep_family("0", 1).unwrap().len(), 2);
        assert_eq!(rep_family("0", 2).unwrap().len(), 6);
        assert!(rep_family("01", 1).is_err());
        let fam = rep_family("01", 2).unwrap();
        assert_eq!(fam[0], canonical("01").unwrap());
    }

    #[test]
    fn realizers_preserve_measure_and_stack() {
        for rep in rep_family("10", 3).unwrap() {
            for e in &rep.graph.edges {
                assert!(e.realizer.stack().is_epsilon());
                assert_eq!(e.target().unwrap().measure(), e.source.measure());
            }
        }
    }

    #[test]
    fn samples_are_distinct() {
        let reps = sample_reps("101", 3, 5, 1).unwrap();
        assert_eq!(reps.len(), 5);
        for i in 0..5 {
            for j in 0..i {
                assert_ne!(reps[i].iota, reps[j].iota);
            }
        }
        assert_eq!(reps[0], canonical("101").unwrap());
    }
}
