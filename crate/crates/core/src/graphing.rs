//! Graphing representatives, their weights, and the predicates on them.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::measure_space::{overlay, Atom, Letter, Region, Symbol};
use crate::microcosm::{Microcosm, Realizer};
use crate::rational::{fmt_q, in_unit, lcm_denoms, parse_q, Q};

/// Element of `[0,1] x {0,1}`. `(p, false)` prints as `p`, `(p, true)` as `p.1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight {
    pub p: Q,
    pub flag: bool,
}

impl Weight {
    pub fn new(p: Q, flag: bool) -> Weight {
        Weight { p, flag }
    }

    pub fn plain(p: Q) -> Weight {
        Weight { p, flag: false }
    }

    pub fn one() -> Weight {
        Weight::plain(Q::one())
    }

    /// Probabilities multiply; the flag records whether any factor was flagged.
    pub fn mul(&self, other: &Weight) -> Weight {
        Weight { p: &self.p * &other.p, flag: self.flag || other.flag }
    }

    /// Parameter map `m(p, f) = p * f`.
    pub fn m(&self) -> Q {
        if self.flag {
            self.p.clone()
        } else {
            Q::zero()
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.flag {
            write!(f, "{}.1", fmt_q(&self.p))
        } else {
            write!(f, "{}", fmt_q(&self.p))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// Spatial part of the source; the dialect part is `in_state`.
    pub source: Region,
    pub in_state: u32,
    pub out_state: u32,
    pub realizer: Realizer,
    pub weight: Weight,
}

impl Edge {
    pub fn new(source: Region, in_state: u32, out_state: u32, realizer: Realizer, weight: Weight) -> Edge {
        Edge { source, in_state, out_state, realizer, weight }
    }

    pub fn target(&self) -> Result<Region> {
        self.realizer.apply(&self.source)
    }

    fn label(&self) -> (u32, u32, Realizer, Weight) {
        (self.in_state, self.out_state, self.realizer.clone(), self.weight.clone())
    }
}

/// Finite weighted edge family over a support region and a finite dialect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphingRep {
    /// Number of `[0,1]` coordinates the graphing may touch.
    pub coords: usize,
    pub support: Region,
    pub dialect: u32,
    pub edges: Vec<Edge>,
}

impl GraphingRep {
    pub fn new(coords: usize, support: Region, dialect: u32) -> GraphingRep {
        GraphingRep { coords, support, dialect: dialect.max(1), edges: Vec::new() }
    }

    pub fn push(&mut self, e: Edge) {
        self.edges.push(e);
    }

    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.edges.iter().enumerate() {
            if e.in_state >= self.dialect || e.out_state >= self.dialect {
                return Err(Error::Validation(format!("edge {i}: state outside dialect")));
            }
            if !in_unit(&e.weight.p) {
                return Err(Error::Validation(format!("edge {i}: weight outside [0,1]")));
            }
            if !e.source.ae_subset(&self.support) {
                return Err(Error::Validation(format!("edge {i}: source outside support")));
            }
            if !e.target()?.ae_subset(&self.support) {
                return Err(Error::Validation(format!("edge {i}: target outside support")));
            }
        }
        Ok(())
    }

    /// Smallest `i` such that every realizer lies in `N(i)` (or `M(i)`).
    pub fn microcosm_class(&self) -> (bool, usize) {
        let uses_stack = self.edges.iter().any(|e| !e.realizer.stack().is_epsilon());
        let i = (1..=self.coords.max(1))
            .find(|&i| {
                self.edges.iter().all(|e| e.realizer.in_microcosm(Microcosm::N(i)))
            })
            .unwrap_or(usize::MAX);
        (uses_stack, i)
    }

    fn cells_by_state(&self) -> BTreeMap<u32, Vec<(Atom, Vec<usize>)>> {
        let mut groups: BTreeMap<u32, Vec<(Atom, usize)>> = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            for a in e.source.atoms() {
                groups.entry(e.in_state).or_default().push((a.clone(), i));
            }
        }
        groups.into_iter().map(|(s, pieces)| (s, overlay(&pieces))).collect()
    }

    /// Weight one everywhere and sources with the same input state overlap only on null sets.
    pub fn is_deterministic(&self) -> bool {
        if self.edges.iter().any(|e| !e.weight.p.is_one()) {
            return false;
        }
        self.cells_by_state()
            .values()
            .flatten()
            .all(|(_, labels)| labels.len() <= 1)
    }

    /// Weights in `[0,1]` and, almost everywhere, outgoing probability at most one.
    pub fn is_subprobabilistic(&self) -> bool {
        if self.edges.iter().any(|e| !in_unit(&e.weight.p)) {
            return false;
        }
        self.cells_by_state().values().flatten().all(|(_, labels)| {
            labels.iter().map(|&i| self.edges[i].weight.p.clone()).sum::<Q>() <= Q::one()
        })
    }

    pub fn to_text(&self, comments: Option<&[String]>) -> String {
        let mut s = String::new();
        writeln!(s, "graphing").unwrap();
        writeln!(s, "coords {}", self.coords).unwrap();
        writeln!(s, "dialect {}", self.dialect).unwrap();
        writeln!(s, "support {}", self.support).unwrap();
        for (i, e) in self.edges.iter().enumerate() {
            if let Some(c) = comments.and_then(|c| c.get(i)) {
                writeln!(s, "# {c}").unwrap();
            }
            writeln!(
                s,
                "edge {} {} {} {} {} {}",
                e.in_state,
                e.out_state,
                e.source,
                e.realizer,
                fmt_q(&e.weight.p),
                u8::from(e.weight.flag)
            )
            .unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<GraphingRep> {
        let mut coords = None;
        let mut dialect = None;
        let mut support = None;
        let mut edges = Vec::new();
        let mut header = false;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |msg: String| Error::Parse { line, msg };
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = l.split_whitespace().collect();
            let wrap = |e: Error| err(e.to_string());
            match toks[0] {
                "graphing" if !header => header = true,
                "coords" if toks.len() == 2 => {
                    coords = Some(toks[1].parse::<usize>().map_err(|_| err("bad coords".into()))?)
                }
                "dialect" if toks.len() == 2 => {
                    dialect = Some(toks[1].parse::<u32>().map_err(|_| err("bad dialect".into()))?)
                }
                "support" if toks.len() == 2 => support = Some(Region::parse(toks[1]).map_err(wrap)?),
                "edge" if toks.len() == 7 => {
                    let ins = toks[1].parse().map_err(|_| err("bad in-state".into()))?;
                    let outs = toks[2].parse().map_err(|_| err("bad out-state".into()))?;
                    let source = Region::parse(toks[3]).map_err(wrap)?;
                    let realizer = Realizer::parse(toks[4]).map_err(wrap)?;
                    let p = parse_q(toks[5]).map_err(wrap)?;
                    if !in_unit(&p) {
                        return Err(err(format!("weight {} outside [0,1]", toks[5])));
                    }
                    let flag = match toks[6] {
                        "0" => false,
                        "1" => true,
                        _ => return Err(err("flag must be 0 or 1".into())),
                    };
                    edges.push(Edge::new(source, ins, outs, realizer, Weight::new(p, flag)));
                }
                other => return Err(err(format!("unexpected `{other}`"))),
            }
        }
        let missing = |what: &str| Error::Parse { line: 0, msg: format!("missing `{what}`") };
        if !header {
            return Err(missing("graphing"));
        }
        let g = GraphingRep {
            coords: coords.ok_or_else(|| missing("coords"))?,
            dialect: dialect.ok_or_else(|| missing("dialect"))?,
            support: support.ok_or_else(|| missing("support"))?,
            edges,
        };
        g.validate()?;
        Ok(g)
    }
}

/// `f` refines `g`: each edge of `f` sits inside an edge of `g` with the same
/// realizer, states and weight, and the pieces assigned to a `g` edge tile its
/// source up to null sets.
pub fn is_refinement(f: &GraphingRep, g: &GraphingRep) -> bool {
    if f.dialect != g.dialect || !f.support.ae_equal(&g.support) {
        return false;
    }
    let candidates: Vec<Vec<usize>> = f
        .edges
        .iter()
        .map(|fe| {
            g.edges
                .iter()
                .enumerate()
                .filter(|(_, ge)| ge.label() == fe.label() && fe.source.ae_subset(&ge.source))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return false;
    }
    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); g.edges.len()];
    assign(f, g, &candidates, 0, &mut assigned)
}

fn assign(
    f: &GraphingRep,
    g: &GraphingRep,
    candidates: &[Vec<usize>],
    i: usize,
    assigned: &mut Vec<Vec<usize>>,
) -> bool {
    if i == candidates.len() {
        return assigned.iter().enumerate().all(|(j, group)| {
            let union = group
                .iter()
                .fold(Region::empty(), |acc, &k| acc.union(&f.edges[k].source));
            union.ae_equal(&g.edges[j].source)
        });
    }
    for &j in &candidates[i] {
        let fits = assigned[j]
            .iter()
            .all(|&k| f.edges[k].source.ae_disjoint(&f.edges[i].source));
        if fits {
            assigned[j].push(i);
            if assign(f, g, candidates, i + 1, assigned) {
                return true;
            }
            assigned[j].pop();
        }
    }
    false
}

/// Common-refinement check: on every cell of the joint source partition, both
/// graphings carry the same multiset of (target state, realizer, weight).
pub fn equivalent(f: &GraphingRep, g: &GraphingRep) -> bool {
    if f.dialect != g.dialect || !f.support.ae_equal(&g.support) {
        return false;
    }
    if let Some(verdict) = equivalent_on_grid(f, g) {
        return verdict;
    }
    let mut groups: BTreeMap<u32, Vec<(Atom, (bool, usize))>> = BTreeMap::new();
    for (side, gr) in [(false, f), (true, g)] {
        for (i, e) in gr.edges.iter().enumerate() {
            for a in e.source.atoms() {
                groups.entry(e.in_state).or_default().push((a.clone(), (side, i)));
            }
        }
    }
    for pieces in groups.values() {
        for (_, labels) in overlay(pieces) {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for (side, i) in labels {
                let e = if side { &g.edges[i] } else { &f.edges[i] };
                let key = (e.out_state, e.realizer.clone(), e.weight.clone());
                if side {
                    right.push(key);
                } else {
                    left.push(key);
                }
            }
            left.sort();
            right.sort();
            if left != right {
                return false;
            }
        }
    }
    true
}

type CellKey = (u32, Symbol, Vec<u32>, Vec<Letter>);
type EdgeKey = (u32, Realizer, Weight);

/// Cell-by-cell comparison on the common grid of all sources; `None` when
/// that grid is too large to enumerate.
fn equivalent_on_grid(f: &GraphingRep, g: &GraphingRep) -> Option<bool> {
    const LIMIT: u64 = 1 << 18;
    let atoms = || [f, g].into_iter().flat_map(|x| x.edges.iter()).flat_map(|e| e.source.atoms());
    let ends: Vec<Q> = atoms().flat_map(|a| a.bx.intervals().iter().flat_map(|iv| [iv.lo.clone(), iv.hi.clone()])).collect();
    let grid = lcm_denoms(&ends).to_u64()?;
    let dims = atoms().map(|a| a.bx.dims()).max().unwrap_or(0).max(f.coords).max(g.coords);
    let depth = atoms().map(|a| a.cyl.prefix.len()).max().unwrap_or(0);
    let cells = grid.checked_pow(dims as u32)?.checked_mul(3u64.pow(depth as u32))?;
    if cells > LIMIT {
        return None;
    }
    let mut table: HashMap<CellKey, [Vec<EdgeKey>; 2]> = HashMap::new();
    for (side, gr) in [f, g].into_iter().enumerate() {
        for e in &gr.edges {
            let key = (e.out_state, e.realizer.clone(), e.weight.clone());
            for a in e.source.atoms() {
                let ranges: Vec<(u32, u32)> = (0..dims)
                    .map(|c| {
                        let iv = a.bx.get(c);
                        let at = |x: &Q| (x * Q::from_integer(grid.into())).to_integer().to_u32().unwrap_or(0);
                        (at(&iv.lo), at(&iv.hi))
                    })
                    .collect();
                let mut prefixes = vec![a.cyl.prefix.clone()];
                while prefixes[0].len() < depth {
                    prefixes = prefixes
                        .into_iter()
                        .flat_map(|p| [Letter::Star, Letter::Zero, Letter::One].map(|l| [p.as_slice(), &[l]].concat()))
                        .collect();
                }
                let mut cube: Vec<u32> = ranges.iter().map(|r| r.0).collect();
                if ranges.iter().any(|r| r.0 >= r.1) {
                    continue;
                }
                loop {
                    for p in &prefixes {
                        table
                            .entry((e.in_state, a.sym, cube.clone(), p.clone()))
                            .or_default()[side]
                            .push(key.clone());
                    }
                    let mut c = 0;
                    loop {
                        if c == dims {
                            break;
                        }
                        cube[c] += 1;
                        if cube[c] < ranges[c].1 {
                            break;
                        }
                        cube[c] = ranges[c].0;
                        c += 1;
                    }
                    if c == dims {
                        break;
                    }
                }
            }
        }
    }
    Some(table.into_values().all(|[mut l, mut r]| {
        l.sort();
        r.sort();
        l == r
    }))
}
