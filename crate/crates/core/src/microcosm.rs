//! Realizers: the maps edges act by, in symbolic form.
//!
//! A realizer sends `(x, s, pi)` to `(x + shift, P s + b, theta(pi))` where `P`
//! moves coordinate `c` to `perm[c]`, `b` is a finite rational translation per
//! coordinate and `theta` is a normal-form stack-monoid word.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::measure_space::{Atom, BoxN, Cylinder, Interval, Letter, Region, Symbol};
use crate::rational::{fmt_q, in_unit, parse_q, Q};
use crate::stack_monoid::{StackOp, ThetaWord};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Realizer {
    shift: i64,
    /// `perm[c]` is where coordinate `c` (0-based) is sent; identity past the end.
    perm: Vec<usize>,
    box_shift: BTreeMap<usize, Q>,
    stack: ThetaWord,
}

/// The monoids realizers may be drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Microcosm {
    /// Translations and permutations fixing every coordinate past `i`.
    M(usize),
    /// `M(i)` plus push/pop.
    N(usize),
    MInf,
    NInf,
}

impl Realizer {
    pub fn identity() -> Realizer {
        Realizer::default()
    }

    pub fn new(shift: i64, perm: Vec<usize>, box_shift: BTreeMap<usize, Q>, stack: ThetaWord) -> Result<Realizer> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::Validation(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        let mut r = Realizer { shift, perm, box_shift, stack: stack.reduce() };
        r.canonicalize();
        Ok(r)
    }

    fn canonicalize(&mut self) {
        while let Some(&last) = self.perm.last() {
            if last + 1 == self.perm.len() {
                self.perm.pop();
            } else {
                break;
            }
        }
        self.box_shift.retain(|_, v| !v.is_zero());
    }

    pub fn translation(z: i64) -> Realizer {
        Realizer { shift: z, ..Realizer::default() }
    }

    /// Integer translation carrying the interval of `from` onto that of `to`.
    pub fn symbol_shift(from: Symbol, to: Symbol) -> Realizer {
        Realizer::translation(to.psi() - from.psi())
    }

    /// Swaps coordinates `a` and `b` (0-based).
    pub fn transposition(a: usize, b: usize) -> Realizer {
        let n = a.max(b) + 1;
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(a, b);
        let mut r = Realizer { perm, ..Realizer::default() };
        r.canonicalize();
        r
    }

    pub fn permutation(perm: Vec<usize>) -> Result<Realizer> {
        Realizer::new(0, perm, BTreeMap::new(), ThetaWord::epsilon())
    }

    pub fn coord_shift(coord: usize, amount: Q) -> Realizer {
        let mut r = Realizer::default();
        r.box_shift.insert(coord, amount);
        r.canonicalize();
        r
    }

    pub fn stack_op(op: StackOp) -> Realizer {
        Realizer { stack: ThetaWord::encode(op), ..Realizer::default() }
    }

    pub fn push(l: Letter) -> Realizer {
        Realizer::stack_op(StackOp::Push(l))
    }

    pub fn pop() -> Realizer {
        Realizer::stack_op(StackOp::Pop)
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn perm_of(&self, c: usize) -> usize {
        self.perm.get(c).copied().unwrap_or(c)
    }

    /// Length of the explicitly stored permutation (its support bound).
    pub fn perm_len(&self) -> usize {
        self.perm.len()
    }

    pub fn box_shift(&self) -> &BTreeMap<usize, Q> {
        &self.box_shift
    }

    pub fn stack(&self) -> &ThetaWord {
        &self.stack
    }

    /// Coordinates this realizer may move or translate.
    pub fn dims(&self) -> usize {
        let b = self.box_shift.keys().next_back().map_or(0, |&k| k + 1);
        self.perm.len().max(b)
    }

    pub fn is_identity(&self) -> bool {
        *self == Realizer::identity()
    }

    /// Identity on the `[0,1]^N` and line factors (stack effect ignored).
    pub fn is_spatial_identity(&self) -> bool {
        self.shift == 0 && self.perm.is_empty() && self.box_shift.is_empty()
    }

    /// `g` after `self`.
    pub fn then(&self, g: &Realizer) -> Realizer {
        let n = self.perm.len().max(g.perm.len());
        let perm: Vec<usize> = (0..n).map(|c| g.perm_of(self.perm_of(c))).collect();
        let mut box_shift = g.box_shift.clone();
        for (c, v) in &self.box_shift {
            *box_shift.entry(g.perm_of(*c)).or_insert_with(Q::zero) += v;
        }
        let mut r = Realizer {
            shift: self.shift + g.shift,
            perm,
            box_shift,
            stack: g.stack.mul(&self.stack),
        };
        r.canonicalize();
        r
    }

    /// Inverse when the stack part is trivial.
    pub fn inverse(&self) -> Option<Realizer> {
        if !self.stack.is_epsilon() {
            return None;
        }
        let mut perm = vec![0; self.perm.len()];
        for (c, &d) in self.perm.iter().enumerate() {
            perm[d] = c;
        }
        let inv_perm = Realizer { perm: perm.clone(), ..Realizer::default() };
        let mut box_shift = BTreeMap::new();
        for (c, v) in &self.box_shift {
            box_shift.insert(inv_perm.perm_of(*c), -v.clone());
        }
        let mut r = Realizer { shift: -self.shift, perm, box_shift, stack: ThetaWord::epsilon() };
        r.canonicalize();
        Some(r)
    }

    pub fn apply_box(&self, bx: &BoxN) -> Result<BoxN> {
        let n = bx.dims().max(self.dims());
        let mut ivs = vec![Interval::full(); n];
        for c in 0..n {
            ivs[self.perm_of(c)] = bx.get(c);
        }
        for (&c, v) in &self.box_shift {
            let iv = &ivs[c];
            let (lo, hi) = (&iv.lo + v, &iv.hi + v);
            if !in_unit(&lo) || !in_unit(&hi) {
                return Err(Error::Validation(format!(
                    "coordinate {} shifted by {} leaves [0,1]",
                    c + 1,
                    fmt_q(v)
                )));
            }
            ivs[c] = Interval { lo, hi };
        }
        Ok(BoxN::new(ivs))
    }

    /// Action on a cube of the `1/grid` lattice, given by its index vector.
    pub fn apply_cube(&self, cube: &[u32], grid: u32) -> Result<Vec<u32>> {
        let n = cube.len();
        if self.dims() > n {
            return Err(Error::Discretization(format!(
                "realizer acts on {} coordinates, grid has {n}",
                self.dims()
            )));
        }
        let mut out = vec![0u32; n];
        for (c, &k) in cube.iter().enumerate() {
            out[self.perm_of(c)] = k;
        }
        for (&c, v) in &self.box_shift {
            let steps = v * Q::from_integer(grid.into());
            if !steps.is_integer() {
                return Err(Error::Discretization(format!(
                    "shift {} is not a multiple of 1/{grid}",
                    fmt_q(v)
                )));
            }
            let k = i64::from(out[c]) + i64::try_from(steps.to_integer()).unwrap_or(i64::MAX);
            if k < 0 || k >= i64::from(grid) {
                return Err(Error::Discretization(format!("cube leaves the grid on coordinate {}", c + 1)));
            }
            out[c] = k as u32;
        }
        Ok(out)
    }

    pub fn apply_symbol(&self, sym: Symbol) -> Result<Symbol> {
        let k = sym.psi() + self.shift;
        Symbol::from_psi(k).ok_or(Error::InvalidTarget(k))
    }

    pub fn apply_atom(&self, a: &Atom) -> Result<Vec<Atom>> {
        let sym = self.apply_symbol(a.sym)?;
        let bx = self.apply_box(&a.bx)?;
        let pops = self.stack.pops();
        let mut cyls = vec![a.cyl.clone()];
        while cyls[0].prefix.len() < pops {
            cyls = cyls.iter().flat_map(|c| c.children()).collect();
        }
        Ok(cyls
            .into_iter()
            .map(|c| {
                let mut prefix = self.stack.pushes();
                prefix.extend_from_slice(&c.prefix[pops..]);
                Atom::new(sym, bx.clone(), Cylinder { prefix }, a.state)
            })
            .collect())
    }

    /// Image of a region.
    pub fn apply(&self, r: &Region) -> Result<Region> {
        let mut atoms = Vec::new();
        for a in r.atoms() {
            atoms.extend(self.apply_atom(a)?);
        }
        Ok(Region::from_disjoint(atoms))
    }

    pub fn in_microcosm(&self, which: Microcosm) -> bool {
        if !self.box_shift.is_empty() {
            return false;
        }
        let stack_ok = self.stack.is_epsilon();
        match which {
            Microcosm::M(i) => stack_ok && self.perm.len() <= i.max(1),
            Microcosm::N(i) => self.perm.len() <= i.max(1),
            Microcosm::MInf => stack_ok,
            Microcosm::NInf => true,
        }
    }

    /// Permutation written as 1-based cycles, `id` for the identity.
    fn perm_cycles(&self) -> String {
        let mut seen = vec![false; self.perm.len()];
        let mut out = String::new();
        for start in 0..self.perm.len() {
            if seen[start] || self.perm[start] == start {
                continue;
            }
            let mut cyc = Vec::new();
            let mut c = start;
            while !seen[c] {
                seen[c] = true;
                cyc.push((c + 1).to_string());
                c = self.perm[c];
            }
            out.push('(');
            out.push_str(&cyc.join(","));
            out.push(')');
        }
        if out.is_empty() {
            "id".into()
        } else {
            out
        }
    }

    pub fn parse(s: &str) -> Result<Realizer> {
        let bad = |m: &str| Error::Validation(format!("malformed realizer `{s}`: {m}"));
        let parts: Vec<&str> = s.split(':').collect();
        let [shift, perm, bx, stack] = parts[..] else {
            return Err(bad("expected shift:perm:box:stack"));
        };
        let shift: i64 = shift.parse().map_err(|_| bad("shift"))?;
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        if perm != "id" {
            for cyc in perm.split(')').filter(|c| !c.is_empty()) {
                let body = cyc.strip_prefix('(').ok_or_else(|| bad("cycle"))?;
                let elems = body
                    .split(',')
                    .map(|x| x.parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| bad("cycle element"))?;
                cycles.push(elems);
            }
        }
        let n = cycles.iter().flatten().max().map_or(0, |m| m + 1);
        let mut p: Vec<usize> = (0..n).collect();
        for cyc in &cycles {
            for (i, &c) in cyc.iter().enumerate() {
                p[c] = cyc[(i + 1) % cyc.len()];
            }
        }
        let mut box_shift = BTreeMap::new();
        if bx != "-" {
            for entry in bx.split(',') {
                let (c, v) = entry.split_once('=').ok_or_else(|| bad("box entry"))?;
                let c: usize = c.parse().ok().filter(|&c| c >= 1).ok_or_else(|| bad("box coordinate"))?;
                box_shift.insert(c - 1, parse_q(v)?);
            }
        }
        Realizer::new(shift, p, box_shift, ThetaWord::parse(stack)?)
    }
}

impl fmt::Display for Realizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bx = if self.box_shift.is_empty() {
            "-".to_string()
        } else {
            self.box_shift
                .iter()
                .map(|(c, v)| format!("{}={}", c + 1, fmt_q(v)))
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}:{}:{}:{}", self.shift, self.perm_cycles(), bx, self.stack)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;

    fn iv(a: i64, b: i64, d: i64) -> Interval {
        Interval::new(q(a, d), q(b, d)).unwrap()
    }

    #[test]
    fn apply_examples() {
        let r = Region::symbol(Symbol::Accept);
        assert_eq!(Realizer::identity().apply(&r).unwrap(), r);

        let a = Atom::new(Symbol::Accept, BoxN::full(), Cylinder::parse("*").unwrap(), 0);
        let img = Realizer::push(Letter::Zero).apply_atom(&a).unwrap();
        assert_eq!(img[0].cyl.to_string(), "0*");

        let b = Atom::new(Symbol::Accept, BoxN::new(vec![iv(0, 1, 2), iv(1, 2, 2)]), Cylinder::any(), 0);
        let img = Realizer::transposition(0, 1).apply_atom(&b).unwrap();
        assert_eq!(img[0].bx, BoxN::new(vec![iv(1, 2, 2), iv(0, 1, 2)]));
    }

    #[test]
    fn pop_splits_and_scales() {
        let a = Atom::symbol(Symbol::Accept);
        let img = Realizer::pop().apply_atom(&a).unwrap();
        assert_eq!(img.len(), 3);
        let pre = Atom::new(Symbol::Accept, BoxN::full(), Cylinder::parse("0").unwrap(), 0);
        let img = Realizer::pop().apply(&Region::from_atom(pre.clone())).unwrap();
        assert_eq!(img.measure(), pre.measure() * q(3, 1));
    }

    #[test]
    fn invalid_target() {
        let r = Region::symbol(Symbol::Reject);
        assert_eq!(Realizer::translation(1).apply(&r), Err(Error::InvalidTarget(8)));
    }

    #[test]
    fn compose_examples() {
        let net = Realizer::push(Letter::Zero).then(&Realizer::pop());
        assert!(net.is_identity());
        assert_eq!(Realizer::translation(1).then(&Realizer::translation(2)), Realizer::translation(3));
        let t = Realizer::transposition(0, 1);
        assert!(t.then(&t).is_identity());
    }

    #[test]
    fn microcosm_membership() {
        assert!(Realizer::translation(3).in_microcosm(Microcosm::M(1)));
        let t = Realizer::transposition(0, 1);
        assert!(t.in_microcosm(Microcosm::M(2)));
        assert!(!t.in_microcosm(Microcosm::M(1)));
        let p = Realizer::push(Letter::One);
        assert!(p.in_microcosm(Microcosm::N(1)));
        assert!(!p.in_microcosm(Microcosm::MInf));
        assert!(!Realizer::coord_shift(0, q(1, 2)).in_microcosm(Microcosm::NInf));
    }

    #[test]
    fn text_round_trip() {
        let r = Realizer::translation(-2)
            .then(&Realizer::permutation(vec![1, 2, 0]).unwrap())
            .then(&Realizer::coord_shift(0, q(1, 3)))
            .then(&Realizer::pop())
            .then(&Realizer::push(Letter::Star));
        let s = r.to_string();
        assert_eq!(Realizer::parse(&s).unwrap(), r, "{s}");
    }

    fn arb_realizer() -> impl Strategy<Value = Realizer> {
        (
            -3i64..4,
            Just(vec![0usize, 1, 2]).prop_shuffle(),
            proptest::option::of((0usize..3, -2i64..3)),
            proptest::collection::vec(0u8..4, 0..3),
        )
            .prop_map(|(z, perm, bs, ops)| {
                let mut box_shift = BTreeMap::new();
                if let Some((c, v)) = bs {
                    box_shift.insert(c, q(v, 6));
                }
                let ops: Vec<StackOp> = ops
                    .into_iter()
                    .map(|o| match o {
                        0 => StackOp::Pop,
                        k => StackOp::Push(Letter::ALL[k as usize - 1]),
                    })
                    .collect();
                Realizer::new(z, perm, box_shift, ThetaWord::from_ops(&ops)).unwrap()
            })
    }

    proptest! {
        #[test]
        fn monoid_laws(f in arb_realizer(), g in arb_realizer(), h in arb_realizer()) {
            prop_assert_eq!(f.then(&g).then(&h), f.then(&g.then(&h)));
            prop_assert_eq!(Realizer::identity().then(&f), f.clone());
            prop_assert_eq!(f.then(&Realizer::identity()), f);
        }

        #[test]
        fn stack_free_realizers_preserve_measure(perm in Just(vec![0usize, 1]).prop_shuffle(), lo in 0i64..3, len in 1i64..3) {
            let f = Realizer::permutation(perm).unwrap().then(&Realizer::translation(1));
            let a = Atom::new(Symbol::StarIn, BoxN::new(vec![iv(lo, (lo + len).min(4), 4)]), Cylinder::any(), 0);
            let r = Region::from_atom(a);
            let img = f.apply(&r).unwrap();
            prop_assert_eq!(img.measure(), r.measure());
            let back = f.inverse().unwrap().apply(&img).unwrap();
            prop_assert!(back.ae_equal(&r));
        }

        #[test]
        fn pop_after_push_is_identity(l in 0usize..3, depth in 0usize..3) {
            let push = Realizer::push(Letter::ALL[l]);
            let f = push.then(&Realizer::pop());
            let cyl = Cylinder::of(&vec![Letter::Zero; depth]);
            let r = Region::from_atom(Atom::new(Symbol::Accept, BoxN::full(), cyl, 0));
            prop_assert!(f.apply(&r).unwrap().ae_equal(&r));
            let stepwise = Realizer::pop().apply(&push.apply(&r).unwrap()).unwrap();
            prop_assert!(stepwise.ae_equal(&r));
        }
    }
}
