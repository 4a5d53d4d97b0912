//! Symbolic measurable subsets of `Z x [0,1]^N x {*,0,1}^N`.
//!
//! Sets are finite unions of [`Atom`]s. An atom is the product of one symbol
//! interval on the integer-indexed line, a rational box on the first few
//! `[0,1]` coordinates (the rest are implicitly full), a stack cylinder, and a
//! dialect index. All measures are exact rationals.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, in_unit, parse_q, Q};

/// Tape and stack alphabet `{*, 0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Star,
    Zero,
    One,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::Star, Letter::Zero, Letter::One];

    pub fn as_char(self) -> char {
        match self {
            Letter::Star => '*',
            Letter::Zero => '0',
            Letter::One => '1',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            '*' => Some(Letter::Star),
            '0' => Some(Letter::Zero),
            '1' => Some(Letter::One),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Port direction of an extended symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    In,
    Out,
}

impl Dir {
    pub fn as_str(self) -> &'static str {
        match self {
            Dir::In => "in",
            Dir::Out => "out",
        }
    }
}

/// The eight symbols `({*,0,1} x {In,Out}) + {a, r}`.
///
/// The fixed injection into the line sends the symbol with index `k` to the
/// interval `[k, k+1]`, in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    StarIn,
    StarOut,
    ZeroIn,
    ZeroOut,
    OneIn,
    OneOut,
    Accept,
    Reject,
}

impl Symbol {
    pub const ALL: [Symbol; 8] = [
        Symbol::StarIn,
        Symbol::StarOut,
        Symbol::ZeroIn,
        Symbol::ZeroOut,
        Symbol::OneIn,
        Symbol::OneOut,
        Symbol::Accept,
        Symbol::Reject,
    ];

    /// Left endpoint of the symbol interval.
    pub fn psi(self) -> i64 {
        self as i64
    }

    pub fn from_psi(k: i64) -> Option<Symbol> {
        usize::try_from(k).ok().and_then(|k| Symbol::ALL.get(k).copied())
    }

    pub fn ext(letter: Letter, dir: Dir) -> Symbol {
        match (letter, dir) {
            (Letter::Star, Dir::In) => Symbol::StarIn,
            (Letter::Star, Dir::Out) => Symbol::StarOut,
            (Letter::Zero, Dir::In) => Symbol::ZeroIn,
            (Letter::Zero, Dir::Out) => Symbol::ZeroOut,
            (Letter::One, Dir::In) => Symbol::OneIn,
            (Letter::One, Dir::Out) => Symbol::OneOut,
        }
    }

    /// Letter and direction for the six extended symbols.
    pub fn split(self) -> Option<(Letter, Dir)> {
        Some(match self {
            Symbol::StarIn => (Letter::Star, Dir::In),
            Symbol::StarOut => (Letter::Star, Dir::Out),
            Symbol::ZeroIn => (Letter::Zero, Dir::In),
            Symbol::ZeroOut => (Letter::Zero, Dir::Out),
            Symbol::OneIn => (Letter::One, Dir::In),
            Symbol::OneOut => (Letter::One, Dir::Out),
            Symbol::Accept | Symbol::Reject => return None,
        })
    }

    pub fn is_ext(self) -> bool {
        self.split().is_some()
    }

    pub fn name(self) -> &'static str {
        match self {
            Symbol::StarIn => "*i",
            Symbol::StarOut => "*o",
            Symbol::ZeroIn => "0i",
            Symbol::ZeroOut => "0o",
            Symbol::OneIn => "1i",
            Symbol::OneOut => "1o",
            Symbol::Accept => "a",
            Symbol::Reject => "r",
        }
    }

    pub fn from_name(s: &str) -> Option<Symbol> {
        Symbol::ALL.iter().copied().find(|x| x.name() == s)
    }
}

/// Closed rational interval inside `[0,1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Result<Interval> {
        if !in_unit(&lo) || !in_unit(&hi) || lo > hi {
            return Err(Error::Validation(format!(
                "interval [{}, {}] is not inside [0,1]",
                fmt_q(&lo),
                fmt_q(&hi)
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn full() -> Interval {
        Interval { lo: Q::zero(), hi: Q::one() }
    }

    pub fn is_full(&self) -> bool {
        self.lo.is_zero() && self.hi.is_one()
    }

    pub fn len(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", fmt_q(&self.lo), fmt_q(&self.hi))
    }
}

/// Rational box on the first coordinates; coordinates past the end are `[0,1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BoxN {
    ivs: Vec<Interval>,
}

impl BoxN {
    pub fn full() -> BoxN {
        BoxN { ivs: Vec::new() }
    }

    pub fn new(ivs: Vec<Interval>) -> BoxN {
        let mut b = BoxN { ivs };
        b.trim();
        b
    }

    /// Box that restricts a single coordinate (0-based) and leaves the rest full.
    pub fn on_coord(coord: usize, iv: Interval) -> BoxN {
        let mut ivs = vec![Interval::full(); coord + 1];
        ivs[coord] = iv;
        BoxN::new(ivs)
    }

    fn trim(&mut self) {
        while self.ivs.last().is_some_and(Interval::is_full) {
            self.ivs.pop();
        }
    }

    pub fn get(&self, coord: usize) -> Interval {
        self.ivs.get(coord).cloned().unwrap_or_else(Interval::full)
    }

    /// Number of explicitly restricted coordinates.
    pub fn dims(&self) -> usize {
        self.ivs.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.ivs
    }

    pub fn measure(&self) -> Q {
        self.ivs.iter().fold(Q::one(), |acc, iv| acc * iv.len())
    }

    pub fn intersect(&self, other: &BoxN) -> Option<BoxN> {
        let n = self.dims().max(other.dims());
        let ivs = (0..n)
            .map(|c| self.get(c).intersect(&other.get(c)))
            .collect::<Option<Vec<_>>>()?;
        Some(BoxN::new(ivs))
    }

    pub fn contains(&self, other: &BoxN) -> bool {
        let n = self.dims().max(other.dims());
        (0..n).all(|c| self.get(c).contains(&other.get(c)))
    }

    pub fn with_coord(&self, coord: usize, iv: Interval) -> BoxN {
        let mut ivs = self.ivs.clone();
        if ivs.len() <= coord {
            ivs.resize(coord + 1, Interval::full());
        }
        ivs[coord] = iv;
        BoxN::new(ivs)
    }

    /// Parts of `self` outside `other`, pairwise overlapping only on boundaries.
    fn minus(&self, other: &BoxN) -> Vec<BoxN> {
        let Some(_) = self.intersect(other) else {
            return vec![self.clone()];
        };
        let n = self.dims().max(other.dims());
        let mut out = Vec::new();
        let mut rest = self.clone();
        for c in 0..n {
            let mine = rest.get(c);
            let theirs = other.get(c);
            if mine.lo < theirs.lo {
                out.push(rest.with_coord(c, Interval { lo: mine.lo.clone(), hi: theirs.lo.clone() }));
            }
            if theirs.hi < mine.hi {
                out.push(rest.with_coord(c, Interval { lo: theirs.hi.clone(), hi: mine.hi.clone() }));
            }
            let common = mine.intersect(&theirs).expect("boxes intersect");
            rest = rest.with_coord(c, common);
        }
        out.retain(|b| !b.measure().is_zero());
        out
    }
}

impl fmt::Display for BoxN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ivs.is_empty() {
            return write!(f, "full");
        }
        for (i, iv) in self.ivs.iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

/// Cylinder `V(u)`: stacks whose first letters are `u`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cylinder {
    pub prefix: Vec<Letter>,
}

impl Cylinder {
    pub fn any() -> Cylinder {
        Cylinder { prefix: Vec::new() }
    }

    pub fn of(prefix: &[Letter]) -> Cylinder {
        Cylinder { prefix: prefix.to_vec() }
    }

    pub fn parse(s: &str) -> Result<Cylinder> {
        if s == "e" {
            return Ok(Cylinder::any());
        }
        s.chars()
            .map(|c| {
                Letter::from_char(c)
                    .ok_or_else(|| Error::Validation(format!("bad stack letter `{c}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(|prefix| Cylinder { prefix })
    }

    /// `3^-|prefix|`.
    pub fn measure(&self) -> Q {
        let mut d = num_bigint::BigInt::one();
        for _ in 0..self.prefix.len() {
            d *= 3;
        }
        Q::new(num_bigint::BigInt::one(), d)
    }

    pub fn intersect(&self, other: &Cylinder) -> Option<Cylinder> {
        let (short, long) = if self.prefix.len() <= other.prefix.len() {
            (self, other)
        } else {
            (other, self)
        };
        long.prefix.starts_with(&short.prefix).then(|| long.clone())
    }

    pub fn contains(&self, other: &Cylinder) -> bool {
        other.prefix.starts_with(&self.prefix)
    }

    /// Children obtained by fixing one more letter.
    pub fn children(&self) -> [Cylinder; 3] {
        Letter::ALL.map(|l| {
            let mut prefix = self.prefix.clone();
            prefix.push(l);
            Cylinder { prefix }
        })
    }
}

impl fmt::Display for Cylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.prefix.is_empty() {
            return write!(f, "e");
        }
        for l in &self.prefix {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

/// Product of a symbol interval, a box, a cylinder and a dialect index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub sym: Symbol,
    pub bx: BoxN,
    pub cyl: Cylinder,
    /// Dialect index; 0 for state-free regions.
    pub state: u32,
}

impl Atom {
    pub fn new(sym: Symbol, bx: BoxN, cyl: Cylinder, state: u32) -> Atom {
        Atom { sym, bx, cyl, state }
    }

    /// The whole symbol interval: full box, any stack.
    pub fn symbol(sym: Symbol) -> Atom {
        Atom::new(sym, BoxN::full(), Cylinder::any(), 0)
    }

    pub fn measure(&self) -> Q {
        self.bx.measure() * self.cyl.measure()
    }

    pub fn intersect(&self, other: &Atom) -> Option<Atom> {
        if self.sym != other.sym || self.state != other.state {
            return None;
        }
        Some(Atom {
            sym: self.sym,
            bx: self.bx.intersect(&other.bx)?,
            cyl: self.cyl.intersect(&other.cyl)?,
            state: self.state,
        })
    }

    pub fn contains(&self, other: &Atom) -> bool {
        self.sym == other.sym
            && self.state == other.state
            && self.bx.contains(&other.bx)
            && self.cyl.contains(&other.cyl)
    }

    /// `self \ other` up to measure zero, as disjoint atoms.
    pub fn subtract(&self, other: &Atom) -> Vec<Atom> {
        let Some(common) = self.intersect(other) else {
            return vec![self.clone()];
        };
        if common.measure().is_zero() {
            return vec![self.clone()];
        }
        let mut out: Vec<Atom> = self
            .bx
            .minus(&other.bx)
            .into_iter()
            .map(|bx| Atom { bx, ..self.clone() })
            .collect();
        // Inside the common box, remove the deeper cylinder if `other` is narrower.
        let inner = other.cyl.prefix.len();
        for depth in self.cyl.prefix.len()..inner {
            for l in Letter::ALL {
                if l != other.cyl.prefix[depth] {
                    let mut prefix = other.cyl.prefix[..depth].to_vec();
                    prefix.push(l);
                    out.push(Atom {
                        bx: common.bx.clone(),
                        cyl: Cylinder { prefix },
                        ..self.clone()
                    });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        for iv in self.bx.intervals() {
            Interval::new(iv.lo.clone(), iv.hi.clone())?;
        }
        Ok(())
    }

    pub fn parse(s: &str) -> Result<Atom> {
        let bad = || Error::Validation(format!("malformed atom `{s}`"));
        let parts: Vec<&str> = s.split(':').collect();
        let [sym, bx, cyl, state] = parts[..] else {
            return Err(bad());
        };
        let sym = Symbol::from_name(sym).ok_or_else(bad)?;
        let bx = parse_box(bx)?;
        let cyl = Cylinder::parse(cyl)?;
        let state = state.parse().map_err(|_| bad())?;
        Ok(Atom { sym, bx, cyl, state })
    }
}

fn parse_box(s: &str) -> Result<BoxN> {
    if s == "full" {
        return Ok(BoxN::full());
    }
    let mut ivs = Vec::new();
    for part in s.split('x') {
        let inner = part
            .strip_prefix('[')
            .and_then(|p| p.strip_suffix(']'))
            .ok_or_else(|| Error::Validation(format!("malformed interval `{part}`")))?;
        let (lo, hi) = inner
            .split_once(',')
            .ok_or_else(|| Error::Validation(format!("malformed interval `{part}`")))?;
        ivs.push(Interval::new(parse_q(lo)?, parse_q(hi)?)?);
    }
    Ok(BoxN::new(ivs))
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.sym.name(), self.bx, self.cyl, self.state)
    }
}

/// Finite union of atoms, pairwise disjoint up to measure zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Region {
    atoms: Vec<Atom>,
}

impl Region {
    pub fn empty() -> Region {
        Region::default()
    }

    pub fn from_atom(a: Atom) -> Region {
        let mut r = Region { atoms: Vec::new() };
        if !a.measure().is_zero() {
            r.atoms.push(a);
        }
        r
    }

    pub fn symbol(sym: Symbol) -> Region {
        Region::from_atom(Atom::symbol(sym))
    }

    pub fn symbols(syms: &[Symbol]) -> Region {
        Region::from_disjoint(syms.iter().map(|&s| Atom::symbol(s)).collect())
    }

    /// Builds a region from arbitrary atoms, removing overlaps.
    pub fn new(atoms: Vec<Atom>) -> Result<Region> {
        for a in &atoms {
            a.validate()?;
        }
        let mut r = Region::empty();
        for a in atoms {
            r = r.union(&Region::from_atom(a));
        }
        Ok(r)
    }

    /// Trusts the caller that atoms are pairwise a.e.-disjoint.
    pub fn from_disjoint(atoms: Vec<Atom>) -> Region {
        let mut r = Region { atoms };
        r.atoms.retain(|a| !a.measure().is_zero());
        r.atoms.sort();
        r
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_null(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn measure(&self) -> Q {
        self.atoms.iter().map(Atom::measure).fold(Q::zero(), |a, b| a + b)
    }

    pub fn intersect(&self, other: &Region) -> Region {
        let mut out = Vec::new();
        for a in &self.atoms {
            for b in &other.atoms {
                if let Some(c) = a.intersect(b) {
                    out.push(c);
                }
            }
        }
        Region::from_disjoint(out)
    }

    pub fn difference(&self, other: &Region) -> Region {
        let mut pieces = self.atoms.clone();
        for b in &other.atoms {
            pieces = pieces.iter().flat_map(|a| a.subtract(b)).collect();
        }
        Region::from_disjoint(pieces)
    }

    pub fn union(&self, other: &Region) -> Region {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.difference(self).atoms);
        Region::from_disjoint(atoms)
    }

    /// Equality up to a null set: the symmetric difference has measure zero.
    pub fn ae_equal(&self, other: &Region) -> bool {
        let common = self.intersect(other).measure();
        self.measure() + other.measure() - common.clone() - common == Q::zero()
    }

    pub fn ae_subset(&self, other: &Region) -> bool {
        self.intersect(other).measure() == self.measure()
    }

    pub fn ae_disjoint(&self, other: &Region) -> bool {
        self.intersect(other).measure().is_zero()
    }

    /// Same region with every atom moved to dialect `state`.
    pub fn with_state(&self, state: u32) -> Region {
        Region::from_disjoint(
            self.atoms.iter().map(|a| Atom { state, ..a.clone() }).collect(),
        )
    }

    pub fn parse(s: &str) -> Result<Region> {
        if s == "empty" {
            return Ok(Region::empty());
        }
        Region::new(s.split('+').map(Atom::parse).collect::<Result<Vec<_>>>()?)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "empty");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Overlay of labelled atoms: the coarsest partition such that every cell lies
/// inside or outside each input atom. Returns each positive-measure cell with
/// the labels of the atoms covering it.
pub fn overlay<L: Clone>(pieces: &[(Atom, L)]) -> Vec<(Atom, Vec<L>)> {
    let mut cells: Vec<(Atom, Vec<L>)> = Vec::new();
    for (atom, label) in pieces {
        let mut next = Vec::with_capacity(cells.len() + 1);
        let mut fresh = vec![atom.clone()];
        for (cell, labels) in cells {
            match cell.intersect(atom).filter(|c| !c.measure().is_zero()) {
                None => next.push((cell, labels)),
                Some(common) => {
                    for rest in cell.subtract(atom) {
                        next.push((rest, labels.clone()));
                    }
                    fresh = fresh.iter().flat_map(|f| f.subtract(&common)).collect();
                    let mut l = labels;
                    l.push(label.clone());
                    next.push((common, l));
                }
            }
        }
        for f in fresh {
            if !f.measure().is_zero() {
                next.push((f, vec![label.clone()]));
            }
        }
        cells = next;
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn iv(a: i64, b: i64, d: i64) -> Interval {
        Interval::new(q(a, d), q(b, d)).unwrap()
    }

    fn atom_box(ivs: Vec<Interval>) -> Atom {
        Atom::new(Symbol::Accept, BoxN::new(ivs), Cylinder::any(), 0)
    }

    #[test]
    fn measure_examples() {
        let cyl = Cylinder::parse("*0").unwrap();
        let r = Region::from_atom(Atom::new(Symbol::Accept, BoxN::full(), cyl, 0));
        assert_eq!(r.measure(), q(1, 9));
        assert_eq!(Region::symbol(Symbol::Accept).measure(), q(1, 1));
        let r = Region::new(vec![atom_box(vec![iv(0, 1, 3)]), atom_box(vec![iv(1, 2, 3)])]).unwrap();
        assert_eq!(r.measure(), q(2, 3));
    }

    #[test]
    fn malformed_interval_rejected() {
        assert!(Interval::new(q(1, 2), q(1, 3)).is_err());
        assert!(Interval::new(q(-1, 2), q(1, 3)).is_err());
        assert!(Atom::parse("a:[0,3/2]:e:0").is_err());
    }

    #[test]
    fn intersect_examples() {
        let a = Region::symbol(Symbol::Accept);
        let r = Region::symbol(Symbol::Reject);
        assert!(a.intersect(&r).is_null());

        let c1 = Cylinder::parse("*").unwrap();
        let c2 = Cylinder::parse("*0").unwrap();
        assert_eq!(c1.intersect(&c2), Some(c2.clone()));
        assert_eq!(c2.intersect(&Cylinder::parse("*1").unwrap()), None);

        let b1 = BoxN::new(vec![iv(0, 1, 2), iv(0, 1, 1)]);
        let b2 = BoxN::new(vec![iv(1, 4, 4), iv(0, 1, 1)]);
        assert_eq!(b1.intersect(&b2), Some(BoxN::new(vec![iv(1, 2, 4)])));
    }

    #[test]
    fn ae_equal_examples() {
        let whole = Region::from_atom(atom_box(vec![iv(0, 1, 1)]));
        let split = Region::new(vec![atom_box(vec![iv(0, 1, 2)]), atom_box(vec![iv(1, 2, 2)])]).unwrap();
        assert!(whole.ae_equal(&split));

        let half = Region::from_atom(atom_box(vec![iv(0, 1, 2)]));
        let with_point = Region::new(vec![atom_box(vec![iv(0, 1, 2)]), atom_box(vec![iv(1, 1, 2)])]).unwrap();
        assert!(half.ae_equal(&with_point));

        let two_thirds = Region::from_atom(atom_box(vec![iv(0, 2, 3)]));
        assert!(!half.ae_equal(&two_thirds));
    }

    #[test]
    fn subtract_cylinder() {
        let a = Atom::symbol(Symbol::Accept);
        let b = Atom::new(Symbol::Accept, BoxN::full(), Cylinder::parse("*0").unwrap(), 0);
        let rest = a.subtract(&b);
        let total: Q = rest.iter().map(Atom::measure).sum();
        assert_eq!(total, q(8, 9));
        assert!(rest.iter().all(|x| x.intersect(&b).is_none()));
    }

    #[test]
    fn overlay_partitions() {
        let a = atom_box(vec![iv(0, 2, 3)]);
        let b = atom_box(vec![iv(1, 3, 3)]);
        let cells = overlay(&[(a, 'a'), (b, 'b')]);
        assert_eq!(cells.len(), 3);
        let both: Vec<_> = cells.iter().filter(|(_, l)| l.len() == 2).collect();
        assert_eq!(both.len(), 1);
        assert_eq!(both[0].0.measure(), q(1, 3));
    }

    #[test]
    fn text_round_trip() {
        let s = "a:[0,1/2]x[1/3,1]:*0:2+r:full:e:0";
        let r = Region::parse(s).unwrap();
        assert_eq!(Region::parse(&r.to_string()).unwrap(), r);
        assert_eq!(r.measure(), q(1, 2) * q(2, 3) * q(1, 9) + q(1, 1));
    }
}
