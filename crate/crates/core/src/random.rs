//! Seeded random graphings for the closure and refinement suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::execution::CutSpec;
use crate::graphing::{Edge, GraphingRep, Weight};
use crate::measure_space::{Atom, BoxN, Cylinder, Interval, Region, Symbol};
use crate::microcosm::Realizer;
use crate::rational::{q, Q};

/// Grid denominators; a pair draws from one family so the common grid stays small.
pub const DENOM_FAMILIES: [&[i64]; 2] = [&[1, 2, 4], &[1, 3]];

fn interval(lo: i64, hi: i64, d: i64) -> Interval {
    Interval::new(q(lo, d), q(hi, d)).expect("grid interval")
}

/// Cut points of `[0,1]` on a random grid.
fn random_partition(rng: &mut impl Rng, denoms: &[i64]) -> (i64, Vec<i64>) {
    let d = *denoms.choose(rng).expect("denominators");
    let mut cuts: Vec<i64> = (1..d).filter(|_| rng.gen_bool(0.5)).collect();
    cuts.insert(0, 0);
    cuts.push(d);
    (d, cuts)
}

/// Random probabilities for `n` edges out of one cell, summing to at most one.
fn random_split_mass(rng: &mut impl Rng, n: usize) -> Vec<Q> {
    let parts: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    let d = parts.iter().sum::<i64>() + rng.gen_range(0..=2);
    parts.into_iter().map(|k| q(k, d)).collect()
}

/// A graphing on the given symbols, with one or two coordinates.
///
/// Sources are grid pieces of coordinate 0; targets are translated pieces of
/// any supported symbol, optionally with the two coordinates swapped.
pub fn random_graphing(
    rng: &mut impl Rng,
    symbols: &[Symbol],
    dialect: u32,
    deterministic: bool,
    denoms: &[i64],
) -> GraphingRep {
    let coords = rng.gen_range(1..=2);
    let mut g = GraphingRep::new(coords, Region::symbols(symbols), dialect);
    for &sym in symbols {
        for state in 0..dialect {
            let (d, cuts) = random_partition(rng, denoms);
            for w in cuts.windows(2) {
                if rng.gen_bool(0.25) {
                    continue;
                }
                let (lo, hi) = (w[0], w[1]);
                let source = Region::from_atom(Atom::new(sym, BoxN::on_coord(0, interval(lo, hi, d)), Cylinder::any(), 0));
                let fan = if deterministic { 1 } else { rng.gen_range(1..=3) };
                let masses = if deterministic { vec![Q::from_integer(1.into())] } else { random_split_mass(rng, fan) };
                for p in masses {
                    let to = *symbols.choose(rng).expect("symbols");
                    let dest = rng.gen_range(0..=d - (hi - lo));
                    let mut r = Realizer::symbol_shift(sym, to).then(&Realizer::coord_shift(0, q(dest - lo, d)));
                    if coords == 2 && rng.gen_bool(0.3) {
                        r = r.then(&Realizer::transposition(0, 1));
                    }
                    let out = rng.gen_range(0..dialect);
                    g.push(Edge::new(source.clone(), state, out, r, Weight::new(p, rng.gen_bool(0.5))));
                }
            }
        }
    }
    g
}

/// Two graphings sharing a random set of symbols, with the cut between them.
pub fn random_pair(rng: &mut impl Rng, deterministic: bool) -> (GraphingRep, GraphingRep, CutSpec) {
    let mut syms = Symbol::ALL.to_vec();
    syms.shuffle(rng);
    let a = rng.gen_range(1..=2);
    let c = rng.gen_range(1..=3);
    let b = rng.gen_range(1..=2);
    let (left, rest) = syms.split_at(a);
    let (cut, rest) = rest.split_at(c);
    let right = &rest[..b];
    let fsyms: Vec<Symbol> = left.iter().chain(cut).copied().collect();
    let gsyms: Vec<Symbol> = cut.iter().chain(right).copied().collect();
    let (df, dg) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
    let denoms = *DENOM_FAMILIES.choose(rng).expect("families");
    let f = random_graphing(rng, &fsyms, df, deterministic, denoms);
    let g = random_graphing(rng, &gsyms, dg, deterministic, denoms);
    let spec = CutSpec::new(Region::symbols(cut), Region::symbols(left), Region::symbols(right))
        .expect("disjoint symbol sets");
    (f, g, spec)
}

/// Splits each edge source at a random finer grid point, keeping everything else.
pub fn random_refinement(rng: &mut impl Rng, g: &GraphingRep) -> GraphingRep {
    let mut out = GraphingRep::new(g.coords, g.support.clone(), g.dialect);
    for e in &g.edges {
        let mut pieces = Vec::new();
        for a in e.source.atoms() {
            let iv = a.bx.get(0);
            let k = rng.gen_range(2..=3);
            let step = (&iv.hi - &iv.lo) / Q::from_integer(k.into());
            let cut = rng.gen_range(1..k);
            let mid = &iv.lo + step * Q::from_integer(cut.into());
            for (lo, hi) in [(iv.lo.clone(), mid.clone()), (mid, iv.hi.clone())] {
                let piece = Interval::new(lo, hi).expect("sub-interval");
                pieces.push(Atom { bx: a.bx.with_coord(0, piece), ..a.clone() });
            }
        }
        pieces.shuffle(rng);
        for p in pieces {
            out.push(Edge::new(Region::from_atom(p), e.in_state, e.out_state, e.realizer.clone(), e.weight.clone()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphing::{equivalent, is_refinement};
    use rand::SeedableRng;

    #[test]
    fn generated_graphings_are_valid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for i in 0..40 {
            let det = i % 2 == 0;
            let (f, g, _) = random_pair(&mut rng, det);
            for x in [&f, &g] {
                assert!(x.validate().is_ok());
                assert!(x.is_subprobabilistic());
                assert!(!det || x.is_deterministic());
            }
        }
    }

    #[test]
    fn refinement_is_recognised() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let g = random_graphing(&mut rng, &[Symbol::ZeroIn, Symbol::OneOut], 2, false, &[1, 2, 3, 4]);
        let r = random_refinement(&mut rng, &g);
        assert!(is_refinement(&r, &g));
        assert!(equivalent(&r, &g));
    }
}
