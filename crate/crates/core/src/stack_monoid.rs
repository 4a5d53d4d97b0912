//! The stack monoid over `{0, 1, *, c}` with `c0 = c1 = c* = e`.
//!
//! Words are written in composition order: `uv` means "apply `v`, then `u`".
//! A push of letter `x` is encoded as `x` and a pop as `c`, so `c0` is "push 0
//! then pop" and cancels. Normal forms are `x1..xm c^j`: pop `j` letters, then
//! leave `x1..xm` on top of the stack (`x1` topmost).

use std::fmt;

use crate::error::{Error, Result};
use crate::measure_space::Letter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ThetaLetter {
    Push(Letter),
    C,
}

/// Stack instruction of an automaton transition or a realizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StackOp {
    Id,
    Pop,
    Push(Letter),
}

impl StackOp {
    pub fn name(self) -> &'static str {
        match self {
            StackOp::Id => "id",
            StackOp::Pop => "pop",
            StackOp::Push(Letter::Star) => "push*",
            StackOp::Push(Letter::Zero) => "push0",
            StackOp::Push(Letter::One) => "push1",
        }
    }

    pub fn from_name(s: &str) -> Option<StackOp> {
        Some(match s {
            "id" => StackOp::Id,
            "pop" => StackOp::Pop,
            "push*" => StackOp::Push(Letter::Star),
            "push0" => StackOp::Push(Letter::Zero),
            "push1" => StackOp::Push(Letter::One),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ThetaWord {
    letters: Vec<ThetaLetter>,
}

impl ThetaWord {
    pub fn epsilon() -> ThetaWord {
        ThetaWord::default()
    }

    /// Unreduced word, as written.
    pub fn raw(letters: Vec<ThetaLetter>) -> ThetaWord {
        ThetaWord { letters }
    }

    pub fn letters(&self) -> &[ThetaLetter] {
        &self.letters
    }

    pub fn is_epsilon(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_normal(&self) -> bool {
        !self
            .letters
            .windows(2)
            .any(|w| w[0] == ThetaLetter::C && w[1] != ThetaLetter::C)
    }

    /// Unique normal form: cancel every `c` immediately followed by a push.
    pub fn reduce(&self) -> ThetaWord {
        let mut out: Vec<ThetaLetter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            match l {
                ThetaLetter::Push(_) if out.last() == Some(&ThetaLetter::C) => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        ThetaWord { letters: out }
    }

    /// Rewrites one randomly chosen redex `c x` at a time until none is left.
    pub fn reduce_randomly(&self, rng: &mut impl rand::Rng) -> ThetaWord {
        use rand::seq::SliceRandom;
        let mut letters = self.letters.clone();
        loop {
            let redexes: Vec<usize> = (0..letters.len().saturating_sub(1))
                .filter(|&i| letters[i] == ThetaLetter::C && letters[i + 1] != ThetaLetter::C)
                .collect();
            let Some(&i) = redexes.choose(rng) else {
                return ThetaWord::raw(letters);
            };
            letters.drain(i..i + 2);
        }
    }

    /// `reduce(self . other)`.
    pub fn mul(&self, other: &ThetaWord) -> ThetaWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        ThetaWord { letters }.reduce()
    }

    pub fn encode(op: StackOp) -> ThetaWord {
        match op {
            StackOp::Id => ThetaWord::epsilon(),
            StackOp::Pop => ThetaWord { letters: vec![ThetaLetter::C] },
            StackOp::Push(l) => ThetaWord { letters: vec![ThetaLetter::Push(l)] },
        }
    }

    /// Weight of performing `ops` in order (later steps multiplied on the left).
    pub fn from_ops(ops: &[StackOp]) -> ThetaWord {
        ops.iter()
            .fold(ThetaWord::epsilon(), |acc, &op| ThetaWord::encode(op).mul(&acc))
    }

    /// Number of trailing `c`s of the normal form: letters consumed below the start.
    pub fn pops(&self) -> usize {
        let nf = self.reduce();
        nf.letters.iter().rev().take_while(|&&l| l == ThetaLetter::C).count()
    }

    /// Letters left on top after the pops, topmost first.
    pub fn pushes(&self) -> Vec<Letter> {
        self.reduce()
            .letters
            .iter()
            .filter_map(|l| match l {
                ThetaLetter::Push(x) => Some(*x),
                ThetaLetter::C => None,
            })
            .collect()
    }

    /// Operations in application order realising the normal form.
    pub fn to_ops(&self) -> Vec<StackOp> {
        let mut ops = vec![StackOp::Pop; self.pops()];
        ops.extend(self.pushes().into_iter().rev().map(StackOp::Push));
        ops
    }

    /// Acts on a stack written topmost first; `None` if it would pop past the end.
    pub fn apply_to_stack(&self, stack: &[Letter]) -> Option<Vec<Letter>> {
        let j = self.pops();
        if j > stack.len() {
            return None;
        }
        let mut out = self.pushes();
        out.extend_from_slice(&stack[j..]);
        Some(out)
    }

    /// `c^i` for some `i >= 0`.
    pub fn is_pure_pops(&self) -> bool {
        self.reduce().letters.iter().all(|&l| l == ThetaLetter::C)
    }

    pub fn parse(s: &str) -> Result<ThetaWord> {
        if s == "e" {
            return Ok(ThetaWord::epsilon());
        }
        s.chars()
            .map(|c| match c {
                'c' => Ok(ThetaLetter::C),
                _ => Letter::from_char(c)
                    .map(ThetaLetter::Push)
                    .ok_or_else(|| Error::Validation(format!("bad stack-monoid letter `{c}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(ThetaWord::raw)
    }
}

impl fmt::Display for ThetaWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for l in &self.letters {
            match l {
                ThetaLetter::C => write!(f, "c")?,
                ThetaLetter::Push(x) => write!(f, "{}", x.as_char())?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn w(s: &str) -> ThetaWord {
        ThetaWord::parse(s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(w("c0").reduce(), ThetaWord::epsilon());
        assert_eq!(w("0c").reduce(), w("0c"));
        assert_eq!(w("cc00").reduce(), ThetaWord::epsilon());
        assert_eq!(w("c*").reduce().to_string(), "e");
    }

    #[test]
    fn mul_examples() {
        assert_eq!(ThetaWord::epsilon().mul(&w("0")), w("0"));
        assert_eq!(w("c").mul(&w("0")), ThetaWord::epsilon());
        assert_eq!(w("0").mul(&w("c")), w("0c"));
    }

    #[test]
    fn encode_examples() {
        assert_eq!(ThetaWord::encode(StackOp::Pop).to_string(), "c");
        assert_eq!(ThetaWord::encode(StackOp::Push(Letter::Star)).to_string(), "*");
        assert!(ThetaWord::encode(StackOp::Id).is_epsilon());
    }

    #[test]
    fn exhaustive_confluence_up_to_length_6() {
        let alphabet = [
            ThetaLetter::C,
            ThetaLetter::Push(Letter::Zero),
            ThetaLetter::Push(Letter::One),
            ThetaLetter::Push(Letter::Star),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut words = vec![Vec::new()];
        for _ in 0..6 {
            words = words
                .into_iter()
                .flat_map(|p: Vec<ThetaLetter>| {
                    alphabet.iter().map(move |&l| {
                        let mut q = p.clone();
                        q.push(l);
                        q
                    })
                })
                .collect();
            for letters in &words {
                let word = ThetaWord::raw(letters.clone());
                let nf = word.reduce();
                assert!(nf.is_normal());
                assert_eq!(ThetaWord::reduce_randomly(&word, &mut rng), nf);
            }
        }
    }

    fn arb_letter() -> impl Strategy<Value = ThetaLetter> {
        prop_oneof![
            Just(ThetaLetter::C),
            Just(ThetaLetter::Push(Letter::Zero)),
            Just(ThetaLetter::Push(Letter::One)),
            Just(ThetaLetter::Push(Letter::Star)),
        ]
    }

    fn arb_op() -> impl Strategy<Value = StackOp> {
        prop_oneof![
            Just(StackOp::Id),
            Just(StackOp::Pop),
            Just(StackOp::Push(Letter::Zero)),
            Just(StackOp::Push(Letter::One)),
            Just(StackOp::Push(Letter::Star)),
        ]
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_mul_associative(
            a in proptest::collection::vec(arb_letter(), 0..12),
            b in proptest::collection::vec(arb_letter(), 0..12),
            c in proptest::collection::vec(arb_letter(), 0..12),
        ) {
            let (a, b, c) = (ThetaWord::raw(a), ThetaWord::raw(b), ThetaWord::raw(c));
            prop_assert_eq!(a.reduce().reduce(), a.reduce());
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(ThetaWord::epsilon().mul(&a), a.reduce());
        }

        #[test]
        fn epsilon_iff_stack_neutral(
            ops in proptest::collection::vec(arb_op(), 0..16),
            base in proptest::collection::vec(0u8..3, 0..4),
        ) {
            // Explicit simulation over an arbitrary starting stack.
            let base: Vec<Letter> = base.into_iter().map(|i| Letter::ALL[i as usize]).collect();
            let mut stack = base.clone();
            let mut floor = base.len();
            let mut underflow = false;
            for op in &ops {
                match op {
                    StackOp::Id => {}
                    StackOp::Push(l) => stack.insert(0, *l),
                    StackOp::Pop => {
                        if stack.is_empty() {
                            underflow = true;
                            break;
                        }
                        stack.remove(0);
                    }
                }
                floor = floor.min(stack.len());
            }
            let theta = ThetaWord::from_ops(&ops);
            if !underflow {
                let neutral = floor >= base.len() && stack == base;
                prop_assert_eq!(theta.is_epsilon(), neutral);
                prop_assert_eq!(theta.apply_to_stack(&base), Some(stack));
            }
        }
    }
}
