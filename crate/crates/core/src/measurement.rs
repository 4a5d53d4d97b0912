//! Projects, their measurement, tests and language membership.
//!
//! Measurement values have the form `z + log R` with `z` and `R` rational, or
//! are infinite. Such a value is zero exactly when `z = 0` and `R = 1`: for a
//! nonzero rational `z`, `e^-z` is transcendental and cannot equal `R`.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::compiler::CompiledMachine;
use crate::error::{Error, Result};
use crate::execution::ExecOptions;
use crate::graphing::{Edge, GraphingRep, Weight};
use crate::measure_space::{overlay, Atom, BoxN, Cylinder, Interval, Letter, Region, Symbol};
use crate::microcosm::Realizer;
use crate::rational::{fmt_q, q, Q};
use crate::words::{canonical, sample_reps, WordRep};

/// Real number of the form `z` or `log r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Wager {
    Zero,
    Rational(Q),
    /// `log r` for a positive rational `r`.
    LogOf(Q),
}

impl Wager {
    fn parts(&self) -> (Q, Q) {
        match self {
            Wager::Zero => (Q::zero(), Q::one()),
            Wager::Rational(z) => (z.clone(), Q::one()),
            Wager::LogOf(r) => (Q::zero(), r.clone()),
        }
    }
}

impl fmt::Display for Wager {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wager::Zero => write!(f, "0"),
            Wager::Rational(z) => write!(f, "{}", fmt_q(z)),
            Wager::LogOf(r) => write!(f, "log({})", fmt_q(r)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Project {
    pub wager: Wager,
    pub graphing: GraphingRep,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasurementValue {
    Zero,
    /// `rational + log(log_arg)`, known to be nonzero.
    Finite { rational: Q, log_arg: Q },
    Infinite,
}

impl MeasurementValue {
    /// Classifies `z + log R`, with `R = None` standing for `log 0` terms.
    fn classify(z: Q, r: Option<Q>) -> MeasurementValue {
        match r {
            None => MeasurementValue::Infinite,
            Some(r) if z.is_zero() && r.is_one() => MeasurementValue::Zero,
            Some(r) => MeasurementValue::Finite { rational: z, log_arg: r },
        }
    }

    pub fn is_orthogonal(&self) -> bool {
        matches!(self, MeasurementValue::Finite { .. })
    }
}

impl fmt::Display for MeasurementValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurementValue::Zero => write!(f, "0"),
            MeasurementValue::Infinite => write!(f, "inf"),
            MeasurementValue::Finite { rational, log_arg } => {
                write!(f, "{} + log({})", fmt_q(rational), fmt_q(log_arg))
            }
        }
    }
}

/// Distinct fused weights `m(w)` of the length-two cycles between `a` and a
/// graphing of identity edges.
fn cycle_weights(a: &GraphingRep, b: &GraphingRep) -> Result<Vec<Q>> {
    for e in &b.edges {
        if !e.realizer.is_identity() || e.in_state != e.out_state {
            return Err(Error::Scope("the test side must consist of identity edges".into()));
        }
    }
    let test_support: Vec<&Atom> = b.edges.iter().flat_map(|e| e.source.atoms()).collect();
    let meets = |r: &Region| r.atoms().iter().any(|x| {
        test_support.iter().any(|t| x.intersect(t).is_some_and(|c| !c.measure().is_zero()))
    });
    let mut pieces: Vec<(Atom, (bool, usize))> = Vec::new();
    for (i, e) in a.edges.iter().enumerate() {
        let closes = e.realizer.is_identity() && e.in_state == e.out_state;
        if !closes {
            if meets(&e.source) && meets(&e.target()?) {
                return Err(Error::Scope("cycles longer than two edges through the test support".into()));
            }
            continue;
        }
        for x in e.source.atoms() {
            // The dialect index goes into the atom so that states do not mix.
            pieces.push((Atom { state: e.in_state, ..x.clone() }, (false, i)));
        }
    }
    for (j, t) in b.edges.iter().enumerate() {
        for x in t.source.atoms() {
            for s in 0..a.dialect {
                pieces.push((Atom { state: s, ..x.clone() }, (true, j)));
            }
        }
    }
    let mut classes = BTreeSet::new();
    for (_, labels) in overlay(&pieces) {
        let tests: Vec<usize> = labels.iter().filter(|l| l.0).map(|l| l.1).collect();
        let mine: Vec<usize> = labels.iter().filter(|l| !l.0).map(|l| l.1).collect();
        for &j in &tests {
            let x: Q = mine.iter().map(|&i| a.edges[i].weight.mul(&b.edges[j].weight).m()).sum();
            if x.is_positive() {
                classes.insert(x);
            }
        }
    }
    Ok(classes.into_iter().collect())
}

/// `z + log R - sum log(1 - x_i)` classified exactly.
fn value_of(wagers: &[&Wager], cycles: &[Q]) -> MeasurementValue {
    let mut z = Q::zero();
    let mut r = Q::one();
    for w in wagers {
        let (zw, rw) = w.parts();
        z += zw;
        r *= rw;
    }
    for x in cycles {
        let rest = Q::one() - x;
        if rest.is_zero() {
            return MeasurementValue::Infinite;
        }
        r /= rest;
    }
    MeasurementValue::classify(z, Some(r))
}

pub fn measure_projects(a: &Project, b: &Project) -> Result<MeasurementValue> {
    let cycles = cycle_weights(&a.graphing, &b.graphing)?;
    Ok(value_of(&[&a.wager, &b.wager], &cycles))
}

/// Test families on `[[a]] + [[r]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TestKind {
    /// `(zeta, Id on [[r]])` for each listed `zeta`, or for every nonzero real.
    DetNeg { zetas: Option<Vec<Wager>> },
    /// `(0, 1/2 Id on [[a]] over [0,1/n]^n)` for `n = 1..=n_max`.
    DetPos { n_max: usize },
    /// `(log(1 - u/2), 1/2 Id on [[a]] over [0,1/n]^n x V(*^n))` for `u` in `[0, eps]`.
    Prob { eps: Q, n_max: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Test {
    pub kind: TestKind,
}

pub fn make_test(kind: TestKind) -> Result<Test> {
    match &kind {
        TestKind::DetNeg { zetas: Some(z) } if z.is_empty() => {
            return Err(Error::Validation("empty test family".into()))
        }
        TestKind::DetNeg { zetas: Some(z) } if z.iter().any(|w| *w == Wager::Zero) => {
            return Err(Error::Validation("zeta must be nonzero".into()))
        }
        TestKind::DetPos { n_max: 0 } | TestKind::Prob { n_max: 0, .. } => {
            return Err(Error::Validation("empty test family".into()))
        }
        TestKind::Prob { eps, .. } if !eps.is_positive() || *eps > Q::one() => {
            return Err(Error::Parameter(format!("eps = {} outside (0,1]", fmt_q(eps))))
        }
        _ => {}
    }
    Ok(Test { kind })
}

/// Identity edge of weight `p . 1` on `atom`.
fn identity_graphing(atom: Atom, p: Q, coords: usize) -> GraphingRep {
    let support = Region::symbols(&[Symbol::Accept, Symbol::Reject]);
    let mut g = GraphingRep::new(coords, support, 1);
    g.push(Edge::new(Region::from_atom(atom), 0, 0, Realizer::identity(), Weight::new(p, true)));
    g
}

fn corner(n: usize) -> BoxN {
    let iv = Interval::new(Q::zero(), q(1, n as i64)).expect("corner interval");
    BoxN::new(vec![iv; n])
}

impl Test {
    pub fn det_neg_member(zeta: Wager) -> Project {
        Project { wager: zeta, graphing: identity_graphing(Atom::symbol(Symbol::Reject), Q::one(), 1) }
    }

    pub fn det_pos_member(n: usize) -> Project {
        let atom = Atom::new(Symbol::Accept, corner(n), Cylinder::any(), 0);
        Project { wager: Wager::Zero, graphing: identity_graphing(atom, q(1, 2), n) }
    }

    pub fn prob_member(n: usize, u: &Q) -> Project {
        let atom = Atom::new(Symbol::Accept, corner(n), Cylinder::of(&vec![Letter::Star; n]), 0);
        Project {
            wager: Wager::LogOf(Q::one() - u / Q::from_integer(2.into())),
            graphing: identity_graphing(atom, q(1, 2), n),
        }
    }

    /// Materialised members; the symbolic families return their boundary members.
    pub fn members(&self) -> Vec<(String, Project)> {
        match &self.kind {
            TestKind::DetNeg { zetas: Some(z) } => {
                z.iter().map(|w| (format!("zeta={w}"), Test::det_neg_member(w.clone()))).collect()
            }
            TestKind::DetNeg { zetas: None } => {
                vec![("zeta=1".into(), Test::det_neg_member(Wager::Rational(Q::one())))]
            }
            TestKind::DetPos { n_max } => {
                (1..=*n_max).map(|n| (format!("n={n}"), Test::det_pos_member(n))).collect()
            }
            TestKind::Prob { eps, n_max } => (1..=*n_max)
                .flat_map(|n| {
                    [Q::zero(), eps.clone()]
                        .into_iter()
                        .map(move |u| (format!("n={n} u={}", fmt_q(&u)), Test::prob_member(n, &u)))
                })
                .collect(),
        }
    }
}

/// Verdict of one project against a test family, with a line per member class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orthogonality {
    pub orthogonal: bool,
    pub report: Vec<String>,
}

/// Family verdict from the measurement `v0` against the test graphing with
/// wager zero: the wager ranges are handled symbolically.
fn family_verdict(kind: &TestKind, label: &str, base: &MeasurementValue) -> (bool, String) {
    match kind {
        TestKind::DetNeg { zetas: None } => {
            // zeta + v0 vanishes for zeta = -v0, which is a member unless v0 = 0.
            let ok = *base == MeasurementValue::Zero;
            (ok, format!("{label}: base {base}; every zeta != 0 {}", if ok { "orthogonal" } else { "meets -base" }))
        }
        TestKind::Prob { eps, .. } => match base {
            MeasurementValue::Infinite => (false, format!("{label}: infinite")),
            MeasurementValue::Finite { rational, .. } if !rational.is_zero() => {
                (true, format!("{label}: {base} never cancels log(1-u/2)"))
            }
            _ => {
                // log(1 - u/2) + log R = 0  iff  u = 2 (1 - 1/R).
                let r = match base {
                    MeasurementValue::Finite { log_arg, .. } => log_arg.clone(),
                    _ => Q::one(),
                };
                let u = (Q::one() - r.recip()) * Q::from_integer(2.into());
                let hit = !u.is_negative() && u <= *eps;
                (
                    !hit,
                    format!("{label}: base {base}; vanishing wager at u={} {} [0,{}]", fmt_q(&u), if hit { "in" } else { "outside" }, fmt_q(eps)),
                )
            }
        },
        _ => (base.is_orthogonal(), format!("{label}: {base}")),
    }
}

/// `a` against every member of `t`, evaluated region by region.
pub fn orthogonal_project(a: &Project, t: &Test) -> Result<Orthogonality> {
    let mut report = Vec::new();
    let mut all = true;
    let graphs: Vec<(String, Project)> = match &t.kind {
        TestKind::DetNeg { zetas: None } => vec![("id_r".into(), Test::det_neg_member(Wager::Zero))],
        TestKind::Prob { n_max, .. } => (1..=*n_max)
            .map(|n| (format!("n={n}"), Test::prob_member(n, &Q::zero())))
            .collect(),
        _ => t.members(),
    };
    for (label, m) in graphs {
        let probe = match &t.kind {
            TestKind::DetNeg { zetas: None } | TestKind::Prob { .. } => Project { wager: Wager::Zero, ..m },
            _ => m,
        };
        let v = measure_projects(a, &probe)?;
        let (ok, line) = family_verdict(&t.kind, &label, &v);
        all &= ok;
        report.push(line);
    }
    Ok(Orthogonality { orthogonal: all, report })
}

/// Orthogonality of `cm :: rep` to a test, through the cycle sums at the anchor cube.
pub fn orthogonal_to_test(cm: &CompiledMachine, rep: &WordRep, t: &Test, opts: &ExecOptions) -> Result<Orthogonality> {
    let (acc, rej) = cm.accept_reject(rep, opts)?;
    let (p, qr) = (acc.neutral(), rej.neutral());
    let mut report = vec![format!(
        "cycle mass accept {} reject {}{}",
        fmt_q(&p),
        fmt_q(&qr),
        if acc.exact && rej.exact { "" } else { " (lower bounds)" }
    )];
    let half = q(1, 2);
    let mut all = true;
    let mut push = |ok: bool, line: String| {
        all &= ok;
        report.push(line);
    };
    match &t.kind {
        TestKind::DetNeg { zetas } => {
            let base = value_of(&[], &[qr.clone()]);
            match zetas {
                None => {
                    let (ok, line) = family_verdict(&t.kind, "id_r", &base);
                    push(ok, line);
                }
                Some(z) => {
                    for w in z {
                        let v = value_of(&[w], &[qr.clone()]);
                        push(v.is_orthogonal(), format!("zeta={w}: {v}"));
                    }
                }
            }
        }
        TestKind::DetPos { n_max } => {
            for n in 1..=*n_max {
                let v = value_of(&[], &[&p * &half]);
                push(v.is_orthogonal(), format!("n={n}: {v}"));
            }
        }
        TestKind::Prob { n_max, .. } => {
            for n in 1..=*n_max {
                let base = value_of(&[], &[&p * &half]);
                let (ok, line) = family_verdict(&t.kind, &format!("n={n}"), &base);
                push(ok, line);
            }
        }
    }
    Ok(Orthogonality { orthogonal: all, report })
}

/// Membership of `word` in the language the test defines for `cm`.
pub fn membership(cm: &CompiledMachine, word: &str, t: &Test, opts: &ExecOptions) -> Result<bool> {
    Ok(orthogonal_to_test(cm, &canonical(word)?, t, opts)?.orthogonal)
}

/// Verdicts over `reps` representations of `word`; uniform when they all agree.
pub fn check_uniformity(
    cm: &CompiledMachine,
    word: &str,
    t: &Test,
    reps: usize,
    seed: u64,
    opts: &ExecOptions,
) -> Result<(bool, Vec<bool>)> {
    let verdicts = sample_reps(word, 3, reps, seed)?
        .iter()
        .map(|r| Ok(orthogonal_to_test(cm, r, t, opts)?.orthogonal))
        .collect::<Result<Vec<bool>>>()?;
    let uniform = verdicts.windows(2).all(|w| w[0] == w[1]);
    Ok((uniform, verdicts))
}

/// Parses `neg`, `pos`, `prob:<eps>` or `neg:<z1>,<z2>` (rational zetas).
pub fn parse_test(spec: &str, n_max: usize) -> Result<Test> {
    let (name, arg) = spec.split_once(':').map_or((spec, None), |(a, b)| (a, Some(b)));
    let kind = match (name, arg) {
        ("neg", None) => TestKind::DetNeg { zetas: None },
        ("neg", Some(list)) => TestKind::DetNeg {
            zetas: Some(
                list.split(',')
                    .map(|z| crate::rational::parse_q(z).map(Wager::Rational))
                    .collect::<Result<Vec<_>>>()?,
            ),
        },
        ("pos", None) => TestKind::DetPos { n_max },
        ("prob", Some(e)) => TestKind::Prob { eps: crate::rational::parse_q(e)?, n_max },
        _ => return Err(Error::Parameter(format!("unknown test `{spec}`"))),
    };
    make_test(kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Automaton;
    use crate::compiler::compile;

    fn hand_machine() -> Project {
        let atom = Atom::new(
            Symbol::Accept,
            BoxN::on_coord(0, Interval::new(q(1, 2), q(1, 1)).unwrap()),
            Cylinder::any(),
            0,
        );
        let mut g = GraphingRep::new(1, Region::symbol(Symbol::Accept), 1);
        g.push(Edge::new(Region::from_atom(atom), 0, 0, Realizer::identity(), Weight::one()));
        Project { wager: Wager::Zero, graphing: g }
    }

    #[test]
    fn value_classification() {
        assert_eq!(value_of(&[], &[]), MeasurementValue::Zero);
        assert_eq!(value_of(&[], &[Q::one()]), MeasurementValue::Infinite);
        let v = value_of(&[&Wager::LogOf(q(1, 2))], &[q(1, 2)]);
        assert_eq!(v, MeasurementValue::Zero);
        let v = value_of(&[&Wager::Rational(q(1, 3))], &[]);
        assert!(v.is_orthogonal());
    }

    #[test]
    fn whole_family_is_needed() {
        let a = hand_machine();
        let one = make_test(TestKind::DetPos { n_max: 1 }).unwrap();
        let two = make_test(TestKind::DetPos { n_max: 2 }).unwrap();
        assert!(orthogonal_project(&a, &one).unwrap().orthogonal);
        let v = measure_projects(&a, &Test::det_pos_member(2)).unwrap();
        assert_eq!(v, MeasurementValue::Zero);
        assert!(!orthogonal_project(&a, &two).unwrap().orthogonal);
    }

    #[test]
    fn non_identity_cycles_are_out_of_scope() {
        let mut g = GraphingRep::new(1, Region::symbol(Symbol::Accept), 1);
        let low = Atom::new(
            Symbol::Accept,
            BoxN::on_coord(0, Interval::new(q(0, 1), q(1, 2)).unwrap()),
            Cylinder::any(),
            0,
        );
        g.push(Edge::new(Region::from_atom(low), 0, 0, Realizer::coord_shift(0, q(1, 2)), Weight::one()));
        let a = Project { wager: Wager::Zero, graphing: g };
        let r = measure_projects(&a, &Test::det_pos_member(1));
        assert!(matches!(r, Err(Error::Scope(_))));
    }

    #[test]
    fn family_validation() {
        assert!(make_test(TestKind::DetNeg { zetas: Some(vec![]) }).is_err());
        assert!(make_test(TestKind::DetPos { n_max: 0 }).is_err());
        assert!(matches!(make_test(TestKind::Prob { eps: q(3, 2), n_max: 1 }), Err(Error::Parameter(_))));
        assert!(parse_test("prob:1/4", 2).is_ok());
        assert!(parse_test("neg:1,-2", 2).is_ok());
        assert!(parse_test("nope", 2).is_err());
    }

    fn even_ones() -> Automaton {
        Automaton::parse(
            "automaton\nheads 1\nstack no\nstates s e o acc rej\ninit s\naccept acc\nreject rej\n\
             trans * s - -> 0:out id e 1\n\
             trans 0 e - -> 0:out id e 1\ntrans 1 e - -> 0:out id o 1\ntrans * e - -> halt id acc 1\n\
             trans 0 o - -> 0:out id o 1\ntrans 1 o - -> 0:out id e 1\ntrans * o - -> halt id rej 1\n",
        )
        .unwrap()
    }

    #[test]
    fn deterministic_membership() {
        let cm = compile(&even_ones()).unwrap();
        let opts = ExecOptions::default();
        let neg = parse_test("neg", 2).unwrap();
        let pos = parse_test("pos", 2).unwrap();
        for (w, even) in [("", true), ("1", false), ("0110", true), ("111", false)] {
            assert_eq!(membership(&cm, w, &neg, &opts).unwrap(), even, "{w}");
            assert_eq!(membership(&cm, w, &pos, &opts).unwrap(), even, "{w}");
        }
        let (uniform, v) = check_uniformity(&cm, "101", &neg, 4, 7, &opts).unwrap();
        assert!(uniform && v.len() == 4);
    }
}
