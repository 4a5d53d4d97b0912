//! Execution `F :: G` by alternating paths on a finite cube grid.
//!
//! Every box endpoint and translation of the inputs is a multiple of `1/grid`,
//! so a grid cube is mapped onto a grid cube by every realizer and lies inside
//! or outside every edge source. Walks therefore run over finitely many nodes
//! `(symbol, cube, dialect states)` together with the composite realizer built
//! so far, and infinite families of paths are summed with [`Absorbing`].

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graphing::{Edge, GraphingRep, Weight};
use crate::linsolve::Absorbing;
use crate::measure_space::{Atom, BoxN, Cylinder, Interval, Letter, Region, Symbol};
use crate::microcosm::Realizer;
use crate::rational::{fmt_q, lcm_denoms, Q};
use crate::stack_monoid::ThetaWord;

/// Decomposition of two supports as `V + C` and `C + W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutSpec {
    pub cut: Region,
    pub left_rest: Region,
    pub right_rest: Region,
}

impl CutSpec {
    pub fn new(cut: Region, left_rest: Region, right_rest: Region) -> Result<CutSpec> {
        if !left_rest.ae_disjoint(&right_rest) {
            return Err(Error::Validation("the two outer regions overlap".into()));
        }
        if !cut.ae_disjoint(&left_rest) || !cut.ae_disjoint(&right_rest) {
            return Err(Error::Validation("the cut overlaps an outer region".into()));
        }
        Ok(CutSpec { cut, left_rest, right_rest })
    }

    /// The cut is the common part of the two supports.
    pub fn between(f: &GraphingRep, g: &GraphingRep) -> Result<CutSpec> {
        let cut = f.support.intersect(&g.support);
        CutSpec::new(
            cut.clone(),
            f.support.difference(&cut),
            g.support.difference(&cut),
        )
    }

    fn check(&self, f: &GraphingRep, g: &GraphingRep) -> Result<()> {
        if !f.support.ae_equal(&self.left_rest.union(&self.cut))
            || !g.support.ae_equal(&self.cut.union(&self.right_rest))
        {
            return Err(Error::Validation("cut does not match the supports".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ExecOptions {
    /// Largest stack length (bottom marker included) a walk may reach.
    pub stack_depth: usize,
    /// Fail instead of dropping paths that exceed `stack_depth`.
    pub require_exact: bool,
    /// Bound on explored walk states.
    pub max_states: usize,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions { stack_depth: 16, require_exact: false, max_states: 4_000_000 }
    }
}

/// Smallest grid on which every box endpoint and translation is a lattice point.
pub fn grid_size(graphs: &[&GraphingRep], regions: &[&Region]) -> Result<u32> {
    let mut qs: Vec<Q> = Vec::new();
    let push_region = |r: &Region, qs: &mut Vec<Q>| {
        for a in r.atoms() {
            for iv in a.bx.intervals() {
                qs.push(iv.lo.clone());
                qs.push(iv.hi.clone());
            }
        }
    };
    for g in graphs {
        push_region(&g.support, &mut qs);
        for e in &g.edges {
            push_region(&e.source, &mut qs);
            qs.extend(e.realizer.box_shift().values().cloned());
        }
    }
    for r in regions {
        push_region(r, &mut qs);
    }
    lcm_denoms(&qs)
        .to_u32()
        .ok_or_else(|| Error::Discretization("grid too fine".into()))
}

fn dims_of(graphs: &[&GraphingRep]) -> usize {
    let mut d = 1;
    for g in graphs {
        d = d.max(g.coords);
        for a in g.support.atoms() {
            d = d.max(a.bx.dims());
        }
        for e in &g.edges {
            d = d.max(e.realizer.dims());
            for a in e.source.atoms() {
                d = d.max(a.bx.dims());
            }
        }
    }
    d
}

/// Integer form of an atom on the grid: half-open index ranges per coordinate.
#[derive(Debug, Clone)]
struct Cells {
    sym: Symbol,
    ranges: Vec<(u32, u32)>,
    guard: Vec<Letter>,
}

impl Cells {
    fn of(a: &Atom, grid: u32, dims: usize) -> Result<Cells> {
        let g = Q::from_integer(grid.into());
        let idx = |x: &Q| -> Result<u32> {
            let v = x * &g;
            if !v.is_integer() {
                return Err(Error::Discretization(format!("{} is off the 1/{grid} grid", fmt_q(x))));
            }
            v.to_integer().to_u32().ok_or_else(|| Error::Discretization("grid index overflow".into()))
        };
        let ranges = (0..dims)
            .map(|c| {
                let iv = a.bx.get(c);
                Ok((idx(&iv.lo)?, idx(&iv.hi)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Cells { sym: a.sym, ranges, guard: a.cyl.prefix.clone() })
    }

    fn holds(&self, sym: Symbol, cube: &[u32]) -> bool {
        self.sym == sym && self.ranges.iter().zip(cube).all(|(&(lo, hi), &k)| lo <= k && k < hi)
    }

    fn is_null(&self) -> bool {
        self.ranges.iter().any(|&(lo, hi)| lo >= hi)
    }

    fn cubes(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new()];
        for &(lo, hi) in &self.ranges {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (lo..hi).map(move |k| {
                        let mut q = p.clone();
                        q.push(k);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

/// Box of a grid cube.
pub fn cube_box(cube: &[u32], grid: u32) -> BoxN {
    let g = i64::from(grid);
    BoxN::new(
        cube.iter()
            .map(|&k| Interval {
                lo: Q::new(i64::from(k).into(), g.into()),
                hi: Q::new((i64::from(k) + 1).into(), g.into()),
            })
            .collect(),
    )
}

/// Whether a cylinder guard holds on a stack known only through its top part.
fn guard_holds(guard: &[Letter], known: &[Letter]) -> Result<bool> {
    let n = guard.len().min(known.len());
    if guard[..n] != known[..n] {
        return Ok(false);
    }
    if guard.len() > known.len() {
        return Err(Error::Scope("edge guard inspects stack cells below the known prefix".into()));
    }
    Ok(true)
}

/// Top of the stack after `theta` acted on a stack whose top is `start`.
pub fn known_stack(start: &[Letter], theta: &ThetaWord) -> Vec<Letter> {
    let pops = theta.pops();
    let mut out = theta.pushes();
    if pops <= start.len() {
        out.extend_from_slice(&start[pops..]);
    }
    out
}

/// One available edge at a node.
#[derive(Debug, Clone)]
pub struct Move {
    pub weight: Weight,
    pub realizer: Realizer,
    pub out_state: u32,
}

/// Something walks can step along: a graphing or its discretization.
pub trait Side {
    fn moves(&self, sym: Symbol, cube: &[u32], state: u32, stack: &[Letter]) -> Result<Vec<Move>>;
}

/// Edge lookup for a graphing on a fixed grid.
pub struct GraphingSide<'a> {
    graph: &'a GraphingRep,
    index: HashMap<(Symbol, u32), Vec<(usize, Vec<Cells>)>>,
}

impl<'a> GraphingSide<'a> {
    pub fn new(graph: &'a GraphingRep, grid: u32, dims: usize) -> Result<GraphingSide<'a>> {
        let mut index: HashMap<(Symbol, u32), Vec<(usize, Vec<Cells>)>> = HashMap::new();
        for (i, e) in graph.edges.iter().enumerate() {
            if e.weight.p.is_zero() {
                continue;
            }
            let mut by_sym: BTreeMap<Symbol, Vec<Cells>> = BTreeMap::new();
            for a in e.source.atoms() {
                let c = Cells::of(a, grid, dims)?;
                if !c.is_null() {
                    by_sym.entry(a.sym).or_default().push(c);
                }
            }
            for (sym, cells) in by_sym {
                index.entry((sym, e.in_state)).or_default().push((i, cells));
            }
        }
        Ok(GraphingSide { graph, index })
    }
}

impl Side for GraphingSide<'_> {
    fn moves(&self, sym: Symbol, cube: &[u32], state: u32, stack: &[Letter]) -> Result<Vec<Move>> {
        let mut out = Vec::new();
        let Some(list) = self.index.get(&(sym, state)) else {
            return Ok(out);
        };
        for (i, cells) in list {
            let mut hit = false;
            for c in cells {
                if c.holds(sym, cube) && guard_holds(&c.guard, stack)? {
                    hit = true;
                    break;
                }
            }
            if hit {
                let e: &Edge = &self.graph.edges[*i];
                out.push(Move { weight: e.weight.clone(), realizer: e.realizer.clone(), out_state: e.out_state });
            }
        }
        Ok(out)
    }
}

/// Point class of a walk: symbol, grid cube and the dialect state of each side.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub sym: Symbol,
    pub cube: Vec<u32>,
    pub states: [u32; 2],
}

/// Where a path leaves the cut, with everything it did on the way.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exit {
    pub node: Node,
    pub realizer: Realizer,
    pub flag: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct WalkState {
    node: Node,
    turn: usize,
    comp: Realizer,
    flag: bool,
}

enum Outcome {
    Continue(WalkState),
    Exit(Exit),
    Truncated,
}

/// One finished alternating path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathRecord {
    pub weight: Weight,
    pub exit: Exit,
    pub len: usize,
}

struct Engine<'a> {
    sides: [&'a dyn Side; 2],
    cut: Vec<Cells>,
    grid: u32,
    start_stack: Vec<Letter>,
    opts: &'a ExecOptions,
}

impl Engine<'_> {
    fn in_cut(&self, sym: Symbol, cube: &[u32]) -> bool {
        self.cut.iter().any(|c| c.holds(sym, cube))
    }

    fn step(&self, st: &WalkState) -> Result<Vec<(Weight, Outcome)>> {
        let stack = known_stack(&self.start_stack, st.comp.stack());
        let side = self.sides[st.turn];
        let mut out = Vec::new();
        for mv in side.moves(st.node.sym, &st.node.cube, st.node.states[st.turn], &stack)? {
            let sym = mv.realizer.apply_symbol(st.node.sym)?;
            let cube = mv.realizer.apply_cube(&st.node.cube, self.grid)?;
            let mut states = st.node.states;
            states[st.turn] = mv.out_state;
            let comp = st.comp.then(&mv.realizer);
            let flag = st.flag || mv.weight.flag;
            let node = Node { sym, cube, states };
            let depth = known_stack(&self.start_stack, comp.stack()).len();
            let outcome = if depth > self.opts.stack_depth {
                if self.opts.require_exact {
                    return Err(Error::Truncation(self.opts.stack_depth));
                }
                Outcome::Truncated
            } else if self.in_cut(sym, &node.cube) {
                Outcome::Continue(WalkState { node, turn: 1 - st.turn, comp, flag })
            } else {
                Outcome::Exit(Exit { node, realizer: comp, flag })
            };
            out.push((mv.weight, outcome));
        }
        Ok(out)
    }

    /// Exit distributions of each start, summed over all alternating paths.
    fn solve(&self, starts: &[WalkState]) -> Result<(Vec<BTreeMap<Exit, Q>>, bool)> {
        let mut sys: Absorbing<Exit> = Absorbing::new();
        let mut ids: HashMap<WalkState, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut start_ids = Vec::new();
        for s in starts {
            let id = *ids.entry(s.clone()).or_insert_with(|| {
                queue.push_back(s.clone());
                sys.add_state()
            });
            start_ids.push(id);
        }
        let mut exact = true;
        while let Some(st) = queue.pop_front() {
            let from = ids[&st];
            for (w, outcome) in self.step(&st)? {
                match outcome {
                    Outcome::Truncated => exact = false,
                    Outcome::Exit(x) => sys.add_exit(from, x, w.p),
                    Outcome::Continue(next) => {
                        let to = match ids.get(&next) {
                            Some(&to) => to,
                            None => {
                                if ids.len() >= self.opts.max_states {
                                    return Err(Error::Scope(format!(
                                        "more than {} walk states",
                                        self.opts.max_states
                                    )));
                                }
                                let to = sys.add_state();
                                ids.insert(next.clone(), to);
                                queue.push_back(next);
                                to
                            }
                        };
                        sys.add_transition(from, to, w.p);
                    }
                }
            }
        }
        let sol = sys.solve()?;
        Ok((start_ids.into_iter().map(|i| sol[i].clone()).collect(), exact))
    }

    /// Every path of at most `max_len` edges that leaves the cut.
    fn paths(&self, start: &WalkState, max_len: usize) -> Result<Vec<PathRecord>> {
        let mut out = Vec::new();
        let mut stack = vec![(start.clone(), Weight::one(), 0usize)];
        while let Some((st, w, len)) = stack.pop() {
            if len == max_len {
                continue;
            }
            for (ew, outcome) in self.step(&st)? {
                let w2 = w.mul(&ew);
                if w2.p.is_zero() {
                    continue;
                }
                match outcome {
                    Outcome::Truncated => {}
                    Outcome::Exit(exit) => out.push(PathRecord { weight: w2, exit, len: len + 1 }),
                    Outcome::Continue(next) => stack.push((next, w2, len + 1)),
                }
            }
        }
        Ok(out)
    }
}

fn cut_cells(cut: &Region, grid: u32, dims: usize) -> Result<Vec<Cells>> {
    cut.atoms()
        .iter()
        .map(|a| {
            if !a.cyl.prefix.is_empty() {
                return Err(Error::Scope("cut regions must not constrain the stack".into()));
            }
            Cells::of(a, grid, dims)
        })
        .collect()
}

/// `F :: G`: alternating paths from outside the cut back to outside the cut.
/// The result lives on `V + W` with dialect `D_F x D_G` (index `f * |D_G| + g`).
pub fn plug(f: &GraphingRep, g: &GraphingRep, cut: &CutSpec, opts: &ExecOptions) -> Result<GraphingRep> {
    cut.check(f, g)?;
    let grid = grid_size(&[f, g], &[&cut.cut, &cut.left_rest, &cut.right_rest])?;
    let dims = dims_of(&[f, g]);
    let sf = GraphingSide::new(f, grid, dims)?;
    let sg = GraphingSide::new(g, grid, dims)?;
    let engine = Engine {
        sides: [&sf, &sg],
        cut: cut_cells(&cut.cut, grid, dims)?,
        grid,
        start_stack: Vec::new(),
        opts,
    };
    let mut seen = std::collections::BTreeSet::new();
    for (turn, graph) in [(0usize, f), (1, g)] {
        let other_dialect = if turn == 0 { g.dialect } else { f.dialect };
        for e in &graph.edges {
            for a in e.source.atoms() {
                let cells = Cells::of(a, grid, dims)?;
                for cube in cells.cubes() {
                    if engine.in_cut(a.sym, &cube) {
                        continue;
                    }
                    for o in 0..other_dialect {
                        let states = if turn == 0 { [e.in_state, o] } else { [o, e.in_state] };
                        seen.insert((Node { sym: a.sym, cube: cube.clone(), states }, turn));
                    }
                }
            }
        }
    }
    let starts: Vec<WalkState> = seen
        .into_iter()
        .map(|(node, turn)| WalkState { node, turn, comp: Realizer::identity(), flag: false })
        .collect();
    let (sums, _) = engine.solve(&starts)?;
    let combine = |s: [u32; 2]| s[0] * g.dialect + s[1];
    let mut out = GraphingRep::new(dims, cut.left_rest.union(&cut.right_rest), f.dialect * g.dialect);
    for (st, sum) in starts.iter().zip(sums) {
        let source = Region::from_atom(Atom::new(
            st.node.sym,
            cube_box(&st.node.cube, grid),
            Cylinder::any(),
            0,
        ));
        for (exit, p) in sum {
            out.push(Edge::new(
                source.clone(),
                combine(st.node.states),
                combine(exit.node.states),
                exit.realizer,
                Weight::new(p, exit.flag),
            ));
        }
    }
    Ok(out)
}

/// Plug with the cut taken as the intersection of the supports.
pub fn execute(f: &GraphingRep, g: &GraphingRep, opts: &ExecOptions) -> Result<GraphingRep> {
    plug(f, g, &CutSpec::between(f, g)?, opts)
}

/// A grid cube outside the cut where walks on the first graphing begin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StartPoint {
    pub sym: Symbol,
    pub cube: Vec<u32>,
    pub state: u32,
    /// Known top of the stack, topmost first.
    pub stack: Vec<Letter>,
}

/// Weight of the alternating cycles through a start point, by net stack effect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSum {
    pub total: BTreeMap<ThetaWord, Q>,
    /// False when some path was dropped by the stack-depth bound.
    pub exact: bool,
    /// Mass of stack-neutral cycles; a lower bound on the true value.
    pub lower_bound: Q,
    /// Mass of paths leaving the cut anywhere other than the start.
    pub escaped: Q,
    /// Known top of the stack at the start point.
    pub start: Vec<Letter>,
}

/// Whether `theta` fixes every stack beginning with `start`, e.g. `*c` on `[*]`.
pub fn fixes_prefix(theta: &ThetaWord, start: &[Letter]) -> bool {
    let k = theta.pops();
    k <= start.len() && theta.pushes() == start[..k]
}

impl PathSum {
    /// Mass of the classes that return the start point to itself.
    pub fn neutral(&self) -> Q {
        self.total.iter().filter(|(t, _)| fixes_prefix(t, &self.start)).map(|(_, p)| p).sum()
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        writeln!(s, "path-sum exact {}", self.exact).unwrap();
        for (theta, p) in &self.total {
            writeln!(s, "class {theta} {}", fmt_q(p)).unwrap();
        }
        writeln!(s, "escaped {}", fmt_q(&self.escaped)).unwrap();
        s
    }
}

fn run_path_sums(
    sides: [&dyn Side; 2],
    cut: Vec<Cells>,
    grid: u32,
    dims: usize,
    starts: &[StartPoint],
    opts: &ExecOptions,
) -> Result<Vec<PathSum>> {
    let mut results = Vec::new();
    // Points with different known stacks need separate engines.
    for sp in starts {
        if sp.cube.len() != dims {
            return Err(Error::Parameter(format!("start cube has {} coordinates, grid has {dims}", sp.cube.len())));
        }
        let engine = Engine { sides, cut: cut.clone(), grid, start_stack: sp.stack.clone(), opts };
        if engine.in_cut(sp.sym, &sp.cube) {
            return Err(Error::Parameter("start point lies in the cut".into()));
        }
        let node = Node { sym: sp.sym, cube: sp.cube.clone(), states: [sp.state, 0] };
        let st = WalkState { node: node.clone(), turn: 0, comp: Realizer::identity(), flag: false };
        let (sums, exact) = engine.solve(&[st])?;
        let mut total: BTreeMap<ThetaWord, Q> = BTreeMap::new();
        let mut escaped = Q::zero();
        for (exit, p) in &sums[0] {
            if exit.node == node && exit.realizer.is_spatial_identity() {
                *total.entry(exit.realizer.stack().clone()).or_insert_with(Q::zero) += p;
            } else {
                escaped += p;
            }
        }
        let mut ps = PathSum { total, exact, lower_bound: Q::zero(), escaped, start: sp.stack.clone() };
        ps.lower_bound = ps.neutral();
        results.push(ps);
    }
    Ok(results)
}

/// Cycle sums of `m :: w` through each start point (cut = common support).
pub fn path_sums(m: &GraphingRep, w: &GraphingRep, starts: &[StartPoint], opts: &ExecOptions) -> Result<Vec<PathSum>> {
    let cut = CutSpec::between(m, w)?;
    let grid = grid_size(&[m, w], &[&cut.cut])?;
    let dims = dims_of(&[m, w]);
    let sm = GraphingSide::new(m, grid, dims)?;
    let sw = GraphingSide::new(w, grid, dims)?;
    run_path_sums([&sm, &sw], cut_cells(&cut.cut, grid, dims)?, grid, dims, starts, opts)
}

pub fn accept_path_sum(m: &GraphingRep, w: &GraphingRep, start: &StartPoint, opts: &ExecOptions) -> Result<PathSum> {
    Ok(path_sums(m, w, std::slice::from_ref(start), opts)?.remove(0))
}

/// Alternating paths of `m :: w` from `start` with at most `max_len` edges.
pub fn enumerate_paths(
    m: &GraphingRep,
    w: &GraphingRep,
    start: &StartPoint,
    max_len: usize,
    opts: &ExecOptions,
) -> Result<Vec<PathRecord>> {
    let cut = CutSpec::between(m, w)?;
    let grid = grid_size(&[m, w], &[&cut.cut])?;
    let dims = dims_of(&[m, w]);
    let sm = GraphingSide::new(m, grid, dims)?;
    let sw = GraphingSide::new(w, grid, dims)?;
    let engine = Engine {
        sides: [&sm, &sw],
        cut: cut_cells(&cut.cut, grid, dims)?,
        grid,
        start_stack: start.stack.clone(),
        opts,
    };
    let node = Node { sym: start.sym, cube: start.cube.clone(), states: [start.state, 0] };
    engine.paths(&WalkState { node, turn: 0, comp: Realizer::identity(), flag: false }, max_len)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThickNode {
    pub sym: Symbol,
    pub cube: Vec<u32>,
    pub state: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThickEdge {
    pub from: usize,
    pub to: usize,
    pub weight: Weight,
    pub theta: ThetaWord,
    /// Required top of the stack, topmost first.
    pub guard: Vec<Letter>,
    pub realizer: Realizer,
}

/// Finite graph on grid cubes equivalent to a graphing.
#[derive(Debug, Clone)]
pub struct ThickGraph {
    pub grid: u32,
    pub dims: usize,
    pub nodes: Vec<ThickNode>,
    pub edges: Vec<ThickEdge>,
    out: HashMap<usize, Vec<usize>>,
    ids: HashMap<ThickNode, usize>,
}

impl ThickGraph {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn node_id(&self, n: &ThickNode) -> Option<usize> {
        self.ids.get(n).copied()
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "thick-graph grid {} dims {} nodes {} edges {}",
            self.grid,
            self.dims,
            self.nodes.len(),
            self.edges.len()
        )
        .unwrap();
        for (i, n) in self.nodes.iter().enumerate() {
            let cube: Vec<String> = n.cube.iter().map(u32::to_string).collect();
            writeln!(s, "node {i} {} {} {}", n.sym.name(), cube.join(","), n.state).unwrap();
        }
        for e in &self.edges {
            let guard: String = if e.guard.is_empty() {
                "-".into()
            } else {
                e.guard.iter().map(|l| l.as_char()).collect()
            };
            writeln!(s, "edge {} {} {} {} {}", e.from, e.to, e.weight, e.theta, guard).unwrap();
        }
        s
    }
}

impl Side for ThickGraph {
    fn moves(&self, sym: Symbol, cube: &[u32], state: u32, stack: &[Letter]) -> Result<Vec<Move>> {
        let key = ThickNode { sym, cube: cube.to_vec(), state };
        let mut out = Vec::new();
        let Some(&id) = self.ids.get(&key) else {
            return Ok(out);
        };
        for &e in self.out.get(&id).into_iter().flatten() {
            let e = &self.edges[e];
            if guard_holds(&e.guard, stack)? {
                out.push(Move {
                    weight: e.weight.clone(),
                    realizer: e.realizer.clone(),
                    out_state: self.nodes[e.to].state,
                });
            }
        }
        Ok(out)
    }
}

fn discretize_one(f: &GraphingRep, grid: u32, dims: usize) -> Result<ThickGraph> {
    let mut raw = Vec::new();
    for e in &f.edges {
        if e.weight.p.is_zero() {
            continue;
        }
        for a in e.source.atoms() {
            let cells = Cells::of(a, grid, dims)?;
            for cube in cells.cubes() {
                let from = ThickNode { sym: a.sym, cube: cube.clone(), state: e.in_state };
                let to = ThickNode {
                    sym: e.realizer.apply_symbol(a.sym)?,
                    cube: e.realizer.apply_cube(&cube, grid)?,
                    state: e.out_state,
                };
                raw.push((from, to, e, a.cyl.prefix.clone()));
            }
        }
    }
    let mut set = std::collections::BTreeSet::new();
    for (from, to, _, _) in &raw {
        set.insert(from.clone());
        set.insert(to.clone());
    }
    let nodes: Vec<ThickNode> = set.into_iter().collect();
    let ids: HashMap<ThickNode, usize> = nodes.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
    let mut edges = Vec::with_capacity(raw.len());
    let mut out: HashMap<usize, Vec<usize>> = HashMap::new();
    for (from, to, e, guard) in raw {
        let (from, to) = (ids[&from], ids[&to]);
        out.entry(from).or_default().push(edges.len());
        edges.push(ThickEdge {
            from,
            to,
            weight: e.weight.clone(),
            theta: e.realizer.stack().clone(),
            guard,
            realizer: e.realizer.clone(),
        });
    }
    Ok(ThickGraph { grid, dims, nodes, edges, out, ids })
}

/// Both graphings as finite graphs on the `1/grid` cube lattice.
pub fn discretize(f: &GraphingRep, g: &GraphingRep, grid: u32) -> Result<(ThickGraph, ThickGraph)> {
    let need = grid_size(&[f, g], &[])?;
    if grid == 0 || grid % need != 0 {
        return Err(Error::Discretization(format!("realizers need a grid multiple of {need}, got {grid}")));
    }
    let dims = dims_of(&[f, g]);
    Ok((discretize_one(f, grid, dims)?, discretize_one(g, grid, dims)?))
}

/// Cycle sums computed on the finite view; agrees with [`path_sums`].
pub fn thick_path_sums(
    mbar: &ThickGraph,
    wbar: &ThickGraph,
    cut: &Region,
    starts: &[StartPoint],
    opts: &ExecOptions,
) -> Result<Vec<PathSum>> {
    if mbar.grid != wbar.grid || mbar.dims != wbar.dims {
        return Err(Error::Parameter("thick graphs on different grids".into()));
    }
    let cells = cut_cells(cut, mbar.grid, mbar.dims)?;
    run_path_sums([mbar, wbar], cells, mbar.grid, mbar.dims, starts, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn sym_edge(from: Symbol, to: Symbol, p: Q) -> Edge {
        Edge::new(Region::symbol(from), 0, 0, Realizer::symbol_shift(from, to), Weight::plain(p))
    }

    #[test]
    fn two_step_path() {
        let mut f = GraphingRep::new(1, Region::symbols(&[Symbol::Accept, Symbol::StarIn]), 1);
        f.push(sym_edge(Symbol::Accept, Symbol::StarIn, qi(1)));
        let mut g = GraphingRep::new(1, Region::symbols(&[Symbol::StarIn, Symbol::Reject]), 1);
        g.push(sym_edge(Symbol::StarIn, Symbol::Reject, qi(1)));
        let h = execute(&f, &g, &ExecOptions::default()).unwrap();
        assert_eq!(h.edges.len(), 1);
        let e = &h.edges[0];
        assert!(e.source.ae_equal(&Region::symbol(Symbol::Accept)));
        assert_eq!(e.realizer, Realizer::symbol_shift(Symbol::Accept, Symbol::Reject));
        assert_eq!(e.weight, Weight::one());
        assert!(h.is_deterministic());
    }

    #[test]
    fn geometric_family_is_summed() {
        // F: A -> C, C' -> C.  G: C -> C' (1/2), C -> B (1/2).
        let (a, c, c2, b) = (Symbol::Accept, Symbol::StarIn, Symbol::StarOut, Symbol::Reject);
        let mut f = GraphingRep::new(1, Region::symbols(&[a, c, c2]), 1);
        f.push(sym_edge(a, c, qi(1)));
        f.push(sym_edge(c2, c, qi(1)));
        let mut g = GraphingRep::new(1, Region::symbols(&[c, c2, b]), 1);
        g.push(sym_edge(c, c2, q(1, 2)));
        g.push(sym_edge(c, b, q(1, 2)));
        let h = execute(&f, &g, &ExecOptions::default()).unwrap();
        assert_eq!(h.edges.len(), 1);
        assert_eq!(h.edges[0].weight.p, qi(1));
        assert_eq!(h.edges[0].realizer.apply_symbol(a).unwrap(), b);
    }

    #[test]
    fn empty_graphing_discretizes_to_empty() {
        let f = GraphingRep::new(1, Region::empty(), 1);
        let (tf, tg) = discretize(&f, &f, 3).unwrap();
        assert!(tf.is_empty() && tg.is_empty());
        assert!(tf.nodes.is_empty());
    }

    #[test]
    fn swap_acts_on_cubes() {
        let mut f = GraphingRep::new(2, Region::symbol(Symbol::Accept), 1);
        f.push(Edge::new(Region::symbol(Symbol::Accept), 0, 0, Realizer::transposition(0, 1), Weight::one()));
        let (t, _) = discretize(&f, &GraphingRep::new(2, Region::empty(), 1), 2).unwrap();
        assert_eq!(t.edges.len(), 4);
        for e in &t.edges {
            let (x, y) = (&t.nodes[e.from].cube, &t.nodes[e.to].cube);
            assert_eq!((x[0], x[1]), (y[1], y[0]));
        }
    }

    #[test]
    fn off_grid_realizer_is_rejected() {
        let mut f = GraphingRep::new(1, Region::symbol(Symbol::Accept), 1);
        let src = Region::from_atom(Atom::new(
            Symbol::Accept,
            BoxN::new(vec![Interval::new(q(0, 1), q(1, 2)).unwrap()]),
            Cylinder::any(),
            0,
        ));
        f.push(Edge::new(src, 0, 0, Realizer::coord_shift(0, q(1, 2)), Weight::one()));
        let e = GraphingRep::new(1, Region::empty(), 1);
        assert!(matches!(discretize(&f, &e, 3), Err(Error::Discretization(_))));
        assert!(discretize(&f, &e, 4).is_ok());
    }

    #[test]
    fn divergent_loop_is_a_closure_violation() {
        // A C <-> C' loop where each bounce has weight 1 but two G edges fire.
        let (a, c, c2) = (Symbol::Accept, Symbol::StarIn, Symbol::StarOut);
        let mut f = GraphingRep::new(1, Region::symbols(&[a, c, c2]), 1);
        f.push(sym_edge(a, c, qi(1)));
        f.push(sym_edge(c2, c, qi(1)));
        let mut g = GraphingRep::new(1, Region::symbols(&[c, c2, Symbol::Reject]), 1);
        g.push(sym_edge(c, c2, qi(1)));
        g.push(sym_edge(c, c2, qi(1)));
        g.push(sym_edge(c, Symbol::Reject, qi(1)));
        assert!(matches!(
            execute(&f, &g, &ExecOptions::default()),
            Err(Error::ClosureViolation(_))
        ));
    }

    #[test]
    fn stack_bound_truncates_or_fails() {
        // C pushes forever through C'; the only exit pops back down.
        let (a, c, c2) = (Symbol::Accept, Symbol::StarIn, Symbol::StarOut);
        let mut f = GraphingRep::new(1, Region::symbols(&[a, c, c2]), 1);
        f.push(sym_edge(a, c, qi(1)));
        let mut push = sym_edge(c2, c, qi(1));
        push.realizer = push.realizer.then(&Realizer::push(Letter::Zero));
        f.push(push);
        let mut g = GraphingRep::new(1, Region::symbols(&[c, c2, Symbol::Reject]), 1);
        g.push(sym_edge(c, c2, q(1, 2)));
        g.push(sym_edge(c, Symbol::Reject, q(1, 2)));
        let start = StartPoint { sym: a, cube: vec![0], state: 0, stack: vec![Letter::Star] };
        let opts = ExecOptions { stack_depth: 4, ..ExecOptions::default() };
        let s = accept_path_sum(&f, &g, &start, &opts).unwrap();
        assert!(!s.exact);
        // 1/2 + 1/4 + 1/8 + 1/16 reach the reject side before the bound.
        assert_eq!(s.escaped, q(15, 16));
        let strict = ExecOptions { require_exact: true, ..opts };
        assert_eq!(accept_path_sum(&f, &g, &start, &strict), Err(Error::Truncation(4)));
    }
}
