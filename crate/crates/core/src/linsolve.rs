//! Exact absorption probabilities for finite weighted transition systems.
//!
//! Each transient state `i` satisfies `x_i = sum_j a_ij x_j + b_i`, where
//! `b_i` maps absorbing labels to weights. States that cannot reach a label
//! are fixed at zero; the rest are solved strongly connected component by
//! component with sparse Gaussian elimination over exact rationals.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;

pub type LabelMap<L> = BTreeMap<L, Q>;

#[derive(Debug, Clone)]
pub struct Absorbing<L> {
    succ: Vec<Vec<(usize, Q)>>,
    exits: Vec<LabelMap<L>>,
}

impl<L> Default for Absorbing<L> {
    fn default() -> Self {
        Absorbing { succ: Vec::new(), exits: Vec::new() }
    }
}

fn add_into<L: Ord + Clone>(dst: &mut LabelMap<L>, src: &LabelMap<L>, scale: &Q) {
    for (l, v) in src {
        let e = dst.entry(l.clone()).or_insert_with(Q::zero);
        *e += v * scale;
    }
}

impl<L: Ord + Clone> Absorbing<L> {
    pub fn new() -> Self {
        Absorbing::default()
    }

    pub fn add_state(&mut self) -> usize {
        self.succ.push(Vec::new());
        self.exits.push(BTreeMap::new());
        self.succ.len() - 1
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn add_transition(&mut self, from: usize, to: usize, w: Q) {
        if !w.is_zero() {
            self.succ[from].push((to, w));
        }
    }

    pub fn add_exit(&mut self, from: usize, label: L, w: Q) {
        if !w.is_zero() {
            *self.exits[from].entry(label).or_insert_with(Q::zero) += w;
        }
    }

    /// Label distribution for every state.
    pub fn solve(&self) -> Result<Vec<LabelMap<L>>> {
        let n = self.len();
        let live = self.live_states();
        // Work on interned labels; they are cloned and compared constantly.
        let mut labels: Vec<&L> = self.exits.iter().flat_map(|e| e.keys()).collect();
        labels.sort_unstable();
        labels.dedup();
        let exits: Vec<LabelMap<usize>> = self
            .exits
            .iter()
            .map(|e| {
                e.iter().map(|(l, v)| (labels.binary_search(&l).expect("interned"), v.clone())).collect()
            })
            .collect();
        let mut sol: Vec<Option<LabelMap<usize>>> = vec![None; n];
        for (i, alive) in live.iter().enumerate() {
            if !alive {
                sol[i] = Some(BTreeMap::new());
            }
        }
        for comp in self.sccs(&live) {
            self.solve_component(&comp, &exits, &mut sol)?;
        }
        Ok(sol
            .into_iter()
            .map(|s| s.unwrap_or_default().into_iter().map(|(k, v)| (labels[k].clone(), v)).collect())
            .collect())
    }

    /// States from which some exit is reachable through positive weights.
    fn live_states(&self) -> Vec<bool> {
        let n = self.len();
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, s) in self.succ.iter().enumerate() {
            for (j, _) in s {
                pred[*j].push(i);
            }
        }
        let mut live: Vec<bool> = self.exits.iter().map(|e| !e.is_empty()).collect();
        let mut stack: Vec<usize> = (0..n).filter(|&i| live[i]).collect();
        while let Some(j) = stack.pop() {
            for &i in &pred[j] {
                if !live[i] {
                    live[i] = true;
                    stack.push(i);
                }
            }
        }
        live
    }

    /// Tarjan's algorithm, iterative; components come out sinks first.
    fn sccs(&self, live: &[bool]) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut out = Vec::new();
        let mut counter = 0;
        for root in 0..n {
            if !live[root] || index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut k)) = call.last_mut() {
                if *k < self.succ[v].len() {
                    let w = self.succ[v][*k].0;
                    *k += 1;
                    if !live[w] {
                        continue;
                    }
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        out.push(comp);
                    }
                }
            }
        }
        out
    }

    fn solve_component(
        &self,
        comp: &[usize],
        exits: &[LabelMap<usize>],
        sol: &mut [Option<LabelMap<usize>>],
    ) -> Result<()> {
        let local: HashMap<usize, usize> = comp.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let m = comp.len();
        let mut rows: Vec<HashMap<usize, Q>> = vec![HashMap::new(); m];
        let mut rhs: Vec<LabelMap<usize>> = Vec::with_capacity(m);
        for (k, &i) in comp.iter().enumerate() {
            let mut b = exits[i].clone();
            for (j, w) in &self.succ[i] {
                if let Some(&lj) = local.get(j) {
                    *rows[k].entry(lj).or_insert_with(Q::zero) += w;
                } else if let Some(sj) = &sol[*j] {
                    add_into(&mut b, sj, w);
                }
            }
            rhs.push(b);
        }
        let mut users: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (k, row) in rows.iter().enumerate() {
            for &j in row.keys() {
                if j != k {
                    users[j].push(k);
                }
            }
        }
        let mut done = vec![false; m];
        for p in 0..m {
            let self_w = rows[p].remove(&p).unwrap_or_else(Q::zero);
            let denom = Q::one() - self_w;
            if !denom.is_positive() {
                return Err(Error::ClosureViolation(format!(
                    "state with self-loop mass {} >= 1",
                    crate::rational::fmt_q(&(Q::one() - denom))
                )));
            }
            if !denom.is_one() {
                let inv = denom.recip();
                for v in rows[p].values_mut() {
                    *v *= &inv;
                }
                for v in rhs[p].values_mut() {
                    *v *= &inv;
                }
            }
            done[p] = true;
            let row_p: Vec<(usize, Q)> = rows[p].iter().map(|(k, v)| (*k, v.clone())).collect();
            let rhs_p = rhs[p].clone();
            let mut us = std::mem::take(&mut users[p]);
            us.sort_unstable();
            us.dedup();
            for r in us {
                if done[r] {
                    continue;
                }
                let Some(coef) = rows[r].remove(&p) else { continue };
                for (j, v) in &row_p {
                    let e = rows[r].entry(*j).or_insert_with(Q::zero);
                    *e += &coef * v;
                    if *j != r {
                        users[*j].push(r);
                    }
                }
                add_into(&mut rhs[r], &rhs_p, &coef);
            }
        }
        // Back substitution: row p now only references later pivots.
        let mut local_sol: Vec<Option<LabelMap<usize>>> = vec![None; m];
        for p in (0..m).rev() {
            let mut x = rhs[p].clone();
            for (j, v) in &rows[p] {
                let sj = local_sol[*j].as_ref().expect("later pivot solved");
                add_into(&mut x, sj, v);
            }
            x.retain(|_, v| !v.is_zero());
            local_sol[p] = Some(x);
        }
        for (k, &i) in comp.iter().enumerate() {
            let x = local_sol[k].take().unwrap_or_default();
            if x.values().any(|v| v.is_negative()) {
                return Err(Error::ClosureViolation("negative absorption mass".into()));
            }
            sol[i] = Some(x);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use rand::{Rng, SeedableRng};

    /// Dense Gauss-Jordan on `(I - A) x = b` for a single label.
    fn dense(a: &[Vec<Q>], b: &[Q]) -> Vec<Q> {
        let n = b.len();
        let mut m: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                let mut row: Vec<Q> = (0..n)
                    .map(|j| if i == j { qi(1) - a[i][j].clone() } else { -a[i][j].clone() })
                    .collect();
                row.push(b[i].clone());
                row
            })
            .collect();
        for c in 0..n {
            let piv = (c..n).find(|&r| !m[r][c].is_zero()).expect("nonsingular");
            m.swap(c, piv);
            let inv = m[c][c].recip();
            for v in m[c].iter_mut() {
                *v *= &inv;
            }
            for r in 0..n {
                if r != c && !m[r][c].is_zero() {
                    let f = m[r][c].clone();
                    for k in 0..=n {
                        let t = &f * &m[c][k];
                        m[r][k] -= t;
                    }
                }
            }
        }
        m.into_iter().map(|row| row[n].clone()).collect()
    }

    #[test]
    fn geometric_retry() {
        // x = 1/2 + x/2
        let mut s = Absorbing::new();
        let x = s.add_state();
        s.add_exit(x, "acc", q(1, 2));
        s.add_transition(x, x, q(1, 2));
        assert_eq!(s.solve().unwrap()[x]["acc"], q(1, 1));
    }

    #[test]
    fn dead_cycle_is_zero() {
        let mut s: Absorbing<&str> = Absorbing::new();
        let x = s.add_state();
        let y = s.add_state();
        s.add_transition(x, y, q(1, 1));
        s.add_transition(y, x, q(1, 1));
        assert!(s.solve().unwrap()[x].is_empty());
    }

    #[test]
    fn divergent_mass_is_reported() {
        let mut s = Absorbing::new();
        let x = s.add_state();
        s.add_transition(x, x, q(3, 2));
        s.add_exit(x, 0, q(1, 2));
        assert!(matches!(s.solve(), Err(Error::ClosureViolation(_))));
    }

    #[test]
    fn matches_dense_elimination_on_random_substochastic_systems() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.gen_range(1..9);
            let mut a = vec![vec![qi(0); n]; n];
            let mut b = vec![qi(0); n];
            let mut s = Absorbing::new();
            for _ in 0..n {
                s.add_state();
            }
            for i in 0..n {
                // Split mass 1 - slack into random pieces.
                let parts = rng.gen_range(1..4);
                for _ in 0..parts {
                    let w = q(rng.gen_range(0..3), 12);
                    if rng.gen_bool(0.3) {
                        b[i] += &w;
                        s.add_exit(i, (), w);
                    } else {
                        let j = rng.gen_range(0..n);
                        a[i][j] += &w;
                        s.add_transition(i, j, w);
                    }
                }
                let leak = q(1, 12);
                b[i] += &leak;
                s.add_exit(i, (), leak);
            }
            let expected = dense(&a, &b);
            let got = s.solve().unwrap();
            for i in 0..n {
                let v = got[i].get(&()).cloned().unwrap_or_else(|| qi(0));
                assert_eq!(v, expected[i]);
            }
        }
    }
}
