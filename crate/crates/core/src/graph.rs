//! The functional graph `u -> D(u)` around a single cycle.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;

use crate::arith::sub_mod;
use crate::cycle::{find_cycle, DEFAULT_STEP_BUDGET};
use crate::ring::{ducci_apply, ducci_step, Tuple};
use crate::{Error, Result};

/// Default cap on component size for [`component_of`].
pub const DEFAULT_NODE_BUDGET: usize = 100_000;

/// One connected component: a cycle plus every tree hanging off it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionGraph {
    /// Nodes in ascending order.
    pub nodes: Vec<Tuple>,
    /// `on_cycle[i]` tells whether `nodes[i]` lies on the cycle.
    pub on_cycle: Vec<bool>,
    /// `(i, j)` with `nodes[j] = D(nodes[i])`, one per node, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl TransitionGraph {
    pub fn cycle_len(&self) -> usize {
        self.on_cycle.iter().filter(|&&c| c).count()
    }

    pub fn index_of(&self, u: &Tuple) -> Option<usize> {
        self.nodes.binary_search(u).ok()
    }

    /// Nodes with no predecessor.
    pub fn leaves(&self) -> Vec<usize> {
        let mut has_pred = alloc::vec![false; self.nodes.len()];
        for &(_, j) in &self.edges {
            has_pred[j] = true;
        }
        (0..self.nodes.len()).filter(|&i| !has_pred[i]).collect()
    }
}

/// All `v` with `D(v) = u`, ascending.
///
/// Fixing `v_1 = t` forces `v_{i+1} = u_i - v_i`, so `v_n = ±t + c` and the
/// wrap-around equation is linear in `t`: `2t = b` for odd `n`, `0 = b` for
/// even `n`.
pub fn predecessors(u: &Tuple) -> Vec<Tuple> {
    let params = u.params();
    let n = params.n();
    let m = params.m();
    let xs = u.entries();
    let chain = |t: u64| -> Vec<u64> {
        let mut v = Vec::with_capacity(n);
        v.push(t);
        for i in 0..n - 1 {
            v.push(sub_mod(xs[i], v[i], m));
        }
        v
    };
    // with t = 0, the wrap residual is u_n - v_n - v_1
    let base = chain(0);
    let b = sub_mod(xs[n - 1], base[n - 1], m);
    let ts: Vec<u64> = if n.is_multiple_of(2) {
        if b == 0 { (0..m).collect() } else { Vec::new() }
    } else if m % 2 == 1 {
        alloc::vec![crate::arith::mul_mod(b, m.div_ceil(2), m)]
    } else if b.is_multiple_of(2) {
        alloc::vec![b / 2, b / 2 + m / 2]
    } else {
        Vec::new()
    };
    let mut out: Vec<Tuple> = ts
        .into_iter()
        .map(|t| Tuple::from_reduced(params, chain(t)).expect("entries reduced"))
        .collect();
    out.sort();
    out
}

/// The component of the transition graph containing `u`. Fails with
/// `BudgetExceeded` once more than `node_budget` nodes are found.
pub fn component_of(u: &Tuple, node_budget: usize) -> Result<TransitionGraph> {
    let too_big = Error::BudgetExceeded { what: "component size", budget: node_budget as u64 };
    let info = find_cycle(u, DEFAULT_STEP_BUDGET)?;
    if info.per > node_budget as u64 {
        return Err(too_big);
    }
    let mut cycle = BTreeSet::new();
    let mut v = ducci_apply(u, info.len);
    for _ in 0..info.per {
        cycle.insert(v.clone());
        v = ducci_step(&v);
    }

    let mut seen: BTreeSet<Tuple> = cycle.clone();
    let mut queue: VecDeque<Tuple> = cycle.iter().cloned().collect();
    while let Some(w) = queue.pop_front() {
        for p in predecessors(&w) {
            if seen.contains(&p) {
                continue;
            }
            if seen.len() >= node_budget {
                return Err(too_big);
            }
            seen.insert(p.clone());
            queue.push_back(p);
        }
    }

    let nodes: Vec<Tuple> = seen.into_iter().collect();
    let position: BTreeMap<&Tuple, usize> = nodes.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let on_cycle = nodes.iter().map(|t| cycle.contains(t)).collect();
    let edges = nodes
        .iter()
        .enumerate()
        .map(|(i, t)| (i, position[&ducci_step(t)]))
        .collect();
    Ok(TransitionGraph { nodes, on_cycle, edges })
}
