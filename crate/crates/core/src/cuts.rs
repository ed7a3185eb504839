//! Exact max-flow / min-cut and the Held–Karp membership check.

use std::collections::VecDeque;

use crate::graph::{CapacityGraph, Edge};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinCut {
    pub value: Rational,
    /// `side[v]` is true for the source side. This is the inclusion-minimal
    /// source side among all minimum cuts.
    pub side: Vec<bool>,
}

/// Max flow on a dense directed network, `cap[u * n + v]` = capacity of `u -> v`.
pub fn max_flow_dense(n: usize, cap: &[Rational], s: usize, t: usize) -> MinCut {
    assert!(s != t && s < n && t < n, "bad terminals {s} {t}");
    let mut res = cap.to_vec();
    let mut value = Rational::zero();
    let mut pred = vec![usize::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    loop {
        pred.iter_mut().for_each(|p| *p = usize::MAX);
        pred[s] = s;
        queue.clear();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            let row = &res[u * n..(u + 1) * n];
            for (v, r) in row.iter().enumerate() {
                if pred[v] == usize::MAX && r.is_positive() {
                    pred[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if pred[t] == usize::MAX {
            break;
        }
        let mut bottleneck = res[pred[t] * n + t].clone();
        let mut v = t;
        while v != s {
            let u = pred[v];
            if res[u * n + v] < bottleneck {
                bottleneck = res[u * n + v].clone();
            }
            v = u;
        }
        let mut v = t;
        while v != s {
            let u = pred[v];
            res[u * n + v] -= &bottleneck;
            res[v * n + u] += &bottleneck;
            v = u;
        }
        value += &bottleneck;
    }
    let side: Vec<bool> = pred.iter().map(|&p| p != usize::MAX).collect();
    if cfg!(debug_assertions) {
        let mut c = Rational::zero();
        for u in 0..n {
            for v in 0..n {
                if side[u] && !side[v] {
                    c += &cap[u * n + v];
                }
            }
        }
        assert_eq!(c, value, "max-flow/min-cut mismatch");
    }
    MinCut { value, side }
}

/// Minimum `s`-`t` cut of an undirected capacity graph.
pub fn min_cut(g: &CapacityGraph, s: usize, t: usize) -> MinCut {
    let n = g.n();
    let mut cap = Vec::with_capacity(n * n);
    for u in 0..n {
        for v in 0..n {
            cap.push(g.get(u, v).clone());
        }
    }
    max_flow_dense(n, &cap, s, t)
}

/// Local edge-connectivity `lambda(s, t)`.
pub fn connectivity(g: &CapacityGraph, s: usize, t: usize) -> Rational {
    min_cut(g, s, t).value
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HkViolation {
    /// `z(delta(v)) != 2`.
    Degree { vertex: usize, value: Rational },
    /// `z(delta(S)) < 2` for the given set (not containing the root).
    Cut { set: Vec<usize>, value: Rational },
}

/// Check membership of `z` in the Held–Karp polytope on `vertices`:
/// every degree is 2 and every cut separating `root` from another vertex is at
/// least 2. Edges may repeat; parallel weights are added.
pub fn held_karp_violation(
    n: usize,
    vertices: &[usize],
    z: &[(Edge, Rational)],
    root: usize,
) -> Option<HkViolation> {
    let mut g = CapacityGraph::new(n);
    let mut inside = vec![false; n];
    for &v in vertices {
        inside[v] = true;
    }
    for ((u, v), w) in z {
        assert!(inside[*u] && inside[*v], "edge ({u},{v}) leaves the vertex set");
        g.add(*u, *v, w);
    }
    let two = Rational::from_integer(2);
    for &v in vertices {
        let d = g.degree(v);
        if d != two {
            return Some(HkViolation::Degree { vertex: v, value: d });
        }
    }
    for &v in vertices {
        if v == root {
            continue;
        }
        let cut = min_cut(&g, root, v);
        if cut.value < two {
            let set = (0..n).filter(|&u| inside[u] && !cut.side[u]).collect();
            return Some(HkViolation::Cut { set, value: cut.value });
        }
    }
    None
}
