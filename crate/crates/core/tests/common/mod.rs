#![allow(dead_code)]

use std::collections::VecDeque;

use prizeloop::graph::{Edge, EdgeWeights};
use prizeloop::instance::{generate_instance, Family, Instance};
use prizeloop::Rational;

/// Edmonds–Karp on an undirected rational capacity matrix.
pub fn max_flow(n: usize, cap: &[Rational], s: usize, t: usize) -> Rational {
    let mut res = cap.to_vec();
    let mut total = Rational::zero();
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if prev[v] == usize::MAX && res[u * n + v].is_positive() {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            return total;
        }
        let mut bottleneck: Option<Rational> = None;
        let mut v = t;
        while v != s {
            let u = prev[v];
            let c = res[u * n + v].clone();
            bottleneck = Some(match bottleneck {
                Some(b) if b < c => b,
                _ => c,
            });
            v = u;
        }
        let b = bottleneck.expect("path has an edge");
        let mut v = t;
        while v != s {
            let u = prev[v];
            res[u * n + v] -= &b;
            res[v * n + u] += &b;
            v = u;
        }
        total += &b;
    }
}

pub fn pairwise_connectivity(g: &EdgeWeights, vertices: &[usize]) -> Vec<(usize, usize, Rational)> {
    let n = g.n();
    let cap: Vec<Rational> = (0..n * n).map(|i| g.get(i / n, i % n).clone()).collect();
    let mut out = Vec::new();
    for (i, &a) in vertices.iter().enumerate() {
        for &b in &vertices[i + 1..] {
            out.push((a, b, max_flow(n, &cap, a, b)));
        }
    }
    out
}

/// Connected and acyclic on its own vertex set.
pub fn is_tree(edges: &[Edge]) -> bool {
    let mut vs: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    vs.sort_unstable();
    vs.dedup();
    if edges.len() + 1 != vs.len() {
        return false;
    }
    let idx = |v: usize| vs.binary_search(&v).unwrap();
    let mut parent: Vec<usize> = (0..vs.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, idx(a)), find(&mut parent, idx(b)));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

/// The metric batch: Euclidean and random-metric, `n` in `[6, 12]`,
/// penalty scales cycling through five magnitudes.
pub fn metric_batch(count: usize) -> Vec<Instance> {
    let scales = [Rational::new(1, 4), Rational::new(1, 3), Rational::new(1, 2), Rational::new(2, 3), Rational::one()];
    (0..count)
        .map(|i| {
            let fam = if i % 2 == 0 { Family::Euclidean } else { Family::RandomMetric };
            generate_instance(6 + i % 7, fam, &scales[i / 2 % scales.len()], 1000 + i as u64).unwrap()
        })
        .collect()
}

pub fn graph_batch(count: usize) -> Vec<Instance> {
    let scales = [Rational::new(1, 4), Rational::one(), Rational::from_integer(3)];
    (0..count)
        .map(|i| generate_instance(6 + i % 7, Family::SparseGraph, &scales[i % 3], 5000 + i as u64).unwrap())
        .collect()
}
