//! Parity correction, Eulerian traversal and shortcutting.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::graph::{edge, DisjointSets, Edge};
use crate::instance::Instance;
use crate::rational::Rational;

/// Largest odd set handled by the subset DP.
pub const MATCHING_DP_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TourError {
    #[error("vertex {0} has odd degree")]
    OddDegree(usize),
    #[error("multigraph is disconnected")]
    Disconnected,
    #[error("root {0} is not in the multigraph")]
    MissingRoot(usize),
    #[error("odd set of size {0} exceeds the matching limit")]
    OddSetTooLarge(usize),
    #[error("odd set of size {0} cannot be perfectly matched")]
    OddCardinality(usize),
    #[error("cycle must start at the root and not repeat vertices")]
    BadCycle,
}

/// Undirected multigraph: a vertex set plus edge multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Multigraph {
    pub vertices: BTreeSet<usize>,
    #[serde(serialize_with = "edge_list")]
    pub edges: BTreeMap<Edge, usize>,
}

/// Edges as `[u, v, multiplicity]` triples.
fn edge_list<S: serde::Serializer>(edges: &BTreeMap<Edge, usize>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(edges.iter().map(|(&(u, v), &k)| [u, v, k]))
}

impl Multigraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertex(v: usize) -> Self {
        let mut g = Self::new();
        g.vertices.insert(v);
        g
    }

    pub fn add_vertex(&mut self, v: usize) {
        self.vertices.insert(v);
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.add_edge_times(u, v, 1);
    }

    pub fn add_edge_times(&mut self, u: usize, v: usize, k: usize) {
        assert!(u != v, "self-loop at {u}");
        if k == 0 {
            return;
        }
        self.vertices.insert(u);
        self.vertices.insert(v);
        *self.edges.entry(edge(u, v)).or_insert(0) += k;
    }

    pub fn extend(&mut self, other: &Multigraph) {
        self.vertices.extend(other.vertices.iter().copied());
        for (&(u, v), &k) in &other.edges {
            self.add_edge_times(u, v, k);
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().sum()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|(&(a, b), _)| a == v || b == v).map(|(_, &k)| k).sum()
    }

    pub fn degrees(&self) -> BTreeMap<usize, usize> {
        let mut d: BTreeMap<usize, usize> = self.vertices.iter().map(|&v| (v, 0)).collect();
        for (&(a, b), &k) in &self.edges {
            *d.entry(a).or_insert(0) += k;
            *d.entry(b).or_insert(0) += k;
        }
        d
    }

    /// Vertices of odd degree, ascending.
    pub fn odd_vertices(&self) -> Vec<usize> {
        self.degrees().into_iter().filter(|&(_, d)| d % 2 == 1).map(|(v, _)| v).collect()
    }

    pub fn is_eulerian(&self) -> bool {
        self.odd_vertices().is_empty() && self.is_connected()
    }

    pub fn is_connected(&self) -> bool {
        let Some(&max) = self.vertices.iter().next_back() else {
            return true;
        };
        let mut ds = DisjointSets::new(max + 1);
        for &(a, b) in self.edges.keys() {
            ds.union(a, b);
        }
        let first = *self.vertices.iter().next().unwrap();
        let root = ds.find(first);
        self.vertices.iter().all(|&v| ds.find(v) == root)
    }

    pub fn cost(&self, dist: impl Fn(usize, usize) -> Rational) -> Rational {
        self.edges.iter().map(|(&(a, b), &k)| dist(a, b) * Rational::from_integer(k as i64)).sum()
    }

    /// Relabel vertices through `f`, dropping edges that become loops.
    /// Loops carry even degree, so parity is preserved.
    pub fn contract(&self, f: impl Fn(usize) -> usize) -> Multigraph {
        let mut g = Multigraph::new();
        for &v in &self.vertices {
            g.add_vertex(f(v));
        }
        for (&(a, b), &k) in &self.edges {
            let (a, b) = (f(a), f(b));
            if a != b {
                g.add_edge_times(a, b, k);
            }
        }
        g
    }
}

/// Closed walk visiting distinct vertices, starting at the root. A single
/// vertex is the root-only cycle; two vertices mean the edge traversed twice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cycle {
    pub order: Vec<usize>,
}

impl Cycle {
    pub fn root_only(root: usize) -> Self {
        Cycle { order: vec![root] }
    }

    pub fn validate(&self, root: usize, n: usize) -> Result<(), TourError> {
        if self.order.first() != Some(&root) {
            return Err(TourError::BadCycle);
        }
        let mut seen = vec![false; n];
        for &v in &self.order {
            if v >= n || seen[v] {
                return Err(TourError::BadCycle);
            }
            seen[v] = true;
        }
        Ok(())
    }

    pub fn contains(&self, v: usize) -> bool {
        self.order.contains(&v)
    }

    pub fn edges(&self) -> Vec<Edge> {
        let k = self.order.len();
        if k < 2 {
            return Vec::new();
        }
        if k == 2 {
            let e = edge(self.order[0], self.order[1]);
            return vec![e, e];
        }
        (0..k).map(|i| edge(self.order[i], self.order[(i + 1) % k])).collect()
    }

    pub fn length(&self, instance: &Instance) -> Rational {
        self.edges().iter().map(|&(a, b)| instance.dist(a, b).clone()).sum()
    }
}

/// Tour length plus penalties of the vertices the cycle misses.
pub fn objective(instance: &Instance, cycle: &Cycle) -> Result<Rational, TourError> {
    cycle.validate(instance.root(), instance.n())?;
    Ok(cycle.length(instance) + missed_penalty(instance, &cycle.order))
}

pub fn missed_penalty(instance: &Instance, visited: &[usize]) -> Rational {
    let mut seen = vec![false; instance.n()];
    for &v in visited {
        seen[v] = true;
    }
    (0..instance.n()).filter(|&v| !seen[v]).map(|v| instance.penalty(v).clone()).sum()
}

/// Minimum-cost perfect matching on `odd` under `dist` by DP over subsets.
/// Returns the cost and the pairs.
pub fn min_perfect_matching(
    odd: &[usize],
    dist: impl Fn(usize, usize) -> Rational,
) -> Result<(Rational, Vec<Edge>), TourError> {
    let k = odd.len();
    if k % 2 == 1 {
        return Err(TourError::OddCardinality(k));
    }
    if k > MATCHING_DP_LIMIT {
        return Err(TourError::OddSetTooLarge(k));
    }
    if k == 0 {
        return Ok((Rational::zero(), Vec::new()));
    }
    let mut d = vec![Rational::zero(); k * k];
    for i in 0..k {
        for j in i + 1..k {
            let w = dist(odd[i], odd[j]);
            d[i * k + j] = w.clone();
            d[j * k + i] = w;
        }
    }
    let full = (1usize << k) - 1;
    // best[mask]: cheapest perfect matching of mask, lowest vertex matched first.
    let mut best: Vec<Option<Rational>> = vec![None; 1 << k];
    let mut choice = vec![0u8; 1 << k];
    best[0] = Some(Rational::zero());
    for mask in 1..=full {
        if mask.count_ones() % 2 == 1 {
            continue;
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut cur: Option<Rational> = None;
        let mut arg = 0;
        let mut bits = rest;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if let Some(sub) = &best[rest & !(1 << j)] {
                let cand = sub + &d[i * k + j];
                if cur.as_ref().is_none_or(|c| cand < *c) {
                    cur = Some(cand);
                    arg = j;
                }
            }
        }
        best[mask] = cur;
        choice[mask] = arg as u8;
    }
    let cost = best[full].clone().expect("complete masks are reachable");
    let mut pairs = Vec::with_capacity(k / 2);
    let mut mask = full;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let j = choice[mask] as usize;
        pairs.push(edge(odd[i], odd[j]));
        mask &= !(1 << i) & !(1 << j);
    }
    pairs.sort_unstable();
    Ok((cost, pairs))
}

/// Shortest `odd(h)`-join in a metric: a minimum perfect matching on the
/// odd-degree vertices.
pub fn minimum_odd_join(h: &Multigraph, metric: &Instance) -> Result<Vec<Edge>, TourError> {
    let odd = h.odd_vertices();
    min_perfect_matching(&odd, |a, b| metric.dist(a, b).clone()).map(|(_, j)| j)
}

/// Hierholzer's algorithm from `root`, then keep first occurrences.
pub fn eulerian_shortcut(g: &Multigraph, root: usize) -> Result<Cycle, TourError> {
    if !g.vertices.contains(&root) {
        return Err(TourError::MissingRoot(root));
    }
    if let Some(&v) = g.odd_vertices().first() {
        return Err(TourError::OddDegree(v));
    }
    if !g.is_connected() {
        return Err(TourError::Disconnected);
    }
    let walk = euler_circuit(g, root);
    let mut seen = BTreeSet::new();
    let order = walk.into_iter().filter(|&v| seen.insert(v)).collect();
    Ok(Cycle { order })
}

/// Closed Eulerian walk as a vertex sequence (first vertex repeated at the end).
pub fn euler_circuit(g: &Multigraph, root: usize) -> Vec<usize> {
    let mut ends: Vec<Edge> = Vec::with_capacity(g.edge_count());
    for (&e, &k) in &g.edges {
        ends.extend(std::iter::repeat_n(e, k));
    }
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &(a, b)) in ends.iter().enumerate() {
        adj.entry(a).or_default().push(i);
        adj.entry(b).or_default().push(i);
    }
    // Pop from the back, so reverse to walk neighbours in ascending order.
    for list in adj.values_mut() {
        list.reverse();
    }
    let mut used = vec![false; ends.len()];
    let mut stack = vec![root];
    let mut out = Vec::with_capacity(ends.len() + 1);
    while let Some(&v) = stack.last() {
        let next = adj.get_mut(&v).and_then(|list| {
            while let Some(i) = list.pop() {
                if !used[i] {
                    return Some(i);
                }
            }
            None
        });
        match next {
            Some(i) => {
                used[i] = true;
                let (a, b) = ends[i];
                stack.push(if a == v { b } else { a });
            }
            None => {
                out.push(v);
                stack.pop();
            }
        }
    }
    out.reverse();
    out
}

/// Double a tree's edges and shortcut the resulting Euler tour.
pub fn double_and_shortcut(tree_edges: &[Edge], root: usize) -> Cycle {
    let mut g = Multigraph::with_vertex(root);
    for &(a, b) in tree_edges {
        g.add_edge_times(a, b, 2);
    }
    eulerian_shortcut(&g, root).expect("a doubled tree is Eulerian")
}
