//! Dense symmetric edge weights and small graph helpers.

use crate::rational::Rational;

/// Unordered vertex pair, stored with `0 <= 1`.
pub type Edge = (usize, usize);

pub fn edge(u: usize, v: usize) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Symmetric `n x n` matrix of nonnegative rationals with a zero diagonal.
///
/// Used both for LP solutions (`x_e`) and as the capacity graph that the
/// splitting and cut routines operate on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeWeights {
    n: usize,
    w: Vec<Rational>,
}

pub type CapacityGraph = EdgeWeights;

impl EdgeWeights {
    pub fn new(n: usize) -> Self {
        EdgeWeights { n, w: vec![Rational::zero(); n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> &Rational {
        &self.w[u * self.n + v]
    }

    pub fn set(&mut self, u: usize, v: usize, val: Rational) {
        assert!(u != v, "self-loop {u}");
        self.w[u * self.n + v] = val.clone();
        self.w[v * self.n + u] = val;
    }

    pub fn add(&mut self, u: usize, v: usize, val: &Rational) {
        let cur = self.get(u, v) + val;
        self.set(u, v, cur);
    }

    pub fn degree(&self, v: usize) -> Rational {
        self.w[v * self.n..(v + 1) * self.n].iter().sum()
    }

    /// Weight crossing the cut `(S, V - S)`, `side[v]` marking `S`.
    pub fn cut_value(&self, side: &[bool]) -> Rational {
        let mut acc = Rational::zero();
        for u in 0..self.n {
            if !side[u] {
                continue;
            }
            for v in 0..self.n {
                if !side[v] {
                    acc += self.get(u, v);
                }
            }
        }
        acc
    }

    /// Positive-weight edges in lexicographic order.
    pub fn support(&self) -> Vec<(Edge, Rational)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                let w = self.get(u, v);
                if !w.is_zero() {
                    out.push(((u, v), w.clone()));
                }
            }
        }
        out
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| u != v && !self.get(v, u).is_zero()).collect()
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        EdgeWeights { n: self.n, w: self.w.iter().map(|x| x * factor).collect() }
    }

    /// `sum_e c_e w_e` for a symmetric cost lookup.
    pub fn dot(&self, cost: impl Fn(usize, usize) -> Rational) -> Rational {
        self.support().iter().map(|((u, v), w)| &cost(*u, *v) * w).sum()
    }

    /// Copy with one extra isolated vertex appended.
    pub fn with_extra_vertex(&self) -> Self {
        let mut out = EdgeWeights::new(self.n + 1);
        for ((u, v), w) in self.support() {
            out.set(u, v, w);
        }
        out
    }
}

/// Union-find over `0..n`.
#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Whether the multigraph on `vertices` with the given edges is connected.
pub fn is_connected(n: usize, vertices: &[usize], edges: &[Edge]) -> bool {
    if vertices.len() <= 1 {
        return true;
    }
    let mut ds = DisjointSets::new(n);
    for &(u, v) in edges {
        ds.union(u, v);
    }
    let r = ds.find(vertices[0]);
    vertices.iter().all(|&v| ds.find(v) == r)
}

/// Whether the edge set is a spanning tree of `vertices`.
pub fn is_spanning_tree(n: usize, vertices: &[usize], edges: &[Edge]) -> bool {
    if edges.len() + 1 != vertices.len() {
        return false;
    }
    let mut inside = vec![false; n];
    for &v in vertices {
        inside[v] = true;
    }
    if edges.iter().any(|&(u, v)| !inside[u] || !inside[v] || u == v) {
        return false;
    }
    is_connected(n, vertices, edges)
}
