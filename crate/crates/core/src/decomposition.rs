//! Anchored-tree decompositions of PCTSP solutions.
//!
//! Vertices outside the anchor set `U` are eliminated one at a time by
//! complete splittings (smallest `y` first). What survives lives on `U`
//! and is trivially a sum of single-edge trees. The splittings are then
//! undone in reverse, rerouting tree weight through the restored vertex.

use serde::Serialize;

use crate::cuts::{held_karp_violation, HkViolation};
use crate::graph::{edge, is_spanning_tree, DisjointSets, Edge, EdgeWeights};
use crate::instance::{root_split_transform, Instance, RootSplitError};
use crate::lp::{LpSolution, Relaxation};
use crate::rational::Rational;
use crate::splitting::{complete_split, SplitError, SplitLog};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnchoredTree {
    /// Sorted, normalized.
    pub edges: Vec<Edge>,
    pub anchors: (usize, usize),
    pub weight: Rational,
}

impl AnchoredTree {
    pub fn vertices(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self.edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn contains(&self, v: usize) -> bool {
        self.edges.iter().any(|&(a, b)| a == v || b == v)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub n: usize,
    pub trees: Vec<AnchoredTree>,
    pub e0: Edge,
    /// Sorted anchor set.
    pub anchor_set: Vec<usize>,
    #[serde(skip)]
    pub x: EdgeWeights,
    #[serde(skip)]
    pub y: Vec<Rational>,
    /// Elimination logs in elimination order.
    pub logs: Vec<SplitLog>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecompositionError {
    #[error("vertex {0} is in U but has y < 1")]
    AnchorNotCore(usize),
    #[error("e0 = {{{0},{1}}} must join two anchors and carry weight at least 1")]
    NoE0(usize, usize),
    #[error("too many vertices ({0}) for the tree bitsets")]
    TooLarge(usize),
    #[error("edge {{{0},{1}}} survived elimination outside U")]
    Leftover(usize, usize),
    #[error("not enough tree weight to revert a splitting at {0}")]
    Shortfall(usize),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    RootSplit(#[from] RootSplitError),
}

#[derive(Clone, Debug)]
struct WorkTree {
    edges: Vec<Edge>,
    verts: u64,
    mu: Rational,
}

impl WorkTree {
    fn has(&self, v: usize) -> bool {
        self.verts >> v & 1 == 1
    }

    fn has_edge(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }
}

/// Pick trees in list order satisfying `pred` until their weight reaches
/// `need`; the last one is split so the chosen weight is exactly `need`.
fn take_exact(trees: &mut Vec<WorkTree>, need: &Rational, pred: impl Fn(&WorkTree) -> bool) -> Option<Vec<usize>> {
    let mut chosen = Vec::new();
    let mut acc = Rational::zero();
    for i in 0..trees.len() {
        if &acc >= need {
            break;
        }
        if pred(&trees[i]) {
            acc += &trees[i].mu;
            chosen.push(i);
        }
    }
    if &acc < need {
        return None;
    }
    let excess = &acc - need;
    if excess.is_positive() {
        let last = *chosen.last().expect("nonempty");
        let mut copy = trees[last].clone();
        copy.mu = excess.clone();
        trees[last].mu = &trees[last].mu - &excess;
        trees.push(copy);
    }
    Some(chosen)
}

/// Remove `e` from the tree and return the vertex set (bitset) of the
/// component containing `from`.
fn component_without(tree: &WorkTree, removed: Edge, from: usize) -> u64 {
    let mut seen = 1u64 << from;
    let mut stack = vec![from];
    while let Some(a) = stack.pop() {
        for &(p, q) in &tree.edges {
            if (p, q) == removed {
                continue;
            }
            let other = if p == a {
                q
            } else if q == a {
                p
            } else {
                continue;
            };
            if seen >> other & 1 == 0 {
                seen |= 1 << other;
                stack.push(other);
            }
        }
    }
    seen
}

fn replace_edge(tree: &mut WorkTree, old: Edge, new: &[Edge]) {
    let pos = tree.edges.iter().position(|&e| e == old).expect("edge present");
    tree.edges.swap_remove(pos);
    for &e in new {
        tree.edges.push(e);
        tree.verts |= 1 << e.0 | 1 << e.1;
    }
}

/// Decompose a feasible PCTSP point into anchored trees with anchor set
/// `U` and reserved edge `e0`.
pub fn decompose(sol: &LpSolution, anchor_set: &[usize], e0: Edge) -> Result<Decomposition, DecompositionError> {
    let n = sol.n();
    if n > 64 {
        return Err(DecompositionError::TooLarge(n));
    }
    let mut in_u = vec![false; n];
    for &u in anchor_set {
        if !sol.y[u].is_one() {
            return Err(DecompositionError::AnchorNotCore(u));
        }
        in_u[u] = true;
    }
    let e0 = edge(e0.0, e0.1);
    if e0.0 == e0.1 || !in_u[e0.0] || !in_u[e0.1] || sol.x.get(e0.0, e0.1) < &Rational::one() {
        return Err(DecompositionError::NoE0(e0.0, e0.1));
    }
    let mut order: Vec<usize> = (0..n).filter(|&v| !in_u[v]).collect();
    order.sort_by(|&a, &b| sol.y[a].cmp(&sol.y[b]).then(a.cmp(&b)));

    let mut g = sol.x.clone();
    let mut logs = Vec::with_capacity(order.len());
    for &s in &order {
        logs.push(complete_split(&mut g, s, &Rational::zero())?);
    }

    let mut trees: Vec<WorkTree> = Vec::new();
    for ((a, b), w) in g.support() {
        if !in_u[a] || !in_u[b] {
            return Err(DecompositionError::Leftover(a, b));
        }
        let mu = if (a, b) == e0 { w - Rational::one() } else { w };
        if mu.is_positive() {
            trees.push(WorkTree { edges: vec![(a, b)], verts: 1 << a | 1 << b, mu });
        }
    }

    for (k, &s) in order.iter().enumerate().rev() {
        let mut spare = vec![Rational::zero(); n];
        for op in logs[k].ops.iter().rev() {
            debug_assert!(!op.degenerate);
            let (u, v) = (op.u, op.w);
            let uv = edge(u, v);
            let chosen =
                take_exact(&mut trees, &op.delta, |t| t.has_edge(uv)).ok_or(DecompositionError::Shortfall(s))?;
            for i in chosen {
                let t = &mut trees[i];
                if !t.has(s) {
                    replace_edge(t, uv, &[edge(s, u), edge(s, v)]);
                } else {
                    let comp = component_without(t, uv, s);
                    if comp >> u & 1 == 1 {
                        replace_edge(t, uv, &[edge(s, v)]);
                        spare[u] += &t.mu;
                    } else {
                        replace_edge(t, uv, &[edge(s, u)]);
                        spare[v] += &t.mu;
                    }
                }
            }
        }
        for w in 0..n {
            if !spare[w].is_positive() {
                continue;
            }
            let need = spare[w].clone();
            let chosen = take_exact(&mut trees, &need, |t| t.has(w) && !t.has(s))
                .ok_or(DecompositionError::Shortfall(s))?;
            for i in chosen {
                let t = &mut trees[i];
                t.edges.push(edge(s, w));
                t.verts |= 1 << s;
            }
        }
    }

    let mut merged: Vec<AnchoredTree> = Vec::new();
    let mut index: std::collections::HashMap<Vec<Edge>, usize> = std::collections::HashMap::new();
    for t in trees {
        let mut edges = t.edges;
        edges.sort_unstable();
        if let Some(&i) = index.get(&edges) {
            merged[i].weight += &t.mu;
            continue;
        }
        let anchors: Vec<usize> = (0..n).filter(|&v| in_u[v] && t.verts >> v & 1 == 1).collect();
        if anchors.len() != 2 {
            return Err(DecompositionError::Invariant(format!("tree {edges:?} has anchors {anchors:?}")));
        }
        index.insert(edges.clone(), merged.len());
        merged.push(AnchoredTree { edges, anchors: (anchors[0], anchors[1]), weight: t.mu });
    }
    let mut anchor_set = anchor_set.to_vec();
    anchor_set.sort_unstable();
    anchor_set.dedup();
    Ok(Decomposition { n, trees: merged, e0, anchor_set, x: sol.x.clone(), y: sol.y.clone(), logs })
}

impl Decomposition {
    /// Check every structural property exactly.
    pub fn verify(&self) -> Result<(), String> {
        let n = self.n;
        let mut in_u = vec![false; n];
        for &u in &self.anchor_set {
            in_u[u] = true;
        }
        let mut sum = EdgeWeights::new(n);
        sum.add(self.e0.0, self.e0.1, &Rational::one());
        let mut cover = vec![Rational::zero(); n];
        for (i, t) in self.trees.iter().enumerate() {
            if !t.weight.is_positive() || t.weight > Rational::one() {
                return Err(format!("tree {i} has weight {}", t.weight));
            }
            let vs = t.vertices();
            if !is_spanning_tree(n, &vs, &t.edges) {
                return Err(format!("tree {i} is not a tree: {:?}", t.edges));
            }
            let anchors: Vec<usize> = vs.iter().copied().filter(|&v| in_u[v]).collect();
            if anchors != vec![t.anchors.0, t.anchors.1] {
                return Err(format!("tree {i} has anchors {anchors:?}"));
            }
            for &(a, b) in &t.edges {
                sum.add(a, b, &t.weight);
            }
            for v in vs {
                cover[v] += &t.weight;
            }
        }
        if sum != self.x {
            return Err("conic identity fails".into());
        }
        for v in 0..n {
            if !in_u[v] && cover[v] != self.y[v] {
                return Err(format!("vertex {v} covered {} but y = {}", cover[v], self.y[v]));
            }
        }
        let z = self.anchor_point();
        if let Some(viol) = held_karp_violation(n, &self.anchor_set, &z, self.e0.0) {
            return Err(format!("anchor point outside the Held-Karp polytope: {viol:?}"));
        }
        Ok(())
    }

    /// `z = sum_T mu_T chi(e_T) + chi(e0)` on the anchor multigraph.
    pub fn anchor_point(&self) -> Vec<(Edge, Rational)> {
        let mut z: Vec<(Edge, Rational)> =
            self.trees.iter().map(|t| (t.anchors, t.weight.clone())).collect();
        z.push((self.e0, Rational::one()));
        z
    }

    pub fn total_ops(&self) -> usize {
        self.logs.iter().map(|l| l.ops.len()).sum()
    }
}

pub fn held_karp_check(dec: &Decomposition) -> Option<HkViolation> {
    held_karp_violation(dec.n, &dec.anchor_set, &dec.anchor_point(), dec.e0.0)
}

/// Split a tree into its anchor-to-anchor path and the remaining edges.
pub fn backbone_limbs(tree: &AnchoredTree) -> (Vec<Edge>, Vec<Edge>) {
    let (s, t) = tree.anchors;
    let mut parent: std::collections::HashMap<usize, (usize, Edge)> = std::collections::HashMap::new();
    let mut stack = vec![s];
    parent.insert(s, (s, (s, s)));
    while let Some(a) = stack.pop() {
        for &e in &tree.edges {
            let other = if e.0 == a {
                e.1
            } else if e.1 == a {
                e.0
            } else {
                continue;
            };
            if let std::collections::hash_map::Entry::Vacant(slot) = parent.entry(other) {
                slot.insert((a, e));
                stack.push(other);
            }
        }
    }
    let mut backbone = Vec::new();
    let mut cur = t;
    while cur != s {
        let (p, e) = *parent.get(&cur).expect("anchors are connected");
        backbone.push(e);
        cur = p;
    }
    backbone.reverse();
    let limbs = tree.edges.iter().copied().filter(|e| !backbone.contains(e)).collect();
    (backbone, limbs)
}

/// Tree on the original vertex set: contains the root, weight `mu`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootedTree {
    pub edges: Vec<Edge>,
    pub weight: Rational,
}

impl RootedTree {
    pub fn vertices(&self, root: usize) -> Vec<usize> {
        let mut vs: Vec<usize> = self.edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        vs.push(root);
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

/// Trees containing the root with weights summing to 1 such that every
/// vertex `v` lies in trees of total weight `y_v`. Built by decomposing the
/// root-copy solution with `U = {r, r'}` and contracting `r'` back into `r`;
/// the cycle this closes is broken at its most expensive edge.
pub fn fractional_tree_partition(
    instance: &Instance,
    sol: &LpSolution,
) -> Result<Vec<RootedTree>, DecompositionError> {
    assert!(sol.relaxation == Relaxation::Pctsp, "tree partition needs a PCTSP point");
    let r = instance.root();
    let n = instance.n();
    if n == 1 || sol.x.support().is_empty() {
        return Ok(vec![RootedTree { edges: Vec::new(), weight: Rational::one() }]);
    }
    let (_, aux_sol, back) = root_split_transform(instance, sol)?;
    let dec = decompose(&aux_sol, &[r, back.copy], (r, back.copy))?;
    debug_assert_eq!(dec.verify(), Ok(()));
    let mut out = Vec::with_capacity(dec.trees.len());
    for t in &dec.trees {
        let mut mapped: Vec<Edge> = t
            .edges
            .iter()
            .map(|&(a, b)| {
                let a = if a == back.copy { r } else { a };
                let b = if b == back.copy { r } else { b };
                edge(a, b)
            })
            .filter(|&(a, b)| a != b)
            .collect();
        mapped.sort_by(|&(a, b), &(c, d)| instance.dist(a, b).cmp(instance.dist(c, d)).then((a, b).cmp(&(c, d))));
        let mut ds = DisjointSets::new(n);
        let mut edges: Vec<Edge> = mapped.into_iter().filter(|&(a, b)| ds.union(a, b)).collect();
        edges.sort_unstable();
        out.push(RootedTree { edges, weight: t.weight.clone() });
    }
    let mut merged: Vec<RootedTree> = Vec::new();
    for t in out {
        match merged.iter_mut().find(|m| m.edges == t.edges) {
            Some(m) => m.weight += &t.weight,
            None => merged.push(t),
        }
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn point(n: usize, edges: &[(usize, usize, Rational)]) -> LpSolution {
        let mut x = EdgeWeights::new(n);
        for (a, b, w) in edges {
            x.set(*a, *b, w.clone());
        }
        let half = Rational::new(1, 2);
        let y = (0..n).map(|v| if v == 0 { q(1) } else { x.degree(v) * &half }).collect();
        LpSolution { relaxation: Relaxation::Pctsp, root: 0, x, y, objective: q(0), certified_optimal: false }
    }

    #[test]
    fn hamiltonian_cycle_all_anchors() {
        let sol = point(4, &[(0, 1, q(1)), (1, 2, q(1)), (2, 3, q(1)), (3, 0, q(1))]);
        let dec = decompose(&sol, &[0, 1, 2, 3], (0, 1)).unwrap();
        assert_eq!(dec.trees.len(), 3);
        assert!(dec.trees.iter().all(|t| t.edges.len() == 1 && t.weight == q(1)));
        dec.verify().unwrap();
    }

    #[test]
    fn interior_vertices() {
        // Anchors 0,1 joined by e0 of weight 1, plus two half-weight paths
        // through vertices 2 and 3.
        let h = Rational::new(1, 2);
        let sol = point(4, &[(0, 1, q(1)), (0, 2, h.clone()), (2, 1, h.clone()), (0, 3, h.clone()), (3, 1, h.clone()), (2, 3, h.clone())]);
        let dec = decompose(&sol, &[0, 1], (0, 1)).unwrap();
        dec.verify().unwrap();
        let total: Rational = dec.trees.iter().map(|t| t.weight.clone()).sum();
        assert_eq!(total, q(1));
    }

    #[test]
    fn backbone_of_star() {
        let t = AnchoredTree { edges: vec![(0, 3), (1, 3), (2, 3)], anchors: (0, 1), weight: q(1) };
        let (bb, limbs) = backbone_limbs(&t);
        assert_eq!(bb, vec![(0, 3), (1, 3)]);
        assert_eq!(limbs, vec![(2, 3)]);
    }
}
