//! Exact solvers and brute-force verifiers for small instances.

use std::collections::HashMap;

use serde::Serialize;

use crate::graph::{DisjointSets, Edge};
use crate::instance::{Instance, InstanceKind};
use crate::rational::Rational;
use crate::tour::Cycle;

pub const PCTSP_LIMIT: usize = 16;
pub const PCST_LIMIT: usize = 18;
pub const MATCHING_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large for oracle ({n} > {limit})")]
    TooLarge { n: usize, limit: usize },
    #[error("odd number of points ({0})")]
    OddCardinality(usize),
    #[error("oracle needs a metric-complete instance")]
    NotMetric,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    Cycle(Cycle),
    Tree(Vec<Edge>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactResult {
    pub value: Rational,
    pub witness: Witness,
}

/// Held–Karp DP over subsets containing the root, plus penalties of the rest.
pub fn exact_pctsp(instance: &Instance) -> Result<ExactResult, OracleError> {
    let n = instance.n();
    if n > PCTSP_LIMIT {
        return Err(OracleError::TooLarge { n, limit: PCTSP_LIMIT });
    }
    if instance.kind() != InstanceKind::MetricComplete {
        return Err(OracleError::NotMetric);
    }
    let r = instance.root();
    let others: Vec<usize> = (0..n).filter(|&v| v != r).collect();
    let k = others.len();
    let d = |a: usize, b: usize| instance.dist(a, b);
    // dp[mask * k + j]: shortest root path through `mask`, ending at others[j].
    let mut dp: Vec<Option<Rational>> = vec![None; (1usize << k) * k.max(1)];
    let mut pred = vec![usize::MAX; dp.len()];
    for j in 0..k {
        dp[(1 << j) * k + j] = Some(d(r, others[j]).clone());
    }
    for mask in 1usize..(1 << k) {
        for j in 0..k {
            if mask >> j & 1 == 0 {
                continue;
            }
            let Some(base) = dp[mask * k + j].clone() else { continue };
            for l in 0..k {
                if mask >> l & 1 == 1 {
                    continue;
                }
                let next = mask | 1 << l;
                let cand = &base + d(others[j], others[l]);
                let slot = &mut dp[next * k + l];
                if slot.as_ref().is_none_or(|c| cand < *c) {
                    *slot = Some(cand);
                    pred[next * k + l] = j;
                }
            }
        }
    }
    let total_penalty: Rational = instance.total_penalty();
    let mut best = total_penalty.clone();
    let mut best_at: Option<(usize, usize)> = None;
    for mask in 1usize..(1 << k) {
        let kept: Rational = (0..k).filter(|&j| mask >> j & 1 == 1).map(|j| instance.penalty(others[j]).clone()).sum();
        let missed = &total_penalty - &kept;
        for j in 0..k {
            if let Some(path) = &dp[mask * k + j] {
                let val = path + d(others[j], r) + &missed;
                if val < best {
                    best = val;
                    best_at = Some((mask, j));
                }
            }
        }
    }
    let mut order = Vec::new();
    if let Some((mut mask, mut j)) = best_at {
        while mask != 0 {
            order.push(others[j]);
            let p = pred[mask * k + j];
            mask &= !(1 << j);
            j = p;
        }
    }
    order.push(r);
    order.reverse();
    Ok(ExactResult { value: best, witness: Witness::Cycle(Cycle { order }) })
}

/// Minimum over connected vertex sets `S ∋ r` of `MST(G[S]) + pi(V - S)`.
pub fn exact_pcst(instance: &Instance) -> Result<ExactResult, OracleError> {
    exact_pcst_ordered(instance, false)
}

/// Same optimum with subsets visited in reverse order.
pub fn exact_pcst_reversed(instance: &Instance) -> Result<ExactResult, OracleError> {
    exact_pcst_ordered(instance, true)
}

fn exact_pcst_ordered(instance: &Instance, reverse: bool) -> Result<ExactResult, OracleError> {
    let n = instance.n();
    if n > PCST_LIMIT {
        return Err(OracleError::TooLarge { n, limit: PCST_LIMIT });
    }
    let r = instance.root();
    let others: Vec<usize> = (0..n).filter(|&v| v != r).collect();
    let k = others.len();
    let mut edges: Vec<Edge> = instance.edges();
    edges.sort_by(|&(a, b), &(c, e)| instance.dist(a, b).cmp(instance.dist(c, e)).then((a, b).cmp(&(c, e))));
    let mut best: Option<(Rational, Vec<Edge>)> = None;
    let masks: Box<dyn Iterator<Item = usize>> =
        if reverse { Box::new((0..1usize << k).rev()) } else { Box::new(0..1usize << k) };
    for mask in masks {
        let mut inside = vec![false; n];
        inside[r] = true;
        for j in 0..k {
            inside[others[j]] = mask >> j & 1 == 1;
        }
        let Some((cost, tree)) = induced_mst(instance, &edges, &inside) else { continue };
        let missed: Rational = (0..n).filter(|&v| !inside[v]).map(|v| instance.penalty(v).clone()).sum();
        let val = cost + missed;
        if best.as_ref().is_none_or(|(b, _)| val < *b) {
            best = Some((val, tree));
        }
    }
    let (value, tree) = best.expect("the root alone is feasible");
    Ok(ExactResult { value, witness: Witness::Tree(tree) })
}

/// Kruskal on the edges inside `inside`; `None` if they do not connect it.
/// `edges` must be sorted by length.
pub fn induced_mst(instance: &Instance, edges: &[Edge], inside: &[bool]) -> Option<(Rational, Vec<Edge>)> {
    let n = inside.len();
    let mut ds = DisjointSets::new(n);
    let mut cost = Rational::zero();
    let mut tree = Vec::new();
    for &(a, b) in edges {
        if inside[a] && inside[b] && ds.union(a, b) {
            cost += instance.dist(a, b);
            tree.push((a, b));
        }
    }
    let count = inside.iter().filter(|&&b| b).count();
    (tree.len() + 1 == count).then(|| {
        tree.sort_unstable();
        (cost, tree)
    })
}

/// Minimum perfect matching cost by memoized recursion on the unmatched set.
pub fn exact_matching(points: &[usize], metric: &Instance) -> Result<Rational, OracleError> {
    let k = points.len();
    if k % 2 == 1 {
        return Err(OracleError::OddCardinality(k));
    }
    if k > MATCHING_LIMIT {
        return Err(OracleError::TooLarge { n: k, limit: MATCHING_LIMIT });
    }
    fn go(mask: u32, points: &[usize], metric: &Instance, memo: &mut HashMap<u32, Rational>) -> Rational {
        if mask == 0 {
            return Rational::zero();
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut best: Option<Rational> = None;
        for j in 0..points.len() {
            if rest >> j & 1 == 1 {
                let cand = metric.dist(points[i], points[j]) + &go(rest & !(1 << j), points, metric, memo);
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
        }
        let best = best.expect("even cardinality");
        memo.insert(mask, best.clone());
        best
    }
    let full = if k == 0 { 0 } else { u32::MAX >> (32 - k) };
    Ok(go(full, points, metric, &mut HashMap::new()))
}

/// Held–Karp membership by enumerating every vertex subset (`n <= 20`).
/// Returns whether `z` lies in `P_HK` on `vertices`.
pub fn held_karp_member_enumerated(vertices: &[usize], z: &[(Edge, Rational)]) -> bool {
    let k = vertices.len();
    assert!(k <= 20, "enumeration limited to 20 vertices");
    let pos: HashMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut w = vec![Rational::zero(); k * k];
    for ((a, b), x) in z {
        let (i, j) = (pos[a], pos[b]);
        w[i * k + j] += x;
        w[j * k + i] += x;
    }
    let two = Rational::from_integer(2);
    for i in 0..k {
        let d: Rational = (0..k).map(|j| w[i * k + j].clone()).sum();
        if d != two {
            return false;
        }
    }
    if k <= 2 {
        return true;
    }
    // Every proper nonempty subset, up to complement (fix vertex 0 outside).
    for mask in 1usize..(1 << (k - 1)) {
        let side = mask << 1;
        let mut cut = Rational::zero();
        for i in 0..k {
            for j in 0..k {
                if side >> i & 1 == 1 && side >> j & 1 == 0 {
                    cut += &w[i * k + j];
                }
            }
        }
        if cut < two {
            return false;
        }
    }
    true
}

/// Inclusion-minimal tight set containing edge `e` by subset enumeration;
/// `None` when `z` violates a spanning tree polytope constraint.
pub fn minimal_tight_set_enumerated(k: usize, edges: &[Edge], z: &[Rational], e: usize) -> Option<Vec<usize>> {
    assert!(k <= 20, "enumeration limited to 20 vertices");
    let inner = |mask: usize| -> Rational {
        edges
            .iter()
            .zip(z)
            .filter(|(&(a, b), _)| mask >> a & 1 == 1 && mask >> b & 1 == 1)
            .map(|(_, w)| w.clone())
            .sum()
    };
    let (a, b) = edges[e];
    // Tight sets sharing a vertex are closed under intersection, so the
    // minimal one is the intersection of all of them.
    let mut acc: Option<usize> = None;
    for mask in 1usize..(1 << k) {
        let size = mask.count_ones() as i64;
        let val = inner(mask);
        if val > Rational::from_integer(size - 1) {
            return None;
        }
        if mask >> a & 1 == 1 && mask >> b & 1 == 1 && val == Rational::from_integer(size - 1) {
            acc = Some(acc.map_or(mask, |m| m & mask));
        }
    }
    acc.map(|m| (0..k).filter(|&v| m >> v & 1 == 1).collect())
}

/// Tree length plus penalties of the vertices it misses.
pub fn tree_objective(instance: &Instance, tree: &[Edge]) -> Rational {
    let n = instance.n();
    let mut inside = vec![false; n];
    inside[instance.root()] = true;
    let mut cost = Rational::zero();
    for &(a, b) in tree {
        inside[a] = true;
        inside[b] = true;
        cost += instance.dist(a, b);
    }
    cost + (0..n).filter(|&v| !inside[v]).map(|v| instance.penalty(v).clone()).sum::<Rational>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::InstanceKind;
    use crate::tour::objective;

    fn triangle(p: Rational) -> Instance {
        let one = Some(Rational::one());
        let zero = Some(Rational::zero());
        let dist = vec![
            zero.clone(), one.clone(), one.clone(),
            one.clone(), zero.clone(), one.clone(),
            one.clone(), one, zero,
        ];
        Instance::new("tri", vec![1, 2, 3], 1, dist, vec![Rational::zero(), p.clone(), p], InstanceKind::MetricComplete)
            .unwrap()
    }

    #[test]
    fn triangle_cases() {
        let big = exact_pctsp(&triangle(Rational::from_integer(10))).unwrap();
        assert_eq!(big.value, Rational::from_integer(3));
        let small = exact_pctsp(&triangle(Rational::new(2, 5))).unwrap();
        assert_eq!(small.value, Rational::new(4, 5));
        let Witness::Cycle(c) = small.witness else { panic!() };
        assert_eq!(c.order, vec![0]);
        let Witness::Cycle(c) = big.witness else { panic!() };
        assert_eq!(objective(&triangle(Rational::from_integer(10)), &c).unwrap(), Rational::from_integer(3));
    }

    #[test]
    fn single_vertex() {
        let inst = Instance::new("one", vec![7], 7, vec![Some(Rational::zero())], vec![Rational::zero()], InstanceKind::MetricComplete)
            .unwrap();
        assert_eq!(exact_pctsp(&inst).unwrap().value, Rational::zero());
        assert_eq!(exact_pcst(&inst).unwrap().value, Rational::zero());
    }

    #[test]
    fn tight_set_triangle() {
        let edges = [(0, 1), (1, 2), (0, 2)];
        let z = [Rational::new(1, 2), Rational::new(1, 2), Rational::one()];
        assert_eq!(minimal_tight_set_enumerated(3, &edges, &z, 0), Some(vec![0, 1, 2]));
    }
}
