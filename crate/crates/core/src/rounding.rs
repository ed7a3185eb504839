//! Walk families built from an anchored-tree decomposition, and pipage
//! rounding in the spanning tree polytope of the anchor multigraph.
//!
//! Tight sets `z(E[S]) = |S| - 1` are found with one min cut each: for a
//! vertex set `S`, `|S| - 1 - z(E[S]) = z(delta(S))/2 + sum_{v in S}(1 - d_v/2) - 1`,
//! which is a cut function in a network with node weights on source/sink arcs.

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::cuts::{held_karp_violation, max_flow_dense};
use crate::decomposition::{backbone_limbs, Decomposition};
use crate::graph::{DisjointSets, Edge};
use crate::instance::Instance;
use crate::rational::Rational;
use crate::tour::Multigraph;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RoundingError {
    #[error("point is outside the spanning tree polytope: {0}")]
    OutsidePolytope(String),
    #[error("edge {0} is already integral")]
    Integral(usize),
    #[error("pipage did not finish within {0} steps")]
    IterationLimit(usize),
    #[error("walk family invariant broken: {0}")]
    Invariant(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkVariant {
    BackboneOnly,
    DoubledLimbs,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Walk {
    /// Edge multiset; limb edges appear twice in the doubled variant.
    pub edges: Vec<Edge>,
    pub endpoints: Edge,
    pub nu: Rational,
    pub tree: usize,
    pub variant: WalkVariant,
    pub cost: Rational,
    /// Sorted, without repetition.
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkFamily {
    pub n: usize,
    pub anchors: Vec<usize>,
    pub e0: Edge,
    pub walks: Vec<Walk>,
}

impl WalkFamily {
    /// Anchor multigraph without `e0`, in local anchor indices: one edge per walk.
    pub fn base_graph(&self) -> (usize, Vec<Edge>) {
        let edges = self.walks.iter().map(|w| (self.local(w.endpoints.0), self.local(w.endpoints.1))).collect();
        (self.anchors.len(), edges)
    }

    pub fn z0(&self) -> Vec<Rational> {
        self.walks.iter().map(|w| w.nu.clone()).collect()
    }

    fn local(&self, v: usize) -> usize {
        self.anchors.binary_search(&v).expect("walk endpoint is an anchor")
    }

    pub fn is_anchor(&self, v: usize) -> bool {
        self.anchors.binary_search(&v).is_ok()
    }

    /// `sum_W nu_W c(W)`, equal to `sum_T mu_T (c(bb) + 3/2 c(lb))`.
    pub fn expected_walk_cost(&self) -> Rational {
        self.walks.iter().map(|w| &w.nu * &w.cost).sum()
    }

    /// Right-hand side of the walk-sampling bound for the point `y`:
    /// expected walk cost plus `pi_v exp(-3 y_v / 4)` over non-anchors.
    pub fn walk_bound(&self, penalties: &[Rational], y: &[Rational]) -> f64 {
        let mut b = self.expected_walk_cost().to_f64();
        for v in 0..self.n {
            if !self.is_anchor(v) {
                b += penalties[v].to_f64() * (-0.75 * y[v].to_f64()).exp();
            }
        }
        b
    }

    /// Penalty of non-anchor vertices on no walk at all; `g` leaves these out.
    pub fn uncovered_penalty(&self, penalties: &[Rational]) -> Rational {
        let mut covered = vec![false; self.n];
        for w in &self.walks {
            for &v in &w.vertices {
                covered[v] = true;
            }
        }
        (0..self.n).filter(|&v| !covered[v] && !self.is_anchor(v)).map(|v| penalties[v].clone()).sum()
    }
}

/// Two walks per tree: the backbone plus doubled limbs with weight
/// `3/4 mu`, and the bare backbone with weight `1/4 mu`.
pub fn build_walk_family(dec: &Decomposition, metric: &Instance) -> Result<WalkFamily, RoundingError> {
    let three_quarters = Rational::new(3, 4);
    let quarter = Rational::new(1, 4);
    let cost_of = |edges: &[Edge]| -> Rational { edges.iter().map(|&(a, b)| metric.dist(a, b).clone()).sum() };
    let mut walks = Vec::with_capacity(2 * dec.trees.len());
    for (i, t) in dec.trees.iter().enumerate() {
        let (bb, lb) = backbone_limbs(t);
        let mut doubled = bb.clone();
        doubled.extend(lb.iter().copied());
        doubled.extend(lb.iter().copied());
        for (edges, nu, variant) in [
            (doubled, &t.weight * &three_quarters, WalkVariant::DoubledLimbs),
            (bb, &t.weight * &quarter, WalkVariant::BackboneOnly),
        ] {
            let mut vertices: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
            vertices.extend([t.anchors.0, t.anchors.1]);
            vertices.sort_unstable();
            vertices.dedup();
            let walk = Walk { cost: cost_of(&edges), vertices, edges, endpoints: t.anchors, nu, tree: i, variant };
            check_walk_parity(&walk)?;
            walks.push(walk);
        }
    }
    let fam = WalkFamily { n: dec.n, anchors: dec.anchor_set.clone(), e0: dec.e0, walks };
    let mut point: Vec<(Edge, Rational)> = fam.walks.iter().map(|w| (w.endpoints, w.nu.clone())).collect();
    point.push((fam.e0, Rational::one()));
    if let Some(v) = held_karp_violation(fam.n, &fam.anchors, &point, fam.e0.0) {
        return Err(RoundingError::OutsidePolytope(format!("z0 + e0 not in P_HK: {v:?}")));
    }
    Ok(fam)
}

fn check_walk_parity(w: &Walk) -> Result<(), RoundingError> {
    let mut g = Multigraph::new();
    g.add_vertex(w.endpoints.0);
    g.add_vertex(w.endpoints.1);
    for &(a, b) in &w.edges {
        g.add_edge(a, b);
    }
    let odd = g.odd_vertices();
    let (s, t) = w.endpoints;
    let expect: Vec<usize> = if s == t { vec![] } else { vec![s.min(t), s.max(t)] };
    if odd != expect || !g.is_connected() {
        return Err(RoundingError::Invariant(format!("walk of tree {} is not an {s}-{t} walk", w.tree)));
    }
    Ok(())
}

/// Slack computations for the spanning tree polytope of a multigraph.
struct Slack {
    k: usize,
    agg: Vec<Rational>,
    deg: Vec<Rational>,
    big: Rational,
}

impl Slack {
    fn new(k: usize, edges: &[Edge], z: &[Rational]) -> Self {
        let mut agg = vec![Rational::zero(); k * k];
        let mut deg = vec![Rational::zero(); k];
        let mut total = Rational::zero();
        for (&(a, b), w) in edges.iter().zip(z) {
            agg[a * k + b] += w;
            agg[b * k + a] += w;
            deg[a] += w;
            deg[b] += w;
            total += w;
        }
        let big = total + Rational::from_integer(k as i64 + 1);
        Slack { k, agg, deg, big }
    }

    /// `min { |S| - 1 - z(E[S]) : forced_in ⊆ S, S ∩ forced_out = ∅ }` and the
    /// inclusion-minimal minimizer.
    fn min_slack(&self, forced_in: &[usize], forced_out: &[usize]) -> (Rational, Vec<bool>) {
        let k = self.k;
        let m = k + 2;
        let (s, t) = (k, k + 1);
        let half = Rational::new(1, 2);
        let mut cap = vec![Rational::zero(); m * m];
        for a in 0..k {
            for b in 0..k {
                if a != b && self.agg[a * k + b].is_positive() {
                    cap[a * m + b] = &self.agg[a * k + b] * &half;
                }
            }
        }
        let mut offset = Rational::from_integer(-1);
        for v in 0..k {
            let p = Rational::one() - &self.deg[v] * &half;
            if p.is_negative() {
                cap[s * m + v] = -&p;
                offset += &p;
            } else {
                cap[v * m + t] = p;
            }
        }
        for &v in forced_in {
            cap[s * m + v] = &cap[s * m + v] + &self.big;
        }
        for &v in forced_out {
            cap[v * m + t] = &cap[v * m + t] + &self.big;
        }
        let cut = max_flow_dense(m, &cap, s, t);
        (cut.value + offset, cut.side[..k].to_vec())
    }
}

/// Check `z` against the spanning tree polytope of `(k, edges)`.
pub fn spanning_tree_violation(k: usize, edges: &[Edge], z: &[Rational]) -> Option<String> {
    if edges.len() != z.len() {
        return Some("index mismatch".into());
    }
    for (i, w) in z.iter().enumerate() {
        if w.is_negative() || w > &Rational::one() {
            return Some(format!("z[{i}] = {w} outside [0, 1]"));
        }
        if edges[i].0 == edges[i].1 || edges[i].0 >= k || edges[i].1 >= k {
            return Some(format!("bad edge {:?}", edges[i]));
        }
    }
    let total: Rational = z.iter().sum();
    if total != Rational::from_integer(k as i64 - 1) {
        return Some(format!("z(E) = {total}, expected {}", k - 1));
    }
    let slack = Slack::new(k, edges, z);
    for v in 0..k {
        let (val, side) = slack.min_slack(&[v], &[]);
        if val.is_negative() {
            let set: Vec<usize> = (0..k).filter(|&u| side[u]).collect();
            return Some(format!("set {set:?} has slack {val}"));
        }
    }
    None
}

/// Inclusion-minimal tight set containing both endpoints of edge `e`.
pub fn minimal_tight_set(k: usize, edges: &[Edge], z: &[Rational], e: usize) -> Result<Vec<usize>, RoundingError> {
    if z[e].is_integer() {
        return Err(RoundingError::Integral(e));
    }
    let slack = Slack::new(k, edges, z);
    let (val, side) = slack.min_slack(&[edges[e].0, edges[e].1], &[]);
    if !val.is_zero() {
        return Err(RoundingError::OutsidePolytope(format!("minimum slack {val} around edge {e}")));
    }
    Ok((0..k).filter(|&v| side[v]).collect())
}

/// A function on the polytope that is concave along every `e_i - e_j`.
pub trait SwapObjective {
    fn value_f64(&self, z: &[Rational]) -> f64;
    fn value_exact(&self, z: &[Rational]) -> Rational;
}

pub enum PipageMode<'a> {
    Randomized(&'a mut dyn RngCore),
    Deterministic(&'a dyn SwapObjective),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipageOutcome {
    /// Indices of the selected edges, ascending.
    pub tree: Vec<usize>,
    pub steps: usize,
}

/// Largest `t` with `z + t (chi_e - chi_f)` still in the polytope.
fn max_step(slack: &Slack, edges: &[Edge], z: &[Rational], e: usize, f: usize) -> Rational {
    let mut t = Rational::min_of(&(Rational::one() - &z[e]), &z[f]);
    let (a, b) = edges[e];
    let (c, d) = edges[f];
    if (a, b) == (c, d) || (a, b) == (d, c) {
        return t;
    }
    for out in [c, d] {
        if out == a || out == b {
            continue;
        }
        let (val, _) = slack.min_slack(&[a, b], &[out]);
        if val < t {
            t = val;
        }
    }
    t
}

/// First pair of parallel fractional edges, if any.
fn parallel_pair(edges: &[Edge], frac: &[usize]) -> Option<(usize, usize)> {
    let mut seen: std::collections::HashMap<Edge, usize> = std::collections::HashMap::new();
    for &i in frac {
        let (a, b) = edges[i];
        let key = (a.min(b), a.max(b));
        if let Some(&j) = seen.get(&key) {
            return Some((j, i));
        }
        seen.insert(key, i);
    }
    None
}

/// Round `z` to a spanning tree by pipage steps along `chi_e - chi_f`, where
/// `e` and `f` share an inclusion-minimal tight set.
pub fn pipage_round(
    k: usize,
    edges: &[Edge],
    z: &[Rational],
    mut mode: PipageMode<'_>,
) -> Result<PipageOutcome, RoundingError> {
    if let Some(msg) = spanning_tree_violation(k, edges, z) {
        return Err(RoundingError::OutsidePolytope(msg));
    }
    let m = edges.len();
    let limit = 8 * m * (k + 1) + 64;
    let mut z = z.to_vec();
    let mut steps = 0;
    loop {
        let frac: Vec<usize> = (0..m).filter(|&i| !z[i].is_integer()).collect();
        if frac.is_empty() {
            break;
        }
        if steps >= limit {
            return Err(RoundingError::IterationLimit(limit));
        }
        let slack = Slack::new(k, edges, &z);
        let (e, f) = match parallel_pair(edges, &frac) {
            Some(p) => p,
            None => {
                let mut best: Option<(usize, usize, Vec<bool>)> = None;
                for &i in &frac {
                    let (val, side) = slack.min_slack(&[edges[i].0, edges[i].1], &[]);
                    if !val.is_zero() {
                        return Err(RoundingError::Invariant(format!("minimum slack {val} at step {steps}")));
                    }
                    let size = side.iter().filter(|&&b| b).count();
                    if best.as_ref().is_none_or(|b| size < b.0) {
                        best = Some((size, i, side));
                    }
                }
                let (_, e, side) = best.expect("fractional edges exist");
                let f = frac
                    .iter()
                    .copied()
                    .find(|&j| j != e && side[edges[j].0] && side[edges[j].1])
                    .ok_or_else(|| RoundingError::Invariant(format!("tight set of edge {e} has no partner")))?;
                (e, f)
            }
        };
        let up = max_step(&slack, edges, &z, e, f);
        let down = max_step(&slack, edges, &z, f, e);
        if !up.is_positive() || !down.is_positive() {
            return Err(RoundingError::Invariant(format!("zero step between edges {e} and {f}")));
        }
        let total = &up + &down;
        let p_up = &down / &total;
        // The two outcomes average back to z: p_up * up = (1 - p_up) * down.
        debug_assert_eq!(&p_up * &up, (Rational::one() - &p_up) * &down);
        let shifted = |t: &Rational| {
            let mut w = z.clone();
            w[e] = &w[e] + t;
            w[f] = &w[f] - t;
            w
        };
        let z_up = shifted(&up);
        let z_down = shifted(&-&down);
        z = match &mut mode {
            PipageMode::Randomized(rng) => {
                if rng.gen::<f64>() < p_up.to_f64() {
                    z_up
                } else {
                    z_down
                }
            }
            PipageMode::Deterministic(g) => {
                let (gu, gd) = (g.value_f64(&z_up), g.value_f64(&z_down));
                let scale = 1f64.max(gu.abs()).max(gd.abs());
                let pick_up = if (gu - gd).abs() <= 1e-12 * scale {
                    g.value_exact(&z_up) <= g.value_exact(&z_down)
                } else {
                    gu < gd
                };
                let before = g.value_f64(&z);
                let after = if pick_up { gu } else { gd };
                if after > before + 1e-9 * scale {
                    return Err(RoundingError::Invariant(format!("objective rose from {before} to {after}")));
                }
                if pick_up {
                    z_up
                } else {
                    z_down
                }
            }
        };
        steps += 1;
    }
    let tree: Vec<usize> = (0..m).filter(|&i| z[i].is_one()).collect();
    let mut ds = DisjointSets::new(k);
    let acyclic = tree.iter().all(|&i| ds.union(edges[i].0, edges[i].1));
    if tree.len() + 1 != k.max(1) || !acyclic {
        return Err(RoundingError::Invariant("pipage result is not a spanning tree".into()));
    }
    Ok(PipageOutcome { tree, steps })
}

/// `g(z) = sum_W c(W) z_W + sum_v pi_v prod_{W ∋ v} (1 - z_W)`, the second sum
/// over non-anchor vertices that lie on at least one walk.
pub struct WalkObjective<'a> {
    fam: &'a WalkFamily,
    terms: Vec<(Rational, Vec<usize>)>,
}

impl<'a> WalkObjective<'a> {
    pub fn new(fam: &'a WalkFamily, penalties: &[Rational]) -> Self {
        let mut on: Vec<Vec<usize>> = vec![Vec::new(); fam.n];
        for (i, w) in fam.walks.iter().enumerate() {
            for &v in &w.vertices {
                on[v].push(i);
            }
        }
        let terms = on
            .into_iter()
            .enumerate()
            .filter(|(v, ws)| !fam.is_anchor(*v) && !ws.is_empty())
            .map(|(v, ws)| (penalties[v].clone(), ws))
            .collect();
        WalkObjective { fam, terms }
    }
}

impl SwapObjective for WalkObjective<'_> {
    fn value_f64(&self, z: &[Rational]) -> f64 {
        let zf: Vec<f64> = z.iter().map(Rational::to_f64).collect();
        let mut g: f64 = self.fam.walks.iter().zip(&zf).map(|(w, x)| w.cost.to_f64() * x).sum();
        for (pi, ws) in &self.terms {
            g += pi.to_f64() * ws.iter().map(|&i| 1.0 - zf[i]).product::<f64>();
        }
        g
    }

    fn value_exact(&self, z: &[Rational]) -> Rational {
        let mut g: Rational = self.fam.walks.iter().zip(z).map(|(w, x)| &w.cost * x).sum();
        for (pi, ws) in &self.terms {
            let mut prod = pi.clone();
            for &i in ws {
                prod = prod * (Rational::one() - &z[i]);
            }
            g += prod;
        }
        g
    }
}

pub fn walk_objective_g(z: &[Rational], fam: &WalkFamily, penalties: &[Rational]) -> Result<f64, RoundingError> {
    if z.len() != fam.walks.len() {
        return Err(RoundingError::Invariant(format!("{} weights for {} walks", z.len(), fam.walks.len())));
    }
    Ok(WalkObjective::new(fam, penalties).value_f64(z))
}

pub enum SelectMode<'a> {
    Randomized(&'a mut dyn RngCore),
    Deterministic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkSelection {
    pub chosen: Vec<usize>,
    pub h: Multigraph,
    pub steps: usize,
}

/// Pipage-round `z0` on the anchor multigraph and take the union of the
/// selected walks.
pub fn select_walks(
    fam: &WalkFamily,
    penalties: &[Rational],
    mode: SelectMode<'_>,
) -> Result<WalkSelection, RoundingError> {
    let (k, edges) = fam.base_graph();
    let z0 = fam.z0();
    let g = WalkObjective::new(fam, penalties);
    let out = match mode {
        SelectMode::Randomized(rng) => pipage_round(k, &edges, &z0, PipageMode::Randomized(rng))?,
        SelectMode::Deterministic => pipage_round(k, &edges, &z0, PipageMode::Deterministic(&g))?,
    };
    let mut h = Multigraph::new();
    for &a in &fam.anchors {
        h.add_vertex(a);
    }
    for &i in &out.tree {
        for &(a, b) in &fam.walks[i].edges {
            h.add_edge(a, b);
        }
    }
    if let Some(v) = h.odd_vertices().into_iter().find(|&v| !fam.is_anchor(v)) {
        return Err(RoundingError::Invariant(format!("odd degree at non-anchor {v}")));
    }
    if !h.is_connected() {
        return Err(RoundingError::Invariant("selected walks are disconnected".into()));
    }
    Ok(WalkSelection { chosen: out.tree, h, steps: out.steps })
}
