//! Weighted splitting-off and LP-solution boosting.
//!
//! A splitting `(e, f, delta)` at `v` with `e = {v,u}`, `f = {v,w}` lowers
//! both edges by `delta` and raises `{u,w}` by `delta`; when `e = f` only `e`
//! is lowered (degenerate). Feasibility is measured against a list of
//! connectivity requirements `lambda(a, b) >= k`.
//!
//! To preserve all pairwise connectivities among `V - v` it is enough to
//! preserve them on the edges of a maximum spanning tree of the connectivity
//! values: connectivity satisfies `lambda(s,t) >= min(lambda(s,a), lambda(a,t))`,
//! and the bottleneck of the tree path equals `lambda(s,t)`.

use serde::Serialize;

use crate::cuts::connectivity;
use crate::graph::{CapacityGraph, DisjointSets};
use crate::instance::Instance;
use crate::lp::{separate, LpSolution, Relaxation};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitOp {
    pub at: usize,
    pub u: usize,
    pub w: usize,
    pub delta: Rational,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Default)]
pub struct SplitLog {
    pub vertex: usize,
    pub ops: Vec<SplitOp>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SplitError {
    #[error("edge {{{0},{1}}} has no weight")]
    NotIncident(usize, usize),
    #[error("target degree {beta} exceeds current degree {degree} at vertex {vertex}")]
    BetaTooLarge { vertex: usize, beta: Rational, degree: Rational },
    #[error("no feasible splitting at vertex {vertex} with residual degree {degree} above target {beta}")]
    Stuck { vertex: usize, degree: Rational, beta: Rational },
    #[error("boosted solution is infeasible: {0}")]
    Infeasible(String),
}

/// Requirements a complete splitting at one vertex must keep.
#[derive(Clone, Debug, Default)]
pub struct SplitPolicy {
    /// Keep every pairwise connectivity among the other vertices.
    pub preserve_pairwise: bool,
    /// Additional `lambda(a, b) >= k` requirements; may involve the split vertex.
    pub extra: Vec<(usize, usize, Rational)>,
    /// Fall back to degenerate splittings when no pair can be split.
    pub allow_degenerate: bool,
}

impl SplitPolicy {
    pub fn pairwise() -> Self {
        SplitPolicy { preserve_pairwise: true, ..Default::default() }
    }
}

pub fn apply_op(g: &mut CapacityGraph, op: &SplitOp) {
    let v = op.at;
    g.set(v, op.u, g.get(v, op.u) - &op.delta);
    if !op.degenerate {
        g.set(v, op.w, g.get(v, op.w) - &op.delta);
        g.add(op.u, op.w, &op.delta);
    }
}

/// Undo one operation.
pub fn revert_op(g: &mut CapacityGraph, op: &SplitOp) {
    let v = op.at;
    g.add(v, op.u, &op.delta);
    if !op.degenerate {
        g.add(v, op.w, &op.delta);
        g.set(op.u, op.w, g.get(op.u, op.w) - &op.delta);
    }
}

pub fn replay(g: &mut CapacityGraph, log: &SplitLog) {
    for op in &log.ops {
        apply_op(g, op);
    }
}

/// Connectivity requirements snapshotted from `g` before splitting at `v`.
fn requirements(g: &CapacityGraph, v: usize, policy: &SplitPolicy) -> Vec<(usize, usize, Rational)> {
    let mut reqs = Vec::new();
    if policy.preserve_pairwise {
        let active: Vec<usize> = (0..g.n()).filter(|&u| u != v && g.degree(u).is_positive()).collect();
        let mut pairs = Vec::new();
        for (i, &a) in active.iter().enumerate() {
            for &b in &active[i + 1..] {
                let k = connectivity(g, a, b);
                if k.is_positive() {
                    pairs.push((a, b, k));
                }
            }
        }
        // Kruskal on descending connectivity: a maximum spanning forest.
        pairs.sort_by(|p, q| q.2.cmp(&p.2).then((p.0, p.1).cmp(&(q.0, q.1))));
        let mut ds = DisjointSets::new(g.n());
        for (a, b, k) in pairs {
            if ds.union(a, b) {
                reqs.push((a, b, k));
            }
        }
    }
    for (a, b, k) in &policy.extra {
        if k.is_positive() && a != b {
            reqs.push((*a, *b, k.clone()));
        }
    }
    reqs
}

/// Largest `delta <= cap` for which splitting `{v,u},{v,w}` keeps every
/// requirement. The violation of each requirement is affine in `delta` with
/// slope 2 (1 if degenerate) once it binds, so one shrink by the worst
/// violation lands exactly on the boundary; the loop re-verifies.
fn feasible_delta(
    g: &CapacityGraph,
    v: usize,
    u: usize,
    w: usize,
    cap: Rational,
    reqs: &[(usize, usize, Rational)],
) -> Rational {
    let degenerate = u == w;
    let rate = Rational::from_integer(if degenerate { 1 } else { 2 });
    let mut delta = cap;
    for _ in 0..64 {
        if !delta.is_positive() {
            return Rational::zero();
        }
        let mut trial = g.clone();
        apply_op(&mut trial, &SplitOp { at: v, u, w, delta: delta.clone(), degenerate });
        let mut worst = Rational::zero();
        for (a, b, k) in reqs {
            let lam = connectivity(&trial, *a, *b);
            if &lam < k {
                let viol = k - &lam;
                if viol > worst {
                    worst = viol;
                }
            }
        }
        if worst.is_zero() {
            return delta;
        }
        delta = &delta - &(&worst / &rate);
    }
    Rational::zero()
}

/// Largest feasible `delta` for the pair `e = {v,u}`, `f = {v,w}` preserving
/// all pairwise connectivities among `V - v`. `u == w` asks for a degenerate
/// splitting.
pub fn max_feasible_delta(g: &CapacityGraph, v: usize, u: usize, w: usize) -> Result<Rational, SplitError> {
    for x in [u, w] {
        if x == v || !g.get(v, x).is_positive() {
            return Err(SplitError::NotIncident(v, x));
        }
    }
    let cap = Rational::min_of(g.get(v, u), g.get(v, w));
    let reqs = requirements(g, v, &SplitPolicy::pairwise());
    Ok(feasible_delta(g, v, u, w, cap, &reqs))
}

/// Reduce the weighted degree of `v` to `beta` by pairwise-preserving
/// splittings. Returns the log of applied operations; `g` is modified.
pub fn complete_split(g: &mut CapacityGraph, v: usize, beta: &Rational) -> Result<SplitLog, SplitError> {
    complete_split_with(g, v, beta, &SplitPolicy::pairwise())
}

pub fn complete_split_with(
    g: &mut CapacityGraph,
    v: usize,
    beta: &Rational,
    policy: &SplitPolicy,
) -> Result<SplitLog, SplitError> {
    let mut log = SplitLog { vertex: v, ops: Vec::new() };
    let mut degree = g.degree(v);
    if beta > &degree {
        return Err(SplitError::BetaTooLarge { vertex: v, beta: beta.clone(), degree });
    }
    if &degree == beta {
        return Ok(log);
    }
    let reqs = requirements(g, v, policy);
    let two = Rational::from_integer(2);
    let max_rounds = 4 * g.n() * g.n() + 8;
    for _ in 0..max_rounds {
        let mut progress = false;
        let nbrs = g.neighbors(v);
        'pairs: for (i, &u) in nbrs.iter().enumerate() {
            for &w in &nbrs[i + 1..] {
                if &degree <= beta {
                    break 'pairs;
                }
                let (wu, ww) = (g.get(v, u), g.get(v, w));
                if !wu.is_positive() || !ww.is_positive() {
                    continue;
                }
                let cap = Rational::min_of(&Rational::min_of(wu, ww), &(&(&degree - beta) / &two));
                let delta = feasible_delta(g, v, u, w, cap, &reqs);
                if delta.is_positive() {
                    let op = SplitOp { at: v, u, w, delta, degenerate: false };
                    apply_op(g, &op);
                    degree = &degree - &(&op.delta * &two);
                    log.ops.push(op);
                    progress = true;
                }
            }
        }
        if &degree <= beta {
            return Ok(log);
        }
        if !progress && policy.allow_degenerate {
            for u in g.neighbors(v) {
                if &degree <= beta {
                    break;
                }
                let cap = Rational::min_of(g.get(v, u), &(&degree - beta));
                let delta = feasible_delta(g, v, u, u, cap, &reqs);
                if delta.is_positive() {
                    let op = SplitOp { at: v, u, w: u, delta, degenerate: true };
                    apply_op(g, &op);
                    degree = &degree - &op.delta;
                    log.ops.push(op);
                    progress = true;
                }
            }
            if &degree <= beta {
                return Ok(log);
            }
        }
        if !progress {
            break;
        }
    }
    Err(SplitError::Stuck { vertex: v, degree, beta: beta.clone() })
}

/// Scale `x` by `lambda`, cap `y` at 1, and split off at every vertex whose
/// degree exceeds 2 so that the result is again feasible for the PCTSP
/// relaxation. Non-root vertices keep all pairwise connectivities; the root
/// (split last) keeps `lambda(r, t) >= 2 y_t` for every `t`. Degenerate
/// operations can only lower edges at the root, whose degree is not tight.
/// The result is re-checked with the separation oracle.
pub fn boost_solution(
    instance: &Instance,
    sol: &LpSolution,
    lambda: &Rational,
) -> Result<(LpSolution, Vec<SplitLog>), SplitError> {
    assert!(sol.relaxation == Relaxation::Pctsp, "boosting needs a PCTSP point");
    assert!(lambda >= &Rational::one(), "lambda must be at least 1");
    let r = sol.root;
    let n = sol.n();
    let two = Rational::from_integer(2);
    let mut x = sol.x.scaled(lambda);
    let y: Vec<Rational> = sol
        .y
        .iter()
        .map(|yv| Rational::min_of(&Rational::one(), &(yv * lambda)))
        .collect();
    let mut logs = Vec::new();
    for v in 0..n {
        if v == r || x.degree(v) <= two {
            continue;
        }
        let policy = SplitPolicy {
            preserve_pairwise: true,
            extra: vec![(r, v, two.clone())],
            allow_degenerate: true,
        };
        logs.push(complete_split_with(&mut x, v, &two, &policy)?);
    }
    if x.degree(r) > two {
        let extra = (0..n).filter(|&t| t != r).map(|t| (r, t, &two * &y[t])).collect();
        let policy = SplitPolicy { preserve_pairwise: false, extra, allow_degenerate: true };
        logs.push(complete_split_with(&mut x, r, &two, &policy)?);
    }
    let mut out = LpSolution {
        relaxation: Relaxation::Pctsp,
        root: r,
        x,
        y,
        objective: Rational::zero(),
        certified_optimal: false,
    };
    if let Some(row) = separate(instance, &out).first() {
        return Err(SplitError::Infeasible(format!("{row:?}")));
    }
    out.objective = out.evaluate(instance);
    Ok((out, logs))
}
