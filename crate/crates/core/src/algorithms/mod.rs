//! Top-level drivers: the walk-based algorithm with its threshold strategies,
//! classical threshold rounding, and the two tree-partition algorithms.

pub mod constants;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::decomposition::{decompose, fractional_tree_partition, AnchoredTree, DecompositionError};
use crate::graph::{edge, Edge, EdgeWeights};
use crate::instance::{metric_closure, root_split_transform, Instance, InstanceError, InstanceKind, RootSplitError};
use crate::lp::{separate, solve_relaxation, LpError, LpSolution, Relaxation};
use crate::oracle::{exact_pcst, exact_pctsp, induced_mst, OracleError, Witness};
use crate::rational::Rational;
use crate::rounding::{build_walk_family, select_walks, RoundingError, SelectMode, WalkFamily, WalkSelection};
use crate::splitting::{boost_solution, complete_split_with, SplitError, SplitPolicy};
use crate::tour::{double_and_shortcut, eulerian_shortcut, min_perfect_matching, minimum_odd_join, missed_penalty, Cycle, Multigraph, TourError};

/// Thresholds are snapped to this denominator so boosting stays exact.
pub const GAMMA_DENOMINATOR: i64 = 1_000_000;
/// Repeated samples in randomized mode.
pub const DEFAULT_REPEATS: usize = 32;
/// Threshold of classical threshold rounding.
pub fn classic_gamma() -> Rational {
    Rational::new(3, 5)
}

#[derive(Debug, thiserror::Error)]
pub enum AlgError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    RootSplit(#[from] RootSplitError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Rounding(#[from] RoundingError),
    #[error(transparent)]
    Tour(#[from] TourError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Constants(#[from] constants::ConstantsError),
    #[error("threshold sweep needs a certified optimal LP solution")]
    NotOptimal,
    #[error("gamma {0} outside (0, 1]")]
    InvalidGamma(Rational),
    #[error("the PCTSP algorithms need a metric-complete instance")]
    NotMetric,
    #[error("the PCST algorithm needs a general-graph instance")]
    NotGraph,
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl AlgError {
    /// Whether the failure is a broken internal guarantee rather than bad input.
    pub fn is_internal(&self) -> bool {
        !matches!(
            self,
            AlgError::Instance(_)
                | AlgError::Lp(LpError::NotMetric)
                | AlgError::Oracle(OracleError::TooLarge { .. } | OracleError::NotMetric)
                | AlgError::Tour(TourError::OddSetTooLarge(_))
                | AlgError::Constants(_)
                | AlgError::NotOptimal
                | AlgError::InvalidGamma(_)
                | AlgError::NotMetric
                | AlgError::NotGraph
                | AlgError::Decomposition(DecompositionError::TooLarge(_))
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Randomized,
    Deterministic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Alg1,
    ThresholdClassic,
    Tree2,
    Pcst2,
    Exact,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Alg1 => "alg1",
            Algorithm::ThresholdClassic => "threshold-classic",
            Algorithm::Tree2 => "tree2",
            Algorithm::Pcst2 => "pcst2",
            Algorithm::Exact => "exact",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solution {
    Cycle(Cycle),
    Tree(Vec<Edge>),
}

impl Solution {
    pub fn vertices(&self, root: usize) -> Vec<usize> {
        match self {
            Solution::Cycle(c) => c.order.clone(),
            Solution::Tree(t) => {
                let mut vs: Vec<usize> = t.iter().flat_map(|&(a, b)| [a, b]).collect();
                vs.push(root);
                vs.sort_unstable();
                vs.dedup();
                vs
            }
        }
    }

    /// Edge cost and missed penalties, recomputed from scratch.
    pub fn costs(&self, instance: &Instance) -> Result<(Rational, Rational), TourError> {
        let root = instance.root();
        let cost = match self {
            Solution::Cycle(c) => {
                c.validate(root, instance.n())?;
                c.length(instance)
            }
            Solution::Tree(t) => t.iter().map(|&(a, b)| instance.dist(a, b).clone()).sum(),
        };
        Ok((cost, missed_penalty(instance, &self.vertices(root))))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TourResult {
    pub algorithm: Algorithm,
    pub mode: Mode,
    pub gamma: Option<f64>,
    pub seed: Option<u64>,
    pub solution: Solution,
    pub tour_cost: Rational,
    pub penalty_cost: Rational,
    pub lp_value: Rational,
    pub ratio: f64,
    /// Guarantee the run is checked against, when there is one.
    pub bound: Option<f64>,
}

pub fn ratio(objective: &Rational, lp_value: &Rational) -> f64 {
    if lp_value.is_positive() {
        (objective / lp_value).to_f64()
    } else if objective.is_zero() {
        1.0
    } else {
        f64::INFINITY
    }
}

impl TourResult {
    fn new(
        instance: &Instance,
        algorithm: Algorithm,
        mode: Mode,
        solution: Solution,
        lp_value: Rational,
    ) -> Result<Self, AlgError> {
        let (tour_cost, penalty_cost) = solution.costs(instance)?;
        let ratio = ratio(&(&tour_cost + &penalty_cost), &lp_value);
        Ok(TourResult {
            algorithm,
            mode,
            gamma: None,
            seed: None,
            solution,
            tour_cost,
            penalty_cost,
            lp_value,
            ratio,
            bound: None,
        })
    }

    pub fn objective(&self) -> Rational {
        &self.tour_cost + &self.penalty_cost
    }

    /// Recompute costs and ratio from the solution; error on any mismatch.
    pub fn audit(&self, instance: &Instance) -> Result<(), String> {
        let (c, p) = self.solution.costs(instance).map_err(|e| e.to_string())?;
        if c != self.tour_cost || p != self.penalty_cost {
            return Err(format!("recorded costs {} + {} but recomputed {c} + {p}", self.tour_cost, self.penalty_cost));
        }
        let r = ratio(&(&c + &p), &self.lp_value);
        if r.to_bits() != self.ratio.to_bits() && !(r.is_nan() && self.ratio.is_nan()) {
            return Err(format!("recorded ratio {} but recomputed {r}", self.ratio));
        }
        Ok(())
    }

    /// Result record with vertex ids in place of indices.
    pub fn to_json(&self, instance: &Instance) -> serde_json::Value {
        let tour = match &self.solution {
            Solution::Cycle(c) => json!(c.order.iter().map(|&v| instance.id(v)).collect::<Vec<_>>()),
            Solution::Tree(t) => json!(t.iter().map(|&(a, b)| [instance.id(a), instance.id(b)]).collect::<Vec<_>>()),
        };
        json!({
            "instance": instance.name(),
            "algorithm": self.algorithm.name(),
            "mode": self.mode,
            "gamma": self.gamma,
            "seed": self.seed,
            "tour": tour,
            "tour_cost": self.tour_cost,
            "penalty_cost": self.penalty_cost,
            "objective": self.objective(),
            "lp_value": self.lp_value,
            "ratio": if self.ratio.is_finite() { json!(self.ratio) } else { json!(null) },
            "bound": self.bound,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alg1Options {
    pub mode: Mode,
    pub seed: u64,
    pub repeats: usize,
}

impl Default for Alg1Options {
    fn default() -> Self {
        Alg1Options { mode: Mode::Deterministic, seed: 0, repeats: DEFAULT_REPEATS }
    }
}

/// Intermediate objects of one run, for tracing and for tests.
#[derive(Clone, Debug, Serialize)]
pub struct Alg1Trace {
    pub gamma: Rational,
    /// Root-copy instance size; the copy is the last vertex.
    pub aux_n: usize,
    pub anchors: Vec<usize>,
    pub trees: Vec<AnchoredTree>,
    pub split_ops: usize,
    pub family: WalkFamily,
    pub selection: WalkSelection,
    pub join: Vec<Edge>,
    pub join_cost: Rational,
    /// `c(z)/2` for the anchor-graph point `z`.
    pub join_bound: Rational,
    /// `c(H) + pi(V - V[H])` on the root-copy instance.
    pub walk_value: Rational,
    pub walk_bound: f64,
    /// `3/(2 gamma) c x* + sum_{y*_v < gamma} pi_v exp(-3 y*_v / (4 gamma))`.
    pub guarantee_bound: f64,
}

struct Prepared {
    aux: Instance,
    copy: usize,
    y: Vec<Rational>,
    anchors: Vec<usize>,
    trees: Vec<AnchoredTree>,
    split_ops: usize,
    family: WalkFamily,
    guarantee_bound: f64,
}

pub fn guarantee_bound(instance: &Instance, sol: &LpSolution, gamma: &Rational) -> f64 {
    let g = gamma.to_f64();
    let mut b = 1.5 / g * sol.cost_part(instance).to_f64();
    for v in 0..instance.n() {
        if &sol.y[v] < gamma {
            b += instance.penalty(v).to_f64() * (-0.75 * sol.y[v].to_f64() / g).exp();
        }
    }
    b
}

fn require_metric(instance: &Instance) -> Result<(), AlgError> {
    if instance.kind() != InstanceKind::MetricComplete {
        return Err(AlgError::NotMetric);
    }
    Ok(())
}

fn prepare(instance: &Instance, sol: &LpSolution, gamma: &Rational) -> Result<Prepared, AlgError> {
    require_metric(instance)?;
    if !gamma.is_positive() || gamma > &Rational::one() {
        return Err(AlgError::InvalidGamma(gamma.clone()));
    }
    let (boosted, _) = boost_solution(instance, sol, &gamma.recip())?;
    let (aux, aux_sol, back) = root_split_transform(instance, &boosted)?;
    let anchors: Vec<usize> = (0..aux.n()).filter(|&v| aux_sol.y[v].is_one()).collect();
    let dec = decompose(&aux_sol, &anchors, (back.root, back.copy))?;
    dec.verify().map_err(AlgError::Invariant)?;
    let family = build_walk_family(&dec, &aux)?;
    Ok(Prepared {
        copy: back.copy,
        y: aux_sol.y.clone(),
        anchors,
        split_ops: dec.total_ops(),
        trees: dec.trees,
        family,
        guarantee_bound: guarantee_bound(instance, sol, gamma),
        aux,
    })
}

fn finish(
    instance: &Instance,
    prep: &Prepared,
    selection: WalkSelection,
    mode: Mode,
) -> Result<(Cycle, Alg1Trace), AlgError> {
    let aux = &prep.aux;
    let root = instance.root();
    let h = &selection.h;
    let join = minimum_odd_join(h, aux)?;
    let join_cost: Rational = join.iter().map(|&(a, b)| aux.dist(a, b).clone()).sum();
    let join_bound: Rational =
        prep.trees.iter().map(|t| &t.weight * aux.dist(t.anchors.0, t.anchors.1)).sum::<Rational>() * Rational::new(1, 2);
    if join_cost > join_bound {
        return Err(AlgError::Invariant(format!("odd join costs {join_cost} > c(z)/2 = {join_bound}")));
    }
    let mut hj = h.clone();
    for &(a, b) in &join {
        hj.add_edge(a, b);
    }
    if !hj.is_eulerian() {
        return Err(AlgError::Invariant("H + J is not Eulerian".into()));
    }
    let copy = prep.copy;
    let mut merged = hj.contract(|v| if v == copy { root } else { v });
    merged.add_vertex(root);
    let cycle = eulerian_shortcut(&merged, root)?;
    cycle.validate(root, instance.n())?;
    if let Some(&v) = prep.anchors.iter().find(|&&v| v != copy && !cycle.contains(v)) {
        return Err(AlgError::Invariant(format!("anchor {v} missing from the tour")));
    }
    let length = cycle.length(instance);
    if length > merged.cost(|a, b| instance.dist(a, b).clone()) {
        return Err(AlgError::Invariant("shortcutting increased the cost".into()));
    }
    let walk_value = h.cost(|a, b| aux.dist(a, b).clone()) + missed_penalty(aux, &h.vertices.iter().copied().collect::<Vec<_>>());
    let walk_bound = prep.family.walk_bound(aux.penalties(), &prep.y);
    if mode == Mode::Deterministic && walk_value.to_f64() > walk_bound * (1.0 + 1e-9) + 1e-12 {
        return Err(AlgError::Invariant(format!("walk value {walk_value} above bound {walk_bound}")));
    }
    let trace = Alg1Trace {
        gamma: Rational::zero(),
        aux_n: aux.n(),
        anchors: prep.anchors.clone(),
        trees: prep.trees.clone(),
        split_ops: prep.split_ops,
        family: prep.family.clone(),
        selection,
        join,
        join_cost,
        join_bound,
        walk_value,
        walk_bound,
        guarantee_bound: prep.guarantee_bound,
    };
    Ok((cycle, trace))
}

/// One run of the walk-based algorithm at threshold `gamma`.
pub fn run_alg1(
    instance: &Instance,
    sol: &LpSolution,
    gamma: &Rational,
    opts: &Alg1Options,
) -> Result<TourResult, AlgError> {
    run_alg1_traced(instance, sol, gamma, opts).map(|(r, _)| r)
}

pub fn run_alg1_traced(
    instance: &Instance,
    sol: &LpSolution,
    gamma: &Rational,
    opts: &Alg1Options,
) -> Result<(TourResult, Alg1Trace), AlgError> {
    let prep = prepare(instance, sol, gamma)?;
    let penalties = prep.aux.penalties().to_vec();
    let (cycle, mut trace) = match opts.mode {
        Mode::Deterministic => {
            let sel = select_walks(&prep.family, &penalties, SelectMode::Deterministic)?;
            finish(instance, &prep, sel, opts.mode)?
        }
        Mode::Randomized => {
            let runs: Vec<(Cycle, Alg1Trace, Rational)> = (0..opts.repeats.max(1))
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                    rng.set_stream(i as u64);
                    let sel = select_walks(&prep.family, &penalties, SelectMode::Randomized(&mut rng))?;
                    let (c, t) = finish(instance, &prep, sel, opts.mode)?;
                    let obj = c.length(instance) + missed_penalty(instance, &c.order);
                    Ok((c, t, obj))
                })
                .collect::<Result<_, AlgError>>()?;
            let best = runs
                .into_iter()
                .reduce(|a, b| if b.2 < a.2 { b } else { a })
                .expect("at least one repeat");
            (best.0, best.1)
        }
    };
    trace.gamma = gamma.clone();
    let mut result = TourResult::new(instance, Algorithm::Alg1, opts.mode, Solution::Cycle(cycle), sol.objective.clone())?;
    result.gamma = Some(gamma.to_f64());
    result.seed = (opts.mode == Mode::Randomized).then_some(opts.seed);
    result.bound = Some(prep.guarantee_bound);
    Ok((result, trace))
}

/// Distinct positive LP values `y*_v`, largest first.
pub fn threshold_candidates(sol: &LpSolution) -> Vec<Rational> {
    let mut g: Vec<Rational> = sol.y.iter().filter(|y| y.is_positive()).cloned().collect();
    g.sort_unstable_by(|a, b| b.cmp(a));
    g.dedup();
    g
}

/// Run the walk-based algorithm at every `gamma = y*_v > 0` and keep the best.
pub fn select_threshold_deterministic(
    instance: &Instance,
    sol: &LpSolution,
    opts: &Alg1Options,
) -> Result<TourResult, AlgError> {
    if !sol.certified_optimal {
        return Err(AlgError::NotOptimal);
    }
    let runs: Vec<TourResult> = threshold_candidates(sol)
        .par_iter()
        .map(|g| run_alg1(instance, sol, g, opts))
        .collect::<Result<_, _>>()?;
    Ok(runs
        .into_iter()
        .reduce(|a, b| if b.objective() < a.objective() { b } else { a })
        .expect("the root has y = 1"))
}

/// Christofides on the vertices with `y*_v >= gamma`.
pub fn run_threshold_classic(instance: &Instance, sol: &LpSolution, gamma: &Rational) -> Result<TourResult, AlgError> {
    require_metric(instance)?;
    if !gamma.is_positive() || gamma > &Rational::one() {
        return Err(AlgError::InvalidGamma(gamma.clone()));
    }
    let root = instance.root();
    let kept: Vec<usize> = (0..instance.n()).filter(|&v| v == root || &sol.y[v] >= gamma).collect();
    let mut inside = vec![false; instance.n()];
    for &v in &kept {
        inside[v] = true;
    }
    let mut edges = instance.edges();
    edges.sort_by(|&(a, b), &(c, d)| instance.dist(a, b).cmp(instance.dist(c, d)).then((a, b).cmp(&(c, d))));
    let (_, mst) = induced_mst(instance, &edges, &inside).ok_or_else(|| AlgError::Invariant("metric MST failed".into()))?;
    let mut g = Multigraph::with_vertex(root);
    for &(a, b) in &mst {
        g.add_edge(a, b);
    }
    let (_, join) = min_perfect_matching(&g.odd_vertices(), |a, b| instance.dist(a, b).clone())?;
    for &(a, b) in &join {
        g.add_edge(a, b);
    }
    let cycle = eulerian_shortcut(&g, root)?;
    let mut r = TourResult::new(instance, Algorithm::ThresholdClassic, Mode::Deterministic, Solution::Cycle(cycle), sol.objective.clone())?;
    r.gamma = Some(gamma.to_f64());
    Ok(r)
}

/// `2 c x* + pi (1 - y*)`.
pub fn tree2_bound(instance: &Instance, sol: &LpSolution) -> Rational {
    sol.cost_part(instance) * Rational::from_integer(2) + sol.penalty_part(instance)
}

fn cost_on(instance: &Instance, x: &EdgeWeights) -> Rational {
    x.support().iter().map(|&((a, b), ref w)| w * instance.dist(a, b)).sum()
}

/// Double each tree of a fractional tree partition, shortcut, keep the best.
pub fn run_tree2_pctsp(instance: &Instance) -> Result<TourResult, AlgError> {
    require_metric(instance)?;
    let sol = solve_relaxation(instance, Relaxation::Pctsp)?;
    run_tree2_pctsp_with(instance, &sol)
}

pub fn run_tree2_pctsp_with(instance: &Instance, sol: &LpSolution) -> Result<TourResult, AlgError> {
    require_metric(instance)?;
    let root = instance.root();
    let trees = fractional_tree_partition(instance, sol)?;
    let mut best: Option<(Rational, Cycle)> = None;
    for t in &trees {
        let c = double_and_shortcut(&t.edges, root);
        let obj = c.length(instance) + missed_penalty(instance, &c.order);
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, c));
        }
    }
    let (obj, cycle) = best.expect("a partition has at least one tree");
    let bound = tree2_bound(instance, sol);
    if obj > bound {
        return Err(AlgError::Invariant(format!("tree2 objective {obj} above 2cx + pi(1-y) = {bound}")));
    }
    let mut r = TourResult::new(instance, Algorithm::Tree2, Mode::Deterministic, Solution::Cycle(cycle), sol.objective.clone())?;
    r.bound = Some(bound.to_f64());
    Ok(r)
}

/// Turn a PCST point into a PCTSP point on the metric closure: double `x`
/// and split off until `x(delta(v)) = 2 y_v` off the root and `x(delta(r)) <= 2`,
/// keeping `lambda(r, t) >= 2 y_t` for every `t`.
pub fn pcst_to_pctsp(metric: &Instance, sol: &LpSolution) -> Result<LpSolution, AlgError> {
    let n = metric.n();
    let r = metric.root();
    let two = Rational::from_integer(2);
    let mut x = sol.x.scaled(&two);
    let extra: Vec<(usize, usize, Rational)> = (0..n).filter(|&t| t != r).map(|t| (r, t, &two * &sol.y[t])).collect();
    let policy = SplitPolicy { preserve_pairwise: false, extra, allow_degenerate: true };
    for v in (0..n).filter(|&v| v != r) {
        let target = &two * &sol.y[v];
        if x.degree(v) > target {
            complete_split_with(&mut x, v, &target, &policy)?;
        }
    }
    if x.degree(r) > two {
        complete_split_with(&mut x, r, &two, &policy)?;
    }
    let mut out = LpSolution {
        relaxation: Relaxation::Pctsp,
        root: r,
        x,
        y: sol.y.clone(),
        objective: Rational::zero(),
        certified_optimal: false,
    };
    if let Some(row) = separate(metric, &out).first() {
        return Err(AlgError::Invariant(format!("PCST conversion is infeasible: {row:?}")));
    }
    out.objective = out.evaluate(metric);
    Ok(out)
}

/// Tree-partition algorithm for the Steiner variant.
pub fn run_tree2_pcst(instance: &Instance) -> Result<TourResult, AlgError> {
    if instance.kind() != InstanceKind::GeneralGraph {
        return Err(AlgError::NotGraph);
    }
    let sol = solve_relaxation(instance, Relaxation::Pcst)?;
    run_tree2_pcst_with(instance, &sol)
}

pub fn run_tree2_pcst_with(instance: &Instance, sol: &LpSolution) -> Result<TourResult, AlgError> {
    let n = instance.n();
    let root = instance.root();
    let closure = metric_closure(instance)?;
    let bound = tree2_bound(instance, sol);
    let mut edges = instance.edges();
    edges.sort_by(|&(a, b), &(c, d)| instance.dist(a, b).cmp(instance.dist(c, d)).then((a, b).cmp(&(c, d))));
    let trees = if n == 1 || sol.x.support().is_empty() {
        Vec::new()
    } else {
        let point = pcst_to_pctsp(&closure.metric, sol)?;
        if cost_on(&closure.metric, &point.x) > sol.cost_part(instance) * Rational::from_integer(2) {
            return Err(AlgError::Invariant("splitting increased the metric cost".into()));
        }
        fractional_tree_partition(&closure.metric, &point)?
    };
    let mut best: (Rational, Vec<Edge>) = (instance.total_penalty(), Vec::new());
    for t in &trees {
        let mut inside = vec![false; n];
        inside[root] = true;
        for &(a, b) in &t.edges {
            for v in closure.path(a, b) {
                inside[v] = true;
            }
        }
        let (cost, tree) = induced_mst(instance, &edges, &inside)
            .ok_or_else(|| AlgError::Invariant("shortest paths left the tree disconnected".into()))?;
        let obj = cost + missed_penalty(instance, &(0..n).filter(|&v| inside[v]).collect::<Vec<_>>());
        if obj < best.0 {
            best = (obj, tree);
        }
    }
    if best.0 > bound {
        return Err(AlgError::Invariant(format!("pcst2 objective {} above 2cx + pi(1-y) = {bound}", best.0)));
    }
    let tree: Vec<Edge> = best.1.into_iter().map(|(a, b)| edge(a, b)).collect();
    let mut r = TourResult::new(instance, Algorithm::Pcst2, Mode::Deterministic, Solution::Tree(tree), sol.objective.clone())?;
    r.bound = Some(bound.to_f64());
    Ok(r)
}

/// Exact optimum through the oracles; PCTSP for metric instances, PCST otherwise.
pub fn run_exact(instance: &Instance, lp_value: Rational) -> Result<TourResult, AlgError> {
    let exact = match instance.kind() {
        InstanceKind::MetricComplete => exact_pctsp(instance)?,
        InstanceKind::GeneralGraph => exact_pcst(instance)?,
    };
    let solution = match exact.witness {
        Witness::Cycle(c) => Solution::Cycle(c),
        Witness::Tree(t) => Solution::Tree(t),
    };
    let r = TourResult::new(instance, Algorithm::Exact, Mode::Deterministic, solution, lp_value)?;
    if r.objective() != exact.value {
        return Err(AlgError::Invariant("oracle witness does not reproduce its value".into()));
    }
    Ok(r)
}

/// Draw `gamma` from the density `exp(-b/g)` on `[b, 1]`, then run once.
pub fn run_alg1_sampled(instance: &Instance, sol: &LpSolution, b: f64, opts: &Alg1Options) -> Result<TourResult, AlgError> {
    let sampler = constants::ThresholdSampler::new(b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(u64::MAX);
    let gamma = Rational::from_f64_snapped(sampler.sample(&mut rng), GAMMA_DENOMINATOR);
    run_alg1(instance, sol, &gamma, opts)
}
