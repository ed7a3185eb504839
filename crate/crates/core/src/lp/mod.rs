//! Row-generation solver for the PCTSP and PCST relaxations.
//!
//! PCTSP: `min c^T x + pi^T (1 - y)` with `x(delta(v)) = 2 y_v` (v != r),
//! `x(delta(r)) <= 2`, `x(delta(S)) >= 2 y_v` for `S` not containing `r`,
//! `v in S`, and `0 <= y <= 1`, `y_r = 1`. The degree equations are used to
//! eliminate `y`, which leaves one column per edge.
//!
//! PCST: same objective, `x(delta(S)) >= y_v`, no degree rows, edges of the
//! input graph only.

pub mod simplex;

use serde::{Deserialize, Serialize};

use crate::cuts::min_cut;
use crate::graph::{Edge, EdgeWeights};
use crate::instance::{Instance, InstanceKind};
use crate::rational::Rational;
use simplex::{SimplexError, Tableau};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relaxation {
    Pctsp,
    Pcst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub relaxation: Relaxation,
    pub root: usize,
    pub x: EdgeWeights,
    /// `y[root] = 1`.
    pub y: Vec<Rational>,
    pub objective: Rational,
    /// Set only by `solve_relaxation`: the final restricted LP was optimal and
    /// the separation oracle found no violated row.
    pub certified_optimal: bool,
}

impl LpSolution {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn cost_part(&self, instance: &Instance) -> Rational {
        instance.cost_of(&self.x)
    }

    /// `pi^T (1 - y)`.
    pub fn penalty_part(&self, instance: &Instance) -> Rational {
        (0..self.n()).map(|v| instance.penalty(v) * &(Rational::one() - &self.y[v])).sum()
    }

    pub fn evaluate(&self, instance: &Instance) -> Rational {
        self.cost_part(instance) + self.penalty_part(instance)
    }

    pub fn to_json(&self, instance: &Instance) -> String {
        let file = LpFile {
            instance: instance.name().to_string(),
            relaxation: self.relaxation,
            objective: self.objective.clone(),
            certified_optimal: self.certified_optimal,
            x: self
                .x
                .support()
                .into_iter()
                .map(|((u, v), w)| EdgeValue { u: instance.id(u), v: instance.id(v), value: w })
                .collect(),
            y: (0..self.n())
                .map(|v| VertexValue { id: instance.id(v), value: self.y[v].clone() })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("lp solution serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, instance: &Instance) -> Result<Self, String> {
        let file: LpFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let idx = |id: u64| instance.index_of(id).ok_or(format!("unknown vertex id {id}"));
        let n = instance.n();
        let mut x = EdgeWeights::new(n);
        for e in &file.x {
            x.set(idx(e.u)?, idx(e.v)?, e.value.clone());
        }
        let mut y = vec![Rational::zero(); n];
        for v in &file.y {
            y[idx(v.id)?] = v.value.clone();
        }
        Ok(LpSolution {
            relaxation: file.relaxation,
            root: instance.root(),
            x,
            y,
            objective: file.objective,
            certified_optimal: file.certified_optimal,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct LpFile {
    instance: String,
    relaxation: Relaxation,
    objective: Rational,
    certified_optimal: bool,
    x: Vec<EdgeValue>,
    y: Vec<VertexValue>,
}

#[derive(Serialize, Deserialize)]
struct EdgeValue {
    u: u64,
    v: u64,
    value: Rational,
}

#[derive(Serialize, Deserialize)]
struct VertexValue {
    id: u64,
    value: Rational,
}

/// A violated constraint of the relaxation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolatedRow {
    /// `x_e < 0`.
    Negative { edge: Edge, violation: Rational },
    /// `y_v` outside `[0, 1]`, or `y_r != 1`.
    Bound { vertex: usize, violation: Rational },
    /// `x(delta(v)) != 2 y_v` (PCTSP, v != r).
    Degree { vertex: usize, violation: Rational },
    /// `x(delta(r)) > 2` (PCTSP).
    RootDegree { violation: Rational },
    /// `x(delta(S)) < k y_v`; `set` excludes the root and contains `vertex`.
    Cut { set: Vec<usize>, vertex: usize, violation: Rational },
}

fn requirement_factor(relaxation: Relaxation) -> Rational {
    match relaxation {
        Relaxation::Pctsp => Rational::from_integer(2),
        Relaxation::Pcst => Rational::one(),
    }
}

/// Most violated cut row per vertex (one flow each).
fn cut_rows(relaxation: Relaxation, root: usize, x: &EdgeWeights, y: &[Rational]) -> Vec<ViolatedRow> {
    let k = requirement_factor(relaxation);
    let n = y.len();
    let mut out = Vec::new();
    for v in 0..n {
        if v == root || !y[v].is_positive() {
            continue;
        }
        // Source side of the reversed flow is the smallest most-violated set.
        let cut = min_cut(x, v, root);
        let need = &k * &y[v];
        if cut.value < need {
            let set = (0..n).filter(|&u| cut.side[u]).collect();
            out.push(ViolatedRow::Cut { set, vertex: v, violation: need - cut.value });
        }
    }
    out
}

/// Violated rows of the relaxation at a candidate point; empty iff feasible.
pub fn separate(instance: &Instance, candidate: &LpSolution) -> Vec<ViolatedRow> {
    let n = instance.n();
    let r = instance.root();
    let x = &candidate.x;
    assert_eq!(x.n(), n, "candidate has the wrong number of vertices");
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if x.get(u, v).is_negative() {
                out.push(ViolatedRow::Negative { edge: (u, v), violation: -x.get(u, v) });
            }
        }
    }
    for v in 0..n {
        let y = &candidate.y[v];
        if v == r {
            if !y.is_one() {
                out.push(ViolatedRow::Bound { vertex: v, violation: (y - Rational::one()).abs() });
            }
        } else if y.is_negative() {
            out.push(ViolatedRow::Bound { vertex: v, violation: -y });
        } else if y > &Rational::one() {
            out.push(ViolatedRow::Bound { vertex: v, violation: y - Rational::one() });
        }
    }
    if candidate.relaxation == Relaxation::Pctsp {
        let two = Rational::from_integer(2);
        for v in 0..n {
            let d = x.degree(v);
            if v == r {
                if d > two {
                    out.push(ViolatedRow::RootDegree { violation: d - &two });
                }
            } else {
                let want = &two * &candidate.y[v];
                if d != want {
                    out.push(ViolatedRow::Degree { vertex: v, violation: (d - want).abs() });
                }
            }
        }
    }
    out.extend(cut_rows(candidate.relaxation, r, x, &candidate.y));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("the PCTSP relaxation needs a metric-complete instance")]
    NotMetric,
    #[error(transparent)]
    Simplex(#[from] SimplexError),
}

/// Column layout of a restricted master problem.
struct Model {
    relaxation: Relaxation,
    n: usize,
    root: usize,
    edges: Vec<Edge>,
    /// Column of `y_v` (PCST only).
    ycol: Vec<Option<usize>>,
}

impl Model {
    fn new(instance: &Instance, relaxation: Relaxation) -> Self {
        let n = instance.n();
        let edges = instance.edges();
        let mut ycol = vec![None; n];
        if relaxation == Relaxation::Pcst {
            let mut c = edges.len();
            for (v, slot) in ycol.iter_mut().enumerate() {
                if v != instance.root() {
                    *slot = Some(c);
                    c += 1;
                }
            }
        }
        Model { relaxation, n, root: instance.root(), edges, ycol }
    }

    fn costs(&self, instance: &Instance) -> Vec<Rational> {
        let half = Rational::new(1, 2);
        let mut c: Vec<Rational> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let mut cost = instance.dist(u, v).clone();
                if self.relaxation == Relaxation::Pctsp {
                    for w in [u, v] {
                        if w != self.root {
                            cost -= &(instance.penalty(w) * &half);
                        }
                    }
                }
                cost
            })
            .collect();
        for v in 0..self.n {
            if self.ycol[v].is_some() {
                c.push(-instance.penalty(v));
            }
        }
        c
    }

    /// Coefficients of `x(delta(S))` for a vertex set.
    fn boundary(&self, inside: &[bool], sign: i64) -> Vec<(usize, Rational)> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| inside[u] != inside[v])
            .map(|(j, _)| (j, Rational::from_integer(sign)))
            .collect()
    }

    fn singleton(&self, v: usize) -> Vec<bool> {
        let mut s = vec![false; self.n];
        s[v] = true;
        s
    }

    fn initial_rows(&self, t: &mut Tableau) {
        let two = Rational::from_integer(2);
        match self.relaxation {
            Relaxation::Pctsp => {
                // x(delta(v)) <= 2 encodes y_v <= 1; the root row is x(delta(r)) <= 2.
                for v in 0..self.n {
                    t.add_row(&self.boundary(&self.singleton(v), 1), two.clone());
                }
            }
            Relaxation::Pcst => {
                for v in 0..self.n {
                    if let Some(c) = self.ycol[v] {
                        t.add_row(&[(c, Rational::one())], Rational::one());
                        let mut row = self.boundary(&self.singleton(v), -1);
                        row.push((c, Rational::one()));
                        t.add_row(&row, Rational::zero());
                    }
                }
            }
        }
    }

    /// Row for `x(delta(S)) >= k y_v` in `<=` form.
    fn cut_row(&self, set: &[usize], v: usize) -> Vec<(usize, Rational)> {
        let mut inside = vec![false; self.n];
        for &u in set {
            inside[u] = true;
        }
        match self.relaxation {
            Relaxation::Pctsp => {
                // x(delta(v)) - x(delta(S)) <= 0
                let mut coef = vec![Rational::zero(); self.edges.len()];
                for (j, &(a, b)) in self.edges.iter().enumerate() {
                    if a == v || b == v {
                        coef[j] += &Rational::one();
                    }
                    if inside[a] != inside[b] {
                        coef[j] -= &Rational::one();
                    }
                }
                coef.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
            }
            Relaxation::Pcst => {
                let mut row = self.boundary(&inside, -1);
                row.push((self.ycol[v].expect("non-root"), Rational::one()));
                row
            }
        }
    }

    fn point(&self, z: &[Rational]) -> (EdgeWeights, Vec<Rational>) {
        let mut x = EdgeWeights::new(self.n);
        for (j, &(u, v)) in self.edges.iter().enumerate() {
            if !z[j].is_zero() {
                x.set(u, v, z[j].clone());
            }
        }
        let half = Rational::new(1, 2);
        let y = (0..self.n)
            .map(|v| {
                if v == self.root {
                    Rational::one()
                } else {
                    match self.relaxation {
                        Relaxation::Pctsp => x.degree(v) * &half,
                        Relaxation::Pcst => z[self.ycol[v].expect("non-root")].clone(),
                    }
                }
            })
            .collect();
        (x, y)
    }
}

/// Statistics of a row-generation run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LpStats {
    pub rounds: usize,
    pub rows: usize,
    pub pivots: usize,
}

pub fn solve_relaxation(instance: &Instance, relaxation: Relaxation) -> Result<LpSolution, LpError> {
    solve_relaxation_with_stats(instance, relaxation).map(|(s, _)| s)
}

pub fn solve_relaxation_with_stats(
    instance: &Instance,
    relaxation: Relaxation,
) -> Result<(LpSolution, LpStats), LpError> {
    if relaxation == Relaxation::Pctsp && instance.kind() != InstanceKind::MetricComplete {
        return Err(LpError::NotMetric);
    }
    let model = Model::new(instance, relaxation);
    let mut t = Tableau::new(model.costs(instance));
    model.initial_rows(&mut t);
    let mut stats = LpStats::default();
    loop {
        stats.rounds += 1;
        t.solve()?;
        let (x, y) = model.point(&t.solution());
        let rows = cut_rows(relaxation, model.root, &x, &y);
        if rows.is_empty() {
            let objective = t.value() + &instance.total_penalty();
            let sol = LpSolution {
                relaxation,
                root: model.root,
                x,
                y,
                objective,
                certified_optimal: t.is_optimal(),
            };
            debug_assert_eq!(sol.evaluate(instance), sol.objective);
            stats.rows = t.num_rows();
            stats.pivots = t.pivots;
            return Ok((sol, stats));
        }
        for row in rows {
            if let ViolatedRow::Cut { set, vertex, .. } = row {
                t.add_row(&model.cut_row(&set, vertex), Rational::zero());
            }
        }
    }
}

/// Solve with every cut row materialized up front. Exponential; test oracle
/// for small instances.
pub fn solve_full_enumeration(instance: &Instance, relaxation: Relaxation) -> Result<LpSolution, LpError> {
    let model = Model::new(instance, relaxation);
    let n = instance.n();
    let r = instance.root();
    assert!(n <= 12, "full enumeration is for tiny instances");
    let mut t = Tableau::new(model.costs(instance));
    model.initial_rows(&mut t);
    let others: Vec<usize> = (0..n).filter(|&v| v != r).collect();
    for mask in 1u32..(1 << others.len()) {
        let set: Vec<usize> = (0..others.len()).filter(|b| mask >> b & 1 == 1).map(|b| others[b]).collect();
        if set.len() == 1 && relaxation == Relaxation::Pctsp {
            continue;
        }
        for &v in &set {
            t.add_row(&model.cut_row(&set, v), Rational::zero());
        }
    }
    t.solve()?;
    let (x, y) = model.point(&t.solution());
    let objective = t.value() + &instance.total_penalty();
    Ok(LpSolution { relaxation, root: r, x, y, objective, certified_optimal: t.is_optimal() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_instance, Family};

    fn triangle(p: &str) -> Instance {
        let n = 3;
        let mut dist = vec![Some(Rational::one()); n * n];
        for v in 0..n {
            dist[v * n + v] = Some(Rational::zero());
        }
        let pen = p.parse::<Rational>().unwrap();
        Instance::new("tri", vec![1, 2, 3], 1, dist, vec![Rational::zero(), pen.clone(), pen], InstanceKind::MetricComplete)
            .unwrap()
    }

    #[test]
    fn zero_penalties() {
        let sol = solve_relaxation(&triangle("0"), Relaxation::Pctsp).unwrap();
        assert_eq!(sol.objective, Rational::zero());
        assert!(sol.x.support().is_empty());
        assert!(sol.certified_optimal);
    }

    #[test]
    fn forced_triangle() {
        let inst = triangle("100");
        let sol = solve_relaxation(&inst, Relaxation::Pctsp).unwrap();
        assert_eq!(sol.objective, Rational::from_integer(3));
        assert!(sol.y.iter().all(|y| y.is_one()));
        assert!(separate(&inst, &sol).is_empty());
    }

    #[test]
    fn isolated_vertex_cut() {
        let inst = triangle("1");
        let mut y = vec![Rational::one(), Rational::one(), Rational::zero()];
        y[2] = Rational::zero();
        let cand = LpSolution {
            relaxation: Relaxation::Pctsp,
            root: 0,
            x: EdgeWeights::new(3),
            y,
            objective: Rational::zero(),
            certified_optimal: false,
        };
        let rows = separate(&inst, &cand);
        assert!(rows.contains(&ViolatedRow::Cut { set: vec![1], vertex: 1, violation: Rational::from_integer(2) }));
    }

    #[test]
    fn matches_full_enumeration() {
        for seed in 0..4 {
            let inst = generate_instance(6, Family::Euclidean, &Rational::new(3, 2), seed).unwrap();
            let a = solve_relaxation(&inst, Relaxation::Pctsp).unwrap();
            let b = solve_full_enumeration(&inst, Relaxation::Pctsp).unwrap();
            assert_eq!(a.objective, b.objective, "seed {seed}");
            let g = generate_instance(6, Family::SparseGraph, &Rational::new(3, 2), seed).unwrap();
            let a = solve_relaxation(&g, Relaxation::Pcst).unwrap();
            let b = solve_full_enumeration(&g, Relaxation::Pcst).unwrap();
            assert_eq!(a.objective, b.objective, "pcst seed {seed}");
        }
    }
}
