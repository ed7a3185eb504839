//! Problem instances: validation, I/O, generation, metric closure and the
//! root-copy transform.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::EdgeWeights;
use crate::lp::{LpSolution, Relaxation};
use crate::rational::Rational;

/// Denominator used when snapping floating inputs to rationals.
pub const SNAP: i64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    #[default]
    MetricComplete,
    GeneralGraph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    TsplibPc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Euclidean,
    RandomMetric,
    /// Connected sparse graph with non-metric weights (PCST inputs).
    SparseGraph,
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "euclidean" => Ok(Family::Euclidean),
            "random-metric" => Ok(Family::RandomMetric),
            "sparse-graph" => Ok(Family::SparseGraph),
            _ => Err(format!("unknown family {s:?}")),
        }
    }
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Euclidean => "euclidean",
            Family::RandomMetric => "random-metric",
            Family::SparseGraph => "sparse-graph",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("instance has no vertices")]
    Empty,
    #[error("duplicate vertex id {0}")]
    DuplicateId(u64),
    #[error("missing root: vertex {0} not found")]
    MissingRoot(u64),
    #[error("root penalty must be 0")]
    RootPenalty,
    #[error("negative penalty at vertex {0}")]
    NegativePenalty(u64),
    #[error("negative distance between {0} and {1}")]
    NegativeDistance(u64, u64),
    #[error("asymmetric distance between {0} and {1}")]
    Asymmetric(u64, u64),
    #[error("distance table has wrong shape: {0}")]
    Shape(String),
    #[error("missing distance between {0} and {1} in a metric-complete instance")]
    MissingDistance(u64, u64),
    #[error("triangle inequality violated on triple ({0}, {1}, {2}): d({0},{2}) > d({0},{1}) + d({1},{2})")]
    Triangle(u64, u64, u64),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("instance has neither coordinates nor a distance table")]
    NoDistances,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    name: String,
    ids: Vec<u64>,
    root: usize,
    /// `n * n`, `None` where a general graph has no edge. Diagonal is zero.
    dist: Vec<Option<Rational>>,
    penalty: Vec<Rational>,
    kind: InstanceKind,
    coords: Option<Vec<(f64, f64)>>,
    /// Whether `dist` is written out explicitly (false for coordinate inputs).
    explicit_dist: bool,
}

impl Instance {
    /// Build and validate an instance from an explicit distance matrix.
    pub fn new(
        name: impl Into<String>,
        ids: Vec<u64>,
        root_id: u64,
        dist: Vec<Option<Rational>>,
        penalty: Vec<Rational>,
        kind: InstanceKind,
    ) -> Result<Self, InstanceError> {
        let n = ids.len();
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        if dist.len() != n * n || penalty.len() != n {
            return Err(InstanceError::Shape(format!("expected {n} vertices")));
        }
        let root = ids.iter().position(|&i| i == root_id).ok_or(InstanceError::MissingRoot(root_id))?;
        let inst = Instance {
            name: name.into(),
            ids,
            root,
            dist,
            penalty,
            kind,
            coords: None,
            explicit_dist: true,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Euclidean instance; distances are snapped to `1/SNAP` and then closed
    /// under shortest paths so the triangle inequality holds exactly.
    pub fn from_coords(
        name: impl Into<String>,
        ids: Vec<u64>,
        root_id: u64,
        coords: Vec<(f64, f64)>,
        penalty: Vec<Rational>,
    ) -> Result<Self, InstanceError> {
        let n = ids.len();
        if coords.len() != n {
            return Err(InstanceError::Shape("coordinate count".into()));
        }
        let mut dist = vec![Some(Rational::zero()); n * n];
        for i in 0..n {
            for j in 0..i {
                let (dx, dy) = (coords[i].0 - coords[j].0, coords[i].1 - coords[j].1);
                let d = Rational::from_f64_snapped((dx * dx + dy * dy).sqrt(), SNAP);
                dist[i * n + j] = Some(d.clone());
                dist[j * n + i] = Some(d);
            }
        }
        floyd_warshall(n, &mut dist, None);
        let mut inst = Instance::new(name, ids, root_id, dist, penalty, InstanceKind::MetricComplete)?;
        inst.coords = Some(coords);
        inst.explicit_dist = false;
        Ok(inst)
    }

    fn validate(&self) -> Result<(), InstanceError> {
        let n = self.n();
        let mut seen = std::collections::HashSet::new();
        for &id in &self.ids {
            if !seen.insert(id) {
                return Err(InstanceError::DuplicateId(id));
            }
        }
        for v in 0..n {
            if self.penalty[v].is_negative() {
                return Err(InstanceError::NegativePenalty(self.ids[v]));
            }
        }
        if !self.penalty[self.root].is_zero() {
            return Err(InstanceError::RootPenalty);
        }
        for u in 0..n {
            for v in 0..n {
                let a = &self.dist[u * n + v];
                if u == v {
                    if a.as_ref().is_none_or(|d| !d.is_zero()) {
                        return Err(InstanceError::Shape(format!("nonzero diagonal at {}", self.ids[u])));
                    }
                    continue;
                }
                if a != &self.dist[v * n + u] {
                    return Err(InstanceError::Asymmetric(self.ids[u], self.ids[v]));
                }
                match a {
                    Some(d) if d.is_negative() => {
                        return Err(InstanceError::NegativeDistance(self.ids[u], self.ids[v]))
                    }
                    None if self.kind == InstanceKind::MetricComplete => {
                        return Err(InstanceError::MissingDistance(self.ids[u], self.ids[v]))
                    }
                    _ => {}
                }
            }
        }
        if self.kind == InstanceKind::MetricComplete {
            if let Some((a, b, c)) = self.triangle_violation() {
                return Err(InstanceError::Triangle(self.ids[a], self.ids[b], self.ids[c]));
            }
        }
        Ok(())
    }

    /// First triple `(u, v, w)` with `d(u,w) > d(u,v) + d(v,w)`, if any.
    pub fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.n();
        for u in 0..n {
            for w in u + 1..n {
                let duw = self.dist(u, w);
                for v in 0..n {
                    if v == u || v == w {
                        continue;
                    }
                    if duw > &(self.dist(u, v) + self.dist(v, w)) {
                        return Some((u, v, w));
                    }
                }
            }
        }
        None
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn kind(&self) -> InstanceKind {
        self.kind
    }

    pub fn id(&self, v: usize) -> u64 {
        self.ids[v]
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.ids.iter().position(|&i| i == id)
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    /// Panics when the pair is not an edge of a general graph.
    pub fn dist(&self, u: usize, v: usize) -> &Rational {
        self.dist[u * self.n() + v]
            .as_ref()
            .unwrap_or_else(|| panic!("no edge between {} and {}", self.ids[u], self.ids[v]))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.dist[u * self.n() + v].is_some()
    }

    pub fn penalty(&self, v: usize) -> &Rational {
        &self.penalty[v]
    }

    pub fn penalties(&self) -> &[Rational] {
        &self.penalty
    }

    pub fn total_penalty(&self) -> Rational {
        self.penalty.iter().sum()
    }

    /// Edges in lexicographic order (all pairs for metric-complete instances).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn max_distance(&self) -> Rational {
        let n = self.n();
        let mut m = Rational::zero();
        for u in 0..n {
            for v in u + 1..n {
                if self.has_edge(u, v) && self.dist(u, v) > &m {
                    m = self.dist(u, v).clone();
                }
            }
        }
        m
    }

    /// `sum_e c_e x_e` over the support of `x`.
    pub fn cost_of(&self, x: &EdgeWeights) -> Rational {
        x.dot(|u, v| self.dist(u, v).clone())
    }

    pub fn with_penalties(&self, penalty: Vec<Rational>) -> Result<Self, InstanceError> {
        let mut out = self.clone();
        out.penalty = penalty;
        out.validate()?;
        Ok(out)
    }

    pub fn load(path: &Path, format: Format) -> Result<Self, InstanceError> {
        let text = std::fs::read_to_string(path)?;
        match format {
            Format::Json => Instance::from_json(&text),
            Format::TsplibPc => Instance::from_tsplib(&text),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| InstanceError::Parse(e.to_string()))?;
        let n = file.vertices.len();
        let ids: Vec<u64> = file.vertices.iter().map(|v| v.id).collect();
        let penalty: Vec<Rational> = file.vertices.iter().map(|v| v.penalty.clone()).collect();
        let coords: Option<Vec<(f64, f64)>> =
            file.vertices.iter().map(|v| Some((v.x?, v.y?))).collect();
        match file.dist {
            Some(rows) => {
                let dist = lower_triangle_to_matrix(n, &rows)?;
                let mut inst = Instance::new(file.name, ids, file.root, dist, penalty, file.kind)?;
                inst.coords = coords;
                Ok(inst)
            }
            None => {
                let coords = coords.ok_or(InstanceError::NoDistances)?;
                if file.kind != InstanceKind::MetricComplete {
                    return Err(InstanceError::Parse("coordinate instances are metric-complete".into()));
                }
                Instance::from_coords(file.name, ids, file.root, coords, penalty)
            }
        }
    }

    pub fn to_json(&self) -> String {
        let n = self.n();
        let vertices = (0..n)
            .map(|v| VertexRecord {
                id: self.ids[v],
                penalty: self.penalty[v].clone(),
                x: self.coords.as_ref().map(|c| c[v].0),
                y: self.coords.as_ref().map(|c| c[v].1),
            })
            .collect();
        let dist = self.explicit_dist.then(|| {
            (1..n)
                .map(|i| (0..i).map(|j| self.dist[i * n + j].clone()).collect())
                .collect()
        });
        let file = InstanceFile {
            name: self.name.clone(),
            root: self.ids[self.root],
            kind: self.kind,
            vertices,
            dist,
        };
        let mut s = serde_json::to_string_pretty(&file).expect("instance serializes");
        s.push('\n');
        s
    }

    /// Read-only TSPLIB-like format. Supported keys: `NAME`, `DIMENSION`,
    /// `EDGE_WEIGHT_TYPE` (`EUC_2D` or `EXPLICIT`), `EDGE_WEIGHT_FORMAT`
    /// (`FULL_MATRIX`, `LOWER_DIAG_ROW`, `LOWER_ROW`), `ROOT`, and the sections
    /// `NODE_COORD_SECTION`, `EDGE_WEIGHT_SECTION`, `PENALTY_SECTION`.
    pub fn from_tsplib(text: &str) -> Result<Self, InstanceError> {
        let perr = |m: &str| InstanceError::Parse(m.to_string());
        let mut name = String::from("tsplib");
        let mut dim: Option<usize> = None;
        let mut weight_type = String::from("EUC_2D");
        let mut weight_format = String::from("FULL_MATRIX");
        let mut root_id: Option<u64> = None;
        let mut coords: Vec<(u64, f64, f64)> = Vec::new();
        let mut weights: Vec<Rational> = Vec::new();
        let mut penalties: Vec<(u64, Rational)> = Vec::new();
        let mut section = "";
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line == "EOF" {
                continue;
            }
            if let Some((k, v)) = line.split_once(':') {
                let (k, v) = (k.trim(), v.trim());
                match k {
                    "NAME" => name = v.to_string(),
                    "DIMENSION" => dim = Some(v.parse().map_err(|_| perr("DIMENSION"))?),
                    "EDGE_WEIGHT_TYPE" => weight_type = v.to_string(),
                    "EDGE_WEIGHT_FORMAT" => weight_format = v.to_string(),
                    "ROOT" => root_id = Some(v.parse().map_err(|_| perr("ROOT"))?),
                    "TYPE" | "COMMENT" => {}
                    _ => return Err(perr(&format!("unknown key {k}"))),
                }
                section = "";
                continue;
            }
            if line.ends_with("_SECTION") {
                section = match line {
                    "NODE_COORD_SECTION" => "coord",
                    "EDGE_WEIGHT_SECTION" => "weight",
                    "PENALTY_SECTION" => "penalty",
                    _ => return Err(perr(&format!("unknown section {line}"))),
                };
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match section {
                "coord" => {
                    if toks.len() != 3 {
                        return Err(perr("coordinate line"));
                    }
                    let id = toks[0].parse().map_err(|_| perr("node id"))?;
                    let x = toks[1].parse().map_err(|_| perr("x"))?;
                    let y = toks[2].parse().map_err(|_| perr("y"))?;
                    coords.push((id, x, y));
                }
                "weight" => {
                    for t in toks {
                        weights.push(t.parse().map_err(|_| perr("edge weight"))?);
                    }
                }
                "penalty" => {
                    if toks.len() != 2 {
                        return Err(perr("penalty line"));
                    }
                    let id = toks[0].parse().map_err(|_| perr("node id"))?;
                    penalties.push((id, toks[1].parse().map_err(|_| perr("penalty"))?));
                }
                _ => return Err(perr(&format!("unexpected line {line:?}"))),
            }
        }
        let n = dim.ok_or_else(|| perr("missing DIMENSION"))?;
        let ids: Vec<u64> = if coords.is_empty() {
            (1..=n as u64).collect()
        } else {
            coords.iter().map(|c| c.0).collect()
        };
        if ids.len() != n {
            return Err(perr("node count differs from DIMENSION"));
        }
        let mut penalty = vec![Rational::zero(); n];
        for (id, p) in penalties {
            let v = ids.iter().position(|&i| i == id).ok_or_else(|| perr("penalty for unknown node"))?;
            penalty[v] = p;
        }
        let root = root_id.unwrap_or(ids[0]);
        match weight_type.as_str() {
            "EUC_2D" => {
                let pts = coords.iter().map(|c| (c.1, c.2)).collect();
                Instance::from_coords(name, ids, root, pts, penalty)
            }
            "EXPLICIT" => {
                let mut dist = vec![Some(Rational::zero()); n * n];
                let mut it = weights.into_iter();
                let mut next = || it.next().ok_or_else(|| perr("too few edge weights"));
                match weight_format.as_str() {
                    "FULL_MATRIX" => {
                        for i in 0..n {
                            for j in 0..n {
                                dist[i * n + j] = Some(next()?);
                            }
                        }
                    }
                    "LOWER_DIAG_ROW" | "LOWER_ROW" => {
                        let diag = weight_format == "LOWER_DIAG_ROW";
                        for i in 0..n {
                            let end = if diag { i + 1 } else { i };
                            for j in 0..end {
                                let d = next()?;
                                if i != j {
                                    dist[i * n + j] = Some(d.clone());
                                    dist[j * n + i] = Some(d);
                                }
                            }
                        }
                    }
                    f => return Err(perr(&format!("unsupported EDGE_WEIGHT_FORMAT {f}"))),
                }
                Instance::new(name, ids, root, dist, penalty, InstanceKind::MetricComplete)
            }
            t => Err(perr(&format!("unsupported EDGE_WEIGHT_TYPE {t}"))),
        }
    }
}

fn lower_triangle_to_matrix(
    n: usize,
    rows: &[Vec<Option<Rational>>],
) -> Result<Vec<Option<Rational>>, InstanceError> {
    if rows.len() + 1 != n.max(1) {
        return Err(InstanceError::Shape(format!("expected {} dist rows, found {}", n.saturating_sub(1), rows.len())));
    }
    let mut dist = vec![None; n * n];
    for v in 0..n {
        dist[v * n + v] = Some(Rational::zero());
    }
    for (k, row) in rows.iter().enumerate() {
        let i = k + 1;
        if row.len() != i {
            return Err(InstanceError::Shape(format!("dist row {k} must have {i} entries")));
        }
        for (j, d) in row.iter().enumerate() {
            dist[i * n + j] = d.clone();
            dist[j * n + i] = d.clone();
        }
    }
    Ok(dist)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    name: String,
    root: u64,
    #[serde(default, skip_serializing_if = "is_metric")]
    kind: InstanceKind,
    vertices: Vec<VertexRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dist: Option<Vec<Vec<Option<Rational>>>>,
}

fn is_metric(k: &InstanceKind) -> bool {
    *k == InstanceKind::MetricComplete
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    id: u64,
    penalty: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
}

/// All-pairs shortest paths in place; fills `next` (first hop) when given.
fn floyd_warshall(n: usize, dist: &mut [Option<Rational>], mut next: Option<&mut Vec<usize>>) {
    if let Some(nx) = next.as_deref_mut() {
        nx.clear();
        for u in 0..n {
            for v in 0..n {
                nx.push(if dist[u * n + v].is_some() { v } else { usize::MAX });
            }
        }
    }
    for k in 0..n {
        for u in 0..n {
            let Some(duk) = dist[u * n + k].clone() else { continue };
            for v in 0..n {
                let Some(dkv) = dist[k * n + v].as_ref() else { continue };
                let via = &duk + dkv;
                let better = match &dist[u * n + v] {
                    None => true,
                    Some(d) => via < *d,
                };
                if better {
                    dist[u * n + v] = Some(via);
                    if let Some(nx) = next.as_deref_mut() {
                        nx[u * n + v] = nx[u * n + k];
                    }
                }
            }
        }
    }
}

/// Metric closure of a graph together with one shortest path per pair.
#[derive(Clone, Debug)]
pub struct MetricClosure {
    pub metric: Instance,
    next: Vec<usize>,
}

impl MetricClosure {
    /// Vertex sequence of the recorded shortest `u`-`v` path (both ends included).
    pub fn path(&self, u: usize, v: usize) -> Vec<usize> {
        let n = self.metric.n();
        let mut out = vec![u];
        let mut cur = u;
        while cur != v {
            cur = self.next[cur * n + v];
            out.push(cur);
        }
        out
    }
}

pub fn metric_closure(instance: &Instance) -> Result<MetricClosure, InstanceError> {
    let n = instance.n();
    let mut dist = instance.dist.clone();
    let mut next = Vec::new();
    floyd_warshall(n, &mut dist, Some(&mut next));
    if dist.iter().any(|d| d.is_none()) {
        return Err(InstanceError::Disconnected);
    }
    let mut metric = instance.clone();
    metric.dist = dist;
    metric.kind = InstanceKind::MetricComplete;
    metric.explicit_dist = true;
    metric.coords = None;
    Ok(MetricClosure { metric, next })
}

/// Seeded random instance. Root is id 1 with penalty 0; ids are `1..=n`.
pub fn generate_instance(
    n: usize,
    family: Family,
    penalty_scale: &Rational,
    seed: u64,
) -> Result<Instance, InstanceError> {
    if n == 0 {
        return Err(InstanceError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<u64> = (1..=n as u64).collect();
    let name = format!("{}-n{}-s{}", family.name(), n, seed);
    let snap = |x: f64| Rational::from_f64_snapped(x, SNAP);
    let draw_penalties = |rng: &mut ChaCha8Rng| -> Vec<Rational> {
        let scale = penalty_scale.to_f64();
        (0..n)
            .map(|v| if v == 0 { Rational::zero() } else { snap(rng.gen::<f64>() * scale) })
            .collect()
    };
    match family {
        Family::Euclidean => {
            let coords: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    let x = snap(rng.gen::<f64>()).to_f64();
                    let y = snap(rng.gen::<f64>()).to_f64();
                    (x, y)
                })
                .collect();
            let penalty = draw_penalties(&mut rng);
            let mut inst = Instance::from_coords(name, ids, 1, coords, penalty)?;
            inst.explicit_dist = false;
            Ok(inst)
        }
        Family::RandomMetric => {
            let mut dist = vec![Some(Rational::zero()); n * n];
            for i in 0..n {
                for j in 0..i {
                    let d = snap(rng.gen_range(0.05..1.0));
                    dist[i * n + j] = Some(d.clone());
                    dist[j * n + i] = Some(d);
                }
            }
            floyd_warshall(n, &mut dist, None);
            let penalty = draw_penalties(&mut rng);
            Instance::new(name, ids, 1, dist, penalty, InstanceKind::MetricComplete)
        }
        Family::SparseGraph => {
            let mut dist = vec![None; n * n];
            for v in 0..n {
                dist[v * n + v] = Some(Rational::zero());
            }
            let put = |dist: &mut Vec<Option<Rational>>, i: usize, j: usize, d: Rational| {
                dist[i * n + j] = Some(d.clone());
                dist[j * n + i] = Some(d);
            };
            for i in 1..n {
                let j = rng.gen_range(0..i);
                let d = snap(rng.gen_range(0.05..1.0));
                put(&mut dist, i, j, d);
            }
            let p = (2.0 / n as f64).min(1.0);
            for i in 0..n {
                for j in 0..i {
                    let roll = rng.gen::<f64>();
                    let d = snap(rng.gen_range(0.05..1.0));
                    if dist[i * n + j].is_none() && roll < p {
                        put(&mut dist, i, j, d);
                    }
                }
            }
            let penalty = draw_penalties(&mut rng);
            Instance::new(name, ids, 1, dist, penalty, InstanceKind::GeneralGraph)
        }
    }
}

/// Maps tours on the root-copy instance back to the original.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BackMap {
    pub root: usize,
    pub copy: usize,
}

impl BackMap {
    /// Contract the copy into the root and shortcut repeated visits.
    pub fn unsplit(&self, order: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.copy + 1];
        let mut out = Vec::with_capacity(order.len());
        for &v in order {
            let v = if v == self.copy { self.root } else { v };
            if !seen[v] {
                seen[v] = true;
                out.push(v);
            }
        }
        if out.first() != Some(&self.root) {
            if let Some(pos) = out.iter().position(|&v| v == self.root) {
                out.rotate_left(pos);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RootSplitError {
    #[error("solution is not a PCTSP point")]
    WrongRelaxation,
    #[error("root degree {0} exceeds 2")]
    RootDegree(Rational),
}

/// Append a copy `r'` of the root with the root's distances, move half of
/// each root edge onto `r'`, and put `2 - x(delta(r))/2` on `e0 = {r, r'}`.
pub fn root_split_transform(
    instance: &Instance,
    sol: &LpSolution,
) -> Result<(Instance, LpSolution, BackMap), RootSplitError> {
    if sol.relaxation != Relaxation::Pctsp {
        return Err(RootSplitError::WrongRelaxation);
    }
    let n = instance.n();
    let r = instance.root;
    let two = Rational::from_integer(2);
    let droot = sol.x.degree(r);
    if droot > two {
        return Err(RootSplitError::RootDegree(droot));
    }
    let copy = n;
    let m = n + 1;
    let mut dist = vec![Some(Rational::zero()); m * m];
    for u in 0..m {
        for v in 0..m {
            let a = if u == copy { r } else { u };
            let b = if v == copy { r } else { v };
            dist[u * m + v] = Some(if a == b { Rational::zero() } else { instance.dist(a, b).clone() });
        }
    }
    let mut ids = instance.ids.clone();
    ids.push(instance.ids.iter().max().copied().unwrap_or(0) + 1);
    let mut penalty = instance.penalty.clone();
    penalty.push(Rational::zero());
    let aux = Instance {
        name: format!("{}+root-copy", instance.name),
        ids,
        root: r,
        dist,
        penalty,
        kind: InstanceKind::MetricComplete,
        coords: None,
        explicit_dist: true,
    };
    let half = Rational::new(1, 2);
    let mut x = EdgeWeights::new(m);
    for ((u, v), w) in sol.x.support() {
        if u == r || v == r {
            let other = if u == r { v } else { u };
            let h = &w * &half;
            x.set(r, other, h.clone());
            x.set(copy, other, h);
        } else {
            x.set(u, v, w);
        }
    }
    x.set(r, copy, &two - &(&droot * &half));
    let mut y = sol.y.clone();
    y.push(Rational::one());
    let objective = aux.cost_of(&x)
        + aux
            .penalty
            .iter()
            .zip(&y)
            .map(|(p, yv)| p * &(Rational::one() - yv))
            .sum::<Rational>();
    let out = LpSolution {
        relaxation: Relaxation::Pctsp,
        root: r,
        x,
        y,
        objective,
        certified_optimal: false,
    };
    Ok((aux, out, BackMap { root: r, copy }))
}
