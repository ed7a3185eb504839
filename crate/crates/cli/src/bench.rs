use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use prizeloop::algorithms::{
    classic_gamma, run_threshold_classic, run_tree2_pctsp_with, select_threshold_deterministic, Alg1Options,
};
use prizeloop::instance::{generate_instance, Family};
use prizeloop::lp::{solve_relaxation, Relaxation};
use prizeloop::oracle::{exact_pctsp, PCTSP_LIMIT};
use prizeloop::Rational;

use crate::{log, Failure};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FamilyArg {
    Euclidean,
    RandomMetric,
    /// Alternate Euclidean and random-metric instances.
    Mixed,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Mixed)]
    family: FamilyArg,
    #[arg(long, default_value_t = 6)]
    n_min: usize,
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, default_value_t = 0, env = "PRIZELOOP_SEED")]
    seed: u64,
    /// Penalty scales, cycled over the instances.
    #[arg(long, value_delimiter = ',', default_value = "1/4,1,3")]
    penalty_scales: Vec<Rational>,
    /// Add the exact optimum and check it against every column.
    #[arg(long)]
    with_exact: bool,
    /// CSV path; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON path for rows plus aggregates.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub instance: String,
    pub family: &'static str,
    pub n: usize,
    pub seed: u64,
    pub penalty_scale: String,
    pub lp_value: String,
    pub alg1_objective: String,
    pub alg1_ratio: f64,
    pub alg1_gamma: f64,
    pub classic_objective: String,
    pub classic_ratio: f64,
    pub tree2_objective: String,
    pub tree2_ratio: f64,
    pub exact_value: Option<String>,
    pub exact_gap: Option<f64>,
}

fn bench_row(args: &BenchArgs, i: usize) -> Result<Row, Failure> {
    let n = args.n_min + i % (args.n_max - args.n_min + 1);
    let family = match args.family {
        FamilyArg::Euclidean => Family::Euclidean,
        FamilyArg::RandomMetric => Family::RandomMetric,
        FamilyArg::Mixed if i % 2 == 0 => Family::Euclidean,
        FamilyArg::Mixed => Family::RandomMetric,
    };
    let scale = &args.penalty_scales[i % args.penalty_scales.len()];
    let seed = args.seed.wrapping_add(i as u64);
    let inst = generate_instance(n, family, scale, seed)?;
    let sol = solve_relaxation(&inst, Relaxation::Pctsp).map_err(prizeloop::algorithms::AlgError::from)?;
    let alg1 = select_threshold_deterministic(&inst, &sol, &Alg1Options::default())?;
    let classic = run_threshold_classic(&inst, &sol, &classic_gamma())?;
    let tree2 = run_tree2_pctsp_with(&inst, &sol)?;
    for r in [&alg1, &classic, &tree2] {
        r.audit(&inst).map_err(Failure::Internal)?;
    }
    let exact = if args.with_exact {
        let v = exact_pctsp(&inst).map_err(|e| Failure::Validation(e.to_string()))?.value;
        if sol.objective > v {
            return Err(Failure::Internal(format!("{}: LP value {} above optimum {v}", inst.name(), sol.objective)));
        }
        for r in [&alg1, &classic, &tree2] {
            if r.objective() < v {
                return Err(Failure::Internal(format!("{}: {} below optimum {v}", inst.name(), r.algorithm.name())));
            }
        }
        Some(v)
    } else {
        None
    };
    log::event("bench_row", json!({"instance": inst.name(), "alg1_ratio": alg1.ratio}));
    Ok(Row {
        instance: inst.name().to_string(),
        family: family.name(),
        n,
        seed,
        penalty_scale: scale.to_string(),
        lp_value: sol.objective.to_string(),
        alg1_objective: alg1.objective().to_string(),
        alg1_ratio: alg1.ratio,
        alg1_gamma: alg1.gamma.unwrap_or(f64::NAN),
        classic_objective: classic.objective().to_string(),
        classic_ratio: classic.ratio,
        tree2_objective: tree2.objective().to_string(),
        tree2_ratio: tree2.ratio,
        exact_gap: exact.as_ref().map(|v| prizeloop::algorithms::ratio(v, &sol.objective)),
        exact_value: exact.map(|v| v.to_string()),
    })
}

fn stats(values: impl Iterator<Item = f64>) -> serde_json::Value {
    let v: Vec<f64> = values.collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    json!({"max": max, "mean": mean})
}

pub fn rows(args: &BenchArgs) -> Result<Vec<Row>, Failure> {
    if args.n_min == 0 || args.n_min > args.n_max || args.count == 0 || args.penalty_scales.is_empty() {
        return Err(Failure::Validation("invalid range: need 1 <= n-min <= n-max, count >= 1 and a penalty scale".into()));
    }
    if args.with_exact && args.n_max > PCTSP_LIMIT {
        return Err(Failure::Validation(format!("invalid range: --with-exact needs n-max <= {PCTSP_LIMIT}")));
    }
    (0..args.count).into_par_iter().map(|i| bench_row(args, i)).collect()
}

pub fn run(args: &BenchArgs) -> Result<(), Failure> {
    let rows = rows(args)?;
    let mut out = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        out.serialize(r).map_err(|e| Failure::Internal(e.to_string()))?;
    }
    let text = String::from_utf8(out.into_inner().map_err(|e| Failure::Internal(e.to_string()))?).expect("utf8");
    match &args.csv {
        Some(p) => std::fs::write(p, &text)?,
        None => print!("{text}"),
    }
    let mut aggregate = json!({
        "alg1_ratio": stats(rows.iter().map(|r| r.alg1_ratio)),
        "classic_ratio": stats(rows.iter().map(|r| r.classic_ratio)),
        "tree2_ratio": stats(rows.iter().map(|r| r.tree2_ratio)),
    });
    if args.with_exact {
        aggregate["exact_gap"] = stats(rows.iter().filter_map(|r| r.exact_gap));
    }
    if let Some(p) = &args.json {
        let doc = json!({"rows": rows, "aggregate": aggregate});
        std::fs::write(p, serde_json::to_string_pretty(&doc).expect("json") + "\n")?;
    }
    eprintln!("{}", json!({"level": "summary", "count": rows.len(), "aggregate": aggregate}));
    Ok(())
}
