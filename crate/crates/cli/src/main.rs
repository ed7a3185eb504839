mod bench;
mod log;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use prizeloop::algorithms::constants::{
    b_min, classic_threshold_alpha, balanced_gamma, fixed_threshold_alpha, verify_constants, DEFAULT_B,
};
use prizeloop::algorithms::{
    classic_gamma, run_alg1, run_alg1_sampled, run_alg1_traced, run_exact, run_threshold_classic, run_tree2_pcst_with,
    run_tree2_pctsp_with, select_threshold_deterministic, AlgError, Alg1Options, Mode, TourResult, GAMMA_DENOMINATOR,
};
use prizeloop::instance::{generate_instance, Family, Format, Instance, InstanceKind};
use prizeloop::lp::{solve_relaxation_with_stats, Relaxation};
use prizeloop::Rational;

/// Prize-collecting TSP and Steiner tree solver.
#[derive(Parser, Debug)]
#[command(name = "prizeloop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one instance and write the result record.
    Solve(SolveArgs),
    /// Solve the LP relaxation.
    Lp(LpArgs),
    /// Boost, split and decompose an LP solution at a fixed threshold.
    Decompose(DecomposeArgs),
    /// Exact optimum for small instances.
    Oracle(InstanceArgs),
    /// Ratio table over generated instances.
    Bench(bench::BenchArgs),
    /// Evaluate the analysis constants.
    Constants(ConstantsArgs),
    /// Generate a random instance.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct InstanceArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Json, env = "PRIZELOOP_FORMAT")]
    format: FormatArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Tsplib,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Alg1,
    ThresholdClassic,
    Tree2,
    Pcst2,
    Exact,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Randomized,
    Deterministic,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Randomized => Mode::Randomized,
            ModeArg::Deterministic => Mode::Deterministic,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum GammaStrategy {
    Fixed(Rational),
    SweepYv,
    SampleB(f64),
}

impl FromStr for GammaStrategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "sweep-yv" {
            return Ok(GammaStrategy::SweepYv);
        }
        if let Some(v) = s.strip_prefix("fixed:") {
            let g = parse_gamma(v)?;
            return Ok(GammaStrategy::Fixed(g));
        }
        if let Some(v) = s.strip_prefix("sample-b:") {
            let b: f64 = v.parse().map_err(|_| format!("bad b value {v:?}"))?;
            prizeloop::algorithms::constants::check_b(b).map_err(|e| e.to_string())?;
            return Ok(GammaStrategy::SampleB(b));
        }
        Err(format!("unknown gamma strategy {s:?}; expected fixed:<g>, sweep-yv or sample-b:<b>"))
    }
}

/// Accepts `p/q` or a decimal, snapped to denominator at most 10^6.
fn parse_gamma(v: &str) -> Result<Rational, String> {
    let g = if v.contains('/') {
        Rational::from_str(v).map_err(|_| format!("bad gamma {v:?}"))?
    } else {
        let f: f64 = v.parse().map_err(|_| format!("bad gamma {v:?}"))?;
        if !f.is_finite() {
            return Err(format!("bad gamma {v:?}"));
        }
        Rational::from_f64_snapped(f, GAMMA_DENOMINATOR)
    };
    if !g.is_positive() || g > Rational::one() {
        return Err(format!("gamma {v} outside (0, 1]"));
    }
    Ok(g)
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    input: InstanceArgs,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Alg1, env = "PRIZELOOP_ALGORITHM")]
    algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Deterministic, env = "PRIZELOOP_MODE")]
    mode: ModeArg,
    /// fixed:<g>, sweep-yv or sample-b:<b>.
    #[arg(long, default_value = "sweep-yv", env = "PRIZELOOP_GAMMA_STRATEGY")]
    gamma_strategy: GammaStrategy,
    #[arg(long, default_value_t = 0, env = "PRIZELOOP_SEED")]
    seed: u64,
    #[arg(long, default_value_t = prizeloop::algorithms::DEFAULT_REPEATS, env = "PRIZELOOP_REPEATS")]
    repeats: usize,
    /// Result JSON path; stdout when absent.
    #[arg(long, short, env = "PRIZELOOP_OUTPUT")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LpArgs {
    #[command(flatten)]
    input: InstanceArgs,
    /// Defaults to pctsp for metric instances and pcst for graphs.
    #[arg(long, value_enum)]
    relaxation: Option<RelaxationArg>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RelaxationArg {
    Pctsp,
    Pcst,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[command(flatten)]
    input: InstanceArgs,
    #[arg(long, default_value = "1", value_parser = parse_gamma)]
    gamma: Rational,
    /// Include walks, the rounded multigraph and the odd join.
    #[arg(long)]
    trace: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    #[arg(long, default_value_t = DEFAULT_B)]
    b: f64,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, default_value = "euclidean")]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0, env = "PRIZELOOP_SEED")]
    seed: u64,
    #[arg(long, default_value = "1")]
    penalty_scale: Rational,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Failure split by exit code.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Internal(String),
}

impl From<AlgError> for Failure {
    fn from(e: AlgError) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

impl From<prizeloop::instance::InstanceError> for Failure {
    fn from(e: prizeloop::instance::InstanceError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

fn load(args: &InstanceArgs) -> Result<Instance, Failure> {
    let format = match args.format {
        FormatArg::Json => Format::Json,
        FormatArg::Tsplib => Format::TsplibPc,
    };
    Ok(Instance::load(&args.instance, format)?)
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, format!("{text}\n"))?,
        None => {
            use std::io::Write;
            // A closed pipe (e.g. `| head`) is not an error for a report.
            if let Err(e) = writeln!(std::io::stdout(), "{text}") {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(())
}

fn default_relaxation(instance: &Instance) -> Relaxation {
    match instance.kind() {
        InstanceKind::MetricComplete => Relaxation::Pctsp,
        InstanceKind::GeneralGraph => Relaxation::Pcst,
    }
}

fn solve(args: &SolveArgs) -> Result<(), Failure> {
    let instance = load(&args.input)?;
    log::event("load", json!({"instance": instance.name(), "n": instance.n()}));
    if args.algorithm == AlgorithmArg::Exact {
        // Guard before the LP so oversized inputs fail fast.
        let limit = match instance.kind() {
            InstanceKind::MetricComplete => prizeloop::oracle::PCTSP_LIMIT,
            InstanceKind::GeneralGraph => prizeloop::oracle::PCST_LIMIT,
        };
        if instance.n() > limit {
            return Err(Failure::Validation(format!("instance too large for oracle ({} > {limit})", instance.n())));
        }
    }
    let relaxation = match args.algorithm {
        AlgorithmArg::Pcst2 => Relaxation::Pcst,
        AlgorithmArg::Exact => default_relaxation(&instance),
        _ => Relaxation::Pctsp,
    };
    let (sol, stats) = solve_relaxation_with_stats(&instance, relaxation).map_err(AlgError::from)?;
    log::event("lp", json!({"value": sol.objective, "rounds": stats.rounds, "rows": stats.rows, "pivots": stats.pivots}));
    let opts = Alg1Options { mode: args.mode.into(), seed: args.seed, repeats: args.repeats };
    let result: TourResult = match args.algorithm {
        AlgorithmArg::Alg1 => match &args.gamma_strategy {
            GammaStrategy::Fixed(g) => run_alg1(&instance, &sol, g, &opts)?,
            GammaStrategy::SweepYv => select_threshold_deterministic(&instance, &sol, &opts)?,
            GammaStrategy::SampleB(b) => run_alg1_sampled(&instance, &sol, *b, &opts)?,
        },
        AlgorithmArg::ThresholdClassic => {
            let g = match &args.gamma_strategy {
                GammaStrategy::Fixed(g) => g.clone(),
                _ => classic_gamma(),
            };
            run_threshold_classic(&instance, &sol, &g)?
        }
        AlgorithmArg::Tree2 => run_tree2_pctsp_with(&instance, &sol)?,
        AlgorithmArg::Pcst2 => {
            if instance.kind() != InstanceKind::GeneralGraph {
                return Err(AlgError::NotGraph.into());
            }
            run_tree2_pcst_with(&instance, &sol)?
        }
        AlgorithmArg::Exact => run_exact(&instance, sol.objective.clone())?,
    };
    result.audit(&instance).map_err(Failure::Internal)?;
    let record = result.to_json(&instance);
    emit(&serde_json::to_string(&record).expect("json"), args.output.as_deref())?;
    let summary = format!(
        "{} {}: objective {} lp {} ratio {:.6}",
        instance.name(),
        record["algorithm"].as_str().unwrap_or(""),
        result.objective(),
        result.lp_value,
        result.ratio
    );
    if args.output.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn lp(args: &LpArgs) -> Result<(), Failure> {
    let instance = load(&args.input)?;
    let relaxation = match args.relaxation {
        Some(RelaxationArg::Pctsp) => Relaxation::Pctsp,
        Some(RelaxationArg::Pcst) => Relaxation::Pcst,
        None => default_relaxation(&instance),
    };
    let (sol, stats) = solve_relaxation_with_stats(&instance, relaxation).map_err(AlgError::from)?;
    log::event("lp", json!({"value": sol.objective, "rounds": stats.rounds, "rows": stats.rows, "pivots": stats.pivots}));
    emit(&sol.to_json(&instance), args.output.as_deref())
}

fn decompose(args: &DecomposeArgs) -> Result<(), Failure> {
    let instance = load(&args.input)?;
    let (sol, _) = solve_relaxation_with_stats(&instance, Relaxation::Pctsp).map_err(AlgError::from)?;
    let (result, trace) = run_alg1_traced(&instance, &sol, &args.gamma, &Alg1Options::default())?;
    let value = if args.trace {
        json!({"result": result.to_json(&instance), "trace": trace})
    } else {
        json!({
            "gamma": trace.gamma,
            "anchors": trace.anchors,
            "trees": trace.trees,
            "split_ops": trace.split_ops,
        })
    };
    emit(&serde_json::to_string_pretty(&value).expect("json"), args.output.as_deref())
}

fn oracle(args: &InstanceArgs) -> Result<(), Failure> {
    let instance = load(args)?;
    let exact = match instance.kind() {
        InstanceKind::MetricComplete => prizeloop::oracle::exact_pctsp(&instance),
        InstanceKind::GeneralGraph => prizeloop::oracle::exact_pcst(&instance),
    }
    .map_err(|e| Failure::Validation(e.to_string()))?;
    emit(&serde_json::to_string(&json!({"instance": instance.name(), "value": exact.value, "witness": exact.witness})).expect("json"), None)
}

fn constants(args: &ConstantsArgs) -> Result<(), Failure> {
    let c = verify_constants(args.b).map_err(|e| Failure::Validation(e.to_string()))?;
    println!("b                 {:.10}", c.b);
    println!("I_b               {:.15}", c.i_b);
    println!("J_b               {:.15}", c.j_b);
    println!("quadrature error  {:.3e}", c.quad_error);
    println!("tour term         {:.12}  (3 J_b / 2 I_b)", c.tour_term);
    println!("max theta_b       {:.12}  at y = {:.6} over {} grid points", c.theta_max, c.theta_argmax, c.grid_points);
    println!("penalty term      {:.12}  (max theta_b / 2 I_b)", c.penalty_term);
    println!("alpha             {:.12}", c.alpha);
    println!("alpha upper       {:.12}", c.alpha_upper);
    let g = balanced_gamma();
    println!("fixed gamma {:.6}: alpha {:.12}", g, fixed_threshold_alpha(g));
    println!("classic gamma 0.6: alpha {:.12}", classic_threshold_alpha(0.6));
    if c.alpha_upper < 1.774 {
        println!("alpha < 1.774: yes");
    } else {
        println!("alpha < 1.774: no");
    }
    println!("b range [{:.12}, 1)", b_min());
    Ok(())
}

fn gen(args: &GenArgs) -> Result<(), Failure> {
    let inst = generate_instance(args.n, args.family, &args.penalty_scale, args.seed)?;
    emit(&inst.to_json(), args.output.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Lp(a) => lp(a),
        Command::Decompose(a) => decompose(a),
        Command::Oracle(a) => oracle(a),
        Command::Bench(a) => bench::run(a),
        Command::Constants(a) => constants(a),
        Command::Gen(a) => gen(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            log::error("validation", &msg);
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            log::error("internal", &msg);
            eprintln!("internal error: {msg}");
            eprintln!("{cli:#?}");
            ExitCode::from(3)
        }
    }
}
