mod parse;

use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use coupling_lab::bernstein::log_grid;
use coupling_lab::bounds::{
    asymptotic_rate, bound_integral_report, bound_product, c_constant, lower_bound_integral_mode,
    tv_bound_general, tv_bound_subordinate, BoundRequest, CMode, PrefactorMode,
};
use coupling_lab::coupling::{distance, sample_tx};
use coupling_lab::densities::{
    density_1d, tv_exact_from_grid, tv_fourier_quadrature, tv_halfspace_lower, GridParams,
};
use coupling_lab::harness::{
    configured_threads, make_rng_stream, run_experiment_with_threads, ExperimentConfig, ExperimentKind,
    ExperimentReport,
};
use coupling_lab::harness::experiments::{fmt_f64, write_density_csv};
use coupling_lab::subordinators::{StrategyName, SubordinatorSampler};
use coupling_lab::{BernsteinSpec, Family, LabError};

#[derive(Parser)]
#[command(name = "coupling-lab", version, about = "Coupling times and total-variation bounds for subordinate Brownian motion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a total-variation bound or one of its ingredients.
    Bound(BoundArgs),
    /// Sample reflection-subordinate coupling times.
    SimulateCoupling(SimulateArgs),
    /// Exact total variation in one dimension from the density.
    Tv(TvArgs),
    /// Laplace-transform and complete-monotonicity checks.
    Validate(ValidateArgs),
    /// Run experiments from JSON configuration files.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Run one configuration, writing a CSV and a JSON report.
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundOp {
    /// min(2, prefactor·|x−y|·I(t)).
    Subordinate,
    /// I(t) = ∫ r^{-1/2} e^{-c t f(r)} dr with error estimate.
    Integral,
    /// Minimum of the integral term and C(1+|x−y|)/√t, with c = c(d).
    General,
    /// |x−y|·√(f^{-1}(1/t)) and its hypothesis checks.
    Rate,
    /// Jensen lower bound on I(t) (finite f'(0+) only).
    Lower,
    /// Coordinatewise product bound; one --spec per coordinate.
    Product,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Corrected,
    AsPrinted,
}

impl From<Mode> for PrefactorMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Corrected => PrefactorMode::Corrected,
            Mode::AsPrinted => PrefactorMode::AsPrinted,
        }
    }
}

#[derive(Args)]
struct Points {
    /// Starting point x (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    x: Vec<f64>,
    /// Starting point y (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1")]
    y: Vec<f64>,
}

impl Points {
    fn check(&self) -> Result<f64, String> {
        if self.x.len() != self.y.len() {
            return Err(format!("x has dimension {} but y has {}", self.x.len(), self.y.len()));
        }
        Ok(distance(&self.x, &self.y))
    }
}

#[derive(Args)]
struct BoundArgs {
    #[arg(value_enum, default_value = "subordinate")]
    op: BoundOp,
    /// Laplace exponent, e.g. `stable_pow:alpha=1`; repeat for `product`.
    #[arg(long, required = true, value_parser = parse::family)]
    spec: Vec<Family>,
    #[arg(long)]
    t: f64,
    #[command(flatten)]
    points: Points,
    #[arg(long, value_enum, default_value = "corrected")]
    mode: Mode,
    /// Use the rate c(d) in the exponent instead of 1.
    #[arg(long)]
    general_levy: bool,
    /// Envelope constant C of the general and product bounds.
    #[arg(long, default_value_t = f64::INFINITY)]
    c_env: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_parser = parse::family)]
    spec: Family,
    /// Sampling strategy, e.g. `compound_poisson_approx:epsilon=1e-3`.
    #[arg(long, value_parser = parse::strategy, default_value = "auto")]
    strategy: StrategyName,
    #[command(flatten)]
    points: Points,
    /// Times at which to report 2·P(T > t).
    #[arg(long, value_delimiter = ',', default_value = "1,2,5,10,20")]
    t_grid: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print this many raw draws `tb,tx,step` instead of the survival table.
    #[arg(long)]
    draws: Option<usize>,
    /// Relative bracket width of the first-passage search (raw draws).
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Write the survival CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TvArgs {
    #[arg(long, value_parser = parse::family)]
    spec: Family,
    #[arg(long)]
    t: f64,
    /// Shift |x − y|.
    #[arg(long, default_value_t = 1.0)]
    h: f64,
    /// Also evaluate the Fourier quadrature oracle (slow for small t).
    #[arg(long)]
    quadrature: bool,
    /// Write the density grid as `z,p` rows.
    #[arg(long)]
    density_csv: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, value_parser = parse::family)]
    spec: Family,
    #[arg(long, value_parser = parse::strategy, default_value = "auto")]
    strategy: StrategyName,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,4")]
    lambdas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,1,10")]
    times: Vec<f64>,
    /// Highest derivative order in the sign-pattern check.
    #[arg(long, default_value_t = 4)]
    order: usize,
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Directory for outputs not named in the config.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Worker count (default: COUPLING_LAB_THREADS or all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bound(a) => bound(a),
        Command::SimulateCoupling(a) => simulate(a),
        Command::Tv(a) => tv(a),
        Command::Validate(a) => validate(a),
        Command::Experiment(ExperimentCommand::Run(a)) => run(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type Outcome = Result<bool, String>;

fn lab<T>(r: coupling_lab::Result<T>) -> Result<T, String> {
    r.map_err(|e: LabError| e.to_string())
}

fn spec_of(f: Family) -> Result<BernsteinSpec, String> {
    lab(BernsteinSpec::new(f))
}

/// Writes to stdout; a closed pipe (`| head`) ends the program quietly.
fn emit(text: &str) {
    if let Err(e) = std::io::stdout().lock().write_all(text.as_bytes()) {
        if e.kind() != ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
        std::process::exit(0);
    }
}

macro_rules! outln {
    ($($arg:tt)*) => { emit(&format!("{}\n", format_args!($($arg)*))) };
}

fn print_json(v: &Value) {
    outln!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn bound(a: BoundArgs) -> Outcome {
    let h = a.points.check()?;
    let d = a.points.x.len();
    let mode: PrefactorMode = a.mode.into();
    let specs = a.spec.iter().map(|f| spec_of(*f)).collect::<Result<Vec<_>, _>>()?;
    if !matches!(a.op, BoundOp::Product) && specs.len() != 1 {
        return Err("exactly one --spec expected".into());
    }
    let spec = specs[0].clone();
    let c_mode = if a.general_levy { CMode::GeneralLevy } else { CMode::UnitRate };
    let req = BoundRequest::new(spec.clone(), a.t, h).dimension(d).mode(mode).c_mode(c_mode);
    let c_rate = if a.general_levy { c_constant(d) } else { 1.0 };
    let op = a.op.to_possible_value().expect("named").get_name().to_string();
    let mut out = json!({
        "op": op,
        "spec": spec.label(),
        "t": a.t,
        "distance": h,
        "dimension": d,
        "prefactor_mode": mode,
    });
    match a.op {
        BoundOp::Subordinate => {
            out["value"] = json!(lab(tv_bound_subordinate(&req))?);
            out["c_mode"] = json!(c_mode);
        }
        BoundOp::Integral => {
            let r = lab(bound_integral_report(&spec, a.t, c_rate))?;
            out["rate_constant"] = json!(c_rate);
            out["integral"] = serde_json::to_value(r).expect("json");
        }
        BoundOp::General => {
            out["c_env"] = json!(finite_or_null(a.c_env));
            out["bound"] = serde_json::to_value(lab(tv_bound_general(&req, a.c_env))?).expect("json");
        }
        BoundOp::Rate => {
            out["rate"] = serde_json::to_value(lab(asymptotic_rate(&spec, a.t, h))?).expect("json");
        }
        BoundOp::Lower => {
            out["lower_bound_integral"] = json!(lower_bound_integral_mode(&spec, a.t, mode));
            out["fprime_at_zero"] = serde_json::to_value(spec.fprime_at_zero()).expect("json");
        }
        BoundOp::Product => {
            let specs = if specs.len() == 1 { vec![spec; d] } else { specs };
            let dist: Vec<f64> = a.points.x.iter().zip(&a.points.y).map(|(p, q)| (p - q).abs()).collect();
            out["c_env"] = json!(finite_or_null(a.c_env));
            out["value"] = json!(lab(bound_product(&specs, a.t, &dist, d, a.c_env, mode))?);
        }
    }
    print_json(&out);
    Ok(true)
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn simulate(a: SimulateArgs) -> Outcome {
    a.points.check()?;
    if let Some(m) = a.draws {
        let sampler = lab(SubordinatorSampler::new(spec_of(a.spec)?, a.strategy))?;
        let mut rng = make_rng_stream(a.seed, "simulate-coupling", 0);
        outln!("tb,tx,step");
        for _ in 0..m {
            let d = lab(sample_tx(&sampler, &a.points.x, &a.points.y, a.tol, &mut rng))?;
            outln!("{},{},{}", fmt_f64(d.tb), fmt_f64(d.time()), fmt_f64(d.tx.step));
        }
        return Ok(true);
    }
    let mut cfg = ExperimentConfig::new(ExperimentKind::CouplingSurvival, Some(a.spec), a.t_grid);
    cfg.strategy = a.strategy;
    cfg.x = a.points.x;
    cfg.y = a.points.y;
    cfg.n = a.n;
    cfg.seed = a.seed;
    let report = lab(run_experiment_with_threads(&cfg, configured_threads()))?;
    if let Some(e) = &report.error {
        return Err(e.clone());
    }
    match &a.out {
        Some(p) => lab(std::fs::write(p, report.csv()).map_err(LabError::from))?,
        None => emit(&report.csv()),
    }
    for c in &report.criteria {
        eprintln!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(true)
}

fn tv(a: TvArgs) -> Outcome {
    let spec = spec_of(a.spec)?;
    let grid = lab(density_1d(&spec, a.t, GridParams::default()))?;
    let exact = lab(tv_exact_from_grid(&grid, a.h))?;
    let lower = lab(tv_halfspace_lower(&spec, a.t, &[0.0], &[a.h]))?;
    let upper = tv_bound_subordinate(&BoundRequest::new(spec.clone(), a.t, a.h)).ok();
    let mut out = json!({
        "spec": spec.label(),
        "t": a.t,
        "h": a.h,
        "tv": exact.value,
        "tv_direct": exact.direct,
        "discrepancy": exact.discrepancy,
        "halfspace_lower": lower,
        "upper_bound": upper,
        "grid": {
            "points": 2 * grid.k() + 1,
            "spacing": grid.h,
            "half_width": grid.half_width,
            "truncation_error": grid.truncation_error,
            "clipped": grid.clipped,
            "raw_mass": grid.raw_mass,
        },
    });
    if a.quadrature {
        out["tv_quadrature"] = json!(lab(tv_fourier_quadrature(&spec, a.t, a.h))?);
    }
    if let Some(p) = &a.density_csv {
        lab(write_density_csv(&grid.points(), p))?;
        out["density_csv"] = json!(p.display().to_string());
    }
    print_json(&out);
    Ok(true)
}

fn validate(a: ValidateArgs) -> Outcome {
    let spec = spec_of(a.spec)?;
    let mut ok = true;
    let cm = lab(spec.check_complete_monotone(&log_grid(1e-4, 1e4, 81), a.order))?;
    ok &= cm.pass;
    outln!(
        "{} Bernstein sign pattern up to order {}: worst violation {:.3e}{}",
        verdict(cm.pass),
        a.order,
        cm.worst_violation,
        cm.worst_at.map_or(String::new(), |(l, k)| format!(" at λ={l:e}, k={k}"))
    );
    let sampler = lab(SubordinatorSampler::new(spec.clone(), a.strategy))?;
    outln!("strategy {:?}", sampler.strategy());
    let mut idx = 0;
    for &t in &a.times {
        for &l in &a.lambdas {
            let mut rng = make_rng_stream(a.seed, "validate", idx);
            idx += 1;
            let c = lab(sampler.validate_laplace(l, t, a.n, &mut rng))?;
            ok &= c.pass;
            let se = c.stderr.max(c.null_stderr);
            let z = if se > 0.0 { (c.mc_mean - c.target) / se } else { 0.0 };
            outln!(
                "{} Laplace λ={l} t={t}: mean {:.6e} target {:.6e} z {z:+.2}",
                verdict(c.pass),
                c.mc_mean,
                c.target
            );
        }
    }
    Ok(ok)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn default_output(dir: &Path, id: &str, ext: &str) -> PathBuf {
    dir.join(format!("{id}.{ext}"))
}

fn run(a: RunArgs) -> Outcome {
    let mut cfg = lab(ExperimentConfig::from_path(&a.config))?;
    let id = cfg.experiment_id().to_string();
    cfg.output.csv.get_or_insert_with(|| default_output(&a.out_dir, &id, "csv"));
    cfg.output.report.get_or_insert_with(|| default_output(&a.out_dir, &id, "json"));
    let threads = a.threads.unwrap_or_else(configured_threads);
    let report: ExperimentReport = lab(run_experiment_with_threads(&cfg, threads))?;
    lab(report.write_outputs())?;
    for c in &report.criteria {
        outln!("{} {}: {}", verdict(c.pass), c.name, c.detail);
    }
    for w in &report.warnings {
        outln!("warning: {w}");
    }
    if let Some(e) = &report.error {
        outln!("error: {e}");
    }
    outln!(
        "{} rows in {:.2}s -> {}, {}",
        report.rows.len(),
        report.wall_time_s,
        cfg.output.csv.as_ref().expect("set").display(),
        cfg.output.report.as_ref().expect("set").display()
    );
    Ok(report.pass)
}
