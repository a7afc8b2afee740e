//! Subcommand implementations for the `skm` binary.
//!
//! Each command returns the process exit code on success (0, or 3 for a
//! certify run that ends without a certificate) or a [`CmdError`] that the
//! caller maps onto the exit-code contract: usage problems exit 1, runtime
//! failures exit 2.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::anyhow;
use clap::{Args, ValueEnum};
use skm_core::harness::{self, CellAggregate, CompareSpec, SweepSpec, TrialOutcome};
use skm_core::problems;
use skm_core::solvers::{skm_solve, DEFAULT_RESIDUAL_THRESHOLD};
use skm_core::theory;
use skm_core::{
    FeasibilityProblem, HaltReason, HaltingRule, HarnessError, RunTrace, SkmConfig, SolverError,
    Vector,
};

pub enum CmdError {
    /// Bad flags or flag-derived values; exits 1.
    Usage(String),
    /// Failures while doing the work: unreadable files, invalid file
    /// contents, numerical dead ends; exits 2.
    Runtime(anyhow::Error),
}

pub type CmdResult = Result<u8, CmdError>;

fn usage(msg: impl Into<String>) -> CmdError {
    CmdError::Usage(msg.into())
}

fn runtime(err: impl Into<anyhow::Error>) -> CmdError {
    CmdError::Runtime(err.into())
}

fn config_usage(err: SolverError) -> CmdError {
    usage(err.to_string())
}

/// Harness validation failures echo bad flags; real work failures do not.
fn harness_error(err: HarnessError) -> CmdError {
    match err {
        HarnessError::Io(inner) => runtime(inner),
        HarnessError::Pool(_) | HarnessError::Problem(_) => CmdError::Runtime(anyhow!("{err}")),
        other => usage(other.to_string()),
    }
}

fn open_input(path: &Path) -> Result<BufReader<File>, CmdError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CmdError::Runtime(anyhow!("cannot open {}: {e}", path.display())))
}

fn create_output(path: &Path) -> Result<BufWriter<File>, CmdError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CmdError::Runtime(anyhow!("cannot create {}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<FeasibilityProblem, CmdError> {
    let built = problems::read_problem(open_input(path)?)
        .map_err(|e| CmdError::Runtime(anyhow!("{}: {e}", path.display())))?;
    if built.dropped_rows > 0 {
        log::warn!(
            "{}: dropped {} vacuous zero rows",
            path.display(),
            built.dropped_rows
        );
    }
    Ok(built.problem)
}

fn read_vector(path: &Path, r: impl BufRead) -> Result<Vector, CmdError> {
    problems::read_witness(r).map_err(|e| CmdError::Runtime(anyhow!("{}: {e}", path.display())))
}

fn origin(n: usize) -> Vector {
    Vector::new(vec![0.0; n]).expect("the origin is a valid vector")
}

/// Parses a halting spec: `cap-only`, or `<rule>:<threshold>` with rule one
/// of `residual`, `relative-residual`, `relative-violation`.
fn parse_halting(spec: &str) -> Result<HaltingRule, CmdError> {
    if spec == "cap-only" {
        return Ok(HaltingRule::IterationCapOnly);
    }
    let (kind, value) = spec.split_once(':').ok_or_else(|| {
        usage(format!(
            "halting spec '{spec}' is neither 'cap-only' nor '<rule>:<threshold>'"
        ))
    })?;
    let threshold: f64 = value
        .parse()
        .map_err(|_| usage(format!("halting threshold '{value}' is not a number")))?;
    match kind {
        "residual" => Ok(HaltingRule::ResidualNorm(threshold)),
        "relative-residual" => Ok(HaltingRule::RelativeResidualNorm(threshold)),
        "relative-violation" => Ok(HaltingRule::RelativeMaxViolation(threshold)),
        other => Err(usage(format!(
            "unknown halting rule '{other}'; use residual, relative-residual, relative-violation, or cap-only"
        ))),
    }
}

fn duration_flag(seconds: Option<f64>) -> Result<Option<Duration>, CmdError> {
    match seconds {
        None => Ok(None),
        Some(s) if s > 0.0 && s.is_finite() => Ok(Some(Duration::from_secs_f64(s))),
        Some(s) => Err(usage(format!(
            "time limit must be positive and finite seconds, got {s}"
        ))),
    }
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>, CmdError> {
    raw.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| usage(format!("bad {what} entry '{t}' in list '{raw}'")))
        })
        .collect()
}

fn median_of(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

const DEFAULT_HALTING_SPEC: &str = "residual:6.103515625e-5";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Gaussian,
    Correlated,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Correlated => "correlated",
        }
    }
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Instance family.
    #[arg(long, value_enum)]
    pub family: Family,
    /// Number of constraint rows.
    #[arg(long)]
    pub m: usize,
    /// Number of variables.
    #[arg(long)]
    pub n: usize,
    /// Coefficient band lower endpoint (correlated family only).
    #[arg(long, default_value_t = 0.9)]
    pub lo: f64,
    /// Coefficient band upper endpoint (correlated family only).
    #[arg(long, default_value_t = 1.0)]
    pub hi: f64,
    /// Generator seed; equal seeds reproduce the files byte for byte.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Problem file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Witness file to write; defaults to '<out>.witness'.
    #[arg(long)]
    pub witness_out: Option<PathBuf>,
}

pub fn cmd_generate(args: &GenerateArgs) -> CmdResult {
    let (problem, witness) = match args.family {
        Family::Gaussian => problems::gen_gaussian(args.m, args.n, args.seed),
        Family::Correlated => problems::gen_correlated(args.m, args.n, args.lo, args.hi, args.seed),
    }
    .map_err(|e| usage(e.to_string()))?;

    println!("family: {}", args.family.name());
    println!(
        "rows: {}  cols: {}",
        problem.num_rows(),
        problem.num_cols()
    );
    let (lo, hi) = problem
        .row_norms()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    println!("row norms in [{lo:.6}, {hi:.6}]");
    if args.family == Family::Correlated {
        let single = (0..problem.num_rows())
            .filter(|&i| {
                let row = problem.matrix().row(i);
                row.iter().all(|&v| v > 0.0) || row.iter().all(|&v| v < 0.0)
            })
            .count();
        println!("single-signed rows: {single}/{}", problem.num_rows());
    }

    let mut out = create_output(&args.out)?;
    problems::write_problem(&problem, &mut out)
        .and_then(|_| out.flush())
        .map_err(runtime)?;
    println!("wrote problem to {}", args.out.display());

    let witness_path = args
        .witness_out
        .clone()
        .unwrap_or_else(|| default_witness_path(&args.out));
    let mut w = create_output(&witness_path)?;
    problems::write_witness(&witness, &mut w)
        .and_then(|_| w.flush())
        .map_err(runtime)?;
    println!("wrote witness to {}", witness_path.display());
    Ok(0)
}

fn default_witness_path(out: &Path) -> PathBuf {
    let mut os = out.as_os_str().to_os_string();
    os.push(".witness");
    PathBuf::from(os)
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Problem file in the interchange format.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Batch size: constraints sampled per iteration.
    #[arg(long, default_value_t = 1)]
    pub beta: usize,
    /// Relaxation parameter in (0, 2].
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Halting rule: 'residual:<t>', 'relative-residual:<t>',
    /// 'relative-violation:<t>', or 'cap-only'.
    #[arg(long, default_value = DEFAULT_HALTING_SPEC)]
    pub halting: String,
    /// Hard iteration cap.
    #[arg(long, default_value_t = 500_000)]
    pub max_iterations: usize,
    /// Sampling seed; equal seeds walk identical trajectories.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Iterations between halting checks; defaults to max(1, m / beta).
    #[arg(long)]
    pub stride: Option<NonZeroUsize>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Starting point file in the witness format; defaults to the origin.
    #[arg(long)]
    pub x0: Option<PathBuf>,
    /// Record the satisfied-constraint count at each checkpoint.
    #[arg(long)]
    pub track_satisfied: bool,
    /// Write the checkpoint trace as CSV.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

pub fn cmd_solve(args: &SolveArgs) -> CmdResult {
    let problem = load_problem(&args.input)?;
    let mut cfg = SkmConfig::new(args.beta, args.lambda);
    cfg.halting = parse_halting(&args.halting)?;
    cfg.max_iterations = args.max_iterations;
    cfg.seed = args.seed;
    cfg.stride = args.stride;
    cfg.track_satisfied = args.track_satisfied;
    cfg.time_limit = duration_flag(args.time_limit)?;
    cfg.validate(problem.num_rows()).map_err(config_usage)?;

    let x0 = match &args.x0 {
        Some(path) => read_vector(path, open_input(path)?)?,
        None => origin(problem.num_cols()),
    };
    let trace = skm_solve(&problem, &cfg, &x0).map_err(runtime)?;

    println!(
        "rows: {}  cols: {}",
        problem.num_rows(),
        problem.num_cols()
    );
    println!("iterations: {}", trace.iterations);
    println!("final residual: {:e}", trace.final_residual);
    println!("wall seconds: {:.6}", trace.wall_seconds);
    println!("halted: {}", trace.reason.token());
    if let Some(path) = &args.trace_out {
        write_trace_csv(path, &trace)?;
        println!("wrote trace to {}", path.display());
    }
    Ok(0)
}

fn write_trace_csv(path: &Path, trace: &RunTrace) -> Result<(), CmdError> {
    let mut w = create_output(path)?;
    let mut body = || -> std::io::Result<()> {
        writeln!(
            w,
            "iteration,elapsed_seconds,residual_norm,max_violation,satisfied_count"
        )?;
        for r in &trace.records {
            let satisfied = r
                .satisfied_count
                .map(|c| c.to_string())
                .unwrap_or_default();
            writeln!(
                w,
                "{},{:.16e},{:.16e},{:.16e},{}",
                r.iteration, r.elapsed_seconds, r.residual_norm, r.max_violation, satisfied
            )?;
        }
        w.flush()
    };
    body().map_err(runtime)
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// Problem file in the interchange format; entries must be integers.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Batch size: constraints sampled per iteration.
    #[arg(long, default_value_t = 1)]
    pub beta: usize,
    /// Relaxation parameter, strictly inside (0, 2).
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Sampling seed; equal seeds walk identical trajectories.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Hoffman constant override; skips the singular-value heuristic.
    #[arg(long)]
    pub l2: Option<f64>,
    /// Optional cap below the computed iteration bound.
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
}

pub fn cmd_certify(args: &CertifyArgs) -> CmdResult {
    if let Some(l2) = args.l2 {
        if !(l2 > 0.0 && l2.is_finite()) {
            return Err(usage(format!("--l2 must be positive and finite, got {l2}")));
        }
    }
    let problem = load_problem(&args.input)?;
    check_integral(&problem)?;
    let enc = theory::encoding_length(problem.matrix(), problem.rhs()).map_err(runtime)?;
    let normalized = problem.normalized();

    let (l2, l2_source) = match args.l2 {
        Some(v) => (v, "from --l2"),
        None => {
            let estimate = theory::hoffman_from_equalities(normalized.matrix()).map_err(|e| {
                CmdError::Runtime(anyhow!(
                    "Hoffman heuristic failed ({e}); pass --l2 explicitly"
                ))
            })?;
            (estimate.l2, "smallest singular value heuristic")
        }
    };

    let m = problem.num_rows();
    let n = problem.num_cols();
    let bound = theory::iteration_bound(&enc, n, m, args.lambda, l2).map_err(|e| match e {
        theory::TheoryError::LambdaNotStrict { .. } => usage(e.to_string()),
        other => runtime(other),
    })?;
    let cap = args.max_iterations.map_or(bound, |c| c.min(bound));

    let x0 = origin(n);
    let report = theory::certificate_check(&normalized, &x0, &enc).map_err(runtime)?;

    let mut cfg = SkmConfig::new(args.beta, args.lambda);
    cfg.halting = HaltingRule::CertificateFound {
        threshold: report.threshold,
    };
    cfg.max_iterations = cap;
    cfg.seed = args.seed;
    cfg.stride = NonZeroUsize::new(1);
    cfg.time_limit = duration_flag(args.time_limit)?;
    cfg.validate(m).map_err(config_usage)?;

    let trace = skm_solve(&normalized, &cfg, &x0).map_err(runtime)?;
    let final_theta = trace
        .records
        .last()
        .map(|r| r.max_violation)
        .unwrap_or(report.theta);

    println!("rows: {m}  cols: {n}");
    println!("sigma: {:.6}", enc.sigma);
    println!("certificate threshold: {:e}", report.threshold);
    println!("hoffman constant: {l2:e} ({l2_source})");
    println!("iteration bound: {bound}");
    if cap < bound {
        println!("iteration cap: {cap}");
    }
    println!("iterations run: {}", trace.iterations);
    println!("final max violation: {final_theta:e}");

    if trace.reason == HaltReason::CertificateFound {
        println!("verdict: feasibility certified");
        Ok(0)
    } else {
        let p = theory::failure_probability_bound(&enc, n, m, args.lambda, l2, trace.iterations)
            .map_err(runtime)?;
        println!("verdict: no certificate within the iteration budget");
        if p >= 1.0 {
            println!("failure probability bound: {p:e} (vacuous)");
        } else {
            println!("failure probability bound: {p:e}");
        }
        Ok(3)
    }
}

fn check_integral(p: &FeasibilityProblem) -> Result<(), CmdError> {
    let integral = |v: f64| v.fract() == 0.0 && v.abs() <= 9_007_199_254_740_992.0;
    for i in 0..p.num_rows() {
        for (j, &v) in p.matrix().row(i).iter().enumerate() {
            if !integral(v) {
                return Err(CmdError::Runtime(anyhow!(
                    "certificates need integer data, but entry ({i}, {j}) is {v}"
                )));
            }
        }
        let b = p.rhs()[i];
        if !integral(b) {
            return Err(CmdError::Runtime(anyhow!(
                "certificates need integer data, but right-hand side {i} is {b}"
            )));
        }
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Problem file in the interchange format.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Comma-separated batch sizes, e.g. '1,10,100'.
    #[arg(long)]
    pub betas: String,
    /// Comma-separated relaxation values, e.g. '1.0,1.5'.
    #[arg(long, default_value = "1.0")]
    pub lambdas: String,
    /// Trials per grid cell; trial t uses seed seed-base + t.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    /// Halting rule: 'residual:<t>', 'relative-residual:<t>',
    /// 'relative-violation:<t>', or 'cap-only'.
    #[arg(long, default_value = DEFAULT_HALTING_SPEC)]
    pub halting: String,
    /// Hard iteration cap per run.
    #[arg(long, default_value_t = 500_000)]
    pub max_iterations: usize,
    /// Per-run wall-clock budget in seconds.
    #[arg(long, default_value_t = 300.0)]
    pub time_limit: f64,
    /// Iterations between halting checks; defaults to max(1, m / beta).
    #[arg(long)]
    pub stride: Option<NonZeroUsize>,
    /// Worker threads for trials; 1 runs serially.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Write raw records as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a final-residual scatter chart as SVG.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

pub fn cmd_sweep(args: &SweepArgs) -> CmdResult {
    let problem = load_problem(&args.input)?;
    let mut spec = SweepSpec::new(
        parse_list(&args.betas, "beta")?,
        parse_list(&args.lambdas, "lambda")?,
    );
    spec.trials = args.trials;
    spec.seed_base = args.seed_base;
    spec.halting = parse_halting(&args.halting)?;
    spec.max_iterations = args.max_iterations;
    spec.time_limit = duration_flag(Some(args.time_limit))?;
    spec.stride = args.stride;
    spec.jobs = args.jobs;

    let result = harness::run_sweep(&problem, &spec).map_err(harness_error)?;

    println!(
        "rows: {}  cols: {}",
        problem.num_rows(),
        problem.num_cols()
    );
    print_aggregate_table(&result.aggregates);

    if let Some(path) = &args.out {
        let mut w = create_output(path)?;
        harness::emit_csv(&result.records, &mut w)
            .and_then(|_| w.flush())
            .map_err(runtime)?;
        println!("wrote {} records to {}", result.records.len(), path.display());
    }
    if let Some(path) = &args.plot {
        let mut w = create_output(path)?;
        harness::emit_sweep_svg(&result.records, "final residuals by batch size", &mut w)
            .and_then(|_| w.flush())
            .map_err(runtime)?;
        println!("wrote plot to {}", path.display());
    }
    Ok(0)
}

fn print_aggregate_table(cells: &[CellAggregate]) {
    println!(
        "{:>6} {:>8} {:>7} {:>14} {:>14} {:>12} {:>13} {:>14}",
        "beta",
        "lambda",
        "trials",
        "median_wall_s",
        "mean_wall_s",
        "std_wall_s",
        "median_iters",
        "mean_residual"
    );
    for c in cells {
        println!(
            "{:>6} {:>8} {:>7} {:>14.6} {:>14.6} {:>12.6} {:>13.1} {:>14.6e}",
            c.beta,
            c.lambda,
            c.trials,
            c.median_wall_seconds,
            c.mean_wall_seconds,
            c.std_wall_seconds,
            c.median_iterations,
            c.mean_final_residual
        );
    }
}

#[derive(Args, Debug)]
pub struct GainArgs {
    /// Number of constraint rows.
    #[arg(long)]
    pub m: usize,
    /// Number of variables.
    #[arg(long)]
    pub n: usize,
    /// Estimated number of currently satisfied constraints.
    #[arg(long)]
    pub s: usize,
    /// Per-row, per-column sampling cost coefficient.
    #[arg(long = "c")]
    pub cost_c: f64,
    /// Fixed per-iteration overhead.
    #[arg(long = "C")]
    pub cost_big_c: f64,
}

pub fn cmd_gain(args: &GainArgs) -> CmdResult {
    let model = theory::GainModel::new(args.m, args.n, args.s, args.cost_c, args.cost_big_c)
        .map_err(|e| usage(e.to_string()))?;
    println!("{:>6} {:>16}", "beta", "gain");
    for beta in 1..=args.m {
        let g = theory::gain(&model, beta).map_err(runtime)?;
        println!("{beta:>6} {g:>16.10}");
    }
    let best = theory::optimal_beta(&model).map_err(runtime)?;
    println!("optimal beta: {best}");
    Ok(0)
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    /// Linear program in MPS format.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Objective target; defaults to the '<in>.pstar' sidecar file.
    #[arg(long)]
    pub pstar: Option<f64>,
    /// Problem file to write.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_convert(args: &ConvertArgs) -> CmdResult {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CmdError::Runtime(anyhow!("cannot read {}: {e}", args.input.display())))?;
    let lp = problems::parse_mps(&text)
        .map_err(|e| CmdError::Runtime(anyhow!("{}: {e}", args.input.display())))?;

    let p_star = match args.pstar.or(lp.p_star) {
        Some(v) if v.is_finite() => v,
        Some(v) => return Err(usage(format!("--pstar must be finite, got {v}"))),
        None => read_pstar_sidecar(&args.input)?,
    };
    let problem = problems::lp_to_feasibility(&lp, p_star).map_err(runtime)?;

    println!("name: {}", lp.name);
    println!("columns: {}", lp.num_cols());
    println!(
        "equality rows: {}  inequality rows: {}",
        lp.eq_rows.len(),
        lp.inequalities.len()
    );
    println!("objective target: {p_star}");
    println!(
        "stacked system: {} x {}",
        problem.num_rows(),
        problem.num_cols()
    );

    let mut out = create_output(&args.out)?;
    problems::write_problem(&problem, &mut out)
        .and_then(|_| out.flush())
        .map_err(runtime)?;
    println!("wrote problem to {}", args.out.display());
    Ok(0)
}

fn read_pstar_sidecar(input: &Path) -> Result<f64, CmdError> {
    let sidecar = input.with_extension("pstar");
    let text = std::fs::read_to_string(&sidecar).map_err(|_| {
        usage(format!(
            "no --pstar given and no sidecar file at {}",
            sidecar.display()
        ))
    })?;
    text.trim().parse().map_err(|_| {
        CmdError::Runtime(anyhow!(
            "sidecar {} does not hold a number",
            sidecar.display()
        ))
    })
}

#[derive(Args, Debug)]
pub struct CompareBkArgs {
    /// Equality-system family.
    #[arg(long, value_enum)]
    pub family: Family,
    /// Number of equality rows.
    #[arg(long, default_value_t = 2000)]
    pub m: usize,
    /// Number of variables.
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Coefficient band lower endpoint (correlated family only).
    #[arg(long, default_value_t = 0.9)]
    pub lo: f64,
    /// Coefficient band upper endpoint (correlated family only).
    #[arg(long, default_value_t = 1.0)]
    pub hi: f64,
    /// Seed for the generated equality system.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// SKM batch size on the stacked inequality system.
    #[arg(long, default_value_t = 50)]
    pub beta: usize,
    /// Rows per block for the block Kaczmarz baseline.
    #[arg(long, default_value_t = 50)]
    pub block_size: usize,
    /// Relaxation parameter in (0, 2].
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Paired trials; trial t of both methods uses seed seed-base + t.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    /// Halting rule: 'residual:<t>', 'relative-residual:<t>',
    /// 'relative-violation:<t>', or 'cap-only'.
    #[arg(long, default_value = DEFAULT_HALTING_SPEC)]
    pub halting: String,
    /// Hard iteration cap per run.
    #[arg(long, default_value_t = 500_000)]
    pub max_iterations: usize,
    /// Per-run wall-clock budget in seconds.
    #[arg(long, default_value_t = 300.0)]
    pub time_limit: f64,
    /// Write per-trial outcomes as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_compare_bk(args: &CompareBkArgs) -> CmdResult {
    let (a, b, _solution) = match args.family {
        Family::Gaussian => problems::gen_gaussian_equalities(args.m, args.n, args.seed),
        Family::Correlated => {
            problems::gen_correlated_equalities(args.m, args.n, args.lo, args.hi, args.seed)
        }
    }
    .map_err(|e| usage(e.to_string()))?;

    let spec = CompareSpec {
        beta: args.beta,
        block_size: args.block_size,
        lambda: args.lambda,
        trials: args.trials,
        seed_base: args.seed_base,
        halting: parse_halting(&args.halting)?,
        max_iterations: args.max_iterations,
        time_limit: duration_flag(Some(args.time_limit))?,
    };
    let comparison = harness::compare_block_kaczmarz(&a, &b, &spec).map_err(harness_error)?;

    println!(
        "equality system: {} x {} ({}, seed {})",
        args.m,
        args.n,
        args.family.name(),
        args.seed
    );
    println!(
        "{:>6} {:>7} {:>14} {:>13} {:>9}",
        "method", "trials", "median_wall_s", "median_iters", "reached"
    );
    let mut medians = [0.0; 2];
    for (slot, (name, outcomes)) in [("skm", &comparison.skm), ("block", &comparison.block)]
        .into_iter()
        .enumerate()
    {
        let wall = median_of(outcomes.iter().map(|o| o.wall_seconds).collect());
        let iters = median_of(outcomes.iter().map(|o| o.iterations as f64).collect());
        let reached = outcomes
            .iter()
            .filter(|o| o.halted_reason == HaltReason::ThresholdMet)
            .count();
        println!(
            "{:>6} {:>7} {:>14.6} {:>13.1} {:>6}/{}",
            name,
            outcomes.len(),
            wall,
            iters,
            reached,
            outcomes.len()
        );
        medians[slot] = wall;
    }
    println!(
        "faster by median wall time: {}",
        if medians[0] < medians[1] { "skm" } else { "block" }
    );

    if let Some(path) = &args.out {
        write_comparison_csv(path, &comparison.skm, &comparison.block)?;
        println!("wrote outcomes to {}", path.display());
    }
    Ok(0)
}

fn write_comparison_csv(
    path: &Path,
    skm: &[TrialOutcome],
    block: &[TrialOutcome],
) -> Result<(), CmdError> {
    let mut w = create_output(path)?;
    let mut body = || -> std::io::Result<()> {
        writeln!(
            w,
            "method,trial,seed,iterations,wall_seconds,final_residual,halted_reason"
        )?;
        for (name, outcomes) in [("skm", skm), ("block", block)] {
            for o in outcomes {
                writeln!(
                    w,
                    "{},{},{},{},{:.16e},{:.16e},{}",
                    name,
                    o.trial,
                    o.seed,
                    o.iterations,
                    o.wall_seconds,
                    o.final_residual,
                    o.halted_reason.token()
                )?;
            }
        }
        w.flush()
    };
    body().map_err(runtime)
}

// Keep the advertised default in sync with the solver constant.
const _: () = assert!(DEFAULT_RESIDUAL_THRESHOLD == 6.103515625e-5);
