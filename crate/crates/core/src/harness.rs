//! Experiment harness: parameter sweeps, residual curves, a block
//! Kaczmarz comparison, and CSV/SVG emitters.
//!
//! A sweep runs the solver over a grid of `(beta, lambda)` cells with a
//! fixed set of trial seeds shared across cells, so comparisons between
//! cells are paired by seed. Every record carries the seed that produced
//! it; re-running a sweep with the same spec reproduces everything except
//! wall-clock times.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::num::NonZeroUsize;
use std::time::Duration;

use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{DenseMatrix, FeasibilityProblem, Vector};
use crate::problems::{equalities_to_feasibility, ProblemError};
use crate::solvers::{
    block_kaczmarz_solve, skm_solve, BlockConfig, HaltReason, HaltingRule, SkmConfig, SolverError,
};

/// Errors from sweep validation, CSV parsing, and the underlying runs.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("sweep needs at least one batch size")]
    NoBetas,
    #[error("sweep needs at least one relaxation value")]
    NoLambdas,
    #[error("sweep needs at least one trial")]
    NoTrials,
    #[error("jobs must be at least 1")]
    NoJobs,
    #[error("thread pool: {0}")]
    Pool(String),
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Grid description for [`run_sweep`].
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub betas: Vec<usize>,
    pub lambdas: Vec<f64>,
    /// Independent repetitions per cell; trial `t` uses seed
    /// `seed_base + t` in every cell.
    pub trials: usize,
    pub seed_base: u64,
    pub halting: HaltingRule,
    pub max_iterations: usize,
    pub time_limit: Option<Duration>,
    /// Checkpoint stride forwarded to the solver; `None` keeps the
    /// solver's amortized default.
    pub stride: Option<NonZeroUsize>,
    /// Worker threads; 1 runs serially on the calling thread.
    pub jobs: usize,
}

impl SweepSpec {
    /// A spec over the given grid with one trial, seed base 0, the solver's
    /// default absolute residual halting, a 500000-iteration cap, a 300
    /// second per-run time budget, default stride, and serial execution.
    pub fn new(betas: Vec<usize>, lambdas: Vec<f64>) -> Self {
        let defaults = SkmConfig::new(1, 1.0);
        Self {
            betas,
            lambdas,
            trials: 1,
            seed_base: 0,
            halting: defaults.halting,
            max_iterations: defaults.max_iterations,
            time_limit: Some(Duration::from_secs(300)),
            stride: None,
            jobs: 1,
        }
    }

    fn validate(&self, m: usize) -> Result<(), HarnessError> {
        if self.betas.is_empty() {
            return Err(HarnessError::NoBetas);
        }
        if self.lambdas.is_empty() {
            return Err(HarnessError::NoLambdas);
        }
        if self.trials == 0 {
            return Err(HarnessError::NoTrials);
        }
        if self.jobs == 0 {
            return Err(HarnessError::NoJobs);
        }
        for &beta in &self.betas {
            for &lambda in &self.lambdas {
                self.config(beta, lambda, 0).validate(m)?;
            }
        }
        Ok(())
    }

    fn config(&self, beta: usize, lambda: f64, trial: usize) -> SkmConfig {
        let mut cfg = SkmConfig::new(beta, lambda);
        cfg.halting = self.halting;
        cfg.max_iterations = self.max_iterations;
        cfg.seed = self.seed_base.wrapping_add(trial as u64);
        cfg.stride = self.stride;
        cfg.time_limit = self.time_limit;
        cfg
    }
}

/// One trial of one grid cell; fields mirror the CSV columns in order.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub beta: usize,
    pub lambda: f64,
    pub trial: usize,
    pub seed: u64,
    pub iterations: usize,
    pub wall_seconds: f64,
    pub final_residual: f64,
    pub halted_reason: HaltReason,
}

/// Raw per-run records plus per-cell summaries. The aggregates are always
/// recomputable from the records via [`aggregate`].
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
    pub aggregates: Vec<CellAggregate>,
}

/// Runs the full `betas x lambdas x trials` grid from the origin and
/// returns one record per run, ordered by cell and then trial regardless
/// of how many worker threads executed them.
pub fn run_sweep(p: &FeasibilityProblem, spec: &SweepSpec) -> Result<SweepResult, HarnessError> {
    spec.validate(p.num_rows())?;
    let mut cells = Vec::with_capacity(spec.betas.len() * spec.lambdas.len() * spec.trials);
    for &beta in &spec.betas {
        for &lambda in &spec.lambdas {
            for trial in 0..spec.trials {
                cells.push((beta, lambda, trial));
            }
        }
    }
    let origin = Vector::zeros(p.num_cols());
    let run_one = |&(beta, lambda, trial): &(usize, f64, usize)| -> Result<SweepRecord, HarnessError> {
        let cfg = spec.config(beta, lambda, trial);
        let trace = skm_solve(p, &cfg, &origin)?;
        Ok(SweepRecord {
            beta,
            lambda,
            trial,
            seed: cfg.seed,
            iterations: trace.iterations,
            wall_seconds: trace.wall_seconds,
            final_residual: trace.final_residual,
            halted_reason: trace.reason,
        })
    };
    let records: Vec<SweepRecord> = if spec.jobs == 1 {
        cells.iter().map(run_one).collect::<Result<_, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.jobs)
            .build()
            .map_err(|e| HarnessError::Pool(e.to_string()))?;
        pool.install(|| cells.par_iter().map(run_one).collect::<Result<_, _>>())?
    };
    let aggregates = aggregate(&records);
    Ok(SweepResult {
        records,
        aggregates,
    })
}

/// Per-cell summary statistics over the trials of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct CellAggregate {
    pub beta: usize,
    pub lambda: f64,
    pub trials: usize,
    pub mean_wall_seconds: f64,
    pub median_wall_seconds: f64,
    /// Sample standard deviation (n - 1 denominator), 0 for a single trial.
    pub std_wall_seconds: f64,
    pub mean_iterations: f64,
    pub median_iterations: f64,
    pub mean_final_residual: f64,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sample_std(values: &[f64], mean: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Groups records by `(beta, lambda)` in first-seen order and summarizes
/// each cell. All statistics are recomputable from the raw records.
pub fn aggregate(records: &[SweepRecord]) -> Vec<CellAggregate> {
    let mut order: Vec<(usize, u64)> = Vec::new();
    let mut groups: HashMap<(usize, u64), Vec<&SweepRecord>> = HashMap::new();
    for r in records {
        let key = (r.beta, r.lambda.to_bits());
        groups.entry(key).or_insert_with(|| {
            order.push(key);
            Vec::new()
        });
        groups.get_mut(&key).expect("just inserted").push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let rs = &groups[&key];
            let mut walls: Vec<f64> = rs.iter().map(|r| r.wall_seconds).collect();
            let mut iters: Vec<f64> = rs.iter().map(|r| r.iterations as f64).collect();
            let residuals: Vec<f64> = rs.iter().map(|r| r.final_residual).collect();
            let mean_wall = mean(&walls);
            CellAggregate {
                beta: key.0,
                lambda: f64::from_bits(key.1),
                trials: rs.len(),
                mean_wall_seconds: mean_wall,
                median_wall_seconds: median(&mut walls),
                std_wall_seconds: sample_std(&rs.iter().map(|r| r.wall_seconds).collect::<Vec<_>>(), mean_wall),
                mean_iterations: mean(&iters),
                median_iterations: median(&mut iters),
                mean_final_residual: mean(&residuals),
            }
        })
        .collect()
}

/// One checkpoint of a residual trajectory, carrying both indexings the
/// curve can be plotted against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub iteration: usize,
    /// Monotonic-clock seconds since the run started.
    pub seconds: f64,
    pub residual: f64,
    /// Satisfied-constraint count, when tracking was requested.
    pub satisfied: Option<usize>,
}

/// One residual trajectory, checkpointed every stride starting at
/// iteration 0.
#[derive(Clone, Debug)]
pub struct ResidualCurve {
    pub beta: usize,
    pub lambda: f64,
    pub points: Vec<CurvePoint>,
}

/// Which indexing of a [`ResidualCurve`] the chart's horizontal axis uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveAxis {
    Iterations,
    Seconds,
}

/// Runs one iteration-capped trajectory per batch size from the origin,
/// recording the residual norm (and optionally the satisfied-constraint
/// count) every `stride` iterations. All curves share the relaxation,
/// seed, and iteration range, so they are directly comparable.
pub fn residual_curves(
    p: &FeasibilityProblem,
    betas: &[usize],
    lambda: f64,
    iterations: usize,
    stride: NonZeroUsize,
    seed: u64,
    track_satisfied: bool,
) -> Result<Vec<ResidualCurve>, HarnessError> {
    if betas.is_empty() {
        return Err(HarnessError::NoBetas);
    }
    let origin = Vector::zeros(p.num_cols());
    let mut curves = Vec::with_capacity(betas.len());
    for &beta in betas {
        let mut cfg = SkmConfig::new(beta, lambda);
        cfg.halting = HaltingRule::IterationCapOnly;
        cfg.max_iterations = iterations;
        cfg.seed = seed;
        cfg.stride = Some(stride);
        cfg.track_satisfied = track_satisfied;
        let trace = skm_solve(p, &cfg, &origin)?;
        curves.push(ResidualCurve {
            beta,
            lambda,
            points: trace
                .records
                .iter()
                .map(|rec| CurvePoint {
                    iteration: rec.iteration,
                    seconds: rec.elapsed_seconds,
                    residual: rec.residual_norm,
                    satisfied: rec.satisfied_count,
                })
                .collect(),
        });
    }
    Ok(curves)
}

/// Setup for [`compare_block_kaczmarz`].
#[derive(Clone, Debug)]
pub struct CompareSpec {
    /// SKM batch size on the stacked inequality system (which has `2m`
    /// rows for an `m`-row equality system).
    pub beta: usize,
    /// Block size for the block Kaczmarz baseline on the equality system.
    pub block_size: usize,
    pub lambda: f64,
    pub trials: usize,
    pub seed_base: u64,
    /// Applied to both solvers. The stacked system's positive-part
    /// residual norm equals the equality residual norm `||Ax - b||_2`, so
    /// a shared threshold means the same accuracy on both sides.
    pub halting: HaltingRule,
    pub max_iterations: usize,
    pub time_limit: Option<Duration>,
}

/// One run in a comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub iterations: usize,
    pub wall_seconds: f64,
    pub final_residual: f64,
    pub halted_reason: HaltReason,
}

/// Paired outcomes of SKM on the stacked system and block Kaczmarz on the
/// equality system; trial `t` of both sides uses the same seed.
#[derive(Clone, Debug)]
pub struct BlockComparison {
    pub skm: Vec<TrialOutcome>,
    pub block: Vec<TrialOutcome>,
}

/// Runs SKM on `[A; -A] x <= [b; -b]` against block Kaczmarz on `Ax = b`,
/// both from the origin, pairing trials by seed.
pub fn compare_block_kaczmarz(
    a: &DenseMatrix,
    b: &Vector,
    spec: &CompareSpec,
) -> Result<BlockComparison, HarnessError> {
    if spec.trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    let stacked = equalities_to_feasibility(a, b)?.problem;
    let origin = Vector::zeros(a.cols());
    let mut skm = Vec::with_capacity(spec.trials);
    let mut block = Vec::with_capacity(spec.trials);
    for trial in 0..spec.trials {
        let seed = spec.seed_base.wrapping_add(trial as u64);
        let mut cfg = SkmConfig::new(spec.beta, spec.lambda);
        cfg.halting = spec.halting;
        cfg.max_iterations = spec.max_iterations;
        cfg.seed = seed;
        cfg.time_limit = spec.time_limit;
        let trace = skm_solve(&stacked, &cfg, &origin)?;
        skm.push(TrialOutcome {
            trial,
            seed,
            iterations: trace.iterations,
            wall_seconds: trace.wall_seconds,
            final_residual: trace.final_residual,
            halted_reason: trace.reason,
        });
        let mut bcfg = BlockConfig::new(spec.block_size, spec.lambda);
        bcfg.halting = spec.halting;
        bcfg.max_iterations = spec.max_iterations;
        bcfg.seed = seed;
        bcfg.time_limit = spec.time_limit;
        let trace = block_kaczmarz_solve(a, b, &bcfg, &origin)?;
        block.push(TrialOutcome {
            trial,
            seed,
            iterations: trace.iterations,
            wall_seconds: trace.wall_seconds,
            final_residual: trace.final_residual,
            halted_reason: trace.reason,
        });
    }
    Ok(BlockComparison { skm, block })
}

/// Column header of the sweep CSV format.
pub const SWEEP_CSV_HEADER: &str =
    "beta,lambda,trial,seed,iterations,wall_seconds,final_residual,halted_reason";

fn empty_input(what: &str) -> std::io::Error {
    std::io::Error::new(
        std::io::ErrorKind::InvalidInput,
        format!("nothing to emit: {what}"),
    )
}

/// Writes sweep records as CSV. Floats carry 17 significant digits, enough
/// for [`parse_sweep_csv`] to restore the records exactly. Emitting zero
/// records is an error.
pub fn emit_csv(records: &[SweepRecord], w: &mut impl Write) -> std::io::Result<()> {
    if records.is_empty() {
        return Err(empty_input("no sweep records"));
    }
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{:.16e},{},{},{},{:.16e},{:.16e},{}",
            r.beta,
            r.lambda,
            r.trial,
            r.seed,
            r.iterations,
            r.wall_seconds,
            r.final_residual,
            r.halted_reason.token()
        )?;
    }
    Ok(())
}

fn csv_error(line: usize, message: impl Into<String>) -> HarnessError {
    HarnessError::Csv {
        line,
        message: message.into(),
    }
}

fn csv_field<T: std::str::FromStr>(line: usize, name: &str, field: &str) -> Result<T, HarnessError> {
    field
        .parse()
        .map_err(|_| csv_error(line, format!("bad {name} '{field}'")))
}

/// Reads the format written by [`emit_csv`].
pub fn parse_sweep_csv(r: impl BufRead) -> Result<Vec<SweepRecord>, HarnessError> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| csv_error(1, "empty input"))??;
    if header.trim() != SWEEP_CSV_HEADER {
        return Err(csv_error(1, format!("expected header '{SWEEP_CSV_HEADER}'")));
    }
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let lineno = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 8 {
            return Err(csv_error(
                lineno,
                format!("expected 8 fields, got {}", fields.len()),
            ));
        }
        records.push(SweepRecord {
            beta: csv_field(lineno, "beta", fields[0])?,
            lambda: csv_field(lineno, "lambda", fields[1])?,
            trial: csv_field(lineno, "trial", fields[2])?,
            seed: csv_field(lineno, "seed", fields[3])?,
            iterations: csv_field(lineno, "iterations", fields[4])?,
            wall_seconds: csv_field(lineno, "wall_seconds", fields[5])?,
            final_residual: csv_field(lineno, "final_residual", fields[6])?,
            halted_reason: HaltReason::from_token(fields[7])
                .ok_or_else(|| csv_error(lineno, format!("unknown halt reason '{}'", fields[7])))?,
        });
    }
    Ok(records)
}

const PLOT_WIDTH: f64 = 800.0;
const PLOT_HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

struct LogScale {
    floor: f64,
    lo: f64,
    hi: f64,
}

impl LogScale {
    /// A log10 scale covering the positive values, with one decade of
    /// headroom below the smallest so clamped zeros stay visible.
    fn covering(values: impl Iterator<Item = f64> + Clone) -> Self {
        let min_positive = values
            .clone()
            .filter(|&v| v > 0.0 && v.is_finite())
            .fold(f64::INFINITY, f64::min);
        let floor = if min_positive.is_finite() {
            min_positive / 10.0
        } else {
            1e-16
        };
        let max_value = values.filter(|v| v.is_finite()).fold(floor, f64::max);
        let lo = floor.log10();
        let mut hi = max_value.max(floor).log10();
        if hi - lo < 1e-9 {
            hi = lo + 1.0;
        }
        Self { floor, lo, hi }
    }

    fn fraction(&self, v: f64) -> f64 {
        (v.max(self.floor).log10() - self.lo) / (self.hi - self.lo)
    }
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if (0.01..10_000.0).contains(&v.abs()) {
        format!("{v:.2}")
    } else {
        format!("{v:.1e}")
    }
}

struct Frame {
    inner_w: f64,
    inner_h: f64,
}

fn open_chart(w: &mut impl Write, title: &str) -> std::io::Result<Frame> {
    let frame = Frame {
        inner_w: PLOT_WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        inner_h: PLOT_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
    };
    writeln!(
        w,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PLOT_WIDTH}\" height=\"{PLOT_HEIGHT}\" viewBox=\"0 0 {PLOT_WIDTH} {PLOT_HEIGHT}\">"
    )?;
    writeln!(w, "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>")?;
    writeln!(
        w,
        "  <text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>",
        MARGIN_LEFT + frame.inner_w / 2.0,
        title
    )?;
    writeln!(
        w,
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
        MARGIN_TOP + frame.inner_h,
        MARGIN_LEFT + frame.inner_w,
        MARGIN_TOP + frame.inner_h
    )?;
    writeln!(
        w,
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{MARGIN_TOP}\" x2=\"{MARGIN_LEFT}\" y2=\"{:.1}\" stroke=\"black\"/>",
        MARGIN_TOP + frame.inner_h
    )?;
    Ok(frame)
}

fn draw_x_label(w: &mut impl Write, frame: &Frame, label: &str) -> std::io::Result<()> {
    writeln!(
        w,
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{label}</text>",
        MARGIN_LEFT + frame.inner_w / 2.0,
        MARGIN_TOP + frame.inner_h + 42.0
    )
}

fn draw_x_tick(w: &mut impl Write, frame: &Frame, x: f64, label: &str) -> std::io::Result<()> {
    writeln!(
        w,
        "  <line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
        MARGIN_TOP + frame.inner_h,
        MARGIN_TOP + frame.inner_h + 5.0
    )?;
    writeln!(
        w,
        "  <text x=\"{x:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{label}</text>",
        MARGIN_TOP + frame.inner_h + 20.0
    )
}

fn draw_log_y_axis(
    w: &mut impl Write,
    frame: &Frame,
    scale: &LogScale,
    label: &str,
) -> std::io::Result<()> {
    let y_of = |v: f64| MARGIN_TOP + (1.0 - scale.fraction(v)) * frame.inner_h;
    let first_decade = scale.lo.ceil() as i64;
    let last_decade = scale.hi.floor() as i64;
    let decades = (last_decade - first_decade).max(0) + 1;
    let step = ((decades + 6) / 7).max(1);
    let mut d = first_decade;
    while d <= last_decade {
        let y = y_of(10f64.powi(d as i32));
        writeln!(
            w,
            "  <line x1=\"{MARGIN_LEFT}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>",
            MARGIN_LEFT + frame.inner_w
        )?;
        writeln!(
            w,
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">1e{d}</text>",
            MARGIN_LEFT - 8.0,
            y + 4.0
        )?;
        d += step;
    }
    writeln!(
        w,
        "  <text x=\"18\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{label}</text>",
        MARGIN_TOP + frame.inner_h / 2.0,
        MARGIN_TOP + frame.inner_h / 2.0
    )
}

fn draw_legend_entry(
    w: &mut impl Write,
    frame: &Frame,
    idx: usize,
    color: &str,
    label: &str,
) -> std::io::Result<()> {
    let ly = MARGIN_TOP + 14.0 + idx as f64 * 18.0;
    writeln!(
        w,
        "  <line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>",
        MARGIN_LEFT + frame.inner_w + 12.0,
        MARGIN_LEFT + frame.inner_w + 34.0
    )?;
    writeln!(
        w,
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{label}</text>",
        MARGIN_LEFT + frame.inner_w + 40.0,
        ly + 4.0
    )
}

/// Writes residual curves as a self-contained SVG line chart: linear
/// iteration or seconds axis, log-scale residual axis. Residuals at or
/// below zero (an exactly satisfied checkpoint) are clamped to one decade
/// below the smallest positive value so the curve stays visible. Emitting
/// zero curves is an error.
pub fn emit_curves_svg(
    curves: &[ResidualCurve],
    axis: CurveAxis,
    title: &str,
    w: &mut impl Write,
) -> std::io::Result<()> {
    if curves.is_empty() {
        return Err(empty_input("no curves"));
    }
    let frame = open_chart(w, title)?;
    let x_value = |pt: &CurvePoint| match axis {
        CurveAxis::Iterations => pt.iteration as f64,
        CurveAxis::Seconds => pt.seconds,
    };
    let max_x = curves
        .iter()
        .flat_map(|c| c.points.iter().map(x_value))
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let scale = LogScale::covering(
        curves
            .iter()
            .flat_map(|c| c.points.iter().map(|pt| pt.residual)),
    );
    let x_of = |v: f64| MARGIN_LEFT + (v / max_x) * frame.inner_w;
    let y_of = |v: f64| MARGIN_TOP + (1.0 - scale.fraction(v)) * frame.inner_h;

    for i in 0..=4 {
        let v = max_x * i as f64 / 4.0;
        let label = match axis {
            CurveAxis::Iterations => format!("{}", v.round() as u64),
            CurveAxis::Seconds => format_tick(v),
        };
        draw_x_tick(w, &frame, x_of(v), &label)?;
    }
    draw_x_label(
        w,
        &frame,
        match axis {
            CurveAxis::Iterations => "iteration",
            CurveAxis::Seconds => "seconds",
        },
    )?;
    draw_log_y_axis(w, &frame, &scale, "residual norm")?;

    for (idx, curve) in curves.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let pts: Vec<String> = curve
            .points
            .iter()
            .filter(|pt| pt.residual.is_finite() && x_value(pt).is_finite())
            .map(|pt| format!("{:.2},{:.2}", x_of(x_value(pt)), y_of(pt.residual)))
            .collect();
        writeln!(
            w,
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            pts.join(" ")
        )?;
        draw_legend_entry(w, &frame, idx, color, &format!("beta = {}", curve.beta))?;
    }
    writeln!(w, "</svg>")
}

/// Writes a sweep as a self-contained SVG scatter chart: batch size on a
/// log-scale horizontal axis, final residual on a log-scale vertical axis,
/// one color per relaxation value. Emitting zero records is an error.
pub fn emit_sweep_svg(
    records: &[SweepRecord],
    title: &str,
    w: &mut impl Write,
) -> std::io::Result<()> {
    if records.is_empty() {
        return Err(empty_input("no sweep records"));
    }
    let frame = open_chart(w, title)?;
    let mut betas: Vec<usize> = records.iter().map(|r| r.beta).collect();
    betas.sort_unstable();
    betas.dedup();
    let beta_lo = (betas[0] as f64).log10();
    let beta_hi = {
        let hi = (*betas.last().expect("nonempty") as f64).log10();
        if hi - beta_lo < 1e-9 {
            beta_lo + 1.0
        } else {
            hi
        }
    };
    let x_of = |beta: usize| {
        MARGIN_LEFT + ((beta as f64).log10() - beta_lo) / (beta_hi - beta_lo) * frame.inner_w
    };
    let scale = LogScale::covering(records.iter().map(|r| r.final_residual));
    let y_of = |v: f64| MARGIN_TOP + (1.0 - scale.fraction(v)) * frame.inner_h;

    for &beta in &betas {
        draw_x_tick(w, &frame, x_of(beta), &beta.to_string())?;
    }
    draw_x_label(w, &frame, "batch size")?;
    draw_log_y_axis(w, &frame, &scale, "final residual")?;

    let mut lambdas: Vec<u64> = Vec::new();
    for r in records {
        if !lambdas.contains(&r.lambda.to_bits()) {
            lambdas.push(r.lambda.to_bits());
        }
    }
    for r in records {
        let color_idx = lambdas
            .iter()
            .position(|&l| l == r.lambda.to_bits())
            .expect("collected above");
        writeln!(
            w,
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\" fill-opacity=\"0.7\"/>",
            x_of(r.beta),
            y_of(r.final_residual),
            PALETTE[color_idx % PALETTE.len()]
        )?;
    }
    for (idx, &bits) in lambdas.iter().enumerate() {
        draw_legend_entry(
            w,
            &frame,
            idx,
            PALETTE[idx % PALETTE.len()],
            &format!("lambda = {}", f64::from_bits(bits)),
        )?;
    }
    writeln!(w, "</svg>")
}
