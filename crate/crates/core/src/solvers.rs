//! The sampling Kaczmarz-Motzkin solver family and a block Kaczmarz baseline.
//!
//! One SKM iteration on `Ax <= b` with `m` rows:
//!
//! 1. draw a batch of `beta` distinct constraint indices uniformly at random;
//! 2. among the batch, select the constraint with the largest violation
//!    `a_i^T x - b_i` (ties go to the lowest index);
//! 3. if the selected violation is positive, move the iterate against that
//!    row's normal: `x <- x - lambda * violation / ||a_i||^2 * a_i`;
//!    otherwise leave the iterate in place.
//!
//! `beta = 1` is randomized Kaczmarz, `beta = m` is Motzkin's most-violated
//! rule, and intermediate batch sizes trade per-iteration cost against
//! progress per iteration.
//!
//! Halting is evaluated at checkpoints every `stride` iterations (default
//! `max(1, m / beta)`), so the cost of a full residual pass amortizes to
//! roughly the cost of one iteration's sampling work. For `beta = m` the
//! selection pass already touches every row, and the same pass doubles as
//! the halting check at no extra cost.

use std::num::NonZeroUsize;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::linalg::{dot, DenseMatrix, FeasibilityProblem, LinalgError, Vector};
use crate::rng::{rng_from_seed, SolverRng};

/// Default absolute residual-norm halting threshold, `2^-14`.
pub const DEFAULT_RESIDUAL_THRESHOLD: f64 = 1.0 / 16384.0;

/// Errors from solver configuration or invocation.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("batch size must satisfy 1 <= beta <= {m}, got {beta}")]
    InvalidBeta { beta: usize, m: usize },
    #[error("relaxation parameter must lie in (0, 2], got {lambda}")]
    InvalidLambda { lambda: f64 },
    #[error("halting threshold must be positive and finite, got {threshold}")]
    InvalidThreshold { threshold: f64 },
    #[error("point has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("block size must satisfy 1 <= size <= {m}, got {size}")]
    InvalidBlockSize { size: usize, m: usize },
    #[error("max_iterations must be at least 1")]
    ZeroIterationCap,
    #[error("selection set must be nonempty")]
    EmptySelection,
    #[error("selection index {index} out of range for {m} rows")]
    SelectionOutOfRange { index: usize, m: usize },
    #[error("certificate halting applies to inequality systems, not the block solver")]
    UnsupportedHalting,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// When to stop iterating, checked at trace checkpoints.
///
/// The two relative rules compare against the corresponding quantity at the
/// starting point; a starting point that already satisfies every constraint
/// halts immediately under any rule except [`HaltingRule::IterationCapOnly`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HaltingRule {
    /// Stop when `||(Ax - b)^+||_2 <= t`.
    ResidualNorm(f64),
    /// Stop when `||(Ax_k - b)^+||_2 / ||(Ax_0 - b)^+||_2 <= t`.
    RelativeResidualNorm(f64),
    /// Stop when `theta(x_k) / theta(x_0) <= t`, where `theta` is the
    /// largest single violation clamped at zero.
    RelativeMaxViolation(f64),
    /// Stop when the largest violation falls strictly below a certificate
    /// threshold. Meaningful on row-normalized systems, where crossing the
    /// threshold certifies feasibility of the underlying integer system.
    CertificateFound { threshold: f64 },
    /// Run exactly `max_iterations` iterations.
    IterationCapOnly,
}

impl HaltingRule {
    fn validate(&self) -> Result<(), SolverError> {
        let t = match self {
            HaltingRule::ResidualNorm(t)
            | HaltingRule::RelativeResidualNorm(t)
            | HaltingRule::RelativeMaxViolation(t)
            | HaltingRule::CertificateFound { threshold: t } => *t,
            HaltingRule::IterationCapOnly => return Ok(()),
        };
        if t > 0.0 && t.is_finite() {
            Ok(())
        } else {
            Err(SolverError::InvalidThreshold { threshold: t })
        }
    }
}

/// Why a run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HaltReason {
    /// A residual or relative halting rule was met.
    ThresholdMet,
    /// The largest violation fell below the certificate threshold.
    CertificateFound,
    /// The iteration cap was reached.
    IterationCap,
    /// The per-run wall-clock budget expired.
    TimeLimit,
}

impl HaltReason {
    /// Stable token used in CSV output and CLI summaries.
    pub fn token(self) -> &'static str {
        match self {
            HaltReason::ThresholdMet => "threshold",
            HaltReason::CertificateFound => "certificate",
            HaltReason::IterationCap => "iteration_cap",
            HaltReason::TimeLimit => "time_limit",
        }
    }

    /// Inverse of [`HaltReason::token`].
    pub fn from_token(token: &str) -> Option<Self> {
        match token {
            "threshold" => Some(HaltReason::ThresholdMet),
            "certificate" => Some(HaltReason::CertificateFound),
            "iteration_cap" => Some(HaltReason::IterationCap),
            "time_limit" => Some(HaltReason::TimeLimit),
            _ => None,
        }
    }
}

/// Configuration for one SKM run.
#[derive(Clone, Debug)]
pub struct SkmConfig {
    /// Batch size, `1 <= beta <= m`.
    pub beta: usize,
    /// Relaxation parameter in `(0, 2]`; `1` projects exactly onto the
    /// selected hyperplane, values above `1` overshoot it.
    pub lambda: f64,
    /// Hard iteration cap, at least 1.
    pub max_iterations: usize,
    pub halting: HaltingRule,
    /// Seed for the pinned generator; equal seeds reproduce the run.
    pub seed: u64,
    /// Record the count of satisfied constraints at each checkpoint.
    pub track_satisfied: bool,
    /// Iterations between halting checks and trace records. `None` picks
    /// `max(1, m / beta)`, which keeps the amortized checking cost near the
    /// per-iteration sampling cost.
    pub stride: Option<NonZeroUsize>,
    /// Optional wall-clock budget, enforced at checkpoints.
    pub time_limit: Option<Duration>,
}

impl SkmConfig {
    /// A config with the given batch size and relaxation and the defaults:
    /// absolute residual halting at [`DEFAULT_RESIDUAL_THRESHOLD`], a cap of
    /// 500000 iterations, seed 0, no satisfied-count tracking, automatic
    /// stride, no time limit.
    pub fn new(beta: usize, lambda: f64) -> Self {
        Self {
            beta,
            lambda,
            max_iterations: 500_000,
            halting: HaltingRule::ResidualNorm(DEFAULT_RESIDUAL_THRESHOLD),
            seed: 0,
            track_satisfied: false,
            stride: None,
            time_limit: None,
        }
    }

    pub fn validate(&self, m: usize) -> Result<(), SolverError> {
        if self.beta == 0 || self.beta > m {
            return Err(SolverError::InvalidBeta { beta: self.beta, m });
        }
        if !(self.lambda > 0.0 && self.lambda <= 2.0) {
            return Err(SolverError::InvalidLambda {
                lambda: self.lambda,
            });
        }
        if self.max_iterations == 0 {
            return Err(SolverError::ZeroIterationCap);
        }
        self.halting.validate()
    }

    fn effective_stride(&self, m: usize) -> usize {
        match self.stride {
            Some(s) => s.get(),
            None => (m / self.beta).max(1),
        }
    }
}

/// Snapshot of an iterate produced by [`skm_step`].
#[derive(Clone, Debug)]
pub struct IterateState {
    pub x: Vector,
    /// Iterations applied to the starting point to reach `x` (always 1 for
    /// a single [`skm_step`] call).
    pub iteration: usize,
    /// Index of the constraint selected at the last step.
    pub last_selected: usize,
    /// Violation `a_i^T x - b_i` of the selected constraint before the
    /// update; nonpositive means the iterate did not move.
    pub last_violation: f64,
}

/// One checkpoint row of a solver trace.
#[derive(Clone, Debug)]
pub struct TraceRecord {
    pub iteration: usize,
    /// `||(Ax - b)^+||_2` for inequality systems, `||Ax - b||_2` for the
    /// block solver on equalities.
    pub residual_norm: f64,
    /// Largest violation clamped at zero (largest `|a_i^T x - b_i|` for the
    /// block solver).
    pub max_violation: f64,
    /// Number of satisfied constraints, when tracking was requested.
    pub satisfied_count: Option<usize>,
    /// Wall-clock seconds since the run started. Not deterministic across
    /// runs, unlike everything else in a trace.
    pub elapsed_seconds: f64,
}

/// Full record of a solver run.
#[derive(Clone, Debug)]
pub struct RunTrace {
    /// Checkpoint records, strictly increasing in `iteration`, starting
    /// with the state of the initial point at iteration 0.
    pub records: Vec<TraceRecord>,
    pub final_x: Vector,
    /// Total iterations performed.
    pub iterations: usize,
    /// Residual norm at the final iterate.
    pub final_residual: f64,
    pub reason: HaltReason,
    /// Seed the run was started with, embedded for reproducibility.
    pub seed: u64,
    /// Wall-clock seconds for the whole run.
    pub wall_seconds: f64,
}

struct Status {
    residual_norm: f64,
    max_violation: f64,
    satisfied: Option<usize>,
}

fn status_from_violations(v: &[f64], track: bool) -> Status {
    let mut sum_sq = 0.0;
    let mut max_violation = 0.0f64;
    let mut satisfied = 0usize;
    for &vi in v {
        if vi > 0.0 {
            sum_sq += vi * vi;
            if vi > max_violation {
                max_violation = vi;
            }
        } else {
            satisfied += 1;
        }
    }
    Status {
        residual_norm: sum_sq.sqrt(),
        max_violation,
        satisfied: track.then_some(satisfied),
    }
}

fn halt_reason(rule: &HaltingRule, s: &Status, denom_residual: f64, denom_theta: f64) -> Option<HaltReason> {
    let met = match rule {
        HaltingRule::ResidualNorm(t) => s.residual_norm <= *t,
        HaltingRule::RelativeResidualNorm(t) => {
            denom_residual == 0.0 || s.residual_norm / denom_residual <= *t
        }
        HaltingRule::RelativeMaxViolation(t) => {
            denom_theta == 0.0 || s.max_violation / denom_theta <= *t
        }
        HaltingRule::CertificateFound { threshold } => {
            return (s.max_violation < *threshold).then_some(HaltReason::CertificateFound)
        }
        HaltingRule::IterationCapOnly => false,
    };
    met.then_some(HaltReason::ThresholdMet)
}

/// Draws `beta` distinct constraint indices uniformly at random from
/// `0..m`, returned sorted ascending. Every size-`beta` subset is equally
/// likely. `beta = m` returns the full index set without consuming
/// randomness.
pub fn sample_constraints(
    m: usize,
    beta: usize,
    rng: &mut SolverRng,
) -> Result<Vec<usize>, SolverError> {
    if beta == 0 || beta > m {
        return Err(SolverError::InvalidBeta { beta, m });
    }
    if beta == m {
        return Ok((0..m).collect());
    }
    let mut idx = rand::seq::index::sample(rng, m, beta).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

fn violation_of(p: &FeasibilityProblem, x: &[f64], i: usize) -> f64 {
    dot(p.matrix().row(i), x) - p.rhs()[i]
}

/// Among the constraints in `tau`, returns the index with the largest
/// violation `a_i^T x - b_i` (not clamped at zero) together with that
/// violation. Ties go to the lowest constraint index.
pub fn select_max_violation(
    p: &FeasibilityProblem,
    x: &Vector,
    tau: &[usize],
) -> Result<(usize, f64), SolverError> {
    if tau.is_empty() {
        return Err(SolverError::EmptySelection);
    }
    if x.len() != p.num_cols() {
        return Err(SolverError::DimensionMismatch {
            expected: p.num_cols(),
            got: x.len(),
        });
    }
    let m = p.num_rows();
    if let Some(&bad) = tau.iter().find(|&&i| i >= m) {
        return Err(SolverError::SelectionOutOfRange { index: bad, m });
    }
    Ok(select_from(p, x.as_slice(), tau))
}

fn select_from(p: &FeasibilityProblem, x: &[f64], tau: &[usize]) -> (usize, f64) {
    let mut best_i = tau[0];
    let mut best_v = violation_of(p, x, best_i);
    for &i in &tau[1..] {
        let v = violation_of(p, x, i);
        if v > best_v || (v == best_v && i < best_i) {
            best_i = i;
            best_v = v;
        }
    }
    (best_i, best_v)
}

/// Applies the relaxed projection for constraint `row` with the given
/// (pre-update) violation. A nonpositive violation leaves `x` unchanged.
fn project_step(p: &FeasibilityProblem, x: &mut [f64], row: usize, violation: f64, lambda: f64) {
    if violation <= 0.0 {
        return;
    }
    let rn = p.row_norms()[row];
    let scale = lambda * violation / (rn * rn);
    for (xi, aij) in x.iter_mut().zip(p.matrix().row(row)) {
        *xi -= scale * aij;
    }
}

/// Performs a single SKM iteration from `x` and returns the new state.
///
/// Sampling consumes randomness from `rng`, so repeated calls with the same
/// generator walk the same trajectory as [`skm_solve`] with equal
/// parameters. When every sampled constraint is satisfied the returned
/// point equals `x` and `last_violation` is nonpositive.
pub fn skm_step(
    p: &FeasibilityProblem,
    x: &Vector,
    cfg: &SkmConfig,
    rng: &mut SolverRng,
) -> Result<IterateState, SolverError> {
    cfg.validate(p.num_rows())?;
    if x.len() != p.num_cols() {
        return Err(SolverError::DimensionMismatch {
            expected: p.num_cols(),
            got: x.len(),
        });
    }
    let tau = sample_constraints(p.num_rows(), cfg.beta, rng)?;
    let mut next = x.as_slice().to_vec();
    let (row, violation) = select_from(p, &next, &tau);
    project_step(p, &mut next, row, violation, cfg.lambda);
    Ok(IterateState {
        x: Vector::new(next)?,
        iteration: 1,
        last_selected: row,
        last_violation: violation,
    })
}

/// Runs the SKM iteration from `x0` until a halting rule fires, the
/// iteration cap is reached, or the time budget expires.
///
/// The trace starts with a checkpoint for `x0` itself; a starting point
/// that already meets the halting rule returns immediately with zero
/// iterations. Identical inputs (including the seed) produce bitwise
/// identical iterates and records; only the wall-clock fields vary between
/// runs.
pub fn skm_solve(
    p: &FeasibilityProblem,
    cfg: &SkmConfig,
    x0: &Vector,
) -> Result<RunTrace, SolverError> {
    cfg.validate(p.num_rows())?;
    if x0.len() != p.num_cols() {
        return Err(SolverError::DimensionMismatch {
            expected: p.num_cols(),
            got: x0.len(),
        });
    }
    let m = p.num_rows();
    let stride = cfg.effective_stride(m);
    let motzkin = cfg.beta == m;
    let mut rng = rng_from_seed(cfg.seed);
    let mut x = x0.as_slice().to_vec();
    let start = Instant::now();
    let deadline = cfg.time_limit.map(|d| start + d);

    let mut records = Vec::new();
    let mut violations = p.violations(&x)?;
    let mut status = status_from_violations(&violations, cfg.track_satisfied);
    let denom_residual = status.residual_norm;
    let denom_theta = status.max_violation;
    records.push(TraceRecord {
        iteration: 0,
        residual_norm: status.residual_norm,
        max_violation: status.max_violation,
        satisfied_count: status.satisfied,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    });

    let mut iterations = 0usize;
    let reason = 'run: loop {
        if let Some(r) = halt_reason(&cfg.halting, &status, denom_residual, denom_theta) {
            break 'run r;
        }
        if iterations == cfg.max_iterations {
            break 'run HaltReason::IterationCap;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break 'run HaltReason::TimeLimit;
        }

        let checkpoint = (iterations + stride).min(cfg.max_iterations);
        if motzkin {
            // The selection pass touches every violation, so each iteration
            // refreshes the full status for free.
            while iterations < checkpoint {
                let (row, violation) = {
                    let mut best_i = 0usize;
                    let mut best_v = violations[0];
                    for (i, &v) in violations.iter().enumerate().skip(1) {
                        if v > best_v {
                            best_i = i;
                            best_v = v;
                        }
                    }
                    (best_i, best_v)
                };
                project_step(p, &mut x, row, violation, cfg.lambda);
                iterations += 1;
                violations = p.violations(&x)?;
            }
        } else {
            while iterations < checkpoint {
                let tau = sample_constraints(m, cfg.beta, &mut rng)?;
                let (row, violation) = select_from(p, &x, &tau);
                project_step(p, &mut x, row, violation, cfg.lambda);
                iterations += 1;
            }
            violations = p.violations(&x)?;
        }
        status = status_from_violations(&violations, cfg.track_satisfied);
        records.push(TraceRecord {
            iteration: iterations,
            residual_norm: status.residual_norm,
            max_violation: status.max_violation,
            satisfied_count: status.satisfied,
            elapsed_seconds: start.elapsed().as_secs_f64(),
        });
    };

    Ok(RunTrace {
        records,
        final_x: Vector::new(x)?,
        iterations,
        final_residual: status.residual_norm,
        reason,
        seed: cfg.seed,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Motzkin's rule: [`skm_solve`] with `beta = m`. Deterministic, so no seed
/// is taken.
pub fn motzkin_solve(
    p: &FeasibilityProblem,
    lambda: f64,
    halting: HaltingRule,
    max_iterations: usize,
    x0: &Vector,
) -> Result<RunTrace, SolverError> {
    let mut cfg = SkmConfig::new(p.num_rows(), lambda);
    cfg.halting = halting;
    cfg.max_iterations = max_iterations;
    skm_solve(p, &cfg, x0)
}

/// Randomized Kaczmarz: [`skm_solve`] with `beta = 1`.
pub fn randomized_kaczmarz_solve(
    p: &FeasibilityProblem,
    lambda: f64,
    halting: HaltingRule,
    max_iterations: usize,
    seed: u64,
    x0: &Vector,
) -> Result<RunTrace, SolverError> {
    let mut cfg = SkmConfig::new(1, lambda);
    cfg.halting = halting;
    cfg.max_iterations = max_iterations;
    cfg.seed = seed;
    skm_solve(p, &cfg, x0)
}

/// Configuration for the block Kaczmarz baseline on equality systems.
#[derive(Clone, Debug)]
pub struct BlockConfig {
    /// Rows per block; the fixed partition has `ceil(m / block_size)`
    /// blocks, the last one possibly smaller.
    pub block_size: usize,
    pub lambda: f64,
    pub max_iterations: usize,
    /// Halting on the equality residual `||Ax - b||_2`;
    /// [`HaltingRule::CertificateFound`] is not supported here.
    pub halting: HaltingRule,
    pub seed: u64,
    /// Iterations between halting checks; defaults to 1 because each block
    /// iteration already pays for a small least-squares solve.
    pub stride: Option<NonZeroUsize>,
    pub time_limit: Option<Duration>,
}

impl BlockConfig {
    pub fn new(block_size: usize, lambda: f64) -> Self {
        Self {
            block_size,
            lambda,
            max_iterations: 100_000,
            halting: HaltingRule::ResidualNorm(DEFAULT_RESIDUAL_THRESHOLD),
            seed: 0,
            stride: None,
            time_limit: None,
        }
    }

    fn validate(&self, m: usize) -> Result<(), SolverError> {
        if self.block_size == 0 || self.block_size > m {
            return Err(SolverError::InvalidBlockSize {
                size: self.block_size,
                m,
            });
        }
        if !(self.lambda > 0.0 && self.lambda <= 2.0) {
            return Err(SolverError::InvalidLambda {
                lambda: self.lambda,
            });
        }
        if self.max_iterations == 0 {
            return Err(SolverError::ZeroIterationCap);
        }
        if matches!(self.halting, HaltingRule::CertificateFound { .. }) {
            return Err(SolverError::UnsupportedHalting);
        }
        self.halting.validate()
    }
}

/// Splits `0..m` into a uniformly random partition of blocks of
/// `block_size` rows (last block smaller when `block_size` does not divide
/// `m`). Every row lands in exactly one block.
pub(crate) fn partition_rows(m: usize, block_size: usize, rng: &mut SolverRng) -> Vec<Vec<usize>> {
    use rand::seq::SliceRandom;
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    order.chunks(block_size).map(<[usize]>::to_vec).collect()
}

fn equality_status(a: &DenseMatrix, b: &Vector, x: &[f64]) -> Result<Status, SolverError> {
    let mut v = a.mul_vec(x)?;
    for (vi, bi) in v.iter_mut().zip(b.iter()) {
        *vi -= bi;
    }
    let mut sum_sq = 0.0;
    let mut max_abs = 0.0f64;
    for &vi in &v {
        sum_sq += vi * vi;
        max_abs = max_abs.max(vi.abs());
    }
    Ok(Status {
        residual_norm: sum_sq.sqrt(),
        max_violation: max_abs,
        satisfied: None,
    })
}

/// Block Kaczmarz for equality systems `Ax = b`.
///
/// The rows are split once per run into a fixed uniformly random partition.
/// Each iteration picks one block uniformly at random and applies
/// `x <- x + lambda * A_block^+ (b_block - A_block x)`, where the
/// pseudoinverse solve runs through a fresh singular value decomposition of
/// the block. The factorization is deliberately recomputed every iteration:
/// paying for a small dense solve per step is the cost model this baseline
/// represents.
///
/// Inconsistent systems do not converge to zero residual; the run then ends
/// at the iteration cap or time limit and reports that reason rather than
/// erroring.
pub fn block_kaczmarz_solve(
    a: &DenseMatrix,
    b: &Vector,
    cfg: &BlockConfig,
    x0: &Vector,
) -> Result<RunTrace, SolverError> {
    cfg.validate(a.rows())?;
    if b.len() != a.rows() {
        return Err(SolverError::DimensionMismatch {
            expected: a.rows(),
            got: b.len(),
        });
    }
    if x0.len() != a.cols() {
        return Err(SolverError::DimensionMismatch {
            expected: a.cols(),
            got: x0.len(),
        });
    }
    let m = a.rows();
    let n = a.cols();
    let stride = cfg.stride.map_or(1, NonZeroUsize::get);
    let mut rng = rng_from_seed(cfg.seed);
    let blocks = partition_rows(m, cfg.block_size, &mut rng);
    let mut x = x0.as_slice().to_vec();
    let start = Instant::now();
    let deadline = cfg.time_limit.map(|d| start + d);

    let mut records = Vec::new();
    let mut status = equality_status(a, b, &x)?;
    let denom_residual = status.residual_norm;
    let denom_theta = status.max_violation;
    records.push(TraceRecord {
        iteration: 0,
        residual_norm: status.residual_norm,
        max_violation: status.max_violation,
        satisfied_count: None,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    });

    let mut iterations = 0usize;
    let reason = 'run: loop {
        if let Some(r) = halt_reason(&cfg.halting, &status, denom_residual, denom_theta) {
            break 'run r;
        }
        if iterations == cfg.max_iterations {
            break 'run HaltReason::IterationCap;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break 'run HaltReason::TimeLimit;
        }

        let checkpoint = (iterations + stride).min(cfg.max_iterations);
        while iterations < checkpoint {
            use rand::Rng;
            let block = &blocks[rng.gen_range(0..blocks.len())];
            let rows = block.len();
            let a_block = nalgebra::DMatrix::from_fn(rows, n, |i, j| a.entry(block[i], j));
            let mut r_block = nalgebra::DVector::zeros(rows);
            for (i, &row) in block.iter().enumerate() {
                r_block[i] = b[row] - dot(a.row(row), &x);
            }
            let svd = a_block.svd(true, true);
            let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
            if sigma_max > 0.0 {
                let delta = svd
                    .solve(&r_block, sigma_max * 1e-12)
                    .expect("SVD factors were requested");
                for (xi, di) in x.iter_mut().zip(delta.iter()) {
                    *xi += cfg.lambda * di;
                }
            }
            iterations += 1;
        }
        status = equality_status(a, b, &x)?;
        records.push(TraceRecord {
            iteration: iterations,
            residual_norm: status.residual_norm,
            max_violation: status.max_violation,
            satisfied_count: None,
            elapsed_seconds: start.elapsed().as_secs_f64(),
        });
    };

    Ok(RunTrace {
        records,
        final_x: Vector::new(x)?,
        iterations,
        final_residual: status.residual_norm,
        reason,
        seed: cfg.seed,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}
