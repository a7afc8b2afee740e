//! Convergence-rate calculators, batch-selection expectations, encoding
//! lengths, feasibility certificates, and the batch-size gain model.
//!
//! The quantities here mirror the guarantees the solver family comes with:
//!
//! * contraction rates for the expected squared distance to the feasible
//!   region, per iteration and accumulated over two-phase schedules;
//! * the exact expectation of the squared selected violation under batch
//!   sampling, in both floating-point and exact rational arithmetic, with
//!   independent brute-force counterparts for cross-checking;
//! * the binary encoding length of an integer system, which yields both a
//!   violation threshold that certifies feasibility and an iteration count
//!   after which the certificate is likely (with an explicit bound on the
//!   failure probability);
//! * a cost model for choosing the batch size.
//!
//! Floating-point routines target desk-scale systems; every formula-driven
//! value has a test oracle that computes the same quantity by an
//! independent route.

use num::integer::binomial;
use num::rational::BigRational;
use num::{BigInt, Signed, Zero};
use thiserror::Error;

use crate::linalg::{norm, DenseMatrix, FeasibilityProblem, LinalgError, Vector};

/// Subset count above which the brute-force expectations refuse to run.
pub const BRUTE_FORCE_BUDGET: u128 = 1_000_000;

/// Smallest singular value accepted before a least-squares system is
/// declared rank deficient for Hoffman estimation.
pub const RANK_DEFICIENCY_CUTOFF: f64 = 1e-10;

/// Largest integer magnitude accepted by [`encoding_length`]; above this,
/// `f64` can no longer represent the value exactly.
pub const MAX_EXACT_INTEGER: f64 = 9007199254740992.0;

/// Errors from the calculators in this module.
#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("relaxation parameter must lie in (0, 2], got {lambda}")]
    LambdaOutOfRange { lambda: f64 },
    #[error("this bound requires a relaxation parameter strictly inside (0, 2), got {lambda}")]
    LambdaNotStrict { lambda: f64 },
    #[error(
        "Hoffman constant unavailable: smallest singular value {sigma_min:.3e} indicates rank \
         deficiency; supply a user value"
    )]
    RankDeficient { sigma_min: f64 },
    #[error("Hoffman estimation needs at least as many rows as columns, got {m} x {n}")]
    UnderdeterminedEqualities { m: usize, n: usize },
    #[error("residual entries must be nonnegative and finite, got {value} at index {index}")]
    BadResidualEntry { index: usize, value: f64 },
    #[error("batch size must satisfy 1 <= beta <= {m}, got {beta}")]
    InvalidBeta { beta: usize, m: usize },
    #[error("residual vector must be nonempty")]
    EmptyResidual,
    #[error(
        "{count} subsets of size {beta} from {m} entries exceeds the brute-force budget of \
         {budget}"
    )]
    BruteForceTooLarge {
        m: usize,
        beta: usize,
        count: u128,
        budget: u128,
    },
    #[error("matrix entry at ({row}, {col}) is not an exactly representable integer: {value}")]
    NonIntegerEntry { row: usize, col: usize, value: f64 },
    #[error("right-hand side entry {row} is not an exactly representable integer: {value}")]
    NonIntegerRhs { row: usize, value: f64 },
    #[error("satisfied count must satisfy 0 <= s <= m = {m}, got {s}")]
    InvalidSatisfiedCount { s: usize, m: usize },
    #[error("cost model requires c > 0 and C >= 0, got c = {c}, C = {big_c}")]
    InvalidCosts { c: f64, big_c: f64 },
    #[error("phase split must satisfy K <= k, got K = {big_k}, k = {k}")]
    BadPhaseSplit { k: usize, big_k: usize },
    #[error("certificate checks require a row-normalized system")]
    NotNormalized,
    #[error(
        "encoding length was computed for a {enc_rows} x {enc_cols} system, but the problem is \
         {rows} x {cols}"
    )]
    MismatchedEncoding {
        enc_rows: usize,
        enc_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("Hoffman constant must be positive and finite, got {l2}")]
    InvalidHoffman { l2: f64 },
    #[error("row count must be at least 1")]
    ZeroRows,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// How a Hoffman constant was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HoffmanMethod {
    /// `1 / sigma_min` of a full-column-rank equality matrix.
    LeftInverse,
    /// Supplied by the caller.
    UserSupplied,
}

/// A Hoffman constant for the Euclidean norm together with the implied
/// upper bound for the max norm.
#[derive(Clone, Copy, Debug)]
pub struct HoffmanEstimate {
    /// Euclidean-norm Hoffman constant `L_2`.
    pub l2: f64,
    /// Upper bound `sqrt(m) * L_2` on the max-norm constant.
    pub l_inf_upper: f64,
    pub method: HoffmanMethod,
}

impl HoffmanEstimate {
    /// Wraps a caller-supplied `L_2` for a system with `m` rows.
    pub fn user_supplied(l2: f64, m: usize) -> Result<Self, TheoryError> {
        if !(l2 > 0.0 && l2.is_finite()) {
            return Err(TheoryError::InvalidHoffman { l2 });
        }
        Ok(Self {
            l2,
            l_inf_upper: (m as f64).sqrt() * l2,
            method: HoffmanMethod::UserSupplied,
        })
    }
}

/// Hoffman constant of a consistent equality system `Ax = b` with full
/// column rank: distances to the solution set satisfy
/// `d(x) <= L_2 ||Ax - b||_2` with `L_2 = 1 / sigma_min(A)`.
///
/// For the inequality system obtained by stacking `Ax <= b` on top of
/// `-Ax <= -b`, the positive parts of the stacked violations recombine into
/// `|Ax - b|` entrywise, so the same constant applies there; callers using
/// the stacked system in rate formulas should pass the stacked row count
/// `2m` as `m`, not the equality row count.
pub fn hoffman_from_equalities(a: &DenseMatrix) -> Result<HoffmanEstimate, TheoryError> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(TheoryError::UnderdeterminedEqualities { m, n });
    }
    let na = nalgebra::DMatrix::from_fn(m, n, |i, j| a.entry(i, j));
    let sv = na.singular_values();
    let sigma_min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if sigma_min <= RANK_DEFICIENCY_CUTOFF {
        return Err(TheoryError::RankDeficient { sigma_min });
    }
    let l2 = 1.0 / sigma_min;
    Ok(HoffmanEstimate {
        l2,
        l_inf_upper: (m as f64).sqrt() * l2,
        method: HoffmanMethod::LeftInverse,
    })
}

fn validate_lambda(lambda: f64) -> Result<(), TheoryError> {
    if lambda > 0.0 && lambda <= 2.0 {
        Ok(())
    } else {
        Err(TheoryError::LambdaOutOfRange { lambda })
    }
}

fn validate_hoffman(l2: f64) -> Result<(), TheoryError> {
    if l2 > 0.0 && l2.is_finite() {
        Ok(())
    } else {
        Err(TheoryError::InvalidHoffman { l2 })
    }
}

fn contraction(lambda: f64, rows: f64, l2: f64) -> f64 {
    let rate = 1.0 - (2.0 * lambda - lambda * lambda) / (rows * l2 * l2);
    if rate < 0.0 {
        log::warn!("contraction rate {rate} is negative; clamping to 0");
        0.0
    } else {
        rate
    }
}

/// Worst-case expected contraction factor per iteration on a feasible
/// row-normalized system with `m` rows:
/// `1 - (2 lambda - lambda^2) / (m L_2^2)`.
///
/// The factor applies to the expected squared distance to the feasible
/// region regardless of the batch size. Negative values (possible only for
/// unusually small user-supplied constants) are clamped to zero with a
/// warning.
pub fn contraction_rate(lambda: f64, m: usize, l2: f64) -> Result<f64, TheoryError> {
    validate_lambda(lambda)?;
    validate_hoffman(l2)?;
    if m == 0 {
        return Err(TheoryError::ZeroRows);
    }
    Ok(contraction(lambda, m as f64, l2))
}

/// The batch-adaptive denominator `V = max(m - s, m - beta + 1)`, where `s`
/// is the number of constraints satisfied at the current iterate.
pub fn v_bound(m: usize, s: usize, beta: usize) -> Result<usize, TheoryError> {
    if beta == 0 || beta > m {
        return Err(TheoryError::InvalidBeta { beta, m });
    }
    if s > m {
        return Err(TheoryError::InvalidSatisfiedCount { s, m });
    }
    Ok((m - s).max(m - beta + 1))
}

/// Per-iteration contraction factor with the batch-adaptive denominator
/// `v` in place of `m`; see [`v_bound`]. Tighter than [`contraction_rate`]
/// whenever the iterate already satisfies many constraints.
pub fn per_iteration_rate(lambda: f64, v: usize, l2: f64) -> Result<f64, TheoryError> {
    validate_lambda(lambda)?;
    validate_hoffman(l2)?;
    if v == 0 {
        return Err(TheoryError::ZeroRows);
    }
    Ok(contraction(lambda, v as f64, l2))
}

/// Expected squared-distance bound after `k` iterations split into a
/// conservative first phase of `big_k` iterations at the worst-case rate
/// and a second phase at the tighter `m - beta + 1` denominator:
///
/// `rate_1^K * rate_2^(k - K) * d0_sq`.
///
/// The tighter second phase models iterates that already satisfy at least
/// `beta - 1` constraints, which is guaranteed once the iterate has
/// projected onto sampled constraints for a while. The optional ambient
/// dimension only powers a plausibility warning (`beta <= m - n` is the
/// hypothesis under which the second phase provably applies).
pub fn two_phase_bound(
    k: usize,
    big_k: usize,
    lambda: f64,
    m: usize,
    beta: usize,
    n: Option<usize>,
    l2: f64,
    d0_sq: f64,
) -> Result<f64, TheoryError> {
    if big_k > k {
        return Err(TheoryError::BadPhaseSplit { k, big_k });
    }
    if beta == 0 || beta > m {
        return Err(TheoryError::InvalidBeta { beta, m });
    }
    if let Some(n) = n {
        if m < n || beta > m - n {
            log::warn!(
                "two-phase bound assumes beta <= m - n; got beta = {beta}, m = {m}, n = {n}"
            );
        }
    }
    let rate1 = contraction_rate(lambda, m, l2)?;
    let rate2 = per_iteration_rate(lambda, m - beta + 1, l2)?;
    Ok(rate1.powf(big_k as f64) * rate2.powf((k - big_k) as f64) * d0_sq)
}

fn validate_residual(residual: &[f64], beta: usize) -> Result<(), TheoryError> {
    let m = residual.len();
    if m == 0 {
        return Err(TheoryError::EmptyResidual);
    }
    if beta == 0 || beta > m {
        return Err(TheoryError::InvalidBeta { beta, m });
    }
    for (index, &value) in residual.iter().enumerate() {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(TheoryError::BadResidualEntry { index, value });
        }
    }
    Ok(())
}

/// Exact expectation of the squared largest entry among a uniformly random
/// size-`beta` batch of the nonnegative residual vector:
///
/// `E = (1 / C(m, beta)) * sum_{k=0}^{m-beta} C(beta-1+k, beta-1) * r_(k+beta)^2`
///
/// where `r_(j)` is the `j`-th smallest entry. The weight counts the
/// batches whose largest entry is `r_(k+beta)`, so the weights sum to
/// `C(m, beta)` exactly.
///
/// For `m <= 60` the weights are accumulated in exact 128-bit integers;
/// larger systems use a logarithmic recurrence whose error stays far below
/// the accuracy of the inputs.
pub fn expected_selected_residual_sq(residual: &[f64], beta: usize) -> Result<f64, TheoryError> {
    validate_residual(residual, beta)?;
    let m = residual.len();
    let mut r = residual.to_vec();
    r.sort_by(|a, b| a.partial_cmp(b).expect("entries validated finite"));
    if m <= 60 {
        // Exact integer weights: w_0 = 1, w_k = w_{k-1} (beta - 1 + k) / k,
        // each division exact by the binomial recurrence.
        let mut total: u128 = 1;
        for i in 1..=beta as u128 {
            total = total * (m as u128 - beta as u128 + i) / i;
        }
        let mut w: u128 = 1;
        let mut acc = 0.0;
        for k in 0..=(m - beta) {
            if k > 0 {
                w = w * (beta as u128 - 1 + k as u128) / k as u128;
            }
            let rv = r[k + beta - 1];
            acc += (w as f64) * rv * rv;
        }
        Ok(acc / total as f64)
    } else {
        let ln_total: f64 = (1..=beta)
            .map(|i| (((m - beta + i) as f64) / i as f64).ln())
            .sum();
        let mut lq = -ln_total;
        let mut acc = 0.0;
        for k in 0..=(m - beta) {
            if k > 0 {
                lq += (((beta - 1 + k) as f64) / k as f64).ln();
            }
            let rv = r[k + beta - 1];
            acc += lq.exp() * rv * rv;
        }
        Ok(acc)
    }
}

fn validate_residual_exact(residual: &[BigRational], beta: usize) -> Result<(), TheoryError> {
    let m = residual.len();
    if m == 0 {
        return Err(TheoryError::EmptyResidual);
    }
    if beta == 0 || beta > m {
        return Err(TheoryError::InvalidBeta { beta, m });
    }
    if let Some(index) = residual.iter().position(|v| v.is_negative()) {
        return Err(TheoryError::BadResidualEntry {
            index,
            value: f64::NAN,
        });
    }
    Ok(())
}

/// [`expected_selected_residual_sq`] in exact rational arithmetic.
pub fn expected_selected_residual_sq_exact(
    residual: &[BigRational],
    beta: usize,
) -> Result<BigRational, TheoryError> {
    validate_residual_exact(residual, beta)?;
    let m = residual.len();
    let mut r = residual.to_vec();
    r.sort();
    let total = binomial(BigInt::from(m), BigInt::from(beta));
    let mut acc = BigRational::zero();
    for k in 0..=(m - beta) {
        let weight = binomial(BigInt::from(beta - 1 + k), BigInt::from(beta - 1));
        let rv = &r[k + beta - 1];
        acc += BigRational::from(weight) * rv * rv;
    }
    Ok(acc / BigRational::from(total))
}

fn subset_count(m: usize, beta: usize) -> Result<u128, TheoryError> {
    let mut count: u128 = 1;
    for i in 1..=beta as u128 {
        count = count
            .checked_mul(m as u128 - beta as u128 + i)
            .ok_or(TheoryError::BruteForceTooLarge {
                m,
                beta,
                count: u128::MAX,
                budget: BRUTE_FORCE_BUDGET,
            })?
            / i;
        if count > BRUTE_FORCE_BUDGET {
            return Err(TheoryError::BruteForceTooLarge {
                m,
                beta,
                count,
                budget: BRUTE_FORCE_BUDGET,
            });
        }
    }
    Ok(count)
}

/// Visits every size-`beta` index subset of `0..m` in lexicographic order.
fn for_each_combination(m: usize, beta: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..beta).collect();
    loop {
        f(&idx);
        // Advance the rightmost index that can still move.
        let mut i = beta;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - beta {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..beta {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Brute-force counterpart of [`expected_selected_residual_sq`]: enumerates
/// every batch, takes the largest entry of each, and averages the squares.
/// Shares no code with the closed form (no sorting, no binomial weights),
/// which is what makes it a meaningful cross-check. Refuses inputs with
/// more than [`BRUTE_FORCE_BUDGET`] batches.
pub fn brute_force_expected_max_sq(residual: &[f64], beta: usize) -> Result<f64, TheoryError> {
    validate_residual(residual, beta)?;
    let m = residual.len();
    let count = subset_count(m, beta)?;
    let mut acc = 0.0;
    for_each_combination(m, beta, |idx| {
        let mx = idx
            .iter()
            .map(|&i| residual[i])
            .fold(f64::NEG_INFINITY, f64::max);
        acc += mx * mx;
    });
    Ok(acc / count as f64)
}

/// [`brute_force_expected_max_sq`] in exact rational arithmetic.
pub fn brute_force_expected_max_sq_exact(
    residual: &[BigRational],
    beta: usize,
) -> Result<BigRational, TheoryError> {
    validate_residual_exact(residual, beta)?;
    let m = residual.len();
    let count = subset_count(m, beta)?;
    let mut acc = BigRational::zero();
    for_each_combination(m, beta, |idx| {
        let mx = idx
            .iter()
            .map(|&i| &residual[i])
            .max()
            .expect("batch is nonempty");
        acc += mx * mx;
    });
    Ok(acc / BigRational::from(BigInt::from(count)))
}

/// Binary encoding length of an integer system, plus the largest row norm.
#[derive(Clone, Copy, Debug)]
pub struct EncodingLength {
    /// `sigma = sum log2(|a_ij| + 1) + sum log2(|b_i| + 1) + log2(m n) + 2`.
    pub sigma: f64,
    /// Largest Euclidean row norm of `A`.
    pub max_row_norm: f64,
    pub rows: usize,
    pub cols: usize,
}

fn integral(value: f64) -> bool {
    value.is_finite() && value.fract() == 0.0 && value.abs() <= MAX_EXACT_INTEGER
}

/// Computes the binary encoding length of `A x <= b` with integer data.
///
/// Every entry must be an integer stored exactly in an `f64` (magnitude at
/// most 2^53); rational systems should be scaled by row denominators first,
/// which leaves the solution set unchanged.
pub fn encoding_length(a: &DenseMatrix, b: &Vector) -> Result<EncodingLength, TheoryError> {
    if b.len() != a.rows() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.rows(),
            got: b.len(),
        }
        .into());
    }
    let mut sigma = 0.0;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let v = a.entry(i, j);
            if !integral(v) {
                return Err(TheoryError::NonIntegerEntry {
                    row: i,
                    col: j,
                    value: v,
                });
            }
            sigma += (v.abs() + 1.0).log2();
        }
    }
    for i in 0..b.len() {
        let v = b[i];
        if !integral(v) {
            return Err(TheoryError::NonIntegerRhs { row: i, value: v });
        }
        sigma += (v.abs() + 1.0).log2();
    }
    sigma += ((a.rows() * a.cols()) as f64).log2() + 2.0;
    let max_row_norm = (0..a.rows())
        .map(|i| norm(a.row(i)))
        .fold(0.0f64, f64::max);
    Ok(EncodingLength {
        sigma,
        max_row_norm,
        rows: a.rows(),
        cols: a.cols(),
    })
}

/// Largest violation clamped at zero: `max(0, max_i (a_i^T x - b_i))`.
/// Zero exactly when `x` satisfies every constraint.
pub fn max_violation(p: &FeasibilityProblem, x: &Vector) -> Result<f64, TheoryError> {
    let v = p.residual(x)?;
    Ok(v.iter().cloned().fold(0.0f64, f64::max))
}

/// Outcome of a certificate check, optionally annotated with the iteration
/// bound and failure probability of the run that produced it.
#[derive(Clone, Copy, Debug)]
pub struct CertificateReport {
    /// Largest violation of the normalized system at the tested point.
    pub theta: f64,
    /// Certificate threshold `2^(1 - sigma) / max_row_norm`.
    pub threshold: f64,
    /// True exactly when `theta < threshold` (strict).
    pub is_certificate: bool,
    /// Iteration count after which a certificate is probable, when the
    /// caller computed one; see [`iteration_bound`].
    pub iteration_bound: Option<usize>,
    /// Bound on the probability that a feasible system fails to certify
    /// within the iteration bound, when the caller computed one.
    pub failure_probability_bound: Option<f64>,
}

/// Tests whether a point certifies feasibility of the integer system whose
/// encoding length is `enc`.
///
/// `p` must be the row-normalized version of that system. If the largest
/// normalized violation at `x` falls strictly below
/// `2^(1 - sigma) / max_row_norm`, then the underlying integer system is
/// feasible: any infeasible integer system keeps its (unnormalized)
/// violation at least `2^(1 - sigma)` everywhere, so no point of an
/// infeasible system can ever pass this test.
pub fn certificate_check(
    p: &FeasibilityProblem,
    x: &Vector,
    enc: &EncodingLength,
) -> Result<CertificateReport, TheoryError> {
    if !p.is_normalized() {
        return Err(TheoryError::NotNormalized);
    }
    if enc.rows != p.num_rows() || enc.cols != p.num_cols() {
        return Err(TheoryError::MismatchedEncoding {
            enc_rows: enc.rows,
            enc_cols: enc.cols,
            rows: p.num_rows(),
            cols: p.num_cols(),
        });
    }
    let threshold = (1.0 - enc.sigma).exp2() / enc.max_row_norm;
    let theta = max_violation(p, x)?;
    Ok(CertificateReport {
        theta,
        threshold,
        is_certificate: theta < threshold,
        iteration_bound: None,
        failure_probability_bound: None,
    })
}

/// Number of iterations after which a feasible integer system has most
/// likely produced a certificate: the smallest integer strictly exceeding
///
/// `(4 sigma - 4 - log2 n + 2 log2 max_row_norm) / log2(m L2^2 / (m L2^2 - 2 lambda + lambda^2))`.
///
/// Requires `lambda` strictly inside `(0, 2)`; at `lambda = 2` the expected
/// contraction vanishes and no finite bound exists. When the contraction
/// consumes the whole distance in one expected step (tiny `m L2^2`), or
/// the numerator is nonpositive, the bound is 1.
pub fn iteration_bound(
    enc: &EncodingLength,
    n: usize,
    m: usize,
    lambda: f64,
    l2: f64,
) -> Result<usize, TheoryError> {
    if !(lambda > 0.0 && lambda < 2.0) {
        return Err(TheoryError::LambdaNotStrict { lambda });
    }
    validate_hoffman(l2)?;
    let numerator =
        4.0 * enc.sigma - 4.0 - (n as f64).log2() + 2.0 * enc.max_row_norm.log2();
    if numerator <= 0.0 {
        return Ok(1);
    }
    let m_l2_sq = m as f64 * l2 * l2;
    let gap = m_l2_sq - (2.0 * lambda - lambda * lambda);
    if gap <= 0.0 {
        return Ok(1);
    }
    let denominator = (m_l2_sq / gap).log2();
    let bound = numerator / denominator;
    if !bound.is_finite() || bound >= usize::MAX as f64 / 2.0 {
        log::warn!("iteration bound {bound} saturates the integer range");
        return Ok(usize::MAX);
    }
    Ok(bound.floor() as usize + 1)
}

/// Bound on the probability that a feasible system with encoding length
/// `enc` still has no certificate after `k` iterations:
///
/// `(max_row_norm * 2^(2 sigma - 2) / sqrt(n)) * rate^(k/2)`
///
/// with `rate` the [`contraction_rate`] contraction. Values above 1 are
/// reported as is; the bound is simply vacuous there.
pub fn failure_probability_bound(
    enc: &EncodingLength,
    n: usize,
    m: usize,
    lambda: f64,
    l2: f64,
    k: usize,
) -> Result<f64, TheoryError> {
    let rate = contraction_rate(lambda, m, l2)?;
    let prefactor = enc.max_row_norm * (2.0 * enc.sigma - 2.0).exp2() / (n as f64).sqrt();
    Ok(prefactor * rate.powf(k as f64 / 2.0))
}

/// Cost model for picking the batch size: an iteration costs a fixed
/// overhead `big_c` plus `c * n` per sampled row, and makes selection
/// progress only when the batch hits at least one of the `m - s` violated
/// constraints.
#[derive(Clone, Copy, Debug)]
pub struct GainModel {
    pub m: usize,
    pub n: usize,
    /// Estimated number of satisfied constraints at the current iterate.
    pub s: usize,
    /// Per-row, per-column sampling cost coefficient; must be positive.
    pub c: f64,
    /// Fixed per-iteration overhead; must be nonnegative.
    pub big_c: f64,
}

impl GainModel {
    pub fn new(m: usize, n: usize, s: usize, c: f64, big_c: f64) -> Result<Self, TheoryError> {
        if m == 0 || n == 0 {
            return Err(TheoryError::InvalidBeta { beta: 1, m });
        }
        if s > m {
            return Err(TheoryError::InvalidSatisfiedCount { s, m });
        }
        if !(c > 0.0 && c.is_finite() && big_c >= 0.0 && big_c.is_finite()) {
            return Err(TheoryError::InvalidCosts { c, big_c });
        }
        Ok(Self { m, n, s, c, big_c })
    }
}

/// Expected progress per unit cost for batch size `beta`:
///
/// `(1 - (s/m)^beta) / (C + c n beta)` for `beta <= s`, and
/// `1 / (C + c n beta)` for `beta > s` (a batch larger than the satisfied
/// set always contains a violated constraint).
pub fn gain(model: &GainModel, beta: usize) -> Result<f64, TheoryError> {
    if beta == 0 || beta > model.m {
        return Err(TheoryError::InvalidBeta {
            beta,
            m: model.m,
        });
    }
    let cost = model.big_c + model.c * model.n as f64 * beta as f64;
    let hit = if beta <= model.s {
        1.0 - (model.s as f64 / model.m as f64).powi(beta as i32)
    } else {
        1.0
    };
    Ok(hit / cost)
}

/// The batch size in `1..=m` maximizing [`gain`], lowest index on ties.
/// With every constraint satisfied (`s = m`) all batch sizes make zero
/// progress and the cheapest, `beta = 1`, is returned.
pub fn optimal_beta(model: &GainModel) -> Result<usize, TheoryError> {
    let mut best_beta = 1;
    let mut best_gain = gain(model, 1)?;
    for beta in 2..=model.m {
        let g = gain(model, beta)?;
        if g > best_gain {
            best_beta = beta;
            best_gain = g;
        }
    }
    Ok(best_beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::smallest_singular_value;
    use crate::rng::rng_from_seed;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn selected_residual_expectation_matches_hand_value() {
        // Batches of size 2 over residuals {0, 1, 3}: the squared maxima are
        // 1, 9, 9, so the mean is 19/3.
        let e = expected_selected_residual_sq(&[0.0, 1.0, 3.0], 2).unwrap();
        assert_relative_eq!(e, 19.0 / 3.0, max_relative = 1e-14);
        let exact = expected_selected_residual_sq_exact(&[ratio(0, 1), ratio(1, 1), ratio(3, 1)], 2)
            .unwrap();
        assert_eq!(exact, ratio(19, 3));
    }

    #[test]
    fn single_row_batches_average_the_squares() {
        let r = [2.0, 0.5, 1.0, 3.0];
        let e = expected_selected_residual_sq(&r, 1).unwrap();
        let mean_sq = r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64;
        assert_relative_eq!(e, mean_sq, max_relative = 1e-14);
    }

    #[test]
    fn full_batches_take_the_largest_square() {
        let r = [2.0, 0.5, 1.0, 3.0];
        let e = expected_selected_residual_sq(&r, 4).unwrap();
        assert_relative_eq!(e, 9.0, max_relative = 1e-14);
    }

    #[test]
    fn formula_agrees_with_brute_force_on_random_vectors() {
        let mut rng = rng_from_seed(100);
        for _ in 0..60 {
            let m = rng.gen_range(1..=9);
            let r: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..10.0)).collect();
            for beta in 1..=m {
                let formula = expected_selected_residual_sq(&r, beta).unwrap();
                let brute = brute_force_expected_max_sq(&r, beta).unwrap();
                assert_relative_eq!(formula, brute, max_relative = 1e-12, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn exact_formula_agrees_with_exact_brute_force() {
        let mut rng = rng_from_seed(101);
        for _ in 0..30 {
            let m = rng.gen_range(1..=8);
            let r: Vec<BigRational> = (0..m)
                .map(|_| ratio(rng.gen_range(0..500), rng.gen_range(1..40)))
                .collect();
            for beta in 1..=m {
                let formula = expected_selected_residual_sq_exact(&r, beta).unwrap();
                let brute = brute_force_expected_max_sq_exact(&r, beta).unwrap();
                assert_eq!(formula, brute, "m={m} beta={beta}");
            }
        }
    }

    #[test]
    fn large_system_path_is_consistent_with_the_exact_path() {
        // m = 61 forces the logarithmic branch; compare against exact
        // rationals built from the same dyadic values.
        let mut rng = rng_from_seed(102);
        let numerators: Vec<i64> = (0..61).map(|_| rng.gen_range(0..1024)).collect();
        let r: Vec<f64> = numerators.iter().map(|&v| v as f64 / 64.0).collect();
        let r_exact: Vec<BigRational> = numerators.iter().map(|&v| ratio(v, 64)).collect();
        for beta in [1usize, 2, 7, 30, 61] {
            let wide = expected_selected_residual_sq(&r, beta).unwrap();
            let exact = expected_selected_residual_sq_exact(&r_exact, beta).unwrap();
            let exact_f = exact.numer().to_string().parse::<f64>().unwrap()
                / exact.denom().to_string().parse::<f64>().unwrap();
            assert_relative_eq!(wide, exact_f, max_relative = 1e-10);
        }
    }

    #[test]
    fn expectation_rejects_bad_inputs() {
        assert!(matches!(
            expected_selected_residual_sq(&[], 1),
            Err(TheoryError::EmptyResidual)
        ));
        assert!(matches!(
            expected_selected_residual_sq(&[1.0], 2),
            Err(TheoryError::InvalidBeta { .. })
        ));
        assert!(matches!(
            expected_selected_residual_sq(&[1.0, -0.5], 1),
            Err(TheoryError::BadResidualEntry { index: 1, .. })
        ));
        assert!(expected_selected_residual_sq(&[1.0, f64::NAN], 1).is_err());
    }

    #[test]
    fn brute_force_refuses_oversized_enumerations() {
        let r = vec![1.0; 50];
        assert!(matches!(
            brute_force_expected_max_sq(&r, 10),
            Err(TheoryError::BruteForceTooLarge { .. })
        ));
    }

    #[test]
    fn hoffman_inverts_the_smallest_singular_value() {
        let a = DenseMatrix::from_rows(vec![
            vec![4.0, 0.0],
            vec![0.0, 0.25],
            vec![0.0, 0.0],
        ])
        .unwrap();
        let h = hoffman_from_equalities(&a).unwrap();
        assert_relative_eq!(h.l2, 4.0, max_relative = 1e-12);
        assert_relative_eq!(h.l_inf_upper, 3.0f64.sqrt() * 4.0, max_relative = 1e-12);
        assert_eq!(h.method, HoffmanMethod::LeftInverse);
    }

    #[test]
    fn hoffman_cross_checks_against_the_jacobi_kernel() {
        // Two independent decompositions: nalgebra's SVD here, one-sided
        // Jacobi in the linear algebra module.
        let mut rng = rng_from_seed(103);
        for seed in 0..5 {
            let rows: Vec<Vec<f64>> = (0..(20 + seed))
                .map(|_| (0..6).map(|_| rng.sample(StandardNormal)).collect())
                .collect();
            let a = DenseMatrix::from_rows(rows).unwrap();
            let h = hoffman_from_equalities(&a).unwrap();
            let jacobi = smallest_singular_value(&a);
            assert_relative_eq!(h.l2, 1.0 / jacobi, max_relative = 1e-8);
        }
    }

    #[test]
    fn hoffman_bounds_distances_on_consistent_systems() {
        let mut rng = rng_from_seed(104);
        let rows: Vec<Vec<f64>> = (0..15)
            .map(|_| (0..4).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let x_star: Vec<f64> = (0..4).map(|_| rng.sample(StandardNormal)).collect();
        let b: Vec<f64> = rows.iter().map(|r| crate::linalg::dot(r, &x_star)).collect();
        let a = DenseMatrix::from_rows(rows).unwrap();
        let h = hoffman_from_equalities(&a).unwrap();
        for _ in 0..50 {
            let x: Vec<f64> = (0..4).map(|_| rng.sample(StandardNormal)).collect();
            let ax = a.mul_vec(&x).unwrap();
            let residual: f64 = ax
                .iter()
                .zip(&b)
                .map(|(v, bi)| (v - bi) * (v - bi))
                .sum::<f64>()
                .sqrt();
            let dist: f64 = x
                .iter()
                .zip(&x_star)
                .map(|(v, w)| (v - w) * (v - w))
                .sum::<f64>()
                .sqrt();
            assert!(dist <= h.l2 * residual + 1e-9);
        }
    }

    #[test]
    fn hoffman_rejects_deficient_and_underdetermined_systems() {
        let wide = DenseMatrix::from_rows(vec![vec![1.0, 2.0]]).unwrap();
        assert!(matches!(
            hoffman_from_equalities(&wide),
            Err(TheoryError::UnderdeterminedEqualities { m: 1, n: 2 })
        ));
        let deficient = DenseMatrix::from_rows(vec![
            vec![1.0, 1.0],
            vec![2.0, 2.0],
            vec![3.0, 3.0],
        ])
        .unwrap();
        let err = hoffman_from_equalities(&deficient).unwrap_err();
        assert!(err.to_string().contains("supply a user value"));
        assert!(HoffmanEstimate::user_supplied(0.0, 3).is_err());
        let user = HoffmanEstimate::user_supplied(2.5, 4).unwrap();
        assert_eq!(user.method, HoffmanMethod::UserSupplied);
        assert_relative_eq!(user.l_inf_upper, 5.0);
    }

    #[test]
    fn worst_case_rate_matches_hand_values() {
        assert_relative_eq!(contraction_rate(1.0, 4, 1.0).unwrap(), 0.75);
        assert_relative_eq!(contraction_rate(2.0, 4, 1.0).unwrap(), 1.0);
        assert_relative_eq!(contraction_rate(1.0, 1, 1.0).unwrap(), 0.0);
        // 1 - 1/(1 * 0.25) = -3, clamped.
        assert_eq!(contraction_rate(1.0, 1, 0.5).unwrap(), 0.0);
        assert!(contraction_rate(0.0, 4, 1.0).is_err());
        assert!(contraction_rate(2.1, 4, 1.0).is_err());
        assert!(contraction_rate(1.0, 0, 1.0).is_err());
        assert!(contraction_rate(1.0, 4, f64::NAN).is_err());
    }

    #[test]
    fn batch_adaptive_denominator_takes_the_max() {
        assert_eq!(v_bound(10, 7, 2).unwrap(), 9);
        assert_eq!(v_bound(10, 0, 2).unwrap(), 10);
        assert_eq!(v_bound(10, 10, 10).unwrap(), 1);
        assert!(v_bound(10, 11, 2).is_err());
        assert!(v_bound(10, 3, 0).is_err());
        assert_relative_eq!(
            per_iteration_rate(1.0, 4, 1.0).unwrap(),
            contraction_rate(1.0, 4, 1.0).unwrap()
        );
    }

    #[test]
    fn two_phase_bound_matches_hand_value() {
        let b = two_phase_bound(2, 1, 1.0, 4, 2, None, 1.0, 1.0).unwrap();
        assert_relative_eq!(b, 0.5); // 0.75 * (2/3)
        assert!(matches!(
            two_phase_bound(1, 2, 1.0, 4, 2, None, 1.0, 1.0),
            Err(TheoryError::BadPhaseSplit { .. })
        ));
    }

    #[test]
    fn two_phase_bound_never_exceeds_the_single_phase_bound() {
        for k in [1usize, 5, 20] {
            for big_k in [0usize, 1, k] {
                if big_k > k {
                    continue;
                }
                let two = two_phase_bound(k, big_k, 1.3, 12, 4, Some(3), 1.1, 2.0).unwrap();
                let single = contraction_rate(1.3, 12, 1.1).unwrap().powf(k as f64) * 2.0;
                assert!(two <= single + 1e-15, "k={k} K={big_k}");
            }
        }
    }

    #[test]
    fn encoding_length_matches_hand_values() {
        let a = DenseMatrix::from_rows(vec![vec![1.0]]).unwrap();
        let b = Vector::new(vec![1.0]).unwrap();
        let enc = encoding_length(&a, &b).unwrap();
        assert_relative_eq!(enc.sigma, 4.0);
        assert_relative_eq!(enc.max_row_norm, 1.0);

        let a = DenseMatrix::from_rows(vec![vec![3.0], vec![1.0]]).unwrap();
        let b = Vector::new(vec![7.0, 0.0]).unwrap();
        let enc = encoding_length(&a, &b).unwrap();
        assert_relative_eq!(enc.sigma, 9.0);
        assert_relative_eq!(enc.max_row_norm, 3.0);
        assert_eq!((enc.rows, enc.cols), (2, 1));
    }

    #[test]
    fn encoding_length_rejects_non_integer_data() {
        let a = DenseMatrix::from_rows(vec![vec![0.5]]).unwrap();
        let b = Vector::new(vec![1.0]).unwrap();
        assert!(matches!(
            encoding_length(&a, &b),
            Err(TheoryError::NonIntegerEntry { row: 0, col: 0, .. })
        ));
        let a = DenseMatrix::from_rows(vec![vec![1.0]]).unwrap();
        let b = Vector::new(vec![0.25]).unwrap();
        assert!(matches!(
            encoding_length(&a, &b),
            Err(TheoryError::NonIntegerRhs { row: 0, .. })
        ));
        let a = DenseMatrix::from_rows(vec![vec![1e16]]).unwrap();
        let b = Vector::new(vec![1.0]).unwrap();
        assert!(encoding_length(&a, &b).is_err());
    }

    #[test]
    fn max_violation_is_zero_exactly_on_feasible_points() {
        let a = DenseMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let b = Vector::new(vec![1.0, 1.0]).unwrap();
        let p = FeasibilityProblem::new(a, b).unwrap().problem;
        let feasible = Vector::new(vec![0.5, -2.0]).unwrap();
        assert_eq!(max_violation(&p, &feasible).unwrap(), 0.0);
        let infeasible = Vector::new(vec![3.0, 0.0]).unwrap();
        assert_relative_eq!(max_violation(&p, &infeasible).unwrap(), 2.0);
    }

    #[test]
    fn certificate_check_is_strict_at_the_threshold() {
        // Integer system x <= 0 (already row-normalized): sigma = 3 and the
        // threshold is 2^-2 = 0.25.
        let a = DenseMatrix::from_rows(vec![vec![1.0]]).unwrap();
        let b = Vector::new(vec![0.0]).unwrap();
        let p = FeasibilityProblem::new(a, b).unwrap().problem;
        assert!(p.is_normalized());
        let enc = encoding_length(p.matrix(), p.rhs()).unwrap();
        assert_relative_eq!(enc.sigma, 3.0);

        let at = certificate_check(&p, &Vector::new(vec![0.25]).unwrap(), &enc).unwrap();
        assert_relative_eq!(at.threshold, 0.25);
        assert_relative_eq!(at.theta, 0.25);
        assert!(!at.is_certificate);

        let below = certificate_check(&p, &Vector::new(vec![0.2]).unwrap(), &enc).unwrap();
        assert!(below.is_certificate);
        assert!(below.iteration_bound.is_none());
        assert!(below.failure_probability_bound.is_none());

        let inside = certificate_check(&p, &Vector::new(vec![-1.0]).unwrap(), &enc).unwrap();
        assert_eq!(inside.theta, 0.0);
        assert!(inside.is_certificate);
    }

    #[test]
    fn certificate_check_requires_normalization_and_matching_shape() {
        let a = DenseMatrix::from_rows(vec![vec![2.0]]).unwrap();
        let b = Vector::new(vec![0.0]).unwrap();
        let p = FeasibilityProblem::new(a, b).unwrap().problem;
        let enc = encoding_length(p.matrix(), p.rhs()).unwrap();
        let x = Vector::zeros(1);
        assert!(matches!(
            certificate_check(&p, &x, &enc),
            Err(TheoryError::NotNormalized)
        ));
        let other = DenseMatrix::from_rows(vec![vec![1.0], vec![-1.0]]).unwrap();
        let other_b = Vector::new(vec![0.0, 1.0]).unwrap();
        let enc2 = encoding_length(&other, &other_b).unwrap();
        assert!(matches!(
            certificate_check(&p.normalized(), &x, &enc2),
            Err(TheoryError::MismatchedEncoding { .. })
        ));
    }

    #[test]
    fn infeasible_integer_systems_keep_violations_above_the_floor() {
        // x <= 0 together with -x <= -1 is infeasible; sigma = 6, so every
        // point violates by at least 2 * 2^-6 = 1/32. The violation
        // max(0, x, 1 - x) actually never drops below 1/2.
        let a = DenseMatrix::from_rows(vec![vec![1.0], vec![-1.0]]).unwrap();
        let b = Vector::new(vec![0.0, -1.0]).unwrap();
        let p = FeasibilityProblem::new(a, b).unwrap().problem;
        let enc = encoding_length(p.matrix(), p.rhs()).unwrap();
        assert_relative_eq!(enc.sigma, 6.0);
        let floor = 2.0 * (-enc.sigma).exp2();
        let mut x = -3.0;
        while x <= 3.0 {
            let theta = max_violation(&p, &Vector::new(vec![x]).unwrap()).unwrap();
            assert!(theta >= floor, "theta({x}) = {theta} below {floor}");
            x += 0.01;
        }
    }

    #[test]
    fn iteration_bound_matches_hand_value() {
        let enc = EncodingLength {
            sigma: 4.0,
            max_row_norm: 1.0,
            rows: 2,
            cols: 1,
        };
        // Numerator 12, denominator log2(2) = 1; smallest integer strictly
        // above 12 is 13.
        assert_eq!(iteration_bound(&enc, 1, 2, 1.0, 1.0).unwrap(), 13);
        assert!(matches!(
            iteration_bound(&enc, 1, 2, 2.0, 1.0),
            Err(TheoryError::LambdaNotStrict { .. })
        ));
        // Tiny numerator: sigma = 1 gives 4 - 4 = 0, so one iteration.
        let tiny = EncodingLength {
            sigma: 1.0,
            max_row_norm: 1.0,
            rows: 1,
            cols: 1,
        };
        assert_eq!(iteration_bound(&tiny, 1, 1, 1.0, 1.0).unwrap(), 1);
        // Contraction consumes everything in one expected step.
        assert_eq!(iteration_bound(&enc, 1, 1, 1.0, 0.9).unwrap(), 1);
    }

    #[test]
    fn failure_probability_matches_hand_value_and_decays() {
        let enc = EncodingLength {
            sigma: 4.0,
            max_row_norm: 1.0,
            rows: 2,
            cols: 1,
        };
        let p2 = failure_probability_bound(&enc, 1, 2, 1.0, 1.0, 2).unwrap();
        assert_relative_eq!(p2, 32.0);
        let p0 = failure_probability_bound(&enc, 1, 2, 1.0, 1.0, 0).unwrap();
        assert_relative_eq!(p0, 64.0);
        let mut last = f64::INFINITY;
        for k in [0usize, 2, 4, 8, 16, 32] {
            let pk = failure_probability_bound(&enc, 1, 2, 1.0, 1.0, k).unwrap();
            assert!(pk <= last);
            last = pk;
        }
    }

    #[test]
    fn gain_matches_hand_values() {
        let model = GainModel::new(200, 10, 100, 1.0, 100.0).unwrap();
        assert_relative_eq!(gain(&model, 1).unwrap(), 0.5 / 110.0, max_relative = 1e-14);
        assert_relative_eq!(
            gain(&model, 10).unwrap(),
            (1.0 - 0.5f64.powi(10)) / 200.0,
            max_relative = 1e-14
        );
        // Above the satisfied count a batch always hits a violation.
        assert_relative_eq!(
            gain(&model, 150).unwrap(),
            1.0 / (100.0 + 1500.0),
            max_relative = 1e-14
        );
        assert!(gain(&model, 0).is_err());
        assert!(gain(&model, 201).is_err());
    }

    #[test]
    fn optimal_batch_size_is_interior_for_the_reference_model() {
        let model = GainModel::new(200, 10, 100, 1.0, 100.0).unwrap();
        let best = optimal_beta(&model).unwrap();
        assert_eq!(best, 3);
        let g = |beta| gain(&model, beta).unwrap();
        assert!(g(3) > g(2) && g(3) > g(4));
        assert!(g(3) > g(1) && g(3) > g(200));
    }

    #[test]
    fn all_satisfied_degenerates_to_the_cheapest_batch() {
        let model = GainModel::new(50, 5, 50, 1.0, 10.0).unwrap();
        for beta in 1..=50 {
            assert_eq!(gain(&model, beta).unwrap(), 0.0);
        }
        assert_eq!(optimal_beta(&model).unwrap(), 1);
    }

    #[test]
    fn gain_model_validates_its_parameters() {
        assert!(GainModel::new(0, 1, 0, 1.0, 1.0).is_err());
        assert!(GainModel::new(10, 0, 0, 1.0, 1.0).is_err());
        assert!(GainModel::new(10, 1, 11, 1.0, 1.0).is_err());
        assert!(GainModel::new(10, 1, 5, 0.0, 1.0).is_err());
        assert!(GainModel::new(10, 1, 5, 1.0, -1.0).is_err());
    }

    /// Ordered-sums inequality in exact integer arithmetic: for strictly
    /// increasing positive a and nondecreasing nonnegative b,
    /// `n * sum(a_i b_i) >= sum(a) * sum(b)`.
    #[test]
    fn ordered_sums_dominate_the_mean_product() {
        let mut rng = rng_from_seed(105);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=20usize);
            let mut a: Vec<i128> = Vec::with_capacity(n);
            let mut acc: i128 = 0;
            for _ in 0..n {
                acc += rng.gen_range(1..50) as i128;
                a.push(acc);
            }
            let mut b: Vec<i128> = Vec::with_capacity(n);
            let mut bacc: i128 = rng.gen_range(0..10) as i128;
            for _ in 0..n {
                bacc += rng.gen_range(0..20) as i128;
                b.push(bacc);
            }
            let lhs: i128 = (n as i128) * a.iter().zip(&b).map(|(x, y)| x * y).sum::<i128>();
            let rhs: i128 = a.iter().sum::<i128>() * b.iter().sum::<i128>();
            assert!(lhs >= rhs, "n={n} a={a:?} b={b:?}");
        }
    }
}
