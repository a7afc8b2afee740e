//! Dense vectors, row-major matrices, and the feasibility-problem container.
//!
//! Everything downstream works with systems of linear inequalities
//! `Ax <= b` stored densely. The types here enforce the invariants the
//! solvers rely on: every stored entry is finite, matrices are rectangular
//! and nonempty, and a [`FeasibilityProblem`] never holds a row whose norm
//! is below [`ZERO_ROW_CUTOFF`] (such rows are either dropped as vacuous or
//! rejected as trivially infeasible at construction).

use thiserror::Error;

/// Rows with Euclidean norm below this are not representable as constraint
/// normals: `0 <= b` is either vacuous or infeasible. Applied once, at
/// [`FeasibilityProblem`] construction.
pub const ZERO_ROW_CUTOFF: f64 = 1e-14;

/// Relative accuracy guaranteed for the cached row norms of a
/// [`FeasibilityProblem`] against direct recomputation.
pub const ROW_NORM_CACHE_TOL: f64 = 1e-12;

/// A system is flagged as row-normalized when every cached row norm is
/// within this distance of 1.
pub const NORMALIZED_ROW_TOL: f64 = 1e-10;

/// Errors from vector, matrix, and problem construction or combination.
#[derive(Debug, Error)]
pub enum LinalgError {
    /// Two operands whose lengths or shapes must agree did not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// A NaN or infinity appeared where a finite value is required.
    #[error("non-finite entry at index {index}")]
    NonFiniteEntry { index: usize },
    /// Matrices must have at least one row and one column.
    #[error("matrix must be nonempty (got {rows} x {cols})")]
    EmptyMatrix { rows: usize, cols: usize },
    /// Row lengths differed while assembling a matrix.
    #[error("ragged rows: row {row} has {got} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        got: usize,
        expected: usize,
    },
    /// A zero row paired with a negative right-hand side: `0 <= b < 0` has
    /// no solutions, so the whole system is infeasible by inspection.
    #[error("row {row} is trivially infeasible: zero normal with rhs {rhs}")]
    TriviallyInfeasibleRow { row: usize, rhs: f64 },
    /// Every row of the system was a vacuous zero row; nothing remains to
    /// solve.
    #[error("all {rows} rows were vacuous zero rows; system is empty")]
    AllRowsVacuous { rows: usize },
}

fn check_finite(entries: &[f64]) -> Result<(), LinalgError> {
    match entries.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(LinalgError::NonFiniteEntry { index }),
        None => Ok(()),
    }
}

/// Euclidean dot product of two equal-length slices.
///
/// Internal kernels use slices directly; the public wrappers on [`Vector`]
/// add dimension checks.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A finite-entry column vector.
///
/// Construction validates that every entry is finite; no NaN or infinity
/// survives past [`Vector::new`].
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    entries: Vec<f64>,
}

impl Vector {
    /// Wraps entries after checking each one is finite.
    pub fn new(entries: Vec<f64>) -> Result<Self, LinalgError> {
        check_finite(&entries)?;
        Ok(Self { entries })
    }

    /// The zero vector of length `n`.
    pub fn zeros(n: usize) -> Self {
        Self {
            entries: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.entries.iter()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        norm(&self.entries)
    }

    pub fn dot(&self, other: &Vector) -> Result<f64, LinalgError> {
        if self.len() != other.len() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(dot(&self.entries, &other.entries))
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

impl<'a> IntoIterator for &'a Vector {
    type Item = &'a f64;
    type IntoIter = std::slice::Iter<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

/// Entrywise positive part `max(v, 0)`.
pub fn positive_part(v: &Vector) -> Vector {
    Vector {
        entries: v.entries.iter().map(|&x| x.max(0.0)).collect(),
    }
}

/// Euclidean distance between two points of equal dimension.
pub fn euclidean_distance(x: &Vector, y: &Vector) -> Result<f64, LinalgError> {
    if x.len() != y.len() {
        return Err(LinalgError::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let sum: f64 = x
        .entries
        .iter()
        .zip(&y.entries)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum();
    Ok(sum.sqrt())
}

/// A dense row-major matrix with at least one row and one column and all
/// entries finite.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    /// Assembles a matrix from row slices, checking shape and finiteness.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, LinalgError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(LinalgError::EmptyMatrix {
                rows: rows.len(),
                cols: rows.first().map_or(0, Vec::len),
            });
        }
        let cols = rows[0].len();
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::RaggedRows {
                    row: i,
                    got: row.len(),
                    expected: cols,
                });
            }
            entries.extend_from_slice(row);
        }
        check_finite(&entries)?;
        Ok(Self {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    /// Assembles a matrix from a flat row-major buffer.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyMatrix { rows, cols });
        }
        if entries.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        check_finite(&entries)?;
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Borrow row `i` as a slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    /// Matrix-vector product `Ax`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }
}

/// Outcome of building a [`FeasibilityProblem`]: the retained system plus a
/// count of vacuous zero rows that were dropped (each drop is also logged).
#[derive(Clone, Debug)]
pub struct Construction {
    pub problem: FeasibilityProblem,
    pub dropped_rows: usize,
}

/// A linear feasibility system `Ax <= b` with a cached row-norm vector.
///
/// Invariants, enforced at construction:
///
/// * `A` has `m >= 1` rows and `n >= 1` columns, `b` has length `m`;
/// * every retained row has `||a_i|| >= ZERO_ROW_CUTOFF` (vacuous zero rows
///   are dropped with a warning; a zero row with negative right-hand side
///   is rejected because it makes the system empty);
/// * the cached norms match direct recomputation to [`ROW_NORM_CACHE_TOL`]
///   relative accuracy;
/// * the `normalized` flag is set exactly when every row norm is within
///   [`NORMALIZED_ROW_TOL`] of 1.
#[derive(Clone, Debug)]
pub struct FeasibilityProblem {
    a: DenseMatrix,
    b: Vector,
    row_norms: Vector,
    normalized: bool,
}

impl FeasibilityProblem {
    /// Builds a problem from `A` and `b`, applying the zero-row policy.
    ///
    /// Rows with `||a_i|| < ZERO_ROW_CUTOFF` and `b_i >= 0` are satisfied by
    /// every point; they are dropped and counted in the returned
    /// [`Construction`]. The same row shape with `b_i < 0` is an error: no
    /// point can satisfy `0 <= b_i`, so the system is infeasible by
    /// inspection and refusing it early beats iterating forever.
    pub fn new(a: DenseMatrix, b: Vector) -> Result<Construction, LinalgError> {
        if b.len() != a.rows() {
            return Err(LinalgError::DimensionMismatch {
                expected: a.rows(),
                got: b.len(),
            });
        }
        let mut kept_rows: Vec<Vec<f64>> = Vec::with_capacity(a.rows());
        let mut kept_b: Vec<f64> = Vec::with_capacity(a.rows());
        let mut dropped = 0usize;
        for i in 0..a.rows() {
            let row = a.row(i);
            if norm(row) < ZERO_ROW_CUTOFF {
                if b[i] < 0.0 {
                    return Err(LinalgError::TriviallyInfeasibleRow { row: i, rhs: b[i] });
                }
                log::warn!(
                    "dropping vacuous zero row {} (rhs {}); every point satisfies it",
                    i,
                    b[i]
                );
                dropped += 1;
            } else {
                kept_rows.push(row.to_vec());
                kept_b.push(b[i]);
            }
        }
        if kept_rows.is_empty() {
            return Err(LinalgError::AllRowsVacuous { rows: a.rows() });
        }
        let a = DenseMatrix::from_rows(kept_rows)?;
        let b = Vector::new(kept_b)?;
        let row_norms: Vec<f64> = (0..a.rows()).map(|i| norm(a.row(i))).collect();
        let normalized = row_norms
            .iter()
            .all(|&r| (r - 1.0).abs() <= NORMALIZED_ROW_TOL);
        Ok(Construction {
            problem: FeasibilityProblem {
                a,
                b,
                row_norms: Vector { entries: row_norms },
                normalized,
            },
            dropped_rows: dropped,
        })
    }

    /// Number of constraints `m`.
    pub fn num_rows(&self) -> usize {
        self.a.rows()
    }

    /// Ambient dimension `n`.
    pub fn num_cols(&self) -> usize {
        self.a.cols()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &Vector {
        &self.b
    }

    /// Cached Euclidean norms of the rows of `A`.
    pub fn row_norms(&self) -> &Vector {
        &self.row_norms
    }

    /// True when every row norm is within [`NORMALIZED_ROW_TOL`] of 1.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Positive-part residual `(Ax - b)^+`, the entrywise violations.
    pub fn residual(&self, x: &Vector) -> Result<Vector, LinalgError> {
        let v = self.violations(x.as_slice())?;
        Ok(Vector {
            entries: v.into_iter().map(|t| t.max(0.0)).collect(),
        })
    }

    /// Signed violations `Ax - b` (no positive part), as a plain buffer.
    pub(crate) fn violations(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let mut v = self.a.mul_vec(x)?;
        for (vi, bi) in v.iter_mut().zip(self.b.iter()) {
            *vi -= bi;
        }
        Ok(v)
    }

    /// The equivalent system with every row of `A` and entry of `b` divided
    /// by the row norm. The solution set is unchanged. Already-normalized
    /// systems are returned as an identical copy, so the operation is
    /// idempotent bit for bit.
    pub fn normalized(&self) -> FeasibilityProblem {
        if self.normalized {
            return self.clone();
        }
        let n = self.a.cols();
        let mut entries = Vec::with_capacity(self.a.rows() * n);
        let mut b = Vec::with_capacity(self.a.rows());
        for i in 0..self.a.rows() {
            let r = self.row_norms[i];
            entries.extend(self.a.row(i).iter().map(|&v| v / r));
            b.push(self.b[i] / r);
        }
        let a = DenseMatrix {
            rows: self.a.rows(),
            cols: n,
            entries,
        };
        let row_norms: Vec<f64> = (0..a.rows()).map(|i| norm(a.row(i))).collect();
        FeasibilityProblem {
            a,
            b: Vector { entries: b },
            row_norms: Vector { entries: row_norms },
            normalized: true,
        }
    }
}

/// Smallest singular value of `A`, computed by one-sided Jacobi rotations.
///
/// For a matrix with `rows >= cols` this is the usual smallest of the
/// `cols` singular values; rank-deficient inputs (including any matrix with
/// `rows < cols`) yield a value near zero. One-sided Jacobi orthogonalizes
/// the columns in place and reads singular values off as column norms; it
/// converges to high relative accuracy even for small singular values,
/// which matters because downstream convergence rates depend on the square
/// of this quantity.
pub fn smallest_singular_value(a: &DenseMatrix) -> f64 {
    let m = a.rows();
    let n = a.cols();
    if m < n {
        return 0.0;
    }
    // Column-major working copy; rotations combine column pairs.
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..m).map(|i| a.entry(i, j)).collect())
        .collect();
    let orth_tol = 1e-15;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (head, tail) = cols.split_at_mut(q);
                let up = &mut head[p];
                let uq = &mut tail[0];
                let alpha = dot(up, up);
                let beta = dot(uq, uq);
                let gamma = dot(up, uq);
                if gamma.abs() <= orth_tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let vp = up[i];
                    let vq = uq[i];
                    up[i] = c * vp - s * vq;
                    uq[i] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    cols.iter()
        .map(|c| norm(c))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn random_matrix(m: usize, n: usize, seed: u64) -> DenseMatrix {
        let mut rng = rng_from_seed(seed);
        let rows = (0..m)
            .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        DenseMatrix::from_rows(rows).unwrap()
    }

    /// Independent oracle for the Jacobi kernel: the smallest singular value
    /// is the square root of the smallest eigenvalue of the Gram matrix
    /// A^T A, computed by nalgebra's symmetric eigensolver. The two routes
    /// share no code.
    fn sigma_min_via_gram(a: &DenseMatrix) -> f64 {
        let na = nalgebra::DMatrix::from_fn(a.rows(), a.cols(), |i, j| a.entry(i, j));
        let gram = na.transpose() * na;
        let eig = nalgebra::SymmetricEigen::new(gram);
        eig.eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
            .sqrt()
    }

    #[test]
    fn positive_part_clamps_negatives() {
        let v = Vector::new(vec![-1.0, 0.0, 2.0]).unwrap();
        assert_eq!(positive_part(&v).as_slice(), &[0.0, 0.0, 2.0]);
    }

    #[test]
    fn residual_is_entrywise_violation() {
        let a = DenseMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let b = Vector::new(vec![1.0, 1.0]).unwrap();
        let p = FeasibilityProblem::new(a, b).unwrap().problem;
        let r = p.residual(&Vector::new(vec![2.0, 0.0]).unwrap()).unwrap();
        assert_eq!(r.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn residual_rejects_wrong_dimension() {
        let a = DenseMatrix::from_rows(vec![vec![1.0, 0.0]]).unwrap();
        let b = Vector::new(vec![1.0]).unwrap();
        let p = FeasibilityProblem::new(a, b).unwrap().problem;
        let err = p.residual(&Vector::new(vec![1.0]).unwrap());
        assert!(matches!(err, Err(LinalgError::DimensionMismatch { .. })));
    }

    #[test]
    fn euclidean_distance_matches_hand_value() {
        let x = Vector::new(vec![1.0, 2.0]).unwrap();
        let y = Vector::new(vec![4.0, 6.0]).unwrap();
        assert_relative_eq!(euclidean_distance(&x, &y).unwrap(), 5.0);
        assert!(euclidean_distance(&x, &Vector::zeros(3)).is_err());
    }

    #[test]
    fn vectors_reject_non_finite_entries() {
        assert!(matches!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(LinalgError::NonFiniteEntry { index: 1 })
        ));
        assert!(Vector::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(DenseMatrix::from_rows(vec![vec![f64::NEG_INFINITY]]).is_err());
    }

    #[test]
    fn matrices_reject_bad_shapes() {
        assert!(matches!(
            DenseMatrix::from_rows(vec![]),
            Err(LinalgError::EmptyMatrix { .. })
        ));
        assert!(matches!(
            DenseMatrix::from_rows(vec![vec![1.0], vec![1.0, 2.0]]),
            Err(LinalgError::RaggedRows { row: 1, .. })
        ));
        assert!(DenseMatrix::from_row_major(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn zero_row_with_negative_rhs_is_rejected() {
        let a = DenseMatrix::from_rows(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let b = Vector::new(vec![-1.0, 0.0]).unwrap();
        assert!(matches!(
            FeasibilityProblem::new(a, b),
            Err(LinalgError::TriviallyInfeasibleRow { row: 0, .. })
        ));
    }

    #[test]
    fn vacuous_zero_row_is_dropped_and_counted() {
        let a = DenseMatrix::from_rows(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let b = Vector::new(vec![2.0, 0.0]).unwrap();
        let built = FeasibilityProblem::new(a, b).unwrap();
        assert_eq!(built.dropped_rows, 1);
        assert_eq!(built.problem.num_rows(), 1);
        assert_eq!(built.problem.matrix().row(0), &[1.0, 1.0]);
    }

    #[test]
    fn all_vacuous_rows_is_an_error() {
        let a = DenseMatrix::from_rows(vec![vec![0.0], vec![0.0]]).unwrap();
        let b = Vector::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            FeasibilityProblem::new(a, b),
            Err(LinalgError::AllRowsVacuous { rows: 2 })
        ));
    }

    #[test]
    fn row_norm_cache_matches_recomputation() {
        let a = random_matrix(30, 7, 11);
        let b = Vector::zeros(30);
        let p = FeasibilityProblem::new(a, b).unwrap().problem;
        for i in 0..p.num_rows() {
            let direct = norm(p.matrix().row(i));
            let cached = p.row_norms()[i];
            assert!((direct - cached).abs() <= ROW_NORM_CACHE_TOL * direct.max(1.0));
        }
    }

    #[test]
    fn normalization_scales_rows_and_rhs_together() {
        let a = DenseMatrix::from_rows(vec![vec![3.0, 4.0], vec![0.0, 2.0]]).unwrap();
        let b = Vector::new(vec![10.0, 4.0]).unwrap();
        let p = FeasibilityProblem::new(a, b).unwrap().problem;
        assert!(!p.is_normalized());
        let q = p.normalized();
        assert!(q.is_normalized());
        assert_relative_eq!(q.matrix().row(0)[0], 0.6);
        assert_relative_eq!(q.matrix().row(0)[1], 0.8);
        assert_relative_eq!(q.rhs()[0], 2.0);
        assert_relative_eq!(q.rhs()[1], 2.0);
        for i in 0..q.num_rows() {
            assert!((q.row_norms()[i] - 1.0).abs() <= NORMALIZED_ROW_TOL);
        }
    }

    #[test]
    fn normalization_preserves_the_solution_set() {
        let p = {
            let a = random_matrix(25, 4, 3);
            let b = Vector::new(vec![0.5; 25]).unwrap();
            FeasibilityProblem::new(a, b).unwrap().problem
        };
        let q = p.normalized();
        let mut rng = rng_from_seed(7);
        for _ in 0..50 {
            let x: Vec<f64> = (0..4).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let vp = p.violations(&x).unwrap();
            let vq = q.violations(&x).unwrap();
            for i in 0..25 {
                // Dividing a row by a positive norm cannot change the sign
                // of its violation, so feasibility is unchanged pointwise.
                assert_eq!(vp[i] > 0.0, vq[i] > 0.0, "sign flipped at row {i}");
            }
        }
    }

    #[test]
    fn normalization_is_idempotent_bit_for_bit() {
        let a = random_matrix(12, 5, 19);
        let b = Vector::zeros(12);
        let p = FeasibilityProblem::new(a, b).unwrap().problem;
        let once = p.normalized();
        let twice = once.normalized();
        assert_eq!(once.matrix(), twice.matrix());
        assert_eq!(once.rhs(), twice.rhs());
        assert!(twice.is_normalized());
    }

    #[test]
    fn smallest_singular_value_of_diagonal_matrix() {
        let a = DenseMatrix::from_rows(vec![
            vec![3.0, 0.0],
            vec![0.0, 0.5],
            vec![0.0, 0.0],
        ])
        .unwrap();
        assert_relative_eq!(smallest_singular_value(&a), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn smallest_singular_value_matches_gram_eigensolver() {
        for (m, n, seed) in [(8, 3, 1u64), (20, 6, 2), (40, 10, 3), (15, 15, 4)] {
            let a = random_matrix(m, n, seed);
            let jacobi = smallest_singular_value(&a);
            let oracle = sigma_min_via_gram(&a);
            assert_relative_eq!(jacobi, oracle, max_relative = 1e-8, epsilon = 1e-10);
        }
    }

    #[test]
    fn smallest_singular_value_detects_rank_deficiency() {
        // Third column is the sum of the first two.
        let mut rows = Vec::new();
        let mut rng = rng_from_seed(5);
        for _ in 0..10 {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            rows.push(vec![a, b, a + b]);
        }
        let a = DenseMatrix::from_rows(rows).unwrap();
        assert!(smallest_singular_value(&a) < 1e-10);
    }

    #[test]
    fn smallest_singular_value_lower_bounds_image_norms() {
        let a = random_matrix(30, 8, 23);
        let sigma = smallest_singular_value(&a);
        let mut rng = rng_from_seed(99);
        for _ in 0..100 {
            let mut v: Vec<f64> = (0..8).map(|_| rng.sample(StandardNormal)).collect();
            let nv = norm(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            let av = a.mul_vec(&v).unwrap();
            assert!(sigma <= norm(&av) + 1e-8, "sigma {} > ||Av|| {}", sigma, norm(&av));
        }
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::collection::vec as pvec;
    use proptest::prelude::*;

    fn finite_entries(len: usize) -> impl Strategy<Value = Vec<f64>> {
        pvec(-1e6..1e6f64, len..=len)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn positive_part_is_nonnegative_and_idempotent(entries in pvec(-1e6..1e6f64, 1..40)) {
            let v = Vector::new(entries).unwrap();
            let p = positive_part(&v);
            prop_assert!(p.iter().all(|&x| x >= 0.0));
            let pp = positive_part(&p);
            prop_assert_eq!(pp.as_slice(), p.as_slice());
        }

        #[test]
        fn distance_is_symmetric_and_zero_on_self(a in finite_entries(6), b in finite_entries(6)) {
            let x = Vector::new(a).unwrap();
            let y = Vector::new(b).unwrap();
            let d_xy = euclidean_distance(&x, &y).unwrap();
            let d_yx = euclidean_distance(&y, &x).unwrap();
            prop_assert_eq!(d_xy, d_yx);
            prop_assert_eq!(euclidean_distance(&x, &x).unwrap(), 0.0);
        }

        #[test]
        fn residual_entries_are_nonnegative(
            rows in pvec(finite_entries(3), 1..12),
            x in finite_entries(3),
        ) {
            let m = rows.len();
            let a = DenseMatrix::from_rows(rows).unwrap();
            let b = Vector::zeros(m);
            if let Ok(built) = FeasibilityProblem::new(a, b) {
                let r = built.problem.residual(&Vector::new(x).unwrap()).unwrap();
                prop_assert!(r.iter().all(|&v| v >= 0.0));
            }
        }
    }
}
