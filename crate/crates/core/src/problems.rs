//! Problem generators, dataset and LP reformulations, and file formats.
//!
//! Everything here produces or transports [`FeasibilityProblem`] instances:
//!
//! * dense random generators (Gaussian and correlated single-signed rows),
//!   both returning the planted witness point;
//! * reformulation of a labeled binary dataset into the homogeneous linear
//!   separability system;
//! * a reader for a fixed-format-or-whitespace MPS subset and the
//!   reformulation of a linear program into the feasibility system whose
//!   solutions are exactly the optimal points;
//! * plain-text interchange formats for problems and witness points, plus
//!   a labeled-CSV reader.
//!
//! All random draws flow through the pinned generator in [`crate::rng`]
//! with documented draw order, so a (kind, dimensions, seed) triple fully
//! determines the emitted instance.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::linalg::{dot, Construction, DenseMatrix, FeasibilityProblem, LinalgError, Vector};
use crate::rng::rng_from_seed;

/// Errors from the MPS reader, each pinned to a 1-based line number where
/// one exists.
#[derive(Debug, Error)]
pub enum MpsError {
    #[error("line {line}: unknown section '{section}'")]
    UnknownSection { line: usize, section: String },
    #[error("line {line}: RANGES sections are not supported")]
    RangesUnsupported { line: usize },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unknown row '{row}'")]
    UnknownRow { line: usize, row: String },
    #[error("line {line}: unknown column '{column}'")]
    UnknownColumn { line: usize, column: String },
    #[error("line {line}: duplicate coefficient for column '{column}' in row '{row}'")]
    DuplicateEntry {
        line: usize,
        column: String,
        row: String,
    },
    #[error("line {line}: unsupported bound type '{kind}'")]
    UnsupportedBound { line: usize, kind: String },
    #[error("line {line}: '{field}' is not a valid number")]
    BadNumber { line: usize, field: String },
    #[error("line {line}: a second objective row '{row}' was declared")]
    DuplicateObjective { line: usize, row: String },
    #[error("no objective row (type N) was declared")]
    MissingObjective,
    #[error("COLUMNS section declared no entries")]
    EmptyColumns,
    #[error("missing ENDATA terminator")]
    MissingEndata,
}

/// Errors from generators, reformulations, and file formats.
#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("band must satisfy 0 < lo < hi with finite endpoints, got [{lo}, {hi}]")]
    BadBand { lo: f64, hi: f64 },
    #[error("labels must be +1 or -1, got {label} at data row {row}")]
    BadLabel { row: usize, label: f64 },
    #[error("data row {row} has {got} features, expected {expected}")]
    RaggedData {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("dataset must contain at least one point")]
    EmptyDataset,
    #[error("dimensions must be at least 1, got {rows} x {cols}")]
    EmptyShape { rows: usize, cols: usize },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Mps(#[from] MpsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Draws an `m x n` system with standard normal entries whose right-hand
/// side is `A x* + |e|` for a standard normal witness `x*` and noise `e`,
/// so the witness satisfies every constraint with nonnegative slack.
///
/// Draw order is fixed and documented: matrix entries row by row, then the
/// witness, then the slacks. Equal seeds reproduce the instance exactly.
pub fn gen_gaussian(m: usize, n: usize, seed: u64) -> Result<(FeasibilityProblem, Vector), ProblemError> {
    if m == 0 || n == 0 {
        return Err(ProblemError::EmptyShape { rows: m, cols: n });
    }
    let mut rng = rng_from_seed(seed);
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    let witness: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let b: Vec<f64> = rows
        .iter()
        .map(|r| dot(r, &witness) + rng.sample::<f64, _>(StandardNormal).abs())
        .collect();
    let built = FeasibilityProblem::new(DenseMatrix::from_rows(rows)?, Vector::new(b)?)?;
    Ok((built.problem, Vector::new(witness)?))
}

/// Draws an `m x n` system whose rows are highly correlated: each row's
/// entries are uniform over `[lo, hi]` or, with probability one half, over
/// `[-hi, -lo]`, so all coefficients of a row share one sign. Narrow bands
/// make the rows nearly parallel and the system badly conditioned. The
/// right-hand side and witness are built as in [`gen_gaussian`].
///
/// Draw order per row: the sign coin, then the `n` entries; after all rows,
/// the witness, then the slacks.
pub fn gen_correlated(
    m: usize,
    n: usize,
    lo: f64,
    hi: f64,
    seed: u64,
) -> Result<(FeasibilityProblem, Vector), ProblemError> {
    if m == 0 || n == 0 {
        return Err(ProblemError::EmptyShape { rows: m, cols: n });
    }
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(ProblemError::BadBand { lo, hi });
    }
    let mut rng = rng_from_seed(seed);
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let negative = rng.gen::<bool>();
            (0..n)
                .map(|_| {
                    let v = rng.gen_range(lo..=hi);
                    if negative {
                        -v
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let witness: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let b: Vec<f64> = rows
        .iter()
        .map(|r| dot(r, &witness) + rng.sample::<f64, _>(StandardNormal).abs())
        .collect();
    let built = FeasibilityProblem::new(DenseMatrix::from_rows(rows)?, Vector::new(b)?)?;
    Ok((built.problem, Vector::new(witness)?))
}

/// Draws a consistent equality system `A x = b` with standard normal
/// entries: `b` is exactly `A x*` for a standard normal solution `x*`, so
/// the residual at `x*` vanishes in floating point. Draw order: matrix
/// entries row by row, then the solution.
pub fn gen_gaussian_equalities(
    m: usize,
    n: usize,
    seed: u64,
) -> Result<(DenseMatrix, Vector, Vector), ProblemError> {
    if m == 0 || n == 0 {
        return Err(ProblemError::EmptyShape { rows: m, cols: n });
    }
    let mut rng = rng_from_seed(seed);
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    let solution: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let b: Vec<f64> = rows.iter().map(|r| dot(r, &solution)).collect();
    Ok((
        DenseMatrix::from_rows(rows)?,
        Vector::new(b)?,
        Vector::new(solution)?,
    ))
}

/// Draws a consistent equality system whose rows follow the correlated
/// single-signed model of [`gen_correlated`]: entries uniform over
/// `[lo, hi]` with the whole row negated on a fair coin. `b` is exactly
/// `A x*` for a standard normal solution. Draw order per row: the sign
/// coin, then the entries; after all rows, the solution.
pub fn gen_correlated_equalities(
    m: usize,
    n: usize,
    lo: f64,
    hi: f64,
    seed: u64,
) -> Result<(DenseMatrix, Vector, Vector), ProblemError> {
    if m == 0 || n == 0 {
        return Err(ProblemError::EmptyShape { rows: m, cols: n });
    }
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(ProblemError::BadBand { lo, hi });
    }
    let mut rng = rng_from_seed(seed);
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let negative = rng.gen::<bool>();
            (0..n)
                .map(|_| {
                    let v = rng.gen_range(lo..=hi);
                    if negative {
                        -v
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let solution: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let b: Vec<f64> = rows.iter().map(|r| dot(r, &solution)).collect();
    Ok((
        DenseMatrix::from_rows(rows)?,
        Vector::new(b)?,
        Vector::new(solution)?,
    ))
}

/// A binary-labeled dataset with rectangular feature rows and labels in
/// `{+1, -1}`.
#[derive(Clone, Debug)]
pub struct LabeledDataset {
    points: Vec<Vec<f64>>,
    labels: Vec<f64>,
}

impl LabeledDataset {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self, ProblemError> {
        if points.is_empty() {
            return Err(ProblemError::EmptyDataset);
        }
        if labels.len() != points.len() {
            return Err(ProblemError::RaggedData {
                row: labels.len().min(points.len()),
                got: labels.len(),
                expected: points.len(),
            });
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(ProblemError::EmptyShape {
                rows: points.len(),
                cols: 0,
            });
        }
        for (row, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(ProblemError::RaggedData {
                    row,
                    got: p.len(),
                    expected: dim,
                });
            }
        }
        for (row, &label) in labels.iter().enumerate() {
            if label != 1.0 && label != -1.0 {
                return Err(ProblemError::BadLabel { row, label });
            }
        }
        Ok(Self { points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Feature dimension (without the bias coordinate).
    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }
}

/// Homogeneous linear separability as a feasibility system: a solution
/// `(w, w0)` satisfies `y_i (z_i . w + w0) >= 0` for every sample, so each
/// data point becomes the row `-y_i [z_i, 1]` with right-hand side zero.
/// The bias coordinate is appended last; the system has `d + 1` columns.
pub fn svm_to_feasibility(data: &LabeledDataset) -> FeasibilityProblem {
    let rows: Vec<Vec<f64>> = data
        .points
        .iter()
        .zip(&data.labels)
        .map(|(z, &y)| {
            let mut row: Vec<f64> = z.iter().map(|&v| -y * v).collect();
            row.push(-y);
            row
        })
        .collect();
    let m = rows.len();
    FeasibilityProblem::new(
        DenseMatrix::from_rows(rows).expect("dataset rows validated rectangular"),
        Vector::zeros(m),
    )
    .expect("every row has a unit bias entry, so no zero rows exist")
    .problem
}

/// Stacks a consistent equality system `Ax = b` into the equivalent
/// inequality system `[A; -A] x <= [b; -b]`. The positive parts of the
/// stacked violations recombine into `|Ax - b|`, so residual norms agree
/// with the equality residual.
pub fn equalities_to_feasibility(
    a: &DenseMatrix,
    b: &Vector,
) -> Result<Construction, ProblemError> {
    if b.len() != a.rows() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.rows(),
            got: b.len(),
        }
        .into());
    }
    let mut rows = Vec::with_capacity(2 * a.rows());
    let mut rhs = Vec::with_capacity(2 * a.rows());
    for i in 0..a.rows() {
        rows.push(a.row(i).to_vec());
        rhs.push(b[i]);
    }
    for i in 0..a.rows() {
        rows.push(a.row(i).iter().map(|&v| -v).collect());
        rhs.push(-b[i]);
    }
    Ok(FeasibilityProblem::new(
        DenseMatrix::from_rows(rows)?,
        Vector::new(rhs)?,
    )?)
}

/// Sense of a non-equality MPS row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IneqSense {
    LessEq,
    GreaterEq,
}

/// One `L` or `G` row of a parsed program, kept aside for the reformulator.
#[derive(Clone, Debug)]
pub struct InequalityRow {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
    pub sense: IneqSense,
}

/// A linear program `min c^T x` subject to `A_eq x = b`, inequality side
/// rows, and box bounds `l <= x <= u` (infinite entries mean unbounded).
///
/// Equality rows are stored as plain vectors because a program may have
/// none; [`LpInstance::equalities`] materializes them as a matrix when at
/// least one exists.
#[derive(Clone, Debug)]
pub struct LpInstance {
    pub name: String,
    pub eq_rows: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub c: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub inequalities: Vec<InequalityRow>,
    /// Optimal objective value, when known from a side channel; the MPS
    /// format itself does not carry it.
    pub p_star: Option<f64>,
    pub column_names: Vec<String>,
}

impl LpInstance {
    pub fn num_cols(&self) -> usize {
        self.c.len()
    }

    /// The equality block as a matrix, or `None` when the program has no
    /// equality rows.
    pub fn equalities(&self) -> Option<(DenseMatrix, Vector)> {
        if self.eq_rows.is_empty() {
            return None;
        }
        let a = DenseMatrix::from_rows(self.eq_rows.clone()).expect("parser keeps rows rectangular");
        let b = Vector::new(self.eq_rhs.clone()).expect("parser keeps rhs finite");
        Some((a, b))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum RowKind {
    Objective,
    Eq,
    Le,
    Ge,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Rows,
    Columns,
    Rhs,
    Bounds,
    Done,
}

fn parse_number(line: usize, field: &str) -> Result<f64, MpsError> {
    let v: f64 = field.parse().map_err(|_| MpsError::BadNumber {
        line,
        field: field.to_string(),
    })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(MpsError::BadNumber {
            line,
            field: field.to_string(),
        })
    }
}

/// Reads the supported MPS subset: `NAME`, `ROWS` (`N`/`E`/`L`/`G`),
/// `COLUMNS`, `RHS`, optional `BOUNDS` (`UP`/`LO`/`FX`/`FR`/`MI`/`PL`),
/// and `ENDATA`. Both fixed-field and whitespace-separated layouts parse,
/// since names in the subset contain no spaces. `RANGES` sections, integer
/// markers, and other bound types are rejected loudly rather than
/// misread. Default bounds are `0 <= x < infinity`; missing right-hand
/// sides are zero.
pub fn parse_mps(text: &str) -> Result<LpInstance, ProblemError> {
    let mut name = String::new();
    let mut row_kinds: HashMap<String, RowKind> = HashMap::new();
    let mut row_order: Vec<String> = Vec::new();
    let mut objective_row: Option<String> = None;
    let mut column_names: Vec<String> = Vec::new();
    let mut column_index: HashMap<String, usize> = HashMap::new();
    // (row name -> (column index -> coefficient)), duplicates rejected.
    let mut coefficients: HashMap<String, HashMap<usize, f64>> = HashMap::new();
    let mut rhs_values: HashMap<String, f64> = HashMap::new();
    let mut explicit_lower: HashMap<usize, f64> = HashMap::new();
    let mut explicit_upper: HashMap<usize, f64> = HashMap::new();
    let mut section = Section::Preamble;
    let mut columns_seen = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let starts_flush = !raw.starts_with(char::is_whitespace);
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if starts_flush {
            match fields[0] {
                "NAME" => {
                    if let Some(n) = fields.get(1) {
                        name = (*n).to_string();
                    }
                    section = Section::Preamble;
                }
                "ROWS" => section = Section::Rows,
                "COLUMNS" => section = Section::Columns,
                "RHS" => section = Section::Rhs,
                "BOUNDS" => section = Section::Bounds,
                "RANGES" => return Err(MpsError::RangesUnsupported { line }.into()),
                "ENDATA" => {
                    section = Section::Done;
                    break;
                }
                other => {
                    return Err(MpsError::UnknownSection {
                        line,
                        section: other.to_string(),
                    }
                    .into())
                }
            }
            continue;
        }
        match section {
            Section::Preamble => {
                return Err(MpsError::Malformed {
                    line,
                    message: "data before any section header".to_string(),
                }
                .into())
            }
            Section::Rows => {
                if fields.len() != 2 {
                    return Err(MpsError::Malformed {
                        line,
                        message: format!("expected 'TYPE NAME', got {} fields", fields.len()),
                    }
                    .into());
                }
                let row = fields[1].to_string();
                let kind = match fields[0] {
                    "N" => {
                        if objective_row.is_some() {
                            return Err(MpsError::DuplicateObjective { line, row }.into());
                        }
                        objective_row = Some(row.clone());
                        RowKind::Objective
                    }
                    "E" => RowKind::Eq,
                    "L" => RowKind::Le,
                    "G" => RowKind::Ge,
                    other => {
                        return Err(MpsError::Malformed {
                            line,
                            message: format!("unknown row type '{other}'"),
                        }
                        .into())
                    }
                };
                if row_kinds.insert(row.clone(), kind).is_some() {
                    return Err(MpsError::Malformed {
                        line,
                        message: format!("row '{row}' declared twice"),
                    }
                    .into());
                }
                row_order.push(row);
            }
            Section::Columns => {
                if fields.iter().any(|f| f.contains("MARKER")) {
                    return Err(MpsError::Malformed {
                        line,
                        message: "integer markers are not supported".to_string(),
                    }
                    .into());
                }
                if fields.len() != 3 && fields.len() != 5 {
                    return Err(MpsError::Malformed {
                        line,
                        message: format!(
                            "expected 'COL ROW VALUE [ROW VALUE]', got {} fields",
                            fields.len()
                        ),
                    }
                    .into());
                }
                let col_name = fields[0].to_string();
                let col = *column_index.entry(col_name.clone()).or_insert_with(|| {
                    column_names.push(col_name.clone());
                    column_names.len() - 1
                });
                for pair in fields[1..].chunks(2) {
                    let row = pair[0];
                    let value = parse_number(line, pair[1])?;
                    if !row_kinds.contains_key(row) {
                        return Err(MpsError::UnknownRow {
                            line,
                            row: row.to_string(),
                        }
                        .into());
                    }
                    let entry = coefficients.entry(row.to_string()).or_default();
                    if entry.insert(col, value).is_some() {
                        return Err(MpsError::DuplicateEntry {
                            line,
                            column: col_name.clone(),
                            row: row.to_string(),
                        }
                        .into());
                    }
                    columns_seen = true;
                }
            }
            Section::Rhs => {
                if fields.len() != 3 && fields.len() != 5 {
                    return Err(MpsError::Malformed {
                        line,
                        message: format!(
                            "expected 'SET ROW VALUE [ROW VALUE]', got {} fields",
                            fields.len()
                        ),
                    }
                    .into());
                }
                for pair in fields[1..].chunks(2) {
                    let row = pair[0];
                    let value = parse_number(line, pair[1])?;
                    match row_kinds.get(row) {
                        None => {
                            return Err(MpsError::UnknownRow {
                                line,
                                row: row.to_string(),
                            }
                            .into())
                        }
                        Some(RowKind::Objective) => {
                            return Err(MpsError::Malformed {
                                line,
                                message: format!(
                                    "right-hand side for objective row '{row}' is not supported"
                                ),
                            }
                            .into())
                        }
                        Some(_) => {
                            rhs_values.insert(row.to_string(), value);
                        }
                    }
                }
            }
            Section::Bounds => {
                let kind = fields[0];
                let needs_value = matches!(kind, "UP" | "LO" | "FX");
                let expected = if needs_value { 4 } else { 3 };
                if fields.len() != expected {
                    return Err(MpsError::Malformed {
                        line,
                        message: format!(
                            "bound '{kind}' expects {expected} fields, got {}",
                            fields.len()
                        ),
                    }
                    .into());
                }
                let col_name = fields[2];
                let col = *column_index.get(col_name).ok_or_else(|| MpsError::UnknownColumn {
                    line,
                    column: col_name.to_string(),
                })?;
                match kind {
                    "UP" => {
                        explicit_upper.insert(col, parse_number(line, fields[3])?);
                    }
                    "LO" => {
                        explicit_lower.insert(col, parse_number(line, fields[3])?);
                    }
                    "FX" => {
                        let v = parse_number(line, fields[3])?;
                        explicit_lower.insert(col, v);
                        explicit_upper.insert(col, v);
                    }
                    "FR" => {
                        explicit_lower.insert(col, f64::NEG_INFINITY);
                        explicit_upper.insert(col, f64::INFINITY);
                    }
                    "MI" => {
                        explicit_lower.insert(col, f64::NEG_INFINITY);
                    }
                    "PL" => {
                        explicit_upper.insert(col, f64::INFINITY);
                    }
                    other => {
                        return Err(MpsError::UnsupportedBound {
                            line,
                            kind: other.to_string(),
                        }
                        .into())
                    }
                }
            }
            Section::Done => break,
        }
    }
    if section != Section::Done {
        return Err(MpsError::MissingEndata.into());
    }
    let objective = objective_row.ok_or(MpsError::MissingObjective)?;
    if !columns_seen {
        return Err(MpsError::EmptyColumns.into());
    }

    let n = column_names.len();
    let densify = |row: &str| -> Vec<f64> {
        let mut out = vec![0.0; n];
        if let Some(entries) = coefficients.get(row) {
            for (&col, &v) in entries {
                out[col] = v;
            }
        }
        out
    };

    let c = densify(&objective);
    let mut eq_rows = Vec::new();
    let mut eq_rhs = Vec::new();
    let mut inequalities = Vec::new();
    for row in &row_order {
        let rhs = rhs_values.get(row).copied().unwrap_or(0.0);
        match row_kinds[row] {
            RowKind::Objective => {}
            RowKind::Eq => {
                eq_rows.push(densify(row));
                eq_rhs.push(rhs);
            }
            RowKind::Le => inequalities.push(InequalityRow {
                coeffs: densify(row),
                rhs,
                sense: IneqSense::LessEq,
            }),
            RowKind::Ge => inequalities.push(InequalityRow {
                coeffs: densify(row),
                rhs,
                sense: IneqSense::GreaterEq,
            }),
        }
    }
    let lower: Vec<f64> = (0..n)
        .map(|j| explicit_lower.get(&j).copied().unwrap_or(0.0))
        .collect();
    let upper: Vec<f64> = (0..n)
        .map(|j| explicit_upper.get(&j).copied().unwrap_or(f64::INFINITY))
        .collect();
    Ok(LpInstance {
        name,
        eq_rows,
        eq_rhs,
        c,
        lower,
        upper,
        inequalities,
        p_star: None,
        column_names,
    })
}

/// Rewrites a linear program with known optimal value `p_star` as the
/// feasibility system whose solutions are exactly the optimal points:
///
/// equality rows as two opposite inequalities, finite upper bounds as unit
/// rows, finite lower bounds as negated unit rows, the objective cut
/// `c^T x <= p_star`, and finally the program's own inequality rows
/// (greater-or-equal rows negated). Infinite bounds contribute no rows.
pub fn lp_to_feasibility(lp: &LpInstance, p_star: f64) -> Result<FeasibilityProblem, ProblemError> {
    let n = lp.num_cols();
    if n == 0 {
        return Err(ProblemError::EmptyShape { rows: 0, cols: 0 });
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for (row, &b) in lp.eq_rows.iter().zip(&lp.eq_rhs) {
        rows.push(row.clone());
        rhs.push(b);
    }
    for (row, &b) in lp.eq_rows.iter().zip(&lp.eq_rhs) {
        rows.push(row.iter().map(|&v| -v).collect());
        rhs.push(-b);
    }
    for (j, &u) in lp.upper.iter().enumerate() {
        if u.is_finite() {
            let mut row = vec![0.0; n];
            row[j] = 1.0;
            rows.push(row);
            rhs.push(u);
        }
    }
    for (j, &l) in lp.lower.iter().enumerate() {
        if l.is_finite() {
            let mut row = vec![0.0; n];
            row[j] = -1.0;
            rows.push(row);
            rhs.push(-l);
        }
    }
    rows.push(lp.c.clone());
    rhs.push(p_star);
    for ineq in &lp.inequalities {
        match ineq.sense {
            IneqSense::LessEq => {
                rows.push(ineq.coeffs.clone());
                rhs.push(ineq.rhs);
            }
            IneqSense::GreaterEq => {
                rows.push(ineq.coeffs.iter().map(|&v| -v).collect());
                rhs.push(-ineq.rhs);
            }
        }
    }
    let built = FeasibilityProblem::new(DenseMatrix::from_rows(rows)?, Vector::new(rhs)?)?;
    if built.dropped_rows > 0 {
        log::warn!(
            "{} vacuous zero rows dropped while reformulating '{}'",
            built.dropped_rows,
            lp.name
        );
    }
    Ok(built.problem)
}

const PROBLEM_MAGIC: &str = "skm-problem v1";
const WITNESS_MAGIC: &str = "skm-witness v1";

/// Writes the plain-text problem interchange format:
///
/// ```text
/// skm-problem v1 <m> <n>
/// <a_11> ... <a_1n> <b_1>
/// ...
/// ```
///
/// Values use the shortest decimal form that parses back to the same
/// float, so a write-read cycle reproduces the system bit for bit.
pub fn write_problem(p: &FeasibilityProblem, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "{PROBLEM_MAGIC} {} {}", p.num_rows(), p.num_cols())?;
    for i in 0..p.num_rows() {
        for v in p.matrix().row(i) {
            write!(w, "{v} ")?;
        }
        writeln!(w, "{}", p.rhs()[i])?;
    }
    Ok(())
}

fn format_error(line: usize, message: impl Into<String>) -> ProblemError {
    ProblemError::Format {
        line,
        message: message.into(),
    }
}

/// Reads the interchange format written by [`write_problem`]. The usual
/// construction rules apply, so vacuous zero rows in the file are dropped
/// (and counted in the returned [`Construction`]) and trivially infeasible
/// zero rows are an error.
pub fn read_problem(r: impl BufRead) -> Result<Construction, ProblemError> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| format_error(1, "empty input"))?;
    let header = header?;
    let rest = header
        .strip_prefix(PROBLEM_MAGIC)
        .ok_or_else(|| format_error(1, format!("expected '{PROBLEM_MAGIC} <m> <n>'")))?;
    let dims: Vec<&str> = rest.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(format_error(1, format!("expected '{PROBLEM_MAGIC} <m> <n>'")));
    }
    let m: usize = dims[0]
        .parse()
        .map_err(|_| format_error(1, format!("bad row count '{}'", dims[0])))?;
    let n: usize = dims[1]
        .parse()
        .map_err(|_| format_error(1, format!("bad column count '{}'", dims[1])))?;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for _ in 0..m {
        let (idx, line) = lines
            .next()
            .ok_or_else(|| format_error(m + 1, format!("expected {m} data rows")))?;
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != n + 1 {
            return Err(format_error(
                idx + 1,
                format!("expected {} fields, got {}", n + 1, fields.len()),
            ));
        }
        let mut row = Vec::with_capacity(n);
        for f in &fields[..n] {
            row.push(
                f.parse::<f64>()
                    .map_err(|_| format_error(idx + 1, format!("bad number '{f}'")))?,
            );
        }
        rows.push(row);
        rhs.push(
            fields[n]
                .parse::<f64>()
                .map_err(|_| format_error(idx + 1, format!("bad number '{}'", fields[n])))?,
        );
    }
    Ok(FeasibilityProblem::new(
        DenseMatrix::from_rows(rows)?,
        Vector::new(rhs)?,
    )?)
}

/// Writes a witness point: `skm-witness v1 <n>` then one line of values.
pub fn write_witness(x: &Vector, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "{WITNESS_MAGIC} {}", x.len())?;
    let fields: Vec<String> = x.iter().map(|v| format!("{v}")).collect();
    writeln!(w, "{}", fields.join(" "))
}

/// Reads the format written by [`write_witness`].
pub fn read_witness(r: impl BufRead) -> Result<Vector, ProblemError> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| format_error(1, "empty input"))??;
    let rest = header
        .strip_prefix(WITNESS_MAGIC)
        .ok_or_else(|| format_error(1, format!("expected '{WITNESS_MAGIC} <n>'")))?;
    let n: usize = rest
        .trim()
        .parse()
        .map_err(|_| format_error(1, format!("bad length '{}'", rest.trim())))?;
    let line = lines
        .next()
        .ok_or_else(|| format_error(2, "missing data line"))??;
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != n {
        return Err(format_error(
            2,
            format!("expected {n} fields, got {}", fields.len()),
        ));
    }
    let mut entries = Vec::with_capacity(n);
    for f in fields {
        entries.push(
            f.parse::<f64>()
                .map_err(|_| format_error(2, format!("bad number '{f}'")))?,
        );
    }
    Ok(Vector::new(entries)?)
}

/// Reads a labeled CSV: one sample per line, label (`+1` or `-1`) in the
/// first field, features in the remaining fields. A header line is
/// detected by a non-numeric first field and skipped.
pub fn read_labeled_csv(r: impl BufRead) -> Result<LabeledDataset, ProblemError> {
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut first_data_line = true;
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if first_data_line && fields[0].parse::<f64>().is_err() {
            first_data_line = false;
            continue;
        }
        first_data_line = false;
        let label: f64 = fields[0]
            .parse()
            .map_err(|_| format_error(idx + 1, format!("bad label '{}'", fields[0])))?;
        let mut features = Vec::with_capacity(fields.len() - 1);
        for f in &fields[1..] {
            features.push(
                f.parse::<f64>()
                    .map_err(|_| format_error(idx + 1, format!("bad number '{f}'")))?,
            );
        }
        points.push(features);
        labels.push(label);
    }
    LabeledDataset::new(points, labels)
}
