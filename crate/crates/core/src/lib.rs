//! Solvers and diagnostics for linear feasibility problems `Ax <= b`.
//!
//! The centerpiece is the sampling Kaczmarz-Motzkin (SKM) iteration: at each
//! step a random batch of `beta` constraints is drawn, the most violated
//! constraint in the batch is selected, and the iterate is projected (with
//! relaxation `lambda`) onto that constraint's halfspace. `beta = 1` recovers
//! randomized Kaczmarz, `beta = m` recovers Motzkin's rule.
//!
//! The crate is organized as:
//!
//! * [`linalg`]: dense row-major matrices, validated vectors, and the
//!   [`linalg::FeasibilityProblem`] container with its row-norm cache.
//! * [`solvers`]: the SKM family plus a block Kaczmarz baseline for
//!   equality systems.
//! * [`theory`]: convergence-rate calculators, batch-selection expectations,
//!   binary encoding length, feasibility certificates, and the batch-size
//!   gain model.
//! * [`problems`]: random instance generators, SVM and LP reformulations,
//!   an MPS reader, and plain-text interchange formats.
//! * [`harness`]: parameter sweeps, residual curves, solver comparisons,
//!   and CSV/SVG emitters.
//! * [`rng`]: the pinned random number generator used everywhere.
//!
//! All randomized routines take explicit 64-bit seeds, so every run of every
//! routine in this crate is reproducible bit for bit.

pub mod harness;
pub mod linalg;
pub mod problems;
pub mod rng;
pub mod solvers;
pub mod theory;

pub use harness::{
    BlockComparison, CellAggregate, CompareSpec, CurveAxis, CurvePoint, HarnessError,
    ResidualCurve, SweepRecord, SweepResult, SweepSpec, TrialOutcome,
};
pub use linalg::{Construction, DenseMatrix, FeasibilityProblem, LinalgError, Vector};
pub use problems::{LabeledDataset, LpInstance, MpsError, ProblemError};
pub use solvers::{
    BlockConfig, HaltReason, HaltingRule, IterateState, RunTrace, SkmConfig, SolverError,
    TraceRecord,
};
pub use theory::{
    CertificateReport, EncodingLength, GainModel, HoffmanEstimate, TheoryError,
};
