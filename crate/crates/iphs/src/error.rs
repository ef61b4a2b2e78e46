//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector or matrix argument has the wrong length for the object it is used with.
    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A square matrix was required.
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    /// Skew-symmetry validation failed at construction.
    #[error("matrix is not skew-symmetric: max |M + M'| = {max_defect:e} exceeds tolerance {tol:e}")]
    NotSkewSymmetric { max_defect: f64, tol: f64 },

    /// A matrix entry was NaN or infinite.
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    /// A scalar parameter violated a positivity requirement.
    #[error("positivity violated: {what} = {value} (must be > 0)")]
    NotPositive { what: &'static str, value: f64 },

    /// A computed vector component came out NaN or infinite.
    #[error("non-finite {what} at component {index}")]
    NonFinite { what: &'static str, index: usize },

    /// A computed scalar came out NaN or infinite.
    #[error("non-finite value of {what}")]
    NonFiniteValue { what: &'static str },

    /// Evaluation was requested outside the admissible domain.
    #[error("outside admissible domain: {reason}")]
    Domain { reason: String },

    /// The operation needs an irreversible port map (legacy ports define no output).
    #[error("operation `{op}` is undefined for a legacy port map")]
    LegacyPortUnsupported { op: &'static str },

    /// A Runge-Kutta stage evaluation failed.
    #[error("integration stage {stage} failed at t = {t}: {source}")]
    Stage {
        stage: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    /// A balance identity exceeded its bound during simulation.
    #[error("balance identity `{which}` violated at t = {t}: |residual| = {residual:e} exceeds {bound:e}")]
    BalanceViolation {
        which: &'static str,
        t: f64,
        residual: f64,
        bound: f64,
    },

    /// The state left the admissible domain during simulation.
    #[error("state left the admissible domain at t = {t}")]
    DomainExit { t: f64 },

    /// An aggregate was requested over an empty trajectory.
    #[error("trajectory is empty")]
    EmptyTrajectory,
}

pub type Result<T> = std::result::Result<T, Error>;
