use thiserror::Error;

/// Errors produced by model handling and the stability checks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("row {row} has {found} entries, expected {expected}")]
    RowLength {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("entry ({row},{col}) `{text}` is improper: numerator degree {num_degree} exceeds denominator degree {den_degree}")]
    Improper {
        row: usize,
        col: usize,
        text: String,
        num_degree: usize,
        den_degree: usize,
    },

    #[error("entry ({row},{col}) has an identically zero denominator")]
    ZeroDenominator { row: usize, col: usize },

    #[error("denominator of entry ({row},{col}) vanishes at omega = {omega} (|den| = {magnitude:e})")]
    PoleOnAxis {
        row: usize,
        col: usize,
        omega: f64,
        magnitude: f64,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigenvalue solver did not converge")]
    EigenNonConvergence,

    #[error("interconnection is ill-posed: |det(I + D2 D1)| = {0:e}")]
    IllPosed(f64),

    #[error("open-loop system {which} is not Hurwitz (spectral abscissa {abscissa})")]
    OpenLoopUnstable { which: &'static str, abscissa: f64 },

    #[error("winding number undefined: locus passes within {distance:e} of the origin at omega = {omega}")]
    OriginProximity { omega: f64, distance: f64 },

    #[error("phase step of {step} rad between omega = {from} and omega = {to} exceeds pi/2")]
    PhaseStep { from: f64, to: f64, step: f64 },

    #[error("winding number residue {0} exceeds 0.1")]
    WindingAccuracy(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
