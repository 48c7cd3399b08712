//! Error type shared by every stage of the forward and inverse pipelines.

use thiserror::Error;

/// Errors raised by the library.
///
/// The CLI maps each variant to an exit code: input/class failures exit
/// with 1, numerical failures with 3 (parse errors are handled by the
/// binary itself and exit with 2).
#[derive(Debug, Error)]
pub enum Error {
    #[error("root iteration did not reach tol {tol:e} within {budget} iterations (residual {residual:e})")]
    NonConvergence {
        tol: f64,
        budget: usize,
        residual: f64,
    },

    #[error("zero at {zero} has no reciprocal partner within tol {tol:e}")]
    UnpairedRoot { zero: String, tol: f64 },

    #[error("circle zero at {zero} has odd multiplicity {multiplicity}; input is not of the form f(z)f(1/z)")]
    OddCircleMultiplicity { zero: String, multiplicity: usize },

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("the zero perturbation has no class parameters")]
    EmptySupport,

    #[error("trimmed degree {got} of {which} contradicts the class prediction {expected} (input at a class boundary)")]
    DegreeMismatch {
        which: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("root {z} inside the unit disk is not real (|Im| = {imag:e} > tol); input is not a valid w")]
    NonRealBoundState { z: String, imag: f64 },

    #[error("w vanishes at the sampling point z = {z} (resonance on the evaluation point)")]
    PoleAtZ { z: String },

    #[error("computed norming constant m[{index}]{side} = {value:e} is not positive; data violates (S2)")]
    NonPositiveNorming {
        index: i32,
        side: char,
        value: f64,
    },

    #[error("z = {z} is not a bound state (|w(z)| = {wz:e})")]
    NotABoundState { z: f64, wz: f64 },

    #[error("square of the recovered leading factor is not positive ({value:e}); input lies outside the class")]
    NegativeSquare { value: f64 },

    #[error("claimed bound state {z} matches no reciprocal pair within tol {tol:e}")]
    AmbiguousBoundState { z: f64, tol: f64 },

    #[error("class validation failed: {0}")]
    ClassViolation(String),

    #[error("zeros of s do not align with the canonical pairing: {0}")]
    UnmatchedZero(String),

    #[error("power-series coefficient |c_{index}| = {value:e} exceeds 1e12; w nearly vanishes at 0")]
    SeriesOverflow { index: usize, value: f64 },

    #[error("w has a zero at distance {dist:e} from the sampling circle; quadrature is unstable")]
    QuadratureUnstable { dist: f64 },

    #[error("Marchenko system at n = {n} is singular (pivot {pivot:e} below 1e-12)")]
    SingularSystem { n: i64, pivot: f64 },

    #[error("Marchenko ratio at n = {n} is not positive ({value:e})")]
    NonPositiveRatio { n: i64, value: f64 },

    #[error("round trip failed: {0}")]
    RoundTripFailure(String),

    #[error("F = w(z)w(1/z) + eta^2 vanishes identically (s = 0, degenerate input)")]
    EmptyF,

    #[error("m = {m} is below theorem scope (m >= 3 required)")]
    BelowTheoremScope { m: usize },
}

impl Error {
    /// CLI exit code for this failure: 1 for data/class problems, 3 for
    /// numerical breakdowns.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidCoefficient(_)
            | Error::EmptySupport
            | Error::NonRealBoundState { .. }
            | Error::NonPositiveNorming { .. }
            | Error::NotABoundState { .. }
            | Error::NegativeSquare { .. }
            | Error::AmbiguousBoundState { .. }
            | Error::ClassViolation(_)
            | Error::UnmatchedZero(_)
            | Error::DegreeMismatch { .. }
            | Error::EmptyF
            | Error::BelowTheoremScope { .. } => 1,
            Error::NonConvergence { .. }
            | Error::UnpairedRoot { .. }
            | Error::OddCircleMultiplicity { .. }
            | Error::PoleAtZ { .. }
            | Error::SeriesOverflow { .. }
            | Error::QuadratureUnstable { .. }
            | Error::SingularSystem { .. }
            | Error::NonPositiveRatio { .. }
            | Error::RoundTripFailure(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
