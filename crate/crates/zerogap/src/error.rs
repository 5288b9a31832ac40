use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument was zero where a positive integer is required.
    #[error("argument must be a positive integer (got 0)")]
    ZeroArgument,

    /// A value exceeded the ceiling an operation supports.
    #[error("{what} = {got} exceeds the supported ceiling {ceiling}")]
    CeilingExceeded {
        what: &'static str,
        got: f64,
        ceiling: f64,
    },

    /// An operation on characters requires coprime inputs.
    #[error("gcd({m}·{n}, {q}) > 1: inputs must be coprime to the modulus")]
    NotCoprime { m: u64, n: u64, q: u64 },

    /// A primitive character is required.
    #[error("character mod {q} (index {index}) is not primitive")]
    NotPrimitive { q: u64, index: usize },

    /// Evaluation at the pole s = 1.
    #[error("s = 1 is a pole")]
    PoleAtOne,

    /// Hurwitz zeta shift parameter outside (0, 1].
    #[error("shift parameter a = {0} outside (0, 1]")]
    BadShift(f64),

    /// Tolerance below what double precision supports here.
    #[error("tolerance {got:e} below the supported minimum {min:e}")]
    ToleranceTooTight { got: f64, min: f64 },

    /// Forward scan failed to bracket a root below the ceiling.
    #[error("no bracket found below {ceiling} (scan step {step})")]
    ScanCeiling { ceiling: f64, step: f64 },

    /// Fewer data points than the statistic needs.
    #[error("need at least {need} ordinates, got {got}")]
    TooFewOrdinates { need: usize, got: usize },

    /// Two independent quadrature rules disagreed.
    #[error("quadrature rules disagree: |{a} - {b}| > {tol:e}")]
    QuadratureMismatch { a: f64, b: f64, tol: f64 },

    /// A user-supplied coefficient system failed a convolution identity.
    #[error("coefficient system fails {identity} at n = {n} (|residual| = {residual:e})")]
    BadCoefficientSystem {
        identity: &'static str,
        n: u64,
        residual: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
