//! Exact arithmetic for Hilbert modular forms over real quadratic fields
//! `Q(sqrt(p))`, `p` prime, built around Borcherds products and their
//! restrictions to modular curves.
//!
//! Everything is computed with exact rational coefficients; there is no
//! floating point anywhere in the crate. The main entry points are:
//!
//! - [`qseries::FracQSeries`]: sparse Laurent series in a fractional power
//!   of `q`, with explicit truncation tracking. Every modular object here
//!   is ultimately one of these.
//! - [`classical`]: elliptic modular forms (Eisenstein series, eta
//!   quotients, echelon bases of spaces for `Gamma_0(N)` with character).
//! - [`quadfield`]: arithmetic in the real quadratic field and the lattice
//!   enumerations behind restriction computations.
//! - [`plus_space`]: weakly holomorphic plus-space input forms, the
//!   obstruction pairing, and the solver that produces full expansions.
//! - [`borcherds`]: product expansions on `Gamma_0(l)`, theta contraction,
//!   restrictions of Hilbert Borcherds products, divisors and Heegner
//!   divisor analysis.
//! - [`eisenstein`]: Hecke Eisenstein series restrictions via ideal
//!   divisor sums.
//! - [`ring`]: relation verification, Groebner bases and character-graded
//!   Hilbert series for the graded rings.
//! - [`config`]: the shipped field data for `p = 5, 29, 37`.

pub mod borcherds;
pub mod cache;
pub mod classical;
pub mod config;
pub mod eisenstein;
pub mod linalg;
pub mod plus_space;
pub mod qseries;
pub mod quadfield;
pub mod ring;
pub mod selfcheck;

pub use qseries::FracQSeries;

use num::BigInt;
use num::BigRational;

/// Exact rational scalar used throughout.
pub type Rat = BigRational;
/// Exact integer scalar used throughout.
pub type Int = BigInt;

/// Crate-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("cannot invert a series that is zero to its precision")]
    InversionOfZeroSeries,
    #[error("character parity does not match the weight")]
    ParityMismatch,
    #[error("spanning set did not saturate: rank grew from {0} to {1} on enlargement")]
    SaturationFailure(usize, usize),
    #[error("principal part is obstructed: pairing with a weight-2 plus-space cusp form is {0}")]
    Obstructed(String),
    #[error("precision too low: {0}")]
    PrecisionTooLow(String),
    #[error("plus-space support violation at exponent {0}")]
    SupportViolation(String),
    #[error("lambda is separated from the reference point by a Weyl chamber wall")]
    ChamberViolation,
    #[error("no leading exponent known for this restriction")]
    MissingLeadingExponent,
    #[error("leading exponent could not be resolved: {0}")]
    UnresolvableLeadingExponent(String),
    #[error("linear system inconsistent: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown field discriminant {0}")]
    UnknownField(u64),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn rat_i64(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

pub(crate) fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}
