//! Exact-arithmetic toolkit for the quartic equation `X^2 - (a^2+b^2) Y^4 = -b^2`.
//!
//! The crate is organised around the pipeline used to bound the number of
//! solutions of that equation:
//!
//! * [`arith`] — big-integer utilities, Gaussian integers/rationals and
//!   ball arithmetic at configurable precision;
//! * [`pell`] — continued-fraction solvers for `x^2 - D y^2 = 1, -1, -4`
//!   and exact powers of the half-integer unit `alpha`;
//! * [`quadfam`] — enumeration of the solution families of
//!   `x^2 - D y^2 = -b^2` and the single-family decision;
//! * [`quartic`] — solution search, Gaussian witnesses, the gap principle
//!   and the lower bounds on `Y`;
//! * [`hyperg`] — Padé-type approximants to fourth roots of unit-circle
//!   Gaussian rationals, denominator invariants and the three-case
//!   contradiction engine;
//! * [`census`] — the finite scan over coprime `(a,b)` with
//!   `a^2 + b^2 < 181,700`;
//! * [`acceptance`] — the aggregated reproduction criteria run by
//!   `qpell paper-check` and the acceptance test target.

pub mod acceptance;
pub mod arith;
pub mod ball;
pub mod census;
pub mod hyperg;
pub mod pell;
pub mod quadfam;
pub mod quartic;

use thiserror::Error;

/// Default working precision for ball arithmetic, in bits.
pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Debug, Error)]
pub enum Error {
    #[error("negative input: {0}")]
    NegativeInput(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{0} is a perfect square; discriminant must be non-square")]
    SquareDiscriminant(String),
    #[error("x^2 - {0} y^2 = -4 has no integer solution")]
    MinusFourUnsolvable(String),
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    /// Two independent computations of the same quantity disagreed.
    #[error("internal consistency failure: {0}")]
    MethodMismatch(String),
    /// A statement the paper proves failed on concrete data. Never swallowed.
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("integrality failure: {0}")]
    IntegralityFailure(String),
    /// A reported value could not be reproduced.
    #[error("reproduction failure: {0}")]
    Reproduction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
