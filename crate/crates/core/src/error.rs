use num_complex::Complex64;
use thiserror::Error;

/// Library-wide error type. Numeric routines signal poles and degeneracies
/// instead of returning NaN/Inf; grid drivers skip the flagged points.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("jet order {0} out of range (max 3)")]
    OrderOutOfRange(usize),
    #[error("pole at {0}")]
    PoleAtPoint(Complex64),
    #[error("jet order exhausted: partner nesting needs one order per level")]
    OrderExhausted,
    #[error("parse error at byte {offset}: expected {expected}")]
    Parse { offset: usize, expected: String },
    #[error("zero polynomial has no roots")]
    ZeroPolynomial,
    #[error("root finder did not converge")]
    RootsDiverged,
    #[error("not a flag: |<p,q>| = {0:.3e} after normalization")]
    NotAFlag(f64),
    #[error("finite-difference step {0:.3e} below 1e-6")]
    StepTooSmall(f64),
    #[error("finite-difference step {0:.3e} above 1e-2")]
    StepTooLarge(f64),
    #[error("frame not orthonormal: invariant drift {0:.3e} within stencil")]
    FrameNotOrthonormal(f64),
    #[error("no horizontal tangent at {0} (vertical point or vertical curve)")]
    NoHorizontalTangent(Complex64),
    #[error("degenerate Weierstrass data: g' vanishes identically")]
    DegenerateWeierstrass,
    #[error("Weierstrass data must be holomorphic (no zb/conj)")]
    NonHolomorphicData,
    #[error("partner nesting deeper than 2 is not supported")]
    PartnerTooDeep,
    #[error("function vanishes on the winding contour (min modulus {0:.3e})")]
    ZeroOnContour(f64),
    #[error("phase increment >= pi on contour at max refinement")]
    InsufficientSamples,
    #[error("quadrature drift {0:.3} exceeds 0.1")]
    QuadratureDrift(f64),
    #[error("invariant vanishes identically on the grid; divisor undefined")]
    IdenticallyZero,
    #[error("degenerate surface point: first fundamental form below floor")]
    DegeneratePoint,
    #[error("not conformal at sample (residual {0:.3e}); harmonicity check needs conformality")]
    NotConformal(f64),
    #[error("grid empty after pole skipping")]
    EmptyGrid,
    #[error("configuration invalid: {0}")]
    BadConfig(String),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
