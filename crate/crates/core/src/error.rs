use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("polynomial degree {got} is below the required minimum {min}")]
    DegreeTooSmall { got: usize, min: usize },
    #[error("p-adic precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("Hensel recursion exceeded depth bound {0}")]
    DepthExceeded(u32),
    #[error("field contexts do not match")]
    ContextMismatch,
    #[error("point set contains a repeated point at index {0}")]
    RepeatedPoint(usize),
    #[error("point set needs at least {min} points, got {got}")]
    TooFewPoints { got: usize, min: usize },
    #[error("both homogeneous coordinates are zero")]
    DegeneratePoint,
    #[error("singular Mobius matrix")]
    SingularMatrix,
    #[error("density has a singularity at x = {0}")]
    Singularity(f64),
    #[error("quadrature did not converge: estimated error {estimate:e} over [{a}, {b}]")]
    Quadrature { a: f64, b: f64, estimate: f64 },
    #[error("root certification failed: {0}")]
    RootCertification(String),
    #[error("could not fully factor {0} with trial division")]
    Factorization(String),
    #[error("invalid place: {0}")]
    InvalidPlace(String),
    #[error("empty place set")]
    EmptyPlaceSet,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
