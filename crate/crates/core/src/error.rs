use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("constant term of the pole quadratic is zero")]
    ZeroB,
    #[error("odd valuation, square root lies outside Q_p")]
    OddValuation,
    #[error("unit part is not a square, square root lies outside Q_p")]
    NonSquareUnit,
    #[error("residue is divisible by p")]
    NonUnit,
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("fixed-point cubic has a triple root")]
    TripleRoot,
    #[error("fixed-point cubic has three distinct roots")]
    ThreeDistinctRoots,
    #[error("double fixed point is a pole")]
    PoleCoincidesWithFixedPoint,
    #[error("orbit hit a pole at step {step}")]
    PoleHit { step: usize },
    #[error("operation requires case {expected}")]
    WrongCase { expected: String },
    #[error("radius equals |a-d|_p, the value depends on the point")]
    ExceptionalRadius,
    #[error("radius is not in the invariant set I")]
    NotInvariant,
    #[error("parameter combination not covered by any classification branch: {0}")]
    UnhandledBoundary(String),
    #[error("ball measure exceeds the sphere measure")]
    BallExceedsSphere,
    #[error("rational map does not send 1+2Z_2 to itself")]
    NotSelfMap,
    #[error("coefficient {0} breaks the unit-sphere norm bound")]
    NormBoundViolated(String),
    #[error("operation requires p = {expected}")]
    WrongPrime { expected: String },
    #[error("radius is not an integer power of p")]
    NotIntegerPower,
    #[error("coefficient is not a p-adic integer")]
    NotIntegral,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Variant name, used as the typed error tag in reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NotPrime",
            Error::ZeroB => "ZeroB",
            Error::OddValuation => "OddValuation",
            Error::NonSquareUnit => "NonSquareUnit",
            Error::NonUnit => "NonUnit",
            Error::InvalidMap(_) => "InvalidMap",
            Error::TripleRoot => "TripleRoot",
            Error::ThreeDistinctRoots => "ThreeDistinctRoots",
            Error::PoleCoincidesWithFixedPoint => "PoleCoincidesWithFixedPoint",
            Error::PoleHit { .. } => "PoleHit",
            Error::WrongCase { .. } => "WrongCase",
            Error::ExceptionalRadius => "ExceptionalRadius",
            Error::NotInvariant => "NotInvariant",
            Error::UnhandledBoundary(_) => "UnhandledBoundary",
            Error::BallExceedsSphere => "BallExceedsSphere",
            Error::NotSelfMap => "NotSelfMap",
            Error::NormBoundViolated(_) => "NormBoundViolated",
            Error::WrongPrime { .. } => "WrongPrime",
            Error::NotIntegerPower => "NotIntegerPower",
            Error::NotIntegral => "NotIntegral",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
