use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("argument outside domain: {0}")]
    DomainError(String),
    #[error("iteration did not converge after {iterations} steps")]
    NonConvergence { iterations: usize },
    #[error("zero input")]
    ZeroInput,
    #[error("elements belong to different moduli")]
    ModulusMismatch,
    #[error("wild ramification unsupported (e = {e}, p = {p})")]
    WildRamificationUnsupported { e: usize, p: u32 },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("not a member: coefficient {index} has valuation < 1")]
    NotAMember { index: usize },
    #[error("series is not in the image of the map")]
    NotInImage,
    #[error("table is not a bijection")]
    NotBijective,
    #[error("scale must be nonzero")]
    ZeroScale,
    #[error("depth insufficient: partial value {partial}, error bound {}", .error_bound.as_ref().map(|b| b.to_string()).unwrap_or_else(|| "unbounded".into()))]
    DepthInsufficient { partial: Box<BigRational>, error_bound: Option<Box<BigRational>> },
    #[error("form vanishes on the domain")]
    VanishingForm,
    #[error("density vanishes on the domain")]
    VanishingDensity,
    #[error("bad reduction at p = {0}")]
    BadReduction(u32),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("curve has no q-tilde root")]
    MissingRoot,
    #[error("pole at torsion index {0}")]
    PoleAtTorsionPoint(i64),
    #[error("branch unavailable: {0}")]
    BranchUnavailable(String),
    #[error("products of zeros and poles differ")]
    ProductMismatch,
    #[error("point is not an l-torsion class")]
    NotTorsion,
    #[error("evaluation at a pole")]
    Pole,
}

pub type Result<T> = std::result::Result<T, Error>;
