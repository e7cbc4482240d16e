use thiserror::Error;

/// Errors raised by the exact arithmetic, geometry and entropy layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("element is not a unit (valuation {0})")]
    NotAUnit(String),

    #[error("operation needs a point of hyperbolic space, got a type I point")]
    TypeIPoint,

    #[error("operation is undefined at the point at infinity")]
    AtInfinity,

    #[error("cut {0} does not lie strictly inside the interval")]
    CutOffPath(String),

    #[error("interval endpoints do not lie on a common center-ray")]
    NotOnRay,

    #[error("zero polynomial")]
    ZeroPolynomial,

    /// A radius outside the value group of the current field was needed.
    /// The payload is the ramification index that would suffice.
    #[error("ramification index {0} needed")]
    RamificationNeeded(u32),

    #[error("center is not representable in the current field")]
    CenterNotRepresentable,

    #[error("numerator and denominator are not coprime")]
    NotCoprime,

    #[error("map is constant")]
    ConstantMap,

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("segment image could not be resolved on [{0}, {1}]")]
    SegmentUnresolved(String, String),

    #[error("residue map is inseparable")]
    InseparableMap,

    #[error("point is not periodic with the given period")]
    NotPeriodic,

    #[error("template violation: {0}")]
    TemplateViolation(String),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("invalid Markov system: {0}")]
    InvalidSystem(String),

    #[error("mass system is singular")]
    SingularSystem,

    #[error("mass of state {0} is negative")]
    NegativeMass(String),

    #[error("state graph is not strongly connected at {0}")]
    NotStronglyConnected(String),

    #[error("state {0} is countable")]
    CountableState(String),

    #[error("unknown state {0}")]
    UnknownState(String),

    #[error("no admissible root in the convergence disk: {0}")]
    NoRootInDisk(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
