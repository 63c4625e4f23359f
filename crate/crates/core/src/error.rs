use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series degree caps differ ({left} vs {right})")]
    CapMismatch { left: usize, right: usize },
    #[error("inner series has a nonzero constant term")]
    InnerConstantTerm,
    #[error("series has a vanishing linear coefficient")]
    VanishingLinearTerm,
    #[error("series has a vanishing constant term")]
    VanishingConstantTerm,
    #[error("non-finite coefficient at position {index}")]
    NonFinite { index: usize },
    #[error("series needs at least one coefficient")]
    EmptySeries,

    #[error("rotation angle {0} is not in (0, 1)")]
    InvalidAngle(f64),
    #[error("partial quotient a_{index} must be a positive integer")]
    InvalidQuotient { index: usize },

    #[error("germ does not fix the origin")]
    NotAFixedPoint,
    #[error("linear part is not semi-indifferent: eigenvalue moduli {moduli:?}")]
    NotSemiIndifferent { moduli: [f64; 2] },
    #[error("origin is not an isolated fixed point (f^{q} - id vanishes through degree {cap})")]
    NonIsolatedFixedPoint { q: u32, cap: usize },
    #[error("backward step {step} failed: Newton did not converge")]
    NewtonFailure { step: usize },
    #[error("start point has norm {norm} outside the trap ball of radius {radius}")]
    OutsideTrap { norm: f64, radius: f64 },
    #[error("degree budget exceeded: need cap {needed}, maximum {max}")]
    DegreeBudget { needed: usize, max: usize },

    #[error("small divisor {divisor:e} at order {order}")]
    SmallDivisor { order: usize, divisor: f64 },
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("truncation budget exhausted after {terms} terms (last change {last_change:e})")]
    TruncationBudget { terms: usize, last_change: f64 },
    #[error("sample domain too large: technical condition value {worst} >= 1")]
    DomainTooLarge { worst: f64 },

    #[error("orbit left the petal after {step} steps")]
    LeftPetal { step: usize },
    #[error("not quasiconformal: |mu| >= 1 on {cells} cells (stratum {stratum:?})")]
    NotQuasiconformal { cells: usize, stratum: Option<u32> },

    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::CapMismatch { .. } => "cap_mismatch",
            Error::InnerConstantTerm => "inner_constant_term",
            Error::VanishingLinearTerm => "vanishing_linear_term",
            Error::VanishingConstantTerm => "vanishing_constant_term",
            Error::NonFinite { .. } => "non_finite",
            Error::EmptySeries => "empty_series",
            Error::InvalidAngle(_) => "invalid_angle",
            Error::InvalidQuotient { .. } => "invalid_quotient",
            Error::NotAFixedPoint => "not_a_fixed_point",
            Error::NotSemiIndifferent { .. } => "not_semi_indifferent",
            Error::NonIsolatedFixedPoint { .. } => "non_isolated_fixed_point",
            Error::NewtonFailure { .. } => "newton_failure",
            Error::OutsideTrap { .. } => "outside_trap",
            Error::DegreeBudget { .. } => "degree_budget",
            Error::SmallDivisor { .. } => "small_divisor",
            Error::Inconsistent(_) => "inconsistent",
            Error::Precondition(_) => "precondition",
            Error::TruncationBudget { .. } => "truncation_budget",
            Error::DomainTooLarge { .. } => "domain_too_large",
            Error::LeftPetal { .. } => "left_petal",
            Error::NotQuasiconformal { .. } => "not_quasiconformal",
            Error::Input(_) => "input",
        }
    }
}
