use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A finite-difference stencil (or the margin around it) left the chart domain.
    #[error("{label}: stencil around {point} leaves the chart domain")]
    DomainViolation { label: String, point: String },

    #[error("{label}: non-finite value at {point}")]
    NonFinite { label: String, point: String },

    #[error("{label}: metric is not positive definite at {point} (min eig {min_eig:e}, max eig {max_eig:e})")]
    SingularMetric {
        label: String,
        point: String,
        min_eig: f64,
        max_eig: f64,
    },

    #[error("{label}: Cauchy-Riemann residual {residual:e} exceeds {tolerance:e} at {point}")]
    HolomorphyViolation {
        label: String,
        point: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("rank deficient: need {needed} nonzero singular values, have {rank}")]
    RankDeficient { needed: usize, rank: usize },

    #[error("curvature hypothesis not met: {0}")]
    HypothesisFail(String),

    #[error("domain metric is not Kähler (residual {residual:e})")]
    KahlerRequired { residual: f64 },

    #[error("field is not periodic on the torus: mismatch {mismatch:e} at {point}")]
    NotPeriodic { point: String, mismatch: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures caused by the numerics at the requested points
    /// (as opposed to bad input or an unmet hypothesis).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DomainViolation { .. }
                | Error::NonFinite { .. }
                | Error::SingularMetric { .. }
                | Error::HolomorphyViolation { .. }
                | Error::RankDeficient { .. }
                | Error::NotPeriodic { .. }
        )
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
