use thiserror::Error;

use crate::census::Branch;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CensusError {
    /// The point coincides with the center of an adjacent circle of `x`,
    /// where the critical-angle formulas are undefined.
    #[error("point ({u}, {v}) is the center of an adjacent circle of x")]
    CenterSingular { u: f64, v: f64 },

    /// The auxiliary triangle required by a critical-angle formula does not exist.
    #[error("distance {dist} is outside the {family:?} triangle range")]
    DomainViolation { dist: f64, family: Branch },

    #[error("centers are {distance} apart; no unit circle is tangent to both (need 0 < d <= 4)")]
    NoTangentCircle { distance: f64 },

    /// No trapped region exists for the pair of poses.
    #[error("no region: {0}")]
    NoRegion(String),

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl CensusError {
    /// Short machine-readable kind, used in structured CLI error output.
    pub fn kind(&self) -> &'static str {
        match self {
            CensusError::CenterSingular { .. } => "CenterSingular",
            CensusError::DomainViolation { .. } => "DomainViolation",
            CensusError::NoTangentCircle { .. } => "NoTangentCircle",
            CensusError::NoRegion(_) => "NoRegion",
            CensusError::NonFinite => "NonFinite",
            CensusError::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, CensusError>;
