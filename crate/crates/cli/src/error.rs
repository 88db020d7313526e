use std::fmt;

use massey_core::brauer::BrauerError;
use massey_core::cohom::CohomError;
use massey_core::conjact::ConjError;
use massey_core::massey::MasseyError;
use massey_core::unigroup::UniError;

/// Why a command stopped before producing a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// Malformed or mathematically invalid input.
    Input(String),
    /// An explicit budget was exceeded.
    Budget(String),
    /// A consistency check inside the library failed.
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 4,
            Failure::Budget(_) => 3,
            Failure::Internal(_) => 1,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Failure::Input(msg.into())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "input error: {m}"),
            Failure::Budget(m) => write!(f, "{m}"),
            Failure::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<ConjError> for Failure {
    fn from(e: ConjError) -> Self {
        match e {
            ConjError::Budget { .. } => Failure::Budget(e.to_string()),
            ConjError::Precondition(_) | ConjError::NotInU1 => Failure::Input(e.to_string()),
            ConjError::Inconsistent(_) => Failure::Internal(e.to_string()),
        }
    }
}

impl From<UniError> for Failure {
    fn from(e: UniError) -> Self {
        match e {
            UniError::TooLarge(_) => Failure::Budget(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<CohomError> for Failure {
    fn from(e: CohomError) -> Self {
        match e {
            CohomError::Budget(_) => Failure::Budget(e.to_string()),
            CohomError::Arith(_) => Failure::Internal(e.to_string()),
            CohomError::Uni(u) => u.into(),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<MasseyError> for Failure {
    fn from(e: MasseyError) -> Self {
        if e.is_budget() {
            return Failure::Budget(e.to_string());
        }
        match e {
            MasseyError::Cohom(c) => c.into(),
            MasseyError::Uni(u) => u.into(),
            MasseyError::Inconsistent(_) | MasseyError::Arith(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<BrauerError> for Failure {
    fn from(e: BrauerError) -> Self {
        if e.is_budget() {
            return Failure::Budget(e.to_string());
        }
        match e {
            BrauerError::Conj(c) => c.into(),
            BrauerError::Cohom(c) => c.into(),
            BrauerError::Uni(u) => u.into(),
            BrauerError::Inconsistent(_) | BrauerError::Arith(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}
