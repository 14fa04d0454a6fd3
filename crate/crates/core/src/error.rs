use thiserror::Error;

/// Broad classification used by the command-line frontend to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Precision,
    Math,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("zero polynomial has no factorization")]
    ZeroPolynomial,

    #[error("not v-integral")]
    NotIntegral,

    #[error("not F_q-linear")]
    NotLinear,

    #[error("mixed coefficient fields")]
    MixedFields,

    #[error("height and degree are undefined for the zero element")]
    ZeroTwisted,

    #[error("twisting element must be nonzero")]
    ZeroTwist,

    #[error("height defined for good reduction only")]
    NotGoodReduction,

    #[error("inseparable torsion requested")]
    InseparableTorsion,

    #[error("unramified method inapplicable")]
    UnramifiedInapplicable,

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("insufficient ϖ-adic precision")]
    InsufficientPiPrecision,

    #[error("insufficient T-adic precision")]
    InsufficientTPrecision,

    #[error("module not torsion")]
    NotTorsion,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn parse(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            reason: reason.into(),
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } => ErrorKind::Parse,
            Error::InsufficientPrecision(_)
            | Error::InsufficientPiPrecision
            | Error::InsufficientTPrecision => ErrorKind::Precision,
            Error::Internal(_) => ErrorKind::Internal,
            _ => ErrorKind::Math,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
