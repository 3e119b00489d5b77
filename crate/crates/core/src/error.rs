use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("polynomial is not totally real: {0}")]
    NotTotallyReal(String),
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("basis is not a ring: {0}")]
    BasisNotRing(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("sign not certifiable at the requested precision (embedding {embedding})")]
    SignNotCertifiable { embedding: usize },
    #[error("lattice is not even: {0}")]
    NotEven(String),
    #[error("lattice is not an O_F-module: {0}")]
    NotOModule(String),
    #[error("not admissible: {0}")]
    NotAdmissible(String),
    #[error("point outside the domain: {0}")]
    OutsideDomain(String),
    #[error("orientation violated: {0}")]
    Orientation(String),
    #[error("series did not converge: {0}")]
    Convergence(String),
    #[error("tail bound not achievable: {0}")]
    TailBound(String),
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("word not in the group: {0}")]
    BadWord(String),
    #[error("incompatible data: {0}")]
    Incompatible(String),
    #[error("branch tracking failure: {0}")]
    Branch(String),
    #[error("fit residual {residual:.3e} above threshold {threshold:.3e}")]
    FitResidual { residual: f64, threshold: f64 },
}

impl Error {
    /// True for failures of a numerical method (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SignNotCertifiable { .. }
                | Error::Convergence(_)
                | Error::TailBound(_)
                | Error::Budget(_)
                | Error::Branch(_)
                | Error::FitResidual { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
