use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("site {site} out of range 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("parameter `{0}` must be nonzero")]
    ZeroParameter(&'static str),
    #[error("singular matrix in {0}")]
    Singular(String),
    #[error("degenerate sample: {0}")]
    Degenerate(String),
    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),
    #[error("insufficient depth: {0}")]
    Depth(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn nonzero(z: num_complex::Complex64, name: &'static str) -> Result<()> {
    if z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        Err(Error::ZeroParameter(name))
    } else {
        Ok(())
    }
}
