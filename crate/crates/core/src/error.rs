use thiserror::Error;

/// Errors raised by the conversion library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The input is valid but not handled by this operation.
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// An order-search configuration is unusable.
    #[error("config error: {0}")]
    Config(String),

    /// A witness at this operating point would consist of point masses only.
    #[error("degenerate witness: {0}")]
    DegenerateWitness(String),

    /// The randomized-response parameters do not have the assumed orientation.
    #[error("orientation error: {0}")]
    Orientation(String),
}

impl Error {
    /// The message without the category prefix.
    pub fn message(&self) -> &str {
        match self {
            Error::Domain(m)
            | Error::Unsupported(m)
            | Error::Config(m)
            | Error::DegenerateWitness(m)
            | Error::Orientation(m) => m,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &str, x: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Error::Domain(format!(
            "{name} = {x} is not a probability in [0, 1]"
        )))
    }
}
