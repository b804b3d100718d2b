use thiserror::Error;

/// Errors raised by the numerical routines, samplers and the CLI layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("quadrature did not converge in {context}: estimate {estimate:e}, error {error:e}")]
    NonConvergence {
        context: &'static str,
        estimate: f64,
        error: f64,
    },

    #[error("skewness {delta} is outside [-1, 1]")]
    UnsupportedSkew { delta: f64 },

    #[error("tail fit rejected: R^2 = {r_squared:.6} on the last decade")]
    TailFitFailure { r_squared: f64 },

    #[error("law is not in the normal domain of attraction: {0}")]
    InvalidLaw(String),

    #[error("requested {requested} draws exceeds the budget of {budget}")]
    BudgetExceeded { requested: u128, budget: u128 },

    #[error("the remainder function B or the CDF must be supplied")]
    MissingBData,

    #[error("test function grows faster than linearly: {0}")]
    DivergentInput(String),

    #[error("decay order gamma = {gamma} is outside [0, 2 - alpha] for alpha = {alpha}")]
    UnsupportedGamma { gamma: f64, alpha: f64 },

    #[error("sample batch is empty")]
    EmptyBatch,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }

    /// True for errors caused by bad user input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::UnsupportedSkew { .. }
                | Error::InvalidLaw(_)
                | Error::BudgetExceeded { .. }
                | Error::MissingBData
                | Error::DivergentInput(_)
                | Error::UnsupportedGamma { .. }
                | Error::EmptyBatch
                | Error::Format(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::invalid("alpha", format!("{alpha} is not in (1, 2)")));
    }
    Ok(())
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&delta) {
        return Err(Error::UnsupportedSkew { delta });
    }
    Ok(())
}

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::invalid(name, format!("{value} is not finite")));
    }
    Ok(())
}
