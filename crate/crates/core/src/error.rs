use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} out of range: {expected}")]
    Parameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("mode index {index} invalid for a {modes}-mode state")]
    ModeIndex { index: usize, modes: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is not unitary (‖U†U − I‖ = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("unphysical state: symplectic eigenvalue {value} below 1")]
    Unphysical { value: f64 },

    #[error("entropy function undefined at x = {0} (< 1)")]
    EntropyDomain(f64),

    #[error("matrix is singular or not positive definite: {0}")]
    Singular(&'static str),

    #[error("not enough samples: {found} (need at least {needed})")]
    TooFewSamples { found: usize, needed: usize },

    #[error("protocol state has no raw-key assignment")]
    NoKeyMap,

    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Checks `lo <= value <= hi`, rejecting NaN.
pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    expected: &'static str,
) -> Result<()> {
    if value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::Parameter {
            name,
            value,
            expected,
        })
    }
}
