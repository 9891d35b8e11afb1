use thiserror::Error;

/// Errors raised by the geometry, packing and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("axis is degenerate (length {0:e})")]
    DegenerateAxis(f64),
    #[error("point is {0:e} away from the axis")]
    OffAxis(f64),
    #[error("radius function returned a non-finite value at theta = {0}")]
    NonFinite(f64),
    #[error("container of radius {radius} is too small for {what}")]
    ContainerTooSmall { radius: f64, what: String },
    #[error("sector of {angle} rad exceeds alpha0 = {alpha0} rad")]
    AngleExceedsAlpha0 { angle: f64, alpha0: f64 },
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid packing file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
