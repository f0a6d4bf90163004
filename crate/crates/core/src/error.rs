use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("radius {r} is outside the profile domain (domain starts at {start})")]
    Domain { r: f64, start: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("limit did not converge: last rungs {last} and {previous} differ by more than {tol}")]
    LimitNotConverged { last: f64, previous: f64, tol: f64 },

    #[error("{value} is not a regular value: |f'| = {slope} at r = {r}")]
    Regularity { value: f64, r: f64, slope: f64 },

    #[error("profile is not monotone near r = {r}")]
    NonMonotone { r: f64 },

    #[error("height {h} is not below the asymptotic height {h_max}")]
    AboveMaximum { h: f64, h_max: f64 },

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("zero mass: {0}")]
    ZeroMass(String),

    #[error("profile has no minimal boundary")]
    EntireProfile,

    #[error("profile document: {0}")]
    Document(String),
}
