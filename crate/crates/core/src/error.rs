use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{key}` = {value}: expected {expected}")]
    InvalidParam {
        key: &'static str,
        value: f64,
        expected: String,
    },
    #[error(
        "`omega_m` + `omega_lambda` = {} must equal 1 (flat universe): omega_m = {omega_m}, omega_lambda = {omega_lambda}",
        omega_m + omega_lambda
    )]
    NotFlat { omega_m: f64, omega_lambda: f64 },
    #[error("{quantity} = {value:e} is outside the allowed domain {domain}")]
    Domain {
        quantity: &'static str,
        value: f64,
        domain: String,
    },
    #[error("ODE integration failed near z = {z:.4}: {source}")]
    Ode {
        z: f64,
        #[source]
        source: NumericsError,
    },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: impl Into<f64>, domain: impl Into<String>) -> Self {
        Error::Domain {
            quantity,
            value: value.into(),
            domain: domain.into(),
        }
    }
}
