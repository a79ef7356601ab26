use thiserror::Error;

use crate::series::SeriesResult;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The mean-energy constraint cannot be met: the requested
    /// `lambda_eff²` is below the ground-level coefficient.
    #[error("infeasible constraint: lambda_eff^2 = {lambda_sq} is below the ground level coefficient {ground}")]
    Infeasible { lambda_sq: f64, ground: f64 },

    /// A series needed more terms than the hard cap allows.
    #[error("precision error: series truncation needs more than {cap} terms (partial value {}, tail bound {})", partial.value, partial.tail_bound)]
    Precision { cap: usize, partial: SeriesResult },

    /// The bracketed root search stopped without meeting the residual tolerance.
    #[error("no convergence after {iterations} iterations: alpha = {alpha}, residual = {residual:e} (tolerance {tol:e})")]
    NoConvergence {
        iterations: usize,
        alpha: f64,
        residual: f64,
        tol: f64,
    },

    /// A cycle definition violates its ordering or feasibility constraints.
    #[error("invalid cycle: {0}")]
    InvalidCycle(String),

    /// A failure while sampling one stroke of a cycle.
    #[error("{stroke} stroke at V = {width}: {source}")]
    Stroke {
        stroke: &'static str,
        width: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {value}")))
    }
}
