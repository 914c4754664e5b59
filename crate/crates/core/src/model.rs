//! Model parameters and the truncation policy shared by the numerical routines.

use crate::error::{Error, Result};

/// The rate triple of the memoryless RCU model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Write (publication) rate.
    pub alpha: f64,
    /// Read-request arrival rate.
    pub lambda: f64,
    /// Read-service rate; the mean read time is `1 / mu`.
    pub mu: f64,
}

/// Dimensionless quantities that every series in the model is written in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// `alpha / (alpha + mu)`: probability that a write finishes before a read.
    pub q: f64,
    /// `lambda / mu`: mean number of reads in flight.
    pub rho: f64,
}

impl ModelParams {
    pub const fn new(alpha: f64, lambda: f64, mu: f64) -> Self {
        Self { alpha, lambda, mu }
    }

    /// Checks the parameter invariants and returns the derived quantities.
    pub fn derived(&self) -> Result<DerivedParams> {
        validate(self)
    }

    /// `alpha / mu`, the shift in the `j / (alpha/mu + j)` weights.
    pub fn write_read_ratio(&self) -> f64 {
        self.alpha / self.mu
    }
}

/// Validates `params` and returns `q = alpha/(alpha+mu)` and `rho = lambda/mu`.
pub fn validate(params: &ModelParams) -> Result<DerivedParams> {
    let ModelParams { alpha, lambda, mu } = *params;
    if !(alpha.is_finite() && lambda.is_finite() && mu.is_finite()) {
        return Err(Error::Domain("model rates must be finite"));
    }
    if alpha <= 0.0 {
        return Err(Error::Domain("alpha must be positive"));
    }
    if mu <= 0.0 {
        return Err(Error::Domain("mu must be positive"));
    }
    if lambda < 0.0 {
        return Err(Error::Domain("lambda must be nonnegative"));
    }
    Ok(DerivedParams {
        q: alpha / (alpha + mu),
        rho: lambda / mu,
    })
}

/// Mean number of reads still holding copy `k` once `k` newer copies exist:
/// `lambda q^k / mu`.
pub fn b_k(params: &ModelParams, k: u32) -> Result<f64> {
    if k < 1 {
        return Err(Error::Domain("k must be at least 1"));
    }
    let d = validate(params)?;
    Ok(d.rho * libm::pow(d.q, f64::from(k)))
}

/// Truncation and quadrature policy for the infinite sums and integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Absolute bound on the total discarded tail.
    pub tol: f64,
    /// Hard cap on the outer index `k`.
    pub max_k: usize,
    /// Hard cap on the inner Poisson index `j`.
    pub max_j: usize,
    /// Gauss-Legendre nodes per quadrature panel.
    pub quad_points: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_k: 10_000_000,
            max_j: 100_000,
            quad_points: 16,
        }
    }
}

impl SeriesControl {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Domain("tol must be positive and finite"));
        }
        if self.max_k < 1 || self.max_j < 1 {
            return Err(Error::Domain("series caps must be at least 1"));
        }
        if self.quad_points < 16 {
            return Err(Error::Domain("quad_points must be at least 16"));
        }
        Ok(())
    }
}
