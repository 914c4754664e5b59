//! Independent oracles for the closed forms: the densities behind the
//! grace-period lemma, Monte Carlo estimators of the same probabilities,
//! and quadrature recomputations of the integrals in its derivation.
//!
//! The oracles never call into [`crate::analytics`]; [`suite`] runs both
//! sides and compares them.

pub mod suite;

use crate::error::{Error, Result};
use crate::model::{validate, ModelParams};
use crate::quadrature::GaussLegendre;
use crate::rng::RandomSource;
use crate::special::ln_gamma;

/// Minimum sample count accepted by the Monte Carlo oracles.
pub const MIN_SAMPLES: u64 = 10_000;

/// A Bernoulli proportion with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl McEstimate {
    fn from_hits(hits: u64, samples: u64) -> Self {
        let n = samples as f64;
        let p = hits as f64 / n;
        Self {
            estimate: p,
            std_error: libm::sqrt(p * (1.0 - p) / n),
            samples,
        }
    }

    /// Distance to `value` in standard errors. The error is floored at the
    /// binomial error implied by `value` itself, so an estimate that saw no
    /// misses (zero sample variance) is still judged fairly.
    pub fn z_score(&self, value: f64) -> f64 {
        let n = self.samples as f64;
        let implied = libm::sqrt((value * (1.0 - value)).max(0.0) / n);
        let se = self.std_error.max(implied).max(0.5 / n);
        libm::fabs(self.estimate - value) / se
    }

    pub fn brackets(&self, value: f64, sigmas: f64) -> bool {
        self.z_score(value) <= sigmas
    }
}

/// Density of `Y = U + X`, `U ~ Uniform(-w, 0)`, `X ~ Exp(mu)`.
pub fn fy_density(mu: f64, w: f64, y: f64) -> Result<f64> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::Domain("w must be positive"));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Domain("mu must be positive"));
    }
    Ok(if y < -w {
        0.0
    } else if y <= 0.0 {
        -libm::expm1(-mu * (w + y)) / w
    } else {
        (libm::exp(-mu * y) - libm::exp(-mu * (w + y))) / w
    })
}

/// Gamma(shape `k`, rate `alpha`) density: the law of the time from the
/// `k`-th most recent publication back from an arbitrary inspection time.
pub fn gamma_l_pdf(alpha: f64, k: u32, l: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain("alpha must be positive"));
    }
    if k < 1 {
        return Err(Error::Domain("k must be at least 1"));
    }
    if !(l >= 0.0) {
        return Err(Error::Domain("l must be nonnegative"));
    }
    if k == 1 {
        return Ok(alpha * libm::exp(-alpha * l));
    }
    if l == 0.0 {
        return Ok(0.0);
    }
    let kf = f64::from(k);
    Ok(libm::exp(
        libm::log(alpha) + (kf - 1.0) * libm::log(alpha * l) - alpha * l - ln_gamma(kf),
    ))
}

fn check_samples(samples: u64) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::Domain("Monte Carlo needs at least 10^4 samples"));
    }
    Ok(())
}

/// Estimates `P(U + X <= L)` with `U ~ Uniform(-w, 0)`, `X ~ Exp(mu)`,
/// `L ~ Gamma(k, alpha)`.
pub fn mc_lemma1(
    params: &ModelParams,
    k: u32,
    w: f64,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    validate(params)?;
    check_samples(samples)?;
    if k < 1 {
        return Err(Error::Domain("k must be at least 1"));
    }
    if !(w > 0.0) {
        return Err(Error::Domain("w must be positive"));
    }
    let mut rng = RandomSource::new(seed, "validation/lemma1");
    let hits = (0..samples)
        .filter(|_| {
            let u = rng.uniform_in(-w, 0.0);
            let x = rng.exponential(params.mu);
            let l = rng.gamma_int(k, params.alpha);
            u + x <= l
        })
        .count() as u64;
    Ok(McEstimate::from_hits(hits, samples))
}

/// Estimates `P(E_k)` by rebuilding the grace period of copy `k` directly:
/// draw its currency window `w`, the reads that arrive in it, their lock
/// release times, and the time `L` from its replacement to the inspection.
pub fn mc_p_ek(params: &ModelParams, k: u32, samples: u64, seed: u64) -> Result<McEstimate> {
    validate(params)?;
    check_samples(samples)?;
    if k < 1 {
        return Err(Error::Domain("k must be at least 1"));
    }
    let mut rng = RandomSource::new(seed, "validation/p-ek");
    let hits = (0..samples)
        .filter(|_| {
            let w = rng.exponential(params.alpha);
            let m = rng.poisson(params.lambda * w);
            let l = rng.gamma_int(k, params.alpha);
            (0..m).all(|_| rng.uniform_in(-w, 0.0) + rng.exponential(params.mu) <= l)
        })
        .count() as u64;
    Ok(McEstimate::from_hits(hits, samples))
}

/// Quadrature settings for the appendix integrals.
const ORACLE_NODES: usize = 20;
const ORACLE_TOL: f64 = 1e-13;

fn oracle_rule() -> GaussLegendre {
    GaussLegendre::new(ORACLE_NODES)
}

/// Upper limit beyond which the Gamma(k, alpha) mass is below about 1e-20.
fn gamma_support_end(alpha: f64, k: u32) -> f64 {
    let kf = f64::from(k);
    (kf + 60.0 + 10.0 * libm::sqrt(kf)) / alpha
}

/// `∫ f_Y` over its whole support, by quadrature.
pub fn fy_normalization(mu: f64, w: f64) -> Result<f64> {
    let gl = oracle_rule();
    let left = gl.adaptive(-w, 0.0, ORACLE_TOL, |y| {
        fy_density(mu, w, y).unwrap_or(f64::NAN)
    })?;
    let right = gl.adaptive(0.0, 60.0 / mu, ORACLE_TOL, |y| {
        fy_density(mu, w, y).unwrap_or(f64::NAN)
    })?;
    Ok(left + right)
}

/// `E[g(L)]` for `L ~ Gamma(k, alpha)`, by quadrature against [`gamma_l_pdf`].
fn expect_over_l<F: FnMut(f64) -> f64>(alpha: f64, k: u32, mut g: F) -> Result<f64> {
    oracle_rule().adaptive(0.0, gamma_support_end(alpha, k), ORACLE_TOL, |l| {
        gamma_l_pdf(alpha, k, l).unwrap_or(f64::NAN) * g(l)
    })
}

/// Closed forms of the integrals that make up `P(Y <= L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixIntegrals {
    /// Mass of `Y` on `[-w, 0]`, averaged over `L`.
    pub i1: f64,
    pub i3: f64,
    pub i4: f64,
    /// `I1 - I3 + I4`, which should equal `1 - a_w q^k`.
    pub total: f64,
}

pub fn appendix_closed_forms(params: &ModelParams, k: u32, w: f64) -> Result<AppendixIntegrals> {
    let d = validate(params)?;
    let x = params.mu * w;
    let i1 = 1.0 + libm::expm1(-x) / x;
    let qk1 = libm::pow(d.q, f64::from(k)) - 1.0;
    let i3 = qk1 / x;
    let i4 = libm::exp(-x) * qk1 / x;
    Ok(AppendixIntegrals {
        i1,
        i3,
        i4,
        total: i1 - i3 + i4,
    })
}

/// The same integrals recomputed by quadrature of `f_Y` and `f_L`.
/// `total` is the double integral `∫ f_L(l) ∫_{-w}^{l} f_Y(y) dy dl`.
pub fn appendix_by_quadrature(params: &ModelParams, k: u32, w: f64) -> Result<AppendixIntegrals> {
    validate(params)?;
    if k < 1 || !(w > 0.0) {
        return Err(Error::Domain("need k >= 1 and w > 0"));
    }
    let (alpha, mu) = (params.alpha, params.mu);
    let gl = oracle_rule();
    let fy = |y: f64| fy_density(mu, w, y).unwrap_or(f64::NAN);
    let y_mass_left = gl.adaptive(-w, 0.0, ORACLE_TOL, fy)?;
    let l_mass = expect_over_l(alpha, k, |_| 1.0)?;
    let i1 = l_mass * y_mass_left;
    let scale = 1.0 / (mu * w);
    let i3 = scale * expect_over_l(alpha, k, |l| libm::expm1(-mu * l))?;
    let i4 = scale * expect_over_l(alpha, k, |l| libm::exp(-mu * (w + l)) - libm::exp(-mu * w))?;
    let mut inner_err = None;
    let total = expect_over_l(alpha, k, |l| {
        let right = if l > 0.0 {
            gl.adaptive(0.0, l, 1e-14, fy).unwrap_or_else(|e| {
                inner_err = Some(e);
                f64::NAN
            })
        } else {
            0.0
        };
        y_mass_left + right
    })?;
    if let Some(e) = inner_err {
        return Err(e);
    }
    Ok(AppendixIntegrals { i1, i3, i4, total })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fy_examples() {
        assert_eq!(fy_density(1.0, 1.0, -2.0).unwrap(), 0.0);
        let at0 = fy_density(1.0, 1.0, 0.0).unwrap();
        assert!((at0 - 0.632_120_558_828_557_7).abs() < 1e-15);
        // right branch agrees at 0
        let right = (1.0 - (-1.0f64).exp()) / 1.0;
        assert!((at0 - right).abs() < 1e-15);
        let eps = 1e-9;
        let l = fy_density(1.0, 1.0, -eps).unwrap();
        let r = fy_density(1.0, 1.0, eps).unwrap();
        assert!((l - r).abs() < 1e-8);
        assert!(fy_density(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn fy_normalizes() {
        for w in [0.1, 1.0, 10.0] {
            for mu in [0.5, 1.0, 2.0] {
                let s = fy_normalization(mu, w).unwrap();
                assert!((s - 1.0).abs() < 1e-6, "mu={mu} w={w}: {s}");
            }
        }
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_l_pdf(1.0, 1, 0.0).unwrap(), 1.0);
        assert!((gamma_l_pdf(2.0, 1, 1.0).unwrap() - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!((gamma_l_pdf(2.0, 1, 1.0).unwrap() - 0.270_671).abs() < 1e-6);
        assert_eq!(gamma_l_pdf(1.0, 3, 0.0).unwrap(), 0.0);
        // k=3: l^2 e^-l / 2
        assert!((gamma_l_pdf(1.0, 3, 2.0).unwrap() - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!(gamma_l_pdf(1.0, 0, 1.0).is_err());
        assert!(gamma_l_pdf(1.0, 2, -1.0).is_err());
    }

    #[test]
    fn monte_carlo_rejects_small_samples() {
        let p = ModelParams::new(1.0, 1.0, 1.0);
        assert!(mc_lemma1(&p, 1, 1.0, 100, 1).is_err());
        assert!(mc_p_ek(&p, 1, 9_999, 1).is_err());
    }

    #[test]
    fn no_readers_always_ends() {
        let e = mc_p_ek(&ModelParams::new(1.0, 0.0, 1.0), 1, 10_000, 4).unwrap();
        assert_eq!(e.estimate, 1.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn estimate_invariants() {
        let e = mc_lemma1(&ModelParams::new(1.0, 1.0, 1.0), 1, 0.001, 20_000, 2).unwrap();
        assert!((0.0..=1.0).contains(&e.estimate));
        assert!(e.std_error <= 0.5 / (e.samples as f64).sqrt());
        assert!(e.brackets(0.5, 3.5));
    }
}
