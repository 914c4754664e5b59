//! Closed-form footprint and age of the memoryless RCU model.
//!
//! Copy `k` (the copy published `k` writes before the current one) is still
//! in its grace period with probability
//!
//! ```text
//! P(E_k^c) = E[ J / (alpha/mu + J) ],   J ~ Poisson(b_k),   b_k = lambda q^k / mu
//! ```
//!
//! and `E[N] = 1 + sum_k P(E_k^c)`. Jensen's inequality on the concave map
//! `x -> x / (alpha/mu + x)` gives the bound `1 + sum_k q^k / (q^k + alpha/lambda)`,
//! which in turn is at most `1 + lambda/mu`.

use crate::error::{Error, Result};
use crate::model::{b_k, validate, ModelParams, SeriesControl};
use crate::quadrature::GaussLegendre;
use crate::special::{ln_gamma, poisson_ln_pmf};

/// `E[N]` together with both upper bounds and the truncation bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootprintReport {
    pub en_exact: f64,
    pub en_bound_jensen: f64,
    pub en_bound_simple: f64,
    /// Number of outer terms `k` summed.
    pub terms_used_k: usize,
    /// Rigorous upper bound on everything discarded from `en_exact`.
    pub truncation_bound: f64,
}

/// `(1 - e^{-mu w}) / (mu w)`, with the limit 1 at `w = 0`.
pub fn a_w(mu: f64, w: f64) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Domain("mu must be positive and finite"));
    }
    if !(w >= 0.0) {
        return Err(Error::Domain("w must be nonnegative"));
    }
    let x = mu * w;
    if x == 0.0 {
        return Ok(1.0);
    }
    Ok(-libm::expm1(-x) / x)
}

/// Probability `1 - a_w q^k` that a read arriving uniformly in a length-`w`
/// currency window has released copy `k` by the inspection time.
pub fn lemma1_epsilon(params: &ModelParams, k: u32, w: f64) -> Result<f64> {
    let d = validate(params)?;
    if k < 1 {
        return Err(Error::Domain("k must be at least 1"));
    }
    if !(w > 0.0) {
        return Err(Error::Domain("w must be positive"));
    }
    Ok(1.0 - a_w(params.mu, w)? * libm::pow(d.q, f64::from(k)))
}

/// `P(E_k | W = w) = exp(-b_k (1 - e^{-mu w}))`.
pub fn p_ek_given_w(params: &ModelParams, k: u32, w: f64) -> Result<f64> {
    let b = b_k(params, k)?;
    if !(w >= 0.0) {
        return Err(Error::Domain("w must be nonnegative"));
    }
    Ok(libm::exp(b * libm::expm1(-params.mu * w)))
}

/// Truncated `sum_j Poisson(b; j) j / (c + j)` and a bound on what was dropped.
#[derive(Debug, Clone, Copy)]
struct ComplementSum {
    value: f64,
    tail_bound: f64,
}

/// Each summand is at most the Poisson pmf, so the remaining Poisson mass
/// bounds the discarded tail. Past the mode the pmf ratios are below
/// `b / (j + 2)`, giving a geometric majorant.
fn complement_series(b: f64, c: f64, tol: f64, max_j: usize) -> Result<ComplementSum> {
    if b == 0.0 {
        return Ok(ComplementSum {
            value: 0.0,
            tail_bound: 0.0,
        });
    }
    let mut value = 0.0;
    let mut last_bound = f64::INFINITY;
    for j in 1..=max_j as u64 {
        let jf = j as f64;
        value += libm::exp(poisson_ln_pmf(j, b)) * jf / (c + jf);
        let ratio = b / (jf + 2.0);
        if ratio < 1.0 {
            let next = libm::exp(poisson_ln_pmf(j + 1, b));
            last_bound = next / (1.0 - ratio);
            if last_bound < tol {
                return Ok(ComplementSum {
                    value,
                    tail_bound: last_bound,
                });
            }
        }
    }
    Err(Error::Convergence {
        what: "Poisson-weighted series in j",
        reached: max_j,
        residual: last_bound,
    })
}

/// `P(E_k)` by the Poisson-weighted series.
pub fn p_ek_series(params: &ModelParams, k: u32, ctrl: &SeriesControl) -> Result<f64> {
    Ok(1.0 - p_ek_complement_series(params, k, ctrl)?)
}

/// `P(E_k^c) = 1 - P(E_k)` by the series, without the cancellation of `1 - P(E_k)`.
pub fn p_ek_complement_series(params: &ModelParams, k: u32, ctrl: &SeriesControl) -> Result<f64> {
    ctrl.check()?;
    let b = b_k(params, k)?;
    Ok(complement_series(b, params.write_read_ratio(), ctrl.tol, ctrl.max_j)?.value)
}

/// Number of dyadic panels toward `y = 0`; the innermost one, `[0, 2^-60]`,
/// carries at most `2^-60` of the mass.
const GRADED_LEVELS: i32 = 60;
const MAX_REFINEMENTS: u32 = 14;
const QUAD_TARGET: f64 = 1e-11;
const QUAD_ACCEPT: f64 = 1e-9;

/// `P(E_k)` by quadrature of `alpha ∫ exp(-b_k (1 - e^{-mu w})) e^{-alpha w} dw`.
///
/// After `y = e^{-mu w}` this is `c e^{-b} ∫_0^1 y^{c-1} e^{b y} dy` with
/// `c = alpha/mu`. For `c < 1` the further substitution `y = u^{1/c}` removes
/// the endpoint singularity and leaves `∫_0^1 exp(b (u^{1/c} - 1)) du`.
/// Panels are graded geometrically toward 0 and every panel is split in two
/// until successive estimates agree.
pub fn p_ek_quadrature(params: &ModelParams, k: u32, ctrl: &SeriesControl) -> Result<f64> {
    ctrl.check()?;
    let b = b_k(params, k)?;
    let c = params.write_read_ratio();
    let gl = GaussLegendre::new(ctrl.quad_points);
    graded_unit_integral(&gl, "graded Gauss-Legendre for P(E_k)", |y| {
        if c < 1.0 {
            libm::exp(b * (libm::pow(y, 1.0 / c) - 1.0))
        } else {
            c * libm::pow(y, c - 1.0) * libm::exp(b * (y - 1.0))
        }
    })
}

/// `∫_0^1 f` on panels graded geometrically toward 0, every panel split in
/// two per round until two rounds agree.
fn graded_unit_integral<F: FnMut(f64) -> f64>(
    gl: &GaussLegendre,
    what: &'static str,
    mut f: F,
) -> Result<f64> {
    let mut estimate = |splits: usize| -> f64 {
        let mut total = gl.composite(0.0, libm::exp2(-f64::from(GRADED_LEVELS)), splits, &mut f);
        for level in (0..GRADED_LEVELS).rev() {
            let lo = libm::exp2(-f64::from(level + 1));
            let hi = libm::exp2(-f64::from(level));
            total += gl.composite(lo, hi, splits, &mut f);
        }
        total
    };
    let mut previous = estimate(1);
    let mut diff = f64::INFINITY;
    for refinement in 1..=MAX_REFINEMENTS {
        let current = estimate(1 << refinement);
        diff = libm::fabs(current - previous);
        if diff <= QUAD_TARGET {
            return Ok(current);
        }
        previous = current;
    }
    if diff <= QUAD_ACCEPT {
        return Ok(previous);
    }
    Err(Error::Convergence {
        what,
        reached: 1 << MAX_REFINEMENTS,
        residual: diff,
    })
}

/// `h(s) / s` with `h(s) = E_W[1 - exp(-s (1 - e^{-mu W}))]`, `W ~ Exp(alpha)`.
///
/// `h(s)` is the probability that a copy is still held when its readers
/// would leave `s` expected locks behind, averaged over its currency window.
/// Dividing by `s` keeps the relative accuracy as `s -> 0`.
fn held_per_unit_load(gl: &GaussLegendre, c: f64, s: f64) -> Result<f64> {
    let per_load = |x: f64| {
        if s == 0.0 {
            x
        } else {
            -libm::expm1(-s * x) / s
        }
    };
    // u = e^{-alpha W}: the integrand stays bounded for every c, and the
    // graded panels absorb the logarithmic kink of u^{1/c} at 0 when c > 1
    graded_unit_integral(gl, "currency-window average", |u| {
        per_load(-libm::expm1(libm::log(u) / c))
    })
}

/// `P(E_k)` with the reads on copy `k` judged against one common horizon.
///
/// All reads that locked copy `k` must finish within the same elapsed time
/// `L ~ Gamma(k, alpha)` since its replacement. Averaging over `L` after
/// raising the per-read probability to the `m`-th power (as
/// [`p_ek_series`] does) treats the reads as independent and overstates
/// the chance that copy `k` is still held. Here `L` stays inside the
/// expectation:
///
/// ```text
/// P(E_k) = E_L[ E_W[ exp(-rho e^{-mu L} (1 - e^{-mu W})) ] ]
/// ```
pub fn p_ek_joint(params: &ModelParams, k: u32, ctrl: &SeriesControl) -> Result<f64> {
    ctrl.check()?;
    let d = validate(params)?;
    if k < 1 {
        return Err(Error::Domain("k must be at least 1"));
    }
    if params.lambda == 0.0 {
        return Ok(1.0);
    }
    let c = params.write_read_ratio();
    let gl = GaussLegendre::new(ctrl.quad_points);
    let kf = f64::from(k);
    let alpha = params.alpha;
    let ln_norm = libm::log(alpha) - ln_gamma(kf);
    let end = (kf + 60.0 + 10.0 * libm::sqrt(kf)) / alpha;
    let mut failure = None;
    let held = gl.adaptive(0.0, end, 1e-12, |l| {
        let density = if k == 1 {
            alpha * libm::exp(-alpha * l)
        } else if l == 0.0 {
            0.0
        } else {
            libm::exp(ln_norm + (kf - 1.0) * libm::log(alpha * l) - alpha * l)
        };
        let load = d.rho * libm::exp(-params.mu * l);
        match held_per_unit_load(&gl, c, load) {
            Ok(h) => density * load * h,
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(1.0 - held?)
}

/// `E[N]` with the shared-horizon correction of [`p_ek_joint`], summed over
/// all `k` at once.
///
/// The Gamma(k, alpha) densities of the replacement-to-inspection times add
/// up to the renewal density `alpha`, so with `z = e^{-mu l}`
///
/// ```text
/// E[N] = 1 + (alpha/mu) ∫_0^1 h(rho z) / z dz,   h(s) = E_W[1 - exp(-s (1 - e^{-mu W}))]
/// ```
///
/// There is no truncation in `k`; the only error is the quadrature's.
pub fn en_renewal(params: &ModelParams, ctrl: &SeriesControl) -> Result<f64> {
    ctrl.check()?;
    let d = validate(params)?;
    if params.lambda == 0.0 {
        return Ok(1.0);
    }
    let c = params.write_read_ratio();
    let gl = GaussLegendre::new(ctrl.quad_points);
    let mut failure = None;
    let area = graded_unit_integral(
        &gl,
        "renewal integral for E[N]",
        |z| match held_per_unit_load(&gl, c, d.rho * z) {
            Ok(h) => d.rho * h,
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        },
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(1.0 + c * area?)
}

/// Smallest `K >= 1` whose geometric tail `rho q^K` is below `tail_tol`.
fn outer_terms(rho: f64, q: f64, tail_tol: f64, max_k: usize) -> Result<usize> {
    if rho < tail_tol {
        return Ok(1);
    }
    let k = libm::ceil(libm::log(tail_tol / rho) / libm::log(q)).max(1.0);
    // guard against log rounding landing one short
    let mut k = k as usize;
    while rho * libm::pow(q, k as f64) >= tail_tol {
        k += 1;
    }
    if k > max_k {
        return Err(Error::Convergence {
            what: "outer series in k",
            reached: max_k,
            residual: rho * libm::pow(q, max_k as f64),
        });
    }
    Ok(k)
}

/// Exact `E[N] = 1 + sum_k P(E_k^c)`, truncated with a rigorous tail bound.
///
/// Every `P(E_k^c)` is at most `(lambda/alpha) q^k`, so dropping `k > K`
/// costs at most `rho q^K`. Half of `ctrl.tol` goes to that tail and the
/// other half is spread over the `K` inner sums.
pub fn en_exact(params: &ModelParams, ctrl: &SeriesControl) -> Result<FootprintReport> {
    ctrl.check()?;
    let d = validate(params)?;
    let simple = 1.0 + d.rho;
    if params.lambda == 0.0 {
        return Ok(FootprintReport {
            en_exact: 1.0,
            en_bound_jensen: 1.0,
            en_bound_simple: simple,
            terms_used_k: 0,
            truncation_bound: 0.0,
        });
    }
    let terms = outer_terms(d.rho, d.q, 0.5 * ctrl.tol, ctrl.max_k)?;
    let inner_tol = 0.5 * ctrl.tol / terms as f64;
    let c = params.write_read_ratio();
    let ratio = params.alpha / params.lambda;
    let mut exact = 1.0;
    let mut jensen = 1.0;
    let mut dropped = d.rho * libm::pow(d.q, terms as f64);
    let mut qk = 1.0;
    for _ in 0..terms {
        qk *= d.q;
        let b = d.rho * qk;
        let part = complement_series(b, c, inner_tol, ctrl.max_j)?;
        exact += part.value;
        dropped += part.tail_bound;
        jensen += qk / (qk + ratio);
    }
    Ok(FootprintReport {
        en_exact: exact,
        en_bound_jensen: jensen,
        en_bound_simple: simple,
        terms_used_k: terms,
        truncation_bound: dropped,
    })
}

/// `1 + sum_k q^k / (q^k + alpha/lambda)`, truncated like [`en_exact`].
pub fn en_bound_jensen(params: &ModelParams, ctrl: &SeriesControl) -> Result<f64> {
    ctrl.check()?;
    let d = validate(params)?;
    if params.lambda == 0.0 {
        return Ok(1.0);
    }
    let terms = outer_terms(d.rho, d.q, ctrl.tol, ctrl.max_k)?;
    let ratio = params.alpha / params.lambda;
    let mut qk = 1.0;
    let mut sum = 1.0;
    for _ in 0..terms {
        qk *= d.q;
        sum += qk / (qk + ratio);
    }
    Ok(sum)
}

/// `1 + lambda/mu`.
pub fn en_bound_simple(params: &ModelParams) -> Result<f64> {
    Ok(1.0 + validate(params)?.rho)
}

/// Time-average age of the current copy, `2/alpha`.
pub fn avg_age(params: &ModelParams) -> Result<f64> {
    validate(params)?;
    Ok(2.0 / params.alpha)
}
