//! The full oracle grid: every closed form in [`crate::analytics`] against
//! its independent check.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{appendix_by_quadrature, appendix_closed_forms, fy_normalization, mc_lemma1, mc_p_ek};
use crate::analytics::{lemma1_epsilon, p_ek_joint, p_ek_quadrature, p_ek_series};
use crate::model::{ModelParams, SeriesControl};
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub samples: u64,
    pub seed: u64,
    /// Monte Carlo acceptance in standard errors.
    pub sigmas: f64,
    /// Allowed `|series - quadrature|` for `P(E_k)`.
    pub series_quadrature_tol: f64,
    /// Allowed error of the appendix integrals and the `f_Y` normalization.
    pub identity_tol: f64,
    pub ctrl: SeriesControl,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 1,
            sigmas: 3.5,
            series_quadrature_tol: 1e-8,
            identity_tol: 1e-6,
            ctrl: SeriesControl::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub group: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub const LEMMA1_K: [u32; 3] = [1, 2, 5];
pub const LEMMA1_W: [f64; 3] = [0.1, 1.0, 5.0];
pub const LEMMA1_RATES: [f64; 3] = [0.5, 1.0, 2.0];
pub const FOOTPRINT_ALPHAS: [f64; 6] = [0.5, 1.0, 2.0, 5.0, 10.0, 100.0];
pub const FOOTPRINT_LAMBDAS: [f64; 3] = [1.0, 5.0, 10.0];
pub const P_EK_MC_PARAMS: [(f64, f64, f64); 4] = [
    (1.0, 1.0, 1.0),
    (1.0, 10.0, 1.0),
    (0.5, 5.0, 1.0),
    (2.0, 1.0, 1.0),
];
pub const P_EK_MC_K: [u32; 3] = [1, 2, 5];

fn fail(group: &'static str, name: String, detail: String) -> CheckOutcome {
    CheckOutcome {
        group,
        name,
        passed: false,
        detail,
    }
}

/// Runs every check and returns one outcome per check, in a fixed order.
pub fn run(opts: &SuiteOptions) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    lemma1_checks(opts, &mut out);
    p_ek_mc_checks(opts, &mut out);
    series_quadrature_checks(opts, &mut out);
    appendix_checks(opts, &mut out);
    out
}

pub fn lemma1_checks(opts: &SuiteOptions, out: &mut Vec<CheckOutcome>) {
    let mut index = 0u64;
    for &alpha in &LEMMA1_RATES {
        for &mu in &LEMMA1_RATES {
            let params = ModelParams::new(alpha, 1.0, mu);
            for &k in &LEMMA1_K {
                for &w in &LEMMA1_W {
                    index += 1;
                    let name = format!("alpha={alpha} mu={mu} k={k} w={w}");
                    let seed = derive_seed(opts.seed, index);
                    let outcome = match (
                        mc_lemma1(&params, k, w, opts.samples, seed),
                        lemma1_epsilon(&params, k, w),
                    ) {
                        (Ok(mc), Ok(exact)) => CheckOutcome {
                            group: "lemma1-mc",
                            passed: mc.brackets(exact, opts.sigmas),
                            detail: format!(
                                "mc={:.6} se={:.2e} exact={exact:.6} z={:.2}",
                                mc.estimate,
                                mc.std_error,
                                mc.z_score(exact)
                            ),
                            name,
                        },
                        (Err(e), _) | (_, Err(e)) => fail("lemma1-mc", name, format!("{e}")),
                    };
                    out.push(outcome);
                }
            }
        }
    }
}

pub fn p_ek_mc_checks(opts: &SuiteOptions, out: &mut Vec<CheckOutcome>) {
    let mut index = 1000u64;
    for &(alpha, lambda, mu) in &P_EK_MC_PARAMS {
        let params = ModelParams::new(alpha, lambda, mu);
        for &k in &P_EK_MC_K {
            index += 1;
            let name = format!("alpha={alpha} lambda={lambda} mu={mu} k={k}");
            let seed = derive_seed(opts.seed, index);
            let outcome = match (
                mc_p_ek(&params, k, opts.samples, seed),
                p_ek_joint(&params, k, &opts.ctrl),
                p_ek_series(&params, k, &opts.ctrl),
            ) {
                (Ok(mc), Ok(joint), Ok(series)) => CheckOutcome {
                    group: "p-ek-mc",
                    passed: mc.brackets(joint, opts.sigmas),
                    detail: format!(
                        "mc={:.6} se={:.2e} joint={joint:.6} z={:.2} series={series:.6}",
                        mc.estimate,
                        mc.std_error,
                        mc.z_score(joint)
                    ),
                    name,
                },
                (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
                    fail("p-ek-mc", name, format!("{e}"))
                }
            };
            out.push(outcome);
        }
    }
}

/// Largest `|series - quadrature|` over `k = 1..=20` for one parameter point.
pub fn max_series_quadrature_gap(
    params: &ModelParams,
    ctrl: &SeriesControl,
) -> crate::Result<(f64, u32)> {
    let mut worst = (0.0, 1);
    for k in 1..=20 {
        let gap = libm::fabs(p_ek_series(params, k, ctrl)? - p_ek_quadrature(params, k, ctrl)?);
        if gap > worst.0 {
            worst = (gap, k);
        }
    }
    Ok(worst)
}

pub fn series_quadrature_checks(opts: &SuiteOptions, out: &mut Vec<CheckOutcome>) {
    for &alpha in &FOOTPRINT_ALPHAS {
        for &lambda in &FOOTPRINT_LAMBDAS {
            let params = ModelParams::new(alpha, lambda, 1.0);
            let name = format!("alpha={alpha} lambda={lambda} mu=1 k=1..20");
            out.push(match max_series_quadrature_gap(&params, &opts.ctrl) {
                Ok((gap, k)) => CheckOutcome {
                    group: "series-vs-quadrature",
                    passed: gap <= opts.series_quadrature_tol,
                    detail: format!("max gap {gap:.3e} at k={k}"),
                    name,
                },
                Err(e) => fail("series-vs-quadrature", name, format!("{e}")),
            });
        }
    }
}

pub const APPENDIX_POINTS: [(f64, f64, f64, u32); 6] = [
    (1.0, 1.0, 1.0, 1),
    (1.0, 1.0, 1.0, 3),
    (0.5, 2.0, 0.1, 2),
    (2.0, 0.5, 5.0, 5),
    (3.0, 1.0, 2.0, 1),
    (0.5, 1.0, 10.0, 4),
];

pub fn appendix_checks(opts: &SuiteOptions, out: &mut Vec<CheckOutcome>) {
    for &w in &[0.1, 1.0, 10.0] {
        for &mu in &[0.5, 1.0, 2.0] {
            let name = format!("f_Y normalization mu={mu} w={w}");
            out.push(match fy_normalization(mu, w) {
                Ok(s) => CheckOutcome {
                    group: "appendix",
                    passed: libm::fabs(s - 1.0) <= opts.identity_tol,
                    detail: format!("integral {s:.12}"),
                    name,
                },
                Err(e) => fail("appendix", name, format!("{e}")),
            });
        }
    }
    for &(alpha, mu, w, k) in &APPENDIX_POINTS {
        let params = ModelParams::new(alpha, 1.0, mu);
        let name = format!("I1/I3/I4 alpha={alpha} mu={mu} w={w} k={k}");
        let res = (|| {
            let closed = appendix_closed_forms(&params, k, w)?;
            let quad = appendix_by_quadrature(&params, k, w)?;
            let eps = lemma1_epsilon(&params, k, w)?;
            Ok::<_, crate::Error>((closed, quad, eps))
        })();
        out.push(match res {
            Ok((closed, quad, eps)) => {
                let gaps = [
                    libm::fabs(closed.i1 - quad.i1),
                    libm::fabs(closed.i3 - quad.i3),
                    libm::fabs(closed.i4 - quad.i4),
                    libm::fabs(quad.total - eps),
                    libm::fabs(closed.total - eps),
                ];
                let worst = gaps.iter().copied().fold(0.0, f64::max);
                CheckOutcome {
                    group: "appendix",
                    passed: worst <= opts.identity_tol,
                    detail: format!(
                        "I1 {:.2e} I3 {:.2e} I4 {:.2e} double-integral {:.2e} closed-sum {:.2e}",
                        gaps[0], gaps[1], gaps[2], gaps[3], gaps[4]
                    ),
                    name,
                }
            }
            Err(e) => fail("appendix", name, format!("{e}")),
        });
    }
}
