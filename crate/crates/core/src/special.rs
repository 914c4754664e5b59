//! Small special-function helpers: log-factorials, Poisson weights and the
//! Student-t quantile used for batch-means intervals.

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln n!`, exact summation for small `n`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 16 {
        (2..=n).map(|i| libm::log(i as f64)).sum()
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// `ln P(J = j)` for `J ~ Poisson(mean)`, `mean > 0`.
pub fn poisson_ln_pmf(j: u64, mean: f64) -> f64 {
    j as f64 * libm::log(mean) - mean - ln_factorial(j)
}

const T975: [f64; 30] = [
    12.706_204_736,
    4.302_652_730,
    3.182_446_305,
    2.776_445_105,
    2.570_581_836,
    2.446_911_851,
    2.364_624_252,
    2.306_004_135,
    2.262_157_163,
    2.228_138_852,
    2.200_985_160,
    2.178_812_830,
    2.160_368_656,
    2.144_786_688,
    2.131_449_546,
    2.119_905_299,
    2.109_815_578,
    2.100_922_040,
    2.093_024_054,
    2.085_963_447,
    2.079_613_845,
    2.073_873_068,
    2.068_657_610,
    2.063_898_562,
    2.059_538_553,
    2.055_529_439,
    2.051_830_516,
    2.048_407_142,
    2.045_229_642,
    2.042_272_456,
];

/// Two-sided 95% Student-t quantile `t_{0.975, df}`.
///
/// Tabulated for `df <= 30`; above that the Cornish-Fisher expansion around
/// the normal quantile is accurate to better than 1e-5.
pub fn student_t_975(df: usize) -> f64 {
    assert!(df >= 1, "student_t_975 needs df >= 1");
    if df <= T975.len() {
        return T975[df - 1];
    }
    let z = 1.959_963_984_540_054_f64;
    let z2 = z * z;
    let z3 = z2 * z;
    let z5 = z3 * z2;
    let z7 = z5 * z2;
    let z9 = z7 * z2;
    let nu = df as f64;
    let g1 = (z3 + z) / 4.0;
    let g2 = (5.0 * z5 + 16.0 * z3 + 3.0 * z) / 96.0;
    let g3 = (3.0 * z7 + 19.0 * z5 + 17.0 * z3 - 15.0 * z) / 384.0;
    let g4 = (79.0 * z9 + 776.0 * z7 + 1482.0 * z5 - 1920.0 * z3 - 945.0 * z) / 92160.0;
    z + g1 / nu + g2 / (nu * nu) + g3 / (nu * nu * nu) + g4 / (nu * nu * nu * nu)
}
