//! Gauss-Legendre quadrature: fixed rules, composite panels and a simple
//! adaptive bisection driver.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// An `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre polynomial `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre needs at least one node");
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let nf = n as f64;
        for i in 1..=n {
            let mut x = libm::cos(PI * (i as f64 - 0.25) / (nf + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if libm::fabs(dx) <= 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]` with one application of the rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum();
        half * sum
    }

    /// Integrates over `[a, b]` split into `panels` equal pieces.
    pub fn composite<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|i| {
                let lo = a + h * i as f64;
                let hi = if i + 1 == panels { b } else { lo + h };
                self.integrate(lo, hi, &mut f)
            })
            .sum()
    }

    /// Adaptive bisection: a panel is accepted once the rule on the whole
    /// panel and on its two halves agree to within the panel's share of `tol`.
    pub fn adaptive<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        tol: f64,
        mut f: F,
    ) -> Result<f64> {
        const MAX_DEPTH: usize = 48;
        let mut total = 0.0;
        let mut stack: Vec<(f64, f64, f64, usize)> = Vec::new();
        let whole = self.integrate(a, b, &mut f);
        stack.push((a, b, whole, 0));
        let width = b - a;
        while let Some((lo, hi, coarse, depth)) = stack.pop() {
            let mid = 0.5 * (lo + hi);
            let left = self.integrate(lo, mid, &mut f);
            let right = self.integrate(mid, hi, &mut f);
            let fine = left + right;
            let share = tol * (hi - lo) / width;
            if libm::fabs(fine - coarse) <= share.max(f64::EPSILON * libm::fabs(fine)) {
                total += fine;
            } else if depth >= MAX_DEPTH {
                return Err(Error::Convergence {
                    what: "adaptive Gauss-Legendre",
                    reached: depth,
                    residual: libm::fabs(fine - coarse),
                });
            } else {
                stack.push((mid, hi, right, depth + 1));
                stack.push((lo, mid, left, depth + 1));
            }
        }
        Ok(total)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}
