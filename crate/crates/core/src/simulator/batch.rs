//! Non-overlapping batch means over equal-duration batches.

use alloc::vec;
use alloc::vec::Vec;

use crate::special::student_t_975;

/// Per-batch time integrals of one observable.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchIntegrals {
    batch_len: f64,
    sums: Vec<f64>,
}

impl BatchIntegrals {
    pub fn new(batches: usize, batch_len: f64) -> Self {
        Self {
            batch_len,
            sums: vec![0.0; batches],
        }
    }

    pub fn add(&mut self, batch: usize, area: f64) {
        self.sums[batch] += area;
    }

    /// Grand time average and the 95% Student-t half-width of the batch means.
    pub fn mean_and_half_width(&self) -> (f64, f64) {
        let b = self.sums.len();
        let means: Vec<f64> = self.sums.iter().map(|s| s / self.batch_len).collect();
        let mean = means.iter().sum::<f64>() / b as f64;
        if b < 2 {
            return (mean, 0.0);
        }
        let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (b - 1) as f64;
        (mean, student_t_975(b - 1) * libm::sqrt(var / b as f64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_batches_have_zero_width() {
        let mut b = BatchIntegrals::new(10, 2.0);
        for i in 0..10 {
            b.add(i, 6.0);
        }
        assert_eq!(b.mean_and_half_width(), (3.0, 0.0));
    }

    #[test]
    fn half_width_formula() {
        let mut b = BatchIntegrals::new(4, 1.0);
        for (i, v) in [1.0, 2.0, 3.0, 4.0].into_iter().enumerate() {
            b.add(i, v);
        }
        let (m, h) = b.mean_and_half_width();
        assert_eq!(m, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((h - 3.182_446_305 * sd / 2.0).abs() < 1e-12);
    }
}
