//! Exact Gaussian-process regression with an RBF kernel, and expected
//! improvement.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::OptimizeError;

const JITTERS: [f64; 6] = [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpHyper {
    pub length_scale: f64,
    pub signal_variance: f64,
    pub noise_variance: f64,
}

impl Default for GpHyper {
    fn default() -> Self {
        GpHyper { length_scale: 1.0, signal_variance: 1.0, noise_variance: 1e-4 }
    }
}

impl GpHyper {
    pub fn kernel(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        self.signal_variance * (-(a - b).norm_squared() / (2.0 * self.length_scale.powi(2))).exp()
    }
}

#[derive(Debug, Clone)]
pub struct GpModel {
    pub hyper: GpHyper,
    /// Jitter added to the diagonal to make the Cholesky factorization succeed.
    pub jitter: f64,
    xs: Vec<DVector<f64>>,
    alpha: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
}

pub fn gp_fit(xs: &[DVector<f64>], y: &[f64], hyper: GpHyper) -> Result<GpModel, OptimizeError> {
    if xs.len() != y.len() || xs.is_empty() {
        return Err(OptimizeError::DimensionMismatch);
    }
    let n = xs.len();
    let k = DMatrix::from_fn(n, n, |i, j| hyper.kernel(&xs[i], &xs[j]));
    for jitter in JITTERS {
        let mut kn = k.clone();
        for i in 0..n {
            kn[(i, i)] += hyper.noise_variance + jitter;
        }
        if let Some(chol) = kn.cholesky() {
            let alpha = chol.solve(&DVector::from_column_slice(y));
            return Ok(GpModel { hyper, jitter, xs: xs.to_vec(), alpha, chol });
        }
    }
    Err(OptimizeError::NotPositiveDefinite)
}

impl GpModel {
    /// Posterior mean and variance (clamped at zero) at `x`.
    pub fn predict(&self, x: &DVector<f64>) -> (f64, f64) {
        let k_star = DVector::from_iterator(self.xs.len(), self.xs.iter().map(|xi| self.hyper.kernel(xi, x)));
        let mean = k_star.dot(&self.alpha);
        let v = self.chol.l().solve_lower_triangular(&k_star).expect("factor is non-singular");
        let var = self.hyper.signal_variance - v.norm_squared();
        (mean, var.max(0.0))
    }
}

/// `E[max(f - best, 0)]` for `f ~ N(mean, variance)`.
pub fn expected_improvement(mean: f64, variance: f64, best: f64) -> f64 {
    let sigma = variance.max(0.0).sqrt();
    let diff = mean - best;
    if sigma == 0.0 {
        return diff.max(0.0);
    }
    let u = diff / sigma;
    let n = Normal::standard();
    (diff * n.cdf(u) + sigma * n.pdf(u)).max(0.0)
}
