//! Principal component analysis by SVD of the centered data matrix.

use nalgebra::{DMatrix, DVector};

use super::OptimizeError;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: DVector<f64>,
    /// One orthonormal component per row, by descending variance.
    pub components: DMatrix<f64>,
    /// Covariance eigenvalues matching `components`.
    pub variances: Vec<f64>,
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.components.nrows()
    }

    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.components * (x - &self.mean)
    }
}

/// Fits `d` components. Fails with [`OptimizeError::RankDeficient`] when `d`
/// exceeds the numeric rank of the centered data; [`pca_fit_reduced`] refits
/// at the rank instead.
pub fn pca_fit(x: &DMatrix<f64>, d: usize) -> Result<PcaModel, OptimizeError> {
    let (n, p) = x.shape();
    if d > n.min(p) {
        return Err(OptimizeError::RankDeficient { requested: d, rank: n.min(p) });
    }
    let mean = DVector::from_fn(p, |j, _| x.column(j).mean());
    let mut centered = x.clone();
    for j in 0..p {
        centered.column_mut(j).add_scalar_mut(-mean[j]);
    }
    let svd = centered.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    let s_max = order.first().map_or(0.0, |&i| svd.singular_values[i]);
    let tol = n.max(p) as f64 * f64::EPSILON * s_max.max(f64::MIN_POSITIVE);
    let rank = order.iter().filter(|&&i| svd.singular_values[i] > tol).count();
    if d > rank {
        return Err(OptimizeError::RankDeficient { requested: d, rank });
    }
    let denom = (n.max(2) - 1) as f64;
    let mut components = DMatrix::zeros(d, p);
    let mut variances = Vec::with_capacity(d);
    for (row, &i) in order.iter().take(d).enumerate() {
        let mut c = v_t.row(i).clone_owned();
        let pivot = c.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        if pivot < 0.0 {
            c.neg_mut();
        }
        components.set_row(row, &c);
        variances.push(svd.singular_values[i].powi(2) / denom);
    }
    Ok(PcaModel { mean, components, variances })
}

/// [`pca_fit`] at `min(d, rank)`, logging when the dimension is reduced.
pub fn pca_fit_reduced(x: &DMatrix<f64>, d: usize) -> PcaModel {
    match pca_fit(x, d) {
        Ok(m) => m,
        Err(OptimizeError::RankDeficient { requested, rank }) => {
            log::warn!("PCA dimension reduced from {requested} to numeric rank {rank}");
            pca_fit(x, rank).expect("rank is attainable")
        }
        Err(e) => unreachable!("pca_fit only reports rank deficiency: {e}"),
    }
}
