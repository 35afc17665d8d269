use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{SomModel, TrainingMeta};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SomConfig {
    pub width: usize,
    pub height: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Threads for the best-matching-unit search. The result does not
    /// depend on this value.
    pub workers: usize,
}

impl Default for SomConfig {
    fn default() -> Self {
        Self { width: 80, height: 80, epochs: 30, seed: 0, workers: 1 }
    }
}

impl SomConfig {
    pub fn sigma_start(&self) -> f64 {
        (self.width.max(self.height) as f64 / 2.0).max(1.0)
    }

    /// Neighbourhood width of `epoch`, decaying linearly to 1.
    pub fn sigma(&self, epoch: usize) -> f64 {
        let s0 = self.sigma_start();
        if self.epochs <= 1 {
            return 1.0;
        }
        s0 + (1.0 - s0) * epoch as f64 / (self.epochs - 1) as f64
    }
}

fn gaussian_weights<T: Scalar>(len: usize, sigma: f64) -> Vec<T> {
    (0..len).map(|d| T::lit((-((d * d) as f64) / (2.0 * sigma * sigma)).exp())).collect()
}

/// Batch training: every epoch assigns all inputs to their best matching
/// unit, then replaces each weight by the neighbourhood-weighted mean of the
/// per-unit input sums. The Gaussian neighbourhood is separable over grid
/// rows and columns, which is used to smooth in two 1-D passes.
pub fn train_som<T: Scalar>(data: &Matrix<T>, cfg: &SomConfig) -> Result<SomModel<T>> {
    if data.rows() == 0 || data.cols() == 0 {
        return Err(Error::Argument("SOM training needs at least one non-empty row".into()));
    }
    if cfg.width < 2 || cfg.height < 2 {
        return Err(Error::Argument(format!("grid {}x{} is smaller than 2x2", cfg.width, cfg.height)));
    }
    if data.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("non-finite input value".into()));
    }
    let (w, h, dim) = (cfg.width, cfg.height, data.cols());
    let nodes = w * h;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut init = Matrix::zeros(nodes, dim);
    for i in 0..nodes {
        let pick = rng.gen_range(0..data.rows());
        init.row_mut(i).copy_from_slice(data.row(pick));
    }
    let mut model = SomModel::from_weights(w, h, init)?;

    let mut sums = Matrix::<T>::zeros(nodes, dim);
    let mut counts = vec![T::zero(); nodes];
    let mut pass = Matrix::<T>::zeros(nodes, dim);
    let mut pass_counts = vec![T::zero(); nodes];
    let mut num = vec![T::zero(); dim];

    for epoch in 0..cfg.epochs {
        let bmus = model.assign(data, cfg.workers)?;
        sums.as_mut_slice().iter_mut().for_each(|v| *v = T::zero());
        counts.iter_mut().for_each(|v| *v = T::zero());
        for (row, &b) in bmus.iter().enumerate() {
            counts[b] = counts[b] + T::one();
            axpy(sums.row_mut(b), data.row(row), T::one());
        }

        let sigma = cfg.sigma(epoch);
        let gx: Vec<T> = gaussian_weights(w, sigma);
        let gy: Vec<T> = gaussian_weights(h, sigma);

        // smooth along the columns of each grid row
        for r in 0..h {
            for c in 0..w {
                let target = r * w + c;
                let mut count = T::zero();
                let acc = pass.row_mut(target);
                acc.iter_mut().for_each(|v| *v = T::zero());
                for bc in 0..w {
                    let src = r * w + bc;
                    if counts[src] == T::zero() {
                        continue;
                    }
                    let g = gx[c.abs_diff(bc)];
                    count = count + g * counts[src];
                    axpy(acc, sums.row(src), g);
                }
                pass_counts[target] = count;
            }
        }
        // then along the rows of each grid column
        let weights = model.weights_mut();
        for r in 0..h {
            for c in 0..w {
                num.iter_mut().for_each(|v| *v = T::zero());
                let mut den = T::zero();
                for br in 0..h {
                    let src = br * w + c;
                    if pass_counts[src] == T::zero() {
                        continue;
                    }
                    let g = gy[r.abs_diff(br)];
                    den = den + g * pass_counts[src];
                    axpy(&mut num, pass.row(src), g);
                }
                if den > T::min_positive_value() {
                    let inv = T::one() / den;
                    for (wv, &n) in weights.row_mut(r * w + c).iter_mut().zip(&num) {
                        *wv = n * inv;
                    }
                }
            }
        }
    }

    model.meta = TrainingMeta {
        epochs: cfg.epochs,
        sigma_start: cfg.sigma_start(),
        sigma_end: cfg.sigma(cfg.epochs.saturating_sub(1)),
        seed: cfg.seed,
    };
    Ok(model)
}

#[inline]
fn axpy<T: Scalar>(dst: &mut [T], src: &[T], g: T) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = *d + g * s;
    }
}
