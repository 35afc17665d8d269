use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::parallel::map_indexed;
use crate::scalar::{squared_distance, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TrainingMeta {
    pub epochs: usize,
    pub sigma_start: f64,
    pub sigma_end: f64,
    pub seed: u64,
}

/// A rectangular grid of prototype vectors. Node `i` sits at row
/// `i / width`, column `i % width`.
#[derive(Debug, Clone, PartialEq)]
pub struct SomModel<T> {
    width: usize,
    height: usize,
    weights: Matrix<T>,
    pub meta: TrainingMeta,
}

impl<T: Scalar> SomModel<T> {
    pub fn from_weights(width: usize, height: usize, weights: Matrix<T>) -> Result<Self> {
        if width * height != weights.rows() || width == 0 || height == 0 {
            return Err(Error::Argument(format!(
                "{} weights for a {width}x{height} grid",
                weights.rows()
            )));
        }
        if weights.as_slice().iter().any(|w| !w.is_finite()) {
            return Err(Error::Argument("non-finite weight".into()));
        }
        Ok(Self { width, height, weights, meta: TrainingMeta::default() })
    }

    /// Untrained map with weights drawn uniformly inside the per-dimension
    /// bounding box of `data`.
    pub fn random(data: &Matrix<T>, width: usize, height: usize, seed: u64) -> Result<Self> {
        if data.rows() == 0 {
            return Err(Error::Argument("no input rows".into()));
        }
        let dim = data.cols();
        let mut lo = vec![T::infinity(); dim];
        let mut hi = vec![T::neg_infinity(); dim];
        for row in data.iter_rows() {
            for (k, &v) in row.iter().enumerate() {
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = Matrix::zeros(width * height, dim);
        for i in 0..width * height {
            for (k, v) in w.row_mut(i).iter_mut().enumerate() {
                let u: f64 = rng.gen();
                *v = lo[k] + (hi[k] - lo[k]) * T::lit(u);
            }
        }
        Self::from_weights(width, height, w)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn node_count(&self) -> usize {
        self.width * self.height
    }

    pub fn weights(&self) -> &Matrix<T> {
        &self.weights
    }

    pub(crate) fn weights_mut(&mut self) -> &mut Matrix<T> {
        &mut self.weights
    }

    pub fn weight(&self, node: usize) -> &[T] {
        self.weights.row(node)
    }

    /// `(row, column)` of a node.
    pub fn coords(&self, node: usize) -> (usize, usize) {
        (node / self.width, node % self.width)
    }

    pub fn node(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    /// Whether two nodes touch in the 8-neighbourhood.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        let (ra, ca) = self.coords(a);
        let (rb, cb) = self.coords(b);
        a != b && ra.abs_diff(rb) <= 1 && ca.abs_diff(cb) <= 1
    }

    /// Node with the smallest Euclidean distance to `x`; the smallest index
    /// wins ties. Returns the node and its squared distance.
    pub fn best_matching_unit(&self, x: &[T]) -> (usize, T) {
        debug_assert_eq!(x.len(), self.dim());
        let mut best = (0, T::infinity());
        for i in 0..self.node_count() {
            let d = squared_distance(x, self.weights.row(i));
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Best and second-best nodes.
    pub fn two_best(&self, x: &[T]) -> (usize, usize) {
        let mut first = (usize::MAX, T::infinity());
        let mut second = (usize::MAX, T::infinity());
        for i in 0..self.node_count() {
            let d = squared_distance(x, self.weights.row(i));
            if d < first.1 {
                second = first;
                first = (i, d);
            } else if d < second.1 {
                second = (i, d);
            }
        }
        (first.0, second.0)
    }

    pub fn check_dim(&self, data: &Matrix<T>) -> Result<()> {
        if data.cols() != self.dim() {
            return Err(Error::Argument(format!(
                "input dimension {} does not match map dimension {}",
                data.cols(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Best matching unit of every row.
    pub fn assign(&self, data: &Matrix<T>, workers: usize) -> Result<Vec<usize>> {
        self.check_dim(data)?;
        Ok(map_indexed(data.rows(), workers, |i| self.best_matching_unit(data.row(i)).0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SomQuality {
    /// Mean distance from each input to its best matching unit.
    pub quantization_error: f64,
    /// Fraction of inputs whose two best units are not grid neighbours.
    pub topographic_error: f64,
}

pub fn som_quality<T: Scalar>(model: &SomModel<T>, data: &Matrix<T>, workers: usize) -> Result<SomQuality> {
    model.check_dim(data)?;
    if data.rows() == 0 {
        return Err(Error::Argument("no input rows".into()));
    }
    let per_row = map_indexed(data.rows(), workers, |i| {
        let x = data.row(i);
        let (first, second) = model.two_best(x);
        let qe = squared_distance(x, model.weight(first)).as_f64().sqrt();
        let broken = second == usize::MAX || !model.adjacent(first, second);
        (qe, broken)
    });
    let n = per_row.len() as f64;
    Ok(SomQuality {
        quantization_error: per_row.iter().map(|r| r.0).sum::<f64>() / n,
        topographic_error: per_row.iter().filter(|r| r.1).count() as f64 / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node() -> SomModel<f64> {
        // a 2x1 grid is too small to train but fine for lookup tests
        SomModel::from_weights(2, 1, Matrix::from_vec(2, 2, vec![0.0, 0.0, 1.0, 0.0]).unwrap()).unwrap()
    }

    #[test]
    fn bmu_picks_nearest() {
        let m = two_node();
        assert_eq!(m.best_matching_unit(&[0.9, 0.0]).0, 1);
        assert_eq!(m.coords(1), (0, 1));
        assert_eq!(m.best_matching_unit(&[1.0, 0.0]), (1, 0.0));
    }

    #[test]
    fn bmu_tie_goes_to_smaller_index() {
        assert_eq!(two_node().best_matching_unit(&[0.5, 0.0]).0, 0);
        assert_eq!(two_node().best_matching_unit(&[0.5, 3.0]).0, 0);
    }

    #[test]
    fn quality_of_inputs_equal_to_weights() {
        let w = Matrix::from_vec(4, 1, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let m = SomModel::from_weights(2, 2, w.clone()).unwrap();
        let q = som_quality(&m, &w, 1).unwrap();
        assert_eq!(q.quantization_error, 0.0);
        // second-best of every node is a grid neighbour on a 2x2 grid
        assert_eq!(q.topographic_error, 0.0);
    }

    #[test]
    fn single_input_topographic_error_is_binary() {
        let w = Matrix::from_vec(9, 1, (0..9).map(f64::from).collect()).unwrap();
        let m = SomModel::from_weights(3, 3, w).unwrap();
        // nearest 0 (0,0), second 1 (0,1): adjacent
        let q = som_quality(&m, &Matrix::from_vec(1, 1, vec![0.2]).unwrap(), 1).unwrap();
        assert_eq!(q.topographic_error, 0.0);
        // nearest 2 (0,2), second 3 (1,0): not adjacent
        let q = som_quality(&m, &Matrix::from_vec(1, 1, vec![2.4]).unwrap(), 1).unwrap();
        assert_eq!(q.topographic_error, 1.0);
    }

    #[test]
    fn adjacency_is_eight_neighbourhood() {
        let m = SomModel::from_weights(3, 3, Matrix::<f64>::zeros(9, 1)).unwrap();
        assert!(m.adjacent(0, 4));
        assert!(m.adjacent(4, 8));
        assert!(!m.adjacent(0, 2));
        assert!(!m.adjacent(4, 4));
    }
}
