use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::parallel::map_indexed;
use crate::scalar::{squared_distance, Scalar};

/// Exact k nearest neighbours of every row, self excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnGraph<T> {
    pub k: usize,
    /// Row-major `n x k` neighbour indices, nearest first.
    pub indices: Vec<usize>,
    /// Matching Euclidean distances.
    pub distances: Vec<T>,
}

impl<T: Scalar> KnnGraph<T> {
    pub fn len(&self) -> usize {
        if self.k == 0 {
            0
        } else {
            self.indices.len() / self.k
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn neighbors(&self, i: usize) -> (&[usize], &[T]) {
        let r = i * self.k..(i + 1) * self.k;
        (&self.indices[r.clone()], &self.distances[r])
    }
}

/// Brute force: every pair distance is evaluated. Ties go to the smaller index.
pub fn knn_graph<T: Scalar>(data: &Matrix<T>, k: usize, workers: usize) -> Result<KnnGraph<T>> {
    let n = data.rows();
    if k == 0 || k >= n {
        return Err(Error::Argument(format!("k = {k} must be in 1..{n}")));
    }
    let rows = map_indexed(n, workers, |i| {
        let x = data.row(i);
        // sorted ascending by (distance, index)
        let mut best: Vec<(T, usize)> = Vec::with_capacity(k + 1);
        for j in 0..n {
            if j == i {
                continue;
            }
            let d = squared_distance(x, data.row(j));
            if best.len() == k && !(d < best[k - 1].0) {
                continue;
            }
            let pos = best.partition_point(|&(bd, bj)| bd < d || (bd == d && bj < j));
            best.insert(pos, (d, j));
            best.truncate(k);
        }
        best
    });
    let mut indices = Vec::with_capacity(n * k);
    let mut distances = Vec::with_capacity(n * k);
    for row in rows {
        for (d, j) in row {
            indices.push(j);
            distances.push(d.sqrt());
        }
    }
    Ok(KnnGraph { k, indices, distances })
}
