use std::collections::BTreeMap;

use super::knn::KnnGraph;
use crate::scalar::Scalar;

/// Symmetric weighted graph with locally calibrated kernel widths.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyGraph<T> {
    pub n: usize,
    /// `(i, j, weight)` with `i < j` and weight in `(0, 1]`, sorted.
    pub edges: Vec<(usize, usize, T)>,
    pub rhos: Vec<T>,
    pub sigmas: Vec<T>,
}

const BISECTION_STEPS: usize = 64;
const SIGMA_LO: f64 = 1e-8;
const SIGMA_HI: f64 = 1e8;

/// Kernel width `sigma` with `sum_j exp(-max(0, d_j - rho) / sigma) = log2(k)`,
/// found by bisection on a logarithmic scale. Clamps to the bracket when
/// no solution exists.
pub fn smooth_knn_sigma(distances: &[f64], rho: f64) -> f64 {
    let target = (distances.len() as f64).log2();
    let mass = |sigma: f64| -> f64 { distances.iter().map(|&d| (-(d - rho).max(0.0) / sigma).exp()).sum() };
    let (mut lo, mut hi) = (SIGMA_LO, SIGMA_HI);
    for _ in 0..BISECTION_STEPS {
        let mid = (lo * hi).sqrt();
        if mass(mid) > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo * hi).sqrt()
}

/// Directed memberships `exp(-max(0, d_ij - rho_i) / sigma_i)`, combined by
/// probabilistic union `a + b - a b`.
pub fn fuzzy_graph<T: Scalar>(knn: &KnnGraph<T>) -> FuzzyGraph<T> {
    let n = knn.len();
    let mut rhos = Vec::with_capacity(n);
    let mut sigmas = Vec::with_capacity(n);
    let mut pairs: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
    for i in 0..n {
        let (idx, dist) = knn.neighbors(i);
        let d: Vec<f64> = dist.iter().map(|v| v.as_f64()).collect();
        let rho = d[0];
        let sigma = smooth_knn_sigma(&d, rho);
        rhos.push(T::lit(rho));
        sigmas.push(T::lit(sigma));
        for (&j, &dj) in idx.iter().zip(&d) {
            let w = (-(dj - rho).max(0.0) / sigma).exp();
            let entry = pairs.entry((i.min(j), i.max(j))).or_insert((0.0, 0.0));
            if i < j {
                entry.0 = w;
            } else {
                entry.1 = w;
            }
        }
    }
    let edges = pairs
        .into_iter()
        .filter_map(|((i, j), (a, b))| {
            let w = a + b - a * b;
            (w > 0.0).then(|| (i, j, T::lit(w.min(1.0))))
        })
        .collect();
    FuzzyGraph { n, edges, rhos, sigmas }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::umap::knn_graph;

    #[test]
    fn sigma_for_three_neighbours() {
        // 1 + x + x^2 = log2(3) with x = exp(-1/sigma)
        let c = 3f64.log2() - 1.0;
        let x = (-1.0 + (1.0 + 4.0 * c).sqrt()) / 2.0;
        let want = -1.0 / x.ln();
        let got = smooth_knn_sigma(&[1.0, 2.0, 3.0], 1.0);
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        assert!((got - 1.133).abs() < 1e-3);
    }

    #[test]
    fn bisection_residual_is_small() {
        let d = [0.3, 0.5, 0.9, 1.4, 2.0, 2.2];
        let s = smooth_knn_sigma(&d, 0.3);
        let mass: f64 = d.iter().map(|&v| (-(v - 0.3f64).max(0.0) / s).exp()).sum();
        assert!((mass - 6f64.log2()).abs() <= 1e-5 * 6f64.log2());
    }

    #[test]
    fn union_of_half_weights() {
        let (a, b) = (0.5f64, 0.5f64);
        assert_eq!(a + b - a * b, 0.75);
    }

    #[test]
    fn nearest_neighbour_has_full_membership() {
        let m = Matrix::from_vec(5, 1, vec![0.0, 1.0, 3.0, 6.0, 10.0]).unwrap();
        let g = fuzzy_graph(&knn_graph(&m, 2, 1).unwrap());
        // 0's nearest is 1, so edge (0,1) carries weight 1
        let w01 = g.edges.iter().find(|e| (e.0, e.1) == (0, 1)).unwrap().2;
        assert_eq!(w01, 1.0);
        for &(i, j, w) in &g.edges {
            assert!(i < j && w > 0.0 && w <= 1.0);
        }
    }
}
