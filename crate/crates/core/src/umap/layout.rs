use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::curve::fit_ab;
use super::fuzzy::FuzzyGraph;
use super::UmapConfig;
use crate::scalar::Scalar;

const GRADIENT_CLIP: f64 = 4.0;

fn clip<T: Scalar>(v: T) -> T {
    let c = T::lit(GRADIENT_CLIP);
    v.max(-c).min(c)
}

/// Stochastic gradient layout of a fuzzy graph in the plane.
///
/// Edges are sampled in proportion to their weight; each positive sample
/// pulls both endpoints together and is followed by `negative_samples`
/// repulsive moves against uniformly drawn vertices. The learning rate
/// decays linearly to zero. Single-threaded and deterministic for a seed.
pub fn layout<T: Scalar>(graph: &FuzzyGraph<T>, cfg: &UmapConfig) -> Vec<[T; 2]> {
    let n = graph.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let normal = Normal::new(0.0, cfg.init_scale).expect("positive init scale");
    let mut emb: Vec<[T; 2]> =
        (0..n).map(|_| [T::lit(normal.sample(&mut rng)), T::lit(normal.sample(&mut rng))]).collect();
    if n < 2 || graph.edges.is_empty() || cfg.epochs == 0 {
        return emb;
    }

    let (a, b) = fit_ab(cfg.spread, cfg.min_dist);
    let (a_t, b_t) = (T::lit(a), T::lit(b));

    let max_w = graph.edges.iter().fold(0.0f64, |m, e| m.max(e.2.as_f64()));
    let floor = max_w / cfg.epochs as f64;
    // both directions of every kept edge
    let mut heads = Vec::new();
    let mut tails = Vec::new();
    let mut epochs_per_sample = Vec::new();
    for &(i, j, w) in &graph.edges {
        let w = w.as_f64();
        if w < floor {
            continue;
        }
        for (h, t) in [(i, j), (j, i)] {
            heads.push(h);
            tails.push(t);
            epochs_per_sample.push(max_w / w);
        }
    }
    let neg_rate = cfg.negative_samples.max(1) as f64;
    let eps_neg: Vec<f64> = epochs_per_sample.iter().map(|e| e / neg_rate).collect();
    let mut next_sample = epochs_per_sample.clone();
    let mut next_neg = eps_neg.clone();

    let two = T::lit(2.0);
    for epoch in 0..cfg.epochs {
        let alpha = T::lit(1.0 - epoch as f64 / cfg.epochs as f64);
        let now = epoch as f64;
        for e in 0..heads.len() {
            if next_sample[e] > now {
                continue;
            }
            let (j, k) = (heads[e], tails[e]);
            let (cur, oth) = (emb[j], emb[k]);
            let d2 = (cur[0] - oth[0]).powi(2) + (cur[1] - oth[1]).powi(2);
            let coeff = if d2 > T::zero() {
                -two * a_t * b_t * d2.powf(b_t - T::one()) / (a_t * d2.powf(b_t) + T::one())
            } else {
                T::zero()
            };
            for dim in 0..2 {
                let g = clip(coeff * (cur[dim] - oth[dim])) * alpha;
                emb[j][dim] = emb[j][dim] + g;
                emb[k][dim] = emb[k][dim] - g;
            }
            next_sample[e] += epochs_per_sample[e];

            if cfg.negative_samples == 0 {
                continue;
            }
            let n_neg = ((now - next_neg[e]) / eps_neg[e]).floor().max(0.0) as usize;
            for _ in 0..n_neg {
                let k = rng.gen_range(0..n);
                if k == j {
                    continue;
                }
                let (cur, oth) = (emb[j], emb[k]);
                let d2 = (cur[0] - oth[0]).powi(2) + (cur[1] - oth[1]).powi(2);
                let coeff = if d2 > T::zero() {
                    two * b_t / ((T::lit(0.001) + d2) * (a_t * d2.powf(b_t) + T::one()))
                } else {
                    T::zero()
                };
                for dim in 0..2 {
                    let g = if coeff > T::zero() {
                        clip(coeff * (cur[dim] - oth[dim]))
                    } else {
                        T::lit(GRADIENT_CLIP)
                    };
                    emb[j][dim] = emb[j][dim] + g * alpha;
                }
            }
            next_neg[e] += n_neg as f64 * eps_neg[e];
        }
    }
    emb
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seed: u64) -> UmapConfig {
        UmapConfig { seed, ..UmapConfig::default() }
    }

    fn pair_distance(negative_samples: usize, seed: u64) -> f64 {
        let g = FuzzyGraph { n: 2, edges: vec![(0, 1, 1.0f64)], rhos: vec![], sigmas: vec![] };
        let p = layout(&g, &UmapConfig { negative_samples, ..cfg(seed) });
        ((p[0][0] - p[1][0]).powi(2) + (p[0][1] - p[1][1]).powi(2)).sqrt()
    }

    #[test]
    fn attraction_alone_collapses_an_edge() {
        for seed in 0..5 {
            let d = pair_distance(0, seed);
            assert!(d <= 0.3, "seed {seed}: distance {d}");
        }
    }

    #[test]
    fn single_edge_settles_at_force_balance() {
        // Per epoch each endpoint gets two attractive moves (one per edge
        // direction) and on average 5/2 repulsive ones (half the draws hit
        // itself). Balance: 2 a d^(2b) = 5/2.
        let (a, b) = fit_ab(1.0, 0.1);
        let balance = (1.25 / a).powf(1.0 / (2.0 * b));
        for seed in 0..5 {
            let d = pair_distance(5, seed);
            assert!((d - balance).abs() < 0.25, "seed {seed}: distance {d}, balance {balance}");
        }
    }

    #[test]
    fn no_edges_keeps_initialization() {
        let g: FuzzyGraph<f64> = FuzzyGraph { n: 4, edges: vec![], rhos: vec![], sigmas: vec![] };
        let p = layout(&g, &cfg(3));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let normal = Normal::new(0.0, 10.0).unwrap();
        for q in p {
            assert!(q[0].is_finite() && q[1].is_finite());
            assert_eq!(q[0], normal.sample(&mut rng));
            assert_eq!(q[1], normal.sample(&mut rng));
        }
    }

    #[test]
    fn deterministic_for_a_seed() {
        let g = FuzzyGraph {
            n: 5,
            edges: vec![(0, 1, 1.0f32), (1, 2, 0.5), (3, 4, 0.8), (0, 4, 0.2)],
            rhos: vec![],
            sigmas: vec![],
        };
        assert_eq!(layout(&g, &cfg(9)), layout(&g, &cfg(9)));
    }
}
