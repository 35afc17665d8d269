//! Fit of the low-dimensional affinity curve `1 / (1 + a d^(2b))`.

/// Low-dimensional affinity at distance `d`.
pub fn affinity(d: f64, a: f64, b: f64) -> f64 {
    1.0 / (1.0 + a * d.powf(2.0 * b))
}

fn target(x: f64, spread: f64, min_dist: f64) -> f64 {
    if x < min_dist {
        1.0
    } else {
        (-(x - min_dist) / spread).exp()
    }
}

fn samples(spread: f64) -> impl Iterator<Item = f64> {
    let n = 300;
    (0..n).map(move |i| 3.0 * spread * i as f64 / (n - 1) as f64)
}

/// Sum of squared residuals of the curve against the piecewise target.
pub fn fit_residual(a: f64, b: f64, spread: f64, min_dist: f64) -> f64 {
    samples(spread).map(|x| (affinity(x, a, b) - target(x, spread, min_dist)).powi(2)).sum()
}

/// Least-squares `(a, b)` by Levenberg-Marquardt over 300 samples on `[0, 3 spread]`.
pub fn fit_ab(spread: f64, min_dist: f64) -> (f64, f64) {
    let xs: Vec<f64> = samples(spread).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| target(x, spread, min_dist)).collect();
    let (mut a, mut b) = (1.0f64, 1.0f64);
    let mut lambda = 1e-3;
    let mut cost = fit_residual(a, b, spread, min_dist);
    for _ in 0..500 {
        // normal equations J^T J and J^T r
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&x, &y) in xs.iter().zip(&ys) {
            if x <= 0.0 {
                continue;
            }
            let p = x.powf(2.0 * b);
            let denom = 1.0 + a * p;
            let f = 1.0 / denom;
            let r = f - y;
            let da = -p / (denom * denom);
            let db = -a * p * 2.0 * x.ln() / (denom * denom);
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }
        let (maa, mbb) = (jaa * (1.0 + lambda), jbb * (1.0 + lambda));
        let det = maa * mbb - jab * jab;
        if det.abs() < 1e-300 {
            break;
        }
        let step_a = -(mbb * ga - jab * gb) / det;
        let step_b = -(maa * gb - jab * ga) / det;
        let (na, nb) = (a + step_a, b + step_b);
        if na > 0.0 && nb > 0.0 {
            let new_cost = fit_residual(na, nb, spread, min_dist);
            if new_cost < cost {
                let done = (cost - new_cost) < 1e-15 * cost.max(1e-300);
                a = na;
                b = nb;
                cost = new_cost;
                lambda = (lambda * 0.3).max(1e-12);
                if done {
                    break;
                }
                continue;
            }
        }
        lambda *= 10.0;
        if lambda > 1e12 {
            break;
        }
    }
    (a, b)
}
