//! Oracles and synthetic data shared by the integration tests and the
//! acceptance runner. Nothing here calls into the solver or the filter.
#![allow(dead_code)]

use std::collections::BTreeMap;

use formspace::cem::CemInputs;
use formspace::generator::TopologySpec;
use formspace::matrix::Matrix;
use formspace::vector::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// A ring tower described by plain arrays, indexed `[layer][trail]`.
#[derive(Debug, Clone)]
pub struct RawTower {
    pub n: usize,
    pub m: usize,
    /// Start positions, one per trail.
    pub starts: Vec<[f64; 3]>,
    /// Ring force between (d, j) and (d, j + 1), for d in 0..m.
    pub deviation: Vec<Vec<f64>>,
    /// Plane elevation of (d, j) for d in 1..=m (index 0 unused).
    pub planes: Vec<Vec<f64>>,
    pub load: f64,
}

impl RawTower {
    pub fn random(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Self {
        let starts = (0..n)
            .map(|j| {
                let a = std::f64::consts::TAU * j as f64 / n as f64 + rng.gen_range(-0.2..0.2);
                let r = rng.gen_range(1.0..3.0);
                [r * a.cos(), r * a.sin(), rng.gen_range(-0.3..0.3)]
            })
            .collect::<Vec<_>>();
        let deviation = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect()).collect();
        let mut planes = vec![vec![0.0; n]; m + 1];
        for j in 0..n {
            let mut z = starts[j][2];
            for row in planes.iter_mut().skip(1) {
                z -= rng.gen_range(0.2..1.5);
                row[j] = z;
            }
        }
        Self { n, m, starts, deviation, planes, load: rng.gen_range(0.2..2.0) }
    }

    pub fn spec(&self) -> TopologySpec {
        TopologySpec::new(self.n, self.m).unwrap()
    }

    pub fn inputs(&self) -> CemInputs<f64> {
        let spec = self.spec();
        let mut deviation_forces = BTreeMap::new();
        let mut plane_heights = BTreeMap::new();
        let mut start_positions = BTreeMap::new();
        for j in 0..self.n {
            let s = self.starts[j];
            start_positions.insert(spec.vertex(0, j), Vec3::new(s[0], s[1], s[2]));
            for d in 0..self.m {
                deviation_forces.insert(spec.deviation_member(d, j), self.deviation[d][j]);
                plane_heights.insert(spec.vertex(d + 1, j), self.planes[d + 1][j]);
            }
        }
        CemInputs { deviation_forces, plane_heights, radius: 1.0, load: self.load, start_positions }
    }
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn unit(a: [f64; 3]) -> [f64; 3] {
    let l = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    scale(a, 1.0 / l)
}

/// Naive layer-by-layer propagation. Returns positions `[layer][trail]`
/// and the transmitted force vector of each trail member `[layer][trail]`
/// (member from layer d to d + 1).
pub fn brute_force_propagate(t: &RawTower) -> (Vec<Vec<[f64; 3]>>, Vec<Vec<[f64; 3]>>) {
    let (n, m) = (t.n, t.m);
    let mut pos = vec![t.starts.clone()];
    let mut carried = vec![[0.0; 3]; n];
    let mut forces = Vec::new();
    for d in 0..m {
        let here = pos[d].clone();
        let mut next = Vec::with_capacity(n);
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let right = (j + 1) % n;
            let left = (j + n - 1) % n;
            let mut r = carried[j];
            r = add(r, scale(unit(sub(here[right], here[j])), t.deviation[d][j]));
            r = add(r, scale(unit(sub(here[left], here[j])), t.deviation[d][left]));
            r = add(r, [0.0, 0.0, -t.load]);
            let s = (t.planes[d + 1][j] - here[j][2]) / r[2];
            let mut p = add(here[j], scale(r, s));
            p[2] = t.planes[d + 1][j];
            next.push(p);
            row.push(r);
        }
        carried = row.clone();
        forces.push(row);
        pos.push(next);
    }
    (pos, forces)
}

/// Exact test of whether a closed polygon with distinct integer vertices is
/// simple: non-adjacent edges share no point, adjacent edges share only
/// their common vertex.
pub fn exact_polygon_is_simple(v: &[(i64, i64)]) -> bool {
    let n = v.len();
    if n < 3 {
        return true;
    }
    let orient = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| -> i64 {
        ((b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)).signum()
    };
    let on_box = |a: (i64, i64), b: (i64, i64), p: (i64, i64)| {
        p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
    };
    let closed_meet = |a, b, c, d| {
        let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
        (o1 * o2 < 0 && o3 * o4 < 0)
            || (o1 == 0 && on_box(a, b, c))
            || (o2 == 0 && on_box(a, b, d))
            || (o3 == 0 && on_box(c, d, a))
            || (o4 == 0 && on_box(c, d, b))
    };
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let (c, d) = (v[j], v[(j + 1) % n]);
            if j == i + 1 || (i == 0 && j == n - 1) {
                let (p, q, r) = if j == i + 1 { (a, b, d) } else { (b, a, c) };
                let dot = (p.0 - q.0) * (r.0 - q.0) + (p.1 - q.1) * (r.1 - q.1);
                if orient(p, q, r) == 0 && dot > 0 {
                    return false;
                }
            } else if closed_meet(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Random polygon with 3..=64 distinct integer vertices. A third are
/// scattered on a small grid (many collinear and touching cases), a third
/// sorted by angle (usually simple), a third sorted then with two vertices
/// swapped.
pub fn random_polygon(rng: &mut ChaCha8Rng) -> Vec<(i64, i64)> {
    let n = rng.gen_range(3..=64);
    let grid = rng.gen_range(4..40i64);
    let mut seen = std::collections::BTreeSet::new();
    let mut pts = Vec::new();
    while pts.len() < n.min(((grid * grid) as usize) - 1) {
        let p = (rng.gen_range(-grid..grid), rng.gen_range(-grid..grid));
        if seen.insert(p) {
            pts.push(p);
        }
    }
    let mode = rng.gen_range(0..3);
    if mode > 0 {
        pts.sort_by(|a, b| {
            let (x, y) = ((a.1 as f64).atan2(a.0 as f64), (b.1 as f64).atan2(b.0 as f64));
            x.total_cmp(&y).then((a.0 * a.0 + a.1 * a.1).cmp(&(b.0 * b.0 + b.1 * b.1)))
        });
        if mode == 2 && pts.len() > 3 {
            let i = rng.gen_range(0..pts.len());
            let j = rng.gen_range(0..pts.len());
            pts.swap(i, j);
        }
    }
    pts
}

/// Points from `centers.len()` isotropic unit Gaussians. Row `i` belongs
/// to cluster `i % k`.
pub fn gaussian_mixture(seed: u64, n: usize, dim: usize, separation: f64, k: usize) -> (Matrix<f32>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    // centers on orthogonal axes, pairwise `separation` apart
    let offset = separation / std::f64::consts::SQRT_2;
    let mut data = Matrix::zeros(0, dim);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % k;
        let row: Vec<f32> = (0..dim)
            .map(|d| (normal.sample(&mut rng) + if d == c { offset } else { 0.0 }) as f32)
            .collect();
        data.push_row(&row).unwrap();
        labels.push(c);
    }
    (data, labels)
}

/// Uniform points on a unit square placed in `dim` dimensions by a random
/// orthonormal pair, plus isotropic noise of standard deviation `noise`.
pub fn noisy_square(seed: u64, n: usize, dim: usize, noise: f64) -> Matrix<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut e1: Vec<f64> = (0..dim).map(|_| normal.sample(&mut rng)).collect();
    let n1 = e1.iter().map(|v| v * v).sum::<f64>().sqrt();
    e1.iter_mut().for_each(|v| *v /= n1);
    let mut e2: Vec<f64> = (0..dim).map(|_| normal.sample(&mut rng)).collect();
    let proj: f64 = e1.iter().zip(&e2).map(|(a, b)| a * b).sum();
    e2.iter_mut().zip(&e1).for_each(|(b, a)| *b -= proj * a);
    let n2 = e2.iter().map(|v| v * v).sum::<f64>().sqrt();
    e2.iter_mut().for_each(|v| *v /= n2);
    let mut data = Matrix::zeros(0, dim);
    for _ in 0..n {
        let (u, v): (f64, f64) = (rng.gen(), rng.gen());
        let row: Vec<f32> =
            (0..dim).map(|d| (u * e1[d] + v * e2[d] + noise * normal.sample(&mut rng)) as f32).collect();
        data.push_row(&row).unwrap();
    }
    data
}

/// Synthetic analysis input: three separated 2-D clusters plus columns
/// for a mode selector, pure noise and the within-cluster x coordinate.
pub struct ClassifierCase {
    pub points: Vec<[f64; 2]>,
    pub truth: Vec<i64>,
    pub selector: Vec<f64>,
    pub noise: Vec<f64>,
    pub local: Vec<f64>,
}

pub fn classifier_case(seed: u64, n: usize) -> ClassifierCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = [[0.0, 0.0], [40.0, 0.0], [20.0, 35.0]];
    let normal = Normal::new(0.0, 3.0).unwrap();
    let mut c = ClassifierCase { points: vec![], truth: vec![], selector: vec![], noise: vec![], local: vec![] };
    for _ in 0..n {
        let mode = rng.gen_range(0..3usize);
        let (dx, dy) = (normal.sample(&mut rng), normal.sample(&mut rng));
        c.points.push([centers[mode][0] + dx, centers[mode][1] + dy]);
        c.truth.push(mode as i64);
        // the selector maps each mode to a band of values
        c.selector.push(mode as f64 * 30.0 + rng.gen_range(0.0..10.0));
        c.noise.push(rng.gen_range(0.0..100.0));
        c.local.push(dx + rng.gen_range(-0.3..0.3));
    }
    c
}
