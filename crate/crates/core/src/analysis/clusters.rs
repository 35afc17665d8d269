use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    /// Neighbourhood radius as a multiple of the median nearest-neighbour distance.
    pub eps_factor: f64,
    /// Points (including itself) a core point needs within the radius.
    pub min_points: usize,
    /// Smallest share of all points a cluster needs to be counted.
    pub min_fraction: f64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self { eps_factor: 6.0, min_points: 10, min_fraction: 0.005 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterResult {
    /// Cluster per point, `-1` for noise.
    pub labels: Vec<i64>,
    /// Clusters holding at least `min_fraction` of the points.
    pub cluster_count: usize,
    pub eps: f64,
}

impl ClusterResult {
    pub fn sizes(&self) -> BTreeMap<i64, usize> {
        let mut m = BTreeMap::new();
        for &l in &self.labels {
            *m.entry(l).or_default() += 1;
        }
        m
    }
}

const MIN_POINTS_TOTAL: usize = 20;

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Median distance from each point to its nearest other point, by a sweep
/// over points sorted on x.
pub fn median_nearest_neighbor(points: &[[f64; 2]]) -> f64 {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| points[i][0].total_cmp(&points[j][0]).then(i.cmp(&j)));
    let mut nn: Vec<f64> = Vec::with_capacity(points.len());
    for (pos, &i) in order.iter().enumerate() {
        let p = points[i];
        let mut best = f64::INFINITY;
        for &j in order[pos + 1..].iter() {
            let dx = points[j][0] - p[0];
            if dx * dx > best {
                break;
            }
            best = best.min(dist2(p, points[j]));
        }
        for &j in order[..pos].iter().rev() {
            let dx = p[0] - points[j][0];
            if dx * dx > best {
                break;
            }
            best = best.min(dist2(p, points[j]));
        }
        nn.push(best.sqrt());
    }
    nn.sort_by(f64::total_cmp);
    let n = nn.len();
    if n % 2 == 1 {
        nn[n / 2]
    } else {
        (nn[n / 2 - 1] + nn[n / 2]) / 2.0
    }
}

struct Grid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl Grid {
    fn new(points: &[[f64; 2]], cell: f64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Self::key(*p, cell)).or_default().push(i);
        }
        Self { cell, buckets }
    }

    fn key(p: [f64; 2], cell: f64) -> (i64, i64) {
        ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64)
    }

    fn within(&self, points: &[[f64; 2]], i: usize, eps2: f64, out: &mut Vec<usize>) {
        out.clear();
        let (cx, cy) = Self::key(points[i], self.cell);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(b) = self.buckets.get(&(cx + dx, cy + dy)) {
                    out.extend(b.iter().copied().filter(|&j| dist2(points[i], points[j]) <= eps2));
                }
            }
        }
        out.sort_unstable();
    }
}

/// Density-based clustering with a data-relative radius:
/// `eps = eps_factor * median nearest-neighbour distance`.
pub fn detect_clusters(points: &[[f64; 2]], cfg: &ClusterConfig) -> Result<ClusterResult> {
    let n = points.len();
    if n < MIN_POINTS_TOTAL.max(cfg.min_points) {
        return Err(Error::Argument(format!(
            "clustering needs at least {} points, got {n}",
            MIN_POINTS_TOTAL.max(cfg.min_points)
        )));
    }
    if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Error::Argument("non-finite embedding coordinate".into()));
    }
    let eps = cfg.eps_factor * median_nearest_neighbor(points);
    let grid = Grid::new(points, if eps > 0.0 { eps } else { 1.0 });
    let eps2 = eps * eps;

    const UNSEEN: i64 = -2;
    let mut labels = vec![UNSEEN; n];
    let mut next = 0i64;
    let mut hood = Vec::new();
    let mut inner = Vec::new();
    for i in 0..n {
        if labels[i] != UNSEEN {
            continue;
        }
        grid.within(points, i, eps2, &mut hood);
        if hood.len() < cfg.min_points {
            labels[i] = -1;
            continue;
        }
        let c = next;
        next += 1;
        labels[i] = c;
        let mut queue: VecDeque<usize> = hood.iter().copied().filter(|&j| j != i).collect();
        while let Some(q) = queue.pop_front() {
            if labels[q] == -1 {
                labels[q] = c;
            }
            if labels[q] != UNSEEN {
                continue;
            }
            labels[q] = c;
            grid.within(points, q, eps2, &mut inner);
            if inner.len() >= cfg.min_points {
                queue.extend(inner.iter().copied().filter(|&j| labels[j] == UNSEEN || labels[j] == -1));
            }
        }
    }

    let mut sizes = vec![0usize; next as usize];
    for &l in &labels {
        if l >= 0 {
            sizes[l as usize] += 1;
        }
    }
    let threshold = cfg.min_fraction * n as f64;
    let cluster_count = sizes.iter().filter(|&&s| s as f64 >= threshold).count();
    Ok(ClusterResult { labels, cluster_count, eps })
}
