use std::collections::BTreeMap;

/// Bin index of each value under quantile cut points. Equal values share a
/// bin, and any strictly increasing transform of the input gives the same bins.
pub fn quantile_bins(values: &[f64], bins: usize) -> Vec<usize> {
    if values.is_empty() || bins <= 1 {
        return vec![0; values.len()];
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    let cuts: Vec<f64> = (1..bins).map(|k| sorted[k * n / bins]).collect();
    values.iter().map(|v| cuts.iter().filter(|&&c| *v >= c).count()).collect()
}

fn entropy<K: Ord>(labels: impl Iterator<Item = K>) -> (f64, usize) {
    let mut counts: BTreeMap<K, usize> = BTreeMap::new();
    let mut n = 0;
    for l in labels {
        *counts.entry(l).or_default() += 1;
        n += 1;
    }
    let nf = n as f64;
    let h = counts.values().map(|&c| {
        let p = c as f64 / nf;
        -p * p.ln()
    });
    (h.sum(), n)
}

/// Mutual information normalized by the smaller marginal entropy. Zero if
/// either variable is constant.
pub fn normalized_mutual_information<A, B>(a: &[A], b: &[B]) -> f64
where
    A: Ord + Copy,
    B: Ord + Copy,
{
    assert_eq!(a.len(), b.len());
    if a.is_empty() {
        return 0.0;
    }
    let (ha, _) = entropy(a.iter().copied());
    let (hb, _) = entropy(b.iter().copied());
    let (hab, _) = entropy(a.iter().copied().zip(b.iter().copied()));
    let denom = ha.min(hb);
    if denom <= 1e-15 {
        return 0.0;
    }
    ((ha + hb - hab) / denom).clamp(0.0, 1.0)
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && v[idx[end]] == v[idx[start]] {
            end += 1;
        }
        let r = (start + end - 1) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = r;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties; zero when either
/// side is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n < 2 {
        return 0.0;
    }
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let mean = (n - 1) as f64 / 2.0;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        let (dx, dy) = (x - mean, y - mean);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return 0.0;
    }
    (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0)
}

fn pairs(n: usize) -> f64 {
    (n as f64) * (n as f64 - 1.0) / 2.0
}

/// Adjusted Rand index between two labelings of the same items.
pub fn adjusted_rand_index<A, B>(a: &[A], b: &[B]) -> f64
where
    A: Ord + Copy,
    B: Ord + Copy,
{
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut table: BTreeMap<(A, B), usize> = BTreeMap::new();
    let mut rows: BTreeMap<A, usize> = BTreeMap::new();
    let mut cols: BTreeMap<B, usize> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&c| pairs(c)).sum();
    let sum_a: f64 = rows.values().map(|&c| pairs(c)).sum();
    let sum_b: f64 = cols.values().map(|&c| pairs(c)).sum();
    let expected = sum_a * sum_b / pairs(n).max(1.0);
    let max = (sum_a + sum_b) / 2.0;
    if (max - expected).abs() < 1e-12 {
        return 1.0;
    }
    (index - expected) / (max - expected)
}
