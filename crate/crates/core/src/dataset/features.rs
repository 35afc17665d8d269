use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::vector::Vec3;

/// How coordinate blocks are scaled into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Each form is scaled by its own per-axis extent.
    #[default]
    PerForm,
    /// All forms share per-axis bounds taken over the whole corpus.
    Corpus,
}

fn bounds<T: Scalar>(values: impl Iterator<Item = T>) -> (T, T) {
    values.fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn scale_block<T: Scalar>(values: impl Iterator<Item = T>, lo: T, hi: T, out: &mut Vec<T>) {
    let span = hi - lo;
    if !(span >= T::lit(1e-12)) {
        out.extend(values.map(|_| T::lit(0.5)));
    } else {
        // clamp guards the last ulp; min-max itself already lands in [0, 1]
        out.extend(values.map(|v| ((v - lo) / span).max(T::zero()).min(T::one())));
    }
}

fn axis<T: Scalar>(p: &Vec3<T>, a: usize) -> T {
    match a {
        0 => p.x,
        1 => p.y,
        _ => p.z,
    }
}

/// Node coordinates as `(x_1..x_n, y_1..y_n, z_1..z_n)`, each block min-max
/// normalized on its own. A block with no extent maps to 0.5.
pub fn extract_features<T: Scalar>(positions: &[Vec3<T>]) -> Vec<T> {
    let mut out = Vec::with_capacity(3 * positions.len());
    for a in 0..3 {
        let (lo, hi) = bounds(positions.iter().map(|p| axis(p, a)));
        scale_block(positions.iter().map(|p| axis(p, a)), lo, hi, &mut out);
    }
    out
}

/// Feature vectors for a set of forms under the chosen normalization.
pub fn normalize_corpus<T: Scalar>(forms: &[&[Vec3<T>]], mode: Normalization) -> Vec<Vec<T>> {
    match mode {
        Normalization::PerForm => forms.iter().map(|p| extract_features(p)).collect(),
        Normalization::Corpus => {
            let mut lims = [(T::infinity(), T::neg_infinity()); 3];
            for (a, lim) in lims.iter_mut().enumerate() {
                *lim = bounds(forms.iter().flat_map(|p| p.iter().map(move |q| axis(q, a))));
            }
            forms
                .iter()
                .map(|p| {
                    let mut out = Vec::with_capacity(3 * p.len());
                    for (a, &(lo, hi)) in lims.iter().enumerate() {
                        scale_block(p.iter().map(|q| axis(q, a)), lo, hi, &mut out);
                    }
                    out
                })
                .collect()
        }
    }
}
