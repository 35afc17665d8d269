//! Scalar abstraction shared by the solver, the filter and the learners.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the numerical code is generic over.
///
/// The tolerance hooks let the same code run in `f32` without pretending
/// to have double-precision headroom.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Relative tolerance for nodal force residuals.
    fn residual_tolerance() -> Self;

    /// Relative cutoff below which a resultant or a ray/plane angle counts as degenerate.
    fn degeneracy_tolerance() -> Self;

    /// Literal conversion. Panics only if the value is not representable at all.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal not representable")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("integer not representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn residual_tolerance() -> Self {
        1e-8
    }

    fn degeneracy_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn residual_tolerance() -> Self {
        1e-3
    }

    fn degeneracy_tolerance() -> Self {
        1e-6
    }
}

/// Squared Euclidean distance with eight independent accumulators so the
/// compiler can vectorize the reduction. The summation order is fixed.
#[inline]
pub fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [T::zero(); 8];
    let chunks = a.len() / 8;
    for c in 0..chunks {
        let base = c * 8;
        for lane in 0..8 {
            let d = a[base + lane] - b[base + lane];
            acc[lane] = acc[lane] + d * d;
        }
    }
    let mut tail = T::zero();
    for i in chunks * 8..a.len() {
        let d = a[i] - b[i];
        tail = tail + d * d;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squared_distance_matches_naive_sum() {
        let a: Vec<f64> = (0..37).map(|i| (i as f64).sin()).collect();
        let b: Vec<f64> = (0..37).map(|i| (i as f64 * 0.7).cos()).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum();
        assert!((squared_distance(&a, &b) - naive).abs() < 1e-12);
    }

    #[test]
    fn tolerances_are_ordered() {
        assert!(f64::degeneracy_tolerance() < f64::residual_tolerance());
        assert!(f32::degeneracy_tolerance() < f32::residual_tolerance());
    }
}
