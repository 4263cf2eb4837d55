use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the models and the search are computed in: `f32` or `f64`.
///
/// `Display` must print the shortest decimal that parses back to the same
/// value, which holds for the primitive float types. Model files rely on it.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + FromStr + Default + Send + Sync + 'static
{
    fn from_f64_lossy(value: f64) -> Self {
        <Self as FromPrimitive>::from_f64(value).unwrap_or_else(Self::nan)
    }

    fn from_usize_lossy(value: usize) -> Self {
        <Self as FromPrimitive>::from_usize(value).unwrap_or_else(Self::infinity)
    }

    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum<F> {
    sum: F,
    compensation: F,
}

impl<F: Scalar> CompensatedSum<F> {
    pub(crate) fn new() -> Self {
        CompensatedSum {
            sum: F::zero(),
            compensation: F::zero(),
        }
    }

    pub(crate) fn add(&mut self, value: F) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation = self.compensation + ((self.sum - t) + value);
        } else {
            self.compensation = self.compensation + ((value - t) + self.sum);
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> F {
        self.sum + self.compensation
    }
}

/// `ln Σ exp(x_i)` with max-shift and compensated accumulation.
pub(crate) fn log_sum_exp<F: Scalar>(values: &[F]) -> F {
    let max = values
        .iter()
        .copied()
        .fold(F::neg_infinity(), |a, b| if b > a { b } else { a });
    if !max.is_finite() {
        return max;
    }
    let mut acc = CompensatedSum::new();
    for &v in values {
        acc.add((v - max).exp());
    }
    max + acc.total().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::<f64>::new();
        acc.add(1.0);
        for _ in 0..10 {
            acc.add(1e-16);
        }
        acc.add(-1.0);
        assert!((acc.total() - 1e-15).abs() < 1e-25);
    }

    #[test]
    fn log_sum_exp_matches_direct_sum() {
        let xs = [0.1f64, -2.0, 3.5];
        let direct = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - direct).abs() < 1e-12);
        let big = [1000.0f32, 1000.0];
        assert!((log_sum_exp(&big) - (1000.0 + 2f32.ln())).abs() < 1e-3);
    }
}
