//! Scalar abstraction shared by every numerical module.
//!
//! All kernels, transforms and diagnostics are written against [`Real`], so the
//! same code runs in `f32` (quick sweeps) and `f64` (everything that carries a
//! certified bound). Exact quantities on the tree (sphere volumes, sector
//! measures) use big rationals instead, see [`crate::tree_geom`].

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion of an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `ln(exp(a) + exp(b))` without overflow.
#[inline]
pub fn log_add_exp<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(sum exp(x_i))`, shifted by the maximum and summed with compensation.
pub fn log_sum_exp<T: Real>(xs: &[T]) -> T {
    let max = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() || !max.is_finite() {
        return max;
    }
    let s = neumaier_sum(xs.iter().map(|&x| (x - max).exp()));
    max + s.ln()
}

/// Compensated summation (Neumaier). Deterministic for a fixed input order.
pub fn neumaier_sum<T: Real, I: IntoIterator<Item = T>>(it: I) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for x in it {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp = comp + ((sum - t) + x);
        } else {
            comp = comp + ((x - t) + sum);
        }
        sum = t;
    }
    sum + comp
}

/// `asinh(1/z)` for `z > 0` in a form free of cancellation at both ends.
#[inline]
pub fn asinh_recip<T: Real>(z: T) -> T {
    let one = T::one();
    if z < one {
        // ln((1 + sqrt(1 + z^2)) / z)
        (one + (one + z * z).sqrt()).ln() - z.ln()
    } else {
        let w = z.recip();
        (w + w * w / (one + (one + w * w).sqrt())).ln_1p()
    }
}
