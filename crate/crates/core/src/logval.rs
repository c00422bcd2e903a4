//! Sign and log-magnitude scalars.
//!
//! Heat kernel values on the tree routinely fall below `f64::MIN_POSITIVE`
//! (`e^{-t} I_j(t)` for `t ~ 10^3` and large `j`), and the intermediate factors
//! `q^{-n/2}` and `e^{-(1-gamma(0)) t}` overflow in the other direction. A
//! [`LogVal`] keeps the sign separate and stores `ln |x|`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use crate::scalar::Real;

#[derive(Clone, Copy, PartialEq)]
pub struct LogVal<T> {
    sign: i8,
    log_mag: T,
}

impl<T: Real> LogVal<T> {
    pub fn zero() -> Self {
        Self { sign: 0, log_mag: T::neg_infinity() }
    }

    pub fn one() -> Self {
        Self { sign: 1, log_mag: T::zero() }
    }

    /// A positive value given by its natural logarithm.
    pub fn from_ln(log_mag: T) -> Self {
        if log_mag == T::neg_infinity() {
            Self::zero()
        } else {
            Self { sign: 1, log_mag }
        }
    }

    pub fn from_parts(sign: i8, log_mag: T) -> Self {
        if sign == 0 || log_mag == T::neg_infinity() {
            Self::zero()
        } else {
            Self { sign: sign.signum(), log_mag }
        }
    }

    pub fn from_real(x: T) -> Self {
        if x == T::zero() {
            Self::zero()
        } else if x > T::zero() {
            Self { sign: 1, log_mag: x.ln() }
        } else {
            Self { sign: -1, log_mag: (-x).ln() }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// `ln |x|`; `-inf` for zero.
    pub fn ln_abs(&self) -> T {
        if self.sign == 0 {
            T::neg_infinity()
        } else {
            self.log_mag
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        Self { sign: self.sign.abs(), log_mag: self.log_mag }
    }

    /// Plain value; underflows to zero and overflows to infinity as `exp` does.
    pub fn to_real(&self) -> T {
        match self.sign {
            0 => T::zero(),
            1 => self.log_mag.exp(),
            _ => -self.log_mag.exp(),
        }
    }

    /// `|x|^p` for real `p > 0`; the sign is dropped.
    pub fn abs_powf(&self, p: T) -> Self {
        if self.sign == 0 {
            Self::zero()
        } else {
            Self { sign: 1, log_mag: self.log_mag * p }
        }
    }

    pub fn recip(&self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero LogVal");
        Self { sign: self.sign, log_mag: -self.log_mag }
    }

    pub fn add(self, other: Self) -> Self {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (hi, lo) = if self.log_mag >= other.log_mag { (self, other) } else { (other, self) };
        let d = (lo.log_mag - hi.log_mag).exp();
        if hi.sign == lo.sign {
            Self { sign: hi.sign, log_mag: hi.log_mag + d.ln_1p() }
        } else if d == T::one() {
            Self::zero()
        } else {
            Self { sign: hi.sign, log_mag: hi.log_mag + (-d).ln_1p() }
        }
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(-other)
    }

    /// Sum of many terms with a single max shift.
    pub fn sum<I: IntoIterator<Item = Self>>(it: I) -> Self {
        let terms: Vec<Self> = it.into_iter().filter(|v| v.sign != 0).collect();
        let Some(max) = terms.iter().map(|v| v.log_mag).reduce(T::max) else {
            return Self::zero();
        };
        let s = crate::scalar::neumaier_sum(
            terms.iter().map(|v| T::from_int(v.sign as i64) * (v.log_mag - max).exp()),
        );
        let mut out = Self::from_real(s);
        if out.sign != 0 {
            out.log_mag = out.log_mag + max;
        }
        out
    }
}

impl<T: Real> Mul for LogVal<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::zero();
        }
        Self { sign: self.sign * rhs.sign, log_mag: self.log_mag + rhs.log_mag }
    }
}

impl<T: Real> Div for LogVal<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<T: Real> Neg for LogVal<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { sign: -self.sign, log_mag: self.log_mag }
    }
}

impl<T: Real> PartialOrd for LogVal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.log_mag.partial_cmp(&other.log_mag),
                _ => other.log_mag.partial_cmp(&self.log_mag),
            },
            ord => Some(ord),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for LogVal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "LogVal(0)"),
            s => write!(f, "LogVal({}exp({:?}))", if s > 0 { "+" } else { "-" }, self.log_mag),
        }
    }
}
