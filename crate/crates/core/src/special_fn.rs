//! The heat kernel of the integers, `h_t^Z(j) = e^{-t} I_{|j|}(t)`, its
//! asymptotic envelope `F(j, t)`, and the auxiliary functions `xi`, `zeta`,
//! `zeta'`, `zeta''`, `psi` that govern tree heat kernel asymptotics.
//!
//! Bessel values are produced by a backward (Miller) recurrence on the ratios
//! `rho_k = I_k(t) / I_{k-1}(t)`, normalised with `I_0 + 2 sum_k I_k = e^t`.
//! Working with ratios and the normalisation directly yields the scaled values
//! `e^{-t} I_k(t)`, so nothing overflows; logarithms are kept for the tail.

use crate::error::{domain, Result};
use crate::logval::LogVal;
use crate::scalar::{asinh_recip, neumaier_sum, Real};

/// Calibrated constant in `h_t^Z(j) <= ENVELOPE_CONSTANT * F(j, t)`.
///
/// The two-sided comparison `h^Z ≍ F` has unspecified constants. For `j != 0`
/// the observed ratio `h/F` stays in `[0.99, 1.10]`, so 2 is a comfortable
/// bound; at `j = 0` the ratio climbs to `sqrt(2 pi)` as `t -> 0`, which is why
/// tail bounds only ever apply it at `|j| >= 1`.
pub const ENVELOPE_CONSTANT: f64 = 2.0;

/// Backward-recurrence start order for a table reaching `jmax`.
pub fn start_order(t: f64, jmax: usize) -> usize {
    let j = jmax as f64;
    jmax + 40 + (10.0 * (t * j + t).sqrt()).ceil() as usize
}

/// `e^{-t} I_j(t)` for all `0 <= j <= jmax` at a fixed time.
#[derive(Debug, Clone)]
pub struct ZKernelTable<T> {
    t: T,
    /// `ln h(j)` for `0 <= j <= jmax`.
    log_h: Vec<T>,
    /// `ratio[k] = h(k) / h(k-1)` for `1 <= k <= start order`; `ratio[0]` unused.
    ratio: Vec<T>,
}

impl<T: Real> ZKernelTable<T> {
    pub fn new(t: T, jmax: usize) -> Result<Self> {
        if !(t >= T::zero()) || !t.is_finite() {
            return Err(domain("heat_z", format!("time must be finite and >= 0, got {t}")));
        }
        if t == T::zero() {
            let mut log_h = vec![T::neg_infinity(); jmax + 1];
            log_h[0] = T::zero();
            return Ok(Self { t, log_h, ratio: vec![T::zero(); jmax + 2] });
        }

        let top = start_order(t.to_f64_lossy(), jmax);
        let two = T::lit(2.0);
        let mut ratio = vec![T::zero(); top + 2];
        let mut next = T::zero();
        for k in (1..=top).rev() {
            let r = t / (two * T::from_usize_lossy(k) + t * next);
            ratio[k] = r;
            next = r;
        }

        // 1 + 2 sum_k prod_{i<=k} rho_i ; the products only decrease.
        let mut prod = T::one();
        let norm = T::one()
            + two
                * neumaier_sum((1..=top).map(|k| {
                    prod = prod * ratio[k];
                    prod
                }));
        let log_h0 = -norm.ln();

        let mut log_h = Vec::with_capacity(jmax + 1);
        log_h.push(log_h0);
        let (mut acc, mut comp) = (log_h0, T::zero());
        for &r in ratio.iter().take(jmax + 1).skip(1) {
            // Kahan-compensated running sum of ln rho_i.
            let y = r.ln() - comp;
            let s = acc + y;
            comp = (s - acc) - y;
            acc = s;
            log_h.push(acc);
        }
        Ok(Self { t, log_h, ratio })
    }

    pub fn time(&self) -> T {
        self.t
    }

    pub fn jmax(&self) -> usize {
        self.log_h.len() - 1
    }

    /// `ln h_t^Z(j)`. Panics if `|j| > jmax`.
    pub fn ln_value(&self, j: i64) -> T {
        self.log_h[j.unsigned_abs() as usize]
    }

    pub fn value(&self, j: i64) -> LogVal<T> {
        LogVal::from_ln(self.ln_value(j))
    }

    /// `h(k) / h(k-1)` for `k >= 1`, available up to the recurrence start order.
    pub fn ratio(&self, k: usize) -> T {
        self.ratio[k]
    }

    pub fn ratio_len(&self) -> usize {
        self.ratio.len() - 1
    }

    /// Upper bound on the one-sided tail `sum_{j > big_j} h(j)`.
    ///
    /// Uses that `k -> I_k / I_{k-1}` decreases, so the tail is dominated by a
    /// geometric series with ratio `rho_{J+2}`. Requires `big_j + 2 <= jmax`.
    pub fn tail_bound(&self, big_j: usize) -> LogVal<T> {
        if self.t == T::zero() {
            return LogVal::zero();
        }
        let r = self.ratio[big_j + 2];
        LogVal::from_ln(self.log_h[big_j + 1] - (T::one() - r).ln())
    }

    /// Bound on `sum_{|j| > big_j} h(j)` (both tails).
    pub fn two_sided_tail_bound(&self, big_j: usize) -> LogVal<T> {
        self.tail_bound(big_j) * LogVal::from_real(T::lit(2.0))
    }
}

/// `e^{-t} I_{|j|}(t)` in log domain.
pub fn heat_z<T: Real>(j: i64, t: T) -> Result<LogVal<T>> {
    let table = ZKernelTable::new(t, j.unsigned_abs() as usize)?;
    Ok(table.value(j))
}

fn check_positive<T: Real>(op: &'static str, z: T) -> Result<()> {
    if z > T::zero() && z.is_finite() {
        Ok(())
    } else {
        Err(domain(op, format!("argument must be finite and > 0, got {z}")))
    }
}

/// `xi(z) = sqrt(1 + z^2) + ln(z / (1 + sqrt(1 + z^2)))`.
pub fn xi<T: Real>(z: T) -> Result<T> {
    check_positive("xi", z)?;
    Ok(xi_unchecked(z))
}

pub(crate) fn xi_unchecked<T: Real>(z: T) -> T {
    (T::one() + z * z).sqrt() - asinh_recip(z)
}

/// `zeta(z) = xi(z) / z`.
pub fn zeta<T: Real>(z: T) -> Result<T> {
    check_positive("zeta", z)?;
    Ok(xi_unchecked(z) / z)
}

/// `zeta'(z) = -psi(z) / z^2 = asinh(1/z) / z^2`.
pub fn zeta_prime<T: Real>(z: T) -> Result<T> {
    check_positive("zeta_prime", z)?;
    Ok(asinh_recip(z) / (z * z))
}

/// `zeta''(z) = -(1/sqrt(1 + z^2) + 2 asinh(1/z)) / z^3`, strictly negative.
pub fn zeta_second<T: Real>(z: T) -> Result<T> {
    check_positive("zeta_second", z)?;
    let one = T::one();
    Ok(-(one / (one + z * z).sqrt() + T::lit(2.0) * asinh_recip(z)) / (z * z * z))
}

/// `psi(z) = ln(z / (1 + sqrt(1 + z^2))) = -asinh(1/z)`.
pub fn psi<T: Real>(z: T) -> Result<T> {
    check_positive("psi", z)?;
    Ok(-asinh_recip(z))
}

/// `ln F(j, t)`.
pub fn ln_envelope_f<T: Real>(j: i64, t: T) -> Result<T> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(domain("envelope_f", format!("time must be finite and >= 0, got {t}")));
    }
    let half_ln_2pi = T::lit(0.5) * (T::lit(2.0) * T::PI()).ln();
    let quarter = T::lit(0.25);
    if j == 0 {
        return Ok(-half_ln_2pi - quarter * (T::one() + t * t).ln());
    }
    if t == T::zero() {
        return Ok(T::neg_infinity());
    }
    let aj = T::from_int(j.abs());
    Ok(-half_ln_2pi - t + aj * xi_unchecked(t / aj) - quarter * (T::one() + aj * aj + t * t).ln())
}

/// The envelope `F(j, t)` with `h_t^Z(j) ≍ F(j, t)`.
pub fn envelope_f<T: Real>(j: i64, t: T) -> Result<T> {
    ln_envelope_f(j, t).map(T::exp)
}

/// A-priori bound on `sum_{|j| > big_j} h_t^Z(j)` from the envelope alone.
///
/// `2 * ENVELOPE_CONSTANT * F(J+1, t) / (1 - r)` with `r = s / (1 + sqrt(1 + s^2))`,
/// `s = t / (J+1)`, an upper bound for every ratio `I_{k+1}/I_k`, `k >= J+1`.
/// Used to size cutoffs before a table exists.
pub fn envelope_tail_bound<T: Real>(big_j: usize, t: T) -> Result<LogVal<T>> {
    let j1 = big_j as i64 + 1;
    let s = t / T::from_int(j1);
    let r = s / (T::one() + (T::one() + s * s).sqrt());
    let ln_f = ln_envelope_f(j1, t)?;
    Ok(LogVal::from_ln(
        (T::lit(2.0) * T::lit(ENVELOPE_CONSTANT)).ln() + ln_f - (T::one() - r).ln(),
    ))
}
