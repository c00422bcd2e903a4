//! The heat kernel `h_t(n)` of `L = I - M` on `T_q` (radial, `n = |x|`).
//!
//! Primary path: the all-positive Bessel series
//!
//! ```text
//! h_t(n) = 2 e^{-(1-g)t} / (g t) * q^{-n/2} * sum_k q^{-k} (n+2k+1) z(n+2k+1),
//! ```
//!
//! with `g = gamma(0)` and `z = h^Z_{g t}`, summed in log domain through the
//! backward recursion `S(n) = a(n+1) + S(n+2)/q`, `a(m) = m z(m)`. Truncation is
//! certified with a geometric majorant built from the monotone Bessel ratios.
//! The differenced series and a contour-shifted spectral quadrature serve as
//! independent cross-checks.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::logval::LogVal;
use crate::scalar::{log_add_exp, log_sum_exp, Real};
use crate::spectral::{heat_multiplier, inv_c_minus, inverse_spherical, InversionResult, MAX_GRID, START_GRID};
use crate::special_fn::ZKernelTable;
use crate::tree_geom::TreeParams;

/// Target relative truncation error of the series path.
pub const SERIES_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// All-positive series (primary).
    SeriesII,
    /// Differenced series.
    SeriesI,
    /// Spectral quadrature.
    Quadrature,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::SeriesII => "series_ii",
            Method::SeriesI => "series_i",
            Method::Quadrature => "quadrature",
        }
    }
}

/// One kernel value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatEval<T> {
    pub n: usize,
    pub t: T,
    pub value: LogVal<T>,
    pub method: Method,
    /// Bound on the relative error of `value`.
    pub rel_bound: T,
    /// Set when differencing lost more than half the mantissa.
    pub cancellation_flag: bool,
}

/// `ln(2 e^{-(1-g)t} / (g t))`.
fn ln_prefactor<T: Real>(tree: &TreeParams, t: T) -> T {
    let g = tree.gamma0::<T>();
    (T::lit(2.0) / (g * t)).ln() - (T::one() - g) * t
}

/// `h_t(0..=nmax)` from the positive series, with per-radius error bounds.
#[derive(Debug, Clone)]
pub struct HeatProfile<T> {
    tree: TreeParams,
    t: T,
    log_h: Vec<T>,
    rel_bound: Vec<T>,
    /// `h^Z_{g t}`, reaching past the truncation point; `None` at `t = 0`.
    z: Option<ZKernelTable<T>>,
    ln_pref: T,
}

impl<T: Real> HeatProfile<T> {
    /// Profile on `0..=nmax` with truncation error below [`SERIES_TOL`].
    pub fn new(tree: &TreeParams, t: T, nmax: usize) -> Result<Self> {
        Self::build(tree, t, nmax, None)
    }

    /// Profile with the series cut after `kmax + 1` terms (no tolerance enforced).
    pub fn with_kmax(tree: &TreeParams, t: T, nmax: usize, kmax: usize) -> Result<Self> {
        Self::build(tree, t, nmax, Some(kmax))
    }

    fn build(tree: &TreeParams, t: T, nmax: usize, kmax: Option<usize>) -> Result<Self> {
        if !(t >= T::zero()) || !t.is_finite() {
            return Err(crate::error::domain("heat_tree", format!("time must be finite and >= 0, got {t}")));
        }
        if t == T::zero() {
            let mut log_h = vec![T::neg_infinity(); nmax + 1];
            log_h[0] = T::zero();
            return Ok(Self {
                tree: *tree,
                t,
                log_h,
                rel_bound: vec![T::zero(); nmax + 1],
                z: None,
                ln_pref: T::zero(),
            });
        }
        let tol = T::lit(SERIES_TOL);
        let mut extra = match kmax {
            Some(k) => 2 * k + 1,
            None => 2 * (60.0 / (tree.q() as f64).log2()).ceil() as usize + 40,
        };
        loop {
            let top = nmax + extra;
            let prof = Self::evaluate(tree, t, nmax, top)?;
            let worst = prof.rel_bound.iter().copied().fold(T::zero(), T::max);
            if kmax.is_some() || worst <= tol {
                let mut prof = prof;
                for n in 0..=nmax {
                    let extra = prof.rounding_allowance(n);
                    prof.rel_bound[n] = prof.rel_bound[n] + extra;
                }
                return Ok(prof);
            }
            if extra > 1 << 22 {
                return Err(Error::Certification(format!("series truncation at t = {t}: bound {worst:e}")));
            }
            extra *= 2;
        }
    }

    /// Sums terms with index `m = n + 2k + 1 <= top`; `rel_bound` holds the
    /// truncation bound only.
    fn evaluate(tree: &TreeParams, t: T, nmax: usize, top: usize) -> Result<Self> {
        let g = tree.gamma0::<T>();
        let z = ZKernelTable::new(g * t, top + 4)?;
        let lq = tree.ln_q::<T>();
        let ln_a = |m: usize| T::from_usize_lossy(m).ln() + z.ln_value(m as i64);

        // S(n) for n = top-1 down to 0; S(n) = 0 for n >= top.
        let mut ln_s = vec![T::neg_infinity(); top + 2];
        for n in (0..top).rev() {
            ln_s[n] = log_add_exp(ln_a(n + 1), ln_s[n + 2] - lq);
        }
        let ln_pref = ln_prefactor(tree, t);
        let half = T::lit(0.5);
        let qf = tree.qf::<T>();
        let mut prof = Self {
            tree: *tree,
            t,
            log_h: Vec::with_capacity(nmax + 1),
            rel_bound: Vec::with_capacity(nmax + 1),
            z: None,
            ln_pref,
        };
        for n in 0..=nmax {
            prof.log_h.push(ln_pref - half * T::from_usize_lossy(n) * lq + ln_s[n]);
            // First omitted index and the geometric majorant of the omitted terms.
            let k_cut = (top - n - 1) / 2 + 1;
            let m0 = n + 1 + 2 * k_cut;
            let m0f = T::from_usize_lossy(m0);
            let r = (m0f + T::lit(2.0)) / m0f * z.ratio(m0 + 1) * z.ratio(m0 + 2) / qf;
            let ln_tail = -T::from_usize_lossy(k_cut) * lq + ln_a(m0) - (T::one() - r).ln();
            prof.rel_bound.push((ln_tail - ln_s[n]).exp());
        }
        prof.z = Some(z);
        Ok(prof)
    }

    /// A-priori allowance for floating-point error in `ln h_t(n)`: the Bessel
    /// log-ratios accumulate roughly one ulp of `|ln z|` per step, the
    /// prefactor one ulp of `t`.
    fn rounding_allowance(&self, n: usize) -> T {
        let Some(z) = &self.z else { return T::zero() };
        let lz = z.ln_value((n + 1) as i64).abs();
        T::lit(8.0) * T::epsilon() * (lz + T::from_usize_lossy(n + 1) + self.t + T::lit(64.0))
    }

    pub fn tree(&self) -> &TreeParams {
        &self.tree
    }

    pub fn time(&self) -> T {
        self.t
    }

    pub fn nmax(&self) -> usize {
        self.log_h.len() - 1
    }

    pub fn ln_value(&self, n: usize) -> T {
        self.log_h[n]
    }

    pub fn value(&self, n: usize) -> LogVal<T> {
        LogVal::from_ln(self.log_h[n])
    }

    pub fn rel_bound(&self, n: usize) -> T {
        self.rel_bound[n]
    }

    pub fn log_values(&self) -> &[T] {
        &self.log_h
    }

    pub fn eval(&self, n: usize) -> HeatEval<T> {
        HeatEval {
            n,
            t: self.t,
            value: self.value(n),
            method: Method::SeriesII,
            rel_bound: self.rel_bound[n],
            cancellation_flag: false,
        }
    }

    /// `ln B(n)` with `h_t(n) <= B(n) = pref q^{-n/2} z(n+1) [(n+1) q/(q-1) + 2q/(q-1)^2]`,
    /// valid because `z` decreases. Needs `n + 1` within the Bessel table.
    pub fn ln_majorant(&self, n: usize) -> T {
        let Some(z) = &self.z else {
            return if n == 0 { T::zero() } else { T::neg_infinity() };
        };
        let q = self.tree.qf::<T>();
        let qm = q - T::one();
        let poly = T::from_usize_lossy(n + 1) * q / qm + T::lit(2.0) * q / (qm * qm);
        self.ln_pref - T::lit(0.5) * T::from_usize_lossy(n) * q.ln() + z.ln_value((n + 1) as i64) + poly.ln()
    }

    /// Upper bound on `B(m+1)/B(m)` for every `m >= n`.
    pub fn majorant_ratio(&self, n: usize) -> T {
        let Some(z) = &self.z else { return T::zero() };
        let nf = T::from_usize_lossy(n + 1);
        self.tree.qf::<T>().sqrt().recip() * (nf + T::one()) / nf * z.ratio(n + 2)
    }

    /// Largest radius for which [`Self::ln_majorant`] is available.
    pub fn majorant_reach(&self) -> usize {
        match &self.z {
            Some(z) => z.jmax() - 3,
            None => usize::MAX / 2,
        }
    }
}

/// `h_t(n)` from the positive series; `kmax` caps the number of terms.
pub fn heat_tree_series<T: Real>(tree: &TreeParams, n: usize, t: T, kmax: Option<usize>) -> Result<HeatEval<T>> {
    let prof = match kmax {
        Some(k) => HeatProfile::with_kmax(tree, t, n, k)?,
        None => HeatProfile::new(tree, t, n)?,
    };
    Ok(prof.eval(n))
}

/// `h_t(n) = e^{-(1-g)t} q^{-n/2} sum_k q^{-k} [z(n+2k) - z(n+2k+2)]`.
///
/// Each difference is formed from the two Bessel values, so input rounding is
/// amplified by `1 / (1 - z(m+2)/z(m))`; the result is flagged when that
/// amplification exceeds `2^{26}` on a term that matters.
pub fn heat_tree_series_alt<T: Real>(tree: &TreeParams, n: usize, t: T) -> Result<HeatEval<T>> {
    if t == T::zero() {
        let value = if n == 0 { LogVal::one() } else { LogVal::zero() };
        return Ok(HeatEval { n, t, value, method: Method::SeriesI, rel_bound: T::zero(), cancellation_flag: false });
    }
    let g = tree.gamma0::<T>();
    let lq = tree.ln_q::<T>();
    let kmax = (60.0 / (tree.q() as f64).log2()).ceil() as usize + 8;
    let z = ZKernelTable::new(g * t, n + 2 * kmax + 4)?;
    let mut terms = Vec::with_capacity(kmax + 1);
    let mut worst_bits = T::zero();
    let mut max_ln = T::neg_infinity();
    for k in 0..=kmax {
        let m = (n + 2 * k) as i64;
        let d = z.value(m).sub(z.value(m + 2));
        let term = d * LogVal::from_ln(-T::from_usize_lossy(k) * lq);
        if term.is_zero() {
            continue;
        }
        let ln_term = term.ln_abs();
        max_ln = max_ln.max(ln_term);
        // bits lost: log2 z(m) / (z(m) - z(m+2))
        let bits = (z.ln_value(m) - d.ln_abs()) / T::LN_2();
        if ln_term > max_ln - T::lit(40.0) {
            worst_bits = worst_bits.max(bits);
        }
        terms.push(term);
    }
    let sum = LogVal::sum(terms);
    let scale = LogVal::from_ln(-(T::one() - g) * t - T::lit(0.5) * T::from_usize_lossy(n) * lq);
    let tail = (z.ln_value((n + 2 * kmax + 2) as i64) - T::from_usize_lossy(kmax + 1) * lq
        - (T::one() - tree.qf::<T>().recip()).ln()
        - sum.ln_abs())
    .exp();
    let rel_bound = tail + T::epsilon() * T::lit(64.0) * worst_bits.exp2();
    Ok(HeatEval {
        n,
        t,
        value: sum * scale,
        method: Method::SeriesI,
        rel_bound,
        cancellation_flag: worst_bits > T::lit(26.0),
    })
}

/// `h_t(n)` by spectral quadrature with the contour moved to the saddle line.
///
/// Writing `phi_lambda |c|^{-2} = q^{(i lambda - 1/2) n}/c(-lambda) + conj`, the
/// inversion integral becomes `q/(q+1) * mean_theta Re g(theta/ln q)`, with
/// `g = m_t q^{(i lambda - 1/2) n} / c(-lambda)` entire in `Im lambda >= 0` and
/// `tau`-periodic. Shifting to `theta + i eps`, `sinh eps = n / (g t)`, removes
/// the oscillation that otherwise caps the relative accuracy near
/// `eps_mach * h_t(0) / h_t(n)`.
pub fn heat_tree_quadrature<T: Real>(tree: &TreeParams, n: usize, t: T, tol: T) -> Result<HeatEval<T>> {
    if t == T::zero() && n == 0 {
        return Ok(HeatEval { n, t, value: LogVal::one(), method: Method::Quadrature, rel_bound: T::zero(), cancellation_flag: false });
    }
    let g = tree.gamma0::<T>();
    let lq = tree.ln_q::<T>();
    let nf = T::from_usize_lossy(n);
    let gt = g * t;
    let eps = if n == 0 {
        T::zero()
    } else if t == T::zero() {
        // no saddle; any shift works, pick one that keeps the integrand O(1)
        T::one()
    } else {
        (nf / gt).asinh()
    };
    let (ce, se) = (eps.cosh(), eps.sinh());
    let ln_scale = -t * (T::one() - g * ce) - T::lit(0.5) * nf * lq - eps * nf;

    let eval = |nodes: usize| -> (T, T) {
        let (mut re, mut mag) = (Vec::with_capacity(nodes), Vec::with_capacity(nodes));
        for k in 0..nodes {
            let th = T::lit(2.0) * T::PI() * T::from_usize_lossy(k) / T::from_usize_lossy(nodes) - T::PI();
            let (st, ct) = th.sin_cos();
            let expo = Complex::new(gt * ce * (ct - T::one()), th * nf - gt * st * se);
            let w = Complex::new(th, eps) / lq;
            let v = expo.exp() * inv_c_minus(tree, w);
            re.push(v.re);
            mag.push(v.norm());
        }
        let nn = T::from_usize_lossy(nodes);
        (crate::scalar::neumaier_sum(re) / nn, crate::scalar::neumaier_sum(mag) / nn)
    };
    let q = tree.qf::<T>();
    let factor = q / (q + T::one());
    let mut nodes = START_GRID;
    let (mut prev, _) = eval(nodes);
    loop {
        nodes *= 2;
        let (cur, mag) = eval(nodes);
        let change = (cur - prev).abs();
        let floor = T::lit(64.0) * T::epsilon() * mag;
        if change <= tol * cur.abs() + floor || nodes >= MAX_GRID {
            if !(cur > T::zero()) {
                return Err(Error::Quadrature { last_change: change.to_f64_lossy(), nodes });
            }
            let rel_bound = (change + floor) / cur
                + T::lit(8.0) * T::epsilon() * (ln_scale.abs() + T::one());
            return Ok(HeatEval {
                n,
                t,
                value: LogVal::from_ln(ln_scale + (factor * cur).ln()),
                method: Method::Quadrature,
                rel_bound,
                cancellation_flag: false,
            });
        }
        prev = cur;
    }
}

/// Real-axis inversion of the heat multiplier through
/// [`crate::spectral::inverse_spherical`]; accurate only in absolute terms.
pub fn heat_tree_quadrature_real_axis<T: Real>(tree: &TreeParams, n: usize, t: T, tol: T) -> InversionResult<T> {
    inverse_spherical(tree, |l| heat_multiplier(tree, Complex::new(l, T::zero()), t).re, n, tol)
}

/// `ln sum_n |S(o,n)| h_t(n)^p` (or `ln h_t(0)` for `p = inf`) with a tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpNorm<T> {
    pub p: T,
    /// `ln ||h_t||_p^p` for finite `p`, `ln ||h_t||_inf` otherwise.
    pub ln_pow_sum: T,
    /// Bound on the omitted tail relative to `||h_t||_p^p`.
    pub tail_rel: T,
    /// Bound on the relative error of `||h_t||_p^p` from the kernel values.
    pub value_rel: T,
    pub cutoff: usize,
}

impl<T: Real> LpNorm<T> {
    /// `ln ||h_t||_p`.
    pub fn ln_norm(&self) -> T {
        if self.p.is_infinite() {
            self.ln_pow_sum
        } else {
            self.ln_pow_sum / self.p
        }
    }
}

/// Initial radial cutoff `ceil(t + 40 + 12 sqrt t)` for `l^p` sums.
pub fn initial_cutoff(t: f64) -> usize {
    (t + 40.0 + 12.0 * t.sqrt()).ceil() as usize
}

/// Bound on `sum_{n > cutoff} |S(o,n)| h_t(n)^p` (log), from the majorant.
/// Returns `+inf` if the majorant ratio is not below one.
pub fn ln_tail_pow<T: Real>(prof: &HeatProfile<T>, p: T, cutoff: usize) -> T {
    let m = cutoff + 1;
    let tree = prof.tree();
    let q = tree.qf::<T>();
    let r = q * prof.majorant_ratio(m).powf(p);
    if !(r < T::one()) {
        return T::infinity();
    }
    tree.ln_sphere_volume::<T>(m) + p * prof.ln_majorant(m) - (T::one() - r).ln()
}

/// Bound on `sup_{n > cutoff} h_t(n)` (log).
pub fn ln_tail_sup<T: Real>(prof: &HeatProfile<T>, cutoff: usize) -> T {
    prof.ln_majorant(cutoff + 1)
}

/// A profile long enough that the `l^p` tail beyond its end is below `tol`
/// (relative); the cutoff doubles from [`initial_cutoff`].
pub fn certified_profile<T: Real>(tree: &TreeParams, t: T, p: T, tol: T) -> Result<HeatProfile<T>> {
    let mut cutoff = initial_cutoff(t.to_f64_lossy());
    loop {
        let prof = HeatProfile::new(tree, t, cutoff)?;
        if t == T::zero() {
            return Ok(prof);
        }
        let ln_total = pow_sum(&prof, p, 0, cutoff);
        let tail = if p.is_infinite() {
            ln_tail_sup(&prof, cutoff) - ln_total
        } else {
            ln_tail_pow(&prof, p, cutoff) - ln_total
        };
        if tail.exp() <= tol {
            return Ok(prof);
        }
        if cutoff > 1 << 22 {
            return Err(Error::Certification(format!("l^{p} tail at t = {t}")));
        }
        cutoff *= 2;
    }
}

/// `ln sum_{lo <= n <= hi} |S(o,n)| h_t(n)^p`, or `ln max h_t(n)` for `p = inf`.
pub fn pow_sum<T: Real>(prof: &HeatProfile<T>, p: T, lo: usize, hi: usize) -> T {
    let hi = hi.min(prof.nmax());
    if lo > hi {
        return T::neg_infinity();
    }
    if p.is_infinite() {
        return (lo..=hi).map(|n| prof.ln_value(n)).fold(T::neg_infinity(), T::max);
    }
    let tree = prof.tree();
    let terms: Vec<T> = (lo..=hi).map(|n| tree.ln_sphere_volume::<T>(n) + p * prof.ln_value(n)).collect();
    log_sum_exp(&terms)
}

/// `||h_t||_p` with a certified tail.
pub fn lp_norm<T: Real>(tree: &TreeParams, t: T, p: T) -> Result<LpNorm<T>> {
    let tol = T::lit(1e-13);
    let prof = certified_profile(tree, t, p, tol)?;
    lp_norm_of(&prof, p)
}

/// `||h_t||_p` from an existing profile; the tail bound covers radii past its end.
pub fn lp_norm_of<T: Real>(prof: &HeatProfile<T>, p: T) -> Result<LpNorm<T>> {
    if !(p >= T::one()) {
        return Err(crate::error::domain("lp_norm", format!("p must be >= 1, got {p}")));
    }
    let cutoff = prof.nmax();
    let ln_pow_sum = pow_sum(prof, p, 0, cutoff);
    let worst = (0..=cutoff).map(|n| prof.rel_bound(n)).fold(T::zero(), T::max);
    if prof.time() == T::zero() {
        return Ok(LpNorm { p, ln_pow_sum, tail_rel: T::zero(), value_rel: T::zero(), cutoff });
    }
    let (tail_rel, value_rel) = if p.is_infinite() {
        // h_t attains its maximum at the root; the tail is a sup bound.
        ((ln_tail_sup(prof, cutoff) - ln_pow_sum).exp(), worst)
    } else {
        ((ln_tail_pow(prof, p, cutoff) - ln_pow_sum).exp(), p * worst)
    };
    Ok(LpNorm { p, ln_pow_sum, tail_rel, value_rel, cutoff })
}

/// Growth rule for a region radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusRule {
    /// `t^a`.
    Power(f64),
    /// `(ln t)^a`.
    LogPower(f64),
}

impl RadiusRule {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            RadiusRule::Power(a) => t.powf(a),
            RadiusRule::LogPower(a) => t.ln().max(0.0).powf(a),
        }
    }
}

/// Radius rules for the critical regions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusRules {
    /// Half-width of the annulus for `p < 2`.
    pub r: RadiusRule,
    /// Inner radius for `p = 2` (`r1 / sqrt t -> 0`, `r1 / ln t -> inf`).
    pub r1: RadiusRule,
    /// Outer radius for `p = 2` (`r2 / sqrt t -> inf`).
    pub r2: RadiusRule,
    /// Outer radius for `p > 2` (`r3 -> inf`).
    pub r3: RadiusRule,
}

impl Default for RadiusRules {
    fn default() -> Self {
        Self {
            r: RadiusRule::Power(0.75),
            r1: RadiusRule::LogPower(1.1),
            r2: RadiusRule::Power(0.75),
            r3: RadiusRule::LogPower(2.0),
        }
    }
}

/// Closed radial band `inner <= n <= outer` carrying the `l^p` mass of `h_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalRegion {
    pub p: f64,
    pub t: f64,
    pub inner: f64,
    pub outer: f64,
}

impl CriticalRegion {
    pub fn new(tree: &TreeParams, p: f64, t: f64, rules: &RadiusRules) -> Self {
        let (inner, outer) = if p < 2.0 {
            let c = tree.r_p(p) * t;
            let r = rules.r.at(t);
            ((c - r).max(0.0), c + r)
        } else if p == 2.0 {
            let (a, b) = (rules.r1.at(t), rules.r2.at(t));
            (a.min(b), b)
        } else {
            (0.0, rules.r3.at(t))
        };
        Self { p, t, inner, outer }
    }

    pub fn contains(&self, n: usize) -> bool {
        let x = n as f64;
        self.inner <= x && x <= self.outer
    }

    /// Integer radii `[lo, hi]` inside the region.
    pub fn int_range(&self) -> (usize, usize) {
        (self.inner.ceil() as usize, self.outer.floor() as usize)
    }
}

/// Share of `||h_t||_p^p` inside and outside a region (`p = inf`: sup ratios).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionMass {
    pub inside: f64,
    pub complement: f64,
    /// Relative tail bound already included in `complement`.
    pub tail_bound: f64,
}

pub fn region_mass(prof: &HeatProfile<f64>, region: &CriticalRegion) -> Result<RegionMass> {
    let p = region.p;
    let norm = lp_norm_of(prof, p)?;
    let (lo, hi) = region.int_range();
    let nmax = prof.nmax();
    if p.is_infinite() {
        let inside = (pow_sum(prof, p, lo, hi) - norm.ln_pow_sum).exp();
        let outside = (pow_sum(prof, p, hi + 1, nmax) - norm.ln_pow_sum).exp();
        let complement = outside.max(norm.tail_rel);
        return Ok(RegionMass { inside, complement, tail_bound: norm.tail_rel });
    }
    let inside = (pow_sum(prof, p, lo, hi) - norm.ln_pow_sum).exp();
    let below = if lo == 0 { f64::NEG_INFINITY } else { pow_sum(prof, p, 0, lo - 1) };
    let above = pow_sum(prof, p, hi + 1, nmax);
    let complement = (log_add_exp(below, above) - norm.ln_pow_sum).exp() + norm.tail_rel;
    Ok(RegionMass { inside, complement, tail_bound: norm.tail_rel })
}

/// `sum_n |S(o,n)| h_t(n) h_s(n)`, which equals `h_{t+s}(0)` by the semigroup law.
pub fn radial_pairing(a: &HeatProfile<f64>, b: &HeatProfile<f64>) -> f64 {
    let tree = a.tree();
    let hi = a.nmax().min(b.nmax());
    let terms: Vec<f64> = (0..=hi)
        .map(|n| tree.ln_sphere_volume::<f64>(n) + a.ln_value(n) + b.ln_value(n))
        .collect();
    log_sum_exp(&terms).exp()
}
