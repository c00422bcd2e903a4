//! Large-time asymptotics of `h_t`: regime classification by `|x|/t`, the
//! constant `C`, the ballistic and near-origin formulas, the Gaussian integral
//! behind the near-origin law, and predictions for kernel ratios.

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::heat_tree::HeatProfile;
use crate::logval::LogVal;
use crate::scalar::{neumaier_sum, Real};
use crate::special_fn::ZKernelTable;
use crate::tree_geom::TreeParams;

/// How `|x|` scales with `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// `|x|/t -> c0 > 0`.
    Ballistic { c0: f64 },
    /// `|x|/t -> 0`.
    Diffusive,
    /// `|x|/t -> inf`.
    SuperBallistic,
}

impl Regime {
    /// `s0 = gamma(0)/c0` in the ballistic case.
    pub fn s0(&self, tree: &TreeParams) -> Option<f64> {
        match *self {
            Regime::Ballistic { c0 } => Some(tree.gamma0::<f64>() / c0),
            _ => None,
        }
    }
}

/// `s0 / (1 + sqrt(1 + s0^2))`, the limit of the Bessel ratios along the path.
fn bessel_ratio_limit<T: Real>(s0: T) -> T {
    s0 / (T::one() + (T::one() + s0 * s0).sqrt())
}

/// `C = sum_{k>=1} q^{-k} (s0/(1+sqrt(1+s0^2)))^{2k}` and its limits.
pub fn constant_c<T: Real>(tree: &TreeParams, regime: Regime) -> Result<T> {
    let q = tree.qf::<T>();
    match regime {
        Regime::Diffusive => Ok((q - T::one()).recip()),
        Regime::SuperBallistic => Ok(T::zero()),
        Regime::Ballistic { c0 } => {
            if !(c0 > 0.0) || !c0.is_finite() {
                return Err(domain("constant_c", format!("ballistic speed must be finite and > 0, got {c0}")));
            }
            let s0 = tree.gamma0::<T>() / T::lit(c0);
            let r = bessel_ratio_limit(s0).powi(2) / q;
            Ok(r / (T::one() - r))
        }
    }
}

/// A predicted kernel value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticPrediction<T> {
    pub value: LogVal<T>,
    pub c: T,
    pub regime: Regime,
}

/// `(2/g)(C+1) e^{-(1-g)t}/t (1+n) q^{-n/2} h^Z_{g t}(n+1)`.
pub fn predict_ballistic<T: Real>(tree: &TreeParams, n: usize, t: T, regime: Regime) -> Result<AsymptoticPrediction<T>> {
    if n < 1 || !(t > T::zero()) {
        return Err(domain("predict_ballistic", format!("need n >= 1 and t > 0, got n = {n}, t = {t}")));
    }
    let c = constant_c::<T>(tree, regime)?;
    let g = tree.gamma0::<T>();
    let z = ZKernelTable::new(g * t, n + 1)?;
    let ln = (T::lit(2.0) / g).ln() + (c + T::one()).ln() - (T::one() - g) * t - t.ln()
        + T::from_usize_lossy(n + 1).ln()
        - T::lit(0.5) * T::from_usize_lossy(n) * tree.ln_q::<T>()
        + z.ln_value((n + 1) as i64);
    Ok(AsymptoticPrediction { value: LogVal::from_ln(ln), c, regime })
}

/// `sqrt(2/pi) q(q+1)/(q-1)^2 g^{-3/2} e^{-(1-g)t} t^{-3/2} phi_0(n)`.
pub fn predict_near_origin<T: Real>(tree: &TreeParams, n: usize, t: T) -> Result<AsymptoticPrediction<T>> {
    if !(t > T::zero()) {
        return Err(domain("predict_near_origin", format!("t must be > 0, got {t}")));
    }
    let q = tree.qf::<T>();
    let g = tree.gamma0::<T>();
    let c = q * (q + T::one()) / (q - T::one()).powi(2);
    let ln = (T::lit(2.0) / T::PI()).sqrt().ln() + c.ln() - T::lit(1.5) * g.ln() - (T::one() - g) * t
        - T::lit(1.5) * t.ln()
        + tree.ln_phi0::<T>(n);
    Ok(AsymptoticPrediction { value: LogVal::from_ln(ln), c: c - T::one(), regime: Regime::Diffusive })
}

/// `int_0^{tau/2} e^{-delta t sin^2(lambda ln q / 2)} sin^2(lambda ln q) d lambda`
/// divided by its leading term `(2 sqrt(pi) / ln q) (delta t)^{-3/2}`.
///
/// In `theta = lambda ln q` the integrand is even and `2 pi`-periodic, so the
/// periodic trapezoid converges geometrically; nodes double until the value
/// settles to `1e-14`.
pub fn gauss_integral_check<T: Real>(tree: &TreeParams, delta: T, t: T) -> Result<T> {
    if !(delta > T::zero()) || !(t > T::zero()) {
        return Err(domain("gauss_integral_check", "need delta > 0 and t > 0"));
    }
    let lq = tree.ln_q::<T>();
    let a = delta * t;
    let integral = |nodes: usize| -> T {
        let h = T::lit(2.0) * T::PI() / T::from_usize_lossy(nodes);
        let s = neumaier_sum((0..nodes).map(|k| {
            let th = h * T::from_usize_lossy(k) - T::PI();
            (-a * (th * T::lit(0.5)).sin().powi(2)).exp() * th.sin().powi(2)
        }));
        // half of the full period, then d lambda = d theta / ln q
        s * h * T::lit(0.5) / lq
    };
    let mut nodes = 64;
    let mut prev = integral(nodes);
    loop {
        nodes *= 2;
        let cur = integral(nodes);
        if (cur - prev).abs() <= T::lit(1e-14) * cur.abs() || nodes >= 1 << 22 {
            let lead = T::lit(2.0) * T::PI().sqrt() / lq * a.powf(T::lit(-1.5));
            return Ok(cur / lead);
        }
        prev = cur;
    }
}

/// Which ratio law applies to `h_t(d(x,y)) / h_t(d(x,o))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatioRegime {
    /// `|x| ~ c0 t`: ratio `(sqrt q (1 + sqrt(1+s0^2)) / s0)^offset`.
    Ballistic { c0: f64 },
    /// Inside the `l^2` window: ratio `q^{offset/2}`.
    L2Window,
}

/// Predicted `h_t(d(x,y)) / h_t(d(x,o))` for `offset = d(x,o) - d(x,y)`.
pub fn ratio_prediction<T: Real>(tree: &TreeParams, offset: i64, regime: RatioRegime) -> Result<T> {
    let q = tree.qf::<T>();
    let base = match regime {
        RatioRegime::Ballistic { c0 } => {
            if !(c0 > 0.0) {
                return Err(domain("ratio_prediction", "ballistic speed must be > 0"));
            }
            let s0 = tree.gamma0::<T>() / T::lit(c0);
            q.sqrt() * bessel_ratio_limit(s0).recip()
        }
        RatioRegime::L2Window => q.sqrt(),
    };
    Ok(base.powi(offset as i32))
}

/// Empirical `h_t(n - offset) / h_t(n)` from a profile.
pub fn empirical_ratio<T: Real>(prof: &HeatProfile<T>, n: usize, offset: i64) -> T {
    let m = (n as i64 - offset) as usize;
    (prof.ln_value(m) - prof.ln_value(n)).exp()
}

/// Radius as a function of time along a ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Path {
    /// `n = floor(c t)`.
    Linear(f64),
    /// `n = floor(t^a)`.
    Power(f64),
    /// Fixed radius.
    Fixed(usize),
}

impl Path {
    pub fn radius(&self, t: f64) -> usize {
        match *self {
            Path::Linear(c) => (c * t).floor() as usize,
            Path::Power(a) => t.powf(a).floor() as usize,
            Path::Fixed(n) => n,
        }
    }
}

/// Which formula a ladder compares against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PredictionKind {
    /// Ballistic formula with a fixed regime.
    Theorem(Regime),
    /// Ballistic formula with the path-local speed `c0 = n/t`.
    PathLocal,
    NearOrigin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderRow {
    pub t: f64,
    pub n: usize,
    pub ln_empirical: f64,
    pub ln_predicted: f64,
    pub c: f64,
    /// Relative error bound on the empirical value.
    pub rel_bound: f64,
}

impl LadderRow {
    pub fn ratio(&self) -> f64 {
        (self.ln_empirical - self.ln_predicted).exp()
    }

    pub fn deviation(&self) -> f64 {
        (self.ratio() - 1.0).abs()
    }
}

/// `h_t(n(t)) / prediction` along a time ladder (parallel over `t`, ordered output).
pub fn ladder(tree: &TreeParams, path: Path, kind: PredictionKind, ts: &[f64]) -> Result<Vec<LadderRow>> {
    ts.par_iter()
        .map(|&t| {
            let n = path.radius(t);
            let prof = HeatProfile::new(tree, t, n)?;
            let pred = match kind {
                PredictionKind::Theorem(regime) => predict_ballistic(tree, n, t, regime)?,
                PredictionKind::PathLocal => predict_ballistic(tree, n, t, Regime::Ballistic { c0: n as f64 / t })?,
                PredictionKind::NearOrigin => predict_near_origin(tree, n, t)?,
            };
            Ok(LadderRow {
                t,
                n,
                ln_empirical: prof.ln_value(n),
                ln_predicted: pred.value.ln_abs(),
                c: pred.c,
                rel_bound: prof.rel_bound(n),
            })
        })
        .collect()
}

/// `true` if `|ratio - 1|` strictly decreases along the ladder.
pub fn strictly_decreasing(rows: &[LadderRow]) -> bool {
    rows.windows(2).all(|w| w[1].deviation() < w[0].deviation())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp(q: u32) -> TreeParams {
        TreeParams::new(q).unwrap()
    }

    #[test]
    fn constant_c_values_and_limits() {
        for q in [2, 3, 5] {
            let t = tp(q);
            let qf = q as f64;
            assert_eq!(constant_c::<f64>(&t, Regime::Diffusive).unwrap(), 1.0 / (qf - 1.0));
            assert_eq!(constant_c::<f64>(&t, Regime::SuperBallistic).unwrap(), 0.0);
            let near0: f64 = constant_c(&t, Regime::Ballistic { c0: 1e-3 }).unwrap();
            assert!((near0 - 1.0 / (qf - 1.0)).abs() < 1e-2);
            let far: f64 = constant_c(&t, Regime::Ballistic { c0: 1e3 }).unwrap();
            assert!(far < 1e-6);
            let bound = qf * (qf + 1.0) / (qf - 1.0).powi(2);
            for k in 1..200 {
                let c: f64 = constant_c(&t, Regime::Ballistic { c0: k as f64 * 0.02 }).unwrap();
                assert!((0.0..=1.0 / (qf - 1.0)).contains(&c));
                assert!(c + 1.0 <= bound);
            }
        }
        assert!(constant_c::<f64>(&tp(2), Regime::Ballistic { c0: 0.0 }).is_err());
    }

    #[test]
    fn constant_c_is_the_geometric_series() {
        let t = tp(3);
        let c0 = 0.4;
        let s0 = t.gamma0::<f64>() / c0;
        let r = (s0 / (1.0 + (1.0 + s0 * s0).sqrt())).powi(2) / 3.0;
        let direct: f64 = (1..200).map(|k| r.powi(k)).sum();
        let closed: f64 = constant_c(&t, Regime::Ballistic { c0 }).unwrap();
        assert!((direct - closed).abs() < 1e-15);
    }

    #[test]
    fn remark_identity_q_to_one_over_p() {
        for q in [2, 3, 5] {
            let t = tp(q);
            for k in 0..10 {
                let p = 1.0 + 0.1 * k as f64;
                let c0 = t.r_p(p);
                let s0 = t.gamma0::<f64>() / c0;
                let lhs = (q as f64).sqrt() * (1.0 + (1.0 + s0 * s0).sqrt()) / s0;
                assert!((lhs - (q as f64).powf(1.0 / p)).abs() < 1e-12, "q={q} p={p}");
                let r: f64 = ratio_prediction(&t, 3, RatioRegime::Ballistic { c0 }).unwrap();
                assert!((r / (q as f64).powf(3.0 / p) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ratio_prediction_offset_zero() {
        let t = tp(2);
        assert_eq!(ratio_prediction::<f64>(&t, 0, RatioRegime::L2Window).unwrap(), 1.0);
        assert_eq!(ratio_prediction::<f64>(&t, 0, RatioRegime::Ballistic { c0: 0.3 }).unwrap(), 1.0);
        assert!((ratio_prediction::<f64>(&t, 2, RatioRegime::L2Window).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn predictions_reject_bad_input() {
        let t = tp(2);
        assert!(predict_ballistic::<f64>(&t, 0, 10.0, Regime::Diffusive).is_err());
        assert!(predict_near_origin::<f64>(&t, 0, 0.0).is_err());
        assert!(gauss_integral_check::<f64>(&t, -1.0, 10.0).is_err());
    }

    #[test]
    fn gauss_integral_against_midpoint_oracle() {
        // independent midpoint rule in lambda on [0, tau/2]
        let t = tp(2);
        let (delta, time) = (2.0 * t.gamma0::<f64>(), 1.0);
        let lq = 2f64.ln();
        let half_tau = std::f64::consts::PI / lq;
        let m = 200_000;
        let h = half_tau / m as f64;
        let raw: f64 = (0..m)
            .map(|k| {
                let l = (k as f64 + 0.5) * h;
                (-delta * time * (l * lq / 2.0).sin().powi(2)).exp() * (l * lq).sin().powi(2) * h
            })
            .sum();
        let lead = 2.0 * std::f64::consts::PI.sqrt() / lq * (delta * time).powf(-1.5);
        let r = gauss_integral_check(&t, delta, time).unwrap();
        assert!((r - raw / lead).abs() < 1e-9);
    }

    #[test]
    fn gauss_integral_ratio_tends_to_one() {
        let t = tp(2);
        let delta = 2.0 * t.gamma0::<f64>();
        let mut prev = f64::MAX;
        for &time in &[10.0, 100.0, 1e3, 1e4] {
            let d = (gauss_integral_check(&t, delta, time).unwrap() - 1.0).abs();
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 0.02);
        // the leading term depends on delta t only
        let a = gauss_integral_check(&t, delta, 500.0).unwrap();
        let b = gauss_integral_check(&t, 2.0 * delta, 250.0).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn near_origin_exponent() {
        // ln h_t(0) + (1-g) t + 1.5 ln t tends to a constant
        let t = tp(2);
        let g: f64 = t.gamma0();
        let f = |time: f64| {
            let p = HeatProfile::new(&t, time, 0).unwrap();
            p.ln_value(0) + (1.0 - g) * time
        };
        let slope = (f(4000.0) - f(2000.0)) / (4000f64.ln() - 2000f64.ln());
        assert!((slope + 1.5).abs() < 0.02, "slope={slope}");
    }

    #[test]
    fn ballistic_ladder_small() {
        let rows = ladder(&tp(2), Path::Linear(0.3), PredictionKind::Theorem(Regime::Ballistic { c0: 0.3 }), &[250.0, 500.0, 1000.0]).unwrap();
        assert!(strictly_decreasing(&rows));
        assert!(rows[2].deviation() < 1e-3);
    }
}
