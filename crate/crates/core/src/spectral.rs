//! Spherical harmonic analysis on `T_q`: `gamma(lambda)`, spherical functions,
//! the c-function, the Plancherel density, the spherical transform and its
//! inversion, the Helgason–Fourier transform and the heat multiplier.
//!
//! With `theta = lambda ln q` and Chebyshev polynomials of the second kind,
//!
//! ```text
//! phi_lambda(n) = q^{-n/2} [ q U_n(cos theta) - U_{n-2}(cos theta) ] / (q + 1),
//! ```
//!
//! an entire function of `lambda` that covers all three classical branches at
//! once. It is evaluated through the scaled recurrence for `V_n = q^{-n/2} U_n`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{neumaier_sum, Real};
use crate::tree_geom::{busemann_profile, FiniteFn, RadialFn, TreeParams, Vertex};

/// Which closed form of `phi_lambda` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaCase {
    /// `lambda ∈ tau Z`.
    Lattice,
    /// `lambda ∈ tau/2 + tau Z`.
    HalfLattice,
    Generic,
}

/// Distance (in units of `lambda`) under which a value counts as a lattice point.
pub const LATTICE_TOL: f64 = 1e-8;

/// `lambda` together with its branch tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalFnParams<T> {
    pub lambda: Complex<T>,
    pub case: LambdaCase,
}

impl<T: Real> SphericalFnParams<T> {
    pub fn new(tree: &TreeParams, lambda: Complex<T>) -> Self {
        Self { lambda, case: classify(tree, lambda) }
    }
}

pub fn classify<T: Real>(tree: &TreeParams, lambda: Complex<T>) -> LambdaCase {
    let tol = T::lit(LATTICE_TOL);
    if lambda.im.abs() > tol {
        return LambdaCase::Generic;
    }
    let half = tree.tau::<T>() * T::lit(0.5);
    let k = (lambda.re / half).round();
    if (lambda.re - k * half).abs() > tol {
        return LambdaCase::Generic;
    }
    if k.to_f64_lossy().rem_euclid(2.0) == 0.0 {
        LambdaCase::Lattice
    } else {
        LambdaCase::HalfLattice
    }
}

fn cplx<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// `gamma(lambda) = gamma(0) cos(lambda ln q)`.
pub fn gamma<T: Real>(tree: &TreeParams, lambda: Complex<T>) -> Complex<T> {
    (lambda * tree.ln_q::<T>()).cos() * tree.gamma0::<T>()
}

/// `gamma(i delta) = gamma(0) cosh(delta ln q)`.
pub fn gamma_imag<T: Real>(tree: &TreeParams, delta: T) -> T {
    tree.gamma0::<T>() * (delta * tree.ln_q::<T>()).cosh()
}

/// The c-function
/// `c(z) = (q^{1/2+iz} - q^{-1/2-iz}) / ((q^{1/2} + q^{-1/2})(q^{iz} - q^{-iz}))`.
///
/// Poles on `(tau/2) Z` are reported as [`Error::Pole`].
pub fn c_function<T: Real>(tree: &TreeParams, z: Complex<T>) -> Result<Complex<T>> {
    if classify(tree, z) != LambdaCase::Generic {
        return Err(Error::Pole { re: z.re.to_f64_lossy(), im: z.im.to_f64_lossy() });
    }
    let s = tree.qf::<T>().sqrt();
    let u = (Complex::<T>::i() * z * tree.ln_q::<T>()).exp();
    let num = u * s - (u * s).inv();
    let den = (u - u.inv()) * (s + s.recip());
    Ok(num / den)
}

/// `1 / c(-z)`, entire in the closed upper half plane `Im z >= 0`.
pub fn inv_c_minus<T: Real>(tree: &TreeParams, z: Complex<T>) -> Complex<T> {
    let s = tree.qf::<T>().sqrt();
    let w = z * tree.ln_q::<T>();
    let e = (Complex::<T>::i() * w).exp();
    let num = (e.inv() - e) * (s + s.recip());
    let den = e.inv() * s - e / s;
    num / den
}

/// Plancherel density `|c(lambda)|^{-2}` for real `lambda`.
pub fn plancherel_density<T: Real>(tree: &TreeParams, lambda: T) -> T {
    let q = tree.qf::<T>();
    let th = lambda * tree.ln_q::<T>();
    let (s2, c2) = (th.sin().powi(2), th.cos().powi(2));
    let a = (q + T::one()).powi(2);
    T::lit(4.0) * a * s2 / (a * s2 + (q - T::one()).powi(2) * c2)
}

/// `phi_lambda(0..=nmax)` from the scaled Chebyshev recurrence.
fn spherical_recurrence<T: Real>(tree: &TreeParams, x: Complex<T>, nmax: usize) -> Vec<Complex<T>> {
    let q = tree.qf::<T>();
    let rq = q.sqrt().recip();
    let iq = q.recip();
    let norm = (q + T::one()).recip();
    // V_{-2} = -q, V_{-1} = 0, V_0 = 1
    let (mut vm2, mut vm1, mut v) = (cplx(-q), cplx(T::zero()), cplx(T::one()));
    let mut out = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        out.push((v * q - vm2 * iq) * norm);
        if n == nmax {
            break;
        }
        let next = x * v * (T::lit(2.0) * rq) - vm1 * iq;
        vm2 = vm1;
        vm1 = v;
        v = next;
    }
    out
}

/// `phi_lambda(n)`.
pub fn spherical_fn<T: Real>(tree: &TreeParams, lambda: Complex<T>, n: usize) -> Complex<T> {
    spherical_fn_table(tree, lambda, n)[n]
}

/// `phi_lambda(0..=nmax)`.
pub fn spherical_fn_table<T: Real>(tree: &TreeParams, lambda: Complex<T>, nmax: usize) -> Vec<Complex<T>> {
    match classify(tree, lambda) {
        LambdaCase::Lattice => (0..=nmax).map(|n| cplx(tree.phi0::<T>(n))).collect(),
        LambdaCase::HalfLattice => (0..=nmax)
            .map(|n| {
                let v = tree.phi0::<T>(n);
                cplx(if n % 2 == 0 { v } else { -v })
            })
            .collect(),
        LambdaCase::Generic => spherical_recurrence(tree, (lambda * tree.ln_q::<T>()).cos(), nmax),
    }
}

/// `phi_lambda(n) = c(lambda) q^{(i lambda - 1/2) n} + c(-lambda) q^{(-i lambda - 1/2) n}`,
/// the generic-branch expansion. Fails on the pole lattice.
pub fn spherical_fn_expansion<T: Real>(tree: &TreeParams, lambda: Complex<T>, n: usize) -> Result<Complex<T>> {
    let lq = tree.ln_q::<T>();
    let nf = T::from_usize_lossy(n);
    let half = cplx(T::lit(0.5));
    let a = c_function(tree, lambda)? * ((Complex::<T>::i() * lambda - half) * lq * nf).exp();
    let b = c_function(tree, -lambda)? * ((-Complex::<T>::i() * lambda - half) * lq * nf).exp();
    Ok(a + b)
}

/// `phi_{i delta}(0..=nmax)`, real, via the real hyperbolic recurrence.
pub fn spherical_fn_imag_table<T: Real>(tree: &TreeParams, delta: T, nmax: usize) -> Vec<T> {
    let x = (delta * tree.ln_q::<T>()).cosh();
    let q = tree.qf::<T>();
    let rq = q.sqrt().recip();
    let iq = q.recip();
    let norm = (q + T::one()).recip();
    let (mut vm2, mut vm1, mut v) = (-q, T::zero(), T::one());
    let mut out = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        out.push((v * q - vm2 * iq) * norm);
        if n == nmax {
            break;
        }
        let next = T::lit(2.0) * x * rq * v - iq * vm1;
        vm2 = vm1;
        vm1 = v;
        v = next;
    }
    out
}

pub fn spherical_fn_imag<T: Real>(tree: &TreeParams, delta: T, n: usize) -> T {
    spherical_fn_imag_table(tree, delta, n)[n]
}

/// `H f(lambda) = f(0) + sum_{n>=1} (q+1) q^{n-1} f(n) phi_lambda(n)` for radial `f`.
pub fn spherical_transform<T: Real>(tree: &TreeParams, f: &RadialFn<T>, lambda: Complex<T>) -> Complex<T> {
    let Some(rho) = f.support_radius() else {
        return cplx(T::zero());
    };
    let phi = spherical_fn_table(tree, lambda, rho);
    let terms: Vec<Complex<T>> = (0..=rho)
        .map(|n| phi[n] * (f.at(n) * tree.ln_sphere_volume::<T>(n).exp()))
        .collect();
    Complex::new(neumaier_sum(terms.iter().map(|c| c.re)), neumaier_sum(terms.iter().map(|c| c.im)))
}

/// `H f(i delta)`, real.
pub fn spherical_transform_imag<T: Real>(tree: &TreeParams, f: &RadialFn<T>, delta: T) -> T {
    let Some(rho) = f.support_radius() else {
        return T::zero();
    };
    let phi = spherical_fn_imag_table(tree, delta, rho);
    neumaier_sum((0..=rho).map(|n| phi[n] * f.at(n) * tree.ln_sphere_volume::<T>(n).exp()))
}

/// `m_t(lambda) = e^{-t (1 - gamma(lambda))}`.
pub fn heat_multiplier<T: Real>(tree: &TreeParams, lambda: Complex<T>, t: T) -> Complex<T> {
    ((cplx(T::one()) - gamma(tree, lambda)) * (-t)).exp()
}

/// Periodic-trapezoid grid on `[0, tau/2]`: `lambda_k = k tau / (2N)`, `k = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    pub intervals: usize,
}

pub const MIN_GRID: usize = 64;
pub const START_GRID: usize = 256;
pub const MAX_GRID: usize = 1 << 16;

impl SpectralGrid {
    pub fn new(intervals: usize) -> Result<Self> {
        if intervals < MIN_GRID {
            return Err(crate::error::domain("SpectralGrid", format!("need at least {MIN_GRID} intervals")));
        }
        Ok(Self { intervals })
    }

    pub fn nodes<T: Real>(&self, tree: &TreeParams) -> Vec<T> {
        let h = tree.tau::<T>() / T::from_usize_lossy(2 * self.intervals);
        (0..=self.intervals).map(|k| h * T::from_usize_lossy(k)).collect()
    }

    /// Trapezoid weights on `[0, tau/2]`, endpoints halved.
    pub fn weights<T: Real>(&self, tree: &TreeParams) -> Vec<T> {
        let h = tree.tau::<T>() / T::from_usize_lossy(2 * self.intervals);
        (0..=self.intervals)
            .map(|k| if k == 0 || k == self.intervals { h * T::lit(0.5) } else { h })
            .collect()
    }

    pub fn refined(&self) -> Self {
        Self { intervals: 2 * self.intervals }
    }
}

/// Outcome of an adaptive inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionResult<T> {
    pub value: T,
    pub intervals: usize,
    /// `|I_N - I_{N/2}|` at the last refinement.
    pub last_change: T,
    /// Scale the change is measured against: the same quadrature applied to `|integrand|`.
    pub magnitude: T,
    pub converged: bool,
}

/// Inverse spherical transform of an even, `tau`-periodic `F` at radius `n`:
/// `(q ln q) / (4 pi (q+1)) * int_{-tau/2}^{tau/2} F phi_lambda(n) |c(lambda)|^{-2} d lambda`.
///
/// The integral is folded to `[0, tau/2]` and evaluated on a grid that doubles
/// from [`START_GRID`] until successive values differ by less than
/// `tol * magnitude`, or [`MAX_GRID`] is reached (then `converged = false`).
pub fn inverse_spherical<T: Real, F: Fn(T) -> T>(tree: &TreeParams, f: F, n: usize, tol: T) -> InversionResult<T> {
    let q = tree.qf::<T>();
    let pref = T::lit(2.0) * q * tree.ln_q::<T>() / (T::lit(4.0) * T::PI() * (q + T::one()));
    let eval = |grid: SpectralGrid| -> (T, T) {
        let nodes = grid.nodes::<T>(tree);
        let weights = grid.weights::<T>(tree);
        let terms: Vec<T> = nodes
            .iter()
            .zip(&weights)
            .map(|(&l, &w)| w * f(l) * spherical_fn(tree, cplx(l), n).re * plancherel_density(tree, l))
            .collect();
        (pref * neumaier_sum(terms.iter().copied()), pref * neumaier_sum(terms.iter().map(|x| x.abs())))
    };
    let mut grid = SpectralGrid { intervals: START_GRID };
    let (mut prev, _) = eval(grid);
    loop {
        grid = grid.refined();
        let (cur, mag) = eval(grid);
        let change = (cur - prev).abs();
        if change <= tol * mag || grid.intervals >= MAX_GRID {
            return InversionResult {
                value: cur,
                intervals: grid.intervals,
                last_change: change,
                magnitude: mag,
                converged: change <= tol * mag,
            };
        }
        prev = cur;
    }
}

/// Helgason–Fourier transform `sum_x f(x) q^{(1/2 + i lambda) h_omega(x)}` on a
/// boundary sector `Omega(o, sector)` deep enough that every `h_omega(x)` is
/// constant there.
pub fn helgason_fourier<T: Real>(f: &FiniteFn<T>, lambda: Complex<T>, sector: &Vertex) -> Result<Complex<T>> {
    let q = f.q();
    let rho = f.support_radius();
    if sector.depth() < rho.max(1) {
        return Err(Error::SectorTooShallow { depth: sector.depth(), support: format!("radius {rho}") });
    }
    let lq = T::from_int(q as i64).ln();
    let s = cplx(T::lit(0.5)) + Complex::<T>::i() * lambda;
    let mut acc = cplx(T::zero());
    for (x, v) in f.iter() {
        let h = busemann_profile(q, x, sector)?
            .is_point_mass()
            .expect("sector beyond the support gives point masses");
        acc = acc + (s * lq * T::from_int(h)).exp() * v;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_geom::{ball, sphere};

    fn tp(q: u32) -> TreeParams {
        TreeParams::new(q).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn gamma_values() {
        let t = tp(3);
        let g0: f64 = t.gamma0();
        assert!((gamma(&t, c(0.0, 0.0)).re - g0).abs() < 1e-15);
        assert!((gamma(&t, c(t.tau::<f64>() / 2.0, 0.0)).re + g0).abs() < 1e-15);
        for p in [1.1_f64, 1.5, 1.9] {
            let v = gamma(&t, c(0.0, 1.0 / p - 0.5));
            assert!(v.im.abs() < 1e-15 && v.re > g0);
            assert!((v.re - gamma_imag(&t, 1.0 / p - 0.5)).abs() < 1e-15);
        }
    }

    #[test]
    fn classification() {
        let t = tp(2);
        let tau: f64 = t.tau();
        assert_eq!(classify(&t, c(0.0, 0.0)), LambdaCase::Lattice);
        assert_eq!(classify(&t, c(-2.0 * tau, 0.0)), LambdaCase::Lattice);
        assert_eq!(classify(&t, c(1.5 * tau, 0.0)), LambdaCase::HalfLattice);
        assert_eq!(classify(&t, c(0.3, 0.0)), LambdaCase::Generic);
        assert_eq!(classify(&t, c(0.0, 0.2)), LambdaCase::Generic);
    }

    #[test]
    fn c_function_sum_rule_and_poles() {
        for q in [2, 3, 5] {
            let t = tp(q);
            for k in 1..200 {
                let l = k as f64 * 0.037 - 3.0;
                if classify(&t, c(l, 0.0)) != LambdaCase::Generic {
                    continue;
                }
                for im in [0.0, 0.2, -0.3] {
                    let z = c(l, im);
                    let s = c_function(&t, z).unwrap() + c_function(&t, -z).unwrap();
                    assert!((s - c(1.0, 0.0)).norm() < 1e-10, "q={q} z={z}");
                }
            }
            assert!(matches!(c_function(&t, c(0.0, 0.0)), Err(Error::Pole { .. })));
            assert!(c_function(&t, c(t.tau::<f64>() / 2.0, 0.0)).is_err());
        }
    }

    #[test]
    fn plancherel_density_matches_c_modulus() {
        for q in [2, 3, 7] {
            let t = tp(q);
            for k in 1..500 {
                let l = k as f64 * 0.011;
                let Ok(cv) = c_function(&t, c(l, 0.0)) else { continue };
                let a = 1.0 / cv.norm_sqr();
                let b = plancherel_density(&t, l);
                assert!((a - b).abs() < 1e-13 * b.max(1.0), "q={q} l={l}: {a} vs {b}");
            }
            assert!(plancherel_density(&t, 1e-9_f64) < 1e-15);
        }
    }

    #[test]
    fn inv_c_minus_agrees_with_c_function() {
        let t = tp(2);
        for z in [c(0.3, 0.0), c(1.1, 0.4), c(-2.0, 1.5)] {
            let a = inv_c_minus(&t, z);
            let b = c_function(&t, -z).unwrap().inv();
            assert!((a - b).norm() < 1e-13 * b.norm());
        }
    }

    #[test]
    fn spherical_fn_special_values() {
        for q in [2, 3] {
            let t = tp(q);
            let tau: f64 = t.tau();
            for l in [c(0.0, 0.0), c(tau / 2.0, 0.0), c(0.77, 0.0), c(0.4, 0.3)] {
                assert!((spherical_fn(&t, l, 0) - c(1.0, 0.0)).norm() < 1e-15);
            }
            for n in 0..30 {
                let one = spherical_fn(&t, c(0.0, 0.5), n);
                assert!((one - c(1.0, 0.0)).norm() < 1e-12, "q={q} n={n} {one}");
                assert!((spherical_fn_imag(&t, 0.5_f64, n) - 1.0).abs() < 1e-12);
                let nf = n as f64;
                let qf = q as f64;
                let phi0 = (1.0 + nf * (qf - 1.0) / (qf + 1.0)) * qf.powf(-nf / 2.0);
                assert!((spherical_fn(&t, c(0.0, 0.0), n).re - phi0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn symmetry_and_periodicity() {
        let t = tp(3);
        let tau: f64 = t.tau();
        for k in 0..40 {
            let l = c(k as f64 * 0.13, 0.05 * (k % 3) as f64);
            for n in [1, 4, 9] {
                let a = spherical_fn(&t, l, n);
                assert!((a - spherical_fn(&t, -l, n)).norm() < 1e-13);
                assert!((a - spherical_fn(&t, l + tau, n)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn generic_branch_is_continuous_at_the_lattice() {
        let t = tp(2);
        let tau: f64 = t.tau();
        for base in [0.0, tau / 2.0, tau] {
            for n in [0, 1, 5, 12] {
                let at = spherical_fn(&t, c(base, 0.0), n);
                let near = spherical_fn_expansion(&t, c(base + 1e-6, 0.0), n).unwrap();
                assert!((at - near).norm() < 1e-6, "base={base} n={n}");
                let rec = spherical_recurrence(&t, (c(base, 0.0) * t.ln_q::<f64>()).cos(), n)[n];
                assert!((at - rec).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn recurrence_matches_c_function_expansion() {
        for q in [2, 5] {
            let t = tp(q);
            for l in [c(0.3, 0.0), c(1.2, 0.1), c(0.9, -0.2)] {
                for n in 0..25 {
                    let a = spherical_fn(&t, l, n);
                    let b = spherical_fn_expansion(&t, l, n).unwrap();
                    assert!((a - b).norm() < 1e-12 * b.norm().max(1e-3), "q={q} l={l} n={n}");
                }
            }
        }
    }

    #[test]
    fn eigenrelation_on_ball_of_radius_8() {
        for q in [2, 3] {
            let t = tp(q);
            for l in [c(0.0, 0.0), c(0.35, 0.0), c(t.tau::<f64>() / 2.0, 0.0), c(0.7, 0.25), c(0.0, 0.4)] {
                let phi = spherical_fn_table(&t, l, 9);
                let g = gamma(&t, l);
                for x in ball(q, 8) {
                    let nb = x.neighbors(q);
                    let mean = nb.iter().fold(c(0.0, 0.0), |a, y| a + phi[y.depth()]) / (q as f64 + 1.0);
                    let lhs = phi[x.depth()] - mean;
                    let rhs = (c(1.0, 0.0) - g) * phi[x.depth()];
                    assert!((lhs - rhs).norm() < 1e-13, "q={q} l={l} x={x}");
                }
            }
        }
    }

    #[test]
    fn transform_examples() {
        let t = tp(2);
        let delta = RadialFn::new(vec![1.0]);
        let avg = RadialFn::new(vec![0.0, 1.0 / 3.0]);
        for l in [c(0.0, 0.0), c(0.5, 0.0), c(0.2, 0.3)] {
            assert!((spherical_transform(&t, &delta, l) - c(1.0, 0.0)).norm() < 1e-15);
            assert!((spherical_transform(&t, &avg, l) - gamma(&t, l)).norm() < 1e-15);
        }
        let f = RadialFn::new(vec![0.3, -1.0, 2.0, 0.5]);
        let a = spherical_transform(&t, &f, c(0.0, 0.2)).re;
        let b = spherical_transform_imag(&t, &f, 0.2);
        assert!((a - b).abs() < 1e-13 * b.abs());
    }

    #[test]
    fn inversion_of_identity_is_delta() {
        for q in [2, 3] {
            let t = tp(q);
            for n in 0..8 {
                let r = inverse_spherical(&t, |_| 1.0_f64, n, 1e-12);
                assert!(r.converged);
                let expect = if n == 0 { 1.0 } else { 0.0 };
                assert!((r.value - expect).abs() < 1e-10, "q={q} n={n} {}", r.value);
            }
        }
    }

    #[test]
    fn transform_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for q in [2, 3] {
            let t = tp(q);
            for _ in 0..3 {
                let f = RadialFn::new((0..=10).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>());
                for n in 0..=12 {
                    let r = inverse_spherical(&t, |l| spherical_transform(&t, &f, c(l, 0.0)).re, n, 1e-12);
                    assert!((r.value - f.at(n)).abs() < 1e-10, "q={q} n={n}");
                }
            }
        }
    }

    #[test]
    fn heat_multiplier_properties() {
        let t = tp(2);
        let l = c(0.4, 0.1);
        assert!((heat_multiplier(&t, l, 0.0) - c(1.0, 0.0)).norm() < 1e-15);
        let g0: f64 = t.gamma0();
        assert!((heat_multiplier(&t, c(0.0, 0.0), 3.0).re - (-(1.0 - g0) * 3.0).exp()).abs() < 1e-15);
        let ab = heat_multiplier(&t, l, 1.5) * heat_multiplier(&t, l, 2.5);
        assert!((ab - heat_multiplier(&t, l, 4.0)).norm() < 1e-14);
    }

    #[test]
    fn helgason_fourier_examples() {
        let q = 2;
        let t = tp(q);
        // radial data: independent of the sector and equal to the spherical transform
        let rad = RadialFn::new(vec![0.5, -0.25, 0.125]);
        let f = FiniteFn::from_radial(q, &rad);
        for l in [c(0.3, 0.0), c(0.1, 0.2)] {
            let h = spherical_transform(&t, &rad, l);
            for sector in sphere(q, 3) {
                let v = helgason_fourier(&f, l, &sector).unwrap();
                assert!((v - h).norm() < 1e-13, "sector={sector}");
            }
        }
        let o = FiniteFn::<f64>::delta(q, Vertex::root());
        assert!((helgason_fourier(&o, c(0.7, 0.0), &Vertex::parse("1", q).unwrap()).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let y = Vertex::parse("0.1", q).unwrap();
        let dy = FiniteFn::<f64>::delta(q, y);
        let sector = Vertex::parse("0.1.0", q).unwrap();
        let l = c(0.45, 0.0);
        let want = ((c(0.5, 0.0) + Complex::<f64>::i() * l) * (2.0 * (q as f64).ln())).exp();
        assert!((helgason_fourier(&dy, l, &sector).unwrap() - want).norm() < 1e-14);
        assert!(matches!(helgason_fourier(&dy, l, &Vertex::parse("0", q).unwrap()), Err(Error::SectorTooShallow { .. })));
    }

    #[test]
    fn boundary_integral_reproduces_spherical_fn() {
        use crate::tree_geom::boundary_busemann_profile;
        for q in [2, 3] {
            let t = tp(q);
            for l in [c(0.0, 0.0), c(0.37, 0.0), c(0.2, 0.15)] {
                let s = c(0.5, 0.0) + Complex::<f64>::i() * l;
                for n in 0..=8 {
                    let y = sphere(q, n).pop().unwrap();
                    let v = boundary_busemann_profile(q, &y).mean_power_complex(q, s);
                    assert!((v - spherical_fn(&t, l, n)).norm() < 1e-12, "q={q} l={l} n={n}");
                }
            }
        }
    }
}
