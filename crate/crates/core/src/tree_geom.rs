//! Exact combinatorics of the homogeneous tree `T_q` (every vertex has `q + 1`
//! neighbours): vertices as reduced words, distances, spheres, boundary sectors,
//! Busemann heights and the gate decomposition.
//!
//! A vertex is the word of letters read along the geodesic from the root `o`.
//! The first letter ranges over `0..=q`, every later one over `0..q`; the empty
//! word is `o`. Two vertices are adjacent iff one word extends the other by a
//! single letter.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Branching parameter `q` and the constants derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeParams {
    q: u32,
}

impl TreeParams {
    pub fn new(q: u32) -> Result<Self> {
        if q < 2 {
            return Err(domain("TreeParams", format!("q must be >= 2, got {q}")));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn qf<T: Real>(&self) -> T {
        T::from_int(self.q as i64)
    }

    pub fn ln_q<T: Real>(&self) -> T {
        self.qf::<T>().ln()
    }

    /// `gamma(0) = 2 sqrt(q) / (q + 1)`.
    pub fn gamma0<T: Real>(&self) -> T {
        let q = self.qf::<T>();
        T::lit(2.0) * q.sqrt() / (q + T::one())
    }

    /// Period of `lambda -> phi_lambda`: `tau = 2 pi / ln q`.
    pub fn tau<T: Real>(&self) -> T {
        T::lit(2.0) * T::PI() / self.ln_q::<T>()
    }

    /// `delta_p = 1/p - 1/2` for `p < 2`, zero for `p >= 2`.
    pub fn delta_p<T: Real>(&self, p: T) -> T {
        if p < T::lit(2.0) {
            p.recip() - T::lit(0.5)
        } else {
            T::zero()
        }
    }

    /// Centre of the `l^p` critical annulus, `R_p = (q^{1/p} - q^{1/p'}) / (q + 1)`;
    /// zero for `p >= 2`.
    pub fn r_p<T: Real>(&self, p: T) -> T {
        if p >= T::lit(2.0) {
            return T::zero();
        }
        let q = self.qf::<T>();
        let a = p.recip();
        (q.powf(a) - q.powf(T::one() - a)) / (q + T::one())
    }

    /// `b_p = 1 - gamma(i delta_p) = 1 - gamma(0) cosh(delta_p ln q)`.
    pub fn b_p<T: Real>(&self, p: T) -> T {
        T::one() - self.gamma0::<T>() * (self.delta_p(p) * self.ln_q::<T>()).cosh()
    }

    /// `|S(o, n)|`, exactly.
    pub fn sphere_volume(&self, n: i64) -> Result<BigUint> {
        if n < 0 {
            return Err(domain("sphere_volume", format!("radius must be >= 0, got {n}")));
        }
        if n == 0 {
            return Ok(BigUint::one());
        }
        Ok(BigUint::from(self.q + 1) * BigUint::from(self.q).pow(n as u32 - 1))
    }

    /// `ln |S(o, n)|` for `n >= 0`.
    pub fn ln_sphere_volume<T: Real>(&self, n: usize) -> T {
        if n == 0 {
            T::zero()
        } else {
            (self.qf::<T>() + T::one()).ln() + T::from_usize_lossy(n - 1) * self.ln_q::<T>()
        }
    }

    /// `phi_0(n) = (1 + n (q-1)/(q+1)) q^{-n/2}`.
    pub fn phi0<T: Real>(&self, n: usize) -> T {
        self.ln_phi0::<T>(n).exp()
    }

    pub fn ln_phi0<T: Real>(&self, n: usize) -> T {
        let q = self.qf::<T>();
        let nf = T::from_usize_lossy(n);
        (T::one() + nf * (q - T::one()) / (q + T::one())).ln() - T::lit(0.5) * nf * q.ln()
    }
}

/// A vertex of `T_q`, stored as its reduced word from the root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Vertex {
    word: Vec<u32>,
}

impl Vertex {
    pub fn root() -> Self {
        Self { word: Vec::new() }
    }

    pub fn from_word(word: Vec<u32>, q: u32) -> Result<Self> {
        for (i, &a) in word.iter().enumerate() {
            let bound = if i == 0 { q + 1 } else { q };
            if a >= bound {
                return Err(Error::InvalidVertex {
                    word: format!("{word:?}"),
                    q,
                    detail: format!("letter {i} is {a}, must be < {bound}"),
                });
            }
        }
        Ok(Self { word })
    }

    /// Parses `"0.1.1"`; the empty string is the root.
    pub fn parse(s: &str, q: u32) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::root());
        }
        let word = s
            .split('.')
            .map(|part| {
                part.trim().parse::<u32>().map_err(|e| Error::InvalidVertex {
                    word: s.to_string(),
                    q,
                    detail: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_word(word, q)
    }

    pub fn word(&self) -> &[u32] {
        &self.word
    }

    /// `|x| = d(o, x)`.
    pub fn depth(&self) -> usize {
        self.word.len()
    }

    pub fn is_root(&self) -> bool {
        self.word.is_empty()
    }

    pub fn parent(&self) -> Option<Self> {
        if self.is_root() {
            None
        } else {
            Some(self.ancestor(self.depth() - 1))
        }
    }

    /// The vertex at depth `k` on `[o, x]`. Panics if `k > |x|`.
    pub fn ancestor(&self, k: usize) -> Self {
        Self { word: self.word[..k].to_vec() }
    }

    pub fn child(&self, letter: u32) -> Self {
        let mut word = self.word.clone();
        word.push(letter);
        Self { word }
    }

    /// Number of children: `q + 1` at the root, `q` elsewhere.
    pub fn child_count(&self, q: u32) -> u32 {
        if self.is_root() {
            q + 1
        } else {
            q
        }
    }

    pub fn children(&self, q: u32) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.child_count(q)).map(move |a| self.child(a))
    }

    pub fn neighbors(&self, q: u32) -> Vec<Vertex> {
        self.parent().into_iter().chain(self.children(q)).collect()
    }

    /// `|x ∧ y|`, the length of the longest common prefix.
    pub fn meet_depth(&self, other: &Self) -> usize {
        self.word.iter().zip(&other.word).take_while(|(a, b)| a == b).count()
    }

    /// `self ∈ [o, other]`.
    pub fn is_prefix_of(&self, other: &Self) -> bool {
        self.depth() <= other.depth() && other.word[..self.depth()] == self.word[..]
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for a in &self.word {
            if !first {
                f.write_str(".")?;
            }
            write!(f, "{a}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vertex({self})")
    }
}

/// `d(x, y) = |x| + |y| - 2 |x ∧ y|`.
pub fn distance(x: &Vertex, y: &Vertex) -> usize {
    x.depth() + y.depth() - 2 * x.meet_depth(y)
}

/// All vertices of `S(o, n)` in lexicographic order.
pub fn sphere(q: u32, n: usize) -> Vec<Vertex> {
    let mut layer = vec![Vertex::root()];
    for _ in 0..n {
        layer = layer.iter().flat_map(|v| v.children(q).collect::<Vec<_>>()).collect();
    }
    layer
}

/// All vertices of the closed ball `B(o, r)`, by depth.
pub fn ball(q: u32, r: usize) -> Vec<Vertex> {
    (0..=r).flat_map(|n| sphere(q, n)).collect()
}

/// Harmonic measure of the sector `Omega(o, x)`: `1` at the root, else
/// `1 / ((q + 1) q^{|x| - 1})`.
pub fn sector_measure(q: u32, x: &Vertex) -> BigRational {
    let vol = TreeParams { q }.sphere_volume(x.depth() as i64).expect("depth >= 0");
    BigRational::new(1.into(), vol.into())
}

/// Exact law of an integer-valued height: `(value, probability)` atoms sorted by value.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightDistribution {
    atoms: Vec<(i64, BigRational)>,
}

impl HeightDistribution {
    fn point(h: i64) -> Self {
        Self { atoms: vec![(h, BigRational::one())] }
    }

    fn from_atoms(mut atoms: Vec<(i64, BigRational)>) -> Self {
        atoms.sort_by_key(|a| a.0);
        let mut merged: Vec<(i64, BigRational)> = Vec::with_capacity(atoms.len());
        for (h, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == h => last.1 += w,
                _ => merged.push((h, w)),
            }
        }
        merged.retain(|a| !a.1.is_zero());
        Self { atoms: merged }
    }

    pub fn atoms(&self) -> &[(i64, BigRational)] {
        &self.atoms
    }

    pub fn total(&self) -> BigRational {
        self.atoms.iter().map(|a| a.1.clone()).sum()
    }

    pub fn is_point_mass(&self) -> Option<i64> {
        match self.atoms.as_slice() {
            [(h, _)] => Some(*h),
            _ => None,
        }
    }

    /// `E[q^{s h}]` for real `s`.
    pub fn mean_power<T: Real>(&self, q: u32, s: T) -> T {
        let lq = T::from_int(q as i64).ln();
        self.atoms
            .iter()
            .map(|(h, w)| rational_to::<T>(w) * (s * T::from_int(*h) * lq).exp())
            .sum()
    }

    /// `E[q^{s h}]` for complex `s`.
    pub fn mean_power_complex<T: Real>(&self, q: u32, s: Complex<T>) -> Complex<T> {
        let lq = T::from_int(q as i64).ln();
        self.atoms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, (h, w)| {
            acc + (s * T::from_int(*h) * lq).exp() * rational_to::<T>(w)
        })
    }
}

fn rational_to<T: Real>(r: &BigRational) -> T {
    use num_traits::ToPrimitive;
    T::lit(r.to_f64().expect("finite rational"))
}

/// Law of the Busemann height `h_omega(y) = 2 |c(y, omega)| - |y|` for `omega`
/// drawn from the harmonic measure conditioned on the sector `Omega(o, x)`.
///
/// Off the ray through `x` the confluent point is `y ∧ x` for every `omega` in the
/// sector, giving a point mass. If `x ∈ [o, y]`, `omega` follows `[x, y]` for
/// exactly `i` more steps with probability `(1 - 1/q) q^{-i}`, `i < d(x, y)`, and
/// passes through `y` with the remaining mass `q^{-d(x, y)}`.
pub fn busemann_profile(q: u32, y: &Vertex, x: &Vertex) -> Result<HeightDistribution> {
    if x.is_root() {
        return Err(domain(
            "busemann_profile",
            "the sector of the root is the whole boundary; use boundary_busemann_profile",
        ));
    }
    let ny = y.depth() as i64;
    if !x.is_prefix_of(y) {
        return Ok(HeightDistribution::point(2 * x.meet_depth(y) as i64 - ny));
    }
    let nx = x.depth() as i64;
    let d = ny - nx;
    let qb = || BigRational::from_integer(q.into());
    let keep = BigRational::one() - qb().recip();
    let mut atoms = Vec::with_capacity(d as usize + 1);
    let mut stay = BigRational::one();
    for i in 0..d {
        atoms.push((2 * (nx + i) - ny, &keep * &stay));
        stay /= qb();
    }
    atoms.push((ny, stay));
    Ok(HeightDistribution::from_atoms(atoms))
}

/// Law of `h_omega(y)` under the full harmonic measure on the boundary.
pub fn boundary_busemann_profile(q: u32, y: &Vertex) -> HeightDistribution {
    if y.is_root() {
        return HeightDistribution::point(0);
    }
    let ny = y.depth() as i64;
    let away = BigRational::new(q.into(), (q + 1).into());
    let along = BigRational::new(1.into(), (q + 1).into());
    let first = y.ancestor(1);
    let inner = busemann_profile(q, y, &first).expect("first is not the root");
    let mut atoms = vec![(-ny, away)];
    atoms.extend(inner.atoms.into_iter().map(|(h, w)| (h, w * &along)));
    HeightDistribution::from_atoms(atoms)
}

/// `E[q^{s h_omega(y)} | Omega(o, x)]` in closed form.
pub fn sector_mean_power<T: Real>(q: u32, y: &Vertex, x: &Vertex, s: T) -> Result<T> {
    if x.is_root() {
        return Err(domain("sector_mean_power", "x must not be the root"));
    }
    let lq = T::from_int(q as i64).ln();
    let ny = T::from_usize_lossy(y.depth());
    if !x.is_prefix_of(y) {
        let h = T::lit(2.0) * T::from_usize_lossy(x.meet_depth(y)) - ny;
        return Ok((s * h * lq).exp());
    }
    let nx = T::from_usize_lossy(x.depth());
    let d = y.depth() - x.depth();
    let df = T::from_usize_lossy(d);
    // sum_{i<d} r^i with r = q^{2s-1}, via expm1 so r near 1 stays accurate
    let l = (T::lit(2.0) * s - T::one()) * lq;
    let geo = if l == T::zero() { df } else { (df * l).exp_m1() / l.exp_m1() };
    let keep = T::one() - T::from_int(q as i64).recip();
    let branch = keep * (s * (T::lit(2.0) * nx - ny) * lq).exp() * geo;
    let through = ((s * ny - df) * lq).exp();
    Ok(branch + through)
}

/// `E[q^{s h_omega(y)}]` over the whole boundary.
pub fn boundary_mean_power<T: Real>(q: u32, y: &Vertex, s: T) -> T {
    if y.is_root() {
        return T::one();
    }
    let qf = T::from_int(q as i64);
    let ny = T::from_usize_lossy(y.depth());
    let away = qf / (qf + T::one()) * (-s * ny * qf.ln()).exp();
    let along = sector_mean_power(q, y, &y.ancestor(1), s).expect("non-root sector");
    away + along / (qf + T::one())
}

/// A support point as seen from one gate.
#[derive(Debug, Clone, PartialEq)]
pub struct GatePoint {
    /// Index into the support list the decomposition was built from.
    pub index: usize,
    pub depth: usize,
    /// `|g ∧ y|`.
    pub meet: usize,
    /// `y ∈ [o, g]`.
    pub on_gate_path: bool,
}

/// All vertices whose root geodesic passes through `gate` (with `|gate| = rho`).
#[derive(Debug, Clone)]
pub struct GateClass {
    pub gate: Vertex,
    pub points: Vec<GatePoint>,
}

impl GateClass {
    /// `d(x, y_k)` for any `x` at depth `n >= rho` below the gate.
    pub fn distance_at_depth(&self, k: usize, n: usize) -> usize {
        let p = &self.points[k];
        n + p.depth - 2 * p.meet
    }
}

/// Exterior gate classes plus the interior ball of a finitely supported function.
#[derive(Debug, Clone)]
pub struct GateDecomposition {
    pub q: u32,
    pub rho: usize,
    pub gates: Vec<GateClass>,
    /// Every vertex with `|x| < rho`.
    pub interior: Vec<Vertex>,
}

impl GateDecomposition {
    /// Number of vertices at depth `n >= rho` below one gate: `q^{n - rho}`.
    pub fn multiplicity(&self, n: usize) -> BigUint {
        assert!(n >= self.rho);
        BigUint::from(self.q).pow((n - self.rho) as u32)
    }

    pub fn ln_multiplicity<T: Real>(&self, n: usize) -> T {
        T::from_usize_lossy(n - self.rho) * T::from_int(self.q as i64).ln()
    }

    /// The gate class containing an exterior vertex `x` (`|x| >= rho`).
    pub fn gate_index(&self, x: &Vertex) -> Option<usize> {
        if x.depth() < self.rho {
            return None;
        }
        let g = x.ancestor(self.rho);
        self.gates.binary_search_by(|c| c.gate.cmp(&g)).ok()
    }
}

/// Gate decomposition at radius `rho >= 1` for the given support points.
///
/// `rho` must be at least the largest support depth so that `d(x, y)` is the
/// same for every `x` of a class at a given depth.
pub fn gate_classes(q: u32, rho: usize, support: &[Vertex]) -> Result<GateDecomposition> {
    if rho == 0 {
        return Err(domain("gate_classes", "support radius must be >= 1"));
    }
    if let Some(y) = support.iter().find(|y| y.depth() > rho) {
        return Err(domain("gate_classes", format!("support point {y} lies beyond rho = {rho}")));
    }
    let gates = sphere(q, rho)
        .into_iter()
        .map(|gate| {
            let points = support
                .iter()
                .enumerate()
                .map(|(index, y)| GatePoint {
                    index,
                    depth: y.depth(),
                    meet: gate.meet_depth(y),
                    on_gate_path: y.is_prefix_of(&gate),
                })
                .collect();
            GateClass { gate, points }
        })
        .collect();
    Ok(GateDecomposition { q, rho, gates, interior: ball(q, rho - 1) })
}

/// A radial function `n -> f(n)`, zero beyond the stored values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RadialFn<T> {
    pub values: Vec<T>,
}

impl<T: Real> RadialFn<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn at(&self, n: usize) -> T {
        self.values.get(n).copied().unwrap_or_else(T::zero)
    }

    /// Largest `n` with `f(n) != 0`, or `None` for the zero function.
    pub fn support_radius(&self) -> Option<usize> {
        self.values.iter().rposition(|v| *v != T::zero())
    }
}

/// A finitely supported function on the vertices of `T_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteFn<T> {
    q: u32,
    entries: BTreeMap<Vertex, T>,
}

impl<T: Real> FiniteFn<T> {
    pub fn new(q: u32) -> Self {
        Self { q, entries: BTreeMap::new() }
    }

    pub fn delta(q: u32, y: Vertex) -> Self {
        let mut f = Self::new(q);
        f.add(y, T::one());
        f
    }

    /// Accumulates `value` at `x`; zero entries are dropped.
    pub fn add(&mut self, x: Vertex, value: T) {
        let e = self.entries.entry(x).or_insert_with(T::zero);
        *e = *e + value;
        self.entries.retain(|_, v| *v != T::zero());
    }

    /// Spreads a radial function uniformly over spheres: every `x` with
    /// `|x| = n` gets `f(n)`.
    pub fn from_radial(q: u32, f: &RadialFn<T>) -> Self {
        let mut out = Self::new(q);
        for (n, &v) in f.values.iter().enumerate() {
            if v != T::zero() {
                for x in sphere(q, n) {
                    out.entries.insert(x, v);
                }
            }
        }
        out
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vertex, T)> {
        self.entries.iter().map(|(k, v)| (k, *v))
    }

    pub fn support(&self) -> Vec<Vertex> {
        self.entries.keys().cloned().collect()
    }

    pub fn values(&self) -> Vec<T> {
        self.entries.values().copied().collect()
    }

    pub fn get(&self, x: &Vertex) -> T {
        self.entries.get(x).copied().unwrap_or_else(T::zero)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `rho = max |y|` over the support (0 for the empty function).
    pub fn support_radius(&self) -> usize {
        self.entries.keys().map(Vertex::depth).max().unwrap_or(0)
    }

    pub fn sum(&self) -> T {
        crate::scalar::neumaier_sum(self.entries.values().copied())
    }

    /// `Some(radial profile)` if `f(x)` depends only on `|x|` on the ball of radius `rho`.
    pub fn as_radial(&self) -> Option<RadialFn<T>> {
        let rho = self.support_radius();
        let mut values = vec![T::zero(); rho + 1];
        for (n, slot) in values.iter_mut().enumerate() {
            let sph = sphere(self.q, n);
            let first = self.get(&sph[0]);
            if sph.iter().any(|x| self.get(x) != first) {
                return None;
            }
            *slot = first;
        }
        Some(RadialFn::new(values))
    }

    pub fn scaled(&self, c: T) -> Self {
        let mut out = Self::new(self.q);
        for (x, v) in self.iter() {
            out.add(x.clone(), c * v);
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, v) in other.iter() {
            out.add(x.clone(), v);
        }
        out
    }
}
