//! Heat-equation solutions `u = e^{-tL} f` for finitely supported data, the
//! mass functions `M_p(f)`, and the `l^p` convergence diagnostics on the tree
//! and on `Z`.
//!
//! Everything here is `f64`: the diagnostics are experiment drivers, and the
//! kernel values they consume come from the generic core.
//!
//! Exterior vertices are handled by gate classes: with `rho` the support
//! radius, every `x` with `|x| >= rho` lies below exactly one gate `g`
//! (`|g| = rho`), and `d(x, y) = |x| + |y| - 2 |g ∧ y|` for every support point.
//! So `u(t; x)` is one number per `(gate, |x|)` and norms over the tree are
//! radial sums weighted by `q^{|x| - rho}`.

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{domain, Error, Result};
use crate::heat_tree::{initial_cutoff, ln_tail_pow, ln_tail_sup, pow_sum, CriticalRegion, HeatProfile, RadiusRules};
use crate::logval::LogVal;
use crate::scalar::{log_sum_exp, neumaier_sum};
use crate::special_fn::ZKernelTable;
use crate::spectral::{spherical_fn_imag_table, spherical_transform_imag};
use crate::tree_geom::{
    boundary_mean_power, distance, gate_classes, sector_mean_power, FiniteFn, GateDecomposition, RadialFn, TreeParams,
    Vertex,
};

/// Relative size of the certified radial tail we aim for before accepting a cutoff.
const TAIL_TOL: f64 = 1e-12;

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(domain("caloric", format!("p must lie in [1, inf], got {p}")))
    }
}

fn gates_for(f: &FiniteFn<f64>) -> Result<(Vec<Vertex>, Vec<f64>, GateDecomposition)> {
    let support = f.support();
    let values = f.values();
    let rho = f.support_radius().max(1);
    let dec = gate_classes(f.q(), rho, &support)?;
    Ok((support, values, dec))
}

/// `u(t; .)` on the interior ball and on every `(gate, depth)` pair up to `nmax`.
#[derive(Debug, Clone)]
pub struct Solution {
    pub t: f64,
    pub decomposition: GateDecomposition,
    /// Aligned with `decomposition.interior`.
    pub interior: Vec<LogVal<f64>>,
    /// `exterior[g][n - rho]` for `rho <= n <= nmax`.
    pub exterior: Vec<Vec<LogVal<f64>>>,
    pub nmax: usize,
    profile: HeatProfile<f64>,
}

impl Solution {
    pub fn rho(&self) -> usize {
        self.decomposition.rho
    }

    pub fn profile(&self) -> &HeatProfile<f64> {
        &self.profile
    }

    /// `u(t; x)`, or `None` past `nmax` or outside the support's gates.
    pub fn at(&self, x: &Vertex) -> Option<f64> {
        if x.depth() < self.rho() {
            let i = self.decomposition.interior.iter().position(|v| v == x)?;
            return Some(self.interior[i].to_real());
        }
        let g = self.decomposition.gate_index(x)?;
        self.exterior[g].get(x.depth() - self.rho()).map(|v| v.to_real())
    }

    /// `sum_x u(t; x)` over `|x| <= nmax`.
    pub fn total(&self) -> f64 {
        let rho = self.rho();
        let inner = neumaier_sum(self.interior.iter().map(|v| v.to_real()));
        let outer = neumaier_sum(self.exterior.iter().flat_map(|row| {
            row.iter().enumerate().map(move |(k, v)| {
                let m = LogVal::from_ln(self.decomposition.ln_multiplicity::<f64>(rho + k));
                (*v * m).to_real()
            })
        }));
        inner + outer
    }
}

fn kernel_sum(prof: &HeatProfile<f64>, terms: impl Iterator<Item = (f64, usize)>) -> LogVal<f64> {
    LogVal::sum(terms.map(|(c, d)| LogVal::from_real(c) * prof.value(d)))
}

/// `u(t; x) = sum_y f(y) h_t(d(x, y))` for `|x| <= nmax`.
pub fn solve(tree: &TreeParams, f: &FiniteFn<f64>, t: f64, nmax: usize) -> Result<Solution> {
    if tree.q() != f.q() {
        return Err(domain("solve", "tree and data disagree on q"));
    }
    let (support, values, dec) = gates_for(f)?;
    let rho = dec.rho;
    let nmax = nmax.max(rho);
    let profile = HeatProfile::new(tree, t, nmax + rho)?;
    let interior = dec
        .interior
        .iter()
        .map(|x| kernel_sum(&profile, support.iter().zip(&values).map(|(y, &c)| (c, distance(x, y)))))
        .collect();
    let exterior = dec
        .gates
        .par_iter()
        .map(|gate| {
            (rho..=nmax)
                .map(|n| kernel_sum(&profile, values.iter().enumerate().map(|(k, &c)| (c, gate.distance_at_depth(k, n)))))
                .collect()
        })
        .collect();
    Ok(Solution { t, decomposition: dec, interior, exterior, nmax, profile })
}

/// Which formula defines a mass function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassKind {
    /// Sector averages of `q^{h_omega(y)/p}` (the `p < 2` definition).
    Boundary,
    /// `(f * phi_0)(x) / phi_0(x)` (the `p >= 2` definition).
    Phi0,
    /// A fixed constant, e.g. `sum f` for the wrong-mass control.
    Constant(f64),
}

/// `M_p(f)` on the interior ball and per gate class.
#[derive(Debug, Clone)]
pub struct MassFunction {
    pub p: f64,
    pub kind: MassKind,
    support: Vec<Vertex>,
    values: Vec<f64>,
    pub decomposition: GateDecomposition,
    /// Per gate: the exact constant (`Boundary`, `Constant`) or the `|x| -> inf`
    /// limit `sum_y f(y) q^{|y|/2 - |g ∧ y|}` (`Phi0`).
    pub gate_values: Vec<f64>,
    /// Aligned with `decomposition.interior`.
    pub interior: Vec<f64>,
    /// At `p = 2` the other variant of the definition.
    pub dual: Option<Box<MassFunction>>,
}

impl MassFunction {
    fn exponent(&self) -> f64 {
        if self.p.is_infinite() {
            0.0
        } else {
            1.0 / self.p
        }
    }

    /// `M_p(f)(x)` from the defining formula.
    pub fn at(&self, tree: &TreeParams, x: &Vertex) -> f64 {
        let q = tree.q();
        let pairs = self.support.iter().zip(&self.values);
        match self.kind {
            MassKind::Constant(m) => m,
            MassKind::Boundary if x.is_root() => {
                neumaier_sum(pairs.map(|(y, &c)| c * boundary_mean_power(q, y, self.exponent())))
            }
            MassKind::Boundary => neumaier_sum(
                pairs.map(|(y, &c)| c * sector_mean_power(q, y, x, self.exponent()).expect("x is not the root")),
            ),
            MassKind::Phi0 => {
                let base = tree.ln_phi0::<f64>(x.depth());
                neumaier_sum(pairs.map(|(y, &c)| c * (tree.ln_phi0::<f64>(distance(x, y)) - base).exp()))
            }
        }
    }

    /// `M_p(f)` at depth `n >= rho` below gate `g`.
    pub fn exterior(&self, tree: &TreeParams, g: usize, n: usize) -> f64 {
        match self.kind {
            MassKind::Phi0 => {
                let gate = &self.decomposition.gates[g];
                let base = tree.ln_phi0::<f64>(n);
                neumaier_sum(
                    self.values
                        .iter()
                        .enumerate()
                        .map(|(k, &c)| c * (tree.ln_phi0::<f64>(gate.distance_at_depth(k, n)) - base).exp()),
                )
            }
            _ => self.gate_values[g],
        }
    }

    /// Whether the value is constant along each gate subtree.
    pub fn is_gate_constant(&self) -> bool {
        !matches!(self.kind, MassKind::Phi0) || self.support.iter().all(|y| y.is_root())
    }

    /// A priori bound `sum |f(y)| w(y)` on `sup |M|`, with weight `q^{|y|/p}`
    /// for the boundary form and `q^{|y|/2}` for the `phi_0` form.
    pub fn bound(&self, tree: &TreeParams) -> f64 {
        let s = match self.kind {
            MassKind::Constant(m) => return m.abs(),
            MassKind::Boundary => self.exponent(),
            MassKind::Phi0 => 0.5,
        };
        neumaier_sum(self.support.iter().zip(&self.values).map(|(y, c)| {
            c.abs() * (s * y.depth() as f64 * tree.ln_q::<f64>()).exp()
        }))
    }
}

fn build_mass(tree: &TreeParams, f: &FiniteFn<f64>, p: f64, kind: MassKind) -> Result<MassFunction> {
    let (support, values, dec) = gates_for(f)?;
    let mut m = MassFunction {
        p,
        kind,
        support,
        values,
        decomposition: dec,
        gate_values: Vec::new(),
        interior: Vec::new(),
        dual: None,
    };
    let half_ln_q = 0.5 * tree.ln_q::<f64>();
    m.gate_values = m
        .decomposition
        .gates
        .iter()
        .map(|gate| match kind {
            MassKind::Constant(c) => c,
            MassKind::Boundary => m.at(tree, &gate.gate),
            MassKind::Phi0 => neumaier_sum(
                gate.points
                    .iter()
                    .zip(&m.values)
                    .map(|(pt, &c)| c * ((pt.depth as f64 - 2.0 * pt.meet as f64) * -half_ln_q).exp()),
            ),
        })
        .collect();
    m.interior = m.decomposition.interior.iter().map(|x| m.at(tree, x)).collect();
    Ok(m)
}

/// `M_p(f)`: the boundary form for `p < 2`, the `phi_0` form for `p >= 2`.
/// At `p = 2` the boundary form is attached as `dual`.
pub fn mass_function(tree: &TreeParams, f: &FiniteFn<f64>, p: f64) -> Result<MassFunction> {
    check_p(p)?;
    if p < 2.0 {
        return build_mass(tree, f, p, MassKind::Boundary);
    }
    let mut m = build_mass(tree, f, p, MassKind::Phi0)?;
    if p == 2.0 {
        m.dual = Some(Box::new(build_mass(tree, f, p, MassKind::Boundary)?));
    }
    Ok(m)
}

/// A mass function of a chosen kind, without the `p = 2` dual.
pub fn mass_function_of_kind(tree: &TreeParams, f: &FiniteFn<f64>, p: f64, kind: MassKind) -> Result<MassFunction> {
    check_p(p)?;
    build_mass(tree, f, p, kind)
}

/// The constant mass of radial data: `H f(i delta_p) = sum_y f(y) phi_{i delta_p}(y)`.
pub fn radial_mass(tree: &TreeParams, f: &RadialFn<f64>, p: f64) -> Result<f64> {
    check_p(p)?;
    let delta = if p.is_infinite() { 0.0 } else { tree.delta_p(p) };
    Ok(spherical_transform_imag(tree, f, delta))
}

/// Which mass a diagnostic compares against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassChoice {
    /// [`mass_function`]; at `p = 2` the dual is reported alongside.
    Theorem,
    Kind(MassKind),
}

/// One row of the tree diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticRow {
    pub t: f64,
    /// `||u - M h_t||_p / ||h_t||_p`.
    pub e: f64,
    /// Contribution from the critical region.
    pub e_critical: f64,
    /// Contribution from its complement (radial tail included).
    pub e_complement: f64,
    /// `||u||_p` on the complement, relative to `||h_t||_p`.
    pub u_complement: f64,
    /// `sup |M|` over evaluated vertices.
    pub mass_sup: f64,
    /// Certified bound on the relative contribution of unevaluated radii.
    pub tail_bound: f64,
    /// `e` computed with the `p = 2` dual mass, if any.
    pub e_dual: Option<f64>,
    pub certified: bool,
}

struct Accum {
    crit: Vec<f64>,
    comp: Vec<f64>,
    u_comp: Vec<f64>,
    sup: f64,
}

/// Contributions `|D|^p` (log) of one vertex class, split by region.
fn push(acc: &mut Accum, p: f64, ln_count: f64, d: LogVal<f64>, u: LogVal<f64>, inside: bool) {
    if p.is_infinite() {
        let (dl, ul) = (d.ln_abs(), u.ln_abs());
        if inside {
            acc.crit.push(dl);
        } else {
            acc.comp.push(dl);
            acc.u_comp.push(ul);
        }
        return;
    }
    if inside {
        acc.crit.push(ln_count + p * d.ln_abs());
    } else {
        acc.comp.push(ln_count + p * d.ln_abs());
        acc.u_comp.push(ln_count + p * u.ln_abs());
    }
}

fn combine(p: f64, xs: &[f64]) -> f64 {
    if p.is_infinite() {
        xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        log_sum_exp(xs)
    }
}

/// Relative `l^p` size of `ln(sum)` against `ln ||h||_p^p` (or the sups at `p = inf`).
fn rel(p: f64, ln_sum: f64, ln_norm: f64) -> f64 {
    if p.is_infinite() {
        (ln_sum - ln_norm).exp()
    } else {
        ((ln_sum - ln_norm) / p).exp()
    }
}

fn diagnose_one(
    tree: &TreeParams,
    f: &FiniteFn<f64>,
    mass: &MassFunction,
    p: f64,
    t: f64,
    rules: &RadiusRules,
) -> Result<(DiagnosticRow, f64)> {
    let rho = mass.decomposition.rho;
    let l1: f64 = f.values().iter().map(|v| v.abs()).sum();
    let m_bound = mass.bound(tree);
    let region = CriticalRegion::new(tree, p, t, rules);

    // grow the radial cutoff until the unevaluated tail is negligible
    let mut cutoff = initial_cutoff(t) + 2 * rho;
    let (sol, tail_bound, ln_norm) = loop {
        let sol = solve(tree, f, t, cutoff + rho)?;
        let prof = sol.profile();
        let ln_norm = pow_sum(prof, p, 0, prof.nmax());
        // |x| > cutoff + rho forces d(x, y) > cutoff for every support point
        let ln_tail = if p.is_infinite() { ln_tail_sup(prof, cutoff) } else { ln_tail_pow(prof, p, cutoff) };
        let tail = (l1 + m_bound) * rel(p, ln_tail, ln_norm);
        if t == 0.0 || tail <= TAIL_TOL {
            break (sol, if t == 0.0 { 0.0 } else { tail }, ln_norm);
        }
        if cutoff > 1 << 20 {
            break (sol, tail, ln_norm);
        }
        cutoff *= 2;
    };
    let prof = sol.profile();
    let lq = tree.ln_q::<f64>();

    let accumulate = |m: &MassFunction| -> (Accum, f64) {
        let mut acc = Accum { crit: Vec::new(), comp: Vec::new(), u_comp: Vec::new(), sup: 0.0 };
        for (i, x) in sol.decomposition.interior.iter().enumerate() {
            let n = x.depth();
            let mx = m.interior[i];
            acc.sup = acc.sup.max(mx.abs());
            let u = sol.interior[i];
            let d = u.sub(LogVal::from_real(mx) * prof.value(n));
            push(&mut acc, p, 0.0, d, u, region.contains(n));
        }
        for (g, row) in sol.exterior.iter().enumerate() {
            for (k, &u) in row.iter().enumerate() {
                let n = rho + k;
                let mx = m.exterior(tree, g, n);
                acc.sup = acc.sup.max(mx.abs());
                let d = u.sub(LogVal::from_real(mx) * prof.value(n));
                push(&mut acc, p, k as f64 * lq, d, u, region.contains(n));
            }
        }
        let total = combine(p, &[combine(p, &acc.crit), combine(p, &acc.comp)]);
        (acc, rel(p, total, ln_norm))
    };

    let (acc, e) = accumulate(mass);
    let e_dual = mass.dual.as_ref().map(|d| accumulate(d).1 + tail_bound);
    let row = DiagnosticRow {
        t,
        e: e + tail_bound,
        e_critical: rel(p, combine(p, &acc.crit), ln_norm),
        e_complement: rel(p, combine(p, &acc.comp), ln_norm) + tail_bound,
        u_complement: rel(p, combine(p, &acc.u_comp), ln_norm) + tail_bound,
        mass_sup: acc.sup,
        tail_bound,
        e_dual,
        certified: tail_bound.is_finite() && tail_bound <= 1e-6,
    };
    Ok((row, e))
}

/// `E(t) = ||u(t; .) - M h_t||_p / ||h_t||_p` along a time ladder.
///
/// Reported `e` values include the certified tail bound, so they are upper
/// bounds on the exact relative error (up to kernel rounding).
pub fn convergence_diagnostic(
    tree: &TreeParams,
    f: &FiniteFn<f64>,
    p: f64,
    ts: &[f64],
    choice: MassChoice,
    rules: &RadiusRules,
) -> Result<Vec<DiagnosticRow>> {
    check_p(p)?;
    if ts.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Input("time ladder must be strictly increasing".into()));
    }
    if f.is_empty() {
        return Err(Error::Input("initial data has empty support".into()));
    }
    let mass = match choice {
        MassChoice::Theorem => mass_function(tree, f, p)?,
        MassChoice::Kind(kind) => mass_function_of_kind(tree, f, p, kind)?,
    };
    ts.par_iter().map(|&t| diagnose_one(tree, f, &mass, p, t, rules).map(|r| r.0)).collect()
}

/// One row of the `Z` diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZDiagnosticRow {
    pub t: f64,
    pub e: f64,
    /// `M = sum_j f(j)`.
    pub mass: f64,
    /// `||u||_p / ||h_t||_p`.
    pub u_rel: f64,
    pub tail_bound: f64,
    pub certified: bool,
}

/// `||u - M h^Z_t||_p / ||h^Z_t||_p` with the single constant `M = sum f`.
pub fn z_diagnostic(f: &[(i64, f64)], p: f64, ts: &[f64]) -> Result<Vec<ZDiagnosticRow>> {
    if !(p >= 1.0) || p.is_infinite() {
        return Err(domain("z_diagnostic", format!("p must lie in [1, inf), got {p}")));
    }
    if f.is_empty() {
        return Err(Error::Input("initial data has empty support".into()));
    }
    let mass = neumaier_sum(f.iter().map(|e| e.1));
    let l1: f64 = f.iter().map(|e| e.1.abs()).sum();
    let reach = f.iter().map(|e| e.0.unsigned_abs() as usize).max().unwrap_or(0);
    ts.par_iter()
        .map(|&t| {
            if !(t > 0.0) {
                return Err(domain("z_diagnostic", "t must be > 0"));
            }
            let mut big_j = initial_cutoff(t) + reach;
            loop {
                let z = ZKernelTable::new(t, big_j + reach + 2)?;
                let range = -(big_j as i64)..=(big_j as i64);
                let ln_h: Vec<f64> = range.clone().map(|j| p * z.ln_value(j)).collect();
                let ln_norm = log_sum_exp(&ln_h);
                let (ln_d, ln_u): (Vec<f64>, Vec<f64>) = range
                    .map(|j| {
                        let u = LogVal::sum(f.iter().map(|&(k, c)| LogVal::from_real(c) * z.value(j - k)));
                        let d = u.sub(LogVal::from_real(mass) * z.value(j));
                        (p * d.ln_abs(), p * u.ln_abs())
                    })
                    .unzip();
                // sum_{|i| > J'} h(i)^p <= h(J'+1)^{p-1} sum_{|i| > J'} h(i), J' = J - reach
                let inner = big_j - reach;
                let ln_tail = (p - 1.0) * z.ln_value(inner as i64 + 1) + z.two_sided_tail_bound(inner).ln_abs();
                let tail = (l1 + mass.abs()) * ((ln_tail - ln_norm) / p).exp();
                if tail <= TAIL_TOL || big_j > 1 << 22 {
                    return Ok(ZDiagnosticRow {
                        t,
                        e: ((log_sum_exp(&ln_d) - ln_norm) / p).exp() + tail,
                        mass,
                        u_rel: ((log_sum_exp(&ln_u) - ln_norm) / p).exp() + tail,
                        tail_bound: tail,
                        certified: tail <= 1e-6,
                    });
                }
                big_j *= 2;
            }
        })
        .collect()
}

/// Verdict on convergence of a weighted series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Member,
    NonMember,
    Inconclusive,
}

/// Tail behaviour of the terms `a_n`, fitted as `a_n ~ n^{-alpha}` between
/// `N/2` and `N`; geometric decay shows up as a very large `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailModel {
    pub alpha: f64,
}

impl TailModel {
    fn fit(ln_terms: &[f64]) -> Option<Self> {
        let n = ln_terms.len() - 1;
        if n < 8 {
            return None;
        }
        let (a, b) = (ln_terms[n / 2], ln_terms[n]);
        if a == f64::NEG_INFINITY && b == f64::NEG_INFINITY {
            return Some(Self { alpha: f64::INFINITY });
        }
        Some(Self { alpha: -(b - a) / (n as f64 / (n / 2) as f64).ln() })
    }

    fn verdict(&self) -> Membership {
        if self.alpha > 1.5 {
            Membership::Member
        } else if self.alpha <= 1.0 {
            Membership::NonMember
        } else {
            Membership::Inconclusive
        }
    }
}

/// Norms of `f` in `l^1(w_p)` and (radial data) `l^1_{delta_p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedNormReport {
    pub p: f64,
    /// `sum |f(y)| w_p(y)` (partial sum for lazily given data).
    pub w_norm: f64,
    pub w_member: Membership,
    /// `sum |f(y)| phi_{i delta_p}(y)`, radial data only.
    pub delta_norm: Option<f64>,
    pub delta_member: Option<Membership>,
    pub w_tail: Option<TailModel>,
    pub delta_tail: Option<TailModel>,
}

/// `w_p(y) = q^{|y|/p}` for `p < 2`, `q^{|y|/2}` for `p >= 2`, in log form.
pub fn ln_weight(tree: &TreeParams, p: f64, depth: usize) -> f64 {
    let s = if p < 2.0 { 1.0 / p } else { 0.5 };
    s * depth as f64 * tree.ln_q::<f64>()
}

fn delta_of(tree: &TreeParams, p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        tree.delta_p(p)
    }
}

/// Finitely supported data belongs to every class; the norms are exact.
pub fn weighted_membership(tree: &TreeParams, f: &FiniteFn<f64>, p: f64) -> Result<WeightedNormReport> {
    check_p(p)?;
    let w_norm = neumaier_sum(f.iter().map(|(y, c)| c.abs() * ln_weight(tree, p, y.depth()).exp()));
    let (delta_norm, delta_member) = match f.as_radial() {
        Some(r) => {
            let abs = RadialFn::new(r.values.iter().map(|v| v.abs()).collect());
            (Some(spherical_transform_imag(tree, &abs, delta_of(tree, p))), Some(Membership::Member))
        }
        None => (None, None),
    };
    Ok(WeightedNormReport {
        p,
        w_norm,
        w_member: Membership::Member,
        delta_norm,
        delta_member,
        w_tail: None,
        delta_tail: None,
    })
}

/// Membership of radial data `n -> f(n)` given lazily, judged from the first
/// `nmax + 1` shells.
pub fn weighted_membership_radial(
    tree: &TreeParams,
    f: impl Fn(usize) -> f64,
    p: f64,
    nmax: usize,
) -> Result<WeightedNormReport> {
    check_p(p)?;
    let phi = spherical_fn_imag_table(tree, delta_of(tree, p), nmax);
    let (mut ln_w, mut ln_d) = (Vec::with_capacity(nmax + 1), Vec::with_capacity(nmax + 1));
    for (n, ph) in phi.iter().enumerate() {
        let base = f(n).abs().ln() + tree.ln_sphere_volume::<f64>(n);
        ln_w.push(base + ln_weight(tree, p, n));
        ln_d.push(base + ph.abs().ln());
    }
    let judge = |ln_terms: &[f64]| -> (f64, Option<TailModel>, Membership) {
        let sum = log_sum_exp(ln_terms).exp();
        let model = TailModel::fit(ln_terms);
        let verdict = if !sum.is_finite() {
            Membership::NonMember
        } else {
            model.map_or(Membership::Inconclusive, |m| m.verdict())
        };
        (sum, model, verdict)
    };
    let (w_norm, w_tail, w_member) = judge(&ln_w);
    let (d_norm, delta_tail, d_member) = judge(&ln_d);
    Ok(WeightedNormReport {
        p,
        w_norm,
        w_member,
        delta_norm: Some(d_norm),
        delta_member: Some(d_member),
        w_tail,
        delta_tail,
    })
}

#[derive(Debug, Deserialize)]
struct VertexEntry {
    vertex: String,
    value: f64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum TreeInput {
    Entries { q: u32, entries: Vec<VertexEntry> },
    Radial { radial: Vec<f64> },
}

#[derive(Debug, Deserialize)]
struct SiteEntry {
    site: i64,
    value: f64,
}

#[derive(Debug, Deserialize)]
struct ZInput {
    entries: Vec<SiteEntry>,
}

/// Initial data from `{"q": 2, "entries": [{"vertex": "0.1", "value": 1.0}]}`
/// or `{"radial": [v0, v1, ...]}` (radial data take `q` from the caller).
pub fn parse_tree_input(json: &str, q: Option<u32>) -> Result<FiniteFn<f64>> {
    let input: TreeInput = serde_json::from_str(json).map_err(|e| Error::Input(e.to_string()))?;
    match input {
        TreeInput::Entries { q: qf, entries } => {
            if let Some(q) = q.filter(|&q| q != qf) {
                return Err(Error::Input(format!("input is for q = {qf}, requested q = {q}")));
            }
            TreeParams::new(qf)?;
            let mut f = FiniteFn::new(qf);
            for e in entries {
                f.add(Vertex::parse(&e.vertex, qf)?, e.value);
            }
            Ok(f)
        }
        TreeInput::Radial { radial } => {
            let q = q.ok_or_else(|| Error::Input("radial input needs q".into()))?;
            TreeParams::new(q)?;
            Ok(FiniteFn::from_radial(q, &RadialFn::new(radial)))
        }
    }
}

/// `Z` data from `{"entries": [{"site": 2, "value": 1.0}]}`; repeated sites add.
pub fn parse_z_input(json: &str) -> Result<Vec<(i64, f64)>> {
    let input: ZInput = serde_json::from_str(json).map_err(|e| Error::Input(e.to_string()))?;
    let mut out: Vec<(i64, f64)> = Vec::new();
    for e in input.entries {
        match out.iter_mut().find(|s| s.0 == e.site) {
            Some(s) => s.1 += e.value,
            None => out.push((e.site, e.value)),
        }
    }
    out.sort_by_key(|s| s.0);
    Ok(out)
}
