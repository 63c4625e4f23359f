//! Leau-Fatou petals of a normalized parabolic germ, numeric Fatou
//! coordinates and their lift along the center graph.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::germ::{Germ2, Point2};
use crate::manifolds::{restrict_to_center, Axis, ManifoldGraph};
use crate::normal_forms::semiparabolic_multiplicity;
use crate::series::{Complex, Series1};

/// Normalization tolerance on the low coefficients of `h`.
pub const NORMALIZED_TOL: f64 = 1e-9;
/// Successive Fatou estimates closer than this stop the limit.
pub const FATOU_TOL: f64 = 1e-10;
/// Points sampled for the Abel residual.
pub const ABEL_SAMPLES: usize = 100;
const NEWTON_STEPS: usize = 60;
const NEWTON_TOL: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PetalKind {
    Attracting,
    Repelling,
}

#[derive(Clone, Debug, Serialize)]
pub struct Petal {
    pub id: usize,
    pub kind: PetalKind,
    /// In `[0, 2 pi)`.
    pub axis_angle: f64,
    pub opening: f64,
    pub radius: f64,
    /// Index of the cycle of petals permuted by `h`.
    pub cycle: usize,
}

fn wrap(a: f64) -> f64 {
    let t = a.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

impl Petal {
    /// Angle of `z` relative to the axis, in `(-pi, pi]`.
    pub fn deviation(&self, z: Complex) -> f64 {
        wrap(z.arg() - self.axis_angle)
    }

    pub fn contains(&self, z: Complex) -> bool {
        z.norm() > 0.0 && z.norm() < self.radius && self.deviation(z).abs() < self.opening / 2.0
    }

    /// `n` points on the arc `|z| = radius` spread over 80% of the opening.
    pub fn arc_sample(&self, n: usize) -> Vec<Complex> {
        let spread = 0.4 * self.opening;
        (0..n)
            .map(|i| {
                let t = if n > 1 { -spread + 2.0 * spread * i as f64 / (n - 1) as f64 } else { 0.0 };
                Complex::from_polar(self.radius, self.axis_angle + t)
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PetalSystem {
    pub nu: u32,
    pub p: u32,
    pub q: u32,
    /// `A` in `h^q(z) = z + A z^{nu q + 1} + ...`.
    pub lead: Complex,
    pub petals: Vec<Petal>,
    pub germ: Series1,
}

impl PetalSystem {
    /// `nu q`.
    pub fn m(&self) -> usize {
        (self.nu * self.q) as usize
    }

    pub fn petal(&self, id: usize) -> Result<&Petal> {
        self.petals.get(id).ok_or_else(|| Error::Input(format!("no petal with id {id}")))
    }

    pub fn count(&self, kind: PetalKind) -> usize {
        self.petals.iter().filter(|p| p.kind == kind).count()
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Sector petals of `h = lambda z + z^{nu q + 1} + ...`, `lambda = e^{2 pi i p/q}`.
pub fn petal_decomposition(h: &Series1, p: u32, q: u32, nu: u32, radius: f64) -> Result<PetalSystem> {
    if q == 0 || nu == 0 || !(radius > 0.0) {
        return Err(Error::Input("q, nu and radius must be positive".into()));
    }
    let m = (nu * q) as usize;
    if h.cap() < 2 * m + 2 {
        return Err(Error::DegreeBudget { needed: 2 * m + 2, max: h.cap() });
    }
    let lambda = Complex::from_polar(1.0, 2.0 * PI * p as f64 / q as f64);
    if (h.coeff(0)).norm() > NORMALIZED_TOL || (h.coeff(1) - lambda).norm() > NORMALIZED_TOL {
        return Err(Error::Precondition(format!("linear part is not e^(2 pi i {p}/{q})")));
    }
    for k in 2..=m {
        if h.coeff(k).norm() > NORMALIZED_TOL {
            return Err(Error::Precondition(format!("coefficient of order {k} is not eliminated")));
        }
    }
    if (h.coeff(m + 1).norm() - 1.0).abs() > NORMALIZED_TOL {
        return Err(Error::Precondition(format!("coefficient of order {} is not unimodular", m + 1)));
    }
    let (found, lead) = semiparabolic_multiplicity(h, q)?;
    if found != nu {
        return Err(Error::Precondition(format!("multiplicity is {found}, not {nu}")));
    }

    let opening = PI / m as f64;
    let shift = (p as usize * nu as usize) % m;
    let ncycles = gcd(shift, m);
    let mut petals = Vec::with_capacity(2 * m);
    for k in 0..m {
        let a = ((PI - lead.arg() + 2.0 * PI * k as f64) / m as f64).rem_euclid(2.0 * PI);
        let r = ((-lead.arg() + 2.0 * PI * k as f64) / m as f64).rem_euclid(2.0 * PI);
        for (kind, axis_angle) in [(PetalKind::Attracting, a), (PetalKind::Repelling, r)] {
            petals.push(Petal { id: 0, kind, axis_angle, opening, radius, cycle: k % ncycles });
        }
    }
    petals.sort_by(|a, b| a.axis_angle.total_cmp(&b.axis_angle));
    for (i, pt) in petals.iter_mut().enumerate() {
        pt.id = i;
    }
    Ok(PetalSystem { nu, p, q, lead, petals, germ: h.clone() })
}

/// `w(z) = sum a_k z^k + beta log z` with `w(H(z)) - w(z) - 1 = O(z^{D - m})`
/// for `H(z) = z + A z^{m+1} + ...` known through degree `D`.
#[derive(Clone, Debug, Serialize)]
pub struct AbelExpansion {
    pub terms: Vec<(i32, Complex)>,
    pub beta: Complex,
    pub axis_angle: f64,
}

impl AbelExpansion {
    pub fn solve(big_h: &Series1, m: usize, axis_angle: f64) -> Result<Self> {
        let cap = big_h.cap();
        if cap < 2 * m + 2 {
            return Err(Error::DegreeBudget { needed: 2 * m + 2, max: cap });
        }
        let g = big_h.shift_down(1).with_cap(cap - 1);
        let lead = g.coeff(m);
        if lead.norm() < NORMALIZED_TOL {
            return Err(Error::Precondition("return map has no term of order m + 1".into()));
        }
        let one = Series1::one(cap - 1);
        let log_g = g.ln()?;
        let dmax = cap - 1 - m;
        let m_i = m as i64;
        let mut powers: Vec<(i32, Series1)> = Vec::new();
        let mut terms: Vec<(i32, Complex)> = Vec::new();
        let mut beta = Complex::new(0.0, 0.0);
        for d in 0..=dmax {
            let k = d as i64 - m_i;
            let mut acc = if d == 0 { Complex::new(-1.0, 0.0) } else { Complex::new(0.0, 0.0) };
            for ((e, a), (_, pk)) in terms.iter().zip(&powers) {
                acc += a * pk.coeff((d as i64 - *e as i64) as usize);
            }
            if k > 0 {
                acc += beta * log_g.coeff(d);
            }
            if k == 0 {
                beta = -acc / lead;
            } else {
                let pk = &g.powi(k)? - &one;
                terms.push((k as i32, -acc / (lead * k as f64)));
                powers.push((k as i32, pk));
            }
        }
        Ok(AbelExpansion { terms, beta, axis_angle })
    }

    /// Logarithm with its branch cut opposite the axis.
    pub fn log(&self, z: Complex) -> Complex {
        Complex::new(z.norm().ln(), self.axis_angle + wrap(z.arg() - self.axis_angle))
    }

    pub fn eval(&self, z: Complex) -> Complex {
        let mut w = self.beta * self.log(z);
        for (k, a) in &self.terms {
            w += a * z.powi(*k);
        }
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FatouKind {
    Incoming,
    Outgoing,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FatouValue {
    pub value: Complex,
    pub iterations: usize,
    pub last_change: f64,
    pub converged: bool,
}

/// Fatou coordinate on one petal. Incoming on attracting petals:
/// `phi(H z) = phi(z) + 1`. Outgoing on repelling petals: `phi(H z) = phi(z) + 1`
/// as well, computed as `-psi` with `psi` the incoming coordinate of `H^{-1}`.
#[derive(Clone, Debug, Serialize)]
pub struct FatouCoordinate {
    pub kind: FatouKind,
    pub petal_id: usize,
    pub n_iters: usize,
    pub abel_residual_bound: f64,
    /// Sample points whose evaluation failed.
    pub sample_failures: usize,
    pub expansion: AbelExpansion,
    #[serde(skip)]
    petal: Petal,
    #[serde(skip)]
    h: Series1,
    #[serde(skip)]
    h_inv: Series1,
    #[serde(skip)]
    q: u32,
}

fn newton_inverse(h: &Series1, dh: &Series1, guess: Complex, target: Complex) -> Option<Complex> {
    let mut w = guess;
    for _ in 0..NEWTON_STEPS {
        let step = (h.eval(w) - target) / dh.eval(w);
        w -= step;
        if !w.is_finite() {
            return None;
        }
        if step.norm() <= NEWTON_TOL * w.norm().max(1e-300) {
            return Some(w);
        }
    }
    // Newton stalls at rounding level; accept a small final residual.
    ((h.eval(w) - target).norm() <= 1e-14 * target.norm()).then_some(w)
}

impl FatouCoordinate {
    /// `H = h^q` evaluated pointwise.
    pub fn forward(&self, z: Complex) -> Complex {
        (0..self.q).fold(z, |w, _| self.h.eval(w))
    }

    /// `H^{-1}` by Newton on each factor of `h`.
    pub fn backward(&self, z: Complex) -> Option<Complex> {
        let dh = self.h.derivative();
        let mut w = z;
        for _ in 0..self.q {
            w = newton_inverse(&self.h, &dh, self.h_inv.eval(w), w)?;
        }
        Some(w)
    }

    pub fn petal(&self) -> &Petal {
        &self.petal
    }

    pub fn evaluate(&self, z: Complex) -> Result<FatouValue> {
        let sign = match self.kind {
            FatouKind::Incoming => 1.0,
            FatouKind::Outgoing => -1.0,
        };
        let mut zn = z;
        let mut prev = self.expansion.eval(zn);
        let mut last_change = f64::INFINITY;
        for n in 1..=self.n_iters {
            zn = match self.kind {
                FatouKind::Incoming => self.forward(zn),
                FatouKind::Outgoing => self.backward(zn).ok_or(Error::NewtonFailure { step: n })?,
            };
            let left = !zn.is_finite()
                || zn.norm() > 2.0 * self.petal.radius
                || zn.norm() == 0.0
                || self.petal.deviation(zn).abs() >= self.petal.opening;
            if left {
                return Err(Error::LeftPetal { step: n });
            }
            let cur = self.expansion.eval(zn) - n as f64;
            last_change = (cur - prev).norm();
            prev = cur;
            if last_change < FATOU_TOL {
                return Ok(FatouValue { value: sign * cur, iterations: n, last_change, converged: true });
            }
        }
        Ok(FatouValue { value: sign * prev, iterations: self.n_iters, last_change, converged: false })
    }

    /// `|phi(H z) - phi(z) - 1|`.
    pub fn abel_residual(&self, z: Complex) -> Result<f64> {
        let a = self.evaluate(z)?.value;
        let b = self.evaluate(self.forward(z))?.value;
        Ok((b - a - 1.0).norm())
    }
}

pub fn fatou_coordinate(ps: &PetalSystem, petal_id: usize, n_iters: usize) -> Result<FatouCoordinate> {
    if n_iters == 0 {
        return Err(Error::Input("n_iters must be at least 1".into()));
    }
    let petal = ps.petal(petal_id)?.clone();
    let big_h = ps.germ.iterate(ps.q as usize)?;
    let h_inv = ps.germ.invert_local()?;
    let (kind, expansion) = match petal.kind {
        PetalKind::Attracting => {
            (FatouKind::Incoming, AbelExpansion::solve(&big_h, ps.m(), petal.axis_angle)?)
        }
        PetalKind::Repelling => {
            (FatouKind::Outgoing, AbelExpansion::solve(&big_h.invert_local()?, ps.m(), petal.axis_angle)?)
        }
    };
    let mut fc = FatouCoordinate {
        kind,
        petal_id,
        n_iters,
        abel_residual_bound: 0.0,
        sample_failures: 0,
        expansion,
        petal,
        h: ps.germ.clone(),
        h_inv,
        q: ps.q,
    };
    let (mut worst, mut failures) = (0.0f64, 0usize);
    for z in fc.petal.arc_sample(ABEL_SAMPLES) {
        match fc.abel_residual(z) {
            Ok(r) => worst = worst.max(r),
            Err(_) => failures += 1,
        }
    }
    fc.abel_residual_bound = worst;
    fc.sample_failures = failures;
    Ok(fc)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LiftSample {
    pub x: Complex,
    pub k: Complex,
    /// `|y' - k(x')|` for `(x', y') = f^q(x, k(x))`.
    pub graph_residual: f64,
    /// `|phi(x') - phi(x) - 1|` through the outgoing coordinate.
    pub conjugacy_residual: f64,
    pub valid: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PetalLift {
    pub petal_id: usize,
    pub samples: Vec<LiftSample>,
    pub max_graph_residual: f64,
    pub max_conjugacy_residual: f64,
    pub flagged: usize,
}

/// The center graph over a repelling petal, obtained by pushing the formal
/// graph forward from a seed close to the origin.
#[derive(Clone, Debug)]
pub struct PetalGraph<'a> {
    g: &'a Germ2,
    jet: &'a Series1,
    hc: Series1,
    hc_inv: Series1,
    seed_radius: f64,
    max_steps: usize,
}

impl<'a> PetalGraph<'a> {
    pub fn new(g: &'a Germ2, cm: &'a ManifoldGraph, seed_radius: f64, max_steps: usize) -> Result<Self> {
        let hc = restrict_to_center(g, cm)?;
        let hc_inv = hc.invert_local()?;
        Ok(PetalGraph { g, jet: &cm.series, hc, hc_inv, seed_radius, max_steps })
    }

    /// `k(x)` together with the number of forward steps used.
    pub fn eval(&self, x: Complex) -> Option<(Complex, usize)> {
        let dh = self.hc.derivative();
        let mut s = x;
        let mut n = 0;
        while s.norm() > self.seed_radius {
            if n == self.max_steps {
                return None;
            }
            s = newton_inverse(&self.hc, &dh, self.hc_inv.eval(s), s)?;
            n += 1;
        }
        let dk = self.jet.derivative();
        // Newton on s so that the x-coordinate of f^n(s, k(s)) is x
        for _ in 0..NEWTON_STEPS {
            let mut p = Point2::new(s, self.jet.eval(s));
            let mut v = Point2::new(Complex::new(1.0, 0.0), dk.eval(s));
            for _ in 0..n {
                let j = self.g.jacobian(p);
                v = Point2::new(j[0][0] * v.x + j[0][1] * v.y, j[1][0] * v.x + j[1][1] * v.y);
                p = self.g.apply(p);
            }
            let step = (p.x - x) / v.x;
            if !step.is_finite() {
                return None;
            }
            if step.norm() <= 1e-15 * s.norm().max(1e-300) || (p.x - x).norm() <= 1e-16 * x.norm() {
                return Some((p.y, n));
            }
            s -= step;
        }
        None
    }
}

/// Lifts a repelling petal of the center restriction to `x -> (x, k(x))`,
/// `k` the center graph, and checks invariance and conjugacy to `t -> t + 1`.
pub fn lift_repelling_petal(
    g: &Germ2,
    cm: &ManifoldGraph,
    ps: &PetalSystem,
    petal_id: usize,
    samples: usize,
) -> Result<PetalLift> {
    if cm.axis != Axis::Center {
        return Err(Error::Precondition("lift needs the center graph".into()));
    }
    let petal = ps.petal(petal_id)?;
    if petal.kind != PetalKind::Repelling {
        return Err(Error::Precondition(format!("petal {petal_id} is attracting")));
    }
    let graph = PetalGraph::new(g, cm, petal.radius / 8.0, 100_000)?;
    let upto = graph.hc.cap().min(ps.germ.cap());
    if (0..=upto).any(|k| (graph.hc.coeff(k) - ps.germ.coeff(k)).norm() > NORMALIZED_TOL) {
        return Err(Error::Precondition("petal germ is not the center restriction".into()));
    }
    let fc = fatou_coordinate(ps, petal_id, 10_000)?;
    let mut out = Vec::with_capacity(samples);
    for x in petal.arc_sample(samples) {
        let Some((k, _)) = graph.eval(x) else {
            out.push(LiftSample {
                x,
                k: Complex::new(f64::NAN, f64::NAN),
                graph_residual: f64::NAN,
                conjugacy_residual: f64::NAN,
                valid: false,
            });
            continue;
        };
        let image = (0..ps.q).fold(Point2::new(x, k), |p, _| g.apply(p));
        let graph_residual = match graph.eval(image.x) {
            Some((ky, _)) => (image.y - ky).norm(),
            None => f64::NAN,
        };
        let conj = fc
            .evaluate(image.x)
            .and_then(|b| fc.evaluate(x).map(|a| (b.value - a.value - 1.0).norm()));
        let conjugacy_residual = conj.unwrap_or(f64::NAN);
        let valid = graph_residual.is_finite() && conjugacy_residual.is_finite();
        out.push(LiftSample { x, k, graph_residual, conjugacy_residual, valid });
    }
    let valid: Vec<_> = out.iter().filter(|s| s.valid).collect();
    Ok(PetalLift {
        petal_id,
        max_graph_residual: valid.iter().map(|s| s.graph_residual).fold(0.0, f64::max),
        max_conjugacy_residual: valid.iter().map(|s| s.conjugacy_residual).fold(0.0, f64::max),
        flagged: out.len() - valid.len(),
        samples: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::center_manifold;
    use crate::Series2;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn poly(cap: usize, terms: &[(usize, f64)]) -> Series1 {
        let mut s = Series1::zero(cap);
        for &(k, v) in terms {
            s.set_coeff(k, c(v));
        }
        s
    }

    fn close(a: f64, b: f64) -> bool {
        (wrap(a - b)).abs() < 1e-12
    }

    #[test]
    fn classical_flower() {
        let ps = petal_decomposition(&poly(20, &[(1, 1.0), (2, 1.0)]), 0, 1, 1, 0.1).unwrap();
        assert_eq!(ps.petals.len(), 2);
        let att: Vec<_> = ps.petals.iter().filter(|p| p.kind == PetalKind::Attracting).collect();
        assert!(close(att[0].axis_angle, PI));
        let rep: Vec<_> = ps.petals.iter().filter(|p| p.kind == PetalKind::Repelling).collect();
        assert!(close(rep[0].axis_angle, 0.0));
    }

    #[test]
    fn period_two_flower() {
        // h(h(z)) = z - 2 z^3 + ...: attracting where -2 z^2 < 0
        let ps = petal_decomposition(&poly(20, &[(1, -1.0), (3, 1.0)]), 1, 2, 1, 0.1).unwrap();
        assert!((ps.lead - c(-2.0)).norm() < 1e-14);
        assert_eq!(ps.count(PetalKind::Attracting), 2);
        assert_eq!(ps.count(PetalKind::Repelling), 2);
        for (i, pt) in ps.petals.iter().enumerate() {
            assert!(close(pt.axis_angle, i as f64 * PI / 2.0));
            let expect = if i % 2 == 0 { PetalKind::Attracting } else { PetalKind::Repelling };
            assert_eq!(pt.kind, expect);
        }
        // h swaps the two attracting petals: one cycle of length two
        assert!(ps.petals.iter().all(|p| p.cycle == 0));
    }

    #[test]
    fn double_multiplicity_alternates() {
        let ps = petal_decomposition(&poly(20, &[(1, 1.0), (3, 1.0)]), 0, 1, 2, 0.1).unwrap();
        assert_eq!(ps.petals.len(), 4);
        for w in ps.petals.windows(2) {
            assert_ne!(w[0].kind, w[1].kind);
        }
        let cycles: std::collections::BTreeSet<_> = ps.petals.iter().map(|p| p.cycle).collect();
        assert_eq!(cycles.len(), 2);
    }

    #[test]
    fn rejects_unnormalized() {
        let h = poly(20, &[(1, 1.0), (2, 0.5)]);
        assert!(matches!(petal_decomposition(&h, 0, 1, 1, 0.1), Err(Error::Precondition(_))));
        let h = poly(20, &[(1, 1.0), (2, 1.0)]);
        assert!(matches!(petal_decomposition(&h, 0, 1, 2, 0.1), Err(Error::Precondition(_))));
    }

    #[test]
    fn abel_residuals_for_quadratic() {
        let ps = petal_decomposition(&poly(20, &[(1, 1.0), (2, 1.0)]), 0, 1, 1, 0.1).unwrap();
        for id in 0..2 {
            let fc = fatou_coordinate(&ps, id, 10_000).unwrap();
            assert_eq!(fc.sample_failures, 0);
            assert!(fc.abel_residual_bound < 1e-8, "{id}: {}", fc.abel_residual_bound);
        }
    }

    #[test]
    fn abel_residuals_period_two() {
        let ps = petal_decomposition(&poly(24, &[(1, -1.0), (3, 1.0)]), 1, 2, 1, 0.1).unwrap();
        for id in 0..4 {
            let fc = fatou_coordinate(&ps, id, 100_000).unwrap();
            assert_eq!(fc.sample_failures, 0);
            assert!(fc.abel_residual_bound < 1e-8, "{id}: {}", fc.abel_residual_bound);
        }
    }

    #[test]
    fn mobius_translation() {
        // z/(1 - z) is conjugate to t + 1 by t = -1/z exactly
        let h = Series1::from_coeffs((0..=30).map(|k| c(if k == 0 { 0.0 } else { 1.0 })).collect()).unwrap();
        let ps = petal_decomposition(&h, 0, 1, 1, 0.1).unwrap();
        let id = ps.petals.iter().position(|p| p.kind == PetalKind::Attracting).unwrap();
        let fc = fatou_coordinate(&ps, id, 1000).unwrap();
        assert!(fc.expansion.beta.norm() < 1e-14);
        let offset = |z: Complex| fc.evaluate(z).unwrap().value + 1.0 / z;
        let base = offset(c(-0.1));
        for z in fc.petal().arc_sample(10) {
            assert!((offset(z) - base).norm() < 1e-10);
        }
    }

    #[test]
    fn lift_along_center_graph() {
        let mu = c(0.4);
        let n1 = Series2::from_terms(16, &[(2, 0, c(1.0))]).unwrap();
        let n2 = Series2::from_terms(16, &[(2, 0, c(1.0))]).unwrap();
        let g = Germ2::diagonal(c(1.0), mu, &n1, &n2).unwrap();
        let cm = center_manifold(&g, 16).unwrap();
        assert!((cm.series.coeff(2) - c(1.0) / (c(1.0) - mu)).norm() < 1e-14);
        let hc = restrict_to_center(&g, &cm).unwrap();
        let ps = petal_decomposition(&hc, 0, 1, 1, 0.05).unwrap();
        let rep = ps.petals.iter().position(|p| p.kind == PetalKind::Repelling).unwrap();
        let lift = lift_repelling_petal(&g, &cm, &ps, rep, 40).unwrap();
        assert_eq!(lift.flagged, 0);
        assert!(lift.max_graph_residual < 1e-8, "{}", lift.max_graph_residual);
        assert!(lift.max_conjugacy_residual < 1e-6);
        let att = 1 - rep;
        assert!(matches!(lift_repelling_petal(&g, &cm, &ps, att, 4), Err(Error::Precondition(_))));
    }

    #[test]
    fn invariant_axis_lift() {
        let n1 = Series2::from_terms(12, &[(2, 0, c(1.0))]).unwrap();
        let g = Germ2::diagonal(c(1.0), c(0.5), &n1, &Series2::zero(12)).unwrap();
        let cm = center_manifold(&g, 12).unwrap();
        assert!(cm.series.is_zero());
        let ps = petal_decomposition(&restrict_to_center(&g, &cm).unwrap(), 0, 1, 1, 0.05).unwrap();
        let lift = lift_repelling_petal(&g, &cm, &ps, 0, 10).unwrap();
        assert_eq!(lift.max_graph_residual, 0.0);
    }
}
