//! Germs of `(C^2, 0)` with one neutral and one attracting eigenvalue.

use std::f64::consts::TAU;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifolds;
use crate::normal_forms;
use crate::rotation::{GrowthVerdict, RotationArithmetic, SumVerdict};
use crate::series::{Complex, Series1, Series2};

/// Tolerance on `||lambda| - 1|` for the neutral eigenvalue.
pub const NEUTRAL_TOL: f64 = 1e-12;
/// Largest period tried by the root-of-unity test.
pub const MAX_PERIOD: u32 = 512;
/// Tolerance of the root-of-unity test `|lambda^q - 1|`.
pub const ROOT_TOL: f64 = 1e-10;

const NEWTON_STEPS: usize = 50;
const NEWTON_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize)]
pub struct Point2 {
    pub x: Complex,
    pub y: Complex,
}

impl Point2 {
    pub fn new(x: Complex, y: Complex) -> Self {
        Point2 { x, y }
    }

    /// Euclidean norm on `C^2`.
    pub fn norm(&self) -> f64 {
        self.x.norm().hypot(self.y.norm())
    }

    pub fn dist(&self, other: &Point2) -> f64 {
        (self.x - other.x).norm().hypot((self.y - other.y).norm())
    }
}

pub type Matrix2 = [[Complex; 2]; 2];

fn inverse2(m: &Matrix2) -> Option<Matrix2> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.norm() == 0.0 {
        return None;
    }
    Some([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
}

fn apply2(m: &Matrix2, p: Point2) -> Point2 {
    Point2::new(m[0][0] * p.x + m[0][1] * p.y, m[1][0] * p.x + m[1][1] * p.y)
}

/// A germ `f = (f1, f2)` stored in the frame where its linear part is
/// `diag(lambda, mu)`.
#[derive(Clone, Debug)]
pub struct Germ2 {
    f1: Series2,
    f2: Series2,
    lambda: Complex,
    mu: Complex,
    /// Columns are the eigenvectors; original coordinates are `frame * u`.
    frame: Matrix2,
    d1: (Series2, Series2),
    d2: (Series2, Series2),
}

impl Germ2 {
    pub fn new(f1: Series2, f2: Series2) -> Result<Self> {
        if f1.cap() != f2.cap() {
            return Err(Error::CapMismatch { left: f1.cap(), right: f2.cap() });
        }
        if f1.cap() == 0 {
            return Err(Error::EmptySeries);
        }
        if !f1.coeff(0, 0).is_zero() || !f2.coeff(0, 0).is_zero() {
            return Err(Error::NotAFixedPoint);
        }
        let (a, b) = (f1.coeff(1, 0), f1.coeff(0, 1));
        let (c, d) = (f2.coeff(1, 0), f2.coeff(0, 1));
        let half_tr = (a + d) / 2.0;
        let disc = (half_tr * half_tr - (a * d - b * c)).sqrt();
        let (mut e1, mut e2) = (half_tr + disc, half_tr - disc);
        if (e1.norm() - 1.0).abs() > (e2.norm() - 1.0).abs() {
            std::mem::swap(&mut e1, &mut e2);
        }
        if (e1.norm() - 1.0).abs() >= NEUTRAL_TOL || e2.norm() >= 1.0 {
            return Err(Error::NotSemiIndifferent { moduli: [e1.norm(), e2.norm()] });
        }
        let frame = if b.is_zero() && c.is_zero() {
            if (a - e1).norm() <= (d - e1).norm() {
                [[Complex::new(1.0, 0.0), Complex::zero()], [Complex::zero(), Complex::new(1.0, 0.0)]]
            } else {
                [[Complex::zero(), Complex::new(1.0, 0.0)], [Complex::new(1.0, 0.0), Complex::zero()]]
            }
        } else {
            let v1 = eigenvector(a, b, c, d, e1);
            let v2 = eigenvector(a, b, c, d, e2);
            [[v1.0, v2.0], [v1.1, v2.1]]
        };
        let inv = inverse2(&frame).ok_or(Error::Inconsistent("singular eigenframe".into()))?;
        let cap = f1.cap();
        let lin = |m: Complex, n: Complex| -> Result<Series2> {
            Series2::from_terms(cap, &[(1, 0, m), (0, 1, n)])
        };
        let px = lin(frame[0][0], frame[0][1])?;
        let py = lin(frame[1][0], frame[1][1])?;
        let g1 = f1.compose_pair(&px, &py)?;
        let g2 = f2.compose_pair(&px, &py)?;
        let mut h1 = &g1.scale(inv[0][0]) + &g2.scale(inv[0][1]);
        let mut h2 = &g1.scale(inv[1][0]) + &g2.scale(inv[1][1]);
        h1.set_coeff(1, 0, e1);
        h1.set_coeff(0, 1, Complex::zero());
        h2.set_coeff(1, 0, Complex::zero());
        h2.set_coeff(0, 1, e2);
        Ok(Self::from_parts(h1, h2, e1, e2, frame))
    }

    /// The germ `(lambda x + n1, mu y + n2)` with nonlinear parts `n1`, `n2`
    /// already given in the eigenframe.
    pub fn diagonal(lambda: Complex, mu: Complex, n1: &Series2, n2: &Series2) -> Result<Self> {
        let mut f1 = n1.clone();
        let mut f2 = n2.clone();
        f1.set_coeff(1, 0, f1.coeff(1, 0) + lambda);
        f2.set_coeff(0, 1, f2.coeff(0, 1) + mu);
        Self::new(f1, f2)
    }

    fn from_parts(f1: Series2, f2: Series2, lambda: Complex, mu: Complex, frame: Matrix2) -> Self {
        let d1 = (f1.partial_x(), f1.partial_y());
        let d2 = (f2.partial_x(), f2.partial_y());
        Germ2 { f1, f2, lambda, mu, frame, d1, d2 }
    }

    pub fn f1(&self) -> &Series2 {
        &self.f1
    }

    pub fn f2(&self) -> &Series2 {
        &self.f2
    }

    pub fn lambda(&self) -> Complex {
        self.lambda
    }

    pub fn mu(&self) -> Complex {
        self.mu
    }

    pub fn frame(&self) -> Matrix2 {
        self.frame
    }

    pub fn cap(&self) -> usize {
        self.f1.cap()
    }

    /// Converts eigenframe coordinates to the coordinates of the input germ.
    pub fn to_original(&self, p: Point2) -> Point2 {
        apply2(&self.frame, p)
    }

    pub fn from_original(&self, p: Point2) -> Point2 {
        apply2(&inverse2(&self.frame).expect("frame is invertible"), p)
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        Point2::new(self.f1.eval(p.x, p.y), self.f2.eval(p.x, p.y))
    }

    pub fn jacobian(&self, p: Point2) -> Matrix2 {
        [
            [self.d1.0.eval(p.x, p.y), self.d1.1.eval(p.x, p.y)],
            [self.d2.0.eval(p.x, p.y), self.d2.1.eval(p.x, p.y)],
        ]
    }

    /// Solves `f(z) = target` by Newton's method seeded with the inverse of
    /// the linear part.
    pub fn preimage(&self, target: Point2) -> Option<Point2> {
        let mut z = Point2::new(target.x / self.lambda, target.y / self.mu);
        for _ in 0..NEWTON_STEPS {
            let fz = self.apply(z);
            let r = Point2::new(fz.x - target.x, fz.y - target.y);
            let j = self.jacobian(z);
            let step = apply2(&inverse2(&j)?, r);
            z = Point2::new(z.x - step.x, z.y - step.y);
            if !(z.x.is_finite() && z.y.is_finite()) {
                return None;
            }
            if step.norm() <= NEWTON_TOL * target.norm().max(1.0) {
                return Some(z);
            }
        }
        None
    }

    /// Iterates `n` times (backwards when `n < 0`) from `z`, stopping at the
    /// first point outside the ball of radius `trap_radius`.
    pub fn iterate(&self, z: Point2, n: i64, trap_radius: f64) -> Result<Orbit> {
        if z.norm() > trap_radius {
            return Err(Error::OutsideTrap { norm: z.norm(), radius: trap_radius });
        }
        let mut points = vec![z];
        let mut exit = None;
        let mut cur = z;
        for k in 1..=n.unsigned_abs() as usize {
            cur = if n > 0 {
                self.apply(cur)
            } else {
                self.preimage(cur).ok_or(Error::NewtonFailure { step: k })?
            };
            points.push(cur);
            if cur.norm() > trap_radius {
                exit = Some(k);
                break;
            }
        }
        Ok(Orbit { points, exit })
    }

    /// Classifies the fixed point from the multiplier `lambda`.
    ///
    /// `rotation` supplies the continued fraction of the angle; when absent
    /// it is expanded from `arg lambda`.
    pub fn classify(&self, rotation: Option<&RotationArithmetic>) -> Result<FixedPointClass> {
        let (q, residual) = root_of_unity(self.lambda);
        let mut diagnostics = Diagnostics { root_residual: residual, ..Default::default() };
        if let Some(q) = q {
            let turns = self.lambda.arg() / TAU;
            let p = ((turns * q as f64).round() as i64).rem_euclid(q as i64) as u32;
            let hc = self.center_restriction(self.cap())?;
            let (nu, _) = normal_forms::semiparabolic_multiplicity(&hc, q)?;
            return Ok(FixedPointClass { kind: ClassKind::SemiParabolic { p, q, nu }, diagnostics });
        }
        let owned;
        let r = match rotation {
            Some(r) => r,
            None => {
                let turns = (self.lambda.arg() / TAU).rem_euclid(1.0);
                owned = RotationArithmetic::from_real(turns, 64)?;
                &owned
            }
        };
        let terms = r.trusted().saturating_sub(1).min(40);
        let brjuno = r.brjuno_sum(terms);
        let loglog = r.perez_marco_sum(terms);
        let liouville = r.liouville_indicator(terms);
        diagnostics.terms = terms;
        diagnostics.brjuno_total = Some(brjuno.total());
        diagnostics.brjuno = Some(brjuno.verdict);
        diagnostics.perez_marco = Some(loglog.verdict);
        diagnostics.liouville = Some(liouville.verdict);
        let kind = match brjuno.verdict {
            SumVerdict::ConvergingEvidence => ClassKind::SemiSiegelCertified,
            SumVerdict::DivergingEvidence => ClassKind::SemiCremerEvidence,
            SumVerdict::Inconclusive => ClassKind::IrrationalUnresolved,
        };
        Ok(FixedPointClass { kind, diagnostics })
    }

    /// Restriction `x -> f1(x, phi(x))` to the formal center manifold.
    pub fn center_restriction(&self, degree: usize) -> Result<Series1> {
        let cm = manifolds::center_manifold(self, degree)?;
        manifolds::restrict_to_center(self, &cm)
    }
}

fn eigenvector(a: Complex, b: Complex, c: Complex, d: Complex, e: Complex) -> (Complex, Complex) {
    let u = (b, e - a);
    let v = (e - d, c);
    let nu = u.0.norm().hypot(u.1.norm());
    let nv = v.0.norm().hypot(v.1.norm());
    let (x, y, n) = if nu >= nv { (u.0, u.1, nu) } else { (v.0, v.1, nv) };
    (x / n, y / n)
}

/// Minimal `q <= MAX_PERIOD` with `|lambda^q - 1| < ROOT_TOL`, and the
/// smallest residual seen.
pub fn root_of_unity(lambda: Complex) -> (Option<u32>, f64) {
    let mut best = f64::INFINITY;
    let turns = lambda.arg() / TAU;
    for q in 1..=MAX_PERIOD {
        let phase = turns * q as f64;
        let dist = (phase - phase.round()).abs();
        let residual = 2.0 * (std::f64::consts::PI * dist).sin();
        best = best.min(residual);
        if residual < ROOT_TOL {
            return (Some(q), residual);
        }
    }
    (None, best)
}

#[derive(Clone, Debug, Serialize)]
pub struct Orbit {
    pub points: Vec<Point2>,
    /// Index of the first point outside the trap ball.
    pub exit: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassKind {
    SemiParabolic { p: u32, q: u32, nu: u32 },
    SemiSiegelCertified,
    SemiCremerEvidence,
    IrrationalUnresolved,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Diagnostics {
    /// Smallest `|lambda^q - 1|` over the periods tried.
    pub root_residual: f64,
    pub terms: usize,
    pub brjuno_total: Option<f64>,
    pub brjuno: Option<SumVerdict>,
    pub perez_marco: Option<SumVerdict>,
    pub liouville: Option<GrowthVerdict>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointClass {
    #[serde(flatten)]
    pub kind: ClassKind,
    pub diagnostics: Diagnostics,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_lambda() -> Complex {
        Complex::from_polar(1.0, TAU * (5f64.sqrt() - 1.0) / 2.0)
    }

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    #[test]
    fn linear_germ_accepted() {
        let lam = golden_lambda();
        let z = Series2::zero(4);
        let g = Germ2::diagonal(lam, c(0.5), &z, &z).unwrap();
        assert!((g.lambda() - lam).norm() < 1e-15);
        assert_eq!(g.mu(), c(0.5));
        assert_eq!(g.frame()[0][1], Complex::zero());
    }

    #[test]
    fn hyperbolic_spectrum_rejected() {
        let f1 = Series2::from_terms(3, &[(1, 0, c(1.0)), (0, 1, c(1.0))]).unwrap();
        let f2 = Series2::from_terms(3, &[(1, 0, c(0.25))]).unwrap();
        match Germ2::new(f1, f2) {
            Err(Error::NotSemiIndifferent { moduli }) => {
                let big = (1.0 + 2f64.sqrt()) / 2.0;
                let small = (2f64.sqrt() - 1.0) / 2.0;
                let mut m = moduli;
                m.sort_by(f64::total_cmp);
                assert!((m[0] - small).abs() < 1e-14 && (m[1] - big).abs() < 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn swapped_and_sheared_linear_parts() {
        // Attracting direction first: the frame swaps the axes.
        let f1 = Series2::from_terms(3, &[(1, 0, c(0.3))]).unwrap();
        let f2 = Series2::from_terms(3, &[(0, 1, c(-1.0)), (2, 0, c(1.0))]).unwrap();
        let g = Germ2::new(f1, f2).unwrap();
        assert!((g.lambda() - c(-1.0)).norm() < 1e-15);
        assert!((g.mu() - c(0.3)).norm() < 1e-15);
        // Non-diagonal: the eigenvalues survive the frame change.
        let lam = golden_lambda();
        let f1 = Series2::from_terms(4, &[(1, 0, lam), (0, 1, c(0.7)), (2, 0, c(1.0))]).unwrap();
        let f2 = Series2::from_terms(4, &[(0, 1, c(0.4)), (1, 1, c(0.5))]).unwrap();
        let g = Germ2::new(f1.clone(), f2.clone()).unwrap();
        assert!((g.lambda() - lam).norm() < 1e-12);
        assert!((g.mu() - c(0.4)).norm() < 1e-12);
        // Conjugacy check at a point.
        let u = Point2::new(Complex::new(0.01, 0.02), Complex::new(-0.015, 0.005));
        let lhs = g.to_original(g.apply(u));
        let p = g.to_original(u);
        let rhs = Point2::new(f1.eval(p.x, p.y), f2.eval(p.x, p.y));
        assert!(lhs.dist(&rhs) < 1e-15);
    }

    #[test]
    fn classification_examples() {
        let lam = Complex::from_polar(1.0, TAU / 3.0);
        let f1 = Series2::from_terms(8, &[(1, 0, lam), (4, 0, lam)]).unwrap();
        let f2 = Series2::from_terms(8, &[(0, 1, c(0.5))]).unwrap();
        let g = Germ2::new(f1, f2).unwrap();
        let class = g.classify(None).unwrap();
        assert_eq!(class.kind, ClassKind::SemiParabolic { p: 1, q: 3, nu: 1 });

        let z = Series2::zero(6);
        let g = Germ2::diagonal(golden_lambda(), c(0.5), &z, &z).unwrap();
        assert_eq!(g.classify(None).unwrap().kind, ClassKind::SemiSiegelCertified);

        let g = Germ2::diagonal(c(1.0), c(0.5), &z, &z).unwrap();
        assert!(matches!(g.classify(None), Err(Error::NonIsolatedFixedPoint { q: 1, .. })));
    }

    #[test]
    fn iteration_examples() {
        let lam = golden_lambda();
        let z = Series2::zero(4);
        let g = Germ2::diagonal(lam, c(0.5), &z, &z).unwrap();
        let start = Point2::new(c(0.25), Complex::zero());
        let orbit = g.iterate(start, 100, 0.5).unwrap();
        assert_eq!(orbit.exit, None);
        assert!(orbit.points.iter().all(|p| (p.x.norm() - 0.25).abs() < 1e-14));

        let orbit = g.iterate(Point2::new(Complex::zero(), c(0.5)), -3, 10.0).unwrap();
        assert!((orbit.points[3].y - c(4.0)).norm() < 1e-12);
        let orbit = g.iterate(Point2::new(Complex::zero(), c(0.5)), -10, 3.0).unwrap();
        assert_eq!(orbit.exit, Some(3));
        assert!(g.iterate(Point2::new(c(1.0), c(0.0)), 1, 0.5).is_err());
    }

    #[test]
    fn newton_roundtrip() {
        let lam = golden_lambda();
        let f1 = Series2::from_terms(4, &[(1, 0, lam), (2, 0, lam)]).unwrap();
        let f2 = Series2::from_terms(4, &[(0, 1, c(0.3))]).unwrap();
        let g = Germ2::new(f1, f2).unwrap();
        for k in 0..20 {
            let t = k as f64 * 0.7;
            let z = Point2::new(Complex::from_polar(0.05, t), Complex::from_polar(0.03, 2.0 * t));
            let back = g.preimage(g.apply(z)).unwrap();
            assert!(back.dist(&z) < 1e-10);
        }
    }
}
