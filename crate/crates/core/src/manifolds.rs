//! Formal Taylor data of the local center manifold `y = phi(x)` and strong
//! stable manifold `x = sigma(y)`, solved degree by degree.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::germ::Germ2;
use crate::series::{Complex, Series1};

/// Divisors below this size cannot occur for valid germs.
const DIVISOR_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Graph `y = phi(x)`.
    Center,
    /// Graph `x = sigma(y)`.
    StrongStable,
}

#[derive(Clone, Debug, Serialize)]
pub struct ManifoldGraph {
    pub axis: Axis,
    pub series: Series1,
    /// Largest coefficient of the invariance defect through the degree.
    pub residual_norm: f64,
}

fn truncate_germ(g: &Germ2, degree: usize) -> Result<(crate::Series2, crate::Series2)> {
    if degree > g.cap() {
        return Err(Error::DegreeBudget { needed: degree, max: g.cap() });
    }
    Ok((g.f1().with_cap(degree), g.f2().with_cap(degree)))
}

/// Solves `f2(x, phi(x)) = phi(f1(x, phi(x)))`; the order-`k` coefficient
/// has divisor `lambda^k - mu`.
pub fn center_manifold(g: &Germ2, degree: usize) -> Result<ManifoldGraph> {
    let (f1, f2) = truncate_germ(g, degree)?;
    let x = Series1::var(degree);
    let defect = |phi: &Series1| -> Result<Series1> {
        let lhs = f2.substitute_curve(&x, phi)?;
        let rhs = phi.compose(&f1.substitute_curve(&x, phi)?, true)?;
        lhs.checked_sub(&rhs)
    };
    let mut phi = Series1::zero(degree);
    let mut lam_k = g.lambda();
    for k in 2..=degree {
        lam_k *= g.lambda();
        let divisor = lam_k - g.mu();
        if divisor.norm() < DIVISOR_FLOOR {
            return Err(Error::Inconsistent(format!("center divisor vanishes at order {k}")));
        }
        let r = defect(&phi)?;
        phi.set_coeff(k, r.coeff(k) / divisor);
    }
    let residual_norm = defect(&phi)?.max_abs();
    Ok(ManifoldGraph { axis: Axis::Center, series: phi, residual_norm })
}

/// Solves `f1(sigma(y), y) = sigma(f2(sigma(y), y))`; the order-`k`
/// coefficient has divisor `mu^k - lambda`.
pub fn strong_stable_manifold(g: &Germ2, degree: usize) -> Result<ManifoldGraph> {
    let (f1, f2) = truncate_germ(g, degree)?;
    let y = Series1::var(degree);
    let defect = |sigma: &Series1| -> Result<Series1> {
        let lhs = f1.substitute_curve(sigma, &y)?;
        let rhs = sigma.compose(&f2.substitute_curve(sigma, &y)?, true)?;
        lhs.checked_sub(&rhs)
    };
    let mut sigma = Series1::zero(degree);
    let mut mu_k = g.mu();
    for k in 2..=degree {
        mu_k *= g.mu();
        let divisor = mu_k - g.lambda();
        if divisor.norm() < DIVISOR_FLOOR {
            return Err(Error::Inconsistent(format!("stable divisor vanishes at order {k}")));
        }
        let r = defect(&sigma)?;
        sigma.set_coeff(k, r.coeff(k) / divisor);
    }
    let residual_norm = defect(&sigma)?.max_abs();
    Ok(ManifoldGraph { axis: Axis::StrongStable, series: sigma, residual_norm })
}

/// `h_c(x) = f1(x, phi(x))`, the germ restricted to the formal center
/// manifold.
pub fn restrict_to_center(g: &Germ2, cm: &ManifoldGraph) -> Result<Series1> {
    if cm.axis != Axis::Center {
        return Err(Error::Precondition("restriction needs a center graph".into()));
    }
    let degree = cm.series.cap();
    let (f1, _) = truncate_germ(g, degree)?;
    let mut h = f1.substitute_curve(&Series1::var(degree), &cm.series)?;
    if !cm.series.coeff(0).is_zero() || !cm.series.coeff(1).is_zero() {
        return Err(Error::Precondition("center graph is not tangent".into()));
    }
    h.set_coeff(1, g.lambda());
    h.set_coeff(0, Complex::zero());
    Ok(h)
}
