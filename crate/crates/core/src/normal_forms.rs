//! Coordinate changes: the one-variable semi-parabolic normal form, the
//! skew-product coefficient elimination, cocycle linearization and the
//! cohomology equation.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rotation::Multiplier;
use crate::series::{Complex, Series1, Series2};

/// Coefficients at or below this size count as zero in the multiplicity
/// computation.
pub const MULTIPLICITY_TOL: f64 = 1e-11;

/// `(nu, A)` where `h^q(x) - x = A x^{nu q + 1} + ...`.
pub fn semiparabolic_multiplicity(h: &Series1, q: u32) -> Result<(u32, Complex)> {
    let cap = h.cap();
    let q = q.max(1);
    if cap < 2 * q as usize + 1 {
        return Err(Error::DegreeBudget { needed: 2 * q as usize + 1, max: cap });
    }
    let hq = h.iterate(q as usize)?;
    let diff = &hq - &Series1::var(cap);
    let k = (2..=cap).find(|&k| diff.coeff(k).norm() > MULTIPLICITY_TOL);
    let Some(k) = k else {
        return Err(Error::NonIsolatedFixedPoint { q, cap });
    };
    if (k - 1) % q as usize != 0 {
        return Err(Error::Inconsistent(format!(
            "lowest order {k} of h^{q} - id is not 1 mod {q}"
        )));
    }
    Ok((((k - 1) / q as usize) as u32, diff.coeff(k)))
}

/// Threshold on `|lambda - lambda^k|` below which elimination aborts.
pub const ELIMINATION_DIVISOR_TOL: f64 = 1e-10;
/// Threshold on `|lambda^n - 1|` below which the cohomology solver aborts.
pub const COHOMOLOGY_DIVISOR_TOL: f64 = 1e-13;
/// Infinite products and sums stop once a new factor or term moves no
/// coefficient by more than this.
pub const TRUNCATION_TOL: f64 = 1e-15;
const MAX_FACTORS: usize = 100_000;
/// Coefficients below this size are treated as already eliminated.
const ZERO_COEFF: f64 = 1e-15;

/// Coefficient of `x^{nu q + 1}` in the semi-parabolic normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lead {
    /// `lambda x + x^{nu q + 1}`.
    #[default]
    One,
    /// `lambda x + lambda x^{nu q + 1}`.
    Lambda,
}

#[derive(Clone, Debug, Serialize)]
pub struct Step {
    pub order: usize,
    pub kind: StepKind,
    pub coefficient: Complex,
    /// `|lambda - lambda^k|` for non-resonant steps.
    pub divisor: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// `X = x + b x^k`.
    NonResonant,
    /// `X = A x`.
    Scaling,
    /// `X = x + b x^{(j - nu) q + 1}` removing the order `j q + 1`.
    Resonant,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalForm1 {
    pub transformed: Series1,
    /// `phi` with `transformed = phi o h o phi^{-1}`.
    pub change: Series1,
    pub eliminated_orders: Vec<usize>,
    pub steps: Vec<Step>,
    pub nu: Option<u32>,
    /// Largest coefficient of `phi o h - transformed o phi`.
    pub residual_norm: f64,
    /// Largest remaining coefficient at the eliminated orders.
    pub eliminated_residual: f64,
}

fn conjugate(h: &Series1, phi: &Series1) -> Result<Series1> {
    phi.compose(&h.compose(&phi.invert_local()?, true)?, true)
}

/// Reduces a one-variable germ `h(x) = lambda x + ...` by polynomial
/// changes of coordinates up to `target_order`.
///
/// With `period = Some(q)` the multiplier is a primitive `q`-th root of
/// unity; orders `k != 1 mod q` are removed, the order `nu q + 1`
/// coefficient is scaled to `lead`, and the resonant orders `j q + 1` with
/// `nu < j < 2 nu` are removed. With `period = None` every order is treated
/// as non-resonant.
pub fn normalize_1d(h: &Series1, period: Option<u32>, target_order: usize, lead: Lead) -> Result<NormalForm1> {
    let cap = h.cap();
    if target_order > cap {
        return Err(Error::DegreeBudget { needed: target_order, max: cap });
    }
    if !h.coeff(0).is_zero() {
        return Err(Error::NotAFixedPoint);
    }
    let lambda = h.coeff(1);
    let (nu, q) = match period {
        Some(q) => {
            let (nu, _) = semiparabolic_multiplicity(h, q)?;
            let m = (nu * q) as usize;
            if target_order > 2 * m + 1 {
                return Err(Error::Precondition(format!(
                    "target order {target_order} exceeds 2 nu q + 1 = {}",
                    2 * m + 1
                )));
            }
            (Some(nu), q as usize)
        }
        None => (None, 0),
    };
    let lead_value = match lead {
        Lead::One => Complex::new(1.0, 0.0),
        Lead::Lambda => lambda,
    };
    let mut cur = h.clone();
    let mut change = Series1::var(cap);
    let mut steps = Vec::new();
    let mut eliminated = Vec::new();
    for k in 2..=target_order {
        let a = cur.coeff(k);
        let resonant = q > 0 && (k - 1) % q == 0;
        let phi = if !resonant {
            let divisor = lambda - lambda.powu(k as u32);
            if divisor.norm() < ELIMINATION_DIVISOR_TOL {
                return Err(Error::SmallDivisor { order: k, divisor: divisor.norm() });
            }
            if a.norm() <= ZERO_COEFF {
                continue;
            }
            let b = a / divisor;
            steps.push(Step { order: k, kind: StepKind::NonResonant, coefficient: b, divisor: Some(divisor.norm()) });
            eliminated.push(k);
            &Series1::var(cap) + &Series1::monomial(cap, k, b)
        } else {
            let nu = nu.expect("resonant orders need a period") as usize;
            let j = (k - 1) / q;
            let m = nu * q;
            if j < nu || j >= 2 * nu {
                continue;
            }
            if j == nu {
                let ratio = a / lead_value;
                if (ratio - 1.0).norm() <= ZERO_COEFF {
                    continue;
                }
                let scale = ratio.powf(1.0 / m as f64);
                steps.push(Step { order: k, kind: StepKind::Scaling, coefficient: scale, divisor: None });
                Series1::monomial(cap, 1, scale)
            } else {
                if a.norm() <= ZERO_COEFF {
                    continue;
                }
                let b = a / (lead_value * ((2 * nu - j) * q) as f64);
                let order = (j - nu) * q + 1;
                steps.push(Step { order: k, kind: StepKind::Resonant, coefficient: b, divisor: None });
                eliminated.push(k);
                &Series1::var(cap) + &Series1::monomial(cap, order, b)
            }
        };
        cur = conjugate(&cur, &phi)?;
        change = phi.compose(&change, true)?;
    }
    let residual_norm = change.compose(h, true)?.max_abs_diff(&cur.compose(&change, true)?);
    let eliminated_residual = eliminated.iter().map(|&k| cur.coeff(k).norm()).fold(0.0, f64::max);
    Ok(NormalForm1 {
        transformed: cur,
        change,
        eliminated_orders: eliminated,
        steps,
        nu,
        residual_norm,
        eliminated_residual,
    })
}

/// The skew germ `(x, y) -> (first(x, y), second(x, y))` with
/// `first(0, y) = 0`, `d_x first(0, 0) = lambda` and
/// `second(0, y) = g(y)` contracting.
#[derive(Clone, Debug, Serialize)]
pub struct SkewGerm {
    pub lambda: Complex,
    pub first: Series2,
    pub second: Series2,
}

impl SkewGerm {
    pub fn new(lambda: Complex, first: Series2, second: Series2) -> Result<Self> {
        if first.cap() != second.cap() {
            return Err(Error::CapMismatch { left: first.cap(), right: second.cap() });
        }
        if first.x_coefficient(0).max_abs() > 0.0 {
            return Err(Error::Precondition("first coordinate must vanish on x = 0".into()));
        }
        if (first.coeff(1, 0) - lambda).norm() > 1e-12 {
            return Err(Error::Precondition("d_x first(0, 0) differs from lambda".into()));
        }
        let g1 = second.coeff(0, 1).norm();
        if !(g1 > 0.0 && g1 < 1.0) || !second.coeff(0, 0).is_zero() {
            return Err(Error::Precondition(format!("g'(0) must satisfy 0 < |g'(0)| < 1, got {g1}")));
        }
        Ok(SkewGerm { lambda, first, second })
    }

    pub fn cap(&self) -> usize {
        self.first.cap()
    }

    /// `g(y) = second(0, y)`.
    pub fn contraction(&self) -> Series1 {
        self.second.x_coefficient(0)
    }

    /// `a_i(y)`, the coefficient of `x^i` in the first coordinate.
    pub fn a(&self, i: usize) -> Series1 {
        self.first.x_coefficient(i)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SkewStep {
    pub transformed: SkewGerm,
    /// `X = change(x, y)`, `Y = y`.
    pub change: Series2,
    /// `u(Y)` or `v(Y)`.
    pub coefficient: Series1,
    pub factors: usize,
    /// Largest coefficient of `Phi o F - F' o Phi`.
    pub residual_norm: f64,
}

/// Inverts `X = c(y) x + sum_{i>=2} ...` in `x` for fixed `y`, by the
/// fixed-point iteration `x <- (X - N(x, y)) / c(y)`.
fn fiber_inverse(change: &Series2) -> Result<Series2> {
    let cap = change.cap();
    let c = change.x_coefficient(1);
    let c_inv = c.reciprocal()?.as_y();
    let mut nonlinear = change.clone();
    for j in 0..=cap.saturating_sub(1) {
        nonlinear.set_coeff(1, j, Complex::zero());
    }
    let big_x = Series2::x(cap);
    let y = Series2::y(cap);
    let mut x = &big_x * &c_inv;
    for _ in 0..cap {
        let n = nonlinear.compose_pair(&x, &y)?;
        x = &(&big_x - &n) * &c_inv;
    }
    Ok(x)
}

fn conjugate_skew(s: &SkewGerm, change: &Series2) -> Result<(SkewGerm, f64)> {
    let cap = s.cap();
    let inv = fiber_inverse(change)?;
    let y = Series2::y(cap);
    let second = s.second.compose_pair(&inv, &y)?;
    let lifted = change.compose_pair(&s.first, &s.second)?;
    let first = lifted.compose_pair(&inv, &y)?;
    let out = SkewGerm { lambda: s.lambda, first, second };
    let lhs = change.compose_pair(&s.first, &s.second)?;
    let rhs = out.first.compose_pair(change, &y)?;
    let rhs2 = out.second.compose_pair(change, &y)?;
    let residual = lhs.max_abs_diff(&rhs).max(s.second.max_abs_diff(&rhs2));
    Ok((out, residual))
}

/// Iterates of `g` starting from the identity, stopping once `g^n` has no
/// coefficient above `TRUNCATION_TOL`.
fn accumulate(
    g: &Series1,
    mut term: impl FnMut(&Series1) -> Result<Series1>,
    mut combine: impl FnMut(&Series1) -> Result<f64>,
) -> Result<usize> {
    let mut gn = Series1::var(g.cap());
    for n in 0..MAX_FACTORS {
        let t = term(&gn)?;
        let change = combine(&t)?;
        if change <= TRUNCATION_TOL && n > 0 {
            return Ok(n + 1);
        }
        gn = g.compose(&gn, true)?;
        if !gn.coeffs().iter().all(|c| c.is_finite()) {
            return Err(Error::TruncationBudget { terms: n, last_change: f64::INFINITY });
        }
    }
    Err(Error::TruncationBudget { terms: MAX_FACTORS, last_change: f64::NAN })
}

/// Makes `a_1(y)` constant via `X = u(y) x`,
/// `u(Y) = prod_{n>=0} a_1(g^n(Y)) / lambda`.
pub fn straighten_a1(s: &SkewGerm) -> Result<SkewStep> {
    let cap = s.cap();
    let a1 = s.a(1);
    if (a1.coeff(0) - s.lambda).norm() > 1e-12 {
        return Err(Error::Precondition("a_1(0) differs from lambda".into()));
    }
    let g = s.contraction();
    let inv_lambda = s.lambda.inv();
    let mut u = Series1::one(cap);
    let factors = accumulate(
        &g,
        |gn| Ok(a1.compose(gn, true)?.scale(inv_lambda)),
        |factor| {
            let next = &u * factor;
            let change = next.max_abs_diff(&u);
            u = next;
            Ok(change)
        },
    )?;
    let change = &Series2::x(cap) * &u.as_y();
    let (transformed, residual_norm) = conjugate_skew(s, &change)?;
    Ok(SkewStep { transformed, change, coefficient: u, factors, residual_norm })
}

/// Makes `a_i(y)` constant via `X = x + v(y) x^i`,
/// `v(Y) = lambda^{-1} sum_{j>=0} (a_i(g^j(Y)) - a_i(0)) lambda^{j(i-1)}`.
pub fn flatten_ai(s: &SkewGerm, i: usize) -> Result<SkewStep> {
    let cap = s.cap();
    if i < 2 || i > cap {
        return Err(Error::Precondition(format!("order {i} outside 2..={cap}")));
    }
    let ai = s.a(i);
    let a0 = ai.coeff(0);
    let g = s.contraction();
    let rot = s.lambda.powu(i as u32 - 1);
    let mut v = Series1::zero(cap);
    let mut weight = s.lambda.inv();
    let factors = accumulate(
        &g,
        |gn| {
            let mut t = ai.compose(gn, true)?;
            t.set_coeff(0, t.coeff(0) - a0);
            Ok(t)
        },
        |t| {
            let term = t.scale(weight);
            weight *= rot;
            v = &v + &term;
            Ok(term.max_abs())
        },
    )?;
    let mut xi = Series2::zero(cap);
    xi.set_coeff(i, 0, Complex::new(1.0, 0.0));
    let change = &Series2::x(cap) + &(&xi * &v.as_y());
    let (transformed, residual_norm) = conjugate_skew(s, &change)?;
    Ok(SkewStep { transformed, change, coefficient: v, factors, residual_norm })
}

#[derive(Clone, Debug, Serialize)]
pub struct SkewReport {
    pub transformed: SkewGerm,
    pub change: Series2,
    pub orders: Vec<usize>,
    pub residual_norm: f64,
    /// Largest non-constant coefficient of `a_1 .. a_{r'}` after reduction.
    pub non_constant: f64,
}

/// Runs `straighten_a1` and `flatten_ai` for `i = 2..=max_order`.
pub fn skew_normal_form(s: &SkewGerm, max_order: usize) -> Result<SkewReport> {
    let cap = s.cap();
    let first = straighten_a1(s)?;
    let mut cur = first.transformed;
    let mut change = first.change;
    let mut residual_norm = first.residual_norm;
    let mut orders = vec![1];
    for i in 2..=max_order {
        let step = flatten_ai(&cur, i)?;
        change = step.change.compose_pair(&change, &Series2::y(cap))?;
        residual_norm = residual_norm.max(step.residual_norm);
        cur = step.transformed;
        orders.push(i);
    }
    let audit = {
        let y = Series2::y(cap);
        let lhs = change.compose_pair(&s.first, &s.second)?;
        let rhs = cur.first.compose_pair(&change, &y)?;
        lhs.max_abs_diff(&rhs)
    };
    let non_constant = (1..=max_order)
        .map(|i| {
            let a = cur.a(i);
            (1..=cap).map(|k| a.coeff(k).norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    Ok(SkewReport { transformed: cur, change, orders, residual_norm: residual_norm.max(audit), non_constant })
}

/// The skew product `F(x, y) = (lambda x, nu(x, y))` with
/// `nu = mu y (B0(x) + y B1(x, y))`, `B0(0) = 1`.
#[derive(Clone, Debug, Serialize)]
pub struct CocycleMap {
    pub lambda: Complex,
    pub mu: Complex,
    pub nu: Series2,
}

impl CocycleMap {
    pub fn new(lambda: Complex, nu: Series2) -> Result<Self> {
        if nu.y_coefficient(0).max_abs() > 0.0 {
            return Err(Error::Precondition("nu(x, 0) must vanish".into()));
        }
        let mu = nu.coeff(0, 1);
        if !(mu.norm() > 0.0 && mu.norm() < 1.0) {
            return Err(Error::Precondition(format!("need 0 < |mu| < 1, got {}", mu.norm())));
        }
        Ok(CocycleMap { lambda, mu, nu })
    }

    /// `B0(x) = d_y nu(x, 0) / mu`.
    pub fn b0(&self) -> Series1 {
        self.nu.y_coefficient(1).scale(self.mu.inv())
    }

    /// `B1(x, y) = (nu - mu y B0(x)) / (mu y^2)`.
    pub fn b1(&self) -> Series2 {
        self.nu.divide_by_y_squared().scale(self.mu.inv())
    }

    pub fn apply(&self, p: crate::Point2) -> crate::Point2 {
        crate::Point2::new(self.lambda * p.x, self.nu.eval(p.x, p.y))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SamplePoint {
    pub x: Complex,
    pub y: Complex,
    pub psi: Complex,
    /// `|psi(F(p)) - mu B0(x) psi(p)|`.
    pub functional_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CocycleReport {
    pub psi: Series2,
    /// First `n` with coefficient change below the tolerance.
    pub converged_at: Option<usize>,
    pub last_change: f64,
    /// Largest coefficient of `psi o F - mu B0 psi`.
    pub functional_residual: f64,
    /// Largest `|d_y psi(x, 0) - 1|` coefficient.
    pub normalization_residual: f64,
    pub m_bound: f64,
    /// Largest value of `|mu|^{1/2} (1 + |x| M + |y| M)` on the sample.
    pub worst_condition: f64,
    /// `(n, sample index)` where `|nu_n| < |mu|^{n/2} |y|` failed.
    pub decay_violations: Vec<(usize, usize)>,
    pub samples: Vec<SamplePoint>,
}

/// Tolerance on coefficient changes between successive `psi_n`.
pub const COCYCLE_TOL: f64 = 1e-12;
/// Number of iterates over which the decay bound is checked.
pub const DECAY_STEPS: usize = 60;

/// Linearizes the cocycle `F` by `psi = lim nu_n / d_y nu_n(x, 0)` where
/// `nu_n` is the second coordinate of `F^n` (`nu_0 = y`).
///
/// `radii = (rx, ry)` bounds the polydisk where `M` is estimated and
/// `sample` lists points of that polydisk where the technical condition,
/// the decay bound and the functional equation are checked.
pub fn linearize_cocycle(
    f: &CocycleMap,
    n_max: usize,
    radii: (f64, f64),
    sample: &[crate::Point2],
) -> Result<CocycleReport> {
    let cap = f.nu.cap();
    let b0 = f.b0();
    let b1 = f.b1();
    let (rx, ry) = radii;
    let m0: f64 = (1..=cap).map(|k| b0.coeff(k).norm() * rx.powi(k as i32 - 1)).sum();
    let m1 = b1.polydisk_bound(rx, ry);
    let m_bound = m0.max(m1) * (1.0 + 1e-12);
    let root_mu = f.mu.norm().sqrt();
    let worst_condition = sample
        .iter()
        .map(|p| root_mu * (1.0 + p.x.norm() * m_bound + p.y.norm() * m_bound))
        .fold(0.0, f64::max);
    if worst_condition >= 1.0 {
        return Err(Error::DomainTooLarge { worst: worst_condition });
    }

    let lam_x = Series2::x(cap).scale(f.lambda);
    let mut nu_n = Series2::y(cap);
    let mut d_n = Series1::one(cap);
    let mut b0_rot = b0.clone();
    let mut psi = Series2::y(cap);
    let mut converged_at = None;
    let mut last_change = f64::INFINITY;
    for n in 1..=n_max {
        nu_n = nu_n.compose_pair(&lam_x, &f.nu)?;
        // d_n(x) = mu^n prod_{j<n} B0(lambda^j x)
        d_n = (&d_n * &b0_rot).scale(f.mu);
        b0_rot = Series1::from_coeffs(
            b0_rot.coeffs().iter().enumerate().map(|(k, c)| c * f.lambda.powu(k as u32)).collect(),
        )?;
        let next = &nu_n * &d_n.reciprocal()?.as_x();
        last_change = next.max_abs_diff(&psi);
        psi = next;
        if last_change < COCYCLE_TOL {
            converged_at = Some(n);
            break;
        }
    }

    let lhs = psi.compose_pair(&lam_x, &f.nu)?;
    let rhs = &b0.scale(f.mu).as_x() * &psi;
    let functional_residual = lhs.max_abs_diff(&rhs);
    let normalization_residual = psi.y_coefficient(1).max_abs_diff(&Series1::one(cap));

    let steps = n_max.max(DECAY_STEPS);
    let mut decay_violations = Vec::new();
    let mut samples = Vec::with_capacity(sample.len());
    for (idx, p) in sample.iter().enumerate() {
        let pointwise = |start: crate::Point2| -> Complex {
            let mut z = start;
            let mut d = Complex::new(1.0, 0.0);
            let mut prev = start.y;
            for _ in 0..steps {
                d *= f.mu * b0.eval(z.x);
                z = f.apply(z);
                let cur = z.y / d;
                if (cur - prev).norm() < TRUNCATION_TOL * cur.norm().max(1e-300) {
                    return cur;
                }
                prev = cur;
            }
            prev
        };
        let mut z = *p;
        for n in 1..=DECAY_STEPS {
            z = f.apply(z);
            if z.y.norm() >= f.mu.norm().powf(n as f64 / 2.0) * p.y.norm() && p.y.norm() > 0.0 {
                decay_violations.push((n, idx));
            }
        }
        let value = pointwise(*p);
        let image = pointwise(f.apply(*p));
        let functional = (image - f.mu * b0.eval(p.x) * value).norm();
        samples.push(SamplePoint { x: p.x, y: p.y, psi: value, functional_residual: functional });
    }
    Ok(CocycleReport {
        psi,
        converged_at,
        last_change,
        functional_residual,
        normalization_residual,
        m_bound,
        worst_condition,
        decay_violations,
        samples,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyReport {
    /// `eta = exp(phi)`.
    pub eta: Series1,
    /// `phi(x) = sum b_n x^n` with `b_n = a_n / (lambda^n - 1)`.
    pub phi: Series1,
    /// `(n, |lambda^n - 1|)`.
    pub divisors: Vec<(usize, f64)>,
    /// Largest coefficient of `mu(x) eta(x) / eta(lambda x) - mu`.
    pub residual: f64,
    /// `min_n |b_n|^{-1/n}` over the nonzero coefficients.
    pub radius_estimate: Option<f64>,
    /// `max |b_n|^{1/n}` over the upper half of the computed range.
    pub root_test_tail: Option<f64>,
}

/// Solves `mu(x) eta(x) / eta(lambda x) = mu(0)` for `eta` by matching the
/// Taylor coefficients of `log mu(x)`.
pub fn solve_cohomology(mu_of_x: &Series1, lambda: &Multiplier) -> Result<CohomologyReport> {
    let cap = mu_of_x.cap();
    let mu0 = mu_of_x.coeff(0);
    let log_mu = mu_of_x.ln()?;
    let mut phi = Series1::zero(cap);
    let mut divisors = Vec::with_capacity(cap);
    for n in 1..=cap {
        let d = lambda.pow_minus_one(n as u64);
        divisors.push((n, d.norm()));
        if d.norm() < COHOMOLOGY_DIVISOR_TOL {
            return Err(Error::SmallDivisor { order: n, divisor: d.norm() });
        }
        phi.set_coeff(n, log_mu.coeff(n) / d);
    }
    let eta = phi.exp();
    let eta_rot = Series1::from_coeffs(
        eta.coeffs().iter().enumerate().map(|(k, c)| c * lambda.pow(k as u64)).collect(),
    )?;
    let lhs = &(mu_of_x * &eta) * &eta_rot.reciprocal()?;
    let residual = lhs.max_abs_diff(&Series1::constant(cap, mu0));
    let roots: Vec<(usize, f64)> = (1..=cap)
        .filter(|&n| phi.coeff(n).norm() > 0.0)
        .map(|n| (n, phi.coeff(n).norm().powf(1.0 / n as f64)))
        .collect();
    let radius_estimate = roots.iter().map(|&(_, r)| 1.0 / r).reduce(f64::min);
    let root_test_tail = roots.iter().filter(|(n, _)| 2 * n > cap).map(|&(_, r)| r).reduce(f64::max);
    Ok(CohomologyReport { eta, phi, divisors, residual, radius_estimate, root_test_tail })
}
