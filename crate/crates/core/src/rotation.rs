//! Continued fractions of the rotation number and the arithmetic sums that
//! govern linearization.
//!
//! Convergents are exact `i128` integers built from the recurrence
//! `q_{n+1} = a_{n+1} q_n + q_{n-1}`. Every addition and multiplication is
//! checked; an expansion whose next convergent would overflow stops there and
//! records the index in [`RotationArithmetic::overflow_at`].
//!
//! The sums below are finite truncations of infinite series, so their
//! verdicts are evidence labels only.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::Complex;

/// Bits of precision of an `f64` mantissa.
pub const PRECISION_BITS: u32 = 53;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub p: i128,
    pub q: i128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    FromReal,
    FromQuotients,
}

#[derive(Clone, Debug, Serialize)]
pub struct RotationArithmetic {
    alpha: f64,
    /// `a_1, a_2, ...` (the integer part `a_0` is always 0).
    quotients: Vec<i128>,
    /// `p_n / q_n` for `n = 0..=quotients.len()`.
    convergents: Vec<Convergent>,
    source: Source,
    rational: bool,
    trusted: usize,
    overflow_at: Option<usize>,
    /// Exact rational `num / den` standing in for `alpha` in phase
    /// computations.
    #[serde(skip)]
    reference: (i128, i128),
}

fn checked_next(a: i128, prev: &Convergent, prev2: &Convergent) -> Option<Convergent> {
    let p = a.checked_mul(prev.p)?.checked_add(prev2.p)?;
    let q = a.checked_mul(prev.q)?.checked_add(prev2.q)?;
    Some(Convergent { p, q })
}

/// Number of leading convergents trustworthy for an angle known to
/// `PRECISION_BITS` bits: those with `2 log2 q_n <= PRECISION_BITS`.
fn trusted_prefix(convergents: &[Convergent]) -> usize {
    convergents
        .iter()
        .take_while(|c| 2.0 * (c.q as f64).log2() <= PRECISION_BITS as f64)
        .count()
}

impl RotationArithmetic {
    /// Expands a real angle `alpha` in `(0, 1)`.
    ///
    /// The Gauss map runs in exact integer arithmetic on the dyadic rational
    /// that the `f64` represents. When `alpha` agrees with one of its early
    /// convergents to working precision the expansion is cut there and
    /// flagged rational.
    pub fn from_real(alpha: f64, depth: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidAngle(alpha));
        }
        let (num, den) = dyadic(alpha).ok_or(Error::InvalidAngle(alpha))?;
        let tol = 8.0 * f64::EPSILON * alpha.max(0.5);
        let mut quotients = Vec::new();
        let mut convergents = vec![Convergent { p: 0, q: 1 }];
        let mut before = Convergent { p: 1, q: 0 };
        let (mut r_prev, mut r) = (den, num);
        let mut rational = false;
        while quotients.len() < depth && r != 0 {
            let a = r_prev / r;
            let rem = r_prev % r;
            let last = *convergents.last().unwrap();
            let Some(next) = checked_next(a, &last, &before) else {
                break;
            };
            quotients.push(a);
            before = last;
            convergents.push(next);
            (r_prev, r) = (r, rem);
            if r == 0 {
                rational = true;
                break;
            }
            let close = (alpha - next.p as f64 / next.q as f64).abs() <= tol;
            if close && next.q <= 1 << 20 {
                rational = true;
                break;
            }
        }
        let trusted = trusted_prefix(&convergents);
        Ok(RotationArithmetic {
            alpha,
            quotients,
            convergents,
            source: Source::FromReal,
            rational,
            trusted,
            overflow_at: None,
            reference: (num, den),
        })
    }

    /// Builds the expansion `[0; a_1, a_2, ...]` from explicit quotients.
    pub fn from_quotients(quotients: &[i128]) -> Result<Self> {
        let mut iter = quotients.iter().copied();
        Self::from_rule(quotients.len(), |_, _| iter.next())
    }

    /// Builds an expansion whose quotient `a_{n+1}` is produced from the
    /// convergents `p_0/q_0 .. p_n/q_n` computed so far. The rule returns
    /// `None` when it cannot produce the quotient (for instance on its own
    /// overflow); the expansion then stops and records the index.
    pub fn from_rule(
        depth: usize,
        mut rule: impl FnMut(usize, &[Convergent]) -> Option<i128>,
    ) -> Result<Self> {
        let mut quotients = Vec::new();
        let mut convergents = vec![Convergent { p: 0, q: 1 }];
        let mut before = Convergent { p: 1, q: 0 };
        let mut overflow_at = None;
        for n in 0..depth {
            let Some(a) = rule(n, &convergents) else {
                if n < depth {
                    overflow_at = Some(n + 1);
                }
                break;
            };
            if a < 1 {
                return Err(Error::InvalidQuotient { index: n + 1 });
            }
            let last = *convergents.last().unwrap();
            let Some(next) = checked_next(a, &last, &before) else {
                overflow_at = Some(n + 1);
                break;
            };
            quotients.push(a);
            before = last;
            convergents.push(next);
        }
        if quotients.is_empty() {
            return Err(Error::InvalidQuotient { index: 1 });
        }
        let last = *convergents.last().unwrap();
        let alpha = last.p as f64 / last.q as f64;
        Ok(RotationArithmetic {
            alpha,
            trusted: convergents.len(),
            quotients,
            convergents,
            source: Source::FromQuotients,
            rational: false,
            overflow_at,
            reference: (last.p, last.q),
        })
    }

    /// The expansion with quotients `a_{n+1} = q_n!`, stopped at the first
    /// factorial or convergent that does not fit in an `i128`.
    pub fn liouville_factorial(depth: usize) -> Result<Self> {
        Self::from_rule(depth, |_, conv| checked_factorial(conv.last()?.q))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn quotients(&self) -> &[i128] {
        &self.quotients
    }

    pub fn convergents(&self) -> &[Convergent] {
        &self.convergents
    }

    pub fn q(&self, n: usize) -> Option<i128> {
        self.convergents.get(n).map(|c| c.q)
    }

    pub fn p(&self, n: usize) -> Option<i128> {
        self.convergents.get(n).map(|c| c.p)
    }

    pub fn source(&self) -> Source {
        self.source
    }

    /// Whether the expansion terminated (the angle is rational to working
    /// precision).
    pub fn is_rational(&self) -> bool {
        self.rational
    }

    /// Number of leading convergents that can be trusted.
    pub fn trusted(&self) -> usize {
        self.trusted
    }

    /// Index `n` at which `a_n` or `p_n/q_n` would have overflowed.
    pub fn overflow_at(&self) -> Option<usize> {
        self.overflow_at
    }

    /// Signed distance from `n alpha` to the nearest integer, computed from
    /// the exact reference rational.
    pub fn centered_phase(&self, n: u64) -> f64 {
        let (num, den) = self.reference;
        let r = mulmod(num.rem_euclid(den) as u128, n as u128 % den as u128, den as u128);
        let frac = r as f64 / den as f64;
        if frac > 0.5 {
            frac - 1.0
        } else {
            frac
        }
    }

    /// `lambda^n` for `lambda = e^{2 pi i alpha}`.
    pub fn lambda_pow(&self, n: u64) -> Complex {
        Complex::from_polar(1.0, std::f64::consts::TAU * self.centered_phase(n))
    }

    /// `lambda^n - 1`, accurate even when the phase is tiny.
    pub fn lambda_pow_minus_one(&self, n: u64) -> Complex {
        let theta = std::f64::consts::PI * self.centered_phase(n);
        // e^{2 i theta} - 1 = 2 i sin(theta) e^{i theta}
        Complex::new(0.0, 2.0 * theta.sin()) * Complex::from_polar(1.0, theta)
    }

    pub fn lambda(&self) -> Complex {
        self.lambda_pow(1)
    }

    /// Partial sums of `log q_{n+1} / q_n`.
    pub fn brjuno_sum(&self, terms: usize) -> SumReport {
        self.sum_report(terms, |q_next| Some(q_next.ln()))
    }

    /// Partial sums of `log log q_{n+1} / q_n`; terms with `q_{n+1} <= e`
    /// are skipped.
    pub fn perez_marco_sum(&self, terms: usize) -> SumReport {
        self.sum_report(terms, |q_next| {
            if q_next <= std::f64::consts::E {
                None
            } else {
                Some(q_next.ln().ln())
            }
        })
    }

    fn sum_report(&self, terms: usize, numerator: impl Fn(f64) -> Option<f64>) -> SumReport {
        let available = terms.min(self.convergents.len().saturating_sub(1));
        let mut out = SumReport { requested: terms, ..SumReport::default() };
        let mut acc = 0.0;
        let mut kept = Vec::new();
        for n in 0..available {
            let q = self.convergents[n].q as f64;
            let q_next = self.convergents[n + 1].q as f64;
            let term = match numerator(q_next) {
                Some(num) => {
                    let t = num / q;
                    kept.push(t);
                    t
                }
                None => {
                    out.skipped.push(n);
                    0.0
                }
            };
            acc += term;
            out.terms.push(term);
            out.partial_sums.push(acc);
        }
        let q_last = self.convergents.get(available).map_or(0.0, |c| c.q as f64);
        out.verdict = sum_verdict(&kept, q_last);
        out
    }

    /// `||q_k alpha||^{-1/q_k}` bracketed through
    /// `||q_k alpha|| in [1/(q_{k+1}+q_k), 1/q_{k+1}]`.
    pub fn liouville_indicator(&self, terms: usize) -> GrowthReport {
        let available = terms.min(self.convergents.len().saturating_sub(1));
        let values: Vec<GrowthValue> = (0..available)
            .map(|k| {
                let q = self.convergents[k].q as f64;
                let q_next = self.convergents[k + 1].q as f64;
                GrowthValue {
                    k,
                    q: self.convergents[k].q,
                    lower: (q_next.ln() / q).exp(),
                    upper: ((q_next + q).ln() / q).exp(),
                }
            })
            .collect();
        let verdict = growth_verdict(&values);
        GrowthReport { requested: terms, values, verdict }
    }
}

fn checked_factorial(n: i128) -> Option<i128> {
    (2..=n).try_fold(1i128, |acc, k| acc.checked_mul(k))
}

/// The exact dyadic rational `num / 2^k` equal to `x` in `(0, 1)`.
fn dyadic(x: f64) -> Option<(i128, i128)> {
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i128;
    let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1i128 << 52), exp - 1075) };
    let mut num = mant;
    let mut k = -e;
    while num & 1 == 0 && k > 0 {
        num >>= 1;
        k -= 1;
    }
    if !(0..=125).contains(&k) {
        return None;
    }
    Some((num, 1i128 << k))
}

fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    let (mut a, mut b) = (a % m, b % m);
    let mut out = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            out = (out + a) % m;
        }
        a = (a + a) % m;
        b >>= 1;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SumVerdict {
    ConvergingEvidence,
    DivergingEvidence,
    #[default]
    Inconclusive,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SumReport {
    pub requested: usize,
    /// Term `n` of the sum (zero where skipped).
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Indices skipped because the numerator is undefined or non-positive.
    pub skipped: Vec<usize>,
    pub verdict: SumVerdict,
}

impl SumReport {
    pub fn total(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }
}

/// Denominators below this size say nothing about the tail of a sum.
const MIN_DENOMINATOR: f64 = 100.0;

fn sum_verdict(terms: &[f64], q_last: f64) -> SumVerdict {
    if terms.len() < 2 || q_last < MIN_DENOMINATOR {
        return SumVerdict::Inconclusive;
    }
    let tail = &terms[terms.len() - (terms.len() / 2).max(2)..];
    let last = *tail.last().unwrap();
    let min_tail = tail.iter().copied().fold(f64::INFINITY, f64::min);
    if last >= 0.5 && min_tail >= 0.25 {
        return SumVerdict::DivergingEvidence;
    }
    if terms.len() >= 3 && last < 0.1 && min_tail > 0.0 {
        let log_ratio: f64 =
            tail.windows(2).map(|w| (w[1] / w[0]).ln()).sum::<f64>() / (tail.len() - 1) as f64;
        if log_ratio.exp() < 0.9 {
            return SumVerdict::ConvergingEvidence;
        }
    }
    SumVerdict::Inconclusive
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthVerdict {
    BoundedEvidence,
    UnboundedEvidence,
    #[default]
    Inconclusive,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GrowthValue {
    pub k: usize,
    pub q: i128,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub requested: usize,
    pub values: Vec<GrowthValue>,
    pub verdict: GrowthVerdict,
}

fn growth_verdict(values: &[GrowthValue]) -> GrowthVerdict {
    if values.len() < 2 {
        return GrowthVerdict::Inconclusive;
    }
    let last = values.last().unwrap();
    let earlier_max = values[..values.len() - 1].iter().map(|v| v.upper).fold(0.0, f64::max);
    if last.lower > 3.0 && last.lower > earlier_max {
        return GrowthVerdict::UnboundedEvidence;
    }
    let tail = &values[values.len() - (values.len() / 2).max(2)..];
    let non_increasing = tail.windows(2).all(|w| w[1].upper <= w[0].upper);
    if non_increasing && last.upper < 2.5 {
        return GrowthVerdict::BoundedEvidence;
    }
    GrowthVerdict::Inconclusive
}

/// Multiplier `lambda` on the unit circle, either as a plain complex number
/// or backed by an exact continued-fraction expansion.
#[derive(Clone, Debug)]
pub enum Multiplier {
    Complex(Complex),
    Rotation(RotationArithmetic),
}

impl Multiplier {
    pub fn value(&self) -> Complex {
        match self {
            Multiplier::Complex(l) => *l,
            Multiplier::Rotation(r) => r.lambda(),
        }
    }

    pub fn pow(&self, n: u64) -> Complex {
        match self {
            Multiplier::Complex(l) => l.powu(n as u32),
            Multiplier::Rotation(r) => r.lambda_pow(n),
        }
    }

    pub fn pow_minus_one(&self, n: u64) -> Complex {
        match self {
            Multiplier::Complex(l) => {
                let v = l.powu(n as u32) - 1.0;
                if v.is_zero() {
                    Complex::zero()
                } else {
                    v
                }
            }
            Multiplier::Rotation(r) => r.lambda_pow_minus_one(n),
        }
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn convergent_invariants(quotients in prop::collection::vec(1i128..50, 1..12)) {
            let r = RotationArithmetic::from_quotients(&quotients).unwrap();
            let conv = r.convergents();
            let n = conv.len() - 1;
            let (pn, qn) = (conv[n].p, conv[n].q);
            for k in 0..n {
                let c = conv[k];
                // gcd(p, q) = 1 via the determinant identity
                let det = conv[k + 1].p * c.q - c.p * conv[k + 1].q;
                prop_assert_eq!(det.abs(), 1);
                if k > 0 {
                    prop_assert!(conv[k + 1].q > c.q);
                }
                // |alpha - p_k/q_k| < 1/(q_k q_{k+1}) with alpha = p_n/q_n, exactly:
                // |pn qk - pk qn| * qk * q_{k+1} < qn * qk, i.e. |pn qk - pk qn| q_{k+1} < qn
                let diff = pn * c.q - c.p * qn;
                if k + 1 < n {
                    prop_assert!(diff.abs() * conv[k + 1].q < qn);
                }
                // alternation: sign of alpha - p_k/q_k is (-1)^k
                if diff != 0 {
                    prop_assert_eq!(diff > 0, k % 2 == 0);
                }
            }
        }
    }
}
