//! Truncated power series in one and two variables.
//!
//! A [`Series1`] with degree cap `D` stores the coefficients of degrees
//! `0..=D`; a [`Series2`] stores the coefficients `c[i][j]` with `i + j <= D`
//! in a dense triangular array. Every operation is exact through the cap of
//! its operands: products and compositions simply drop the terms of total
//! degree above `D`, which never feed back into lower degrees.
//!
//! The coefficient type is generic so that the ring identities can be
//! exercised in exact integer arithmetic; everything downstream uses the
//! default `Complex64`.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{Num, Zero};

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Scalars admitted as series coefficients.
pub trait Coeff: Copy + PartialEq + Debug + Num + Send + Sync + 'static {
    fn is_finite(&self) -> bool;
    /// A magnitude used for residual norms.
    fn magnitude(&self) -> f64;
}

impl Coeff for Complex64 {
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Coeff for f64 {
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Coeff for i64 {
    fn is_finite(&self) -> bool {
        true
    }
    fn magnitude(&self) -> f64 {
        self.unsigned_abs() as f64
    }
}

impl Coeff for i128 {
    fn is_finite(&self) -> bool {
        true
    }
    fn magnitude(&self) -> f64 {
        self.unsigned_abs() as f64
    }
}

fn check_finite<T: Coeff>(coeffs: &[T]) -> Result<()> {
    match coeffs.iter().position(|c| !c.is_finite()) {
        Some(k) => Err(Error::NonFinite { index: k }),
        None => Ok(()),
    }
}

/// Truncated power series in one variable.
#[derive(Clone, PartialEq, Debug)]
pub struct Series1<T: Coeff = Complex> {
    coeffs: Vec<T>,
}

impl<T: Coeff> Series1<T> {
    pub fn zero(cap: usize) -> Self {
        Series1 { coeffs: vec![T::zero(); cap + 1] }
    }

    pub fn one(cap: usize) -> Self {
        Self::constant(cap, T::one())
    }

    pub fn constant(cap: usize, c: T) -> Self {
        let mut s = Self::zero(cap);
        s.coeffs[0] = c;
        s
    }

    /// The series `z`.
    pub fn var(cap: usize) -> Self {
        Self::monomial(cap, 1, T::one())
    }

    /// `c z^k`, or zero when `k` exceeds the cap.
    pub fn monomial(cap: usize, k: usize, c: T) -> Self {
        let mut s = Self::zero(cap);
        if k <= cap {
            s.coeffs[k] = c;
        }
        s
    }

    /// Builds a series whose cap is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        check_finite(&coeffs)?;
        Ok(Series1 { coeffs })
    }

    /// Builds a series of the given cap from the leading coefficients,
    /// padding with zeros. Coefficients beyond the cap are dropped.
    pub fn from_slice(cap: usize, coeffs: &[T]) -> Result<Self> {
        check_finite(coeffs)?;
        let mut s = Self::zero(cap);
        for (k, c) in coeffs.iter().take(cap + 1).enumerate() {
            s.coeffs[k] = *c;
        }
        Ok(s)
    }

    pub fn cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).copied().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: T) {
        assert!(k <= self.cap(), "degree {k} beyond cap {}", self.cap());
        self.coeffs[k] = c;
    }

    /// Re-truncates or zero-pads to a new cap.
    pub fn with_cap(&self, cap: usize) -> Self {
        let mut s = Self::zero(cap);
        for k in 0..=cap.min(self.cap()) {
            s.coeffs[k] = self.coeffs[k];
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn same_cap(&self, other: &Self) -> Result<()> {
        if self.cap() != other.cap() {
            return Err(Error::CapMismatch { left: self.cap(), right: other.cap() });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_cap(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_cap(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_cap(other)?;
        Ok(self.mul_trunc(other))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        Series1 {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    fn mul_trunc(&self, other: &Self) -> Self {
        let cap = self.cap();
        let mut out = vec![T::zero(); cap + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=cap - i].iter().enumerate() {
                out[i + j] = out[i + j] + *a * *b;
            }
        }
        Series1 { coeffs: out }
    }

    pub fn scale(&self, c: T) -> Self {
        Series1 { coeffs: self.coeffs.iter().map(|a| *a * c).collect() }
    }

    /// `outer(inner)` truncated at the common cap.
    ///
    /// Exact through the cap whenever `inner` has no constant term. With
    /// `check_inner_vanishes` set, a nonzero constant term is rejected.
    pub fn compose(&self, inner: &Self, check_inner_vanishes: bool) -> Result<Self> {
        self.same_cap(inner)?;
        if check_inner_vanishes && !inner.coeffs[0].is_zero() {
            return Err(Error::InnerConstantTerm);
        }
        let cap = self.cap();
        let mut acc = Self::constant(cap, self.coeffs[cap]);
        for k in (0..cap).rev() {
            acc = acc.mul_trunc(inner);
            acc.coeffs[0] = acc.coeffs[0] + self.coeffs[k];
        }
        Ok(acc)
    }

    /// `outer(inner)` for a two-variable inner series.
    pub fn compose2(&self, inner: &Series2<T>) -> Result<Series2<T>> {
        if self.cap() != inner.cap() {
            return Err(Error::CapMismatch { left: self.cap(), right: inner.cap() });
        }
        let cap = self.cap();
        let mut acc = Series2::constant(cap, self.coeffs[cap]);
        for k in (0..cap).rev() {
            acc = &acc * inner;
            let c0 = acc.coeff(0, 0);
            acc.set_coeff(0, 0, c0 + self.coeffs[k]);
        }
        Ok(acc)
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * z + *c)
    }

    /// Formal derivative, keeping the cap.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero(self.cap());
        let mut factor = T::zero();
        for k in 1..=self.cap() {
            factor = factor + T::one();
            out.coeffs[k - 1] = self.coeffs[k] * factor;
        }
        out
    }

    /// `z * self`, dropping the top coefficient.
    pub fn shift_up(&self, by: usize) -> Self {
        let mut out = Self::zero(self.cap());
        for k in 0..=self.cap() {
            if k + by <= self.cap() {
                out.coeffs[k + by] = self.coeffs[k];
            }
        }
        out
    }

    /// `self / z^by`, assuming the low coefficients vanish.
    pub fn shift_down(&self, by: usize) -> Self {
        let mut out = Self::zero(self.cap());
        for k in by..=self.cap() {
            out.coeffs[k - by] = self.coeffs[k];
        }
        out
    }

    /// `x ↦ self(x)` viewed as a two-variable series independent of `y`.
    pub fn as_x(&self) -> Series2<T> {
        let mut out = Series2::zero(self.cap());
        for (k, c) in self.coeffs.iter().enumerate() {
            out.set_coeff(k, 0, *c);
        }
        out
    }

    /// `y ↦ self(y)` viewed as a two-variable series independent of `x`.
    pub fn as_y(&self) -> Series2<T> {
        let mut out = Series2::zero(self.cap());
        for (k, c) in self.coeffs.iter().enumerate() {
            out.set_coeff(0, k, *c);
        }
        out
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// Largest coefficientwise distance to `other` (caps may differ; the
    /// missing coefficients count as zero).
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.cap().max(other.cap());
        (0..=n).map(|k| (self.coeff(k) - other.coeff(k)).magnitude()).fold(0.0, f64::max)
    }
}

impl Series1<Complex> {
    /// Local inverse of a series with `s(0) = 0`, `s'(0) != 0`.
    ///
    /// The result `t` satisfies `t(s(z)) = s(t(z)) = z` through the cap. The
    /// coefficient of degree `k` is fixed once the lower ones are known:
    /// `[s(t)]_k = s_1 t_k + (terms in t_1..t_{k-1})`.
    pub fn invert_local(&self) -> Result<Self> {
        let cap = self.cap();
        if self.coeffs[0] != Complex::zero() {
            return Err(Error::InnerConstantTerm);
        }
        let s1 = self.coeffs[1.min(cap)];
        if cap == 0 || s1.norm() == 0.0 {
            return Err(Error::VanishingLinearTerm);
        }
        let mut t = Self::monomial(cap, 1, s1.inv());
        for k in 2..=cap {
            let st = self.compose(&t, false)?;
            t.coeffs[k] = -st.coeffs[k] / s1;
        }
        Ok(t)
    }

    /// `1 / self`; the constant term must be nonzero.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0.norm() == 0.0 {
            return Err(Error::VanishingConstantTerm);
        }
        let cap = self.cap();
        let mut out = Self::zero(cap);
        out.coeffs[0] = c0.inv();
        for k in 1..=cap {
            let mut acc = Complex::zero();
            for j in 1..=k {
                acc += self.coeffs[j] * out.coeffs[k - j];
            }
            out.coeffs[k] = -acc / c0;
        }
        Ok(out)
    }

    /// Principal logarithm; the branch is fixed by `ln` of the constant term.
    pub fn ln(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0.norm() == 0.0 {
            return Err(Error::VanishingConstantTerm);
        }
        let cap = self.cap();
        // (log s)' = s'/s, solved degree by degree: k b_k c0 = k a_k - sum j b_j a_{k-j}
        let mut out = Self::zero(cap);
        out.coeffs[0] = c0.ln();
        for k in 1..=cap {
            let mut acc = self.coeffs[k] * k as f64;
            for j in 1..k {
                acc -= out.coeffs[j] * j as f64 * self.coeffs[k - j];
            }
            out.coeffs[k] = acc / (c0 * k as f64);
        }
        Ok(out)
    }

    pub fn exp(&self) -> Self {
        let cap = self.cap();
        let mut out = Self::zero(cap);
        out.coeffs[0] = self.coeffs[0].exp();
        // e' = s' e  =>  k e_k = sum_{j=1}^k j s_j e_{k-j}
        for k in 1..=cap {
            let mut acc = Complex::zero();
            for j in 1..=k {
                acc += self.coeffs[j] * j as f64 * out.coeffs[k - j];
            }
            out.coeffs[k] = acc / k as f64;
        }
        out
    }

    /// `self^n` for an integer exponent (negative powers need a nonzero
    /// constant term).
    pub fn powi(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.reciprocal()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut out = Self::one(self.cap());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul_trunc(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_trunc(&sq);
            }
        }
        Ok(out)
    }

    /// `n`-fold self-composition (`n >= 1`); requires `self(0) = 0`.
    pub fn iterate(&self, n: usize) -> Result<Self> {
        let mut out = Self::var(self.cap());
        for _ in 0..n {
            out = self.compose(&out, true)?;
        }
        Ok(out)
    }
}

impl<T: Coeff> Add for &Series1<T> {
    type Output = Series1<T>;
    fn add(self, rhs: Self) -> Series1<T> {
        self.checked_add(rhs).expect("series cap mismatch")
    }
}

impl<T: Coeff> Sub for &Series1<T> {
    type Output = Series1<T>;
    fn sub(self, rhs: Self) -> Series1<T> {
        self.checked_sub(rhs).expect("series cap mismatch")
    }
}

impl<T: Coeff> Mul for &Series1<T> {
    type Output = Series1<T>;
    fn mul(self, rhs: Self) -> Series1<T> {
        self.checked_mul(rhs).expect("series cap mismatch")
    }
}

impl<T: Coeff + Neg<Output = T>> Neg for &Series1<T> {
    type Output = Series1<T>;
    fn neg(self) -> Series1<T> {
        Series1 { coeffs: self.coeffs.iter().map(|c| -*c).collect() }
    }
}

#[inline]
fn tri_index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

/// Truncated power series in two variables `x`, `y`.
#[derive(Clone, PartialEq, Debug)]
pub struct Series2<T: Coeff = Complex> {
    cap: usize,
    coeffs: Vec<T>,
}

impl<T: Coeff> Series2<T> {
    pub fn zero(cap: usize) -> Self {
        Series2 { cap, coeffs: vec![T::zero(); tri_index(0, cap) + 1] }
    }

    pub fn constant(cap: usize, c: T) -> Self {
        let mut s = Self::zero(cap);
        s.coeffs[0] = c;
        s
    }

    pub fn x(cap: usize) -> Self {
        Self::from_terms(cap, &[(1, 0, T::one())]).expect("finite")
    }

    pub fn y(cap: usize) -> Self {
        Self::from_terms(cap, &[(0, 1, T::one())]).expect("finite")
    }

    /// Builds a series from `(i, j, c)` triples; terms above the cap are
    /// dropped and repeated exponents accumulate.
    pub fn from_terms(cap: usize, terms: &[(usize, usize, T)]) -> Result<Self> {
        let mut s = Self::zero(cap);
        for (k, &(i, j, c)) in terms.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFinite { index: k });
            }
            if i + j <= cap {
                let idx = tri_index(i, j);
                s.coeffs[idx] = s.coeffs[idx] + c;
            }
        }
        Ok(s)
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn coeff(&self, i: usize, j: usize) -> T {
        if i + j > self.cap {
            T::zero()
        } else {
            self.coeffs[tri_index(i, j)]
        }
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, c: T) {
        assert!(i + j <= self.cap, "degree {} beyond cap {}", i + j, self.cap);
        self.coeffs[tri_index(i, j)] = c;
    }

    /// Nonzero terms as `(i, j, c)`, ordered by total degree then `j`.
    pub fn terms(&self) -> Vec<(usize, usize, T)> {
        let mut out = Vec::new();
        for d in 0..=self.cap {
            for j in 0..=d {
                let c = self.coeffs[tri_index(d - j, j)];
                if !c.is_zero() {
                    out.push((d - j, j, c));
                }
            }
        }
        out
    }

    pub fn with_cap(&self, cap: usize) -> Self {
        let mut s = Self::zero(cap);
        for d in 0..=cap.min(self.cap) {
            for j in 0..=d {
                s.coeffs[tri_index(d - j, j)] = self.coeffs[tri_index(d - j, j)];
            }
        }
        s
    }

    fn same_cap(&self, other: &Self) -> Result<()> {
        if self.cap != other.cap {
            return Err(Error::CapMismatch { left: self.cap, right: other.cap });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_cap(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_cap(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_cap(other)?;
        Ok(self.mul_trunc(other))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        Series2 {
            cap: self.cap,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    fn mul_trunc(&self, other: &Self) -> Self {
        let cap = self.cap;
        let mut out = vec![T::zero(); self.coeffs.len()];
        let nz: Vec<(usize, usize, T)> = other.terms();
        for d1 in 0..=cap {
            for j1 in 0..=d1 {
                let a = self.coeffs[tri_index(d1 - j1, j1)];
                if a.is_zero() {
                    continue;
                }
                let i1 = d1 - j1;
                for &(i2, j2, b) in &nz {
                    if d1 + i2 + j2 > cap {
                        break;
                    }
                    let idx = tri_index(i1 + i2, j1 + j2);
                    out[idx] = out[idx] + a * b;
                }
            }
        }
        Series2 { cap, coeffs: out }
    }

    pub fn scale(&self, c: T) -> Self {
        Series2 { cap: self.cap, coeffs: self.coeffs.iter().map(|a| *a * c).collect() }
    }

    pub fn eval(&self, x: T, y: T) -> T {
        // Horner in y inside Horner in x.
        let mut acc = T::zero();
        for i in (0..=self.cap).rev() {
            let mut inner = T::zero();
            for j in (0..=self.cap - i).rev() {
                inner = inner * y + self.coeffs[tri_index(i, j)];
            }
            acc = acc * x + inner;
        }
        acc
    }

    /// The coefficient function of `x^i`, as a series in `y` with the same cap.
    pub fn x_coefficient(&self, i: usize) -> Series1<T> {
        let mut out = Series1::zero(self.cap);
        if i <= self.cap {
            for j in 0..=self.cap - i {
                out.coeffs[j] = self.coeffs[tri_index(i, j)];
            }
        }
        out
    }

    /// The coefficient function of `y^j`, as a series in `x`.
    pub fn y_coefficient(&self, j: usize) -> Series1<T> {
        let mut out = Series1::zero(self.cap);
        if j <= self.cap {
            for i in 0..=self.cap - j {
                out.coeffs[i] = self.coeffs[tri_index(i, j)];
            }
        }
        out
    }

    pub fn partial_x(&self) -> Self {
        let mut out = Self::zero(self.cap);
        for (i, j, c) in self.terms() {
            if i > 0 {
                out.set_coeff(i - 1, j, c * from_usize::<T>(i));
            }
        }
        out
    }

    pub fn partial_y(&self) -> Self {
        let mut out = Self::zero(self.cap);
        for (i, j, c) in self.terms() {
            if j > 0 {
                out.set_coeff(i, j - 1, c * from_usize::<T>(j));
            }
        }
        out
    }

    /// `self(a(x, y), b(x, y))`, exact through the cap when `a` and `b`
    /// vanish at the origin.
    pub fn compose_pair(&self, a: &Self, b: &Self) -> Result<Self> {
        self.same_cap(a)?;
        self.same_cap(b)?;
        let cap = self.cap;
        let mut b_pows = Vec::with_capacity(cap + 1);
        b_pows.push(Self::constant(cap, T::one()));
        for k in 1..=cap {
            let next = b_pows[k - 1].mul_trunc(b);
            b_pows.push(next);
        }
        let mut acc = Self::zero(cap);
        for i in (0..=cap).rev() {
            acc = acc.mul_trunc(a);
            for j in 0..=cap - i {
                let c = self.coeffs[tri_index(i, j)];
                if c.is_zero() {
                    continue;
                }
                for (slot, bv) in acc.coeffs.iter_mut().zip(&b_pows[j].coeffs) {
                    *slot = *slot + c * *bv;
                }
            }
        }
        Ok(acc)
    }

    /// `self(x(t), y(t))` for a parametrized curve.
    pub fn substitute_curve(&self, x: &Series1<T>, y: &Series1<T>) -> Result<Series1<T>> {
        if x.cap() != self.cap || y.cap() != self.cap {
            return Err(Error::CapMismatch { left: self.cap, right: x.cap().max(y.cap()) });
        }
        let cap = self.cap;
        let mut y_pows = Vec::with_capacity(cap + 1);
        y_pows.push(Series1::one(cap));
        for k in 1..=cap {
            let next = y_pows[k - 1].mul_trunc(y);
            y_pows.push(next);
        }
        let mut acc = Series1::zero(cap);
        for i in (0..=cap).rev() {
            acc = acc.mul_trunc(x);
            for j in 0..=cap - i {
                let c = self.coeffs[tri_index(i, j)];
                if c.is_zero() {
                    continue;
                }
                for (slot, yv) in acc.coeffs.iter_mut().zip(&y_pows[j].coeffs) {
                    *slot = *slot + c * *yv;
                }
            }
        }
        Ok(acc)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let cap = self.cap.max(other.cap);
        let mut m = 0.0f64;
        for d in 0..=cap {
            for j in 0..=d {
                m = m.max((self.coeff(d - j, j) - other.coeff(d - j, j)).magnitude());
            }
        }
        m
    }
}

fn from_usize<T: Coeff>(n: usize) -> T {
    let mut acc = T::zero();
    for _ in 0..n {
        acc = acc + T::one();
    }
    acc
}

impl Series2<Complex> {
    /// `self / y^2`, assuming every term has `j >= 2`.
    pub fn divide_by_y_squared(&self) -> Self {
        let mut out = Self::zero(self.cap);
        for (i, j, c) in self.terms() {
            if j >= 2 {
                out.set_coeff(i, j - 2, c);
            }
        }
        out
    }

    /// Sum of `|c_ij| rx^i ry^j`: a bound for `|self|` on the closed polydisk.
    pub fn polydisk_bound(&self, rx: f64, ry: f64) -> f64 {
        self.terms().iter().map(|&(i, j, c)| c.norm() * rx.powi(i as i32) * ry.powi(j as i32)).sum()
    }
}

impl<T: Coeff> Add for &Series2<T> {
    type Output = Series2<T>;
    fn add(self, rhs: Self) -> Series2<T> {
        self.checked_add(rhs).expect("series cap mismatch")
    }
}

impl<T: Coeff> Sub for &Series2<T> {
    type Output = Series2<T>;
    fn sub(self, rhs: Self) -> Series2<T> {
        self.checked_sub(rhs).expect("series cap mismatch")
    }
}

impl<T: Coeff> Mul for &Series2<T> {
    type Output = Series2<T>;
    fn mul(self, rhs: Self) -> Series2<T> {
        self.checked_mul(rhs).expect("series cap mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn s1(coeffs: &[f64], cap: usize) -> Series1 {
        Series1::from_slice(cap, &coeffs.iter().map(|&x| c(x)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let a = s1(&[1.0, 1.0], 2);
        let b = s1(&[1.0, -1.0], 2);
        assert_eq!(&a * &b, s1(&[1.0, 0.0, -1.0], 2));
    }

    #[test]
    fn zero_absorbs() {
        let a = s1(&[3.0, -2.0, 5.0, 1.0], 3);
        assert!((&a * &Series1::zero(3)).is_zero());
    }

    #[test]
    fn product_truncates_at_cap() {
        let a = s1(&[1.0, 1.0, 1.0], 2);
        let b = s1(&[1.0, 1.0], 2);
        assert_eq!(&a * &b, s1(&[1.0, 2.0, 2.0], 2));
    }

    #[test]
    fn cap_mismatch_is_an_error() {
        let a = Series1::<Complex>::zero(2);
        let b = Series1::<Complex>::zero(3);
        assert!(matches!(a.checked_mul(&b), Err(Error::CapMismatch { left: 2, right: 3 })));
        assert!(a.compose(&b, true).is_err());
    }

    #[test]
    fn compose_examples() {
        let s = s1(&[0.0, 2.0, -1.0, 0.5], 3);
        assert_eq!(Series1::var(3).compose(&s, true).unwrap(), s);

        let outer = s1(&[0.0, 0.0, 1.0], 3);
        let inner = s1(&[0.0, 1.0, 1.0], 3);
        assert_eq!(outer.compose(&inner, true).unwrap(), s1(&[0.0, 0.0, 1.0, 2.0], 3));

        let lam = Complex::from_polar(1.0, 0.7);
        let lin = Series1::monomial(3, 1, lam);
        let got = lin.compose(&s, true).unwrap();
        assert!(got.max_abs_diff(&s.scale(lam)) < 1e-15);
    }

    #[test]
    fn compose_rejects_constant_inner() {
        let inner = s1(&[1.0, 1.0], 3);
        assert!(matches!(Series1::var(3).compose(&inner, true), Err(Error::InnerConstantTerm)));
        // Unchecked composition evaluates the polynomial instead.
        assert!(Series1::var(3).compose(&inner, false).is_ok());
    }

    #[test]
    fn invert_examples() {
        let lam = Complex::new(0.3, -0.8);
        let t = Series1::monomial(4, 1, lam).invert_local().unwrap();
        assert!(t.max_abs_diff(&Series1::monomial(4, 1, lam.inv())) < 1e-15);

        let s = s1(&[0.0, 1.0, 1.0], 3);
        let t = s.invert_local().unwrap();
        assert!(t.max_abs_diff(&s1(&[0.0, 1.0, -1.0, 2.0], 3)) < 1e-15);
    }

    #[test]
    fn invert_is_two_sided() {
        let s = s1(&[0.0, 0.9, -0.4, 0.25, 0.7, -0.3, 0.1], 12);
        let t = s.invert_local().unwrap();
        let id = Series1::var(12);
        assert!(t.compose(&s, true).unwrap().max_abs_diff(&id) < 1e-13);
        assert!(s.compose(&t, true).unwrap().max_abs_diff(&id) < 1e-13);
    }

    #[test]
    fn invert_rejects_degenerate() {
        assert!(matches!(s1(&[0.0, 0.0, 1.0], 3).invert_local(), Err(Error::VanishingLinearTerm)));
        assert!(matches!(s1(&[1.0, 1.0], 3).invert_local(), Err(Error::InnerConstantTerm)));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(s1(&[0.0, 0.0, 1.0], 2).eval(c(2.0)), c(4.0));
        assert_eq!(Series1::<Complex>::zero(5).eval(Complex::new(3.0, -1.0)), c(0.0));
        let d = 12;
        let mut fact = 1.0;
        let mut coeffs = vec![1.0];
        for k in 1..=d {
            fact *= k as f64;
            coeffs.push(1.0 / fact);
        }
        let e_series = s1(&coeffs, d);
        let bound = std::f64::consts::E / (fact * (d + 1) as f64);
        assert!((e_series.eval(c(1.0)).re - std::f64::consts::E).abs() <= bound);
    }

    #[test]
    fn log_exp_roundtrip() {
        let s = s1(&[0.5, 0.2, -0.1, 0.05, 0.3], 10);
        let back = s.ln().unwrap().exp();
        assert!(back.max_abs_diff(&s) < 1e-14);
        // log(1+x) = x - x^2/2 + x^3/3 - ...
        let l = s1(&[1.0, 1.0], 6).ln().unwrap();
        for k in 1..=6 {
            let expect = if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            assert!((l.coeff(k).re - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn powers_and_reciprocal() {
        let s = s1(&[2.0, 1.0, 0.5], 8);
        let r = s.reciprocal().unwrap();
        assert!((&s * &r).max_abs_diff(&Series1::one(8)) < 1e-15);
        let cube = s.powi(3).unwrap();
        assert!(cube.max_abs_diff(&(&(&s * &s) * &s)) < 1e-14);
        let inv2 = s.powi(-2).unwrap();
        assert!((&inv2 * &(&s * &s)).max_abs_diff(&Series1::one(8)) < 1e-14);
    }

    #[test]
    fn two_variable_basics() {
        let x = Series2::<Complex>::x(4);
        let y = Series2::<Complex>::y(4);
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p.coeff(2, 0), c(1.0));
        assert_eq!(p.coeff(0, 2), c(-1.0));
        assert_eq!(p.coeff(1, 1), c(0.0));
        assert_eq!(p.eval(c(3.0), c(2.0)), c(5.0));
        assert_eq!(p.partial_x().coeff(1, 0), c(2.0));
        assert_eq!(p.partial_y().coeff(0, 1), c(-2.0));
    }

    #[test]
    fn compose_pair_matches_pointwise() {
        let f = Series2::from_terms(
            6,
            &[(1, 0, c(0.5)), (0, 1, c(-0.2)), (2, 1, c(0.7)), (0, 3, c(1.1)), (3, 0, c(-0.4))],
        )
        .unwrap();
        let a = Series2::from_terms(6, &[(1, 0, c(1.0)), (1, 1, c(0.3))]).unwrap();
        let b = Series2::from_terms(6, &[(0, 1, c(0.8)), (2, 0, c(-0.5))]).unwrap();
        let comp = f.compose_pair(&a, &b).unwrap();
        // Low-degree polynomial inputs: pointwise values agree up to the
        // dropped terms of degree > 6, which are tiny at this scale.
        let (px, py) = (Complex::new(0.01, 0.02), Complex::new(-0.015, 0.005));
        let direct = f.eval(a.eval(px, py), b.eval(px, py));
        assert!((comp.eval(px, py) - direct).norm() < 1e-13);
    }

    #[test]
    fn substitute_curve_matches_compose() {
        let f = Series2::from_terms(5, &[(0, 1, c(1.0)), (2, 0, c(1.0)), (1, 1, c(-2.0))]).unwrap();
        let x = Series1::var(5);
        let y = s1(&[0.0, 0.0, 3.0], 5);
        let got = f.substitute_curve(&x, &y).unwrap();
        // y + x^2 - 2xy with y = 3x^2 -> 4x^2 - 6x^3
        assert!(got.max_abs_diff(&s1(&[0.0, 0.0, 4.0, -6.0], 5)) < 1e-15);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(
            Series1::from_coeffs(vec![c(1.0), Complex::new(f64::NAN, 0.0)]),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(Series2::from_terms(3, &[(1, 1, Complex::new(0.0, f64::INFINITY))]).is_err());
    }
}
