//! JSON forms of series and germs.
//!
//! A series is `{"degree_cap": D, "coeffs": [[i, j, re, im], ...]}` with
//! zero coefficients omitted; one-variable series use `j = 0`.

use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::germ::Germ2;
use crate::rotation::RotationArithmetic;
use crate::series::{Complex, Series1, Series2};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesJson {
    pub degree_cap: usize,
    pub coeffs: Vec<(usize, usize, f64, f64)>,
}

impl SeriesJson {
    pub fn to_series2(&self) -> Result<Series2> {
        let terms: Vec<_> =
            self.coeffs.iter().map(|&(i, j, re, im)| (i, j, Complex::new(re, im))).collect();
        Series2::from_terms(self.degree_cap, &terms)
    }

    pub fn to_series1(&self) -> Result<Series1> {
        let mut s = Series1::zero(self.degree_cap);
        for (k, &(i, j, re, im)) in self.coeffs.iter().enumerate() {
            let c = Complex::new(re, im);
            if j != 0 {
                return Err(Error::Input(format!("one-variable series has y-power at entry {k}")));
            }
            if !c.is_finite() {
                return Err(Error::NonFinite { index: k });
            }
            if i <= self.degree_cap {
                s.set_coeff(i, s.coeff(i) + c);
            }
        }
        Ok(s)
    }
}

impl From<&Series1> for SeriesJson {
    fn from(s: &Series1) -> Self {
        let coeffs = s
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, 0, c.re, c.im))
            .collect();
        SeriesJson { degree_cap: s.cap(), coeffs }
    }
}

impl From<&Series2> for SeriesJson {
    fn from(s: &Series2) -> Self {
        let coeffs = s
            .terms()
            .into_iter()
            .filter(|(_, _, c)| !c.is_zero())
            .map(|(i, j, c)| (i, j, c.re, c.im))
            .collect();
        SeriesJson { degree_cap: s.cap(), coeffs }
    }
}

impl Serialize for Series1 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Series1 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SeriesJson::deserialize(d)?.to_series1().map_err(D::Error::custom)
    }
}

impl Serialize for Series2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Series2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SeriesJson::deserialize(d)?.to_series2().map_err(D::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<ComplexJson> for Complex {
    fn from(c: ComplexJson) -> Self {
        Complex::new(c.re, c.im)
    }
}

/// A multiplier on the unit circle.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaJson {
    Value(ComplexJson),
    /// `e^{2 pi i angle}`.
    Angle { angle: f64 },
    /// `e^{2 pi i [0; a_1, a_2, ...]}`.
    Quotients { angle_quotients: Vec<u64> },
}

impl LambdaJson {
    pub fn resolve(&self) -> Result<(Complex, Option<RotationArithmetic>)> {
        match self {
            LambdaJson::Value(c) => Ok(((*c).into(), None)),
            LambdaJson::Angle { angle } => {
                let turns = angle.rem_euclid(1.0);
                let lam = Complex::from_polar(1.0, std::f64::consts::TAU * turns);
                let r = if turns > 0.0 { RotationArithmetic::from_real(turns, 64).ok() } else { None };
                Ok((lam, r))
            }
            LambdaJson::Quotients { angle_quotients } => {
                let quotients: Vec<i128> = angle_quotients.iter().map(|&a| a as i128).collect();
                let r = RotationArithmetic::from_quotients(&quotients)?;
                Ok((r.lambda(), Some(r)))
            }
        }
    }
}

/// Two-dimensional germ input. With `lambda` and `mu` present the map is
/// `(lambda x + f1, mu y + f2)`; otherwise `f1`, `f2` carry the linear part.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GermJson {
    #[serde(default)]
    pub lambda: Option<LambdaJson>,
    #[serde(default)]
    pub mu: Option<ComplexJson>,
    pub f1: SeriesJson,
    pub f2: SeriesJson,
    /// Multiply `f1` by `lambda` before adding the linear term, so that
    /// `f1 = x^2` describes `lambda (x + x^2)`.
    #[serde(default)]
    pub f1_lambda_factored: bool,
}

impl GermJson {
    pub fn build(&self) -> Result<(Germ2, Option<RotationArithmetic>)> {
        let f1 = self.f1.to_series2()?;
        let f2 = self.f2.to_series2()?;
        if f1.cap() != f2.cap() {
            return Err(Error::CapMismatch { left: f1.cap(), right: f2.cap() });
        }
        match (&self.lambda, &self.mu) {
            (Some(l), Some(m)) => {
                let (lam, rot) = l.resolve()?;
                let n1 = if self.f1_lambda_factored { f1.scale(lam) } else { f1 };
                Ok((Germ2::diagonal(lam, (*m).into(), &n1, &f2)?, rot))
            }
            (None, None) => Ok((Germ2::new(f1, f2)?, None)),
            _ => Err(Error::Input("lambda and mu must be given together".into())),
        }
    }
}

/// One-dimensional germ input `{"h": series}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Germ1Json {
    pub h: SeriesJson,
    #[serde(default)]
    pub lambda: Option<LambdaJson>,
}
