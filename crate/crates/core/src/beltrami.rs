//! Grid diagnostics for Beltrami coefficients of smooth plane maps: Wirtinger
//! derivatives, dilatation, the composition bound on iterates, decay on the
//! sets `U_n` and the piecewise invariant coefficient built from pullbacks.
//!
//! Nothing here solves the Beltrami equation.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariant_sets::{escape_scan, Direction, Exit, GridSpec, PlaneMap, TrapBall};
use crate::series::{Complex, Series1};

/// Below this `|d g|` a cell is treated as a critical point and masked.
pub const DEGENERATE_TOL: f64 = 1e-12;

fn zero() -> Complex {
    Complex::new(0.0, 0.0)
}

/// `(d/dz, d/dzbar)` of `f` at `z` by central differences of width `step`.
pub fn fd_wirtinger<F: Fn(Complex) -> Option<Complex>>(f: F, z: Complex, step: f64) -> Option<(Complex, Complex)> {
    let i = Complex::new(0.0, 1.0);
    let dx = (f(z + step)? - f(z - step)?) / (2.0 * step);
    let dy = (f(z + i * step)? - f(z - i * step)?) / (2.0 * step);
    let out = ((dx - i * dy) / 2.0, (dx + i * dy) / 2.0);
    (out.0.is_finite() && out.1.is_finite()).then_some(out)
}

/// The real-linear map `s -> a s + b conj(s)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealLinear {
    pub a: Complex,
    pub b: Complex,
}

impl RealLinear {
    pub fn identity() -> Self {
        RealLinear { a: Complex::new(1.0, 0.0), b: zero() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &RealLinear) -> RealLinear {
        RealLinear {
            a: self.a * other.a + self.b * other.b.conj(),
            b: self.a * other.b + self.b * other.a.conj(),
        }
    }

    pub fn jacobian(&self) -> f64 {
        self.a.norm_sqr() - self.b.norm_sqr()
    }

    pub fn inverse(&self) -> Option<RealLinear> {
        let det = self.jacobian();
        (det != 0.0).then(|| RealLinear { a: self.a.conj() / det, b: -self.b / det })
    }

    pub fn mu(&self) -> Option<Complex> {
        (self.a.norm() >= DEGENERATE_TOL).then(|| self.b / self.a)
    }
}

/// `K = (1 + |mu|) / (1 - |mu|)`; infinite for `|mu| >= 1`.
pub fn dilatation_of(mu: Complex) -> f64 {
    let m = mu.norm();
    if m >= 1.0 {
        f64::INFINITY
    } else {
        (1.0 + m) / (1.0 - m)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WirtingerField {
    pub spec: GridSpec,
    pub step: f64,
    /// `None` on masked cells.
    pub d: Vec<Option<Complex>>,
    pub dbar: Vec<Option<Complex>>,
}

impl WirtingerField {
    /// Central differences of width `step` around each cell center; cells
    /// where `f` is undefined on the stencil are masked.
    pub fn sample<F>(f: F, spec: GridSpec, step: f64) -> Self
    where
        F: Fn(Complex) -> Option<Complex> + Sync,
    {
        let pairs: Vec<_> =
            (0..spec.cells()).into_par_iter().map(|i| fd_wirtinger(&f, spec.center(i), step)).collect();
        WirtingerField {
            spec,
            step,
            d: pairs.iter().map(|p| p.map(|p| p.0)).collect(),
            dbar: pairs.iter().map(|p| p.map(|p| p.1)).collect(),
        }
    }

    /// Differences between neighbouring cell values; the outer ring of cells
    /// has no margin and is masked.
    pub fn from_samples(values: &[Complex], spec: GridSpec) -> Result<Self> {
        let n = spec.resolution;
        if values.len() != spec.cells() {
            return Err(Error::Input(format!("expected {} samples, got {}", spec.cells(), values.len())));
        }
        let i = Complex::new(0.0, 1.0);
        let (mut d, mut dbar) = (vec![None; spec.cells()], vec![None; spec.cells()]);
        for row in 1..n.saturating_sub(1) {
            for col in 1..n - 1 {
                let k = row * n + col;
                let dx = (values[k + 1] - values[k - 1]) / (2.0 * spec.dx());
                // rows run downward in the imaginary direction
                let dy = (values[k - n] - values[k + n]) / (2.0 * spec.dy());
                d[k] = Some((dx - i * dy) / 2.0);
                dbar[k] = Some((dx + i * dy) / 2.0);
            }
        }
        Ok(WirtingerField { spec, step: spec.dx(), d, dbar })
    }

    pub fn sup_dbar(&self) -> f64 {
        self.dbar.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn beltrami(&self) -> BeltramiField {
        let mu: Vec<Option<Complex>> = self
            .d
            .iter()
            .zip(&self.dbar)
            .map(|(d, b)| match (d, b) {
                (Some(d), Some(b)) => RealLinear { a: *d, b: *b }.mu(),
                _ => None,
            })
            .collect();
        BeltramiField::new(self.spec, mu)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BeltramiField {
    pub spec: GridSpec,
    pub mu: Vec<Option<Complex>>,
    pub sup_norm: f64,
}

impl BeltramiField {
    pub fn new(spec: GridSpec, mu: Vec<Option<Complex>>) -> Self {
        let sup_norm = mu.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
        BeltramiField { spec, mu, sup_norm }
    }

    pub fn masked(&self) -> usize {
        self.mu.iter().filter(|m| m.is_none()).count()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DilatationField {
    pub k: Vec<Option<f64>>,
    pub sup_k: f64,
}

pub fn dilatation(bf: &BeltramiField) -> Result<DilatationField> {
    let bad = bf.mu.iter().flatten().filter(|m| m.norm() >= 1.0).count();
    if bad > 0 {
        return Err(Error::NotQuasiconformal { cells: bad, stratum: None });
    }
    let k: Vec<Option<f64>> = bf.mu.iter().map(|m| m.map(dilatation_of)).collect();
    let sup_k = k.iter().flatten().copied().fold(1.0, f64::max);
    Ok(DilatationField { k, sup_k })
}

/// `h(z) + eps conj(z) b(z)` with `b` the smooth bump
/// `exp(1 - 1/(1 - |z - c|^2/w^2))` supported on `|z - c| < w`.
#[derive(Clone, Debug)]
pub struct PerturbedMap {
    h: Series1,
    dh: Series1,
    pub eps: f64,
    pub center: Complex,
    pub width: f64,
}

impl PerturbedMap {
    pub fn new(h: Series1, eps: f64, center: Complex, width: f64) -> Result<Self> {
        if !(width > 0.0) || !eps.is_finite() {
            return Err(Error::Input("bump width must be positive and eps finite".into()));
        }
        let dh = h.derivative();
        Ok(PerturbedMap { h, dh, eps, center, width })
    }

    /// `(b, d b/dz)`; `d b / dzbar` is the conjugate of the latter.
    fn bump(&self, z: Complex) -> (f64, Complex) {
        let u = z - self.center;
        let t = u.norm_sqr() / (self.width * self.width);
        if t >= 1.0 {
            return (0.0, zero());
        }
        let b = (1.0 - 1.0 / (1.0 - t)).exp();
        // db/dt = -b/(1-t)^2 and dt/dz = conj(u)/w^2
        let db_dt = -b / ((1.0 - t) * (1.0 - t));
        (b, u.conj() * (db_dt / (self.width * self.width)))
    }
}

impl PlaneMap for PerturbedMap {
    fn apply(&self, z: Complex) -> Complex {
        self.h.eval(z) + z.conj() * (self.eps * self.bump(z).0)
    }

    fn wirtinger(&self, z: Complex) -> (Complex, Complex) {
        let (b, db) = self.bump(z);
        let d = self.dh.eval(z) + self.eps * z.conj() * db;
        let dbar = self.eps * (b + z.conj() * db.conj());
        (d, dbar)
    }
}

fn real_linear<M: PlaneMap + ?Sized>(g: &M, z: Complex) -> RealLinear {
    let (a, b) = g.wirtinger(z);
    RealLinear { a, b }
}

fn iterate_in<M: PlaneMap + ?Sized>(g: &M, z: Complex, n: usize, spec: &GridSpec) -> Option<Vec<Complex>> {
    let mut orbit = Vec::with_capacity(n + 1);
    orbit.push(z);
    let mut w = z;
    for _ in 0..n {
        w = g.apply(w);
        if !w.is_finite() || spec.locate(w).is_none() {
            return None;
        }
        orbit.push(w);
    }
    Some(orbit)
}

#[derive(Clone, Debug, Serialize)]
pub struct CompositionReport {
    pub n: usize,
    pub step: f64,
    pub checked: usize,
    /// Cells whose orbit left the window.
    pub skipped: usize,
    pub masked: usize,
    pub holds: usize,
    pub fraction: f64,
    /// Largest `K(g^n) / prod K(g, z_j)`.
    pub worst_ratio: f64,
    /// Largest relative slack granted by the finite-difference budget.
    pub max_tolerance: f64,
}

/// Compares `K(g^n, z)` with `prod_j K(g, z_j)` cell by cell, both sides from
/// central differences of width `step`. A cell passes when
/// `lhs <= rhs (1 + tol)`, `tol = max(1e-8, 10 step^2 S / |d g^n|)` with `S`
/// a third-derivative estimate of `g^n`.
pub fn composition_bound_check<M: PlaneMap + ?Sized>(g: &M, n: usize, spec: GridSpec, step: f64) -> CompositionReport {
    enum Cell {
        Skipped,
        Masked,
        Checked { ratio: f64, tol: f64 },
    }
    let gn = |z: Complex| iterate_in(g, z, n, &spec).map(|o| o[n]);
    let cells: Vec<Cell> = (0..spec.cells())
        .into_par_iter()
        .map(|i| {
            let z = spec.center(i);
            let Some(orbit) = iterate_in(g, z, n, &spec) else {
                return Cell::Skipped;
            };
            let stencil_ok = [1.0, -1.0].iter().all(|s| {
                [Complex::new(2.0 * step * s, 0.0), Complex::new(0.0, 2.0 * step * s)]
                    .iter()
                    .all(|dz| gn(z + dz).is_some())
            });
            if !stencil_ok {
                return Cell::Skipped;
            }
            let Some((a, b)) = fd_wirtinger(gn, z, step) else {
                return Cell::Masked;
            };
            let Some(mu_n) = (RealLinear { a, b }).mu() else {
                return Cell::Masked;
            };
            let mut rhs = 1.0;
            for &zj in &orbit[..n] {
                let Some((a, b)) = fd_wirtinger(|w| Some(g.apply(w)), zj, step) else {
                    return Cell::Masked;
                };
                let Some(mu) = (RealLinear { a, b }).mu() else {
                    return Cell::Masked;
                };
                rhs *= dilatation_of(mu);
            }
            let third = |dz: Complex| -> f64 {
                let f = |k: f64| gn(z + dz * k).unwrap_or(zero());
                ((f(2.0) - f(1.0) * 2.0 + f(-1.0) * 2.0 - f(-2.0)) / 2.0).norm() / step.powi(3)
            };
            let s = third(Complex::new(step, 0.0)).max(third(Complex::new(0.0, step)));
            let tol = (10.0 * step * step * s / a.norm()).max(1e-8);
            Cell::Checked { ratio: dilatation_of(mu_n) / rhs, tol }
        })
        .collect();
    let mut r = CompositionReport {
        n,
        step,
        checked: 0,
        skipped: 0,
        masked: 0,
        holds: 0,
        fraction: 0.0,
        worst_ratio: 0.0,
        max_tolerance: 0.0,
    };
    for c in cells {
        match c {
            Cell::Skipped => r.skipped += 1,
            Cell::Masked => r.masked += 1,
            Cell::Checked { ratio, tol } => {
                r.checked += 1;
                if ratio <= 1.0 + tol {
                    r.holds += 1;
                }
                r.worst_ratio = r.worst_ratio.max(ratio);
                r.max_tolerance = r.max_tolerance.max(tol);
            }
        }
    }
    r.fraction = if r.checked > 0 { r.holds as f64 / r.checked as f64 } else { 0.0 };
    r
}

/// Largest `n <= n_max` with the first `n` backward iterates of the cell in
/// the trap, or `None` outside `U`.
fn backward_depths<M: PlaneMap + ?Sized>(g: &M, trap: TrapBall, spec: GridSpec, n_max: u32) -> Vec<Option<u32>> {
    let trap = TrapBall { radius: trap.radius, max_iters: n_max };
    let gs = escape_scan(g, trap, spec, Direction::Backward);
    gs.backward
        .iter()
        .map(|e| match *e {
            Exit::Escaped(0) => None,
            // a failed backward step counts as leaving the trap
            Exit::Escaped(k) | Exit::Indeterminate(k) => Some(k - 1),
            Exit::Stayed => Some(n_max),
            Exit::NotScanned => None,
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub n: u32,
    pub cells: usize,
    pub sup_mu: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
    /// `exp` of the least-squares slope of `log sup_mu` over rows with
    /// `sup_mu > 0`; `None` with fewer than two such rows.
    pub rho: Option<f64>,
}

/// `sup |mu_g|` over the grid approximation of `U_n`, `n = 0..=n_max`.
pub fn decay_probe<M: PlaneMap + ?Sized>(g: &M, trap: TrapBall, spec: GridSpec, n_max: u32) -> DecayReport {
    let depth = backward_depths(g, trap, spec, n_max);
    let mu: Vec<f64> = (0..spec.cells())
        .into_par_iter()
        .map(|i| real_linear(g, spec.center(i)).mu().map_or(0.0, |m| m.norm()))
        .collect();
    let mut rows = Vec::new();
    for n in 0..=n_max {
        let members: Vec<usize> = (0..spec.cells()).filter(|&i| depth[i].is_some_and(|d| d >= n)).collect();
        if members.is_empty() {
            break;
        }
        let sup_mu = members.iter().map(|&i| mu[i]).fold(0.0, f64::max);
        rows.push(DecayRow { n, cells: members.len(), sup_mu });
    }
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.sup_mu > 0.0).map(|r| (r.n as f64, r.sup_mu.ln())).collect();
    let rho = (pts.len() >= 2).then(|| {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (sxy / sxx).exp()
    });
    DecayReport { rows, rho }
}

/// `mu_{g^{-n}}(z)` from the chain rule along the backward orbit, or `None`
/// when a backward step fails or the Jacobian degenerates.
pub fn pullback_mu<M: PlaneMap + ?Sized>(g: &M, z: Complex, n: u32) -> Option<Complex> {
    let mut m = RealLinear::identity();
    let mut w = z;
    for _ in 0..n {
        w = g.preimage(w)?;
        m = real_linear(g, w).inverse()?.compose(&m);
    }
    m.mu()
}

#[derive(Clone, Debug, Serialize)]
pub struct BeltramiAssembly {
    pub field: BeltramiField,
    /// `n` for cells in `U_n - U_{n+1}`; `n_max` on the proxy of `X`.
    pub stratum: Vec<Option<u32>>,
    pub n_max: u32,
    pub sup_norm: f64,
    /// `sup |(g^{-1})^* mu - mu|` over interior cells of `U_1` in the
    /// strata `1..n_max`.
    pub invariance_residual: f64,
    pub invariance_cells: usize,
    /// The same residual on the proxy of `X`, where it equals `|mu_g|` at
    /// the preimage and vanishes only if `mu_g = 0` there.
    pub proxy_residual: f64,
    pub proxy_cells: usize,
    /// Finite-difference budget the residual is compared against.
    pub budget: f64,
}

/// Pullback of the coefficient `mu` (given at `phi(z)`) by a map with
/// derivative `d` at `z`.
fn pullback(d: RealLinear, mu_at_image: Complex) -> Complex {
    (d.b + mu_at_image * d.a.conj()) / (d.a + mu_at_image * d.b.conj())
}

/// The coefficient equal to `sigma_n = mu_{g^{-n}}` on `U_n - U_{n+1}` and
/// to 0 on `U_{n_max}`, with its invariance residual under `g^{-1}`.
pub fn assemble_invariant_beltrami<M: PlaneMap + ?Sized>(
    g: &M,
    trap: TrapBall,
    spec: GridSpec,
    n_max: u32,
) -> Result<BeltramiAssembly> {
    let stratum = backward_depths(g, trap, spec, n_max);
    let mu_of = |z: Complex, s: u32| -> Option<Complex> {
        if s == n_max {
            Some(zero())
        } else {
            pullback_mu(g, z, s)
        }
    };
    let mu: Vec<Option<Complex>> = (0..spec.cells())
        .into_par_iter()
        .map(|i| stratum[i].and_then(|s| mu_of(spec.center(i), s)))
        .collect();
    let field = BeltramiField::new(spec, mu);
    for s in 0..=n_max {
        let bad = (0..spec.cells())
            .filter(|&i| stratum[i] == Some(s) && field.mu[i].is_some_and(|m| m.norm() >= 1.0))
            .count();
        if bad > 0 {
            return Err(Error::NotQuasiconformal { cells: bad, stratum: Some(s) });
        }
    }

    // depth of an arbitrary point, by the same rule as the grid scan
    let depth_at = |z: Complex| -> Option<u32> {
        if !trap.contains(z) {
            return None;
        }
        let mut w = z;
        for k in 1..=n_max {
            match g.preimage(w) {
                Some(p) if trap.contains(p) => w = p,
                _ => return Some(k - 1),
            }
        }
        Some(n_max)
    };
    let n = spec.resolution;
    let interior = |i: usize| -> bool {
        let (row, col) = (i / n, i % n);
        if row == 0 || col == 0 || row + 1 == n || col + 1 == n {
            return false;
        }
        [i - 1, i + 1, i - n, i + n].iter().all(|&j| stratum[j] == stratum[i])
    };
    let residuals: Vec<Option<(bool, f64)>> = (0..spec.cells())
        .into_par_iter()
        .map(|i| {
            let s = stratum[i]?;
            if s == 0 || !interior(i) {
                return None;
            }
            let z = spec.center(i);
            let w = g.preimage(z)?;
            let dw = depth_at(w)?;
            let mu_w = mu_of(w, dw)?;
            let d_inv = real_linear(g, w).inverse()?;
            Some((s == n_max, (pullback(d_inv, mu_w) - field.mu[i]?).norm()))
        })
        .collect();
    let strata = || residuals.iter().flatten().filter(|r| !r.0).map(|r| r.1);
    let proxy = || residuals.iter().flatten().filter(|r| r.0).map(|r| r.1);
    let invariance_cells = strata().count();
    let invariance_residual = strata().fold(0.0, f64::max);
    let proxy_cells = proxy().count();
    let proxy_residual = proxy().fold(0.0, f64::max);
    let sup_norm = field.sup_norm;
    Ok(BeltramiAssembly {
        field,
        stratum,
        n_max,
        sup_norm,
        invariance_residual,
        invariance_cells,
        proxy_residual,
        proxy_cells,
        budget: 1e-8,
    })
}

/// One row per cell: `re,im,mu_re,mu_im,k,stratum`; masked cells have empty
/// fields.
pub fn write_csv<W: Write>(mut w: W, bf: &BeltramiField, stratum: Option<&[Option<u32>]>) -> io::Result<()> {
    writeln!(w, "re,im,mu_re,mu_im,k,stratum")?;
    for i in 0..bf.spec.cells() {
        let z = bf.spec.center(i);
        let s = stratum.and_then(|s| s[i]).map(|s| s.to_string()).unwrap_or_default();
        match bf.mu[i] {
            Some(m) => writeln!(w, "{},{},{},{},{},{}", z.re, z.im, m.re, m.im, dilatation_of(m), s)?,
            None => writeln!(w, "{},{},,,,{}", z.re, z.im, s)?,
        }
    }
    Ok(())
}

/// Binary PPM heat map of `|mu| / max(sup_norm, tiny)`; masked cells blue.
pub fn write_ppm<W: Write>(mut w: W, bf: &BeltramiField) -> io::Result<()> {
    let n = bf.spec.resolution;
    write!(w, "P6\n{n} {n}\n255\n")?;
    let scale = bf.sup_norm.max(1e-300);
    let mut px = Vec::with_capacity(3 * bf.spec.cells());
    for m in &bf.mu {
        let rgb = match m {
            Some(m) => {
                let v = (255.0 * (m.norm() / scale).min(1.0)).round() as u8;
                [v, v / 2, 255 - v]
            }
            None => [0, 0, 255],
        };
        px.extend_from_slice(&rgb);
    }
    w.write_all(&px)
}
