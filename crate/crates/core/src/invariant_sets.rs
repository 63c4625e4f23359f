//! Grid approximations of the invariant sets of a one-dimensional germ on the
//! center chart: non-escaping sets, the hedgehog component, the set of points
//! whose backward orbits converge to 0, and recurrence along convergents.
//!
//! Every set here is an N-step approximation: a cell is kept when its first
//! `max_iters` iterates stay in the disk, which over-approximates the true
//! invariant set.

use std::collections::VecDeque;
use std::io::{self, Write};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::germ::{Germ2, NEUTRAL_TOL};
use crate::rotation::RotationArithmetic;
use crate::series::{Complex, Series1};

const NEWTON_STEPS: usize = 50;
const NEWTON_TOL: f64 = 1e-12;
const FD_STEP: f64 = 1e-6;

/// A smooth map of the plane near 0, written in the complex coordinate.
pub trait PlaneMap: Sync {
    fn apply(&self, z: Complex) -> Complex;

    /// `(d/dz, d/dzbar)` at `z`. Defaults to central differences.
    fn wirtinger(&self, z: Complex) -> (Complex, Complex) {
        let h = FD_STEP * z.norm().max(1.0);
        let dx = (self.apply(z + h) - self.apply(z - h)) / (2.0 * h);
        let dy = (self.apply(z + Complex::new(0.0, h)) - self.apply(z - Complex::new(0.0, h)))
            / (2.0 * h);
        let i = Complex::new(0.0, 1.0);
        ((dx - i * dy) / 2.0, (dx + i * dy) / 2.0)
    }

    /// Solves `self(z) = w` near 0 by Newton's method on the real-linear
    /// derivative `s -> a s + b conj(s)`.
    fn preimage(&self, w: Complex) -> Option<Complex> {
        let (a0, _) = self.wirtinger(Complex::new(0.0, 0.0));
        let mut z = w / a0;
        for _ in 0..NEWTON_STEPS {
            let r = self.apply(z) - w;
            let (a, b) = self.wirtinger(z);
            let det = a.norm_sqr() - b.norm_sqr();
            if det == 0.0 {
                return None;
            }
            let step = (a.conj() * r - b * r.conj()) / det;
            z -= step;
            if !z.is_finite() {
                return None;
            }
            if step.norm() <= NEWTON_TOL * w.norm().max(1.0) {
                return Some(z);
            }
        }
        None
    }
}

/// A holomorphic germ `h(z)` given by a truncated series.
#[derive(Clone, Debug)]
pub struct SeriesMap {
    h: Series1,
    dh: Series1,
}

impl SeriesMap {
    /// Accepts `h` with `h(0) = 0` and `|h'(0)| = 1`.
    pub fn new(h: Series1) -> Result<Self> {
        if h.cap() < 1 {
            return Err(Error::EmptySeries);
        }
        if h.coeff(0) != Complex::new(0.0, 0.0) {
            return Err(Error::NotAFixedPoint);
        }
        let m = h.coeff(1).norm();
        if (m - 1.0).abs() >= NEUTRAL_TOL {
            return Err(Error::NotSemiIndifferent { moduli: [m, 0.0] });
        }
        let dh = h.derivative();
        Ok(SeriesMap { h, dh })
    }

    /// The restriction of a two-dimensional germ to its formal center
    /// manifold.
    pub fn from_germ(g: &Germ2, degree: usize) -> Result<Self> {
        Self::new(g.center_restriction(degree)?)
    }

    pub fn series(&self) -> &Series1 {
        &self.h
    }

    pub fn multiplier(&self) -> Complex {
        self.h.coeff(1)
    }
}

impl PlaneMap for SeriesMap {
    fn apply(&self, z: Complex) -> Complex {
        self.h.eval(z)
    }

    fn wirtinger(&self, z: Complex) -> (Complex, Complex) {
        (self.dh.eval(z), Complex::new(0.0, 0.0))
    }

    fn preimage(&self, w: Complex) -> Option<Complex> {
        let mut z = w / self.multiplier();
        for _ in 0..NEWTON_STEPS {
            let d = self.dh.eval(z);
            if d.norm() == 0.0 {
                return None;
            }
            let step = (self.h.eval(z) - w) / d;
            z -= step;
            if !z.is_finite() {
                return None;
            }
            if step.norm() <= NEWTON_TOL * w.norm().max(1.0) {
                return Some(z);
            }
        }
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrapBall {
    pub radius: f64,
    pub max_iters: u32,
}

impl TrapBall {
    pub fn new(radius: f64, max_iters: u32) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Input(format!("trap radius must be positive, got {radius}")));
        }
        Ok(TrapBall { radius, max_iters })
    }

    pub fn contains(&self, z: Complex) -> bool {
        z.norm() <= self.radius
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    /// The square `[-half, half]^2`.
    pub fn square(half: f64) -> Self {
        Window { re_min: -half, re_max: half, im_min: -half, im_max: half }
    }
}

/// A `resolution x resolution` grid over `window`; row 0 is the top edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub resolution: usize,
    pub window: Window,
}

impl GridSpec {
    pub fn new(resolution: usize, window: Window) -> Result<Self> {
        let w = window;
        if resolution == 0 || !(w.re_max > w.re_min && w.im_max > w.im_min) {
            return Err(Error::Input("grid needs a positive resolution and a non-empty window".into()));
        }
        Ok(GridSpec { resolution, window })
    }

    pub fn cells(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn dx(&self) -> f64 {
        (self.window.re_max - self.window.re_min) / self.resolution as f64
    }

    pub fn dy(&self) -> f64 {
        (self.window.im_max - self.window.im_min) / self.resolution as f64
    }

    pub fn diagonal(&self) -> f64 {
        self.dx().hypot(self.dy())
    }

    /// Center of cell `idx = row * resolution + col`.
    pub fn center(&self, idx: usize) -> Complex {
        let (row, col) = (idx / self.resolution, idx % self.resolution);
        Complex::new(
            self.window.re_min + (col as f64 + 0.5) * self.dx(),
            self.window.im_max - (row as f64 + 0.5) * self.dy(),
        )
    }

    /// Index of the cell containing `z`, if it lies in the window.
    pub fn locate(&self, z: Complex) -> Option<usize> {
        let col = ((z.re - self.window.re_min) / self.dx()).floor();
        let row = ((self.window.im_max - z.im) / self.dy()).floor();
        let n = self.resolution as f64;
        if !(0.0..n).contains(&col) || !(0.0..n).contains(&row) {
            return None;
        }
        Some(row as usize * self.resolution + col as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
    Both,
}

impl Direction {
    fn forward(self) -> bool {
        matches!(self, Direction::Forward | Direction::Both)
    }

    fn backward(self) -> bool {
        matches!(self, Direction::Backward | Direction::Both)
    }
}

/// Fate of one cell center in one direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exit {
    /// All tested iterates stayed in the disk.
    Stayed,
    /// First iterate outside the disk.
    Escaped(u32),
    /// The backward step with this index failed to converge.
    Indeterminate(u32),
    NotScanned,
}

impl Exit {
    pub fn stayed(self) -> bool {
        matches!(self, Exit::Stayed)
    }

    /// Stayed, or was not scanned in this direction.
    fn admissible(self) -> bool {
        matches!(self, Exit::Stayed | Exit::NotScanned)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GridSet {
    pub spec: GridSpec,
    pub trap: TrapBall,
    pub direction: Direction,
    pub forward: Vec<Exit>,
    pub backward: Vec<Exit>,
    pub component: Vec<Option<u32>>,
}

impl GridSet {
    /// Cells whose scanned orbits all stayed.
    pub fn non_escaping(&self) -> Vec<bool> {
        self.forward.iter().zip(&self.backward).map(|(f, b)| f.admissible() && b.admissible()).collect()
    }

    pub fn indeterminate_count(&self) -> usize {
        self.forward
            .iter()
            .chain(&self.backward)
            .filter(|e| matches!(e, Exit::Indeterminate(_)))
            .count()
    }

    pub fn component_cells(&self) -> Vec<usize> {
        (0..self.spec.cells()).filter(|&i| self.component[i].is_some()).collect()
    }
}

fn orbit_exit<M: PlaneMap + ?Sized>(
    h: &M,
    z0: Complex,
    trap: &TrapBall,
    backward: bool,
) -> (Exit, Complex) {
    if !trap.contains(z0) {
        return (Exit::Escaped(0), z0);
    }
    let mut z = z0;
    for k in 1..=trap.max_iters {
        z = if backward {
            match h.preimage(z) {
                Some(w) => w,
                None => return (Exit::Indeterminate(k), z),
            }
        } else {
            h.apply(z)
        };
        if !z.is_finite() || !trap.contains(z) {
            return (Exit::Escaped(k), z);
        }
    }
    (Exit::Stayed, z)
}

/// Iterates every cell center up to `trap.max_iters` times in the requested
/// directions and records the first exit from `|z| <= radius`.
pub fn escape_scan<M: PlaneMap + ?Sized>(
    h: &M,
    trap: TrapBall,
    spec: GridSpec,
    direction: Direction,
) -> GridSet {
    let scan = |backward: bool, wanted: bool| -> Vec<Exit> {
        if !wanted {
            return vec![Exit::NotScanned; spec.cells()];
        }
        (0..spec.cells())
            .into_par_iter()
            .map(|i| orbit_exit(h, spec.center(i), &trap, backward).0)
            .collect()
    };
    GridSet {
        spec,
        trap,
        direction,
        forward: scan(false, direction.forward()),
        backward: scan(true, direction.backward()),
        component: vec![None; spec.cells()],
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HedgehogSummary {
    pub cells: usize,
    pub area: f64,
    pub reaches_boundary: bool,
    pub max_modulus: f64,
    pub indeterminate: usize,
    /// Why no component was found.
    pub degenerate: Option<String>,
}

/// Flood-fills (4-connectivity) the non-escaping cells from the cell that
/// contains 0 and marks them with component id 0.
pub fn hedgehog_component(gs: &mut GridSet) -> HedgehogSummary {
    gs.component.iter_mut().for_each(|c| *c = None);
    let mut summary = HedgehogSummary {
        cells: 0,
        area: 0.0,
        reaches_boundary: false,
        max_modulus: 0.0,
        indeterminate: gs.indeterminate_count(),
        degenerate: None,
    };
    let Some(seed) = gs.spec.locate(Complex::new(0.0, 0.0)) else {
        summary.degenerate = Some("the window does not contain 0".into());
        return summary;
    };
    let open = gs.non_escaping();
    if !open[seed] {
        summary.degenerate = Some("the cell containing 0 escaped".into());
        return summary;
    }
    let n = gs.spec.resolution;
    let mut queue = VecDeque::from([seed]);
    gs.component[seed] = Some(0);
    while let Some(i) = queue.pop_front() {
        let (row, col) = (i / n, i % n);
        let mut push = |j: usize| {
            if open[j] && gs.component[j].is_none() {
                gs.component[j] = Some(0);
                queue.push_back(j);
            }
        };
        if row > 0 {
            push(i - n);
        }
        if row + 1 < n {
            push(i + n);
        }
        if col > 0 {
            push(i - 1);
        }
        if col + 1 < n {
            push(i + 1);
        }
    }
    let diag = gs.spec.diagonal();
    for i in gs.component_cells() {
        let m = gs.spec.center(i).norm();
        summary.cells += 1;
        summary.max_modulus = summary.max_modulus.max(m);
        if m >= gs.trap.radius - diag {
            summary.reaches_boundary = true;
        }
    }
    summary.area = summary.cells as f64 * gs.spec.dx() * gs.spec.dy();
    summary
}

/// Component cells whose image under `h` is not within one cell (in the
/// 8-neighbourhood sense) of the component.
pub fn invariance_defects<M: PlaneMap + ?Sized>(h: &M, gs: &GridSet) -> usize {
    let n = gs.spec.resolution as isize;
    gs.component_cells()
        .into_par_iter()
        .filter(|&i| {
            let w = h.apply(gs.spec.center(i));
            let Some(j) = gs.spec.locate(w) else {
                return true;
            };
            let (r, c) = ((j as isize) / n, (j as isize) % n);
            let near = (-1..=1).any(|dr| {
                (-1..=1).any(|dc| {
                    let (rr, cc) = (r + dr, c + dc);
                    (0..n).contains(&rr)
                        && (0..n).contains(&cc)
                        && gs.component[(rr * n + cc) as usize].is_some()
                })
            });
            !near
        })
        .count()
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaSet {
    pub spec: GridSpec,
    pub trap: TrapBall,
    pub threshold: f64,
    pub backward: Vec<Exit>,
    pub member: Vec<bool>,
}

impl SigmaSet {
    pub fn count(&self) -> usize {
        self.member.iter().filter(|m| **m).count()
    }
}

/// Cells whose backward orbit stays in the disk for `max_iters` steps and
/// ends within `threshold * radius` of 0, having at least halved its
/// distance to 0. The cell containing 0 is excluded.
pub fn sigma_set(h: &SeriesMap, trap: TrapBall, spec: GridSpec, threshold: f64) -> SigmaSet {
    let origin = spec.locate(Complex::new(0.0, 0.0));
    let (backward, member) = (0..spec.cells())
        .into_par_iter()
        .map(|i| {
            let z0 = spec.center(i);
            let (exit, z) = orbit_exit(h, z0, &trap, true);
            let converged = exit.stayed()
                && z.norm() < threshold * trap.radius
                && z.norm() < 0.5 * z0.norm()
                && Some(i) != origin;
            (exit, converged)
        })
        .unzip();
    SigmaSet { spec, trap, threshold, backward, member }
}

#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceRow {
    pub n: usize,
    pub q: i128,
    /// `sup |h^{q_n}(z) - z|` over the probed cells.
    pub sup_distance: f64,
    pub probed: usize,
    /// Cells whose orbit left the disk during the probe.
    pub excluded: usize,
}

/// For each convergent index `1 <= n <= k_max`, the largest displacement
/// `|h^{q_n}(z) - z|` over component cells. Above `max_cells` component
/// cells a seeded random subset is probed.
pub fn recurrence_probe<M: PlaneMap + ?Sized>(
    h: &M,
    gs: &GridSet,
    r: &RotationArithmetic,
    k_max: usize,
    max_cells: usize,
    seed: u64,
) -> Vec<RecurrenceRow> {
    let mut cells = gs.component_cells();
    if cells.len() > max_cells {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked: Vec<usize> =
            sample(&mut rng, cells.len(), max_cells).into_iter().map(|k| cells[k]).collect();
        picked.sort_unstable();
        cells = picked;
    }
    (1..=k_max)
        .filter_map(|n| {
            let q = r.q(n)?;
            let steps = u32::try_from(q).ok()?;
            let results: Vec<Option<f64>> = cells
                .par_iter()
                .map(|&i| {
                    let z0 = gs.spec.center(i);
                    let mut z = z0;
                    for _ in 0..steps {
                        z = h.apply(z);
                        if !z.is_finite() || !gs.trap.contains(z) {
                            return None;
                        }
                    }
                    Some((z - z0).norm())
                })
                .collect();
            let excluded = results.iter().filter(|d| d.is_none()).count();
            let sup_distance = results.iter().flatten().copied().fold(0.0, f64::max);
            Some(RecurrenceRow { n, q, sup_distance, probed: cells.len() - excluded, excluded })
        })
        .collect()
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ConeReport {
    pub samples: usize,
    pub cone_angle: f64,
    /// Largest `|df v| / |v|` over vertical-cone vectors.
    pub mu1: f64,
    /// Largest `l <= 1` with `l |v| <= |df v| <= |v| / l` on horizontal-cone
    /// vectors.
    pub lambda1: f64,
    /// Whether `df` mapped every sampled horizontal vector into the
    /// horizontal cone and `df^{-1}` every vertical vector into the vertical
    /// cone.
    pub cones_invariant: bool,
    pub satisfied: bool,
}

/// Samples points of the ball of radius `radius` in `C^2` and unit vectors
/// in the horizontal and vertical cones of half-angle `cone_angle`
/// (`|v_y| <= tan(angle) |v_x|` and vice versa).
pub fn cone_condition_probe(
    g: &Germ2,
    radius: f64,
    samples: usize,
    cone_angle: f64,
    seed: u64,
) -> ConeReport {
    if samples == 0 {
        return ConeReport { cone_angle, ..Default::default() };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = cone_angle.tan();
    let unit = |rng: &mut ChaCha8Rng| Complex::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    let mut mu1 = 0.0f64;
    let mut lambda1 = 1.0f64;
    let mut invariant = true;
    for _ in 0..samples {
        // uniform in the 4-ball: Gaussian direction, radius ~ U^{1/4}
        let dir: [f64; 4] = std::array::from_fn(|_| {
            let (u1, u2): (f64, f64) = (rng.gen_range(1e-300..1.0), rng.gen());
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        });
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rad = radius * rng.gen::<f64>().powf(0.25) / norm;
        let p = crate::Point2::new(Complex::new(dir[0], dir[1]) * rad, Complex::new(dir[2], dir[3]) * rad);
        let j = g.jacobian(p);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let s: f64 = rng.gen_range(0.0..=1.0) * t;
        let (e1, e2) = (unit(&mut rng), unit(&mut rng));
        // horizontal (1, s) and vertical (s, 1), normalized
        let scale = 1.0 / (1.0 + s * s).sqrt();
        let (hx, hy) = (e1 * scale, e2 * s * scale);
        let (vx, vy) = (e1 * s * scale, e2 * scale);
        let (ihx, ihy) = (j[0][0] * hx + j[0][1] * hy, j[1][0] * hx + j[1][1] * hy);
        let (ivx, ivy) = (j[0][0] * vx + j[0][1] * vy, j[1][0] * vx + j[1][1] * vy);
        let hn = ihx.norm().hypot(ihy.norm());
        let vn = ivx.norm().hypot(ivy.norm());
        mu1 = mu1.max(vn);
        lambda1 = lambda1.min(hn).min(if hn > 0.0 { 1.0 / hn } else { 0.0 });
        if ihy.norm() > t * ihx.norm() * (1.0 + 1e-12) {
            invariant = false;
        }
        if det.norm() > 0.0 {
            // df^{-1} on the vertical vector
            let (bx, by) = ((j[1][1] * vx - j[0][1] * vy) / det, (-j[1][0] * vx + j[0][0] * vy) / det);
            if bx.norm() > t * by.norm() * (1.0 + 1e-12) {
                invariant = false;
            }
        } else {
            invariant = false;
        }
    }
    ConeReport {
        samples,
        cone_angle,
        mu1,
        lambda1,
        cones_invariant: invariant,
        satisfied: invariant && mu1 < lambda1,
    }
}

/// Pixel colors: component black, other non-escaping cells gray, escaped
/// cells blue shaded by `log(1 + exit)`, indeterminate cells red.
pub fn rgb_pixels(gs: &GridSet) -> Vec<u8> {
    let n_max = gs.trap.max_iters.max(1) as f64;
    let mut out = Vec::with_capacity(3 * gs.spec.cells());
    for i in 0..gs.spec.cells() {
        let (f, b) = (gs.forward[i], gs.backward[i]);
        let escape = [f, b]
            .iter()
            .filter_map(|e| if let Exit::Escaped(k) = e { Some(*k) } else { None })
            .min();
        let rgb = if gs.component[i].is_some() {
            [0, 0, 0]
        } else if matches!(f, Exit::Indeterminate(_)) || matches!(b, Exit::Indeterminate(_)) {
            [255, 0, 0]
        } else if let Some(e) = escape {
            let v = 255.0 - (200.0 * (1.0 + e as f64).ln() / (1.0 + n_max).ln()).round();
            let v = v.clamp(0.0, 255.0) as u8;
            [v, v, 255]
        } else {
            [128, 128, 128]
        };
        out.extend_from_slice(&rgb);
    }
    out
}

/// Binary PPM (P6) image of the grid, top-left origin.
pub fn write_ppm<W: Write>(mut w: W, gs: &GridSet) -> io::Result<()> {
    let n = gs.spec.resolution;
    write!(w, "P6\n{n} {n}\n255\n")?;
    w.write_all(&rgb_pixels(gs))
}

fn exit_field(e: Exit) -> String {
    match e {
        Exit::Stayed => "inf".into(),
        Exit::Escaped(k) => k.to_string(),
        Exit::Indeterminate(k) => format!("indeterminate@{k}"),
        Exit::NotScanned => String::new(),
    }
}

/// One CSV row per cell: `re,im,fwd_exit,bwd_exit,component`.
pub fn write_csv<W: Write>(mut w: W, gs: &GridSet) -> io::Result<()> {
    writeln!(w, "re,im,fwd_exit,bwd_exit,component")?;
    for i in 0..gs.spec.cells() {
        let z = gs.spec.center(i);
        let comp = gs.component[i].map(|c| c.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{}",
            z.re,
            z.im,
            exit_field(gs.forward[i]),
            exit_field(gs.backward[i]),
            comp
        )?;
    }
    Ok(())
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn map(c2: (f64, f64)) -> SeriesMap {
        let h = Series1::from_slice(3, &[
            Complex::new(0.0, 0.0),
            Complex::from_polar(1.0, 0.3),
            Complex::new(c2.0, c2.1),
        ])
        .unwrap();
        SeriesMap::new(h).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn monotone_in_iterations_and_radius(a in -1.0f64..1.0, b in -1.0f64..1.0, n in 1u32..20) {
            let h = map((a, b));
            let spec = GridSpec::new(24, Window::square(0.5)).unwrap();
            let short = escape_scan(&h, TrapBall::new(0.4, n).unwrap(), spec, Direction::Forward);
            let long = escape_scan(&h, TrapBall::new(0.4, n + 1).unwrap(), spec, Direction::Forward);
            let small = escape_scan(&h, TrapBall::new(0.3, n).unwrap(), spec, Direction::Forward);
            for i in 0..spec.cells() {
                if long.forward[i].stayed() {
                    prop_assert!(short.forward[i].stayed());
                }
                if small.forward[i].stayed() {
                    prop_assert!(short.forward[i].stayed());
                }
            }
        }
    }
}
