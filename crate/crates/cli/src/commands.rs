use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use semineutral::beltrami::{self, PerturbedMap};
use semineutral::germ::root_of_unity;
use semineutral::invariant_sets::{self, Direction, GridSpec, SeriesMap, TrapBall, Window};
use semineutral::io::{ComplexJson, Germ1Json, GermJson, LambdaJson, SeriesJson};
use semineutral::manifolds::{center_manifold, restrict_to_center, strong_stable_manifold};
use semineutral::normal_forms::{
    linearize_cocycle, normalize_1d, semiparabolic_multiplicity, skew_normal_form, solve_cohomology, CocycleMap,
    Lead, SkewGerm,
};
use semineutral::petals::{fatou_coordinate, lift_repelling_petal, petal_decomposition, PetalKind};
use semineutral::rotation::{Multiplier, RotationArithmetic};
use semineutral::{Complex, Germ2, Point2, Series1};

use crate::out::{self, Artifact};
use crate::{Command, Common, Failure, LeadArg};

pub enum Report {
    Json(Value),
    Text(String),
}

type Outcome = Result<(Report, Vec<Artifact>), Failure>;

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = out::read(path).map_err(Failure::Usage)?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// A germ file holds either a two-dimensional germ or `{"h": ...}`.
enum GermInput {
    Two(Germ2, Option<RotationArithmetic>),
    One(Series1, Option<RotationArithmetic>),
}

fn load_germ(path: &Path) -> Result<GermInput, Failure> {
    let raw: Value = parse(path)?;
    let bad = |e: serde_json::Error| Failure::Usage(format!("{}: {e}", path.display()));
    if raw.get("h").is_some() {
        let g: Germ1Json = serde_json::from_value(raw).map_err(bad)?;
        let mut h = g.h.to_series1()?;
        let rot = match &g.lambda {
            Some(l) => {
                let (lam, rot) = l.resolve()?;
                h.set_coeff(1, lam);
                rot
            }
            None => None,
        };
        Ok(GermInput::One(h, rot))
    } else {
        let g: GermJson = serde_json::from_value(raw).map_err(bad)?;
        let (germ, rot) = g.build()?;
        Ok(GermInput::Two(germ, rot))
    }
}

fn one_dimensional(input: &GermInput, degree: usize) -> Result<Series1, Failure> {
    Ok(match input {
        GermInput::One(h, _) => h.clone(),
        GermInput::Two(g, _) => g.center_restriction(degree.min(g.cap()))?,
    })
}

fn rotation_of(input: &GermInput) -> Option<&RotationArithmetic> {
    match input {
        GermInput::One(_, r) | GermInput::Two(_, r) => r.as_ref(),
    }
}

pub fn output_paths(cmd: &Command) -> Vec<PathBuf> {
    let mut v = Vec::new();
    let mut push = |p: &Option<PathBuf>| v.extend(p.iter().cloned());
    match cmd {
        Command::Cf(a) => push(&a.out_csv),
        Command::Hedgehog(a) => {
            push(&a.out_img);
            push(&a.out_csv);
        }
        Command::Petals(a) => {
            push(&a.out_img);
            push(&a.out_csv);
        }
        Command::Beltrami(a) => {
            push(&a.out_img);
            push(&a.out_csv);
        }
        _ => {}
    }
    v
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct ClassifyArgs {
    #[arg(long)]
    germ: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

pub fn classify(a: &ClassifyArgs) -> Outcome {
    let GermInput::Two(g, rot) = load_germ(&a.germ)? else {
        return Err(Failure::Usage("classify needs a two-dimensional germ".into()));
    };
    let class = g.classify(rot.as_ref())?;
    let mut v = to_value(&class);
    v["lambda"] = to_value(&g.lambda());
    v["mu"] = to_value(&g.mu());
    Ok((Report::Json(v), vec![]))
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct CfArgs {
    /// Partial quotients `a_1, a_2, ...` of `[0; a_1, a_2, ...]`.
    #[arg(long, value_delimiter = ',', conflicts_with = "angle")]
    quotients: Option<Vec<u64>>,
    /// Rotation number in `(0, 1)`.
    #[arg(long)]
    angle: Option<f64>,
    #[arg(long, default_value_t = 40)]
    depth: usize,
    /// Fill the Brjuno and log-log columns.
    #[arg(long)]
    brjuno: bool,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

pub fn cf(a: &CfArgs) -> Outcome {
    let r = match (&a.quotients, a.angle) {
        (Some(q), _) => RotationArithmetic::from_quotients(&q.iter().map(|&x| x as i128).collect::<Vec<_>>())?,
        (None, Some(x)) => RotationArithmetic::from_real(x, a.depth)?,
        (None, None) => return Err(Failure::Usage("give --quotients or --angle".into())),
    };
    let n = r.convergents().len();
    let brjuno = r.brjuno_sum(n);
    let loglog = r.perez_marco_sum(n);
    let mut csv = String::from("n,a_n,p_n,q_n,brjuno_term,loglog_term\n");
    for (k, c) in r.convergents().iter().enumerate() {
        let a_n = if k == 0 { 0 } else { r.quotients()[k - 1] };
        let term = |s: &[f64]| if a.brjuno { s.get(k).map(|t| t.to_string()).unwrap_or_default() } else { String::new() };
        let _ = writeln!(csv, "{k},{a_n},{},{},{},{}", c.p, c.q, term(&brjuno.terms), term(&loglog.terms));
    }
    let summary = json!({
        "alpha": r.alpha(),
        "rational": r.is_rational(),
        "trusted": r.trusted(),
        "overflow_at": r.overflow_at(),
        "brjuno": brjuno,
        "perez_marco": loglog,
    });
    match &a.out_csv {
        Some(p) => Ok((Report::Json(summary), vec![Artifact { path: p.clone(), bytes: csv.into_bytes() }])),
        None if a.common.out_json.is_some() => {
            // CSV on stdout, summary to the JSON file
            print!("{csv}");
            Ok((Report::Json(summary), vec![]))
        }
        None => Ok((Report::Text(csv), vec![])),
    }
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct ManifoldArgs {
    #[arg(long)]
    germ: PathBuf,
    #[arg(long, default_value_t = 12)]
    degree: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn manifolds(a: &ManifoldArgs) -> Outcome {
    let GermInput::Two(g, _) = load_germ(&a.germ)? else {
        return Err(Failure::Usage("manifolds needs a two-dimensional germ".into()));
    };
    let cm = center_manifold(&g, a.degree)?;
    let ss = strong_stable_manifold(&g, a.degree)?;
    let hc = restrict_to_center(&g, &cm)?;
    let v = json!({ "center": cm, "strong_stable": ss, "center_restriction": hc });
    Ok((Report::Json(v), vec![]))
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DirectionArg {
    Forward,
    Backward,
    Both,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct HedgehogArgs {
    #[arg(long)]
    germ: PathBuf,
    /// Degree of the center restriction for two-dimensional germs.
    #[arg(long, default_value_t = 12)]
    degree: usize,
    #[arg(long)]
    radius: f64,
    #[arg(long, default_value_t = 256)]
    grid: usize,
    #[arg(long, default_value_t = 200)]
    iters: u32,
    /// Half-width of the square window (default 1.1 radius).
    #[arg(long)]
    window: Option<f64>,
    #[arg(long, value_enum, default_value = "both")]
    direction: DirectionArg,
    /// Probe recurrence along the first K convergents.
    #[arg(long)]
    recurrence: Option<usize>,
    #[arg(long, default_value_t = 4096)]
    max_cells: usize,
    #[arg(long)]
    out_img: Option<PathBuf>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

pub fn hedgehog(a: &HedgehogArgs) -> Outcome {
    let input = load_germ(&a.germ)?;
    let h = SeriesMap::new(one_dimensional(&input, a.degree)?)?;
    let trap = TrapBall::new(a.radius, a.iters)?;
    let spec = GridSpec::new(a.grid, Window::square(a.window.unwrap_or(1.1 * a.radius)))?;
    let direction = match a.direction {
        DirectionArg::Forward => Direction::Forward,
        DirectionArg::Backward => Direction::Backward,
        DirectionArg::Both => Direction::Both,
    };
    let mut gs = invariant_sets::escape_scan(&h, trap, spec, direction);
    let summary = invariant_sets::hedgehog_component(&mut gs);
    let defects = invariant_sets::invariance_defects(&h, &gs);
    let recurrence = match (a.recurrence, rotation_of(&input)) {
        (Some(k), Some(r)) => Some(invariant_sets::recurrence_probe(&h, &gs, r, k, a.max_cells, a.common.seed)),
        (Some(_), None) => return Err(Failure::Usage("--recurrence needs lambda given by quotients or angle".into())),
        _ => None,
    };
    let mut artifacts = Vec::new();
    if let Some(p) = &a.out_img {
        let mut ppm = Vec::new();
        invariant_sets::write_ppm(&mut ppm, &gs).map_err(|e| Failure::Io(e.to_string()))?;
        let rgb = invariant_sets::rgb_pixels(&gs);
        artifacts.push(out::image_artifact(p, ppm, &rgb, a.grid).map_err(Failure::Io)?);
    }
    if let Some(p) = &a.out_csv {
        let mut csv = Vec::new();
        invariant_sets::write_csv(&mut csv, &gs).map_err(|e| Failure::Io(e.to_string()))?;
        artifacts.push(Artifact { path: p.clone(), bytes: csv });
    }
    let v = json!({
        "summary": summary,
        "invariance_defects": defects,
        "multiplier": h.multiplier(),
        "recurrence": recurrence,
    });
    Ok((Report::Json(v), artifacts))
}

fn lead_of(l: LeadArg) -> Lead {
    match l {
        LeadArg::One => Lead::One,
        LeadArg::Lambda => Lead::Lambda,
    }
}

/// `(p, q)` with `lambda = e^{2 pi i p/q}`.
fn rational_angle(lambda: Complex) -> Option<(u32, u32)> {
    let (q, _) = root_of_unity(lambda);
    let q = q?;
    let turns = lambda.arg() / TAU;
    let p = ((turns * q as f64).round() as i64).rem_euclid(q as i64) as u32;
    Some((p, q))
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct PetalArgs {
    #[arg(long)]
    germ: PathBuf,
    #[arg(long, default_value_t = 20)]
    degree: usize,
    #[arg(long, default_value_t = 0.1)]
    radius: f64,
    /// Iteration budget of the Fatou limit.
    #[arg(long, default_value_t = 100_000)]
    iters: usize,
    /// Sample points per petal in the CSV.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, value_enum, default_value = "one")]
    lead: LeadArg,
    /// Lift the first repelling petal along the center graph.
    #[arg(long)]
    lift: bool,
    #[arg(long, default_value_t = 256)]
    grid: usize,
    #[arg(long)]
    out_img: Option<PathBuf>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

pub fn petals(a: &PetalArgs) -> Outcome {
    let input = load_germ(&a.germ)?;
    let h = one_dimensional(&input, a.degree)?;
    let Some((p, q)) = rational_angle(h.coeff(1)) else {
        return Err(Failure::Domain(semineutral::Error::Precondition("multiplier is not a root of unity".into())));
    };
    let (nu, _) = semiparabolic_multiplicity(&h, q)?;
    let m = (nu * q) as usize;
    let nf = normalize_1d(&h, Some(q), (2 * m + 1).min(h.cap()), lead_of(a.lead))?;
    let already_normal = nf.change.max_abs_diff(&Series1::var(h.cap())) < 1e-12;
    let ps = petal_decomposition(&nf.transformed, p, q, nu, a.radius)?;

    let mut coords = Vec::new();
    let mut csv = String::from("petal,kind,re,im,phi_re,phi_im,converged\n");
    for petal in &ps.petals {
        let fc = fatou_coordinate(&ps, petal.id, a.iters)?;
        let kind = match petal.kind {
            PetalKind::Attracting => "attracting",
            PetalKind::Repelling => "repelling",
        };
        for z in petal.arc_sample(a.samples) {
            match fc.evaluate(z) {
                Ok(v) => {
                    let _ = writeln!(csv, "{},{kind},{},{},{},{},{}", petal.id, z.re, z.im, v.value.re, v.value.im, v.converged);
                }
                Err(_) => {
                    let _ = writeln!(csv, "{},{kind},{},{},,,false", petal.id, z.re, z.im);
                }
            }
        }
        coords.push(json!({
            "petal_id": petal.id,
            "kind": fc.kind,
            "abel_residual_bound": fc.abel_residual_bound,
            "sample_failures": fc.sample_failures,
            "log_coefficient": fc.expansion.beta,
        }));
    }

    let lift = match (&input, a.lift) {
        (GermInput::Two(g, _), true) if already_normal => {
            let cm = center_manifold(g, a.degree.min(g.cap()))?;
            let rep = ps.petals.iter().find(|pt| pt.kind == PetalKind::Repelling).map(|pt| pt.id);
            match rep {
                Some(id) => Some(to_value(&lift_repelling_petal(g, &cm, &ps, id, a.samples)?)),
                None => None,
            }
        }
        (GermInput::Two(..), true) => Some(json!({ "skipped": "center restriction is not in normal form" })),
        (GermInput::One(..), true) => return Err(Failure::Usage("--lift needs a two-dimensional germ".into())),
        _ => None,
    };

    let mut artifacts = Vec::new();
    if let Some(path) = &a.out_img {
        let map = SeriesMap::new(nf.transformed.clone())?;
        let trap = TrapBall::new(a.radius, 200)?;
        let spec = GridSpec::new(a.grid, Window::square(1.1 * a.radius))?;
        let gs = invariant_sets::escape_scan(&map, trap, spec, Direction::Both);
        let mut rgb = invariant_sets::rgb_pixels(&gs);
        for i in 0..spec.cells() {
            let z = spec.center(i);
            if let Some(pt) = ps.petals.iter().find(|pt| pt.contains(z)) {
                let c = match pt.kind {
                    PetalKind::Attracting => [40, 170, 60],
                    PetalKind::Repelling => [230, 140, 30],
                };
                rgb[3 * i..3 * i + 3].copy_from_slice(&c);
            }
        }
        let mut ppm = format!("P6\n{0} {0}\n255\n", a.grid).into_bytes();
        ppm.extend_from_slice(&rgb);
        artifacts.push(out::image_artifact(path, ppm, &rgb, a.grid).map_err(Failure::Io)?);
    }
    if let Some(path) = &a.out_csv {
        artifacts.push(Artifact { path: path.clone(), bytes: csv.into_bytes() });
    }
    let v = json!({
        "p": p,
        "q": q,
        "nu": nu,
        "normalization": { "identity": already_normal, "residual_norm": nf.residual_norm, "change": nf.change },
        "system": ps,
        "coordinates": coords,
        "lift": lift,
    });
    Ok((Report::Json(v), artifacts))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SkewJson {
    lambda: LambdaJson,
    first: SeriesJson,
    second: SeriesJson,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct NormalFormArgs {
    /// Germ file, or a skew germ `{"lambda", "first", "second"}`.
    #[arg(long)]
    germ: PathBuf,
    #[arg(long, default_value_t = 20)]
    degree: usize,
    /// Highest order to normalize (default: 2 nu q + 1, or the cap).
    #[arg(long)]
    order: Option<usize>,
    /// Treat the multiplier as a primitive root of unity of this order.
    #[arg(long)]
    period: Option<u32>,
    #[arg(long, value_enum, default_value = "one")]
    lead: LeadArg,
    /// Highest `a_i` flattened for skew germs.
    #[arg(long, default_value_t = 6)]
    max_order: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn normal_form(a: &NormalFormArgs) -> Outcome {
    let raw: Value = parse(&a.germ)?;
    if raw.get("first").is_some() {
        let s: SkewJson = serde_json::from_value(raw).map_err(|e| Failure::Usage(e.to_string()))?;
        let (lam, _) = s.lambda.resolve()?;
        let skew = SkewGerm::new(lam, s.first.to_series2()?, s.second.to_series2()?)?;
        let report = skew_normal_form(&skew, a.max_order)?;
        return Ok((Report::Json(to_value(&report)), vec![]));
    }
    let input = load_germ(&a.germ)?;
    let h = one_dimensional(&input, a.degree)?;
    let period = a.period.or_else(|| rational_angle(h.coeff(1)).map(|(_, q)| q));
    let order = match (a.order, period) {
        (Some(o), _) => o,
        (None, Some(q)) => {
            let (nu, _) = semiparabolic_multiplicity(&h, q)?;
            (2 * (nu * q) as usize + 1).min(h.cap())
        }
        (None, None) => h.cap(),
    };
    let nf = normalize_1d(&h, period, order, lead_of(a.lead))?;
    Ok((Report::Json(to_value(&nf)), vec![]))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CocycleJson {
    lambda: LambdaJson,
    nu: SeriesJson,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CohomologyJson {
    lambda: LambdaJson,
    mu_of_x: SeriesJson,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct LinearizeArgs {
    /// `{"lambda", "nu"}` for a cocycle or `{"lambda", "mu_of_x"}` for the
    /// cohomology equation.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 200)]
    n_max: usize,
    #[arg(long, default_value_t = 0.1)]
    rx: f64,
    #[arg(long, default_value_t = 0.1)]
    ry: f64,
    /// Random sample points in the polydisk.
    #[arg(long, default_value_t = 400)]
    samples: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn linearize(a: &LinearizeArgs) -> Outcome {
    let raw: Value = parse(&a.input)?;
    let bad = |e: serde_json::Error| Failure::Usage(format!("{}: {e}", a.input.display()));
    if raw.get("mu_of_x").is_some() {
        let c: CohomologyJson = serde_json::from_value(raw).map_err(bad)?;
        let (lam, rot) = c.lambda.resolve()?;
        let mult = match rot {
            Some(r) => Multiplier::Rotation(r),
            None => Multiplier::Complex(lam),
        };
        let report = solve_cohomology(&c.mu_of_x.to_series1()?, &mult)?;
        return Ok((Report::Json(to_value(&report)), vec![]));
    }
    let c: CocycleJson = serde_json::from_value(raw).map_err(bad)?;
    let (lam, _) = c.lambda.resolve()?;
    let f = CocycleMap::new(lam, c.nu.to_series2()?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
    let mut disk = |r: f64| Complex::from_polar(r * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>());
    let sample: Vec<Point2> = (0..a.samples).map(|_| Point2::new(disk(a.rx), disk(a.ry))).collect();
    let report = linearize_cocycle(&f, a.n_max, (a.rx, a.ry), &sample)?;
    Ok((Report::Json(to_value(&report)), vec![]))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelJson {
    h: SeriesJson,
    eps: f64,
    center: ComplexJson,
    width: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BeltramiMode {
    Field,
    Assemble,
    Decay,
    Composition,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct BeltramiArgs {
    /// `{"h": series, "eps", "center": {"re", "im"}, "width"}` describing
    /// `h(z) + eps conj(z) b(z)` with a bump `b` around `center`.
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum, default_value = "assemble")]
    mode: BeltramiMode,
    #[arg(long)]
    radius: f64,
    #[arg(long, default_value_t = 128)]
    grid: usize,
    #[arg(long)]
    window: Option<f64>,
    /// Depth of the backward strata (assemble, decay).
    #[arg(long, default_value_t = 20)]
    n_max: u32,
    /// Number of iterates in the composition check.
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    #[arg(long)]
    out_img: Option<PathBuf>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

pub fn beltrami(a: &BeltramiArgs) -> Outcome {
    let m: ModelJson = parse(&a.model)?;
    let g = PerturbedMap::new(m.h.to_series1()?, m.eps, m.center.into(), m.width)?;
    let spec = GridSpec::new(a.grid, Window::square(a.window.unwrap_or(1.1 * a.radius)))?;
    let trap = TrapBall::new(a.radius, a.n_max)?;
    let (report, field, strata) = match a.mode {
        BeltramiMode::Field => {
            use semineutral::invariant_sets::PlaneMap;
            let w = beltrami::WirtingerField::sample(|z| Some(g.apply(z)), spec, a.step);
            let bf = w.beltrami();
            let k = beltrami::dilatation(&bf)?;
            let v = json!({ "sup_norm": bf.sup_norm, "sup_k": k.sup_k, "masked": bf.masked() });
            (v, Some(bf), None)
        }
        BeltramiMode::Assemble => {
            let asm = beltrami::assemble_invariant_beltrami(&g, trap, spec, a.n_max)?;
            let v = json!({
                "sup_norm": asm.sup_norm,
                "invariance_residual": asm.invariance_residual,
                "invariance_cells": asm.invariance_cells,
                "proxy_residual": asm.proxy_residual,
                "proxy_cells": asm.proxy_cells,
                "budget": asm.budget,
                "n_max": asm.n_max,
            });
            (v, Some(asm.field), Some(asm.stratum))
        }
        BeltramiMode::Decay => (to_value(&beltrami::decay_probe(&g, trap, spec, a.n_max)), None, None),
        BeltramiMode::Composition => {
            (to_value(&beltrami::composition_bound_check(&g, a.n, spec, a.step)), None, None)
        }
    };
    let mut artifacts = Vec::new();
    if let Some(bf) = &field {
        if let Some(p) = &a.out_csv {
            let mut csv = Vec::new();
            beltrami::write_csv(&mut csv, bf, strata.as_deref()).map_err(|e| Failure::Io(e.to_string()))?;
            artifacts.push(Artifact { path: p.clone(), bytes: csv });
        }
        if let Some(p) = &a.out_img {
            let mut ppm = Vec::new();
            beltrami::write_ppm(&mut ppm, bf).map_err(|e| Failure::Io(e.to_string()))?;
            let header = format!("P6\n{0} {0}\n255\n", a.grid).len();
            let rgb = ppm[header..].to_vec();
            artifacts.push(out::image_artifact(p, ppm, &rgb, a.grid).map_err(Failure::Io)?);
        }
    } else if a.out_csv.is_some() || a.out_img.is_some() {
        return Err(Failure::Usage("this mode writes only the JSON report".into()));
    }
    Ok((Report::Json(report), artifacts))
}
