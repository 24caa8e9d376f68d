//! Check sections shared by the subcommands. Each section carries a JSON
//! payload and its check rows.

use serde::Serialize;
use serde_json::{json, Value};

use isogap::bounds;
use isogap::concentration::{self, LipschitzFunction, Space, Young};
use isogap::constants::{self, Constants, Resolution};
use isogap::geometry::ConvexBody;
use isogap::measures::{self, Measure1D, Quadrature};
use isogap::profile::{self, CutFamily, ProfileCurve};
use isogap::report::CheckRow;
use isogap::spectral::{self, discretize, Domain, GridOperator};
use isogap::stability::{self, MonotoneMap};

use crate::error::CliError;
use crate::fixture::Fixture;

type Result<T> = std::result::Result<T, CliError>;

/// Relative tolerance on `D_Poin ≥ D_Che / 2`.
pub const MAZYA_TOL: f64 = 1e-3;
/// Concavity tolerance for exact 1-D profiles (table interpolation).
pub const CONCAVITY_TOL_1D: f64 = 1e-6;
/// Concavity tolerance for cut-search profiles, relative to the largest value.
pub const CONCAVITY_TOL_2D: f64 = 1e-3;
pub const SYMMETRY_TOL: f64 = 1e-9;
pub const CHEEGER_CONSISTENCY_TOL: f64 = 1e-2;
pub const CAPACITY_TOL: f64 = 1e-4;
pub const CAPACITY_LEVELS: usize = 20_000;
/// Profile value at one half that counts as zero.
pub const ZERO_PROFILE: f64 = 1e-6;
pub const PZ_THETAS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];
pub const BORELL_MASSES: [f64; 3] = [0.6, 0.75, 0.9];
/// Heat evolution times, relative to the squared extent.
pub const HEAT_TIMES: [f64; 3] = [1e-3, 1e-2, 1e-1];
/// Cells per extent on the semigroup grids, by dimension.
const HEAT_CELLS: [usize; 3] = [200, 32, 12];

#[derive(Debug, Clone)]
pub struct Settings {
    pub seed: u64,
    /// Grid spacing override.
    pub h: Option<f64>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { seed: Resolution::default().seed, h: None }
    }
}

impl Settings {
    pub fn resolution(&self, d: &Domain) -> Resolution {
        let mut r = Resolution { seed: self.seed, ..Resolution::default() };
        if let Some(h) = self.h {
            let cells = (constants::extent(d) / h).ceil().max(2.0) as usize;
            match d.dim() {
                1 => r.cells_1d = cells,
                2 => r.cells_2d = cells,
                _ => r.cells_3d = cells,
            }
        }
        r
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Section {
    /// Fixture name, or the name of a global section.
    pub scope: String,
    pub part: &'static str,
    pub data: Value,
    pub checks: Vec<CheckRow>,
}

fn quantity(c: &Constants, q: &str) -> Result<f64> {
    Ok(match q {
        "d_che" => c.d_che,
        "d_poin" => c.d_poin,
        "d_exp" => c.d_exp,
        "d_fm" => c.d_fm,
        "lambda" => c.gap.lambda,
        other => return Err(CliError::Config(format!("no reference quantity {other}"))),
    })
}

const NAMES: [&str; 4] = ["che", "poin", "exp", "fm"];

pub fn constants_section(fx: &Fixture, st: &Settings) -> Result<(Section, Constants)> {
    let res = st.resolution(&fx.domain);
    let c = constants::compute(&fx.domain, &res)?;
    let mut rows =
        vec![CheckRow::explicit("cheeger_mazya", "Cheeger-Maz'ya", c.d_poin - 0.5 * c.d_che, MAZYA_TOL * c.d_poin)];
    for (q, (want, tol)) in &fx.expect {
        let got = quantity(&c, q)?;
        rows.push(CheckRow::explicit(
            format!("reference_{q}"),
            "closed-form value",
            tol * want.abs() - (got - want).abs(),
            0.0,
        ));
    }
    let ws = c.worst_set_value;
    rows.push(CheckRow::explicit(
        "worst_set_direction",
        "worst-set characterization",
        0.5 * ws - c.d_che,
        1e-3 * c.d_che,
    ));
    let r = ws / c.d_che;
    rows.push(CheckRow::explicit("worst_set_band", "worst-set characterization", (r - 1.0).min(8.0 - r), 0.0));
    rows.push(CheckRow::tracked("ws_over_che", "worst-set characterization", r));
    let v = [c.d_che, c.d_poin, c.d_exp, c.d_fm];
    for i in 0..4 {
        for j in i + 1..4 {
            rows.push(CheckRow::tracked(
                format!("{}_over_{}", NAMES[i], NAMES[j]),
                "four-constant equivalence",
                v[i] / v[j],
            ));
        }
    }
    let data = json!({
        "d_che": c.d_che,
        "d_che_method": c.d_che_method,
        "d_poin": c.d_poin,
        "gap": c.gap,
        "d_exp": c.d_exp,
        "d_fm": c.d_fm,
        "d_fm_median": c.d_fm_median,
        "worst_set_value": c.worst_set_value,
        "resolution": {
            "cells_1d": res.cells_1d,
            "cells_2d": res.cells_2d,
            "cells_3d": res.cells_3d,
            "h": res.h(&fx.domain),
            "seed": res.seed,
        },
    });
    Ok((Section { scope: fx.name.clone(), part: "constants", data, checks: rows }, c))
}

pub fn bounds_section(fx: &Fixture, st: &Settings, c: &Constants) -> Result<Section> {
    let r = bounds::report(&fx.domain, c, &st.resolution(&fx.domain))?;
    Ok(Section {
        scope: fx.name.clone(),
        part: "bounds",
        data: serde_json::to_value(&r).expect("serializable"),
        checks: r.rows(),
    })
}

/// Exact profile in 1-D and the cut-search upper profile for planar bodies.
pub fn profile_curve(fx: &Fixture) -> Result<Option<ProfileCurve>> {
    Ok(match &fx.domain {
        Domain::Measure(m) => Some(profile::curve_1d(m, &profile::default_t_grid())?),
        Domain::Body(b) if b.dim() == 1 => {
            let (lo, hi) = b.bounding_box();
            Some(profile::curve_1d(&Measure1D::uniform(lo[0], hi[0])?, &profile::default_t_grid())?)
        }
        Domain::Body(b) if b.dim() == 2 => Some(profile::curve_2d(b, &planar_t_grid(), &CutFamily::default())?),
        _ => None,
    })
}

/// `{0.05, 0.10, ..., 0.95}`.
pub fn planar_t_grid() -> Vec<f64> {
    (1..20).map(|k| k as f64 / 20.0).collect()
}

fn concavity_tol(curve: &ProfileCurve, power: f64) -> f64 {
    match curve.method {
        profile::Method::Exact1d => CONCAVITY_TOL_1D,
        profile::Method::Cutsearch2d => {
            CONCAVITY_TOL_2D * curve.values.iter().map(|v| v.max(0.0).powf(power)).fold(0.0, f64::max)
        }
    }
}

/// `(2 Ĩ(1/2), inf_{t ≤ 1/2} Ĩ(t)/t)`.
fn cheeger_pair(curve: &ProfileCurve) -> Result<(f64, f64)> {
    Ok((profile::cheeger_constant(curve, true)?, profile::cheeger_constant(curve, false)?))
}

pub fn profile_section(fx: &Fixture, curve: &ProfileCurve, powers: &[f64]) -> Result<Section> {
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for &p in powers {
        let defect = profile::concavity_check(curve, p);
        let tol = concavity_tol(curve, p);
        verdicts.push(json!({"power": p, "defect": defect, "tol": tol, "concave": defect <= tol}));
        let name = format!("concavity_power{p}");
        if fx.convex {
            rows.push(CheckRow::explicit(name, "profile concavity", tol - defect, 0.0));
        } else {
            rows.push(CheckRow::tracked(name, "profile concavity (non-convex control)", defect));
        }
    }
    if fx.convex {
        if curve.method == profile::Method::Exact1d {
            rows.push(CheckRow::explicit(
                "profile_symmetry",
                "profile symmetry",
                SYMMETRY_TOL - curve.symmetry_defect(),
                0.0,
            ));
        }
        let (half, inf) = cheeger_pair(curve)?;
        rows.push(CheckRow::explicit(
            "cheeger_consistency",
            "concave-profile Cheeger identity",
            CHEEGER_CONSISTENCY_TOL - (half - inf).abs() / half,
            0.0,
        ));
    }
    if let (Some(m), true) = (fx.measure(), fx.convex) {
        rows.push(CheckRow::explicit("capacity_sandwich", "capacity sandwich", capacity_slack(m)?, CAPACITY_TOL));
    }
    let data = json!({
        "method": curve.method.tag(),
        "convex": fx.convex,
        "verdicts": verdicts,
        "symmetry_defect": curve.symmetry_defect(),
        "csv": curve.to_csv(),
    });
    Ok(Section { scope: fx.name.clone(), part: "profile", data, checks: rows })
}

/// Smallest slack of `inf_{[a,b]} I ≤ Cap₁(a,b) ≤ inf_{[a,b)} I` over a grid
/// of `(a, b)` pairs.
fn capacity_slack(m: &Measure1D) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for a in [0.1, 0.25, 0.4] {
        for b in [0.6, 0.75, 0.9] {
            let cap = profile::capacity_1d(m, a, b, CAPACITY_LEVELS)?;
            let (closed, open) = profile::capacity_sandwich(m, a, b, CAPACITY_LEVELS)?;
            worst = worst.min(cap - closed).min(open - cap);
        }
    }
    Ok(worst)
}

/// Members of the default family used for pointwise checks: coordinates,
/// the eigenfunction and an even subsample of the rest.
fn picks(fam: &concentration::TestFamily) -> Vec<usize> {
    let n = fam.members.len();
    let mut out: Vec<usize> = (0..n).filter(|&i| matches!(fam.members[i], LipschitzFunction::Coordinate(_))).collect();
    out.extend((0..n).step_by((n / 8).max(1)));
    out.push(n - 1);
    out.sort_unstable();
    out.dedup();
    out
}

pub fn inequality_section(fx: &Fixture, st: &Settings, c: &Constants, curve: Option<&ProfileCurve>) -> Result<Section> {
    let res = st.resolution(&fx.domain);
    let (space, fam) = constants::family(&fx.domain, &res)?;
    let w = space.weights();
    let mut rows = Vec::new();
    let mut young = [f64::INFINITY; 3];
    let mut pz = f64::INFINITY;
    let mut scale = 0.0f64;
    for i in picks(&fam) {
        let s = space.eval(&fam.members[i])?;
        if s.values.iter().all(|v| *v == s.values[0]) {
            continue;
        }
        scale = scale.max(s.values.iter().fold(0.0, |a, v| a.max(v.abs())));
        for (k, n) in [Young::L1, Young::L2, Young::Psi1].into_iter().enumerate() {
            let (a, b) = concentration::median_expectation_check(&s.values, w, n)?;
            young[k] = young[k].min(a).min(b);
        }
        let e = concentration::expectation(&s.values, w)?;
        let centred: Vec<f64> = s.values.iter().map(|v| v - e).collect();
        for th in PZ_THETAS {
            pz = pz.min(concentration::paley_zygmund_check(&centred, w, th)?);
        }
    }
    let tol = 1e-9 * (1.0 + scale);
    for (k, tag) in ["l1", "l2", "psi1"].iter().enumerate() {
        rows.push(CheckRow::explicit(format!("median_vs_mean_{tag}"), "median-mean comparison", young[k], tol));
    }
    rows.push(CheckRow::explicit("paley_zygmund", "Paley-Zygmund", pz, tol));

    // The last member is the eigenfunction; compare its Ψ₁ and L₁ norms.
    let eig = space.eval(&fam.members[fam.members.len() - 1])?;
    let e = concentration::expectation(&eig.values, w)?;
    let f0: Vec<f64> = eig.values.iter().map(|v| (v - e) / eig.lip).collect();
    let psi = concentration::psi1_l1_comparison(&f0, w, c.d_fm_median)?;
    if psi.skipped.is_none() {
        rows.push(CheckRow::tracked("psi1_over_l1", "Psi1-L1 comparison", psi.ratio));
    }

    let mono = [((1.0, 2.0), (2.0, f64::INFINITY)), ((1.0, 1.0), (2.0, 2.0))];
    let mut mono_data = Vec::new();
    for (a, b) in mono {
        let slack = concentration::pq_monotonicity_check(&space, &fam, a, b)?;
        mono_data.push(json!({"pq": [a.0, fmt_exp(a.1)], "pq2": [b.0, fmt_exp(b.1)], "slack": slack}));
        rows.push(CheckRow::explicit(
            format!("pq_monotone_{}_{}_to_{}_{}", a.0, fmt_exp(a.1), b.0, fmt_exp(b.1)),
            "exponent monotonicity",
            slack,
            1e-9 * (1.0 + slack.abs()),
        ));
    }

    let mut buser = Vec::new();
    if let Some(curve) = curve {
        for (p, q) in [(2.0, 2.0), (1.0, f64::INFINITY)] {
            let d = concentration::d_pq(&space, &fam, p, q)?.value;
            let slack = profile::buser_explicit_slack(curve, d, p, q)?;
            buser.push(json!({"p": p, "q": fmt_exp(q), "d_pq": d, "slack": slack}));
            rows.push(CheckRow::explicit(
                format!("buser_{}_{}", p, fmt_exp(q)),
                "explicit Buser endgame",
                slack,
                1e-12,
            ));
        }
    }

    let (borell, borell_tol) = borell_excess(fx, &space)?;
    rows.push(CheckRow::explicit("borell_tail", "Borell tail", -borell, borell_tol));

    let data = json!({
        "median_vs_mean": {"l1": young[0], "l2": young[1], "psi1": young[2]},
        "paley_zygmund": pz,
        "psi1_l1": psi,
        "pq_monotonicity": mono_data,
        "buser": buser,
        "borell_excess": borell,
        "borell_tol": borell_tol,
    });
    Ok(Section { scope: fx.name.clone(), part: "inequalities", data, checks: rows })
}

fn fmt_exp(q: f64) -> String {
    if q.is_infinite() {
        "inf".into()
    } else {
        format!("{q}")
    }
}

/// Radius about `x0` whose closed ball has mass at least `theta`.
fn mass_radius(mass: impl Fn(f64) -> f64, theta: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mass(mid) >= theta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

const BORELL_TS: [f64; 8] = [1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0];

/// Largest Borell tail excess and its tolerance. Exact tables are checked
/// to rounding; on grids a ball's mass moves by whole cells, so the excess
/// is compared with the mass of one cell layer around the ball.
fn borell_excess(fx: &Fixture, space: &Space) -> Result<(f64, f64)> {
    let mut worst = f64::NEG_INFINITY;
    if let Some(m) = fx.measure() {
        let x0 = m.quantile(0.5)?;
        let (a, b) = m.range();
        for th in BORELL_MASSES {
            let r = mass_radius(|r| m.interval_mass(x0 - r, x0 + r), th, b - a);
            worst = worst.max(measures::borell_tail_check(m, x0, r, &BORELL_TS)?);
        }
        return Ok((worst, 1e-9 + m.truncation_error()));
    }
    let q = Quadrature::new(space.dim(), space.points().to_vec(), space.weights().to_vec())?;
    let x0 = q.mean();
    let far = space
        .points()
        .iter()
        .map(|p| (0..space.dim()).map(|k| (p[k] - x0[k]).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let h = space.grid().map(|g| g.spacing()[0]).unwrap_or(0.0);
    let mut tol = 1e-9;
    for th in BORELL_MASSES {
        let r = mass_radius(|r| q.ball_mass(&x0, r), th, far);
        worst = worst.max(q.borell_tail_check(&x0, r, &BORELL_TS)?);
        // Mass of the shell of width one cell diagonal at every tested radius.
        let diag = h * (space.dim() as f64).sqrt();
        for t in BORELL_TS {
            let shell = q.ball_mass(&x0, t * r + diag) - q.ball_mass(&x0, (t * r - diag).max(0.0));
            tol = f64::max(tol, shell);
        }
    }
    Ok((worst, tol))
}

/// Semigroup estimates on a coarse grid of the fixture.
pub fn semigroup_section(fx: &Fixture, st: &Settings) -> Result<Section> {
    let d = &fx.domain;
    let ext = constants::extent(d);
    let cells = match st.h {
        Some(h) => (ext / h).ceil() as usize,
        None => HEAT_CELLS[(d.dim() - 1).min(2)],
    };
    let op = GridOperator::assemble(discretize(d, ext / cells as f64)?);
    let g = op.domain();
    let centre: Vec<f64> =
        (0..d.dim()).map(|k| g.centers().iter().zip(g.weights()).map(|(c, w)| w * c[k]).sum::<f64>()).collect();
    let mut fs: Vec<(String, Vec<f64>)> = (0..d.dim()).map(|k| (format!("x{k}"), g.sample(|x| x[k]))).collect();
    fs.push(("step".into(), g.sample(|x| if x[0] > centre[0] { 1.0 } else { -1.0 })));
    let mut rows = Vec::new();
    let mut table = Vec::new();
    let mut bl_worst = f64::INFINITY;
    let mut l1_worst = f64::INFINITY;
    let mut decay_worst = f64::INFINITY;
    for rel in HEAT_TIMES {
        let t = rel * ext * ext;
        for (name, f) in &fs {
            let smooth = name != "step";
            let bl = if smooth { Some(spectral::bakry_ledoux_check(&op, f, t)?) } else { None };
            let l1 = if smooth { Some(spectral::ledoux_l1_check(&op, f, t)?) } else { None };
            let dq2 = spectral::gradient_decay_check(&op, f, t, 2.0)?;
            let dqi = spectral::gradient_decay_check(&op, f, t, f64::INFINITY)?;
            if let Some(b) = &bl {
                bl_worst = bl_worst.min(b.tau - b.max_violation);
            }
            if let Some(l) = l1 {
                l1_worst = l1_worst.min(l);
            }
            decay_worst = decay_worst.min(dq2).min(dqi);
            table.push(
                json!({"f": name, "t": t, "bakry_ledoux": bl, "ledoux_l1": l1, "decay_q2": dq2, "decay_qinf": dqi}),
            );
        }
    }
    rows.push(CheckRow::explicit("bakry_ledoux", "reverse Poincaré for the semigroup", bl_worst, 0.0));
    rows.push(CheckRow::explicit("ledoux_l1", "Ledoux L1 smoothing", l1_worst, 1e-9));
    rows.push(CheckRow::explicit("gradient_decay", "semigroup gradient decay", decay_worst, 1e-9));
    let data = json!({"h": g.h(), "cells": op.len(), "rows": table});
    Ok(Section { scope: fx.name.clone(), part: "semigroup", data, checks: rows })
}

/// The non-log-concave control: zero profile at one half, failed
/// concavity, and total variation to the uniform measure below one.
pub fn negative_control_section(fx: &Fixture, curve: &ProfileCurve) -> Result<Section> {
    let m =
        fx.measure().ok_or_else(|| CliError::Config(format!("{}: negative control needs a 1-D measure", fx.name)))?;
    let half = curve.values[curve.index_of(0.5).ok_or(isogap::Error::Empty("t = 1/2 sample"))?];
    let defect = profile::concavity_check(curve, 1.0);
    let (a, b) = m.support();
    let tv = measures::tv_distance(m, &Measure1D::uniform(a, b)?)?;
    let slack = (ZERO_PROFILE - half).min(defect - CONCAVITY_TOL_1D).min(1.0 - tv.value - tv.err);
    let data = json!({"profile_half": half, "concavity_defect": defect, "tv_to_uniform": tv});
    Ok(Section {
        scope: fx.name.clone(),
        part: "negative_control",
        data,
        checks: vec![CheckRow::explicit("negative_control", "profile non-stability", slack, 0.0)],
    })
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<ConvexBody> {
    Ok(ConvexBody::boxed(vec![x0, y0], vec![x1, y1])?)
}

/// Going-up, push-forward, stability and geometric-distance checks on fixed
/// pairs of bodies and measures.
pub fn stability_section(st: &Settings) -> Result<Section> {
    let res = Resolution { cells_2d: 32, seed: st.seed, ..Resolution::default() };
    let mut rows = Vec::new();
    let mut data = serde_json::Map::new();

    let unit = ConvexBody::interval(0.0, 1.0)?;
    let sq = ConvexBody::unit_cube(2)?;
    let disk = ConvexBody::ball(vec![0.0, 0.0], 1.0)?;
    let half_disk = ConvexBody::intersection(disk.clone(), rect(-1.0, -1.0, 0.0, 1.0)?)?;
    let pairs = [
        ("interval_0.3", ConvexBody::interval(0.0, 0.3)?, unit.clone()),
        ("interval_0.7", ConvexBody::interval(0.0, 0.7)?, unit.clone()),
        ("half_square", rect(0.0, 0.0, 1.0, 0.5)?, sq.clone()),
        ("half_disk", half_disk.clone(), disk.clone()),
    ];
    let mut up = Vec::new();
    for (name, l, k) in &pairs {
        let g = stability::going_up_check(l, k, st.seed)?;
        for mut r in g.rows() {
            r.name = format!("{}_{name}", r.name);
            rows.push(r);
        }
        up.push(json!({"pair": name, "report": g}));
    }
    data.insert("going_up".into(), Value::Array(up));

    let mut limits = Vec::new();
    for v in [0.3, 0.6, 0.9] {
        let g = stability::going_up_limit_check(v, 16)?;
        let slack = if g.monotone { g.bound - g.last_error } else { -1.0 };
        rows.push(CheckRow::explicit(format!("going_up_limit_{v}"), "going-up iteration limit", slack, 0.0));
        limits.push(json!({"v": v, "report": g}));
    }
    data.insert("going_up_limit".into(), Value::Array(limits));

    let u = Measure1D::uniform(0.0, 1.0)?;
    let half = MonotoneMap::sample(|x| x / 2.0, 0.0, 1.0, 4)?;
    let sqrt = MonotoneMap::sample(|x| (1.0 + 3.0 * x).sqrt() - 1.0, 0.0, 1.0, 2000)?;
    let linear_density = Measure1D::from_potential(|y| -(1.0 + y).ln(), 0.0, 1.0, 8001)?;
    let mut push = Vec::new();
    for (name, t, target) in [("halving", &half, Measure1D::uniform(0.0, 0.5)?), ("sqrt", &sqrt, linear_density)] {
        let p = stability::pushforward_check(t, &u, &target)?;
        for mut r in p.rows() {
            r.name = format!("{}_{name}", r.name);
            rows.push(r);
        }
        push.push(json!({"map": name, "report": p}));
    }
    data.insert("pushforward".into(), Value::Array(push));

    let shifted = rect(0.1, 0.0, 1.1, 1.0)?;
    let s = stability::stability_theorem_report(&sq, &shifted, &res)?;
    rows.extend(s.checks.iter().cloned());
    data.insert("shifted_square".into(), serde_json::to_value(&s).expect("serializable"));

    let down = stability::going_down_report(&rect(0.0, 0.0, 1.0, 0.5)?, &sq, &res)?;
    rows.push(CheckRow::tracked("going_down_half_square", "going-down lemma", down.ratio));
    data.insert("going_down".into(), serde_json::to_value(&down).expect("serializable"));

    let mut slabs = Vec::new();
    for (s, g) in stability::slab_sweep(&[0.3, 0.5, 0.8])? {
        rows.push(CheckRow::tracked(format!("geometric_upper_{s}"), "geometric-distance stability", g.upper));
        rows.push(CheckRow::tracked(format!("geometric_lower_{s}"), "geometric-distance stability", g.lower));
        slabs.push(json!({"s": s, "report": g}));
    }
    data.insert("slabs".into(), Value::Array(slabs));

    let boxes = stability::circumscribing_box_sweep(&[1.5, 2.0, 4.0], st.seed)?;
    for b in &boxes {
        rows.push(CheckRow::explicit(format!("box_quadratic_{}", b.t), "going-up lemma", b.quadratic - 1.0, 1e-6));
    }
    data.insert("boxes".into(), serde_json::to_value(&boxes).expect("serializable"));

    let g = Measure1D::gaussian(0.0, 1.0)?;
    let mut tvs = Vec::new();
    for (name, a, b) in [
        ("uniform_0.8", u.clone(), Measure1D::uniform(0.0, 0.8)?),
        ("gaussian_shift", g.clone(), Measure1D::gaussian(0.5, 1.0)?),
    ] {
        let r = stability::tv_stability_report(&a, &b)?;
        rows.push(CheckRow::tracked(format!("tv_stability_{name}"), "stability in total variation", r.tracked));
        tvs.push(json!({"pair": name, "report": r}));
    }
    data.insert("tv".into(), Value::Array(tvs));

    Ok(Section { scope: "stability".into(), part: "stability", data: Value::Object(data), checks: rows })
}

/// The Neumann product identity and Cheeger tensorization on two-factor
/// product fixtures.
pub fn tensorization_section(fx: &Fixture, st: &Settings) -> Result<Option<Section>> {
    let Some([a, b]) = fx.factors() else { return Ok(None) };
    let res = st.resolution(&fx.domain);
    let t = stability::tensorization_check(a, b, &res)?;
    Ok(Some(Section {
        scope: fx.name.clone(),
        part: "tensorization",
        data: serde_json::to_value(&t).expect("serializable"),
        checks: t.rows(),
    }))
}

/// Full per-fixture pipeline of the verify suite.
pub fn fixture_sections(fx: &Fixture, st: &Settings) -> Result<Vec<Section>> {
    let curve = profile_curve(fx)?;
    if !fx.convex {
        let curve =
            curve.ok_or_else(|| CliError::Config(format!("{}: no profile for the negative control", fx.name)))?;
        return Ok(vec![profile_section(fx, &curve, &[1.0])?, negative_control_section(fx, &curve)?]);
    }
    let (cs, c) = constants_section(fx, st)?;
    let mut out = vec![cs, bounds_section(fx, st, &c)?];
    if let Some(curve) = &curve {
        let powers: &[f64] = if curve.method == profile::Method::Cutsearch2d { &[1.0, 2.0] } else { &[1.0] };
        out.push(profile_section(fx, curve, powers)?);
    }
    out.push(inequality_section(fx, st, &c, curve.as_ref())?);
    out.push(semigroup_section(fx, st)?);
    if let Some(t) = tensorization_section(fx, st)? {
        out.push(t);
    }
    Ok(out)
}
