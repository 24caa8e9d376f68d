//! Classical lower bounds on the isoperimetric constants, evaluated as
//! numbers and compared with measured values.
//!
//! Explicit checks carry a stated constant and must hold within tolerance.
//! Bounds whose constant is unnamed are only tracked as ratios.

use std::f64::consts::PI;

use serde::Serialize;

use crate::concentration::Space;
use crate::constants::{self, Constants, Resolution};
use crate::error::{Error, Result};
use crate::geometry::{self, nets, ConvexBody};
use crate::linalg;
use crate::report::CheckRow;
use crate::spectral::Domain;

/// Slack tolerance on the Payne-Weinberger comparison. The interval attains
/// equality and the measured gap carries the Richardson error.
pub const PW_TOL: f64 = 1e-3;
pub const FM_TOL: f64 = 1e-6;
/// Levels and shrink factor of the x₀ search.
pub const X0_LEVELS: usize = 3;
pub const X0_SHRINK: f64 = 4.0;
const X0_HALF_POINTS: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayneWeinberger {
    pub diameter: f64,
    pub bound: f64,
    pub d_poin: f64,
    pub slack: f64,
}

/// `D_Poin - π/diam` for the uniform measure on `body`.
pub fn payne_weinberger_check(body: &ConvexBody, d_poin: f64) -> PayneWeinberger {
    let diameter = geometry::diameter(body).value;
    let bound = PI / diameter;
    PayneWeinberger { diameter, bound, d_poin, slack: d_poin - bound }
}

/// `∫|x - x₀| dμ` on a weighted point set.
pub fn first_moment(space: &Space, x0: &[f64]) -> f64 {
    space.points().iter().zip(space.weights()).map(|(p, w)| w * dist(p, x0, space.dim())).sum()
}

fn dist(p: &[f64; 3], x0: &[f64], dim: usize) -> f64 {
    (0..dim).map(|k| (p[k] - x0[k]).powi(2)).sum::<f64>().sqrt()
}

fn mean(space: &Space) -> Vec<f64> {
    let d = space.dim();
    let mut m = vec![0.0; d];
    for (p, w) in space.points().iter().zip(space.weights()) {
        for k in 0..d {
            m[k] += w * p[k];
        }
    }
    m
}

fn covariance(space: &Space) -> linalg::Mat {
    let d = space.dim();
    let m = mean(space);
    let mut c = vec![vec![0.0; d]; d];
    for (p, w) in space.points().iter().zip(space.weights()) {
        for i in 0..d {
            for j in 0..d {
                c[i][j] += w * (p[i] - m[i]) * (p[j] - m[j]);
            }
        }
    }
    c
}

/// Square root of the largest covariance eigenvalue.
pub fn sigma1(space: &Space) -> f64 {
    let (vals, _) = linalg::jacobi_eigen(&covariance(space));
    vals.into_iter().fold(0.0, f64::max).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstMoment {
    pub x0: Vec<f64>,
    pub moment: f64,
    /// `1 / (2 ∫|x - x₀| dμ)` at the best grid point.
    pub bound: f64,
    pub d_fm: f64,
    pub slack: f64,
}

/// Minimizes `∫|x - x₀| dμ` over a grid of `x₀` started at the mean and
/// refined `X0_LEVELS` times, then compares `1/(2∫|x - x₀|)` with `d_fm`.
pub fn first_moment_bound_check(space: &Space, d_fm: f64) -> Result<FirstMoment> {
    if space.is_empty() {
        return Err(Error::Empty("first-moment points"));
    }
    let d = space.dim();
    let cov = covariance(space);
    let spread = (0..d).map(|k| cov[k][k]).fold(0.0, f64::max).sqrt();
    let mut best = mean(space);
    let mut best_val = first_moment(space, &best);
    let mut step = spread / X0_HALF_POINTS as f64;
    let side = (2 * X0_HALF_POINTS + 1) as usize;
    for _ in 0..X0_LEVELS {
        let center = best.clone();
        for idx in 0..side.pow(d as u32) {
            let mut r = idx;
            let x: Vec<f64> = (0..d)
                .map(|k| {
                    let o = (r % side) as i32 - X0_HALF_POINTS;
                    r /= side;
                    center[k] + o as f64 * step
                })
                .collect();
            let v = first_moment(space, &x);
            if v < best_val {
                best_val = v;
                best = x;
            }
        }
        step /= X0_SHRINK;
    }
    if !(best_val > 0.0) {
        return Err(Error::Degenerate("first moment vanishes".into()));
    }
    let bound = 0.5 / best_val;
    Ok(FirstMoment { x0: best, moment: best_val, bound, d_fm, slack: d_fm - bound })
}

/// `∫ 2√(R² - |x - x₀|²) dμ`: the mean length of the longest chord of the
/// ball centred at each point.
pub fn kls2_value(space: &Space, x0: &[f64], radius: f64) -> Result<f64> {
    if x0.len() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: x0.len() });
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("ball radius {radius}")));
    }
    let mut acc = 0.0;
    for (p, w) in space.points().iter().zip(space.weights()) {
        let r = dist(p, x0, space.dim());
        if r > radius * (1.0 + 1e-9) {
            return Err(Error::Precondition(format!("support point at distance {r} outside ball of radius {radius}")));
        }
        acc += w * 2.0 * (radius * radius - r * r).max(0.0).sqrt();
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BobkovBranch {
    /// `E ≥ 2S`: the measure is compared with its restriction to the ball.
    Ball,
    /// `E < 2S`: the support diameter is controlled by `S` directly.
    SmallMean,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bobkov {
    pub x0: Vec<f64>,
    /// `E|x - x₀|`.
    pub e: f64,
    /// Standard deviation of `|x - x₀|`.
    pub s: f64,
    pub var_sq: f64,
    pub ball_radius: f64,
    pub ball_mass: f64,
    /// Total variation between the measure and its normalized restriction
    /// to the ball, `1 - μ(B)`.
    pub tv: f64,
    pub by_es: f64,
    pub by_var: f64,
    pub branch: BobkovBranch,
    /// Mass lost to truncation of the underlying table, added to the
    /// reported fourth-moment error.
    pub truncation: f64,
}

impl Bobkov {
    /// Chebyshev gives `μ(B) ≥ 3/4`.
    pub fn ball_slack(&self) -> f64 {
        self.ball_mass - 0.75
    }
}

pub fn bobkov_bound(space: &Space, x0: &[f64], truncation: f64) -> Result<Bobkov> {
    if x0.len() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: x0.len() });
    }
    let d = space.dim();
    let w = space.weights();
    let r: Vec<f64> = space.points().iter().map(|p| dist(p, x0, d)).collect();
    let e: f64 = r.iter().zip(w).map(|(r, w)| w * r).sum();
    let m2: f64 = r.iter().zip(w).map(|(r, w)| w * r * r).sum();
    let m4: f64 = r.iter().zip(w).map(|(r, w)| w * r.powi(4)).sum();
    let s = (m2 - e * e).max(0.0).sqrt();
    let var_sq = (m4 - m2 * m2).max(0.0);
    if ![e, m2, m4].iter().all(|v| v.is_finite()) {
        return Err(Error::Divergent("moments of |x - x0|".into()));
    }
    if !(e > 0.0 && s > 0.0 && var_sq > 0.0) {
        return Err(Error::Degenerate("|x - x0| is constant".into()));
    }
    let ball_radius = e + 2.0 * s;
    let tol = 1e-12 * (1.0 + ball_radius);
    let ball_mass: f64 = r.iter().zip(w).filter(|(r, _)| **r <= ball_radius + tol).map(|(_, w)| w).sum();
    Ok(Bobkov {
        x0: x0.to_vec(),
        e,
        s,
        var_sq,
        ball_radius,
        ball_mass,
        tv: (1.0 - ball_mass).max(0.0),
        by_es: 1.0 / (e * s).sqrt(),
        by_var: var_sq.powf(-0.25),
        branch: if e >= 2.0 * s { BobkovBranch::Ball } else { BobkovBranch::SmallMean },
        truncation,
    })
}

pub fn kls_ratio(d_che: f64, space: &Space) -> f64 {
    d_che * sigma1(space)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Kls2 {
    pub center: Vec<f64>,
    pub radius: f64,
    pub value: f64,
    /// `D_Che · ∫θ_B dμ`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub payne_weinberger: Option<PayneWeinberger>,
    pub first_moment: FirstMoment,
    pub kls2: Option<Kls2>,
    pub bobkov: Bobkov,
    pub bobkov_ratio_es: f64,
    pub bobkov_ratio_var: f64,
    pub sigma1: f64,
    pub kls_ratio: f64,
    /// First-moment bound over the `1/√(ES)` value.
    pub fm_over_bobkov: f64,
}

impl BoundsReport {
    pub fn rows(&self) -> Vec<CheckRow> {
        let mut rows = Vec::new();
        if let Some(pw) = &self.payne_weinberger {
            rows.push(CheckRow::explicit("payne_weinberger", "Payne-Weinberger", pw.slack, PW_TOL));
        }
        rows.push(CheckRow::explicit(
            "first_moment_half",
            "first-moment bound",
            self.first_moment.slack,
            FM_TOL * self.first_moment.d_fm.max(1.0),
        ));
        rows.push(CheckRow::explicit("bobkov_ball_mass", "Chebyshev ball mass", self.bobkov.ball_slack(), 1e-9));
        if let Some(k) = &self.kls2 {
            rows.push(CheckRow::tracked("kls2_ratio", "chord-length bound", k.ratio));
        }
        rows.push(CheckRow::tracked("bobkov_es_ratio", "Bobkov variance bound", self.bobkov_ratio_es));
        rows.push(CheckRow::tracked("bobkov_var_ratio", "Bobkov variance bound", self.bobkov_ratio_var));
        rows.push(CheckRow::tracked("kls_ratio", "KLS ratio", self.kls_ratio));
        rows.push(CheckRow::tracked("fm_over_bobkov", "first-moment vs Bobkov", self.fm_over_bobkov));
        rows
    }
}

/// Centre and radius of a ball containing the support, when it is bounded.
pub fn enclosing_ball(domain: &Domain) -> Option<(Vec<f64>, f64)> {
    match domain {
        Domain::Body(b) => {
            let (lo, hi) = b.bounding_box();
            let c: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
            Some((c.clone(), body_radius(b, &c)))
        }
        Domain::Measure(m) => {
            let (a, b) = m.support();
            (a.is_finite() && b.is_finite() && m.truncation_error() == 0.0)
                .then(|| (vec![0.5 * (a + b)], 0.5 * (b - a)))
        }
        Domain::Product(_) => None,
    }
}

/// `max_{y ∈ K} |y - c|` from the support function over a direction net,
/// inflated by the net's angular resolution so it never undershoots.
fn body_radius(b: &ConvexBody, c: &[f64]) -> f64 {
    let d = b.dim();
    if d == 1 {
        return (b.support(&[1.0]) - c[0]).max(b.support(&[-1.0]) + c[0]);
    }
    if let geometry::Shape::Ball { center, radius } = b.shape() {
        let off: f64 = center.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        return off + radius;
    }
    let count = if d == 2 { nets::NET_2D } else { nets::NET_3D };
    let net = nets::direction_net(d, count);
    let best = net.iter().map(|u| b.support(u) - u.iter().zip(c).map(|(a, b)| a * b).sum::<f64>()).fold(0.0, f64::max);
    // Covering angle of the net, generous in 3-D.
    let angle = if d == 2 { PI / count as f64 } else { 2.0 * (4.0 / count as f64).sqrt() };
    best / angle.cos()
}

fn truncation(domain: &Domain) -> f64 {
    match domain {
        Domain::Measure(m) => m.truncation_error(),
        Domain::Product(f) => f.iter().map(truncation).sum(),
        Domain::Body(_) => 0.0,
    }
}

/// Evaluates every bound for `domain` against its measured constants.
pub fn report(domain: &Domain, c: &Constants, res: &Resolution) -> Result<BoundsReport> {
    let space = Space::for_domain(domain, res.h(domain))?;
    let payne_weinberger = match domain {
        Domain::Body(b) => Some(payne_weinberger_check(b, c.d_poin)),
        Domain::Measure(m) if m.truncation_error() == 0.0 && m.is_uniform() => {
            let (a, b) = m.support();
            Some(payne_weinberger_check(&ConvexBody::interval(a, b)?, c.d_poin))
        }
        _ => None,
    };
    let first_moment = first_moment_bound_check(&space, c.d_fm)?;
    let kls2 = match enclosing_ball(domain) {
        Some((center, radius)) => {
            let value = kls2_value(&space, &center, radius)?;
            Some(Kls2 { center, radius, value, ratio: c.d_che * value })
        }
        None => None,
    };
    let bobkov = bobkov_bound(&space, &first_moment.x0, truncation(domain))?;
    let s1 = sigma1(&space);
    Ok(BoundsReport {
        payne_weinberger,
        bobkov_ratio_es: c.d_che / bobkov.by_es,
        bobkov_ratio_var: c.d_che / bobkov.by_var,
        fm_over_bobkov: first_moment.bound / bobkov.by_es,
        first_moment,
        kls2,
        bobkov,
        sigma1: s1,
        kls_ratio: c.d_che * s1,
    })
}

/// Convenience wrapper computing the constants first.
pub fn report_for(domain: &Domain, res: &Resolution) -> Result<(Constants, BoundsReport)> {
    let c = constants::compute(domain, res)?;
    let r = report(domain, &c, res)?;
    Ok((c, r))
}
