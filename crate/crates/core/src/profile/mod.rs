//! Isoperimetric profiles.
//!
//! In one dimension the profile of a log-concave measure is attained by
//! half-lines, so `I(t) = min(rho(F^-1(t)), rho(F^-1(1-t)))` is exact up to
//! table interpolation. In the plane only upper bounds are produced, by a
//! search over straight chords and circular arcs (see [`cut2d`]).

pub mod cut2d;

pub use cut2d::{curve_2d, profile_2d_upper, CutFamily};

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, CutCurve};
use crate::measures::Measure1D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact1d,
    Cutsearch2d,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Exact1d => "exact1d",
            Method::Cutsearch2d => "cutsearch2d",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum Minimizer {
    /// `(-inf, x]` when `left`, else `[x, inf)`.
    HalfLine {
        endpoint: f64,
        left: bool,
    },
    Cut(CutCurve),
}

impl std::fmt::Display for Minimizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Minimizer::HalfLine { endpoint, left: true } => write!(f, "halfline(-inf;{endpoint:.9})"),
            Minimizer::HalfLine { endpoint, left: false } => write!(f, "halfline({endpoint:.9};inf)"),
            Minimizer::Cut(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ProfileCurve {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub err: Vec<f64>,
    pub minimizers: Vec<Minimizer>,
    pub method: Method,
}

/// `{0.01, 0.02, ..., 0.99}`, which contains 1/2 exactly.
pub fn default_t_grid() -> Vec<f64> {
    (1..100).map(|k| k as f64 / 100.0).collect()
}

impl ProfileCurve {
    /// Index of the sample at `t`, if any.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.t.iter().position(|s| (s - t).abs() <= 1e-12)
    }

    /// Profile value at `t`, linearly interpolated between samples.
    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.t.partition_point(|s| *s < t);
        if k == 0 {
            return self.values[0];
        }
        if k >= self.t.len() {
            return self.values[self.t.len() - 1];
        }
        let (t0, t1) = (self.t[k - 1], self.t[k]);
        let w = (t - t0) / (t1 - t0);
        self.values[k - 1] * (1.0 - w) + self.values[k] * w
    }

    /// `Ĩ(t) = min(I(t), I(1-t))` at every sample.
    pub fn symmetrized(&self) -> Vec<f64> {
        self.t
            .iter()
            .zip(&self.values)
            .map(|(t, v)| {
                let other = match self.index_of(1.0 - t) {
                    Some(j) => self.values[j],
                    None => self.value_at(1.0 - t),
                };
                v.min(other)
            })
            .collect()
    }

    /// Largest `|I(t) - I(1-t)|` over samples whose mirror is sampled.
    pub fn symmetry_defect(&self) -> f64 {
        self.t
            .iter()
            .enumerate()
            .filter_map(|(i, t)| self.index_of(1.0 - t).map(|j| (self.values[i] - self.values[j]).abs()))
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,I,err,method,minimizer\n");
        for i in 0..self.t.len() {
            s.push_str(&format!(
                "{:.6},{:.12e},{:.3e},{},{}\n",
                self.t[i],
                self.values[i],
                self.err[i],
                self.method.tag(),
                self.minimizers[i]
            ));
        }
        s
    }
}

/// Exact one-dimensional profile value and the minimizing half-line. A flat
/// stretch of the CDF at level `t` gives a set with zero boundary measure.
pub fn profile_1d(m: &Measure1D, t: f64) -> Result<(f64, Minimizer, f64)> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidArgument(format!("profile level {t} outside (0,1)")));
    }
    let side = |level: f64| -> Result<(f64, f64, f64)> {
        let (lo, hi) = m.quantile_range(level)?;
        if hi - lo > 1e-12 * (1.0 + lo.abs()) {
            let mid = 0.5 * (lo + hi);
            return Ok((m.density(mid), mid, 0.0));
        }
        Ok((m.density(lo), lo, m.density_error(lo)))
    };
    let (dl, xl, el) = side(t)?;
    let (dr, xr, er) = side(1.0 - t)?;
    Ok(if dl <= dr {
        (dl, Minimizer::HalfLine { endpoint: xl, left: true }, el)
    } else {
        (dr, Minimizer::HalfLine { endpoint: xr, left: false }, er)
    })
}

pub fn curve_1d(m: &Measure1D, ts: &[f64]) -> Result<ProfileCurve> {
    let mut c = ProfileCurve {
        t: Vec::with_capacity(ts.len()),
        values: Vec::with_capacity(ts.len()),
        err: Vec::with_capacity(ts.len()),
        minimizers: Vec::with_capacity(ts.len()),
        method: Method::Exact1d,
    };
    for &t in ts {
        let (v, mz, e) = profile_1d(m, t)?;
        c.t.push(t);
        c.values.push(v);
        c.err.push(e);
        c.minimizers.push(mz);
    }
    Ok(c)
}

/// `2 Ĩ(1/2)` when `convex` (concave profile), else `inf_{t <= 1/2} Ĩ(t)/t`
/// over the samples.
pub fn cheeger_constant(curve: &ProfileCurve, convex: bool) -> Result<f64> {
    let tilde = curve.symmetrized();
    if convex {
        let i = curve.index_of(0.5).ok_or_else(|| Error::Precondition("profile curve lacks t = 1/2".into()))?;
        return Ok(2.0 * tilde[i]);
    }
    let v = curve
        .t
        .iter()
        .zip(&tilde)
        .filter(|(t, _)| **t <= 0.5 + 1e-12)
        .map(|(t, v)| v / t)
        .fold(f64::INFINITY, f64::min);
    if v.is_infinite() {
        return Err(Error::Empty("profile samples with t <= 1/2"));
    }
    Ok(v)
}

/// Cheeger constant of the uniform measure on a body of dimension 1 or 2.
pub fn cheeger_body(body: &ConvexBody) -> Result<f64> {
    match body.dim() {
        1 => {
            let (lo, hi) = body.bounding_box();
            Ok(2.0 / (hi[0] - lo[0]))
        }
        2 => Ok(2.0 * profile_2d_upper(body, 0.5, &CutFamily::default())?.value),
        d => Err(Error::InvalidArgument(format!("no profile computation in dimension {d}"))),
    }
}

/// Largest discrete convexity defect of `I^power` over consecutive sample
/// triples; zero for a concave curve.
pub fn concavity_check(curve: &ProfileCurve, power: f64) -> f64 {
    let n = curve.t.len();
    let j: Vec<f64> = curve.values.iter().map(|v| v.max(0.0).powf(power)).collect();
    let mut worst = 0.0f64;
    for i in 1..n.saturating_sub(1) {
        let (t0, t1, t2) = (curve.t[i - 1], curve.t[i], curve.t[i + 1]);
        let w = (t1 - t0) / (t2 - t0);
        let chord = j[i - 1] * (1.0 - w) + j[i + 1] * w;
        worst = worst.max(chord - j[i]);
    }
    worst
}

/// One-capacity `Cap_1(a, b)`: the least `∫|Φ'| dμ` over monotone
/// piecewise-linear `Φ` with plateaus `{Φ = 1}` of mass at least `a` and
/// `{Φ = 0}` of mass at least `1 - b`. The ramp's two knots range over a
/// quantile grid of `levels` points; both orientations are tried.
pub fn capacity_1d(m: &Measure1D, a: f64, b: f64, levels: usize) -> Result<f64> {
    if !(a > 0.0 && b < 1.0 && a < b) {
        return Err(Error::InvalidArgument(format!("need 0 < a < b < 1, got a={a}, b={b}")));
    }
    let ramp = |lo: f64, hi: f64| -> Result<f64> {
        let mut best = f64::INFINITY;
        let mut prev = (lo, m.quantile_range(lo)?.1);
        for k in 1..=levels {
            let t = lo + (hi - lo) * k as f64 / levels as f64;
            let x = if k == levels { m.quantile_range(t)?.0 } else { m.quantile(t)? };
            if x > prev.1 {
                best = best.min((t - prev.0) / (x - prev.1));
            }
            prev = (t, x);
        }
        Ok(best)
    };
    // Φ = 1 on the left: the ramp sits between levels a and b of F. Φ = 1 on
    // the right: between levels 1 - b and 1 - a.
    Ok(ramp(a, b)?.min(ramp(1.0 - b, 1.0 - a)?))
}

/// `inf_{a <= t <= b} I(t)` and `inf_{a <= t < b} I(t)` on a fine grid, the
/// two sides of the capacity sandwich.
pub fn capacity_sandwich(m: &Measure1D, a: f64, b: f64, levels: usize) -> Result<(f64, f64)> {
    let mut closed = f64::INFINITY;
    let mut open = f64::INFINITY;
    for k in 0..=levels {
        let t = a + (b - a) * k as f64 / levels as f64;
        let v = profile_1d(m, t)?.0;
        closed = closed.min(v);
        if k < levels {
            open = open.min(v);
        }
    }
    Ok((closed, open))
}

/// Smallest slack `Ĩ(t) - D/(8·2^r) t^r` over samples `t <= 1/2`, with
/// `r = 1 + 1/p - 1/q`. Requires `1/2 <= r <= 2`.
pub fn buser_explicit_slack(curve: &ProfileCurve, d_pq: f64, p: f64, q: f64) -> Result<f64> {
    let r = 1.0 + 1.0 / p - 1.0 / q;
    if !(0.5..=2.0).contains(&r) {
        return Err(Error::Precondition(format!("exponent r = {r} outside [1/2, 2]")));
    }
    let c = d_pq / (8.0 * 2f64.powf(r));
    let tilde = curve.symmetrized();
    Ok(curve
        .t
        .iter()
        .zip(&tilde)
        .filter(|(t, _)| **t <= 0.5 + 1e-12)
        .map(|(t, v)| v - c * t.powf(r))
        .fold(f64::INFINITY, f64::min))
}

pub fn buser_explicit_check(curve: &ProfileCurve, d_pq: f64, p: f64, q: f64) -> Result<bool> {
    Ok(buser_explicit_slack(curve, d_pq, p, q)? >= -1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn phi(x: f64) -> f64 {
        (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
    }

    #[test]
    fn one_dimensional_values() {
        let u = Measure1D::uniform(0.0, 1.0).unwrap();
        for t in [0.1, 0.5, 0.93] {
            assert!((profile_1d(&u, t).unwrap().0 - 1.0).abs() < 1e-12);
        }
        let g = Measure1D::gaussian(0.0, 1.0).unwrap();
        assert!((profile_1d(&g, 0.5).unwrap().0 - phi(0.0)).abs() < 1e-6);
        let l = Measure1D::laplace(0.0, 1.0).unwrap();
        assert!((profile_1d(&l, 0.25).unwrap().0 - 0.25).abs() < 1e-9);
        assert!(profile_1d(&u, 1.0).is_err());
    }

    #[test]
    fn cheeger_values() {
        let ts = default_t_grid();
        let u = curve_1d(&Measure1D::uniform(0.0, 1.0).unwrap(), &ts).unwrap();
        assert!((cheeger_constant(&u, true).unwrap() - 2.0).abs() < 1e-12);
        let g = curve_1d(&Measure1D::gaussian(0.0, 1.0).unwrap(), &ts).unwrap();
        assert!((cheeger_constant(&g, true).unwrap() - (2.0 / PI).sqrt()).abs() < 1e-6);
        // Concave profiles: the two formulas agree.
        assert!((cheeger_constant(&g, false).unwrap() - cheeger_constant(&g, true).unwrap()).abs() < 1e-9);
        let partial = curve_1d(&Measure1D::uniform(0.0, 1.0).unwrap(), &[0.1, 0.2]).unwrap();
        assert!(cheeger_constant(&partial, true).is_err());
    }

    #[test]
    fn concavity_examples() {
        let ts = default_t_grid();
        let u = curve_1d(&Measure1D::uniform(0.0, 1.0).unwrap(), &ts).unwrap();
        assert_eq!(concavity_check(&u, 1.0), 0.0);
        let g = curve_1d(&Measure1D::gaussian(0.0, 1.0).unwrap(), &ts).unwrap();
        assert!(concavity_check(&g, 1.0) <= 1e-6);
        assert!(g.symmetry_defect() <= 1e-9);
        let c = curve_1d(&Measure1D::gap_counterexample(3, true).unwrap(), &ts).unwrap();
        let i = c.index_of(0.5).unwrap();
        assert!(c.values[i] <= 1e-6);
        assert!(concavity_check(&c, 1.0) > 1.0);
    }

    #[test]
    fn capacity_examples() {
        let u = Measure1D::uniform(0.0, 1.0).unwrap();
        assert!((capacity_1d(&u, 0.3, 0.7, 400).unwrap() - 1.0).abs() < 1e-9);
        let g = Measure1D::gaussian(0.0, 1.0).unwrap();
        let want = phi(-0.253_347_103_135_799_7);
        let cap = capacity_1d(&g, 0.4, 0.6, 2000).unwrap();
        assert!((cap - want).abs() < 1e-4, "{cap} vs {want}");
        let l = Measure1D::laplace(0.0, 1.0).unwrap();
        assert!((capacity_1d(&l, 0.2, 0.5, 2000).unwrap() - 0.2).abs() < 1e-4);
        let (lo, hi) = capacity_sandwich(&g, 0.4, 0.6, 2000).unwrap();
        assert!(lo - 1e-4 <= cap && cap <= hi + 1e-4);
        assert!(capacity_1d(&u, 0.6, 0.4, 10).is_err());
    }

    #[test]
    fn buser_examples() {
        let ts = default_t_grid();
        let u = curve_1d(&Measure1D::uniform(0.0, 1.0).unwrap(), &ts).unwrap();
        assert!(buser_explicit_check(&u, PI, 2.0, 2.0).unwrap());
        assert!(buser_explicit_check(&u, 4.0, 1.0, f64::INFINITY).unwrap());
        let g = curve_1d(&Measure1D::gaussian(0.0, 1.0).unwrap(), &ts).unwrap();
        assert!(buser_explicit_check(&g, 1.0, 2.0, 2.0).unwrap());
        // r = 1 + 1/4 - 1 = 1/4 is outside the admissible range.
        assert!(buser_explicit_check(&u, 1.0, 4.0, 1.0).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let u = curve_1d(&Measure1D::uniform(0.0, 1.0).unwrap(), &[0.25, 0.5]).unwrap();
        let csv = u.to_csv();
        assert!(csv.starts_with("t,I,err,method,minimizer\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
