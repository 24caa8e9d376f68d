//! Cut search for planar bodies: straight chords and circular arcs centred on
//! the boundary. Every value is the length of an actual cut divided by the
//! area, so it bounds the profile from above.

use rayon::prelude::*;

use super::{Method, Minimizer, ProfileCurve};
use crate::error::{Error, Result};
use crate::geometry::polygon::{Polygon, P2};
use crate::geometry::{self, ConvexBody, CutCurve};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutFamily {
    /// Chord directions, evenly spaced over a half turn.
    pub angles: usize,
    /// Arc centres spaced evenly by arclength, in addition to every corner.
    pub anchors: usize,
    /// Vertex count used for curved boundaries.
    pub polygon_vertices: usize,
}

impl Default for CutFamily {
    fn default() -> Self {
        CutFamily { angles: 360, anchors: 100, polygon_vertices: 512 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutEstimate {
    pub value: f64,
    pub err: f64,
    pub cut: CutCurve,
}

/// Interior angles below this count as corners.
const CORNER: f64 = std::f64::consts::PI - 0.01;
const NEWTON_TOL: f64 = 1e-12;

struct Prepared {
    poly: Polygon,
    area: f64,
    /// Relative discrepancy between the polygon area and the body volume.
    area_defect: f64,
    anchors: Vec<P2>,
    directions: Vec<P2>,
}

fn prepare(body: &ConvexBody, family: &CutFamily) -> Result<Prepared> {
    if body.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: body.dim() });
    }
    if family.angles == 0 {
        return Err(Error::InvalidArgument("cut family needs at least one direction".into()));
    }
    let poly = body.to_polygon(family.polygon_vertices.max(8))?;
    let area = poly.area();
    if !(area > 0.0) {
        return Err(Error::Degenerate("polygon of zero area".into()));
    }
    let area_defect = if body.has_exact_volume() {
        let v = geometry::volume(body, 0)?.value;
        (area - v).abs() / v
    } else {
        0.0
    };
    let mut anchors: Vec<P2> =
        poly.interior_angles().iter().zip(&poly.verts).filter(|(a, _)| **a < CORNER).map(|(_, v)| *v).collect();
    let k = poly.len();
    let per = poly.perimeter();
    let mut edge = 0usize;
    let mut walked = 0.0;
    for j in 0..family.anchors {
        let target = per * j as f64 / family.anchors as f64;
        loop {
            let a = poly.verts[edge];
            let b = poly.verts[(edge + 1) % k];
            let len = (b[0] - a[0]).hypot(b[1] - a[1]);
            if target <= walked + len || edge + 1 == k {
                let s = ((target - walked) / len).clamp(0.0, 1.0);
                anchors.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
                break;
            }
            walked += len;
            edge += 1;
        }
    }
    let directions = (0..family.angles)
        .map(|i| {
            let a = std::f64::consts::PI * i as f64 / family.angles as f64;
            [a.cos(), a.sin()]
        })
        .collect();
    Ok(Prepared { poly, area, area_defect, anchors, directions })
}

/// Best chord in direction `u` cutting off area `target` below it, as
/// `(length, level)`. The chord width is linear between vertex levels, so the
/// area below a level is piecewise quadratic and solved in closed form.
fn best_line(poly: &Polygon, u: P2, target: f64) -> (f64, f64) {
    let mut levels: Vec<f64> = poly.verts.iter().map(|v| u[0] * v[0] + u[1] * v[1]).collect();
    levels.sort_by(|a, b| a.total_cmp(b));
    levels.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    let (lo, hi) = (levels[0], levels[levels.len() - 1]);
    let reach = 2.0 * (hi - lo) + 1.0 + poly.verts.iter().map(|v| v[0].abs() + v[1].abs()).fold(0.0, f64::max);
    let width = |s: f64| {
        let base = [s * u[0], s * u[1]];
        poly.segment_inside(
            [base[0] + reach * u[1], base[1] - reach * u[0]],
            [base[0] - reach * u[1], base[1] + reach * u[0]],
        )
    };
    let mut acc = 0.0;
    for w in levels.windows(2) {
        let d = w[1] - w[0];
        // Sample strictly inside the slab and extrapolate: exact for a linear
        // width, and immune to edges lying along the sampling line.
        let a = width(w[0] + d / 3.0);
        let b = width(w[0] + 2.0 * d / 3.0);
        let wl = (2.0 * a - b).max(0.0);
        let wr = (2.0 * b - a).max(0.0);
        let slab = 0.5 * (wl + wr) * d;
        if acc + slab >= target {
            let need = target - acc;
            // wl x + (wr - wl) x^2 / (2d) = need
            let k = (wr - wl) / (2.0 * d);
            let x = if k.abs() < 1e-300 {
                need / wl.max(1e-300)
            } else {
                let disc = (wl * wl + 4.0 * k * need).max(0.0);
                2.0 * need / (wl + disc.sqrt())
            };
            let x = x.clamp(0.0, d);
            return (wl + (wr - wl) * x / d, w[0] + x);
        }
        acc += slab;
    }
    (0.0, hi)
}

/// Radius about `c` whose disk covers area `target`, by Newton's method
/// safeguarded with bisection.
fn arc_radius(poly: &Polygon, c: P2, target: f64) -> f64 {
    let rmax = poly.verts.iter().map(|v| (v[0] - c[0]).hypot(v[1] - c[1])).fold(0.0, f64::max);
    let (mut lo, mut hi) = (0.0, rmax);
    let mut r = (target / std::f64::consts::PI).sqrt().min(0.5 * rmax);
    for _ in 0..100 {
        let g = poly.disk_intersection_area(c, r) - target;
        if g.abs() <= NEWTON_TOL * target.max(1e-300) {
            break;
        }
        if g > 0.0 {
            hi = r;
        } else {
            lo = r;
        }
        let dg = poly.circle_inside_length(c, r);
        let step = if dg > 0.0 { r - g / dg } else { f64::NAN };
        r = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if hi - lo <= 1e-15 * rmax {
            break;
        }
    }
    r
}

fn search(p: &Prepared, t: f64) -> Result<CutEstimate> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidArgument(format!("profile level {t} outside (0,1)")));
    }
    let a = p.area;
    let lines: Vec<(f64, CutCurve)> = p
        .directions
        .par_iter()
        .map(|u| {
            let (l1, s1) = best_line(&p.poly, *u, t * a);
            let (l2, s2) = best_line(&p.poly, *u, (1.0 - t) * a);
            if l1 <= l2 {
                (l1, CutCurve::Line { normal: *u, offset: s1 })
            } else {
                (l2, CutCurve::Line { normal: [-u[0], -u[1]], offset: -s2 })
            }
        })
        .collect();
    let arcs: Vec<(f64, CutCurve)> = p
        .anchors
        .par_iter()
        .map(|c| {
            let r1 = arc_radius(&p.poly, *c, t * a);
            let r2 = arc_radius(&p.poly, *c, (1.0 - t) * a);
            let l1 = p.poly.circle_inside_length(*c, r1);
            let l2 = p.poly.circle_inside_length(*c, r2);
            if l1 <= l2 {
                (l1, CutCurve::Arc { center: *c, radius: r1, inside: true })
            } else {
                (l2, CutCurve::Arc { center: *c, radius: r2, inside: false })
            }
        })
        .collect();
    let (len, cut) = lines
        .into_iter()
        .chain(arcs)
        .filter(|(l, _)| *l > 0.0)
        .fold((f64::INFINITY, None), |(bl, bc), (l, c)| if l < bl { (l, Some(c)) } else { (bl, bc) });
    let cut = cut.ok_or(Error::Empty("admissible cuts"))?;
    let value = len / a;
    Ok(CutEstimate { value, err: value * p.area_defect + 1e-12 * value, cut })
}

/// Upper bound on the profile of the uniform measure on a planar body at
/// level `t`, together with the cut attaining it.
pub fn profile_2d_upper(body: &ConvexBody, t: f64, family: &CutFamily) -> Result<CutEstimate> {
    search(&prepare(body, family)?, t)
}

pub fn curve_2d(body: &ConvexBody, ts: &[f64], family: &CutFamily) -> Result<ProfileCurve> {
    let p = prepare(body, family)?;
    let mut c = ProfileCurve {
        t: Vec::with_capacity(ts.len()),
        values: Vec::with_capacity(ts.len()),
        err: Vec::with_capacity(ts.len()),
        minimizers: Vec::with_capacity(ts.len()),
        method: Method::Cutsearch2d,
    };
    for &t in ts {
        let e = search(&p, t)?;
        c.t.push(t);
        c.values.push(e.value);
        c.err.push(e.err);
        c.minimizers.push(Minimizer::Cut(e.cut));
    }
    Ok(c)
}
