//! Convex bodies in ℝⁿ (n ≤ 3) described by membership and support oracles.
//!
//! Bodies are immutable once built. Derived data that is expensive to obtain
//! (polytope vertices, boundary samples of intersections, a bounding box and
//! an interior point) is computed at construction.

mod distance;
pub mod nets;
pub mod polygon;
mod volume;

pub use distance::{diameter, diameter_with, geometric_distance, geometric_distance_with};
pub use volume::{volume, volume_with, MC_SAMPLES};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use polygon::Polygon;

/// Membership slack for points on the boundary.
const CONTAINS_TOL: f64 = 1e-12;
/// Bodies whose inradius proxy falls below this are rejected.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Box used to detect unbounded H-polytopes.
const FAR: f64 = 1e6;

/// The closed half-space `{x : <normal, x> <= offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    normal: Vec<f64>,
    offset: f64,
}

impl HalfSpace {
    /// Rescales `(normal, offset)` so the normal has unit length.
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let len = linalg::norm2(&normal);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::InvalidArgument("half-space normal must be nonzero".into()));
        }
        Ok(HalfSpace { normal: normal.iter().map(|v| v / len).collect(), offset: offset / len })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// Signed distance, positive outside.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.normal, x) - self.offset
    }

    /// Euclidean distance to the half-space.
    pub fn distance(&self, x: &[f64]) -> f64 {
        self.signed_distance(x).max(0.0)
    }
}

/// A cut of a planar body: a straight chord or a circular arc.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum CutCurve {
    /// The region `<normal, x> <= offset`.
    Line { normal: [f64; 2], offset: f64 },
    /// The region inside (`inside = true`) or outside the circle.
    Arc { center: [f64; 2], radius: f64, inside: bool },
}

impl std::fmt::Display for CutCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CutCurve::Line { normal, offset } => {
                write!(f, "line(n={:.6}:{:.6};c={:.6})", normal[0], normal[1], offset)
            }
            CutCurve::Arc { center, radius, inside } => write!(
                f,
                "arc(c={:.6}:{:.6};r={:.6};{})",
                center[0],
                center[1],
                radius,
                if *inside { "in" } else { "out" }
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Shape {
    Interval {
        a: f64,
        b: f64,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// The ℓ_p ball of the given radius centered at the origin; `p = inf` allowed.
    LpBall {
        p: f64,
        radius: f64,
    },
    HPolytope(Vec<HalfSpace>),
    Product(Box<ConvexBody>, Box<ConvexBody>),
    Intersection(Box<ConvexBody>, Box<ConvexBody>),
    /// The image `{matrix * y + shift : y in inner}`.
    AffineImage {
        matrix: Mat,
        inverse: Mat,
        det: f64,
        shift: Vec<f64>,
        inner: Box<ConvexBody>,
    },
}

#[derive(Debug, Clone)]
pub struct ConvexBody {
    shape: Shape,
    dim: usize,
    interior: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Vertices of polytopes; boundary samples of intersections.
    points: Vec<Vec<f64>>,
}

impl ConvexBody {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(b - a > DEGENERACY_TOL) {
            return Err(Error::Degenerate(format!("interval [{a}, {b}]")));
        }
        Ok(Self::finish(Shape::Interval { a, b }, 1, vec![0.5 * (a + b)], vec![a], vec![b], vec![]))
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_dim(lo.len())?;
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(h - l > 2.0 * DEGENERACY_TOL)) {
            return Err(Error::Degenerate("box has zero width along an axis".into()));
        }
        let c = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
        let n = lo.len();
        Ok(Self::finish(Shape::Box { lo: lo.clone(), hi: hi.clone() }, n, c, lo, hi, vec![]))
    }

    pub fn unit_cube(dim: usize) -> Result<Self> {
        Self::boxed(vec![0.0; dim], vec![1.0; dim])
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_dim(center.len())?;
        if !(radius > DEGENERACY_TOL) {
            return Err(Error::Degenerate(format!("ball of radius {radius}")));
        }
        let lo = center.iter().map(|c| c - radius).collect();
        let hi = center.iter().map(|c| c + radius).collect();
        let n = center.len();
        Ok(Self::finish(Shape::Ball { center: center.clone(), radius }, n, center, lo, hi, vec![]))
    }

    pub fn lp_ball(dim: usize, p: f64, radius: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(p >= 1.0) {
            return Err(Error::InvalidArgument(format!("l_p ball needs p >= 1, got {p}")));
        }
        if !(radius > DEGENERACY_TOL) {
            return Err(Error::Degenerate(format!("l_p ball of radius {radius}")));
        }
        Ok(Self::finish(
            Shape::LpBall { p, radius },
            dim,
            vec![0.0; dim],
            vec![-radius; dim],
            vec![radius; dim],
            vec![],
        ))
    }

    pub fn polytope(halfspaces: Vec<HalfSpace>) -> Result<Self> {
        let dim = halfspaces.first().ok_or(Error::Empty("half-space list"))?.dim();
        check_dim(dim)?;
        if let Some(h) = halfspaces.iter().find(|h| h.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: h.dim() });
        }
        let verts = polytope_vertices(&halfspaces, dim)?;
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        let mut c = vec![0.0; dim];
        for v in &verts {
            for k in 0..dim {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
                c[k] += v[k] / verts.len() as f64;
            }
        }
        let body = Self::finish(Shape::HPolytope(halfspaces), dim, c, lo, hi, verts);
        body.check_width()?;
        Ok(body)
    }

    /// Convex hull of the given 2-D points in convex position, as an H-polytope.
    pub fn polygon(points: &[[f64; 2]]) -> Result<Self> {
        let poly = Polygon::from_convex_points(points.to_vec());
        if poly.len() < 3 || poly.area() <= DEGENERACY_TOL {
            return Err(Error::Degenerate("polygon with empty interior".into()));
        }
        let k = poly.len();
        let hs = (0..k)
            .map(|i| {
                let a = poly.verts[i];
                let b = poly.verts[(i + 1) % k];
                let n = vec![b[1] - a[1], a[0] - b[0]];
                let off = n[0] * a[0] + n[1] * a[1];
                HalfSpace::new(n, off)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::polytope(hs)
    }

    pub fn product(left: ConvexBody, right: ConvexBody) -> Result<Self> {
        let dim = left.dim + right.dim;
        check_dim(dim)?;
        let cat = |a: &[f64], b: &[f64]| a.iter().chain(b).copied().collect::<Vec<_>>();
        let c = cat(&left.interior, &right.interior);
        let lo = cat(&left.lo, &right.lo);
        let hi = cat(&left.hi, &right.hi);
        Ok(Self::finish(Shape::Product(Box::new(left), Box::new(right)), dim, c, lo, hi, vec![]))
    }

    pub fn intersection(left: ConvexBody, right: ConvexBody) -> Result<Self> {
        if left.dim != right.dim {
            return Err(Error::DimensionMismatch { expected: left.dim, got: right.dim });
        }
        let dim = left.dim;
        let lo: Vec<f64> = (0..dim).map(|k| left.lo[k].max(right.lo[k])).collect();
        let hi: Vec<f64> = (0..dim).map(|k| left.hi[k].min(right.hi[k])).collect();
        if lo.iter().zip(&hi).any(|(l, h)| !(h - l > 2.0 * DEGENERACY_TOL)) {
            return Err(Error::Degenerate("intersection has empty interior".into()));
        }
        // Interior point: centroid of a grid sample of the intersection.
        let per_axis = match dim {
            1 => 1025,
            2 => 65,
            _ => 25,
        };
        let mut c = vec![0.0; dim];
        let mut count = 0usize;
        let mut idx = vec![0usize; dim];
        let mut x = vec![0.0; dim];
        loop {
            for k in 0..dim {
                x[k] = lo[k] + (hi[k] - lo[k]) * (idx[k] as f64 + 0.5) / per_axis as f64;
            }
            if left.contains_unchecked(&x) && right.contains_unchecked(&x) {
                for k in 0..dim {
                    c[k] += x[k];
                }
                count += 1;
            }
            let mut k = 0;
            while k < dim {
                idx[k] += 1;
                if idx[k] < per_axis {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == dim {
                break;
            }
        }
        if count == 0 {
            return Err(Error::Degenerate("intersection has empty interior".into()));
        }
        for v in c.iter_mut() {
            *v /= count as f64;
        }
        let mut body = Self::finish(Shape::Intersection(Box::new(left), Box::new(right)), dim, c, lo, hi, vec![]);
        let ray_count = match dim {
            1 => 2,
            2 => 4 * nets::NET_2D,
            _ => 2 * nets::NET_3D,
        };
        body.points = nets::direction_net(dim, ray_count).iter().map(|d| body.ray_exit(d)).collect();
        body.check_width()?;
        Ok(body)
    }

    /// The image of `inner` under `x -> matrix * x + shift`.
    pub fn affine(matrix: Mat, shift: Vec<f64>, inner: ConvexBody) -> Result<Self> {
        let dim = inner.dim;
        if matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: matrix.len() });
        }
        if shift.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: shift.len() });
        }
        let (det, inverse) = linalg::det_inverse(&matrix);
        let inverse = inverse.ok_or(Error::SingularMap(det.abs()))?;
        let mut c = linalg::mat_vec(&matrix, &inner.interior);
        for k in 0..dim {
            c[k] += shift[k];
        }
        let mut body = Self::finish(
            Shape::AffineImage { matrix, inverse, det, shift, inner: Box::new(inner) },
            dim,
            c,
            vec![0.0; dim],
            vec![0.0; dim],
            vec![],
        );
        for k in 0..dim {
            let mut e = vec![0.0; dim];
            e[k] = 1.0;
            body.hi[k] = body.support(&e);
            e[k] = -1.0;
            body.lo[k] = -body.support(&e);
        }
        Ok(body)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        let m = (0..self.dim).map(|i| (0..self.dim).map(|j| if i == j { s } else { 0.0 }).collect()).collect();
        Self::affine(m, vec![0.0; self.dim], self.clone())
    }

    pub fn translated(&self, v: &[f64]) -> Result<Self> {
        Self::affine(linalg::identity(self.dim), v.to_vec(), self.clone())
    }

    fn finish(shape: Shape, dim: usize, interior: Vec<f64>, lo: Vec<f64>, hi: Vec<f64>, points: Vec<Vec<f64>>) -> Self {
        ConvexBody { shape, dim, interior, lo, hi, points }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interior_point(&self) -> &[f64] {
        &self.interior
    }

    /// Axis-aligned bounding box (a superset of the body).
    pub fn bounding_box(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    /// Membership test for the closed body.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(self.contains_unchecked(x))
    }

    /// Membership without the dimension check; `x.len()` must equal `dim()`.
    pub fn contains_unchecked(&self, x: &[f64]) -> bool {
        match &self.shape {
            Shape::Interval { a, b } => x[0] >= a - CONTAINS_TOL && x[0] <= b + CONTAINS_TOL,
            Shape::Box { lo, hi } => {
                x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| *v >= l - CONTAINS_TOL && *v <= h + CONTAINS_TOL)
            }
            Shape::Ball { center, radius } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                d2.sqrt() <= radius + CONTAINS_TOL
            }
            Shape::LpBall { p, radius } => lp_norm(x, *p) <= radius * (1.0 + CONTAINS_TOL),
            Shape::HPolytope(hs) => hs.iter().all(|h| h.signed_distance(x) <= CONTAINS_TOL),
            Shape::Product(l, r) => l.contains_unchecked(&x[..l.dim]) && r.contains_unchecked(&x[l.dim..]),
            Shape::Intersection(l, r) => l.contains_unchecked(x) && r.contains_unchecked(x),
            Shape::AffineImage { inverse, shift, inner, .. } => {
                let y: Vec<f64> = x.iter().zip(shift).map(|(a, s)| a - s).collect();
                inner.contains_unchecked(&linalg::mat_vec(inverse, &y))
            }
        }
    }

    /// Support function `h(u) = sup_{x in K} <x, u>`. Exact except for
    /// intersections, where it is the support of an inscribed sample polytope.
    pub fn support(&self, u: &[f64]) -> f64 {
        match &self.shape {
            Shape::Interval { a, b } => (a * u[0]).max(b * u[0]),
            Shape::Box { lo, hi } => u.iter().zip(lo.iter().zip(hi)).map(|(v, (l, h))| (v * l).max(v * h)).sum(),
            Shape::Ball { center, radius } => linalg::dot(center, u) + radius * linalg::norm2(u),
            Shape::LpBall { p, radius } => {
                let q = if p.is_infinite() {
                    1.0
                } else if *p == 1.0 {
                    f64::INFINITY
                } else {
                    p / (p - 1.0)
                };
                radius * lp_norm(u, q)
            }
            Shape::HPolytope(_) | Shape::Intersection(..) => {
                self.points.iter().map(|v| linalg::dot(v, u)).fold(f64::NEG_INFINITY, f64::max)
            }
            Shape::Product(l, r) => l.support(&u[..l.dim]) + r.support(&u[l.dim..]),
            Shape::AffineImage { matrix, shift, inner, .. } => {
                let at = linalg::transpose(matrix);
                linalg::dot(shift, u) + inner.support(&linalg::mat_vec(&at, u))
            }
        }
    }

    pub fn width(&self, u: &[f64]) -> f64 {
        let neg: Vec<f64> = u.iter().map(|v| -v).collect();
        self.support(u) + self.support(&neg)
    }

    /// Last point of the ray from the interior point along `d` that lies in
    /// the body, by bisection against the membership oracle.
    fn ray_exit(&self, d: &[f64]) -> Vec<f64> {
        let c = &self.interior;
        let span: f64 = self.lo.iter().zip(&self.hi).map(|(l, h)| (h - l) * (h - l)).sum::<f64>().sqrt();
        let (mut a, mut b) = (0.0, span);
        let at = |s: f64| c.iter().zip(d).map(|(ci, di)| ci + s * di).collect::<Vec<_>>();
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if self.contains_unchecked(&at(m)) {
                a = m;
            } else {
                b = m;
            }
        }
        at(a)
    }

    /// Inradius proxy: half the minimal width over the default net.
    pub fn min_half_width(&self) -> f64 {
        let net = nets::direction_net(self.dim, default_net_size(self.dim));
        net.iter().map(|u| self.width(u)).fold(f64::INFINITY, f64::min) / 2.0
    }

    fn check_width(&self) -> Result<()> {
        let w = self.min_half_width();
        if !(w > DEGENERACY_TOL) {
            return Err(Error::Degenerate(format!("inradius proxy {w:e}")));
        }
        Ok(())
    }

    /// Whether the volume has a closed form.
    pub fn has_exact_volume(&self) -> bool {
        match &self.shape {
            Shape::Interval { .. } | Shape::Box { .. } | Shape::Ball { .. } | Shape::LpBall { .. } => true,
            Shape::Product(l, r) => l.has_exact_volume() && r.has_exact_volume(),
            Shape::AffineImage { inner, .. } => inner.has_exact_volume(),
            Shape::HPolytope(_) | Shape::Intersection(..) => false,
        }
    }

    /// Counter-clockwise boundary polygon of a planar body. Exact for boxes,
    /// polytopes and their affine images; otherwise inscribed with `k`
    /// vertices obtained by ray casting (exact vertices on the circle for balls).
    pub fn to_polygon(&self, k: usize) -> Result<Polygon> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: self.dim });
        }
        Ok(match &self.shape {
            Shape::Box { lo, hi } => Polygon::rectangle([lo[0], lo[1]], [hi[0], hi[1]]),
            Shape::Product(..) => Polygon::rectangle([self.lo[0], self.lo[1]], [self.hi[0], self.hi[1]]),
            Shape::HPolytope(_) => Polygon::from_convex_points(self.points.iter().map(|v| [v[0], v[1]]).collect()),
            Shape::Ball { center, radius } => Polygon {
                verts: (0..k)
                    .map(|i| {
                        let a = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                        [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
                    })
                    .collect(),
            },
            Shape::AffineImage { matrix, shift, inner, .. } => {
                let p = inner.to_polygon(k)?;
                let pts = p
                    .verts
                    .iter()
                    .map(|v| {
                        let y = linalg::mat_vec(matrix, &[v[0], v[1]]);
                        [y[0] + shift[0], y[1] + shift[1]]
                    })
                    .collect();
                Polygon::from_convex_points(pts)
            }
            Shape::Intersection(l, r) => l.to_polygon(k)?.clip_convex(&r.to_polygon(k)?),
            _ => Polygon {
                verts: nets::direction_net(2, k)
                    .iter()
                    .map(|d| {
                        let p = self.ray_exit(d);
                        [p[0], p[1]]
                    })
                    .collect(),
            },
        })
    }
}

pub(crate) fn default_net_size(dim: usize) -> usize {
    match dim {
        1 => 2,
        2 => nets::NET_2D,
        _ => nets::NET_3D,
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if (1..=3).contains(&dim) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("dimension {dim} outside 1..=3")))
    }
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else {
        let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if m == 0.0 {
            return 0.0;
        }
        m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Vertices of `{x : <n_i, x> <= b_i}` by enumerating n-subsets of
/// constraints. A far box is added so that unboundedness shows up as a
/// vertex on that box.
fn polytope_vertices(hs: &[HalfSpace], dim: usize) -> Result<Vec<Vec<f64>>> {
    let mut all: Vec<(Vec<f64>, f64)> = hs.iter().map(|h| (h.normal.clone(), h.offset)).collect();
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        all.push((e.clone(), FAR));
        e[k] = -1.0;
        all.push((e, FAR));
    }
    let m = all.len();
    let mut verts: Vec<Vec<f64>> = Vec::new();
    let mut push = |idx: &[usize]| {
        let a: Mat = idx.iter().map(|&i| all[i].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| all[i].1).collect();
        let (_, inv) = linalg::det_inverse(&a);
        if let Some(inv) = inv {
            let x = linalg::mat_vec(&inv, &b);
            let scale = 1.0 + x.iter().fold(0.0f64, |s, v| s.max(v.abs()));
            if all.iter().all(|(n, o)| linalg::dot(n, &x) <= o + 1e-9 * scale)
                && !verts
                    .iter()
                    .any(|v: &Vec<f64>| v.iter().zip(&x).map(|(p, q)| (p - q).abs()).sum::<f64>() <= 1e-9 * scale)
            {
                verts.push(x);
            }
        }
    };
    match dim {
        1 => (0..m).for_each(|i| push(&[i])),
        2 => (0..m).for_each(|i| (i + 1..m).for_each(|j| push(&[i, j]))),
        _ => (0..m).for_each(|i| (i + 1..m).for_each(|j| (j + 1..m).for_each(|k| push(&[i, j, k])))),
    }
    if verts.is_empty() {
        return Err(Error::Degenerate("polytope is empty".into()));
    }
    if verts.iter().any(|v| v.iter().any(|c| c.abs() >= 0.5 * FAR)) {
        return Err(Error::Unbounded("support function diverges along some direction".into()));
    }
    Ok(verts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cross_polytope() -> ConvexBody {
        ConvexBody::lp_ball(2, 1.0, 1.0).unwrap()
    }

    #[test]
    fn membership_examples() {
        let sq = ConvexBody::unit_cube(2).unwrap();
        assert!(sq.contains(&[0.5, 0.5]).unwrap());
        let disk = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!(!disk.contains(&[1.0001, 0.0]).unwrap());
        assert!(cross_polytope().contains(&[0.5, 0.5]).unwrap());
        assert!(matches!(sq.contains(&[0.5]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn singular_affine_map_rejected() {
        let sq = ConvexBody::unit_cube(2).unwrap();
        let m = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(matches!(ConvexBody::affine(m, vec![0.0, 0.0], sq), Err(Error::SingularMap(_))));
    }

    #[test]
    fn degenerate_and_unbounded_rejected() {
        assert!(ConvexBody::boxed(vec![0.0, 0.0], vec![1.0, 0.0]).is_err());
        let hs = vec![HalfSpace::new(vec![1.0, 0.0], 1.0).unwrap(), HalfSpace::new(vec![0.0, 1.0], 1.0).unwrap()];
        assert!(matches!(ConvexBody::polytope(hs), Err(Error::Unbounded(_))));
    }

    #[test]
    fn polytope_matches_box() {
        let hs = vec![
            HalfSpace::new(vec![1.0, 0.0], 1.0).unwrap(),
            HalfSpace::new(vec![-1.0, 0.0], 0.0).unwrap(),
            HalfSpace::new(vec![0.0, 2.0], 4.0).unwrap(),
            HalfSpace::new(vec![0.0, -1.0], 0.0).unwrap(),
        ];
        let p = ConvexBody::polytope(hs).unwrap();
        let b = ConvexBody::boxed(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        for u in nets::direction_net(2, 64) {
            assert!((p.support(&u) - b.support(&u)).abs() < 1e-12);
        }
        assert!((p.to_polygon(8).unwrap().area() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn halfspace_normalized() {
        let h = HalfSpace::new(vec![3.0, 4.0], 10.0).unwrap();
        assert!((linalg::norm2(h.normal()) - 1.0).abs() < 1e-12);
        assert!((h.offset() - 2.0).abs() < 1e-15);
        assert!((h.distance(&[3.0, 4.0]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn intersection_support_and_polygon() {
        let sq = ConvexBody::unit_cube(2).unwrap();
        let shifted = sq.translated(&[0.1, 0.0]).unwrap();
        let k = ConvexBody::intersection(sq, shifted).unwrap();
        assert!((k.support(&[1.0, 0.0]) - 1.0).abs() < 1e-9);
        assert!((k.support(&[-1.0, 0.0]) + 0.1).abs() < 1e-9);
        assert!((k.to_polygon(64).unwrap().area() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn lp_support_is_dual_norm() {
        let b = cross_polytope();
        assert!((b.support(&[0.6, 0.8]) - 0.8).abs() < 1e-15);
        let c = ConvexBody::lp_ball(2, f64::INFINITY, 1.0).unwrap();
        assert!((c.support(&[0.6, 0.8]) - 1.4).abs() < 1e-15);
    }
}
