use rayon::prelude::*;

use super::{nets, ConvexBody, Shape};
use crate::error::{Error, Result};
use crate::Estimate;

/// Diameter at the default resolution (0.25° in the plane, 0.5° in space).
pub fn diameter(body: &ConvexBody) -> Estimate {
    let count = match body.dim() {
        1 => 2,
        2 => nets::NET_2D,
        _ => nets::count_for_angle(3, 0.5f64.to_radians()),
    };
    diameter_with(body, count)
}

/// Diameter from the widest direction in a net of `count` directions. The
/// error is the worst-case underestimate `w (1/cos δ - 1)` for a net of
/// covering angle δ, which is valid for any convex body.
pub fn diameter_with(body: &ConvexBody, count: usize) -> Estimate {
    match body.shape() {
        Shape::Interval { a, b } => return Estimate::exact(b - a),
        Shape::Box { lo, hi } => {
            return Estimate::exact(lo.iter().zip(hi).map(|(l, h)| (h - l) * (h - l)).sum::<f64>().sqrt())
        }
        Shape::Ball { radius, .. } => return Estimate::exact(2.0 * radius),
        Shape::LpBall { p, radius } => {
            let n = body.dim() as f64;
            let e = if *p <= 2.0 {
                0.0
            } else if p.is_infinite() {
                0.5
            } else {
                0.5 - 1.0 / p
            };
            return Estimate::exact(2.0 * radius * n.powf(e));
        }
        _ => {}
    }
    let net = nets::direction_net(body.dim(), count);
    let w = net.par_iter().map(|u| body.width(u)).collect::<Vec<_>>().into_iter().fold(0.0f64, f64::max);
    let delta = nets::covering_angle(body.dim(), count);
    Estimate::new(w, w * (1.0 / delta.cos() - 1.0))
}

/// Banach-Mazur style distance `inf { ab : L/a ⊆ K ⊆ bL, a, b >= 1 }` for
/// bodies containing the origin in their interiors, on the default net.
pub fn geometric_distance(k: &ConvexBody, l: &ConvexBody) -> Result<f64> {
    let count = super::default_net_size(k.dim());
    geometric_distance_with(k, l, count)
}

/// Inclusions are tested through support functions: `L/a ⊆ K` iff
/// `h_L <= a h_K` everywhere, so the smallest admissible `a` and `b` are
/// read off directly as the extreme support ratios over the net.
pub fn geometric_distance_with(k: &ConvexBody, l: &ConvexBody, count: usize) -> Result<f64> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: l.dim() });
    }
    let net = nets::direction_net(k.dim(), count);
    let hk: Vec<f64> = net.par_iter().map(|u| k.support(u)).collect();
    let hl: Vec<f64> = net.par_iter().map(|u| l.support(u)).collect();
    let tol = 1e-12;
    if hk.iter().any(|v| !(*v > tol)) {
        return Err(Error::OriginNotInterior("K"));
    }
    if hl.iter().any(|v| !(*v > tol)) {
        return Err(Error::OriginNotInterior("L"));
    }
    let a = hk.iter().zip(&hl).map(|(k, l)| l / k).fold(1.0f64, f64::max);
    let b = hk.iter().zip(&hl).map(|(k, l)| k / l).fold(1.0f64, f64::max);
    Ok(a * b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diameter_examples() {
        let sq = ConvexBody::unit_cube(2).unwrap();
        assert!((diameter(&sq).value - 2f64.sqrt()).abs() < 1e-15);
        let disk = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(diameter(&disk).value, 2.0);
        let rect = ConvexBody::boxed(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert!((diameter(&rect).value - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn net_diameter_brackets_truth() {
        let tri = ConvexBody::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let d = diameter(&tri);
        let truth = 2f64.sqrt();
        assert!(d.value <= truth + 1e-12 && d.value + d.err >= truth - 1e-12);
        let disk = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap().translated(&[3.0, 1.0]).unwrap();
        let d = diameter(&disk);
        assert!((d.value - 2.0).abs() <= d.err + 1e-12);
    }

    #[test]
    fn distance_examples() {
        let b = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!((geometric_distance(&b, &b).unwrap() - 1.0).abs() < 1e-15);
        let big = ConvexBody::ball(vec![0.0, 0.0], 1.1).unwrap();
        assert!((geometric_distance(&b, &big).unwrap() - 1.1).abs() < 1e-12);
        assert!((geometric_distance(&big, &b).unwrap() - 1.1).abs() < 1e-12);
    }

    #[test]
    fn square_versus_inscribed_disk() {
        let sq = ConvexBody::boxed(vec![-0.5, -0.5], vec![0.5, 0.5]).unwrap();
        let disk = ConvexBody::ball(vec![0.0, 0.0], 0.5).unwrap();
        let coarse = geometric_distance(&sq, &disk).unwrap();
        // Brute-force oracle on a 0.01 degree net.
        let fine = geometric_distance_with(&sq, &disk, 36_000).unwrap();
        assert!((coarse - fine).abs() < 1e-9);
        assert!((fine - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn origin_must_be_interior() {
        let sq = ConvexBody::unit_cube(2).unwrap();
        let b = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(geometric_distance(&sq, &b), Err(Error::OriginNotInterior("K")));
    }
}
