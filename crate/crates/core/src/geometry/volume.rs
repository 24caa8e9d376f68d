use libm::tgamma as gamma;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{ConvexBody, Shape};
use crate::error::Result;
use crate::Estimate;

/// Default Monte Carlo sample count.
pub const MC_SAMPLES: usize = 1_000_000;
/// Samples per independently seeded chunk; fixed so results do not depend
/// on the number of worker threads.
const CHUNK: usize = 1 << 16;
/// Two-sided 99% normal quantile.
const Z99: f64 = 2.576;

/// Volume with the default Monte Carlo budget where no closed form exists.
pub fn volume(body: &ConvexBody, seed: u64) -> Result<Estimate> {
    volume_with(body, MC_SAMPLES, seed)
}

/// Volume with an explicit sample budget. The error of a Monte Carlo estimate
/// is the 99% normal confidence half-width.
pub fn volume_with(body: &ConvexBody, samples: usize, seed: u64) -> Result<Estimate> {
    let n = body.dim() as i32;
    Ok(match body.shape() {
        Shape::Interval { a, b } => Estimate::exact(b - a),
        Shape::Box { lo, hi } => Estimate::exact(lo.iter().zip(hi).map(|(l, h)| h - l).product()),
        Shape::Ball { radius, .. } => {
            let nf = n as f64;
            Estimate::exact(std::f64::consts::PI.powf(nf / 2.0) / gamma(nf / 2.0 + 1.0) * radius.powi(n))
        }
        Shape::LpBall { p, radius } => {
            let nf = n as f64;
            let unit =
                if p.is_infinite() { 2f64.powi(n) } else { (2.0 * gamma(1.0 / p + 1.0)).powi(n) / gamma(nf / p + 1.0) };
            Estimate::exact(unit * radius.powi(n))
        }
        Shape::Product(l, r) => {
            let a = volume_with(l, samples, seed)?;
            let b = volume_with(r, samples, seed.wrapping_add(1))?;
            Estimate::new(a.value * b.value, a.value * b.err + b.value * a.err + a.err * b.err)
        }
        Shape::AffineImage { det, inner, .. } if inner.has_exact_volume() => {
            let v = volume_with(inner, samples, seed)?;
            Estimate::new(det.abs() * v.value, det.abs() * v.err)
        }
        _ => monte_carlo(body, samples, seed),
    })
}

fn monte_carlo(body: &ConvexBody, samples: usize, seed: u64) -> Estimate {
    let (lo, hi) = body.bounding_box();
    let dim = body.dim();
    let box_vol: f64 = lo.iter().zip(hi).map(|(l, h)| h - l).product();
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let todo = CHUNK.min(samples - c * CHUNK);
            let mut x = vec![0.0; dim];
            let mut count = 0u64;
            for _ in 0..todo {
                for k in 0..dim {
                    x[k] = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
                }
                if body.contains_unchecked(&x) {
                    count += 1;
                }
            }
            count
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let p = hits as f64 / samples as f64;
    Estimate::new(box_vol * p, Z99 * box_vol * (p * (1.0 - p) / samples as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HalfSpace;
    use std::f64::consts::PI;

    #[test]
    fn closed_forms() {
        let sq = ConvexBody::unit_cube(2).unwrap();
        assert_eq!(volume(&sq, 0).unwrap(), Estimate::exact(1.0));
        let b1 = ConvexBody::lp_ball(2, 1.0, 1.0).unwrap();
        assert!((volume(&b1, 0).unwrap().value - 2.0).abs() < 1e-12);
        let b3 = ConvexBody::lp_ball(3, 1.0, 1.0).unwrap();
        assert!((volume(&b3, 0).unwrap().value - 8.0 / 6.0).abs() < 1e-12);
        let disk = ConvexBody::ball(vec![0.0, 0.0], 2.0).unwrap();
        assert!((volume(&disk, 0).unwrap().value - 4.0 * PI).abs() < 1e-12);
        let ball = ConvexBody::ball(vec![0.0; 3], 1.0).unwrap();
        assert!((volume(&ball, 0).unwrap().value - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn disk_mc_within_half_width() {
        // The unit disk written as an intersection of itself with a large box
        // forces the Monte Carlo path; the analytic area is the oracle.
        let disk = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        let big = ConvexBody::boxed(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        let k = ConvexBody::intersection(disk, big).unwrap();
        let v = volume(&k, 7).unwrap();
        assert!(v.err > 0.0 && v.err < 0.01);
        assert!((v.value - PI).abs() <= v.err, "{v:?}");
    }

    #[test]
    fn mc_is_deterministic_per_seed() {
        let hs = vec![
            HalfSpace::new(vec![-1.0, 0.0], 0.0).unwrap(),
            HalfSpace::new(vec![0.0, -1.0], 0.0).unwrap(),
            HalfSpace::new(vec![1.0, 1.0], 1.0).unwrap(),
        ];
        let tri = ConvexBody::polytope(hs).unwrap();
        let a = volume_with(&tri, 200_000, 3).unwrap();
        let b = volume_with(&tri, 200_000, 3).unwrap();
        assert_eq!(a, b);
        assert!((a.value - 0.5).abs() <= a.err);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| volume_with(&tri, 200_000, 3).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn affine_image_scales_volume() {
        let sq = ConvexBody::unit_cube(2).unwrap();
        let img = ConvexBody::affine(vec![vec![2.0, 1.0], vec![0.0, 3.0]], vec![5.0, -1.0], sq).unwrap();
        assert!((volume(&img, 0).unwrap().value - 6.0).abs() < 1e-12);
    }
}
