use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Measure1D;
use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Shape};
use crate::linalg;

#[derive(Debug, Clone)]
pub enum MeasureND {
    UniformOnBody(ConvexBody),
    ProductMeasure(Vec<Measure1D>),
    GaussianStd(usize),
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CovarianceSummary {
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
    /// Square root of the largest eigenvalue of `cov`.
    pub sigma1: f64,
    /// Largest standard error of a covariance entry (zero for quadrature).
    pub std_err: f64,
}

impl MeasureND {
    pub fn dim(&self) -> usize {
        match self {
            MeasureND::UniformOnBody(b) => b.dim(),
            MeasureND::ProductMeasure(f) => f.len(),
            MeasureND::GaussianStd(n) => *n,
        }
    }

    /// One-dimensional factors of a product measure.
    pub fn factors(&self) -> Option<Vec<Measure1D>> {
        match self {
            MeasureND::ProductMeasure(f) => Some(f.clone()),
            MeasureND::GaussianStd(n) => Measure1D::gaussian(0.0, 1.0).ok().map(|g| vec![g; *n]),
            MeasureND::UniformOnBody(b) => match b.shape() {
                Shape::Interval { a, b } => Measure1D::uniform(*a, *b).ok().map(|m| vec![m]),
                Shape::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| Measure1D::uniform(*l, *h).ok()).collect(),
                _ => None,
            },
        }
    }
}

/// Mean and covariance. Exact quadrature for products (and uniform measures
/// on intervals and boxes); Monte Carlo with `samples` points otherwise.
pub fn covariance(m: &MeasureND, samples: usize, seed: u64) -> Result<CovarianceSummary> {
    if let Some(f) = m.factors() {
        let n = f.len();
        let mut cov = vec![vec![0.0; n]; n];
        for (k, fk) in f.iter().enumerate() {
            cov[k][k] = fk.variance();
        }
        let sigma1 = cov.iter().enumerate().map(|(k, r)| r[k]).fold(0.0f64, f64::max).sqrt();
        return Ok(CovarianceSummary { mean: f.iter().map(|fk| fk.mean()).collect(), cov, sigma1, std_err: 0.0 });
    }
    let pts = sample(m, samples, seed)?;
    let n = m.dim();
    let ns = pts.len() as f64;
    let mean: Vec<f64> = (0..n).map(|k| pts.iter().map(|p| p[k]).sum::<f64>() / ns).collect();
    let mut cov = vec![vec![0.0; n]; n];
    let mut std_err = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            let prods: Vec<f64> = pts.iter().map(|p| (p[i] - mean[i]) * (p[j] - mean[j])).collect();
            let c = prods.iter().sum::<f64>() / (ns - 1.0);
            let v = prods.iter().map(|x| (x - c) * (x - c)).sum::<f64>() / (ns - 1.0);
            std_err = std_err.max((v / ns).sqrt());
            cov[i][j] = c;
            cov[j][i] = c;
        }
    }
    let (vals, _) = linalg::jacobi_eigen(&cov);
    Ok(CovarianceSummary { mean, cov, sigma1: vals[0].max(0.0).sqrt(), std_err })
}

/// `count` independent draws, deterministic for a given seed. Inverse-CDF for
/// product measures, bounding-box rejection for uniform measures on bodies.
pub fn sample(m: &MeasureND, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if let Some(f) = m.factors() {
        return Ok((0..count)
            .map(|_| {
                f.iter()
                    .map(|fk| {
                        // random() lies in [0,1); shift away from 0 for the open interval.
                        let u: f64 = rng.random::<f64>().max(f64::EPSILON);
                        fk.quantile(u).unwrap_or_else(|_| fk.support().0)
                    })
                    .collect()
            })
            .collect());
    }
    let MeasureND::UniformOnBody(body) = m else { unreachable!() };
    let (lo, hi) = body.bounding_box();
    let dim = body.dim();
    let mut out = Vec::with_capacity(count);
    let mut tries = 0usize;
    while out.len() < count {
        let x: Vec<f64> = (0..dim).map(|k| lo[k] + (hi[k] - lo[k]) * rng.random::<f64>()).collect();
        tries += 1;
        if body.contains_unchecked(&x) {
            out.push(x);
        }
        if tries >= 100_000 && (out.len() as f64) < 1e-4 * tries as f64 {
            return Err(Error::LowAcceptance { rate: out.len() as f64 / tries as f64 });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_covariance_is_diagonal() {
        let m = MeasureND::ProductMeasure(vec![
            Measure1D::uniform(0.0, 1.0).unwrap(),
            Measure1D::uniform(0.0, 2.0).unwrap(),
        ]);
        let c = covariance(&m, 0, 0).unwrap();
        assert!((c.cov[0][0] - 1.0 / 12.0).abs() < 1e-12);
        assert!((c.cov[1][1] - 4.0 / 12.0).abs() < 1e-12);
        assert!((c.sigma1 - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        let g = covariance(&MeasureND::GaussianStd(1), 0, 0).unwrap();
        assert!((g.sigma1 - 1.0).abs() < 1e-6);
        let u = covariance(&MeasureND::UniformOnBody(ConvexBody::interval(0.0, 1.0).unwrap()), 0, 0).unwrap();
        assert!((u.sigma1 - 1.0 / 12f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn uniform_samples_pass_ks() {
        let m = MeasureND::UniformOnBody(ConvexBody::interval(0.0, 1.0).unwrap());
        let n = 100_000;
        let mut xs: Vec<f64> = sample(&m, n, 11).unwrap().into_iter().map(|p| p[0]).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, x)| ((i + 1) as f64 / n as f64 - x).abs().max((x - i as f64 / n as f64).abs()))
            .fold(0.0f64, f64::max);
        assert!(ks < 1.63 / (n as f64).sqrt(), "{ks}");
    }

    #[test]
    fn disk_samples_centered() {
        let disk = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        let m = MeasureND::UniformOnBody(disk);
        let n = 100_000;
        let pts = sample(&m, n, 5).unwrap();
        // Each coordinate has variance 1/4.
        let se = 0.5 / (n as f64).sqrt();
        for k in 0..2 {
            let mean = pts.iter().map(|p| p[k]).sum::<f64>() / n as f64;
            assert!(mean.abs() < 3.0 * se);
        }
        assert_eq!(sample(&m, 10, 5).unwrap(), sample(&m, 10, 5).unwrap());
    }

    #[test]
    fn gaussian_pair_sample_covariance() {
        let pts = sample(&MeasureND::GaussianStd(2), 100_000, 9).unwrap();
        let n = pts.len() as f64;
        for i in 0..2 {
            for j in 0..2 {
                let c = pts.iter().map(|p| p[i] * p[j]).sum::<f64>() / n;
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((c - want).abs() < 0.05);
            }
        }
    }
}
