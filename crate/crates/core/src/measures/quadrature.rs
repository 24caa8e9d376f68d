use super::{CovarianceSummary, Measure1D};
use crate::error::{Error, Result};
use crate::linalg;

/// A discrete probability measure: weighted points in ℝⁿ (n ≤ 3). Every
/// grid-based estimator in the crate works on one of these.
#[derive(Debug, Clone)]
pub struct Quadrature {
    dim: usize,
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl Quadrature {
    /// Normalizes the weights to sum to one.
    pub fn new(dim: usize, points: Vec<[f64; 3]>, mut weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("quadrature points"));
        }
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), got: weights.len() });
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument("quadrature weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Degenerate("quadrature has zero mass".into()));
        }
        for w in weights.iter_mut() {
            *w /= total;
        }
        Ok(Quadrature { dim, points, weights })
    }

    pub fn from_measure_1d(m: &Measure1D) -> Self {
        let (xs, ws) = m.simpson_points();
        Quadrature { dim: 1, points: xs.into_iter().map(|x| [x, 0.0, 0.0]).collect(), weights: ws }
    }

    /// Tensor product of lower-dimensional quadratures.
    pub fn tensor(factors: &[Quadrature]) -> Result<Self> {
        let dim: usize = factors.iter().map(|q| q.dim).sum();
        if dim > 3 || factors.is_empty() {
            return Err(Error::InvalidArgument(format!("tensor dimension {dim}")));
        }
        let mut points = vec![[0.0; 3]];
        let mut weights = vec![1.0];
        let mut offset = 0;
        for f in factors {
            let mut np = Vec::with_capacity(points.len() * f.len());
            let mut nw = Vec::with_capacity(points.len() * f.len());
            for (p, w) in points.iter().zip(&weights) {
                for (q, v) in f.points.iter().zip(&f.weights) {
                    let mut x = *p;
                    x[offset..offset + f.dim].copy_from_slice(&q[..f.dim]);
                    np.push(x);
                    nw.push(w * v);
                }
            }
            points = np;
            weights = nw;
            offset += f.dim;
        }
        Ok(Quadrature { dim, points, weights })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(&p[..self.dim])).sum()
    }

    pub fn mean(&self) -> Vec<f64> {
        (0..self.dim).map(|k| self.integrate(|x| x[k])).collect()
    }

    pub fn covariance(&self) -> CovarianceSummary {
        let mean = self.mean();
        let n = self.dim;
        let mut cov = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let c = self.integrate(|x| (x[i] - mean[i]) * (x[j] - mean[j]));
                cov[i][j] = c;
                cov[j][i] = c;
            }
        }
        let (vals, _) = linalg::jacobi_eigen(&cov);
        CovarianceSummary { mean, cov, sigma1: vals[0].max(0.0).sqrt(), std_err: 0.0 }
    }

    /// Measure of the closed Euclidean ball `B(x0, r)`.
    pub fn ball_mass(&self, x0: &[f64], r: f64) -> f64 {
        self.integrate(|x| if dist(x, x0) <= r { 1.0 } else { 0.0 })
    }

    /// Borell tail excess as for one-dimensional measures, on this quadrature.
    pub fn borell_tail_check(&self, x0: &[f64], r: f64, ts: &[f64]) -> Result<f64> {
        let theta = self.ball_mass(x0, r);
        super::borell_excess(theta, ts, |t| 1.0 - self.ball_mass(x0, t * r))
    }
}

pub(crate) fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_quadrature_matches_measure() {
        let g = Measure1D::gaussian(0.0, 1.0).unwrap();
        let q = Quadrature::from_measure_1d(&g);
        assert!((q.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((q.integrate(|x| x[0] * x[0]) - g.variance()).abs() < 1e-10);
        let c = Measure1D::gap_counterexample(3, true).unwrap();
        let q = Quadrature::from_measure_1d(&c);
        assert!(q.points().iter().all(|p| p[0] <= 1.0 / 6.0 + 1e-12 || p[0] >= 5.0 / 6.0 - 1e-12));
    }

    #[test]
    fn tensor_product_covariance() {
        let a = Quadrature::from_measure_1d(&Measure1D::from_potential(|_| 0.0, 0.0, 1.0, 201).unwrap());
        let b = Quadrature::from_measure_1d(&Measure1D::from_potential(|_| 0.0, 0.0, 2.0, 201).unwrap());
        let q = Quadrature::tensor(&[a, b]).unwrap();
        let c = q.covariance();
        assert!((c.cov[0][0] - 1.0 / 12.0).abs() < 1e-12);
        assert!((c.cov[1][1] - 4.0 / 12.0).abs() < 1e-12);
        assert!(c.cov[0][1].abs() < 1e-14);
    }
}
