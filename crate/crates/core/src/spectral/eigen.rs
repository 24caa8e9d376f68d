use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{discretize, Domain, GridOperator};
use crate::error::{Error, Result};
use crate::linalg::{self, SpdSolver};

const BLOCK: usize = 4;
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Smallest nonzero eigenpair of `(Q, M)`.
#[derive(Debug, Clone)]
pub struct Gap {
    pub lambda: f64,
    /// `‖Qv - λMv‖_{M⁻¹} / λ` for the M-normalized eigenvector.
    pub residual: f64,
    pub iterations: usize,
    pub vector: Vec<f64>,
}

impl Gap {
    pub fn d_poin(&self) -> f64 {
        self.lambda.sqrt()
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct GapReport {
    pub h: f64,
    pub cells: usize,
    pub lambda_h: f64,
    pub lambda_half: f64,
    /// Second-order extrapolation `(4 λ(h/2) - λ(h)) / 3`.
    pub lambda: f64,
    pub d_poin: f64,
    pub residual: f64,
}

fn deflate(m: &[f64], mtot: f64, x: &mut [f64]) {
    let mean = m.iter().zip(x.iter()).map(|(w, v)| w * v).sum::<f64>() / mtot;
    for v in x.iter_mut() {
        *v -= mean;
    }
}

fn m_dot(m: &[f64], a: &[f64], b: &[f64]) -> f64 {
    m.iter().zip(a).zip(b).map(|((w, x), y)| w * x * y).sum()
}

/// Block inverse iteration on `(Q + σM)⁻¹ M` with constants projected out
/// and a Rayleigh-Ritz step each sweep.
pub fn spectral_gap(op: &GridOperator) -> Result<Gap> {
    let n = op.len();
    if n < 2 {
        return Err(Error::Degenerate("spectral gap needs at least two cells".into()));
    }
    let m = op.mass().to_vec();
    let mtot: f64 = m.iter().sum();
    let b = BLOCK.min(n - 1);
    let ext = op.domain().extent();
    let sigma = 1.0 / (ext * ext);
    let solver = SpdSolver::new(op.shifted(sigma), 1e-13)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x15_0ca9);
    let centers = op.domain().centers().to_vec();
    let mut x: Vec<Vec<f64>> = (0..b)
        .map(|k| {
            (0..n)
                .map(|i| {
                    let c = if k < op.domain().dim() { centers[i][k] } else { 0.0 };
                    c + 0.1 * (rng.random::<f64>() - 0.5)
                })
                .collect()
        })
        .collect();
    let cap = (50.0 * (n as f64).sqrt()).ceil() as usize;
    let mut rhs = vec![0.0; n];
    let mut qx = vec![0.0; n];
    let mut last = f64::INFINITY;
    for it in 1..=cap {
        let mut y: Vec<Vec<f64>> = Vec::with_capacity(b);
        for col in x.iter_mut() {
            deflate(&m, mtot, col);
            for i in 0..n {
                rhs[i] = m[i] * col[i];
            }
            let mut out = col.clone();
            solver.solve(&rhs, &mut out)?;
            deflate(&m, mtot, &mut out);
            y.push(out);
        }
        // M-orthonormalize, twice for stability.
        for _ in 0..2 {
            for k in 0..b {
                for j in 0..k {
                    let (head, tail) = y.split_at_mut(k);
                    let c = m_dot(&m, &head[j], &tail[0]);
                    for (v, u) in tail[0].iter_mut().zip(&head[j]) {
                        *v -= c * u;
                    }
                }
                let nrm = m_dot(&m, &y[k], &y[k]).sqrt();
                if !(nrm > 1e-300) {
                    return Err(Error::SolverBreakdown("iteration block lost rank".into()));
                }
                for v in y[k].iter_mut() {
                    *v /= nrm;
                }
            }
        }
        let qy: Vec<Vec<f64>> = y
            .iter()
            .map(|v| {
                let mut out = vec![0.0; n];
                op.stiffness().mul(v, &mut out);
                out
            })
            .collect();
        let small: linalg::Mat = (0..b)
            .map(|i| (0..b).map(|j| 0.5 * (linalg::dot(&y[i], &qy[j]) + linalg::dot(&y[j], &qy[i]))).collect())
            .collect();
        let (vals, vecs) = linalg::jacobi_eigen(&small);
        // Ascending order of Ritz values.
        let order: Vec<usize> = (0..b).rev().collect();
        x = order
            .iter()
            .map(|&c| {
                let mut v = vec![0.0; n];
                for (k, yk) in y.iter().enumerate() {
                    let a = vecs[k][c];
                    for (vi, yi) in v.iter_mut().zip(yk) {
                        *vi += a * yi;
                    }
                }
                v
            })
            .collect();
        let theta = vals[order[0]];
        op.stiffness().mul(&x[0], &mut qx);
        let r2: f64 = (0..n).map(|i| (qx[i] - theta * m[i] * x[0][i]).powi(2) / m[i]).sum();
        let residual = r2.sqrt() / theta.abs().max(1e-300);
        last = residual;
        if residual <= RESIDUAL_TOL {
            let mut v = std::mem::take(&mut x[0]);
            let big = v.iter().cloned().fold(0.0f64, |a, c| if c.abs() > a.abs() { c } else { a });
            if big < 0.0 {
                v.iter_mut().for_each(|c| *c = -*c);
            }
            return Ok(Gap { lambda: theta, residual, iterations: it, vector: v });
        }
    }
    Err(Error::NoConvergence { iterations: cap, residual: last })
}

/// Gaps at `h` and `h/2` and their second-order extrapolation.
pub fn spectral_gap_richardson(domain: &Domain, h: f64) -> Result<GapReport> {
    let coarse = spectral_gap(&GridOperator::assemble(discretize(domain, h)?))?;
    let fine_op = GridOperator::assemble(discretize(domain, h / 2.0)?);
    let fine = spectral_gap(&fine_op)?;
    let lambda = (4.0 * fine.lambda - coarse.lambda) / 3.0;
    Ok(GapReport {
        h,
        cells: fine_op.len(),
        lambda_h: coarse.lambda,
        lambda_half: fine.lambda,
        lambda,
        d_poin: lambda.max(0.0).sqrt(),
        residual: coarse.residual.max(fine.residual),
    })
}
