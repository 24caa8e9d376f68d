//! Small dense helpers (n <= 3) and the sparse symmetric solvers used by the
//! grid operators.

use crate::error::{Error, Result};

/// Row-major square matrix of small order.
pub type Mat = Vec<Vec<f64>>;

pub fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

pub fn mat_vec(a: &Mat, x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum()).collect()
}

pub fn transpose(a: &Mat) -> Mat {
    let n = a.len();
    let m = if n == 0 { 0 } else { a[0].len() };
    (0..m).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Determinant and inverse by Gauss-Jordan elimination with partial pivoting.
pub fn det_inverse(a: &Mat) -> (f64, Option<Mat>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    let scale = a.iter().flat_map(|r| r.iter()).fold(0.0f64, |acc, v| acc.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        if m[piv][col].abs() <= 1e-14 * scale {
            return (0.0, None);
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    let inv = m.into_iter().map(|r| r[n..].to_vec()).collect();
    (det, Some(inv))
}

/// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in descending order and the matching eigenvectors (as columns).
pub fn jacobi_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.len();
    let mut m = a.clone();
    let mut v = identity(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j][j].total_cmp(&m[i][i]));
    let vals = order.iter().map(|&i| m[i][i]).collect();
    let vecs = (0..n).map(|r| order.iter().map(|&c| v[r][c]).collect()).collect();
    (vals, vecs)
}

/// Symmetric sparse matrix in compressed-row form (both triangles stored).
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from lower-or-upper triplets; each off-diagonal entry is mirrored.
    pub fn from_symmetric_triplets(n: usize, diag: &[f64], off: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = (0..n).map(|i| vec![(i, diag[i])]).collect();
        for &(i, j, v) in off {
            rows[i].push((j, v));
            rows[j].push((i, v));
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            for (c, v) in r {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { n, row_ptr, cols, vals }
    }

    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[i] = s;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1]).find(|&k| self.cols[k] == i).map(|k| self.vals[k]).unwrap_or(0.0)
            })
            .collect()
    }

    /// Lowest column index touched by each row (the skyline envelope).
    fn envelope(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.cols[self.row_ptr[i]].min(i)).collect()
    }
}

/// Envelope (skyline) Cholesky factor L of an SPD matrix, stored row-wise from
/// the first structurally nonzero column to the diagonal.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    n: usize,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.n;
        let first = a.envelope();
        let mut start = Vec::with_capacity(n + 1);
        let mut total = 0usize;
        for i in 0..n {
            start.push(total);
            total += i - first[i] + 1;
        }
        start.push(total);
        let mut data = vec![0.0; total];
        for i in 0..n {
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                let j = a.cols[k];
                if j <= i {
                    data[start[i] + j - first[i]] = a.vals[k];
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut s = data[start[i] + j - fi];
                let ri = &data[start[i] + lo - fi..start[i] + j - fi];
                let rj = &data[start[j] + lo - fj..start[j] + j - fj];
                s -= ri.iter().zip(rj).map(|(a, b)| a * b).sum::<f64>();
                if j == i {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(Error::SolverBreakdown(format!("non-positive pivot {s:e} at row {i}")));
                    }
                    data[start[i] + i - fi] = s.sqrt();
                } else {
                    let d = data[start[j] + j - fj];
                    data[start[i] + j - fi] = s / d;
                }
            }
        }
        Ok(SkylineCholesky { n, first, start, data })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let s: f64 = row[..i - fi].iter().zip(&b[fi..i]).map(|(a, x)| a * x).sum();
            b[i] = (b[i] - s) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            b[i] /= row[i - fi];
            let xi = b[i];
            for (k, a) in row[..i - fi].iter().enumerate() {
                b[fi + k] -= a * xi;
            }
        }
    }

    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }
}

/// Jacobi-preconditioned conjugate gradients; returns iterations used.
pub fn pcg(a: &CsrMatrix, b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> Result<usize> {
    let n = a.n;
    let diag = a.diagonal();
    let mut r = vec![0.0; n];
    a.mul(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let bnorm = norm2(b).max(f64::MIN_POSITIVE);
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        if norm2(&r) <= rel_tol * bnorm {
            return Ok(it);
        }
        a.mul(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::SolverBreakdown(format!("p'Ap = {pap:e}")));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = norm2(&r) / bnorm;
    if res <= rel_tol {
        Ok(max_iter)
    } else {
        Err(Error::NoConvergence { iterations: max_iter, residual: res })
    }
}

/// Direct factorization when the envelope is small enough, CG otherwise.
#[derive(Debug, Clone)]
pub enum SpdSolver {
    Direct(SkylineCholesky),
    Iterative { matrix: CsrMatrix, rel_tol: f64 },
}

/// Envelope entries above which the iterative path is used.
const SKYLINE_BUDGET: usize = 25_000_000;

impl SpdSolver {
    pub fn new(a: CsrMatrix, rel_tol: f64) -> Result<Self> {
        let env = a.envelope();
        let size: usize = env.iter().enumerate().map(|(i, f)| i - f + 1).sum();
        if size <= SKYLINE_BUDGET {
            Ok(SpdSolver::Direct(SkylineCholesky::factor(&a)?))
        } else {
            Ok(SpdSolver::Iterative { matrix: a, rel_tol })
        }
    }

    /// Solves A x = b, using `x` as the initial guess for the iterative path.
    pub fn solve(&self, b: &[f64], x: &mut [f64]) -> Result<()> {
        match self {
            SpdSolver::Direct(ch) => {
                x.copy_from_slice(b);
                ch.solve_in_place(x);
                Ok(())
            }
            SpdSolver::Iterative { matrix, rel_tol } => {
                let cap = 20 * matrix.n + 100;
                pcg(matrix, b, x, *rel_tol, cap).map(|_| ())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_rotation_scaling() {
        let a = vec![vec![0.0, -2.0], vec![3.0, 0.0]];
        let (det, inv) = det_inverse(&a);
        assert!((det - 6.0).abs() < 1e-14);
        let inv = inv.unwrap();
        let p = mat_vec(&a, &mat_vec(&inv, &[1.0, 2.0]));
        assert!((p[0] - 1.0).abs() < 1e-14 && (p[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(det_inverse(&a).1.is_none());
    }

    #[test]
    fn jacobi_recovers_known_spectrum() {
        let a = vec![vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 1.0], vec![0.0, 1.0, 2.0]];
        let (vals, vecs) = jacobi_eigen(&a);
        let s2 = 2f64.sqrt();
        let want = [2.0 + s2, 2.0, 2.0 - s2];
        for (v, w) in vals.iter().zip(want) {
            assert!((v - w).abs() < 1e-12);
        }
        let col: Vec<f64> = (0..3).map(|r| vecs[r][0]).collect();
        let av = mat_vec(&a, &col);
        for r in 0..3 {
            assert!((av[r] - vals[0] * col[r]).abs() < 1e-12);
        }
    }

    fn path_laplacian_plus_identity(n: usize) -> CsrMatrix {
        let diag: Vec<f64> = (0..n).map(|i| 1.0 + if i == 0 || i == n - 1 { 1.0 } else { 2.0 }).collect();
        let off: Vec<(usize, usize, f64)> = (1..n).map(|i| (i, i - 1, -1.0)).collect();
        CsrMatrix::from_symmetric_triplets(n, &diag, &off)
    }

    #[test]
    fn skyline_and_cg_agree() {
        let a = path_laplacian_plus_identity(50);
        let b: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let ch = SkylineCholesky::factor(&a).unwrap();
        let mut x1 = b.clone();
        ch.solve_in_place(&mut x1);
        let mut x2 = vec![0.0; 50];
        pcg(&a, &b, &mut x2, 1e-13, 1000).unwrap();
        for (u, v) in x1.iter().zip(&x2) {
            assert!((u - v).abs() < 1e-10);
        }
        let mut ax = vec![0.0; 50];
        a.mul(&x1, &mut ax);
        for (u, v) in ax.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = CsrMatrix::from_symmetric_triplets(2, &[1.0, 1.0], &[(1, 0, 2.0)]);
        assert!(SkylineCholesky::factor(&a).is_err());
    }
}
