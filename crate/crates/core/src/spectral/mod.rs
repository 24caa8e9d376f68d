//! Weighted Neumann Laplacian on rasterized domains.
//!
//! A [`GridDomain`] is a finite-volume discretization: cells carry masses
//! `w_i` and neighbouring cells share edges with conductances `e_ij`, both
//! normalized by the total mass. The Dirichlet form is
//! `Q(f) = Σ e_ij (f_i - f_j)²` and the mass form is `M(f) = Σ w_i f_i²`.
//!
//! Planar bodies use cut cells: the mass of a boundary cell is its area
//! inside the body and the conductance of a face is proportional to the
//! length of the face inside the body. Cells less than half inside are merged
//! into a neighbour, which keeps the ratio `Q_ii / M_ii` of order `h⁻²`.

mod eigen;
mod heat;

pub use eigen::{spectral_gap, spectral_gap_richardson, Gap, GapReport, RESIDUAL_TOL};
pub use heat::{
    bakry_ledoux_c, bakry_ledoux_check, gradient_decay_check, heat_evolve, ledoux_l1_check, tau, BakryLedoux,
    HeatState, Propagator, TAU_CONSTANT,
};

use crate::error::{Error, Result};
use crate::geometry::polygon::Polygon;
use crate::geometry::ConvexBody;
use crate::linalg::CsrMatrix;
use crate::measures::Measure1D;

/// Largest number of cells a grid may have.
pub const CELL_CAP: usize = 4_000_000;
/// Cut cells with a smaller fraction inside the body are merged.
const MERGE_FRACTION: f64 = 0.5;
const NONE: u32 = u32::MAX;

/// Something that can be rasterized.
#[derive(Debug, Clone)]
pub enum Domain {
    /// Uniform measure on a body of dimension 1, 2 or 3.
    Body(ConvexBody),
    Measure(Measure1D),
    /// Product of the factor measures; the grid is the Kronecker product.
    Product(Vec<Domain>),
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Body(b) => b.dim(),
            Domain::Measure(_) => 1,
            Domain::Product(f) => f.iter().map(Domain::dim).sum(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GridDomain {
    dim: usize,
    h: [f64; 3],
    centers: Vec<[f64; 3]>,
    weights: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
    /// Neighbour cell along `-x, +x, -y, +y, -z, +z`.
    neighbors: Vec<[u32; 6]>,
    /// Full cell of the grid, neither cut by the boundary nor merged.
    regular: Vec<bool>,
}

impl GridDomain {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Spacing along each axis (unused axes are zero).
    pub fn spacing(&self) -> [f64; 3] {
        self.h
    }

    /// Largest spacing over the used axes.
    pub fn h(&self) -> f64 {
        self.h[..self.dim].iter().cloned().fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn centers(&self) -> &[[f64; 3]] {
        &self.centers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Largest extent of the cell centres over the axes, plus one cell.
    pub fn extent(&self) -> f64 {
        (0..self.dim)
            .map(|a| {
                let (lo, hi) = self
                    .centers
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), c| (l.min(c[a]), u.max(c[a])));
                hi - lo + self.h[a]
            })
            .fold(0.0, f64::max)
    }

    /// Samples a function at the cell centres.
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        self.centers.iter().map(|c| f(&c[..self.dim])).collect()
    }

    /// `∫ f dμ` for a grid function.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    /// Weighted `L_q` norm; `q = ∞` gives the maximum over cells.
    pub fn norm(&self, f: &[f64], q: f64) -> f64 {
        if q.is_infinite() {
            return f.iter().fold(0.0, |m, v| m.max(v.abs()));
        }
        self.weights.iter().zip(f).map(|(w, v)| w * v.abs().powf(q)).sum::<f64>().powf(1.0 / q)
    }

    /// Euclidean norm of the discrete gradient at every cell: centred
    /// differences in the interior, one-sided where a neighbour is missing.
    /// Positions are cell centroids, so linear functions are differentiated
    /// exactly.
    pub fn gradient_norm(&self, f: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let nb = &self.neighbors[i];
                let mut s = 0.0;
                for a in 0..self.dim {
                    let (m, p) = (nb[2 * a], nb[2 * a + 1]);
                    let d = match (m != NONE, p != NONE) {
                        (true, true) => self.quotient(f, m as usize, p as usize, a),
                        (true, false) => self.quotient(f, m as usize, i, a),
                        (false, true) => self.quotient(f, i, p as usize, a),
                        (false, false) => 0.0,
                    };
                    s += d * d;
                }
                s.sqrt()
            })
            .collect()
    }

    /// True when the cell and every neighbour in its gradient stencil are
    /// regular grid cells.
    pub fn regular_stencil(&self, i: usize) -> bool {
        self.regular[i] && self.neighbors[i].iter().all(|&j| j == NONE || self.regular[j as usize])
    }

    /// Difference quotient along axis `a` over the actual centre spacing,
    /// which differs from `h` at cut cells.
    fn quotient(&self, f: &[f64], lo: usize, hi: usize, a: usize) -> f64 {
        (f[hi] - f[lo]) / (self.centers[hi][a] - self.centers[lo][a])
    }

    /// Number of connected components of the edge graph.
    fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.len());
        for &(i, j, _) in &self.edges {
            uf.union(i, j);
        }
        (0..self.len()).filter(|&i| uf.find(i) == i).count()
    }

    fn checked(self) -> Result<Self> {
        if self.is_empty() {
            return Err(Error::Empty("grid cells"));
        }
        let c = self.components();
        if c > 1 {
            return Err(Error::Disconnected { components: c });
        }
        Ok(self)
    }

    /// Kronecker product: masses multiply and an edge of one factor is
    /// weighted by the mass of the cell it is paired with in the other. The
    /// first factor's index runs fastest.
    pub fn product(a: &GridDomain, b: &GridDomain) -> Result<GridDomain> {
        let dim = a.dim + b.dim;
        if dim > 3 {
            return Err(Error::InvalidArgument(format!("product grid of dimension {dim}")));
        }
        let cells = a.len() * b.len();
        if cells > CELL_CAP {
            return Err(Error::GridTooLarge { cells, cap: CELL_CAP });
        }
        let na = a.len();
        let idx = |i: usize, k: usize| k * na + i;
        let mut h = [0.0; 3];
        h[..a.dim].copy_from_slice(&a.h[..a.dim]);
        h[a.dim..dim].copy_from_slice(&b.h[..b.dim]);
        let mut centers = Vec::with_capacity(cells);
        let mut weights = Vec::with_capacity(cells);
        let mut neighbors = Vec::with_capacity(cells);
        let mut regular = Vec::with_capacity(cells);
        for k in 0..b.len() {
            for i in 0..na {
                let mut c = [0.0; 3];
                c[..a.dim].copy_from_slice(&a.centers[i][..a.dim]);
                c[a.dim..dim].copy_from_slice(&b.centers[k][..b.dim]);
                centers.push(c);
                weights.push(a.weights[i] * b.weights[k]);
                regular.push(a.regular[i] && b.regular[k]);
                let mut nb = [NONE; 6];
                for s in 0..2 * a.dim {
                    let j = a.neighbors[i][s];
                    if j != NONE {
                        nb[s] = idx(j as usize, k) as u32;
                    }
                }
                for s in 0..2 * b.dim {
                    let l = b.neighbors[k][s];
                    if l != NONE {
                        nb[2 * a.dim + s] = idx(i, l as usize) as u32;
                    }
                }
                neighbors.push(nb);
            }
        }
        let mut edges = Vec::with_capacity(a.edges.len() * b.len() + b.edges.len() * na);
        for k in 0..b.len() {
            for &(i, j, e) in &a.edges {
                edges.push((idx(i, k), idx(j, k), e * b.weights[k]));
            }
        }
        for &(k, l, e) in &b.edges {
            for i in 0..na {
                edges.push((idx(i, k), idx(i, l), a.weights[i] * e));
            }
        }
        GridDomain { dim, h, centers, weights, edges, neighbors, regular }.checked()
    }
}

/// Rasterizes a domain at spacing `h`.
pub fn discretize(domain: &Domain, h: f64) -> Result<GridDomain> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid spacing {h}")));
    }
    match domain {
        Domain::Measure(m) => discretize_measure(m, h),
        Domain::Body(b) => match b.dim() {
            1 => {
                let (lo, hi) = b.bounding_box();
                discretize_measure(&Measure1D::uniform(lo[0], hi[0])?, h)
            }
            2 => discretize_planar(b, h),
            _ => discretize_solid(b, h),
        },
        Domain::Product(factors) => {
            let mut it = factors.iter();
            let first = it.next().ok_or(Error::Empty("product factors"))?;
            let mut g = discretize(first, h)?;
            for f in it {
                g = GridDomain::product(&g, &discretize(f, h)?)?;
            }
            Ok(g)
        }
    }
}

/// Cells of width close to `h` covering the support; masses from the density
/// at the cell centre and conductances from the geometric mean of the
/// neighbouring densities.
fn discretize_measure(m: &Measure1D, h: f64) -> Result<GridDomain> {
    let (lo, hi) = m.support();
    let n = ((hi - lo) / h - 1e-9).ceil().max(1.0) as usize;
    if n > CELL_CAP {
        return Err(Error::GridTooLarge { cells: n, cap: CELL_CAP });
    }
    let h = (hi - lo) / n as f64;
    let rho: Vec<f64> = (0..n).map(|i| m.density(lo + (i as f64 + 0.5) * h)).collect();
    let z: f64 = rho.iter().map(|r| r * h).sum();
    let mut id = vec![NONE; n];
    let mut centers = Vec::new();
    let mut weights = Vec::new();
    for i in 0..n {
        if rho[i] > 0.0 {
            id[i] = centers.len() as u32;
            centers.push([lo + (i as f64 + 0.5) * h, 0.0, 0.0]);
            weights.push(rho[i] * h / z);
        }
    }
    let mut edges = Vec::new();
    let mut neighbors = vec![[NONE; 6]; centers.len()];
    for i in 0..n.saturating_sub(1) {
        let (a, b) = (id[i], id[i + 1]);
        if a != NONE && b != NONE {
            edges.push((a as usize, b as usize, (rho[i] * rho[i + 1]).sqrt() / h / z));
            neighbors[a as usize][1] = b;
            neighbors[b as usize][0] = a;
        }
    }
    let regular = vec![true; centers.len()];
    GridDomain { dim: 1, h: [h, 0.0, 0.0], centers, weights, edges, neighbors, regular }.checked()
}

fn discretize_planar(body: &ConvexBody, h: f64) -> Result<GridDomain> {
    let poly = body.to_polygon(1024)?;
    let (lo, hi) = poly.bbox();
    let nx = ((hi[0] - lo[0]) / h - 1e-9).ceil().max(1.0) as usize;
    let ny = ((hi[1] - lo[1]) / h - 1e-9).ceil().max(1.0) as usize;
    if nx * ny > CELL_CAP {
        return Err(Error::GridTooLarge { cells: nx * ny, cap: CELL_CAP });
    }
    let corner = |ix: usize, iy: usize| [lo[0] + ix as f64 * h, lo[1] + iy as f64 * h];
    let inside: Vec<bool> =
        (0..(nx + 1) * (ny + 1)).map(|k| poly.contains(corner(k % (nx + 1), k / (nx + 1)), 1e-12)).collect();
    let corner_in = |ix: usize, iy: usize| inside[iy * (nx + 1) + ix];
    let full = |ix: usize, iy: usize| {
        corner_in(ix, iy) && corner_in(ix + 1, iy) && corner_in(ix, iy + 1) && corner_in(ix + 1, iy + 1)
    };
    let cell_area = h * h;
    // Area fraction and centroid of every cell's part inside the body.
    let parts: Vec<(f64, [f64; 2])> = (0..nx * ny)
        .map(|k| {
            let (ix, iy) = (k % nx, k / nx);
            let a = corner(ix, iy);
            let b = corner(ix + 1, iy + 1);
            if full(ix, iy) {
                (1.0, [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])])
            } else {
                let piece = clip_rect(&poly, a, b);
                let area = piece.area();
                if area > 0.0 {
                    (area / cell_area, piece.centroid())
                } else {
                    (0.0, a)
                }
            }
        })
        .collect();
    let frac: Vec<f64> = parts.iter().map(|p| p.0).collect();
    // Face apertures as fractions of h; east faces then north faces.
    let aperture = |p: [f64; 2], q: [f64; 2], both_full: bool| {
        if both_full {
            1.0
        } else {
            poly.segment_inside(p, q) / h
        }
    };
    let mut raw_edges: Vec<(usize, usize, f64)> = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let k = iy * nx + ix;
            if frac[k] <= 0.0 {
                continue;
            }
            if ix + 1 < nx && frac[k + 1] > 0.0 {
                let a = aperture(corner(ix + 1, iy), corner(ix + 1, iy + 1), full(ix, iy) && full(ix + 1, iy));
                if a > 0.0 {
                    raw_edges.push((k, k + 1, a));
                }
            }
            if iy + 1 < ny && frac[k + nx] > 0.0 {
                let a = aperture(corner(ix, iy + 1), corner(ix + 1, iy + 1), full(ix, iy) && full(ix, iy + 1));
                if a > 0.0 {
                    raw_edges.push((k, k + nx, a));
                }
            }
        }
    }
    let clusters = merge_small_cells(&frac, &raw_edges);
    assemble_planar(nx, ny, h, &parts, &raw_edges, &clusters)
}

fn clip_rect(poly: &Polygon, a: [f64; 2], b: [f64; 2]) -> Polygon {
    poly.clip_halfplane([1.0, 0.0], b[0])
        .clip_halfplane([-1.0, 0.0], -a[0])
        .clip_halfplane([0.0, 1.0], b[1])
        .clip_halfplane([0.0, -1.0], -a[1])
}

/// Root cell of every grid cell after merging small cut cells into the
/// neighbouring cluster of largest area. Cells outside the body map to `NONE`.
fn merge_small_cells(frac: &[f64], edges: &[(usize, usize, f64)]) -> Vec<u32> {
    let n = frac.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(i, j, _) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut uf = UnionFind::new(n);
    let mut mass = frac.to_vec();
    let mut small: Vec<usize> = (0..n).filter(|&k| frac[k] > 0.0 && frac[k] < MERGE_FRACTION).collect();
    small.sort_by(|&a, &b| frac[b].total_cmp(&frac[a]).then(a.cmp(&b)));
    for k in small {
        let rk = uf.find(k);
        let mut best: Option<(f64, usize)> = None;
        for &j in &adj[k] {
            let rj = uf.find(j);
            if rj == rk {
                continue;
            }
            if best.is_none_or(|(m, r)| mass[rj] > m || (mass[rj] == m && rj < r)) {
                best = Some((mass[rj], rj));
            }
        }
        if let Some((_, r)) = best {
            uf.parent[rk] = r;
            mass[r] += mass[rk];
        }
    }
    (0..n).map(|k| if frac[k] > 0.0 { uf.find(k) as u32 } else { NONE }).collect()
}

fn assemble_planar(
    nx: usize,
    ny: usize,
    h: f64,
    parts: &[(f64, [f64; 2])],
    raw_edges: &[(usize, usize, f64)],
    roots: &[u32],
) -> Result<GridDomain> {
    let n = nx * ny;
    // Clusters are numbered in row-major order of their roots.
    let mut id = vec![NONE; n];
    let mut count = 0u32;
    for k in 0..n {
        if roots[k] == k as u32 {
            id[k] = count;
            count += 1;
        }
    }
    let cell_of = |k: usize| -> u32 {
        if roots[k] == NONE {
            NONE
        } else {
            id[roots[k] as usize]
        }
    };
    let count = count as usize;
    let total: f64 = parts.iter().map(|p| p.0).sum::<f64>() * h * h;
    let mut weights = vec![0.0; count];
    let mut centers = vec![[0.0; 3]; count];
    for k in 0..n {
        let c = cell_of(k);
        if c != NONE {
            let (f, x) = parts[k];
            let c = c as usize;
            weights[c] += f * h * h / total;
            centers[c][0] += f * x[0];
            centers[c][1] += f * x[1];
        }
    }
    let mut size = vec![0usize; count];
    for k in 0..n {
        let c = cell_of(k);
        if c != NONE {
            size[c as usize] += 1;
        }
    }
    let regular: Vec<bool> =
        (0..n).filter(|&k| roots[k] == k as u32).map(|k| parts[k].0 == 1.0 && size[id[k] as usize] == 1).collect();
    // Cluster centroids.
    for (c, w) in centers.iter_mut().zip(&weights) {
        let f = w * total / (h * h);
        c[0] /= f;
        c[1] /= f;
    }
    let mut neighbors = vec![[NONE; 6]; count];
    for k in 0..n {
        if roots[k] != k as u32 {
            continue;
        }
        let c = id[k] as usize;
        let (ix, iy) = (k % nx, k / nx);
        let probe = |jx: isize, jy: isize| -> u32 {
            if jx < 0 || jy < 0 || jx as usize >= nx || jy as usize >= ny {
                return NONE;
            }
            let k = jy as usize * nx + jx as usize;
            // Only roots are adjacent along the axis; a merged cell belongs
            // to a cluster that may sit diagonally.
            let j = if roots[k] == k as u32 { id[k] } else { NONE };
            if j == c as u32 {
                NONE
            } else {
                j
            }
        };
        let (x, y) = (ix as isize, iy as isize);
        neighbors[c] = [probe(x - 1, y), probe(x + 1, y), probe(x, y - 1), probe(x, y + 1), NONE, NONE];
    }
    // Apertures summed per cluster pair; in 2-D the conductance of a full face is 1.
    let mut pairs: Vec<(usize, usize, f64)> = raw_edges
        .iter()
        .filter_map(|&(i, j, a)| {
            let (ci, cj) = (cell_of(i), cell_of(j));
            if ci == cj {
                None
            } else {
                let (u, v) = if ci < cj { (ci, cj) } else { (cj, ci) };
                Some((u as usize, v as usize, a / total))
            }
        })
        .collect();
    pairs.sort_by_key(|a| (a.0, a.1));
    let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(pairs.len());
    for p in pairs {
        match edges.last_mut() {
            Some(l) if l.0 == p.0 && l.1 == p.1 => l.2 += p.2,
            _ => edges.push(p),
        }
    }
    GridDomain { dim: 2, h: [h, h, 0.0], centers, weights, edges, neighbors, regular }.checked()
}

/// Bodies in three dimensions: full cells whose centres lie in the body.
fn discretize_solid(body: &ConvexBody, h: f64) -> Result<GridDomain> {
    let (lo, hi) = body.bounding_box();
    let n: Vec<usize> = (0..3).map(|a| ((hi[a] - lo[a]) / h - 1e-9).ceil().max(1.0) as usize).collect();
    let total = n[0] * n[1] * n[2];
    if total > CELL_CAP {
        return Err(Error::GridTooLarge { cells: total, cap: CELL_CAP });
    }
    let mut id = vec![NONE; total];
    let mut centers = Vec::new();
    for k in 0..total {
        let (ix, iy, iz) = (k % n[0], (k / n[0]) % n[1], k / (n[0] * n[1]));
        let c = [lo[0] + (ix as f64 + 0.5) * h, lo[1] + (iy as f64 + 0.5) * h, lo[2] + (iz as f64 + 0.5) * h];
        if body.contains_unchecked(&c) {
            id[k] = centers.len() as u32;
            centers.push(c);
        }
    }
    let count = centers.len();
    let w = 1.0 / count as f64;
    // Face conductance h^(n-2) / h^n per unit mass, normalized like the masses.
    let e = w / (h * h);
    let mut edges = Vec::new();
    let mut neighbors = vec![[NONE; 6]; count];
    let stride = [1, n[0], n[0] * n[1]];
    for k in 0..total {
        if id[k] == NONE {
            continue;
        }
        let coords = [k % n[0], (k / n[0]) % n[1], k / (n[0] * n[1])];
        for a in 0..3 {
            if coords[a] + 1 < n[a] {
                let j = id[k + stride[a]];
                if j != NONE {
                    edges.push((id[k] as usize, j as usize, e));
                    neighbors[id[k] as usize][2 * a + 1] = j;
                    neighbors[j as usize][2 * a] = id[k];
                }
            }
        }
    }
    GridDomain { dim: 3, h: [h, h, h], centers, weights: vec![w; count], edges, neighbors, regular: vec![true; count] }
        .checked()
}

/// Assembled forms of a grid domain.
#[derive(Debug, Clone)]
pub struct GridOperator {
    domain: GridDomain,
    q: CsrMatrix,
}

impl GridOperator {
    pub fn assemble(domain: GridDomain) -> Self {
        let n = domain.len();
        let mut diag = vec![0.0; n];
        let mut off = Vec::with_capacity(domain.edges.len());
        for &(i, j, e) in &domain.edges {
            diag[i] += e;
            diag[j] += e;
            off.push((i.min(j), i.max(j), -e));
        }
        let q = CsrMatrix::from_symmetric_triplets(n, &diag, &off);
        GridOperator { domain, q }
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn mass(&self) -> &[f64] {
        &self.domain.weights
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.q
    }

    /// Dirichlet form `Q(f)`.
    pub fn energy(&self, f: &[f64]) -> f64 {
        self.domain.edges.iter().map(|&(i, j, e)| e * (f[i] - f[j]).powi(2)).sum()
    }

    /// `Q + s M` in sparse form.
    pub(crate) fn shifted(&self, s: f64) -> CsrMatrix {
        let mut a = self.q.clone();
        for i in 0..a.n {
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                if a.cols[k] == i {
                    a.vals[k] += s * self.domain.weights[i];
                }
            }
        }
        a
    }

    /// Eigenfunction dump, one row per cell.
    pub fn eigenvector_csv(&self, v: &[f64]) -> String {
        let mut s = String::from("cell_x,cell_y,eigfunction\n");
        for (c, x) in self.domain.centers.iter().zip(v) {
            s.push_str(&format!("{:.9},{:.9},{:.12e}\n", c[0], c[1], x));
        }
        s
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
