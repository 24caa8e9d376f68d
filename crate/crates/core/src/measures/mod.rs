//! Log-concave probability measures.
//!
//! One-dimensional measures are tabulated on a uniform grid of node
//! densities. Between two nodes the density is log-linear, which is exact
//! when the potential is piecewise linear with kinks on nodes. Cell masses,
//! the CDF and its inverse are all available in closed form under that model.

mod nd;
mod quadrature;

pub use nd::{covariance, sample, CovarianceSummary, MeasureND};
pub use quadrature::Quadrature;

use crate::error::{Error, Result};
use crate::Estimate;

/// Default node count for analytic potentials.
pub const DEFAULT_NODES: usize = 8001;
/// CDF values closer than this are treated as equal, so rounding in the
/// cumulative sums cannot hide a flat stretch of the CDF.
const CDF_TIE: f64 = 1e-13;
/// Supports are truncated where the density drops below this fraction of its maximum.
pub const TRUNCATION: f64 = 1e-16;

#[derive(Debug, Clone)]
pub struct Measure1D {
    x0: f64,
    h: f64,
    /// Normalized node densities; zero outside the support.
    rho: Vec<f64>,
    /// CDF at the nodes.
    cdf: Vec<f64>,
    /// Mass lost to truncation, relative to the total.
    truncation: f64,
    log_concave: bool,
}

/// Mass of a cell of width `h` with log-linear density from `a` to `b`.
fn cell_mass(a: f64, b: f64, h: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    let beta = (b / a).ln();
    if beta.abs() < 1e-12 {
        h * 0.5 * (a + b)
    } else {
        h * a * beta.exp_m1() / beta
    }
}

/// Mass of the first fraction `s` of such a cell.
fn partial_mass(a: f64, b: f64, h: f64, s: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    let beta = (b / a).ln();
    if beta.abs() < 1e-12 {
        h * s * (a + 0.5 * s * (b - a))
    } else {
        h * a * (beta * s).exp_m1() / beta
    }
}

impl Measure1D {
    /// Builds from unnormalized node densities on `x0 + i h`.
    fn from_nodes(x0: f64, h: f64, mut rho: Vec<f64>, truncation: f64, log_concave: bool) -> Result<Self> {
        if rho.len() < 2 {
            return Err(Error::InvalidArgument("need at least two nodes".into()));
        }
        if rho.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::InvalidArgument("densities must be finite and nonnegative".into()));
        }
        let n = rho.len();
        let mut cdf = vec![0.0; n];
        for i in 1..n {
            cdf[i] = cdf[i - 1] + cell_mass(rho[i - 1], rho[i], h);
        }
        let z = cdf[n - 1];
        if !(z > 0.0) {
            return Err(Error::Degenerate("density has zero mass".into()));
        }
        for r in rho.iter_mut() {
            *r /= z;
        }
        for c in cdf.iter_mut() {
            *c /= z;
        }
        cdf[n - 1] = 1.0;
        Ok(Measure1D { x0, h, rho, cdf, truncation, log_concave })
    }

    /// Density `exp(-psi)` on `[lo, hi]` sampled at `nodes` points. The
    /// potential must be convex on the nodes (second differences >= -1e-9).
    pub fn from_potential(psi: impl Fn(f64) -> f64, lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        if !(hi > lo) || nodes < 3 {
            return Err(Error::InvalidArgument(format!("bad grid [{lo}, {hi}] x {nodes}")));
        }
        let h = (hi - lo) / (nodes - 1) as f64;
        let vals: Vec<f64> = (0..nodes).map(|i| psi(lo + i as f64 * h)).collect();
        check_convex(&vals)?;
        let pmin = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let rho = vals.iter().map(|p| (pmin - p).exp()).collect();
        Self::from_nodes(lo, h, rho, 0.0, true)
    }

    /// Like [`from_potential`](Self::from_potential) for a potential on the
    /// whole line (or a half-line starting at `lower`), truncated where the
    /// density falls below `TRUNCATION` times its value at `mode`.
    pub fn from_potential_truncated(
        psi: impl Fn(f64) -> f64,
        mode: f64,
        lower: Option<f64>,
        nodes: usize,
    ) -> Result<Self> {
        let cut = -TRUNCATION.ln();
        let p0 = psi(mode);
        let edge = |dir: f64| {
            let mut step = 1.0;
            while psi(mode + dir * step) - p0 <= cut {
                step *= 2.0;
                if step > 1e12 {
                    return Err(Error::Divergent("potential does not grow".into()));
                }
            }
            let (mut a, mut b) = (0.0, step);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if psi(mode + dir * m) - p0 <= cut {
                    a = m;
                } else {
                    b = m;
                }
            }
            Ok(mode + dir * b)
        };
        let hi = edge(1.0)?;
        let lo = match lower {
            Some(l) => l,
            None => edge(-1.0)?,
        };
        let mut m = Self::from_potential(&psi, lo, hi, nodes)?;
        // Log-concave tails beyond a cut decay at least exponentially with
        // the slope at the cut, so density / slope bounds the lost mass.
        let tail = |x: f64, dir: f64| {
            let d = 1e-6 * (hi - lo);
            let slope = (psi(x + dir * d) - psi(x)) / d;
            (p0 - psi(x)).exp() / slope.max(1e-300)
        };
        let mut lost = tail(hi, 1.0);
        if lower.is_none() {
            lost += tail(lo, -1.0);
        }
        m.truncation = lost * m.rho.iter().copied().fold(0.0, f64::max);
        Ok(m)
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::from_potential(|_| 0.0, a, b, DEFAULT_NODES)
    }

    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        if !(sd > 0.0) {
            return Err(Error::InvalidArgument("sd must be positive".into()));
        }
        // Odd node count on a symmetric range puts the mode on a node.
        let half = sd * (2.0 * -TRUNCATION.ln()).sqrt();
        let mut m = Self::from_potential(|x| 0.5 * ((x - mean) / sd).powi(2), mean - half, mean + half, DEFAULT_NODES)?;
        m.truncation = libm::erfc(half / (sd * std::f64::consts::SQRT_2));
        Ok(m)
    }

    /// Two-sided exponential `exp(-|x - loc| / scale) / (2 scale)`.
    pub fn laplace(loc: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::InvalidArgument("scale must be positive".into()));
        }
        let half = scale * -TRUNCATION.ln();
        let mut m = Self::from_potential(|x| (x - loc).abs() / scale, loc - half, loc + half, DEFAULT_NODES)?;
        m.truncation = TRUNCATION;
        Ok(m)
    }

    /// One-sided exponential with the given rate on `[0, inf)`.
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0) {
            return Err(Error::InvalidArgument("rate must be positive".into()));
        }
        let hi = -TRUNCATION.ln() / rate;
        let mut m = Self::from_potential(|x| rate * x, 0.0, hi, DEFAULT_NODES)?;
        m.truncation = TRUNCATION;
        Ok(m)
    }

    /// Piecewise-linear potential through `(x, psi)` breakpoints, tabulated on
    /// `nodes` points spanning the first to last breakpoint.
    pub fn table(breaks: &[(f64, f64)], nodes: usize) -> Result<Self> {
        if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidArgument("breakpoints must be increasing".into()));
        }
        let lo = breaks[0].0;
        let hi = breaks[breaks.len() - 1].0;
        let psi = |x: f64| {
            let k = breaks.partition_point(|b| b.0 <= x).clamp(1, breaks.len() - 1);
            let (a, b) = (breaks[k - 1], breaks[k]);
            a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
        };
        Self::from_potential(psi, lo, hi, nodes)
    }

    /// The uniform measure on `[0,1]` with the open middle gap
    /// `(1/2 - 1/m, 1/2 + 1/m)` removed. Not log-concave; it exists only as a
    /// negative control and must be requested explicitly.
    pub fn gap_counterexample(m: u32, allow_non_logconcave: bool) -> Result<Self> {
        if !allow_non_logconcave {
            return Err(Error::NotLogConcave("gap counterexample requested without opt-in".into()));
        }
        if m < 3 {
            return Err(Error::InvalidArgument("gap counterexample needs m >= 3".into()));
        }
        // Choose the grid so both gap endpoints land on nodes.
        let per = 2 * m as usize;
        let cells = per * (DEFAULT_NODES - 1).div_ceil(per);
        let h = 1.0 / cells as f64;
        let left = cells / 2 - cells / m as usize;
        let right = cells / 2 + cells / m as usize;
        let rho = (0..=cells).map(|i| if i <= left || i >= right { 1.0 } else { 0.0 }).collect();
        Self::from_nodes(0.0, h, rho, 0.0, false)
    }

    pub fn is_log_concave(&self) -> bool {
        self.log_concave
    }

    /// Constant density on a bounded support.
    pub fn is_uniform(&self) -> bool {
        let top = self.rho.iter().copied().fold(0.0, f64::max);
        self.truncation == 0.0 && self.rho.iter().all(|r| (r - top).abs() <= 1e-12 * top)
    }

    pub fn nodes(&self) -> usize {
        self.rho.len()
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }

    pub fn node_density(&self, i: usize) -> f64 {
        self.rho[i]
    }

    pub fn node_cdf(&self, i: usize) -> f64 {
        self.cdf[i]
    }

    /// Grid range `[x_min, x_max]`.
    pub fn range(&self) -> (f64, f64) {
        (self.x0, self.node(self.rho.len() - 1))
    }

    /// Smallest interval carrying all the mass.
    pub fn support(&self) -> (f64, f64) {
        let n = self.rho.len();
        let first = (0..n - 1).find(|&i| self.cdf[i + 1] > 0.0).unwrap_or(0);
        let last = (1..n).rev().find(|&i| self.cdf[i - 1] < 1.0).unwrap_or(n - 1);
        (self.node(first), self.node(last))
    }

    /// Relative mass discarded by truncating an unbounded support.
    pub fn truncation_error(&self) -> f64 {
        self.truncation
    }

    /// Potential table `-ln(rho)` (infinite off the support).
    pub fn psi_table(&self) -> Vec<f64> {
        self.rho.iter().map(|r| if *r > 0.0 { -r.ln() } else { f64::INFINITY }).collect()
    }

    /// Potential at `x`, linear between nodes.
    pub fn psi(&self, x: f64) -> f64 {
        let d = self.density(x);
        if d > 0.0 {
            -d.ln()
        } else {
            f64::INFINITY
        }
    }

    /// Cell index `i` and fraction `s` with `x = x_i + s h`, clamped to the grid.
    fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.rho.len();
        let u = (x - self.x0) / self.h;
        let i = (u.floor().max(0.0) as usize).min(n - 2);
        (i, (u - i as f64).clamp(0.0, 1.0))
    }

    /// Density at `x`; for points on a node the node value is returned.
    pub fn density(&self, x: f64) -> f64 {
        let (lo, hi) = self.range();
        if x < lo || x > hi {
            return 0.0;
        }
        let (i, s) = self.locate(x);
        self.interp(i, s)
    }

    fn interp(&self, i: usize, s: f64) -> f64 {
        let (a, b) = (self.rho[i], self.rho[i + 1]);
        if s == 0.0 {
            a
        } else if s == 1.0 {
            b
        } else if a <= 0.0 || b <= 0.0 {
            0.0
        } else {
            a * (b / a).powf(s)
        }
    }

    /// Interpolation error bound for the density at `x`: the change of the
    /// log-slope across neighbouring cells, times the density, over 8.
    pub fn density_error(&self, x: f64) -> f64 {
        let n = self.rho.len();
        let (i, _) = self.locate(x);
        let slope = |j: usize| {
            if j + 1 >= n || self.rho[j] <= 0.0 || self.rho[j + 1] <= 0.0 {
                0.0
            } else {
                (self.rho[j + 1] / self.rho[j]).ln()
            }
        };
        let prev = if i > 0 { slope(i - 1) } else { slope(i) };
        let next = slope((i + 1).min(n - 2));
        self.density(x) * (next - prev).abs() / 8.0
    }

    /// One-sided density limit at `x` from the right (`right = true`) or left.
    pub fn density_limit(&self, x: f64, right: bool) -> f64 {
        let (lo, hi) = self.range();
        if (right && x >= hi) || (!right && x <= lo) || x < lo || x > hi {
            return 0.0;
        }
        let u = (x - self.x0) / self.h;
        let n = self.rho.len();
        let i = if right { (u.floor() as usize).min(n - 2) } else { ((u.ceil() as usize).max(1) - 1).min(n - 2) };
        let s = (u - i as f64).clamp(0.0, 1.0);
        let (a, b) = (self.rho[i], self.rho[i + 1]);
        if a <= 0.0 || b <= 0.0 {
            0.0
        } else {
            a * (b / a).powf(s)
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.range();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let (i, s) = self.locate(x);
        (self.cdf[i] + partial_mass(self.rho[i], self.rho[i + 1], self.h, s)).min(1.0)
    }

    /// `inf { x : F(x) >= t }`, the exact inverse of the tabulated CDF.
    pub fn quantile(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidArgument(format!("quantile level {t} outside (0,1)")));
        }
        Ok(self.quantile_unchecked(t))
    }

    fn quantile_unchecked(&self, t: f64) -> f64 {
        let n = self.rho.len();
        // First node whose CDF reaches t; the answer lies in the cell before it.
        let k = self.cdf.partition_point(|c| *c < t - CDF_TIE).clamp(1, n - 1);
        let i = k - 1;
        let (a, b) = (self.rho[i], self.rho[i + 1]);
        let r = t - self.cdf[i];
        let beta = if a > 0.0 && b > 0.0 { (b / a).ln() } else { 0.0 };
        let s = if beta.abs() < 1e-12 {
            // Linear density model in this degenerate case, matching partial_mass.
            let (p, q) = (0.5 * (b - a), a);
            let c = r / self.h;
            if p == 0.0 {
                c / q
            } else {
                (2.0 * c) / (q + (q * q + 4.0 * p * c).max(0.0).sqrt())
            }
        } else {
            (beta * r / (self.h * a)).ln_1p() / beta
        };
        self.node(i) + s.clamp(0.0, 1.0) * self.h
    }

    /// The level set `{x : F(x) = t}` as `[inf, sup]`; a nondegenerate range
    /// means the CDF is flat there.
    pub fn quantile_range(&self, t: f64) -> Result<(f64, f64)> {
        let lo = self.quantile(t)?;
        let n = self.rho.len();
        // sup { x : F(x) <= t }: last node with CDF <= t, then within its cell.
        let k = self.cdf.partition_point(|c| *c <= t + CDF_TIE);
        if k >= n {
            return Ok((lo, self.node(n - 1)));
        }
        let hi = if k == 0 {
            self.x0
        } else {
            let i = k - 1;
            if self.cdf[i] < t - CDF_TIE {
                lo
            } else {
                self.node(i)
            }
        };
        Ok((lo, hi.max(lo)))
    }

    /// Per-cell Simpson rule with the exact log-linear midpoint density.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        let n = self.rho.len();
        let mut s = 0.0;
        for i in 0..n - 1 {
            let (a, b) = (self.rho[i], self.rho[i + 1]);
            if a <= 0.0 || b <= 0.0 {
                continue;
            }
            let x = self.node(i);
            let m = (a * b).sqrt();
            s += self.h / 6.0 * (g(x) * a + 4.0 * g(x + 0.5 * self.h) * m + g(x + self.h) * b);
        }
        s
    }

    /// Simpson nodes and normalized weights, suitable as a point quadrature.
    pub fn simpson_points(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.rho.len();
        let mut xs = Vec::with_capacity(2 * n);
        let mut ws = Vec::with_capacity(2 * n);
        let mut pending: Option<(f64, f64)> = None;
        for i in 0..n - 1 {
            let (a, b) = (self.rho[i], self.rho[i + 1]);
            if a <= 0.0 || b <= 0.0 {
                if let Some(p) = pending.take() {
                    xs.push(p.0);
                    ws.push(p.1);
                }
                continue;
            }
            let x = self.node(i);
            let mut wl = self.h / 6.0 * a;
            if let Some(p) = pending.take() {
                wl += p.1;
            }
            xs.push(x);
            ws.push(wl);
            xs.push(x + 0.5 * self.h);
            ws.push(self.h / 6.0 * 4.0 * (a * b).sqrt());
            pending = Some((x + self.h, self.h / 6.0 * b));
        }
        if let Some(p) = pending {
            xs.push(p.0);
            ws.push(p.1);
        }
        let total: f64 = ws.iter().sum();
        for w in ws.iter_mut() {
            *w /= total;
        }
        (xs, ws)
    }

    pub fn mass(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    pub fn mean(&self) -> f64 {
        self.integrate(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.integrate(|x| (x - m) * (x - m))
    }

    pub fn covariance(&self) -> CovarianceSummary {
        let v = self.variance();
        CovarianceSummary { mean: vec![self.mean()], cov: vec![vec![v]], sigma1: v.max(0.0).sqrt(), std_err: 0.0 }
    }

    /// Pushforward of the measure under the affine map `x -> s x + c`.
    pub fn affine_image(&self, s: f64, c: f64) -> Result<Self> {
        if s == 0.0 || !s.is_finite() {
            return Err(Error::SingularMap(s.abs()));
        }
        let mut rho: Vec<f64> = self.rho.clone();
        let mut x0 = s * self.x0 + c;
        if s < 0.0 {
            rho.reverse();
            x0 = s * self.node(self.rho.len() - 1) + c;
        }
        let mut m = Self::from_nodes(x0, self.h * s.abs(), rho, self.truncation, self.log_concave)?;
        m.truncation = self.truncation;
        Ok(m)
    }

    /// Measure of the closed interval `[a, b]`.
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        if b < a {
            return 0.0;
        }
        self.cdf(b) - self.cdf(a)
    }
}

fn check_convex(psi: &[f64]) -> Result<()> {
    for i in 1..psi.len() - 1 {
        let d2 = psi[i - 1] - 2.0 * psi[i] + psi[i + 1];
        let scale = 1.0 + psi[i].abs();
        if d2 < -1e-9 * scale {
            return Err(Error::NotLogConcave(format!("second difference {d2:e} at node {i}")));
        }
    }
    Ok(())
}

/// `(1/2) ∫ |rho1 - rho2|` by Simpson on the union of both node sets, using
/// one-sided density limits at panel ends so jumps on nodes are exact. The
/// error is the Simpson-trapezoid discrepancy.
pub fn tv_distance(m1: &Measure1D, m2: &Measure1D) -> Result<Estimate> {
    let (a1, b1) = m1.range();
    let (a2, b2) = m2.range();
    if b1 < a2 || b2 < a1 {
        return Err(Error::DisjointGrids);
    }
    let mut xs: Vec<f64> = (0..m1.nodes()).map(|i| m1.node(i)).collect();
    xs.extend((0..m2.nodes()).map(|i| m2.node(i)));
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    let (mut simpson, mut trap) = (0.0, 0.0);
    for w in xs.windows(2) {
        let (u, v) = (w[0], w[1]);
        let fu = (m1.density_limit(u, true) - m2.density_limit(u, true)).abs();
        let fv = (m1.density_limit(v, false) - m2.density_limit(v, false)).abs();
        let mid = 0.5 * (u + v);
        let fm = (m1.density(mid) - m2.density(mid)).abs();
        simpson += (v - u) / 6.0 * (fu + 4.0 * fm + fv);
        trap += (v - u) / 2.0 * (fu + fv);
    }
    let value = (0.5 * simpson).clamp(0.0, 1.0);
    Ok(Estimate::new(value, 0.5 * (simpson - trap).abs() + m1.truncation + m2.truncation))
}

/// Largest excess of the tail `m(|x - x0| > tR)` over the Borell bound
/// `θ ((1-θ)/θ)^((t+1)/2)` for `t >= 1` in `ts`, where `θ = m([x0-R, x0+R])`.
pub fn borell_tail_check(m: &Measure1D, x0: f64, r: f64, ts: &[f64]) -> Result<f64> {
    let theta = m.interval_mass(x0 - r, x0 + r);
    borell_excess(theta, ts, |t| 1.0 - m.interval_mass(x0 - t * r, x0 + t * r))
}

pub(crate) fn borell_excess(theta: f64, ts: &[f64], tail: impl Fn(f64) -> f64) -> Result<f64> {
    if !(theta > 0.5) {
        return Err(Error::Precondition(format!("ball mass {theta} must exceed 1/2")));
    }
    let ratio = (1.0 - theta) / theta;
    let mut worst = f64::NEG_INFINITY;
    for &t in ts.iter().filter(|t| **t >= 1.0) {
        let bound = theta * ratio.powf(0.5 * (t + 1.0));
        worst = worst.max(tail(t).max(0.0) - bound);
    }
    if worst == f64::NEG_INFINITY {
        return Err(Error::Empty("t grid with t >= 1"));
    }
    Ok(worst)
}
