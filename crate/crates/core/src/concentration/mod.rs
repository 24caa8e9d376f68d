//! Lipschitz test functions and the concentration constants estimated over
//! a finite family of them.
//!
//! Every estimator here minimizes (or maximizes) over the family, so it is an
//! upper bound on the corresponding constant, which is an infimum over all
//! Lipschitz functions:
//!
//! | estimator | direction |
//! |---|---|
//! | `d_fm` | ≥ D_FM |
//! | `d_exp` | ≥ D_Exp |
//! | `d_pq` | ≥ D_{p,q} |
//! | `worst_set_value` | ≥ inf over all sets of measure ≥ 1/2 |

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{nets, HalfSpace};
use crate::measures::{Measure1D, Quadrature};
use crate::spectral::{discretize, Domain, GridDomain};

pub mod stats;

pub use stats::{
    expectation, median, median_expectation_check, moment_growth, norm_lp, orlicz_psi1, paley_zygmund_check,
    psi1_l1_comparison, quantile, Psi1Comparison, Young,
};

/// Directions in the default half-space net (2-D and 3-D).
pub const NET_DIRECTIONS: usize = 72;
/// Offsets per direction, at the quantile levels `k/20`.
pub const NET_OFFSETS: usize = 21;
pub const RANDOM_MEMBERS: usize = 200;
pub const RANDOM_KNOTS: usize = 8;
/// Ramp widths relative to the 10%-90% interquantile range.
const RAMP_WIDTHS: [f64; 3] = [0.002, 0.01, 0.05];
const RAMP_MIN_CELLS: f64 = 4.0;

/// A probability measure as weighted points, with the grid attached when the
/// points are grid cells.
#[derive(Debug, Clone)]
pub struct Space {
    dim: usize,
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
    grid: Option<GridDomain>,
}

impl Space {
    /// Cell midpoints of the measure's node grid, weighted by exact cell
    /// masses. Empty cells are dropped.
    pub fn from_measure(m: &Measure1D) -> Self {
        let mut points = Vec::with_capacity(m.nodes());
        let mut weights = Vec::with_capacity(m.nodes());
        for i in 0..m.nodes() - 1 {
            let w = m.node_cdf(i + 1) - m.node_cdf(i);
            if w > 0.0 {
                points.push([0.5 * (m.node(i) + m.node(i + 1)), 0.0, 0.0]);
                weights.push(w);
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Space { dim: 1, points, weights, grid: None }
    }

    pub fn from_grid(grid: GridDomain) -> Self {
        Space { dim: grid.dim(), points: grid.centers().to_vec(), weights: grid.weights().to_vec(), grid: Some(grid) }
    }

    pub fn from_quadrature(q: &Quadrature) -> Self {
        Space { dim: q.dim(), points: q.points().to_vec(), weights: q.weights().to_vec(), grid: None }
    }

    /// One-dimensional measures use their own node grid; everything else is
    /// rasterized at spacing `h`.
    pub fn for_domain(domain: &Domain, h: f64) -> Result<Self> {
        match domain {
            Domain::Measure(m) => Ok(Space::from_measure(m)),
            _ => Ok(Space::from_grid(discretize(domain, h)?)),
        }
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

    pub fn grid(&self) -> Option<&GridDomain> {
        self.grid.as_ref()
    }

    /// Values of `⟨u, x⟩` at the points.
    pub fn project(&self, u: &[f64]) -> Vec<f64> {
        self.points.iter().map(|p| dot(u, p)).collect()
    }

    /// Values and gradient norms of `f` at the points. On a grid the
    /// gradient is the grid's own difference quotient, consistent with its
    /// Dirichlet form; elsewhere it is analytic.
    pub fn eval(&self, f: &LipschitzFunction) -> Result<Sampled> {
        let mut s = f.eval(self)?;
        if let Some(g) = &self.grid {
            s.grads = g.gradient_norm(&s.values);
        }
        Ok(s)
    }

    /// Measure of a half-space.
    pub fn half_space_mass(&self, a: &HalfSpace) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .filter(|(p, _)| a.signed_distance(&p[..self.dim]) <= 1e-12 * (1.0 + a.offset().abs()))
            .map(|(_, w)| w)
            .sum()
    }
}

fn dot(u: &[f64], p: &[f64; 3]) -> f64 {
    u.iter().zip(p).map(|(a, b)| a * b).sum()
}

/// A function sampled on a [`Space`].
#[derive(Debug, Clone)]
pub struct Sampled {
    pub values: Vec<f64>,
    /// `|∇f|` at each point.
    pub grads: Vec<f64>,
    /// Certified Lipschitz constant.
    pub lip: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LipschitzFunction {
    /// `g(⟨u, x⟩)` with `g` piecewise linear through `knots` (sorted by
    /// abscissa) and constant beyond them. `u` is a unit vector.
    PiecewiseLinear1D {
        direction: Vec<f64>,
        knots: Vec<[f64; 2]>,
    },
    /// Cell values on the grid of the space it is evaluated on.
    GridFunction {
        values: Vec<f64>,
    },
    DistToSet(HalfSpace),
    Coordinate(usize),
}

impl LipschitzFunction {
    pub fn piecewise_linear(direction: Vec<f64>, knots: Vec<[f64; 2]>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Empty("knots"));
        }
        if knots.windows(2).any(|w| !(w[1][0] > w[0][0])) {
            return Err(Error::InvalidArgument("knot abscissae must increase".into()));
        }
        let n = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(n > 0.0) {
            return Err(Error::InvalidArgument("zero direction".into()));
        }
        Ok(LipschitzFunction::PiecewiseLinear1D { direction: direction.iter().map(|v| v / n).collect(), knots })
    }

    /// A one-dimensional grid function as the piecewise-linear interpolant
    /// of its cell values.
    pub fn from_grid_1d(grid: &GridDomain, values: &[f64]) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: grid.dim() });
        }
        let mut knots: Vec<[f64; 2]> = grid.centers().iter().zip(values).map(|(c, v)| [c[0], *v]).collect();
        knots.sort_by(|a, b| a[0].total_cmp(&b[0]));
        Self::piecewise_linear(vec![1.0], knots)
    }

    /// Short description used in reports.
    pub fn label(&self) -> String {
        match self {
            LipschitzFunction::PiecewiseLinear1D { knots, .. } => format!("pl{}", knots.len()),
            LipschitzFunction::GridFunction { .. } => "grid".into(),
            LipschitzFunction::DistToSet(h) => format!("dist({:?},{:.6})", h.normal(), h.offset()),
            LipschitzFunction::Coordinate(a) => format!("x{a}"),
        }
    }

    fn eval(&self, space: &Space) -> Result<Sampled> {
        let dim = space.dim;
        match self {
            LipschitzFunction::Coordinate(a) => {
                if *a >= dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: a + 1 });
                }
                Ok(Sampled {
                    values: space.points.iter().map(|p| p[*a]).collect(),
                    grads: vec![1.0; space.len()],
                    lip: 1.0,
                })
            }
            LipschitzFunction::DistToSet(h) => {
                if h.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: h.dim() });
                }
                let s: Vec<f64> = space.points.iter().map(|p| h.signed_distance(&p[..dim])).collect();
                Ok(Sampled {
                    values: s.iter().map(|v| v.max(0.0)).collect(),
                    grads: s.iter().map(|v| step_gradient(*v)).collect(),
                    lip: 1.0,
                })
            }
            LipschitzFunction::PiecewiseLinear1D { direction, knots } => {
                if direction.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: direction.len() });
                }
                let slopes: Vec<f64> = knots.windows(2).map(|w| (w[1][1] - w[0][1]) / (w[1][0] - w[0][0])).collect();
                let lip = slopes.iter().fold(0.0f64, |m, s| m.max(s.abs()));
                let mut values = Vec::with_capacity(space.len());
                let mut grads = Vec::with_capacity(space.len());
                let (first, last) = (knots[0], knots[knots.len() - 1]);
                for p in &space.points {
                    let s = dot(direction, p);
                    if s <= first[0] {
                        values.push(first[1]);
                        grads.push(0.0);
                    } else if s >= last[0] {
                        values.push(last[1]);
                        grads.push(0.0);
                    } else {
                        let k = knots.partition_point(|k| k[0] <= s) - 1;
                        values.push(knots[k][1] + slopes[k] * (s - knots[k][0]));
                        grads.push(slopes[k].abs());
                    }
                    if let Ok(k) = knots.binary_search_by(|k| k[0].total_cmp(&s)) {
                        // A sample sitting on a knot carries the mean of the
                        // adjacent slopes, as in the trapezoid rule.
                        let left = if k > 0 { slopes[k - 1].abs() } else { 0.0 };
                        let right = slopes.get(k).map_or(0.0, |v| v.abs());
                        *grads.last_mut().expect("pushed") = 0.5 * (left + right);
                    }
                }
                Ok(Sampled { values, grads, lip })
            }
            LipschitzFunction::GridFunction { values } => {
                let grid = space
                    .grid
                    .as_ref()
                    .ok_or_else(|| Error::InvalidArgument("grid function on a gridless space".into()))?;
                if values.len() != grid.len() {
                    return Err(Error::DimensionMismatch { expected: grid.len(), got: values.len() });
                }
                let c = grid.centers();
                let grads = grid.gradient_norm(values);
                // Edge quotients alone miss diagonal slopes.
                let lip = grid
                    .edges()
                    .iter()
                    .map(|&(i, j, _)| {
                        let d = (0..3).map(|a| (c[i][a] - c[j][a]).powi(2)).sum::<f64>().sqrt();
                        (values[i] - values[j]).abs() / d
                    })
                    .fold(0.0, f64::max)
                    .max(grads.iter().fold(0.0, |a, g| a.max(*g)));
                Ok(Sampled { values: values.clone(), grads, lip })
            }
        }
    }
}

/// `|∇ max(s, 0)|`, one half on the boundary itself.
fn step_gradient(s: f64) -> f64 {
    if s > 0.0 {
        1.0
    } else if s == 0.0 {
        0.5
    } else {
        0.0
    }
}

/// Power transform `sign(g)|g|^α` of `g = f - M f`, with the chain-rule
/// gradient. Requires `α ≥ 1`.
pub fn power_transform(s: &Sampled, weights: &[f64], alpha: f64) -> Sampled {
    let m = median(&s.values, weights).expect("nonempty sample");
    let g: Vec<f64> = s.values.iter().map(|v| v - m).collect();
    let gmax = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Sampled {
        values: g.iter().map(|v| v.signum() * v.abs().powf(alpha)).collect(),
        grads: g.iter().zip(&s.grads).map(|(v, d)| alpha * v.abs().powf(alpha - 1.0) * d).collect(),
        lip: alpha * gmax.powf(alpha - 1.0) * s.lip,
    }
}

/// Test functions together with closure flags. Negation is implicit: every
/// estimator here is invariant under `f ↦ -f`.
#[derive(Debug, Clone)]
pub struct TestFamily {
    pub members: Vec<LipschitzFunction>,
    /// Exponents α of the power transforms applied to every member; `1`
    /// stands for the member itself.
    pub powers: Vec<f64>,
}

impl TestFamily {
    pub fn new(members: Vec<LipschitzFunction>) -> Self {
        TestFamily { members, powers: vec![1.0] }
    }

    pub fn with_powers(mut self, powers: &[f64]) -> Self {
        self.powers = powers.to_vec();
        self
    }

    /// Coordinates, distances to half-spaces on the direction × quantile
    /// net, clamped distances (ramps) at interior quantiles, seeded random
    /// piecewise-linear ridge functions, and `extra` (typically the
    /// eigenfunction).
    pub fn default_for(space: &Space, seed: u64, extra: Vec<LipschitzFunction>) -> Result<Self> {
        let dim = space.dim;
        let w = &space.weights;
        let mut members: Vec<LipschitzFunction> = (0..dim).map(LipschitzFunction::Coordinate).collect();
        let dirs = nets::direction_net(dim, NET_DIRECTIONS);
        for u in &dirs {
            let proj = space.project(u);
            let mut order: Vec<usize> = (0..proj.len()).collect();
            order.sort_by(|&a, &b| proj[a].total_cmp(&proj[b]));
            let q = |t: f64| stats::quantile_sorted(&proj, w, &order, t.max(1e-12));
            for k in 0..NET_OFFSETS {
                let c = q(k as f64 / (NET_OFFSETS - 1) as f64);
                members.push(LipschitzFunction::DistToSet(HalfSpace::new(u.clone(), c)?));
            }
            let spread = (q(0.9) - q(0.1)).max(1e-12);
            // On a grid a strip narrower than a few cells holds too few
            // centres to carry its gradient mass.
            let floor = space.grid.as_ref().map_or(0.0, |g| RAMP_MIN_CELLS * g.h());
            let sorted: Vec<f64> = order.iter().map(|&i| proj[i]).collect();
            for k in 1..10 {
                let c = q(k as f64 / 10.0);
                for r in RAMP_WIDTHS {
                    // End the ramp on a sample value so that its gradient mass
                    // is exact on regular grids.
                    let target = c + (r * spread).max(floor);
                    let j = sorted.partition_point(|v| *v < target).min(sorted.len() - 1);
                    let mut end = sorted[j];
                    if j > 0 && (sorted[j - 1] - target).abs() < (end - target).abs() {
                        end = sorted[j - 1];
                    }
                    if !(end > c) {
                        end = target;
                    }
                    let ramp = vec![[c, 0.0], [end, end - c]];
                    members.push(LipschitzFunction::piecewise_linear(u.clone(), ramp)?);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..RANDOM_MEMBERS {
            let u: Vec<f64> = if dim == 1 {
                vec![1.0]
            } else {
                let v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
                let n = v.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-12);
                v.iter().map(|a| a / n).collect()
            };
            let proj = space.project(&u);
            let (lo, hi) = (quantile(&proj, w, 0.001)?, quantile(&proj, w, 0.999)?);
            let mut xs: Vec<f64> = (0..RANDOM_KNOTS).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
            xs.sort_by(|a, b| a.total_cmp(b));
            xs.dedup();
            let mut knots = Vec::with_capacity(xs.len());
            let mut y = 0.0;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    y += (2.0 * rng.random::<f64>() - 1.0) * (x - xs[i - 1]);
                }
                knots.push([*x, y]);
            }
            if knots.len() >= 2 {
                members.push(LipschitzFunction::piecewise_linear(u, knots)?);
            }
        }
        members.extend(extra);
        Ok(TestFamily::new(members))
    }

    /// Evaluates every member and power variant in parallel and maps each
    /// sample through `f`, in index order (member-major).
    pub fn scan<T: Send>(&self, space: &Space, f: impl Fn(&Sampled) -> T + Sync) -> Result<Vec<T>> {
        if self.members.is_empty() {
            return Err(Error::Empty("test family"));
        }
        let out: Result<Vec<Vec<T>>> = self
            .members
            .par_iter()
            .map(|m| {
                let base = space.eval(m)?;
                Ok(self
                    .powers
                    .iter()
                    .map(|&a| if a == 1.0 { f(&base) } else { f(&power_transform(&base, &space.weights, a)) })
                    .collect())
            })
            .collect();
        Ok(out?.into_iter().flatten().collect())
    }

    /// Label of the sample at a [`TestFamily::scan`] index.
    pub fn label(&self, index: usize) -> String {
        let k = self.powers.len();
        let (m, p) = (index / k, self.powers[index % k]);
        if p == 1.0 {
            self.members[m].label()
        } else {
            format!("pow{}({})", p, self.members[m].label())
        }
    }
}

/// Optimum over a family and the index of the attaining sample.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FamilyValue {
    pub value: f64,
    pub member: usize,
}

fn argmin(values: impl Iterator<Item = f64>) -> Option<FamilyValue> {
    values.enumerate().filter(|(_, v)| v.is_finite()).fold(None, |best: Option<FamilyValue>, (i, v)| match best {
        Some(b) if b.value <= v => Some(b),
        _ => Some(FamilyValue { value: v, member: i }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Center {
    Median,
    Expectation,
}

/// `1 / max_f ‖f/Lip(f) - center‖₁`.
pub fn d_fm(space: &Space, family: &TestFamily, center: Center) -> Result<FamilyValue> {
    let w = &space.weights;
    let devs = family.scan(space, |s| {
        if !(s.lip > 0.0) {
            return 0.0;
        }
        let c = match center {
            Center::Median => median(&s.values, w).expect("nonempty"),
            Center::Expectation => expectation(&s.values, w).expect("nonempty"),
        };
        s.values.iter().zip(w).map(|(v, wi)| wi * (v - c).abs()).sum::<f64>() / s.lip
    })?;
    let best = argmin(devs.iter().map(|d| if *d > 0.0 { -d } else { f64::NAN }))
        .ok_or(Error::Empty("nonconstant family members"))?;
    Ok(FamilyValue { value: -1.0 / best.value, member: best.member })
}

/// `inf_{t>0} (1 - ln S(t)) / t` for the tail `S(t) = μ(|g| ≥ t)` of a
/// discrete sample. `S` is constant on each interval `(d_{k+1}, d_k]`
/// between consecutive distinct values of `|g|`, so the infimum is attained
/// at one of them and is computed exactly.
pub fn exp_tail_rate(dev: &[f64], weights: &[f64]) -> f64 {
    let mut idx: Vec<usize> = (0..dev.len()).filter(|&i| dev[i] > 0.0 && weights[i] > 0.0).collect();
    idx.sort_by(|&a, &b| dev[b].total_cmp(&dev[a]));
    let mut best = f64::INFINITY;
    let mut acc = 0.0;
    let mut k = 0;
    while k < idx.len() {
        let d = dev[idx[k]];
        while k < idx.len() && dev[idx[k]] == d {
            acc += weights[idx[k]];
            k += 1;
        }
        best = best.min((1.0 - acc.min(1.0).ln()) / d);
    }
    best
}

/// `min_f inf_t (1 - ln μ(|f/Lip - E| ≥ t)) / t`.
pub fn d_exp(space: &Space, family: &TestFamily) -> Result<FamilyValue> {
    let w = &space.weights;
    let rates = family.scan(space, |s| {
        if !(s.lip > 0.0) {
            return f64::INFINITY;
        }
        let e = expectation(&s.values, w).expect("nonempty");
        let dev: Vec<f64> = s.values.iter().map(|v| (v - e).abs() / s.lip).collect();
        exp_tail_rate(&dev, w)
    })?;
    argmin(rates.into_iter()).ok_or(Error::Empty("nonconstant family members"))
}

fn pq_ratio(s: &Sampled, w: &[f64], p: f64, q: f64) -> f64 {
    let m = median(&s.values, w).expect("nonempty");
    let g: Vec<f64> = s.values.iter().map(|v| v - m).collect();
    let den = stats::lp_unchecked(&g, w, p);
    let scale = s.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(den > 1e-12 * scale) || den == 0.0 {
        return f64::NAN;
    }
    stats::lp_unchecked(&s.grads, w, q) / den
}

fn check_pq(p: f64, q: f64) -> Result<()> {
    if !(p > 0.0) || !(q >= 1.0) {
        return Err(Error::InvalidArgument(format!("exponents p = {p}, q = {q}")));
    }
    Ok(())
}

/// `min_f ‖∇f‖_q / ‖f - M f‖_p`, skipping constant members.
pub fn d_pq(space: &Space, family: &TestFamily, p: f64, q: f64) -> Result<FamilyValue> {
    check_pq(p, q)?;
    let w = &space.weights;
    let r = family.scan(space, |s| pq_ratio(s, w, p, q))?;
    argmin(r.into_iter()).ok_or(Error::Empty("nonconstant family members"))
}

/// `d_pq(p′,q′) - (p/p′) d_pq(p,q)`. The `(p,q)` estimate runs over the
/// family closed under `g ↦ sign(g)|g|^{p′/p}`, which maps any `(p′,q′)`
/// competitor to a `(p,q)` competitor with ratio at most `p′/p` times
/// larger, so the slack is nonnegative up to rounding.
pub fn pq_monotonicity_check(space: &Space, family: &TestFamily, pq: (f64, f64), pq2: (f64, f64)) -> Result<f64> {
    let ((p, q), (p2, q2)) = (pq, pq2);
    check_pq(p, q)?;
    check_pq(p2, q2)?;
    if p > p2 {
        return Err(Error::Precondition(format!("p = {p} exceeds p′ = {p2}")));
    }
    let gap = (1.0 / p - 1.0 / q) - (1.0 / p2 - 1.0 / q2);
    if gap.abs() > 1e-12 {
        return Err(Error::Precondition("1/p - 1/q must equal 1/p′ - 1/q′".into()));
    }
    let mut powers = family.powers.clone();
    if !powers.iter().any(|a| *a == p2 / p) {
        powers.push(p2 / p);
    }
    let closed = family.clone().with_powers(&powers);
    let hi = d_pq(space, family, p2, q2)?.value;
    let lo = d_pq(space, &closed, p, q)?.value;
    Ok(hi - p / p2 * lo)
}

/// Half-spaces `{⟨u,x⟩ ≤ c}` with `c` in the gap above `Q_t(⟨u,x⟩)`, over the default direction net, at
/// the given measure levels `t ≥ 1/2`.
pub fn default_worst_sets(space: &Space, levels: &[f64]) -> Result<Vec<HalfSpace>> {
    let mut out = Vec::new();
    for u in nets::direction_net(space.dim, NET_DIRECTIONS) {
        let proj = space.project(&u);
        let mut order: Vec<usize> = (0..proj.len()).collect();
        order.sort_by(|&a, &b| proj[a].total_cmp(&proj[b]));
        for &t in levels {
            out.push(HalfSpace::new(u.clone(), stats::quantile_midgap(&proj, &space.weights, &order, t))?);
        }
    }
    Ok(out)
}

/// `inf_A 1 / ∫ d(x, A) dμ` over candidate half-spaces of measure at least
/// 1/2.
pub fn worst_set_value(space: &Space, sets: &[HalfSpace]) -> Result<FamilyValue> {
    if sets.is_empty() {
        return Err(Error::Empty("candidate sets"));
    }
    let dim = space.dim;
    let mut vals = Vec::with_capacity(sets.len());
    for a in sets {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: a.dim() });
        }
        let mass = space.half_space_mass(a);
        if mass < 0.5 - 1e-9 {
            return Err(Error::Precondition(format!("candidate set of measure {mass} < 1/2")));
        }
        let mean: f64 = space.points.iter().zip(&space.weights).map(|(p, w)| w * a.distance(&p[..dim])).sum();
        vals.push(if mean > 0.0 { 1.0 / mean } else { f64::INFINITY });
    }
    argmin(vals.into_iter()).ok_or(Error::Degenerate("every candidate set has full measure".into()))
}

#[cfg(test)]
mod tests;
