use crate::concentration::Space;
use crate::constants::{self, Resolution};
use crate::error::{Error, Result};
use crate::measures::Measure1D;
use crate::report::CheckRow;
use crate::spectral::Domain;

/// Largest tolerated CDF mismatch between `T_*(μ)` and the stated target.
pub const PUSHFORWARD_TOL: f64 = 1e-3;

/// Strictly monotone piecewise-linear map of the line, constant-slope
/// extension beyond the knots.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneMap {
    knots: Vec<[f64; 2]>,
    increasing: bool,
}

impl MonotoneMap {
    pub fn new(knots: Vec<[f64; 2]>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidArgument("a monotone map needs two knots".into()));
        }
        if knots.windows(2).any(|w| !(w[1][0] > w[0][0])) {
            return Err(Error::InvalidArgument("knot abscissae must increase".into()));
        }
        let increasing = knots[1][1] > knots[0][1];
        if knots.windows(2).any(|w| (w[1][1] > w[0][1]) != increasing || w[1][1] == w[0][1]) {
            return Err(Error::InvalidArgument("map is not strictly monotone".into()));
        }
        Ok(MonotoneMap { knots, increasing })
    }

    /// Interpolant of `f` on `n + 1` equispaced knots of `[a, b]`.
    pub fn sample(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Result<Self> {
        Self::new((0..=n).map(|i| a + (b - a) * i as f64 / n as f64).map(|x| [x, f(x)]).collect())
    }

    pub fn increasing(&self) -> bool {
        self.increasing
    }

    fn segment(&self, x: f64) -> usize {
        self.knots.partition_point(|k| k[0] <= x).clamp(1, self.knots.len() - 1) - 1
    }

    pub fn slope(&self, x: f64) -> f64 {
        let k = self.segment(x);
        let (a, b) = (self.knots[k], self.knots[k + 1]);
        (b[1] - a[1]) / (b[0] - a[0])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.segment(x);
        self.knots[k][1] + self.slope(x) * (x - self.knots[k][0])
    }

    pub fn lipschitz(&self) -> f64 {
        self.knots.windows(2).map(|w| ((w[1][1] - w[0][1]) / (w[1][0] - w[0][0])).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Pushforward {
    /// `max_x |F_ν(T(x)) - F_μ(x)|` (with `1 - F_μ` for decreasing maps).
    pub identity_error: f64,
    pub d_che_source: f64,
    pub d_che_target: f64,
    /// `∫ |T'| dμ`.
    pub mean_local_lip: f64,
    pub lip: f64,
    /// `D_Che(ν) ∫|T'| dμ / D_Che(μ)`.
    pub ratio: f64,
    /// `D_Che(ν) - D_Che(μ) / ‖T‖_Lip`.
    pub plain_slack: f64,
    pub tol: f64,
}

impl Pushforward {
    pub fn rows(&self) -> Vec<CheckRow> {
        vec![
            CheckRow::explicit("pushforward_lipschitz", "Lipschitz push-forward", self.plain_slack, self.tol),
            CheckRow::tracked("pushforward_average", "push-forward Lipschitz on average", self.ratio),
        ]
    }
}

/// Cheeger constants across a monotone push-forward, after checking that
/// `T_*(μ)` is the stated target through the CDF identity.
pub fn pushforward_check(t: &MonotoneMap, m: &Measure1D, target: &Measure1D) -> Result<Pushforward> {
    let mut identity_error = 0.0f64;
    for i in 0..m.nodes() {
        let x = m.node(i);
        let f = m.node_cdf(i);
        let want = if t.increasing() { f } else { 1.0 - f };
        identity_error = identity_error.max((target.cdf(t.eval(x)) - want).abs());
    }
    if identity_error > PUSHFORWARD_TOL {
        return Err(Error::Precondition(format!("push-forward CDF mismatch {identity_error:e}")));
    }
    let res = Resolution::default();
    let d_che_source = constants::cheeger(&Domain::Measure(m.clone()), &res)?.0;
    let d_che_target = constants::cheeger(&Domain::Measure(target.clone()), &res)?.0;
    let space = Space::from_measure(m);
    let mean_local_lip: f64 = space.points().iter().zip(space.weights()).map(|(p, w)| w * t.slope(p[0]).abs()).sum();
    let lip = t.lipschitz();
    Ok(Pushforward {
        identity_error,
        d_che_source,
        d_che_target,
        mean_local_lip,
        lip,
        ratio: d_che_target * mean_local_lip / d_che_source,
        plain_slack: d_che_target - d_che_source / lip,
        tol: 1e-3 * d_che_target + identity_error,
    })
}
