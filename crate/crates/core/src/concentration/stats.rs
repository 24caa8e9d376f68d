//! Weighted statistics of a sampled function: norms, quantiles, the Ψ₁
//! Orlicz norm.

use crate::error::{Error, Result};

/// Relative tolerance of the Ψ₁ bisection.
pub const PSI1_TOL: f64 = 1e-9;

fn check_lengths(values: &[f64], weights: &[f64]) -> Result<()> {
    if values.len() != weights.len() {
        return Err(Error::DimensionMismatch { expected: weights.len(), got: values.len() });
    }
    if values.is_empty() {
        return Err(Error::Empty("sample values"));
    }
    Ok(())
}

/// `(Σ wᵢ |fᵢ|^p)^{1/p}`; `p = ∞` gives the maximum over points of positive
/// weight.
pub fn norm_lp(values: &[f64], weights: &[f64], p: f64) -> Result<f64> {
    check_lengths(values, weights)?;
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!("exponent p = {p} must be positive")));
    }
    Ok(lp_unchecked(values, weights, p))
}

pub(crate) fn lp_unchecked(values: &[f64], weights: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().zip(weights).filter(|(_, w)| **w > 0.0).fold(0.0, |m, (v, _)| m.max(v.abs()));
    }
    if p == 1.0 {
        return values.iter().zip(weights).map(|(v, w)| w * v.abs()).sum();
    }
    if p == 2.0 {
        return values.iter().zip(weights).map(|(v, w)| w * v * v).sum::<f64>().sqrt();
    }
    values.iter().zip(weights).map(|(v, w)| w * v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

pub fn expectation(values: &[f64], weights: &[f64]) -> Result<f64> {
    check_lengths(values, weights)?;
    Ok(values.iter().zip(weights).map(|(v, w)| w * v).sum())
}

/// `Q_δ(f) = inf{q : μ(f ≤ q) ≥ δ}`.
pub fn quantile(values: &[f64], weights: &[f64], delta: f64) -> Result<f64> {
    check_lengths(values, weights)?;
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!("quantile level {delta} outside (0,1]")));
    }
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Ok(quantile_sorted(values, weights, &idx, delta))
}

pub(crate) fn quantile_sorted(values: &[f64], weights: &[f64], order: &[usize], delta: f64) -> f64 {
    let mut acc = 0.0;
    for &i in order {
        acc += weights[i];
        if acc >= delta * (1.0 - 1e-12) {
            return values[i];
        }
    }
    values[*order.last().expect("nonempty")]
}

/// Midpoint between `Q_δ` and the next larger sample value: the same
/// sublevel set of the discrete measure, placed where the underlying
/// continuous measure would put it.
pub(crate) fn quantile_midgap(values: &[f64], weights: &[f64], order: &[usize], delta: f64) -> f64 {
    let q = quantile_sorted(values, weights, order, delta);
    let k = order.partition_point(|&i| values[i] <= q);
    match order.get(k) {
        Some(&i) => 0.5 * (q + values[i]),
        None => q,
    }
}

/// Lower median `Q_{1/2}`: both `μ(f ≤ M)` and `μ(f ≥ M)` are at least 1/2.
pub fn median(values: &[f64], weights: &[f64]) -> Result<f64> {
    quantile(values, weights, 0.5)
}

fn psi1_integral(values: &[f64], weights: &[f64], v: f64) -> f64 {
    values.iter().zip(weights).map(|(x, w)| w * (x.abs() / v).exp_m1()).sum()
}

/// `inf{v > 0 : ∫ (e^{|f|/v} - 1) dμ ≤ 1}` by bisection on `ln v`. Jensen
/// gives the lower bracket `E|f| / ln 2` and boundedness the upper bracket
/// `max|f| / ln 2`.
pub fn orlicz_psi1(values: &[f64], weights: &[f64]) -> Result<f64> {
    check_lengths(values, weights)?;
    let l1 = lp_unchecked(values, weights, 1.0);
    let sup = lp_unchecked(values, weights, f64::INFINITY);
    if !sup.is_finite() {
        return Err(Error::Divergent("unbounded sample in Ψ₁ norm".into()));
    }
    if sup == 0.0 {
        return Ok(0.0);
    }
    let ln2 = std::f64::consts::LN_2;
    let (mut lo, mut hi) = ((l1 / ln2).ln(), (sup / ln2).ln());
    if psi1_integral(values, weights, hi.exp()) > 1.0 + 1e-12 {
        return Err(Error::Divergent("Ψ₁ integral exceeds 1 at the upper bracket".into()));
    }
    while hi - lo > PSI1_TOL {
        let mid = 0.5 * (lo + hi);
        if psi1_integral(values, weights, mid.exp()) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi.exp())
}

/// `sup_p ‖f‖_p / p` over `p ∈ {1, 2, 4, …, 64}`, the moment-growth
/// counterpart of the Ψ₁ norm.
pub fn moment_growth(values: &[f64], weights: &[f64]) -> Result<f64> {
    check_lengths(values, weights)?;
    Ok((0..7)
        .map(|k| {
            let p = (1u32 << k) as f64;
            lp_unchecked(values, weights, p) / p
        })
        .fold(0.0, f64::max))
}

/// Orlicz norms accepted by [`median_expectation_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Young {
    L1,
    L2,
    Psi1,
}

impl Young {
    pub fn norm(self, values: &[f64], weights: &[f64]) -> Result<f64> {
        match self {
            Young::L1 => norm_lp(values, weights, 1.0),
            Young::L2 => norm_lp(values, weights, 2.0),
            Young::Psi1 => orlicz_psi1(values, weights),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Young::L1 => "L1",
            Young::L2 => "L2",
            Young::Psi1 => "Psi1",
        }
    }
}

/// Slacks `‖f-M‖ - ½‖f-E‖` and `3‖f-E‖ - ‖f-M‖`.
pub fn median_expectation_check(values: &[f64], weights: &[f64], n: Young) -> Result<(f64, f64)> {
    let e = expectation(values, weights)?;
    let m = median(values, weights)?;
    let fe: Vec<f64> = values.iter().map(|v| v - e).collect();
    let fm: Vec<f64> = values.iter().map(|v| v - m).collect();
    let ne = n.norm(&fe, weights)?;
    let nm = n.norm(&fm, weights)?;
    Ok((nm - 0.5 * ne, 3.0 * ne - nm))
}

/// `Q_{1-ε}(|f|) - θ‖f‖₁` with `ε = (1-θ)² / D²` and `D = ‖f‖₂ / ‖f‖₁`.
pub fn paley_zygmund_check(values: &[f64], weights: &[f64], theta: f64) -> Result<f64> {
    check_lengths(values, weights)?;
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidArgument(format!("θ = {theta} outside (0,1)")));
    }
    let l1 = lp_unchecked(values, weights, 1.0);
    if !(l1 > 0.0) {
        return Err(Error::Degenerate("‖f‖₁ = 0".into()));
    }
    let d = lp_unchecked(values, weights, 2.0) / l1;
    Ok(pz_quantile(values, weights, theta, d) - theta * l1)
}

fn pz_quantile(values: &[f64], weights: &[f64], theta: f64, d: f64) -> f64 {
    let eps = (1.0 - theta).powi(2) / (d * d);
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let mut idx: Vec<usize> = (0..abs.len()).collect();
    idx.sort_by(|&a, &b| abs[a].total_cmp(&abs[b]));
    quantile_sorted(&abs, weights, &idx, 1.0 - eps)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Psi1Comparison {
    /// `‖f₀‖_{Ψ₁} / ‖f₀‖₁`.
    pub ratio: f64,
    /// `ε₀ = 1 / (16 C₀²)` from the Paley-Zygmund step at θ = 1/2 with
    /// `D₀ = 2 C₀` (because `‖f₀‖₂ ≤ 2‖f₀‖_{Ψ₁}`).
    pub epsilon: f64,
    /// `Q_{1-ε₀}(|f₀|) - ‖f₀‖₁ / 2`.
    pub quantile_slack: f64,
    /// Set when the hypothesis `‖f₀‖₁ ≥ 1 / (2 D^M_FM)` fails.
    pub skipped: Option<String>,
}

/// Ψ₁ versus L₁ comparison for a centred 1-Lipschitz `f₀`, given the
/// median first-moment constant of the measure.
pub fn psi1_l1_comparison(values: &[f64], weights: &[f64], d_fm_median: f64) -> Result<Psi1Comparison> {
    check_lengths(values, weights)?;
    let l1 = lp_unchecked(values, weights, 1.0);
    let need = 0.5 / d_fm_median;
    if !(l1 >= need * (1.0 - 1e-9)) || l1 == 0.0 {
        return Ok(Psi1Comparison {
            ratio: f64::NAN,
            epsilon: f64::NAN,
            quantile_slack: f64::NAN,
            skipped: Some(format!("‖f₀‖₁ = {l1:.6e} below 1/(2 D_FM^M) = {need:.6e}")),
        });
    }
    let ratio = orlicz_psi1(values, weights)? / l1;
    let d0 = 2.0 * ratio;
    let epsilon = 0.25 / (d0 * d0);
    let quantile_slack = pz_quantile(values, weights, 0.5, d0) - 0.5 * l1;
    Ok(Psi1Comparison { ratio, epsilon, quantile_slack, skipped: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n: usize) -> (Vec<f64>, Vec<f64>) {
        let xs = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        (xs, vec![1.0 / n as f64; n])
    }

    #[test]
    fn uniform_moments() {
        let (x, w) = uniform(20000);
        assert!((expectation(&x, &w).unwrap() - 0.5).abs() < 1e-12);
        assert!((median(&x, &w).unwrap() - 0.5).abs() < 1e-4);
        let c: Vec<f64> = x.iter().map(|v| v - 0.5).collect();
        assert!((norm_lp(&c, &w, 1.0).unwrap() - 0.25).abs() < 1e-8);
        assert!((norm_lp(&c, &w, 2.0).unwrap() - 1.0 / 12f64.sqrt()).abs() < 1e-8);
        assert!(norm_lp(&c, &w, 0.0).is_err());
        assert!(norm_lp(&[3.0; 5], &[0.2; 5], 3.0).unwrap() - 3.0 < 1e-12);
    }

    #[test]
    fn psi1_examples() {
        let w = [0.25; 4];
        let v = orlicz_psi1(&[2.0; 4], &w).unwrap();
        assert!((v - 2.0 / std::f64::consts::LN_2).abs() < 1e-8 * v);
        // (e^{1/v} - 1) v - 1 = 1
        let (mut lo, mut hi) = (0.1f64, 10.0f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if (1.0 / m).exp_m1() * m - 1.0 > 1.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        let (x, w) = uniform(20000);
        let v = orlicz_psi1(&x, &w).unwrap();
        assert!((v - lo).abs() < 1e-6, "{v} vs {lo}");
        let g = moment_growth(&x, &w).unwrap();
        assert!(v / g >= (-1f64).exp() && v / g <= 2.0);
        assert_eq!(orlicz_psi1(&[0.0; 3], &[1.0 / 3.0; 3]).unwrap(), 0.0);
    }

    #[test]
    fn median_expectation_factors() {
        let (x, w) = uniform(20000);
        for n in [Young::L1, Young::L2, Young::Psi1] {
            let (s1, s2) = median_expectation_check(&x, &w, n).unwrap();
            let nrm = n.norm(&x.iter().map(|v| v - 0.5).collect::<Vec<_>>(), &w).unwrap();
            assert!((s1 - 0.5 * nrm).abs() < 1e-3 * nrm && (s2 - 2.0 * nrm).abs() < 1e-3 * nrm);
            let skew: Vec<f64> = x.iter().map(|v| (v - 0.9).max(0.0)).collect();
            let (s1, s2) = median_expectation_check(&skew, &w, n).unwrap();
            assert!(s1 >= 0.0 && s2 >= 0.0);
        }
    }

    #[test]
    fn paley_zygmund_examples() {
        let (x, w) = uniform(16000);
        let s = paley_zygmund_check(&x, &w, 0.5).unwrap();
        assert!((s - (13.0 / 16.0 - 0.25)).abs() < 1e-3, "{s}");
        let s = paley_zygmund_check(&[1.0; 4], &[0.25; 4], 0.3).unwrap();
        assert!((s - 0.7).abs() < 1e-12);
        assert!(paley_zygmund_check(&[0.0; 4], &[0.25; 4], 0.3).is_err());
    }

    #[test]
    fn psi1_comparison_on_uniform() {
        let (x, w) = uniform(20000);
        let f0: Vec<f64> = x.iter().map(|v| v - 0.5).collect();
        let r = psi1_l1_comparison(&f0, &w, 4.0).unwrap();
        assert!(r.skipped.is_none() && r.ratio.is_finite() && r.quantile_slack >= 0.0, "{r:?}");
        assert!(psi1_l1_comparison(&[0.0; 4], &[0.25; 4], 4.0).unwrap().skipped.is_some());
    }
}
