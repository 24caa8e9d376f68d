//! Perturbation experiments: inclusions, intersections, dilations, total
//! variation, push-forwards and products.
//!
//! Inequalities with explicit constants come back as slacks. Those whose
//! constant is unnamed come back as ratios, to be tracked against pinned
//! bands.

use crate::concentration::{self, Center};
use crate::constants::{self, Resolution};
use crate::error::{Error, Result};
use crate::geometry::{self, nets, ConvexBody};
use crate::measures::{self, Measure1D};
use crate::profile;
use crate::report::CheckRow;
use crate::spectral::{discretize, spectral_gap, Domain, GridOperator, RESIDUAL_TOL};
use crate::Estimate;

pub mod pushforward;

pub use pushforward::{pushforward_check, MonotoneMap, Pushforward};

/// Relative tolerance on Cheeger constants from the planar cut search.
pub const CHEEGER_TOL: f64 = 1e-3;

/// `L ⊆ K` through support functions on the default direction net.
pub fn inclusion_check(l: &ConvexBody, k: &ConvexBody) -> Result<()> {
    if l.dim() != k.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: l.dim() });
    }
    let count = match k.dim() {
        1 => 2,
        2 => nets::NET_2D,
        _ => nets::NET_3D,
    };
    for u in nets::direction_net(k.dim(), count) {
        let (hl, hk) = (l.support(&u), k.support(&u));
        if hl > hk + 1e-9 * (1.0 + hk.abs()) {
            return Err(Error::Precondition(format!("inclusion fails in direction {u:?}: {hl} > {hk}")));
        }
    }
    Ok(())
}

/// `Vol(L) / Vol(K)`, both volumes drawn with the same seed.
pub fn volume_ratio(l: &ConvexBody, k: &ConvexBody, seed: u64) -> Result<Estimate> {
    let vl = geometry::volume(l, seed)?;
    let vk = geometry::volume(k, seed)?;
    if !(vk.value > 0.0 && vl.value > 0.0) {
        return Err(Error::Degenerate("zero volume".into()));
    }
    let v = vl.value / vk.value;
    Ok(Estimate::new(v, v * (vl.err / vl.value + vk.err / vk.value)))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GoingUp {
    pub v: f64,
    pub d_che_k: f64,
    pub d_che_l: f64,
    /// `D_Che(K) - v² D_Che(L)`.
    pub slack: f64,
    /// `D_Che(K) - (2v - 1) D_Che(L)`, reported when `v > 1/2`.
    pub single_step: Option<f64>,
    pub tol: f64,
}

impl GoingUp {
    pub fn rows(&self) -> Vec<CheckRow> {
        let mut r = vec![CheckRow::explicit("going_up_v2", "going-up lemma", self.slack, self.tol)];
        if let Some(s) = self.single_step {
            r.push(CheckRow::explicit("going_up_single_step", "going-up single step", s, self.tol));
        }
        r
    }
}

/// Going up from `L ⊆ K`: `D_Che(K) ≥ v² D_Che(L)` with `v = Vol(L)/Vol(K)`.
pub fn going_up_check(l: &ConvexBody, k: &ConvexBody, seed: u64) -> Result<GoingUp> {
    inclusion_check(l, k)?;
    let v = volume_ratio(l, k, seed)?;
    let d_che_k = profile::cheeger_body(k)?;
    let d_che_l = profile::cheeger_body(l)?;
    let tol = CHEEGER_TOL * d_che_k.max(d_che_l) + 2.0 * v.err * d_che_l;
    Ok(GoingUp {
        v: v.value,
        d_che_k,
        d_che_l,
        slack: d_che_k - v.value * v.value * d_che_l,
        single_step: (v.value > 0.5).then_some(d_che_k - (2.0 * v.value - 1.0) * d_che_l),
        tol,
    })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GoingDown {
    pub v: f64,
    pub d_fm_l: f64,
    pub d_exp_k: f64,
    /// `D_FM(L) log(1 + 1/v) / D_Exp(K)`.
    pub ratio: f64,
}

fn body_concentration(b: &ConvexBody, res: &Resolution) -> Result<(f64, f64)> {
    let (space, fam) = constants::family(&Domain::Body(b.clone()), res)?;
    Ok((concentration::d_fm(&space, &fam, Center::Expectation)?.value, concentration::d_exp(&space, &fam)?.value))
}

/// Going down from `K ⊇ L`; the constant is unnamed, so only the ratio is
/// returned.
pub fn going_down_report(l: &ConvexBody, k: &ConvexBody, res: &Resolution) -> Result<GoingDown> {
    inclusion_check(l, k)?;
    let v = volume_ratio(l, k, res.seed)?.value;
    let d_fm_l = body_concentration(l, res)?.0;
    let d_exp_k = body_concentration(k, res)?.1;
    Ok(GoingDown { v, d_fm_l, d_exp_k, ratio: d_fm_l * (1.0 + 1.0 / v).ln() / d_exp_k })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BodyConstants {
    pub d_che: f64,
    pub d_fm: f64,
    pub d_exp: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct StabilityReport {
    pub v_k: f64,
    pub v_l: f64,
    pub k: BodyConstants,
    pub l: BodyConstants,
    pub intersection: BodyConstants,
    pub checks: Vec<CheckRow>,
}

fn body_constants(b: &ConvexBody, res: &Resolution) -> Result<BodyConstants> {
    let (d_fm, d_exp) = body_concentration(b, res)?;
    Ok(BodyConstants { d_che: profile::cheeger_body(b)?, d_fm, d_exp })
}

/// Constants of `K`, `L` and `K ∩ L` with `v_K = Vol(K∩L)/Vol(K)` and
/// `v_L = Vol(K∩L)/Vol(L)`. The quadratic going-up step into each body is
/// explicit; the two directions of the overall bound are tracked ratios.
pub fn stability_theorem_report(k: &ConvexBody, l: &ConvexBody, res: &Resolution) -> Result<StabilityReport> {
    let kl = ConvexBody::intersection(k.clone(), l.clone())?;
    let v_k = volume_ratio(&kl, k, res.seed)?;
    let v_l = volume_ratio(&kl, l, res.seed)?;
    if !(v_k.value > 1e-6 && v_l.value > 1e-6) {
        return Err(Error::Degenerate("intersection has empty interior".into()));
    }
    let ck = body_constants(k, res)?;
    let cl = body_constants(l, res)?;
    let ckl = body_constants(&kl, res)?;
    let tol = |v: &Estimate, big: f64| CHEEGER_TOL * big + 2.0 * v.err * ckl.d_che;
    let (vk, vl) = (v_k.value, v_l.value);
    let checks = vec![
        CheckRow::explicit(
            "going_up_into_k",
            "going-up lemma",
            ck.d_che - vk * vk * ckl.d_che,
            tol(&v_k, ck.d_che.max(ckl.d_che)),
        ),
        CheckRow::explicit(
            "going_up_into_l",
            "going-up lemma",
            cl.d_che - vl * vl * ckl.d_che,
            tol(&v_l, cl.d_che.max(ckl.d_che)),
        ),
        CheckRow::tracked(
            "stability_k_from_l",
            "stability under intersection",
            ck.d_che / (vk * vk / (1.0 + 1.0 / vl).ln() * cl.d_che),
        ),
        CheckRow::tracked(
            "stability_l_from_k",
            "stability under intersection",
            cl.d_che / (vl * vl / (1.0 + 1.0 / vk).ln() * ck.d_che),
        ),
        CheckRow::tracked("fm_vs_che_intersection", "first-moment equivalence", ckl.d_fm / ckl.d_che),
    ];
    Ok(StabilityReport { v_k: vk, v_l: vl, k: ck, l: cl, intersection: ckl, checks })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GeometricDistance {
    pub d_g: f64,
    /// `n (d_G - 1)`.
    pub s: f64,
    /// `max(s, 1)`: the bound is only informative from `s = 1` on.
    pub s_eff: f64,
    pub d_che_k: f64,
    pub d_che_l: f64,
    /// `D_Che(K) / (s_eff D_Che(L))`, bounded above by the unnamed constant.
    pub upper: f64,
    /// `D_Che(L) / (s_eff D_Che(K))`, bounded above likewise.
    pub lower: f64,
}

pub fn geometric_distance_check(k: &ConvexBody, l: &ConvexBody) -> Result<GeometricDistance> {
    let d_g = geometry::geometric_distance(k, l)?;
    let s = k.dim() as f64 * (d_g - 1.0);
    let s_eff = s.max(1.0);
    let d_che_k = profile::cheeger_body(k)?;
    let d_che_l = profile::cheeger_body(l)?;
    Ok(GeometricDistance {
        d_g,
        s,
        s_eff,
        d_che_k,
        d_che_l,
        upper: d_che_k / (s_eff * d_che_l),
        lower: d_che_l / (s_eff * d_che_k),
    })
}

/// Planar analogue of the slab example: `K_s = B₁² ∩ {|x₁| ≤ s}` against
/// the inscribed box `L_s = [-s, s] × [-(1-s), 1-s]`.
pub fn slab_pair(s: f64) -> Result<(ConvexBody, ConvexBody)> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidArgument(format!("slab half-width {s} outside (0,1)")));
    }
    let diamond = ConvexBody::lp_ball(2, 1.0, 1.0)?;
    let slab = ConvexBody::boxed(vec![-s, -2.0], vec![s, 2.0])?;
    let k = ConvexBody::intersection(diamond, slab)?;
    let l = ConvexBody::boxed(vec![-s, -(1.0 - s)], vec![s, 1.0 - s])?;
    Ok((k, l))
}

pub fn slab_sweep(ss: &[f64]) -> Result<Vec<(f64, GeometricDistance)>> {
    ss.iter()
        .map(|&s| {
            let (k, l) = slab_pair(s)?;
            Ok((s, geometric_distance_check(&k, &l)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BoxRow {
    pub t: f64,
    pub v: f64,
    pub d_che_k: f64,
    pub d_che_l: f64,
    /// `D_Che(K) / (v² D_Che(L))`, at least 1 by going up.
    pub quadratic: f64,
    /// `D_Che(K) / (v D_Che(L))`.
    pub linear: f64,
}

/// The unit square `L` inside the box `K = [0, t] × [0, 1]`, `t > 1`: the
/// going-up ratio against `v` and `v²`.
pub fn circumscribing_box_sweep(ts: &[f64], seed: u64) -> Result<Vec<BoxRow>> {
    let l = ConvexBody::unit_cube(2)?;
    ts.iter()
        .map(|&t| {
            let k = ConvexBody::boxed(vec![0.0, 0.0], vec![t, 1.0])?;
            let g = going_up_check(&l, &k, seed)?;
            Ok(BoxRow {
                t,
                v: g.v,
                d_che_k: g.d_che_k,
                d_che_l: g.d_che_l,
                quadratic: g.d_che_k / (g.v * g.v * g.d_che_l),
                linear: g.d_che_k / (g.v * g.d_che_l),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TvStability {
    pub tv: f64,
    pub eps: f64,
    pub d_che_1: f64,
    pub d_che_2: f64,
    /// `D_Che(μ₁) / D_Che(μ₂)`.
    pub ratio: f64,
    /// `ε² / log(1 + 1/ε)`.
    pub shape: f64,
    pub tracked: f64,
}

fn cheeger_1d(m: &Measure1D) -> Result<f64> {
    Ok(constants::cheeger(&Domain::Measure(m.clone()), &Resolution::default())?.0)
}

pub fn tv_stability_report(m1: &Measure1D, m2: &Measure1D) -> Result<TvStability> {
    let tv = measures::tv_distance(m1, m2)?;
    let eps = 1.0 - tv.value;
    if !(eps > 1e-9 + tv.err) {
        return Err(Error::Precondition(format!("TV distance {} is 1 within tolerance", tv.value)));
    }
    let d_che_1 = cheeger_1d(m1)?;
    let d_che_2 = cheeger_1d(m2)?;
    let ratio = d_che_1 / d_che_2;
    let shape = eps * eps / (1.0 + 1.0 / eps).ln();
    Ok(TvStability { tv: tv.value, eps, d_che_1, d_che_2, ratio, shape, tracked: ratio / shape })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Tensorization {
    pub h: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub lambda_ab: f64,
    /// `|λ(A×B) - min(λ(A), λ(B))|`, all at the same spacing.
    pub gap_defect: f64,
    pub gap_tol: f64,
    pub d_che_a: f64,
    pub d_che_b: f64,
    pub d_che_ab: f64,
    /// `D_Che(A×B) / min(D_Che(A), D_Che(B))`.
    pub che_ratio: f64,
}

impl Tensorization {
    pub fn rows(&self) -> Vec<CheckRow> {
        vec![
            CheckRow::explicit("product_gap", "Neumann product gap", self.gap_tol - self.gap_defect, 0.0),
            CheckRow::tracked("product_cheeger", "Cheeger tensorization", self.che_ratio),
        ]
    }
}

/// Gaps of the factors and of the product grid (the Kronecker product of
/// the factor grids, so the identity is exact up to the eigensolver), and
/// the Cheeger ratio.
pub fn tensorization_check(a: &Domain, b: &Domain, res: &Resolution) -> Result<Tensorization> {
    if a.dim() + b.dim() > 3 {
        return Err(Error::InvalidArgument("product dimension above 3".into()));
    }
    let prod = Domain::Product(vec![a.clone(), b.clone()]);
    let h = res.h(&prod);
    let gap = |d: &Domain| -> Result<f64> { Ok(spectral_gap(&GridOperator::assemble(discretize(d, h)?))?.lambda) };
    let (lambda_a, lambda_b, lambda_ab) = (gap(a)?, gap(b)?, gap(&prod)?);
    let d_che_a = constants::cheeger(a, res)?.0;
    let d_che_b = constants::cheeger(b, res)?.0;
    let d_che_ab = constants::cheeger(&prod, res)?.0;
    let low = lambda_a.min(lambda_b);
    Ok(Tensorization {
        h,
        lambda_a,
        lambda_b,
        lambda_ab,
        gap_defect: (lambda_ab - low).abs(),
        gap_tol: 2.0 * RESIDUAL_TOL * lambda_ab.max(low),
        d_che_a,
        d_che_b,
        d_che_ab,
        che_ratio: d_che_ab / d_che_a.min(d_che_b),
    })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GoingUpLimit {
    /// `(m, (2 v^{1/m} - 1)^m)` for the admissible `m ≤ m_max`.
    pub table: Vec<(usize, f64)>,
    pub monotone: bool,
    pub last_error: f64,
    /// `10 |ln v|² / m` at the last entry.
    pub bound: f64,
}

impl GoingUpLimit {
    pub fn pass(&self) -> bool {
        self.monotone && self.last_error <= self.bound
    }
}

/// Iterated single steps `(2 v^{1/m} - 1)^m`, which increase to `v²`.
pub fn going_up_limit_check(v: f64, m_max: usize) -> Result<GoingUpLimit> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::InvalidArgument(format!("volume ratio {v} outside (0,1]")));
    }
    let table: Vec<(usize, f64)> = (1..=m_max)
        .filter(|&m| v.powf(1.0 / m as f64) > 0.5)
        .map(|m| (m, (2.0 * v.powf(1.0 / m as f64) - 1.0).powi(m as i32)))
        .collect();
    let &(m, last) = table.last().ok_or(Error::Empty("admissible iteration counts"))?;
    let target = v * v;
    let monotone = table.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-15) && table.iter().all(|e| e.1 <= target + 1e-15);
    Ok(GoingUpLimit { table, monotone, last_error: (last - target).abs(), bound: 10.0 / m as f64 * v.ln().powi(2) })
}

/// Concentration estimates of a body translated by `shift`, for invariance
/// checks.
pub fn translated_constants(b: &ConvexBody, shift: &[f64], res: &Resolution) -> Result<[BodyConstants; 2]> {
    let t = b.translated(shift)?;
    Ok([body_constants(b, res)?, body_constants(&t, res)?])
}

#[cfg(test)]
mod tests;
