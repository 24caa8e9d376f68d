//! The four constants of a domain, each by the method suited to its
//! dimension, plus the worst-set value.

use crate::concentration::{self, Center, LipschitzFunction, Space, TestFamily};
use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::measures::Measure1D;
use crate::profile::{self, curve_1d, default_t_grid};
use crate::spectral::{discretize, spectral_gap, spectral_gap_richardson, Domain, GapReport, GridOperator};

/// Grid resolution as cells across the widest extent of the domain.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Resolution {
    pub cells_1d: usize,
    pub cells_2d: usize,
    pub cells_3d: usize,
    /// Seed of the random test functions.
    pub seed: u64,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution { cells_1d: 2000, cells_2d: 64, cells_3d: 16, seed: 1 }
    }
}

impl Resolution {
    pub fn h(&self, domain: &Domain) -> f64 {
        let cells = match domain.dim() {
            1 => self.cells_1d,
            2 => self.cells_2d,
            _ => self.cells_3d,
        };
        extent(domain) / cells as f64
    }
}

/// Widest side of the bounding box of the support.
pub fn extent(domain: &Domain) -> f64 {
    match domain {
        Domain::Measure(m) => {
            let (a, b) = m.support();
            b - a
        }
        Domain::Body(b) => {
            let (lo, hi) = b.bounding_box();
            lo.iter().zip(hi).map(|(l, h)| h - l).fold(0.0, f64::max)
        }
        Domain::Product(f) => f.iter().map(extent).fold(0.0, f64::max),
    }
}

/// The product body when every factor is a body, for the cut search.
fn product_body(domain: &Domain) -> Option<ConvexBody> {
    match domain {
        Domain::Body(b) => Some(b.clone()),
        Domain::Measure(_) => None,
        Domain::Product(f) => {
            let mut it = f.iter();
            let mut acc = product_body(it.next()?)?;
            for g in it {
                acc = ConvexBody::product(acc, product_body(g)?).ok()?;
            }
            Some(acc)
        }
    }
}

fn factor_measure(d: &Domain) -> Option<Measure1D> {
    match d {
        Domain::Measure(m) => Some(m.clone()),
        Domain::Body(b) if b.dim() == 1 => {
            let (lo, hi) = b.bounding_box();
            Measure1D::uniform(lo[0], hi[0]).ok()
        }
        _ => None,
    }
}

/// Directions of the half-plane search for planar products.
pub const HALFPLANE_ANGLES: usize = 180;

/// `2 min_u ρ_u(median)` over half-planes of a product of two 1-D measures,
/// where `ρ_u` is the density of `⟨u, x⟩`. Both the median and the density
/// reduce to one-dimensional integrals against the first factor.
pub fn halfplane_cheeger(m1: &Measure1D, m2: &Measure1D) -> Result<f64> {
    let (a1, b1) = m1.support();
    let (a2, b2) = m2.support();
    let mut best = f64::INFINITY;
    for k in 0..HALFPLANE_ANGLES {
        let th = std::f64::consts::PI * k as f64 / HALFPLANE_ANGLES as f64;
        let (u1, u2) = (th.cos(), th.sin());
        let boundary = if u2.abs() < 1e-12 {
            let c = m1.quantile(0.5)?;
            m1.density(c)
        } else {
            let cdf = |c: f64| m1.integrate(|x| m2.cdf((c - u1 * x) / u2));
            let ends = [u1 * a1 + u2 * a2, u1 * a1 + u2 * b2, u1 * b1 + u2 * a2, u1 * b1 + u2 * b2];
            let mut lo = ends.iter().cloned().fold(f64::INFINITY, f64::min);
            let mut hi = ends.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if cdf(mid) < 0.5 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let c = 0.5 * (lo + hi);
            m1.integrate(|x| m2.density((c - u1 * x) / u2)) / u2
        };
        best = best.min(boundary);
    }
    Ok(2.0 * best)
}

/// Cheeger constant and the method tag. Exact in 1-D, a cut-search upper
/// bound for planar bodies, a half-plane upper bound for planar products,
/// otherwise the `(1,1)` ratio over ramps, which is also an upper bound.
pub fn cheeger(domain: &Domain, res: &Resolution) -> Result<(f64, &'static str)> {
    if let Domain::Measure(m) = domain {
        let curve = curve_1d(m, &default_t_grid())?;
        return Ok((profile::cheeger_constant(&curve, m.is_log_concave())?, "exact1d"));
    }
    if let Some(b) = product_body(domain) {
        match b.dim() {
            1 => return Ok((profile::cheeger_body(&b)?, "exact1d")),
            2 => return Ok((profile::cheeger_body(&b)?, "cutsearch2d")),
            _ => {}
        }
    }
    if let Domain::Product(f) = domain {
        if let [a, b] = f.as_slice() {
            if let (Some(m1), Some(m2)) = (factor_measure(a), factor_measure(b)) {
                return Ok((halfplane_cheeger(&m1, &m2)?, "halfplane2d"));
            }
        }
    }
    let space = Space::for_domain(domain, res.h(domain))?;
    let fam = TestFamily::default_for(&space, res.seed, vec![])?;
    Ok((concentration::d_pq(&space, &fam, 1.0, 1.0)?.value, "ramp11"))
}

pub fn poincare(domain: &Domain, res: &Resolution) -> Result<GapReport> {
    spectral_gap_richardson(domain, res.h(domain))
}

/// The space the concentration estimators run on and its default family,
/// including the first nontrivial eigenfunction.
pub fn family(domain: &Domain, res: &Resolution) -> Result<(Space, TestFamily)> {
    let h = res.h(domain);
    let space = Space::for_domain(domain, h)?;
    let eig = match space.grid() {
        Some(g) => {
            let v = spectral_gap(&GridOperator::assemble(g.clone()))?.vector;
            LipschitzFunction::GridFunction { values: v }
        }
        None => {
            let g = discretize(domain, h)?;
            let v = spectral_gap(&GridOperator::assemble(g.clone()))?.vector;
            LipschitzFunction::from_grid_1d(&g, &v)?
        }
    };
    let fam = TestFamily::default_for(&space, res.seed, vec![eig])?;
    Ok((space, fam))
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Constants {
    pub d_che: f64,
    pub d_che_method: &'static str,
    pub d_poin: f64,
    pub gap: GapReport,
    pub d_exp: f64,
    pub d_fm: f64,
    pub d_fm_median: f64,
    pub worst_set_value: f64,
}

pub fn compute(domain: &Domain, res: &Resolution) -> Result<Constants> {
    let (d_che, d_che_method) = cheeger(domain, res)?;
    let gap = poincare(domain, res)?;
    let (space, fam) = family(domain, res)?;
    let sets = concentration::default_worst_sets(&space, &[0.5])?;
    let c = Constants {
        d_che,
        d_che_method,
        d_poin: gap.d_poin,
        gap,
        d_exp: concentration::d_exp(&space, &fam)?.value,
        d_fm: concentration::d_fm(&space, &fam, Center::Expectation)?.value,
        d_fm_median: concentration::d_fm(&space, &fam, Center::Median)?.value,
        worst_set_value: concentration::worst_set_value(&space, &sets)?.value,
    };
    if [c.d_che, c.d_poin, c.d_exp, c.d_fm].iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Degenerate(format!("nonpositive constant in {c:?}")));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn uniform_interval() {
        let d = Domain::Measure(Measure1D::uniform(0.0, 1.0).unwrap());
        let c = compute(&d, &Resolution::default()).unwrap();
        assert!((c.d_che - 2.0).abs() < 1e-6);
        assert!((c.d_poin - PI).abs() < 5e-3 * PI);
        assert!((c.d_fm - 4.0).abs() < 0.04);
        assert!((c.d_exp - 6.29).abs() < 0.02 * 6.29);
        assert!((c.worst_set_value - 8.0).abs() < 1e-2);
    }

    #[test]
    fn product_cheeger() {
        let g = Domain::Measure(Measure1D::gaussian(0.0, 1.0).unwrap());
        let p = Domain::Product(vec![g.clone(), g]);
        let (v, tag) = cheeger(&p, &Resolution::default()).unwrap();
        assert_eq!(tag, "halfplane2d");
        assert!((v - (2.0 / PI).sqrt()).abs() < 1e-4, "{v}");
        let u = |a, b| Domain::Body(ConvexBody::interval(a, b).unwrap());
        let r = Domain::Product(vec![Domain::Measure(Measure1D::uniform(0.0, 1.0).unwrap()), u(0.0, 2.0)]);
        let (v, tag) = cheeger(&r, &Resolution::default()).unwrap();
        assert_eq!(tag, "halfplane2d");
        assert!((v - 1.0).abs() < 1e-3, "{v}");
        let (v, tag) = cheeger(&Domain::Product(vec![u(0.0, 1.0), u(0.0, 2.0)]), &Resolution::default()).unwrap();
        assert_eq!(tag, "cutsearch2d");
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn cube_uses_ramps() {
        let d = Domain::Body(ConvexBody::unit_cube(3).unwrap());
        let (v, tag) = cheeger(&d, &Resolution::default()).unwrap();
        assert_eq!(tag, "ramp11");
        assert!((2.0 * (1.0 - 1e-2)..2.5).contains(&v), "{v}");
    }
}
