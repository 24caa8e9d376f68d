use isogap::concentration::{self, norm_lp, power_transform, Center, Space, TestFamily};
use isogap::measures::{tv_distance, Measure1D};
use isogap::profile::{curve_1d, default_t_grid};
use isogap::spectral::{discretize, heat_evolve, Domain, GridOperator};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 16, ..ProptestConfig::default() }
}

fn measure(kind: u8, loc: f64, scale: f64) -> Measure1D {
    match kind % 4 {
        0 => Measure1D::uniform(loc, loc + scale).unwrap(),
        1 => Measure1D::gaussian(loc, scale).unwrap(),
        2 => Measure1D::laplace(loc, scale).unwrap(),
        _ => Measure1D::exponential(1.0 / scale).unwrap().affine_image(1.0, loc).unwrap(),
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn profile_is_symmetric(kind in 0u8..4, loc in -3.0..3.0f64, scale in 0.2..5.0f64) {
        let c = curve_1d(&measure(kind, loc, scale), &default_t_grid()).unwrap();
        prop_assert!(c.symmetry_defect() <= 1e-9, "{}", c.symmetry_defect());
    }

    #[test]
    fn tv_is_a_metric(
        a in (0u8..4, -1.0..1.0f64, 0.5..2.0f64),
        b in (0u8..4, -1.0..1.0f64, 0.5..2.0f64),
        c in (0u8..4, -1.0..1.0f64, 0.5..2.0f64),
    ) {
        let (ma, mb, mc) = (measure(a.0, a.1, a.2), measure(b.0, b.1, b.2), measure(c.0, c.1, c.2));
        let self_d = tv_distance(&ma, &ma).unwrap();
        prop_assert!(self_d.value <= self_d.err + 1e-12);
        let ab = tv_distance(&ma, &mb).unwrap();
        let ba = tv_distance(&mb, &ma).unwrap();
        prop_assert!((ab.value - ba.value).abs() <= ab.err + ba.err + 1e-12);
        prop_assert!((0.0..=1.0 + ab.err).contains(&ab.value));
        let bc = tv_distance(&mb, &mc).unwrap();
        let ac = tv_distance(&ma, &mc).unwrap();
        prop_assert!(ac.value <= ab.value + bc.value + ab.err + bc.err + ac.err + 1e-12);
    }

    #[test]
    fn first_moment_constant_scales_inversely(width in 0.1..10.0f64, shift in -5.0..5.0f64) {
        let m = Measure1D::uniform(shift, shift + width).unwrap();
        let s = Space::from_measure(&m);
        let fam = TestFamily::default_for(&s, 1, vec![]).unwrap();
        let v = concentration::d_fm(&s, &fam, Center::Expectation).unwrap().value;
        prop_assert!((v * width - 4.0).abs() < 4e-2, "{}", v * width);
    }

    #[test]
    fn stiffness_kills_constants(h in 0.04..0.2f64, c in -10.0..10.0f64) {
        let d = Domain::Body(isogap::geometry::ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap());
        let op = GridOperator::assemble(discretize(&d, h).unwrap());
        let f = vec![c; op.len()];
        let mut out = vec![0.0; op.len()];
        op.stiffness().mul(&f, &mut out);
        prop_assert!(out.iter().all(|v| v.abs() <= 1e-12 * (1.0 + c.abs())));
    }

    #[test]
    fn heat_contracts(t in 0.001..0.5f64, freq in 1.0..6.0f64, p in prop::sample::select(vec![1.0, 2.0, 4.0, f64::INFINITY])) {
        let d = Domain::Body(isogap::geometry::ConvexBody::interval(0.0, 1.0).unwrap());
        let op = GridOperator::assemble(discretize(&d, 0.02).unwrap());
        let f = op.domain().sample(|x| (freq * x[0]).sin() + if x[0] > 0.4 { 1.0 } else { 0.0 });
        let u = heat_evolve(&op, &f, t, 0).unwrap().values;
        let g = op.domain();
        prop_assert!(g.norm(&u, p) <= g.norm(&f, p) * (1.0 + 1e-10));
    }

    #[test]
    fn lp_norms_increase(values in prop::collection::vec(-5.0..5.0f64, 2..40)) {
        let w = vec![1.0 / values.len() as f64; values.len()];
        let ps = [0.5, 1.0, 1.5, 2.0, 3.0, 8.0, f64::INFINITY];
        let n: Vec<f64> = ps.iter().map(|p| norm_lp(&values, &w, *p).unwrap()).collect();
        for k in 1..n.len() {
            prop_assert!(n[k] >= n[k - 1] * (1.0 - 1e-12), "{n:?}");
        }
    }

    #[test]
    fn power_transform_preserves_order(values in prop::collection::vec(-5.0..5.0f64, 3..40), alpha in 1.0..4.0f64) {
        let w = vec![1.0 / values.len() as f64; values.len()];
        let s = concentration::Sampled { values: values.clone(), grads: vec![1.0; values.len()], lip: 1.0 };
        let t = power_transform(&s, &w, alpha);
        for i in 0..values.len() {
            for j in 0..values.len() {
                if values[i] < values[j] {
                    prop_assert!(t.values[i] <= t.values[j]);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn exponent_monotonicity_slack(kind in 0u8..3, scale in 0.5..2.0f64, p in 1.0..2.0f64) {
        let m = measure(kind, 0.0, scale);
        let s = Space::from_measure(&m);
        let fam = TestFamily::default_for(&s, 3, vec![]).unwrap();
        // Same 1/p - 1/q for both pairs.
        let p2 = 2.0 * p;
        let r = 1.0 / p - 0.5;
        let q2 = 1.0 / (1.0 / p2 - r);
        prop_assume!(q2 > 0.0);
        let slack = concentration::pq_monotonicity_check(&s, &fam, (p, 2.0), (p2, q2)).unwrap();
        prop_assert!(slack >= -1e-9, "{slack}");
    }
}
