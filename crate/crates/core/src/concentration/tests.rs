use super::*;
use crate::geometry::ConvexBody;
use std::f64::consts::PI;

fn uniform(a: f64, b: f64) -> Space {
    Space::from_measure(&Measure1D::uniform(a, b).unwrap())
}

fn gaussian() -> Space {
    Space::from_measure(&Measure1D::gaussian(0.0, 1.0).unwrap())
}

fn family(s: &Space) -> TestFamily {
    TestFamily::default_for(s, 7, vec![]).unwrap()
}

fn cosine() -> LipschitzFunction {
    let knots = (0..=2000).map(|i| i as f64 / 2000.0).map(|x| [x, (PI * x).cos() / PI]).collect();
    LipschitzFunction::piecewise_linear(vec![1.0], knots).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn first_moment_constants() {
    let s = uniform(0.0, 1.0);
    let f = family(&s);
    for c in [Center::Median, Center::Expectation] {
        let v = d_fm(&s, &f, c).unwrap();
        assert!(rel(v.value, 4.0) < 1e-6, "{v:?} {}", f.label(v.member));
    }
    let s2 = uniform(0.0, 2.0);
    assert!(rel(d_fm(&s2, &family(&s2), Center::Expectation).unwrap().value, 2.0) < 1e-6);
    let g = gaussian();
    let v = d_fm(&g, &family(&g), Center::Expectation).unwrap();
    assert!(rel(v.value, (PI / 2.0).sqrt()) < 1e-4, "{v:?}");
}

#[test]
fn exponential_constant_of_the_interval() {
    // Closed-form tail 1 - 2t of f = x.
    let oracle = (1..500_000)
        .map(|k| k as f64 / 1_000_000.0)
        .map(|t| (1.0 - (1.0 - 2.0 * t).ln()) / t)
        .fold(f64::INFINITY, f64::min);
    assert!((oracle - 6.29).abs() < 0.01);
    let s = uniform(0.0, 1.0);
    let v = d_exp(&s, &family(&s)).unwrap();
    assert!(rel(v.value, oracle) < 2e-3, "{v:?} vs {oracle}");
    assert!(v.value >= 1.0);
    let g = gaussian();
    let v = d_exp(&g, &family(&g)).unwrap();
    assert!(v.value > 0.3 && v.value < 3.0, "{v:?}");
}

#[test]
fn exact_tail_infimum() {
    // Two atoms: S = 1/2 at t ≤ 2, S = 1 at t ≤ 1.
    let r = exp_tail_rate(&[1.0, 2.0], &[0.5, 0.5]);
    assert!((r - ((1.0 + 2f64.ln()) / 2.0).min(1.0)).abs() < 1e-15);
}

#[test]
fn pq_constants() {
    let s = uniform(0.0, 1.0);
    let f = TestFamily::default_for(&s, 7, vec![cosine()]).unwrap();
    let d11 = d_pq(&s, &f, 1.0, 1.0).unwrap();
    assert!(rel(d11.value, 2.0) < 5e-3, "{d11:?}");
    let d22 = d_pq(&s, &f, 2.0, 2.0).unwrap();
    assert!(rel(d22.value, PI) < 0.01, "{d22:?}");
    let d1inf = d_pq(&s, &f, 1.0, f64::INFINITY).unwrap();
    let fm = d_fm(&s, &f, Center::Median).unwrap();
    assert!(rel(d1inf.value, fm.value) < 1e-6, "{d1inf:?} {fm:?}");
    assert!(d_pq(
        &s,
        &TestFamily::new(vec![LipschitzFunction::piecewise_linear(vec![1.0], vec![[0.0, 1.0]]).unwrap()]),
        1.0,
        1.0
    )
    .is_err());
}

#[test]
fn jensen_and_chain() {
    for s in [uniform(0.0, 1.0), gaussian()] {
        let f = family(&s);
        let top = d_pq(&s, &f, 1.0, f64::INFINITY).unwrap().value;
        for (p, q) in [(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (2.0, 4.0), (4.0, f64::INFINITY)] {
            assert!(top >= d_pq(&s, &f, p, q).unwrap().value * (1.0 - 1e-12));
        }
        let d11 = d_pq(&s, &f, 1.0, 1.0).unwrap().value;
        for p in [1.0, 2.0, 4.0] {
            let closed = f.clone().with_powers(&[1.0, p]);
            let dpp = d_pq(&s, &closed, p, p).unwrap().value;
            let dpq = d_pq(&s, &closed, p, 2.0 * p).unwrap().value;
            let d11c = d_pq(&s, &closed, 1.0, 1.0).unwrap().value.min(d11);
            assert!(dpq >= dpp * (1.0 - 1e-12) || p == 1.0);
            assert!(dpp >= d11c / p * (1.0 - 1e-9), "{p}: {dpp} vs {d11c}");
        }
    }
}

#[test]
fn monotonicity_in_exponents() {
    let s = uniform(0.0, 1.0);
    let f = TestFamily::default_for(&s, 7, vec![cosine()]).unwrap();
    assert!(pq_monotonicity_check(&s, &f, (1.0, 1.0), (2.0, 2.0)).unwrap() > 0.0);
    assert!(pq_monotonicity_check(&s, &f, (2.0, 2.0), (2.0, 2.0)).unwrap().abs() < 1e-12);
    assert!(pq_monotonicity_check(&s, &f, (1.0, 1.0), (2.0, 4.0)).is_err());
    let g = gaussian();
    assert!(pq_monotonicity_check(&g, &family(&g), (2.0, 2.0), (4.0, 4.0)).unwrap() >= -1e-9);
}

#[test]
fn worst_sets() {
    let s = uniform(0.0, 1.0);
    let a = HalfSpace::new(vec![1.0], 0.5).unwrap();
    assert!(rel(worst_set_value(&s, &[a]).unwrap().value, 8.0) < 1e-6);
    let v = worst_set_value(&s, &default_worst_sets(&s, &[0.5, 0.75]).unwrap()).unwrap();
    assert!(rel(v.value, 8.0) < 1e-3, "{v:?}");
    let g = gaussian();
    let v = worst_set_value(&g, &default_worst_sets(&g, &[0.5]).unwrap()).unwrap();
    assert!(rel(v.value, (2.0 * PI).sqrt()) < 1e-4, "{v:?}");
    let small = HalfSpace::new(vec![1.0], 0.2).unwrap();
    assert!(worst_set_value(&s, &[small]).is_err());
    assert!(worst_set_value(&s, &[]).is_err());
}

#[test]
fn scaling_covariance() {
    let base = uniform(0.0, 1.0);
    let f = family(&base);
    let b = [
        d_fm(&base, &f, Center::Median).unwrap().value,
        d_exp(&base, &f).unwrap().value,
        d_pq(&base, &f, 2.0, 2.0).unwrap().value,
    ];
    for s in [0.5, 2.0] {
        let sp = uniform(0.0, s);
        let fs = family(&sp);
        let v = [
            d_fm(&sp, &fs, Center::Median).unwrap().value,
            d_exp(&sp, &fs).unwrap().value,
            d_pq(&sp, &fs, 2.0, 2.0).unwrap().value,
        ];
        for (x, y) in v.iter().zip(&b) {
            assert!(rel(x * s, *y) < 1e-6, "{s}: {x} vs {y}");
        }
    }
}

#[test]
fn square_grid_constants() {
    let sq = Domain::Body(ConvexBody::unit_cube(2).unwrap());
    let s = Space::for_domain(&sq, 1.0 / 64.0).unwrap();
    let f = family(&s);
    let fm = d_fm(&s, &f, Center::Expectation).unwrap();
    assert!(rel(fm.value, 4.0) < 1e-3, "{fm:?}");
    let ws = worst_set_value(&s, &default_worst_sets(&s, &[0.5]).unwrap()).unwrap();
    assert!(rel(ws.value, 8.0) < 1e-3, "{ws:?}");
    let x = LipschitzFunction::GridFunction { values: s.grid().unwrap().sample(|p| p[0]) };
    let e = s.eval(&x).unwrap();
    assert!((e.lip - 1.0).abs() < 1e-9);
    assert!(e.grads.iter().all(|g| (g - 1.0).abs() < 1e-9));
}

#[test]
fn power_transform_gradients() {
    let s = uniform(0.0, 1.0);
    let f = TestFamily::new(vec![LipschitzFunction::Coordinate(0)]).with_powers(&[1.0, 2.0]);
    let out = f.scan(&s, |x| (x.values[0], x.grads[0], x.lip)).unwrap();
    let x0 = s.points()[0][0];
    assert_eq!(out[0], (x0, 1.0, 1.0));
    let g = x0 - median(&s.points().iter().map(|p| p[0]).collect::<Vec<_>>(), s.weights()).unwrap();
    assert!((out[1].0 + g * g).abs() < 1e-6 && (out[1].1 - 2.0 * g.abs()).abs() < 1e-6);
    assert!((out[1].2 - 1.0).abs() < 1e-3);
    assert_eq!(f.label(1), "pow2(x0)");
}
