use super::*;
use std::f64::consts::PI;

fn interval(a: f64, b: f64) -> ConvexBody {
    ConvexBody::interval(a, b).unwrap()
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> ConvexBody {
    ConvexBody::boxed(vec![x0, y0], vec![x1, y1]).unwrap()
}

fn coarse() -> Resolution {
    Resolution { cells_2d: 32, ..Resolution::default() }
}

#[test]
fn going_up_examples() {
    for v in [0.3, 0.7, 1.0] {
        let g = going_up_check(&interval(0.0, v), &interval(0.0, 1.0), 0).unwrap();
        assert!((g.slack - 2.0 * (1.0 - v)).abs() < 1e-9, "{g:?}");
        assert_eq!(g.single_step.is_some(), v > 0.5);
        assert!(g.rows().iter().all(|r| r.pass));
    }
    let g = going_up_check(&rect(0.0, 0.0, 1.0, 0.5), &rect(0.0, 0.0, 1.0, 1.0), 0).unwrap();
    assert!((g.slack - 1.5).abs() < 1e-6, "{g:?}");
    assert!(going_up_check(&interval(0.0, 1.5), &interval(0.0, 1.0), 0).is_err());
}

#[test]
fn going_down_ratios() {
    let sq = rect(0.0, 0.0, 1.0, 1.0);
    let same = going_down_report(&sq, &sq, &coarse()).unwrap();
    assert!((same.ratio - same.d_fm_l * 2f64.ln() / same.d_exp_k).abs() < 1e-12);
    let half = going_down_report(&rect(0.0, 0.0, 1.0, 0.5), &sq, &coarse()).unwrap();
    assert!(half.ratio.is_finite() && half.ratio > 0.0 && (half.v - 0.5).abs() < 1e-12);
}

#[test]
fn stability_report_shifted_square() {
    let k = rect(0.0, 0.0, 1.0, 1.0);
    let l = rect(0.1, 0.0, 1.1, 1.0);
    let r = stability_theorem_report(&k, &l, &coarse()).unwrap();
    assert!((r.v_k - 0.9).abs() < 5e-3 && (r.v_l - 0.9).abs() < 5e-3, "{r:?}");
    assert!(r.checks.iter().all(|c| c.pass), "{:?}", r.checks);
    let same = stability_theorem_report(&k, &k, &coarse()).unwrap();
    assert!((same.v_k - 1.0).abs() < 5e-3);
}

#[test]
fn geometric_distance_examples() {
    let sq = rect(-0.5, -0.5, 0.5, 0.5);
    let g = geometric_distance_check(&sq, &sq).unwrap();
    assert!(g.s.abs() < 1e-9 && (g.upper - 1.0).abs() < 1e-9 && (g.lower - 1.0).abs() < 1e-9);
    let big = sq.scaled(1.05).unwrap();
    let g = geometric_distance_check(&sq, &big).unwrap();
    assert!((g.d_g - 1.05).abs() < 1e-9 && (g.s - 0.1).abs() < 1e-8);
    assert!((g.d_che_k / g.d_che_l - 1.05).abs() < 1e-6, "{g:?}");
    let rows = slab_sweep(&[0.3, 0.5, 0.8]).unwrap();
    for (s, r) in &rows {
        assert!(r.d_g <= (1.0 + 2e-3) / (1.0 - s), "{s}: {r:?}");
        assert!(r.upper.is_finite() && r.lower.is_finite());
    }
}

#[test]
fn box_sweep_is_linear() {
    for r in circumscribing_box_sweep(&[1.5, 2.0, 4.0], 0).unwrap() {
        assert!((r.linear - 1.0).abs() < 1e-6 && r.quadratic >= 1.0, "{r:?}");
    }
}

#[test]
fn tv_examples() {
    let u = Measure1D::uniform(0.0, 1.0).unwrap();
    let r = tv_stability_report(&u, &u).unwrap();
    assert!(r.tv.abs() < 1e-9 && (r.ratio - 1.0).abs() < 1e-9);
    let r = tv_stability_report(&u, &Measure1D::uniform(0.0, 0.8).unwrap()).unwrap();
    assert!((r.tv - 0.2).abs() < 1e-3 && (r.ratio - 0.8).abs() < 1e-6, "{r:?}");
    let g = Measure1D::gaussian(0.0, 1.0).unwrap();
    let r = tv_stability_report(&g, &Measure1D::gaussian(0.5, 1.0).unwrap()).unwrap();
    assert!((r.ratio - 1.0).abs() < 1e-6 && r.tv > 0.19 && r.tv < 0.2, "{r:?}");
    assert!(tv_stability_report(&u, &Measure1D::uniform(2.0, 3.0).unwrap()).is_err());
}

#[test]
fn pushforward_examples() {
    let u = Measure1D::uniform(0.0, 1.0).unwrap();
    let half = MonotoneMap::sample(|x| x / 2.0, 0.0, 1.0, 4).unwrap();
    let r = pushforward_check(&half, &u, &Measure1D::uniform(0.0, 0.5).unwrap()).unwrap();
    assert!((r.ratio - 1.0).abs() < 1e-6 && r.plain_slack.abs() < 1e-6, "{r:?}");
    let id = MonotoneMap::sample(|x| x, 0.0, 1.0, 1).unwrap();
    assert!((pushforward_check(&id, &u, &u).unwrap().ratio - 1.0).abs() < 1e-9);
    // T(x) = √(1+3x) - 1 sends the uniform measure to density (2/3)(1+y).
    let t = MonotoneMap::sample(|x| (1.0 + 3.0 * x).sqrt() - 1.0, 0.0, 1.0, 2000).unwrap();
    let target = Measure1D::from_potential(|y| -(1.0 + y).ln(), 0.0, 1.0, 8001).unwrap();
    let r = pushforward_check(&t, &u, &target).unwrap();
    let y = 2.5f64.sqrt() - 1.0;
    assert!((r.d_che_target - 2.0 * 2.0 / 3.0 * (1.0 + y)).abs() < 1e-4, "{r:?}");
    assert!((r.mean_local_lip - 1.0).abs() < 1e-6 && (r.lip - 1.5).abs() < 1e-3);
    assert!(r.rows()[0].pass);
    assert!(pushforward_check(&half, &u, &u).is_err());
}

#[test]
fn tensorization_examples() {
    let res = Resolution { cells_2d: 64, ..Resolution::default() };
    let d = |a, b| Domain::Body(interval(a, b));
    let r = tensorization_check(&d(0.0, 1.0), &d(0.0, 2.0), &res).unwrap();
    assert!((r.lambda_ab - PI * PI / 4.0).abs() < 0.01 * PI * PI / 4.0, "{r:?}");
    assert!(r.gap_defect <= r.gap_tol, "{r:?}");
    assert!((r.che_ratio - 1.0).abs() < 1e-9);
    let r = tensorization_check(&d(0.0, 1.0), &d(0.0, 1.0), &res).unwrap();
    assert!(r.gap_defect <= r.gap_tol && (r.che_ratio - 1.0).abs() < 1e-9);
    let g = Domain::Measure(Measure1D::gaussian(0.0, 1.0).unwrap());
    let r = tensorization_check(&g, &g, &res).unwrap();
    assert!(r.gap_defect <= r.gap_tol && (r.lambda_ab - 1.0).abs() < 0.02, "{r:?}");
    assert!((r.che_ratio - 1.0).abs() < 1e-3, "{r:?}");
}

#[test]
fn going_up_limits() {
    let r = going_up_limit_check(0.9, 64).unwrap();
    assert!(r.pass() && (r.table.last().unwrap().1 - 0.81).abs() < 1e-3);
    let r = going_up_limit_check(1.0, 8).unwrap();
    assert!(r.table.iter().all(|e| e.1 == 1.0) && r.pass());
    let r = going_up_limit_check(0.5, 128).unwrap();
    assert!(r.pass() && r.table.last().unwrap().1 < 0.25);
    assert!(going_up_limit_check(0.0, 8).is_err());
}

#[test]
fn translation_invariance() {
    let [a, b] = translated_constants(&rect(0.0, 0.0, 1.0, 1.0), &[0.37, -1.2], &coarse()).unwrap();
    assert!((a.d_che - b.d_che).abs() < 1e-9 * a.d_che);
    assert!((a.d_fm - b.d_fm).abs() < 1e-6 * a.d_fm && (a.d_exp - b.d_exp).abs() < 1e-6 * a.d_exp, "{a:?} {b:?}");
}
