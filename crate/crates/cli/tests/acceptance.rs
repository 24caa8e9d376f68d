//! Acceptance criteria, one line each. Run with
//! `cargo test -p isogap-cli --test acceptance`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::Parser;
use isogap::constants::{self, Resolution};
use isogap::geometry::{ConvexBody, CutCurve};
use isogap::measures::Measure1D;
use isogap::profile::{profile_2d_upper, CutFamily};
use isogap::report::{CheckKind, CheckRow};
use isogap::spectral::{spectral_gap_richardson, Domain};
use isogap_cli::fixture::Registry;
use isogap_cli::manifest::Manifest;
use isogap_cli::output::Report;
use isogap_cli::{run, Cli};

struct Verdict {
    id: usize,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn rel(x: f64, want: f64) -> f64 {
    (x - want).abs() / want.abs()
}

fn close(label: &str, x: f64, want: f64, tol: f64, notes: &mut Vec<String>) -> bool {
    let e = rel(x, want);
    notes.push(format!("{label}={x:.6} (rel err {e:.1e}, tol {tol:.0e})"));
    e <= tol
}

fn rows<'a>(report: &'a Report, part: &str) -> impl Iterator<Item = (&'a str, &'a CheckRow)> + 'a {
    let part = part.to_string();
    report
        .sections
        .iter()
        .filter(move |s| s.part == part)
        .flat_map(|s| s.checks.iter().map(move |r| (s.scope.as_str(), r)))
}

fn find<'a>(report: &'a Report, scope: &str, name: &str) -> Option<&'a CheckRow> {
    report.sections.iter().filter(|s| s.scope == scope).flat_map(|s| &s.checks).find(|r| r.name == name)
}

/// Every required row prefix occurs, and every explicit row of the given
/// parts passes.
fn explicit_suite(report: &Report, parts: &[&str], required: &[&str], notes: &mut Vec<String>) -> bool {
    let mut ok = true;
    let mut count = 0;
    for part in parts {
        for (scope, r) in rows(report, part).filter(|(_, r)| r.kind == CheckKind::Explicit) {
            count += 1;
            if !r.pass {
                ok = false;
                notes.push(format!("{scope}.{} slack {:.3e}", r.name, r.value()));
            }
        }
    }
    for req in required {
        let found = parts.iter().any(|p| rows(report, p).any(|(_, r)| r.name.starts_with(req)));
        if !found {
            ok = false;
            notes.push(format!("missing {req}"));
        }
    }
    notes.push(format!("{count} explicit rows"));
    ok
}

fn verify(out: &Path) -> (Report, String, Duration) {
    let cli = Cli::try_parse_from(["isogap", "verify", "--out", out.to_str().unwrap()]).unwrap();
    let t = Instant::now();
    let o = run(&cli).expect("verify runs");
    (o.report.clone(), o.report.table(), t.elapsed())
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect()
}

fn scratch_dir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("isogap-acceptance-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn one_d_exact() -> (bool, String) {
    let mut n = Vec::new();
    let t = Instant::now();
    let res = Resolution::default();
    let u = constants::compute(&Domain::Measure(Measure1D::uniform(0.0, 1.0).unwrap()), &res).unwrap();
    let g = constants::compute(&Domain::Measure(Measure1D::gaussian(0.0, 1.0).unwrap()), &res).unwrap();
    let mut ok = close("uniform D_Che", u.d_che, 2.0, 1e-6, &mut n);
    ok &= close("D_Poin", u.d_poin, PI, 5e-3, &mut n);
    ok &= close("D_FM", u.d_fm, 4.0, 1e-2, &mut n);
    ok &= close("D_Exp", u.d_exp, 6.29, 2e-2, &mut n);
    ok &= close("gaussian D_Che", g.d_che, (2.0 / PI).sqrt(), 1e-3, &mut n);
    ok &= close("D_Poin", g.d_poin, 1.0, 5e-3, &mut n);
    let el = t.elapsed().as_secs_f64();
    n.push(format!("{el:.1}s"));
    (ok && el <= 10.0, n.join(", "))
}

fn planar_gaps() -> (bool, String) {
    let mut n = Vec::new();
    let mut ok = true;
    let square = Domain::Body(ConvexBody::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap());
    let disk = Domain::Body(ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap());
    // Extrapolation pairs h with h/2, so the square's finest grid is 1/128.
    // The disk stops at 1/64: at 1/128 the direct solver exceeds its memory
    // budget and the iterative fallback is far too slow.
    for (label, dom, h, want) in [("square", square, 1.0 / 64.0, PI * PI), ("disk", disk, 1.0 / 32.0, 3.3900)] {
        let t = Instant::now();
        let g = spectral_gap_richardson(&dom, h).unwrap();
        let el = t.elapsed().as_secs_f64();
        ok &= close(&format!("{label} lambda"), g.lambda, want, 1e-2, &mut n) && el <= 60.0;
        n.push(format!("{el:.1}s"));
    }
    (ok, n.join(", "))
}

fn planar_cheeger() -> (bool, String) {
    let mut n = Vec::new();
    let fam = CutFamily::default();
    let square = ConvexBody::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
    let disk = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
    let mut ok = close("square D_Che", 2.0 * profile_2d_upper(&square, 0.5, &fam).unwrap().value, 2.0, 2e-2, &mut n);
    ok &= close("disk D_Che", 2.0 * profile_2d_upper(&disk, 0.5, &fam).unwrap().value, 4.0 / PI, 2e-2, &mut n);
    let t = 0.05;
    let corner = profile_2d_upper(&square, t, &fam).unwrap();
    ok &= close("I(0.05)", corner.value, (PI * t).sqrt(), 1e-2, &mut n);
    let arc = matches!(corner.cut, CutCurve::Arc { inside: true, .. });
    let straight = 2.0 * t.sqrt();
    n.push(format!("cut {}, best straight cut {straight:.6}", corner.cut));
    ok &= arc && corner.value < straight;
    (ok, n.join(", "))
}

fn main() {
    let mut verdicts = Vec::new();
    let mut push = |id, title, (pass, detail): (bool, String)| verdicts.push(Verdict { id, title, pass, detail });

    push(1, "1-D exact constants", one_d_exact());
    push(2, "2-D spectral gaps", planar_gaps());
    push(3, "2-D Cheeger at half measure and corner arc", planar_cheeger());

    let (dir_a, dir_b) = (scratch_dir("a"), scratch_dir("b"));
    let (report, table, first) = verify(&dir_a);
    let registry = Registry::builtin();
    let manifest = Manifest::builtin();
    let convex: Vec<&String> =
        report.fixtures.iter().filter(|f| registry.resolve(f).map(|x| x.convex).unwrap_or(false)).collect();

    push(4, "explicit inequality suite", {
        let mut n = Vec::new();
        let required = [
            "median_vs_mean_l1",
            "median_vs_mean_l2",
            "median_vs_mean_psi1",
            "pq_monotone",
            "buser_2_2",
            "buser_1_inf",
            "bakry_ledoux",
            "ledoux_l1",
            "gradient_decay",
            "going_up_v2",
            "going_up_single_step",
            "going_up_limit",
            "pushforward_lipschitz",
            "payne_weinberger",
            "first_moment_half",
            "borell_tail",
            "paley_zygmund",
        ];
        let mut ok = explicit_suite(&report, &["inequalities", "semigroup", "bounds", "stability"], &required, &mut n);
        for f in &convex {
            for name in ["borell_tail", "paley_zygmund", "bakry_ledoux"] {
                if find(&report, f, name).is_none() {
                    ok = false;
                    n.push(format!("{f} lacks {name}"));
                }
            }
        }
        // Equality for the interval: D_Poin = π / diam.
        let pw = find(&report, "interval02", "payne_weinberger").map(|r| r.value());
        let eq = pw.is_some_and(|s| s.abs() <= 1e-3 * PI / 2.0);
        n.push(format!("interval02 Payne-Weinberger slack {:.2e}", pw.unwrap_or(f64::NAN)));
        (ok && eq, n.join(", "))
    });

    push(5, "profile structure", {
        let mut n = Vec::new();
        let ok = explicit_suite(
            &report,
            &["profile"],
            &["profile_symmetry", "concavity_power1", "concavity_power2", "capacity_sandwich", "cheeger_consistency"],
            &mut n,
        );
        let tracked_convex = rows(&report, "profile")
            .filter(|(s, r)| r.kind == CheckKind::Tracked && convex.iter().any(|c| c == s))
            .count();
        n.push(format!("{tracked_convex} convex fixtures without an explicit concavity row"));
        (ok && tracked_convex == 0, n.join(", "))
    });

    push(6, "negative control", {
        let sec = report.sections.iter().find(|s| s.part == "negative_control");
        match sec {
            Some(s) => {
                let half = s.data["profile_half"].as_f64().unwrap_or(f64::NAN);
                let defect = s.data["concavity_defect"].as_f64().unwrap_or(f64::NAN);
                let tv = s.data["tv_to_uniform"]["value"].as_f64().unwrap_or(f64::NAN);
                let ok = half <= 1e-6 && defect > 1e-6 && tv < 1.0 && s.checks.iter().all(|r| r.pass);
                (ok, format!("{}: I(1/2)={half:.2e}, concavity defect {defect:.3}, TV to uniform {tv:.4}", s.scope))
            }
            None => (false, "no negative control section".into()),
        }
    });

    push(7, "pairwise ratio bands and pins", {
        let mut n = vec![format!("{} convex fixtures", convex.len())];
        let mut ok = convex.len() >= 8;
        let mut checked = 0;
        for (scope, r) in rows(&report, "constants") {
            let Some(&(lo, hi)) = manifest.bands.get(&r.name) else { continue };
            if !convex.iter().any(|c| *c == scope) {
                continue;
            }
            checked += 1;
            if !(lo..=hi).contains(&r.value()) {
                ok = false;
                n.push(format!("{scope}.{} = {:.4} outside [{lo}, {hi}]", r.name, r.value()));
            }
        }
        ok &= checked >= 6 * 8;
        n.push(format!("{checked} ratios in band, {} warnings", report.warnings.len()));
        ok &= report.warnings.is_empty();
        // A strict run must fail once the pins are off by more than the drift.
        let shifted: String = manifest
            .text
            .lines()
            .map(|l| match l.split_once('=') {
                Some((k, v)) if k.starts_with("pin.") => format!("{k}={}\n", v.parse::<f64>().unwrap() * 1.2),
                _ => format!("{l}\n"),
            })
            .collect();
        let moved = Manifest::parse(&shifted).unwrap();
        let strict = Report::new("verify", "", 1, None, report.fixtures.clone(), report.sections.clone(), &moved, true);
        let lax = Report::new("verify", "", 1, None, report.fixtures.clone(), report.sections.clone(), &manifest, true);
        n.push(format!("strict run with pins moved 20%: {} warnings", strict.summary.warnings));
        ok &= !strict.summary.pass && lax.summary.pass;
        (ok, n.join(", "))
    });

    push(8, "tensorization", {
        let mut n = Vec::new();
        let rect = Domain::Product(vec![
            Domain::Body(ConvexBody::interval(0.0, 1.0).unwrap()),
            Domain::Body(ConvexBody::interval(0.0, 2.0).unwrap()),
        ]);
        let g = spectral_gap_richardson(&rect, 1.0 / 32.0).unwrap();
        let mut ok = close("[0,1]x[0,2] lambda", g.lambda, PI * PI / 4.0, 1e-2, &mut n);
        let gaps: Vec<&CheckRow> =
            rows(&report, "tensorization").map(|(_, r)| r).filter(|r| r.name == "product_gap").collect();
        ok &= gaps.len() >= 3 && gaps.iter().all(|r| r.pass);
        n.push(format!("{} product fixtures satisfy the gap identity", gaps.iter().filter(|r| r.pass).count()));
        (ok, n.join(", "))
    });

    push(9, "worst-set characterization", {
        let mut n = Vec::new();
        let ok = explicit_suite(&report, &["constants"], &["worst_set_band", "worst_set_direction"], &mut n);
        let band = rows(&report, "constants").filter(|(_, r)| r.name == "worst_set_band").count();
        n.push(format!("{band} fixtures"));
        (ok && band == convex.len(), n.join(", "))
    });

    let (again, table_again, second) = verify(&dir_b);
    push(10, "full verify deterministic and fast", {
        let same_json = report.to_json() == again.to_json();
        let same_files = files(&dir_a) == files(&dir_b);
        let fast = first.max(second) <= Duration::from_secs(600);
        let detail = format!(
            "runs {:.0}s and {:.0}s, {} checks, report identical {same_json}, tables identical {}, {} output files identical {same_files}",
            first.as_secs_f64(),
            second.as_secs_f64(),
            report.summary.checks,
            table == table_again,
            files(&dir_a).len(),
        );
        (same_json && same_files && table == table_again && fast && report.summary.pass, detail)
    });
    let _ = std::fs::remove_dir_all(&dir_a);
    let _ = std::fs::remove_dir_all(&dir_b);

    for v in &verdicts {
        println!("criterion {:>2} {}: {} ({})", v.id, if v.pass { "PASS" } else { "FAIL" }, v.title, v.detail);
    }
    let failed: Vec<usize> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria pass", verdicts.len());
}
