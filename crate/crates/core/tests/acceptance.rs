//! Acceptance run. All criteria execute sequentially inside one test so the
//! runtime limits are measured without competing threads; each prints one
//! PASS/FAIL line with its tolerance and elapsed time.

use std::io::Write as _;
use std::time::{Duration, Instant};

use minkbilliard::billiard::{random_start, simulate};
use minkbilliard::body::{central_symmetrize, polar};
use minkbilliard::hanner::{composition_battery, density_check, HannerTree};
use minkbilliard::random::{case_rng, random_polygon};
use minkbilliard::special::{equilateral_config, equilateral_triangle, reuleaux, zaslavsky_chain, TriangleData};
use minkbilliard::verify::{run_battery, Battery};
use minkbilliard::{xi, xi_oracle, BilliardError, ConvexBody, XiOptions};
use rand::Rng;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn criterion(no: usize, name: &str, limit: Duration, run: impl FnOnce() -> Outcome, failures: &mut Vec<usize>) {
    let t0 = Instant::now();
    let out = run();
    let took = t0.elapsed();
    let in_time = took <= limit;
    let pass = out.pass && in_time;
    // Straight to the stderr handle so the lines show without --nocapture.
    let _ = writeln!(
        std::io::stderr(),
        "criterion {no:>2} {} {name}: {} [runtime {:.2}s, limit {}s]",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        took.as_secs_f64(),
        limit.as_secs()
    );
    if !pass {
        failures.push(no);
    }
}

fn opts() -> XiOptions {
    XiOptions {
        seed: SEED,
        ..XiOptions::default()
    }
}

fn triangle_sharpness() -> Outcome {
    let cfg = equilateral_config(1.0).unwrap();
    let k3 = cfg.k.scaled(3.0);
    let a = xi(&k3, &cfg.t, &opts()).unwrap().value;
    let b = xi(&cfg.hexagon, &cfg.t, &opts()).unwrap().value;
    Outcome {
        pass: (a - 3.0).abs() <= 1e-6 && (b - 3.0).abs() <= 1e-3,
        detail: format!("xi(3K,(3K)°) = {a:.9} (tol 1e-6), xi(K-K,(3K)°) = {b:.9} (tol 1e-3)"),
    }
}

fn hexagon_dynamics() -> Outcome {
    let cfg = equilateral_config(1.0).unwrap();
    let hex = cfg.hexagon.as_polytope().unwrap().clone();
    let k_polar = polar(&cfg.k).as_polytope().unwrap().clone();
    let mut rng = case_rng(SEED, 2);
    let (mut good, mut resampled, mut worst) = (0, 0, 0.0f64);
    while good < 200 {
        let (start, _) = random_start(&hex, &k_polar, &mut rng);
        match simulate(&start, &hex, &k_polar, 16) {
            Err(BilliardError::NonClassical { .. }) => resampled += 1,
            Err(e) => {
                return Outcome {
                    pass: false,
                    detail: format!("run {good}: {e}"),
                }
            }
            Ok(rec) => {
                if !rec.closed || rec.period != 4 {
                    return Outcome {
                        pass: false,
                        detail: format!("run {good}: period {}", rec.period),
                    };
                }
                worst = worst.max((rec.length_t - 9.0).abs());
                good += 1;
            }
        }
    }
    Outcome {
        pass: worst <= 1e-7,
        detail: format!("200/200 period 4, max |length - 9| = {worst:.2e} (tol 1e-7), {resampled} non-classical starts resampled"),
    }
}

fn hanner_battery() -> Outcome {
    let r = run_battery(Battery::Hanner, SEED, 100).unwrap();
    let summary: Vec<String> = r
        .cases
        .iter()
        .map(|c| format!("{}d {}/{}", c.values["dim"], c.values["period_2n"], c.values["accepted"]))
        .collect();
    Outcome {
        pass: r.all_pass(),
        detail: format!("{} trees x 100 exact runs, period 2n per tree: {} (exact)", r.cases.len(), summary.join(", ")),
    }
}

fn composition() -> Outcome {
    let r = composition_battery(50, SEED);
    Outcome {
        pass: r.passed == 50,
        detail: format!(
            "{}/50 pass projection and momentum checks ({} forbidden beta draws rejected, {} matched up to translation){}",
            r.passed,
            r.forbidden_rejected,
            r.translated_matches,
            r.failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default()
        ),
    }
}

fn density() -> Outcome {
    let r = density_check(&HannerTree::cube(3), 20, SEED, 0.05);
    Outcome {
        pass: r.within == 20,
        detail: format!("{}/20 within 0.05, max distance {:.2e}, {} retries", r.within, r.max_distance, r.retries),
    }
}

fn euclid_rogers_shepard() -> Outcome {
    let r = run_battery(Battery::RogersShepardEuclid, SEED, 51).unwrap();
    let eq = &r.cases[0];
    let min_ratio = r.cases.iter().map(|c| c.values["ratio"]).fold(f64::INFINITY, f64::min);
    let worst_rel = r
        .cases
        .iter()
        .map(|c| (c.values["xi_diff_optimizer"] / (4.0 * c.values["width"]) - 1.0).abs())
        .fold(0.0, f64::max);
    Outcome {
        pass: r.all_pass() && eq.equality,
        detail: format!(
            "equilateral ratio {:.9} vs sqrt3 (tol 1e-6), 50 random: max |xi(K-K,B)/4w - 1| = {worst_rel:.2e} (tol 1e-3), min xi/w = {min_ratio:.6} (floor sqrt3 - 1e-6)",
            eq.values["ratio"]
        ),
    }
}

fn property_batteries() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for b in [Battery::Monotonicity, Battery::Symmetry, Battery::BrunnMinkowski, Battery::Homogeneity] {
        let r = run_battery(b, SEED, 50).unwrap();
        pass &= r.all_pass() && r.cases.len() == 50;
        parts.push(format!("{b} {}/50", r.passed));
    }
    Outcome {
        pass,
        detail: format!("{} (tol 2e-2 rel, homogeneity 1e-6 rel)", parts.join(", ")),
    }
}

fn constant_width() -> Outcome {
    let r = run_battery(Battery::ConstantWidth, SEED, 2).unwrap();
    let parts: Vec<String> = r
        .cases
        .iter()
        .map(|c| format!("m = {}, xi - 2w = {:.2e}", c.values["m"], c.values["xi"] - 2.0 * c.values["width"]))
        .collect();
    Outcome {
        pass: r.all_pass(),
        detail: format!("reuleaux(3,64): {}; reuleaux(5,64): {} (window [-0.01, 0])", parts[0], parts[1]),
    }
}

fn zaslavsky() -> Outcome {
    let mut rng = case_rng(SEED, 9);
    let mut worst_identity = 0.0f64;
    let mut worst_gap = f64::INFINITY;
    let mut done = 0;
    while done < 1000 {
        let a: f64 = rng.gen_range(0.05..1.0);
        let b: f64 = rng.gen_range(0.05..1.0);
        let c: f64 = rng.gen_range(0.05..1.0);
        let Ok(tri) = TriangleData::from_sides(a, b, c) else { continue };
        if tri.p > 1.0 || tri.p < 0.2 {
            continue;
        }
        let z = zaslavsky_chain(&tri).unwrap();
        worst_identity = worst_identity
            .max(z.tangent_residual.abs())
            .max(z.ratio_residual.abs())
            .max((z.lhs - z.lhs_projected).abs());
        worst_gap = worst_gap.min(z.lhs - z.bound);
        if !z.holds(1e-12) {
            return Outcome {
                pass: false,
                detail: format!("({a}, {b}, {c}) breaks the chain: {z:?}"),
            };
        }
        done += 1;
    }
    Outcome {
        pass: true,
        detail: format!("1000/1000, min lhs - bound = {worst_gap:.2e}, max identity residual {worst_identity:.2e} (tol 1e-12)"),
    }
}

fn oracle_agreement() -> Outcome {
    let ball = ConvexBody::ball(1.0, 2);
    let cfg = equilateral_config(1.0).unwrap();
    let mut bodies: Vec<(String, ConvexBody, ConvexBody)> = vec![
        ("3K / (3K)°".into(), cfg.k.scaled(3.0), cfg.t.clone()),
        ("K-K / (3K)°".into(), cfg.hexagon.clone(), cfg.t.clone()),
        ("triangle / B".into(), equilateral_triangle(1.0), ball.clone()),
        ("disk / B".into(), ConvexBody::ball(1.0, 2), ball.clone()),
        ("reuleaux(3,64) / B".into(), reuleaux(3, 64).unwrap(), ball.clone()),
        ("reuleaux(5,64) / B".into(), reuleaux(5, 64).unwrap(), ball.clone()),
    ];
    let mut rng = case_rng(SEED, 10);
    for i in 0..4 {
        let k = random_polygon(&mut rng, 8);
        let t = random_polygon(&mut rng, 8);
        bodies.push((format!("random {i} / random"), k.clone(), t));
        bodies.push((format!("random {i}-K / B"), central_symmetrize(&k).unwrap(), ball.clone()));
    }
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for (name, k, t) in &bodies {
        let v = xi(k, t, &opts()).unwrap().value;
        let o = xi_oracle(k, t, 96).unwrap();
        let bound = 3.0 * k.perimeter() / 96.0;
        worst = worst.max((v - o).abs() / bound);
        if (v - o).abs() > bound {
            bad.push(format!("{name}: xi {v} oracle {o}"));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{} bodies, max |xi - oracle| / (3 perimeter / 96) = {worst:.3}{}",
            bodies.len(),
            if bad.is_empty() { String::new() } else { format!("; {}", bad.join("; ")) }
        ),
    }
}

#[test]
fn acceptance() {
    let mut failures = Vec::new();
    let s = Duration::from_secs;
    criterion(1, "triangle sharpness", s(30), triangle_sharpness, &mut failures);
    criterion(2, "hexagon dynamics", s(10), hexagon_dynamics, &mut failures);
    criterion(3, "Hanner battery", s(60), hanner_battery, &mut failures);
    criterion(4, "composition", s(30), composition, &mut failures);
    criterion(5, "density (sampled)", s(30), density, &mut failures);
    criterion(6, "Euclidean Rogers-Shepard", s(300), euclid_rogers_shepard, &mut failures);
    criterion(7, "property batteries", s(300), property_batteries, &mut failures);
    criterion(8, "constant width", s(60), constant_width, &mut failures);
    criterion(9, "Zaslavsky chain", s(5), zaslavsky, &mut failures);
    criterion(10, "oracle agreement", s(300), oracle_agreement, &mut failures);
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
