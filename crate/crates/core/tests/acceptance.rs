//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use pharmonic::analytic::{first_bound, planar_exponent, second_bound};
use pharmonic::measure::{barrier_envelope_check, run_experiment, solve_p_harmonic, GridSpec};
use pharmonic::ode::full_residual;
use pharmonic::profile::{compute_profile, verify_boundary_conditions};
use pharmonic::shooting::RESIDUAL_PROFILE_POINTS;
use pharmonic::uniqueness::{audit_monotonicity, DEFAULT_FD_STEP};
use pharmonic::{classify_cos_test, exponent_bounds, solve_exponent, ExponentResult, ProblemParams};

const K_TOL: f64 = 1e-10;

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

/// Closed-form cases; every solved result is kept for the profile criteria.
fn closed_forms(solved: &mut Vec<ExponentResult>) -> Outcome {
    let start = Instant::now();
    let mut cases: Vec<(f64, u32, f64)> = Vec::new();
    cases.extend((2..=6).map(|n| (2.0, n, f64::from(n) - 1.0)));
    cases.extend([1.6, 1.8, 2.5, 3.0, 4.0, 6.0, 10.0].iter().map(|&p| (p, 2, planar_exponent(p))));
    cases.extend((2..=5).map(|n| (f64::from(n), n, 1.0)));
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (p, n, expect) in cases {
        match solve_exponent(p, n, K_TOL) {
            Ok(r) => {
                worst = worst.max((r.alpha - expect).abs());
                if (r.alpha - expect).abs() > 1e-7 {
                    failures.push(format!("(p={p}, N={n}) alpha={} expected {expect}", r.alpha));
                }
                solved.push(r);
            }
            Err(e) => failures.push(format!("(p={p}, N={n}): {e}")),
        }
    }
    let elapsed = start.elapsed();
    check(
        failures.is_empty() && within(elapsed, 10),
        format!("max |alpha - exact| = {worst:.3e}, {:.1} s {}", elapsed.as_secs_f64(), failures.join("; ")),
    )
}

fn bracket_containment(solved: &mut Vec<ExponentResult>) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut count = 0;
    for &p in &[1.2, 1.5, 1.8, 2.0, 2.5, 3.0, 4.0, 6.0, 10.0] {
        for n in 2..=5 {
            match solve_exponent(p, n, K_TOL) {
                Ok(r) => {
                    count += 1;
                    let b = exponent_bounds(p, n);
                    // a point bracket can only be met up to the classification resolution
                    let inside = r.in_bounds(&b);
                    if !inside {
                        failures.push(format!("(p={p}, N={n}) alpha={} outside {:?}", r.alpha, exponent_bounds(p, n)));
                    }
                    solved.push(r);
                }
                Err(e) => failures.push(format!("(p={p}, N={n}): {e}")),
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        failures.is_empty() && within(elapsed, 60),
        format!("{count}/36 inside their brackets, {:.1} s {}", elapsed.as_secs_f64(), failures.join("; ")),
    )
}

fn asymptotic_trend() -> Outcome {
    let mut alphas = Vec::new();
    for &p in &[10.0, 50.0, 200.0, 1000.0] {
        match solve_exponent(p, 3, K_TOL) {
            Ok(r) => alphas.push(r.alpha),
            Err(e) => return check(false, format!("p={p}: {e}")),
        }
    }
    let decreasing = alphas.windows(2).all(|w| w[1] < w[0]);
    let above = alphas.iter().all(|&a| a > 1.0 / 3.0);
    let gap = (alphas[3] - 1.0 / 3.0).abs();
    check(decreasing && above && gap < 0.05, format!("alpha(p, 3) = {alphas:.6?}, |alpha(1000) - 1/3| = {gap:.4}"))
}

fn residuals(solved: &[ExponentResult]) -> Outcome {
    let worst = solved.iter().map(|r| r.residual_max).fold(0.0, f64::max);
    let bad: Vec<_> = solved
        .iter()
        .filter(|r| !(r.residual_max < 1e-6))
        .map(|r| format!("(p={}, N={}) {:.2e}", r.p, r.n, r.residual_max))
        .collect();
    check(bad.is_empty(), format!("{} profiles, worst normalized residual {worst:.3e} {}", solved.len(), bad.join("; ")))
}

fn profile_conditions(solved: &[ExponentResult]) -> Outcome {
    let mut failures = Vec::new();
    let mut cos_err: f64 = 0.0;
    for r in solved {
        let prof = match compute_profile(r.p, r.n, r.k_star, RESIDUAL_PROFILE_POINTS) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("(p={}, N={}): {e}", r.p, r.n));
                continue;
            }
        };
        let c = verify_boundary_conditions(&prof);
        let decreasing = prof.f.windows(2).all(|w| w[1] < w[0]);
        let ok = c.f0_deviation <= 1e-8
            && c.fp0_deviation <= 1e-8
            && decreasing
            && c.f_end <= 1e-6
            && c.fp_end.is_finite()
            && c.fp_end < 0.0;
        if !ok {
            failures.push(format!("(p={}, N={}) {c:?}", r.p, r.n));
        }
        if r.p == 2.0 {
            let e = prof.theta.iter().zip(&prof.f).map(|(t, f)| (f - t.cos()).abs()).fold(0.0, f64::max);
            cos_err = cos_err.max(e);
        }
    }
    check(
        failures.is_empty() && cos_err <= 1e-7,
        format!("{} profiles, p=2 sup |f - cos| = {cos_err:.3e} {}", solved.len(), failures.join("; ")),
    )
}

fn uniqueness_audit() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for &(p, n) in &[(2.0, 3), (3.0, 3), (2.5, 4), (5.0, 2)] {
        let k_star = match solve_exponent(p, n, 1e-8) {
            Ok(r) => r.k_star,
            Err(e) => return check(false, format!("(p={p}, N={n}): {e}")),
        };
        let ks: Vec<f64> = [0.9, 0.75, 0.55].iter().map(|s| s * k_star).collect();
        match audit_monotonicity(p, n, &ks, DEFAULT_FD_STEP) {
            Ok(rep) => {
                let pass = rep.passes(1e-3);
                ok &= pass;
                lines.push(format!(
                    "(p={p}, N={n}) max W {:.2e}, fd {:.1e}, envelope {:.1e}{}",
                    rep.max_w,
                    rep.fd_agreement,
                    rep.max_envelope_excess,
                    if pass { "" } else { " FAILED" }
                ));
            }
            Err(e) => {
                ok = false;
                lines.push(format!("(p={p}, N={n}): {e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    check(ok && within(elapsed, 60), format!("{}; {:.1} s", lines.join("; "), elapsed.as_secs_f64()))
}

/// Sampled `k` on a closed-open interval `[a, b)` or a half-line `(-∞, a]`.
fn interval_samples(a: f64, b: Option<f64>) -> Vec<f64> {
    match b {
        Some(b) => (0..50).map(|i| a + (b - a) * i as f64 / 50.0).collect(),
        None => (0..50).map(|i| a - 0.2 * i as f64 * a.abs().max(1.0)).collect(),
    }
}

fn classifier() -> Outcome {
    let theta: Vec<f64> = (1..=1000).map(|i| FRAC_PI_2 * i as f64 / 1001.0).collect();
    let mut failures = Vec::new();
    let mut samples = 0;
    let cases: [(&[f64], u32); 4] = [(&[1.2, 1.4, 1.5], 3), (&[1.6, 1.8, 2.0], 3), (&[2.0, 2.5, 3.5, 4.0], 4), (&[3.0, 5.0, 9.0], 3)];
    for (case, &(ps, n)) in cases.iter().enumerate() {
        for &p in ps {
            let (b1, b2) = (first_bound(p, n), second_bound(p, n));
            let (sub, sup) = match case {
                0 => (None, -b1),
                1 => (Some(-b2), -b1),
                2 => (Some(-b1), -b2),
                _ => (Some(-b2), -b1),
            };
            let mut run = |ks: Vec<f64>, want_super: bool| {
                for k in ks {
                    samples += 1;
                    let v = classify_cos_test(p, n, k);
                    let matches = if want_super { v.is_superharmonic() } else { v.is_subharmonic() };
                    if !matches {
                        failures.push(format!("case {} p={p} N={n} k={k}: {v}", case + 1));
                        continue;
                    }
                    let params = ProblemParams::new(p, n, k).unwrap();
                    let scale = k.abs().powi(3).max(1.0) * 1e-11;
                    let bad = theta.iter().any(|&t| {
                        let r = full_residual(&params, t, t.cos(), -t.sin(), -t.cos());
                        if want_super { r > scale } else { r < -scale }
                    });
                    if bad {
                        failures.push(format!("sign bridge case {} p={p} N={n} k={k}", case + 1));
                    }
                }
            };
            run(interval_samples(sup, Some(0.0)), true);
            if let Some(a) = sub {
                run(interval_samples(a, None), false);
            }
        }
    }
    check(failures.is_empty(), format!("{samples} sampled k, {} failures {}", failures.len(), failures.join("; ")))
}

fn measure_experiment() -> Outcome {
    let start = Instant::now();
    let deltas = [0.05, 0.1, 0.2, 0.4];
    let template = GridSpec::new(4.0, 640, 0.1).unwrap();
    let mut ok = true;
    let mut lines = Vec::new();
    for &(p, expect, tol) in &[(2.0, 1.0, 0.1), (3.0, 0.57735, 0.09), (4.0, 0.47676, 0.08)] {
        match run_experiment(p, &deltas, &template) {
            Ok(exp) => {
                let pass = (exp.alpha_hat - expect).abs() <= tol && exp.omegas_increasing() && exp.maximum_principle();
                ok &= pass;
                lines.push(format!("p={p} alpha_hat={:.4} (target {expect} +/- {tol}, r2 {:.5})", exp.alpha_hat, exp.r2));
            }
            Err(e) => {
                ok = false;
                lines.push(format!("p={p}: {e}"));
            }
        }
    }
    let reference = GridSpec::new(8.0, 512, 1.0).unwrap();
    match solve_p_harmonic(&reference, 2.0, 50, 1e-9) {
        Ok(field) => {
            let w = field.omega();
            ok &= (w - 0.5).abs() <= 0.02 && field.min() >= 0.0 && field.max() <= 1.0;
            lines.push(format!("omega(delta=1) = {w:.5}"));
        }
        Err(e) => {
            ok = false;
            lines.push(format!("reference: {e}"));
        }
    }
    let elapsed = start.elapsed();
    check(ok && within(elapsed, 600), format!("{}; {:.1} s", lines.join("; "), elapsed.as_secs_f64()))
}

/// The bound constants are existence-only; what stands in for them is the
/// slope fit above and the explicit barrier comparisons run here.
fn constants_substitute() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for &(p, k) in &[(1.4, -2.5), (2.0, -1.0), (3.0, -2.0 / 3.0)] {
        let spec = GridSpec::new(8.0, 512, 0.2).unwrap();
        match solve_p_harmonic(&spec, p, 100, 1e-9) {
            Ok(field) => {
                let rep = barrier_envelope_check(p, k, &field, &spec);
                ok &= rep.holds();
                let ratio = |c: Option<pharmonic::measure::EnvelopeCheck>| c.map(|c| format!("{:.3}", c.worst_ratio));
                lines.push(format!(
                    "p={p} k={k:.4} {} upper {:?} lower {:?}",
                    rep.verdict,
                    ratio(rep.upper),
                    ratio(rep.lower)
                ));
            }
            Err(e) => {
                ok = false;
                lines.push(format!("p={p}: {e}"));
            }
        }
    }
    check(ok, format!("C1, C2 not reproduced (existence only); barrier checks: {}", lines.join("; ")))
}

fn main() -> ExitCode {
    let mut solved = Vec::new();
    let report = |n: usize, name: &str, o: Outcome| {
        println!("criterion {n} [{name}]: {} : {}", if o.ok { "PASS" } else { "FAIL" }, o.detail.trim());
        o.ok
    };
    let mut all = true;
    all &= report(1, "closed-form oracles", closed_forms(&mut solved));
    all &= report(2, "bracket containment", bracket_containment(&mut solved));
    all &= report(3, "asymptotic trend", asymptotic_trend());
    all &= report(4, "full-equation residual", residuals(&solved));
    all &= report(5, "profile conditions", profile_conditions(&solved));
    all &= report(6, "uniqueness audit", uniqueness_audit());
    all &= report(7, "sign classifier", classifier());
    all &= report(8, "2D measure experiment", measure_experiment());
    all &= report(9, "bound constants", constants_substitute());
    if all {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
