use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use pharmonic::analytic::{exponent_bounds, known_exponent, lambda_coefficients, classify_cos_test};
use pharmonic::format::sig17;
use pharmonic::measure::{self, GridSpec};
use pharmonic::ode::ProblemParams;
use pharmonic::profile;
use pharmonic::shooting::{self, ShootingConfig};
use pharmonic::uniqueness;
use rayon::prelude::*;
use thiserror::Error;

use crate::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] pharmonic::Error),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            // a closed downstream pipe is not a failure
            CliError::Output(e) if e.kind() == io::ErrorKind::BrokenPipe => 0,
            CliError::Core(e) if e.is_numerical() => 2,
            CliError::ChecksFailed { .. } => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn check_pn(p: f64, n: u32) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(CliError::Invalid(format!("p must exceed 1, got {p}")));
    }
    if n < 2 {
        return Err(CliError::Invalid(format!("N must be at least 2, got {n}")));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(CliError::Invalid(format!("tol must lie in [1e-12, 1e-4], got {tol:e}")));
    }
    Ok(())
}

/// Human-readable number: ten decimals at moderate magnitudes, otherwise
/// scientific with ten significant digits.
fn text10(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if !x.is_finite() || (1e-3..1e6).contains(&x.abs()) {
        format!("{x:.10}")
    } else {
        format!("{x:.9e}")
    }
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => {
            let file = File::create(path).map_err(|source| pharmonic::Error::Io { path: path.to_path_buf(), source })?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn exponent(p: f64, n: u32, tol: f64, format: Format) -> Result<()> {
    check_pn(p, n)?;
    check_tol(tol)?;
    let r = shooting::solve_exponent(p, n, tol)?;
    let mut out = io::stdout().lock();
    match format {
        Format::Text => {
            writeln!(out, "p = {}", text10(r.p))?;
            writeln!(out, "N = {}", r.n)?;
            writeln!(out, "alpha = {}", text10(r.alpha))?;
            writeln!(out, "k_star = {}", text10(r.k_star))?;
            writeln!(out, "bracket = [{}, {}]", text10(r.bracket_lo), text10(r.bracket_hi))?;
            writeln!(out, "iterations = {}", r.iterations)?;
            writeln!(out, "residual_max = {}", text10(r.residual_max))?;
        }
        Format::Csv => {
            writeln!(out, "p,N,k_star,alpha,bracket_lo,bracket_hi,iterations,tol,residual_max")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                sig17(r.p),
                r.n,
                sig17(r.k_star),
                sig17(r.alpha),
                sig17(r.bracket_lo),
                sig17(r.bracket_hi),
                r.iterations,
                sig17(r.tol),
                sig17(r.residual_max)
            )?;
        }
        Format::Json => {
            let s = serde_json::to_string_pretty(&r).expect("exponent result serializes");
            writeln!(out, "{s}")?;
        }
    }
    Ok(())
}

/// `p_min, p_min + step, ...` up to `p_max`, rounded to twelve decimals so
/// that grid values print cleanly.
fn p_values(p_min: f64, p_max: f64, p_step: f64) -> Result<Vec<f64>> {
    if !(p_step.is_finite() && p_step > 0.0) {
        return Err(CliError::Invalid(format!("p-step must be positive, got {p_step}")));
    }
    if !(p_max.is_finite() && p_max >= p_min) {
        return Err(CliError::Invalid(format!("p-max must be at least p-min, got {p_max}")));
    }
    let count = ((p_max - p_min) / p_step + 1e-9).floor() as usize + 1;
    if count > 10_000 {
        return Err(CliError::Invalid(format!("table would have {count} values of p; at most 10000 allowed")));
    }
    Ok((0..count).map(|i| ((p_min + i as f64 * p_step) * 1e12).round() / 1e12).collect())
}

pub fn table(p_min: f64, p_max: f64, p_step: f64, n_list: &[u32], tol: f64, out: Option<&Path>) -> Result<()> {
    if !(p_min.is_finite() && p_min > 1.0) {
        return Err(CliError::Invalid(format!("p must exceed 1, got p-min = {p_min}")));
    }
    let ps = p_values(p_min, p_max, p_step)?;
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if let Some(&n) = ns.first() {
        check_pn(p_min, n)?;
    }
    check_tol(tol)?;

    let cells: Vec<(f64, u32)> = ps.iter().flat_map(|&p| ns.iter().map(move |&n| (p, n))).collect();
    let done = AtomicUsize::new(0);
    let total = cells.len();
    let rows: Vec<String> = cells
        .par_iter()
        .map(|&(p, n)| {
            let b = exponent_bounds(p, n);
            let row = match shooting::solve_exponent(p, n, tol) {
                Ok(r) => format!(
                    "{},{},{},{},{},{},",
                    sig17(p),
                    n,
                    sig17(r.alpha),
                    sig17(b.lower),
                    sig17(b.upper),
                    r.in_bounds(&b)
                ),
                Err(e) => format!(
                    "{},{},,{},{},false,{}",
                    sig17(p),
                    n,
                    sig17(b.lower),
                    sig17(b.upper),
                    csv_field(&e.to_string())
                ),
            };
            let k = done.fetch_add(1, Ordering::Relaxed) + 1;
            eprintln!("table: {k}/{total} (p = {p}, N = {n})");
            row
        })
        .collect();

    let mut w = sink(out)?;
    writeln!(w, "p,N,alpha,lower_bound,upper_bound,in_bounds,error")?;
    for row in rows {
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn profile(p: f64, n: u32, points: usize, tol: f64, out: Option<&Path>) -> Result<()> {
    check_pn(p, n)?;
    check_tol(tol)?;
    let r = shooting::solve_exponent(p, n, tol)?;
    let prof = profile::compute_profile(p, n, r.k_star, points)?;
    let mut w = sink(out)?;
    profile::write_profile_csv(&prof, &mut w)?;
    Ok(())
}

pub fn classify(p: f64, n: u32, k: f64, format: Format) -> Result<()> {
    check_pn(p, n)?;
    if !k.is_finite() {
        return Err(CliError::Invalid(format!("k must be finite, got {k}")));
    }
    let c = lambda_coefficients(p, n, k);
    let verdict = classify_cos_test(p, n, k);
    let mut out = io::stdout().lock();
    match format {
        Format::Text => {
            writeln!(out, "alpha_coeff = {}", text10(c.alpha_coeff))?;
            writeln!(out, "beta_coeff = {}", text10(c.beta_coeff))?;
            writeln!(out, "verdict = {verdict}")?;
        }
        Format::Csv => {
            writeln!(out, "p,N,k,alpha_coeff,beta_coeff,verdict")?;
            writeln!(out, "{},{},{},{},{},{verdict}", sig17(p), n, sig17(k), sig17(c.alpha_coeff), sig17(c.beta_coeff))?;
        }
        Format::Json => {
            let v = serde_json::json!({
                "p": p,
                "N": n,
                "k": k,
                "alpha_coeff": c.alpha_coeff,
                "beta_coeff": c.beta_coeff,
                "verdict": verdict,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json value serializes"))?;
        }
    }
    Ok(())
}

struct Suite {
    lines: Vec<(bool, String, String)>,
}

impl Suite {
    fn record(&mut self, name: &str, ok: bool, detail: String) {
        self.lines.push((ok, name.to_string(), detail));
    }
}

/// Three undershoot values between the critical one and the largest
/// admissible shooting value.
fn audit_ks(p: f64, n: u32, k_star: f64) -> Vec<f64> {
    let top = shooting::shooting_cap(p, n).min(0.0);
    [0.1, 0.25, 0.45].iter().map(|&s| k_star + s * (top - k_star)).collect()
}

pub fn verify(p: f64, n: u32) -> Result<()> {
    check_pn(p, n)?;
    let r = shooting::solve_exponent(p, n, shooting::DEFAULT_K_TOL)?;
    let b = exponent_bounds(p, n);
    let mut suite = Suite { lines: Vec::new() };

    suite.record(
        "bracket containment",
        r.in_bounds(&b),
        format!("alpha = {} in [{}, {}]", text10(r.alpha), text10(b.lower), text10(b.upper)),
    );
    if let Some(exact) = known_exponent(p, n) {
        let err = (r.alpha - exact).abs();
        suite.record("closed form", err <= 1e-7, format!("|alpha - {}| = {err:.3e}", text10(exact)));
    }
    suite.record("residual", r.residual_max < 1e-6, format!("max normalized residual {:.3e}", r.residual_max));

    let prof = profile::compute_profile(p, n, r.k_star, shooting::RESIDUAL_PROFILE_POINTS)?;
    let bc = profile::verify_boundary_conditions(&prof);
    suite.record(
        "profile conditions",
        bc.all_ok(),
        format!("f(0) - 1 = {:.1e}, f(pi/2) = {:.1e}, f'(pi/2) = {}", bc.f0_deviation, bc.f_end, text10(bc.fp_end)),
    );
    if (p - 2.0).abs() < 1e-12 {
        let sup = prof.theta.iter().zip(&prof.f).map(|(t, f)| (f - t.cos()).abs()).fold(0.0, f64::max);
        suite.record("cosine profile", sup <= 1e-7, format!("sup |f - cos| = {sup:.3e}"));
    }

    let cfg = ShootingConfig::default();
    let mut monotone = true;
    for k in [r.bracket_lo, r.bracket_hi] {
        monotone &= shooting::integrate_h(&ProblemParams::for_shooting(p, n, k)?, &cfg)?.monotone;
    }
    suite.record("monotone shots", monotone, "H non-increasing at both bracket ends".into());

    let ks = audit_ks(p, n, r.k_star);
    let rep = uniqueness::audit_monotonicity(p, n, &ks, uniqueness::DEFAULT_FD_STEP)?;
    suite.record(
        "uniqueness audit",
        rep.passes(1e-3),
        format!(
            "max W = {:.3e}, fd agreement {:.1e}, ordering gap {:.3e}, envelope excess {:.3e}",
            rep.max_w, rep.fd_agreement, rep.max_ordering_gap, rep.max_envelope_excess
        ),
    );

    let verdict = classify_cos_test(p, n, r.k_star);
    let params = ProblemParams::new(p, n, r.k_star)?;
    let bridged = (1..=1000).all(|i| {
        let t = FRAC_PI_2 * i as f64 / 1001.0;
        let res = pharmonic::ode::full_residual(&params, t, t.cos(), -t.sin(), -t.cos());
        let tiny = 1e-10 * (1.0 + r.k_star.powi(4));
        (!verdict.is_superharmonic() || res <= tiny) && (!verdict.is_subharmonic() || res >= -tiny)
    });
    suite.record("sign bridging", bridged, format!("r^k cos(theta) at k = k_star is {verdict}"));

    let mut out = io::stdout().lock();
    writeln!(out, "verify p = {}, N = {n}", text10(p))?;
    for (ok, name, detail) in &suite.lines {
        writeln!(out, "{} {name}: {detail}", if *ok { "PASS" } else { "FAIL" })?;
    }
    let failed = suite.lines.iter().filter(|l| !l.0).count();
    let total = suite.lines.len();
    writeln!(out, "{}", if failed == 0 { "PASS" } else { "FAIL" })?;
    out.flush()?;
    if failed > 0 {
        return Err(CliError::ChecksFailed { failed, total });
    }
    Ok(())
}

pub fn measure2d(p: f64, deltas: &[f64], grid: usize, domain: f64, out: Option<&Path>) -> Result<()> {
    check_pn(p, 2)?;
    let widest = deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let template = GridSpec::new(domain, grid, widest)?;
    eprintln!("measure2d: solving {} grids of {grid}x{grid} cells at p = {p}", deltas.len());
    let exp = measure::run_experiment(p, deltas, &template)?;

    let mut w = sink(out)?;
    measure::write_experiment_csv(&exp, &mut w)?;
    drop(w);

    let reference = known_exponent(p, 2).expect("planar exponents are known in closed form");
    let summary = format!(
        "alpha_hat = {} (closed form {}, difference {:+.3e}), r2 = {}, maximum principle {}",
        text10(exp.alpha_hat),
        text10(reference),
        exp.alpha_hat - reference,
        text10(exp.r2),
        if exp.maximum_principle() { "holds" } else { "violated" }
    );
    // keep a piped CSV clean
    if out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}
