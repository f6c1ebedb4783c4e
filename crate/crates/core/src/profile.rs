//! Reconstruction of the angular profile `f(θ)` at the critical exponent.
//!
//! The profile is integrated in the `(y, y')` variables, which stay regular
//! through `θ = π/2` (where `H = y'/y` itself diverges).

use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::sig17;
use crate::ode::{self, ProblemParams};
use crate::rk::{Control, Integrator, RkConfig};
use crate::shooting::ShootingConfig;

/// `y` at which `H = y'/y` is no longer reported.
pub const H_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub p: f64,
    pub n: u32,
    pub k_star: f64,
    pub theta: Vec<f64>,
    pub f: Vec<f64>,
    pub fp: Vec<f64>,
    pub h: Vec<Option<f64>>,
    /// First abscissa at which `f` became non-positive, if any.
    #[serde(skip)]
    pub first_zero: Option<f64>,
}

impl Profile {
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn params(&self) -> ProblemParams {
        ProblemParams { p: self.p, n: self.n, k: self.k_star }
    }
}

pub(crate) fn y_system(params: ProblemParams) -> impl FnMut(f64, &[f64; 2]) -> Result<[f64; 2]> {
    let dim = params.dim();
    move |x, s| {
        if s[0].abs() < ode::DEGENERATE_THRESHOLD && s[1].abs() < ode::DEGENERATE_THRESHOLD {
            return Err(Error::DegenerateState { x });
        }
        let cot = x.cos() / x.sin();
        Ok([s[1], ode::y_second_with_cot(&params, dim, s[0], s[1], cot)])
    }
}

/// Integrate the profile equation and sample `(f, f')` at the abscissae in
/// `grid` (ascending, within `[0, π/2]`). Also reports the first zero of `f`.
pub(crate) fn sample_y(
    params: &ProblemParams,
    grid: &[f64],
    cfg: &ShootingConfig,
) -> Result<(Vec<[f64; 2]>, Option<f64>)> {
    cfg.tol.validate()?;
    let start = ode::series_start(params, cfg.x0)?;
    let mut rhs = y_system(*params);
    let mut integ = Integrator::new(start.y.x, [start.y.y, start.y.yp], cfg.x0, RkConfig::with_tol(cfg.tol));
    let mut first_zero = None;
    let mut out = Vec::with_capacity(grid.len());
    for &x in grid {
        if x < start.y.x {
            // inside the series region: second-order Taylor from the origin
            let hp0 = ode::h_initial_slope(params);
            out.push([1.0 + 0.5 * hp0 * x * x, hp0 * x]);
            continue;
        }
        integ.advance_to(&mut rhs, x, |_, _, x1, y1| {
            if first_zero.is_none() && y1[0] <= 0.0 {
                first_zero = Some(x1);
            }
            Control::Continue
        })?;
        out.push(integ.y);
    }
    Ok((out, first_zero))
}

fn uniform_grid(n_points: usize) -> Vec<f64> {
    (0..n_points)
        .map(|i| {
            if i + 1 == n_points {
                FRAC_PI_2
            } else {
                FRAC_PI_2 * i as f64 / (n_points - 1) as f64
            }
        })
        .collect()
}

/// Sample the profile for an arbitrary `k` without checking criticality.
pub fn integrate_profile(p: f64, n: u32, k: f64, n_points: usize, cfg: &ShootingConfig) -> Result<Profile> {
    let params = ProblemParams::for_shooting(p, n, k)?;
    if n_points < 16 {
        return Err(Error::Range(format!("a profile needs at least 16 points, got {n_points}")));
    }
    let theta = uniform_grid(n_points);
    let (samples, first_zero) = sample_y(&params, &theta, cfg)?;
    let f: Vec<f64> = samples.iter().map(|s| s[0]).collect();
    let fp: Vec<f64> = samples.iter().map(|s| s[1]).collect();
    let h = f
        .iter()
        .zip(&fp)
        .map(|(&y, &yp)| (y > H_CUTOFF).then(|| yp / y))
        .collect();
    Ok(Profile { p, n, k_star: k, theta, f, fp, h, first_zero })
}

pub fn compute_profile(p: f64, n: u32, k_star: f64, n_points: usize) -> Result<Profile> {
    compute_profile_with(p, n, k_star, n_points, &ShootingConfig::default())
}

/// Critical profile; fails with [`Error::NotCritical`] if `f` vanishes well
/// before `π/2` or stays away from zero there.
pub fn compute_profile_with(
    p: f64,
    n: u32,
    k_star: f64,
    n_points: usize,
    cfg: &ShootingConfig,
) -> Result<Profile> {
    let prof = integrate_profile(p, n, k_star, n_points, cfg)?;
    if let Some(x) = prof.first_zero {
        if x < FRAC_PI_2 - 1e-4 {
            return Err(Error::NotCritical {
                k: k_star,
                reason: format!("f vanishes at θ = {x} before π/2"),
            });
        }
    }
    let f_end = *prof.f.last().expect("non-empty profile");
    if f_end > 1e-3 {
        return Err(Error::NotCritical {
            k: k_star,
            reason: format!("f(π/2) = {f_end:e} is not small"),
        });
    }
    Ok(prof)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryCheck {
    /// `f` positive on `[0, π/2)`, bounded by one and strictly decreasing.
    pub f1_ok: bool,
    /// `f`, `f'` and the differenced `f''` are finite.
    pub f2_ok: bool,
    /// `f(0) = 1`, `f'(0) = 0`, `f(π/2) = 0`.
    pub f3_ok: bool,
    /// `f'(π/2)` finite and negative.
    pub slope_ok: bool,
    pub f0_deviation: f64,
    pub fp0_deviation: f64,
    pub f_end: f64,
    pub fp_end: f64,
    /// Max normalized residual of the full equation at the interior samples.
    pub residual_max: f64,
}

impl BoundaryCheck {
    pub fn all_ok(&self) -> bool {
        self.f1_ok && self.f2_ok && self.f3_ok && self.slope_ok
    }
}

/// `f''` at indices `2..len-2` by Hermite differencing: the unique degree-9
/// polynomial through the sampled `f` and `f'` on five nodes, differentiated
/// twice at the centre. Eighth-order accurate, which keeps the truncation
/// error below the integration noise where the profile varies rapidly.
pub(crate) fn second_derivative(profile: &Profile) -> Vec<(usize, f64)> {
    let n = profile.len();
    if n < 5 {
        return Vec::new();
    }
    let dx = profile.theta[1] - profile.theta[0];
    let (f, fp) = (&profile.f, &profile.fp);
    (2..n - 2)
        .map(|i| {
            let values = 7.0 / 54.0 * (f[i - 2] + f[i + 2]) + 64.0 / 27.0 * (f[i - 1] + f[i + 1]) - 5.0 * f[i];
            let slopes = (fp[i - 2] - fp[i + 2]) / 36.0 + 8.0 / 9.0 * (fp[i - 1] - fp[i + 1]);
            (i, values / (dx * dx) + slopes / dx)
        })
        .collect()
}

/// Max over interior samples of `|residual| / ((|f|³ + |f'|³ + 1)|k|³)`,
/// with `f''` taken by differencing the samples.
pub fn normalized_residual(profile: &Profile) -> f64 {
    let params = profile.params();
    let k3 = profile.k_star.abs().powi(3);
    second_derivative(profile)
        .into_iter()
        .map(|(i, fpp)| {
            let (f, fp) = (profile.f[i], profile.fp[i]);
            let r = ode::full_residual(&params, profile.theta[i], f, fp, fpp);
            r.abs() / ((f.abs().powi(3) + fp.abs().powi(3) + 1.0) * k3)
        })
        .fold(0.0, f64::max)
}

pub fn verify_boundary_conditions(profile: &Profile) -> BoundaryCheck {
    let last = profile.len() - 1;
    let f = &profile.f;
    let fp = &profile.fp;
    let decreasing = f.windows(2).all(|w| w[1] < w[0]);
    let positive = f[..last].iter().all(|&v| v > 0.0 && v <= 1.0);
    let fpp = second_derivative(profile);
    let finite = f.iter().chain(fp).all(|v| v.is_finite()) && fpp.iter().all(|(_, v)| v.is_finite());
    let f0_deviation = (f[0] - 1.0).abs();
    let fp0_deviation = fp[0].abs();
    let f_end = f[last];
    let fp_end = fp[last];
    BoundaryCheck {
        f1_ok: decreasing && positive,
        f2_ok: finite,
        f3_ok: f0_deviation <= 1e-8 && fp0_deviation <= 1e-8 && f_end.abs() <= 1e-6,
        slope_ok: fp_end.is_finite() && fp_end < 0.0,
        f0_deviation,
        fp0_deviation,
        f_end,
        fp_end,
        residual_max: normalized_residual(profile),
    }
}

/// Write `theta,f,fprime,H` rows with 17 significant digits; `H` is left
/// empty where it is undefined.
pub fn write_profile_csv<W: Write>(profile: &Profile, mut out: W) -> std::io::Result<()> {
    writeln!(out, "theta,f,fprime,H")?;
    for i in 0..profile.len() {
        let h = profile.h[i].map(sig17).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{}",
            sig17(profile.theta[i]),
            sig17(profile.f[i]),
            sig17(profile.fp[i]),
            h
        )?;
    }
    out.flush()
}

pub fn export_profile(profile: &Profile, destination: &Path) -> Result<()> {
    let io_err = |source| Error::Io { path: destination.to_path_buf(), source };
    let file = File::create(destination).map_err(io_err)?;
    write_profile_csv(profile, BufWriter::new(file)).map_err(io_err)
}
