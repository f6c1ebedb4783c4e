//! Numerical audit of the monotonicity argument behind uniqueness of the
//! critical exponent: `U = H/k` increases in `x`, its parameter sensitivity
//! `W = ∂U/∂k` is negative, and profiles for neighbouring undershoot values
//! are ordered.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::{self, ProblemParams, UWState};
use crate::profile;
use crate::rk::{Control, Integrator, RkConfig, Tolerances};
use crate::shooting::{self, ShootingConfig, ShotOutcome};

/// `U` beyond which the trajectory is treated as blown up.
pub const U_BLOWUP: f64 = 1e8;
pub const AUDIT_WINDOW: (f64, f64) = (1e-3, FRAC_PI_2 - 1e-3);
pub const AUDIT_POINTS: usize = 200;
pub const DEFAULT_FD_STEP: f64 = 1e-5;

fn uw_system(params: ProblemParams) -> impl FnMut(f64, &[f64; 2]) -> Result<[f64; 2]> {
    let dim = params.dim();
    move |x, s| {
        let cot = x.cos() / x.sin();
        let up = ode::u_rhs_with_cot(&params, dim, s[0], cot);
        Ok([up, ode::w_rhs_with_cot(&params, dim, s[0], s[1], up, cot)])
    }
}

fn blowup_guard() -> impl FnMut(f64, &[f64; 2], f64, &[f64; 2]) -> Control {
    move |_, _, _, y| if y[0].abs() > U_BLOWUP { Control::Stop } else { Control::Continue }
}

fn check_reached(reached: bool, x: f64, x_end: f64) -> Result<()> {
    if reached {
        Ok(())
    } else {
        Err(Error::BlowupBeforeEnd { x, x_end })
    }
}

/// Co-integrate `(U, W)` from the series start to `x_end`, returning the
/// state after every accepted step.
pub fn integrate_uw(params: &ProblemParams, x_end: f64, tol: Tolerances) -> Result<Vec<UWState>> {
    tol.validate()?;
    let x0 = ode::DEFAULT_X0;
    let start = ode::series_start(params, x0)?.uw;
    let mut rhs = uw_system(*params);
    let mut integ = Integrator::new(x0, [start.u, start.w], x0, RkConfig::with_tol(tol));
    let mut traj = vec![start];
    let mut guard = blowup_guard();
    let reached = integ.advance_to(&mut rhs, x_end, |a, b, x, y| {
        traj.push(UWState { x, u: y[0], w: y[1] });
        guard(a, b, x, y)
    })?;
    check_reached(reached, integ.x, x_end)?;
    Ok(traj)
}

/// `(U, W)` at the abscissae of `grid` (ascending, all beyond the series start).
pub fn sample_uw(params: &ProblemParams, grid: &[f64], tol: Tolerances) -> Result<Vec<UWState>> {
    tol.validate()?;
    let x0 = ode::DEFAULT_X0;
    let start = ode::series_start(params, x0)?.uw;
    let mut rhs = uw_system(*params);
    let mut integ = Integrator::new(x0, [start.u, start.w], x0, RkConfig::with_tol(tol));
    let mut out = Vec::with_capacity(grid.len());
    for &x in grid {
        let reached = integ.advance_to(&mut rhs, x, blowup_guard())?;
        check_reached(reached, integ.x, x)?;
        out.push(UWState { x, u: integ.y[0], w: integ.y[1] });
    }
    Ok(out)
}

/// `U(x, k - h)` and `U(x, k + h)` integrated as one system so both share
/// the same step sequence; their central difference is an estimate of `W`
/// that does not use the sensitivity equation.
pub fn sample_u_pair(params: &ProblemParams, h: f64, grid: &[f64], tol: Tolerances) -> Result<Vec<(f64, f64)>> {
    tol.validate()?;
    let minus = params.with_k(params.k - h);
    let plus = params.with_k(params.k + h);
    let dim = params.dim();
    let mut rhs = move |x: f64, s: &[f64; 2]| {
        let cot = x.cos() / x.sin();
        Ok([
            ode::u_rhs_with_cot(&minus, dim, s[0], cot),
            ode::u_rhs_with_cot(&plus, dim, s[1], cot),
        ])
    };
    let x0 = ode::DEFAULT_X0;
    let y0 = [ode::u_initial_slope(&minus) * x0, ode::u_initial_slope(&plus) * x0];
    let mut integ = Integrator::new(x0, y0, x0, RkConfig::with_tol(tol));
    let mut out = Vec::with_capacity(grid.len());
    for &x in grid {
        let reached = integ.advance_to(&mut rhs, x, blowup_guard())?;
        check_reached(reached, integ.x, x)?;
        out.push((integ.y[0], integ.y[1]));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub p: f64,
    pub n: u32,
    pub k_samples: Vec<f64>,
    pub x_grid: Vec<f64>,
    /// Largest `W` seen over all samples and abscissae.
    pub max_w: f64,
    /// Largest relative deviation between `W` and its finite-difference estimate.
    pub fd_agreement: f64,
    /// `U` strictly increasing in `x` for every sample.
    pub u_increasing: bool,
    /// Largest `U(x, k₂) - U(x, k₁)` over pairs `k₁ < k₂`; negative when ordered.
    pub max_ordering_gap: f64,
    /// Largest `y₁ - y₂^{k₁/k₂}` over pairs `k₁ < k₂`; non-positive when the
    /// envelope holds.
    pub max_envelope_excess: f64,
}

impl MonotonicityReport {
    pub fn w_negative(&self) -> bool {
        self.max_w < 0.0
    }

    pub fn ordering_ok(&self) -> bool {
        self.max_ordering_gap < 0.0
    }

    pub fn envelope_ok(&self) -> bool {
        self.max_envelope_excess <= 1e-12
    }

    pub fn passes(&self, fd_tolerance: f64) -> bool {
        self.w_negative()
            && self.u_increasing
            && self.ordering_ok()
            && self.envelope_ok()
            && self.fd_agreement <= fd_tolerance
    }
}

pub fn audit_grid() -> Vec<f64> {
    let (a, b) = AUDIT_WINDOW;
    (0..AUDIT_POINTS)
        .map(|i| a + (b - a) * i as f64 / (AUDIT_POINTS - 1) as f64)
        .collect()
}

/// Audit `W < 0`, agreement with finite differences, pairwise ordering of
/// `U` and the profile envelope over the standard window.
pub fn audit_monotonicity(p: f64, n: u32, k_list: &[f64], h: f64) -> Result<MonotonicityReport> {
    if !(1e-7..=1e-4).contains(&h) {
        return Err(Error::Range(format!("finite-difference step must lie in [1e-7, 1e-4], got {h:e}")));
    }
    if k_list.is_empty() {
        return Err(Error::InvalidParameter("k list is empty".into()));
    }
    let tol = Tolerances::default();
    let shoot_cfg = ShootingConfig::default();
    let grid = audit_grid();
    let x_last = *grid.last().unwrap();

    let mut ks = k_list.to_vec();
    ks.sort_by(f64::total_cmp);

    let mut max_w = f64::NEG_INFINITY;
    let mut fd_agreement: f64 = 0.0;
    let mut u_increasing = true;
    let mut u_rows = Vec::with_capacity(ks.len());
    let mut y_rows = Vec::with_capacity(ks.len());
    for &k in &ks {
        let params = ProblemParams::for_shooting(p, n, k)?;
        if let ShotOutcome::BlewUp { x_blowup } = shooting::integrate_h(&params, &shoot_cfg)?.outcome {
            if x_blowup < x_last {
                return Err(Error::ClassificationMismatch { k, x_blowup });
            }
        }
        let uw = sample_uw(&params, &grid, tol)?;
        let pair = sample_u_pair(&params, h, &grid, tol)?;
        for (s, (um, upl)) in uw.iter().zip(&pair) {
            max_w = max_w.max(s.w);
            if s.w.abs() > 1e-6 {
                let fd = (upl - um) / (2.0 * h);
                fd_agreement = fd_agreement.max(((s.w - fd) / s.w).abs());
            }
        }
        if !uw.windows(2).all(|w| w[1].u > w[0].u) {
            u_increasing = false;
        }
        u_rows.push(uw.iter().map(|s| s.u).collect::<Vec<_>>());
        let (ys, _) = profile::sample_y(&params, &grid, &shoot_cfg)?;
        y_rows.push(ys.iter().map(|s| s[0]).collect::<Vec<_>>());
    }

    let mut max_ordering_gap = f64::NEG_INFINITY;
    let mut max_envelope_excess = f64::NEG_INFINITY;
    for i in 0..ks.len() {
        for j in i + 1..ks.len() {
            let ratio = ks[i] / ks[j];
            for m in 0..grid.len() {
                max_ordering_gap = max_ordering_gap.max(u_rows[j][m] - u_rows[i][m]);
                let envelope = y_rows[j][m].powf(ratio);
                max_envelope_excess = max_envelope_excess.max(y_rows[i][m] - envelope);
            }
        }
    }
    if ks.len() < 2 {
        max_ordering_gap = -f64::MIN_POSITIVE;
        max_envelope_excess = 0.0;
    }

    Ok(MonotonicityReport {
        p,
        n,
        k_samples: ks,
        x_grid: grid,
        max_w,
        fd_agreement,
        u_increasing,
        max_ordering_gap,
        max_envelope_excess,
    })
}
