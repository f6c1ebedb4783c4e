//! Topological shooting on the `H`-equation and bisection for the critical
//! exponent `k(p, N)`.
//!
//! A shot integrates `H = y'/y` from the series start toward `π/2`. Values of
//! `k` above the critical one reach `π/2` with `H` finite (undershoot); values
//! below it blow up to `-∞` at some `x_k < π/2` (overshoot). The critical `k`
//! is the boundary between the two and is located by bisection.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::analytic::{first_bound, second_bound, ExponentBounds};
use crate::error::{Error, Result};
use crate::ode::{self, validate_pn, ProblemParams};
use crate::profile;
use crate::rk::{self, Control, Integrator, RkConfig, Tolerances};

pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1e8;
pub const DEFAULT_K_TOL: f64 = 1e-10;
/// Distance from the critical value beyond which shots are classified
/// reliably at the default integration tolerances.
pub const CLASSIFICATION_RESOLUTION: f64 = 1e-8;
/// Width below which a blow-up crossing is considered localized.
pub const BLOWUP_LOCALIZATION: f64 = 1e-9;
/// Number of samples used to reconstruct the profile in [`solve_exponent`];
/// the five-node difference stencil leaves 1000 interior residual samples.
pub const RESIDUAL_PROFILE_POINTS: usize = 1004;
const MAX_EXPANSIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingConfig {
    pub tol: Tolerances,
    pub blowup_threshold: f64,
    pub x0: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            blowup_threshold: DEFAULT_BLOWUP_THRESHOLD,
            x0: ode::DEFAULT_X0,
        }
    }
}

impl ShootingConfig {
    fn validate(&self) -> Result<()> {
        self.tol.validate()?;
        if !(self.blowup_threshold >= 1e6) {
            return Err(Error::Range(format!(
                "blow-up threshold must be at least 1e6, got {:e}",
                self.blowup_threshold
            )));
        }
        Ok(())
    }
}

/// Terminal state of one shot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum ShotOutcome {
    ReachedHalfPi { h_at_end: f64 },
    BlewUp { x_blowup: f64 },
}

/// A shot together with trajectory diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shot {
    pub outcome: ShotOutcome,
    pub steps: usize,
    /// Every accepted step satisfied `H(x_{n+1}) ≤ H(x_n)`.
    pub monotone: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Undershoot,
    Overshoot,
}

fn h_system(params: ProblemParams) -> impl FnMut(f64, &[f64; 1]) -> Result<[f64; 1]> {
    let dim = params.dim();
    move |x, s| {
        let cot = x.cos() / x.sin();
        Ok([ode::h_rhs_with_cot(&params, dim, s[0], cot)])
    }
}

/// Right-hand side for `V = 1/H`, which stays regular through the pole of `H`
/// (`V' → 1` as `V → 0`).
fn v_system(params: ProblemParams) -> impl FnMut(f64, &[f64; 1]) -> Result<[f64; 1]> {
    let dim = params.dim();
    let (p, k) = (params.p, params.k);
    move |x, s| {
        let v = s[0];
        let cot = x.cos() / x.sin();
        let kv2 = k * k * v * v;
        let num = (1.0 + kv2).powi(2) * (1.0 - p) + (1.0 + kv2) * (k * (p - dim) * v * v + (2.0 - dim) * cot * v);
        Ok([-num / ((p - 1.0) + kv2)])
    }
}

/// Integrate `H` from the series start toward `π/2`. Once `H ≤ -blowup_threshold`
/// the shot continues in the reciprocal `V = 1/H`; blow-up is declared where
/// `V` reaches zero before `π/2`, localized to within `1e-9` by bisecting the
/// final step. A shot whose pole lies beyond `π/2` is an undershoot however
/// large `|H|` grows, so the threshold only selects where the switch happens.
pub fn integrate_h(params: &ProblemParams, cfg: &ShootingConfig) -> Result<Shot> {
    cfg.validate()?;
    if params.k >= 0.0 {
        return Err(Error::InvalidParameter(format!("shooting requires k < 0, got {}", params.k)));
    }
    let start = ode::series_start(params, cfg.x0)?;
    let mut rhs = h_system(*params);
    let rk_cfg = RkConfig::with_tol(cfg.tol);
    let mut integ = Integrator::new(start.h.x, [start.h.h], cfg.x0, rk_cfg);

    let threshold = cfg.blowup_threshold;
    let mut monotone = true;
    let reached = integ.advance_to(&mut rhs, FRAC_PI_2, |_, y0, _, y1| {
        if y1[0] > y0[0] {
            monotone = false;
        }
        if y1[0] <= -threshold {
            Control::Stop
        } else {
            Control::Continue
        }
    })?;
    let mut steps = integ.steps_taken();
    if reached {
        return Ok(Shot {
            outcome: ShotOutcome::ReachedHalfPi { h_at_end: integ.y[0] },
            steps,
            monotone,
        });
    }

    let mut vrhs = v_system(*params);
    let x_switch = integ.x;
    let step = (x_switch / threshold).max(1e-12);
    let mut vint = Integrator::new(x_switch, [1.0 / integ.y[0]], step, rk_cfg);
    let mut crossing = None;
    let reached = vint.advance_to(&mut vrhs, FRAC_PI_2, |x0, y0, _, y1| {
        if y1[0] < y0[0] {
            monotone = false;
        }
        if y1[0] >= 0.0 {
            crossing = Some((x0, y0[0]));
            Control::Stop
        } else {
            Control::Continue
        }
    })?;
    steps += vint.steps_taken();
    if reached {
        return Ok(Shot {
            outcome: ShotOutcome::ReachedHalfPi { h_at_end: 1.0 / vint.y[0] },
            steps,
            monotone,
        });
    }
    let (x_old, v_old) = crossing.expect("observer stopped without a crossing");
    let (mut lo, mut hi) = (0.0, vint.x - x_old);
    while hi - lo > BLOWUP_LOCALIZATION {
        let mid = 0.5 * (lo + hi);
        let crossed = match rk::dopri_step(&mut vrhs, x_old, &[v_old], mid) {
            Ok((y, _)) => !y[0].is_finite() || y[0] >= 0.0,
            Err(_) => true,
        };
        if crossed {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Shot {
        outcome: ShotOutcome::BlewUp { x_blowup: x_old + 0.5 * (lo + hi) },
        steps,
        monotone,
    })
}

pub fn classify_k(params: &ProblemParams) -> Result<Classification> {
    classify_k_with(params, &ShootingConfig::default())
}

pub fn classify_k_with(params: &ProblemParams, cfg: &ShootingConfig) -> Result<Classification> {
    Ok(classify_shot(&integrate_h(params, cfg)?))
}

fn classify_shot(shot: &Shot) -> Classification {
    match shot.outcome {
        ShotOutcome::ReachedHalfPi { .. } => Classification::Undershoot,
        ShotOutcome::BlewUp { .. } => Classification::Overshoot,
    }
}

/// Largest admissible shooting value: `(N-p)/(1-p)` when `p < N`, else `0`.
pub fn shooting_cap(p: f64, n: u32) -> f64 {
    if p < f64::from(n) {
        ode::flat_start_k(p, n)
    } else {
        0.0
    }
}

/// Interval `(k_lo, k_hi)` with `k_lo` an overshoot and `k_hi` an undershoot.
pub fn initial_bracket(p: f64, n: u32) -> Result<(f64, f64)> {
    initial_bracket_with(p, n, &ShootingConfig::default())
}

pub fn initial_bracket_with(p: f64, n: u32, cfg: &ShootingConfig) -> Result<(f64, f64)> {
    validate_pn(p, n)?;
    let b1 = first_bound(p, n);
    let cap = shooting_cap(p, n);
    let (mut lo, mut hi, inner) = if p > 1.5 {
        let b2 = second_bound(p, n);
        let m = 0.1 * (b1 - b2).abs() + 1e-3;
        (-b1.max(b2) - m, -b1.min(b2) + m, -b1.min(b2))
    } else {
        (-2.0 * b1, -b1 + 1e-3, -b1)
    };
    // the margin may push the upper end past the admissible region
    if hi >= cap {
        hi = if inner < cap { 0.5 * (inner + cap) } else { 0.5 * (lo + cap) };
    }
    let classify = |k: f64| classify_k_with(&ProblemParams::for_shooting(p, n, k)?, cfg);

    let mut expansions = 0;
    while classify(hi)? != Classification::Undershoot {
        expansions += 1;
        if expansions > MAX_EXPANSIONS {
            return Err(Error::BracketFailure {
                p,
                n,
                reason: format!("no undershoot found below the cap {cap}"),
            });
        }
        lo = lo.max(hi);
        hi = 0.5 * (hi + cap);
    }
    expansions = 0;
    while classify(lo)? != Classification::Overshoot {
        expansions += 1;
        if expansions > MAX_EXPANSIONS {
            return Err(Error::BracketFailure {
                p,
                n,
                reason: format!("no overshoot found above k = {lo}"),
            });
        }
        hi = hi.min(lo);
        lo *= 2.0;
    }
    Ok((lo, hi))
}

/// Converged critical exponent with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentResult {
    pub p: f64,
    pub n: u32,
    pub k_star: f64,
    pub alpha: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub iterations: usize,
    pub tol: f64,
    pub residual_max: f64,
}

impl ExponentResult {
    /// Checks the final bracket, widened by [`CLASSIFICATION_RESOLUTION`],
    /// against closed bounds. Comparing the midpoint alone fails spuriously
    /// where the bounds collapse to a point.
    pub fn consistent_with(&self, bounds: &ExponentBounds) -> bool {
        let r = CLASSIFICATION_RESOLUTION;
        bounds.meets(-self.bracket_hi - r, -self.bracket_lo + r)
    }

    /// `alpha` inside the bounds, falling back to [`Self::consistent_with`]
    /// where the bounds are narrower than `1e-6`.
    pub fn in_bounds(&self, bounds: &ExponentBounds) -> bool {
        if bounds.upper - bounds.lower > 1e-6 {
            bounds.contains(self.alpha)
        } else {
            self.consistent_with(bounds)
        }
    }
}

pub fn solve_exponent(p: f64, n: u32, tol: f64) -> Result<ExponentResult> {
    solve_exponent_with(p, n, tol, &ShootingConfig::default())
}

/// Bisection for `k(p, N)` without profile reconstruction. Returns the final
/// bracket and the number of iterations.
pub fn bisect_exponent(p: f64, n: u32, tol: f64, cfg: &ShootingConfig) -> Result<(f64, f64, usize)> {
    validate_pn(p, n)?;
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::Range(format!("k tolerance must lie in [1e-12, 1e-4], got {tol:e}")));
    }
    let (mut lo, mut hi) = initial_bracket_with(p, n, cfg)?;
    let shoot = |k: f64| integrate_h(&ProblemParams::for_shooting(p, n, k)?, cfg);

    // Blow-up points move right and terminal values of H move down as k
    // approaches the critical value; a reversal means the classification is
    // not monotone in k.
    let mut x_blowup_lo = match shoot(lo)?.outcome {
        ShotOutcome::BlewUp { x_blowup } => x_blowup,
        ShotOutcome::ReachedHalfPi { .. } => return Err(Error::NonMonotoneBracket { k: lo }),
    };
    let mut h_end_hi = match shoot(hi)?.outcome {
        ShotOutcome::ReachedHalfPi { h_at_end } => h_at_end,
        ShotOutcome::BlewUp { .. } => return Err(Error::NonMonotoneBracket { k: hi }),
    };

    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        match shoot(mid)?.outcome {
            ShotOutcome::BlewUp { x_blowup } => {
                if x_blowup < x_blowup_lo - 1e-7 {
                    return Err(Error::NonMonotoneBracket { k: mid });
                }
                x_blowup_lo = x_blowup;
                lo = mid;
            }
            ShotOutcome::ReachedHalfPi { h_at_end } => {
                if h_at_end > h_end_hi + 1e-6 * h_end_hi.abs().max(1.0) {
                    return Err(Error::NonMonotoneBracket { k: mid });
                }
                h_end_hi = h_at_end;
                hi = mid;
            }
        }
    }
    Ok((lo, hi, iterations))
}

pub fn solve_exponent_with(p: f64, n: u32, tol: f64, cfg: &ShootingConfig) -> Result<ExponentResult> {
    let (lo, hi, iterations) = bisect_exponent(p, n, tol, cfg)?;
    let k_star = 0.5 * (lo + hi);
    let prof = profile::compute_profile_with(p, n, k_star, RESIDUAL_PROFILE_POINTS, cfg)?;
    let check = profile::verify_boundary_conditions(&prof);
    Ok(ExponentResult {
        p,
        n,
        k_star,
        alpha: -k_star,
        bracket_lo: lo,
        bracket_hi: hi,
        iterations,
        tol,
        residual_max: check.residual_max,
    })
}
