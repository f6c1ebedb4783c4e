//! Right-hand sides of the reduced ODEs for the quasiradial ansatz
//! `u = r^k f(θ)` and their regular-singular starts at `x = 0`.
//!
//! Four equivalent formulations are exposed:
//!
//! * the second-order profile equation in `(y, y')` with `y = f`,
//! * the logarithmic-derivative equation for `H = y'/y`,
//! * the normalized slope `U = H/k`,
//! * the sensitivity `W = ∂U/∂k`, integrated alongside `U`.
//!
//! Every function here is pure.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Threshold under which `y` and `y'` are both treated as zero.
pub const DEGENERATE_THRESHOLD: f64 = 1e-14;

/// Default abscissa of the series start.
pub const DEFAULT_X0: f64 = 1e-6;

/// Largest abscissa accepted by [`series_start`].
pub const MAX_X0: f64 = 1e-4;

/// The triple `(p, N, k)` defining one ODE instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    pub p: f64,
    pub n: u32,
    pub k: f64,
}

impl ProblemParams {
    /// Validated constructor: `p > 1`, `N ≥ 2`, `k` finite.
    pub fn new(p: f64, n: u32, k: f64) -> Result<Self> {
        validate_pn(p, n)?;
        if !k.is_finite() {
            return Err(Error::InvalidParameter(format!("k must be finite, got {k}")));
        }
        Ok(Self { p, n, k })
    }

    /// Constructor for shooting usage, which additionally requires `k < 0`.
    pub fn for_shooting(p: f64, n: u32, k: f64) -> Result<Self> {
        let params = Self::new(p, n, k)?;
        if k >= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "shooting requires k < 0, got {k}"
            )));
        }
        Ok(params)
    }

    pub fn with_k(self, k: f64) -> Self {
        Self { k, ..self }
    }

    /// Dimension as a real number.
    pub fn dim(&self) -> f64 {
        f64::from(self.n)
    }

    /// `(N - p)/(1 - p)`, the value of `k` at which `H'(0)` vanishes.
    pub fn flat_start_k(&self) -> f64 {
        flat_start_k(self.p, self.n)
    }
}

pub(crate) fn validate_pn(p: f64, n: u32) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParameter(format!("p must exceed 1, got {p}")));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("N must be at least 2, got {n}")));
    }
    Ok(())
}

/// `(N - p)/(1 - p)`.
pub fn flat_start_k(p: f64, n: u32) -> f64 {
    (f64::from(n) - p) / (1.0 - p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HState {
    pub x: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YState {
    pub x: f64,
    pub y: f64,
    pub yp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UWState {
    pub x: f64,
    pub u: f64,
    pub w: f64,
}

fn cot_checked(what: &'static str, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < PI) {
        return Err(Error::Domain { what, x });
    }
    Ok(x.cos() / x.sin())
}

/// `dH/dx` from the solved first-order form
///
/// `((p-1)H² + k²) H' = (1-p)(H²+k²)² + (H²+k²)(k(p-N) + (2-N) H cot x)`.
pub fn h_rhs(params: &ProblemParams, state: &HState) -> Result<f64> {
    let cot = cot_checked("h_rhs", state.x)?;
    Ok(h_rhs_with_cot(params, params.dim(), state.h, cot))
}

#[inline]
pub(crate) fn h_rhs_with_cot(params: &ProblemParams, dim: f64, h: f64, cot: f64) -> f64 {
    let ProblemParams { p, k, .. } = *params;
    let s = h * h + k * k;
    let num = s * s * (1.0 - p) + s * (k * (p - dim) + (2.0 - dim) * h * cot);
    num / ((p - 1.0) * h * h + k * k)
}

/// `H'(0) = k(1-p)/(N-1) · (k - (N-p)/(1-p))`.
pub fn h_initial_slope(params: &ProblemParams) -> f64 {
    let ProblemParams { p, k, .. } = *params;
    let dim = params.dim();
    k * (1.0 - p) / (dim - 1.0) * (k - (dim - p) / (1.0 - p))
}

/// `(y', y'')` for the profile equation
///
/// `((p-1)y'² + k²y²) y'' = ((3-2p)k + p - N) k y y'² + (k(1-p) + p - N) k³ y³
///                          + (2-N) y' cot x (y'² + k²y²)`.
///
/// At `x = 0` (where necessarily `y' = 0`) the cotangent term is resolved by
/// its limit, giving `y''(0) = k(k(1-p) + p - N) y / (N - 1)`.
pub fn y_rhs(params: &ProblemParams, state: &YState) -> Result<(f64, f64)> {
    let YState { x, y, yp } = *state;
    if y.abs() < DEGENERATE_THRESHOLD && yp.abs() < DEGENERATE_THRESHOLD {
        return Err(Error::DegenerateState { x });
    }
    let ProblemParams { p, k, .. } = *params;
    let dim = params.dim();
    if x == 0.0 {
        if yp != 0.0 {
            return Err(Error::Domain { what: "y_rhs (y' ≠ 0 at x = 0)", x });
        }
        return Ok((0.0, k * (k * (1.0 - p) + p - dim) * y / (dim - 1.0)));
    }
    let cot = cot_checked("y_rhs", x)?;
    Ok((yp, y_second_with_cot(params, dim, y, yp, cot)))
}

#[inline]
pub(crate) fn y_second_with_cot(params: &ProblemParams, dim: f64, y: f64, yp: f64, cot: f64) -> f64 {
    let ProblemParams { p, k, .. } = *params;
    let yp2 = yp * yp;
    let ky2 = k * k * y * y;
    let num = ((3.0 - 2.0 * p) * k + p - dim) * k * y * yp2
        + (k * (1.0 - p) + p - dim) * k * k * k * y * y * y
        + (2.0 - dim) * yp * cot * (yp2 + ky2);
    num / ((p - 1.0) * yp2 + ky2)
}

/// `dU/dx` for `U = H/k`:
///
/// `((p-1)U² + 1) U' = (U²+1)² k(1-p) + (U²+1)(p - N + (2-N) U cot x)`.
pub fn u_rhs(params: &ProblemParams, state: &UWState) -> Result<f64> {
    let cot = cot_checked("u_rhs", state.x)?;
    Ok(u_rhs_with_cot(params, params.dim(), state.u, cot))
}

#[inline]
pub(crate) fn u_rhs_with_cot(params: &ProblemParams, dim: f64, u: f64, cot: f64) -> f64 {
    let ProblemParams { p, k, .. } = *params;
    let s = u * u + 1.0;
    (s * s * k * (1.0 - p) + s * (p - dim + (2.0 - dim) * u * cot)) / ((p - 1.0) * u * u + 1.0)
}

/// `U'(0) = ((1-p)k + p - N)/(N - 1)`.
pub fn u_initial_slope(params: &ProblemParams) -> f64 {
    let ProblemParams { p, k, .. } = *params;
    let dim = params.dim();
    ((1.0 - p) * k + p - dim) / (dim - 1.0)
}

/// `(1-p)/(N-1)`, the slope of `W` at the origin.
pub fn w_initial_slope(params: &ProblemParams) -> f64 {
    (1.0 - params.p) / (params.dim() - 1.0)
}

/// `dW/dx = Q W + (1-p)(U²+1)²/((p-1)U²+1)` with
///
/// `Q = [(1-p)(2UU' + 4(U³+U)k) + 2U(p-N) + (3U²+1)(2-N) cot x] / ((p-1)U²+1)`.
///
/// `uprime` is the concurrently evaluated [`u_rhs`].
pub fn w_rhs(params: &ProblemParams, state: &UWState, uprime: f64) -> Result<f64> {
    let cot = cot_checked("w_rhs", state.x)?;
    Ok(w_rhs_with_cot(params, params.dim(), state.u, state.w, uprime, cot))
}

#[inline]
pub(crate) fn w_rhs_with_cot(
    params: &ProblemParams,
    dim: f64,
    u: f64,
    w: f64,
    uprime: f64,
    cot: f64,
) -> f64 {
    let ProblemParams { p, k, .. } = *params;
    let denom = (p - 1.0) * u * u + 1.0;
    let q = ((1.0 - p) * (2.0 * u * uprime + 4.0 * (u * u * u + u) * k)
        + 2.0 * u * (p - dim)
        + (3.0 * u * u + 1.0) * (2.0 - dim) * cot)
        / denom;
    let s = u * u + 1.0;
    q * w + (1.0 - p) * s * s / denom
}

/// The full quasiradial expression whose sign is the sign of `Δ_p(r^k f)`:
///
/// `[(p-1)f'² + k²f²] f'' + k[(2p-3)k + N - p] f f'² + k³[k(p-1) + N - p] f³
///  + (N-2)[f'² + k²f²] f' cot θ`.
pub fn full_residual(params: &ProblemParams, theta: f64, f: f64, fp: f64, fpp: f64) -> f64 {
    let ProblemParams { p, k, .. } = *params;
    let dim = params.dim();
    let fp2 = fp * fp;
    let kf2 = k * k * f * f;
    let cot = theta.cos() / theta.sin();
    ((p - 1.0) * fp2 + kf2) * fpp
        + k * ((2.0 * p - 3.0) * k + dim - p) * f * fp2
        + k * k * k * (k * (p - 1.0) + dim - p) * f * f * f
        + (dim - 2.0) * (fp2 + kf2) * fp * cot
}

/// Matched first-order starts for all three formulations at `x0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesStart {
    pub h: HState,
    pub uw: UWState,
    pub y: YState,
}

/// Taylor initialization at the regular-singular point `x = 0`.
///
/// `H`, `U` and `W` are started at first order, `y` at second order.
pub fn series_start(params: &ProblemParams, x0: f64) -> Result<SeriesStart> {
    if !(x0 > 0.0 && x0 <= MAX_X0) {
        return Err(Error::Range(format!(
            "series start x0 must lie in (0, {MAX_X0:e}], got {x0:e}"
        )));
    }
    let hp0 = h_initial_slope(params);
    Ok(SeriesStart {
        h: HState { x: x0, h: hp0 * x0 },
        uw: UWState {
            x: x0,
            u: u_initial_slope(params) * x0,
            w: w_initial_slope(params) * x0,
        },
        y: YState {
            x: x0,
            y: 1.0 + 0.5 * hp0 * x0 * x0,
            yp: hp0 * x0,
        },
    })
}
