//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative and absolute error tolerances of the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rel: 1e-10, abs: 1e-10 }
    }
}

impl Tolerances {
    pub fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let ok = |v: f64| (1e-14..=1e-6).contains(&v);
        if !(ok(self.rel) && ok(self.abs)) {
            return Err(Error::Range(format!(
                "integration tolerances must lie in [1e-14, 1e-6], got rel = {:e}, abs = {:e}",
                self.rel, self.abs
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RkConfig {
    pub tol: Tolerances,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for RkConfig {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            max_step: std::f64::consts::PI / 100.0,
            min_step: 1e-14,
            max_steps: 200_000,
        }
    }
}

impl RkConfig {
    pub fn with_tol(tol: Tolerances) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Verdict of a step observer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// One Dormand–Prince step: returns the fifth-order solution and the
/// embedded error estimate.
pub fn dopri_step<const D: usize, F>(
    rhs: &mut F,
    x: f64,
    y: &[f64; D],
    h: f64,
) -> Result<([f64; D], [f64; D])>
where
    F: FnMut(f64, &[f64; D]) -> Result<[f64; D]>,
{
    let k1 = rhs(x, y)?;
    let k2 = rhs(x + C2 * h, &axpy(y, h, &[(A21, &k1)]))?;
    let k3 = rhs(x + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]))?;
    let k4 = rhs(x + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = rhs(
        x + C5 * h,
        &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    )?;
    let k6 = rhs(
        x + h,
        &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    )?;
    let y_new = axpy(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = rhs(x + h, &y_new)?;
    let mut err = [0.0; D];
    for i in 0..D {
        err[i] = h
            * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    Ok((y_new, err))
}

/// Stateful adaptive integrator; keeps its step size between calls to
/// [`Integrator::advance_to`] so a trajectory can be sampled piecewise.
#[derive(Debug, Clone)]
pub struct Integrator<const D: usize> {
    pub x: f64,
    pub y: [f64; D],
    step: f64,
    cfg: RkConfig,
    steps_taken: usize,
}

impl<const D: usize> Integrator<D> {
    pub fn new(x0: f64, y0: [f64; D], initial_step: f64, cfg: RkConfig) -> Self {
        Self {
            x: x0,
            y: y0,
            step: initial_step.min(cfg.max_step),
            cfg,
            steps_taken: 0,
        }
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    pub fn config(&self) -> &RkConfig {
        &self.cfg
    }

    fn error_norm(&self, y_new: &[f64; D], err: &[f64; D]) -> f64 {
        let mut acc = 0.0;
        for i in 0..D {
            let sc = self.cfg.tol.abs + self.cfg.tol.rel * self.y[i].abs().max(y_new[i].abs());
            let r = err[i] / sc;
            acc += r * r;
        }
        (acc / D as f64).sqrt()
    }

    /// Integrate up to `x_target` (landing on it exactly), calling `observer`
    /// after every accepted step with `(x_old, y_old, x_new, y_new)`.
    ///
    /// Returns `true` when `x_target` was reached and `false` when the
    /// observer stopped the integration early.
    pub fn advance_to<F, O>(&mut self, rhs: &mut F, x_target: f64, mut observer: O) -> Result<bool>
    where
        F: FnMut(f64, &[f64; D]) -> Result<[f64; D]>,
        O: FnMut(f64, &[f64; D], f64, &[f64; D]) -> Control,
    {
        while self.x < x_target {
            if self.steps_taken >= self.cfg.max_steps {
                return Err(Error::TooManySteps { x: self.x, max_steps: self.cfg.max_steps });
            }
            let remaining = x_target - self.x;
            let mut h = self.step.min(self.cfg.max_step);
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }
            let (y_new, err) = dopri_step(rhs, self.x, &self.y, h)?;
            let norm = self.error_norm(&y_new, &err);
            let finite = norm.is_finite() && y_new.iter().all(|v| v.is_finite());
            if finite && norm <= 1.0 {
                let x_old = self.x;
                let y_old = self.y;
                self.x = if last { x_target } else { self.x + h };
                self.y = y_new;
                self.steps_taken += 1;
                let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
                // keep the step of a truncated final step for the next call
                if !last || h >= self.step {
                    self.step = h * factor;
                }
                if observer(x_old, &y_old, self.x, &self.y) == Control::Stop {
                    return Ok(false);
                }
            } else {
                let factor = if finite { (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
                self.step = h * factor;
                if self.step < self.cfg.min_step {
                    return Err(Error::StepUnderflow { x: self.x, step: self.step });
                }
            }
        }
        Ok(true)
    }

    pub fn advance<F>(&mut self, rhs: &mut F, x_target: f64) -> Result<()>
    where
        F: FnMut(f64, &[f64; D]) -> Result<[f64; D]>,
    {
        self.advance_to(rhs, x_target, |_, _, _, _| Control::Continue).map(|_| ())
    }
}
