//! Planar finite-difference experiment for the p-harmonic measure of a small
//! boundary interval.
//!
//! The half-plane is truncated to `[-L, L] × [0, L]` with zero data on the
//! artificial edges. The discrete p-harmonic function is the minimizer of a
//! convex p-Dirichlet energy, found by damped Newton iteration with a
//! multigrid-preconditioned conjugate gradient inner solver.

mod energy;
mod multigrid;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{classify_cos_test, SignVerdict};
use crate::error::{Error, Result};
use crate::format::sig17;

pub use energy::EPS_REG;
use energy::Energy;
use multigrid::{pcg, Multigrid, Shape};

pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_TOL: f64 = 1e-8;
/// Relative slack allowed when comparing the discrete solution to a barrier.
pub const ENVELOPE_SLACK: f64 = 0.05;
const CG_MAX_ITER: usize = 500;
const MAX_COARSE_UNKNOWNS: usize = 600;
const LINE_SEARCH_HALVINGS: usize = 40;

/// Truncated half-plane `[-L, L] × [0, L]` with `n` cells across, and the
/// half-width `δ` of the boundary interval carrying data one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub n: usize,
    pub delta: f64,
}

impl GridSpec {
    pub fn new(half_width: f64, n: usize, delta: f64) -> Result<Self> {
        let spec = Self { half_width, n, delta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let (l, n, d) = (self.half_width, self.n, self.delta);
        if !(l.is_finite() && l >= 4.0) {
            return Err(Error::InvalidParameter(format!("half-width must be at least 4, got {l}")));
        }
        if n < 64 || n % 2 != 0 {
            return Err(Error::InvalidParameter(format!("cell count must be even and at least 64, got {n}")));
        }
        if !(d > 0.0 && d <= 1.0 && d <= l / 8.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, min(1, L/8)], got {d}"
            )));
        }
        let h = self.spacing();
        if d < 4.0 * h {
            return Err(Error::InvalidParameter(format!(
                "delta = {d} is resolved by fewer than 4 cells of width {h}"
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.half_width, self.n, delta)
    }

    /// `δ` rounded to the nearest half cell. With the nodal boundary data of
    /// [`GridSpec::bottom_data`] the piecewise-linear trace has mass exactly
    /// `2 δ_eff`.
    pub fn effective_delta(&self) -> f64 {
        let half = 0.5 * self.spacing();
        (self.delta / half).round().max(1.0) * half
    }

    /// Nodal data on the bottom edge: one inside the interval, one half at a
    /// node lying exactly on its end, zero beyond.
    pub fn bottom_data(&self, x: f64) -> f64 {
        let d = self.effective_delta();
        let tie = 1e-9 * self.spacing();
        let ax = x.abs();
        if ax < d - tie {
            1.0
        } else if ax <= d + tie {
            0.5
        } else {
            0.0
        }
    }
}

/// Nodal values of a discrete solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub half_width: f64,
    pub n: usize,
    /// Row-major, `(n + 1) × (n/2 + 1)` nodes.
    pub values: Vec<f64>,
    pub newton_iterations: usize,
    /// Sup-norm of the last Newton update.
    pub last_update: f64,
}

impl Field {
    fn shape(&self) -> Shape {
        Shape { nx: self.n, ny: self.n / 2 }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn node(&self, i: usize, j: usize) -> f64 {
        self.values[self.shape().idx(i, j)]
    }

    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        let h = self.spacing();
        (-self.half_width + i as f64 * h, j as f64 * h)
    }

    /// Bilinear interpolation; points outside the domain are clamped onto it.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let s = self.shape();
        let h = self.spacing();
        let fx = ((x + self.half_width) / h).clamp(0.0, s.nx as f64);
        let fy = (y / h).clamp(0.0, s.ny as f64);
        let i = (fx.floor() as usize).min(s.nx - 1);
        let j = (fy.floor() as usize).min(s.ny - 1);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let v = |a, b| self.values[s.idx(a, b)];
        (1.0 - ty) * ((1.0 - tx) * v(i, j) + tx * v(i + 1, j)) + ty * ((1.0 - tx) * v(i, j + 1) + tx * v(i + 1, j + 1))
    }

    /// Value at the reference point `(0, 1)`.
    pub fn omega(&self) -> f64 {
        self.eval(0.0, 1.0)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Clip every iterate to the range of the boundary data. On this mesh the
    /// clip never raises the energy, so the minimizer is unchanged.
    pub project: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { max_iter: DEFAULT_MAX_ITER, tol: DEFAULT_TOL, project: true }
    }
}

/// Discrete p-harmonic measure of `[-δ, δ]` on the truncated half-plane.
pub fn solve_p_harmonic(spec: &GridSpec, p: f64, max_iter: usize, tol: f64) -> Result<Field> {
    spec.validate()?;
    let opts = SolveOptions { max_iter, tol, ..Default::default() };
    solve_dirichlet(spec.half_width, spec.n, p, |x, y| if y == 0.0 { spec.bottom_data(x) } else { 0.0 }, &opts)
}

/// Minimize the discrete p-Dirichlet energy with boundary values taken from
/// `boundary(x, y)` at the boundary nodes.
pub fn solve_dirichlet(
    half_width: f64,
    n: usize,
    p: f64,
    boundary: impl Fn(f64, f64) -> f64,
    opts: &SolveOptions,
) -> Result<Field> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParameter(format!("p must exceed 1, got {p}")));
    }
    if !(half_width.is_finite() && half_width > 0.0) || n < 8 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "need a positive half-width and an even cell count, got L = {half_width}, n = {n}"
        )));
    }
    if !(1e-10..=1e-6).contains(&opts.tol) {
        return Err(Error::Range(format!("solver tolerance must lie in [1e-10, 1e-6], got {:e}", opts.tol)));
    }
    if opts.max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be positive".into()));
    }
    let shape = Shape { nx: n, ny: n / 2 };
    let mut coarsest = shape;
    while let Some(c) = coarsest.coarsen() {
        coarsest = c;
    }
    if (coarsest.nx - 1) * (coarsest.ny - 1) > MAX_COARSE_UNKNOWNS {
        return Err(Error::InvalidParameter(format!(
            "cell count {n} has too few factors of 2 for the multigrid hierarchy"
        )));
    }
    let h = 2.0 * half_width / n as f64;
    let mut u = vec![0.0; shape.len()];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..=shape.ny {
        for i in 0..=shape.nx {
            if i == 0 || j == 0 || i == shape.nx || j == shape.ny {
                let v = boundary(-half_width + i as f64 * h, j as f64 * h);
                u[shape.idx(i, j)] = v;
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    let bounds = opts.project.then_some((lo, hi));

    // the quadratic problem gives the starting guess
    let quadratic = Energy { shape, h, p: 2.0, eps: EPS_REG };
    newton(&quadratic, &mut u, opts.max_iter, opts.tol, bounds)?;
    let (iterations, last_update) = if p == 2.0 {
        (0, 0.0)
    } else {
        newton(&Energy { shape, h, p, eps: EPS_REG }, &mut u, opts.max_iter, opts.tol, bounds)?
    };
    Ok(Field { half_width, n, values: u, newton_iterations: iterations, last_update })
}

fn newton(energy: &Energy, u: &mut [f64], max_iter: usize, tol: f64, bounds: Option<(f64, f64)>) -> Result<(usize, f64)> {
    let len = u.len();
    let mut d = vec![0.0; len];
    let mut trial = vec![0.0; len];
    let mut last = f64::INFINITY;
    for it in 1..=max_iter {
        let (grad, hess) = energy.linearize(u);
        let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
        let mut mg = Multigrid::new(hess)?;
        let rtol = last.clamp(1e-10, 1e-2);
        pcg(&mut mg, &rhs, &mut d, rtol, CG_MAX_ITER)?;

        let e0 = energy.value(u);
        let s0: f64 = grad.iter().zip(&d).map(|(g, v)| g * v).sum();
        let mut t = 1.0;
        for _ in 0..LINE_SEARCH_HALVINGS {
            for k in 0..len {
                trial[k] = u[k] + t * d[k];
            }
            // by convexity a non-positive slope at the trial point means the
            // energy decreased along the whole segment
            if energy.slope(&trial, &d) <= 0.0 || energy.value(&trial) <= e0 + 1e-4 * t * s0 {
                break;
            }
            t *= 0.5;
        }
        if let Some((lo, hi)) = bounds {
            trial.iter_mut().for_each(|v| *v = v.clamp(lo, hi));
        }
        let update = u.iter().zip(&trial).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        u.copy_from_slice(&trial);
        if !update.is_finite() {
            return Err(Error::NonConvergence { iterations: it, residual: update });
        }
        if update <= tol {
            return Ok((it, update));
        }
        last = update;
    }
    Err(Error::NonConvergence { iterations: max_iter, residual: last })
}

/// Log-log fit of `ω(δ)` for one `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureExperiment {
    pub p: f64,
    /// Interval half-widths after rounding to the grid.
    pub deltas: Vec<f64>,
    pub omegas: Vec<f64>,
    /// Slope of `log ω` against `log δ`.
    pub alpha_hat: f64,
    pub intercept: f64,
    pub r2: f64,
    /// `(min, max)` of every solved field.
    pub field_ranges: Vec<(f64, f64)>,
}

impl MeasureExperiment {
    pub fn omegas_increasing(&self) -> bool {
        self.omegas.windows(2).all(|w| w[1] > w[0])
    }

    pub fn maximum_principle(&self) -> bool {
        self.field_ranges.iter().all(|&(lo, hi)| lo >= 0.0 && hi <= 1.0)
    }
}

/// Least-squares line through `(x, y)`: `(slope, intercept, r²)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

fn validate_deltas(deltas: &[f64]) -> Result<()> {
    if deltas.len() < 4 {
        return Err(Error::InvalidParameter(format!("need at least 4 deltas, got {}", deltas.len())));
    }
    if let Some(d) = deltas.iter().find(|d| !(0.05..=0.5).contains(*d)) {
        return Err(Error::InvalidParameter(format!("deltas must lie in [0.05, 0.5], got {d}")));
    }
    let lo = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi < 4.0 * lo * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!("deltas must span a factor of 4, got [{lo}, {hi}]")));
    }
    Ok(())
}

pub fn run_experiment(p: f64, deltas: &[f64], template: &GridSpec) -> Result<MeasureExperiment> {
    run_experiment_with(p, deltas, template, &SolveOptions::default())
}

/// Solve for every `δ` (concurrently) and fit the scaling exponent. The
/// expected monotonicity and range of `ω` are enforced.
pub fn run_experiment_with(p: f64, deltas: &[f64], template: &GridSpec, opts: &SolveOptions) -> Result<MeasureExperiment> {
    validate_deltas(deltas)?;
    let mut ds = deltas.to_vec();
    ds.sort_by(f64::total_cmp);
    let specs = ds.iter().map(|&d| template.with_delta(d)).collect::<Result<Vec<_>>>()?;
    let fields = specs
        .par_iter()
        .map(|s| solve_p_harmonic(s, p, opts.max_iter, opts.tol))
        .collect::<Result<Vec<_>>>()?;

    let eff: Vec<f64> = specs.iter().map(GridSpec::effective_delta).collect();
    if eff.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("deltas coincide after rounding to the grid".into()));
    }
    let omegas: Vec<f64> = fields.iter().map(Field::omega).collect();
    let lx: Vec<f64> = eff.iter().map(|d| d.ln()).collect();
    let ly: Vec<f64> = omegas.iter().map(|w| w.ln()).collect();
    let (alpha_hat, intercept, r2) = fit_line(&lx, &ly);
    let exp = MeasureExperiment {
        p,
        deltas: eff,
        omegas,
        alpha_hat,
        intercept,
        r2,
        field_ranges: fields.iter().map(|f| (f.min(), f.max())).collect(),
    };
    if !exp.omegas.iter().all(|&w| w > 0.0 && w < 1.0) || !exp.omegas_increasing() {
        return Err(Error::Invariant(format!("omega is not increasing inside (0, 1): {:?}", exp.omegas)));
    }
    if !(exp.alpha_hat > 0.0) {
        return Err(Error::Invariant(format!("fitted exponent {} is not positive", exp.alpha_hat)));
    }
    Ok(exp)
}

pub fn write_experiment_csv<W: Write>(exp: &MeasureExperiment, mut out: W) -> std::io::Result<()> {
    writeln!(out, "p,delta,omega,alpha_hat,r2")?;
    for (d, w) in exp.deltas.iter().zip(&exp.omegas) {
        writeln!(out, "{},{},{},{},{}", sig17(exp.p), sig17(*d), sig17(*w), sig17(exp.alpha_hat), sig17(exp.r2))?;
    }
    out.flush()
}

pub fn export_experiment(exp: &MeasureExperiment, destination: &Path) -> Result<()> {
    let io_err = |source| Error::Io { path: destination.to_path_buf(), source };
    let file = File::create(destination).map_err(io_err)?;
    write_experiment_csv(exp, BufWriter::new(file)).map_err(io_err)
}

/// Worst node of one envelope comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeCheck {
    /// Multiplier in front of `r^k cos θ`.
    pub constant: f64,
    /// Largest ratio of the quantity that should be smaller to the one that
    /// should be larger; at most `1 + ENVELOPE_SLACK` when the envelope holds.
    pub worst_ratio: f64,
    pub worst_at: (f64, f64),
    pub nodes: usize,
}

impl EnvelopeCheck {
    pub fn holds(&self) -> bool {
        self.worst_ratio <= 1.0 + ENVELOPE_SLACK
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarrierReport {
    pub verdict: SignVerdict,
    pub upper: Option<EnvelopeCheck>,
    pub lower: Option<EnvelopeCheck>,
}

impl BarrierReport {
    pub fn holds(&self) -> bool {
        (self.upper.is_some() || self.lower.is_some())
            && self.upper.map_or(true, |c| c.holds())
            && self.lower.map_or(true, |c| c.holds())
    }
}

/// Compare a solved field against the `r^k cos θ` barrier allowed by the
/// sign of `Δ_p(r^k cos θ)`. A superharmonic barrier with pole at `(0, -2δ)`
/// and constant `3^{|k|}/cos(π/6)` must dominate the field; a subharmonic one
/// centred at the origin, scaled to the smallest field value on the half
/// circle of radius `δ/2`, must lie below it. The lower comparison is read
/// only for `r ≤ L/4` since the truncated domain lowers the field near its
/// artificial edge.
pub fn barrier_envelope_check(p: f64, k: f64, field: &Field, spec: &GridSpec) -> BarrierReport {
    let verdict = classify_cos_test(p, 2, k);
    let delta = spec.effective_delta();
    let upper = verdict.is_superharmonic().then(|| upper_envelope(k, field, delta));
    let lower = verdict.is_subharmonic().then(|| lower_envelope(k, field, delta));
    BarrierReport { verdict, upper, lower }
}

fn nodes_where<'a>(field: &'a Field, keep: impl Fn(f64, f64) -> bool + 'a) -> impl Iterator<Item = (f64, f64, f64)> + 'a {
    let s = field.shape();
    (0..=s.ny)
        .flat_map(move |j| (0..=s.nx).map(move |i| (i, j)))
        .filter_map(move |(i, j)| {
            let (x, y) = field.coords(i, j);
            keep(x, y).then(|| (x, y, field.node(i, j)))
        })
}

fn upper_envelope(k: f64, field: &Field, delta: f64) -> EnvelopeCheck {
    let constant = 3f64.powf(k.abs()) / FRAC_PI_6.cos();
    let scale = constant * delta.powf(k.abs());
    let mut check = EnvelopeCheck { constant, worst_ratio: f64::NEG_INFINITY, worst_at: (0.0, 0.0), nodes: 0 };
    for (x, y, w) in nodes_where(field, |x, y| x.hypot(y) >= 3.0 * delta) {
        let yy = y + 2.0 * delta;
        let r = x.hypot(yy);
        let barrier = scale * r.powf(k) * (yy / r);
        let ratio = w / barrier;
        check.nodes += 1;
        if ratio > check.worst_ratio {
            check.worst_ratio = ratio;
            check.worst_at = (x, y);
        }
    }
    check
}

fn lower_envelope(k: f64, field: &Field, delta: f64) -> EnvelopeCheck {
    let rho = 0.5 * delta;
    let samples = 181;
    let lambda = (0..samples)
        .map(|m| {
            let th = -FRAC_PI_2 + std::f64::consts::PI * m as f64 / (samples - 1) as f64;
            field.eval(rho * th.sin(), rho * th.cos())
        })
        .fold(f64::INFINITY, f64::min);
    let outer = 0.25 * field.half_width;
    let mut check = EnvelopeCheck { constant: lambda, worst_ratio: f64::NEG_INFINITY, worst_at: (0.0, 0.0), nodes: 0 };
    for (x, y, w) in nodes_where(field, |x, y| {
        let r = x.hypot(y);
        y > 0.0 && r >= 3.0 * delta && r <= outer
    }) {
        let r = x.hypot(y);
        let barrier = lambda * (r / rho).powf(k) * (y / r);
        let ratio = if w > 0.0 { barrier / w } else { f64::INFINITY };
        check.nodes += 1;
        if ratio > check.worst_ratio {
            check.worst_ratio = ratio;
            check.worst_at = (x, y);
        }
    }
    check
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(8.0, 512, 1.0).is_ok());
        assert!(GridSpec::new(3.0, 512, 0.2).is_err());
        assert!(GridSpec::new(8.0, 32, 1.0).is_err());
        assert!(GridSpec::new(8.0, 512, 0.1).is_err());
        assert!(GridSpec::new(8.0, 511, 1.0).is_err());
        assert!(GridSpec::new(4.0, 640, 0.05).is_ok());
    }

    #[test]
    fn delta_snaps_to_half_cells() {
        let spec = GridSpec::new(4.0, 640, 0.07).unwrap();
        let h = spec.spacing();
        assert!((spec.effective_delta() - 0.06875).abs() < 1e-15);
        assert_eq!(spec.bottom_data(0.0), 1.0);
        assert_eq!(spec.bottom_data(0.06875 - 0.5 * h), 1.0);
        assert_eq!(spec.bottom_data(0.06875 + 0.5 * h), 0.0);
        let spec = GridSpec::new(4.0, 640, 0.1).unwrap();
        assert_eq!(spec.bottom_data(0.1), 0.5);
        assert_eq!(spec.bottom_data(-0.1), 0.5);
    }

    #[test]
    fn harmonic_reference_value() {
        // the harmonic measure of [-1, 1] seen from (0, 1) is exactly 1/2
        let spec = GridSpec::new(8.0, 256, 1.0).unwrap();
        let field = solve_p_harmonic(&spec, 2.0, 50, 1e-9).unwrap();
        assert!((field.omega() - 0.5).abs() < 0.02, "{}", field.omega());
    }

    #[test]
    fn constant_data_gives_constant_solution() {
        let opts = SolveOptions { project: false, ..Default::default() };
        for &p in &[1.5, 3.0] {
            let field = solve_dirichlet(4.0, 64, p, |_, _| 1.0, &opts).unwrap();
            assert!(field.values.iter().all(|v| (v - 1.0).abs() < 1e-9));
        }
    }

    #[test]
    fn maximum_principle_without_projection() {
        let opts = SolveOptions { project: false, tol: 1e-10, ..Default::default() };
        let spec = GridSpec::new(4.0, 128, 0.25).unwrap();
        for &p in &[1.4, 3.0] {
            let field = solve_dirichlet(4.0, 128, p, |x, y| if y == 0.0 { spec.bottom_data(x) } else { 0.0 }, &opts).unwrap();
            assert!(field.min() > -1e-9 && field.max() < 1.0 + 1e-9, "{} {}", field.min(), field.max());
        }
    }

    #[test]
    fn omega_grows_with_delta() {
        let spec = GridSpec::new(4.0, 128, 0.25).unwrap();
        let small = solve_p_harmonic(&spec, 3.0, 100, 1e-8).unwrap().omega();
        let large = solve_p_harmonic(&spec.with_delta(0.5).unwrap(), 3.0, 100, 1e-8).unwrap().omega();
        assert!(0.0 < small && small < large && large < 1.0, "{small} {large}");
    }

    #[test]
    fn fit_recovers_a_power_law() {
        let x: Vec<f64> = [0.05f64, 0.1, 0.2, 0.4].iter().map(|d| d.ln()).collect();
        let y: Vec<f64> = x.iter().map(|l| 0.3 + 0.75 * l).collect();
        let (s, c, r2) = fit_line(&x, &y);
        assert!((s - 0.75).abs() < 1e-12 && (c - 0.3).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn experiment_rejects_bad_deltas() {
        let spec = GridSpec::new(4.0, 640, 0.1).unwrap();
        assert!(run_experiment(2.0, &[0.1, 0.2, 0.3], &spec).is_err());
        assert!(run_experiment(2.0, &[0.1, 0.15, 0.2, 0.3], &spec).is_err());
        assert!(run_experiment(2.0, &[0.01, 0.1, 0.2, 0.4], &spec).is_err());
    }

    #[test]
    fn csv_layout() {
        let exp = MeasureExperiment {
            p: 2.0,
            deltas: vec![0.1, 0.2],
            omegas: vec![0.06, 0.12],
            alpha_hat: 1.0,
            intercept: 0.0,
            r2: 1.0,
            field_ranges: vec![],
        };
        let mut buf = Vec::new();
        write_experiment_csv(&exp, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "p,delta,omega,alpha_hat,r2");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split(',').count(), 5);
    }
}
