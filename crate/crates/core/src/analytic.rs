//! Closed-form exponents, the sign classifier for the test function
//! `r^k cos θ`, and the a priori brackets for `α(p, N)`.

use serde::Serialize;

/// Tolerance below which a `Λ` coefficient counts as zero.
pub const HARMONIC_TOL: f64 = 1e-12;

/// `(N-1)/(p-1)`.
pub fn first_bound(p: f64, n: u32) -> f64 {
    (f64::from(n) - 1.0) / (p - 1.0)
}

/// `(p+N-3)/(2p-3)`; infinite at `p = 3/2`.
pub fn second_bound(p: f64, n: u32) -> f64 {
    (p + f64::from(n) - 3.0) / (2.0 * p - 3.0)
}

/// Planar exponent `(3 - p + 2√(p² - 3p + 3)) / (3(p - 1))`.
pub fn planar_exponent(p: f64) -> f64 {
    (3.0 - p + 2.0 * (p * p - 3.0 * p + 3.0).sqrt()) / (3.0 * (p - 1.0))
}

/// `α(p, N)` where it is known in closed form: `p = 2`, `N = 2`, `p = N`.
pub fn known_exponent(p: f64, n: u32) -> Option<f64> {
    let dim = f64::from(n);
    if (p - 2.0).abs() < 1e-12 {
        Some(dim - 1.0)
    } else if n == 2 {
        Some(planar_exponent(p))
    } else if (p - dim).abs() < 1e-12 {
        Some(1.0)
    } else {
        None
    }
}

/// Coefficients of `Λ(t) = α t + β k²`, `t = tan²θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaCoefficients {
    pub alpha_coeff: f64,
    pub beta_coeff: f64,
    pub k: f64,
}

impl LambdaCoefficients {
    pub fn eval(&self, t: f64) -> f64 {
        self.alpha_coeff * t + self.beta_coeff * self.k * self.k
    }
}

pub fn lambda_coefficients(p: f64, n: u32, k: f64) -> LambdaCoefficients {
    let dim = f64::from(n);
    LambdaCoefficients {
        alpha_coeff: (2.0 * p - 3.0) * k * k + (dim - p) * k + 3.0 - dim - p,
        beta_coeff: (p - 1.0) * k * k + (dim - p) * k + 1.0 - dim,
        k,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignVerdict {
    Superharmonic,
    Subharmonic,
    Harmonic,
    Indefinite,
}

impl SignVerdict {
    /// Harmonic functions are both sub- and superharmonic.
    pub fn is_superharmonic(self) -> bool {
        matches!(self, SignVerdict::Superharmonic | SignVerdict::Harmonic)
    }

    pub fn is_subharmonic(self) -> bool {
        matches!(self, SignVerdict::Subharmonic | SignVerdict::Harmonic)
    }
}

impl std::fmt::Display for SignVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SignVerdict::Superharmonic => "Superharmonic",
            SignVerdict::Subharmonic => "Subharmonic",
            SignVerdict::Harmonic => "Harmonic",
            SignVerdict::Indefinite => "Indefinite",
        };
        f.write_str(s)
    }
}

/// Sign of `Δ_p(r^k cos θ)` on the whole half-space. `Λ` is affine in
/// `t ≥ 0`, so its sign is constant iff both coefficients share it.
pub fn classify_cos_test(p: f64, n: u32, k: f64) -> SignVerdict {
    let c = lambda_coefficients(p, n, k);
    let (a, b) = (c.alpha_coeff, c.beta_coeff);
    if a.abs() <= HARMONIC_TOL && b.abs() <= HARMONIC_TOL {
        SignVerdict::Harmonic
    } else if a <= HARMONIC_TOL && b <= HARMONIC_TOL {
        SignVerdict::Superharmonic
    } else if a >= -HARMONIC_TOL && b >= -HARMONIC_TOL {
        SignVerdict::Subharmonic
    } else {
        SignVerdict::Indefinite
    }
}

/// Closed interval for `α(p, N)`; `upper` is `+∞` for `p ≤ 3/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentBounds {
    pub lower: f64,
    pub upper: f64,
}

impl ExponentBounds {
    pub fn contains(&self, alpha: f64) -> bool {
        alpha >= self.lower && alpha <= self.upper
    }

    /// Whether the closed interval `[lo, hi]` meets the bounds.
    pub fn meets(&self, lo: f64, hi: f64) -> bool {
        lo <= self.upper && hi >= self.lower
    }

    pub fn widened(&self, by: f64) -> Self {
        Self { lower: self.lower - by, upper: self.upper + by }
    }
}

/// An upper bound `ω ≤ C δ^a` forces `α ≥ a`; a lower bound `ω ≥ C δ^a`
/// forces `α ≤ a`.
pub fn exponent_bounds(p: f64, n: u32) -> ExponentBounds {
    let b1 = first_bound(p, n);
    let dim = f64::from(n);
    if p <= 1.5 {
        return ExponentBounds { lower: b1, upper: f64::INFINITY };
    }
    let b2 = second_bound(p, n);
    if p <= 2.0 {
        ExponentBounds { lower: b1, upper: b2 }
    } else if p <= dim {
        ExponentBounds { lower: b2, upper: b1 }
    } else {
        ExponentBounds { lower: b1, upper: b2 }
    }
}
