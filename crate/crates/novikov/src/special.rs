//! Closed-form helper functions behind the integrability constants.
//!
//! The central objects are `h(x) = (1+x)ln(1+x) - x` and
//! `g(x) = ln(1+x) - x/(1+x)`, from which the constant functions
//! `alpha(a) = h(a)/a^2` and `beta(a) = alpha(a)/(1+a)` are built. All four
//! have removable singularities at 0 where the closed forms cancel
//! catastrophically in doubles, so a short Taylor branch takes over inside a
//! small switch radius.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Lower bound `a >= -1` on jump sizes, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpFloor(f64);

impl JumpFloor {
    pub fn new(a: f64) -> Result<Self> {
        if !a.is_finite() || a < -1.0 {
            return Err(Error::Domain(format!("jump floor must satisfy a >= -1, got {a}")));
        }
        Ok(JumpFloor(a))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Evaluation policy: switch radius for the series branches and the target
/// absolute accuracy used by identity checks.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EvalPolicy {
    pub series_threshold: f64,
    pub tolerance: f64,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        // Six series terms give absolute error below 1e-24 inside |x| < 1e-4.
        EvalPolicy { series_threshold: 1e-4, tolerance: 1e-12 }
    }
}

impl EvalPolicy {
    pub fn new(series_threshold: f64, tolerance: f64) -> Result<Self> {
        if !(series_threshold > 0.0 && series_threshold < 0.1) {
            return Err(Error::Config(format!(
                "series_threshold must lie in (0, 0.1), got {series_threshold}"
            )));
        }
        if !(tolerance > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {tolerance}")));
        }
        Ok(EvalPolicy { series_threshold, tolerance })
    }

    /// `h(x) = (1+x)ln(1+x) - x`, extended by its limit `h(-1) = 1`.
    pub fn h(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || x < -1.0 {
            return Err(Error::Domain(format!("h requires x >= -1, got {x}")));
        }
        if x == -1.0 {
            return Ok(1.0);
        }
        if x.abs() < self.series_threshold {
            // sum_{k>=2} (-1)^k x^k / (k(k-1))
            return Ok(x * x
                * (1.0 / 2.0
                    + x * (-1.0 / 6.0
                        + x * (1.0 / 12.0
                            + x * (-1.0 / 20.0 + x * (1.0 / 30.0 + x * (-1.0 / 42.0)))))));
        }
        Ok((1.0 + x) * x.ln_1p() - x)
    }

    /// `g(x) = ln(1+x) - x/(1+x)`; diverges as x -> -1+, no value at -1.
    pub fn g(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || x <= -1.0 {
            return Err(Error::Domain(format!("g requires x > -1, got {x}")));
        }
        if x.abs() < self.series_threshold {
            // sum_{k>=2} (-1)^k (k-1)/k x^k
            return Ok(x * x
                * (1.0 / 2.0
                    + x * (-2.0 / 3.0
                        + x * (3.0 / 4.0
                            + x * (-4.0 / 5.0 + x * (5.0 / 6.0 + x * (-6.0 / 7.0)))))));
        }
        Ok(x.ln_1p() - x / (1.0 + x))
    }

    /// `alpha(a) = h(a)/a^2`, with `alpha(0) = 1/2` and `alpha(-1) = 1`.
    pub fn alpha(&self, a: f64) -> Result<f64> {
        if !a.is_finite() || a < -1.0 {
            return Err(Error::Domain(format!("alpha requires a >= -1, got {a}")));
        }
        if a == -1.0 {
            return Ok(1.0);
        }
        if a.abs() < self.series_threshold {
            return Ok(1.0 / 2.0
                + a * (-1.0 / 6.0
                    + a * (1.0 / 12.0
                        + a * (-1.0 / 20.0 + a * (1.0 / 30.0 + a * (-1.0 / 42.0))))));
        }
        Ok(self.h(a)? / (a * a))
    }

    /// `beta(a) = alpha(a)/(1+a)`; diverges as a -> -1+ and has no value at -1.
    pub fn beta(&self, a: f64) -> Result<f64> {
        if !a.is_finite() || a <= -1.0 {
            return Err(Error::NoBetaAtMinusOne);
        }
        Ok(self.alpha(a)? / (1.0 + a))
    }

    /// Derivative of `alpha`: `(2a^2 - a(2+a)ln(1+a)) / a^4`, with the limit
    /// value `-1/6` at 0. Negative everywhere on (-1, inf).
    pub fn alpha_prime(&self, a: f64) -> Result<f64> {
        if !a.is_finite() || a <= -1.0 {
            return Err(Error::Domain(format!("alpha_prime requires a > -1, got {a}")));
        }
        if a.abs() < self.series_threshold {
            return Ok(-1.0 / 6.0
                + a * (1.0 / 6.0
                    + a * (-3.0 / 20.0 + a * (2.0 / 15.0 + a * (-5.0 / 42.0 + a * (3.0 / 28.0))))));
        }
        let a2 = a * a;
        Ok((2.0 * a2 - a * (2.0 + a) * a.ln_1p()) / (a2 * a2))
    }
}

/// `h` under the default evaluation policy.
pub fn h(x: f64) -> Result<f64> {
    EvalPolicy::default().h(x)
}

/// `g` under the default evaluation policy.
pub fn g(x: f64) -> Result<f64> {
    EvalPolicy::default().g(x)
}

/// `alpha` under the default evaluation policy.
pub fn alpha(a: f64) -> Result<f64> {
    EvalPolicy::default().alpha(a)
}

/// `beta` under the default evaluation policy.
pub fn beta(a: f64) -> Result<f64> {
    EvalPolicy::default().beta(a)
}

/// `alpha_prime` under the default evaluation policy.
pub fn alpha_prime(a: f64) -> Result<f64> {
    EvalPolicy::default().alpha_prime(a)
}

/// `f_b(lambda) = exp(-lambda) + lambda(1+b) - 1`, convex in lambda.
pub fn f(b: f64, lambda: f64) -> f64 {
    (-lambda).exp() + lambda * (1.0 + b) - 1.0
}

/// Location and depth of the minimum of `f_b`: the minimizer is
/// `-ln(1+b)` and `-f_b` attains the maximum `h(b)` there.
pub fn argmin_f(b: f64) -> Result<(f64, f64)> {
    if !b.is_finite() || b <= -1.0 {
        return Err(Error::Domain(format!("argmin_f requires b > -1, got {b}")));
    }
    let lambda_star = -b.ln_1p();
    Ok((lambda_star, -f(b, lambda_star)))
}

/// Which constant function a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DominationKind {
    Alpha,
    Beta,
}

/// Maximum violation of the domination inequality over a grid of jump sizes:
/// `h(x) - alpha(a) x^2` (alpha kind) or `g(x) - beta(a) x^2` (beta kind) for
/// `x >= a`. Nonpositive up to rounding whenever the floor is respected.
pub fn check_jump_domination(a: JumpFloor, kind: DominationKind, grid: &[f64]) -> Result<f64> {
    let policy = EvalPolicy::default();
    let a = a.get();
    let coeff = match kind {
        DominationKind::Alpha => policy.alpha(a)?,
        DominationKind::Beta => policy.beta(a)?,
    };
    let mut max_violation = f64::NEG_INFINITY;
    for &x in grid {
        if x < a {
            return Err(Error::Domain(format!("grid point {x} below jump floor {a}")));
        }
        let lhs = match kind {
            DominationKind::Alpha => policy.h(x)?,
            DominationKind::Beta => policy.g(x)?,
        };
        max_violation = max_violation.max(lhs - coeff * x * x);
    }
    Ok(max_violation)
}
