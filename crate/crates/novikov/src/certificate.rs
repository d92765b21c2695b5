//! Construction and verification of counterexample parameter certificates.
//!
//! A certificate packages `(a, eps, b, c, lambda)` together with every
//! analytic inequality the optimality construction needs. Selection follows
//! the existence argument but makes it constructive: the binding equality is
//! root-found by bisection and the final `b` is the midpoint between the
//! root and `a`, so strict inequalities hold with a quantifiable margin; the
//! barrier height `c` comes from a doubling search over a joint predicate.

use crate::special::{self, EvalPolicy};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which integrability constant the construction targets: `alpha` pairs the
/// exponent with the predictable quadratic variation (via `h`), `beta` with
/// the quadratic variation (via `g`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Alpha,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    /// `a > 0`: lower-barrier construction.
    Positive,
    /// `a = 0`: reduced to a small positive surrogate jump scale.
    ZeroSurrogate,
    /// `-1 < a < 0`: upper-barrier construction.
    Negative,
    /// `a = -1`: reduced to a surrogate jump scale just above -1.
    MinusOneSurrogate,
}

/// One verified inequality, with both sides recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
}

impl Check {
    fn le(name: &str, lhs: f64, rhs: f64) -> Self {
        Check { name: name.to_string(), lhs, rhs, passed: lhs <= rhs }
    }

    fn lt(name: &str, lhs: f64, rhs: f64) -> Self {
        Check { name: name.to_string(), lhs, rhs, passed: lhs < rhs }
    }

    fn close(name: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        Check { name: name.to_string(), lhs, rhs, passed: (lhs - rhs).abs() <= tol }
    }
}

/// Fully checked parameter pack witnessing the optimality construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Requested jump floor.
    pub a: f64,
    /// Requested slack in (0, 1).
    pub epsilon: f64,
    pub variant: Variant,
    pub case: CaseKind,
    /// Surrogate jump scale for the reduced cases `a = 0` and `a = -1`.
    pub surrogate_a: Option<f64>,
    /// Slack actually used by the (possibly delegated) solve.
    pub solve_epsilon: f64,
    pub b: f64,
    /// Upper barrier height; present only for the negative-scale cases.
    pub c: Option<f64>,
    pub lambda: f64,
    pub checks: Vec<Check>,
}

impl Certificate {
    /// The jump scale the simulated construction actually uses.
    pub fn construction_a(&self) -> f64 {
        self.surrogate_a.unwrap_or(self.a)
    }

    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|ch| ch.passed)
    }

    /// Exponent placed on the passage time (alpha) or jump count (beta) in
    /// the integrability requirement, using the construction's own scale.
    pub fn witness_exponent(&self) -> Result<f64> {
        let a = self.construction_a();
        let coeff = match self.variant {
            Variant::Alpha => special::alpha(a)?,
            Variant::Beta => special::beta(a)?,
        };
        Ok(a * a * (1.0 - self.solve_epsilon) * coeff)
    }

    /// Largest exponent with a finite moment: `h(b)` for the passage time,
    /// `g(b)` for the jump count.
    pub fn witness_boundary(&self) -> Result<f64> {
        match self.variant {
            Variant::Alpha => special::h(self.b),
            Variant::Beta => special::g(self.b),
        }
    }
}

/// Tilt `lambda(b) = -ln((1+a) b/a)` for the lower-barrier case.
pub fn lambda_pos(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && b < a) {
        return Err(Error::Domain(format!("lambda_pos requires 0 < b < a, got a={a}, b={b}")));
    }
    Ok(-((1.0 + a) * b / a).ln())
}

/// Tilt `lambda(b, c) = (c+1)^{-1} ln((1+a)^{-c} b/a)` for the upper-barrier
/// case; nonnegative exactly when `b/a >= (1+a)^c`.
pub fn lambda_neg(a: f64, b: f64, c: f64) -> Result<f64> {
    if !(a > -1.0 && a < 0.0 && b > a && b < 0.0 && c > 0.0) {
        return Err(Error::Domain(format!(
            "lambda_neg requires -1 < a < b < 0 and c > 0, got a={a}, b={b}, c={c}"
        )));
    }
    Ok((-c * a.ln_1p() + (b / a).ln()) / (c + 1.0))
}

/// Slack of the drift requirement as a function of the barrier height:
/// `rho_b(c) = 1+a - (1+a)^{c/(c+1)} (a/b)^{1/(c+1)}
///             + (1+b)/(c+1) (ln(a/b) - ln(1+a))`.
/// Positivity of `rho_b(c)` is equivalent to the drift requirement holding.
pub fn rho(a: f64, b: f64, c: f64) -> Result<f64> {
    check_neg_params(a, b, c)?;
    let s = 1.0 / (c + 1.0);
    let log1a = a.ln_1p();
    let log_ab = (a / b).ln();
    Ok(1.0 + a - ((1.0 - s) * log1a + s * log_ab).exp() + (1.0 + b) * s * (log_ab - log1a))
}

/// Derivative of `rho` in `c`.
pub fn rho_prime(a: f64, b: f64, c: f64) -> Result<f64> {
    check_neg_params(a, b, c)?;
    let s = 1.0 / (c + 1.0);
    let log1a = a.ln_1p();
    let log_ab = (a / b).ln();
    let factor = 1.0 + b - ((1.0 - s) * log1a + s * log_ab).exp();
    Ok((log1a - log_ab) * s * s * factor)
}

fn check_neg_params(a: f64, b: f64, c: f64) -> Result<()> {
    if !(a > -1.0 && a < 0.0 && b > a && b < 0.0 && c > 0.0) {
        return Err(Error::Domain(format!(
            "requires -1 < a < b < 0 and c > 0, got a={a}, b={b}, c={c}"
        )));
    }
    Ok(())
}

const BISECTION_TOL: f64 = 1e-12;

/// Bracketed bisection: requires a sign change over `[lo, hi]` and refines
/// to absolute width `BISECTION_TOL`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::SearchFailed(format!(
            "no sign change on bracket [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || hi - lo < BISECTION_TOL {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn target_fn(variant: Variant, x: f64) -> f64 {
    let policy = EvalPolicy::default();
    match variant {
        Variant::Alpha => policy.h(x).unwrap_or(f64::NAN),
        Variant::Beta => policy.g(x).unwrap_or(f64::NAN),
    }
}

fn constant_fn(variant: Variant, a: f64) -> Result<f64> {
    match variant {
        Variant::Alpha => special::alpha(a),
        Variant::Beta => special::beta(a),
    }
}

fn validate_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Config(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

/// Lower-barrier certificate for `a > 0`: root-find the binding equality
/// `F(b0) = (1-eps) F(a)` on `(0, a)` with `F = h` (alpha) or `g` (beta),
/// take `b` midway between the root and `a`, then record all checks.
///
/// The tilt is `-ln(1+b)`, the argmin of `f_b`, where `-f_b` attains its
/// maximum `h(b)`. With it the drift requirement reduces to
/// `(1+b)ln((1+a)/(1+b)) <= a - b`, which holds for every `b < a` by
/// concavity of the logarithm, and the moment bound `exp(-lambda) = 1+b`
/// stays strictly below `1+a`. The shorter tilt `-ln((1+a)b/a)` from the
/// same optional-stopping bound only satisfies the drift requirement when
/// `a > 1`, so it is not used here.
pub fn solve_positive(a: f64, eps: f64, variant: Variant) -> Result<Certificate> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("positive case requires a > 0, got {a}")));
    }
    validate_eps(eps)?;
    let target = (1.0 - eps) * target_fn(variant, a);
    let b0 = bisect(|x| target_fn(variant, x) - target, 0.0, a)?;
    let b = 0.5 * (b0 + a);
    let (lambda, _) = special::argmin_f(b)?;
    let checks = positive_checks(a, eps, variant, b, lambda)?;
    Ok(Certificate {
        a,
        epsilon: eps,
        variant,
        case: CaseKind::Positive,
        surrogate_a: None,
        solve_epsilon: eps,
        b,
        c: None,
        lambda,
        checks,
    })
}

fn positive_checks(a: f64, eps: f64, variant: Variant, b: f64, lambda: f64) -> Result<Vec<Check>> {
    let drift = (1.0 + b) * a.ln_1p() - a;
    let a2 = a * a;
    Ok(vec![
        Check::le("drift_below_moment_bound", drift, -special::f(b, lambda)),
        Check::le(
            "exponent_domination",
            a2 * (1.0 - eps) * constant_fn(variant, a)?,
            target_fn(variant, b),
        ),
        Check::lt("expectation_strictly_inside", (-lambda).exp(), 1.0 + a),
    ])
}

/// Upper-barrier certificate for `-1 < a < 0`: pick `b` as in the positive
/// case (on `(a, 0)`, where the target function decreases), then double the
/// barrier height `c` until both `rho_b(c) > 0` and `lambda(b, c) >= 0`.
pub fn solve_negative(a: f64, eps: f64, variant: Variant) -> Result<Certificate> {
    if !(a > -1.0 && a < 0.0) {
        return Err(Error::Domain(format!("negative case requires -1 < a < 0, got {a}")));
    }
    validate_eps(eps)?;
    let target = (1.0 - eps) * target_fn(variant, a);
    let b0 = bisect(|x| target_fn(variant, x) - target, a, 0.0)?;
    let b = 0.5 * (b0 + a);
    let log_ratio = (1.0 + a).ln() - (a / b).ln();
    if !(log_ratio < 0.0) {
        return Err(Error::SearchFailed(format!(
            "log-ratio window not satisfied at b={b} for a={a}"
        )));
    }
    let mut c = 1.0;
    loop {
        let ok = rho(a, b, c)? > 0.0 && lambda_neg(a, b, c)? >= 0.0;
        if ok {
            break;
        }
        c *= 2.0;
        if c > 2f64.powi(60) {
            return Err(Error::SearchFailed(format!(
                "doubling search for c exceeded 2^60 at a={a}, b={b}"
            )));
        }
    }
    let lambda = lambda_neg(a, b, c)?;
    let checks = negative_checks(a, eps, variant, b, c, lambda)?;
    Ok(Certificate {
        a,
        epsilon: eps,
        variant,
        case: CaseKind::Negative,
        surrogate_a: None,
        solve_epsilon: eps,
        b,
        c: Some(c),
        lambda,
        checks,
    })
}

fn negative_checks(
    a: f64,
    eps: f64,
    variant: Variant,
    b: f64,
    c: f64,
    lambda: f64,
) -> Result<Vec<Check>> {
    let drift = (1.0 + b) * a.ln_1p() - a;
    let a2 = a * a;
    let mut checks = vec![
        Check::le("lambda_nonnegative", 0.0, lambda),
        Check::le("lambda_window", b, a * (1.0 + a).powf(c)),
        Check::lt("rho_positive", 0.0, rho(a, b, c)?),
        Check::lt("log_ratio_negative", a.ln_1p() - (a / b).ln(), 0.0),
        Check::le("drift_below_moment_bound", drift, -special::f(b, lambda)),
        Check::le(
            "exponent_domination",
            a2 * (1.0 - eps) * constant_fn(variant, a)?,
            target_fn(variant, b),
        ),
        Check::lt("expectation_strictly_inside", b / a, 1.0),
    ];
    if variant == Variant::Beta {
        // E-side finiteness premise: the jump count is controlled through
        // g(b) = h(b)/(1+b) and the sandwich N_T <= (1+b)T + c + 1.
        checks.push(Check::close(
            "qv_bound_identity",
            special::g(b)?,
            special::h(b)? / (1.0 + b),
            1e-12,
        ));
    }
    Ok(checks)
}

/// Reduced construction for the boundary scales `a = 0` and `a = -1`: find a
/// surrogate scale whose constant absorbs half the slack, then delegate.
pub fn surrogate(a: f64, eps: f64, variant: Variant) -> Result<Certificate> {
    validate_eps(eps)?;
    if a == 0.0 {
        let need = (1.0 - eps) * constant_fn(variant, 0.0)?;
        let mut a_s = 1.0;
        while need > (1.0 - eps / 2.0) * constant_fn(variant, a_s)? {
            a_s /= 2.0;
            if a_s < 1e-300 {
                return Err(Error::SearchFailed("surrogate halving underflowed".into()));
            }
        }
        let mut cert = solve_positive(a_s, eps / 2.0, variant)?;
        cert.checks.insert(
            0,
            Check::le(
                "surrogate_constant",
                need,
                (1.0 - eps / 2.0) * constant_fn(variant, a_s)?,
            ),
        );
        cert.a = 0.0;
        cert.epsilon = eps;
        cert.case = CaseKind::ZeroSurrogate;
        cert.surrogate_a = Some(a_s);
        return Ok(cert);
    }
    if a == -1.0 {
        if variant == Variant::Beta {
            return Err(Error::NoBetaAtMinusOne);
        }
        let need = (1.0 - eps) * special::alpha(-1.0)?;
        let mut gap = 0.5;
        while need > (1.0 - eps / 2.0) * special::alpha(-1.0 + gap)? {
            gap /= 2.0;
            if gap < 1e-300 {
                return Err(Error::SearchFailed("surrogate halving underflowed".into()));
            }
        }
        let a_s = -1.0 + gap;
        let mut cert = solve_negative(a_s, eps / 2.0, variant)?;
        cert.checks.insert(
            0,
            Check::le("surrogate_constant", need, (1.0 - eps / 2.0) * special::alpha(a_s)?),
        );
        cert.a = -1.0;
        cert.epsilon = eps;
        cert.case = CaseKind::MinusOneSurrogate;
        cert.surrogate_a = Some(a_s);
        return Ok(cert);
    }
    Err(Error::Domain(format!("surrogate construction applies only to a = 0 or a = -1, got {a}")))
}

/// Build a certificate for any admissible jump floor, dispatching on its
/// sign and the boundary cases.
pub fn solve(a: f64, eps: f64, variant: Variant) -> Result<Certificate> {
    if a == 0.0 || a == -1.0 {
        if a == -1.0 && variant == Variant::Beta {
            return Err(Error::NoBetaAtMinusOne);
        }
        surrogate(a, eps, variant)
    } else if a > 0.0 {
        solve_positive(a, eps, variant)
    } else if a > -1.0 {
        solve_negative(a, eps, variant)
    } else {
        Err(Error::Domain(format!("jump floor must satisfy a >= -1, got {a}")))
    }
}

/// Independent re-verification of a certificate: every inequality is
/// recomputed from the stored parameters alone, including consistency of the
/// stored tilt with its defining formula. Failures are data, not errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

pub fn verify_certificate(cert: &Certificate) -> VerifyReport {
    let mut checks = Vec::new();
    let a = cert.construction_a();
    let eps = cert.solve_epsilon;
    let b = cert.b;
    let policy = EvalPolicy::default();

    let push_err = |checks: &mut Vec<Check>, name: &str| {
        checks.push(Check { name: name.to_string(), lhs: f64::NAN, rhs: f64::NAN, passed: false });
    };

    // Range of b relative to the construction scale.
    match cert.case {
        CaseKind::Positive | CaseKind::ZeroSurrogate => {
            checks.push(Check::lt("b_range_low", 0.0, b));
            checks.push(Check::lt("b_range_high", b, a));
        }
        CaseKind::Negative | CaseKind::MinusOneSurrogate => {
            checks.push(Check::lt("b_range_low", a, b));
            checks.push(Check::lt("b_range_high", b, 0.0));
        }
    }

    // Stored tilt must match its defining formula.
    let lambda_expected = match cert.case {
        CaseKind::Positive | CaseKind::ZeroSurrogate => -b.ln_1p(),
        CaseKind::Negative | CaseKind::MinusOneSurrogate => match cert.c {
            Some(c) => (-c * a.ln_1p() + (b / a).ln()) / (c + 1.0),
            None => f64::NAN,
        },
    };
    checks.push(Check::close("lambda_consistent", cert.lambda, lambda_expected, 1e-9));

    // Drift requirement, written out directly.
    let drift = (1.0 + b) * a.ln_1p() - a;
    let neg_f = -((-cert.lambda).exp() + cert.lambda * (1.0 + b) - 1.0);
    checks.push(Check::le("drift_below_moment_bound", drift, neg_f));

    // Exponent domination against the variant's own target function.
    let (coeff, bound) = match cert.variant {
        Variant::Alpha => (policy.alpha(a), policy.h(b)),
        Variant::Beta => (policy.beta(a), policy.g(b)),
    };
    match (coeff, bound) {
        (Ok(coeff), Ok(bound)) => {
            checks.push(Check::le("exponent_domination", a * a * (1.0 - eps) * coeff, bound));
        }
        _ => push_err(&mut checks, "exponent_domination"),
    }

    match cert.case {
        CaseKind::Positive | CaseKind::ZeroSurrogate => {
            checks.push(Check::lt(
                "expectation_strictly_inside",
                (-cert.lambda).exp(),
                1.0 + a,
            ));
        }
        CaseKind::Negative | CaseKind::MinusOneSurrogate => {
            checks.push(Check::le("lambda_nonnegative", 0.0, cert.lambda));
            match cert.c {
                Some(c) => {
                    match rho(a, b, c) {
                        Ok(r) => checks.push(Check::lt("rho_positive", 0.0, r)),
                        Err(_) => push_err(&mut checks, "rho_positive"),
                    }
                    checks.push(Check::lt("expectation_strictly_inside", b / a, 1.0));
                }
                None => push_err(&mut checks, "barrier_height_present"),
            }
        }
    }

    // Surrogate reduction, when one was used.
    if let Some(a_s) = cert.surrogate_a {
        let orig = cert.a;
        match (constant_fn(cert.variant, orig), constant_fn(cert.variant, a_s)) {
            (Ok(k0), Ok(ks)) => checks.push(Check::le(
                "surrogate_constant",
                (1.0 - cert.epsilon) * k0,
                (1.0 - cert.epsilon / 2.0) * ks,
            )),
            _ => push_err(&mut checks, "surrogate_constant"),
        }
    }

    let all_passed = checks.iter().all(|ch| ch.passed);
    VerifyReport { checks, all_passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN_2: f64 = std::f64::consts::LN_2;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual} (tol {tol})"
        );
    }

    #[test]
    fn lambda_pos_values() {
        assert_close(lambda_pos(1.0, 0.5).unwrap(), 0.0, 1e-15);
        assert_close(lambda_pos(1.0, 0.25).unwrap(), LN_2, 1e-15);
        // b -> a gives -ln(1+a).
        assert_close(lambda_pos(1.0, 1.0 - 1e-12).unwrap(), -LN_2, 1e-9);
        assert!(lambda_pos(1.0, 1.5).is_err());
    }

    #[test]
    fn lambda_neg_values() {
        let (a, c) = (-0.5f64, 3.0);
        let b = a * (1.0 + a).powf(c);
        assert_close(lambda_neg(a, b, c).unwrap(), 0.0, 1e-12);
        assert_close(lambda_neg(-0.5, -0.4, 3.0).unwrap(), (6.4f64).ln() / 4.0, 1e-14);
        assert_close(lambda_neg(-0.5, -0.45, 1.0).unwrap(), (1.8f64).ln() / 2.0, 1e-14);
        assert!(lambda_neg(-0.5, -0.6, 1.0).is_err());
    }

    #[test]
    fn rho_limit_and_sign() {
        assert!(rho(-0.5, -0.49, 1e6).unwrap().abs() < 1e-4);
        assert!(rho(-0.5, -0.49, 100.0).unwrap() > 0.0);
    }

    #[test]
    fn rho_prime_is_derivative() {
        let step = 1e-5;
        for (a, b) in [(-0.5, -0.49), (-0.3, -0.25), (-0.8, -0.75)] {
            for c in [2.0, 10.0, 50.0, 200.0] {
                let fd = (rho(a, b, c + step).unwrap() - rho(a, b, c - step).unwrap())
                    / (2.0 * step);
                assert_close(rho_prime(a, b, c).unwrap(), fd, 1e-8);
            }
        }
        assert!(rho_prime(-0.5, -0.49, 100.0).unwrap() < 0.0);
    }

    #[test]
    fn rho_integral_consistency() {
        // Simpson quadrature of rho' over [c1, c2] reproduces the increment.
        let (a, b) = (-0.5, -0.49);
        let (c1, c2) = (5.0, 50.0);
        let n = 2000;
        let dc = (c2 - c1) / n as f64;
        let mut integral = 0.0;
        for i in 0..n {
            let lo = c1 + i as f64 * dc;
            integral += dc / 6.0
                * (rho_prime(a, b, lo).unwrap()
                    + 4.0 * rho_prime(a, b, lo + dc / 2.0).unwrap()
                    + rho_prime(a, b, lo + dc).unwrap());
        }
        let increment = rho(a, b, c2).unwrap() - rho(a, b, c1).unwrap();
        assert_close(increment, integral, 1e-8);
    }

    #[test]
    fn solve_positive_reference_case() {
        let cert = solve_positive(1.0, 0.2, Variant::Alpha).unwrap();
        // Independent oracle: 200-step bisection for h(b0) = 0.8 h(1).
        let target = 0.8 * (2.0 * LN_2 - 1.0);
        let hh = |x: f64| (1.0 + x) * (1.0 + x).ln() - x;
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hh(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let b0_oracle = 0.5 * (lo + hi);
        assert_close(b0_oracle, 0.88355, 1e-3);
        assert_close(2.0 * cert.b - 1.0, b0_oracle, 1e-10);
        assert!(cert.all_checks_passed());
        assert!(verify_certificate(&cert).all_passed);
    }

    #[test]
    fn solve_positive_extreme_eps() {
        for eps in [0.9, 0.99] {
            let cert = solve_positive(1.0, eps, Variant::Alpha).unwrap();
            assert!(cert.all_checks_passed(), "eps={eps}");
            assert!(verify_certificate(&cert).all_passed, "eps={eps}");
        }
    }

    #[test]
    fn drift_requirement_reduction_equivalence() {
        // With the tilt -ln((1+a)b/a), the drift requirement is equivalent
        // to the reduced form (1+b) ln(b/a) / (b/a - 1) <= 1+a; both routes
        // must agree in truth value on a grid. The reduced form is NOT
        // universally true: it fails throughout (0, a) when a <= 1 (e.g.
        // a = 1, b = 1/2 gives 1.5 ln(2)/0.5 ~ 2.079 > 2), which is exactly
        // why the solver uses the argmin tilt instead.
        for i in 1..20 {
            let a = 0.25 * i as f64;
            for j in 1..20 {
                let b = a * j as f64 / 20.0;
                let lambda = lambda_pos(a, b).unwrap();
                let drift = (1.0 + b) * a.ln_1p() - a;
                let direct = drift <= -special::f(b, lambda);
                let r = b / a;
                let reduced = (1.0 + b) * r.ln() / (r - 1.0) <= 1.0 + a;
                assert_eq!(direct, reduced, "a={a}, b={b}");
                // The argmin tilt always satisfies the drift requirement:
                // -f(b, -ln(1+b)) = h(b) and drift <= h(b) for all b < a.
                let (lambda_star, neg_f_max) = special::argmin_f(b).unwrap();
                assert_close(-special::f(b, lambda_star), neg_f_max, 1e-14);
                assert!(drift <= neg_f_max, "argmin drift bound failed at a={a}, b={b}");
            }
        }
        let reduced_at_half = 1.5 * 0.5f64.ln() / (0.5 - 1.0);
        assert!(reduced_at_half > 2.0);
    }

    #[test]
    fn solve_negative_reference_case() {
        let cert = solve_negative(-0.5, 0.2, Variant::Alpha).unwrap();
        assert!(cert.all_checks_passed());
        assert!(verify_certificate(&cert).all_passed);
        let b = cert.b;
        let c = cert.c.unwrap();
        // b lies between a and the binding root.
        let target = 0.8 * special::h(-0.5).unwrap();
        assert!(special::h(b).unwrap() > target);
        assert!(b > -0.5 && b < 0.0);
        // c is the minimal power of two satisfying the joint predicate.
        assert!(rho(-0.5, b, c).unwrap() > 0.0);
        assert!(lambda_neg(-0.5, b, c).unwrap() >= 0.0);
        if c > 1.0 {
            let prev = c / 2.0;
            let ok_prev = rho(-0.5, b, prev).unwrap() > 0.0
                && lambda_neg(-0.5, b, prev).unwrap() >= 0.0;
            assert!(!ok_prev, "c={c} not minimal");
        }
        // Lambda window is equivalent to b <= a (1+a)^c.
        assert!(b <= -0.5 * 0.5f64.powf(c));
        // Positivity persists along the doubling tail.
        for mult in [1.0, 2.0, 4.0] {
            assert!(rho(-0.5, b, c * mult).unwrap() > 0.0);
        }
    }

    #[test]
    fn surrogate_zero_case() {
        // eps = 0.5 needs alpha(a') >= 1/3, already true at the first probe.
        let cert = surrogate(0.0, 0.5, Variant::Alpha).unwrap();
        assert_eq!(cert.case, CaseKind::ZeroSurrogate);
        assert_eq!(cert.surrogate_a, Some(1.0));
        assert_eq!(cert.solve_epsilon, 0.25);
        assert!(cert.all_checks_passed());
        assert!(verify_certificate(&cert).all_passed);
    }

    #[test]
    fn surrogate_minus_one_case() {
        // eps = 0.5 needs alpha(a') >= 2/3.
        let cert = surrogate(-1.0, 0.5, Variant::Alpha).unwrap();
        assert_eq!(cert.case, CaseKind::MinusOneSurrogate);
        let a_s = cert.surrogate_a.unwrap();
        assert!(a_s > -1.0 && a_s < 0.0);
        assert!(special::alpha(a_s).unwrap() >= 2.0 / 3.0);
        assert!(cert.all_checks_passed());
        assert!(verify_certificate(&cert).all_passed);
    }

    #[test]
    fn beta_at_minus_one_rejected() {
        assert!(matches!(surrogate(-1.0, 0.5, Variant::Beta), Err(Error::NoBetaAtMinusOne)));
        assert!(matches!(solve(-1.0, 0.5, Variant::Beta), Err(Error::NoBetaAtMinusOne)));
    }

    #[test]
    fn solve_dispatch() {
        assert_eq!(solve(1.0, 0.2, Variant::Alpha).unwrap().case, CaseKind::Positive);
        assert_eq!(solve(-0.5, 0.2, Variant::Alpha).unwrap().case, CaseKind::Negative);
        assert_eq!(solve(0.0, 0.2, Variant::Beta).unwrap().case, CaseKind::ZeroSurrogate);
        assert_eq!(solve(-1.0, 0.2, Variant::Alpha).unwrap().case, CaseKind::MinusOneSurrogate);
        assert!(solve(-1.5, 0.2, Variant::Alpha).is_err());
    }

    #[test]
    fn beta_variant_certificates() {
        for a in [1.0, -0.5] {
            let cert = solve(a, 0.2, Variant::Beta).unwrap();
            assert!(cert.all_checks_passed(), "a={a}");
            assert!(verify_certificate(&cert).all_passed, "a={a}");
        }
    }

    #[test]
    fn tampered_certificate_fails_domination() {
        let mut cert = solve_positive(1.0, 0.2, Variant::Alpha).unwrap();
        cert.b = cert.a / 10.0;
        cert.epsilon = 0.01;
        cert.solve_epsilon = 0.01;
        cert.lambda = lambda_pos(cert.a, cert.b).unwrap();
        let report = verify_certificate(&cert);
        assert!(!report.all_passed);
        let dom = report.checks.iter().find(|ch| ch.name == "exponent_domination").unwrap();
        assert!(!dom.passed);
    }

    #[test]
    fn tampered_lambda_fails_window() {
        let mut cert = solve_negative(-0.5, 0.2, Variant::Alpha).unwrap();
        cert.lambda = -0.1;
        let report = verify_certificate(&cert);
        assert!(!report.all_passed);
        let win = report.checks.iter().find(|ch| ch.name == "lambda_nonnegative").unwrap();
        assert!(!win.passed);
    }

    #[test]
    fn solver_soundness_sweep() {
        for &a in &[0.1, 0.5, 2.0, 5.0, -0.1, -0.5, -0.9, 0.0, -1.0] {
            for &eps in &[0.1, 0.5] {
                let cert = solve(a, eps, Variant::Alpha).unwrap();
                assert!(cert.all_checks_passed(), "a={a}, eps={eps}");
                assert!(verify_certificate(&cert).all_passed, "a={a}, eps={eps}");
            }
        }
    }
}
