//! Reproducible parallel Monte Carlo estimation of the expectations behind
//! the martingale and counterexample constructions.
//!
//! Estimates are pure functions of `(construction, n_paths, master_seed)`.
//! Per-path values are accumulated in a fixed pairwise reduction tree over
//! the path-index range, so sums are bit-identical for any worker count and
//! scheduling. Censored paths (barrier not reached within the jump budget)
//! are dropped, counted and disclosed.

use crate::certificate::{CaseKind, Certificate, Variant};
use crate::exponential::{
    self, lb_value, stochastic_exponential_at, CompensatedPoissonSpec, Stopping,
};
use crate::poisson::{generate_path, hit_lower, hit_upper, SeedSpec};
use crate::special;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Sample statistics of a path functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_effective: u64,
    pub n_censored: u64,
    pub ci_level: f64,
    pub ci: (f64, f64),
}

impl McEstimate {
    /// Censoring beyond 0.1% of paths makes the estimate untrusted.
    pub fn trusted(&self) -> bool {
        let total = self.n_effective + self.n_censored;
        total > 0 && (self.n_censored as f64) <= 0.001 * total as f64
    }
}

/// Tail-risk disclosure for exponential-moment estimates near the finiteness
/// boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDiagnostic {
    pub exponent_used: f64,
    pub exponent_boundary: f64,
    /// `1 - exponent_used/exponent_boundary`; must be positive for a trusted
    /// finite-moment estimate.
    pub margin: f64,
    /// Share of the total sample mass carried by the largest decile.
    pub top_decile_mass_share: f64,
}

/// Run parameters shared by all estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McRunConfig {
    pub n_paths: u64,
    pub master_seed: u64,
    pub max_jumps: u64,
    pub ci_level: f64,
}

impl Default for McRunConfig {
    fn default() -> Self {
        McRunConfig { n_paths: 1_000_000, master_seed: 42, max_jumps: 10_000_000, ci_level: 0.99 }
    }
}

/// Monte Carlo verdict on the terminal mass `E E(M)_inf` against 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Confidence interval entirely below 1: uniform integrability fails.
    Deficient,
    /// Confidence interval contains 1.
    Saturated,
    /// Confidence interval entirely above 1: impossible for a nonnegative
    /// supermartingale started at 1, flags a bug.
    Inconsistent,
}

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    sum: f64,
    sum_sq: f64,
    n_effective: u64,
    n_censored: u64,
}

impl Acc {
    fn push(&mut self, value: Option<f64>) {
        match value {
            Some(v) => {
                self.sum += v;
                self.sum_sq += v * v;
                self.n_effective += 1;
            }
            None => self.n_censored += 1,
        }
    }

    fn combine(left: Acc, right: Acc) -> Acc {
        Acc {
            sum: left.sum + right.sum,
            sum_sq: left.sum_sq + right.sum_sq,
            n_effective: left.n_effective + right.n_effective,
            n_censored: left.n_censored + right.n_censored,
        }
    }
}

const LEAF_PATHS: u64 = 4096;

fn reduce_tree<F>(lo: u64, hi: u64, functional: &F) -> Acc
where
    F: Fn(u64) -> Option<f64> + Sync,
{
    if hi - lo <= LEAF_PATHS {
        let mut acc = Acc::default();
        for i in lo..hi {
            acc.push(functional(i));
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    let (left, right) = rayon::join(
        || reduce_tree(lo, mid, functional),
        || reduce_tree(mid, hi, functional),
    );
    Acc::combine(left, right)
}

/// Two-sided normal quantile (Acklam's rational approximation, abs error
/// below 1.2e-9; deterministic across platforms).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile requires p in (0,1), got {p}");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -normal_quantile(1.0 - p)
    }
}

fn estimate_from_acc(acc: Acc, ci_level: f64) -> McEstimate {
    let n = acc.n_effective as f64;
    let mean = acc.sum / n;
    let variance = if acc.n_effective > 1 {
        ((acc.sum_sq - acc.sum * acc.sum / n) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let std_error = (variance / n).sqrt();
    let z = normal_quantile(0.5 + ci_level / 2.0);
    McEstimate {
        mean,
        std_error,
        n_effective: acc.n_effective,
        n_censored: acc.n_censored,
        ci_level,
        ci: (mean - z * std_error, mean + z * std_error),
    }
}

/// Mean of a path functional over `n_paths` substreams of `master_seed`.
/// `None` marks a censored path, which is dropped and counted.
pub fn estimate<F>(functional: F, n_paths: u64, master_seed: u64, ci_level: f64) -> McEstimate
where
    F: Fn(SeedSpec) -> Option<f64> + Sync,
{
    let by_index = |i: u64| functional(SeedSpec { master_seed, path_index: i });
    let acc = reduce_tree(0, n_paths, &by_index);
    estimate_from_acc(acc, ci_level)
}

/// Terminal stochastic-exponential value for one simulated path of the
/// given construction, or `None` if the barrier is censored.
pub fn simulate_terminal(
    spec: &CompensatedPoissonSpec,
    seed: SeedSpec,
    max_jumps: u64,
) -> Option<f64> {
    let mut path = generate_path(seed);
    match spec.stopping {
        Stopping::Lower { b } => {
            let rec = hit_lower(b, &mut path, max_jumps);
            if !rec.hit {
                return None;
            }
            Some(exponential::terminal_exponential_lower(spec.jump_scale, b, &rec).expect("hit"))
        }
        Stopping::Upper { b, c } => {
            let rec = hit_upper(b, c, &mut path, max_jumps);
            if !rec.hit {
                return None;
            }
            Some(exponential::terminal_exponential_upper(spec.jump_scale, &rec).expect("hit"))
        }
        Stopping::FixedHorizon { t0 } => {
            let n = path.count_by(t0);
            Some(stochastic_exponential_at(spec, n, t0))
        }
        Stopping::None => None,
    }
}

/// Construction simulated by a certificate.
pub fn certificate_spec(cert: &Certificate) -> Result<CompensatedPoissonSpec> {
    let a = cert.construction_a();
    let stopping = match cert.case {
        CaseKind::Positive | CaseKind::ZeroSurrogate => Stopping::Lower { b: cert.b },
        CaseKind::Negative | CaseKind::MinusOneSurrogate => Stopping::Upper {
            b: cert.b,
            c: cert.c.ok_or_else(|| Error::Config("negative-case certificate lacks c".into()))?,
        },
    };
    CompensatedPoissonSpec::pure(a, stopping)
}

fn require_verified(cert: &Certificate) -> Result<()> {
    if !crate::certificate::verify_certificate(cert).all_passed {
        return Err(Error::Config("certificate fails analytic verification".into()));
    }
    Ok(())
}

fn require_trusted(est: &McEstimate) -> Result<()> {
    if !est.trusted() {
        return Err(Error::Untrusted {
            n_censored: est.n_censored,
            n_paths: est.n_effective + est.n_censored,
        });
    }
    Ok(())
}

fn verdict_against_one(est: &McEstimate) -> Verdict {
    if est.ci.1 < 1.0 {
        Verdict::Deficient
    } else if est.ci.0 > 1.0 {
        Verdict::Inconsistent
    } else {
        Verdict::Saturated
    }
}

/// Estimate the terminal mass `E E(M)_inf` of a certificate's construction
/// and classify it against 1.
pub fn terminal_mass_test(cert: &Certificate, cfg: &McRunConfig) -> Result<(McEstimate, Verdict)> {
    require_verified(cert)?;
    let spec = certificate_spec(cert)?;
    let est = terminal_mass_for_spec(&spec, cfg)?;
    let verdict = verdict_against_one(&est);
    Ok((est, verdict))
}

/// Terminal-mass estimate for an arbitrary construction (used directly for
/// fixed-horizon specifications, where the exact mass is 1).
pub fn terminal_mass_for_spec(
    spec: &CompensatedPoissonSpec,
    cfg: &McRunConfig,
) -> Result<McEstimate> {
    let est = estimate(
        |seed| simulate_terminal(spec, seed, cfg.max_jumps),
        cfg.n_paths,
        cfg.master_seed,
        cfg.ci_level,
    );
    require_trusted(&est)?;
    Ok(est)
}

/// Check the proven moment bound `E exp(-T f_b(lambda)) <= bound` by
/// simulation: the estimate passes when its lower confidence limit does not
/// contradict the bound.
pub fn moment_bound_test(
    cert: &Certificate,
    cfg: &McRunConfig,
) -> Result<(McEstimate, f64, bool)> {
    require_verified(cert)?;
    let b = cert.b;
    let lambda = cert.lambda;
    let (bound, est) = match cert.case {
        CaseKind::Positive | CaseKind::ZeroSurrogate => {
            // Optional stopping at the lower barrier: bound exp(-lambda).
            let bound = (-lambda).exp();
            let est = estimate(
                |seed| {
                    let rec = hit_lower(b, &mut generate_path(seed), cfg.max_jumps);
                    rec.hit.then(|| (-rec.passage_time * special::f(b, lambda)).exp())
                },
                cfg.n_paths,
                cfg.master_seed,
                cfg.ci_level,
            );
            (bound, est)
        }
        CaseKind::Negative | CaseKind::MinusOneSurrogate => {
            let c = cert.c.ok_or_else(|| Error::Config("missing barrier height".into()))?;
            // Optional stopping at the upper barrier: bound exp((c+1) lambda),
            // which for the stored tilt equals (1+a)^{-c} b/a.
            let bound = ((c + 1.0) * lambda).exp();
            let est = estimate(
                |seed| {
                    let rec = hit_upper(b, c, &mut generate_path(seed), cfg.max_jumps);
                    rec.hit.then(|| (-rec.passage_time * special::f(b, lambda)).exp())
                },
                cfg.n_paths,
                cfg.master_seed,
                cfg.ci_level,
            );
            (bound, est)
        }
    };
    require_trusted(&est)?;
    let pass = est.ci.0 <= bound;
    Ok((est, bound, pass))
}

/// Witness the integrability requirement by estimating `E exp(theta T)`
/// (alpha kind) or `E exp(theta N_T)` (beta kind) with the certificate's own
/// exponent. A finite sample mean witnesses, but does not prove, finiteness.
pub fn integrability_witness(
    cert: &Certificate,
    cfg: &McRunConfig,
) -> Result<(McEstimate, TailDiagnostic)> {
    require_verified(cert)?;
    integrability_witness_with_exponent(cert, cert.witness_exponent()?, cfg)
}

/// Same as [`integrability_witness`] with an explicit exponent; refuses to
/// report a mean when the exponent is not strictly inside the finite region.
pub fn integrability_witness_with_exponent(
    cert: &Certificate,
    theta: f64,
    cfg: &McRunConfig,
) -> Result<(McEstimate, TailDiagnostic)> {
    let boundary = cert.witness_boundary()?;
    let margin = 1.0 - theta / boundary;
    if !(margin > 0.0) {
        return Err(Error::HeavyTail { margin });
    }
    let b = cert.b;
    let c = cert.c;
    let use_jump_count = cert.variant == Variant::Beta;
    let functional = |seed: SeedSpec| -> Option<f64> {
        let mut path = generate_path(seed);
        let rec = match cert.case {
            CaseKind::Positive | CaseKind::ZeroSurrogate => {
                hit_lower(b, &mut path, cfg.max_jumps)
            }
            CaseKind::Negative | CaseKind::MinusOneSurrogate => {
                hit_upper(b, c.unwrap_or(1.0), &mut path, cfg.max_jumps)
            }
        };
        if !rec.hit {
            return None;
        }
        let x = if use_jump_count { rec.jumps_at_passage as f64 } else { rec.passage_time };
        Some((theta * x).exp())
    };

    // Per-path values are kept to diagnose how much mass the top decile
    // carries; indexing by path keeps the collection deterministic.
    use rayon::prelude::*;
    let values: Vec<Option<f64>> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| functional(SeedSpec { master_seed: cfg.master_seed, path_index: i }))
        .collect();
    let acc = reduce_tree(0, cfg.n_paths, &|i| values[i as usize]);
    let est = estimate_from_acc(acc, cfg.ci_level);
    require_trusted(&est)?;

    let mut kept: Vec<f64> = values.into_iter().flatten().collect();
    kept.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let top = kept.len().div_ceil(10);
    let top_mass: f64 = kept[..top].iter().sum();
    let total_mass: f64 = kept.iter().sum();
    let diagnostic = TailDiagnostic {
        exponent_used: theta,
        exponent_boundary: boundary,
        margin,
        top_decile_mass_share: top_mass / total_mass,
    };
    Ok((est, diagnostic))
}

/// One row of the constant-mean martingale test for `L^b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LbTestPoint {
    pub t: f64,
    pub estimate: McEstimate,
    /// Confidence interval contains the martingale mean 1.
    pub pass: bool,
    /// `ln E (L^b_t)^2 = t (e^-lambda - 1)^2`; large values warn that the
    /// sample mean is variance-dominated (report only).
    pub variance_exponent: f64,
}

/// Estimate `E L^b_t` at each requested time; a martingale started at 1 must
/// keep every confidence interval around 1.
pub fn lb_martingale_test(
    b: f64,
    lambda: f64,
    times: &[f64],
    cfg: &McRunConfig,
) -> Vec<LbTestPoint> {
    times
        .iter()
        .map(|&t| {
            let est = estimate(
                |seed| {
                    let n = generate_path(seed).count_by(t);
                    Some(lb_value(b, lambda, n, t))
                },
                cfg.n_paths,
                cfg.master_seed,
                cfg.ci_level,
            );
            LbTestPoint {
                t,
                estimate: est,
                pass: est.ci.0 <= 1.0 && 1.0 <= est.ci.1,
                variance_exponent: t * ((-lambda).exp() - 1.0).powi(2),
            }
        })
        .collect()
}

/// Fixed-horizon demonstration that nonnegative jumps keep the exponential a
/// true martingale: `E E(M)_t0` has exact value 1, and the simulated
/// confidence interval must contain it.
pub fn novikov_demo(
    a: f64,
    t0: f64,
    cfg: &McRunConfig,
) -> Result<(McEstimate, bool)> {
    if !(a >= 0.0) {
        return Err(Error::Domain(format!("demonstration requires a >= 0, got {a}")));
    }
    if !(t0 > 0.0) {
        return Err(Error::Domain(format!("horizon must be positive, got {t0}")));
    }
    let spec = CompensatedPoissonSpec::pure(a, Stopping::FixedHorizon { t0 })?;
    let est = terminal_mass_for_spec(&spec, cfg)?;
    let pass = est.ci.0 <= 1.0 && 1.0 <= est.ci.1;
    Ok((est, pass))
}
