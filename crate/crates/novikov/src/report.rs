//! Machine-readable run reports: constants tables, counterexample campaigns
//! and martingale checks, serialized as JSON or flat CSV.
//!
//! A report echoes its full configuration, so re-executing with the echoed
//! config reproduces every numeric field bit for bit. Wall-clock time is the
//! single non-reproducible field and is excluded from the canonical form
//! used for reproducibility comparisons. Floats are serialized in shortest
//! round-trip form, which preserves their exact bit patterns.

use crate::certificate::{self, CaseKind, Certificate, Variant, VerifyReport};
use crate::exponential::{CompensatedPoissonSpec, Stopping};
use crate::monte_carlo::{
    self, LbTestPoint, McEstimate, McRunConfig, TailDiagnostic, Verdict,
};
use crate::poisson::{generate_path, hit_lower, hit_upper, SeedSpec};
use crate::special::{self, EvalPolicy};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Constants,
    Counterexample,
    NovikovDemo,
    LbMartingale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

/// Full configuration of one run; embedding it in the report makes the run
/// reproducible from the report alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub a: f64,
    pub eps: f64,
    pub variant: Variant,
    pub n_paths: u64,
    pub master_seed: u64,
    pub max_jumps: u64,
    pub ci_level: f64,
    #[serde(default)]
    pub t0: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub output_path: Option<String>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        RunConfig {
            command,
            a: 1.0,
            eps: 0.2,
            variant: Variant::Alpha,
            n_paths: 1_000_000,
            master_seed: 42,
            max_jumps: 10_000_000,
            ci_level: 0.99,
            t0: None,
            b: None,
            lambda: None,
            times: None,
            output_path: None,
            format: Format::Json,
        }
    }

    pub fn mc(&self) -> McRunConfig {
        McRunConfig {
            n_paths: self.n_paths,
            master_seed: self.master_seed,
            max_jumps: self.max_jumps,
            ci_level: self.ci_level,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminalMassSection {
    pub estimate: McEstimate,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentBoundSection {
    pub estimate: McEstimate,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilitySection {
    pub estimate: McEstimate,
    pub diagnostic: TailDiagnostic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NovikovSection {
    pub estimate: McEstimate,
    /// Exact analytic terminal mass for a nonnegative-jump fixed horizon.
    pub analytic_value: f64,
    pub pass: bool,
    /// Companion command demonstrating that allowing slightly negative jumps
    /// breaks the one-half criterion.
    pub companion_command: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub case_label: Option<String>,
    pub certificate: Option<Certificate>,
    pub verification: Option<VerifyReport>,
    pub terminal_mass: Option<TerminalMassSection>,
    pub moment_bound: Option<MomentBoundSection>,
    pub integrability: Option<IntegrabilitySection>,
    pub lb_points: Option<Vec<LbTestPoint>>,
    pub novikov: Option<NovikovSection>,
    pub final_verdict: String,
    pub version: String,
    pub wall_clock_ms: u64,
}

impl Report {
    fn new(config: RunConfig) -> Self {
        Report {
            config,
            case_label: None,
            certificate: None,
            verification: None,
            terminal_mass: None,
            moment_bound: None,
            integrability: None,
            lb_points: None,
            novikov: None,
            final_verdict: String::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_ms: 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON form with the wall-clock field removed: every remaining field is
    /// a pure function of the configuration and must be bit-identical across
    /// reruns and worker counts.
    pub fn canonical_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("wall_clock_ms");
        }
        serde_json::to_string_pretty(&value).expect("value serializes")
    }

    /// Flat key,value CSV with dotted paths, `.` decimal separator.
    pub fn to_csv(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut rows = vec![("key".to_string(), "value".to_string())];
        flatten_value("", &value, &mut rows);
        rows.into_iter().map(|(k, v)| format!("{k},{v}\n")).collect()
    }

    /// 0 = all verdicts as expected, 2 = analytic check failure,
    /// 3 = inconsistent Monte Carlo verdict.
    pub fn exit_code(&self) -> i32 {
        if let Some(tm) = &self.terminal_mass {
            if tm.verdict == Verdict::Inconsistent {
                return 3;
            }
        }
        match (&self.certificate, &self.verification) {
            (Some(cert), Some(verify)) if !cert.all_checks_passed() || !verify.all_passed => 2,
            _ => 0,
        }
    }
}

fn flatten_value(prefix: &str, value: &serde_json::Value, rows: &mut Vec<(String, String)>) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_value(&key, v, rows);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_value(&format!("{prefix}.{i}"), v, rows);
            }
        }
        other => {
            let rendered = match other {
                serde_json::Value::String(s) => s.replace(',', ";"),
                v => v.to_string(),
            };
            rows.push((prefix.to_string(), rendered));
        }
    }
}

/// One row of the constants table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRow {
    pub a: f64,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub alpha_prime: Option<f64>,
    pub h: f64,
    pub g: Option<f64>,
    /// Strict decrease versus the previous row; absent on the first row.
    pub alpha_monotone_ok: Option<bool>,
    pub beta_monotone_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub rows: Vec<ConstantsRow>,
}

impl ConstantsTable {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("a,alpha,beta,alpha_prime,h,g,alpha_monotone_ok,beta_monotone_ok\n");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let optb = |v: Option<bool>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.a,
                r.alpha,
                opt(r.beta),
                opt(r.alpha_prime),
                r.h,
                opt(r.g),
                optb(r.alpha_monotone_ok),
                optb(r.beta_monotone_ok),
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

/// Tabulate `(a, alpha, beta, alpha', h, g)` on an even grid, with strict
/// monotonicity flags between consecutive rows. `beta`, `g` and `alpha'` are
/// omitted at `a = -1` where they have no value.
pub fn constants_table(a_lo: f64, a_hi: f64, points: usize) -> Result<ConstantsTable> {
    if !(a_lo >= -1.0) {
        return Err(Error::Domain(format!("range must start at or above -1, got {a_lo}")));
    }
    if !(a_hi > a_lo) || points < 2 {
        return Err(Error::Config("need a_hi > a_lo and at least 2 points".into()));
    }
    let policy = EvalPolicy::default();
    let mut rows: Vec<ConstantsRow> = Vec::with_capacity(points);
    for i in 0..points {
        let a = a_lo + (a_hi - a_lo) * i as f64 / (points - 1) as f64;
        let alpha = policy.alpha(a)?;
        let beta = if a > -1.0 { Some(policy.beta(a)?) } else { None };
        let alpha_prime = if a > -1.0 { Some(policy.alpha_prime(a)?) } else { None };
        let g = if a > -1.0 { Some(policy.g(a)?) } else { None };
        let prev = rows.last();
        let alpha_monotone_ok = prev.map(|p| alpha < p.alpha);
        let beta_monotone_ok = match (prev.and_then(|p| p.beta), beta) {
            (Some(pb), Some(cb)) => Some(cb < pb),
            _ => None,
        };
        rows.push(ConstantsRow {
            a,
            alpha,
            beta,
            alpha_prime,
            h: policy.h(a)?,
            g,
            alpha_monotone_ok,
            beta_monotone_ok,
        });
    }
    Ok(ConstantsTable { rows })
}

fn case_label(cert: &Certificate) -> String {
    let variant = match cert.variant {
        Variant::Alpha => "predictable-variation constant",
        Variant::Beta => "quadratic-variation constant",
    };
    let case = match cert.case {
        CaseKind::Positive => "positive jump scale, lower-barrier stop".to_string(),
        CaseKind::Negative => "negative jump scale, upper-barrier stop".to_string(),
        CaseKind::ZeroSurrogate => format!(
            "zero jump floor via positive surrogate scale {}",
            cert.construction_a()
        ),
        CaseKind::MinusOneSurrogate => format!(
            "jump floor -1 via negative surrogate scale {}",
            cert.construction_a()
        ),
    };
    format!("{variant}; {case}")
}

/// Build the certificate for the configured jump floor, run the terminal
/// mass, moment bound and integrability campaigns, and assemble the verdict.
pub fn run_counterexample(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let cert = certificate::solve(config.a, config.eps, config.variant)?;
    let verification = certificate::verify_certificate(&cert);
    let mut report = Report::new(config.clone());
    report.case_label = Some(case_label(&cert));

    if !cert.all_checks_passed() || !verification.all_passed {
        report.final_verdict = "ANALYTIC-CHECKS-FAILED".to_string();
        report.certificate = Some(cert);
        report.verification = Some(verification);
        report.wall_clock_ms = start.elapsed().as_millis() as u64;
        return Ok(report);
    }

    let mc = config.mc();
    let (tm_est, verdict) = monte_carlo::terminal_mass_test(&cert, &mc)?;
    let (mb_est, bound, mb_pass) = monte_carlo::moment_bound_test(&cert, &mc)?;
    let (iw_est, diagnostic) = monte_carlo::integrability_witness(&cert, &mc)?;

    let witnessed = verdict == Verdict::Deficient && mb_pass && diagnostic.margin > 0.0;
    report.final_verdict = match verdict {
        Verdict::Inconsistent => "INCONSISTENT".to_string(),
        _ if witnessed => "OPTIMALITY-WITNESSED".to_string(),
        _ => "NOT-WITNESSED".to_string(),
    };
    report.certificate = Some(cert);
    report.verification = Some(verification);
    report.terminal_mass = Some(TerminalMassSection { estimate: tm_est, verdict });
    report.moment_bound = Some(MomentBoundSection { estimate: mb_est, bound, pass: mb_pass });
    report.integrability = Some(IntegrabilitySection { estimate: iw_est, diagnostic });
    report.wall_clock_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// Fixed-horizon demonstration run: exact terminal mass 1, simulated
/// confidence interval must contain it.
pub fn run_novikov_demo(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let t0 = config.t0.ok_or_else(|| Error::Config("demo requires a horizon t0".into()))?;
    let (estimate, pass) = monte_carlo::novikov_demo(config.a, t0, &config.mc())?;
    let mut report = Report::new(config.clone());
    report.case_label = Some("nonnegative jumps, fixed horizon".to_string());
    report.novikov = Some(NovikovSection {
        estimate,
        analytic_value: 1.0,
        pass,
        companion_command: format!(
            "counterexample --a -0.1 --eps {} --variant alpha",
            config.eps
        ),
    });
    report.final_verdict = if pass { "PASS".to_string() } else { "FAIL".to_string() };
    report.wall_clock_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// Constant-mean martingale test run for the tilted family.
pub fn run_lb_martingale(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let b = config.b.ok_or_else(|| Error::Config("martingale test requires b".into()))?;
    let lambda =
        config.lambda.ok_or_else(|| Error::Config("martingale test requires lambda".into()))?;
    let times = config
        .times
        .clone()
        .ok_or_else(|| Error::Config("martingale test requires times".into()))?;
    if times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::Config("times must be positive and finite".into()));
    }
    let points = monte_carlo::lb_martingale_test(b, lambda, &times, &config.mc());
    let all_pass = points.iter().all(|p| p.pass);
    let mut report = Report::new(config.clone());
    report.case_label = Some("tilted compensated-Poisson martingale mean".to_string());
    report.lb_points = Some(points);
    report.final_verdict = if all_pass { "PASS".to_string() } else { "FAIL".to_string() };
    report.wall_clock_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// Audit dump of the jump times each path consumed, as CSV rows
/// `path_index,n,U_n`. Paths are truncated at the construction's stopping
/// scan (or the fixed horizon), matching what the estimators consumed.
pub fn dump_paths_csv(config: &RunConfig, n_dump: u64) -> Result<String> {
    let mut out = String::from("path_index,n,U_n\n");
    let count = n_dump.min(config.n_paths);
    let spec = dump_spec(config)?;
    for path_index in 0..count {
        let seed = SeedSpec { master_seed: config.master_seed, path_index };
        let mut path = generate_path(seed);
        let n_jumps = match spec.stopping {
            Stopping::Lower { b } => hit_lower(b, &mut path, config.max_jumps).jumps_scanned,
            Stopping::Upper { b, c } => hit_upper(b, c, &mut path, config.max_jumps).jumps_scanned,
            Stopping::FixedHorizon { t0 } => path.count_by(t0) + 1,
            Stopping::None => 0,
        };
        for n in 1..=n_jumps {
            out.push_str(&format!("{path_index},{n},{}\n", path.jump_time(n)));
        }
    }
    Ok(out)
}

fn dump_spec(config: &RunConfig) -> Result<CompensatedPoissonSpec> {
    match config.command {
        CommandKind::Counterexample => {
            let cert = certificate::solve(config.a, config.eps, config.variant)?;
            monte_carlo::certificate_spec(&cert)
        }
        CommandKind::NovikovDemo => CompensatedPoissonSpec::pure(
            config.a.max(0.0),
            Stopping::FixedHorizon { t0: config.t0.unwrap_or(1.0) },
        ),
        CommandKind::LbMartingale => {
            let horizon = config
                .times
                .as_ref()
                .and_then(|ts| ts.iter().cloned().reduce(f64::max))
                .unwrap_or(1.0);
            CompensatedPoissonSpec::pure(0.0, Stopping::FixedHorizon { t0: horizon })
        }
        CommandKind::Constants => Err(Error::Config("constants runs consume no paths".into())),
    }
}

/// Companion check used by demo reports: the half-constant criterion really
/// does fail once the jump floor dips below zero (alpha exceeds one half
/// there, by strict decrease).
pub fn companion_floor_breaks_half_criterion(a: f64) -> Result<bool> {
    if !(a < 0.0 && a > -1.0) {
        return Err(Error::Domain(format!("companion floor must lie in (-1, 0), got {a}")));
    }
    Ok(special::alpha(a)? > 0.5)
}
