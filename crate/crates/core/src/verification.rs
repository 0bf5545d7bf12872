//! Proper-time scans and the inequality checker.
//!
//! A scan evaluates every measure on a uniform grid `τ_min..=τ_max`. Grid
//! points are independent, so the scan may run in parallel; records always
//! come back in grid order and are bitwise identical to a serial run.
//!
//! [`run_all`] turns two scans (matrix route and closed forms) plus a set of
//! channel samples into a [`VerificationReport`]. Every check reports its
//! worst margin on the grid, positive meaning "satisfied with room to spare".

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::channel::{choi_matrix, kraus_operators};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, isometry_defect};
use crate::measures::{strangeness_visibility, visibility_closed, EntropyBase, EvalPath, MeasureBundle};
use crate::model::{evolution_isometry, ModelParams, TAU_ZERO};

pub const DEFAULT_STEPS: usize = 1000;
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Slack below which an inequality that holds analytically counts as broken.
pub const SLACK_FLOOR: f64 = 1e-12;
/// Threshold for the strict part of a monotonicity check.
pub const MONOTONE_TOL: f64 = 1e-14;
/// Matrix route vs closed form, absolute.
pub const AGREEMENT_TOL: f64 = 1e-10;
/// Closed-form derivative ratio vs central differences, relative.
pub const FD_REL_TOL: f64 = 1e-5;
/// Finite differences are compared from this proper time on.
pub const FD_TAU_START: f64 = 0.01;
pub const KRAUS_TOL: f64 = 1e-12;
pub const CHOI_TOL: f64 = 1e-10;
pub const ISOMETRY_TOL: f64 = 1e-12;
/// Number of proper times at which the channel is certified.
pub const CHANNEL_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub params: ModelParams,
    pub tau_min: f64,
    pub tau_max: f64,
    pub steps: usize,
    pub fd_step: f64,
    pub entropy_base: EntropyBase,
    pub path: EvalPath,
    pub parallel: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self::new(ModelParams::default())
    }
}

impl ScanConfig {
    /// Scan over `[0, params.tau_max]` with default resolution.
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            tau_min: 0.0,
            tau_max: params.tau_max,
            steps: DEFAULT_STEPS,
            fd_step: DEFAULT_FD_STEP,
            entropy_base: EntropyBase::Natural,
            path: EvalPath::Matrix,
            parallel: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.tau_min.is_finite() && self.tau_min >= 0.0) {
            return Err(Error::InvalidScan(format!("tau_min must be finite and >= 0, got {}", self.tau_min)));
        }
        if !(self.tau_max.is_finite() && self.tau_max > self.tau_min) {
            return Err(Error::InvalidScan(format!(
                "tau_max = {} must exceed tau_min = {}",
                self.tau_max, self.tau_min
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidScan(format!("steps must be >= 2, got {}", self.steps)));
        }
        if !(self.fd_step.is_finite() && self.fd_step > 0.0) {
            return Err(Error::InvalidScan(format!("fd_step must be positive, got {}", self.fd_step)));
        }
        Ok(())
    }

    /// Uniform grid with both endpoints exact.
    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.tau_min, self.tau_max, self.steps)
    }
}

fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * (i as f64) / last
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRecord {
    pub bundle: MeasureBundle,
    /// `1 - (V² + D² + S²)`.
    pub slack_triality: f64,
    /// `√(1 - D²) - V`.
    pub slack_fvg: f64,
    /// `(dV₀/dτ) / (dV/dτ)` from the closed form.
    pub ratio_appendix: f64,
}

impl ScanRecord {
    pub fn tau(&self) -> f64 {
        self.bundle.tau
    }
}

fn map_grid<T, F>(taus: &[f64], parallel: bool, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync + Send,
{
    if parallel {
        taus.par_iter().map(|&t| f(t)).collect()
    } else {
        taus.iter().map(|&t| f(t)).collect()
    }
}

pub fn scan(cfg: &ScanConfig) -> Result<Vec<ScanRecord>> {
    cfg.validate()?;
    let p = cfg.params;
    map_grid(&cfg.grid(), cfg.parallel, |tau| {
        let bundle = MeasureBundle::evaluate(&p, tau, cfg.path, cfg.entropy_base)?;
        Ok(ScanRecord {
            bundle,
            slack_triality: bundle.triality_slack(),
            slack_fvg: bundle.fvg_slack(),
            ratio_appendix: ratio_formula(&p, tau),
        })
    })
}

/// `(Γ_S e^{-Γ_S τ} + Γ_L e^{-Γ_L τ}) / (Γ (e^{-Γ_S τ} + e^{-Γ_L τ}))`.
fn weighted_width_ratio(p: &ModelParams, tau: f64) -> f64 {
    let (a, b) = p.survival(tau);
    (p.gamma_s * a + p.gamma_l * b) / (p.gamma() * (a + b))
}

fn ratio_formula(p: &ModelParams, tau: f64) -> f64 {
    let (a, b) = p.survival(tau);
    2.0 / (a + b) * (1.0 - weighted_width_ratio(p, tau))
}

/// Closed-form `(dV₀/dτ) / (dV/dτ)`. Non-negative whenever `Γ_S > Γ_L`,
/// vanishing only at `τ = 0`.
pub fn appendix_ratio(p: &ModelParams, tau: f64) -> Result<f64> {
    p.validate_split_widths()?;
    crate::model::check_tau(tau)?;
    Ok(ratio_formula(p, tau))
}

/// The intermediate quantity that has to stay `≤ 1` for the ratio to be
/// non-negative: the survival-weighted mean width over `Γ`.
pub fn appendix_width_ratio(p: &ModelParams, tau: f64) -> Result<f64> {
    p.validate_split_widths()?;
    crate::model::check_tau(tau)?;
    Ok(weighted_width_ratio(p, tau))
}

/// Central-difference estimate of `(dV₀/dτ) / (dV/dτ)` with step `h`.
pub fn finite_difference_ratio(p: &ModelParams, tau: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && tau - h >= 0.0) {
        return Err(Error::InvalidScan(format!(
            "central difference at tau = {tau} needs 0 < h <= tau, got h = {h}"
        )));
    }
    let dv0 = strangeness_visibility(p, tau + h)? - strangeness_visibility(p, tau - h)?;
    let dv = visibility_closed(p, tau + h)? - visibility_closed(p, tau - h)?;
    Ok(dv0 / dv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneCheck {
    pub passed: bool,
    /// Smallest step in the required direction, less the step's threshold.
    pub worst_margin: f64,
    /// Index of the later point of the worst step.
    pub worst_index: usize,
    pub first_violation: Option<usize>,
}

/// The first step may be flat (within [`MONOTONE_TOL`]); every later step
/// must move by more than [`MONOTONE_TOL`] in `direction`.
pub fn check_monotone(series: &[f64], direction: Direction) -> Result<MonotoneCheck> {
    if series.len() < 2 {
        return Err(Error::SeriesTooShort(series.len()));
    }
    let mut worst_margin = f64::INFINITY;
    let mut worst_index = 1;
    let mut first_violation = None;
    for (i, w) in series.windows(2).enumerate() {
        let step = match direction {
            Direction::Increasing => w[1] - w[0],
            Direction::Decreasing => w[0] - w[1],
        };
        let (margin, ok) = if i == 0 {
            (step + MONOTONE_TOL, step >= -MONOTONE_TOL)
        } else {
            (step - MONOTONE_TOL, step > MONOTONE_TOL)
        };
        if !ok && first_violation.is_none() {
            first_violation = Some(i + 1);
        }
        if margin < worst_margin {
            worst_margin = margin;
            worst_index = i + 1;
        }
    }
    Ok(MonotoneCheck {
        passed: first_violation.is_none(),
        worst_margin,
        worst_index,
        first_violation,
    })
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub worst_margin: f64,
    pub tau_at_worst: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    checks: Vec<CheckResult>,
}

impl VerificationReport {
    fn new(mut checks: Vec<CheckResult>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name).then(a.tau_at_worst.total_cmp(&b.tau_at_worst)));
        Self { checks }
    }

    pub fn checks(&self) -> &[CheckResult] {
        &self.checks
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One line per check plus a summary line.
    pub fn to_text(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{}  {:<width$}  worst_margin={:+.6e}  tau={:.6}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.worst_margin,
                c.tau_at_worst,
            );
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(
            out,
            "{}: {} checks, {} failed",
            if failed == 0 { "OK" } else { "FAILED" },
            self.checks.len(),
            failed
        );
        out
    }

    /// Flat `check.field = value` pairs in report order, then `all_passed`.
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let mut kv = Vec::with_capacity(self.checks.len() * 3 + 1);
        for c in &self.checks {
            kv.push((format!("{}.passed", c.name), c.passed.to_string()));
            kv.push((format!("{}.worst_margin", c.name), format!("{:.12e}", c.worst_margin)));
            kv.push((format!("{}.tau", c.name), format!("{:.12}", c.tau_at_worst)));
        }
        kv.push(("all_passed".into(), self.all_passed().to_string()));
        kv
    }
}

/// Tracks the minimum margin and where it occurred.
struct Worst {
    margin: f64,
    tau: f64,
}

impl Worst {
    fn new() -> Self {
        Self {
            margin: f64::INFINITY,
            tau: f64::NAN,
        }
    }

    fn update(&mut self, margin: f64, tau: f64) {
        if margin < self.margin || self.tau.is_nan() {
            self.margin = margin;
            self.tau = tau;
        }
    }

    fn into_check(self, name: &str, passed: bool) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            passed,
            worst_margin: self.margin,
            tau_at_worst: self.tau,
        }
    }

    fn into_threshold_check(self, name: &str, floor: f64) -> CheckResult {
        let passed = self.margin >= floor;
        self.into_check(name, passed)
    }
}

fn monotone_result(name: &str, records: &[ScanRecord], dir: Direction, field: fn(&MeasureBundle) -> f64) -> Result<CheckResult> {
    let series: Vec<f64> = records.iter().map(|r| field(&r.bundle)).collect();
    let m = check_monotone(&series, dir)?;
    Ok(CheckResult {
        name: name.to_string(),
        passed: m.passed,
        worst_margin: m.worst_margin,
        tau_at_worst: records[m.worst_index].tau(),
    })
}

struct ChannelSample {
    tau: f64,
    kraus_residual: f64,
    choi_min_eigenvalue: f64,
    isometry_defect: f64,
}

fn channel_sample(p: &ModelParams, tau: f64) -> Result<ChannelSample> {
    let kraus = kraus_operators(p, tau)?;
    let choi = choi_matrix(&kraus);
    Ok(ChannelSample {
        tau,
        kraus_residual: kraus.completeness_residual(),
        choi_min_eigenvalue: hermitian_eigen(&choi)?.min_eigenvalue(),
        isometry_defect: isometry_defect(&evolution_isometry(p, tau)?),
    })
}

/// Runs every check on `cfg`'s grid.
pub fn run_all(cfg: &ScanConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    cfg.params.validate_split_widths()?;
    let p = cfg.params;

    let matrix = scan(&ScanConfig {
        path: EvalPath::Matrix,
        ..*cfg
    })?;
    let closed = scan(&ScanConfig {
        path: EvalPath::ClosedForm,
        ..*cfg
    })?;

    let mut checks = Vec::new();

    // V² + D² + S² ≤ 1, saturated only at τ = 0
    let mut worst = Worst::new();
    let mut ok = true;
    for r in &matrix {
        if r.tau() == 0.0 {
            ok &= r.slack_triality >= -SLACK_FLOOR;
        } else {
            ok &= r.slack_triality > 0.0;
            worst.update(r.slack_triality, r.tau());
        }
    }
    checks.push(worst.into_check("triality", ok));

    let mut worst = Worst::new();
    for r in &matrix {
        worst.update(r.slack_fvg, r.tau());
    }
    checks.push(worst.into_threshold_check("fuchs_van_de_graaf", -SLACK_FLOOR));

    let mut worst = Worst::new();
    for r in &matrix {
        let b = &r.bundle;
        worst.update(AGREEMENT_TOL - (b.v2() + b.d2() - b.x * b.x).abs(), r.tau());
    }
    checks.push(worst.into_threshold_check("vd_identity", 0.0));

    let mut worst = Worst::new();
    for (m, c) in matrix.iter().zip(&closed) {
        worst.update(AGREEMENT_TOL - m.bundle.max_abs_diff(&c.bundle), m.tau());
    }
    checks.push(worst.into_threshold_check("closed_form_agreement", 0.0));

    checks.push(monotone_result("monotone_s_increasing", &matrix, Direction::Increasing, |b| b.entropy_s)?);
    checks.push(monotone_result("monotone_d_increasing", &matrix, Direction::Increasing, |b| b.disting_d)?);
    checks.push(monotone_result("monotone_v_decreasing", &matrix, Direction::Decreasing, |b| b.visibility_v)?);
    checks.push(monotone_result("monotone_v0_decreasing", &matrix, Direction::Decreasing, |b| b.strangeness_v0)?);

    // dV₀/dτ over dV/dτ: zero at τ = 0, positive after
    let mut worst = Worst::new();
    let mut ok = true;
    for r in &matrix {
        if r.tau() == 0.0 {
            ok &= r.ratio_appendix >= -MONOTONE_TOL;
            worst.update(r.ratio_appendix + MONOTONE_TOL, r.tau());
        } else {
            ok &= r.ratio_appendix > 0.0;
            worst.update(r.ratio_appendix, r.tau());
        }
    }
    checks.push(worst.into_check("appendix_ratio_positive", ok));

    let mut worst = Worst::new();
    for r in &matrix {
        worst.update(1.0 - weighted_width_ratio(&p, r.tau()), r.tau());
    }
    checks.push(worst.into_threshold_check("appendix_width_bound", -MONOTONE_TOL));

    let fd_taus: Vec<f64> = matrix
        .iter()
        .map(ScanRecord::tau)
        .filter(|&t| t >= FD_TAU_START && t - cfg.fd_step >= 0.0)
        .collect();
    let fd_errors = map_grid(&fd_taus, cfg.parallel, |tau| {
        let exact = ratio_formula(&p, tau);
        let fd = finite_difference_ratio(&p, tau, cfg.fd_step)?;
        Ok(((fd - exact) / exact).abs())
    })?;
    let mut worst = Worst::new();
    for (tau, err) in fd_taus.iter().zip(&fd_errors) {
        worst.update(FD_REL_TOL - err, *tau);
    }
    checks.push(worst.into_threshold_check("appendix_fd_agreement", 0.0));

    let samples = map_grid(
        &uniform_grid(cfg.tau_min, cfg.tau_max, CHANNEL_SAMPLES.min(cfg.steps)),
        cfg.parallel,
        |tau| channel_sample(&p, tau),
    )?;
    let mut kraus = Worst::new();
    let mut choi = Worst::new();
    let mut iso = Worst::new();
    for s in &samples {
        kraus.update(KRAUS_TOL - s.kraus_residual, s.tau);
        choi.update(s.choi_min_eigenvalue + CHOI_TOL, s.tau);
        iso.update(ISOMETRY_TOL - s.isometry_defect, s.tau);
    }
    checks.push(kraus.into_check("kraus_completeness", samples.iter().all(|s| s.kraus_residual < KRAUS_TOL)));
    checks.push(choi.into_check("choi_positivity", samples.iter().all(|s| s.choi_min_eigenvalue > -CHOI_TOL)));
    checks.push(iso.into_threshold_check("isometry_residual", 0.0));

    Ok(VerificationReport::new(checks))
}

/// `run_all` over `[0, τ₀]` with the default model.
pub fn run_default() -> Result<VerificationReport> {
    run_all(&ScanConfig::new(ModelParams {
        tau_max: TAU_ZERO,
        ..ModelParams::default()
    }))
}
