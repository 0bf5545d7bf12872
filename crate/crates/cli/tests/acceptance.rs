//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on any FAIL.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use triality_core::channel::{choi_matrix, choi_trace_preservation_residual, kraus_operators};
use triality_core::linalg::{hermitian_eigen, Complex};
use triality_core::measures::{
    antikaon_probability, strangeness_visibility, x_of_tau, EntropyBase, EvalPath, MeasureBundle,
};
use triality_core::model::{evolve_pure, reduced_kaon, ModelParams, TAU_ZERO};
use triality_core::verification::{
    appendix_ratio, check_monotone, finite_difference_ratio, run_all, scan, Direction, ScanConfig, ScanRecord,
    DEFAULT_FD_STEP, FD_TAU_START,
};

const BIN: &str = env!("CARGO_BIN_EXE_triality");
const FINE_STEPS: usize = 10_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type Measure = fn(&MeasureBundle) -> f64;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || {
        format!("{name} = {got:.12} differs from {want} by more than {tol:e}")
    })
}

fn fine_scan(parallel: bool) -> Vec<ScanRecord> {
    scan(&ScanConfig {
        steps: FINE_STEPS,
        parallel,
        ..ScanConfig::default()
    })
    .expect("default scan")
}

fn bundle(tau: f64, path: EvalPath) -> MeasureBundle {
    MeasureBundle::evaluate(&ModelParams::default(), tau, path, EntropyBase::Natural).expect("bundle")
}

/// Triality inequality on a 10^4-point grid, timed.
fn triality_inequality() -> Outcome {
    let start = Instant::now();
    let records = fine_scan(true);
    let elapsed = start.elapsed().as_secs_f64();
    ensure(records.len() == FINE_STEPS, || format!("{} grid points", records.len()))?;
    let first = records[0].bundle;
    ensure(first.tau == 0.0, || "grid does not start at 0".into())?;
    close("sum(0)", first.triality_sum, 1.0, 1e-12)?;
    let mut worst_slack = f64::INFINITY;
    let mut max_sum = f64::NEG_INFINITY;
    let mut tau_at_max = 0.0;
    for r in &records[1..] {
        let s = r.bundle.triality_sum;
        ensure(s < 1.0, || format!("sum = {s} at tau = {}", r.tau()))?;
        worst_slack = worst_slack.min(r.slack_triality);
        if s > max_sum {
            max_sum = s;
            tau_at_max = r.tau();
        }
    }
    ensure(worst_slack >= -1e-12, || format!("slack {worst_slack:e}"))?;
    // independent high-precision evaluation of the grid maximum
    close("max sum on (0, 4.79]", max_sum, 0.9995253116468851, 1e-10)?;
    close("argmax", tau_at_max, TAU_ZERO / (FINE_STEPS - 1) as f64, 1e-15)?;
    ensure(elapsed < 1.0, || format!("scan took {elapsed:.3} s"))?;
    Ok(format!(
        "max sum {max_sum:.10} at tau {tau_at_max:.6}, min slack {worst_slack:.3e}, {elapsed:.3} s"
    ))
}

/// Reference values at tau = 1 with abs tolerance 1e-5.
fn golden_tau_one() -> Outcome {
    let b = bundle(1.0, EvalPath::Matrix);
    let targets = [
        ("x", b.x, 0.683077),
        ("D", b.disting_d, 0.315197),
        ("V", b.visibility_v, 0.606007),
        ("S", b.entropy_s, 0.624528),
        ("V0", b.strangeness_v0, 0.887174),
        ("sum", b.triality_sum, 0.856629),
    ];
    let mut worst: f64 = 0.0;
    for (name, got, want) in targets {
        close(name, got, want, 1e-5)?;
        worst = worst.max((got - want).abs());
    }
    // 30-digit reference values for the same quantities
    let oracle = [
        ("x", b.x, 0.683076908030),
        ("D", b.disting_d, 0.315197466859),
        ("V", b.visibility_v, 0.606007111485),
        ("S", b.entropy_s, 0.624528379844),
        ("V0", b.strangeness_v0, 0.887172592662),
        ("sum", b.triality_sum, 0.856629759515),
    ];
    for (name, got, want) in oracle {
        close(name, got, want, 1e-11)?;
    }
    Ok(format!("max deviation {worst:.2e}"))
}

/// Reference values at tau0 = 4.79.
fn golden_tau_zero() -> Outcome {
    let b = bundle(TAU_ZERO, EvalPath::Matrix);
    close("D", b.disting_d, 0.491724, 1e-5)?;
    close("V", b.visibility_v, 0.090796, 1e-5)?;
    let delta = std::f64::consts::LN_2 - b.entropy_s;
    ensure(delta > 0.0 && delta < 1e-5, || format!("ln 2 - S = {delta:e}"))?;
    let d2s2 = b.d2() + b.s2();
    close("D^2 + S^2", d2s2, 0.722253, 1e-4)?;
    close("D^2 + S^2 (oracle)", d2s2, 0.722245888072, 1e-11)?;
    Ok(format!("D {:.6}, V {:.6}, ln2 - S {delta:.2e}, D^2+S^2 {d2s2:.6}", b.disting_d, b.visibility_v))
}

/// Explicit state construction against closed forms at 100 random tau.
fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let tau = rng.gen_range(0.0..=TAU_ZERO);
        let m = bundle(tau, EvalPath::Matrix);
        let c = bundle(tau, EvalPath::ClosedForm);
        let d = m.max_abs_diff(&c);
        ensure(d <= 1e-10, || format!("tau {tau}: {m:?} vs {c:?}"))?;
        worst = worst.max(d);
    }
    Ok(format!("worst difference {worst:.2e}"))
}

/// Kraus completeness, Choi positivity, Kraus vs partial-trace evolution.
fn channel_certification() -> Outcome {
    let p = ModelParams::default();
    let mut worst_completeness: f64 = 0.0;
    let mut min_choi = f64::INFINITY;
    for i in 0..50 {
        let tau = TAU_ZERO * i as f64 / 49.0;
        let k = kraus_operators(&p, tau).map_err(|e| e.to_string())?;
        worst_completeness = worst_completeness.max(k.completeness_residual());
        let choi = choi_matrix(&k);
        let tp = choi_trace_preservation_residual(&choi, 3).map_err(|e| e.to_string())?;
        ensure(tp < 1e-12, || format!("Choi partial trace off identity by {tp:e} at tau {tau}"))?;
        let min = hermitian_eigen(&choi).map_err(|e| e.to_string())?.min_eigenvalue();
        min_choi = min_choi.min(min);
    }
    ensure(worst_completeness < 1e-12, || format!("completeness residual {worst_completeness:e}"))?;
    ensure(min_choi > -1e-10, || format!("Choi eigenvalue {min_choi:e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0xc401);
    let mut worst_evolution: f64 = 0.0;
    for _ in 0..20 {
        let theta = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
        let alpha = Complex::from_polar(theta.cos(), rng.gen_range(-3.2..3.2));
        let beta = Complex::from_polar(theta.sin(), rng.gen_range(-3.2..3.2));
        let q = p.with_amplitudes(alpha, beta);
        let rho0 = reduced_kaon(&evolve_pure(&q, 0.0).map_err(|e| e.to_string())?);
        for j in 0..=10 {
            let tau = TAU_ZERO * j as f64 / 10.0;
            let kraus = kraus_operators(&q, tau).map_err(|e| e.to_string())?;
            let via_kraus = kraus.apply(rho0.matrix()).map_err(|e| e.to_string())?;
            let direct = reduced_kaon(&evolve_pure(&q, tau).map_err(|e| e.to_string())?);
            worst_evolution = worst_evolution.max(via_kraus.max_abs_diff(direct.matrix()));
        }
    }
    ensure(worst_evolution <= 1e-12, || format!("Kraus vs partial trace {worst_evolution:e}"))?;
    Ok(format!(
        "completeness {worst_completeness:.1e}, min Choi eigenvalue {min_choi:.1e}, evolution {worst_evolution:.1e}"
    ))
}

/// V <= sqrt(1 - D^2) on the full matrix-path grid.
fn fuchs_van_de_graaf() -> Outcome {
    let mut worst = f64::INFINITY;
    for steps in [1000, FINE_STEPS] {
        let records = scan(&ScanConfig {
            steps,
            ..ScanConfig::default()
        })
        .map_err(|e| e.to_string())?;
        for r in &records {
            let b = r.bundle;
            let slack = (1.0 - b.d2()).sqrt() - b.visibility_v;
            ensure(slack >= -1e-12, || format!("V exceeds bound by {:e} at tau {}", -slack, b.tau))?;
            worst = worst.min(slack);
        }
    }
    Ok(format!("min slack {worst:.2e}"))
}

/// Strict monotonicity of S, D, V, V0 and the derivative ratio.
fn monotonicity() -> Outcome {
    let records = fine_scan(true);
    let interior = &records[1..];
    let series = |f: Measure| interior.iter().map(|r| f(&r.bundle)).collect::<Vec<_>>();
    let suite: [(&str, Measure, Direction); 4] = [
        ("S", |b| b.entropy_s, Direction::Increasing),
        ("D", |b| b.disting_d, Direction::Increasing),
        ("V", |b| b.visibility_v, Direction::Decreasing),
        ("V0", |b| b.strangeness_v0, Direction::Decreasing),
    ];
    for (name, f, dir) in suite {
        let m = check_monotone(&series(f), dir).map_err(|e| e.to_string())?;
        // on the open interval every step must be strict, including the first
        let s = series(f);
        let strict = s.windows(2).all(|w| match dir {
            Direction::Increasing => w[1] > w[0],
            Direction::Decreasing => w[1] < w[0],
        });
        ensure(m.passed && strict, || format!("{name} not strictly monotone near index {:?}", m.first_violation))?;
    }

    let p = ModelParams::default();
    let r0 = appendix_ratio(&p, 0.0).map_err(|e| e.to_string())?;
    ensure(r0 >= 0.0, || format!("ratio at 0 is {r0}"))?;
    for r in interior {
        ensure(r.ratio_appendix > 0.0, || format!("ratio {} at tau {}", r.ratio_appendix, r.tau()))?;
    }

    let mut worst_rel: f64 = 0.0;
    for i in 0..=1000 {
        let tau = FD_TAU_START + (TAU_ZERO - FD_TAU_START) * i as f64 / 1000.0;
        let exact = appendix_ratio(&p, tau).map_err(|e| e.to_string())?;
        let fd = finite_difference_ratio(&p, tau, DEFAULT_FD_STEP).map_err(|e| e.to_string())?;
        let rel = ((exact - fd) / exact).abs();
        ensure(rel <= 1e-5, || format!("tau {tau}: ratio {exact} vs finite difference {fd}"))?;
        worst_rel = worst_rel.max(rel);
    }
    close("ratio(1)", appendix_ratio(&p, 1.0).map_err(|e| e.to_string())?, 0.673198834774, 1e-11)?;
    close("ratio(4.79)", appendix_ratio(&p, TAU_ZERO).map_err(|e| e.to_string())?, 1.95982627749, 1e-10)?;
    Ok(format!("ratio(0) = {r0:.1e}, finite-difference rel error {worst_rel:.2e}"))
}

/// 2<K0bar|rho_Q|K0bar> = x (1 - V0 cos(dm tau)).
fn strangeness_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for dm in [0.0, 0.47, 5.0] {
        let p = ModelParams::default().with_delta_m(dm);
        let cfg = ScanConfig::new(p);
        for tau in cfg.grid() {
            let lhs = antikaon_probability(&p, tau).map_err(|e| e.to_string())?;
            let x = x_of_tau(&p, tau).map_err(|e| e.to_string())?;
            let v0 = strangeness_visibility(&p, tau).map_err(|e| e.to_string())?;
            let rhs = x * (1.0 - v0 * (dm * tau).cos());
            ensure((lhs - rhs).abs() <= 1e-12, || format!("dm {dm}, tau {tau}: {lhs} vs {rhs}"))?;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    close(
        "pKbar(1)",
        antikaon_probability(&ModelParams::default(), 1.0).map_err(|e| e.to_string())?,
        0.14278018501,
        1e-10,
    )?;
    Ok(format!("worst residual {worst:.2e}"))
}

/// Base-2 entropy must break the triality check and make `verify` exit 1.
fn negative_control() -> Outcome {
    let cfg = ScanConfig {
        entropy_base: EntropyBase::Binary,
        ..ScanConfig::default()
    };
    let max_sum = scan(&cfg)
        .map_err(|e| e.to_string())?
        .iter()
        .skip(1)
        .map(|r| r.bundle.triality_sum)
        .fold(f64::NEG_INFINITY, f64::max);
    ensure(max_sum > 1.0, || format!("base-2 max sum {max_sum}"))?;
    let report = run_all(&cfg).map_err(|e| e.to_string())?;
    ensure(!report.get("triality").expect("triality check").passed, || "triality check passed".into())?;

    let out = Command::new(BIN)
        .args(["verify", "--debug-entropy-base2"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(1), || format!("exit status {:?}", out.status))?;
    let text = String::from_utf8_lossy(&out.stdout);
    ensure(text.lines().any(|l| l.starts_with("FAIL") && l.contains("triality")), || text.to_string())?;
    Ok(format!("base-2 max sum {max_sum:.4}, verify exit 1"))
}

/// Two default scans, and parallel vs serial, produce identical bytes.
fn determinism() -> Outcome {
    let run = |extra: &[&str]| -> Result<Vec<u8>, String> {
        let out = Command::new(BIN)
            .arg("scan")
            .args(extra)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("scan exited {:?}", out.status))?;
        Ok(out.stdout)
    };
    let a = run(&[])?;
    let b = run(&[])?;
    let serial = run(&["--serial"])?;
    ensure(!a.is_empty(), || "empty output".into())?;
    ensure(a == b, || "two default runs differ".into())?;
    ensure(a == serial, || "parallel and serial output differ".into())?;
    ensure(fine_scan(true) == fine_scan(false), || "library scans differ".into())?;
    Ok(format!("{} bytes identical across 3 runs", a.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("triality inequality", triality_inequality),
        ("golden values at tau = 1", golden_tau_one),
        ("golden values at tau0 = 4.79", golden_tau_zero),
        ("matrix/closed-form equivalence", oracle_equivalence),
        ("channel certification", channel_certification),
        ("Fuchs-van de Graaf bound", fuchs_van_de_graaf),
        ("monotonicity suite", monotonicity),
        ("strangeness probability identity", strangeness_identity),
        ("negative control", negative_control),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  criterion {:>2}  {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL  criterion {:>2}  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
