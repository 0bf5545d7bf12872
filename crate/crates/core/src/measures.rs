//! Complementarity quantifiers.
//!
//! Every measure has two independent routes: a matrix route that builds the
//! 9-dimensional pure state, traces out one party and diagonalizes, and a
//! closed form in terms of the survival probabilities
//! `a = e^{-Γ_S τ}`, `b = e^{-Γ_L τ}`. With `x = (a + b)/2`:
//!
//! | measure | closed form |
//! |---------|-------------|
//! | entanglement `S` | `-x ln x - (1-x) ln(1-x)` |
//! | distinguishability `D` | `|a - b| / 2` |
//! | visibility `V` | `e^{-Γτ}`, `Γ = (Γ_S + Γ_L)/2` |
//! | strangeness visibility `V₀` | `V / x` |
//! | `2<K̄⁰|ρ_Q|K̄⁰>` | `x (1 - V₀ cos Δmτ)` |
//!
//! so that `V² + D² = x²` and the triality sum is `x² + S²`.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, psd_sqrt, trace_norm, ComplexMatrix};
use crate::model::{
    antikaon_ket, check_tau, conditional_pion_state, evolve_pure, reduced_kaon, reduced_pion, DensityOperator, Mode,
    ModelParams, Pion, Quanton,
};

/// Logarithm base for entropies. Only `Natural` is physical for the triality
/// relation; `Binary` exists as a negative control.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum EntropyBase {
    #[default]
    Natural,
    Binary,
}

impl EntropyBase {
    fn log(self, v: f64) -> f64 {
        match self {
            EntropyBase::Natural => v.ln(),
            EntropyBase::Binary => v.log2(),
        }
    }
}

/// `-Σ λ log λ` over the spectrum of `rho`, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &ComplexMatrix, base: EntropyBase) -> Result<f64> {
    let eig = hermitian_eigen(rho)?;
    let spectrum = eig.clamped_eigenvalues()?;
    Ok(spectrum
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * base.log(l))
        .sum::<f64>()
        .max(0.0))
}

/// Von Neumann entropy in nats.
pub fn entropy(rho: &DensityOperator) -> Result<f64> {
    von_neumann_entropy(rho.matrix(), EntropyBase::Natural)
}

/// `-x log x - (1-x) log(1-x)`.
pub fn binary_entropy(x: f64, base: EntropyBase) -> f64 {
    let x = x.clamp(0.0, 1.0);
    let term = |v: f64| if v > 0.0 { -v * base.log(v) } else { 0.0 };
    (term(x) + term(1.0 - x)).max(0.0)
}

/// Uhlmann fidelity `Tr √(√ρ σ √ρ)`, applied as is to subnormalized inputs.
pub fn fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let root = psd_sqrt(rho)?;
    let inner = root.matmul(sigma)?.matmul(&root)?.hermitian_part()?;
    let eig = hermitian_eigen(&inner)?;
    Ok(eig.clamped_eigenvalues()?.into_iter().map(f64::sqrt).sum())
}

/// `½ ‖ρ - σ‖₁`.
pub fn trace_distance(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    Ok(0.5 * trace_norm(&rho.sub(sigma)?)?)
}

fn survival(p: &ModelParams, tau: f64) -> Result<(f64, f64)> {
    p.validate()?;
    check_tau(tau)?;
    Ok(p.survival(tau))
}

/// `x(τ) = (e^{-Γ_S τ} + e^{-Γ_L τ}) / 2`, the `|0_π>` eigenvalue of `ρ_P` for
/// a `|K⁰>` initial state.
pub fn x_of_tau(p: &ModelParams, tau: f64) -> Result<f64> {
    let (a, b) = survival(p, tau)?;
    Ok(0.5 * (a + b))
}

/// Entanglement entropy from the spectrum `{0, w, 1-w}` of `ρ_P`, where
/// `w = |α|² e^{-Γ_S τ} + |β|² e^{-Γ_L τ}` (`w = x` for `|K⁰>`).
pub fn entropy_closed(p: &ModelParams, tau: f64, base: EntropyBase) -> Result<f64> {
    let (a, b) = survival(p, tau)?;
    let w = p.alpha.norm_sqr() * a + p.beta.norm_sqr() * b;
    Ok(binary_entropy(w, base))
}

/// Entropy of the reduced pion state built from the composite state.
pub fn entanglement_entropy(p: &ModelParams, tau: f64, base: EntropyBase) -> Result<f64> {
    let state = evolve_pure(p, tau)?;
    von_neumann_entropy(reduced_pion(&state).matrix(), base)
}

/// Trace distance between the pion states conditioned on `K_S` and `K_L`.
pub fn distinguishability(p: &ModelParams, tau: f64) -> Result<f64> {
    let (s, l) = crate::model::conditional_pion_states(p, tau)?;
    trace_distance(s.matrix(), l.matrix())
}

pub fn distinguishability_closed(p: &ModelParams, tau: f64) -> Result<f64> {
    let (a, b) = survival(p, tau)?;
    Ok(0.5 * (a - b).abs())
}

/// Fidelity between the conditional pion states.
pub fn visibility(p: &ModelParams, tau: f64) -> Result<f64> {
    let (s, l) = crate::model::conditional_pion_states(p, tau)?;
    fidelity(s.matrix(), l.matrix())
}

pub fn visibility_closed(p: &ModelParams, tau: f64) -> Result<f64> {
    p.validate()?;
    check_tau(tau)?;
    Ok((-p.gamma() * tau).exp())
}

/// Visibility of `K⁰`–`K̄⁰` oscillations,
/// `2|α||β| e^{-Γτ} / (|α|² e^{-Γ_S τ} + |β|² e^{-Γ_L τ})`.
pub fn strangeness_visibility(p: &ModelParams, tau: f64) -> Result<f64> {
    let (a, b) = survival(p, tau)?;
    let w = p.alpha.norm_sqr() * a + p.beta.norm_sqr() * b;
    Ok(2.0 * p.alpha.norm() * p.beta.norm() * (-p.gamma() * tau).exp() / w)
}

/// Oscillation visibility read off `ρ_Q`: `2|ρ_SL| / (ρ_SS + ρ_LL)`.
pub fn strangeness_visibility_matrix(rho_q: &DensityOperator) -> f64 {
    let m = rho_q.matrix();
    let (s, l) = (Quanton::Short as usize, Quanton::Long as usize);
    2.0 * m[(s, l)].norm() / (m[(s, s)].re + m[(l, l)].re)
}

/// `2<K̄⁰|ρ_Q|K̄⁰>` from the reduced kaon state.
pub fn antikaon_probability(p: &ModelParams, tau: f64) -> Result<f64> {
    let state = evolve_pure(p, tau)?;
    Ok(2.0 * reduced_kaon(&state).expectation(&antikaon_ket()))
}

/// `x (1 - V₀ cos Δmτ)`; only defined for the `|K⁰>` initial state.
pub fn antikaon_probability_closed(p: &ModelParams, tau: f64) -> Result<f64> {
    p.validate()?;
    if !p.is_strangeness_eigenstate() {
        return Err(Error::NonCanonicalAmplitudes {
            alpha: p.alpha.to_string(),
            beta: p.beta.to_string(),
        });
    }
    let x = x_of_tau(p, tau)?;
    let v0 = strangeness_visibility(p, tau)?;
    Ok(x * (1.0 - v0 * (p.delta_m() * tau).cos()))
}

/// `V² + D² + S²` from the closed forms, natural-log entropy.
pub fn triality_sum(p: &ModelParams, tau: f64) -> Result<f64> {
    let v = visibility_closed(p, tau)?;
    let d = distinguishability_closed(p, tau)?;
    let s = entropy_closed(p, tau, EntropyBase::Natural)?;
    Ok(v * v + d * d + s * s)
}

/// Which computational route produces a [`MeasureBundle`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum EvalPath {
    #[default]
    Matrix,
    ClosedForm,
}

/// All measures at one proper time.
///
/// `x` is the `|0_π>` weight of `ρ_P`; it equals [`x_of_tau`] for the `|K⁰>`
/// initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureBundle {
    pub tau: f64,
    pub x: f64,
    pub entropy_s: f64,
    pub disting_d: f64,
    pub visibility_v: f64,
    pub strangeness_v0: f64,
    pub antikaon_prob: f64,
    pub triality_sum: f64,
}

impl MeasureBundle {
    pub fn evaluate(p: &ModelParams, tau: f64, path: EvalPath, base: EntropyBase) -> Result<Self> {
        match path {
            EvalPath::Matrix => Self::from_matrices(p, tau, base),
            EvalPath::ClosedForm => Self::from_closed_forms(p, tau, base),
        }
    }

    fn from_matrices(p: &ModelParams, tau: f64, base: EntropyBase) -> Result<Self> {
        let state = evolve_pure(p, tau)?;
        let rho_p = reduced_pion(&state);
        let rho_q = reduced_kaon(&state);
        let cond_s = conditional_pion_state(&state, p.alpha.norm_sqr(), Mode::Short)?;
        let cond_l = conditional_pion_state(&state, p.beta.norm_sqr(), Mode::Long)?;

        let x = rho_p.matrix()[(Pion::None as usize, Pion::None as usize)].re;
        let s = von_neumann_entropy(rho_p.matrix(), base)?;
        let d = trace_distance(cond_s.matrix(), cond_l.matrix())?;
        let v = fidelity(cond_s.matrix(), cond_l.matrix())?;
        let v0 = strangeness_visibility_matrix(&rho_q);
        let pbar = 2.0 * rho_q.expectation(&antikaon_ket());
        Ok(Self::assemble(tau, x, s, d, v, v0, pbar))
    }

    fn from_closed_forms(p: &ModelParams, tau: f64, base: EntropyBase) -> Result<Self> {
        let (a, b) = survival(p, tau)?;
        let w = p.alpha.norm_sqr() * a + p.beta.norm_sqr() * b;
        let s = binary_entropy(w, base);
        let d = 0.5 * (a - b).abs();
        let v = (-p.gamma() * tau).exp();
        let v0 = 2.0 * p.alpha.norm() * p.beta.norm() * v / w;
        // for general amplitudes the oscillation phase picks up arg(α β*)
        let phase = p.delta_m() * tau + (p.alpha * p.beta.conj()).arg();
        let pbar = w * (1.0 - v0 * phase.cos());
        Ok(Self::assemble(tau, w, s, d, v, v0, pbar))
    }

    fn assemble(tau: f64, x: f64, s: f64, d: f64, v: f64, v0: f64, pbar: f64) -> Self {
        Self {
            tau,
            x,
            entropy_s: s,
            disting_d: d,
            visibility_v: v,
            strangeness_v0: v0,
            antikaon_prob: pbar,
            triality_sum: v * v + d * d + s * s,
        }
    }

    pub fn v2(&self) -> f64 {
        self.visibility_v * self.visibility_v
    }

    pub fn d2(&self) -> f64 {
        self.disting_d * self.disting_d
    }

    pub fn s2(&self) -> f64 {
        self.entropy_s * self.entropy_s
    }

    /// `1 - (V² + D² + S²)`.
    pub fn triality_slack(&self) -> f64 {
        1.0 - self.triality_sum
    }

    /// `√(1 - D²) - V`.
    pub fn fvg_slack(&self) -> f64 {
        (1.0 - self.d2()).max(0.0).sqrt() - self.visibility_v
    }

    /// Largest absolute difference over the measure fields.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.x - other.x,
            self.entropy_s - other.entropy_s,
            self.disting_d - other.disting_d,
            self.visibility_v - other.visibility_v,
            self.strangeness_v0 - other.strangeness_v0,
            self.antikaon_prob - other.antikaon_prob,
            self.triality_sum - other.triality_sum,
        ]
        .iter()
        .fold(0.0_f64, |m, d| m.max(d.abs()))
    }
}
