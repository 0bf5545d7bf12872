//! Bipartite kaon ⊗ decay-products model.
//!
//! The quanton factor is spanned by `|0_K>` (no kaon), `|K_S>` and `|K_L>`;
//! the pion factor by `|0_π>`, `|ππ>` (two pions, fed by `K_S`) and `|π̃π̃>`
//! (one or three pions, fed by `K_L`). A state `|q>|p>` has composite index
//! `3 q + p`.
//!
//! Time is measured in units of the `K_S` lifetime, so the default widths are
//! `Γ_S = 1` and `Γ_L = 1/579`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{partial_trace, Complex, ComplexMatrix, Subsystem, HERMITIAN_TOL, PSD_TOL, ZERO};

pub const QUANTON_DIM: usize = 3;
pub const PION_DIM: usize = 3;
pub const COMPOSITE_DIM: usize = QUANTON_DIM * PION_DIM;

/// Ratio `Γ_S / Γ_L` for neutral kaons.
pub const WIDTH_RATIO: f64 = 579.0;

/// Analysis horizon `τ₀ = 4.79 τ_S`; kaons surviving past it are `K_L` with
/// negligible error.
pub const TAU_ZERO: f64 = 4.79;

/// Default `Δm τ_S`. Only the mass difference is observable in the reduced
/// kaon state; this is a configuration default, not a fitted value.
pub const DEFAULT_DELTA_M: f64 = 0.47;

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quanton {
    Vacuum = 0,
    Short = 1,
    Long = 2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pion {
    None = 0,
    TwoPion = 1,
    Other = 2,
}

/// Kaon propagation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Short,
    Long,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Short => f.write_str("K_S"),
            Mode::Long => f.write_str("K_L"),
        }
    }
}

pub fn composite_index(q: Quanton, p: Pion) -> usize {
    q as usize * PION_DIM + p as usize
}

/// `|K⁰> = (|K_S> + |K_L>)/√2` in the quanton basis.
pub fn kaon_ket() -> [Complex; QUANTON_DIM] {
    let s = Complex::new(FRAC_1_SQRT_2, 0.0);
    [ZERO, s, s]
}

/// `|K̄⁰> = (|K_S> - |K_L>)/√2` in the quanton basis.
pub fn antikaon_ket() -> [Complex; QUANTON_DIM] {
    let s = Complex::new(FRAC_1_SQRT_2, 0.0);
    [ZERO, s, -s]
}

/// Physical constants and initial amplitudes, all in `τ_S` units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub gamma_s: f64,
    pub gamma_l: f64,
    pub m_s: f64,
    pub m_l: f64,
    /// Initial `K_S` amplitude.
    pub alpha: Complex,
    /// Initial `K_L` amplitude.
    pub beta: Complex,
    pub tau_max: f64,
}

impl Default for ModelParams {
    /// Kaon produced in a strangeness eigenstate `|K⁰>`.
    fn default() -> Self {
        Self {
            gamma_s: 1.0,
            gamma_l: 1.0 / WIDTH_RATIO,
            m_s: 0.0,
            m_l: DEFAULT_DELTA_M,
            alpha: Complex::new(FRAC_1_SQRT_2, 0.0),
            beta: Complex::new(FRAC_1_SQRT_2, 0.0),
            tau_max: TAU_ZERO,
        }
    }
}

impl ModelParams {
    pub fn with_delta_m(mut self, delta_m: f64) -> Self {
        self.m_l = self.m_s + delta_m;
        self
    }

    pub fn with_amplitudes(mut self, alpha: Complex, beta: Complex) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    pub fn with_widths(mut self, gamma_s: f64, gamma_l: f64) -> Self {
        self.gamma_s = gamma_s;
        self.gamma_l = gamma_l;
        self
    }

    /// `Δm = m_L - m_S`.
    pub fn delta_m(&self) -> f64 {
        self.m_l - self.m_s
    }

    /// Mean width `Γ = (Γ_S + Γ_L)/2`.
    pub fn gamma(&self) -> f64 {
        0.5 * (self.gamma_s + self.gamma_l)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.gamma_s, self.gamma_l, self.m_s, self.m_l, self.tau_max]
            .iter()
            .chain(&[self.alpha.re, self.alpha.im, self.beta.re, self.beta.im])
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if self.gamma_s <= 0.0 || self.gamma_l <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "decay widths must be positive (gamma_s = {}, gamma_l = {})",
                self.gamma_s, self.gamma_l
            )));
        }
        if self.gamma_s < self.gamma_l {
            return Err(Error::InvalidParams(format!(
                "gamma_s = {} must not be smaller than gamma_l = {}",
                self.gamma_s, self.gamma_l
            )));
        }
        let norm = self.alpha.norm_sqr() + self.beta.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParams(format!(
                "|alpha|^2 + |beta|^2 = {norm}, expected 1"
            )));
        }
        if self.tau_max <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "tau_max must be positive, got {}",
                self.tau_max
            )));
        }
        Ok(())
    }

    /// Validation plus `Γ_S > Γ_L`, needed wherever the mean-width
    /// derivative argument is used.
    pub fn validate_split_widths(&self) -> Result<()> {
        self.validate()?;
        if self.gamma_s <= self.gamma_l {
            return Err(Error::DegenerateWidths {
                gamma_s: self.gamma_s,
                gamma_l: self.gamma_l,
            });
        }
        Ok(())
    }

    /// True for the `|K⁰>` initial condition `α = β = 1/√2`.
    pub fn is_strangeness_eigenstate(&self) -> bool {
        let s = Complex::new(FRAC_1_SQRT_2, 0.0);
        (self.alpha - s).norm() <= NORM_TOL && (self.beta - s).norm() <= NORM_TOL
    }

    /// `(e^{-Γ_S τ}, e^{-Γ_L τ})`: survival probabilities of each mode.
    pub fn survival(&self, tau: f64) -> (f64, f64) {
        ((-self.gamma_s * tau).exp(), (-self.gamma_l * tau).exp())
    }
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if tau.is_finite() && tau >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTau(tau))
    }
}

/// Normalized amplitude vector on the 9-dimensional composite basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureStateVector {
    amplitudes: [Complex; COMPOSITE_DIM],
}

impl PureStateVector {
    pub fn new(amplitudes: [Complex; COMPOSITE_DIM]) -> Result<Self> {
        let state = Self { amplitudes };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParams(format!("state norm {norm}, expected 1")));
        }
        Ok(state)
    }

    pub fn amplitudes(&self) -> &[Complex; COMPOSITE_DIM] {
        &self.amplitudes
    }

    pub fn amplitude(&self, q: Quanton, p: Pion) -> Complex {
        self.amplitudes[composite_index(q, p)]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|Ψ><Ψ|`.
    pub fn density_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }
}

/// Hermitian positive semidefinite operator with trace at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.require_square()?;
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let trace = matrix.trace()?.re;
        if trace > 1.0 + PSD_TOL {
            return Err(Error::TraceExceedsOne(trace));
        }
        let min = crate::linalg::hermitian_eigen(&matrix)?.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { matrix })
    }

    /// Skips the eigenvalue check; for operators that are PSD by construction.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_hermitian(HERMITIAN_TOL));
        Self { matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    /// `<v|ρ|v>`.
    pub fn expectation(&self, v: &[Complex]) -> f64 {
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += v[i].conj() * self.matrix[(i, j)] * v[j];
            }
        }
        acc.re
    }
}

fn decay_amplitude(survival: f64) -> f64 {
    (1.0 - survival).max(0.0).sqrt()
}

fn mode_factor(gamma: f64, mass: f64, tau: f64) -> Complex {
    // e^{-Γτ/2} e^{-imτ}
    Complex::from_polar((-0.5 * gamma * tau).exp(), -mass * tau)
}

/// Composite state `|Ψ(τ)>` grown from `(α|K_S> + β|K_L>)|0_π>`.
pub fn evolve_pure(p: &ModelParams, tau: f64) -> Result<PureStateVector> {
    p.validate()?;
    check_tau(tau)?;
    let (surv_s, surv_l) = p.survival(tau);
    let mut amps = [ZERO; COMPOSITE_DIM];
    amps[composite_index(Quanton::Short, Pion::None)] = p.alpha * mode_factor(p.gamma_s, p.m_s, tau);
    amps[composite_index(Quanton::Long, Pion::None)] = p.beta * mode_factor(p.gamma_l, p.m_l, tau);
    amps[composite_index(Quanton::Vacuum, Pion::TwoPion)] = p.alpha * decay_amplitude(surv_s);
    amps[composite_index(Quanton::Vacuum, Pion::Other)] = p.beta * decay_amplitude(surv_l);
    Ok(PureStateVector { amplitudes: amps })
}

/// The dynamical map as a `9 x 3` isometry whose columns are the images of
/// `|0_K 0_π>`, `|K_S 0_π>` and `|K_L 0_π>`.
pub fn evolution_isometry(p: &ModelParams, tau: f64) -> Result<ComplexMatrix> {
    p.validate()?;
    check_tau(tau)?;
    let (surv_s, surv_l) = p.survival(tau);
    let mut v = ComplexMatrix::zeros(COMPOSITE_DIM, QUANTON_DIM);
    v[(composite_index(Quanton::Vacuum, Pion::None), Quanton::Vacuum as usize)] = Complex::new(1.0, 0.0);
    let s = Quanton::Short as usize;
    v[(composite_index(Quanton::Short, Pion::None), s)] = mode_factor(p.gamma_s, p.m_s, tau);
    v[(composite_index(Quanton::Vacuum, Pion::TwoPion), s)] = Complex::new(decay_amplitude(surv_s), 0.0);
    let l = Quanton::Long as usize;
    v[(composite_index(Quanton::Long, Pion::None), l)] = mode_factor(p.gamma_l, p.m_l, tau);
    v[(composite_index(Quanton::Vacuum, Pion::Other), l)] = Complex::new(decay_amplitude(surv_l), 0.0);
    Ok(v)
}

/// `ρ_Q = Tr_P |Ψ><Ψ|`.
pub fn reduced_kaon(state: &PureStateVector) -> DensityOperator {
    let rho = state.density_matrix();
    let m = partial_trace(&rho, QUANTON_DIM, PION_DIM, Subsystem::A).expect("composite dims are fixed");
    DensityOperator::from_trusted(m)
}

/// `ρ_P = Tr_Q |Ψ><Ψ|`.
pub fn reduced_pion(state: &PureStateVector) -> DensityOperator {
    let rho = state.density_matrix();
    let m = partial_trace(&rho, QUANTON_DIM, PION_DIM, Subsystem::B).expect("composite dims are fixed");
    DensityOperator::from_trusted(m)
}

/// Pion state conditioned on the kaon still propagating in `mode`:
/// `<K_mode|ρ|K_mode> / w` with `w` the initial weight of that mode
/// (`w = 1/2` for `|K⁰>`, giving the factor 2).
pub fn conditional_pion_state(state: &PureStateVector, weight: f64, mode: Mode) -> Result<DensityOperator> {
    if weight <= f64::EPSILON {
        return Err(Error::DegenerateAmplitude(mode));
    }
    let q = match mode {
        Mode::Short => Quanton::Short,
        Mode::Long => Quanton::Long,
    };
    let amps = state.amplitudes();
    let block: Vec<Complex> = (0..PION_DIM)
        .map(|b| amps[q as usize * PION_DIM + b])
        .collect();
    Ok(DensityOperator::from_trusted(ComplexMatrix::outer(&block, &block).scale_real(1.0 / weight)))
}

/// `(ρ_P^(S), ρ_P^(L))` at proper time `tau`.
pub fn conditional_pion_states(p: &ModelParams, tau: f64) -> Result<(DensityOperator, DensityOperator)> {
    let state = evolve_pure(p, tau)?;
    Ok((
        conditional_pion_state(&state, p.alpha.norm_sqr(), Mode::Short)?,
        conditional_pion_state(&state, p.beta.norm_sqr(), Mode::Long)?,
    ))
}

/// Closed forms of the reduced states, written out entry by entry.
pub mod closed_form {
    use super::*;

    /// `ρ_Q(τ)` with the `|K_S><K_L|` coherence `α β* e^{-Γτ} e^{iΔm τ}`.
    pub fn reduced_kaon(p: &ModelParams, tau: f64) -> Result<ComplexMatrix> {
        p.validate()?;
        check_tau(tau)?;
        let (a, b) = p.survival(tau);
        let w_s = p.alpha.norm_sqr();
        let w_l = p.beta.norm_sqr();
        let coherence = p.alpha * p.beta.conj() * Complex::from_polar((-p.gamma() * tau).exp(), p.delta_m() * tau);
        let (v, s, l) = (Quanton::Vacuum as usize, Quanton::Short as usize, Quanton::Long as usize);
        let mut m = ComplexMatrix::zeros(QUANTON_DIM, QUANTON_DIM);
        m[(v, v)] = Complex::new(1.0 - w_s * a - w_l * b, 0.0);
        m[(s, s)] = Complex::new(w_s * a, 0.0);
        m[(l, l)] = Complex::new(w_l * b, 0.0);
        m[(s, l)] = coherence;
        m[(l, s)] = coherence.conj();
        Ok(m)
    }

    /// `ρ_P(τ)`.
    pub fn reduced_pion(p: &ModelParams, tau: f64) -> Result<ComplexMatrix> {
        p.validate()?;
        check_tau(tau)?;
        let (a, b) = p.survival(tau);
        let w_s = p.alpha.norm_sqr();
        let w_l = p.beta.norm_sqr();
        let coherence = p.alpha * p.beta.conj() * ((1.0 - a) * (1.0 - b)).max(0.0).sqrt();
        let (n, pp, o) = (Pion::None as usize, Pion::TwoPion as usize, Pion::Other as usize);
        let mut m = ComplexMatrix::zeros(PION_DIM, PION_DIM);
        m[(n, n)] = Complex::new(w_s * a + w_l * b, 0.0);
        m[(pp, pp)] = Complex::new(w_s * (1.0 - a), 0.0);
        m[(o, o)] = Complex::new(w_l * (1.0 - b), 0.0);
        m[(pp, o)] = coherence;
        m[(o, pp)] = coherence.conj();
        Ok(m)
    }
}
