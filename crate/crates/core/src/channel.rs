//! Operator-sum form of the reduced kaon dynamics.
//!
//! Tracing the pions out of the dynamical map leaves a channel on the
//! quanton qutrit with three Kraus operators: the damped propagation
//! `K₀ = diag(1, e^{-(Γ_S/2 + i m_S)τ}, e^{-(Γ_L/2 + i m_L)τ})` and the two
//! decay jumps `K₁ = √(1-e^{-Γ_S τ}) |0_K><K_S|`,
//! `K₂ = √(1-e^{-Γ_L τ}) |0_K><K_L|`.

use crate::error::{Error, Result};
use crate::linalg::{partial_trace, Complex, ComplexMatrix, Subsystem};
use crate::model::{check_tau, ModelParams, Quanton, QUANTON_DIM};

const COMPLETENESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    /// Accepts a set of square operators of equal dimension satisfying
    /// `Σ K_i^H K_i = I` to `1e-12`.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = operators.first() else {
            return Err(Error::IncompleteKraus(f64::INFINITY));
        };
        let dim = first.require_square()?;
        for k in &operators {
            if k.shape() != (dim, dim) {
                return Err(Error::ShapeMismatch {
                    left: (dim, dim),
                    right: k.shape(),
                });
            }
        }
        let set = Self { operators };
        let residual = set.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(Error::IncompleteKraus(residual));
        }
        Ok(set)
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.operators[0].rows()
    }

    /// `max |Σ K_i^H K_i - I|` entrywise.
    pub fn completeness_residual(&self) -> f64 {
        let dim = self.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for k in &self.operators {
            acc = acc
                .add(&k.adjoint().matmul(k).expect("square"))
                .expect("equal dims");
        }
        acc.max_abs_diff(&ComplexMatrix::identity(dim))
    }

    /// `ρ ↦ Σ K_i ρ K_i^H`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let dim = self.dim();
        if rho.shape() != (dim, dim) {
            return Err(Error::ShapeMismatch {
                left: (dim, dim),
                right: rho.shape(),
            });
        }
        let mut out = ComplexMatrix::zeros(dim, dim);
        for k in &self.operators {
            out = out.add(&k.matmul(rho)?.matmul(&k.adjoint())?)?;
        }
        Ok(out)
    }
}

pub fn kraus_operators(p: &ModelParams, tau: f64) -> Result<KrausSet> {
    p.validate()?;
    check_tau(tau)?;
    let (surv_s, surv_l) = p.survival(tau);
    let (v, s, l) = (Quanton::Vacuum as usize, Quanton::Short as usize, Quanton::Long as usize);

    let mut k0 = ComplexMatrix::zeros(QUANTON_DIM, QUANTON_DIM);
    k0[(v, v)] = Complex::new(1.0, 0.0);
    k0[(s, s)] = Complex::from_polar((-0.5 * p.gamma_s * tau).exp(), -p.m_s * tau);
    k0[(l, l)] = Complex::from_polar((-0.5 * p.gamma_l * tau).exp(), -p.m_l * tau);

    let mut k1 = ComplexMatrix::zeros(QUANTON_DIM, QUANTON_DIM);
    k1[(v, s)] = Complex::new((1.0 - surv_s).max(0.0).sqrt(), 0.0);

    let mut k2 = ComplexMatrix::zeros(QUANTON_DIM, QUANTON_DIM);
    k2[(v, l)] = Complex::new((1.0 - surv_l).max(0.0).sqrt(), 0.0);

    KrausSet::new(vec![k0, k1, k2])
}

/// Choi matrix `Σ_ij |i><j| ⊗ Φ(|i><j|)`, input factor first.
///
/// Positive semidefinite iff the channel is completely positive; tracing out
/// the output factor gives the identity iff it is trace preserving.
pub fn choi_matrix(k: &KrausSet) -> ComplexMatrix {
    let d = k.dim();
    let mut choi = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let mut unit = ComplexMatrix::zeros(d, d);
            unit[(i, j)] = Complex::new(1.0, 0.0);
            let image = k.apply(&unit).expect("dims match");
            for a in 0..d {
                for b in 0..d {
                    choi[(i * d + a, j * d + b)] = image[(a, b)];
                }
            }
        }
    }
    choi
}

/// `Tr_out(C) = I` residual for a Choi matrix on `d ⊗ d`.
pub fn choi_trace_preservation_residual(choi: &ComplexMatrix, d: usize) -> Result<f64> {
    let reduced = partial_trace(choi, d, d, Subsystem::A)?;
    Ok(reduced.max_abs_diff(&ComplexMatrix::identity(d)))
}
