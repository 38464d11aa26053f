//! Exact complex linear algebra for the two-qubit space.
//!
//! States, operators, Pauli algebra, spectral decomposition and
//! state-comparison metrics. Everything here is closed-form or iterated to
//! machine precision, so the rest of the crate tests against this module as
//! its brute-force oracle.
//!
//! All types are immutable values and all operations are pure functions;
//! they are safe to evaluate in parallel without coordination.

mod eigen;
mod matrix;
mod pauli;

pub use eigen::{Eigensystem, ground_state, hermitian_eigensystem};
pub use matrix::{C64, DIM, Mat2, Mat4};
pub use pauli::{PauliOp, PauliString, PauliSum, QubitMapping, pauli_matrix, pauli_sum_matrix};

use matrix::{ONE, ZERO};
use thiserror::Error;

/// Tolerance for trace/norm/Hermiticity invariants on stored states.
pub const STATE_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue of a stored density matrix.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;
/// Imaginary residue allowed when a real scalar is extracted from a trace.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum QcoreError {
    #[error("invalid Pauli letter '{0}', expected one of I, X, Y, Z")]
    InvalidPauliLetter(char),
    #[error("Pauli label {0:?} must have exactly two letters")]
    InvalidPauliLabel(String),
    #[error("Pauli coefficient must be finite, got {0}")]
    NonFiniteCoefficient(f64),
    #[error("'{0}' is not a diagonal Pauli letter (I or Z)")]
    NotDiagonalPauli(char),
    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { residual: f64, tolerance: f64 },
    #[error("state vector is not normalized: |norm - 1| = {0:.3e}")]
    NotNormalized(f64),
    #[error("amplitude {0} is not finite")]
    NonFiniteAmplitude(String),
    #[error("density matrix trace deviates from 1 by {0:.3e}")]
    BadTrace(f64),
    #[error("density matrix has eigenvalue {0:.3e} below the tolerance floor")]
    NegativeEigenvalue(f64),
    #[error("expectation value has imaginary residue {0:.3e}")]
    ImaginaryResidue(f64),
}

/// Which physical spin a qubit index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    /// Qubit 1, the nitrogen nuclear spin.
    Nuclear,
    /// Qubit 2, the NV electron spin.
    Electron,
}

impl Qubit {
    pub fn index(&self) -> usize {
        match self {
            Qubit::Nuclear => 1,
            Qubit::Electron => 2,
        }
    }

    pub fn other(&self) -> Qubit {
        match self {
            Qubit::Nuclear => Qubit::Electron,
            Qubit::Electron => Qubit::Nuclear,
        }
    }
}

/// A normalized pure state of the two-qubit system.
///
/// Amplitudes are indexed by |q₁q₂⟩ ∈ {|00⟩, |01⟩, |10⟩, |11⟩}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    amplitudes: [C64; DIM],
}

impl StateVector {
    pub fn new(amplitudes: [C64; DIM]) -> Result<Self, QcoreError> {
        for a in &amplitudes {
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(QcoreError::NonFiniteAmplitude(format!("{a}")));
            }
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > STATE_TOL {
            return Err(QcoreError::NotNormalized((norm_sqr.sqrt() - 1.0).abs()));
        }
        Ok(StateVector { amplitudes })
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn normalized(amplitudes: [C64; DIM]) -> Result<Self, QcoreError> {
        let norm: f64 = amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QcoreError::NotNormalized(1.0));
        }
        let mut out = amplitudes;
        for a in &mut out {
            *a /= norm;
        }
        Ok(StateVector { amplitudes: out })
    }

    /// Computational basis state |k⟩, k = 2·q₁ + q₂.
    pub fn basis(k: usize) -> Self {
        let mut amplitudes = [ZERO; DIM];
        amplitudes[k] = ONE;
        StateVector { amplitudes }
    }

    pub fn amplitudes(&self) -> &[C64; DIM] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .fold(ZERO, |acc, x| acc + x)
    }

    pub fn to_density(&self) -> DensityMatrix {
        let m = Mat4::from_fn(|i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        DensityMatrix { m }
    }
}

/// A density matrix of the two-qubit system: Hermitian, unit trace,
/// eigenvalues bounded below by a small negative tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: Mat4,
}

impl DensityMatrix {
    /// Validate all invariants (including positivity via the eigensolver).
    pub fn try_new(m: Mat4) -> Result<Self, QcoreError> {
        let residual = m.hermiticity_residual();
        if residual > STATE_TOL {
            return Err(QcoreError::NotHermitian {
                residual,
                tolerance: STATE_TOL,
            });
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(QcoreError::BadTrace((tr - ONE).norm()));
        }
        let eig = hermitian_eigensystem(&m)?;
        if eig.values[0] < EIGENVALUE_FLOOR {
            return Err(QcoreError::NegativeEigenvalue(eig.values[0]));
        }
        Ok(DensityMatrix { m })
    }

    /// Wrap a matrix that is trusted to satisfy the invariants (integration
    /// output that is re-Hermitized and trace-renormalized every step).
    pub(crate) fn from_mat_unchecked(m: Mat4) -> Self {
        DensityMatrix { m }
    }

    pub fn from_pure(state: &StateVector) -> Self {
        state.to_density()
    }

    pub fn basis(k: usize) -> Self {
        StateVector::basis(k).to_density()
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix {
            m: Mat4::identity().scale_re(0.25),
        }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.m
    }

    /// Populations along the computational basis diagonal.
    pub fn populations(&self) -> [f64; DIM] {
        let mut p = [0.0; DIM];
        for (i, q) in p.iter_mut().enumerate() {
            *q = self.m.e[i][i].re;
        }
        p
    }

    pub fn purity(&self) -> f64 {
        (self.m * self.m).trace().re
    }

    /// Conjugate by a unitary: U ρ U†.
    pub fn evolved_by(&self, u: &Mat4) -> DensityMatrix {
        DensityMatrix {
            m: (*u * self.m * u.adjoint()).hermitized(),
        }
    }
}

/// Tr(ρ·O) for a Pauli-sum observable.
///
/// Pauli sums with finite real coefficients are Hermitian by construction,
/// so the imaginary residue is a numerical check, not a physical one.
pub fn expectation(rho: &DensityMatrix, obs: &PauliSum) -> f64 {
    expectation_matrix(rho, &obs.matrix()).expect("Pauli sums are Hermitian by construction")
}

/// Tr(ρ·O) for an arbitrary observable; rejects non-Hermitian inputs.
pub fn expectation_matrix(rho: &DensityMatrix, obs: &Mat4) -> Result<f64, QcoreError> {
    let residual = obs.hermiticity_residual();
    if residual > IMAG_RESIDUE_TOL {
        return Err(QcoreError::NotHermitian {
            residual,
            tolerance: IMAG_RESIDUE_TOL,
        });
    }
    let tr = (rho.m * *obs).trace();
    if tr.im.abs() > IMAG_RESIDUE_TOL * obs.max_abs().max(1.0) {
        return Err(QcoreError::ImaginaryResidue(tr.im));
    }
    Ok(tr.re)
}

/// ⟨target|ρ|target⟩, the overlap of a mixed state with a pure target.
pub fn fidelity(rho: &DensityMatrix, target: &StateVector) -> f64 {
    let v = rho.m.apply(target.amplitudes());
    target
        .amplitudes()
        .iter()
        .zip(v.iter())
        .map(|(t, x)| (t.conj() * x).re)
        .sum()
}

/// Trace out one qubit, returning the 2x2 reduced density matrix of the kept
/// one.
pub fn partial_trace(rho: &DensityMatrix, keep: Qubit) -> Mat2 {
    let mut out = Mat2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let mut s = ZERO;
            for k in 0..2 {
                let (row, col) = match keep {
                    Qubit::Nuclear => (2 * i + k, 2 * j + k),
                    Qubit::Electron => (2 * k + i, 2 * k + j),
                };
                s += rho.m.e[row][col];
            }
            out.0[i][j] = s;
        }
    }
    out
}

/// Bloch vector (Tr ρσx, Tr ρσy, Tr ρσz) of a single-qubit density matrix.
pub fn bloch_vector(rho2: &Mat2) -> [f64; 3] {
    let x = 2.0 * rho2.0[0][1].re;
    let y = -2.0 * rho2.0[0][1].im;
    let z = (rho2.0[0][0] - rho2.0[1][1]).re;
    [x, y, z]
}
