//! Two-qubit Pauli algebra and the physical-to-computational basis mapping.

use super::matrix::{C64, Mat2, Mat4, ONE, ZERO};
use super::QcoreError;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub fn from_char(c: char) -> Result<Self, QcoreError> {
        match c {
            'I' => Ok(PauliOp::I),
            'X' => Ok(PauliOp::X),
            'Y' => Ok(PauliOp::Y),
            'Z' => Ok(PauliOp::Z),
            other => Err(QcoreError::InvalidPauliLetter(other)),
        }
    }

    pub fn matrix(&self) -> Mat2 {
        let i = C64::new(0.0, 1.0);
        match self {
            PauliOp::I => Mat2::identity(),
            PauliOp::X => Mat2([[ZERO, ONE], [ONE, ZERO]]),
            PauliOp::Y => Mat2([[ZERO, -i], [i, ZERO]]),
            PauliOp::Z => Mat2([[ONE, ZERO], [ZERO, -ONE]]),
        }
    }

    pub fn as_char(&self) -> char {
        match self {
            PauliOp::I => 'I',
            PauliOp::X => 'X',
            PauliOp::Y => 'Y',
            PauliOp::Z => 'Z',
        }
    }

    /// Eigenvalue on a computational basis state, defined for I and Z only.
    fn diagonal_eigenvalue(&self, bit: usize) -> Option<f64> {
        match self {
            PauliOp::I => Some(1.0),
            PauliOp::Z => Some(if bit == 0 { 1.0 } else { -1.0 }),
            _ => None,
        }
    }
}

/// A weighted two-qubit Pauli string, e.g. 1.0 * X₁X₂.
///
/// The first letter acts on qubit 1 (the nitrogen nuclear spin), the second
/// on qubit 2 (the NV electron spin).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliString {
    pub ops: [PauliOp; 2],
    pub coefficient: f64,
}

impl PauliString {
    /// Parse a two-letter label such as "XX" or "ZI".
    pub fn new(label: &str, coefficient: f64) -> Result<Self, QcoreError> {
        let chars: Vec<char> = label.chars().collect();
        if chars.len() != 2 {
            return Err(QcoreError::InvalidPauliLabel(label.to_string()));
        }
        if !coefficient.is_finite() {
            return Err(QcoreError::NonFiniteCoefficient(coefficient));
        }
        Ok(PauliString {
            ops: [PauliOp::from_char(chars[0])?, PauliOp::from_char(chars[1])?],
            coefficient,
        })
    }

    pub fn label(&self) -> String {
        self.ops.iter().map(PauliOp::as_char).collect()
    }

    /// Dense matrix, coefficient × (op₁ ⊗ op₂) in the computational basis.
    pub fn matrix(&self) -> Mat4 {
        Mat4::kron(&self.ops[0].matrix(), &self.ops[1].matrix()).scale_re(self.coefficient)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*{}", self.coefficient, self.label())
    }
}

/// A Hamiltonian (or observable) as a sum of weighted Pauli strings.
///
/// Construction canonicalizes: terms with the same label are merged so no
/// duplicate labels remain.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PauliSum {
    terms: Vec<PauliString>,
}

impl PauliSum {
    pub fn new(terms: Vec<PauliString>) -> Self {
        let mut merged: Vec<PauliString> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.iter_mut().find(|m| m.ops == t.ops) {
                Some(m) => m.coefficient += t.coefficient,
                None => merged.push(t),
            }
        }
        PauliSum { terms: merged }
    }

    pub fn from_labels(labels: &[(&str, f64)]) -> Result<Self, QcoreError> {
        let terms = labels
            .iter()
            .map(|(l, c)| PauliString::new(l, *c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(terms))
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Dense Hermitian matrix of the sum.
    pub fn matrix(&self) -> Mat4 {
        self.terms
            .iter()
            .fold(Mat4::zeros(), |acc, t| acc + t.matrix())
    }
}

/// Returns coefficient × (single-qubit Pauli ⊗ single-qubit Pauli) under the
/// qubit mapping's basis ordering.
pub fn pauli_matrix(p: &PauliString) -> Mat4 {
    p.matrix()
}

/// Dense matrix of a Pauli sum; Hermitian for real coefficients.
pub fn pauli_sum_matrix(h: &PauliSum) -> Mat4 {
    h.matrix()
}

/// The fixed assignment between physical spin states and computational basis
/// states.
///
/// Qubit 1 is the nitrogen nuclear spin (m_I = +1 ↦ |0⟩₁, m_I = 0 ↦ |1⟩₁);
/// qubit 2 is the NV electron spin (m_s = 0 ↦ |0⟩₂, m_s = −1 ↦ |1⟩₂).
/// Physical states are indexed 1..4 = (|0,+1⟩, |0,0⟩, |−1,+1⟩, |−1,0⟩),
/// labelled |m_s, m_I⟩ with the electron quantum number first. Computational
/// indices order the basis as |q₁q₂⟩ ∈ {|00⟩, |01⟩, |10⟩, |11⟩}.
///
/// All diagonal-Pauli sign tables are derived from this mapping rather than
/// transcribed, so the two labelling conventions can never drift apart.
#[derive(Debug, Clone, Copy)]
pub struct QubitMapping;

impl QubitMapping {
    /// Physical state labels |m_s, m_I⟩ in physical order 1..4.
    pub const PHYSICAL_LABELS: [&'static str; 4] = ["|0,+1>", "|0,0>", "|-1,+1>", "|-1,0>"];

    /// `PHYS_TO_COMP[k]` is the computational index of physical state k+1.
    /// The map happens to be an involution (it swaps the middle two states).
    pub const PHYS_TO_COMP: [usize; 4] = [0, 2, 1, 3];

    pub fn phys_to_comp(phys: usize) -> usize {
        Self::PHYS_TO_COMP[phys]
    }

    pub fn comp_to_phys(comp: usize) -> usize {
        Self::PHYS_TO_COMP[comp]
    }

    /// Reorder a computational-basis population vector into physical order.
    pub fn populations_to_physical(comp: [f64; 4]) -> [f64; 4] {
        let mut phys = [0.0; 4];
        for (k, p) in phys.iter_mut().enumerate() {
            *p = comp[Self::phys_to_comp(k)];
        }
        phys
    }

    /// Reorder a physical-order population vector into computational order.
    pub fn populations_to_computational(phys: [f64; 4]) -> [f64; 4] {
        let mut comp = [0.0; 4];
        for (k, p) in phys.iter().enumerate() {
            comp[Self::phys_to_comp(k)] = *p;
        }
        comp
    }

    /// Signs of a diagonal Pauli string (I/Z letters only) over the four
    /// physical states, in physical order.
    pub fn diagonal_signs(ops: [PauliOp; 2]) -> Result<[f64; 4], QcoreError> {
        let mut signs = [0.0; 4];
        for (k, s) in signs.iter_mut().enumerate() {
            let comp = Self::phys_to_comp(k);
            let (q1, q2) = (comp / 2, comp % 2);
            let s1 = ops[0]
                .diagonal_eigenvalue(q1)
                .ok_or(QcoreError::NotDiagonalPauli(ops[0].as_char()))?;
            let s2 = ops[1]
                .diagonal_eigenvalue(q2)
                .ok_or(QcoreError::NotDiagonalPauli(ops[1].as_char()))?;
            *s = s1 * s2;
        }
        Ok(signs)
    }
}
