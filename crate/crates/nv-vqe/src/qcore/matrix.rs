//! Dense complex matrices for the two-qubit (4-dimensional) Hilbert space.
//!
//! Everything in this crate lives in a fixed 4-dimensional space, so the
//! matrices are plain stack arrays rather than a generic linear-algebra
//! container.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

/// Complex double-precision scalar used throughout the crate.
pub type C64 = Complex64;

/// Dimension of the two-qubit Hilbert space.
pub const DIM: usize = 4;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A 2x2 complex matrix (single-qubit operators, reduced density matrices).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn zeros() -> Self {
        Mat2([[ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        m.0[0][0] = ONE;
        m.0[1][1] = ONE;
        m
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    /// Largest deviation from Hermiticity, max |m - m†| entrywise.
    pub fn hermiticity_residual(&self) -> f64 {
        let adj = self.adjoint();
        let mut r: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                r = r.max((self.0[i][j] - adj.0[i][j]).norm());
            }
        }
        r
    }
}

/// A 4x4 complex matrix over the two-qubit space.
///
/// Row-major; basis order |00>, |01>, |10>, |11> with qubit 1 (nuclear spin)
/// as the leading tensor factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4 {
    pub e: [[C64; DIM]; DIM],
}

impl Mat4 {
    pub fn zeros() -> Self {
        Mat4 {
            e: [[ZERO; DIM]; DIM],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..DIM {
            m.e[i][i] = ONE;
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                m.e[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn diagonal(d: [f64; DIM]) -> Self {
        let mut m = Self::zeros();
        for i in 0..DIM {
            m.e[i][i] = C64::new(d[i], 0.0);
        }
        m
    }

    /// Kronecker product of two single-qubit operators, qubit 1 ⊗ qubit 2.
    pub fn kron(a: &Mat2, b: &Mat2) -> Self {
        Mat4::from_fn(|i, j| a.0[i / 2][j / 2] * b.0[i % 2][j % 2])
    }

    pub fn trace(&self) -> C64 {
        (0..DIM).map(|i| self.e[i][i]).fold(ZERO, |acc, x| acc + x)
    }

    pub fn adjoint(&self) -> Self {
        Mat4::from_fn(|i, j| self.e[j][i].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat4::from_fn(|i, j| self.e[i][j] * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64; DIM]) -> [C64; DIM] {
        let mut out = [ZERO; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                out[i] += self.e[i][j] * v[j];
            }
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        let mut r: f64 = 0.0;
        for row in &self.e {
            for x in row {
                r = r.max(x.norm());
            }
        }
        r
    }

    /// Largest entrywise difference |self - other|.
    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                r = r.max((self.e[i][j] - other.e[i][j]).norm());
            }
        }
        r
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for row in &self.e {
            for x in row {
                s += x.norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Largest deviation from Hermiticity, max |m - m†| entrywise.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                r = r.max((self.e[i][j] - self.e[j][i].conj()).norm());
            }
        }
        r
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// Symmetrize: (m + m†)/2.
    pub fn hermitized(&self) -> Self {
        Mat4::from_fn(|i, j| (self.e[i][j] + self.e[j][i].conj()) * 0.5)
    }

    /// Commutator [self, other].
    pub fn commutator(&self, other: &Mat4) -> Self {
        *self * *other - *other * *self
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(self, rhs: Mat4) -> Mat4 {
        Mat4::from_fn(|i, j| self.e[i][j] + rhs.e[i][j])
    }
}

impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(self, rhs: Mat4) -> Mat4 {
        Mat4::from_fn(|i, j| self.e[i][j] - rhs.e[i][j])
    }
}

impl Neg for Mat4 {
    type Output = Mat4;
    fn neg(self) -> Mat4 {
        Mat4::from_fn(|i, j| -self.e[i][j])
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut m = Mat4::zeros();
        for i in 0..DIM {
            for k in 0..DIM {
                let a = self.e[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..DIM {
                    m.e[i][j] += a * rhs.e[k][j];
                }
            }
        }
        m
    }
}
