//! Hermitian eigensolver for the 4-dimensional space.
//!
//! Cyclic Jacobi rotations on the complex Hermitian matrix. At this size an
//! iterative scheme converges in a handful of sweeps and needs no external
//! solver; the convergence threshold is 1e-14 on the off-diagonal norm.

use super::matrix::{C64, DIM, Mat4, ZERO};
use super::QcoreError;

const OFF_DIAGONAL_TOL: f64 = 1e-14;
const HERMITICITY_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 128;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: [f64; DIM],
    /// `vectors[k]` is the eigenvector for `values[k]`.
    pub vectors: [[C64; DIM]; DIM],
}

impl Eigensystem {
    /// Rebuild Σ λᵢ vᵢvᵢ† from the eigenpairs.
    pub fn reconstruct(&self) -> Mat4 {
        let mut m = Mat4::zeros();
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    m.e[i][j] += self.vectors[k][i] * self.vectors[k][j].conj() * self.values[k];
                }
            }
        }
        m
    }

    /// Projector onto the span of eigenvectors with the given indices.
    /// Degenerate clusters are compared through projectors, not individual
    /// vectors.
    pub fn projector(&self, indices: &[usize]) -> Mat4 {
        let mut m = Mat4::zeros();
        for &k in indices {
            for i in 0..DIM {
                for j in 0..DIM {
                    m.e[i][j] += self.vectors[k][i] * self.vectors[k][j].conj();
                }
            }
        }
        m
    }
}

fn off_diagonal_norm(m: &Mat4) -> f64 {
    let mut s = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            if i != j {
                s += m.e[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalize a Hermitian 4x4 matrix.
///
/// Rejects inputs whose Hermiticity residual exceeds 1e-10. Eigenvalues come
/// back sorted ascending; eigenvectors are columns of the accumulated unitary
/// and therefore orthonormal, including inside degenerate clusters.
pub fn hermitian_eigensystem(m: &Mat4) -> Result<Eigensystem, QcoreError> {
    let residual = m.hermiticity_residual();
    if residual > HERMITICITY_TOL {
        return Err(QcoreError::NotHermitian {
            residual,
            tolerance: HERMITICITY_TOL,
        });
    }

    let mut a = m.hermitized();
    let mut v = Mat4::identity();
    let tol = OFF_DIAGONAL_TOL * a.frobenius_norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            break;
        }
        for p in 0..DIM {
            for q in (p + 1)..DIM {
                let apq = a.e[p][q];
                let r = apq.norm();
                if r <= tol / (DIM as f64) {
                    continue;
                }
                let phi = apq.arg();
                let tau = (a.e[p][p].re - a.e[q][q].re) / (2.0 * r);
                // Smaller root of t² + 2τt − 1 = 0 keeps |θ| ≤ π/4.
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Unitary rotation in the (p, q) plane that zeroes a[p][q].
                let mut u = Mat4::identity();
                u.e[p][p] = C64::new(c, 0.0);
                u.e[p][q] = -C64::from_polar(s, phi);
                u.e[q][p] = C64::from_polar(s, -phi);
                u.e[q][q] = C64::new(c, 0.0);

                a = (u.adjoint() * a * u).hermitized();
                v = v * u;
            }
        }
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| a.e[i][i].re.total_cmp(&a.e[j][j].re));

    let mut values = [0.0; DIM];
    let mut vectors = [[ZERO; DIM]; DIM];
    for (k, &col) in order.iter().enumerate() {
        values[k] = a.e[col][col].re;
        for i in 0..DIM {
            vectors[k][i] = v.e[i][col];
        }
    }
    Ok(Eigensystem { values, vectors })
}

/// Convenience: smallest eigenvalue and its eigenvector.
pub fn ground_state(m: &Mat4) -> Result<(f64, [C64; DIM]), QcoreError> {
    let eig = hermitian_eigensystem(m)?;
    Ok((eig.values[0], eig.vectors[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::PauliSum;
    use crate::qcore::matrix::ONE;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn residual(m: &Mat4, lambda: f64, v: &[C64; DIM]) -> f64 {
        let mv = m.apply(v);
        (0..DIM)
            .map(|i| (mv[i] - v[i] * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn random_hermitian(rng: &mut StdRng) -> Mat4 {
        let g = Mat4::from_fn(|_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (g + g.adjoint()).scale_re(0.5)
    }

    #[test]
    fn spectrum_of_the_studied_hamiltonian() {
        // Block-diagonalizes over {|00>, |11>} and {|01>, |10>} into
        // [[2,1],[1,-2]] and [[0,1],[1,0]], giving ±sqrt(5) and ±1.
        let h = PauliSum::from_labels(&[("XX", 1.0), ("ZI", 1.0), ("IZ", 1.0)]).unwrap();
        let eig = hermitian_eigensystem(&h.matrix()).unwrap();
        let sqrt5 = 5.0_f64.sqrt();
        let want = [-sqrt5, -1.0, 1.0, sqrt5];
        for (got, want) in eig.values.iter().zip(want.iter()) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        for k in 0..DIM {
            assert!(residual(&h.matrix(), eig.values[k], &eig.vectors[k]) < 1e-10);
        }
    }

    #[test]
    fn ground_state_amplitudes_match_the_closed_form() {
        // Lowest eigenvector: (-sqrt(50-20*sqrt(5))/10) |00> +
        // (sqrt(50+20*sqrt(5))/10) |11>, up to global phase.
        let h = PauliSum::from_labels(&[("XX", 1.0), ("ZI", 1.0), ("IZ", 1.0)]).unwrap();
        let (val, vec) = ground_state(&h.matrix()).unwrap();
        assert!((val + 5.0_f64.sqrt()).abs() < 1e-12);

        let a = -(50.0 - 20.0 * 5.0_f64.sqrt()).sqrt() / 10.0;
        let b = (50.0 + 20.0 * 5.0_f64.sqrt()).sqrt() / 10.0;
        // Fix the global phase by aligning on the |11> component.
        let phase = vec[3] / C64::new(vec[3].norm(), 0.0);
        let aligned: Vec<C64> = vec.iter().map(|x| x / phase).collect();
        assert!((aligned[0] - C64::new(a, 0.0)).norm() < 1e-10);
        assert!(aligned[1].norm() < 1e-10);
        assert!(aligned[2].norm() < 1e-10);
        assert!((aligned[3] - C64::new(b, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn diagonal_matrix_is_already_solved() {
        let m = Mat4::diagonal([1.0, 2.0, 3.0, 4.0]);
        let eig = hermitian_eigensystem(&m).unwrap();
        assert_eq!(eig.values, [1.0, 2.0, 3.0, 4.0]);
        for k in 0..DIM {
            for i in 0..DIM {
                let want = if i == k { 1.0 } else { 0.0 };
                assert!((eig.vectors[k][i].norm() - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut m = Mat4::identity();
        m.e[0][1] = ONE;
        assert!(matches!(
            hermitian_eigensystem(&m),
            Err(QcoreError::NotHermitian { .. })
        ));
    }

    #[test]
    fn reconstruction_over_random_hermitian_matrices() {
        let mut rng = StdRng::seed_from_u64(0x51CA_11E5);
        for _ in 0..1000 {
            let m = random_hermitian(&mut rng);
            let eig = hermitian_eigensystem(&m).unwrap();
            assert!(eig.reconstruct().max_abs_diff(&m) < 1e-9);
            for k in 0..DIM {
                assert!(residual(&m, eig.values[k], &eig.vectors[k]) < 1e-9);
            }
            for k in 1..DIM {
                assert!(eig.values[k] >= eig.values[k - 1]);
            }
        }
    }

    #[test]
    fn degenerate_spectrum_compared_through_projectors() {
        // ZZ has eigenvalues (-1, -1, 1, 1); the degenerate subspaces are the
        // spans of {|01>, |10>} and {|00>, |11>}.
        let h = PauliSum::from_labels(&[("ZZ", 1.0)]).unwrap();
        let eig = hermitian_eigensystem(&h.matrix()).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-12);
        assert!((eig.values[1] + 1.0).abs() < 1e-12);
        assert!((eig.values[2] - 1.0).abs() < 1e-12);
        assert!((eig.values[3] - 1.0).abs() < 1e-12);

        let minus = eig.projector(&[0, 1]);
        let mut want = Mat4::zeros();
        want.e[1][1] = ONE;
        want.e[2][2] = ONE;
        assert!(minus.max_abs_diff(&want) < 1e-10);
    }
}
