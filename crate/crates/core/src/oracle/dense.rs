//! Dense `2ⁿ × 2ⁿ` matrices for small Hamiltonians and explicit local unitaries.

use nalgebra::{DMatrix, Matrix2, Vector3};
use num_complex::Complex64;

use super::OracleError;
use crate::pauli::{Hamiltonian, Pauli, Rotation3, SignedPermutation};

pub const DENSE_CAP: usize = 12;

/// Qubit 0 is the most significant bit of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseHamiltonian {
    n: usize,
    entries: DMatrix<Complex64>,
}

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `σ|b⟩ = phase · |b'⟩` for one qubit.
fn pauli_action(p: Pauli, bit: usize) -> (usize, Complex64) {
    match p {
        Pauli::X => (bit ^ 1, Complex64::new(1.0, 0.0)),
        Pauli::Y => (bit ^ 1, if bit == 0 { I } else { -I }),
        Pauli::Z => (bit, Complex64::new(if bit == 0 { 1.0 } else { -1.0 }, 0.0)),
    }
}

fn pauli_matrix(p: Pauli) -> Matrix2<Complex64> {
    Matrix2::from_fn(|r, c| {
        let (out, phase) = pauli_action(p, c);
        if out == r {
            phase
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

impl DenseHamiltonian {
    pub fn from_hamiltonian(h: &Hamiltonian) -> Result<Self, OracleError> {
        let n = h.n_qubits();
        if n > DENSE_CAP {
            return Err(OracleError::TooLarge { n, cap: DENSE_CAP });
        }
        let dim = 1usize << n;
        let mut entries = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        let shift = |q: usize| n - 1 - q;
        let mut add = |factors: &[(usize, Pauli)], coeff: f64| {
            for x in 0..dim {
                let mut y = x;
                let mut phase = Complex64::new(coeff, 0.0);
                for &(q, p) in factors {
                    let bit = (x >> shift(q)) & 1;
                    let (b, ph) = pauli_action(p, bit);
                    y = (y & !(1 << shift(q))) | (b << shift(q));
                    phase *= ph;
                }
                entries[(y, x)] += phase;
            }
        };
        for (q, p, c) in h.one_local_terms() {
            add(&[(q, p)], c);
        }
        for (k, c) in h.two_local_terms() {
            add(&[(k.u, k.pu), (k.v, k.pv)], c);
        }
        Ok(DenseHamiltonian { n, entries })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let m = &self.entries;
        (m - m.adjoint()).iter().all(|z| z.norm() <= tol)
    }

    /// `(U_q) H (U_q)†` with `U_q` acting on qubit `q` only.
    pub fn conjugate_qubit(&mut self, q: usize, u: &Matrix2<Complex64>) {
        let dim = self.dim();
        let bit = 1usize << (self.n - 1 - q);
        let m = &mut self.entries;
        for c in 0..dim {
            for r0 in (0..dim).filter(|r| r & bit == 0) {
                let r1 = r0 | bit;
                let (a, b) = (m[(r0, c)], m[(r1, c)]);
                m[(r0, c)] = u[(0, 0)] * a + u[(0, 1)] * b;
                m[(r1, c)] = u[(1, 0)] * a + u[(1, 1)] * b;
            }
        }
        for r in 0..dim {
            for c0 in (0..dim).filter(|c| c & bit == 0) {
                let c1 = c0 | bit;
                let (a, b) = (m[(r, c0)], m[(r, c1)]);
                m[(r, c0)] = a * u[(0, 0)].conj() + b * u[(0, 1)].conj();
                m[(r, c1)] = a * u[(1, 0)].conj() + b * u[(1, 1)].conj();
            }
        }
    }

    /// Real, symmetric and with off-diagonal entries `≤ tol`, all up to `tol`.
    pub fn is_symmetric_z_matrix(&self, tol: f64) -> bool {
        let m = &self.entries;
        let dim = self.dim();
        for r in 0..dim {
            for c in 0..dim {
                let z = m[(r, c)];
                if z.im.abs() > tol || (z.re - m[(c, r)].re).abs() > tol {
                    return false;
                }
                if r != c && z.re > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// The SU(2) element `exp(-iθ n·σ / 2)` whose adjoint action on Pauli
/// vectors is `o`: `U σ_j U† = Σ_i o_ij σ_i`.
pub fn su2_from_rotation(o: &Rotation3) -> Matrix2<Complex64> {
    let rot = nalgebra::Rotation3::from_matrix_unchecked(*o.matrix());
    let q = nalgebra::UnitQuaternion::from_rotation_matrix(&rot);
    let (w, n) = (q.w, Vector3::new(q.i, q.j, q.k));
    let ns = pauli_matrix(Pauli::X) * Complex64::from(n.x)
        + pauli_matrix(Pauli::Y) * Complex64::from(n.y)
        + pauli_matrix(Pauli::Z) * Complex64::from(n.z);
    Matrix2::identity() * Complex64::from(w) - ns * I
}

/// The adjoint action `o_ij = ½ tr(σ_i U σ_j U†)`.
pub fn adjoint_action(u: &Matrix2<Complex64>) -> nalgebra::Matrix3<f64> {
    nalgebra::Matrix3::from_fn(|i, j| {
        let si = pauli_matrix(Pauli::from_index(i));
        let sj = pauli_matrix(Pauli::from_index(j));
        (si * u * sj * u.adjoint()).trace().re / 2.0
    })
}

/// A per-qubit basis change given either as a Clifford or as a rotation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LocalBasis {
    Clifford(SignedPermutation),
    Rotation(Rotation3),
}

impl LocalBasis {
    pub fn rotation(&self) -> Option<Rotation3> {
        match self {
            LocalBasis::Clifford(sp) => sp.to_rotation(),
            LocalBasis::Rotation(r) => Some(*r),
        }
    }
}

impl From<SignedPermutation> for LocalBasis {
    fn from(sp: SignedPermutation) -> Self {
        LocalBasis::Clifford(sp)
    }
}

impl From<Rotation3> for LocalBasis {
    fn from(r: Rotation3) -> Self {
        LocalBasis::Rotation(r)
    }
}

/// Builds `H` densely, conjugates it by `⊗_q U_q` and checks that the result is
/// a symmetric Z-matrix up to `1e-12` times the total coefficient weight.
pub fn dense_z_check(h: &Hamiltonian, assignment: &[LocalBasis]) -> Result<bool, OracleError> {
    if assignment.len() != h.n_qubits() {
        return Err(OracleError::AssignmentLength {
            expected: h.n_qubits(),
            got: assignment.len(),
        });
    }
    let mut dense = DenseHamiltonian::from_hamiltonian(h)?;
    for (q, b) in assignment.iter().enumerate() {
        let r = b.rotation().ok_or(OracleError::NotARotation { qubit: q })?;
        dense.conjugate_qubit(q, &su2_from_rotation(&r));
    }
    let weight: f64 = h.one_local_terms().map(|(_, _, c)| c.abs()).sum::<f64>()
        + h.two_local_terms().map(|(_, c)| c.abs()).sum::<f64>();
    Ok(dense.is_symmetric_z_matrix(1e-12 * weight.max(1.0)))
}
