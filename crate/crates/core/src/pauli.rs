//! Sparse 2-local qubit Hamiltonians, their per-edge `(β, S, P)` data and the
//! local actions of `SO(3)` rotations and signed permutations on that data.
//!
//! Axis index 0 is X, 1 is Y and 2 is Z everywhere in this crate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance used for zero tests, rank decisions and the boundary
/// comparisons of the Z-matrix conditions.
pub const TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        match self {
            Pauli::X => 0,
            Pauli::Y => 1,
            Pauli::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Pauli {
        Pauli::ALL[i]
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error("a Hamiltonian needs at least one qubit")]
    NoQubits,
    #[error("qubit {qubit} is out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("two-local term acts twice on qubit {0}")]
    SameQubit(usize),
    #[error("coefficient {0} is not finite")]
    NonFinite(f64),
}

/// Key of a two-local coefficient `a^{uv}_{PQ}`, always stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairKey {
    pub u: usize,
    pub pu: Pauli,
    pub v: usize,
    pub pv: Pauli,
}

/// A 2-local qubit Hamiltonian `Σ a^{uv}_{PQ} P_u Q_v + Σ a^u_P P_u` with the
/// identity coefficient dropped. Exact zeros are not stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Hamiltonian {
    n_qubits: usize,
    one_local: BTreeMap<(usize, Pauli), f64>,
    two_local: BTreeMap<PairKey, f64>,
}

impl Hamiltonian {
    pub fn new(n_qubits: usize) -> Result<Self, HamiltonianError> {
        if n_qubits == 0 {
            return Err(HamiltonianError::NoQubits);
        }
        Ok(Hamiltonian {
            n_qubits,
            ..Default::default()
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn check_qubit(&self, q: usize) -> Result<(), HamiltonianError> {
        if q >= self.n_qubits {
            Err(HamiltonianError::QubitOutOfRange {
                qubit: q,
                n_qubits: self.n_qubits,
            })
        } else {
            Ok(())
        }
    }

    /// Adds `coeff · P_q`, summing with any existing coefficient.
    pub fn add_one_local(&mut self, q: usize, p: Pauli, coeff: f64) -> Result<(), HamiltonianError> {
        self.check_qubit(q)?;
        if !coeff.is_finite() {
            return Err(HamiltonianError::NonFinite(coeff));
        }
        accumulate(&mut self.one_local, (q, p), coeff);
        Ok(())
    }

    /// Adds `coeff · P_u Q_v`. Keys with `u > v` are stored transposed.
    pub fn add_two_local(
        &mut self,
        u: usize,
        pu: Pauli,
        v: usize,
        pv: Pauli,
        coeff: f64,
    ) -> Result<(), HamiltonianError> {
        self.check_qubit(u)?;
        self.check_qubit(v)?;
        if u == v {
            return Err(HamiltonianError::SameQubit(u));
        }
        if !coeff.is_finite() {
            return Err(HamiltonianError::NonFinite(coeff));
        }
        accumulate(&mut self.two_local, pair_key(u, pu, v, pv), coeff);
        Ok(())
    }

    pub fn one_local(&self, q: usize, p: Pauli) -> f64 {
        self.one_local.get(&(q, p)).copied().unwrap_or(0.0)
    }

    pub fn two_local(&self, u: usize, pu: Pauli, v: usize, pv: Pauli) -> f64 {
        if u == v {
            return 0.0;
        }
        self.two_local
            .get(&pair_key(u, pu, v, pv))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn one_local_terms(&self) -> impl Iterator<Item = (usize, Pauli, f64)> + '_ {
        self.one_local.iter().map(|(&(q, p), &c)| (q, p, c))
    }

    pub fn two_local_terms(&self) -> impl Iterator<Item = (PairKey, f64)> + '_ {
        self.two_local.iter().map(|(&k, &c)| (k, c))
    }

    pub fn n_terms(&self) -> usize {
        self.one_local.len() + self.two_local.len()
    }

    /// Qubit pairs `(u, v)`, `u < v`, carrying at least one two-local term.
    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        self.two_local.keys().map(|k| (k.u, k.v)).collect()
    }

    /// The 1-local coefficient vector `(a_X, a_Y, a_Z)` of qubit `q`.
    pub fn local_field(&self, q: usize) -> Vector3<f64> {
        Vector3::from_fn(|i, _| self.one_local(q, Pauli::from_index(i)))
    }

    /// Applies one rotation per qubit: `S_q → O_q S_q`, `β^{uv} → O_u β^{uv} O_vᵀ`.
    /// Resulting coefficients with magnitude below `1e-15` are dropped.
    pub fn rotated(&self, rotations: &[Rotation3]) -> Hamiltonian {
        assert_eq!(rotations.len(), self.n_qubits, "one rotation per qubit");
        let mut out = Hamiltonian {
            n_qubits: self.n_qubits,
            ..Default::default()
        };
        let qubits: BTreeSet<usize> = self.one_local.keys().map(|&(q, _)| q).collect();
        for q in qubits {
            let s = rotations[q].matrix() * self.local_field(q);
            for i in 0..3 {
                if s[i].abs() > 1e-15 {
                    out.one_local.insert((q, Pauli::from_index(i)), s[i]);
                }
            }
        }
        for (u, v) in self.edges() {
            let beta = rotations[u].matrix() * self.coupling(u, v) * rotations[v].matrix().transpose();
            for i in 0..3 {
                for j in 0..3 {
                    if beta[(i, j)].abs() > 1e-15 {
                        out.two_local.insert(
                            PairKey {
                                u,
                                pu: Pauli::from_index(i),
                                v,
                                pv: Pauli::from_index(j),
                            },
                            beta[(i, j)],
                        );
                    }
                }
            }
        }
        out
    }

    /// The 3×3 coupling matrix of the ordered pair `(u, v)`; rows act on `u`.
    pub fn coupling(&self, u: usize, v: usize) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.two_local(u, Pauli::from_index(i), v, Pauli::from_index(j)))
    }
}

fn pair_key(u: usize, pu: Pauli, v: usize, pv: Pauli) -> PairKey {
    if u < v {
        PairKey { u, pu, v, pv }
    } else {
        PairKey {
            u: v,
            pu: pv,
            v: u,
            pv: pu,
        }
    }
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, f64>, key: K, coeff: f64) {
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(slot) => {
            if coeff != 0.0 {
                slot.insert(coeff);
            }
        }
        Entry::Occupied(mut slot) => {
            *slot.get_mut() += coeff;
            if *slot.get() == 0.0 {
                slot.remove();
            }
        }
    }
}

/// Two-qubit data: coupling matrix `β` (rows on the first qubit), and the
/// 1-local vectors `S` (first qubit) and `P` (second qubit).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeData {
    pub beta: Matrix3<f64>,
    pub s: Vector3<f64>,
    pub p: Vector3<f64>,
}

impl EdgeData {
    pub fn new(beta: Matrix3<f64>, s: Vector3<f64>, p: Vector3<f64>) -> Self {
        EdgeData { beta, s, p }
    }

    pub fn coupling_only(beta: Matrix3<f64>) -> Self {
        EdgeData {
            beta,
            s: Vector3::zeros(),
            p: Vector3::zeros(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.beta.iter().chain(self.s.iter()).chain(self.p.iter()).all(|x| x.is_finite())
    }

    /// Rank of `β`, counting singular values above [`TOL`].
    pub fn rank(&self) -> usize {
        self.beta
            .singular_values()
            .iter()
            .filter(|s| **s > TOL)
            .count()
    }

    /// The same data as a two-qubit [`Hamiltonian`] on qubits 0 and 1.
    pub fn to_hamiltonian(&self) -> Hamiltonian {
        let mut h = Hamiltonian::new(2).expect("two qubits");
        for i in 0..3 {
            let p = Pauli::from_index(i);
            h.add_one_local(0, p, self.s[i]).expect("finite");
            h.add_one_local(1, p, self.p[i]).expect("finite");
            for j in 0..3 {
                h.add_two_local(0, p, 1, Pauli::from_index(j), self.beta[(i, j)])
                    .expect("finite");
            }
        }
        h
    }
}

/// Reads the edge data of the ordered pair `(u, v)`: `β[i][j] = a^{uv}_{ij}` and
/// the full current 1-local vectors of `u` and `v`.
pub fn extract_edge_data(h: &Hamiltonian, u: usize, v: usize) -> Result<EdgeData, HamiltonianError> {
    h.check_qubit(u)?;
    h.check_qubit(v)?;
    if u == v {
        return Err(HamiltonianError::SameQubit(u));
    }
    Ok(EdgeData {
        beta: h.coupling(u, v),
        s: h.local_field(u),
        p: h.local_field(v),
    })
}

/// An element of `SO(3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation3(Matrix3<f64>);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RotationError {
    #[error("matrix is not orthogonal (deviation {0:e})")]
    NotOrthogonal(f64),
    #[error("determinant is {0}, expected +1")]
    WrongDeterminant(f64),
}

impl Rotation3 {
    const CHECK_TOL: f64 = 1e-12;

    pub fn new(m: Matrix3<f64>) -> Result<Self, RotationError> {
        let dev = (m.transpose() * m - Matrix3::identity()).abs().max();
        if dev > Self::CHECK_TOL {
            return Err(RotationError::NotOrthogonal(dev));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > Self::CHECK_TOL {
            return Err(RotationError::WrongDeterminant(det));
        }
        Ok(Rotation3(m))
    }

    /// Wraps a matrix produced by products of rotations without re-checking it.
    pub(crate) fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        debug_assert!((m.determinant() - 1.0).abs() < 1e-8);
        Rotation3(m)
    }

    pub fn identity() -> Self {
        Rotation3(Matrix3::identity())
    }

    /// Right-handed rotation by `angle` about coordinate axis `axis` (0, 1, 2).
    pub fn about_axis(axis: usize, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let (a, b) = match axis {
            0 => (1, 2),
            1 => (2, 0),
            2 => (0, 1),
            _ => panic!("axis index {axis} out of range"),
        };
        let mut m = Matrix3::identity();
        m[(a, a)] = c;
        m[(b, b)] = c;
        m[(a, b)] = -s;
        m[(b, a)] = s;
        Rotation3(m)
    }

    /// Rodrigues rotation about `axis` (need not be normalised) by `angle`.
    pub fn from_axis_angle(axis: Vector3<f64>, angle: f64) -> Self {
        let n = axis.normalize();
        let k = Matrix3::new(0.0, -n.z, n.y, n.z, 0.0, -n.x, -n.y, n.x, 0.0);
        let m = Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos());
        Rotation3(m)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Rotation3) -> Rotation3 {
        Rotation3(self.0 * other.0)
    }

    pub fn inverse(&self) -> Rotation3 {
        Rotation3(self.0.transpose())
    }
}

/// Returns `(O1 β O2ᵀ, O1 S, O2 P)`.
pub fn apply_rotations(e: &EdgeData, o1: &Rotation3, o2: &Rotation3) -> EdgeData {
    EdgeData {
        beta: o1.0 * e.beta * o2.0.transpose(),
        s: o1.0 * e.s,
        p: o2.0 * e.p,
    }
}

/// A signed permutation matrix `R Π`: the permutation sends axis `m` to
/// `perm[m]` and `signs[r]` is the sign placed on output row `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation {
    perm: [usize; 3],
    signs: [i8; 3],
}

impl SignedPermutation {
    /// # Panics
    /// If `perm` is not a bijection on `{0,1,2}` or a sign is not ±1.
    pub fn new(perm: [usize; 3], signs: [i8; 3]) -> Self {
        let mut seen = [false; 3];
        for &p in &perm {
            assert!(p < 3 && !seen[p], "not a permutation: {perm:?}");
            seen[p] = true;
        }
        assert!(signs.iter().all(|s| *s == 1 || *s == -1), "signs must be ±1");
        SignedPermutation { perm, signs }
    }

    pub fn identity() -> Self {
        SignedPermutation {
            perm: [0, 1, 2],
            signs: [1, 1, 1],
        }
    }

    pub fn unsigned(perm: Permutation) -> Self {
        SignedPermutation {
            perm: perm.0,
            signs: [1, 1, 1],
        }
    }

    pub fn perm(&self) -> [usize; 3] {
        self.perm
    }

    pub fn permutation(&self) -> Permutation {
        Permutation(self.perm)
    }

    pub fn signs(&self) -> [i8; 3] {
        self.signs
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        for col in 0..3 {
            let row = self.perm[col];
            m[(row, col)] = f64::from(self.signs[row]);
        }
        m
    }

    pub fn det(&self) -> i8 {
        self.permutation().sign() * self.signs.iter().product::<i8>()
    }

    /// The rotation this element realises; `None` when `det = -1`.
    pub fn to_rotation(&self) -> Option<Rotation3> {
        (self.det() == 1).then(|| Rotation3(self.matrix()))
    }

    /// Reads a signed permutation off a matrix with exactly one ±1 per row and column.
    pub fn from_matrix(m: &Matrix3<f64>) -> Option<Self> {
        let mut perm = [usize::MAX; 3];
        let mut signs = [0i8; 3];
        for col in 0..3 {
            let mut hit = None;
            for row in 0..3 {
                let x = m[(row, col)];
                if (x.abs() - 1.0).abs() < 1e-12 {
                    if hit.is_some() {
                        return None;
                    }
                    hit = Some((row, if x > 0.0 { 1 } else { -1 }));
                } else if x.abs() > 1e-12 {
                    return None;
                }
            }
            let (row, sign) = hit?;
            perm[col] = row;
            signs[row] = sign;
        }
        let mut seen = [false; 3];
        for &p in &perm {
            if seen[p] {
                return None;
            }
            seen[p] = true;
        }
        Some(SignedPermutation { perm, signs })
    }

    /// All 48 signed permutations, permutations in lexicographic order of
    /// their images and, within one permutation, signs ordered with `+1 < -1`.
    pub fn all() -> &'static [SignedPermutation] {
        static ALL: OnceLock<Vec<SignedPermutation>> = OnceLock::new();
        ALL.get_or_init(|| {
            let mut out = Vec::with_capacity(48);
            for perm in Permutation::all() {
                for bits in 0..8u8 {
                    let sign = |k: u8| if bits & (4 >> k) == 0 { 1 } else { -1 };
                    out.push(SignedPermutation {
                        perm: perm.0,
                        signs: [sign(0), sign(1), sign(2)],
                    });
                }
            }
            out
        })
    }

    /// The 24 determinant-one elements (the single-qubit Clifford adjoint
    /// actions), in the same canonical order as [`SignedPermutation::all`].
    pub fn cliffords() -> &'static [SignedPermutation] {
        static CLIFFORD: OnceLock<Vec<SignedPermutation>> = OnceLock::new();
        CLIFFORD.get_or_init(|| {
            SignedPermutation::all()
                .iter()
                .copied()
                .filter(|s| s.det() == 1)
                .collect()
        })
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // images as 1-based axis labels with the output sign, e.g. "X→-Z"
        let mut first = true;
        for m in 0..3 {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let r = self.perm[m];
            let sign = if self.signs[r] < 0 { "-" } else { "+" };
            write!(f, "{}→{}{}", Pauli::from_index(m), sign, Pauli::from_index(r))?;
        }
        Ok(())
    }
}

/// An element of `S_3` acting on axis indices; `images[m]` is where `m` goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation(pub [usize; 3]);

impl Permutation {
    pub const IDENTITY: Permutation = Permutation([0, 1, 2]);

    /// All six permutations in lexicographic order of their images.
    pub fn all() -> [Permutation; 6] {
        [
            Permutation([0, 1, 2]),
            Permutation([0, 2, 1]),
            Permutation([1, 0, 2]),
            Permutation([1, 2, 0]),
            Permutation([2, 0, 1]),
            Permutation([2, 1, 0]),
        ]
    }

    pub fn apply(&self, m: usize) -> usize {
        self.0[m]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = [0; 3];
        for (m, &r) in self.0.iter().enumerate() {
            inv[r] = m;
        }
        Permutation(inv)
    }

    pub fn sign(&self) -> i8 {
        let mut inversions = 0;
        for i in 0..3 {
            for j in i + 1..3 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Images as 1-based labels, e.g. `[1, 3, 2]` for the transposition (23).
    pub fn one_based(&self) -> [usize; 3] {
        [self.0[0] + 1, self.0[1] + 1, self.0[2] + 1]
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.one_based();
        write!(f, "[{a}{b}{c}]")
    }
}

/// `𝚷_u β 𝚷_vᵀ`.
pub fn apply_signed_permutations(
    beta: &Matrix3<f64>,
    pu: &SignedPermutation,
    pv: &SignedPermutation,
) -> Matrix3<f64> {
    pu.matrix() * beta * pv.matrix().transpose()
}

/// Whether the two-qubit Hamiltonian described by `e` is a symmetric Z-matrix:
/// every coefficient with one Y factor vanishes, `a_XX ≤ -|a_YY|`,
/// `a_IX ≤ -|a_ZX|` and `a_XI ≤ -|a_XZ|`, all within [`TOL`].
pub fn is_z_matrix_2q(e: &EdgeData) -> bool {
    let b = &e.beta;
    let imaginary = [b[(0, 1)], b[(1, 0)], b[(2, 1)], b[(1, 2)], e.s[1], e.p[1]];
    if imaginary.iter().any(|x| x.abs() > TOL) {
        return false;
    }
    b[(0, 0)] <= -b[(1, 1)].abs() + TOL
        && e.p[0] <= -b[(2, 0)].abs() + TOL
        && e.s[0] <= -b[(0, 2)].abs() + TOL
}

/// A Hamiltonian is real in the computational basis iff no stored term has an
/// odd number of Y factors.
pub fn is_real_fixed_basis(h: &Hamiltonian) -> bool {
    let one = h
        .one_local_terms()
        .all(|(_, p, c)| p != Pauli::Y || c.abs() <= TOL);
    let two = h.two_local_terms().all(|(k, c)| {
        let ys = usize::from(k.pu == Pauli::Y) + usize::from(k.pv == Pauli::Y);
        ys % 2 == 0 || c.abs() <= TOL
    });
    one && two
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn ham(n: usize) -> Hamiltonian {
        Hamiltonian::new(n).unwrap()
    }

    #[test]
    fn extract_single_xx() {
        let mut h = ham(2);
        h.add_two_local(0, Pauli::X, 1, Pauli::X, 1.0).unwrap();
        let e = extract_edge_data(&h, 0, 1).unwrap();
        let mut expected = Matrix3::zeros();
        expected[(0, 0)] = 1.0;
        assert_eq!(e.beta, expected);
        assert_eq!(e.s, Vector3::zeros());
        assert_eq!(e.p, Vector3::zeros());
    }

    #[test]
    fn extract_counterexample_family() {
        // a_Z (Z1 + Z2) - a_X (X1 + X2) + a_XX X1 X2 + Z1 Z2
        let (az, ax, axx) = (0.5, 2.0, 0.2);
        let mut h = ham(2);
        for q in 0..2 {
            h.add_one_local(q, Pauli::Z, az).unwrap();
            h.add_one_local(q, Pauli::X, -ax).unwrap();
        }
        h.add_two_local(0, Pauli::X, 1, Pauli::X, axx).unwrap();
        h.add_two_local(0, Pauli::Z, 1, Pauli::Z, 1.0).unwrap();
        let e = extract_edge_data(&h, 0, 1).unwrap();
        assert_eq!(e.beta, Matrix3::from_diagonal(&Vector3::new(0.2, 0.0, 1.0)));
        assert_eq!(e.s, Vector3::new(-2.0, 0.0, 0.5));
        assert_eq!(e.p, Vector3::new(-2.0, 0.0, 0.5));
    }

    #[test]
    fn extract_yz_and_transposed_order() {
        let mut h = ham(3);
        h.add_two_local(0, Pauli::Y, 1, Pauli::Z, 1.0).unwrap();
        let e = extract_edge_data(&h, 0, 1).unwrap();
        assert_eq!(e.beta[(1, 2)], 1.0);
        assert_eq!(e.beta.iter().filter(|x| **x != 0.0).count(), 1);
        // reversed pair sees the transpose
        let r = extract_edge_data(&h, 1, 0).unwrap();
        assert_eq!(r.beta[(2, 1)], 1.0);
        // stored with u > v gets normalised
        let mut h2 = ham(3);
        h2.add_two_local(2, Pauli::X, 0, Pauli::Z, 3.0).unwrap();
        assert_eq!(h2.two_local(0, Pauli::Z, 2, Pauli::X), 3.0);
    }

    #[test]
    fn extract_rejects_bad_vertices() {
        let h = ham(2);
        assert!(matches!(
            extract_edge_data(&h, 0, 2),
            Err(HamiltonianError::QubitOutOfRange { .. })
        ));
        assert!(matches!(extract_edge_data(&h, 1, 1), Err(HamiltonianError::SameQubit(1))));
    }

    #[test]
    fn duplicate_terms_sum_and_cancel() {
        let mut h = ham(2);
        h.add_one_local(0, Pauli::X, 1.0).unwrap();
        h.add_one_local(0, Pauli::X, 2.0).unwrap();
        assert_eq!(h.one_local(0, Pauli::X), 3.0);
        h.add_one_local(0, Pauli::X, -3.0).unwrap();
        assert_eq!(h.n_terms(), 0);
        assert!(h.add_one_local(0, Pauli::Z, f64::NAN).is_err());
    }

    #[test]
    fn rotations_identity_and_swap() {
        let e = EdgeData::new(
            Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, 3.0)),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 0.0, 1.0),
        );
        let id = Rotation3::identity();
        assert_eq!(apply_rotations(&e, &id, &id), e);
        // axes 1 <-> 3 swapped with a sign to keep det = +1
        let swap = SignedPermutation::new([2, 1, 0], [1, -1, 1]).to_rotation().unwrap();
        let out = apply_rotations(&e, &swap, &swap);
        assert_eq!(out.beta, Matrix3::from_diagonal(&Vector3::new(3.0, 2.0, 1.0)));
    }

    #[test]
    fn rotation_about_y_of_rank_one() {
        let th = 0.3;
        let e = EdgeData::coupling_only(Matrix3::from_diagonal(&Vector3::new(1.0, 0.0, 0.0)));
        let out = apply_rotations(&e, &Rotation3::about_axis(1, th), &Rotation3::identity());
        // R_y(θ) e_x = (cos θ, 0, -sin θ)
        assert!((out.beta[(0, 0)] - th.cos()).abs() < 1e-15);
        assert!((out.beta[(2, 0)] + th.sin()).abs() < 1e-15);
        assert_eq!(out.beta.column(1).norm(), 0.0);
    }

    #[test]
    fn rotation_validation() {
        assert!(Rotation3::new(Matrix3::identity() * 2.0).is_err());
        assert!(matches!(
            Rotation3::new(Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0))),
            Err(RotationError::WrongDeterminant(_))
        ));
        assert!(Rotation3::new(*Rotation3::about_axis(2, PI / 3.0).matrix()).is_ok());
    }

    #[test]
    fn signed_permutation_examples() {
        let beta = Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, 3.0));
        let id = SignedPermutation::identity();
        assert_eq!(apply_signed_permutations(&beta, &id, &id), beta);
        let swap = SignedPermutation::new([2, 1, 0], [1, 1, 1]);
        assert_eq!(
            apply_signed_permutations(&beta, &swap, &swap),
            Matrix3::from_diagonal(&Vector3::new(3.0, 2.0, 1.0))
        );
        // different permutations on a rank-2 weight leave the diagonal
        let rank2 = Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, 0.0));
        let other = SignedPermutation::new([1, 0, 2], [1, 1, 1]);
        let out = apply_signed_permutations(&rank2, &id, &other);
        assert!(out[(0, 1)] != 0.0 || out[(1, 0)] != 0.0);
    }

    #[test]
    fn same_permutation_gives_signed_diagonal() {
        let beta = Matrix3::from_diagonal(&Vector3::new(1.5, -2.0, 3.0));
        for pu in SignedPermutation::all() {
            for pv in SignedPermutation::all() {
                if pu.perm() != pv.perm() {
                    continue;
                }
                let out = apply_signed_permutations(&beta, pu, pv);
                for m in 0..3 {
                    let r = pu.perm()[m];
                    let expected = f64::from(pu.signs()[r] * pv.signs()[r]) * beta[(m, m)];
                    assert_eq!(out[(r, r)], expected);
                }
                assert_eq!(out.sum() - out.trace(), 0.0);
            }
        }
    }

    #[test]
    fn clifford_enumeration() {
        let c = SignedPermutation::cliffords();
        assert_eq!(SignedPermutation::all().len(), 48);
        assert_eq!(c.len(), 24);
        assert_eq!(c[0], SignedPermutation::identity());
        let unique: BTreeSet<_> = c.iter().collect();
        assert_eq!(unique.len(), 24);
        for s in c {
            assert!((s.matrix().determinant() - 1.0).abs() < 1e-15);
            assert_eq!(SignedPermutation::from_matrix(&s.matrix()), Some(*s));
        }
    }

    #[test]
    fn z_matrix_two_qubit_examples() {
        // o1 = -XX - YY
        let o1 = EdgeData::coupling_only(Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 0.0)));
        assert!(is_z_matrix_2q(&o1));
        let yy = EdgeData::coupling_only(Matrix3::from_diagonal(&Vector3::new(0.0, 1.0, 0.0)));
        assert!(!is_z_matrix_2q(&yy));
        // o3 = -|0><0| ⊗ X = -(IX + ZX)/2
        let mut beta = Matrix3::zeros();
        beta[(2, 0)] = -0.5;
        let o3 = EdgeData::new(beta, Vector3::zeros(), Vector3::new(-0.5, 0.0, 0.0));
        assert!(is_z_matrix_2q(&o3));
        // an imaginary coefficient is never allowed
        let mut beta = Matrix3::zeros();
        beta[(0, 1)] = 1e-6;
        assert!(!is_z_matrix_2q(&EdgeData::coupling_only(beta)));
    }

    #[test]
    fn fixed_basis_realness() {
        let mut h = ham(3);
        h.add_two_local(0, Pauli::Y, 1, Pauli::Y, 1.0).unwrap();
        h.add_one_local(2, Pauli::Z, 1.0).unwrap();
        assert!(is_real_fixed_basis(&h));
        let mut h = ham(2);
        h.add_two_local(0, Pauli::Y, 1, Pauli::Z, 1.0).unwrap();
        assert!(!is_real_fixed_basis(&h));
        let mut h = ham(2);
        h.add_two_local(0, Pauli::X, 1, Pauli::Y, 1.0).unwrap();
        h.add_two_local(0, Pauli::Y, 1, Pauli::X, 1.0).unwrap();
        assert!(!is_real_fixed_basis(&h));
    }

    fn arb_rotation() -> impl Strategy<Value = Rotation3> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.0..(2.0 * PI)).prop_filter_map(
            "non-degenerate axis",
            |(x, y, z, a)| {
                let axis = Vector3::new(x, y, z);
                (axis.norm() > 1e-3).then(|| Rotation3::from_axis_angle(axis, a))
            },
        )
    }

    fn arb_edge() -> impl Strategy<Value = EdgeData> {
        (
            proptest::array::uniform9(-2.0..2.0f64),
            proptest::array::uniform3(-2.0..2.0f64),
            proptest::array::uniform3(-2.0..2.0f64),
        )
            .prop_map(|(b, s, p)| {
                EdgeData::new(Matrix3::from_row_slice(&b), Vector3::from(s), Vector3::from(p))
            })
    }

    proptest! {
        #[test]
        fn rotations_form_a_group_action(
            e in arb_edge(),
            a1 in arb_rotation(), a2 in arb_rotation(),
            b1 in arb_rotation(), b2 in arb_rotation(),
        ) {
            let twice = apply_rotations(&apply_rotations(&e, &a1, &a2), &b1, &b2);
            let once = apply_rotations(&e, &b1.compose(&a1), &b2.compose(&a2));
            prop_assert!((twice.beta - once.beta).abs().max() < 1e-12);
            prop_assert!((twice.s - once.s).abs().max() < 1e-12);
            prop_assert!((twice.p - once.p).abs().max() < 1e-12);
        }

        #[test]
        fn axis_angle_is_a_rotation(r in arb_rotation()) {
            prop_assert!(Rotation3::new(*r.matrix()).is_ok());
        }
    }
}
