//! Deciding whether 2-local qubit Hamiltonians are stoquastic under local
//! basis changes.
//!
//! * [`pauli`]: Hamiltonians, per-edge `(β, S, P)` data, rotations and
//!   signed permutations, Z-matrix tests.
//! * [`two_qubit`]: realness invariants, standard form and the rotation
//!   search for a single pair of qubits.
//! * [`decomposer`]: fixed-basis cone membership and the uniform bipartite shortcut.
//! * [`xyz`]: the polynomial-time decision procedure for XYZ Heisenberg models.
//! * [`oracle`]: brute-force and dense-matrix ground truth.
//! * [`rxc3`]: the exact-cover reduction to Clifford realness.
//! * [`io`]: text formats for Hamiltonians and exact-cover instances.

pub mod decomposer;
pub mod io;
pub mod ising;
pub mod oracle;
pub mod par;
pub mod pauli;
pub mod rxc3;
pub mod two_qubit;
pub mod xyz;

pub use par::Execution;
pub use pauli::{
    apply_rotations, apply_signed_permutations, extract_edge_data, is_real_fixed_basis,
    is_z_matrix_2q, EdgeData, Hamiltonian, HamiltonianError, Pauli, Permutation, Rotation3,
    SignedPermutation, TOL,
};
pub use two_qubit::{decide_stoquastic_2q, is_real_locally, triple_invariants, TwoQubitDecision};
pub use xyz::{decide_xyz, XyzDecision};
