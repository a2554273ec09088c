//! Independent ground truth: exhaustive Clifford search, dense Z-matrix
//! checks, the Π-reduction, seeded instance generation and numeric searches.

pub mod dense;
pub mod numeric;

use std::collections::BTreeSet;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use dense::{adjoint_action, dense_z_check, su2_from_rotation, DenseHamiltonian, LocalBasis, DENSE_CAP};
pub use numeric::{
    continuous_stoquastic_search, grid_search_2q, levenberg_marquardt, min_imaginary_residual, LmResult,
};

use crate::ising::{IsingInstance, Spins};
use crate::pauli::{Hamiltonian, Pauli, Permutation, Rotation3, SignedPermutation, TOL};
use crate::xyz::signed_from;
use crate::Execution;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{n} qubits exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("assignment has {got} entries for {expected} qubits")]
    AssignmentLength { expected: usize, got: usize },
    #[error("basis change on qubit {qubit} is not a rotation")]
    NotARotation { qubit: usize },
    #[error("coefficient set has no nonzero value")]
    EmptyCoeffSet,
    #[error("density {0} is outside [0, 1]")]
    BadDensity(f64),
    #[error("need at least two qubits, got {0}")]
    TooFewQubits(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Every off-diagonal entry real and non-positive.
    ZMatrix,
    /// No term with an odd number of Y factors.
    Realness,
}

pub const DEFAULT_CAP: usize = 6;

struct Prepared {
    n: usize,
    fields: Vec<Vector3<f64>>,
    /// `(v, β^{uv})` with rows on `u`, for every neighbour `v` of `u`.
    nbrs: Vec<Vec<(usize, Matrix3<f64>)>>,
    /// Vertices whose neighbourhood is fully assigned once qubit `k` is.
    closes_at: Vec<Vec<usize>>,
}

impl Prepared {
    fn new(h: &Hamiltonian) -> Self {
        let n = h.n_qubits();
        let mut nbrs = vec![Vec::new(); n];
        for (u, v) in h.edges() {
            let b = h.coupling(u, v);
            nbrs[u].push((v, b));
            nbrs[v].push((u, b.transpose()));
        }
        let mut closes_at = vec![Vec::new(); n];
        for (u, list) in nbrs.iter().enumerate() {
            let last = list.iter().map(|&(v, _)| v).max().unwrap_or(u).max(u);
            closes_at[last].push(u);
        }
        Prepared {
            n,
            fields: (0..n).map(|q| h.local_field(q)).collect(),
            nbrs,
            closes_at,
        }
    }
}

fn zero(x: f64) -> bool {
    x.abs() <= TOL
}

fn edge_ok(b: &Matrix3<f64>, mode: SearchMode) -> bool {
    let real = zero(b[(0, 1)]) && zero(b[(1, 0)]) && zero(b[(1, 2)]) && zero(b[(2, 1)]);
    match mode {
        SearchMode::Realness => real,
        SearchMode::ZMatrix => real && b[(0, 0)] <= -b[(1, 1)].abs() + TOL,
    }
}

struct Search<'a> {
    prep: &'a Prepared,
    mode: SearchMode,
    choices: Vec<SignedPermutation>,
    assigned: Vec<Matrix3<f64>>,
    picks: Vec<usize>,
}

impl Search<'_> {
    fn consistent(&self, k: usize) -> bool {
        let ok = &self.assigned[k];
        let s = ok * self.prep.fields[k];
        if !zero(s[1]) {
            return false;
        }
        for &(v, b) in &self.prep.nbrs[k] {
            if v < k && !edge_ok(&(ok * b * self.assigned[v].transpose()), self.mode) {
                return false;
            }
        }
        if self.mode == SearchMode::ZMatrix {
            for &u in &self.prep.closes_at[k] {
                let ou = &self.assigned[u];
                let su = ou * self.prep.fields[u];
                let budget: f64 = self.prep.nbrs[u]
                    .iter()
                    .map(|&(v, b)| (ou * b * self.assigned[v].transpose())[(0, 2)].abs())
                    .sum();
                if su[0] + budget > TOL {
                    return false;
                }
            }
        }
        true
    }

    fn descend(&mut self, k: usize) -> bool {
        if k == self.prep.n {
            return true;
        }
        for i in 0..self.choices.len() {
            self.assigned[k] = self.choices[i].matrix();
            self.picks[k] = i;
            if self.consistent(k) && self.descend(k + 1) {
                return true;
            }
        }
        false
    }
}

/// First assignment, in lexicographic order of the 24 rotations (or the 6
/// permutations in realness mode) over qubits `0, 1, …`, for which the
/// transformed Hamiltonian passes `mode`.
pub fn brute_force_clifford(
    h: &Hamiltonian,
    mode: SearchMode,
    cap: usize,
    exec: Execution,
) -> Result<Option<Vec<SignedPermutation>>, OracleError> {
    let n = h.n_qubits();
    if n > cap {
        return Err(OracleError::TooLarge { n, cap });
    }
    let choices: Vec<SignedPermutation> = match mode {
        SearchMode::ZMatrix => SignedPermutation::cliffords().to_vec(),
        SearchMode::Realness => Permutation::all().iter().map(|&p| signed_from(p, 1)).collect(),
    };
    let prep = Prepared::new(h);
    Ok(exec.find_first(choices.len(), |first| {
        let mut s = Search {
            prep: &prep,
            mode,
            choices: choices.clone(),
            assigned: vec![Matrix3::identity(); n],
            picks: vec![0; n],
        };
        s.assigned[0] = choices[first].matrix();
        s.picks[0] = first;
        (s.consistent(0) && s.descend(1)).then(|| s.picks.iter().map(|&i| choices[i]).collect())
    }))
}

/// The signed permutation of the first nonzero monomial of `det O`, with
/// monomials `O_{1σ(1)} O_{2σ(2)} O_{3σ(3)}` ordered lexicographically in `σ`.
pub fn pi_reduction(o: &Rotation3) -> SignedPermutation {
    let m = o.matrix();
    let sigma = Permutation::all()
        .into_iter()
        .find(|s| (0..3).all(|r| m[(r, s.apply(r))].abs() > TOL))
        .expect("a rotation has a nonzero determinant monomial");
    // entry (r, σ(r)) is nonzero: column σ(r) is sent to row r
    let mut perm = [0; 3];
    let mut signs = [1i8; 3];
    for r in 0..3 {
        perm[sigma.apply(r)] = r;
        signs[r] = if m[(r, sigma.apply(r))] > 0.0 { 1 } else { -1 };
    }
    SignedPermutation::new(perm, signs)
}

/// Seeded XYZ instance: each pair `u < v` becomes an edge with probability
/// `density`, weights drawn uniformly from `coeff_set³` minus the zero vector.
/// Adds edge `(0, 1)` when no edge was drawn.
pub fn random_xyz(n: usize, density: f64, coeff_set: &[f64], seed: u64) -> Result<Hamiltonian, OracleError> {
    if n < 2 {
        return Err(OracleError::TooFewQubits(n));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(OracleError::BadDensity(density));
    }
    if coeff_set.iter().all(|&c| c == 0.0) {
        return Err(OracleError::EmptyCoeffSet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weight = |rng: &mut ChaCha8Rng| loop {
        let w: [f64; 3] = std::array::from_fn(|_| coeff_set[rng.random_range(0..coeff_set.len())]);
        if w.iter().any(|&x| x != 0.0) {
            return w;
        }
    };
    let mut h = Hamiltonian::new(n).expect("n ≥ 2");
    let put = |h: &mut Hamiltonian, u: usize, v: usize, w: [f64; 3]| {
        for (i, p) in Pauli::ALL.into_iter().enumerate() {
            h.add_two_local(u, p, v, p, w[i]).expect("valid qubits");
        }
    };
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < density {
                let w = weight(&mut rng);
                put(&mut h, u, v, w);
            }
        }
    }
    if h.edges().is_empty() {
        let w = weight(&mut rng);
        put(&mut h, 0, 1, w);
    }
    Ok(h)
}

/// Exhaustive `2ⁿ` enumeration; the first satisfying spin vector in binary
/// counting order with `+1` as bit 0.
pub fn ising_brute_force(inst: &IsingInstance) -> Option<Spins> {
    let verts: Vec<usize> = inst.vertices().iter().copied().collect();
    assert!(verts.len() < 30, "too many vertices for enumeration");
    (0u64..1 << verts.len()).find_map(|mask| {
        let spins: Spins = verts
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, if mask >> i & 1 == 0 { 1 } else { -1 }))
            .collect();
        inst.is_satisfied_by(&spins).then_some(spins)
    })
}

/// Whether `H` is a symmetric Z-matrix as written, from its Pauli terms.
pub fn is_z_matrix_fixed_basis(h: &Hamiltonian) -> bool {
    let n = h.n_qubits();
    let mut budget = vec![0.0; n];
    for (k, c) in h.two_local_terms() {
        let ys = usize::from(k.pu == Pauli::Y) + usize::from(k.pv == Pauli::Y);
        if ys == 1 && c.abs() > TOL {
            return false;
        }
        match (k.pu, k.pv) {
            (Pauli::X, Pauli::Z) => budget[k.u] += c.abs(),
            (Pauli::Z, Pauli::X) => budget[k.v] += c.abs(),
            _ => {}
        }
    }
    let edges_ok = h.edges().into_iter().all(|(u, v)| {
        let b = h.coupling(u, v);
        b[(0, 0)] <= -b[(1, 1)].abs() + TOL
    });
    let vertices: BTreeSet<usize> = (0..n).collect();
    edges_ok
        && vertices.into_iter().all(|q| {
            let s = h.local_field(q);
            zero(s[1]) && s[0] + budget[q] <= TOL
        })
}
