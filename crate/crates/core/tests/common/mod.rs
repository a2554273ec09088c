#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use stoquastic::ising::IsingInstance;
use stoquastic::rxc3::Rxc3Instance;
use stoquastic::{EdgeData, Hamiltonian, Pauli, Rotation3, SignedPermutation};

pub fn xyz(n: usize, edges: &[(usize, usize, [f64; 3])]) -> Hamiltonian {
    let mut h = Hamiltonian::new(n).unwrap();
    for &(u, v, w) in edges {
        for (i, p) in Pauli::ALL.into_iter().enumerate() {
            h.add_two_local(u, p, v, p, w[i]).unwrap();
        }
    }
    h
}

pub fn random_rotation(rng: &mut ChaCha8Rng) -> Rotation3 {
    let axis = Vector3::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    );
    Rotation3::from_axis_angle(axis, rng.random_range(-3.1..3.1))
}

fn plane(i: usize, j: usize, theta: f64) -> Matrix3<f64> {
    let (s, c) = theta.sin_cos();
    let mut m = Matrix3::identity();
    m[(i, i)] = c;
    m[(j, j)] = c;
    m[(i, j)] = -s;
    m[(j, i)] = s;
    m
}

fn flip(idx: &[usize]) -> Matrix3<f64> {
    let mut m: Matrix3<f64> = Matrix3::identity();
    for &i in idx {
        m[(i, i)] = -m[(i, i)];
    }
    m
}

fn signed_with(perm: [usize; 3], rng: &mut ChaCha8Rng) -> SignedPermutation {
    loop {
        let signs: [i8; 3] = std::array::from_fn(|_| if rng.random_bool(0.5) { 1 } else { -1 });
        let sp = SignedPermutation::new(perm, signs);
        if sp.det() == 1 {
            return sp;
        }
    }
}

/// A diagonal `β` with frequent degeneracies and rotations `(O_L, O_R)` with
/// `O_L β O_Rᵀ` diagonal: a pair of signed permutations sharing a
/// permutation, composed with rotations that fix `β`.
pub fn diagonal_preserving_pair(rng: &mut ChaCha8Rng) -> (Vector3<f64>, Matrix3<f64>, Matrix3<f64>) {
    let vals = [-2.0, -1.0, 0.0, 1.0, 2.0, 0.5];
    let lambda = Vector3::from_fn(|_, _| vals[rng.random_range(0..vals.len())]);
    let (mut wl, mut wr) = (Matrix3::identity(), Matrix3::identity());
    for _ in 0..4 {
        let (i, j) = [(0, 1), (0, 2), (1, 2)][rng.random_range(0..3)];
        let (a, b) = (lambda[i], lambda[j]);
        let t = rng.random_range(-3.1..3.1);
        let (gl, gr) = if a == 0.0 && b == 0.0 {
            (plane(i, j, t), plane(i, j, rng.random_range(-3.1..3.1)))
        } else if a == b {
            (plane(i, j, t), plane(i, j, t))
        } else if a == -b {
            (plane(i, j, t), plane(i, j, -t))
        } else if a == 0.0 {
            (flip(&[i, j]), flip(&[i, j]))
        } else {
            continue;
        };
        wl = gl * wl;
        wr = gr * wr;
    }
    let mut perm = [0, 1, 2];
    perm.shuffle(rng);
    let ol = signed_with(perm, rng).matrix() * wl;
    let or = signed_with(perm, rng).matrix() * wr;
    (lambda, ol, or)
}

/// Each element three times, dealt into triples; retried until no triple repeats an element.
pub fn random_rxc3(n_elements: usize, rng: &mut ChaCha8Rng) -> Rxc3Instance {
    loop {
        let mut slots: Vec<usize> = (0..n_elements).flat_map(|e| [e, e, e]).collect();
        slots.shuffle(rng);
        let subsets: Vec<[usize; 3]> = slots.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
        if let Ok(inst) = Rxc3Instance::new(n_elements, subsets) {
            return inst;
        }
    }
}

/// Random ±1 graph on up to 12 vertices; half are planted so they are satisfiable.
pub fn random_ising(rng: &mut ChaCha8Rng) -> IsingInstance {
    let n = rng.random_range(1..=12);
    let planted: Vec<i8> = (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
    let plant = rng.random_bool(0.5);
    let p = rng.random_range(0.1..0.6);
    let mut inst = IsingInstance::new();
    for v in 0..n {
        inst.add_vertex(v);
    }
    for u in 0..n {
        for v in u..n {
            let prob = if u == v { 0.05 } else { p };
            if rng.random_bool(prob) {
                let sign = if plant {
                    planted[u] * planted[v]
                } else if rng.random_bool(0.5) {
                    1
                } else {
                    -1
                };
                inst.add_edge(u, v, sign);
            }
        }
    }
    inst
}

/// Non-negative dyadic combination of the cone generators on a random graph,
/// using at most one of `-|0⟩⟨0|⊗X`, `-|1⟩⟨1|⊗X` and one of the mirrored pair
/// per edge, so the X budget of every vertex is fully consumed.
/// Returns the Hamiltonian and the vertices whose budget is used.
pub fn cone_instance(rng: &mut ChaCha8Rng) -> (Hamiltonian, Vec<usize>) {
    let n = rng.random_range(2..=6);
    let mut h = Hamiltonian::new(n).unwrap();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(0.5) {
                edges.push((u, v));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, 1));
    }
    let w = |rng: &mut ChaCha8Rng| f64::from(rng.random_range(1..=8)) / 4.0;
    let mut used = std::collections::BTreeSet::new();
    for &(u, v) in &edges {
        let (a, b) = (w(rng), w(rng));
        // a(-XX - YY) + b(-XX + YY)
        h.add_two_local(u, Pauli::X, v, Pauli::X, -a - b).unwrap();
        h.add_two_local(u, Pauli::Y, v, Pauli::Y, b - a).unwrap();
        if rng.random_bool(0.7) {
            // -|0⟩⟨0|⊗X or -|1⟩⟨1|⊗X: X on v, Z on u
            let c = w(rng);
            let s = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
            h.add_one_local(v, Pauli::X, -c / 2.0).unwrap();
            h.add_two_local(u, Pauli::Z, v, Pauli::X, s * c / 2.0).unwrap();
            used.insert(v);
        }
        if rng.random_bool(0.7) {
            let c = w(rng);
            let s = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
            h.add_one_local(u, Pauli::X, -c / 2.0).unwrap();
            h.add_two_local(u, Pauli::X, v, Pauli::Z, s * c / 2.0).unwrap();
            used.insert(u);
        }
        for (p, q) in [(Some(u), None), (None, Some(v)), (Some(u), Some(v))] {
            if rng.random_bool(0.5) {
                let c = w(rng) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                match (p, q) {
                    (Some(a), None) => h.add_one_local(a, Pauli::Z, c).unwrap(),
                    (None, Some(b)) => h.add_one_local(b, Pauli::Z, c).unwrap(),
                    _ => h.add_two_local(u, Pauli::Z, v, Pauli::Z, c).unwrap(),
                }
            }
        }
    }
    (h, used.into_iter().collect())
}

/// Edge data that is real in a hidden frame: diagonal `β` (often degenerate),
/// fields in the XZ plane, then random rotations on both sides.
pub fn hidden_real_edge(rng: &mut ChaCha8Rng) -> EdgeData {
    let vals = [-1.5, -1.0, 0.0, 0.5, 1.0, 2.0];
    let mut beta = Vector3::from_fn(|_, _| rng.random_range(-2.0..2.0));
    if rng.random_bool(0.5) {
        for i in 0..3 {
            if rng.random_bool(0.5) {
                beta[i] = vals[rng.random_range(0..vals.len())];
            }
        }
    }
    let field = |rng: &mut ChaCha8Rng| {
        let mut f = Vector3::new(rng.random_range(-2.0..2.0), 0.0, rng.random_range(-2.0..2.0));
        if rng.random_bool(0.2) {
            f[[0, 2][rng.random_range(0..2)]] = 0.0;
        }
        if rng.random_bool(0.1) {
            f = Vector3::zeros();
        }
        f
    };
    let e = EdgeData::new(Matrix3::from_diagonal(&beta), field(rng), field(rng));
    stoquastic::apply_rotations(&e, &random_rotation(rng), &random_rotation(rng))
}

/// Edge data that is generically not real: either fully random, or a real
/// frame with a Y field component added.
pub fn generic_edge(rng: &mut ChaCha8Rng) -> EdgeData {
    if rng.random_bool(0.5) {
        let beta = Matrix3::from_fn(|_, _| rng.random_range(-2.0..2.0));
        let s = Vector3::from_fn(|_, _| rng.random_range(-2.0..2.0));
        let p = Vector3::from_fn(|_, _| rng.random_range(-2.0..2.0));
        EdgeData::new(beta, s, p)
    } else {
        let beta = Vector3::from_fn(|_, _| rng.random_range(-2.0..2.0));
        let mut s = Vector3::new(rng.random_range(-2.0..2.0), 0.0, rng.random_range(-2.0..2.0));
        s[1] = rng.random_range(0.1..0.5) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let p = Vector3::new(rng.random_range(-2.0..2.0), 0.0, rng.random_range(-2.0..2.0));
        let e = EdgeData::new(Matrix3::from_diagonal(&beta), s, p);
        stoquastic::apply_rotations(&e, &random_rotation(rng), &random_rotation(rng))
    }
}
