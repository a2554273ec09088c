//! Fixed-basis membership in the cone of 2-local symmetric Z-matrices, and
//! the shortcut for bipartite Hamiltonians with one repeated edge term.

use std::collections::{BTreeMap, VecDeque};

use nalgebra::Vector3;
use serde::Serialize;
use thiserror::Error;

use crate::pauli::{is_real_fixed_basis, EdgeData, Hamiltonian, Pauli, TOL};
use crate::two_qubit::decide_stoquastic_2q;

/// Leftover 1-local part of a vertex: `x·X + z·Z` with `x ≤ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Leftover {
    pub x: f64,
    pub z: f64,
}

/// A termwise certificate: every `term` is a two-qubit symmetric Z-matrix on
/// its edge, and every leftover is a non-positive X field plus a Z field.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub terms: Vec<((usize, usize), EdgeData)>,
    pub leftovers: BTreeMap<usize, Leftover>,
}

impl Decomposition {
    /// Adds everything back together.
    pub fn resum(&self, n_qubits: usize) -> Hamiltonian {
        let mut h = Hamiltonian::new(n_qubits).expect("at least one qubit");
        for &((u, v), e) in &self.terms {
            for i in 0..3 {
                let p = Pauli::from_index(i);
                h.add_one_local(u, p, e.s[i]).expect("vertex in range");
                h.add_one_local(v, p, e.p[i]).expect("vertex in range");
                for j in 0..3 {
                    h.add_two_local(u, p, v, Pauli::from_index(j), e.beta[(i, j)])
                        .expect("edge in range");
                }
            }
        }
        for (&q, l) in &self.leftovers {
            h.add_one_local(q, Pauli::X, l.x).expect("vertex in range");
            h.add_one_local(q, Pauli::Z, l.z).expect("vertex in range");
        }
        h
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum Rejection {
    #[error("term {term} has an odd number of Y factors: not real in this basis")]
    NotReal { term: String },
    #[error("vertex {vertex} has a positive X field {coeff}")]
    PositiveX { vertex: usize, coeff: f64 },
    #[error("edge ({u},{v}): a_XX = {a_xx} exceeds -|a_YY| = {bound}")]
    EdgeInfeasible { u: usize, v: usize, a_xx: f64, bound: f64 },
    #[error("vertex {vertex}: edge ({u},{v}) needs X budget {demand} but only {available} remains")]
    BudgetExceeded { vertex: usize, u: usize, v: usize, demand: f64, available: f64 },
}

/// Greedy parsimonious decomposition over edges in lexicographic order.
pub fn cone_membership(h: &Hamiltonian) -> Result<Decomposition, Rejection> {
    let order: Vec<(usize, usize)> = h.edges().into_iter().collect();
    cone_membership_with_order(h, &order)
}

/// As [`cone_membership`], visiting the edges in the given order. Edges of
/// `h` missing from `order` are visited afterwards in lexicographic order.
pub fn cone_membership_with_order(
    h: &Hamiltonian,
    order: &[(usize, usize)],
) -> Result<Decomposition, Rejection> {
    if !is_real_fixed_basis(h) {
        return Err(Rejection::NotReal { term: first_odd_y_term(h) });
    }
    let n = h.n_qubits();
    let mut budget = vec![0.0; n];
    let mut z_left = vec![0.0; n];
    for q in 0..n {
        let x = h.one_local(q, Pauli::X);
        if x > TOL {
            return Err(Rejection::PositiveX { vertex: q, coeff: x });
        }
        budget[q] = -x;
        z_left[q] = h.one_local(q, Pauli::Z);
    }

    let mut edges: Vec<(usize, usize)> = order.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    for e in h.edges() {
        if !edges.contains(&e) {
            edges.push(e);
        }
    }

    let mut terms = Vec::with_capacity(edges.len());
    for (u, v) in edges {
        let beta = h.coupling(u, v);
        let (a_xx, a_yy) = (beta[(0, 0)], beta[(1, 1)]);
        if a_xx > -a_yy.abs() + TOL {
            return Err(Rejection::EdgeInfeasible { u, v, a_xx, bound: -a_yy.abs() });
        }
        // X on u paired with Z on v needs that much -X on u, and vice versa
        let alpha = beta[(0, 2)].abs();
        let gamma = beta[(2, 0)].abs();
        for (vertex, demand) in [(u, alpha), (v, gamma)] {
            if demand > budget[vertex] + TOL {
                return Err(Rejection::BudgetExceeded {
                    vertex,
                    u,
                    v,
                    demand,
                    available: budget[vertex],
                });
            }
            budget[vertex] -= demand;
        }
        let s = Vector3::new(-alpha, 0.0, std::mem::take(&mut z_left[u]));
        let p = Vector3::new(-gamma, 0.0, std::mem::take(&mut z_left[v]));
        terms.push(((u, v), EdgeData::new(beta, s, p)));
    }

    let mut leftovers = BTreeMap::new();
    for q in 0..n {
        if budget[q] != 0.0 || z_left[q] != 0.0 {
            leftovers.insert(q, Leftover { x: -budget[q], z: z_left[q] });
        }
    }
    Ok(Decomposition { terms, leftovers })
}

fn first_odd_y_term(h: &Hamiltonian) -> String {
    for (q, p, c) in h.one_local_terms() {
        if p == Pauli::Y && c.abs() > TOL {
            return format!("{c}·Y@{q}");
        }
    }
    for (k, c) in h.two_local_terms() {
        let ys = usize::from(k.pu == Pauli::Y) + usize::from(k.pv == Pauli::Y);
        if ys == 1 && c.abs() > TOL {
            return format!("{c}·{}@{} {}@{}", k.pu, k.u, k.pv, k.v);
        }
    }
    String::from("?")
}

#[derive(Clone, Debug, PartialEq)]
pub enum BipartiteVerdict {
    /// The interaction graph has an odd cycle.
    NotApplicable,
    Decided {
        stoquastic: bool,
        /// A negative answer only excludes basis changes that act identically
        /// on all qubits of one side of the bipartition.
        caveat: &'static str,
    },
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum BipartiteError {
    #[error("edge ({0},{1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("edge ({u},{v}) runs against the bipartition and the edge term is not swap-symmetric")]
    Orientation { u: usize, v: usize },
    #[error("edge ({u},{v}) carries a different term than edge ({u0},{v0})")]
    NonUniform { u: usize, v: usize, u0: usize, v0: usize },
    #[error("vertex {0}: local field is not a multiple of the edge term's field")]
    LocalField(usize),
    #[error("the Hamiltonian has no edges")]
    NoEdges,
}

const PARTITION_CAVEAT: &str =
    "a negative answer only rules out basis changes acting identically on every qubit of one side";

/// Two-colours the graph; `None` when it has an odd cycle. The smallest vertex
/// of each component gets colour 0.
pub fn two_coloring(edges: &[(usize, usize)]) -> Option<BTreeMap<usize, u8>> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(u, v) in edges {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    let mut color = BTreeMap::new();
    let vertices: Vec<usize> = adj.keys().copied().collect();
    for root in vertices {
        if color.contains_key(&root) {
            continue;
        }
        color.insert(root, 0u8);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let cu = color[&u];
            for &v in &adj[&u] {
                match color.get(&v) {
                    Some(&cv) if cv == cu => return None,
                    Some(_) => {}
                    None => {
                        color.insert(v, 1 - cu);
                        queue.push_back(v);
                    }
                }
            }
        }
    }
    Some(color)
}

fn swap_symmetric(h: &EdgeData) -> bool {
    (h.beta - h.beta.transpose()).abs().max() <= TOL && (h.s - h.p).abs().max() <= TOL
}

/// `h` placed on every edge `(u, v)`, first factor on `u`. Bipartite graphs
/// inherit the two-qubit verdict; odd cycles make the shortcut inapplicable.
pub fn uniform_bipartite_stoquastic(
    h: &EdgeData,
    edges: &[(usize, usize)],
) -> Result<BipartiteVerdict, BipartiteError> {
    if let Some(&(u, v)) = edges.iter().find(|(u, v)| u == v) {
        return Err(BipartiteError::SelfLoop(u, v));
    }
    let Some(color) = two_coloring(edges) else {
        return Ok(BipartiteVerdict::NotApplicable);
    };
    // every edge must point from one fixed side to the other within its component
    let mut side_of_first: BTreeMap<usize, u8> = BTreeMap::new();
    let comp = components_of(edges);
    for &(u, v) in edges {
        let c = comp[&u];
        let expected = *side_of_first.entry(c).or_insert(color[&u]);
        if color[&u] != expected && !swap_symmetric(h) {
            return Err(BipartiteError::Orientation { u, v });
        }
    }
    Ok(BipartiteVerdict::Decided {
        stoquastic: decide_stoquastic_2q(h).stoquastic,
        caveat: PARTITION_CAVEAT,
    })
}

fn components_of(edges: &[(usize, usize)]) -> BTreeMap<usize, usize> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(u, v) in edges {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    let mut comp = BTreeMap::new();
    let vertices: Vec<usize> = adj.keys().copied().collect();
    for root in vertices {
        if comp.contains_key(&root) {
            continue;
        }
        comp.insert(root, root);
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for &v in &adj[&u] {
                if comp.insert(v, root).is_none() {
                    stack.push(v);
                }
            }
        }
    }
    comp
}

/// A common edge term with the edges it was placed on.
pub type UniformSplit = (EdgeData, Vec<(usize, usize)>);

/// Recovers `(h, edges)` from a Hamiltonian built by placing one edge term on
/// every edge of a bipartite graph, with each edge's 1-local parts added to
/// its endpoints. Edges are oriented from colour 0 to colour 1.
pub fn split_uniform_bipartite(
    ham: &Hamiltonian,
) -> Result<Option<UniformSplit>, BipartiteError> {
    let raw: Vec<(usize, usize)> = ham.edges().into_iter().collect();
    if raw.is_empty() {
        return Err(BipartiteError::NoEdges);
    }
    let Some(color) = two_coloring(&raw) else {
        return Ok(None);
    };
    let edges: Vec<(usize, usize)> = raw
        .iter()
        .map(|&(u, v)| if color[&u] == 0 { (u, v) } else { (v, u) })
        .collect();
    let (u0, v0) = edges[0];
    let beta = ham.coupling(u0, v0);
    for &(u, v) in &edges[1..] {
        if (ham.coupling(u, v) - beta).abs().max() > TOL {
            return Err(BipartiteError::NonUniform { u, v, u0, v0 });
        }
    }
    let mut degree: BTreeMap<usize, f64> = BTreeMap::new();
    for &(u, v) in &edges {
        *degree.entry(u).or_default() += 1.0;
        *degree.entry(v).or_default() += 1.0;
    }
    let s = ham.local_field(u0) / degree[&u0];
    let p = ham.local_field(v0) / degree[&v0];
    for (&q, &d) in &degree {
        let expect = if color[&q] == 0 { s } else { p };
        if (ham.local_field(q) - expect * d).abs().max() > TOL {
            return Err(BipartiteError::LocalField(q));
        }
    }
    for q in 0..ham.n_qubits() {
        if !degree.contains_key(&q) && ham.local_field(q).norm() > TOL {
            return Err(BipartiteError::LocalField(q));
        }
    }
    Ok(Some((EdgeData::new(beta, s, p), edges)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::is_z_matrix_2q;
    use crate::two_qubit::counterexample_edge;
    use nalgebra::Matrix3;

    fn ham(n: usize) -> Hamiltonian {
        Hamiltonian::new(n).unwrap()
    }

    #[test]
    fn ferromagnetic_xx_with_field_is_accepted() {
        let mut h = ham(2);
        h.add_two_local(0, Pauli::X, 1, Pauli::X, -1.0).unwrap();
        h.add_one_local(0, Pauli::X, -1.0).unwrap();
        let d = cone_membership(&h).unwrap();
        assert_eq!(d.terms.len(), 1);
        assert_eq!(d.resum(2), h);
    }

    #[test]
    fn antiferromagnetic_xx_is_rejected() {
        let mut h = ham(2);
        h.add_two_local(0, Pauli::X, 1, Pauli::X, 1.0).unwrap();
        assert!(matches!(cone_membership(&h), Err(Rejection::EdgeInfeasible { .. })));
    }

    #[test]
    fn shared_budget_on_the_middle_vertex() {
        let build = |x1: f64| {
            let mut h = ham(3);
            h.add_two_local(0, Pauli::Z, 1, Pauli::X, 1.0).unwrap();
            h.add_two_local(1, Pauli::X, 2, Pauli::Z, 1.0).unwrap();
            h.add_one_local(1, Pauli::X, x1).unwrap();
            h
        };
        let h = build(-2.0);
        let d = cone_membership(&h).unwrap();
        assert_eq!(d.terms.len(), 2);
        for (_, t) in &d.terms {
            assert!(is_z_matrix_2q(t));
        }
        assert_eq!(d.resum(3), h);
        assert!(d.leftovers.is_empty());
        match cone_membership(&build(-1.5)) {
            Err(Rejection::BudgetExceeded { vertex, .. }) => assert_eq!(vertex, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn z_fields_and_surplus_become_leftovers() {
        let mut h = ham(3);
        h.add_two_local(0, Pauli::Z, 1, Pauli::Z, 3.0).unwrap();
        h.add_one_local(0, Pauli::Z, 0.5).unwrap();
        h.add_one_local(2, Pauli::Z, -0.25).unwrap();
        h.add_one_local(2, Pauli::X, -1.0).unwrap();
        let d = cone_membership(&h).unwrap();
        assert_eq!(d.terms[0].1.s, Vector3::new(0.0, 0.0, 0.5));
        assert_eq!(d.leftovers[&2], Leftover { x: -1.0, z: -0.25 });
        assert_eq!(d.resum(3), h);
    }

    #[test]
    fn rejections() {
        let mut h = ham(2);
        h.add_two_local(0, Pauli::Y, 1, Pauli::Z, 1.0).unwrap();
        assert!(matches!(cone_membership(&h), Err(Rejection::NotReal { .. })));
        let mut h = ham(2);
        h.add_one_local(1, Pauli::X, 0.1).unwrap();
        assert_eq!(cone_membership(&h), Err(Rejection::PositiveX { vertex: 1, coeff: 0.1 }));
    }

    #[test]
    fn bipartite_shortcut() {
        let square = [(0, 1), (1, 2), (2, 3), (3, 0)];
        let ferro = EdgeData::coupling_only(Matrix3::from_diagonal(&Vector3::new(-1.0, 0.0, 0.0)));
        assert!(matches!(
            uniform_bipartite_stoquastic(&ferro, &square),
            Ok(BipartiteVerdict::Decided { stoquastic: true, .. })
        ));
        let triangle = [(0, 1), (1, 2), (0, 2)];
        assert_eq!(
            uniform_bipartite_stoquastic(&ferro, &triangle),
            Ok(BipartiteVerdict::NotApplicable)
        );
        let path = [(0, 1), (1, 2)];
        assert!(matches!(
            uniform_bipartite_stoquastic(&counterexample_edge(2.0, 0.5, 0.2), &path),
            Ok(BipartiteVerdict::Decided { stoquastic: true, .. })
        ));
    }

    #[test]
    fn split_recovers_the_edge_term() {
        let h0 = counterexample_edge(2.0, 0.5, 0.2);
        let edges = [(0, 1), (2, 1), (2, 3)];
        let mut h = ham(4);
        for &(u, v) in &edges {
            for i in 0..3 {
                let p = Pauli::from_index(i);
                h.add_one_local(u, p, h0.s[i]).unwrap();
                h.add_one_local(v, p, h0.p[i]).unwrap();
                for j in 0..3 {
                    h.add_two_local(u, p, v, Pauli::from_index(j), h0.beta[(i, j)]).unwrap();
                }
            }
        }
        let (e, got) = split_uniform_bipartite(&h).unwrap().unwrap();
        assert!((e.beta - h0.beta).abs().max() < 1e-12);
        assert!((e.s - h0.s).abs().max() < 1e-12);
        assert_eq!(got.len(), 3);
    }
}
