//! Weighted interaction graphs, rank>1 components and the low-rank quotient.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::Vector3;
use serde::Serialize;
use thiserror::Error;

use crate::pauli::{Hamiltonian, Pauli, Permutation, TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("1-local term {coeff}·{pauli}@{qubit} is not allowed in an XYZ model")]
    OneLocal { qubit: usize, pauli: Pauli, coeff: f64 },
    #[error("term {coeff}·{pu}@{u} {pv}@{v} is not an XX, YY or ZZ coupling")]
    OffDiagonal { u: usize, pu: Pauli, v: usize, pv: Pauli, coeff: f64 },
}

/// Qubits with diagonal couplings `(a_XX, a_YY, a_ZZ)` on each edge `u < v`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedInteractionGraph {
    n: usize,
    edges: BTreeMap<(usize, usize), Vector3<f64>>,
}

impl WeightedInteractionGraph {
    pub fn new(n: usize) -> Self {
        WeightedInteractionGraph { n, edges: BTreeMap::new() }
    }

    /// Inserts or replaces an edge; `(u, v)` is normalised to `u < v`.
    pub fn set_edge(&mut self, u: usize, v: usize, w: Vector3<f64>) {
        assert!(u != v && u < self.n && v < self.n, "bad edge ({u},{v})");
        self.edges.insert((u.min(v), u.max(v)), w);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeMap<(usize, usize), Vector3<f64>> {
        &self.edges
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<Vector3<f64>> {
        self.edges.get(&(u.min(v), u.max(v))).copied()
    }

    /// Vertex sets of the connected components that contain at least one edge,
    /// each sorted, ordered by smallest vertex.
    pub fn edge_components(&self) -> Vec<Vec<usize>> {
        let mut dsu = Dsu::new(self.n);
        for &(u, v) in self.edges.keys() {
            dsu.union(u, v);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let touched: BTreeSet<usize> = self.edges.keys().flat_map(|&(u, v)| [u, v]).collect();
        for v in touched {
            groups.entry(dsu.find(v)).or_default().push(v);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort_by_key(|c| c[0]);
        out
    }

    /// The subgraph on `vertices` (sorted), relabelled `0..len`.
    pub fn induced(&self, vertices: &[usize]) -> WeightedInteractionGraph {
        let local: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut g = WeightedInteractionGraph::new(vertices.len());
        for (&(u, v), &w) in &self.edges {
            if let (Some(&a), Some(&b)) = (local.get(&u), local.get(&v)) {
                g.set_edge(a, b, w);
            }
        }
        g
    }
}

/// Reads the weighted interaction graph of a pure XYZ Hamiltonian.
pub fn build_graph(h: &Hamiltonian) -> Result<WeightedInteractionGraph, ModelError> {
    if let Some((qubit, pauli, coeff)) = h.one_local_terms().next() {
        return Err(ModelError::OneLocal { qubit, pauli, coeff });
    }
    let mut g = WeightedInteractionGraph::new(h.n_qubits());
    for (k, coeff) in h.two_local_terms() {
        if k.pu != k.pv {
            return Err(ModelError::OffDiagonal { u: k.u, pu: k.pu, v: k.v, pv: k.pv, coeff });
        }
        let mut w = g.weight(k.u, k.v).unwrap_or_else(Vector3::zeros);
        w[k.pu.index()] = coeff;
        g.set_edge(k.u, k.v, w);
    }
    Ok(g)
}

/// Number of entries with `|w_i| > ε`.
pub fn edge_rank(w: &Vector3<f64>) -> usize {
    w.iter().filter(|x| x.abs() > TOL).count()
}

/// The axis carrying the weight of a rank-1 edge.
pub fn rank1_label(w: &Vector3<f64>) -> Option<usize> {
    let mut nz = (0..3).filter(|&i| w[i].abs() > TOL);
    match (nz.next(), nz.next()) {
        (Some(i), None) => Some(i),
        _ => None,
    }
}

/// `Π β Πᵀ` keeps a diagonal weight diagonal: slot `Π(m)` receives `w_m`.
pub fn permuted_weight(w: &Vector3<f64>, p: &Permutation) -> Vector3<f64> {
    let mut out = Vector3::zeros();
    for m in 0..3 {
        out[p.apply(m)] = w[m];
    }
    out
}

/// Whether `Π` puts no larger magnitude in slot 2 than in slot 1.
pub fn admits(w: &Vector3<f64>, p: &Permutation) -> bool {
    let t = permuted_weight(w, p);
    t[0].abs() >= t[1].abs() - TOL
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankComponent {
    pub id: usize,
    pub vertices: Vec<usize>,
    pub admissible: Vec<Permutation>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankDecomposition {
    pub components: Vec<RankComponent>,
    /// Component id of every vertex.
    pub component_of: Vec<usize>,
}

/// Union-find over edges of rank at least 2. Component ids follow the
/// smallest member vertex. Every edge with both ends inside a component,
/// whatever its rank, constrains the admissible set.
pub fn rank_components(g: &WeightedInteractionGraph) -> RankDecomposition {
    let mut dsu = Dsu::new(g.n());
    for (&(u, v), w) in g.edges() {
        if edge_rank(w) > 1 {
            dsu.union(u, v);
        }
    }
    let mut id_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut component_of = vec![0; g.n()];
    let mut components: Vec<RankComponent> = Vec::new();
    for v in 0..g.n() {
        let root = dsu.find(v);
        let id = *id_of_root.entry(root).or_insert_with(|| {
            components.push(RankComponent {
                id: components.len(),
                vertices: Vec::new(),
                admissible: Vec::new(),
            });
            components.len() - 1
        });
        component_of[v] = id;
        components[id].vertices.push(v);
    }
    let mut internal: Vec<Vec<Vector3<f64>>> = vec![Vec::new(); components.len()];
    for (&(u, v), w) in g.edges() {
        if component_of[u] == component_of[v] && edge_rank(w) > 0 {
            internal[component_of[u]].push(*w);
        }
    }
    for (c, ws) in components.iter_mut().zip(&internal) {
        c.admissible = Permutation::all()
            .into_iter()
            .filter(|p| ws.iter().all(|w| admits(w, p)))
            .collect();
    }
    RankDecomposition { components, component_of }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientEdge {
    /// Endpoint components with `a ≤ b`; `a == b` for a self-loop.
    pub a: usize,
    pub b: usize,
    /// 0-based axis of the nonzero weight entry.
    pub label: usize,
    pub edge: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientGraph {
    pub n_vertices: usize,
    pub edges: Vec<QuotientEdge>,
}

impl QuotientGraph {
    pub fn labels_at(&self, q: usize) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter(|e| e.a == q || e.b == q)
            .map(|e| e.label)
            .collect()
    }

    pub fn all_labels(&self) -> Vec<BTreeSet<usize>> {
        let mut out = vec![BTreeSet::new(); self.n_vertices];
        for e in &self.edges {
            out[e.a].insert(e.label);
            out[e.b].insert(e.label);
        }
        out
    }
}

/// One quotient vertex per rank component, one labelled edge per rank-1 edge.
pub fn build_quotient(g: &WeightedInteractionGraph, rd: &RankDecomposition) -> QuotientGraph {
    let mut edges = Vec::new();
    for (&(u, v), w) in g.edges() {
        if let Some(label) = rank1_label(w) {
            let (ca, cb) = (rd.component_of[u], rd.component_of[v]);
            edges.push(QuotientEdge {
                a: ca.min(cb),
                b: ca.max(cb),
                label,
                edge: (u, v),
            });
        }
    }
    QuotientGraph {
        n_vertices: rd.components.len(),
        edges,
    }
}

/// Disjoint-set forest with path halving and union by size.
pub(crate) struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}
