//! Exact satisfiability of ±1-labelled graphs: find spins `σ` with
//! `σ_u σ_v = s(u, v)` on every edge, or show none exist.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IsingEdge {
    pub u: usize,
    pub v: usize,
    pub sign: i8,
}

/// A graph over arbitrary vertex ids with ±1 edge labels. Self-loops are allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IsingInstance {
    vertices: BTreeSet<usize>,
    edges: Vec<IsingEdge>,
}

pub type Spins = BTreeMap<usize, i8>;

impl IsingInstance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: usize) {
        self.vertices.insert(v);
    }

    /// # Panics
    /// If `sign` is not ±1.
    pub fn add_edge(&mut self, u: usize, v: usize, sign: i8) {
        assert!(sign == 1 || sign == -1, "Ising edge sign must be ±1");
        self.vertices.insert(u);
        self.vertices.insert(v);
        self.edges.push(IsingEdge { u, v, sign });
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn edges(&self) -> &[IsingEdge] {
        &self.edges
    }

    /// Whether `spins` assigns every vertex and meets every edge constraint.
    pub fn is_satisfied_by(&self, spins: &Spins) -> bool {
        self.vertices.iter().all(|v| spins.contains_key(v))
            && self
                .edges
                .iter()
                .all(|e| spins[&e.u] * spins[&e.v] == e.sign)
    }
}

/// Solves the instance by spanning-forest propagation.
///
/// The smallest vertex of each connected component gets `+1`. On success the
/// returned pair is `(σ, -σ)`.
pub fn ising_exact_sat(inst: &IsingInstance) -> Option<(Spins, Spins)> {
    let mut adj: BTreeMap<usize, Vec<(usize, i8)>> = BTreeMap::new();
    for e in &inst.edges {
        if e.u == e.v {
            if e.sign == -1 {
                return None;
            }
            continue;
        }
        adj.entry(e.u).or_default().push((e.v, e.sign));
        adj.entry(e.v).or_default().push((e.u, e.sign));
    }
    let mut spins = Spins::new();
    let mut queue = VecDeque::new();
    for &root in &inst.vertices {
        if spins.contains_key(&root) {
            continue;
        }
        spins.insert(root, 1);
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            let su = spins[&u];
            for &(v, sign) in adj.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                match spins.get(&v) {
                    Some(&sv) => {
                        if su * sv != sign {
                            return None;
                        }
                    }
                    None => {
                        spins.insert(v, su * sign);
                        queue.push_back(v);
                    }
                }
            }
        }
    }
    let flipped = spins.iter().map(|(&v, &s)| (v, -s)).collect();
    Some((spins, flipped))
}
