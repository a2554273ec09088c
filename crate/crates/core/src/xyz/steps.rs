//! From the quotient graph to signed permutations: the heterogeneous graph,
//! the two Ising problems and the assignment of permutations.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::Matrix3;
use serde::Serialize;

use super::graph::{edge_rank, rank1_label, QuotientGraph, RankDecomposition, WeightedInteractionGraph};
use crate::ising::{ising_exact_sat, IsingInstance, Spins};
use crate::pauli::{Permutation, SignedPermutation, TOL};

/// A quotient vertex with some label incident to three distinct labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelOverflow {
    pub vertex: usize,
    pub labels: BTreeSet<usize>,
}

pub fn step4_label_check(q: &QuotientGraph) -> Result<(), LabelOverflow> {
    for (vertex, labels) in q.all_labels().into_iter().enumerate() {
        if labels.len() > 2 {
            return Err(LabelOverflow { vertex, labels });
        }
    }
    Ok(())
}

/// Which two labels meet at a heterogeneous vertex, named 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum VertexKind {
    K12,
    K13,
    K23,
}

impl VertexKind {
    pub fn from_labels(labels: &BTreeSet<usize>) -> Option<VertexKind> {
        let v: Vec<usize> = labels.iter().copied().collect();
        match v.as_slice() {
            [0, 1] => Some(VertexKind::K12),
            [0, 2] => Some(VertexKind::K13),
            [1, 2] => Some(VertexKind::K23),
            _ => None,
        }
    }
}

/// The permutation a heterogeneous vertex takes for a given spin.
///
/// Spin `+1` sends label 1 to axis 1 on 12- and 13-vertices and label 2 to
/// axis 1 on 23-vertices; the remaining label then goes to axis 2.
pub fn table_i(kind: VertexKind, spin: i8) -> Permutation {
    match (kind, spin > 0) {
        (VertexKind::K13, true) => Permutation([0, 1, 2]),
        (VertexKind::K13, false) => Permutation([2, 1, 0]),
        (VertexKind::K12, true) => Permutation([0, 2, 1]),
        (VertexKind::K12, false) => Permutation([2, 0, 1]),
        (VertexKind::K23, true) => Permutation([1, 0, 2]),
        (VertexKind::K23, false) => Permutation([1, 2, 0]),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingleLabelComponent {
    pub label: usize,
    pub vertices: Vec<usize>,
    /// Heterogeneous vertices adjacent to the component, ascending.
    pub boundary: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HeteroEdge {
    pub a: usize,
    pub b: usize,
    pub label: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeterogeneousQuotientGraph {
    pub kinds: BTreeMap<usize, VertexKind>,
    pub edges: Vec<HeteroEdge>,
    pub single_label: Vec<SingleLabelComponent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Heterogeneous {
    Graph(HeterogeneousQuotientGraph),
    /// Every quotient edge carries the same label.
    WholeSingleLabel { label: usize },
    /// The quotient has no edges at all.
    Edgeless,
}

/// Collapses each single-label component into a clique on its boundary.
/// Expects a connected quotient that passed [`step4_label_check`].
pub fn build_heterogeneous(q: &QuotientGraph) -> Heterogeneous {
    let labels = q.all_labels();
    let kinds: BTreeMap<usize, VertexKind> = labels
        .iter()
        .enumerate()
        .filter_map(|(v, l)| VertexKind::from_labels(l).map(|k| (v, k)))
        .collect();
    if kinds.is_empty() {
        return match q.edges.first() {
            None => Heterogeneous::Edgeless,
            Some(e) => Heterogeneous::WholeSingleLabel { label: e.label },
        };
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); q.n_vertices];
    let mut edges = Vec::new();
    for e in &q.edges {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
        if kinds.contains_key(&e.a) && kinds.contains_key(&e.b) {
            edges.push(HeteroEdge { a: e.a, b: e.b, label: e.label });
        }
    }
    let mut seen = vec![false; q.n_vertices];
    let mut single_label = Vec::new();
    for start in 0..q.n_vertices {
        if seen[start] || kinds.contains_key(&start) || labels[start].is_empty() {
            continue;
        }
        let label = *labels[start].iter().next().expect("one label");
        let mut vertices = Vec::new();
        let mut boundary = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(x) = queue.pop_front() {
            vertices.push(x);
            for &y in &adj[x] {
                if kinds.contains_key(&y) {
                    boundary.insert(y);
                } else if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        vertices.sort_unstable();
        let boundary: Vec<usize> = boundary.into_iter().collect();
        for (i, &a) in boundary.iter().enumerate() {
            for &b in &boundary[i..] {
                edges.push(HeteroEdge { a, b, label });
            }
        }
        single_label.push(SingleLabelComponent { label, vertices, boundary });
    }
    Heterogeneous::Graph(HeterogeneousQuotientGraph {
        kinds,
        edges,
        single_label,
    })
}

/// Spins on heterogeneous vertices encode their permutation; an edge forces
/// equal images of its label, which flips the spin relation only for label-2
/// edges between a 12- and a 23-vertex.
pub fn step6_ising(hq: &HeterogeneousQuotientGraph) -> IsingInstance {
    let mut inst = IsingInstance::new();
    for &v in hq.kinds.keys() {
        inst.add_vertex(v);
    }
    for e in &hq.edges {
        let pair = (hq.kinds[&e.a], hq.kinds[&e.b]);
        let mixed = matches!(
            pair,
            (VertexKind::K12, VertexKind::K23) | (VertexKind::K23, VertexKind::K12)
        );
        let sign = if e.label == 1 && mixed { -1 } else { 1 };
        inst.add_edge(e.a, e.b, sign);
    }
    inst
}

/// Candidate permutation sets `Σ_v` per quotient vertex, each sorted.
pub type Assignment = Vec<Vec<Permutation>>;

/// Turns each Ising solution into permutations on the heterogeneous
/// vertices, dropping solutions that violate some admissible set. Other
/// quotient vertices are left empty for [`step9_extend`].
pub fn step8_translate(
    solutions: &[Spins],
    hq: &HeterogeneousQuotientGraph,
    rd: &RankDecomposition,
) -> Vec<Assignment> {
    solutions
        .iter()
        .filter_map(|spins| {
            let mut a: Assignment = vec![Vec::new(); rd.components.len()];
            for (&v, &kind) in &hq.kinds {
                let p = table_i(kind, spins[&v]);
                if !rd.components[v].admissible.contains(&p) {
                    return None;
                }
                a[v] = vec![p];
            }
            Some(a)
        })
        .collect()
}

/// Admissible permutations sending `label` to `axis`.
fn with_image(rd: &RankDecomposition, v: usize, label: usize, axis: usize) -> Vec<Permutation> {
    rd.components[v]
        .admissible
        .iter()
        .copied()
        .filter(|p| p.apply(label) == axis)
        .collect()
}

/// Fills the single-label components from their smallest boundary vertex.
/// Drops the assignment when some vertex is left without options.
pub fn step9_extend(assignment: Assignment, hq: &HeterogeneousQuotientGraph, rd: &RankDecomposition) -> Option<Assignment> {
    let mut a = assignment;
    for k in &hq.single_label {
        let anchor = k.boundary[0];
        let axis = a[anchor][0].apply(k.label);
        for &v in &k.vertices {
            a[v] = with_image(rd, v, k.label, axis);
            if a[v].is_empty() {
                return None;
            }
        }
    }
    Some(a)
}

/// The two candidates when every quotient edge carries `label`: it goes to
/// axis 1 everywhere, or to axis 3 everywhere.
pub fn step9_single_label(label: usize, rd: &RankDecomposition) -> Vec<Assignment> {
    [0, 2]
        .into_iter()
        .filter_map(|axis| {
            let a: Assignment = (0..rd.components.len())
                .map(|v| with_image(rd, v, label, axis))
                .collect();
            a.iter().all(|s| !s.is_empty()).then_some(a)
        })
        .collect()
}

/// The graph left after dropping rank-1 edges whose label lands on axis 3.
pub fn partition_graph(
    g: &WeightedInteractionGraph,
    rd: &RankDecomposition,
    assignment: &Assignment,
) -> WeightedInteractionGraph {
    let mut out = WeightedInteractionGraph::new(g.n());
    for (&(u, v), &w) in g.edges() {
        if edge_rank(&w) == 0 {
            continue;
        }
        if let Some(label) = rank1_label(&w) {
            let p = assignment[rd.component_of[u]][0];
            if p.apply(label) == 2 {
                continue;
            }
        }
        out.set_edge(u, v, w);
    }
    out
}

/// `R Π` with `R = diag(δ, 1, δ·det Π)`, so the result is a rotation.
pub fn signed_from(p: Permutation, delta: i8) -> SignedPermutation {
    SignedPermutation::new(p.0, [delta, 1, delta * p.sign()])
}

/// Chooses one permutation per vertex and the axis-1 signs so that every
/// kept edge has `β̃_11 ≤ 0`. Each connected piece of the partitioned graph
/// is solved on its own; a piece inside a single quotient vertex tries every
/// option in `Σ`, larger pieces use the smallest one.
pub fn steps12_13_signs(
    partitioned: &WeightedInteractionGraph,
    rd: &RankDecomposition,
    assignment: &Assignment,
) -> Option<Vec<SignedPermutation>> {
    let n = partitioned.n();
    let mut out = vec![SignedPermutation::identity(); n];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in partitioned.edges().keys() {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut piece = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(x) = queue.pop_front() {
            piece.push(x);
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        piece.sort_unstable();
        let quotient: BTreeSet<usize> = piece.iter().map(|&v| rd.component_of[v]).collect();
        let options: Vec<BTreeMap<usize, Permutation>> = if quotient.len() == 1 {
            let qv = *quotient.iter().next().expect("nonempty");
            assignment[qv].iter().map(|&p| BTreeMap::from([(qv, p)])).collect()
        } else {
            vec![quotient.iter().map(|&qv| (qv, assignment[qv][0])).collect()]
        };
        let solved = options.into_iter().find_map(|choice| {
            let perm_of = |v: usize| choice[&rd.component_of[v]];
            let mut inst = IsingInstance::new();
            for &v in &piece {
                inst.add_vertex(v);
            }
            for &u in &piece {
                for &v in adj[u].iter().filter(|&&v| v > u) {
                    let w = partitioned.weight(u, v).expect("edge");
                    let b = SignedPermutation::unsigned(perm_of(u)).matrix()
                        * Matrix3::from_diagonal(&w)
                        * SignedPermutation::unsigned(perm_of(v)).matrix().transpose();
                    if b[(0, 0)].abs() > TOL {
                        inst.add_edge(u, v, if b[(0, 0)] > 0.0 { -1 } else { 1 });
                    }
                }
            }
            ising_exact_sat(&inst).map(|(spins, _)| {
                piece
                    .iter()
                    .map(|&v| (v, signed_from(perm_of(v), spins[&v])))
                    .collect::<Vec<_>>()
            })
        })?;
        for (v, sp) in solved {
            out[v] = sp;
        }
    }
    Some(out)
}
