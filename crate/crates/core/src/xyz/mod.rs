//! Polynomial-time stoquasticity for XYZ Heisenberg models
//! `H = Σ a_XX X_uX_v + a_YY Y_uY_v + a_ZZ Z_uZ_v` under single-qubit Cliffords.
//!
//! Each connected piece of the interaction graph is decided on its own; the
//! result is either a signed permutation per qubit that makes every edge a
//! Z-matrix, or the step at which the search ran out of candidates.

pub mod graph;
pub mod steps;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use nalgebra::Matrix3;
use serde::Serialize;

pub use graph::{
    admits, build_graph, build_quotient, edge_rank, permuted_weight, rank1_label, rank_components,
    ModelError, QuotientEdge, QuotientGraph, RankComponent, RankDecomposition,
    WeightedInteractionGraph,
};
pub use steps::{
    build_heterogeneous, partition_graph, signed_from, step4_label_check, step6_ising,
    step8_translate, step9_extend, step9_single_label, steps12_13_signs, table_i, Assignment,
    HeteroEdge, Heterogeneous, HeterogeneousQuotientGraph, LabelOverflow, SingleLabelComponent,
    VertexKind,
};

use crate::ising::ising_exact_sat;
use crate::pauli::{apply_signed_permutations, Hamiltonian, SignedPermutation, TOL};
use crate::Execution;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub step_id: String,
    pub action: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct XyzDecision {
    pub stoquastic: bool,
    /// One signed permutation per qubit, present iff stoquastic.
    pub solution: Option<Vec<SignedPermutation>>,
    pub trace: Vec<TraceRecord>,
    /// Step id of the rejection.
    pub rejected_at: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionEntry {
    pub qubit: usize,
    /// 1-based images of axes 1, 2, 3.
    pub perm: [usize; 3],
    pub signs: [i8; 3],
}

/// JSON shape of a decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceDocument {
    pub stoquastic: bool,
    pub rejected_at: Option<String>,
    pub steps: Vec<TraceRecord>,
    pub solution: Option<Vec<SolutionEntry>>,
}

impl XyzDecision {
    pub fn to_document(&self) -> TraceDocument {
        TraceDocument {
            stoquastic: self.stoquastic,
            rejected_at: self.rejected_at.clone(),
            steps: self.trace.clone(),
            solution: self.solution.as_ref().map(|sol| {
                sol.iter()
                    .enumerate()
                    .map(|(qubit, sp)| SolutionEntry {
                        qubit,
                        perm: sp.permutation().one_based(),
                        signs: sp.signs(),
                    })
                    .collect()
            }),
        }
    }
}

struct Trace {
    prefix: String,
    records: Vec<TraceRecord>,
}

impl Trace {
    fn push(&mut self, step: &str, action: &str, detail: String) {
        let detail = if self.prefix.is_empty() {
            detail
        } else {
            format!("{}: {detail}", self.prefix)
        };
        self.records.push(TraceRecord {
            step_id: step.to_string(),
            action: action.to_string(),
            detail,
        });
    }
}

fn qubit_list(globals: &[usize], local: &[usize]) -> String {
    let mut s = String::new();
    for (i, &v) in local.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{}", globals[v]);
    }
    s
}

/// Decides an XYZ Hamiltonian; errors if any term is not XX, YY or ZZ.
pub fn decide_xyz(h: &Hamiltonian) -> Result<XyzDecision, ModelError> {
    decide_xyz_with(h, Execution::default())
}

pub fn decide_xyz_with(h: &Hamiltonian, exec: Execution) -> Result<XyzDecision, ModelError> {
    Ok(decide_xyz_graph(&build_graph(h)?, exec))
}

pub fn decide_xyz_graph(g: &WeightedInteractionGraph, exec: Execution) -> XyzDecision {
    let mut trace = Trace {
        prefix: String::new(),
        records: Vec::new(),
    };
    trace.push(
        "1",
        "build",
        format!("{} qubits, {} edges", g.n(), g.edges().len()),
    );
    let pieces = g.edge_components();
    let results = exec.map_slice(&pieces, |globals| {
        let sub = g.induced(globals);
        decide_connected(&sub, globals)
    });
    let mut solution = vec![SignedPermutation::identity(); g.n()];
    for (globals, (records, outcome)) in pieces.iter().zip(results) {
        trace.records.extend(records);
        match outcome {
            Ok(local) => {
                for (i, sp) in local.into_iter().enumerate() {
                    solution[globals[i]] = sp;
                }
            }
            Err(step) => {
                trace.push("14", "reject", format!("not stoquastic (step {step})"));
                return XyzDecision {
                    stoquastic: false,
                    solution: None,
                    trace: trace.records,
                    rejected_at: Some(step),
                };
            }
        }
    }
    assert!(
        verify_solution(g, &solution),
        "internal error: XYZ solution fails verification"
    );
    trace.push("14", "accept", "stoquastic".to_string());
    XyzDecision {
        stoquastic: true,
        solution: Some(solution),
        trace: trace.records,
        rejected_at: None,
    }
}

type PieceOutcome = (Vec<TraceRecord>, Result<Vec<SignedPermutation>, String>);

/// Runs the pipeline on a connected graph whose vertex `i` is qubit `globals[i]`.
fn decide_connected(g: &WeightedInteractionGraph, globals: &[usize]) -> PieceOutcome {
    let mut trace = Trace {
        prefix: format!("qubits {}", qubit_list(globals, &(0..g.n()).collect::<Vec<_>>())),
        records: Vec::new(),
    };
    let outcome = run_pipeline(g, globals, &mut trace);
    (trace.records, outcome)
}

fn run_pipeline(
    g: &WeightedInteractionGraph,
    globals: &[usize],
    trace: &mut Trace,
) -> Result<Vec<SignedPermutation>, String> {
    let rd = rank_components(g);
    for c in &rd.components {
        if c.vertices.len() > 1 || c.admissible.len() < 6 {
            trace.push(
                "2",
                "component",
                format!(
                    "rank component {} on qubits {} admits {}",
                    c.id,
                    qubit_list(globals, &c.vertices),
                    c.admissible.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
                ),
            );
        }
    }
    let q = build_quotient(g, &rd);
    trace.push(
        "3",
        "quotient",
        format!("{} vertices, {} rank-1 edges", q.n_vertices, q.edges.len()),
    );
    if let Err(over) = step4_label_check(&q) {
        let labels: Vec<String> = over.labels.iter().map(|l| (l + 1).to_string()).collect();
        trace.push(
            "4",
            "reject",
            format!(
                "rank component on qubits {} meets labels {}",
                qubit_list(globals, &rd.components[over.vertex].vertices),
                labels.join(",")
            ),
        );
        return Err("4".into());
    }
    trace.push("4", "pass", "at most two labels per quotient vertex".into());

    let candidates: Vec<Assignment> = match build_heterogeneous(&q) {
        Heterogeneous::Edgeless => {
            trace.push("5", "edgeless", "no rank-1 edges".into());
            let a: Assignment = rd.components.iter().map(|c| c.admissible.clone()).collect();
            if a[0].is_empty() {
                trace.push("9", "reject", "no admissible permutation".into());
                return Err("9".into());
            }
            vec![a]
        }
        Heterogeneous::WholeSingleLabel { label } => {
            trace.push(
                "5",
                "single-label",
                format!("every rank-1 edge has label {}", label + 1),
            );
            let c = step9_single_label(label, &rd);
            trace.push("9", "candidates", format!("{} of A1/A2 survive", c.len()));
            if c.is_empty() {
                trace.push("9", "reject", "both A1 and A2 discarded".into());
                return Err("9".into());
            }
            c
        }
        Heterogeneous::Graph(hq) => {
            trace.push(
                "5",
                "heterogeneous",
                format!(
                    "{} heterogeneous vertices, {} single-label components",
                    hq.kinds.len(),
                    hq.single_label.len()
                ),
            );
            let inst = step6_ising(&hq);
            trace.push(
                "6",
                "ising",
                format!(
                    "{} edges, {} with sign -1",
                    inst.edges().len(),
                    inst.edges().iter().filter(|e| e.sign < 0).count()
                ),
            );
            let Some((a, b)) = ising_exact_sat(&inst) else {
                trace.push("7", "reject", "heterogeneous Ising problem unsatisfiable".into());
                return Err("7".into());
            };
            trace.push("7", "solved", "two solutions".into());
            let translated = step8_translate(&[a, b], &hq, &rd);
            trace.push(
                "8",
                "candidates",
                format!("{} of A1/A2 admissible", translated.len()),
            );
            if translated.is_empty() {
                trace.push("8", "reject", "no admissible candidate".into());
                return Err("8".into());
            }
            let extended: Vec<Assignment> = translated
                .into_iter()
                .filter_map(|a| step9_extend(a, &hq, &rd))
                .collect();
            trace.push("9", "candidates", format!("{} survive extension", extended.len()));
            if extended.is_empty() {
                trace.push("9", "reject", "both A1 and A2 discarded".into());
                return Err("9".into());
            }
            extended
        }
    };

    for (i, a) in candidates.iter().enumerate() {
        let part = partition_graph(g, &rd, a);
        trace.push(
            "11",
            "partition",
            format!("candidate {}: {} edges kept", i + 1, part.edges().len()),
        );
        if let Some(sol) = steps12_13_signs(&part, &rd, a) {
            trace.push("13", "solved", format!("candidate {} yields signs", i + 1));
            return Ok(sol);
        }
        trace.push("13", "fail", format!("candidate {} has no sign solution", i + 1));
    }
    trace.push("13", "reject", "no candidate admits signs".into());
    Err("13".into())
}

/// Whether `solution` turns every edge into a diagonal coupling with
/// `β̃_11 ≤ -|β̃_22|` using rotations only.
pub fn verify_solution(g: &WeightedInteractionGraph, solution: &[SignedPermutation]) -> bool {
    if solution.len() != g.n() || solution.iter().any(|s| s.det() != 1) {
        return false;
    }
    g.edges().iter().all(|(&(u, v), w)| {
        let b = apply_signed_permutations(&Matrix3::from_diagonal(w), &solution[u], &solution[v]);
        let off = (0..3)
            .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
            .all(|ij| b[ij].abs() <= TOL);
        off && b[(0, 0)] <= -b[(1, 1)].abs() + TOL
    })
}

/// Qubits touched by at least one coupling.
pub fn active_qubits(g: &WeightedInteractionGraph) -> BTreeSet<usize> {
    g.edges().keys().flat_map(|&(u, v)| [u, v]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;

    fn xyz(n: usize, edges: &[(usize, usize, [f64; 3])]) -> Hamiltonian {
        let mut h = Hamiltonian::new(n).unwrap();
        for &(u, v, w) in edges {
            for (i, p) in Pauli::ALL.into_iter().enumerate() {
                if w[i] != 0.0 {
                    h.add_two_local(u, p, v, p, w[i]).unwrap();
                }
            }
        }
        h
    }

    #[test]
    fn heisenberg_edge_is_stoquastic() {
        let d = decide_xyz(&xyz(2, &[(0, 1, [1.0, 1.0, 1.0])])).unwrap();
        assert!(d.stoquastic);
        assert_eq!(d.solution.unwrap().len(), 2);
    }

    #[test]
    fn heisenberg_triangle_is_not() {
        let d = decide_xyz(&xyz(3, &[(0, 1, [1.0; 3]), (1, 2, [1.0; 3]), (0, 2, [1.0; 3])])).unwrap();
        assert!(!d.stoquastic);
        assert_eq!(d.rejected_at.as_deref(), Some("13"));
    }

    #[test]
    fn heisenberg_square_is_stoquastic() {
        let d = decide_xyz(&xyz(
            4,
            &[(0, 1, [1.0; 3]), (1, 2, [1.0; 3]), (2, 3, [1.0; 3]), (0, 3, [1.0; 3])],
        ))
        .unwrap();
        assert!(d.stoquastic);
    }

    #[test]
    fn labelled_star_rejected_at_step_4() {
        let d = decide_xyz(&xyz(
            4,
            &[(0, 1, [1.0, 0.0, 0.0]), (0, 2, [0.0, 1.0, 0.0]), (0, 3, [0.0, 0.0, 1.0])],
        ))
        .unwrap();
        assert!(!d.stoquastic);
        assert_eq!(d.rejected_at.as_deref(), Some("4"));
        assert!(d.trace.iter().any(|r| r.step_id == "4" && r.action == "reject"));
    }

    #[test]
    fn disconnected_pieces_and_isolated_qubits() {
        let d = decide_xyz(&xyz(6, &[(0, 1, [1.0, 0.0, 0.0]), (3, 4, [0.0, 2.0, 0.5])])).unwrap();
        assert!(d.stoquastic);
        let sol = d.solution.unwrap();
        assert_eq!(sol[2], SignedPermutation::identity());
        assert_eq!(sol[5], SignedPermutation::identity());
    }

    #[test]
    fn empty_hamiltonian() {
        let d = decide_xyz(&Hamiltonian::new(3).unwrap()).unwrap();
        assert!(d.stoquastic);
    }

    #[test]
    fn deterministic_trace() {
        let h = xyz(
            5,
            &[(0, 1, [1.0, -2.0, 0.0]), (1, 2, [0.0, 0.0, 1.0]), (2, 3, [1.0, 0.0, 0.0]), (3, 4, [0.3, 0.2, 0.1])],
        );
        let a = decide_xyz_with(&h, Execution::Sequential).unwrap();
        let b = decide_xyz_with(&h, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn document_is_one_based() {
        let d = decide_xyz(&xyz(2, &[(0, 1, [0.0, 1.0, 0.0])])).unwrap();
        let doc = d.to_document();
        let sol = doc.solution.unwrap();
        assert!(sol.iter().all(|e| e.perm.iter().all(|&x| (1..=3).contains(&x))));
    }
}
