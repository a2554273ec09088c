//! Restricted exact cover by 3-sets, its reduction to Clifford realness, and
//! exhaustive solvers for both sides.

use std::fmt::Write as _;

use thiserror::Error;

use crate::oracle::{brute_force_clifford, OracleError, SearchMode};
use crate::pauli::{Hamiltonian, Pauli};
use crate::Execution;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Rxc3Error {
    #[error("element count {0} is not a positive multiple of 3")]
    BadElementCount(usize),
    #[error("subset {index} has a repeated element")]
    RepeatedElement { index: usize },
    #[error("subset {index} mentions element {element} outside 0..{n}")]
    ElementOutOfRange { index: usize, element: usize, n: usize },
    #[error("element {element} appears in {count} subsets, expected 3")]
    WrongMultiplicity { element: usize, count: usize },
    #[error("{n} elements exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("the Pauli pool of element {0} ran dry")]
    PoolExhausted(usize),
}

/// Elements `0..n` and 3-element subsets in which every element occurs exactly three times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rxc3Instance {
    n_elements: usize,
    subsets: Vec<[usize; 3]>,
}

impl Rxc3Instance {
    pub fn new(n_elements: usize, subsets: Vec<[usize; 3]>) -> Result<Self, Rxc3Error> {
        if n_elements == 0 || !n_elements.is_multiple_of(3) {
            return Err(Rxc3Error::BadElementCount(n_elements));
        }
        let mut count = vec![0; n_elements];
        for (index, s) in subsets.iter().enumerate() {
            for &element in s {
                if element >= n_elements {
                    return Err(Rxc3Error::ElementOutOfRange { index, element, n: n_elements });
                }
                count[element] += 1;
            }
            if s[0] == s[1] || s[1] == s[2] || s[0] == s[2] {
                return Err(Rxc3Error::RepeatedElement { index });
            }
        }
        if let Some((element, &count)) = count.iter().enumerate().find(|(_, &c)| c != 3) {
            return Err(Rxc3Error::WrongMultiplicity { element, count });
        }
        Ok(Rxc3Instance { n_elements, subsets })
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn subsets(&self) -> &[[usize; 3]] {
        &self.subsets
    }
}

/// Remaining Paulis per element, drawn in the order X, Y, Z.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliPool {
    remaining: Vec<Vec<Pauli>>,
}

impl PauliPool {
    pub fn new(n: usize) -> Self {
        PauliPool {
            remaining: vec![vec![Pauli::Z, Pauli::Y, Pauli::X]; n],
        }
    }

    pub fn take(&mut self, element: usize) -> Option<Pauli> {
        self.remaining[element].pop()
    }

    pub fn remaining(&self, element: usize) -> usize {
        self.remaining[element].len()
    }

    pub fn is_exhausted(&self) -> bool {
        self.remaining.iter().all(Vec::is_empty)
    }
}

/// A two-local term `σ_u σ'_v` with unit coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rxc3Term {
    pub u: usize,
    pub pu: Pauli,
    pub v: usize,
    pub pv: Pauli,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rxc3Reduction {
    pub hamiltonian: Hamiltonian,
    /// Terms in construction order, three per subset: `σ_iσ_j, σ_jσ_k, σ_iσ_k`.
    pub terms: Vec<Rxc3Term>,
    pub pool: PauliPool,
}

impl Rxc3Reduction {
    /// One line per subset with 1-based qubits, e.g. `X1X2 + X2X3 + X1X3`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for triple in self.terms.chunks(3) {
            let parts: Vec<String> = triple
                .iter()
                .map(|t| format!("{}{}{}{}", t.pu, t.u + 1, t.pv, t.v + 1))
                .collect();
            let _ = writeln!(out, "{}", parts.join(" + "));
        }
        out
    }
}

/// Subsets in input order; each draws the next Pauli from each of its three pools.
pub fn hamiltonian_from_rxc3(inst: &Rxc3Instance) -> Result<Rxc3Reduction, Rxc3Error> {
    let mut pool = PauliPool::new(inst.n_elements);
    let mut hamiltonian = Hamiltonian::new(inst.n_elements).expect("n > 0");
    let mut terms = Vec::with_capacity(3 * inst.subsets.len());
    for &[i, j, k] in &inst.subsets {
        let mut draw = |e: usize| pool.take(e).ok_or(Rxc3Error::PoolExhausted(e));
        let (si, sj, sk) = (draw(i)?, draw(j)?, draw(k)?);
        for (u, pu, v, pv) in [(i, si, j, sj), (j, sj, k, sk), (i, si, k, sk)] {
            hamiltonian.add_two_local(u, pu, v, pv, 1.0).expect("distinct valid qubits");
            terms.push(Rxc3Term { u, pu, v, pv });
        }
    }
    Ok(Rxc3Reduction {
        hamiltonian,
        terms,
        pool,
    })
}

pub const COVER_CAP: usize = 24;

/// Backtracking over subsets containing the smallest uncovered element.
pub fn exact_cover(inst: &Rxc3Instance) -> Result<Option<Vec<usize>>, Rxc3Error> {
    if inst.n_elements > COVER_CAP {
        return Err(Rxc3Error::TooLarge {
            n: inst.n_elements,
            cap: COVER_CAP,
        });
    }
    fn go(inst: &Rxc3Instance, covered: u32, chosen: &mut Vec<usize>) -> bool {
        let full = (1u32 << inst.n_elements) - 1;
        if covered == full {
            return true;
        }
        let first = (!covered).trailing_zeros() as usize;
        for (idx, s) in inst.subsets.iter().enumerate() {
            let mask = s.iter().fold(0u32, |m, &e| m | 1 << e);
            if s.contains(&first) && mask & covered == 0 {
                chosen.push(idx);
                if go(inst, covered | mask, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    Ok(go(inst, 0, &mut chosen).then_some(chosen))
}

pub fn exact_cover_exists(inst: &Rxc3Instance) -> Result<bool, Rxc3Error> {
    Ok(exact_cover(inst)?.is_some())
}

pub const REALNESS_CAP: usize = 12;

/// Whether some choice of axis permutation per qubit leaves every term with
/// an even number of Y factors.
pub fn clifford_realness(h: &Hamiltonian) -> Result<bool, OracleError> {
    Ok(brute_force_clifford(h, SearchMode::Realness, REALNESS_CAP, Execution::default())?.is_some())
}
