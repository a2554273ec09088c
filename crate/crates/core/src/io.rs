//! Text formats for Hamiltonians and exact-cover instances.
//!
//! Hamiltonian files:
//!
//! ```text
//! # comment
//! qubits 3
//! term -1 X@0 X@1
//! term 1/3 Z@2
//! ```
//!
//! Exact-cover files list the element count and one 0-based triple per line:
//!
//! ```text
//! elements 6
//! set 0 1 2
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::pauli::{Hamiltonian, HamiltonianError, Pauli};
use crate::rxc3::{Rxc3Error, Rxc3Instance, Rxc3Term};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Hamiltonian { line: usize, source: HamiltonianError },
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error(transparent)]
    Rxc3(#[from] Rxc3Error),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// A term line as written, with the coefficient text kept verbatim.
#[derive(Clone, Debug, PartialEq)]
pub struct TermLine {
    pub line: usize,
    pub coeff_text: String,
    pub coeff: f64,
    pub factors: Vec<(Pauli, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianFile {
    pub hamiltonian: Hamiltonian,
    pub terms: Vec<TermLine>,
}

/// Decimal float or `p/q` with integer `p`, `q`, mapped to the nearest double.
pub fn parse_coefficient(text: &str) -> Option<f64> {
    let value = match text.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.parse().ok()?;
            let q: i64 = q.parse().ok()?;
            if q == 0 {
                return None;
            }
            p as f64 / q as f64
        }
        None => text.parse().ok()?,
    };
    value.is_finite().then_some(value)
}

fn parse_factor(text: &str) -> Option<(Pauli, usize)> {
    let (p, q) = text.split_once('@')?;
    let pauli = match p {
        "X" => Pauli::X,
        "Y" => Pauli::Y,
        "Z" => Pauli::Z,
        _ => return None,
    };
    Some((pauli, q.parse().ok()?))
}

fn content(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("").trim()
}

pub fn parse_hamiltonian(text: &str) -> Result<HamiltonianFile, ParseError> {
    let mut hamiltonian: Option<Hamiltonian> = None;
    let mut terms = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let words: Vec<&str> = content(raw).split_whitespace().collect();
        match words.as_slice() {
            [] => {}
            ["qubits", n] => {
                if hamiltonian.is_some() {
                    return Err(syntax(line, "repeated `qubits` header"));
                }
                let n: usize = n.parse().map_err(|_| syntax(line, format!("bad qubit count `{n}`")))?;
                hamiltonian = Some(Hamiltonian::new(n).map_err(|source| ParseError::Hamiltonian { line, source })?);
            }
            ["term", coeff, factors @ ..] if (1..=2).contains(&factors.len()) => {
                let h = hamiltonian
                    .as_mut()
                    .ok_or_else(|| syntax(line, "`term` before `qubits`"))?;
                let c = parse_coefficient(coeff).ok_or_else(|| syntax(line, format!("bad coefficient `{coeff}`")))?;
                let parsed: Vec<(Pauli, usize)> = factors
                    .iter()
                    .map(|f| parse_factor(f).ok_or_else(|| syntax(line, format!("bad factor `{f}`"))))
                    .collect::<Result<_, _>>()?;
                let added = match parsed.as_slice() {
                    [(p, q)] => h.add_one_local(*q, *p, c),
                    [(p, q), (p2, q2)] => h.add_two_local(*q, *p, *q2, *p2, c),
                    _ => unreachable!(),
                };
                added.map_err(|source| ParseError::Hamiltonian { line, source })?;
                terms.push(TermLine {
                    line,
                    coeff_text: coeff.to_string(),
                    coeff: c,
                    factors: parsed,
                });
            }
            _ => return Err(syntax(line, format!("unrecognised line `{}`", content(raw)))),
        }
    }
    let hamiltonian = hamiltonian.ok_or(ParseError::MissingHeader("qubits"))?;
    Ok(HamiltonianFile { hamiltonian, terms })
}

/// One line per stored coefficient, 1-local terms first; parses back to an
/// identical coefficient map.
pub fn write_hamiltonian(h: &Hamiltonian) -> String {
    let mut out = format!("qubits {}\n", h.n_qubits());
    for (q, p, c) in h.one_local_terms() {
        let _ = writeln!(out, "term {c} {p}@{q}");
    }
    for (k, c) in h.two_local_terms() {
        let _ = writeln!(out, "term {c} {}@{} {}@{}", k.pu, k.u, k.pv, k.v);
    }
    out
}

/// Unit-coefficient terms in the given order.
pub fn write_rxc3_hamiltonian(n_qubits: usize, terms: &[Rxc3Term]) -> String {
    let mut out = format!("qubits {n_qubits}\n");
    for t in terms {
        let _ = writeln!(out, "term 1 {}@{} {}@{}", t.pu, t.u, t.pv, t.v);
    }
    out
}

pub fn parse_rxc3(text: &str) -> Result<Rxc3Instance, ParseError> {
    let mut n: Option<usize> = None;
    let mut subsets = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let words: Vec<&str> = content(raw).split_whitespace().collect();
        match words.as_slice() {
            [] => {}
            ["elements", count] => {
                if n.is_some() {
                    return Err(syntax(line, "repeated `elements` header"));
                }
                n = Some(count.parse().map_err(|_| syntax(line, format!("bad element count `{count}`")))?);
            }
            ["set", a, b, c] => {
                if n.is_none() {
                    return Err(syntax(line, "`set` before `elements`"));
                }
                let parse = |s: &str| s.parse::<usize>().map_err(|_| syntax(line, format!("bad element `{s}`")));
                subsets.push([parse(a)?, parse(b)?, parse(c)?]);
            }
            _ => return Err(syntax(line, format!("unrecognised line `{}`", content(raw)))),
        }
    }
    let n = n.ok_or(ParseError::MissingHeader("elements"))?;
    Ok(Rxc3Instance::new(n, subsets)?)
}

pub fn write_rxc3(inst: &Rxc3Instance) -> String {
    let mut out = format!("elements {}\n", inst.n_elements());
    for [a, b, c] in inst.subsets() {
        let _ = writeln!(out, "set {a} {b} {c}");
    }
    out
}
