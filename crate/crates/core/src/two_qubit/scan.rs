//! Parameter scans over the family
//! `a_Z (Z₁ + Z₂) - a_X (X₁ + X₂) + a_XX X₁X₂ + Z₁Z₂`.

use std::io::{self, Write};

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use super::{decide_stoquastic_2q_with, CaseId, SearchConfig};
use crate::par::Execution;
use crate::pauli::EdgeData;

/// Edge data of the family member with parameters `(a_X, a_Z, a_XX)`.
pub fn counterexample_edge(a_x: f64, a_z: f64, a_xx: f64) -> EdgeData {
    let local = Vector3::new(-a_x, 0.0, a_z);
    EdgeData::new(Matrix3::from_diagonal(&Vector3::new(a_xx, 0.0, 1.0)), local, local)
}

/// `steps` evenly spaced values from `lo` to `hi` inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self, ScanError> {
        if steps < 2 {
            return Err(ScanError::TooFewSteps(steps));
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Err(ScanError::NonFinite);
        }
        Ok(Axis { lo, hi, steps })
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * k as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("an axis needs at least 2 steps, got {0}")]
    TooFewSteps(usize),
    #[error("axis bounds must be finite")]
    NonFinite,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanGrid {
    pub a_x: Axis,
    pub a_z: Axis,
    pub a_xx: Axis,
}

impl Default for ScanGrid {
    /// `a_X, a_Z ∈ [0, 2]` with 20 steps each, `a_XX ∈ [0, 1]` with 10.
    fn default() -> Self {
        ScanGrid {
            a_x: Axis { lo: 0.0, hi: 2.0, steps: 20 },
            a_z: Axis { lo: 0.0, hi: 2.0, steps: 20 },
            a_xx: Axis { lo: 0.0, hi: 1.0, steps: 10 },
        }
    }
}

impl ScanGrid {
    /// Lattice points ordered by `a_X`, then `a_Z`, then `a_XX`.
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let (xs, zs, xxs) = (self.a_x.values(), self.a_z.values(), self.a_xx.values());
        let mut out = Vec::with_capacity(xs.len() * zs.len() * xxs.len());
        for &x in &xs {
            for &z in &zs {
                for &xx in &xxs {
                    out.push((x, z, xx));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub a_x: f64,
    pub a_z: f64,
    pub a_xx: f64,
    pub stoquastic: bool,
    pub case: Option<CaseId>,
}

/// Decides every lattice point; row order follows [`ScanGrid::points`].
pub fn region_scan(grid: &ScanGrid, config: SearchConfig, exec: Execution) -> Vec<ScanRow> {
    let points = grid.points();
    exec.map_slice(&points, |&(a_x, a_z, a_xx)| {
        let d = decide_stoquastic_2q_with(&counterexample_edge(a_x, a_z, a_xx), config);
        ScanRow {
            a_x,
            a_z,
            a_xx,
            stoquastic: d.stoquastic,
            case: d.witness.map(|w| w.case),
        }
    })
}

/// CSV with header `aX,aZ,aXX,stoquastic,case_id` and LF line endings.
pub fn write_csv<W: Write>(rows: &[ScanRow], mut out: W) -> io::Result<()> {
    writeln!(out, "aX,aZ,aXX,stoquastic,case_id")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.a_x,
            r.a_z,
            r.a_xx,
            u8::from(r.stoquastic),
            r.case.map_or("none", CaseId::label)
        )?;
    }
    Ok(())
}
