//! Reduction of a locally-real two-qubit Hamiltonian to standard form:
//! diagonal `β = diag(a, y, 1)` with `1 ≥ a ≥ 0`, and `S`, `P` in the X–Z plane.
//!
//! The axis that ends up in the Y slot must be a singular pair `(l, r)` of `β`
//! with `l ⊥ S` and `r ⊥ P`. When several inequivalent choices exist, each one
//! yields its own variant; all are returned, best residual first.

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::Serialize;
use thiserror::Error;

use super::{input_scale, is_real_locally};
use crate::pauli::{apply_rotations, EdgeData, Rotation3, SignedPermutation, TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialCase {
    None,
    /// No 1-local terms: the coupling alone can always be made a Z-matrix.
    SAndPZero,
    /// No coupling: `S` and `P` rotate independently onto `-X`.
    BetaZero,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StandardForm {
    /// `(a_XX, a_YY, a_ZZ)` after normalisation.
    pub beta_diag: Vector3<f64>,
    pub s_vec: Vector3<f64>,
    pub p_vec: Vector3<f64>,
    /// `apply_rotations(e, left_rot, right_rot)` equals the form times `normalization`.
    pub left_rot: Rotation3,
    pub right_rot: Rotation3,
    pub normalization: f64,
    pub special_case: SpecialCase,
    /// Norm of the Y components that were projected away.
    pub residual: f64,
}

impl StandardForm {
    pub fn edge_data(&self) -> EdgeData {
        EdgeData::new(Matrix3::from_diagonal(&self.beta_diag), self.s_vec, self.p_vec)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StandardFormError {
    #[error("edge data contains non-finite entries")]
    NonFinite,
    #[error("triple-product invariants do not vanish: not real under local rotations")]
    NotReal,
    #[error("no real frame found (smallest residual {0:e})")]
    NoRealFrame(f64),
}

/// The primary standard form of `e`.
pub fn standard_form(e: &EdgeData) -> Result<StandardForm, StandardFormError> {
    standard_forms(e).map(|v| v[0])
}

/// All inequivalent standard forms of `e`, lowest residual first.
pub fn standard_forms(e: &EdgeData) -> Result<Vec<StandardForm>, StandardFormError> {
    if !e.is_finite() {
        return Err(StandardFormError::NonFinite);
    }
    if !is_real_locally(e) {
        return Err(StandardFormError::NotReal);
    }
    let sp_zero = e.s.norm() <= TOL && e.p.norm() <= TOL;
    if !sp_zero && e.beta.norm() <= TOL {
        return Ok(vec![beta_zero_form(e)]);
    }
    if sp_zero && e.beta.norm() <= TOL {
        let id = Rotation3::identity();
        return Ok(vec![StandardForm {
            beta_diag: Vector3::zeros(),
            s_vec: Vector3::zeros(),
            p_vec: Vector3::zeros(),
            left_rot: id,
            right_rot: id,
            normalization: 1.0,
            special_case: SpecialCase::SAndPZero,
            residual: 0.0,
        }]);
    }

    let scale = input_scale(e);
    let frame = SvdFrame::new(e);
    let mut forms = Vec::new();
    for cand in frame.y_candidates() {
        if let Some(form) = frame.complete(e, &cand, scale) {
            forms.push(form);
        }
    }
    if sp_zero {
        forms.iter_mut().for_each(|f| f.special_case = SpecialCase::SAndPZero);
    }
    let accept = 1e-6 * scale.max(1.0);
    let best = forms.iter().map(|f| f.residual).fold(f64::INFINITY, f64::min);
    forms.retain(|f| f.residual <= accept);
    if forms.is_empty() {
        return Err(StandardFormError::NoRealFrame(best));
    }
    forms.sort_by(|a, b| quantize(a.residual).total_cmp(&quantize(b.residual)));
    let mut unique: Vec<StandardForm> = Vec::new();
    for f in forms {
        if !unique.iter().any(|u| same_form(u, &f)) {
            unique.push(f);
        }
    }
    Ok(unique)
}

fn quantize(r: f64) -> f64 {
    if r < 1e-12 {
        0.0
    } else {
        r
    }
}

fn same_form(a: &StandardForm, b: &StandardForm) -> bool {
    (a.beta_diag - b.beta_diag).abs().max() < 1e-10
        && (a.s_vec - b.s_vec).abs().max() < 1e-10
        && (a.p_vec - b.p_vec).abs().max() < 1e-10
}

fn beta_zero_form(e: &EdgeData) -> StandardForm {
    let left = rotation_onto(&e.s, &-Vector3::x());
    let right = rotation_onto(&e.p, &-Vector3::x());
    StandardForm {
        beta_diag: Vector3::zeros(),
        s_vec: Vector3::new(-e.s.norm(), 0.0, 0.0),
        p_vec: Vector3::new(-e.p.norm(), 0.0, 0.0),
        left_rot: left,
        right_rot: right,
        normalization: 1.0,
        special_case: SpecialCase::BetaZero,
        residual: 0.0,
    }
}

/// Rotations moving the largest-magnitude singular value of `β` onto a
/// negative XX entry, leaving `β` diagonal.
pub(super) fn coupling_witness(e: &EdgeData) -> (Rotation3, Rotation3) {
    let f = SvdFrame::new(e);
    let k = (0..3)
        .max_by(|&i, &j| f.sigma[i].abs().total_cmp(&f.sigma[j].abs()))
        .expect("three axes");
    let q = SignedPermutation::cliffords()
        .iter()
        .find(|c| c.perm()[k] == 0)
        .expect("some Clifford sends axis k to X")
        .matrix();
    let mut l = q * f.u.transpose();
    let r = q * f.v.transpose();
    if f.sigma[k] > 0.0 {
        l = Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0)) * l;
    }
    (Rotation3::from_matrix_unchecked(l), Rotation3::from_matrix_unchecked(r))
}

/// A rotation taking the direction of `from` onto the direction of `to`;
/// the identity when `from` vanishes.
pub fn rotation_onto(from: &Vector3<f64>, to: &Vector3<f64>) -> Rotation3 {
    if from.norm() <= TOL {
        return Rotation3::identity();
    }
    let a = from.normalize();
    let b = to.normalize();
    let axis = a.cross(&b);
    let cos = a.dot(&b).clamp(-1.0, 1.0);
    if axis.norm() < 1e-12 {
        if cos > 0.0 {
            return Rotation3::identity();
        }
        // antiparallel: half turn about any axis orthogonal to a
        return Rotation3::from_axis_angle(any_orthogonal(&a), std::f64::consts::PI);
    }
    Rotation3::from_axis_angle(axis, axis.norm().atan2(cos))
}

fn any_orthogonal(a: &Vector3<f64>) -> Vector3<f64> {
    let pick = if a.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    a.cross(&pick).normalize()
}

/// `β = U Σ Vᵀ` with `U, V ∈ SO(3)` and a signed diagonal `Σ`.
struct SvdFrame {
    u: Matrix3<f64>,
    v: Matrix3<f64>,
    sigma: Vector3<f64>,
    s: Vector3<f64>,
    p: Vector3<f64>,
}

/// Left and right Y-axis directions in the SVD frame plus the two remaining
/// axis pairs that keep `β` diagonal.
struct YCandidate {
    yl: Vector3<f64>,
    yr: Vector3<f64>,
    others: [(Vector3<f64>, Vector3<f64>); 2],
    residual: f64,
}

impl SvdFrame {
    fn new(e: &EdgeData) -> Self {
        let svd = e.beta.svd(true, true);
        let mut u = svd.u.expect("requested U");
        let mut v = svd.v_t.expect("requested Vᵀ").transpose();
        let mut sigma = svd.singular_values;
        if u.determinant() < 0.0 {
            u.column_mut(2).neg_mut();
            sigma[2] = -sigma[2];
        }
        if v.determinant() < 0.0 {
            v.column_mut(2).neg_mut();
            sigma[2] = -sigma[2];
        }
        SvdFrame {
            s: u.transpose() * e.s,
            p: v.transpose() * e.p,
            u,
            v,
            sigma,
        }
    }

    /// Axis indices grouped by equal `|σ|`, ascending.
    fn blocks(&self) -> Vec<Vec<usize>> {
        let mut axes = [0usize, 1, 2];
        axes.sort_by(|&i, &j| self.sigma[i].abs().total_cmp(&self.sigma[j].abs()));
        let tol = TOL * self.sigma.amax().max(1.0);
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for k in axes {
            match blocks.last_mut() {
                Some(b) if (self.sigma[k].abs() - self.sigma[b[0]].abs()).abs() <= tol => b.push(k),
                _ => blocks.push(vec![k]),
            }
        }
        blocks
    }

    fn y_candidates(&self) -> Vec<YCandidate> {
        let mut out = Vec::new();
        for block in self.blocks() {
            let rest: Vec<usize> = (0..3).filter(|k| !block.contains(k)).collect();
            let is_zero = self.sigma[block[0]].abs() <= TOL;
            let basis = |k: usize| Vector3::ith(k, 1.0);
            let embed = |c: &[f64]| {
                let mut v = Vector3::zeros();
                for (slot, &k) in block.iter().enumerate() {
                    v[k] = c[slot];
                }
                v
            };
            let mut rest_pairs: Vec<(Vector3<f64>, Vector3<f64>)> =
                rest.iter().map(|&k| (basis(k), basis(k))).collect();

            if block.len() == 1 {
                let k = block[0];
                let residual = (self.s[k].powi(2) + self.p[k].powi(2)).sqrt();
                out.push(YCandidate {
                    yl: basis(k),
                    yr: basis(k),
                    others: [rest_pairs[0], rest_pairs[1]],
                    residual,
                });
                continue;
            }

            let s_b: Vec<f64> = block.iter().map(|&k| self.s[k]).collect();
            let p_b: Vec<f64> = block.iter().map(|&k| self.p[k]).collect();
            if is_zero {
                // left and right null directions are independent
                let cl = orthogonal_in_plane(&s_b);
                let cr = orthogonal_in_plane(&p_b);
                let yl = embed(&cl);
                let yr = embed(&cr);
                let wl = embed(&[-cl[1], cl[0]]);
                let wr = embed(&[-cr[1], cr[0]]);
                let residual = (yl.dot(&self.s).powi(2) + yr.dot(&self.p).powi(2)).sqrt();
                rest_pairs.push((wl, wr));
                out.push(YCandidate {
                    yl,
                    yr,
                    others: [rest_pairs[0], rest_pairs[1]],
                    residual,
                });
                continue;
            }

            // nonzero degenerate block: right vectors are D·(left vectors)
            let d: Vec<f64> = block.iter().map(|&k| self.sigma[k].signum()).collect();
            let dp: Vec<f64> = p_b.iter().zip(&d).map(|(p, s)| p * s).collect();
            let n = block.len();
            let m = DMatrix::from_fn(n, n, |i, j| s_b[i] * s_b[j] + dp[i] * dp[j]);
            let eig = m.symmetric_eigen();
            let imin = (0..n)
                .min_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]))
                .expect("non-empty block");
            let c: Vec<f64> = eig.eigenvectors.column(imin).iter().copied().collect();
            let along = |v: &[f64]| c.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
            let residual = along(&s_b).hypot(along(&dp));
            let with_d = |w: &[f64]| {
                let dw: Vec<f64> = w.iter().zip(&d).map(|(x, s)| x * s).collect();
                (embed(w), embed(&dw))
            };
            let (yl, yr) = with_d(&c);
            let complement: Vec<Vec<f64>> = if n == 2 {
                vec![vec![-c[1], c[0]]]
            } else {
                let cv = Vector3::new(c[0], c[1], c[2]);
                let w1 = any_orthogonal(&cv);
                let w2 = cv.cross(&w1);
                vec![w1.iter().copied().collect(), w2.iter().copied().collect()]
            };
            for w in &complement {
                rest_pairs.push(with_d(w));
            }
            out.push(YCandidate {
                yl,
                yr,
                others: [rest_pairs[0], rest_pairs[1]],
                residual,
            });
        }
        out
    }

    fn lambda(&self, l: &Vector3<f64>, r: &Vector3<f64>) -> f64 {
        l.component_mul(&self.sigma).dot(r)
    }

    /// Places the candidate's Y pair in the Y slot, the larger remaining
    /// `|λ|` in the Z slot, fixes determinants and signs, and normalises.
    fn complete(&self, e: &EdgeData, cand: &YCandidate, scale: f64) -> Option<StandardForm> {
        let [first, second] = cand.others;
        let la = self.lambda(&first.0, &first.1).abs();
        let lb = self.lambda(&second.0, &second.1).abs();
        let tie_tol = TOL * scale.max(1.0);
        let orders: Vec<[(Vector3<f64>, Vector3<f64>); 2]> = if (la - lb).abs() <= tie_tol {
            vec![[first, second], [second, first]]
        } else if la < lb {
            vec![[first, second]]
        } else {
            vec![[second, first]]
        };

        let mut best: Option<StandardForm> = None;
        for [xs, zs] in orders {
            let (mut lx, mut ly, mut lz) = (xs.0, cand.yl, zs.0);
            let (rx, mut ry, rz) = (xs.1, cand.yr, zs.1);
            if Matrix3::from_rows(&[lx.transpose(), ly.transpose(), lz.transpose()]).determinant() < 0.0 {
                ly = -ly;
            }
            if Matrix3::from_rows(&[rx.transpose(), ry.transpose(), rz.transpose()]).determinant() < 0.0 {
                ry = -ry;
            }
            if self.lambda(&lx, &rx) < 0.0 {
                lx = -lx;
                ly = -ly;
            }
            if self.lambda(&lz, &rz) < 0.0 {
                lz = -lz;
                ly = -ly;
            }
            let l = Matrix3::from_rows(&[lx.transpose(), ly.transpose(), lz.transpose()]);
            let r = Matrix3::from_rows(&[rx.transpose(), ry.transpose(), rz.transpose()]);
            let left = Rotation3::from_matrix_unchecked(l * self.u.transpose());
            let right = Rotation3::from_matrix_unchecked(r * self.v.transpose());
            let t = apply_rotations(e, &left, &right);
            let z = t.beta[(2, 2)];
            if z <= TOL * scale.max(1.0) {
                // only the Y slot carries coupling; the null-block variant covers this
                continue;
            }
            let form = StandardForm {
                beta_diag: Vector3::new(t.beta[(0, 0)], t.beta[(1, 1)], z) / z,
                s_vec: Vector3::new(t.s[0], 0.0, t.s[2]) / z,
                p_vec: Vector3::new(t.p[0], 0.0, t.p[2]) / z,
                left_rot: left,
                right_rot: right,
                normalization: z,
                special_case: SpecialCase::None,
                residual: (t.s[1].powi(2) + t.p[1].powi(2)).sqrt().max(cand.residual),
            };
            best = match best {
                Some(b) if !lexicographically_smaller(&form, &b) => Some(b),
                _ => Some(form),
            };
        }
        best
    }
}

fn lexicographically_smaller(a: &StandardForm, b: &StandardForm) -> bool {
    let ka = a.s_vec.iter().chain(a.p_vec.iter());
    let kb = b.s_vec.iter().chain(b.p_vec.iter());
    for (x, y) in ka.zip(kb) {
        if (x - y).abs() > 1e-12 {
            return x < y;
        }
    }
    false
}

/// A unit 2-vector orthogonal to `v` (any unit vector when `v` vanishes).
fn orthogonal_in_plane(v: &[f64]) -> [f64; 2] {
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    if n <= TOL {
        [1.0, 0.0]
    } else {
        [-v[1] / n, v[0] / n]
    }
}
