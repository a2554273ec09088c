//! Two-qubit analysis: triple-product invariants, realness under local
//! rotations, standard form and the search for a rotation pair that turns
//! the Hamiltonian into a symmetric Z-matrix.

pub mod intervals;
pub mod scan;
pub mod standard;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI};
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::pauli::{apply_rotations, is_z_matrix_2q, EdgeData, Rotation3, SignedPermutation, TOL};
use intervals::{feasible_set, IntervalSet, Quadratic};
pub use scan::{counterexample_edge, region_scan, write_csv, Axis, ScanError, ScanGrid, ScanRow};
pub use standard::{standard_form, standard_forms, SpecialCase, StandardForm, StandardFormError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TripleInvariants {
    pub i10: f64,
    pub i11: f64,
    pub i15: f64,
    pub i16: f64,
    pub i17: f64,
    pub i18: f64,
}

impl TripleInvariants {
    /// Polynomial degree of each invariant in the entries of `(β, S, P)`.
    pub const DEGREES: [i32; 6] = [9, 9, 6, 6, 7, 7];

    pub fn as_array(&self) -> [f64; 6] {
        [self.i10, self.i11, self.i15, self.i16, self.i17, self.i18]
    }

    pub fn max_abs(&self) -> f64 {
        self.as_array().iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

fn triple(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    Matrix3::from_columns(&[*a, *b, *c]).determinant()
}

pub fn triple_invariants(e: &EdgeData) -> TripleInvariants {
    let b = &e.beta;
    let bbt = b * b.transpose();
    let btb = b.transpose() * b;
    let (s, p) = (&e.s, &e.p);
    let bbt_s = bbt * s;
    let btb_p = btb * p;
    let bt_s = b.transpose() * s;
    let b_p = b * p;
    TripleInvariants {
        i10: triple(s, &bbt_s, &(bbt * bbt_s)),
        i11: triple(p, &btb_p, &(btb * btb_p)),
        i15: triple(s, &bbt_s, &b_p),
        i16: triple(&bt_s, p, &btb_p),
        i17: triple(&bt_s, &(b.transpose() * bbt_s), p),
        i18: triple(s, &b_p, &(bbt * b_p)),
    }
}

/// `max(‖β‖_F, ‖S‖, ‖P‖)`.
pub(crate) fn input_scale(e: &EdgeData) -> f64 {
    e.beta.norm().max(e.s.norm()).max(e.p.norm())
}

/// Whether local rotations can make `e` real: every triple invariant `I` of
/// degree `d` satisfies `|I| ≤ ε·scale^d`.
pub fn is_real_locally(e: &EdgeData) -> bool {
    let scale = input_scale(e);
    if scale == 0.0 {
        return true;
    }
    let inv = triple_invariants(e);
    inv.as_array()
        .iter()
        .zip(TripleInvariants::DEGREES)
        .all(|(i, d)| i.abs() <= TOL * scale.powi(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseId {
    /// Already a Z-matrix in the given basis.
    FixedBasis,
    SAndPZero,
    BetaZero,
    /// `cos θ_L ≠ 0`, `cos θ_R ≠ 0`.
    Case1,
    /// `cos θ_L = 0`.
    Case2,
    /// `cos θ_R = 0`.
    Case3,
    /// `cos θ_L = cos θ_R = 0`.
    Case4,
}

impl CaseId {
    pub fn label(self) -> &'static str {
        match self {
            CaseId::FixedBasis => "fixed_basis",
            CaseId::SAndPZero => "s_and_p_zero",
            CaseId::BetaZero => "beta_zero",
            CaseId::Case1 => "case1",
            CaseId::Case2 => "case2",
            CaseId::Case3 => "case3",
            CaseId::Case4 => "case4",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Rotation pair `(O1, O2)` with `apply_rotations(e, O1, O2)` a Z-matrix.
///
/// For the inequality cases `O1 = O(θ_L, γ_L)·left_rot` and
/// `O2 = O(θ_R, γ_R)·right_rot`, where `O(θ, γ)` rotates in the X–Z plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Witness {
    pub theta_l: f64,
    pub theta_r: f64,
    pub gamma_l: i8,
    pub gamma_r: i8,
    pub case: CaseId,
    /// Index into [`TwoQubitDecision::forms`]; `None` when no form was used.
    pub variant: Option<usize>,
    pub o1: Rotation3,
    pub o2: Rotation3,
}

impl Witness {
    fn identity(case: CaseId) -> Self {
        Witness {
            theta_l: 0.0,
            theta_r: 0.0,
            gamma_l: 1,
            gamma_r: 1,
            case,
            variant: None,
            o1: Rotation3::identity(),
            o2: Rotation3::identity(),
        }
    }

    pub fn apply(&self, e: &EdgeData) -> EdgeData {
        apply_rotations(e, &self.o1, &self.o2)
    }
}

/// `O(θ, γ) = [[cos θ, 0, sin θ], [0, γ, 0], [-γ sin θ, 0, γ cos θ]]`.
pub fn xz_rotation(theta: f64, gamma: i8) -> Rotation3 {
    let (s, c) = theta.sin_cos();
    let g = f64::from(gamma);
    Rotation3::from_matrix_unchecked(Matrix3::new(c, 0.0, s, 0.0, g, 0.0, -g * s, 0.0, g * c))
}

/// Sampling parameters of the Case 1 search over `x₂ = tan θ_R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    pub base_samples: usize,
    pub refine_subsamples: usize,
    pub refine_rounds: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            base_samples: 4096,
            refine_subsamples: 64,
            refine_rounds: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitDecision {
    pub stoquastic: bool,
    pub real: bool,
    pub invariants: TripleInvariants,
    pub forms: Vec<StandardForm>,
    pub witness: Option<Witness>,
    pub certificate_note: String,
    pub config: SearchConfig,
    /// Number of `x₂` values examined in Case 1 across all forms.
    pub case1_samples: usize,
}

pub fn decide_stoquastic_2q(e: &EdgeData) -> TwoQubitDecision {
    decide_stoquastic_2q_with(e, SearchConfig::default())
}

pub fn decide_stoquastic_2q_with(e: &EdgeData, config: SearchConfig) -> TwoQubitDecision {
    let invariants = if e.is_finite() {
        triple_invariants(e)
    } else {
        TripleInvariants {
            i10: f64::NAN,
            i11: f64::NAN,
            i15: f64::NAN,
            i16: f64::NAN,
            i17: f64::NAN,
            i18: f64::NAN,
        }
    };
    let mut out = TwoQubitDecision {
        stoquastic: false,
        real: false,
        invariants,
        forms: Vec::new(),
        witness: None,
        certificate_note: String::new(),
        config,
        case1_samples: 0,
    };
    if !e.is_finite() {
        out.certificate_note = "edge data contains non-finite entries".into();
        return out;
    }
    if is_z_matrix_2q(e) {
        out.real = true;
        out.stoquastic = true;
        out.witness = Some(Witness::identity(CaseId::FixedBasis));
        out.certificate_note = "already a symmetric Z-matrix in the given basis".into();
        return out;
    }
    let forms = match standard_forms(e) {
        Ok(f) => f,
        Err(StandardFormError::NotReal) => {
            out.certificate_note = format!(
                "not real under local rotations: max |triple invariant| = {:e}",
                invariants.max_abs()
            );
            return out;
        }
        Err(err) => {
            out.certificate_note = err.to_string();
            return out;
        }
    };
    out.real = true;
    out.forms = forms;

    let first = out.forms[0];
    match first.special_case {
        SpecialCase::SAndPZero => {
            let (o1, o2) = standard::coupling_witness(e);
            out.witness = Some(Witness {
                o1,
                o2,
                ..Witness::identity(CaseId::SAndPZero)
            });
            out.certificate_note = "no 1-local terms: largest coupling moved to a negative XX".into();
        }
        SpecialCase::BetaZero => {
            out.witness = Some(Witness {
                variant: Some(0),
                o1: first.left_rot,
                o2: first.right_rot,
                ..Witness::identity(CaseId::BetaZero)
            });
            out.certificate_note = "no coupling: both local fields rotated onto -X".into();
        }
        SpecialCase::None => {
            for (k, form) in out.forms.iter().enumerate() {
                let mut search = FormSearch::new(e, form, k, config);
                let found = search.run();
                out.case1_samples += search.case1_samples;
                if let Some((w, note)) = found {
                    out.witness = Some(w);
                    out.certificate_note = note;
                    break;
                }
            }
            if out.witness.is_none() {
                out.certificate_note = format!(
                    "cases 1-4 refuted on all {} standard form(s); case 1 examined {} values of x2 \
                     ({} base samples, {} refinement rounds of {})",
                    out.forms.len(),
                    out.case1_samples,
                    config.base_samples,
                    config.refine_rounds,
                    config.refine_subsamples
                );
            }
        }
    }
    if let Some(w) = &out.witness {
        out.stoquastic = is_z_matrix_2q(&scaled(&w.apply(e), witness_scale(&out, w)));
        if !out.stoquastic {
            out.certificate_note = format!("witness failed verification: {}", out.certificate_note);
            out.witness = None;
        }
    }
    out
}

fn witness_scale(d: &TwoQubitDecision, w: &Witness) -> f64 {
    w.variant.map_or(1.0, |k| d.forms[k].normalization)
}

fn scaled(e: &EdgeData, by: f64) -> EdgeData {
    EdgeData::new(e.beta / by, e.s / by, e.p / by)
}

fn theta_from_tan(x: f64, delta: f64) -> f64 {
    if delta < 0.0 {
        x.atan() + PI
    } else {
        x.atan()
    }
}

/// The inequality search on one standard form.
struct FormSearch<'a> {
    e_scaled: EdgeData,
    form: &'a StandardForm,
    variant: usize,
    config: SearchConfig,
    case1_samples: usize,
    a: f64,
    y: f64,
    sx: f64,
    sz: f64,
    px: f64,
    pz: f64,
}

const SIGNS: [f64; 2] = [1.0, -1.0];

impl<'a> FormSearch<'a> {
    fn new(e: &EdgeData, form: &'a StandardForm, variant: usize, config: SearchConfig) -> Self {
        FormSearch {
            e_scaled: scaled(e, form.normalization),
            form,
            variant,
            config,
            case1_samples: 0,
            a: form.beta_diag.x,
            y: form.beta_diag.y,
            sx: form.s_vec.x,
            sz: form.s_vec.z,
            px: form.p_vec.x,
            pz: form.p_vec.z,
        }
    }

    fn run(&mut self) -> Option<(Witness, String)> {
        self.case4()
            .or_else(|| self.case2())
            .or_else(|| self.case3())
            .or_else(|| self.case1())
    }

    fn verify(&self, theta_l: f64, theta_r: f64, case: CaseId) -> Option<Witness> {
        let o1 = xz_rotation(theta_l, 1).compose(&self.form.left_rot);
        let o2 = xz_rotation(theta_r, 1).compose(&self.form.right_rot);
        is_z_matrix_2q(&apply_rotations(&self.e_scaled, &o1, &o2)).then_some(Witness {
            theta_l,
            theta_r,
            gamma_l: 1,
            gamma_r: 1,
            case,
            variant: Some(self.variant),
            o1,
            o2,
        })
    }

    fn note(&self, w: &Witness, detail: &str) -> String {
        format!(
            "{} feasible on standard form {} (a_XX={:.6}, a_YY={:.6}){}: theta_L={:.9}, theta_R={:.9}",
            w.case, self.variant, self.a, self.y, detail, w.theta_l, w.theta_r
        )
    }

    fn case4(&self) -> Option<(Witness, String)> {
        for dl in SIGNS {
            for dr in SIGNS {
                let ok = dl * dr <= 0.0
                    && self.y * self.y <= 1.0 + 1e-12
                    && dr * self.pz <= 1e-12
                    && dl * self.sz <= 1e-12;
                if ok {
                    if let Some(w) = self.verify(dl * FRAC_PI_2, dr * FRAC_PI_2, CaseId::Case4) {
                        let note = self.note(&w, "");
                        return Some((w, note));
                    }
                }
            }
        }
        None
    }

    fn case2(&self) -> Option<(Witness, String)> {
        let (a, y, sz, px, pz) = (self.a, self.y, self.sz, self.px, self.pz);
        for dl in SIGNS {
            for dr in SIGNS {
                let set = feasible_set(&[
                    Quadratic::linear_nonpositive(dl * dr, 0.0, 1.0),
                    Quadratic::new(1.0 - y * y, 0.0, -y * y),
                    Quadratic::linear_nonpositive(dr, px, pz),
                    Quadratic::new(pz * pz, 2.0 * px * pz, px * px - a * a),
                    Quadratic::linear_nonpositive(dl, sz, 0.0),
                    Quadratic::new(sz * sz, 0.0, sz * sz - 1.0),
                ]);
                for x2 in set.representatives() {
                    if let Some(w) = self.verify(dl * FRAC_PI_2, theta_from_tan(x2, dr), CaseId::Case2) {
                        let note = self.note(&w, "");
                        return Some((w, note));
                    }
                }
            }
        }
        None
    }

    fn case3(&self) -> Option<(Witness, String)> {
        let (a, y, sx, sz, pz) = (self.a, self.y, self.sx, self.sz, self.pz);
        for dl in SIGNS {
            for dr in SIGNS {
                let set = feasible_set(&[
                    Quadratic::linear_nonpositive(dl * dr, 0.0, 1.0),
                    Quadratic::new(1.0 - y * y, 0.0, -y * y),
                    Quadratic::linear_nonpositive(dr, pz, 0.0),
                    Quadratic::new(pz * pz, 0.0, pz * pz - 1.0),
                    Quadratic::linear_nonpositive(dl, sx, sz),
                    Quadratic::new(sz * sz, 2.0 * sx * sz, sx * sx - a * a),
                ]);
                for x1 in set.candidates() {
                    if let Some(w) = self.verify(theta_from_tan(x1, dl), dr * FRAC_PI_2, CaseId::Case3) {
                        let note = self.note(&w, "");
                        return Some((w, note));
                    }
                }
            }
        }
        None
    }

    /// The three quadratic constraints of Case 1 at fixed `x₂`, in `x₁`.
    fn case1_quadratics(&self, x2: f64) -> [Quadratic; 3] {
        let (a, y, sx, sz, px, pz) = (self.a, self.y, self.sx, self.sz, self.px, self.pz);
        let m = 1.0 + x2 * x2;
        let k = (px + pz * x2).powi(2);
        [
            Quadratic::new(x2 * x2 - y * y * m, 2.0 * a * x2, a * a - y * y * m),
            Quadratic::new(k - a * a, 2.0 * a * x2, k - x2 * x2),
            Quadratic::new(sz * sz * m - 1.0, 2.0 * sx * sz * m + 2.0 * a * x2, sx * sx * m - a * a * x2 * x2),
        ]
    }

    /// Qualitative shape of the Case 1 constraint system at `x₂`: signs of
    /// leading and constant terms, root counts and the interleaving of roots.
    fn signature(&self, x2: f64, quads: &[Quadratic; 3]) -> Vec<i8> {
        let sgn = |v: f64| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 };
        let mut sig = vec![sgn(self.px + self.pz * x2)];
        let mut roots: Vec<(f64, i8)> = Vec::new();
        for (id, q) in quads.iter().enumerate() {
            sig.push(sgn(q.c2));
            let r = q.boundary_roots(0.0);
            sig.push(r.len() as i8);
            roots.extend(r.into_iter().map(|x| (x, id as i8)));
        }
        if x2 != 0.0 {
            roots.push((-self.a / x2, 3));
        }
        if self.sz != 0.0 {
            roots.push((-self.sx / self.sz, 4));
        }
        roots.sort_by(|p, q| p.0.total_cmp(&q.0));
        // roots that agree to rounding are ordered by id
        let mut start = 0;
        while start < roots.len() {
            let mut end = start + 1;
            while end < roots.len() && roots[end].0 - roots[end - 1].0 <= 1e-6 * (1.0 + roots[end].0.abs()) {
                end += 1;
            }
            roots[start..end].sort_by_key(|r| r.1);
            start = end;
        }
        sig.extend(roots.iter().map(|r| r.1));
        sig
    }

    /// Searches `x₁` exactly at one `x₂`; returns the signature and any witness.
    fn case1_at(&mut self, t: f64) -> (Vec<i8>, Option<Witness>) {
        self.case1_samples += 1;
        let x2 = t.tan();
        let quads = self.case1_quadratics(x2);
        let sig = self.signature(x2, &quads);
        let common = feasible_set(&quads);
        if common.is_empty() {
            return (sig, None);
        }
        let (a, sx, sz, px, pz) = (self.a, self.sx, self.sz, self.px, self.pz);
        for dr in SIGNS {
            if dr * (px + pz * x2) > 1e-12 * (1.0 + px.abs() + (pz * x2).abs()) {
                continue;
            }
            for dl in SIGNS {
                let set = common
                    .intersect(&linear_set(dl * dr, a, x2))
                    .intersect(&linear_set(dl, sx, sz));
                for x1 in set.candidates() {
                    let th_l = theta_from_tan(x1, dl);
                    let th_r = theta_from_tan(x2, dr);
                    if let Some(w) = self.verify(th_l, th_r, CaseId::Case1) {
                        return (sig, Some(w));
                    }
                }
            }
        }
        (sig, None)
    }

    /// Boundaries of the Case 1 constraints at `x₂` as `(c2, c1, c0)` in `x₁`:
    /// the three quadratics and the two sign conditions.
    fn case1_boundaries(&self, x2: f64) -> [(f64, f64, f64); 5] {
        let q = self.case1_quadratics(x2);
        [
            (q[0].c2, q[0].c1, q[0].c0),
            (q[1].c2, q[1].c1, q[1].c0),
            (q[2].c2, q[2].c1, q[2].c0),
            (0.0, x2, self.a),
            (0.0, self.sz, self.sx),
        ]
    }

    /// Functions of `x₂` that vanish where two boundaries share a root or a
    /// quadratic boundary has a double root. Isolated feasible points lie on
    /// their zeros.
    fn case1_critical_values(&self, t: f64) -> [f64; CRITICAL] {
        let b = self.case1_boundaries(t.tan());
        std::array::from_fn(|k| clamp_rounding(critical_value(&b, k)))
    }

    /// Locates zeros of the critical functions between the samples `ts`
    /// (sign changes by bisection, touching zeros by ternary search on `|f|`)
    /// and searches `x₁` exactly there.
    fn case1_critical(&mut self, ts: &[f64]) -> Option<(Witness, String)> {
        let vals: Vec<[f64; CRITICAL]> = ts.iter().map(|&t| self.case1_critical_values(t)).collect();
        let mut candidates = Vec::new();
        for k in 0..CRITICAL {
            let f = |t: f64| critical_value(&self.case1_boundaries(t.tan()), k);
            for i in 0..ts.len().saturating_sub(1) {
                let (f0, f1) = (vals[i][k], vals[i + 1][k]);
                if f0 * f1 < 0.0 {
                    let (mut lo, mut hi) = (ts[i], ts[i + 1]);
                    for _ in 0..100 {
                        let mid = 0.5 * (lo + hi);
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        if f(mid) * f0 > 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    candidates.extend([lo, hi]);
                }
                if i > 0 {
                    let (fp, fc) = (vals[i - 1][k], f0);
                    // a touching zero leaves a small normalised value at the nearest sample
                    let is_min = fc.abs() < 0.25
                        && fc.abs() < fp.abs() - 1e-12
                        && fc.abs() <= f1.abs() - 1e-12
                        && fp * fc > 0.0
                        && fc * f1 > 0.0;
                    if is_min {
                        let (mut lo, mut hi) = (ts[i - 1], ts[i + 1]);
                        for _ in 0..200 {
                            let m1 = lo + (hi - lo) / 3.0;
                            let m2 = hi - (hi - lo) / 3.0;
                            if m1 <= lo || m2 >= hi {
                                break;
                            }
                            if f(m1).abs() < f(m2).abs() {
                                hi = m2;
                            } else {
                                lo = m1;
                            }
                        }
                        let mut t = 0.5 * (lo + hi);
                        // the vertex of a parabola through the signed values is far less
                        // sensitive to rounding than the minimum of |f|
                        for h in [1e-3, 1e-4] {
                            let (fm, f0, fp) = (f(t - h), f(t), f(t + h));
                            let curv = fp - 2.0 * f0 + fm;
                            if curv != 0.0 {
                                let step = 0.5 * h * (fp - fm) / curv;
                                if step.abs() <= h {
                                    t -= step;
                                }
                            }
                        }
                        candidates.extend([0.5 * (lo + hi), t]);
                    }
                }
            }
        }
        candidates.sort_by(f64::total_cmp);
        candidates.dedup();
        for &t in &candidates {
            if let (_, Some(w)) = self.case1_at(t) {
                let note = self.note(&w, &format!(" at critical x2 = {:.9}", t.tan()));
                return Some((w, note));
            }
        }
        for &t in &candidates {
            let x2 = t.tan();
            let mut starts: Vec<f64> = self.case1_boundaries(x2).into_iter().flat_map(real_roots).collect();
            starts.sort_by(f64::total_cmp);
            starts.dedup();
            for x1 in starts {
                for (dl, dr) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    if let Some(w) = self.polish(theta_from_tan(x1, dl), theta_from_tan(x2, dr)) {
                        let note = self.note(&w, &format!(" near critical x2 = {x2:.9}"));
                        return Some((w, note));
                    }
                }
            }
        }
        None
    }

    /// Signed Z-matrix margins of the rotated standard form, all `≤ 0` at a witness.
    fn margins(&self, theta_l: f64, theta_r: f64) -> [f64; 6] {
        let o1 = xz_rotation(theta_l, 1).compose(&self.form.left_rot);
        let o2 = xz_rotation(theta_r, 1).compose(&self.form.right_rot);
        let t = apply_rotations(&self.e_scaled, &o1, &o2);
        let b = &t.beta;
        [
            b[(0, 0)] + b[(1, 1)],
            b[(0, 0)] - b[(1, 1)],
            t.p[0] + b[(2, 0)],
            t.p[0] - b[(2, 0)],
            t.s[0] + b[(0, 2)],
            t.s[0] - b[(0, 2)],
        ]
    }

    /// Newton iteration driving pairs of nearly active margins to zero from
    /// an approximate witness, for feasible sets that shrink to a point.
    fn polish(&self, theta_l: f64, theta_r: f64) -> Option<Witness> {
        const NEAR: f64 = 1e-2;
        let g = self.margins(theta_l, theta_r);
        if g.iter().any(|&v| v > NEAR) {
            return None;
        }
        let active: Vec<usize> = (0..6).filter(|&i| g[i] > -NEAR).collect();
        for (n, &i) in active.iter().enumerate() {
            for &j in &active[n + 1..] {
                let (mut tl, mut tr) = (theta_l, theta_r);
                for _ in 0..20 {
                    let h = 1e-7;
                    let f = self.margins(tl, tr);
                    let (lp, lm) = (self.margins(tl + h, tr), self.margins(tl - h, tr));
                    let (rp, rm) = (self.margins(tl, tr + h), self.margins(tl, tr - h));
                    let jac = [
                        [(lp[i] - lm[i]) / (2.0 * h), (rp[i] - rm[i]) / (2.0 * h)],
                        [(lp[j] - lm[j]) / (2.0 * h), (rp[j] - rm[j]) / (2.0 * h)],
                    ];
                    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
                    let dl = (f[i] * jac[1][1] - f[j] * jac[0][1]) / det;
                    let dr = (f[j] * jac[0][0] - f[i] * jac[1][0]) / det;
                    if !(dl.is_finite() && dr.is_finite()) || dl.abs() + dr.abs() > NEAR {
                        break;
                    }
                    tl -= dl;
                    tr -= dr;
                    if dl.abs() + dr.abs() <= 1e-15 {
                        break;
                    }
                }
                if let Some(w) = self.verify(tl, tr, CaseId::Case1) {
                    return Some(w);
                }
            }
        }
        None
    }

    fn case1(&mut self) -> Option<(Witness, String)> {
        let n = self.config.base_samples.max(1);
        let mut ts: Vec<f64> = (0..n)
            .map(|k| -FRAC_PI_2 + (k as f64 + 0.5) * PI / n as f64)
            .collect();
        // multiples of π/8 are where Clifford-adjacent witnesses live
        ts.extend((-3..=3).map(|j| f64::from(j) * FRAC_PI_8));
        if self.pz != 0.0 {
            ts.push((-self.px / self.pz).atan());
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup();

        let mut samples = Vec::with_capacity(ts.len());
        for &t in &ts {
            let (sig, w) = self.case1_at(t);
            if let Some(w) = w {
                let note = self.note(&w, &format!(" at x2 = {:.9}", t.tan()));
                return Some((w, note));
            }
            samples.push((t, sig));
        }
        if let Some(found) = self.case1_critical(&ts) {
            return Some(found);
        }
        for _ in 0..self.config.refine_rounds {
            let mut next = Vec::new();
            for pair in samples.windows(2) {
                let ((t0, s0), (t1, s1)) = (&pair[0], &pair[1]);
                if s0 == s1 {
                    continue;
                }
                let m = self.config.refine_subsamples;
                next.push((*t0, s0.clone()));
                for j in 1..=m {
                    let t = t0 + (t1 - t0) * j as f64 / (m + 1) as f64;
                    let (sig, w) = self.case1_at(t);
                    if let Some(w) = w {
                        let note = self.note(&w, &format!(" at refined x2 = {:.9}", t.tan()));
                        return Some((w, note));
                    }
                    next.push((t, sig));
                }
                next.push((*t1, s1.clone()));
            }
            samples = next;
        }
        None
    }
}

const CRITICAL: usize = 13;

/// Pairwise resultants of the five boundaries, then discriminants of the
/// three quadratics, each divided by a bound on its magnitude.
const PAIRS: [(usize, usize); 10] = [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];

fn critical_value(b: &[(f64, f64, f64); 5], k: usize) -> f64 {
    let (value, bound) = match PAIRS.get(k) {
        Some(&(i, j)) => resultant(b[i], b[j]),
        None => {
            let q = b[k - PAIRS.len()];
            (q.1 * q.1 - 4.0 * q.2 * q.0, q.1 * q.1 + 4.0 * (q.2 * q.0).abs())
        }
    };
    if bound == 0.0 {
        0.0
    } else {
        value / bound
    }
}

/// Real roots of `c2·x² + c1·x + c0`, ignoring the sign of a slightly negative discriminant.
fn real_roots(q: (f64, f64, f64)) -> Vec<f64> {
    let (c2, c1, c0) = q;
    if c2 == 0.0 {
        return if c1 == 0.0 { Vec::new() } else { vec![-c0 / c1] };
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < -1e-6 * (c1 * c1 + (4.0 * c2 * c0).abs()) {
        return Vec::new();
    }
    let r = disc.max(0.0).sqrt();
    vec![(-c1 - r) / (2.0 * c2), (-c1 + r) / (2.0 * c2)]
}

/// Normalised values lost to rounding count as zero.
fn clamp_rounding(v: f64) -> f64 {
    if v.abs() <= 1e-12 {
        0.0
    } else {
        v
    }
}

/// Resultant of two polynomials of degree at most two, zero iff they share
/// a root, with the same expression evaluated on absolute values.
fn resultant(p: (f64, f64, f64), q: (f64, f64, f64)) -> (f64, f64) {
    let ((a2, a1, a0), (b2, b1, b0)) = (p, q);
    if a2 == 0.0 && b2 == 0.0 {
        return (a1 * b0 - a0 * b1, (a1 * b0).abs() + (a0 * b1).abs());
    }
    let value = (a2 * b0 - a0 * b2).powi(2) - (a2 * b1 - a1 * b2) * (a1 * b0 - a0 * b1);
    let bound = ((a2 * b0).abs() + (a0 * b2).abs()).powi(2)
        + ((a2 * b1).abs() + (a1 * b2).abs()) * ((a1 * b0).abs() + (a0 * b1).abs());
    (value, bound)
}

fn linear_set(sign: f64, u: f64, v: f64) -> IntervalSet {
    let q = Quadratic::linear_nonpositive(sign, u, v);
    q.solution_set(q.default_slack())
}

/// Whether some single-qubit Clifford pair turns `e` into a Z-matrix.
pub fn clifford_witness_2q(e: &EdgeData) -> Option<(SignedPermutation, SignedPermutation)> {
    let cl = SignedPermutation::cliffords();
    for a in cl {
        for b in cl {
            let t = EdgeData::new(
                a.matrix() * e.beta * b.matrix().transpose(),
                a.matrix() * e.s,
                b.matrix() * e.p,
            );
            if is_z_matrix_2q(&t) {
                return Some((*a, *b));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag(a: f64, b: f64, c: f64) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::new(a, b, c))
    }

    #[test]
    fn vandermonde_invariant() {
        let e = EdgeData::new(diag(1.0, 2.0, 3.0), Vector3::new(1.0, 1.0, 1.0), Vector3::zeros());
        let inv = triple_invariants(&e);
        // det of the rows (1,1,1), (1,4,9), (1,16,81)
        let oracle = Matrix3::new(1.0, 1.0, 1.0, 1.0, 4.0, 9.0, 1.0, 16.0, 81.0).determinant();
        assert!((inv.i10 - oracle).abs() < 1e-9);
        assert!((oracle - 120.0).abs() < 1e-9);
        for v in [inv.i11, inv.i15, inv.i16, inv.i17, inv.i18] {
            assert_eq!(v, 0.0);
        }
        assert!(!is_real_locally(&e));
    }

    #[test]
    fn invariants_vanish_without_coupling_and_on_real_data() {
        let e = EdgeData::new(Matrix3::zeros(), Vector3::new(1.0, 2.0, 3.0), Vector3::new(-1.0, 0.5, 2.0));
        assert_eq!(triple_invariants(&e).max_abs(), 0.0);
        let real = EdgeData::new(
            Matrix3::new(1.0, 0.0, 0.3, 0.0, -2.0, 0.0, 0.7, 0.0, 0.4),
            Vector3::new(0.2, 0.0, -1.0),
            Vector3::new(1.5, 0.0, 0.3),
        );
        assert!(triple_invariants(&real).max_abs() < 1e-12);
        assert!(is_real_locally(&real));
    }

    #[test]
    fn rank_one_with_y_field_is_real() {
        let e = EdgeData::new(diag(1.0, 0.0, 0.0), Vector3::new(0.0, 1.0, 0.0), Vector3::zeros());
        assert_eq!(triple_invariants(&e).max_abs(), 0.0);
        assert!(is_real_locally(&e));
        // Y → Z on the first qubit removes the imaginary field
        let r = Rotation3::about_axis(0, FRAC_PI_2);
        let t = apply_rotations(&e, &r, &Rotation3::identity());
        assert!(t.s[1].abs() < 1e-15 && (t.s[2] - 1.0).abs() < 1e-15);
    }

    fn eq5(ax: f64, az: f64, axx: f64) -> EdgeData {
        counterexample_edge(ax, az, axx)
    }

    #[test]
    fn counterexample_point_is_stoquastic() {
        let e = eq5(2.0, 0.5, 0.2);
        assert!(2.0 * (0.5f64 - 2.0).powi(2) >= (0.2f64 + 1.0).powi(2));
        let d = decide_stoquastic_2q(&e);
        assert!(d.stoquastic, "{}", d.certificate_note);
        let w = d.witness.unwrap();
        let t = w.apply(&e);
        assert!(is_z_matrix_2q(&t));
        assert!(clifford_witness_2q(&e).is_none());
    }

    #[test]
    fn already_z_matrix_gets_identity_witness() {
        let e = EdgeData::coupling_only(diag(-1.0, -1.0, 0.0));
        let d = decide_stoquastic_2q(&e);
        assert!(d.stoquastic);
        let w = d.witness.unwrap();
        assert_eq!(w.case, CaseId::FixedBasis);
        assert_eq!(w.o1, Rotation3::identity());
    }

    #[test]
    fn non_real_is_not_stoquastic() {
        let e = EdgeData::new(diag(1.0, 2.0, 3.0), Vector3::new(1.0, 1.0, 1.0), Vector3::zeros());
        let d = decide_stoquastic_2q(&e);
        assert!(!d.real && !d.stoquastic);
        assert!(d.certificate_note.contains("not real"));
    }

    #[test]
    fn antiferromagnetic_heisenberg_pair_is_stoquastic() {
        let e = EdgeData::coupling_only(diag(1.0, 1.0, 1.0));
        let d = decide_stoquastic_2q(&e);
        assert!(d.stoquastic);
        assert_eq!(d.witness.unwrap().case, CaseId::SAndPZero);
    }

    #[test]
    fn lone_yy_with_local_fields_is_stoquastic() {
        // y·YY + X⊗I + I⊗Z becomes y·ZZ - X⊗I - I⊗X under Cliffords
        for y in [0.3, 1.0, 4.0, -2.5] {
            let e = EdgeData::new(diag(0.0, y, 0.0), Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.0, 0.0, 1.0));
            let d = decide_stoquastic_2q(&e);
            assert!(d.stoquastic, "y = {y}: {}", d.certificate_note);
            let q1 = SignedPermutation::new([0, 2, 1], [-1, 1, 1]);
            let q2 = SignedPermutation::new([1, 2, 0], [-1, -1, 1]);
            assert_eq!(q1.det(), 1);
            assert_eq!(q2.det(), 1);
            let t = EdgeData::new(
                q1.matrix() * e.beta * q2.matrix().transpose(),
                q1.matrix() * e.s,
                q2.matrix() * e.p,
            );
            assert!(is_z_matrix_2q(&t), "{t:?}");
        }
    }

    #[test]
    fn zero_fields_zero_coupling_grid_points() {
        for axx in [0.0, 0.25, 1.0] {
            let d = decide_stoquastic_2q(&eq5(0.0, 0.0, axx));
            assert!(d.stoquastic);
            assert!(clifford_witness_2q(&eq5(0.0, 0.0, axx)).is_some());
        }
    }

    #[test]
    fn xz_rotation_matches_y_axis_rotation() {
        let r = xz_rotation(0.7, 1);
        assert!((r.matrix() - Rotation3::about_axis(1, 0.7).matrix()).abs().max() < 1e-15);
        assert!((xz_rotation(0.7, -1).matrix().determinant() - 1.0).abs() < 1e-15);
    }

    fn arb_edge() -> impl Strategy<Value = EdgeData> {
        (
            proptest::array::uniform9(-1.0..1.0f64),
            proptest::array::uniform3(-1.0..1.0f64),
            proptest::array::uniform3(-1.0..1.0f64),
        )
            .prop_map(|(b, s, p)| EdgeData::new(Matrix3::from_row_slice(&b), Vector3::from(s), Vector3::from(p)))
    }

    fn arb_rotation() -> impl Strategy<Value = Rotation3> {
        (proptest::array::uniform3(-1.0..1.0f64), 0.0..6.3f64)
            .prop_map(|(a, t)| Rotation3::from_axis_angle(Vector3::from(a) + Vector3::new(0.0, 0.0, 1e-3), t))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn invariants_are_rotation_invariant(e in arb_edge(), o1 in arb_rotation(), o2 in arb_rotation()) {
            let a = triple_invariants(&e).as_array();
            let b = triple_invariants(&apply_rotations(&e, &o1, &o2)).as_array();
            for (x, y) in a.iter().zip(b) {
                prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
            }
        }

        #[test]
        fn every_witness_verifies(e in arb_edge()) {
            let d = decide_stoquastic_2q_with(&e, SearchConfig { base_samples: 256, ..Default::default() });
            if let Some(w) = d.witness {
                let by = w.variant.map_or(1.0, |k| d.forms[k].normalization);
                prop_assert!(is_z_matrix_2q(&scaled(&w.apply(&e), by)));
            }
        }
    }
}
