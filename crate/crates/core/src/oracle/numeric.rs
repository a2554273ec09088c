//! Numerical searches over continuous rotations, used as sampled oracles.

use nalgebra::{DMatrix, DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pauli::{apply_rotations, is_z_matrix_2q, EdgeData, Hamiltonian, Rotation3};
use crate::Execution;

#[derive(Clone, Debug, PartialEq)]
pub struct LmResult {
    pub x: DVector<f64>,
    /// Sum of squared residuals at `x`.
    pub cost: f64,
    pub iterations: usize,
}

/// Damped Gauss–Newton on `½‖f(x)‖²` with a forward-difference Jacobian.
pub fn levenberg_marquardt<F>(f: F, x0: DVector<f64>, max_iter: usize) -> LmResult
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut x = x0;
    let mut r = f(&x);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while iterations < max_iter && cost > 1e-30 && lambda < 1e12 {
        iterations += 1;
        let mut jac = DMatrix::zeros(r.len(), x.len());
        for k in 0..x.len() {
            let h = 1e-7 * x[k].abs().max(1.0);
            let mut xk = x.clone();
            xk[k] += h;
            jac.set_column(k, &((f(&xk) - &r) / h));
        }
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        loop {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += lambda * (jtj[(i, i)] + 1e-12);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                lambda *= 4.0;
                if lambda >= 1e12 {
                    break;
                }
                continue;
            };
            let trial = &x + &step;
            let rt = f(&trial);
            let ct = rt.norm_squared();
            if ct < cost {
                let small = step.norm() < 1e-15 * (1.0 + x.norm());
                x = trial;
                r = rt;
                cost = ct;
                lambda = (lambda / 3.0).max(1e-15);
                if small {
                    return LmResult { x, cost, iterations };
                }
                break;
            }
            lambda *= 4.0;
            if lambda >= 1e12 {
                break;
            }
        }
    }
    LmResult { x, cost, iterations }
}

fn rotation_from(params: &[f64]) -> Rotation3 {
    let v = Vector3::new(params[0], params[1], params[2]);
    let angle = v.norm();
    if angle == 0.0 {
        Rotation3::identity()
    } else {
        Rotation3::from_axis_angle(v, angle)
    }
}

fn random_start(rng: &mut ChaCha8Rng, len: usize) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
}

/// Smallest norm of the odd-Y coefficients of `(O1, O2)·e` found from
/// `restarts` random starts, for `e` scaled to unit size.
pub fn min_imaginary_residual(e: &EdgeData, restarts: usize, seed: u64) -> f64 {
    let scale = e.beta.norm().max(e.s.norm()).max(e.p.norm());
    if scale == 0.0 {
        return 0.0;
    }
    let unit = EdgeData::new(e.beta / scale, e.s / scale, e.p / scale);
    let residual = |x: &DVector<f64>| {
        let t = apply_rotations(&unit, &rotation_from(&x.as_slice()[0..3]), &rotation_from(&x.as_slice()[3..6]));
        DVector::from_vec(vec![
            t.beta[(0, 1)],
            t.beta[(1, 0)],
            t.beta[(1, 2)],
            t.beta[(2, 1)],
            t.s[1],
            t.p[1],
        ])
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..restarts {
        let res = levenberg_marquardt(residual, random_start(&mut rng, 6), 200);
        best = best.min(res.cost.sqrt());
        if best < 1e-12 {
            break;
        }
    }
    best
}

/// Looks for per-qubit rotations under which every Z-matrix condition holds
/// to within `tol` times the largest coefficient.
pub fn continuous_stoquastic_search(
    h: &Hamiltonian,
    restarts: usize,
    seed: u64,
    tol: f64,
) -> Option<Vec<Rotation3>> {
    let n = h.n_qubits();
    let scale = h
        .one_local_terms()
        .map(|(_, _, c)| c.abs())
        .chain(h.two_local_terms().map(|(_, c)| c.abs()))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Some(vec![Rotation3::identity(); n]);
    }
    let edges: Vec<(usize, usize, nalgebra::Matrix3<f64>)> =
        h.edges().into_iter().map(|(u, v)| (u, v, h.coupling(u, v) / scale)).collect();
    let fields: Vec<Vector3<f64>> = (0..n).map(|q| h.local_field(q) / scale).collect();
    let residual = |x: &DVector<f64>| {
        let rots: Vec<Rotation3> = (0..n).map(|q| rotation_from(&x.as_slice()[3 * q..3 * q + 3])).collect();
        let mut out = Vec::with_capacity(5 * edges.len() + 2 * n);
        let mut budget = vec![0.0; n];
        for &(u, v, b) in &edges {
            let t = rots[u].matrix() * b * rots[v].matrix().transpose();
            out.extend([t[(0, 1)], t[(1, 0)], t[(1, 2)], t[(2, 1)]]);
            out.push((t[(0, 0)] + t[(1, 1)].abs()).max(0.0));
            budget[u] += t[(0, 2)].abs();
            budget[v] += t[(2, 0)].abs();
        }
        for q in 0..n {
            let s = rots[q].matrix() * fields[q];
            out.push(s[1]);
            out.push((s[0] + budget[q]).max(0.0));
        }
        DVector::from_vec(out)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        let res = levenberg_marquardt(residual, random_start(&mut rng, 3 * n), 300);
        if residual(&res.x).amax() <= tol {
            return Some((0..n).map(|q| rotation_from(&res.x.as_slice()[3 * q..3 * q + 3])).collect());
        }
    }
    None
}

/// Exhaustive grid over rotations that keep the Y axis fixed up to sign:
/// `O = R_Y(θ)` or `R_Y(θ) R_X(π)`, with `steps` values of `θ` per side.
pub fn grid_search_2q(e: &EdgeData, steps: usize, exec: Execution) -> Option<(Rotation3, Rotation3)> {
    let flip = Rotation3::about_axis(0, std::f64::consts::PI);
    let rots: Vec<Rotation3> = (0..steps)
        .flat_map(|k| {
            let r = Rotation3::about_axis(1, 2.0 * std::f64::consts::PI * k as f64 / steps as f64);
            [r, r.compose(&flip)]
        })
        .collect();
    exec.find_first(rots.len(), |i| {
        rots.iter()
            .find(|o2| is_z_matrix_2q(&apply_rotations(e, &rots[i], o2)))
            .map(|o2| (rots[i], *o2))
    })
}
