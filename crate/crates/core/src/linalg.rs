//! Small dense and iterative linear-algebra kernels plus finite-difference
//! derivative assembly.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Relative tolerance used when a linear solve feeds a functional value
/// that is later differentiated numerically.
pub(crate) const EVAL_SOLVE_TOL: f64 = 1e-13;

/// Applies the unscaled 3-point / 5-point stencil `-∇²` with zero Dirichlet
/// data to raw nodal values.
pub(crate) fn stencil_apply(mesh: &Mesh, u: &[f64], out: &mut [f64]) {
    let n = mesh.n();
    let inv_h2 = 1.0 / (mesh.h() * mesh.h());
    match mesh.dim() {
        1 => {
            for i in 0..n {
                let left = if i > 0 { u[i - 1] } else { 0.0 };
                let right = if i + 1 < n { u[i + 1] } else { 0.0 };
                out[i] = (2.0 * u[i] - left - right) * inv_h2;
            }
        }
        _ => {
            for iy in 0..n {
                for ix in 0..n {
                    let k = iy * n + ix;
                    let mut acc = 4.0 * u[k];
                    if ix > 0 {
                        acc -= u[k - 1];
                    }
                    if ix + 1 < n {
                        acc -= u[k + 1];
                    }
                    if iy > 0 {
                        acc -= u[k - n];
                    }
                    if iy + 1 < n {
                        acc -= u[k + n];
                    }
                    out[k] = acc * inv_h2;
                }
            }
        }
    }
}

/// Solves `(−γ∇² + diag(d)) x = b`.
///
/// 1D uses LDLᵀ elimination on the tridiagonal matrix and fails with
/// [`Error::NotPositiveDefinite`] on the first non-positive pivot. 2D uses
/// unpreconditioned conjugate gradients, which reports the same error when
/// it meets a direction of non-positive curvature.
pub(crate) fn solve_shifted(
    mesh: &Mesh,
    gamma: f64,
    diag: &[f64],
    rhs: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    match mesh.dim() {
        1 => solve_tridiagonal_spd(mesh, gamma, diag, rhs),
        _ => {
            let apply = |x: &[f64], out: &mut [f64]| {
                stencil_apply(mesh, x, out);
                for ((o, &xi), &di) in out.iter_mut().zip(x).zip(diag) {
                    *o = gamma * *o + di * xi;
                }
            };
            let cap = 10 * mesh.n() * mesh.n();
            conjugate_gradients(apply, rhs, tol, cap.max(50))
        }
    }
}

fn solve_tridiagonal_spd(mesh: &Mesh, gamma: f64, diag: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = rhs.len();
    let inv_h2 = 1.0 / (mesh.h() * mesh.h());
    let off = -gamma * inv_h2;
    let mut pivots = vec![0.0; n];
    let mut y = vec![0.0; n];
    for i in 0..n {
        let a = 2.0 * gamma * inv_h2 + diag[i];
        let p = if i == 0 { a } else { a - off * off / pivots[i - 1] };
        if !(p > 0.0) {
            return Err(Error::NotPositiveDefinite { row: i, pivot: p });
        }
        pivots[i] = p;
        y[i] = if i == 0 {
            rhs[0]
        } else {
            rhs[i] - off / pivots[i - 1] * y[i - 1]
        };
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let next = if i + 1 < n { off * x[i + 1] } else { 0.0 };
        x[i] = (y[i] - next) / pivots[i];
    }
    Ok(x)
}

/// Unpreconditioned CG for a symmetric operator given as a closure.
///
/// Stops when `‖b − Ax‖₂ ≤ tol·‖b‖₂`.
pub(crate) fn conjugate_gradients(
    mut apply: impl FnMut(&[f64], &mut [f64]),
    rhs: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let n = rhs.len();
    let bnorm = dot(rhs, rhs).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut r = rhs.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    for it in 0..max_iter {
        if rr.sqrt() <= tol * bnorm {
            return Ok(x);
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite { row: it, pivot: pap });
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        // Recompute the true residual periodically to keep rounding in check.
        if it % 50 == 49 {
            apply(&x, &mut ap);
            for i in 0..n {
                r[i] = rhs[i] - ap[i];
            }
        }
        let beta = rr_new / rr;
        rr = dot(&r, &r);
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    // Accept if the true residual made it after all.
    apply(&x, &mut ap);
    let res = rhs
        .iter()
        .zip(&ap)
        .map(|(b, a)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt();
    if res <= tol * bnorm {
        Ok(x)
    } else {
        Err(Error::CgNoConvergence {
            iterations: max_iter,
            residual: res / bnorm,
        })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Default finite-difference step: `1e-4 · (1 + ‖x‖∞)`.
pub fn fd_step(x: &[f64]) -> f64 {
    1e-4 * (1.0 + x.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

/// Central-difference gradient.
pub fn fd_gradient<F>(f: &F, x: &[f64], step: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    (0..x.len())
        .into_par_iter()
        .map(|i| {
            let mut xp = x.to_vec();
            xp[i] += step;
            let fp = f(&xp);
            xp[i] = x[i] - step;
            let fm = f(&xp);
            (fp - fm) / (2.0 * step)
        })
        .collect()
}

/// Central second-difference Hessian with one Richardson extrapolation
/// step (`(4·H(s/2) − H(s)) / 3`), which removes the `O(s²)` term and is
/// exact for quartic polynomials up to rounding.
pub fn fd_hessian<F>(f: &F, x: &[f64], step: f64) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let coarse = fd_hessian_plain(f, x, step);
    let fine = fd_hessian_plain(f, x, 0.5 * step);
    (fine * 4.0 - coarse) / 3.0
}

fn fd_hessian_plain<F>(f: &F, x: &[f64], s: f64) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = x.len();
    let f0 = f(x);
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; n];
            let mut xp = x.to_vec();
            xp[i] = x[i] + s;
            let fp = f(&xp);
            xp[i] = x[i] - s;
            let fm = f(&xp);
            row[i] = (fp - 2.0 * f0 + fm) / (s * s);
            for j in (i + 1)..n {
                let mut y = x.to_vec();
                y[i] = x[i] + s;
                y[j] = x[j] + s;
                let fpp = f(&y);
                y[j] = x[j] - s;
                let fpm = f(&y);
                y[i] = x[i] - s;
                let fmm = f(&y);
                y[j] = x[j] + s;
                let fmp = f(&y);
                row[j] = (fpp - fpm - fmp + fmm) / (4.0 * s * s);
            }
            row
        })
        .collect();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            h[(i, j)] = rows[i][j];
            h[(j, i)] = rows[i][j];
        }
    }
    h
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Least-squares slope of `ln|y|` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}
