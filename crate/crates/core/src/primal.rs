//! The Ginzburg–Landau energy
//!
//! ```text
//! J(u) = γ/2 ∫|∇u|² + α/2 ∫(u² − β)² − ⟨u, f⟩
//! ```
//!
//! on a Dirichlet grid, its Euler–Lagrange residual, its Hessian and a damped
//! Newton solver for critical points.
//!
//! Gradients are returned in function form: the nodal field `g` with
//! `dJ(u)[d] = inner(g, d)`, i.e. `g = −γ∇²u + 2α(u² − β)u − f`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve_shifted, sym_eigenvalues};
use crate::mesh::{Field, Mesh};
use crate::operators::{apply_neg_laplacian, dirichlet_energy, inner, norm_l2};

/// Model constants γ, α, β and the source term f.
#[derive(Debug, Clone, PartialEq)]
pub struct GLParams {
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub f: Field,
}

impl GLParams {
    pub fn new(gamma: f64, alpha: f64, beta: f64, f: Field) -> Result<Self> {
        for (name, v) in [("gamma", gamma), ("alpha", alpha), ("beta", beta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if !f.is_finite() {
            return Err(Error::InvalidParameter("f must be finite".into()));
        }
        Ok(GLParams { gamma, alpha, beta, f })
    }

    pub fn mesh(&self) -> &Mesh {
        self.f.mesh()
    }

    /// Same constants with a different source term.
    pub fn with_f(&self, f: Field) -> GLParams {
        GLParams { f, ..self.clone() }
    }

    fn check(&self, u: &Field) -> Result<()> {
        self.f.check_same(u)
    }
}

/// Regularization constants shared by the dual formulations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegParams {
    /// Quadratic splitting / augmentation constant `K`.
    pub k_big: f64,
    /// Penalty constant `K₁`.
    pub k1: f64,
    /// Coupling width `ε` of the Toland primal-dual functional.
    pub eps: f64,
    /// Splitting fraction `ε₁` of the triple dual.
    pub eps1: f64,
    /// Sup-norm bound `K₃` on the primal minimizer.
    pub k3: f64,
}

impl RegParams {
    pub fn new(k_big: f64, k1: f64, eps: f64, eps1: f64, k3: f64) -> Result<Self> {
        let r = RegParams {
            k_big,
            k1,
            eps,
            eps1,
            k3,
        };
        r.validate()?;
        Ok(r)
    }

    /// `K = 100` with the documented companion defaults.
    pub fn with_k(k_big: f64) -> Self {
        RegParams {
            k_big,
            k1: 100.0 * k_big,
            eps: 1e-3,
            eps1: 1e-2,
            k3: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("K", self.k_big), ("K1", self.k1), ("eps", self.eps), ("K3", self.k3)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.eps1 > 0.0 && self.eps1 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eps1 must lie in (0, 1), got {}",
                self.eps1
            )));
        }
        Ok(())
    }

    /// `K₁ ≥ 10K` and `K ≥ 10`, the hierarchy the penalty formulations need.
    pub fn hierarchy_violation(&self) -> Option<String> {
        if self.k_big < 10.0 {
            Some(format!("K = {} < 10", self.k_big))
        } else if self.k1 < 10.0 * self.k_big {
            Some(format!("K1 = {} < 10 K = {}", self.k1, 10.0 * self.k_big))
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub final_residual: f64,
}

impl SolveReport {
    pub(crate) fn start(r0: f64) -> Self {
        SolveReport {
            iterations: 0,
            residual_history: vec![r0],
            converged: false,
            final_residual: r0,
        }
    }

    pub(crate) fn push(&mut self, r: f64) {
        self.iterations += 1;
        self.residual_history.push(r);
        self.final_residual = r;
    }
}

pub fn eval_j(p: &GLParams, u: &Field) -> Result<f64> {
    p.check(u)?;
    let mesh = p.mesh();
    let grad_term = 0.5 * p.gamma * dirichlet_energy(mesh, u)?;
    let well: f64 = u
        .values()
        .iter()
        .map(|&x| {
            let d = x * x - p.beta;
            d * d
        })
        .sum::<f64>()
        * mesh.weight()
        + p.beta * p.beta * mesh.boundary_measure();
    Ok(grad_term + 0.5 * p.alpha * well - inner(mesh, u, &p.f)?)
}

pub fn grad_j(p: &GLParams, u: &Field) -> Result<Field> {
    p.check(u)?;
    let lap = apply_neg_laplacian(p.mesh(), p.gamma, u)?;
    let vals = lap
        .values()
        .iter()
        .zip(u.values())
        .zip(p.f.values())
        .map(|((&l, &x), &f)| l + 2.0 * p.alpha * (x * x - p.beta) * x - f)
        .collect();
    Ok(Field::from_raw(*p.mesh(), vals))
}

/// Nodal potential curvature `2α(3u² − β)`.
pub fn hess_j_diag(p: &GLParams, u: &Field) -> Vec<f64> {
    u.values()
        .iter()
        .map(|&x| 2.0 * p.alpha * (3.0 * x * x - p.beta))
        .collect()
}

/// `δ²J(u)[d] = −γ∇²d + 2α(3u² − β) d`.
pub fn hess_j_apply(p: &GLParams, u: &Field, d: &Field) -> Result<Field> {
    p.check(u)?;
    p.check(d)?;
    let lap = apply_neg_laplacian(p.mesh(), p.gamma, d)?;
    let diag = hess_j_diag(p, u);
    let vals = lap
        .values()
        .iter()
        .zip(&diag)
        .zip(d.values())
        .map(|((&l, &q), &x)| l + q * x)
        .collect();
    Ok(Field::from_raw(*p.mesh(), vals))
}

/// Dense matrix of `δ²J(u)` in function form (symmetric).
pub fn hess_j_matrix(p: &GLParams, u: &Field) -> Result<DMatrix<f64>> {
    p.check(u)?;
    let mesh = *p.mesh();
    let n = mesh.dof();
    let mut m = DMatrix::zeros(n, n);
    let mut e = Field::zeros(mesh).into_values();
    for j in 0..n {
        e[j] = 1.0;
        let col = hess_j_apply(p, u, &Field::from_raw(mesh, e.clone()))?;
        e[j] = 0.0;
        for (i, v) in col.values().iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    Ok(m)
}

pub fn min_hess_eigenvalue(p: &GLParams, u: &Field) -> Result<f64> {
    Ok(sym_eigenvalues(&hess_j_matrix(p, u)?)[0])
}

/// `u f ≥ −tol` at every node.
pub fn in_b_plus(p: &GLParams, u: &Field, tol: f64) -> bool {
    p.check(u).is_ok()
        && u
            .values()
            .iter()
            .zip(p.f.values())
            .all(|(&a, &b)| a * b >= -tol)
}

/// Smallest eigenvalue of `δ²J(u)` at least `tol`.
pub fn in_e_plus(p: &GLParams, u: &Field, tol: f64) -> bool {
    match min_hess_eigenvalue(p, u) {
        Ok(l) => l >= tol,
        Err(_) => false,
    }
}

const MU_START: f64 = 1e-8;
const MU_MAX: f64 = 1e12;

/// Damped Newton iteration for `grad_j(u) = 0`.
///
/// Each step solves `(δ²J(u) + μI) d = −g`. `μ` starts at zero; whenever the
/// factorization (1D) or conjugate gradients (2D) meets a non-positive
/// pivot or curvature, `μ` restarts at `1e-8` and doubles until the shifted
/// operator is positive definite. Steps are accepted by Armijo backtracking on
/// `‖g‖²`, so the residual history never increases. If backtracking fails,
/// `μ` is raised tenfold and the step retried.
///
/// Returns the best iterate and `converged = false` when `max_iter` is
/// exhausted or no decreasing step exists.
pub fn newton_solve(
    p: &GLParams,
    u_init: &Field,
    tol: f64,
    max_iter: usize,
) -> Result<(Field, SolveReport)> {
    p.check(u_init)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let mesh = *p.mesh();
    let mut u = u_init.clone();
    let mut g = grad_j(p, &u)?;
    let mut r = norm_l2(&mesh, &g)?;
    let mut report = SolveReport::start(r);

    'outer: while report.iterations < max_iter {
        if r <= tol {
            break;
        }
        let diag = hess_j_diag(p, &u);
        let neg_g: Vec<f64> = g.values().iter().map(|v| -v).collect();
        let mut mu = 0.0;
        loop {
            let shifted: Vec<f64> = diag.iter().map(|q| q + mu).collect();
            let step = match solve_shifted(&mesh, p.gamma, &shifted, &neg_g, 1e-12) {
                Ok(d) => Field::from_raw(mesh, d),
                Err(Error::NotPositiveDefinite { .. }) | Err(Error::CgNoConvergence { .. }) => {
                    mu = if mu == 0.0 { MU_START } else { 2.0 * mu };
                    if mu > MU_MAX {
                        break 'outer;
                    }
                    continue;
                }
                Err(e) => return Err(e),
            };
            if let Some((u_new, g_new, r_new)) = backtrack(p, &u, &step, r)? {
                u = u_new;
                g = g_new;
                r = r_new;
                report.push(r);
                continue 'outer;
            }
            mu = if mu == 0.0 { MU_START } else { 10.0 * mu };
            if mu > MU_MAX {
                break 'outer;
            }
        }
    }
    report.converged = r <= tol;
    report.final_residual = r;
    Ok((u, report))
}

fn backtrack(p: &GLParams, u: &Field, step: &Field, r: f64) -> Result<Option<(Field, Field, f64)>> {
    let mesh = *p.mesh();
    let mut t = 1.0;
    while t > 1e-10 {
        let trial = u.zip_map(step, |a, b| a + t * b)?;
        if trial.is_finite() {
            let g = grad_j(p, &trial)?;
            let rn = norm_l2(&mesh, &g)?;
            if rn * rn <= (1.0 - 1e-4 * t) * r * r {
                return Ok(Some((trial, g, rn)));
            }
        }
        t *= 0.5;
    }
    Ok(None)
}

/// Largest per-axis resolution used for dense Hessian checks.
pub const DESK_N: usize = 8;

/// Coarse copy of the problem (at most `max_n` nodes per axis) and its own
/// critical point, found by Newton from the restricted `u0`. Used for dense
/// Hessian checks; returns the original data when the grid is already small.
pub fn desk_instance(p: &GLParams, u0: &Field, max_n: usize) -> Result<(GLParams, Field)> {
    let mesh = *p.mesh();
    if mesh.n() <= max_n {
        return Ok((p.clone(), u0.clone()));
    }
    let small = mesh.with_n(max_n)?;
    let f = Field::from_fn(small, |x, y| sample_nearest(&p.f, x, y));
    let start = Field::from_fn(small, |x, y| sample_nearest(u0, x, y));
    let pd = p.with_f(f);
    let (u, rep) = newton_solve(&pd, &start, 1e-12, 100)?;
    if !rep.converged {
        return Err(Error::NoConvergence {
            what: "coarse critical point",
            detail: format!("residual {:e}", rep.final_residual),
        });
    }
    Ok((pd, u))
}

fn sample_nearest(field: &Field, x: f64, y: f64) -> f64 {
    let m = field.mesh();
    let idx = |c: f64| ((c / m.h()).round() as isize - 1).clamp(0, m.n() as isize - 1) as usize;
    let i = idx(x);
    let j = if m.dim() == 2 { idx(y) } else { 0 };
    field.values()[j * m.n() + i]
}

/// Single-node instance with the same constants, whose source term makes
/// `u = ½√β` critical.
pub fn single_node_probe(p: &GLParams) -> Result<(GLParams, Field)> {
    let mesh = Mesh::new(p.mesh().dim(), 1, p.mesh().length())?;
    let zero = GLParams::new(p.gamma, p.alpha, p.beta, Field::zeros(mesh))?;
    let u = Field::constant(mesh, 0.5 * p.beta.sqrt());
    let f = grad_j(&zero, &u)?;
    Ok((zero.with_f(f), u))
}
