//! Convex dual of the Ginzburg–Landau energy through polar functionals.
//!
//! With `G₁(u) = γ/2 ∫|∇u|²`, `G₂(u, v) = α/2 ∫(u² − β + v)² + K/2 ∫u²` and
//! `F(u) = K/2 ∫u²` we have `J(u) = G₁(u) + G₂(u, 0) − F(u) − ⟨u, f⟩`. The
//! conjugates are
//!
//! ```text
//! G₁*(w)       = ½ ∫ [(−γ∇²)⁻¹ w] w
//! G₂*(v₂, v₀)  = ½ ∫ v₂² / (2v₀ + K) + 1/(2α) ∫ v₀² + β ∫ v₀     (2v₀ + K > K/2)
//! F*(z)        = 1/(2K) ∫ z²
//! ```
//!
//! and the dual functional is `J*(v, z) = −G₁*(v₁ + z) − G₂*(v₂, v₀) + F*(z)`.
//! From a critical point `u₀` the optimal dual variables are recovered in
//! closed form and `J*` attains `J(u₀)` there.
//!
//! Boundary nodes carry `u = 0`, so the only admissible boundary value of
//! `v₀*` is `−αβ`; [`eval_g2star`] adds that fixed boundary contribution
//! `−αβ²/2 · |∂-measure|`, matching the boundary part of `J`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{fd_hessian, fd_step, sym_eigenvalues, EVAL_SOLVE_TOL};
use crate::mesh::{Field, Mesh};
use crate::operators::{inner, norm_inf, norm_l2, solve_helmholtz};
use crate::primal::{eval_j, grad_j, min_hess_eigenvalue, GLParams, DESK_N};
use crate::report::CheckReport;
use crate::sampling::{gaussian_field, stream, uniform_field};

#[derive(Debug, Clone, PartialEq)]
pub struct DualVars {
    pub v1s: Field,
    pub v2s: Field,
    pub v0s: Field,
    pub zs: Field,
    pub k_big: f64,
}

/// `K = max(100γ, 10(2αβ + 6α‖u₀‖∞²))`.
pub fn default_k(p: &GLParams, u0: &Field) -> f64 {
    let s = u0.max_abs();
    (100.0 * p.gamma).max(10.0 * (2.0 * p.alpha * p.beta + 6.0 * p.alpha * s * s))
}

/// Errors with the first node where `2v₀* + K ≤ K/2`.
pub fn check_b_star(v0s: &Field, k: f64) -> Result<()> {
    for (node, &v) in v0s.values().iter().enumerate() {
        let value = 2.0 * v + k;
        if !(value > 0.5 * k) {
            return Err(Error::OutsideBStar {
                node,
                value,
                bound: 0.5 * k,
            });
        }
    }
    Ok(())
}

/// `v₀* = α(u₀² − β)`, `z* = K u₀`, `v₂* = (2v₀* + K) u₀`, `v₁* = f − v₂*`.
pub fn reconstruct_duals(p: &GLParams, k: f64, u0: &Field) -> Result<DualVars> {
    p.f.check_same(u0)?;
    let v0s = u0.map(|u| p.alpha * (u * u - p.beta));
    check_b_star(&v0s, k)?;
    let v2s = v0s.zip_map(u0, |v0, u| (2.0 * v0 + k) * u)?;
    let v1s = &p.f - &v2s;
    Ok(DualVars {
        v1s,
        v2s,
        v0s,
        zs: u0.scale(k),
        k_big: k,
    })
}

pub fn eval_g1star(mesh: &Mesh, gamma: f64, w: &Field) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma must be > 0, got {gamma}")));
    }
    let sol = solve_helmholtz(mesh, gamma, 0.0, w, EVAL_SOLVE_TOL)?;
    Ok(0.5 * inner(mesh, &sol, w)?)
}

pub fn eval_g2star(p: &GLParams, k: f64, v2s: &Field, v0s: &Field) -> Result<f64> {
    p.f.check_same(v2s)?;
    p.f.check_same(v0s)?;
    check_b_star(v0s, k)?;
    let mesh = p.mesh();
    let interior: f64 = v2s
        .values()
        .iter()
        .zip(v0s.values())
        .map(|(&v2, &v0)| 0.5 * v2 * v2 / (2.0 * v0 + k) + v0 * v0 / (2.0 * p.alpha) + p.beta * v0)
        .sum();
    let boundary = -0.5 * p.alpha * p.beta * p.beta * mesh.boundary_measure();
    Ok(interior * mesh.weight() + boundary)
}

pub fn eval_fstar(mesh: &Mesh, k: f64, zs: &Field) -> Result<f64> {
    Ok(inner(mesh, zs, zs)? / (2.0 * k))
}

pub fn eval_jstar(p: &GLParams, dv: &DualVars) -> Result<f64> {
    let mesh = p.mesh();
    let w = &dv.v1s + &dv.zs;
    Ok(-eval_g1star(mesh, p.gamma, &w)? - eval_g2star(p, dv.k_big, &dv.v2s, &dv.v0s)?
        + eval_fstar(mesh, dv.k_big, &dv.zs)?)
}

/// `J*(v, z) + ⟨u, v₁* + v₂* − f⟩`.
pub fn eval_j1star(p: &GLParams, dv: &DualVars, u: &Field) -> Result<f64> {
    let constraint = &(&dv.v1s + &dv.v2s) - &p.f;
    Ok(eval_jstar(p, dv)? + inner(p.mesh(), u, &constraint)?)
}

/// Function-form variations of `J₁*` at `(dv, u)`, in the order
/// `v₁*, v₂*, v₀*, u, z*`.
pub fn stationarity_residuals(p: &GLParams, dv: &DualVars, u: &Field) -> Result<[(&'static str, Field); 5]> {
    let mesh = p.mesh();
    let k = dv.k_big;
    let w = &dv.v1s + &dv.zs;
    let inv = solve_helmholtz(mesh, p.gamma, 0.0, &w, EVAL_SOLVE_TOL)?;
    let r_v1 = u - &inv;
    let ratio = dv.v2s.zip_map(&dv.v0s, |v2, v0| v2 / (2.0 * v0 + k))?;
    let r_v2 = u - &ratio;
    let r_v0 = ratio.zip_map(&dv.v0s, |q, v0| q * q - v0 / p.alpha - p.beta)?;
    let r_u = &(&dv.v1s + &dv.v2s) - &p.f;
    let r_z = &dv.zs.scale(1.0 / k) - &inv;
    Ok([
        ("stationarity_v1", r_v1),
        ("stationarity_v2", r_v2),
        ("stationarity_v0", r_v0),
        ("stationarity_u", r_u),
        ("stationarity_z", r_z),
    ])
}

/// Perturbation scales for the proximal inequality.
pub const PROXIMAL_SCALES: [f64; 3] = [0.01, 0.1, 1.0];
/// Number of random B*-interior points for the concavity check.
pub const CONCAVITY_POINTS: usize = 10;

/// Largest eigenvalue of the finite-difference Hessian of `J*` in the
/// `(v₁*, v₂*, v₀*)` block, `z*` held fixed.
pub fn dual_block_max_eigenvalue(p: &GLParams, dv: &DualVars) -> Result<f64> {
    let mesh = *p.mesh();
    let n = mesh.dof();
    let mut x = Vec::with_capacity(3 * n);
    x.extend_from_slice(dv.v1s.values());
    x.extend_from_slice(dv.v2s.values());
    x.extend_from_slice(dv.v0s.values());
    let zs = dv.zs.clone();
    let k = dv.k_big;
    let f = |y: &[f64]| {
        let d = DualVars {
            v1s: Field::from_raw(mesh, y[..n].to_vec()),
            v2s: Field::from_raw(mesh, y[n..2 * n].to_vec()),
            v0s: Field::from_raw(mesh, y[2 * n..].to_vec()),
            zs: zs.clone(),
            k_big: k,
        };
        eval_jstar(p, &d).unwrap_or(f64::NAN)
    };
    let h = fd_hessian(&f, &x, fd_step(&x));
    Ok(*sym_eigenvalues(&h).last().expect("non-empty"))
}

/// Checks the convex duality statement at a primal critical point `u₀`.
///
/// Reported checks: the premise `‖∇J(u₀)‖ ≤ 1e-10`; the five stationarity
/// relations of `J₁*`; B* and A* membership; the duality gap
/// `|J(u₀) − J*(v̂, ẑ)|`; the proximal inequality
/// `J*(v̂, ẑ) ≤ J(u) + K/2‖u − u₀‖²` over `samples` Gaussian perturbations at
/// each of [`PROXIMAL_SCALES`]; positive semidefiniteness of
/// `δ²J(u₀) + K`; and concavity of the `(v₁*, v₂*, v₀*)` block of `J*` at
/// [`CONCAVITY_POINTS`] random B*-interior points on a grid with at most
/// [`DESK_N`] nodes per axis.
pub fn verify_polar_duality(
    p: &GLParams,
    k: f64,
    u0: &Field,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    p.f.check_same(u0)?;
    let mesh = *p.mesh();
    let mut rep = CheckReport::new("thm1");
    rep.value("K", k);

    let g = grad_j(p, u0)?;
    rep.premise("primal_residual", norm_l2(&mesh, &g)?, 1e-10);

    let dv = match reconstruct_duals(p, k, u0) {
        Ok(dv) => dv,
        Err(Error::OutsideBStar { value, bound, .. }) => {
            rep.premise("bstar_membership", bound - value, 0.0);
            return Ok(rep);
        }
        Err(e) => return Err(e),
    };
    let min_margin = dv
        .v0s
        .values()
        .iter()
        .map(|v| 2.0 * v + k - 0.5 * k)
        .fold(f64::INFINITY, f64::min);
    rep.conclusion("bstar_membership", -min_margin, 0.0);

    for (name, r) in stationarity_residuals(p, &dv, u0)? {
        rep.conclusion(name, norm_inf(&r), 1e-8);
    }
    let a_star = &(&dv.v1s + &dv.v2s) - &p.f;
    let rounding = 4.0 * f64::EPSILON * (p.f.max_abs() + dv.v2s.max_abs());
    rep.conclusion("astar_feasibility", norm_inf(&a_star), rounding);

    let j = eval_j(p, u0)?;
    let jstar = eval_jstar(p, &dv)?;
    let j1star = eval_j1star(p, &dv, u0)?;
    rep.value("J", j);
    rep.value("Jstar", jstar);
    rep.value("J1star", j1star);
    rep.conclusion("duality_gap", (j - jstar).abs(), 1e-8 * (1.0 + j.abs()));

    let slacks: Vec<f64> = (0..PROXIMAL_SCALES.len() * samples)
        .into_par_iter()
        .map(|idx| {
            let sigma = PROXIMAL_SCALES[idx / samples];
            let mut rng = stream(seed, idx as u64);
            let xi = gaussian_field(mesh, &mut rng);
            let u = u0.zip_map(&xi, |a, b| a + sigma * b)?;
            let d = &u - u0;
            Ok(eval_j(p, &u)? + 0.5 * k * inner(&mesh, &d, &d)? - jstar)
        })
        .collect::<Result<Vec<f64>>>()?;
    let min_slack = slacks.iter().copied().fold(f64::INFINITY, f64::min);
    rep.value("proximal_min_slack", min_slack);
    rep.conclusion("proximal_inequality", (-min_slack).max(0.0), 1e-10);

    let curv = min_hess_eigenvalue(p, u0)? + k;
    rep.value("proximal_min_curvature", curv);
    rep.conclusion("proximal_curvature", (-curv).max(0.0), 0.0);

    let max_eig = concavity_probe(p, k, seed)?;
    rep.value("dual_block_max_eig", max_eig);
    rep.conclusion("concavity_dual_block", max_eig, 1e-8);
    Ok(rep)
}

/// Largest block eigenvalue over [`CONCAVITY_POINTS`] random B*-interior
/// points on a coarse copy of the grid.
pub fn concavity_probe(p: &GLParams, k: f64, seed: u64) -> Result<f64> {
    let desk = p.mesh().with_n(p.mesh().n().min(DESK_N))?;
    let pd = GLParams::new(p.gamma, p.alpha, p.beta, Field::zeros(desk))?;
    let eigs = (0..CONCAVITY_POINTS)
        .map(|i| {
            let mut rng = stream(seed ^ 0xC0C0_A5A5, i as u64);
            let dv = DualVars {
                v1s: gaussian_field(desk, &mut rng),
                v2s: gaussian_field(desk, &mut rng),
                v0s: uniform_field(desk, -0.2 * k, 0.2 * k, &mut rng),
                zs: gaussian_field(desk, &mut rng),
                k_big: k,
            };
            dual_block_max_eigenvalue(&pd, &dv)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(eigs.into_iter().fold(f64::NEG_INFINITY, f64::max))
}
