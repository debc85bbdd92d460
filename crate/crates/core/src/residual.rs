//! Residual primal-dual functional for a difference-of-convex splitting
//! `J = G − F`:
//!
//! ```text
//! J*(u, v₁, v₂) = ½‖v₁ − G′(u)‖² + ½‖v₂ − F′(u)‖² + ½‖v₁ − v₂‖²
//! ```
//!
//! It vanishes exactly on `{v₁ = G′(u) = F′(u) = v₂}`, i.e. at critical
//! points of `J` paired with their gradients, and is locally convex there
//! when `δ²J(u₀)` is positive definite.

use rayon::prelude::*;

use crate::error::Result;
use crate::functional::{gl_dc_split, DcSplit};
use crate::linalg::{fd_hessian, fd_step, loglog_slope, sym_eigenvalues};
use crate::mesh::{Field, Mesh};
use crate::operators::{inner, norm_inf};
use crate::primal::{
    desk_instance, eval_j, grad_j, min_hess_eigenvalue, single_node_probe, GLParams, RegParams, DESK_N,
};
use crate::report::{doubling_radius, CheckReport};
use crate::sampling::{gaussian_field, stream};

pub fn eval_residual_pd(dc: &DcSplit, u: &Field, v1s: &Field, v2s: &Field) -> Result<f64> {
    let mesh = dc.mesh();
    let l1 = v1s - &dc.g.grad(u)?;
    let l2 = v2s - &dc.f.grad(u)?;
    let l3 = v1s - v2s;
    Ok(0.5 * (inner(&mesh, &l1, &l1)? + inner(&mesh, &l2, &l2)? + inner(&mesh, &l3, &l3)?))
}

/// `‖v₁ − G′(u)‖∞ ≤ 1/K` and `‖v₂ − F′(u)‖∞ ≤ 1/K`.
pub fn in_c_star(dc: &DcSplit, r: &RegParams, u: &Field, v1s: &Field, v2s: &Field) -> Result<bool> {
    let bound = 1.0 / r.k_big;
    let l1 = v1s - &dc.g.grad(u)?;
    let l2 = v2s - &dc.f.grad(u)?;
    Ok(norm_inf(&l1) <= bound && norm_inf(&l2) <= bound)
}

/// Finite-difference Hessian of `J*` over the stacked vector
/// `(u, v₁, v₂)`, divided by the quadrature weight so that single-node
/// entries read as pointwise second derivatives.
pub fn residual_pd_hessian(dc: &DcSplit, u: &Field, v1s: &Field, v2s: &Field) -> nalgebra::DMatrix<f64> {
    let mesh = dc.mesh();
    let n = mesh.dof();
    let mut x = Vec::with_capacity(3 * n);
    x.extend_from_slice(u.values());
    x.extend_from_slice(v1s.values());
    x.extend_from_slice(v2s.values());
    let f = |y: &[f64]| {
        let split = |a: usize| Field::from_raw(mesh, y[a * n..(a + 1) * n].to_vec());
        eval_residual_pd(dc, &split(0), &split(1), &split(2)).unwrap_or(f64::NAN)
    };
    fd_hessian(&f, &x, fd_step(&x)) / mesh.weight()
}

/// Cost constants for the K sweep of the determinant remainder.
pub const REMAINDER_KS: [f64; 3] = [1e2, 1e3, 1e4];

/// Determinant data at a single node where both residuals equal `1/K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetProbe {
    pub k_big: f64,
    /// `det δ²J*` from the finite-difference 3×3 Hessian.
    pub det: f64,
    /// `(δ²J)²` at the node.
    pub second_variation_sq: f64,
    /// Determinant of the `(v₁, v₂)` block of the finite-difference Hessian.
    pub block_det_fd: f64,
}

impl DetProbe {
    pub fn remainder(&self) -> f64 {
        self.det - self.second_variation_sq
    }
}

pub fn det_probe(p: &GLParams, k: f64) -> Result<DetProbe> {
    let (pn, u) = single_node_probe(p)?;
    let dc = gl_dc_split(&pn);
    let off = 1.0 / k;
    let v1 = dc.g.grad(&u)?.map(|x| x + off);
    let v2 = dc.f.grad(&u)?.map(|x| x + off);
    let h = residual_pd_hessian(&dc, &u, &v1, &v2);
    let block = h.view((1, 1), (2, 2)).into_owned();
    let d2j = min_hess_eigenvalue(&pn, &u)?;
    Ok(DetProbe {
        k_big: k,
        det: h.determinant(),
        second_variation_sq: d2j * d2j,
        block_det_fd: block.determinant(),
    })
}

/// Determinant of the `(v₁, v₂)` block. The block does not depend on the
/// splitting: `J*` is quadratic in `(v₁, v₂)` with pointwise coefficients
/// `[[2, −1], [−1, 2]]`.
pub fn dual_block_det() -> f64 {
    let b = nalgebra::Matrix2::new(2.0, -1.0, -1.0, 2.0);
    b.determinant()
}

/// Checks the residual primal-dual statement at a critical point `u₀`.
///
/// Premises: `‖∇J(u₀)‖ ≤ 1e-10` and `δ²J(u₀) ≻ 0`. Conclusions: `J*` vanishes
/// at `(u₀, G′(u₀), F′(u₀))` to 1e-20, the point lies in `C*`, `J* ≥ 0` on
/// `samples` random points, the full finite-difference Hessian of `J*` at
/// the optimum is positive semidefinite (min eigenvalue ≥ −1e-8) on a grid
/// with at most 8 nodes per axis, the `(v₁, v₂)` block determinant is 3,
/// and the single-node determinant remainder `det δ²J* − (δ²J)²` decays
/// like `1/K` over [`REMAINDER_KS`] (slope −1 ± 0.2).
pub fn verify_residual_minimum(
    p: &GLParams,
    r: &RegParams,
    u0: &Field,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    p.f.check_same(u0)?;
    let mesh = *p.mesh();
    let dc = gl_dc_split(p);
    let mut rep = CheckReport::new("thm2");
    rep.value("K", r.k_big);

    let g = grad_j(p, u0)?;
    rep.premise("primal_residual", crate::operators::norm_l2(&mesh, &g)?, 1e-10);
    let lmin = min_hess_eigenvalue(p, u0)?;
    rep.value("second_variation_min_eig", lmin);
    rep.premise("second_variation_positive", -lmin, 0.0);

    let v1 = dc.g.grad(u0)?;
    let v2 = dc.f.grad(u0)?;
    let at_opt = eval_residual_pd(&dc, u0, &v1, &v2)?;
    rep.value("Jstar_at_optimum", at_opt);
    rep.conclusion("zero_minimum", at_opt, 1e-20);
    let inside = in_c_star(&dc, r, u0, &v1, &v2)?;
    rep.conclusion("c_star_membership", if inside { 0.0 } else { 1.0 }, 0.0);

    let lows = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            let u = gaussian_field(mesh, &mut rng);
            let a = gaussian_field(mesh, &mut rng);
            let b = gaussian_field(mesh, &mut rng);
            eval_residual_pd(&dc, &u, &a, &b)
        })
        .collect::<Result<Vec<f64>>>()?;
    let low = lows.iter().copied().fold(f64::INFINITY, f64::min);
    rep.value("sampled_min_Jstar", low);
    rep.conclusion("nonnegativity", (-low).max(0.0), 0.0);

    let (desk_p, desk_u) = desk_instance(p, u0, DESK_N)?;
    let desk_dc = gl_dc_split(&desk_p);
    let dv1 = desk_dc.g.grad(&desk_u)?;
    let dv2 = desk_dc.f.grad(&desk_u)?;
    let h = residual_pd_hessian(&desk_dc, &desk_u, &dv1, &dv2);
    let asym = (&h - h.transpose()).abs().max();
    rep.conclusion("hessian_symmetry", asym, 1e-6);
    let hmin = sym_eigenvalues(&h)[0];
    rep.value("hessian_min_eig", hmin);
    rep.conclusion("local_convexity", -hmin, 1e-8);

    let block = dual_block_det();
    rep.value("block_det", block);
    rep.conclusion("block_det_equals_3", (block - 3.0).abs(), 0.0);

    let probes = REMAINDER_KS
        .iter()
        .map(|&k| det_probe(p, k))
        .collect::<Result<Vec<_>>>()?;
    let fd_block = probes[0].block_det_fd;
    rep.value("block_det_fd", fd_block);
    rep.conclusion("block_det_fd_consistency", (fd_block - 3.0).abs(), 1e-6);
    for pr in &probes {
        rep.value(format!("det_remainder_K{:e}", pr.k_big), pr.remainder());
    }
    let rems: Vec<f64> = probes.iter().map(DetProbe::remainder).collect();
    let slope = loglog_slope(&REMAINDER_KS, &rems);
    rep.value("det_remainder_slope", slope);
    rep.conclusion("det_remainder_slope", (slope + 1.0).abs(), 0.2);

    let (r0, r1) = neighbourhood_radii(p, &desk_p, u0, &desk_u, seed)?;
    rep.value("r0_estimate", r0);
    rep.value("r1_estimate", r1);
    Ok(rep)
}

/// Largest scanned radius for which `J(u₀ + ρξ) ≥ J(u₀)` on unit-direction
/// samples (`r₀`), and for which the desk-scale Hessian of `J*` stays
/// positive semidefinite at perturbed points (`r₁`).
fn neighbourhood_radii(
    p: &GLParams,
    desk: &GLParams,
    u0: &Field,
    desk_u: &Field,
    seed: u64,
) -> Result<(f64, f64)> {
    let mesh = *p.mesh();
    let j0 = eval_j(p, u0)?;
    let dir = |m: Mesh, i: u64| -> Result<Field> {
        let mut rng = stream(seed ^ 0x5151, i);
        let xi = gaussian_field(m, &mut rng);
        let nrm = crate::operators::norm_l2(&m, &xi)?;
        Ok(xi.scale(1.0 / nrm))
    };
    let r0 = doubling_radius(|rho| {
        for i in 0..8 {
            let u = u0.zip_map(&dir(mesh, i)?, |a, b| a + rho * b)?;
            if eval_j(p, &u)? < j0 {
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    let dc = gl_dc_split(desk);
    let dm = *desk.mesh();
    let v1 = dc.g.grad(desk_u)?;
    let v2 = dc.f.grad(desk_u)?;
    let r1 = doubling_radius(|rho| {
        for i in 0..3 {
            let d = dir(dm, 100 + i)?;
            let u = desk_u.zip_map(&d, |a, b| a + rho * b)?;
            let a = v1.zip_map(&d, |a, b| a + rho * b)?;
            let b = v2.zip_map(&d, |a, b| a - rho * b)?;
            let h = residual_pd_hessian(&dc, &u, &a, &b);
            if sym_eigenvalues(&h)[0] < -1e-8 {
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    Ok((r0, r1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_mesh;
    use crate::primal::newton_solve;
    use std::f64::consts::PI;

    fn sine(n: usize) -> GLParams {
        let m = build_mesh(1, n, 1.0).unwrap();
        GLParams::new(1.0, 1.0, 1.0, Field::from_fn(m, |x, _| (PI * x).sin())).unwrap()
    }

    #[test]
    fn value_examples() {
        let p = sine(12);
        let m = *p.mesh();
        let dc = gl_dc_split(&p);
        let mut rng = stream(3, 0);
        let u = gaussian_field(m, &mut rng);
        let zero = Field::zeros(m);
        let g = dc.g.grad(&u).unwrap();
        let f = dc.f.grad(&u).unwrap();
        let expect = 0.5 * (inner(&m, &g, &g).unwrap() + inner(&m, &f, &f).unwrap());
        assert!((eval_residual_pd(&dc, &u, &zero, &zero).unwrap() - expect).abs() < 1e-12 * expect);

        // independent summation over nodes
        let a = gaussian_field(m, &mut rng);
        let b = gaussian_field(m, &mut rng);
        let mut s = 0.0;
        for i in 0..m.dof() {
            let l1 = a.values()[i] - g.values()[i];
            let l2 = b.values()[i] - f.values()[i];
            let l3 = a.values()[i] - b.values()[i];
            s += 0.5 * m.weight() * (l1 * l1 + l2 * l2 + l3 * l3);
        }
        assert!((eval_residual_pd(&dc, &u, &a, &b).unwrap() - s).abs() <= 1e-12 * s);
    }

    #[test]
    fn c_star_boundary() {
        let p = sine(6);
        let m = *p.mesh();
        let dc = gl_dc_split(&p);
        let r = RegParams::with_k(100.0);
        let u = Field::from_fn(m, |x, _| x);
        let g = dc.g.grad(&u).unwrap();
        let f = dc.f.grad(&u).unwrap();
        assert!(in_c_star(&dc, &r, &u, &g, &f).unwrap());
        assert!(!in_c_star(&dc, &r, &u, &g.map(|x| x + 0.02), &f).unwrap());
        let mut rng = stream(5, 1);
        let e = crate::sampling::uniform_field(m, -0.005, 0.005, &mut rng);
        assert!(in_c_star(&dc, &r, &u, &(&g + &e), &(&f - &e)).unwrap());
    }

    #[test]
    fn block_det_is_three() {
        assert_eq!(dual_block_det(), 3.0);
        let p = sine(4);
        let pr = det_probe(&p, 1e3).unwrap();
        assert!((pr.block_det_fd - 3.0).abs() < 1e-7);
    }

    #[test]
    fn remainder_matches_closed_form() {
        // With both residuals at 1/K the uu entry loses G‴/K = 12αu/K, and
        // the determinant loses three times that.
        let p = sine(4);
        let (pn, u) = single_node_probe(&p).unwrap();
        for k in REMAINDER_KS {
            let pr = det_probe(&p, k).unwrap();
            let expect = -36.0 * pn.alpha * u.values()[0] / k;
            assert!((pr.remainder() - expect).abs() < 1e-4 * expect.abs(), "{} vs {expect}", pr.remainder());
        }
    }

    #[test]
    fn hessian_at_optimum_matches_gauss_newton() {
        // At the optimum all residuals vanish, so δ²J* = Mᵀ M with
        // M = [[−A, I, 0], [−B, 0, I], [0, I, −I]] in function form.
        let p = sine(5);
        let m = *p.mesh();
        let (u0, _) = newton_solve(&p, &Field::zeros(m), 1e-12, 50).unwrap();
        let dc = gl_dc_split(&p);
        let v1 = dc.g.grad(&u0).unwrap();
        let v2 = dc.f.grad(&u0).unwrap();
        let h = residual_pd_hessian(&dc, &u0, &v1, &v2);
        let n = m.dof();
        let a = crate::primal::hess_j_matrix(&p, &u0).unwrap()
            + nalgebra::DMatrix::<f64>::identity(n, n) * (2.0 * p.alpha * p.beta);
        let b = nalgebra::DMatrix::<f64>::identity(n, n) * (2.0 * p.alpha * p.beta);
        let id = nalgebra::DMatrix::<f64>::identity(n, n);
        let mut mm = nalgebra::DMatrix::zeros(3 * n, 3 * n);
        mm.view_mut((0, 0), (n, n)).copy_from(&(-&a));
        mm.view_mut((0, n), (n, n)).copy_from(&id);
        mm.view_mut((n, 0), (n, n)).copy_from(&(-&b));
        mm.view_mut((n, 2 * n), (n, n)).copy_from(&id);
        mm.view_mut((2 * n, n), (n, n)).copy_from(&id);
        mm.view_mut((2 * n, 2 * n), (n, n)).copy_from(&(-&id));
        let gn = mm.transpose() * mm;
        let err = (&h - &gn).abs().max();
        assert!(err < 1e-6 * gn.abs().max(), "{err}");
    }

    #[test]
    fn sine_case_passes() {
        let p = sine(64);
        let (u0, _) = newton_solve(&p, &Field::zeros(*p.mesh()), 1e-12, 50).unwrap();
        let rep = verify_residual_minimum(&p, &RegParams::with_k(1e3), &u0, 50, 1).unwrap();
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn indefinite_point_is_a_premise_failure() {
        // u = 0 with 2αβ above the smallest Laplacian eigenvalue is a saddle.
        let m = build_mesh(1, 8, 1.0).unwrap();
        let p = GLParams::new(0.01, 1.0, 1.0, Field::zeros(m)).unwrap();
        let rep = verify_residual_minimum(&p, &RegParams::with_k(1e3), &Field::zeros(m), 10, 1).unwrap();
        assert!(!rep.premises_hold());
        assert!(rep.get("primal_residual").unwrap().pass);
        assert!(rep.get("zero_minimum").unwrap().pass);
    }
}
