//! Quartic-augmented primal-dual functional with a penalized constraint
//! `v₀ = Ku²`:
//!
//! ```text
//! J*(u, v₀)    = J(u) + K/2 ∫u⁴ − 1/(2K) ∫v₀² + K₁/2 ∫(v₀ − Ku²)²
//! Ĵ*(u, v₀, λ) = J*(u, v₀) + ∫λ (Ku² − v₀)
//! ```
//!
//! On the constraint manifold `v₀ = Ku²` the augmentation cancels and
//! `J*(u, Ku²) = J(u)`. Eliminating the constraint in the stationarity
//! system of `Ĵ*` gives the multiplier `λ = −u²` and leaves `∇J(u) = 0`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::Result;
use crate::linalg::{fd_hessian, fd_step, loglog_slope, sym_eigenvalues};
use crate::mesh::Field;
use crate::operators::{inner, norm_inf, norm_l2};
use crate::primal::{
    desk_instance, eval_j, grad_j, in_b_plus, in_e_plus, min_hess_eigenvalue, newton_solve, GLParams,
    RegParams, SolveReport, DESK_N,
};
use crate::report::{doubling_radius, CheckReport};
use crate::sampling::{gaussian_field, stream};

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyState {
    pub u: Field,
    pub v0s: Field,
    pub lambda: Field,
}

impl PenaltyState {
    /// The state on the constraint manifold with the eliminated multiplier.
    pub fn on_manifold(r: &RegParams, u: Field) -> Self {
        let k = r.k_big;
        PenaltyState {
            v0s: u.map(|x| k * x * x),
            lambda: u.map(|x| -x * x),
            u,
        }
    }
}

pub fn eval_penalty_j(p: &GLParams, r: &RegParams, u: &Field, v0s: &Field) -> Result<f64> {
    p.f.check_same(u)?;
    p.f.check_same(v0s)?;
    let (k, k1) = (r.k_big, r.k1);
    let extra: f64 = u
        .values()
        .iter()
        .zip(v0s.values())
        .map(|(&x, &v)| {
            let c = v - k * x * x;
            0.5 * k * x.powi(4) - v * v / (2.0 * k) + 0.5 * k1 * c * c
        })
        .sum();
    Ok(eval_j(p, u)? + extra * p.mesh().weight())
}

pub fn eval_lagrangian(p: &GLParams, r: &RegParams, s: &PenaltyState) -> Result<f64> {
    let k = r.k_big;
    let constraint = s.u.zip_map(&s.v0s, |x, v| k * x * x - v)?;
    Ok(eval_penalty_j(p, r, &s.u, &s.v0s)? + inner(p.mesh(), &s.lambda, &constraint)?)
}

/// Function-form variations of `Ĵ*` in `u`, `v₀` and `λ`:
///
/// ```text
/// (i)   ∇J(u) + 2Ku³ − 2KK₁(v₀ − Ku²)u + 2Kλu
/// (ii)  −v₀/K + K₁(v₀ − Ku²) − λ
/// (iii) Ku² − v₀
/// ```
pub fn penalty_residuals(p: &GLParams, r: &RegParams, s: &PenaltyState) -> Result<[(&'static str, Field); 3]> {
    let (k, k1) = (r.k_big, r.k1);
    s.u.check_same(&s.lambda)?;
    let g = grad_j(p, &s.u)?;
    let mesh = *p.mesh();
    let n = mesh.dof();
    let (u, v, l) = (s.u.values(), s.v0s.values(), s.lambda.values());
    let mut ru = Vec::with_capacity(n);
    let mut rv = Vec::with_capacity(n);
    let mut rl = Vec::with_capacity(n);
    for i in 0..n {
        let c = v[i] - k * u[i] * u[i];
        ru.push(g.values()[i] + 2.0 * k * u[i].powi(3) - 2.0 * k * k1 * c * u[i] + 2.0 * k * l[i] * u[i]);
        rv.push(-v[i] / k + k1 * c - l[i]);
        rl.push(-c);
    }
    Ok([
        ("kkt_u", Field::new(mesh, ru)?),
        ("kkt_v0", Field::new(mesh, rv)?),
        ("kkt_lambda", Field::new(mesh, rl)?),
    ])
}

/// Solves `δĴ* = 0` by elimination: Newton on `∇J(u) = 0`, then
/// `v₀ = Ku²` and `λ = −u²` in closed form.
pub fn solve_kkt(
    p: &GLParams,
    r: &RegParams,
    u_init: &Field,
    tol: f64,
    max_iter: usize,
) -> Result<(PenaltyState, SolveReport)> {
    let (u, rep) = newton_solve(p, u_init, tol, max_iter)?;
    Ok((PenaltyState::on_manifold(r, u), rep))
}

/// Default sampling radius `0.1 (1 + ‖u₀‖∞)`.
pub fn default_radius(u0: &Field) -> f64 {
    0.1 * (1.0 + u0.max_abs())
}

/// K₁ values of the Hessian scaling sweep.
pub const K1_SWEEP: [f64; 3] = [1e3, 1e4, 1e5];

/// Finite-difference Hessian of `J*(u, v₀)` over the stacked `(u, v₀)`,
/// divided by the quadrature weight.
pub fn penalty_hessian(p: &GLParams, r: &RegParams, u: &Field, v0s: &Field) -> DMatrix<f64> {
    let mesh = *p.mesh();
    let n = mesh.dof();
    let mut x = u.values().to_vec();
    x.extend_from_slice(v0s.values());
    let f = |y: &[f64]| {
        let a = Field::from_raw(mesh, y[..n].to_vec());
        let b = Field::from_raw(mesh, y[n..].to_vec());
        eval_penalty_j(p, r, &a, &b).unwrap_or(f64::NAN)
    };
    fd_hessian(&f, &x, fd_step(&x)) / mesh.weight()
}

/// Spectral data of the penalty Hessian at one `K₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianScaling {
    pub k1: f64,
    pub min_eig: f64,
    /// `det(H)^(1/dof)`: the per-node determinant factor.
    pub det_root: f64,
    /// Curvature along the constraint normal `(0, 1)` in each node's
    /// `(u, v₀)` plane, minimised over nodes.
    pub normal_curvature: f64,
}

pub fn hessian_scaling(p: &GLParams, r: &RegParams, u: &Field, k1: f64) -> Result<HessianScaling> {
    let rk = RegParams { k1, ..*r };
    let s = PenaltyState::on_manifold(&rk, u.clone());
    let h = penalty_hessian(p, &rk, &s.u, &s.v0s);
    let eig = sym_eigenvalues(&h);
    let n = u.len();
    let log_det: f64 = eig.iter().map(|e| e.abs().ln()).sum();
    let normal = (n..2 * n).map(|i| h[(i, i)]).fold(f64::INFINITY, f64::min);
    Ok(HessianScaling {
        k1,
        min_eig: eig[0],
        det_root: (log_det / n as f64).exp(),
        normal_curvature: normal,
    })
}

/// Checks the penalized primal-dual statement at a KKT state.
///
/// Premises: the state comes from a converged solve (`‖∇J(u₀)‖ ≤ 1e-10`),
/// `u₀ ∈ B⁺` and `u₀ ∈ E⁺`. Conclusions: the three stationarity residuals and
/// `‖λ + u₀²‖∞` at most 1e-8; exact membership of the constraint manifold;
/// `Ĵ* = J* = J(u₀)` to 1e-10; `J* ≥ J*(u₀, v₀) − 1e-10` at `samples`
/// feasible points within `radius`; a positive definite Hessian at the
/// centre and at sampled feasible points; and growth of the Hessian with
/// `K₁` over [`K1_SWEEP`], measured three ways: the smallest eigenvalue,
/// the per-node determinant factor, and the curvature normal to the
/// constraint. Each must have log-log slope `1 ± 0.3`.
pub fn verify_penalty_kkt(
    p: &GLParams,
    r: &RegParams,
    s: &PenaltyState,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    p.f.check_same(&s.u)?;
    let mesh = *p.mesh();
    let mut rep = CheckReport::new("thm3-penalty");
    rep.value("K", r.k_big);
    rep.value("K1", r.k1);
    rep.value("radius", radius);
    let violated = r.hierarchy_violation().is_some();
    rep.premise("reg_hierarchy", if violated { 1.0 } else { 0.0 }, 0.0);

    let u0 = &s.u;
    rep.premise("primal_residual", norm_l2(&mesh, &grad_j(p, u0)?)?, 1e-10);
    rep.premise("b_plus", if in_b_plus(p, u0, 0.0) { 0.0 } else { 1.0 }, 0.0);
    let lmin = min_hess_eigenvalue(p, u0)?;
    rep.value("second_variation_min_eig", lmin);
    rep.premise("e_plus", -lmin, 0.0);

    for (name, f) in penalty_residuals(p, r, s)? {
        rep.conclusion(name, norm_inf(&f), 1e-8);
    }
    let mult = s.lambda.zip_map(u0, |l, x| l + x * x)?;
    rep.conclusion("multiplier_identity", norm_inf(&mult), 1e-8);
    let on = s.u.zip_map(&s.v0s, |x, v| v - r.k_big * x * x)?;
    rep.conclusion("a2_membership", norm_inf(&on), 0.0);

    let jhat = eval_lagrangian(p, r, s)?;
    let jstar = eval_penalty_j(p, r, u0, &s.v0s)?;
    let j = eval_j(p, u0)?;
    rep.value("Jhat", jhat);
    rep.value("Jstar", jstar);
    rep.value("J", j);
    rep.conclusion("value_chain_lagrangian", (jhat - jstar).abs(), 1e-10);
    rep.conclusion("value_chain_primal", (jstar - j).abs(), 1e-10);

    let points = feasible_samples(p, r, u0, radius, samples, seed)?;
    let mut worst = f64::INFINITY;
    for (_, val) in &points {
        worst = worst.min(val - jstar);
    }
    rep.value("feasible_samples", points.len() as f64);
    rep.value("local_min_slack", worst);
    rep.conclusion("local_minimality", (-worst).max(0.0), 1e-10);
    rep.value("segment_convexity_violations", segment_violations(p, u0, &points)? as f64);
    let r_est = doubling_radius(|rho| {
        let probe = feasible_samples(p, r, u0, rho, 16, seed ^ 0x0ADD)?;
        Ok(probe.iter().all(|(_, v)| *v - jstar >= -1e-10))
    })?;
    rep.value("r_estimate", r_est);

    let (dp, du) = desk_instance(p, u0, DESK_N)?;
    let mut hmin = f64::INFINITY;
    let centre = PenaltyState::on_manifold(r, du.clone());
    hmin = hmin.min(sym_eigenvalues(&penalty_hessian(&dp, r, &centre.u, &centre.v0s))[0]);
    let desk_radius = default_radius(&du).min(radius);
    for (u, _) in feasible_samples(&dp, r, &du, desk_radius, 3, seed ^ 0xDE5C)? {
        let st = PenaltyState::on_manifold(r, u);
        hmin = hmin.min(sym_eigenvalues(&penalty_hessian(&dp, r, &st.u, &st.v0s))[0]);
    }
    rep.value("hessian_min_eig", hmin);
    rep.conclusion("hessian_positive_definite", -hmin, 0.0);

    let sweep = K1_SWEEP
        .iter()
        .map(|&k1| hessian_scaling(&dp, r, &du, k1))
        .collect::<Result<Vec<_>>>()?;
    for h in &sweep {
        rep.value(format!("min_eig_K1{:e}", h.k1), h.min_eig);
        rep.value(format!("det_root_K1{:e}", h.k1), h.det_root);
    }
    let pick = |f: fn(&HessianScaling) -> f64| sweep.iter().map(f).collect::<Vec<f64>>();
    let min_slope = loglog_slope(&K1_SWEEP, &pick(|h| h.min_eig));
    let det_slope = loglog_slope(&K1_SWEEP, &pick(|h| h.det_root));
    let normal_slope = loglog_slope(&K1_SWEEP, &pick(|h| h.normal_curvature));
    rep.value("min_eig_slope", min_slope);
    rep.value("det_slope", det_slope);
    rep.value("normal_curvature_slope", normal_slope);
    rep.conclusion("min_eig_slope", (min_slope - 1.0).abs(), 0.3);
    rep.conclusion("det_slope", (det_slope - 1.0).abs(), 0.3);
    rep.conclusion("normal_curvature_slope", (normal_slope - 1.0).abs(), 0.3);
    Ok(rep)
}

/// Feasible points `(u, J*(u, Ku²))` with `u` in `B⁺ ∩ E⁺` and
/// `‖u − u₀‖ ≤ radius`. Each sample draws a Gaussian direction and a
/// uniform radius; the radius is halved until the point is feasible (at
/// most 30 times, after which the sample is dropped).
pub fn feasible_samples(
    p: &GLParams,
    r: &RegParams,
    u0: &Field,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<Vec<(Field, f64)>> {
    let mesh = *p.mesh();
    let found = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<Option<(Field, f64)>> {
            let mut rng = stream(seed, i as u64);
            let xi = gaussian_field(mesh, &mut rng);
            let nrm = norm_l2(&mesh, &xi)?;
            let mut rho = radius * rand::Rng::random::<f64>(&mut rng) / nrm;
            for _ in 0..30 {
                let u = u0.zip_map(&xi, |a, b| a + rho * b)?;
                if in_b_plus(p, &u, 0.0) && in_e_plus(p, &u, 0.0) {
                    let st = PenaltyState::on_manifold(r, u);
                    let val = eval_penalty_j(p, r, &st.u, &st.v0s)?;
                    return Ok(Some((st.u, val)));
                }
                rho *= 0.5;
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Midpoint convexity of `J` along segments between consecutive feasible
/// samples whose midpoints stay in `B⁺ ∩ E⁺`; returns the number of
/// violations beyond rounding.
fn segment_violations(p: &GLParams, u0: &Field, points: &[(Field, f64)]) -> Result<usize> {
    let mut count = 0;
    let mut prev = (u0.clone(), eval_j(p, u0)?);
    for (u, _) in points {
        let ju = eval_j(p, u)?;
        let mid = prev.0.zip_map(u, |a, b| 0.5 * (a + b))?;
        if in_b_plus(p, &mid, 0.0) && in_e_plus(p, &mid, 0.0) {
            let jm = eval_j(p, &mid)?;
            if jm > 0.5 * (prev.1 + ju) + 1e-12 * (1.0 + ju.abs()) {
                count += 1;
            }
        }
        prev = (u.clone(), ju);
    }
    Ok(count)
}

/// The pointwise 2×2 Hessian of `J*` at a node on the constraint manifold,
/// with `h` the nodal second variation of `J`:
/// `[[h + 6Ku² + 4K²K₁u², −2KK₁u], [−2KK₁u, K₁ − 1/K]]`.
pub fn nodal_hessian(h: f64, u: f64, k: f64, k1: f64) -> nalgebra::Matrix2<f64> {
    nalgebra::Matrix2::new(
        h + 6.0 * k * u * u + 4.0 * k * k * k1 * u * u,
        -2.0 * k * k1 * u,
        -2.0 * k * k1 * u,
        k1 - 1.0 / k,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_mesh;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn params(n: usize, amp: f64, beta: f64) -> GLParams {
        let m = build_mesh(1, n, 1.0).unwrap();
        GLParams::new(1.0, 1.0, beta, Field::from_fn(m, |x, _| amp * (PI * x).sin())).unwrap()
    }

    #[test]
    fn cancellation_on_manifold() {
        let p = params(16, 1.0, 1.0);
        let m = *p.mesh();
        let r = RegParams::with_k(100.0);
        for i in 0..50 {
            let mut rng = stream(11, i);
            let u = gaussian_field(m, &mut rng);
            let s = PenaltyState::on_manifold(&r, u.clone());
            let a = eval_penalty_j(&p, &r, &u, &s.v0s).unwrap();
            let b = eval_j(&p, &u).unwrap();
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()) * 100.0, "{a} {b}");
            assert!((eval_lagrangian(&p, &r, &s).unwrap() - a).abs() <= 1e-12 * (1.0 + a.abs()) * 100.0);
        }
        let z = Field::zeros(m);
        assert_eq!(eval_penalty_j(&p, &r, &z, &z).unwrap(), eval_j(&p, &z).unwrap());
    }

    #[test]
    fn independent_quadrature_oracle() {
        let p = params(9, 0.7, 0.5);
        let m = *p.mesh();
        let r = RegParams::with_k(20.0);
        let mut rng = stream(2, 0);
        let u = gaussian_field(m, &mut rng);
        let v = gaussian_field(m, &mut rng);
        let mut s = eval_j(&p, &u).unwrap();
        for i in 0..m.dof() {
            let (x, y) = (u.values()[i], v.values()[i]);
            s += m.weight() * (10.0 * x.powi(4) - y * y / 40.0 + 1000.0 * (y - 20.0 * x * x).powi(2));
        }
        let a = eval_penalty_j(&p, &r, &u, &v).unwrap();
        assert!((a - s).abs() <= 1e-12 * s.abs());
    }

    #[test]
    fn trivial_state() {
        let m = build_mesh(1, 10, 1.0).unwrap();
        let p = GLParams::new(1.0, 1.0, 1.0, Field::zeros(m)).unwrap();
        let r = RegParams::with_k(100.0);
        let (s, _) = solve_kkt(&p, &r, &Field::zeros(m), 1e-12, 20).unwrap();
        assert_eq!(s.u.max_abs(), 0.0);
        assert_eq!(s.v0s.max_abs(), 0.0);
        assert_eq!(s.lambda.max_abs(), 0.0);
        for (_, f) in penalty_residuals(&p, &r, &s).unwrap() {
            assert_eq!(f.max_abs(), 0.0);
        }
    }

    #[test]
    fn residuals_at_sine_solution_and_negative_control() {
        let p = params(64, 1.0, 1.0);
        let r = RegParams::with_k(100.0);
        let (s, rep) = solve_kkt(&p, &r, &Field::zeros(*p.mesh()), 1e-12, 50).unwrap();
        assert!(rep.converged);
        for (name, f) in penalty_residuals(&p, &r, &s).unwrap() {
            assert!(f.max_abs() <= 1e-8, "{name} {}", f.max_abs());
        }
        // λ = −u leaves 2Ku²(u − 1) in the u-variation
        let bad = PenaltyState {
            lambda: s.u.map(|x| -x),
            ..s.clone()
        };
        let [(_, ru), _, _] = penalty_residuals(&p, &r, &bad).unwrap();
        for (res, &x) in ru.values().iter().zip(s.u.values()) {
            let expect = 2.0 * r.k_big * x * x * (x - 1.0);
            assert!((res - expect).abs() <= 1e-8 * (1.0 + expect.abs()));
        }
        assert!(ru.max_abs() > 1.0);
    }

    #[test]
    fn fd_hessian_matches_nodal_form() {
        let p = params(1, 1.0, 1.0);
        let r = RegParams::with_k(100.0);
        let u = Field::constant(*p.mesh(), 0.3);
        let s = PenaltyState::on_manifold(&r, u.clone());
        let h = penalty_hessian(&p, &r, &s.u, &s.v0s);
        let hj = crate::primal::hess_j_matrix(&p, &u).unwrap()[(0, 0)];
        let exact = nodal_hessian(hj, 0.3, r.k_big, r.k1);
        for i in 0..2 {
            for j in 0..2 {
                let e = exact[(i, j)];
                assert!((h[(i, j)] - e).abs() <= 1e-7 * e.abs().max(1.0), "{i}{j} {} {e}", h[(i, j)]);
            }
        }
    }

    #[test]
    fn determinant_grows_linearly_but_min_eigenvalue_saturates() {
        // det ≈ K₁ (h + 2Ku²); the small eigenvalue tends to
        // (h + 2Ku²) / (1 + 4K²u²) regardless of K₁.
        let (h, u, k) = (9.0, 0.4, 100.0);
        let dets: Vec<f64> = K1_SWEEP.iter().map(|&k1| nodal_hessian(h, u, k, k1).determinant()).collect();
        assert!((loglog_slope(&K1_SWEEP, &dets) - 1.0).abs() < 0.01);
        let limit = (h + 2.0 * k * u * u) / (1.0 + 4.0 * k * k * u * u);
        for &k1 in &K1_SWEEP {
            let e = nodal_hessian(h, u, k, k1).symmetric_eigenvalues();
            let small = e[0].min(e[1]);
            assert!((small - limit).abs() < 0.05 * limit, "{small} {limit}");
        }
    }

    #[test]
    fn small_source_value_chain() {
        let m = build_mesh(1, 32, 1.0).unwrap();
        let p = GLParams::new(1.0, 1.0, 0.1, Field::from_fn(m, |x, _| 0.05 * (PI * x).sin())).unwrap();
        let r = RegParams::with_k(100.0);
        let (s, _) = solve_kkt(&p, &r, &Field::zeros(m), 1e-12, 50).unwrap();
        let rep = verify_penalty_kkt(&p, &r, &s, default_radius(&s.u), 40, 3).unwrap();
        assert!(rep.get("value_chain_primal").unwrap().pass);
        assert!(rep.get("value_chain_lagrangian").unwrap().pass);
        assert!(rep.premises_hold(), "{rep}");
        assert!(rep.get("local_minimality").unwrap().pass, "{rep}");
        assert!(rep.get("det_slope").unwrap().pass, "{rep}");
        assert!(rep.get("normal_curvature_slope").unwrap().pass, "{rep}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn lagrangian_is_linear_in_lambda(seed in 0u64..10_000) {
            let p = params(8, 1.0, 1.0);
            let m = *p.mesh();
            let r = RegParams::with_k(10.0);
            let mut rng = stream(seed, 0);
            let u = gaussian_field(m, &mut rng);
            let v0s = gaussian_field(m, &mut rng);
            let l1 = gaussian_field(m, &mut rng);
            let l2 = gaussian_field(m, &mut rng);
            let a = eval_lagrangian(&p, &r, &PenaltyState { u: u.clone(), v0s: v0s.clone(), lambda: &l1 + &l2 }).unwrap();
            let b = eval_lagrangian(&p, &r, &PenaltyState { u: u.clone(), v0s: v0s.clone(), lambda: l1 }).unwrap();
            let c = u.zip_map(&v0s, |x, v| 10.0 * x * x - v).unwrap();
            let expect = inner(&m, &l2, &c).unwrap();
            prop_assert!((a - b - expect).abs() <= 1e-12 * (1.0 + a.abs() + b.abs()));
            let zero = eval_lagrangian(&p, &r, &PenaltyState { u: u.clone(), v0s: v0s.clone(), lambda: Field::zeros(m) }).unwrap();
            prop_assert_eq!(zero, eval_penalty_j(&p, &r, &u, &v0s).unwrap());
        }
    }
}
