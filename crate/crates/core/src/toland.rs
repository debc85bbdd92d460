//! Toland duality for the K-augmented splitting `J = G_K − F_K`.
//!
//! Conjugates `Φ*(v) = sup_u ⟨u, v⟩ − Φ(u)` are evaluated by Newton on
//! `∇Φ(u) = v`; the maximizer `û` doubles as the gradient `∂Φ*/∂v`. With
//! these,
//!
//! ```text
//! J_K*(v)    = F_K*(v) − G_K*(v)
//! J₁*(u, v)  = J_K*(v) + 1/(2ε) (‖û_G − u‖² + ‖û_F − u‖² + ‖û_G − û_F‖²)
//! ```
//!
//! and at a critical point `u₀` with `v₀ = ∇F_K(u₀)` both maximizers equal
//! `u₀`, so `J(u₀) = J_K*(v₀) = J₁*(u₀, v₀)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functional::{augment, gl_dc_split, DcSplit, Functional};
use crate::linalg::{conjugate_gradients, fd_gradient, fd_hessian, fd_step, loglog_slope, sym_eigenvalues};
use crate::mesh::{Field, Mesh};
use crate::operators::{inner, norm_inf, norm_l2};
use crate::primal::{desk_instance, eval_j, grad_j, single_node_probe, GLParams, RegParams, SolveReport, DESK_N};
use crate::report::CheckReport;
use crate::sampling::{gaussian_field, stream};

/// Default tolerance of the inner conjugate solves, relative to
/// `1 + ‖v‖`.
pub const CONJUGATE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateEval {
    pub value: f64,
    pub argmax: Field,
    pub inner_report: SolveReport,
}

/// `Φ*(v)` and its maximizer for a strongly convex `Φ`.
///
/// Newton steps solve `δ²Φ(u) d = v − ∇Φ(u)` by conjugate gradients and are
/// damped by backtracking on `‖∇Φ(u) − v‖`. The iteration stops once that
/// residual is below `tol · (1 + ‖v‖)`, or when it stalls within a factor
/// 1000 of that level (rounding floor).
pub fn conjugate_eval(phi: &dyn Functional, vs: &Field, u_init: &Field, tol: f64) -> Result<ConjugateEval> {
    let mesh = phi.mesh();
    vs.check_same(u_init)?;
    let target = tol * (1.0 + norm_l2(&mesh, vs)?);
    let residual = |u: &Field| -> Result<(Field, f64)> {
        let g = &phi.grad(u)? - vs;
        let r = norm_l2(&mesh, &g)?;
        Ok((g, r))
    };
    let mut u = u_init.clone();
    let (mut g, mut r) = residual(&u)?;
    let mut rep = SolveReport::start(r);
    let n = mesh.dof();
    while r > target && rep.iterations < 100 {
        let rhs: Vec<f64> = g.values().iter().map(|x| -x).collect();
        let apply = |x: &[f64], out: &mut [f64]| {
            let hx = phi
                .hess_apply(&u, &Field::from_raw(mesh, x.to_vec()))
                .map(Field::into_values)
                .unwrap_or_else(|_| vec![f64::NAN; x.len()]);
            out.copy_from_slice(&hx);
        };
        let d = conjugate_gradients(apply, &rhs, 1e-12, 10 * n + 50)?;
        let step = Field::from_raw(mesh, d);
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-8 {
            let trial = u.zip_map(&step, |a, b| a + t * b)?;
            if trial.is_finite() {
                let (gt, rt) = residual(&trial)?;
                if rt < (1.0 - 1e-4 * t) * r {
                    u = trial;
                    g = gt;
                    r = rt;
                    rep.push(r);
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    rep.converged = r <= 1e3 * target;
    rep.final_residual = r;
    if !rep.converged {
        return Err(Error::NoConvergence {
            what: "conjugate maximizer",
            detail: format!("residual {r:e} after {} Newton steps", rep.iterations),
        });
    }
    let value = inner(&mesh, &u, vs)? - phi.value(&u)?;
    Ok(ConjugateEval {
        value,
        argmax: u,
        inner_report: rep,
    })
}

/// `J_K*(v)` with both conjugate evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct TolandEval {
    pub value: f64,
    pub f_conj: ConjugateEval,
    pub g_conj: ConjugateEval,
}

/// `F_K*(v) − G_K*(v)`, warm-started at `u_init` for both maximizers.
pub fn eval_jk_star(dck: &DcSplit, vs: &Field, u_init: &Field) -> Result<TolandEval> {
    let f_conj = conjugate_eval(dck.f.as_ref(), vs, u_init, CONJUGATE_TOL)?;
    let g_conj = conjugate_eval(dck.g.as_ref(), vs, u_init, CONJUGATE_TOL)?;
    Ok(TolandEval {
        value: f_conj.value - g_conj.value,
        f_conj,
        g_conj,
    })
}

/// The three coupling norms of `J₁*` given the maximizers.
fn coupling(mesh: &Mesh, u: &Field, ug: &Field, uf: &Field, eps: f64) -> Result<f64> {
    let a = ug - u;
    let b = uf - u;
    let c = ug - uf;
    Ok((inner(mesh, &a, &a)? + inner(mesh, &b, &b)? + inner(mesh, &c, &c)?) / (2.0 * eps))
}

pub fn eval_j1star_toland(dck: &DcSplit, u: &Field, vs: &Field, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be > 0, got {eps}")));
    }
    let t = eval_jk_star(dck, vs, u)?;
    Ok(t.value + coupling(&dck.mesh(), u, &t.g_conj.argmax, &t.f_conj.argmax, eps)?)
}

/// The augmented Ginzburg–Landau splitting `G_K − F_K`.
pub fn gl_toland_split(p: &GLParams, k: f64) -> DcSplit {
    augment(&gl_dc_split(p), k)
}

/// `K` values of the conjugate-derivative sweep.
pub const PROBE_KS: [f64; 3] = [1e2, 1e3, 1e4];
/// `ε` values of the determinant sweep.
pub const PROBE_EPS: [f64; 3] = [1e-1, 1e-2, 1e-3];
/// Augmentation used by the determinant sweep. The `1/ε²` term dominates
/// only when `ε ≪ 3(A − B)/2`, and `A − B` shrinks like `1/K²`.
pub const PROBE_DET_K: f64 = 1.0;

/// Second and third derivatives of `G_K*` at a single node, estimated by
/// central differences of the maximizer (`∂G_K*/∂v = û`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugateDerivatives {
    pub k_big: f64,
    pub d2: f64,
    pub d3: f64,
    /// `1/(G″ + K)` at the probe point.
    pub d2_exact: f64,
}

/// Derivatives of `G_K*` for the single-node instance at `v = ∇G_K(u_p)`,
/// where `u_p = ½√β`.
pub fn conjugate_derivatives(p: &GLParams, k: f64) -> Result<ConjugateDerivatives> {
    let (pn, u) = single_node_probe(p)?;
    let dck = gl_toland_split(&pn, k);
    let v = dck.g.grad(&u)?;
    let vv = v.values()[0];
    let s = 1e-2 * (1.0 + vv.abs());
    let argmax = |dv: f64| -> Result<f64> {
        let vs = v.map(|x| x + dv);
        Ok(conjugate_eval(dck.g.as_ref(), &vs, &u, CONJUGATE_TOL)?.argmax.values()[0])
    };
    let (up, u0, um) = (argmax(s)?, argmax(0.0)?, argmax(-s)?);
    let gpp = dck.g.hess_apply(&u, &Field::constant(*u.mesh(), 1.0))?.values()[0];
    Ok(ConjugateDerivatives {
        k_big: k,
        d2: (up - um) / (2.0 * s),
        d3: (up - 2.0 * u0 + um) / (s * s),
        d2_exact: 1.0 / gpp,
    })
}

/// Single-node data of `δ²J₁*` at the optimum `(u_p, v_p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingDeterminant {
    pub eps: f64,
    /// `A = ∂²F_K*`.
    pub a: f64,
    /// `B = ∂²G_K*`.
    pub b: f64,
    /// Determinant of the finite-difference 2×2 Hessian in `(u, v)`.
    pub det: f64,
}

impl CouplingDeterminant {
    /// `2(A − B)/ε + c (A − B)²/ε²` for the given `c`.
    pub fn model(&self, c: f64) -> f64 {
        let d = self.a - self.b;
        2.0 * d / self.eps + c * d * d / (self.eps * self.eps)
    }

    /// The coefficient `c` that makes [`Self::model`] reproduce `det`.
    pub fn fitted_constant(&self) -> f64 {
        let d = self.a - self.b;
        (self.det - 2.0 * d / self.eps) * self.eps * self.eps / (d * d)
    }
}

pub fn coupling_determinant(p: &GLParams, k: f64, eps: f64) -> Result<CouplingDeterminant> {
    let (pn, u) = single_node_probe(p)?;
    let mesh = *u.mesh();
    let dck = gl_toland_split(&pn, k);
    let v = dck.f.grad(&u)?;
    let one = Field::constant(mesh, 1.0);
    let a = 1.0 / dck.f.hess_apply(&u, &one)?.values()[0];
    let b = 1.0 / dck.g.hess_apply(&u, &one)?.values()[0];
    let x = [u.values()[0], v.values()[0]];
    let f = |y: &[f64]| {
        let uu = Field::constant(mesh, y[0]);
        let vv = Field::constant(mesh, y[1]);
        eval_j1star_toland(&dck, &uu, &vv, eps).unwrap_or(f64::NAN)
    };
    let h = fd_hessian(&f, &x, fd_step(&x)) / mesh.weight();
    Ok(CouplingDeterminant {
        eps,
        a,
        b,
        det: h.determinant(),
    })
}

/// Scaling table: conjugate derivatives over `ks` and the
/// coupling determinant over `epss` (at [`PROBE_DET_K`]).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingProbe {
    pub derivatives: Vec<ConjugateDerivatives>,
    pub determinants: Vec<CouplingDeterminant>,
    pub d2_slope: f64,
    pub d3_slope: f64,
    pub det_slope: f64,
}

pub fn hessian_scaling_probe(p: &GLParams, ks: &[f64], epss: &[f64]) -> Result<ScalingProbe> {
    let derivatives = ks
        .par_iter()
        .map(|&k| conjugate_derivatives(p, k))
        .collect::<Result<Vec<_>>>()?;
    let determinants = epss
        .par_iter()
        .map(|&e| coupling_determinant(p, PROBE_DET_K, e))
        .collect::<Result<Vec<_>>>()?;
    let d2: Vec<f64> = derivatives.iter().map(|d| d.d2).collect();
    let d3: Vec<f64> = derivatives.iter().map(|d| d.d3).collect();
    let det: Vec<f64> = determinants.iter().map(|d| d.det).collect();
    Ok(ScalingProbe {
        d2_slope: loglog_slope(ks, &d2),
        d3_slope: loglog_slope(ks, &d3),
        det_slope: loglog_slope(epss, &det),
        derivatives,
        determinants,
    })
}

impl ScalingProbe {
    /// CSV with columns `K,eps,d2G,d3G,detHess` (blank where a column does
    /// not apply) and a trailing `# slope` block.
    pub fn to_csv(&self) -> String {
        use crate::io::fmt_num;
        let mut s = String::from("K,eps,d2G,d3G,detHess\n");
        for d in &self.derivatives {
            s += &format!("{},,{},{},\n", fmt_num(d.k_big), fmt_num(d.d2), fmt_num(d.d3));
        }
        for d in &self.determinants {
            s += &format!("{},{},,,{}\n", fmt_num(PROBE_DET_K), fmt_num(d.eps), fmt_num(d.det));
        }
        s += &format!("# slope d2G_vs_K {}\n", fmt_num(self.d2_slope));
        s += &format!("# slope d3G_vs_K {}\n", fmt_num(self.d3_slope));
        s += &format!("# slope detHess_vs_eps {}\n", fmt_num(self.det_slope));
        s
    }
}

/// Checks the Toland chain at a critical point `u₀` with `K = r.k_big` and
/// `ε = r.eps`.
///
/// Premise: `‖∇J(u₀)‖ ≤ 1e-10`. Conclusions: both maximizers at
/// `v₀ = ∇F_K(u₀)` equal `u₀`; `J(u₀) = J_K*(v₀) = J₁*(u₀, v₀)` to 1e-7;
/// Fenchel–Young for `F_K`, `G_K` and `J₁* ≥ J_K*` on `samples` random
/// points; the envelope identity `∇G_K* = û` by finite differences; local
/// convexity of `J₁*` at the optimum on a grid with at most 8 nodes per
/// axis; and the single-node scaling slopes (`∂²G_K*` like `1/K`, `∂³G_K*`
/// like `1/K³`, `det δ²J₁*` like `1/ε²`).
pub fn verify_toland(p: &GLParams, r: &RegParams, u0: &Field, samples: usize, seed: u64) -> Result<CheckReport> {
    p.f.check_same(u0)?;
    let mesh = *p.mesh();
    let (k, eps) = (r.k_big, r.eps);
    let dck = gl_toland_split(p, k);
    let mut rep = CheckReport::new("toland");
    rep.value("K", k);
    rep.value("eps", eps);
    rep.premise("primal_residual", norm_l2(&mesh, &grad_j(p, u0)?)?, 1e-10);

    let v0 = dck.f.grad(u0)?;
    let t = eval_jk_star(&dck, &v0, u0)?;
    rep.conclusion("argmax_f", norm_inf(&(&t.f_conj.argmax - u0)), 1e-8);
    rep.conclusion("argmax_g", norm_inf(&(&t.g_conj.argmax - u0)), 1e-8);
    let j = eval_j(p, u0)?;
    let j1 = t.value + coupling(&mesh, u0, &t.g_conj.argmax, &t.f_conj.argmax, eps)?;
    rep.value("J", j);
    rep.value("JKstar", t.value);
    rep.value("J1star", j1);
    rep.conclusion("value_chain_toland", (j - t.value).abs(), 1e-7);
    rep.conclusion("value_chain_coupled", (t.value - j1).abs(), 1e-7);

    let draws = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<[f64; 3]> {
            let mut rng = stream(seed, i as u64);
            let u = gaussian_field(mesh, &mut rng);
            let v = &dck.f.grad(&u)? + &gaussian_field(mesh, &mut rng);
            let te = eval_jk_star(&dck, &v, &u)?;
            let uv = inner(&mesh, &u, &v)?;
            let fy_f = dck.f.value(&u)? + te.f_conj.value - uv;
            let fy_g = dck.g.value(&u)? + te.g_conj.value - uv;
            let gap = coupling(&mesh, &u, &te.g_conj.argmax, &te.f_conj.argmax, eps)?;
            Ok([fy_f, fy_g, gap])
        })
        .collect::<Result<Vec<_>>>()?;
    let low = |i: usize| draws.iter().map(|d| d[i]).fold(f64::INFINITY, f64::min);
    let scale = 1e-10 * (1.0 + j.abs());
    rep.conclusion("fenchel_young_f", (-low(0)).max(0.0), scale);
    rep.conclusion("fenchel_young_g", (-low(1)).max(0.0), scale);
    rep.conclusion("coupled_upper_bound", (-low(2)).max(0.0), 0.0);

    let envelope = envelope_error(&dck, &v0, u0)?;
    rep.conclusion("envelope_gradient", envelope, 1e-6);

    let (dp, du) = desk_instance(p, u0, DESK_N)?;
    let lmin = coupled_min_eigenvalue(&dp, k, eps, &du)?;
    rep.value("coupled_hessian_min_eig", lmin);
    rep.conclusion("local_convexity", -lmin, 1e-8);

    let probe = hessian_scaling_probe(p, &PROBE_KS, &PROBE_EPS)?;
    rep.value("d2G_slope", probe.d2_slope);
    rep.value("d3G_slope", probe.d3_slope);
    rep.value("det_slope", probe.det_slope);
    rep.conclusion("d2G_scaling", (probe.d2_slope + 1.0).abs(), 0.2);
    rep.conclusion("d3G_scaling", (probe.d3_slope + 3.0).abs(), 0.5);
    rep.conclusion("det_scaling", (probe.det_slope + 2.0).abs(), 0.2);
    let d2_err = probe
        .derivatives
        .iter()
        .map(|d| ((d.d2 - d.d2_exact) / d.d2_exact).abs())
        .fold(0.0, f64::max);
    rep.conclusion("d2G_closed_form", d2_err, 1e-6);
    let last = probe.determinants.last().expect("non-empty sweep");
    let fitted = last.fitted_constant();
    rep.value("det_constant_fitted", fitted);
    rep.value("det_constant_vs_2", fitted - 2.0);
    rep.value("det_constant_vs_3", fitted - 3.0);
    rep.value("det_model_rel_error_c2", (last.det - last.model(2.0)).abs() / last.det);
    rep.value("det_model_rel_error_c3", (last.det - last.model(3.0)).abs() / last.det);
    Ok(rep)
}

/// Relative error between a finite-difference gradient of `G_K*` and its
/// maximizer, in covector form (`w · û`).
fn envelope_error(dck: &DcSplit, v: &Field, warm: &Field) -> Result<f64> {
    let mesh = dck.mesh();
    let g = dck.g.clone();
    let val = |x: &[f64]| {
        conjugate_eval(g.as_ref(), &Field::from_raw(mesh, x.to_vec()), warm, CONJUGATE_TOL)
            .map(|c| c.value)
            .unwrap_or(f64::NAN)
    };
    let fd = fd_gradient(&val, v.values(), fd_step(v.values()));
    let arg = conjugate_eval(g.as_ref(), v, warm, CONJUGATE_TOL)?.argmax;
    let scale = arg.max_abs().max(1e-3) * mesh.weight();
    Ok(fd
        .iter()
        .zip(arg.values())
        .map(|(a, b)| (a - b * mesh.weight()).abs() / scale)
        .fold(0.0, f64::max))
}

/// Smallest eigenvalue of the finite-difference Hessian of `J₁*` over
/// `(u, v)` at `(u₀, ∇F_K(u₀))`, divided by the quadrature weight.
pub fn coupled_min_eigenvalue(p: &GLParams, k: f64, eps: f64, u0: &Field) -> Result<f64> {
    let mesh = *p.mesh();
    let n = mesh.dof();
    let dck = gl_toland_split(p, k);
    let v0 = dck.f.grad(u0)?;
    let mut x = u0.values().to_vec();
    x.extend_from_slice(v0.values());
    let f = |y: &[f64]| {
        let u = Field::from_raw(mesh, y[..n].to_vec());
        let v = Field::from_raw(mesh, y[n..].to_vec());
        eval_j1star_toland(&dck, &u, &v, eps).unwrap_or(f64::NAN)
    };
    let h = fd_hessian(&f, &x, fd_step(&x)) / mesh.weight();
    Ok(sym_eigenvalues(&h)[0])
}
