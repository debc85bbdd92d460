//! Discrete operators and quadrature on Dirichlet grids.

use crate::error::{Error, Result};
use crate::linalg::{solve_shifted, stencil_apply};
use crate::mesh::{Field, Mesh};

fn check_mesh(mesh: &Mesh, u: &Field) -> Result<()> {
    if u.mesh() == mesh {
        Ok(())
    } else {
        Err(Error::MeshMismatch)
    }
}

/// `−γ∇²u` with the 3-point (1D) or 5-point (2D) stencil, boundary
/// neighbours read as zero.
pub fn apply_neg_laplacian(mesh: &Mesh, gamma: f64, u: &Field) -> Result<Field> {
    check_mesh(mesh, u)?;
    let mut out = vec![0.0; u.len()];
    stencil_apply(mesh, u.values(), &mut out);
    for v in &mut out {
        *v *= gamma;
    }
    Ok(Field::from_raw(*mesh, out))
}

/// Solves `(kI − γ∇²) w = rhs`.
///
/// The result satisfies `‖(kI − γ∇²)w − rhs‖₂ ≤ tol·‖rhs‖₂` in 2D; 1D uses
/// direct elimination and is exact up to rounding.
pub fn solve_helmholtz(mesh: &Mesh, gamma: f64, k: f64, rhs: &Field, tol: f64) -> Result<Field> {
    check_mesh(mesh, rhs)?;
    if gamma < 0.0 || k < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "helmholtz needs gamma >= 0 and k >= 0 (got gamma={gamma}, k={k})"
        )));
    }
    if gamma == 0.0 && k == 0.0 {
        return Err(Error::Singular("k = 0 and gamma = 0".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    if gamma == 0.0 {
        return Ok(rhs.scale(1.0 / k));
    }
    let diag = vec![k; rhs.len()];
    let w = solve_shifted(mesh, gamma, &diag, rhs.values(), tol)?;
    Ok(Field::from_raw(*mesh, w))
}

/// Quadrature pairing `Σᵢ wᵢ uᵢ vᵢ` over interior nodes.
pub fn inner(mesh: &Mesh, u: &Field, v: &Field) -> Result<f64> {
    check_mesh(mesh, u)?;
    check_mesh(mesh, v)?;
    Ok(mesh.weight() * crate::linalg::dot(u.values(), v.values()))
}

/// `Σᵢ wᵢ uᵢ`; the boundary carries zero.
pub fn integrate(mesh: &Mesh, u: &Field) -> Result<f64> {
    check_mesh(mesh, u)?;
    Ok(mesh.weight() * u.values().iter().sum::<f64>())
}

/// Integral of an integrand whose interior samples are `u` and whose value on
/// every boundary node is `boundary_value`.
pub fn integrate_with_boundary(mesh: &Mesh, u: &Field, boundary_value: f64) -> Result<f64> {
    Ok(integrate(mesh, u)? + boundary_value * mesh.boundary_measure())
}

pub fn norm_l2(mesh: &Mesh, u: &Field) -> Result<f64> {
    Ok(inner(mesh, u, u)?.sqrt())
}

pub fn norm_inf(u: &Field) -> f64 {
    u.max_abs()
}

/// `Σ_edges ((u_b − u_a)/h)² · h^dim`, including edges that touch the
/// boundary. Equals `inner(u, −∇²u)` exactly.
pub fn dirichlet_energy(mesh: &Mesh, u: &Field) -> Result<f64> {
    check_mesh(mesh, u)?;
    let n = mesh.n();
    let v = u.values();
    let h = mesh.h();
    let mut acc = 0.0;
    let mut edge = |a: f64, b: f64| {
        let d = (b - a) / h;
        acc += d * d;
    };
    match mesh.dim() {
        1 => {
            let mut prev = 0.0;
            for &x in v {
                edge(prev, x);
                prev = x;
            }
            edge(prev, 0.0);
        }
        _ => {
            for iy in 0..n {
                let mut prev = 0.0;
                for ix in 0..n {
                    let x = v[iy * n + ix];
                    edge(prev, x);
                    prev = x;
                }
                edge(prev, 0.0);
            }
            for ix in 0..n {
                let mut prev = 0.0;
                for iy in 0..n {
                    let x = v[iy * n + ix];
                    edge(prev, x);
                    prev = x;
                }
                edge(prev, 0.0);
            }
        }
    }
    Ok(acc * mesh.weight())
}

/// Eigenvalues of the discrete `−∇²` (γ = 1), ascending.
pub fn neg_laplacian_eigenvalues(mesh: &Mesh) -> Vec<f64> {
    let n = mesh.n();
    let h = mesh.h();
    let one_d: Vec<f64> = (1..=n)
        .map(|j| {
            let s = (j as f64 * std::f64::consts::PI / (2.0 * (n + 1) as f64)).sin();
            4.0 / (h * h) * s * s
        })
        .collect();
    let mut all = if mesh.dim() == 1 {
        one_d
    } else {
        let mut v = Vec::with_capacity(n * n);
        for a in &one_d {
            for b in &one_d {
                v.push(a + b);
            }
        }
        v
    };
    all.sort_by(|a, b| a.total_cmp(b));
    all
}
