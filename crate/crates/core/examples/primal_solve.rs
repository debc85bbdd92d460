//! Damped Newton on the Ginzburg–Landau energy with f = sin(πx) on 64
//! interior nodes, printing the residual history and the smallest
//! eigenvalue of the second variation at the solution.

use std::f64::consts::PI;

use glduality::primal::{eval_j, min_hess_eigenvalue, newton_solve};
use glduality::{build_mesh, Field, GLParams};

fn main() -> glduality::Result<()> {
    let mesh = build_mesh(1, 64, 1.0)?;
    let p = GLParams::new(1.0, 1.0, 1.0, Field::from_fn(mesh, |x, _| (PI * x).sin()))?;
    let (u, rep) = newton_solve(&p, &Field::zeros(mesh), 1e-10, 30)?;
    for (i, r) in rep.residual_history.iter().enumerate() {
        println!("iter {i:2}  |grad J| = {r:.3e}");
    }
    println!("converged: {}", rep.converged);
    println!("J(u0) = {:.12}", eval_j(&p, &u)?);
    println!("max |u0| = {:.6}", u.max_abs());
    println!("min eigenvalue of J''(u0) = {:.6}", min_hess_eigenvalue(&p, &u)?);
    Ok(())
}
