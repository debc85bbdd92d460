//! Convex dual of the primal energy: reconstruct the dual variables from a
//! Newton solution and check stationarity, the zero duality gap, the
//! proximal inequality and concavity of the dual block.

use std::f64::consts::PI;

use glduality::polar_dual::{default_k, eval_jstar, reconstruct_duals, verify_polar_duality};
use glduality::primal::{eval_j, newton_solve};
use glduality::{build_mesh, Field, GLParams};

fn main() -> glduality::Result<()> {
    let mesh = build_mesh(1, 32, 1.0)?;
    let p = GLParams::new(1.0, 1.0, 1.0, Field::from_fn(mesh, |x, _| (PI * x).sin()))?;
    let (u0, _) = newton_solve(&p, &Field::zeros(mesh), 1e-12, 50)?;
    let k = default_k(&p, &u0);

    let duals = reconstruct_duals(&p, k, &u0)?;
    println!("K = {k}");
    println!("J(u0)        = {:.15}", eval_j(&p, &u0)?);
    println!("J*(v*, z*)   = {:.15}", eval_jstar(&p, &duals)?);

    print!("{}", verify_polar_duality(&p, k, &u0, 100, 42)?);
    Ok(())
}
