//! Triple dual J₂* and its penalized extension J₃*: both are stationary at
//! the point built from the primal solution, J₃* ≤ J₂* everywhere, and the
//! Hessian of J₃* is compared at random and at consistent points of A*.

use std::f64::consts::PI;

use glduality::primal::newton_solve;
use glduality::triple_dual::{candidate, eval_j2star, eval_j3star, verify_exactness};
use glduality::{build_mesh, Field, GLParams, RegParams};

fn main() -> glduality::Result<()> {
    let mesh = build_mesh(1, 32, 1.0)?;
    let p = GLParams::new(1.0, 1.0, 1.0, Field::from_fn(mesh, |x, _| (PI * x).sin()))?;
    let (u0, _) = newton_solve(&p, &Field::zeros(mesh), 1e-12, 50)?;

    for k1_over_k in [1.0, 100.0] {
        let r = RegParams { k1: k1_over_k * 100.0, ..RegParams::with_k(100.0) };
        let c = candidate(&p, &r, &u0)?;
        println!("K1 = {}: J2* = {:.12}, J3* = {:.12}", r.k1, eval_j2star(&p, &r, &c)?, eval_j3star(&p, &r, &c)?);
        print!("{}", verify_exactness(&p, &r, &u0, 1e-6, 42)?);
    }
    Ok(())
}
