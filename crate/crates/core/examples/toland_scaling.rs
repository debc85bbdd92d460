//! Toland duality for the split J = G_K − F_K: value chain and
//! Fenchel–Young equalities, then the K and ε scaling of the conjugate
//! derivatives and of the coupled Hessian determinant as CSV.

use std::f64::consts::PI;

use glduality::primal::newton_solve;
use glduality::toland::{hessian_scaling_probe, verify_toland, PROBE_EPS, PROBE_KS};
use glduality::{build_mesh, Field, GLParams, RegParams};

fn main() -> glduality::Result<()> {
    let mesh = build_mesh(1, 32, 1.0)?;
    let p = GLParams::new(1.0, 1.0, 1.0, Field::from_fn(mesh, |x, _| (PI * x).sin()))?;
    let (u0, _) = newton_solve(&p, &Field::zeros(mesh), 1e-12, 50)?;

    print!("{}", verify_toland(&p, &RegParams::with_k(100.0), &u0, 50, 42)?);
    println!();
    print!("{}", hessian_scaling_probe(&p, &PROBE_KS, &PROBE_EPS)?.to_csv());
    Ok(())
}
