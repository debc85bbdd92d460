//! Penalized primal-dual formulation: KKT state, value chain and the K₁
//! scaling of the Hessian for f = sin(πx).

use std::f64::consts::PI;

use glduality::penalty::{default_radius, solve_kkt, verify_penalty_kkt};
use glduality::{build_mesh, Field, GLParams, RegParams};

fn main() -> glduality::Result<()> {
    let mesh = build_mesh(1, 64, 1.0)?;
    let p = GLParams::new(1.0, 1.0, 1.0, Field::from_fn(mesh, |x, _| (PI * x).sin()))?;
    let r = RegParams::with_k(100.0);
    let (state, solve) = solve_kkt(&p, &r, &Field::zeros(mesh), 1e-12, 50)?;
    println!("newton iterations: {}", solve.iterations);

    let report = verify_penalty_kkt(&p, &r, &state, default_radius(&state.u), 200, 42)?;
    print!("{report}");
    Ok(())
}
