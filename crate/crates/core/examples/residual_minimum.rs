//! Residual primal-dual functional: zero at the optimum, nonnegative
//! nearby, block determinant 3 on a single node, and an O(1/K) remainder
//! in the full determinant.

use std::f64::consts::PI;

use glduality::primal::newton_solve;
use glduality::residual::{det_probe, verify_residual_minimum, REMAINDER_KS};
use glduality::{build_mesh, Field, GLParams, RegParams};

fn main() -> glduality::Result<()> {
    let mesh = build_mesh(1, 32, 1.0)?;
    let p = GLParams::new(1.0, 1.0, 1.0, Field::from_fn(mesh, |x, _| (PI * x).sin()))?;
    let (u0, _) = newton_solve(&p, &Field::zeros(mesh), 1e-12, 50)?;

    println!("{:>8} {:>16} {:>16}", "K", "det", "remainder");
    for &k in &REMAINDER_KS {
        let d = det_probe(&p, k)?;
        println!("{k:>8e} {:>16.10} {:>16.6e}", d.det, d.remainder());
    }

    print!("{}", verify_residual_minimum(&p, &RegParams::with_k(100.0), &u0, 100, 42)?);
    Ok(())
}
