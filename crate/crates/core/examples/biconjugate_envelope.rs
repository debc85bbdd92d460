//! Convex envelope J** of a single-node energy on [−2, 2] by two discrete
//! Legendre transforms. With γ = 0.01 the energy is a double well and the
//! envelope is flat between the wells. Prints CSV to stdout.

use glduality::biconjugate::biconjugate_bruteforce;
use glduality::functional::gl_dc_split;
use glduality::{build_mesh, Field, GLParams};

fn main() -> glduality::Result<()> {
    let gamma: f64 = std::env::args().nth(1).map_or(Ok(0.01), |s| s.parse()).expect("gamma must be a number");
    let mesh = build_mesh(1, 1, 1.0)?;
    let p = GLParams::new(gamma, 1.0, 1.0, Field::zeros(mesh))?;
    let b = biconjugate_bruteforce(&gl_dc_split(&p), -2.0, 2.0, 401)?;
    eprint!("{}", b.report());
    eprintln!("largest gap J - J** = {:.6}", b.max_gap());
    print!("{}", b.to_csv());
    Ok(())
}
