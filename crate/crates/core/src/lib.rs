//! Discrete Ginzburg–Landau energy
//!
//! ```text
//! J(u) = γ/2 ∫|∇u|² + α/2 ∫(u² − β)² − ⟨u, f⟩,   u = 0 on ∂Ω,
//! ```
//!
//! on a uniform finite-difference grid over the unit interval or square,
//! together with its dual formulations and numerical checks of the
//! identities that connect them:
//!
//! * [`primal`]: energy, derivatives and a damped Newton solver;
//! * [`polar_dual`]: the concave dual built from Fenchel conjugates;
//! * [`residual`]: the residual primal-dual functional;
//! * [`penalty`]: the penalized formulation and its KKT system;
//! * [`toland`]: the difference-of-convex (Toland) dual;
//! * [`triple_dual`]: the three-field dual and its penalized extension;
//! * [`biconjugate`]: brute-force convex envelopes of tiny instances;
//! * [`experiment`]: TOML configs, suites, sweeps and file output.
//!
//! Every `verify_*` function returns a [`CheckReport`] of named residuals
//! with tolerances, split into premises and conclusions.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod biconjugate;
pub mod error;
pub mod experiment;
pub mod functional;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod operators;
pub mod penalty;
pub mod polar_dual;
pub mod primal;
pub mod report;
pub mod residual;
pub mod sampling;
pub mod toland;
pub mod triple_dual;

pub use error::{Error, Result};
pub use mesh::{build_mesh, Field, Mesh};
pub use primal::{GLParams, RegParams, SolveReport};
pub use report::{Check, CheckKind, CheckReport};
