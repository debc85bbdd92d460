//! Functional oracles and difference-of-convex splittings.

use std::sync::Arc;

use crate::error::Result;
use crate::mesh::{Field, Mesh};
use crate::operators::{apply_neg_laplacian, dirichlet_energy, inner};
use crate::primal::GLParams;

/// A smooth functional on fields of one mesh, with gradient in function
/// form (`dΦ(u)[d] = inner(grad, d)`) and Hessian-vector products.
pub trait Functional: Send + Sync {
    fn mesh(&self) -> Mesh;
    fn value(&self, u: &Field) -> Result<f64>;
    fn grad(&self, u: &Field) -> Result<Field>;
    fn hess_apply(&self, u: &Field, d: &Field) -> Result<Field>;
}

/// `J = G − F` with both parts supplied as oracles.
#[derive(Clone)]
pub struct DcSplit {
    pub g: Arc<dyn Functional>,
    pub f: Arc<dyn Functional>,
}

impl DcSplit {
    pub fn new(g: Arc<dyn Functional>, f: Arc<dyn Functional>) -> Self {
        DcSplit { g, f }
    }

    pub fn mesh(&self) -> Mesh {
        self.g.mesh()
    }

    pub fn value(&self, u: &Field) -> Result<f64> {
        Ok(self.g.value(u)? - self.f.value(u)?)
    }

    pub fn grad(&self, u: &Field) -> Result<Field> {
        Ok(&self.g.grad(u)? - &self.f.grad(u)?)
    }
}

/// Convex part of the Ginzburg–Landau energy:
/// `γ/2 ∫|∇u|² + α/2 ∫u⁴ + αβ²|Ω|/2 − ⟨u, f⟩`.
pub struct GlConvexPart {
    p: GLParams,
}

impl Functional for GlConvexPart {
    fn mesh(&self) -> Mesh {
        *self.p.mesh()
    }

    fn value(&self, u: &Field) -> Result<f64> {
        let m = self.p.mesh();
        let quartic: f64 = u.values().iter().map(|x| x.powi(4)).sum::<f64>() * m.weight();
        Ok(0.5 * self.p.gamma * dirichlet_energy(m, u)?
            + 0.5 * self.p.alpha * quartic
            + 0.5 * self.p.alpha * self.p.beta * self.p.beta * m.measure()
            - inner(m, u, &self.p.f)?)
    }

    fn grad(&self, u: &Field) -> Result<Field> {
        let lap = apply_neg_laplacian(self.p.mesh(), self.p.gamma, u)?;
        let a = self.p.alpha;
        lap.zip_map(u, |l, x| l + 2.0 * a * x * x * x)?
            .zip_map(&self.p.f, |g, f| g - f)
    }

    fn hess_apply(&self, u: &Field, d: &Field) -> Result<Field> {
        let lap = apply_neg_laplacian(self.p.mesh(), self.p.gamma, d)?;
        let a = self.p.alpha;
        let curv = u.map(|x| 6.0 * a * x * x);
        lap.zip_map(&curv.zip_map(d, |c, y| c * y)?, |l, r| l + r)
    }
}

/// Concave-side part `αβ ∫u²` of the Ginzburg–Landau energy.
pub struct GlWellPart {
    mesh: Mesh,
    coeff: f64,
}

impl Functional for GlWellPart {
    fn mesh(&self) -> Mesh {
        self.mesh
    }

    fn value(&self, u: &Field) -> Result<f64> {
        Ok(self.coeff * inner(&self.mesh, u, u)?)
    }

    fn grad(&self, u: &Field) -> Result<Field> {
        self.mesh_check(u)?;
        Ok(u.scale(2.0 * self.coeff))
    }

    fn hess_apply(&self, u: &Field, d: &Field) -> Result<Field> {
        self.mesh_check(u)?;
        self.mesh_check(d)?;
        Ok(d.scale(2.0 * self.coeff))
    }
}

impl GlWellPart {
    fn mesh_check(&self, u: &Field) -> Result<()> {
        u.check_same(&Field::zeros(self.mesh))
    }
}

/// The canonical convex splitting `J = G − F` of the Ginzburg–Landau energy
/// with `F(u) = αβ ∫u²`.
pub fn gl_dc_split(p: &GLParams) -> DcSplit {
    DcSplit {
        g: Arc::new(GlConvexPart { p: p.clone() }),
        f: Arc::new(GlWellPart {
            mesh: *p.mesh(),
            coeff: p.alpha * p.beta,
        }),
    }
}

/// `Φ(u) + K/2 ∫u²`.
pub struct Augmented {
    base: Arc<dyn Functional>,
    k: f64,
}

impl Augmented {
    pub fn new(base: Arc<dyn Functional>, k: f64) -> Self {
        Augmented { base, k }
    }
}

impl Functional for Augmented {
    fn mesh(&self) -> Mesh {
        self.base.mesh()
    }

    fn value(&self, u: &Field) -> Result<f64> {
        Ok(self.base.value(u)? + 0.5 * self.k * inner(&self.mesh(), u, u)?)
    }

    fn grad(&self, u: &Field) -> Result<Field> {
        let k = self.k;
        self.base.grad(u)?.zip_map(u, |g, x| g + k * x)
    }

    fn hess_apply(&self, u: &Field, d: &Field) -> Result<Field> {
        let k = self.k;
        self.base.hess_apply(u, d)?.zip_map(d, |h, x| h + k * x)
    }
}

/// Adds `K/2 ∫u²` to both parts; the difference `G − F` is unchanged.
pub fn augment(dc: &DcSplit, k: f64) -> DcSplit {
    DcSplit {
        g: Arc::new(Augmented::new(dc.g.clone(), k)),
        f: Arc::new(Augmented::new(dc.f.clone(), k)),
    }
}

type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `Σᵢ wᵢ φ(uᵢ)` for a scalar density with known first and second
/// derivatives.
#[derive(Clone)]
pub struct Pointwise {
    mesh: Mesh,
    phi: Density,
    dphi: Density,
    ddphi: Density,
}

impl Pointwise {
    pub fn new(
        mesh: Mesh,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dphi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        ddphi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Pointwise {
            mesh,
            phi: Arc::new(phi),
            dphi: Arc::new(dphi),
            ddphi: Arc::new(ddphi),
        }
    }

    /// `c/2 ∫u²`.
    pub fn quadratic(mesh: Mesh, c: f64) -> Self {
        Pointwise::new(mesh, move |x| 0.5 * c * x * x, move |x| c * x, move |_| c)
    }

    fn check(&self, u: &Field) -> Result<()> {
        u.check_same(&Field::zeros(self.mesh))
    }
}

impl Functional for Pointwise {
    fn mesh(&self) -> Mesh {
        self.mesh
    }

    fn value(&self, u: &Field) -> Result<f64> {
        self.check(u)?;
        Ok(self.mesh.weight() * u.values().iter().map(|&x| (self.phi)(x)).sum::<f64>())
    }

    fn grad(&self, u: &Field) -> Result<Field> {
        self.check(u)?;
        Ok(u.map(|x| (self.dphi)(x)))
    }

    fn hess_apply(&self, u: &Field, d: &Field) -> Result<Field> {
        self.check(u)?;
        u.zip_map(d, |x, y| (self.ddphi)(x) * y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{fd_gradient, sym_eigenvalues};
    use crate::mesh::build_mesh;
    use crate::primal::eval_j;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gl(mesh: Mesh) -> GLParams {
        GLParams::new(0.9, 1.2, 0.7, Field::from_fn(mesh, |x, y| (3.0 * x).sin() + y)).unwrap()
    }

    fn random(mesh: Mesh, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Field::from_raw(mesh, (0..mesh.dof()).map(|_| rng.random_range(-1.0..1.0)).collect())
    }

    #[test]
    fn split_reproduces_energy() {
        for mesh in [build_mesh(1, 9, 1.0).unwrap(), build_mesh(2, 4, 1.5).unwrap()] {
            let p = gl(mesh);
            let dc = gl_dc_split(&p);
            let zero = Field::zeros(mesh);
            let g0 = dc.g.value(&zero).unwrap();
            assert!((g0 - 0.5 * p.alpha * p.beta * p.beta * mesh.measure()).abs() < 1e-14);
            assert_eq!(dc.f.value(&zero).unwrap(), 0.0);
            for seed in 0..5 {
                let u = random(mesh, seed);
                let diff = dc.value(&u).unwrap() - eval_j(&p, &u).unwrap();
                assert!(diff.abs() <= 1e-12, "{diff}");
            }
        }
    }

    #[test]
    fn split_gradients_match_fd() {
        let mesh = build_mesh(1, 10, 1.0).unwrap();
        let dc = gl_dc_split(&gl(mesh));
        let u = random(mesh, 3);
        for part in [&dc.g, &dc.f] {
            let g = part.grad(&u).unwrap();
            let val = |x: &[f64]| part.value(&Field::from_raw(mesh, x.to_vec())).unwrap();
            let fd = fd_gradient(&val, u.values(), 1e-5);
            for (a, b) in g.values().iter().zip(&fd) {
                let a = a * mesh.weight();
                assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-2));
            }
        }
    }

    #[test]
    fn augmentation_keeps_difference() {
        let mesh = build_mesh(1, 8, 1.0).unwrap();
        let dc = gl_dc_split(&gl(mesh));
        let dk = augment(&dc, 50.0);
        let u = random(mesh, 4);
        assert!((dk.value(&u).unwrap() - dc.value(&u).unwrap()).abs() < 1e-12);
        assert_eq!(dk.f.value(&Field::zeros(mesh)).unwrap(), dc.f.value(&Field::zeros(mesh)).unwrap());
        // curvature of F_K is exactly 2αβ + K
        let n = mesh.dof();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            dk.f.hess_apply(&u, &Field::from_raw(mesh, e)).unwrap().values()[i]
        });
        let eig = sym_eigenvalues(&m);
        assert!((eig[0] - (2.0 * 1.2 * 0.7 + 50.0)).abs() < 1e-12);
    }
}
