//! Rectangular Dirichlet grids and nodal fields.
//!
//! A [`Mesh`] covers the square (or interval) `[0, length]^dim` with `n`
//! interior nodes per axis and spacing `h = length / (n + 1)`. Unknowns live
//! on interior nodes only; boundary nodes carry the fixed value zero.
//!
//! Quadrature is the trapezoid rule on the full grid. Every interior node
//! carries weight `h^dim`; the boundary nodes carry the remaining
//! [`Mesh::boundary_measure`], so that interior weights plus the boundary
//! contribution add up to `|Ω|`. Integrands that are nonzero on the
//! boundary (for instance `(u² − β)²` with `u = 0` there) are handled by
//! adding their known boundary value times the boundary measure.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    dim: usize,
    n: usize,
    length: f64,
    h: f64,
}

impl Mesh {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidMesh(format!("dim must be 1 or 2, got {dim}")));
        }
        if n < 1 {
            return Err(Error::InvalidMesh("n must be at least 1".into()));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidMesh(format!(
                "length must be positive, got {length}"
            )));
        }
        Ok(Mesh {
            dim,
            n,
            length,
            h: length / (n + 1) as f64,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Interior nodes per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Total interior degrees of freedom, `n^dim`.
    pub fn dof(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Trapezoid weight of a single interior node.
    pub fn weight(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    pub fn quad_weights(&self) -> Vec<f64> {
        vec![self.weight(); self.dof()]
    }

    /// `|Ω|`.
    pub fn measure(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Total trapezoid weight carried by boundary nodes.
    pub fn boundary_measure(&self) -> f64 {
        let interior = (self.n as f64 * self.h).powi(self.dim as i32);
        self.measure() - interior
    }

    /// Physical coordinates of interior node `idx` (x fastest).
    pub fn coords(&self, idx: usize) -> [f64; 2] {
        let ix = idx % self.n;
        let iy = idx / self.n;
        let x = (ix + 1) as f64 * self.h;
        if self.dim == 1 {
            [x, 0.0]
        } else {
            [x, (iy + 1) as f64 * self.h]
        }
    }

    /// Same grid geometry with a different resolution.
    pub fn with_n(&self, n: usize) -> Result<Mesh> {
        Mesh::new(self.dim, n, self.length)
    }
}

/// Convenience constructor mirroring [`Mesh::new`].
pub fn build_mesh(dim: usize, n: usize, length: f64) -> Result<Mesh> {
    Mesh::new(dim, n, length)
}

/// Nodal values on the interior nodes of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    mesh: Mesh,
    values: Vec<f64>,
}

impl Field {
    pub fn new(mesh: Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.dof() {
            return Err(Error::FieldLength {
                expected: mesh.dof(),
                got: values.len(),
            });
        }
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { node, value });
        }
        Ok(Field { mesh, values })
    }

    pub fn zeros(mesh: Mesh) -> Self {
        Field {
            mesh,
            values: vec![0.0; mesh.dof()],
        }
    }

    pub fn constant(mesh: Mesh, c: f64) -> Self {
        Field {
            mesh,
            values: vec![c; mesh.dof()],
        }
    }

    /// Samples `f(x, y)` at the interior nodes (`y = 0` in 1D).
    pub fn from_fn(mesh: Mesh, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..mesh.dof())
            .map(|i| {
                let [x, y] = mesh.coords(i);
                f(x, y)
            })
            .collect();
        Field { mesh, values }
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn from_raw(mesh: Mesh, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), mesh.dof());
        Field { mesh, values }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field::from_raw(self.mesh, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Nodewise combination of two fields on the same mesh.
    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        self.check_same(other)?;
        Ok(Field::from_raw(
            self.mesh,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn check_same(&self, other: &Field) -> Result<()> {
        if self.mesh == other.mesh {
            Ok(())
        } else {
            Err(Error::MeshMismatch)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, a: f64) -> Field {
        self.map(|v| a * v)
    }
}

// Arithmetic panics on mismatched meshes; callers that need a recoverable
// error use `zip_map`.
impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a + b).expect("mesh mismatch in field addition")
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a - b).expect("mesh mismatch in field subtraction")
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        self.scale(rhs)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scale(-1.0)
    }
}
