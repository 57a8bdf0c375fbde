//! Problem data, derived coefficient bounds, and the benchmark suite.
//!
//! Diffusion, velocity and reaction are piecewise defined on the initial
//! mesh: they are evaluated once per initial triangle and inherited by every
//! descendant through [`Triangle::ancestor`](crate::mesh::Triangle::ancestor).

mod benchmarks;
mod exact;
mod variants;

pub use benchmarks::{Benchmark, KelloggCase, KelloggData};
pub use exact::{exact_error, exact_error_with_rule, ExactError};
pub use variants::{variants, CoefficientVariants, EdgeVariant, ElementVariant};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{Domain, Mesh, Point};

pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Point) -> Point + Send + Sync>;

/// Symmetric 2x2 tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Tensor2 {
    pub fn isotropic(s: f64) -> Self {
        Tensor2 { xx: s, xy: 0.0, yy: s }
    }

    pub fn apply(&self, v: Point) -> Point {
        [self.xx * v[0] + self.xy * v[1], self.xy * v[0] + self.yy * v[1]]
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn inverse(&self) -> Tensor2 {
        let d = self.det();
        Tensor2 {
            xx: self.yy / d,
            xy: -self.xy / d,
            yy: self.xx / d,
        }
    }

    pub fn scale(&self, s: f64) -> Tensor2 {
        Tensor2 {
            xx: s * self.xx,
            xy: s * self.xy,
            yy: s * self.yy,
        }
    }

    /// `v^T T w`
    pub fn form(&self, v: Point, w: Point) -> f64 {
        let tw = self.apply(w);
        v[0] * tw[0] + v[1] * tw[1]
    }

    /// (smallest, largest) eigenvalue.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.xx + self.yy);
        let rad = (0.5 * (self.xx - self.yy)).hypot(self.xy);
        (mean - rad, mean + rad)
    }
}

/// Velocity in the lowest-order Raviart-Thomas space of one initial element:
/// `w(x) = a + b x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Velocity {
    pub a: Point,
    pub b: f64,
}

impl Velocity {
    pub fn constant(a: Point) -> Self {
        Velocity { a, b: 0.0 }
    }

    pub fn at(&self, x: Point) -> Point {
        [self.a[0] + self.b * x[0], self.a[1] + self.b * x[1]]
    }

    pub fn divergence(&self) -> f64 {
        2.0 * self.b
    }
}

/// Coefficients on one initial triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementData {
    pub diffusion: Tensor2,
    pub velocity: Velocity,
    pub reaction: f64,
}

impl ElementData {
    pub fn diffusion_inverse(&self) -> Tensor2 {
        self.diffusion.inverse()
    }

    /// `r + div w`
    pub fn zero_order(&self) -> f64 {
        self.reaction + self.velocity.divergence()
    }
}

/// Closed-form solution used for error measurement.
#[derive(Clone)]
pub struct ExactSolution {
    pub p: ScalarFn,
    pub grad_p: VectorFn,
    /// `u = -S grad p`
    pub u: VectorFn,
    pub div_u: ScalarFn,
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: Domain,
    /// Resolution passed to [`Mesh::build_initial`].
    pub resolution: usize,
    /// Coefficients as a function of a point inside an initial triangle.
    pub coefficients: Arc<dyn Fn(Point) -> ElementData + Send + Sync>,
    pub source: ScalarFn,
    pub dirichlet: ScalarFn,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("resolution", &self.resolution)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

fn centroid(c: &[Point; 3]) -> Point {
    [(c[0][0] + c[1][0] + c[2][0]) / 3.0, (c[0][1] + c[1][1] + c[2][1]) / 3.0]
}

impl ProblemSpec {
    pub fn initial_mesh(&self) -> Result<Mesh> {
        Mesh::build_initial(self.domain, self.resolution)
    }

    /// Coefficients of each initial triangle.
    pub fn root_data(&self, mesh: &Mesh) -> Vec<ElementData> {
        (0..mesh.num_roots())
            .map(|r| (self.coefficients)(centroid(mesh.root(r))))
            .collect()
    }

    /// Coefficients of each triangle of `mesh`, inherited from its ancestor.
    pub fn element_data(&self, mesh: &Mesh) -> Vec<ElementData> {
        let roots = self.root_data(mesh);
        mesh.triangles().iter().map(|t| roots[t.ancestor]).collect()
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact(&self) -> Result<&ExactSolution> {
        self.exact.as_ref().ok_or(Error::MissingExactSolution)
    }

    /// A problem with constant coefficients on the given domain and no exact
    /// solution.
    pub fn constant(
        name: &str,
        domain: Domain,
        data: ElementData,
        source: ScalarFn,
        dirichlet: ScalarFn,
    ) -> ProblemSpec {
        ProblemSpec {
            name: name.to_string(),
            domain,
            resolution: 1,
            coefficients: Arc::new(move |_| data),
            source,
            dirichlet,
            exact: None,
        }
    }
}
