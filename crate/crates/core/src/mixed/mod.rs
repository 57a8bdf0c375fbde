//! Lowest-order Raviart-Thomas fluxes and piecewise-constant scalars.
//!
//! The flux unknown of an edge is the normal component of `u_h` along the
//! edge's fixed normal. On triangle `K` the basis function of local edge `i`
//! is `psi_i(x) = s_i |sigma_i| / (2|K|) (x - x_i)`, with `x_i` the opposite
//! vertex and `s_i = +1` iff the edge normal points out of `K`.

mod assembly;
mod postprocess;

pub use assembly::{assemble, AssembledSystem};
pub use postprocess::{l2_project, postprocess, vertex_average, QuadraticPressure};

use crate::mesh::{Mesh, Point};

/// Degree-of-freedom layout: flux unknowns are edge ids, scalar unknowns are
/// triangle ids offset by the number of edges.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub n_u: usize,
    pub n_p: usize,
    /// Orientation sign of each local edge of each triangle.
    pub signs: Vec<[f64; 3]>,
}

impl DofMap {
    pub fn new(mesh: &Mesh) -> Self {
        DofMap {
            n_u: mesh.num_edges(),
            n_p: mesh.num_triangles(),
            signs: (0..mesh.num_triangles())
                .map(|t| [0, 1, 2].map(|i| mesh.edge_sign(t, i)))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.n_u + self.n_p
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pressure_dof(&self, t: usize) -> usize {
        self.n_u + t
    }
}

/// RT0 basis function of local edge `i` of triangle `t`, evaluated at `x`.
pub fn rt0_basis(mesh: &Mesh, t: usize, i: usize, x: Point) -> Point {
    let tri = &mesh.triangles()[t];
    let c = mesh.edge_sign(t, i) * mesh.edges()[tri.edges[i]].length / (2.0 * tri.area);
    let opp = mesh.vertices()[tri.vertices[i]];
    [c * (x[0] - opp.x), c * (x[1] - opp.y)]
}

/// Constant divergence of [`rt0_basis`] on `t`.
pub fn rt0_div(mesh: &Mesh, t: usize, i: usize) -> f64 {
    let tri = &mesh.triangles()[t];
    mesh.edge_sign(t, i) * mesh.edges()[tri.edges[i]].length / tri.area
}

/// An RT0 field restricted to one triangle: `a + b x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFlux {
    pub a: Point,
    pub b: f64,
}

impl LocalFlux {
    pub fn at(&self, x: Point) -> Point {
        [self.a[0] + self.b * x[0], self.a[1] + self.b * x[1]]
    }

    pub fn divergence(&self) -> f64 {
        2.0 * self.b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedSolution {
    /// Normal flux per edge.
    pub flux: Vec<f64>,
    /// Scalar value per triangle.
    pub pressure: Vec<f64>,
}

impl MixedSolution {
    pub fn zeros(mesh: &Mesh) -> Self {
        MixedSolution {
            flux: vec![0.0; mesh.num_edges()],
            pressure: vec![0.0; mesh.num_triangles()],
        }
    }

    /// Splits a stacked `[U; P]` vector.
    pub fn from_stacked(x: &[f64], n_u: usize) -> Self {
        MixedSolution {
            flux: x[..n_u].to_vec(),
            pressure: x[n_u..].to_vec(),
        }
    }

    pub fn local_flux(&self, mesh: &Mesh, t: usize) -> LocalFlux {
        let tri = &mesh.triangles()[t];
        let mut a = [0.0; 2];
        let mut b = 0.0;
        for i in 0..3 {
            let c = mesh.edge_sign(t, i) * self.flux[tri.edges[i]] * mesh.edges()[tri.edges[i]].length
                / (2.0 * tri.area);
            let opp = mesh.vertices()[tri.vertices[i]];
            b += c;
            a[0] -= c * opp.x;
            a[1] -= c * opp.y;
        }
        LocalFlux { a, b }
    }
}
