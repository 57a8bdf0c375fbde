use rayon::prelude::*;

use super::DofMap;
use crate::error::Result;
use crate::linsolve::SparseMatrix;
use crate::mesh::Mesh;
use crate::problem::{CoefficientVariants, ProblemSpec};
use crate::quadrature::{edge_gauss, TriangleRule};

/// The block system
///
/// ```text
/// [ A       -B^T ] [U]   [G]
/// [ B - C    D   ] [P] = [F]
/// ```
///
/// with `A` the `S^{-1}`-weighted RT0 mass matrix, `B` the divergence,
/// `C` the convective coupling and `D` the diagonal zero-order term.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub dofs: DofMap,
}

impl AssembledSystem {
    pub fn n_u(&self) -> usize {
        self.dofs.n_u
    }

    pub fn n_p(&self) -> usize {
        self.dofs.n_p
    }
}

struct Local {
    edges: [usize; 3],
    mass: [[f64; 3]; 3],
    /// `(div psi_j, 1)_K - (S^{-1} psi_j . w, 1)_K`
    row: [f64; 3],
    /// `(div psi_j, 1)_K`
    div: [f64; 3],
    zero_order: f64,
    source: f64,
}

/// Assembles the centered mixed scheme on `mesh`.
///
/// Dirichlet data enters the flux equation as the natural boundary term
/// `-<g, psi . n>`, integrated by three-point Gauss on each boundary edge.
pub fn assemble(mesh: &Mesh, spec: &ProblemSpec, variants: &CoefficientVariants) -> Result<AssembledSystem> {
    let dofs = DofMap::new(mesh);
    let rule = TriangleRule::seven_point();
    let locals: Vec<Local> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let tri = &mesh.triangles()[t];
            let corners = mesh.corners(t);
            let data = &variants.data[t];
            let s_inv = data.diffusion_inverse();
            let scale: [f64; 3] =
                [0, 1, 2].map(|i| dofs.signs[t][i] * mesh.edges()[tri.edges[i]].length / (2.0 * tri.area));
            let mut mass = [[0.0; 3]; 3];
            let mut conv = [0.0; 3];
            let mut source = 0.0;
            for (x, w) in rule.map(&corners) {
                let psi: [[f64; 2]; 3] =
                    [0, 1, 2].map(|i| [scale[i] * (x[0] - corners[i][0]), scale[i] * (x[1] - corners[i][1])]);
                let vel = data.velocity.at(x);
                for i in 0..3 {
                    let si = s_inv.apply(psi[i]);
                    for j in i..3 {
                        mass[i][j] += w * (si[0] * psi[j][0] + si[1] * psi[j][1]);
                    }
                    conv[i] += w * (si[0] * vel[0] + si[1] * vel[1]);
                }
                source += w * (spec.source)(x);
            }
            for i in 0..3 {
                for j in i..3 {
                    mass[i][j] *= tri.area;
                    mass[j][i] = mass[i][j];
                }
                conv[i] *= tri.area;
            }
            let div = [0, 1, 2].map(|i| 2.0 * scale[i] * tri.area);
            Local {
                edges: tri.edges,
                mass,
                row: [0, 1, 2].map(|i| div[i] - conv[i]),
                div,
                zero_order: data.zero_order() * tri.area,
                source: source * tri.area,
            }
        })
        .collect();

    let n = dofs.len();
    let mut triplets = Vec::with_capacity(mesh.num_triangles() * 16);
    let mut rhs = vec![0.0; n];
    for (t, l) in locals.iter().enumerate() {
        let p = dofs.pressure_dof(t);
        for i in 0..3 {
            for j in 0..3 {
                triplets.push((l.edges[i], l.edges[j], l.mass[i][j]));
            }
            triplets.push((l.edges[i], p, -l.div[i]));
            triplets.push((p, l.edges[i], l.row[i]));
        }
        triplets.push((p, p, l.zero_order));
        rhs[p] = l.source;
    }
    let gauss = edge_gauss(3);
    for (e, edge) in mesh.edges().iter().enumerate() {
        if !edge.is_boundary() {
            continue;
        }
        let a = mesh.vertices()[edge.vertices[0]].point();
        let b = mesh.vertices()[edge.vertices[1]].point();
        let g: f64 = gauss
            .iter()
            .map(|&(s, w)| w * (spec.dirichlet)([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]))
            .sum();
        rhs[e] = -g * edge.length;
    }
    let matrix = SparseMatrix::from_triplets(n, n, triplets)?;
    Ok(AssembledSystem { matrix, rhs, dofs })
}
