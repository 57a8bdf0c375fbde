//! Dense reference assembly built from the normal-component definition of
//! the RT0 basis, independent of the library's closed-form basis.

use amfem::mesh::{Mesh, Point};
use amfem::problem::ProblemSpec;
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

/// Coefficients `(a, b)` of `psi = a + b x` on triangle `t` for each local
/// edge, found from the normal-component conditions `psi_i . n_j = delta_ij`.
pub fn local_basis(mesh: &Mesh, t: usize) -> [([f64; 2], f64); 3] {
    let tri = &mesh.triangles()[t];
    let c = mesh.corners(t);
    let mut out = [([0.0; 2], 0.0); 3];
    // psi . n is constant on an edge; evaluate it at the edge midpoint.
    let mut m = Matrix3::zeros();
    for j in 0..3 {
        let e = &mesh.edges()[tri.edges[j]];
        let (p, q) = (c[(j + 1) % 3], c[(j + 2) % 3]);
        let mid = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
        m[(j, 0)] = e.normal[0];
        m[(j, 1)] = e.normal[1];
        m[(j, 2)] = e.normal[0] * mid[0] + e.normal[1] * mid[1];
    }
    let lu = m.lu();
    for (i, slot) in out.iter_mut().enumerate() {
        let mut rhs = Vector3::zeros();
        rhs[i] = 1.0;
        let s = lu.solve(&rhs).unwrap();
        *slot = ([s[0], s[1]], s[2]);
    }
    out
}

/// Edge-midpoint rule: exact for quadratics.
fn midpoint_rule(c: &[Point; 3]) -> [Point; 3] {
    [0, 1, 2].map(|i| {
        let (p, q) = (c[(i + 1) % 3], c[(i + 2) % 3]);
        [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0]
    })
}

fn at(psi: &([f64; 2], f64), x: Point) -> Point {
    [psi.0[0] + psi.1 * x[0], psi.0[1] + psi.1 * x[1]]
}

/// Dense system and right-hand side. Source and boundary data must be
/// polynomials of degree at most 2 and 1 for the rules used here to be exact.
pub fn oracle(mesh: &Mesh, spec: &ProblemSpec) -> (DMatrix<f64>, DVector<f64>) {
    let data = spec.element_data(mesh);
    let nu = mesh.num_edges();
    let n = nu + mesh.num_triangles();
    let mut a = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let d = &data[t];
        let s_inv = d.diffusion.inverse();
        let basis = local_basis(mesh, t);
        let pts = midpoint_rule(&mesh.corners(t));
        let p = nu + t;
        for i in 0..3 {
            let ei = tri.edges[i];
            for j in 0..3 {
                let ej = tri.edges[j];
                let v: f64 = pts
                    .iter()
                    .map(|&x| {
                        let si = s_inv.apply(at(&basis[i], x));
                        let pj = at(&basis[j], x);
                        si[0] * pj[0] + si[1] * pj[1]
                    })
                    .sum::<f64>()
                    * tri.area
                    / 3.0;
                a[(ei, ej)] += v;
            }
            let div = 2.0 * basis[i].1 * tri.area;
            let conv: f64 = pts
                .iter()
                .map(|&x| {
                    let si = s_inv.apply(at(&basis[i], x));
                    let w = d.velocity.at(x);
                    si[0] * w[0] + si[1] * w[1]
                })
                .sum::<f64>()
                * tri.area
                / 3.0;
            a[(ei, p)] -= div;
            a[(p, ei)] += div - conv;
        }
        a[(p, p)] = (d.reaction + d.velocity.divergence()) * tri.area;
        rhs[p] = pts.iter().map(|&x| (spec.source)(x)).sum::<f64>() * tri.area / 3.0;
    }
    for (e, edge) in mesh.edges().iter().enumerate() {
        if edge.is_boundary() {
            let p = mesh.vertices()[edge.vertices[0]].point();
            let q = mesh.vertices()[edge.vertices[1]].point();
            rhs[e] = -(spec.dirichlet)([(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0]) * edge.length;
        }
    }
    (a, rhs)
}
