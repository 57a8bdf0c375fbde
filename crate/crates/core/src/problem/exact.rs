use rayon::prelude::*;

use super::{CoefficientVariants, ProblemSpec};
use crate::error::Result;
use crate::mesh::Mesh;
use crate::mixed::MixedSolution;
use crate::quadrature::TriangleRule;

#[derive(Debug, Clone)]
pub struct ExactError {
    /// `e_h`
    pub energy: f64,
    /// Squared local errors `E_K^2`.
    pub local: Vec<f64>,
    /// `||div(u - u_h)||`
    pub divergence: f64,
}

/// Error of the discrete flux in the `S^{-1}` weighted norm plus the
/// reaction-weighted scalar error, integrated by the seven-point rule.
pub fn exact_error(
    mesh: &Mesh,
    spec: &ProblemSpec,
    variants: &CoefficientVariants,
    solution: &MixedSolution,
) -> Result<ExactError> {
    exact_error_with_rule(mesh, spec, variants, solution, &TriangleRule::seven_point())
}

pub fn exact_error_with_rule(
    mesh: &Mesh,
    spec: &ProblemSpec,
    variants: &CoefficientVariants,
    solution: &MixedSolution,
    rule: &TriangleRule,
) -> Result<ExactError> {
    let exact = spec.exact()?;
    let parts: Vec<(f64, f64)> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let corners = mesh.corners(t);
            let area = mesh.triangles()[t].area;
            let flux = solution.local_flux(mesh, t);
            let s_inv = variants.data[t].diffusion_inverse();
            let c_wr = variants.elements[t].c_wr;
            let p_h = solution.pressure[t];
            let div_h = flux.divergence();
            let mut energy = 0.0;
            let mut div = 0.0;
            for (x, w) in rule.map(&corners) {
                let u = (exact.u)(x);
                let uh = flux.at(x);
                let d = [u[0] - uh[0], u[1] - uh[1]];
                let mut e = s_inv.form(d, d);
                if c_wr > 0.0 {
                    let dp = (exact.p)(x) - p_h;
                    e += c_wr * dp * dp;
                }
                energy += w * e;
                let dd = (exact.div_u)(x) - div_h;
                div += w * dd * dd;
            }
            (energy * area, div * area)
        })
        .collect();
    let local: Vec<f64> = parts.iter().map(|p| p.0).collect();
    Ok(ExactError {
        energy: local.iter().sum::<f64>().sqrt(),
        divergence: parts.iter().map(|p| p.1).sum::<f64>().sqrt(),
        local,
    })
}
