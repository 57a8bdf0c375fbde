use rayon::prelude::*;

use super::MixedSolution;
use crate::mesh::{Mesh, Point};
use crate::problem::{CoefficientVariants, Tensor2};
use crate::quadrature::TriangleRule;

/// Local quadratic `c + g . (x - x_K) + (x - x_K)^T H (x - x_K) / 2` around
/// the centroid `x_K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticPressure {
    pub center: Point,
    pub value: f64,
    pub gradient: Point,
    pub hessian: Tensor2,
}

impl QuadraticPressure {
    pub fn at(&self, x: Point) -> f64 {
        let d = [x[0] - self.center[0], x[1] - self.center[1]];
        self.value + self.gradient[0] * d[0] + self.gradient[1] * d[1] + 0.5 * self.hessian.form(d, d)
    }

    pub fn gradient_at(&self, x: Point) -> Point {
        let d = [x[0] - self.center[0], x[1] - self.center[1]];
        let h = self.hessian.apply(d);
        [self.gradient[0] + h[0], self.gradient[1] + h[1]]
    }
}

/// Per-triangle quadratic `p~_h` with `-S_K grad p~_h = u_h` and mean `p_h`.
pub fn postprocess(mesh: &Mesh, variants: &CoefficientVariants, solution: &MixedSolution) -> Vec<QuadraticPressure> {
    let rule = TriangleRule::seven_point();
    (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let center = mesh.centroid(t);
            let flux = solution.local_flux(mesh, t);
            let s_inv = variants.data[t].diffusion_inverse();
            let u_c = flux.at(center);
            let g = s_inv.apply(u_c);
            let hessian = s_inv.scale(-flux.b);
            let corners = mesh.corners(t);
            let mean_quad: f64 = rule
                .map(&corners)
                .map(|(x, w)| {
                    let d = [x[0] - center[0], x[1] - center[1]];
                    w * 0.5 * hessian.form(d, d)
                })
                .sum();
            QuadraticPressure {
                center,
                value: solution.pressure[t] - mean_quad,
                gradient: [-g[0], -g[1]],
                hessian,
            }
        })
        .collect()
}

/// Arithmetic mean of the adjacent triangle values at each vertex.
pub fn vertex_average(mesh: &Mesh, values: &[f64]) -> Vec<f64> {
    let mut sum = vec![0.0; mesh.vertices().len()];
    let mut count = vec![0usize; mesh.vertices().len()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        for &v in &tri.vertices {
            sum[v] += values[t];
            count[v] += 1;
        }
    }
    sum.iter().zip(&count).map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 }).collect()
}

/// Elementwise means of `f` (the L2 projection onto piecewise constants).
pub fn l2_project(mesh: &Mesh, f: impl Fn(Point) -> f64 + Sync) -> Vec<f64> {
    let rule = TriangleRule::seven_point();
    (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| rule.map(&mesh.corners(t)).map(|(x, w)| w * f(x)).sum())
        .collect()
}
