//! Weighted residual a posteriori estimator.
//!
//! For each triangle `K`
//!
//! ```text
//! eta_K^2 = D_K^2 h_K^2 ||S^{-1} u_h||_K^2
//!         + alpha_K^2 h_K^2 ||R_K||_K^2
//!         + sum_{sigma in K} D_sigma^2 h_sigma ||[gamma_t(S^{-1} u_h)]||_sigma^2
//! ```
//!
//! with `R_K = f - div u_h + S^{-1} u_h . w - (r + div w) p_h`. On boundary
//! edges the jump is the one-sided trace.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::mixed::MixedSolution;
use crate::problem::{CoefficientVariants, ProblemSpec};
use crate::quadrature::{edge_gauss, TriangleRule};

/// `R_K` sampled at the seven-point rule.
#[derive(Debug, Clone)]
pub struct ElementResidual {
    pub values: Vec<f64>,
    pub mean: f64,
    /// `||R_K||_K^2`
    pub norm2: f64,
    /// `||R_K - mean||_K^2`
    pub deviation2: f64,
}

pub fn residual(
    mesh: &Mesh,
    spec: &ProblemSpec,
    variants: &CoefficientVariants,
    solution: &MixedSolution,
    t: usize,
) -> ElementResidual {
    residual_with_rule(mesh, spec, variants, solution, t, &TriangleRule::seven_point())
}

pub fn residual_with_rule(
    mesh: &Mesh,
    spec: &ProblemSpec,
    variants: &CoefficientVariants,
    solution: &MixedSolution,
    t: usize,
    rule: &TriangleRule,
) -> ElementResidual {
    let area = mesh.triangles()[t].area;
    let data = &variants.data[t];
    let s_inv = data.diffusion_inverse();
    let flux = solution.local_flux(mesh, t);
    let constant = -flux.divergence() - data.zero_order() * solution.pressure[t];
    let corners = mesh.corners(t);
    let pts: Vec<_> = rule.map(&corners).collect();
    let values: Vec<f64> = pts
        .iter()
        .map(|&(x, _)| {
            let su = s_inv.apply(flux.at(x));
            let w = data.velocity.at(x);
            (spec.source)(x) + constant + su[0] * w[0] + su[1] * w[1]
        })
        .collect();
    let mean: f64 = pts.iter().zip(&values).map(|((_, w), v)| w * v).sum();
    let norm2 = area * pts.iter().zip(&values).map(|((_, w), v)| w * v * v).sum::<f64>();
    let deviation2 = area * pts.iter().zip(&values).map(|((_, w), v)| w * (v - mean).powi(2)).sum::<f64>();
    ElementResidual {
        values,
        mean,
        norm2,
        deviation2,
    }
}

/// `||[gamma_t(S^{-1} u_h)]||_sigma^2` on edge `e`, by two-point Gauss.
pub fn tangential_jump(mesh: &Mesh, variants: &CoefficientVariants, solution: &MixedSolution, e: usize) -> f64 {
    let edge = &mesh.edges()[e];
    let a = mesh.vertices()[edge.vertices[0]].point();
    let b = mesh.vertices()[edge.vertices[1]].point();
    let t = edge.tangent();
    let trace = |k: usize, x: [f64; 2]| {
        let v = variants.data[k].diffusion_inverse().apply(solution.local_flux(mesh, k).at(x));
        v[0] * t[0] + v[1] * t[1]
    };
    edge_gauss(2)
        .iter()
        .map(|&(s, w)| {
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let mut j = trace(edge.triangles[0], x);
            if !edge.is_boundary() {
                j -= trace(edge.triangles[1], x);
            }
            w * j * j
        })
        .sum::<f64>()
        * edge.length
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ElementTerms {
    /// `D_K^2 h_K^2 ||S^{-1} u_h||^2`
    pub flux: f64,
    /// `alpha_K^2 h_K^2 ||R_K||^2`
    pub residual: f64,
    /// Weighted tangential jumps over the three edges.
    pub jump: f64,
    /// `h_K^2 ||R_K - mean(R_K)||^2`
    pub osc2: f64,
}

impl ElementTerms {
    pub fn eta2(&self) -> f64 {
        self.flux + self.residual + self.jump
    }
}

#[derive(Debug, Clone)]
pub struct EstimatorReport {
    pub elements: Vec<ElementTerms>,
    /// Squared tangential jump per edge (unweighted).
    pub edge_jumps: Vec<f64>,
    pub eta2: f64,
    pub osc2: f64,
}

impl EstimatorReport {
    pub fn eta(&self) -> f64 {
        self.eta2.sqrt()
    }

    pub fn osc(&self) -> f64 {
        self.osc2.sqrt()
    }

    /// Squared indicators `eta_K^2`.
    pub fn indicators(&self) -> Vec<f64> {
        self.elements.iter().map(ElementTerms::eta2).collect()
    }
}

pub fn estimate(
    mesh: &Mesh,
    spec: &ProblemSpec,
    variants: &CoefficientVariants,
    solution: &MixedSolution,
) -> EstimatorReport {
    let edge_jumps: Vec<f64> = (0..mesh.num_edges())
        .into_par_iter()
        .map(|e| tangential_jump(mesh, variants, solution, e))
        .collect();
    let rule = TriangleRule::seven_point();
    let elements: Vec<ElementTerms> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let tri = &mesh.triangles()[t];
            let v = &variants.elements[t];
            let h2 = tri.area;
            let res = residual_with_rule(mesh, spec, variants, solution, t, &rule);
            let flux_term = if v.d2 > 0.0 {
                let s_inv = variants.data[t].diffusion_inverse();
                let flux = solution.local_flux(mesh, t);
                let n2 = rule.integrate(&mesh.corners(t), tri.area, |x| {
                    let su = s_inv.apply(flux.at(x));
                    su[0] * su[0] + su[1] * su[1]
                });
                v.d2 * h2 * n2
            } else {
                0.0
            };
            let jump = tri
                .edges
                .iter()
                .map(|&e| variants.edges[e].d2 * mesh.edges()[e].length * edge_jumps[e])
                .sum();
            ElementTerms {
                flux: flux_term,
                residual: v.alpha * v.alpha * h2 * res.norm2,
                jump,
                osc2: h2 * res.deviation2,
            }
        })
        .collect();
    let eta2 = elements.iter().map(ElementTerms::eta2).sum();
    let osc2 = elements.iter().map(|e| e.osc2).sum();
    EstimatorReport {
        elements,
        edge_jumps,
        eta2,
        osc2,
    }
}

/// `osc_h` and the squared local contributions.
pub fn oscillation(
    mesh: &Mesh,
    spec: &ProblemSpec,
    variants: &CoefficientVariants,
    solution: &MixedSolution,
) -> (f64, Vec<f64>) {
    let local: Vec<f64> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| mesh.triangles()[t].area * residual(mesh, spec, variants, solution, t).deviation2)
        .collect();
    (local.iter().sum::<f64>().sqrt(), local)
}

/// Weights of the contraction quantity: divergence error, estimator and data
/// terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AWeights {
    pub divergence: f64,
    pub estimator: f64,
    pub data: f64,
}

impl Default for AWeights {
    fn default() -> Self {
        AWeights {
            divergence: 1.0,
            estimator: 1.0,
            data: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantityA {
    pub weights: AWeights,
    /// `||div(u - u_h)||^2`, if an exact solution is available.
    pub divergence2: Option<f64>,
    pub eta2: f64,
    /// `||f - f_h||^2`
    pub source2: f64,
    /// `||h grad_h(S^{-1} u_h . w)||^2`
    pub convection2: f64,
    /// `A_h^2`
    pub total2: f64,
}

impl QuantityA {
    pub fn total(&self) -> f64 {
        self.total2.sqrt()
    }

    pub fn data2(&self) -> f64 {
        self.source2 + self.convection2
    }
}

pub fn quantity_a(
    mesh: &Mesh,
    spec: &ProblemSpec,
    variants: &CoefficientVariants,
    solution: &MixedSolution,
    report: &EstimatorReport,
    weights: AWeights,
) -> Result<QuantityA> {
    if weights.divergence > 0.0 && spec.exact.is_none() {
        return Err(Error::MissingExactSolution);
    }
    let rule = TriangleRule::seven_point();
    let parts: Vec<(f64, f64, f64)> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let tri = &mesh.triangles()[t];
            let corners = mesh.corners(t);
            let data = &variants.data[t];
            let s_inv = data.diffusion_inverse();
            let flux = solution.local_flux(mesh, t);
            let pts: Vec<_> = rule.map(&corners).collect();
            let f: Vec<f64> = pts.iter().map(|&(x, _)| (spec.source)(x)).collect();
            let f_mean: f64 = pts.iter().zip(&f).map(|((_, w), v)| w * v).sum();
            let mut source = 0.0;
            let mut conv = 0.0;
            let mut div = 0.0;
            let div_h = flux.divergence();
            for (k, &(x, w)) in pts.iter().enumerate() {
                source += w * (f[k] - f_mean).powi(2);
                // grad(S^{-1}(a + b x) . (c + d x)) = b S^{-1} w(x) + d S^{-1} u_h(x)
                let sw = s_inv.apply(data.velocity.at(x));
                let su = s_inv.apply(flux.at(x));
                let d = data.velocity.b;
                let g = [flux.b * sw[0] + d * su[0], flux.b * sw[1] + d * su[1]];
                conv += w * tri.area * (g[0] * g[0] + g[1] * g[1]);
                if let Some(ex) = &spec.exact {
                    div += w * ((ex.div_u)(x) - div_h).powi(2);
                }
            }
            (source * tri.area, conv * tri.area, div * tri.area)
        })
        .collect();
    let source2: f64 = parts.iter().map(|p| p.0).sum();
    let convection2: f64 = parts.iter().map(|p| p.1).sum();
    let divergence2 = spec.exact.as_ref().map(|_| parts.iter().map(|p| p.2).sum::<f64>());
    let total2 = weights.divergence * divergence2.unwrap_or(0.0)
        + weights.estimator * report.eta2
        + weights.data * (source2 + convection2);
    Ok(QuantityA {
        weights,
        divergence2,
        eta2: report.eta2,
        source2,
        convection2,
        total2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Domain;
    use crate::problem::{variants, Benchmark, ElementData, KelloggCase, Tensor2, Velocity};
    use std::sync::Arc;

    fn setup(spec: &ProblemSpec, refine: usize) -> (Mesh, CoefficientVariants) {
        let mut m = spec.initial_mesh().unwrap();
        for _ in 0..refine {
            m = m.refine_uniform().unwrap();
        }
        let v = variants(&m, spec).unwrap();
        (m, v)
    }

    fn constant_spec(w: [f64; 2], f: f64) -> ProblemSpec {
        ProblemSpec::constant(
            "c",
            Domain::UnitSquare,
            ElementData {
                diffusion: Tensor2::isotropic(1.0),
                velocity: Velocity::constant(w),
                reaction: 0.0,
            },
            Arc::new(move |_| f),
            Arc::new(|_| 0.0),
        )
    }

    #[test]
    fn zero_everything() {
        let spec = constant_spec([0.0, 0.0], 0.0);
        let (m, v) = setup(&spec, 2);
        let sol = MixedSolution::zeros(&m);
        let r = estimate(&m, &spec, &v, &sol);
        assert_eq!(r.eta2, 0.0);
        for t in 0..m.num_triangles() {
            assert!(residual(&m, &spec, &v, &sol, t).values.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn constant_source_has_no_oscillation() {
        let spec = constant_spec([0.0, 0.0], 3.0);
        let (m, v) = setup(&spec, 1);
        let sol = MixedSolution {
            flux: (0..m.num_edges()).map(|e| (e as f64).sin()).collect(),
            pressure: (0..m.num_triangles()).map(|t| t as f64).collect(),
        };
        let (osc, local) = oscillation(&m, &spec, &v, &sol);
        assert!(osc < 1e-12);
        assert!(local.iter().all(|&x| x < 1e-24));
    }

    #[test]
    fn constant_flux_has_no_interior_jumps() {
        let spec = constant_spec([0.0, 0.0], 0.0);
        let (m, v) = setup(&spec, 2);
        let c = [0.3, -1.2];
        // normal components of a constant field
        let flux = m.edges().iter().map(|e| c[0] * e.normal[0] + c[1] * e.normal[1]).collect();
        let sol = MixedSolution {
            flux,
            pressure: vec![0.0; m.num_triangles()],
        };
        for (e, edge) in m.edges().iter().enumerate() {
            let j = tangential_jump(&m, &v, &sol, e);
            if edge.is_boundary() {
                let t = edge.tangent();
                let want = (c[0] * t[0] + c[1] * t[1]).powi(2) * edge.length;
                assert!((j - want).abs() < 1e-14);
            } else {
                assert!(j < 1e-28);
            }
        }
    }

    #[test]
    fn checkerboard_interface_jump() {
        let spec = Benchmark::Kellogg(KelloggCase::One).spec();
        let (m, v) = setup(&spec, 0);
        let c = [0.7, 0.4];
        let flux = m.edges().iter().map(|e| c[0] * e.normal[0] + c[1] * e.normal[1]).collect();
        let sol = MixedSolution {
            flux,
            pressure: vec![0.0; m.num_triangles()],
        };
        // edge on the positive x axis: quadrant 1 (s=5) above, quadrant 4 (s=1) below
        let e = m
            .edges()
            .iter()
            .position(|e| {
                let a = m.vertices()[e.vertices[0]];
                let b = m.vertices()[e.vertices[1]];
                a.y == 0.0 && b.y == 0.0 && a.x.max(b.x) == 1.0
            })
            .unwrap();
        let tangential = c[0]; // the edge is horizontal
        let want = ((1.0 / 5.0 - 1.0f64).abs() * tangential.abs()).powi(2) * m.edges()[e].length;
        assert!((tangential_jump(&m, &v, &sol, e) - want).abs() < 1e-14);
    }

    #[test]
    fn decomposition_and_diffusion_reduction() {
        let spec = Benchmark::LShape.spec();
        let (m, v) = setup(&spec, 2);
        let sol = MixedSolution {
            flux: (0..m.num_edges()).map(|e| (0.3 * e as f64).sin()).collect(),
            pressure: (0..m.num_triangles()).map(|t| (0.2 * t as f64).cos()).collect(),
        };
        let r = estimate(&m, &spec, &v, &sol);
        let parts: f64 = r.elements.iter().map(|e| e.flux + e.residual + e.jump).sum();
        assert!((parts - r.eta2).abs() <= 1e-12 * r.eta2);
        // S = I, w = r = 0: only the alpha-weighted residual and jumps with weight 1/2
        let mut want = 0.0;
        for (t, tri) in m.triangles().iter().enumerate() {
            let res = residual(&m, &spec, &v, &sol, t);
            want += tri.area * tri.area * res.norm2;
        }
        for (e, edge) in m.edges().iter().enumerate() {
            let count = edge.patch().len() as f64;
            want += count * 0.5 * edge.length * tangential_jump(&m, &v, &sol, e);
        }
        assert!(r.elements.iter().all(|e| e.flux == 0.0));
        assert!((want - r.eta2).abs() <= 1e-12 * want);
    }

    #[test]
    fn convection_only_oscillation() {
        let spec = constant_spec([1.0, 1.0], 0.0);
        let (m, v) = setup(&spec, 1);
        let sol = MixedSolution {
            flux: (0..m.num_edges()).map(|e| (0.9 * e as f64).cos()).collect(),
            pressure: vec![1.0; m.num_triangles()],
        };
        let (_, local) = oscillation(&m, &spec, &v, &sol);
        let rule = TriangleRule::collapsed_gauss(5);
        for (t, tri) in m.triangles().iter().enumerate() {
            let flux = sol.local_flux(&m, t);
            let g = |x: [f64; 2]| {
                let u = flux.at(x);
                u[0] + u[1]
            };
            let mean = rule.integrate(&m.corners(t), tri.area, g) / tri.area;
            let want = tri.area * rule.integrate(&m.corners(t), tri.area, |x| (g(x) - mean).powi(2));
            assert!((local[t] - want).abs() < 1e-13 * want.max(1e-12));
        }
    }

    #[test]
    fn local_oscillation_bound() {
        let spec = Benchmark::Layer { epsilon: 0.1 }.spec();
        let (m, v) = setup(&spec, 2);
        let sol = MixedSolution {
            flux: (0..m.num_edges()).map(|e| (0.9 * e as f64).cos()).collect(),
            pressure: vec![0.5; m.num_triangles()],
        };
        for t in 0..m.num_triangles() {
            let res = residual(&m, &spec, &v, &sol, t);
            let h = m.triangles()[t].size();
            assert!((h * h * res.deviation2).sqrt() <= h * res.norm2.sqrt() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn quantity_weights() {
        let spec = Benchmark::Layer { epsilon: 0.1 }.spec();
        let (m, v) = setup(&spec, 1);
        let sol = MixedSolution {
            flux: (0..m.num_edges()).map(|e| (0.9 * e as f64).cos()).collect(),
            pressure: vec![0.5; m.num_triangles()],
        };
        let r = estimate(&m, &spec, &v, &sol);
        let only_eta = AWeights {
            divergence: 0.0,
            estimator: 1.0,
            data: 0.0,
        };
        let a = quantity_a(&m, &spec, &v, &sol, &r, only_eta).unwrap();
        assert_eq!(a.total2, r.eta2);
        let full = quantity_a(&m, &spec, &v, &sol, &r, AWeights::default()).unwrap();
        assert!(full.total2 >= r.eta2);
        let sum = full.divergence2.unwrap() + full.eta2 + full.source2 + full.convection2;
        assert!((full.total2 - sum).abs() <= 1e-12 * sum);

        // w = 0: the data term is the source projection error only
        let spec0 = constant_spec([0.0, 0.0], 1.0);
        let (m0, v0) = setup(&spec0, 1);
        let sol0 = MixedSolution {
            flux: vec![1.0; m0.num_edges()],
            pressure: vec![0.0; m0.num_triangles()],
        };
        let r0 = estimate(&m0, &spec0, &v0, &sol0);
        let q = quantity_a(&m0, &spec0, &v0, &sol0, &r0, only_eta).unwrap();
        assert_eq!(q.convection2, 0.0);

        let il = Benchmark::InteriorLayer { epsilon: 0.1 }.spec();
        let (mi, vi) = setup(&il, 0);
        let soli = MixedSolution::zeros(&mi);
        let ri = estimate(&mi, &il, &vi, &soli);
        assert!(matches!(
            quantity_a(&mi, &il, &vi, &soli, &ri, AWeights::default()),
            Err(Error::MissingExactSolution)
        ));
    }
}
