use super::{ElementData, ProblemSpec};
use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Element coefficient bounds and estimator weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementVariant {
    /// Smallest eigenvalue of `S_K`.
    pub c_s: f64,
    /// Largest eigenvalue of `S_K`.
    pub big_c_s: f64,
    /// Bound on `|w|` over the initial ancestor.
    pub c_w: f64,
    /// `div w / 2 + r`
    pub c_wr: f64,
    /// `|div w + r|`
    pub big_c_wr: f64,
    pub alpha: f64,
    pub d2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeVariant {
    /// Smallest `c_S` over the edge patch.
    pub c_patch: f64,
    pub d2: f64,
}

#[derive(Debug, Clone)]
pub struct CoefficientVariants {
    /// Inherited coefficients per triangle.
    pub data: Vec<ElementData>,
    pub elements: Vec<ElementVariant>,
    pub edges: Vec<EdgeVariant>,
}

#[derive(Debug, Clone, Copy)]
struct RootBounds {
    c_s: f64,
    big_c_s: f64,
    c_w: f64,
    c_wr: f64,
    big_c_wr: f64,
}

const ZERO_TOL: f64 = 1e-14;

fn root_bounds(mesh: &Mesh, data: &[ElementData]) -> Result<Vec<RootBounds>> {
    data.iter()
        .enumerate()
        .map(|(r, d)| {
            let s = d.diffusion;
            let (c_s, big_c_s) = s.eigenvalues();
            if !(c_s > 0.0) || !c_s.is_finite() || !big_c_s.is_finite() {
                return Err(Error::DataAssumption {
                    assumption: "D1",
                    element: r,
                    detail: format!("diffusion eigenvalues ({c_s}, {big_c_s}) not positive"),
                });
            }
            // |w| is convex, so its maximum over the triangle sits at a corner
            let c_w = mesh
                .root(r)
                .iter()
                .map(|&x| {
                    let w = d.velocity.at(x);
                    w[0].hypot(w[1])
                })
                .fold(0.0, f64::max);
            let div = d.velocity.divergence();
            let mut c_wr = 0.5 * div + d.reaction;
            let mut big_c_wr = (div + d.reaction).abs();
            if c_wr < -ZERO_TOL {
                return Err(Error::DataAssumption {
                    assumption: "D4",
                    element: r,
                    detail: format!("div w / 2 + r = {c_wr} < 0"),
                });
            }
            if c_wr.abs() <= ZERO_TOL {
                c_wr = 0.0;
                if big_c_wr > ZERO_TOL {
                    return Err(Error::DataAssumption {
                        assumption: "D6",
                        element: r,
                        detail: format!("div w / 2 + r = 0 but |div w + r| = {big_c_wr}"),
                    });
                }
                big_c_wr = 0.0;
            }
            Ok(RootBounds {
                c_s,
                big_c_s,
                c_w,
                c_wr,
                big_c_wr,
            })
        })
        .collect()
}

/// `num / den` with the conventions `0 / 0 = 0` and `x / 0 = inf` for `x > 0`.
fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Computes the coefficient bounds of every triangle and edge of `mesh`.
///
/// Neighbourhood maxima range over all triangles whose closure meets the
/// closure of the element (or edge), i.e. triangles sharing at least a vertex.
pub fn variants(mesh: &Mesh, spec: &ProblemSpec) -> Result<CoefficientVariants> {
    let roots = spec.root_data(mesh);
    let bounds = root_bounds(mesh, &roots)?;
    let tris = mesh.triangles();
    let data: Vec<ElementData> = tris.iter().map(|t| roots[t.ancestor]).collect();

    let mut elements: Vec<ElementVariant> = tris
        .iter()
        .map(|t| {
            let b = bounds[t.ancestor];
            let h = t.size();
            let alpha = (h / b.c_s.sqrt()).min(if b.c_wr > 0.0 { 1.0 / b.c_wr.sqrt() } else { f64::INFINITY });
            ElementVariant {
                c_s: b.c_s,
                big_c_s: b.big_c_s,
                c_w: b.c_w,
                c_wr: b.c_wr,
                big_c_wr: b.big_c_wr,
                alpha,
                d2: 0.0,
            }
        })
        .collect();

    // per-vertex maxima of the neighbourhood quantities
    let nv = mesh.vertices().len();
    let mut max_cwr = vec![0.0f64; nv];
    let mut max_div_ratio = vec![0.0f64; nv];
    let mut max_big_cs = vec![0.0f64; nv];
    let mut max_cw_cwr = vec![0.0f64; nv];
    let mut max_hcw_cs = vec![0.0f64; nv];
    let mut min_cs = vec![f64::INFINITY; nv];
    for (t, tri) in tris.iter().enumerate() {
        let e = &elements[t];
        let div = data[t].velocity.divergence();
        let div_ratio = ratio(div * div, e.c_wr);
        let cw_cwr = ratio(e.c_w * e.c_w, e.c_wr);
        let hcw_cs = tri.area * e.c_w * e.c_w / e.c_s;
        for &v in &tri.vertices {
            max_cwr[v] = max_cwr[v].max(e.c_wr);
            max_div_ratio[v] = max_div_ratio[v].max(div_ratio);
            max_big_cs[v] = max_big_cs[v].max(e.big_c_s);
            max_cw_cwr[v] = max_cw_cwr[v].max(cw_cwr);
            max_hcw_cs[v] = max_hcw_cs[v].max(hcw_cs);
            min_cs[v] = min_cs[v].min(e.c_s);
        }
    }

    for (t, tri) in tris.iter().enumerate() {
        let vmax = |a: &[f64]| tri.vertices.iter().map(|&v| a[v]).fold(0.0, f64::max);
        let e = &mut elements[t];
        e.d2 = e.c_wr + e.big_c_wr * e.big_c_wr * e.alpha * e.alpha + vmax(&max_cwr) + vmax(&max_div_ratio);
    }

    let edges = mesh
        .edges()
        .iter()
        .map(|edge| {
            let [a, b] = edge.vertices;
            let m = |arr: &[f64]| arr[a].max(arr[b]);
            let convection = m(&max_cw_cwr).min(m(&max_hcw_cs));
            EdgeVariant {
                c_patch: edge.patch().iter().map(|&t| elements[t].c_s).fold(f64::INFINITY, f64::min),
                d2: 0.5 * m(&max_big_cs) + 0.5 * convection,
            }
        })
        .collect();

    Ok(CoefficientVariants { data, elements, edges })
}

#[cfg(test)]
mod tests {
    use super::super::{Benchmark, ProblemSpec, Tensor2, Velocity};
    use super::*;
    use crate::mesh::Domain;
    use std::sync::Arc;

    fn constant_problem(data: ElementData) -> ProblemSpec {
        ProblemSpec::constant("c", Domain::UnitSquare, data, Arc::new(|_| 0.0), Arc::new(|_| 0.0))
    }

    #[test]
    fn pure_diffusion() {
        let spec = constant_problem(ElementData {
            diffusion: Tensor2::isotropic(1.0),
            velocity: Velocity::constant([0.0, 0.0]),
            reaction: 0.0,
        });
        let mesh = spec.initial_mesh().unwrap().refine_uniform().unwrap();
        let v = variants(&mesh, &spec).unwrap();
        for (t, e) in v.elements.iter().enumerate() {
            assert_eq!(e.d2, 0.0);
            assert!((e.alpha - mesh.triangles()[t].size()).abs() < 1e-15);
        }
        for e in &v.edges {
            assert_eq!(e.d2, 0.5);
        }
    }

    #[test]
    fn layer_convection() {
        let eps = 0.01;
        let spec = Benchmark::Layer { epsilon: eps }.spec();
        let mesh = spec.initial_mesh().unwrap();
        let v = variants(&mesh, &spec).unwrap();
        for (t, e) in v.elements.iter().enumerate() {
            assert_eq!(e.c_wr, 0.0);
            assert_eq!(e.big_c_wr, 0.0);
            assert!((e.c_w * e.c_w - 2.0).abs() < 1e-14);
            let h = mesh.triangles()[t].size();
            assert!((e.alpha - h / eps.sqrt()).abs() < 1e-14);
            assert_eq!(e.d2, 0.0);
        }
        // all triangles have the same area, so the second alternative is h^2 * 2 / eps
        let h2 = mesh.triangles()[0].area;
        for e in &v.edges {
            let want = 0.5 * eps + 0.5 * (h2 * 2.0 / eps);
            assert!((e.d2 - want).abs() < 1e-13);
        }
    }

    #[test]
    fn kellogg_interface_edge() {
        let spec = Benchmark::Kellogg(super::super::KelloggCase::One).spec();
        let mesh = spec.initial_mesh().unwrap();
        let v = variants(&mesh, &spec).unwrap();
        // edge on the positive x axis separates quadrant 1 (s=5) and quadrant 4 (s=1)
        let e = mesh
            .edges()
            .iter()
            .position(|e| {
                let a = mesh.vertices()[e.vertices[0]];
                let b = mesh.vertices()[e.vertices[1]];
                a.y == 0.0 && b.y == 0.0 && a.x.max(b.x) == 1.0
            })
            .unwrap();
        assert!((v.edges[e].d2 - 2.5).abs() < 1e-14);
    }

    #[test]
    fn reaction_weights() {
        let spec = constant_problem(ElementData {
            diffusion: Tensor2::isotropic(1.0),
            velocity: Velocity::constant([0.0, 0.0]),
            reaction: 4.0,
        });
        let mesh = spec.initial_mesh().unwrap();
        let v = variants(&mesh, &spec).unwrap();
        for (t, e) in v.elements.iter().enumerate() {
            let h = mesh.triangles()[t].size();
            assert_eq!(e.alpha, h.min(0.5));
            // c + C^2 alpha^2 + max c + 0
            assert!((e.d2 - (4.0 + 16.0 * e.alpha * e.alpha + 4.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn child_variants_inherit() {
        let spec = Benchmark::Kellogg(super::super::KelloggCase::One).spec();
        let m0 = spec.initial_mesh().unwrap();
        let m1 = m0.refine(&[0, 5], 1).unwrap();
        let v0 = variants(&m0, &spec).unwrap();
        let v1 = variants(&m1, &spec).unwrap();
        for (t, tri) in m1.triangles().iter().enumerate() {
            let (c, p) = (v1.elements[t], v0.elements[tri.parent]);
            assert_eq!((c.c_s, c.big_c_s, c.c_w, c.c_wr, c.big_c_wr), (p.c_s, p.big_c_s, p.c_w, p.c_wr, p.big_c_wr));
            assert!(c.alpha <= p.alpha);
        }
    }

    #[test]
    fn assumption_violations() {
        let mut data = ElementData {
            diffusion: Tensor2::isotropic(-1.0),
            velocity: Velocity::constant([0.0, 0.0]),
            reaction: 0.0,
        };
        let mesh = Mesh::build_initial(Domain::UnitSquare, 1).unwrap();
        let err = variants(&mesh, &constant_problem(data)).unwrap_err();
        assert!(matches!(err, Error::DataAssumption { assumption: "D1", element: 0, .. }));
        data.diffusion = Tensor2::isotropic(1.0);
        data.reaction = -1.0;
        let err = variants(&mesh, &constant_problem(data)).unwrap_err();
        assert!(matches!(err, Error::DataAssumption { assumption: "D4", .. }));
        // div w = 2, r = -1: c = 0 but C = 1
        data.velocity = Velocity { a: [0.0, 0.0], b: 1.0 };
        let err = variants(&mesh, &constant_problem(data)).unwrap_err();
        assert!(matches!(err, Error::DataAssumption { assumption: "D6", .. }));
    }
}
