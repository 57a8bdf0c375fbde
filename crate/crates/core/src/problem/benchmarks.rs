use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::{ElementData, ExactSolution, ProblemSpec, Tensor2, Velocity};
use crate::error::{Error, Result};
use crate::mesh::{Domain, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KelloggCase {
    One,
    Two,
}

/// Checkerboard coefficients and singular solution
/// `p = rho^alpha (a_i sin(alpha theta) + b_i cos(alpha theta))` in quadrant `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KelloggData {
    pub s: [f64; 4],
    pub alpha: f64,
    pub a: [f64; 4],
    pub b: [f64; 4],
}

impl KelloggCase {
    pub fn data(self) -> KelloggData {
        match self {
            KelloggCase::One => KelloggData {
                s: [5.0, 1.0, 5.0, 1.0],
                alpha: 0.53544095,
                a: [0.44721360, -0.74535599, -0.94411759, -2.40170264],
                b: [1.00000000, 2.33333333, 0.55555555, -0.48148148],
            },
            KelloggCase::Two => KelloggData {
                s: [100.0, 1.0, 100.0, 1.0],
                alpha: 0.12690207,
                a: [0.10000000, -9.60396040, -0.48035487, 7.70156488],
                b: [1.00000000, 2.96039604, -0.88275659, -6.45646175],
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Benchmark {
    /// Re-entrant corner, `p = rho^{2/3} sin(2 theta / 3)`.
    LShape,
    /// Piecewise constant diffusion on the four quadrants of `(-1,1)^2`.
    Kellogg(KelloggCase),
    /// Boundary layers at `x = 1` and `y = 1` on the unit square.
    Layer { epsilon: f64 },
    /// Interior and boundary layer with discontinuous Dirichlet data.
    InteriorLayer { epsilon: f64 },
}

/// Polar angle in `[0, 2 pi)`.
pub(crate) fn polar(x: Point) -> (f64, f64) {
    let rho = x[0].hypot(x[1]);
    let mut theta = x[1].atan2(x[0]);
    if theta < 0.0 {
        theta += 2.0 * PI;
    }
    (rho, theta)
}

/// Quadrant index 0..4, counterclockwise from the first quadrant.
pub(crate) fn quadrant(x: Point) -> usize {
    let (_, theta) = polar(x);
    ((theta / (0.5 * PI)) as usize).min(3)
}

/// `rho^alpha (a sin(alpha theta) + b cos(alpha theta))` and its gradient.
fn singular(x: Point, alpha: f64, a: f64, b: f64) -> (f64, Point) {
    let (rho, theta) = polar(x);
    let (s, c) = (alpha * theta).sin_cos();
    let phi = a * s + b * c;
    let dphi = alpha * (a * c - b * s);
    let p = rho.powf(alpha) * phi;
    let r1 = rho.powf(alpha - 1.0);
    let d_rho = alpha * r1 * phi;
    let d_theta = r1 * dphi;
    let (st, ct) = theta.sin_cos();
    (p, [d_rho * ct - d_theta * st, d_rho * st + d_theta * ct])
}

/// One-dimensional layer profile and its first two derivatives.
fn layer_profile(t: f64, eps: f64) -> (f64, f64, f64) {
    let denom = (-1.0 / eps).exp_m1();
    let e = ((t - 1.0) / eps).exp();
    let v = (e - 1.0) / denom + t - 1.0;
    let dv = e / (eps * denom) + 1.0;
    let ddv = e / (eps * eps * denom);
    (v, dv, ddv)
}

impl Benchmark {
    /// Parses a benchmark name; `epsilon` applies to the layer problems and
    /// defaults to 0.01 (`layer`) or 0.1 (`interior-layer`).
    pub fn parse(name: &str, epsilon: Option<f64>) -> Result<Benchmark> {
        let b = match name {
            "lshape" => Benchmark::LShape,
            "kellogg1" => Benchmark::Kellogg(KelloggCase::One),
            "kellogg2" => Benchmark::Kellogg(KelloggCase::Two),
            "layer" => Benchmark::Layer {
                epsilon: epsilon.unwrap_or(0.01),
            },
            "interior-layer" => Benchmark::InteriorLayer {
                epsilon: epsilon.unwrap_or(0.1),
            },
            other => return Err(Error::UnknownBenchmark(other.to_string())),
        };
        if let Benchmark::Layer { epsilon } | Benchmark::InteriorLayer { epsilon } = b {
            if !(epsilon > 0.0 && epsilon.is_finite()) {
                return Err(Error::UnknownBenchmark(format!("{name} with epsilon = {epsilon}")));
            }
        }
        Ok(b)
    }

    pub fn names() -> &'static [&'static str] {
        &["lshape", "kellogg1", "kellogg2", "layer", "interior-layer"]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Benchmark::LShape => "lshape",
            Benchmark::Kellogg(KelloggCase::One) => "kellogg1",
            Benchmark::Kellogg(KelloggCase::Two) => "kellogg2",
            Benchmark::Layer { .. } => "layer",
            Benchmark::InteriorLayer { .. } => "interior-layer",
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            Benchmark::Layer { epsilon } | Benchmark::InteriorLayer { epsilon } => Some(epsilon),
            _ => None,
        }
    }

    /// Default Dörfler parameter for the experiment.
    pub fn default_theta(&self) -> f64 {
        match self {
            Benchmark::LShape => 0.5,
            Benchmark::Kellogg(KelloggCase::One) => 0.7,
            Benchmark::Kellogg(KelloggCase::Two) => 0.94,
            Benchmark::Layer { .. } => 0.5,
            Benchmark::InteriorLayer { .. } => 0.5,
        }
    }

    pub fn spec(&self) -> ProblemSpec {
        match *self {
            Benchmark::LShape => lshape(),
            Benchmark::Kellogg(case) => kellogg(case),
            Benchmark::Layer { epsilon } => layer(epsilon),
            Benchmark::InteriorLayer { epsilon } => interior_layer(epsilon),
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.epsilon() {
            Some(eps) => write!(f, "{} (epsilon = {eps})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

fn pure_diffusion(s: f64) -> ElementData {
    ElementData {
        diffusion: Tensor2::isotropic(s),
        velocity: Velocity::constant([0.0, 0.0]),
        reaction: 0.0,
    }
}

fn lshape() -> ProblemSpec {
    let alpha = 2.0 / 3.0;
    let p: super::ScalarFn = Arc::new(move |x| singular(x, alpha, 1.0, 0.0).0);
    ProblemSpec {
        name: "lshape".into(),
        domain: Domain::LShape,
        resolution: 1,
        coefficients: Arc::new(|_| pure_diffusion(1.0)),
        source: Arc::new(|_| 0.0),
        dirichlet: p.clone(),
        exact: Some(ExactSolution {
            p,
            grad_p: Arc::new(move |x| singular(x, alpha, 1.0, 0.0).1),
            u: Arc::new(move |x| {
                let g = singular(x, alpha, 1.0, 0.0).1;
                [-g[0], -g[1]]
            }),
            div_u: Arc::new(|_| 0.0),
        }),
    }
}

fn kellogg(case: KelloggCase) -> ProblemSpec {
    let d = case.data();
    let eval = move |x: Point| {
        let i = quadrant(x);
        singular(x, d.alpha, d.a[i], d.b[i])
    };
    let p: super::ScalarFn = Arc::new(move |x| eval(x).0);
    ProblemSpec {
        name: match case {
            KelloggCase::One => "kellogg1".into(),
            KelloggCase::Two => "kellogg2".into(),
        },
        domain: Domain::Square,
        resolution: 1,
        coefficients: Arc::new(move |x| pure_diffusion(d.s[quadrant(x)])),
        source: Arc::new(|_| 0.0),
        dirichlet: p.clone(),
        exact: Some(ExactSolution {
            p,
            grad_p: Arc::new(move |x| eval(x).1),
            u: Arc::new(move |x| {
                let s = d.s[quadrant(x)];
                let g = eval(x).1;
                [-s * g[0], -s * g[1]]
            }),
            div_u: Arc::new(|_| 0.0),
        }),
    }
}

fn layer(eps: f64) -> ProblemSpec {
    let w = [1.0, 1.0];
    // with p = X(x) Y(y): -eps X'' + X' = 1, so f = X + Y
    let source: super::ScalarFn = Arc::new(move |x: Point| layer_profile(x[0], eps).0 + layer_profile(x[1], eps).0);
    let grad = move |x: Point| {
        let (vx, dx, _) = layer_profile(x[0], eps);
        let (vy, dy, _) = layer_profile(x[1], eps);
        [dx * vy, vx * dy]
    };
    ProblemSpec {
        name: "layer".into(),
        domain: Domain::UnitSquare,
        resolution: 1,
        coefficients: Arc::new(move |_| ElementData {
            diffusion: Tensor2::isotropic(eps),
            velocity: Velocity::constant(w),
            reaction: 0.0,
        }),
        source,
        dirichlet: Arc::new(|_| 0.0),
        exact: Some(ExactSolution {
            p: Arc::new(move |x| layer_profile(x[0], eps).0 * layer_profile(x[1], eps).0),
            grad_p: Arc::new(grad),
            u: Arc::new(move |x| {
                let g = grad(x);
                [-eps * g[0], -eps * g[1]]
            }),
            div_u: Arc::new(move |x| {
                let (vx, _, ddx) = layer_profile(x[0], eps);
                let (vy, _, ddy) = layer_profile(x[1], eps);
                -eps * (ddx * vy + vx * ddy)
            }),
        }),
    }
}

fn interior_layer(eps: f64) -> ProblemSpec {
    ProblemSpec {
        name: "interior-layer".into(),
        domain: Domain::Square,
        resolution: 1,
        coefficients: Arc::new(move |_| ElementData {
            diffusion: Tensor2::isotropic(eps),
            velocity: Velocity::constant([2.0, 1.0]),
            reaction: 0.0,
        }),
        source: Arc::new(|_| 0.0),
        // 100 on the right and bottom sides, 0 on the left and top sides
        dirichlet: Arc::new(|x: Point| {
            if x[0] > 1.0 - 1e-12 || x[1] < -1.0 + 1e-12 {
                100.0
            } else {
                0.0
            }
        }),
        exact: None,
    }
}
