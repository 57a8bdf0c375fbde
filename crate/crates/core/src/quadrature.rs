//! Quadrature rules on triangles and edges.
//!
//! Triangle rules are stored in barycentric form with weights summing to one,
//! so `sum w_i f(x_i) * |K|` approximates the integral over `K`.

use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct TriangleRule {
    /// Barycentric coordinates of each point.
    pub points: Vec<[f64; 3]>,
    /// Weights normalised to sum to one.
    pub weights: Vec<f64>,
}

impl TriangleRule {
    /// Seven-point rule exact for polynomials of degree five.
    pub fn seven_point() -> Self {
        let s15 = 15f64.sqrt();
        let a = (6.0 - s15) / 21.0;
        let b = (6.0 + s15) / 21.0;
        let wa = (155.0 - s15) / 1200.0;
        let wb = (155.0 + s15) / 1200.0;
        let third = 1.0 / 3.0;
        TriangleRule {
            points: vec![
                [third, third, third],
                [a, a, 1.0 - 2.0 * a],
                [a, 1.0 - 2.0 * a, a],
                [1.0 - 2.0 * a, a, a],
                [b, b, 1.0 - 2.0 * b],
                [b, 1.0 - 2.0 * b, b],
                [1.0 - 2.0 * b, b, b],
            ],
            weights: vec![0.225, wa, wa, wa, wb, wb, wb],
        }
    }

    /// Conical product of Gauss-Legendre rules with `n` points per direction,
    /// exact for polynomials of degree `2n - 2`.
    pub fn collapsed_gauss(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut w = Vec::with_capacity(n * n);
        for i in 0..n {
            // map [-1,1] -> [0,1]
            let s = 0.5 * (nodes[i] + 1.0);
            let ws = 0.5 * weights[i];
            for j in 0..n {
                let t = 0.5 * (nodes[j] + 1.0);
                let wt = 0.5 * weights[j];
                // Duffy: (s, t) in unit square -> (l1, l2) = (s, (1 - s) t)
                let l1 = s;
                let l2 = (1.0 - s) * t;
                points.push([1.0 - l1 - l2, l1, l2]);
                // Jacobian (1 - s), reference area 1/2
                w.push(2.0 * ws * wt * (1.0 - s));
            }
        }
        TriangleRule { points, weights: w }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Physical points for the triangle with the given corners.
    pub fn map(&self, corners: &[[f64; 2]; 3]) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
        let c = *corners;
        self.points.iter().zip(&self.weights).map(move |(l, &w)| {
            (
                [
                    l[0] * c[0][0] + l[1] * c[1][0] + l[2] * c[2][0],
                    l[0] * c[0][1] + l[1] * c[1][1] + l[2] * c[2][1],
                ],
                w,
            )
        })
    }

    /// Integral of `f` over the triangle.
    pub fn integrate(&self, corners: &[[f64; 2]; 3], area: f64, mut f: impl FnMut([f64; 2]) -> f64) -> f64 {
        self.map(corners).map(|(x, w)| w * f(x)).sum::<f64>() * area
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss rule on `[0, 1]` with `n` points: (parameter, weight) pairs.
pub fn edge_gauss(n: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    x.iter().zip(&w).map(|(&x, &w)| (0.5 * (x + 1.0), 0.5 * w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monomial_exact(p: u32, q: u32) -> f64 {
        // integral over reference triangle (0,0),(1,0),(0,1) of x^p y^q = p! q! / (p+q+2)!
        let fact = |n: u32| (1..=n).map(|k| k as f64).product::<f64>();
        fact(p) * fact(q) / fact(p + q + 2)
    }

    fn check_degree(rule: &TriangleRule, deg: u32) {
        let corners = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        for p in 0..=deg {
            for q in 0..=(deg - p) {
                let got = rule.integrate(&corners, 0.5, |x| x[0].powi(p as i32) * x[1].powi(q as i32));
                let want = monomial_exact(p, q);
                assert!((got - want).abs() < 1e-14, "x^{p} y^{q}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn seven_point_is_degree_five() {
        let rule = TriangleRule::seven_point();
        assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        check_degree(&rule, 5);
        let corners = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let got = rule.integrate(&corners, 0.5, |x| x[0].powi(6));
        assert!((got - monomial_exact(6, 0)).abs() > 1e-8);
    }

    #[test]
    fn collapsed_gauss_degree() {
        check_degree(&TriangleRule::collapsed_gauss(6), 10);
    }

    #[test]
    fn edge_rules() {
        for n in 1..6 {
            let r = edge_gauss(n);
            for d in 0..(2 * n) {
                let got: f64 = r.iter().map(|(t, w)| w * t.powi(d as i32)).sum();
                assert!((got - 1.0 / (d as f64 + 1.0)).abs() < 1e-14);
            }
        }
    }
}
