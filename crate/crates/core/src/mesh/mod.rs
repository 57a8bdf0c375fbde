//! Conforming triangulations with newest-vertex bisection.
//!
//! Triangles are stored counterclockwise with the newest vertex first, so the
//! refinement edge of every triangle is its local edge 0 (opposite vertex 0).
//! Local edge `i` is the edge opposite local vertex `i`.

mod refine;
mod vtk;

pub use vtk::write_vtk;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Marker for the missing second neighbour of a boundary edge.
pub const NO_TRIANGLE: usize = usize::MAX;

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub x: f64,
    pub y: f64,
}

impl Vertex {
    pub fn point(&self) -> Point {
        [self.x, self.y]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Endpoints with `vertices[0] < vertices[1]`.
    pub vertices: [usize; 2],
    /// Adjacent triangles; the normal points out of `triangles[0]`.
    /// `triangles[1]` is [`NO_TRIANGLE`] on the boundary.
    pub triangles: [usize; 2],
    /// Fixed unit normal.
    pub normal: Point,
    pub length: f64,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.triangles[1] == NO_TRIANGLE
    }

    /// The edge patch: the one or two triangles sharing this edge.
    pub fn patch(&self) -> &[usize] {
        if self.is_boundary() {
            &self.triangles[..1]
        } else {
            &self.triangles[..]
        }
    }

    /// Unit tangent `(-n_2, n_1)`.
    pub fn tangent(&self) -> Point {
        [-self.normal[1], self.normal[0]]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triangle {
    /// Counterclockwise; vertex 0 is the newest vertex.
    pub vertices: [usize; 3],
    /// `edges[i]` is opposite `vertices[i]`.
    pub edges: [usize; 3],
    pub generation: u32,
    /// Index of the initial-mesh triangle containing this one.
    pub ancestor: usize,
    /// Index of the triangle in the mesh this one was refined from.
    pub parent: usize,
    pub area: f64,
}

impl Triangle {
    /// Local index of the refinement edge.
    pub const REFINEMENT_EDGE: usize = 0;

    /// Mesh size `|K|^{1/2}`.
    pub fn size(&self) -> f64 {
        self.area.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `(0,1)^2`
    UnitSquare,
    /// `(-1,1)^2`
    Square,
    /// `(-1,1)x(0,1) u (-1,0)x(-1,0)`
    LShape,
}

impl Domain {
    pub fn area(self) -> f64 {
        match self {
            Domain::UnitSquare => 1.0,
            Domain::Square => 4.0,
            Domain::LShape => 3.0,
        }
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit-square" => Ok(Domain::UnitSquare),
            "square" => Ok(Domain::Square),
            "lshape" | "l-shape" => Ok(Domain::LShape),
            other => Err(Error::UnknownDomain(other.to_string())),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::UnitSquare => "unit-square",
            Domain::Square => "square",
            Domain::LShape => "lshape",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    triangles: Vec<Triangle>,
    /// Corners of the initial triangles, indexed by ancestor id.
    roots: Vec<[Point; 3]>,
    level: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct RawTriangle {
    pub vertices: [usize; 3],
    pub generation: u32,
    pub ancestor: usize,
    pub parent: usize,
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Mesh {
    /// Builds an initial mesh from raw triangles. Orientation is normalised to
    /// counterclockwise and the longest edge becomes the refinement edge.
    pub fn new(points: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Mesh> {
        let mut raw = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= points.len() {
                    return Err(Error::InvalidVertex { id: v, len: points.len() });
                }
            }
            let mut v = *tri;
            if signed_area(points[v[0]], points[v[1]], points[v[2]]) < 0.0 {
                v.swap(1, 2);
            }
            // rotate so vertex 0 is opposite the longest edge (first on ties)
            let len = |i: usize| dist(points[v[(i + 1) % 3]], points[v[(i + 2) % 3]]);
            let mut best = 0;
            for i in 1..3 {
                if len(i) > len(best) * (1.0 + 1e-12) {
                    best = i;
                }
            }
            v.rotate_left(best);
            raw.push(RawTriangle {
                vertices: v,
                generation: 0,
                ancestor: t,
                parent: t,
            });
        }
        let roots = raw
            .iter()
            .map(|r| r.vertices.map(|v| points[v]))
            .collect();
        let vertices = points.into_iter().map(|[x, y]| Vertex { x, y }).collect();
        Mesh::assemble(vertices, raw, roots, 0)
    }

    pub(crate) fn assemble(
        vertices: Vec<Vertex>,
        raw: Vec<RawTriangle>,
        roots: Vec<[Point; 3]>,
        level: usize,
    ) -> Result<Mesh> {
        for v in &vertices {
            debug_assert!(v.x.is_finite() && v.y.is_finite());
        }
        let mut edges: Vec<Edge> = Vec::with_capacity(raw.len() * 3 / 2 + 8);
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::with_capacity(raw.len() * 2);
        let mut triangles = Vec::with_capacity(raw.len());
        for (t, r) in raw.iter().enumerate() {
            let p = r.vertices.map(|v| vertices[v].point());
            let area = signed_area(p[0], p[1], p[2]);
            let diam = dist(p[0], p[1]).max(dist(p[1], p[2])).max(dist(p[2], p[0]));
            if !(area > 1e-14 * diam * diam) {
                return Err(Error::DegenerateTriangle(t));
            }
            let mut local = [0usize; 3];
            for i in 0..3 {
                let a = r.vertices[(i + 1) % 3];
                let b = r.vertices[(i + 2) % 3];
                let key = (a.min(b), a.max(b));
                match lookup.get(&key) {
                    Some(&e) => {
                        if edges[e].triangles[1] != NO_TRIANGLE {
                            return Err(Error::NonConforming(key.0, key.1));
                        }
                        edges[e].triangles[1] = t;
                        local[i] = e;
                    }
                    None => {
                        let (pa, pb) = (vertices[a].point(), vertices[b].point());
                        let length = dist(pa, pb);
                        // outward for a counterclockwise triangle traversing a -> b
                        let normal = [(pb[1] - pa[1]) / length, -(pb[0] - pa[0]) / length];
                        let id = edges.len();
                        edges.push(Edge {
                            vertices: [key.0, key.1],
                            triangles: [t, NO_TRIANGLE],
                            normal,
                            length,
                        });
                        lookup.insert(key, id);
                        local[i] = id;
                    }
                }
            }
            triangles.push(Triangle {
                vertices: r.vertices,
                edges: local,
                generation: r.generation,
                ancestor: r.ancestor,
                parent: r.parent,
                area,
            });
        }
        Ok(Mesh {
            vertices,
            edges,
            triangles,
            roots,
            level,
        })
    }

    /// Initial mesh of a predefined domain: a criss-cross ("union jack")
    /// pattern of right isosceles triangles whose diagonals meet at the
    /// domain's centre (or re-entrant corner). `resolution = 1` gives 8
    /// triangles on the squares and 6 on the L-shape.
    pub fn build_initial(domain: Domain, resolution: usize) -> Result<Mesh> {
        let r = resolution.max(1);
        let n = 2 * r;
        let (origin, h) = match domain {
            Domain::UnitSquare => ([0.0, 0.0], 1.0 / n as f64),
            Domain::Square | Domain::LShape => ([-1.0, -1.0], 1.0 / r as f64),
        };
        let include = |i: usize, j: usize| match domain {
            // drop the fourth quadrant
            Domain::LShape => !(i >= r && j < r),
            _ => true,
        };
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut points = Vec::new();
        let mut vid = |i: usize, j: usize, points: &mut Vec<Point>| {
            *index.entry((i, j)).or_insert_with(|| {
                points.push([origin[0] + i as f64 * h, origin[1] + j as f64 * h]);
                points.len() - 1
            })
        };
        let mut tris = Vec::new();
        for j in 0..n {
            for i in 0..n {
                if !include(i, j) {
                    continue;
                }
                let p00 = vid(i, j, &mut points);
                let p10 = vid(i + 1, j, &mut points);
                let p01 = vid(i, j + 1, &mut points);
                let p11 = vid(i + 1, j + 1, &mut points);
                if (i + j) % 2 == 0 {
                    tris.push([p00, p10, p11]);
                    tris.push([p00, p11, p01]);
                } else {
                    tris.push([p00, p10, p01]);
                    tris.push([p10, p11, p01]);
                }
            }
        }
        Mesh::new(points, tris)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Refinement level `k` (number of `refine` calls since the initial mesh).
    pub fn level(&self) -> usize {
        self.level
    }

    /// Corners of initial triangle `ancestor`.
    pub fn root(&self, ancestor: usize) -> &[Point; 3] {
        &self.roots[ancestor]
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        self.triangles[t].vertices.map(|v| self.vertices[v].point())
    }

    pub fn centroid(&self, t: usize) -> Point {
        let c = self.corners(t);
        [
            (c[0][0] + c[1][0] + c[2][0]) / 3.0,
            (c[0][1] + c[1][1] + c[2][1]) / 3.0,
        ]
    }

    /// `+1` if the normal of local edge `i` of triangle `t` points out of `t`.
    pub fn edge_sign(&self, t: usize, i: usize) -> f64 {
        if self.edges[self.triangles[t].edges[i]].triangles[0] == t {
            1.0
        } else {
            -1.0
        }
    }

    pub fn total_area(&self) -> f64 {
        self.triangles.iter().map(|t| t.area).sum()
    }

    /// Interior angles of triangle `t`, at each local vertex.
    pub fn angles(&self, t: usize) -> [f64; 3] {
        let c = self.corners(t);
        let mut out = [0.0; 3];
        for i in 0..3 {
            let a = c[i];
            let b = c[(i + 1) % 3];
            let d = c[(i + 2) % 3];
            let u = [b[0] - a[0], b[1] - a[1]];
            let w = [d[0] - a[0], d[1] - a[1]];
            let cross = u[0] * w[1] - u[1] * w[0];
            let dot = u[0] * w[0] + u[1] * w[1];
            out[i] = cross.abs().atan2(dot);
        }
        out
    }

    /// Minimum interior angle over all triangles, in radians.
    pub fn shape_regularity(&self) -> f64 {
        (0..self.triangles.len())
            .flat_map(|t| self.angles(t))
            .fold(f64::INFINITY, f64::min)
    }

    /// Triangles sharing an edge with `t`, including `t` itself.
    pub fn element_patch(&self, t: usize) -> Vec<usize> {
        let mut out = vec![t];
        for &e in &self.triangles[t].edges {
            for &k in self.edges[e].patch() {
                if k != t {
                    out.push(k);
                }
            }
        }
        out
    }

    /// All edge patches and element patches.
    pub fn patches(&self) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let edge = self.edges.iter().map(|e| e.patch().to_vec()).collect();
        let elem = (0..self.triangles.len()).map(|t| self.element_patch(t)).collect();
        (edge, elem)
    }

    /// For each vertex, the triangles containing it.
    pub fn vertex_triangles(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in &tri.vertices {
                out[v].push(t);
            }
        }
        out
    }

    /// Boundary segments of the initial mesh.
    fn root_boundary(&self) -> Vec<[Point; 2]> {
        let key = |p: Point| ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64);
        let mut count: HashMap<((i64, i64), (i64, i64)), ([Point; 2], usize)> = HashMap::new();
        for r in &self.roots {
            for i in 0..3 {
                let a = r[(i + 1) % 3];
                let b = r[(i + 2) % 3];
                let (ka, kb) = (key(a), key(b));
                let k = if ka < kb { (ka, kb) } else { (kb, ka) };
                count.entry(k).or_insert(([a, b], 0)).1 += 1;
            }
        }
        count.into_values().filter(|(_, c)| *c == 1).map(|(s, _)| s).collect()
    }

    /// Checks that no hanging nodes exist: every edge with a single adjacent
    /// triangle must lie on the boundary of the initial mesh, and the
    /// triangle areas must add up to the initial area.
    pub fn is_conforming(&self) -> bool {
        let segments = self.root_boundary();
        let on_segment = |p: Point| {
            segments.iter().any(|[a, b]| {
                let l = dist(*a, *b);
                let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
                let t = ((p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1])) / (l * l);
                (cross / l).abs() < 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&t)
            })
        };
        for e in &self.edges {
            if e.is_boundary() {
                let a = self.vertices[e.vertices[0]].point();
                let b = self.vertices[e.vertices[1]].point();
                let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
                if !(on_segment(a) && on_segment(b) && on_segment(m)) {
                    return false;
                }
            }
        }
        let root_area: f64 = self.roots.iter().map(|r| signed_area(r[0], r[1], r[2])).sum();
        (self.total_area() - root_area).abs() <= 1e-12 * root_area
    }
}
