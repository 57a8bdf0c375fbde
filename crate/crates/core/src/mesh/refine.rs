use std::collections::{HashMap, HashSet};

use super::{Mesh, RawTriangle, Vertex};
use crate::error::{Error, Result};

type EdgeKey = (usize, usize);

fn key(a: usize, b: usize) -> EdgeKey {
    (a.min(b), a.max(b))
}

#[derive(Debug, Clone)]
struct Node {
    raw: RawTriangle,
    children: Option<[usize; 2]>,
}

impl Node {
    fn refinement_edge(&self) -> EdgeKey {
        let v = self.raw.vertices;
        key(v[1], v[2])
    }
}

/// Working forest used during one `refine` call. Roots are the triangles of
/// the input mesh, at the same indices.
struct Forest {
    vertices: Vec<Vertex>,
    nodes: Vec<Node>,
    midpoints: HashMap<EdgeKey, usize>,
    roots: usize,
}

impl Forest {
    fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = Vec::new();
        for r in 0..self.roots {
            stack.push(r);
            while let Some(n) = stack.pop() {
                match self.nodes[n].children {
                    Some([a, b]) => {
                        stack.push(b);
                        stack.push(a);
                    }
                    None => out.push(n),
                }
            }
        }
        out
    }

    fn midpoint(&mut self, a: usize, b: usize) -> usize {
        let vertices = &mut self.vertices;
        *self.midpoints.entry(key(a, b)).or_insert_with(|| {
            let (pa, pb) = (vertices[a], vertices[b]);
            vertices.push(Vertex {
                x: 0.5 * (pa.x + pb.x),
                y: 0.5 * (pa.y + pb.y),
            });
            vertices.len() - 1
        })
    }

    /// Bisects `n` across its refinement edge, then recursively every child
    /// whose refinement edge is in `split`.
    fn bisect(&mut self, n: usize, split: &HashSet<EdgeKey>) {
        let mut stack = vec![n];
        while let Some(n) = stack.pop() {
            let raw = self.nodes[n].raw;
            let [v0, v1, v2] = raw.vertices;
            let m = self.midpoint(v1, v2);
            let child = |vertices| Node {
                raw: RawTriangle {
                    vertices,
                    generation: raw.generation + 1,
                    ..raw
                },
                children: None,
            };
            let first = self.nodes.len();
            self.nodes.push(child([m, v0, v1]));
            self.nodes.push(child([m, v2, v0]));
            self.nodes[n].children = Some([first, first + 1]);
            for c in [first + 1, first] {
                if split.contains(&self.nodes[c].refinement_edge()) {
                    stack.push(c);
                }
            }
        }
    }

    /// One round of marked bisection with conformity closure.
    fn refine_round(&mut self, targets: &[usize]) {
        let leaves = self.leaves();
        let mut adjacency: HashMap<EdgeKey, Vec<usize>> = HashMap::with_capacity(leaves.len() * 2);
        for &n in &leaves {
            let v = self.nodes[n].raw.vertices;
            for i in 0..3 {
                adjacency.entry(key(v[(i + 1) % 3], v[(i + 2) % 3])).or_default().push(n);
            }
        }
        // closure: a triangle with any split edge must split its refinement edge
        let mut split: HashSet<EdgeKey> = HashSet::new();
        let mut queue: Vec<EdgeKey> = targets.iter().map(|&n| self.nodes[n].refinement_edge()).collect();
        while let Some(e) = queue.pop() {
            if !split.insert(e) {
                continue;
            }
            if let Some(tris) = adjacency.get(&e) {
                for &n in tris {
                    let r = self.nodes[n].refinement_edge();
                    if !split.contains(&r) {
                        queue.push(r);
                    }
                }
            }
        }
        for &n in &leaves {
            if split.contains(&self.nodes[n].refinement_edge()) {
                self.bisect(n, &split);
            }
        }
    }
}

impl Mesh {
    /// Bisects every marked triangle at least `b` times by newest-vertex
    /// bisection, refining further triangles as needed to keep the mesh
    /// conforming. Child triangles record the marked triangle's index in this
    /// mesh as their `parent`.
    pub fn refine(&self, marked: &[usize], b: usize) -> Result<Mesh> {
        if b == 0 {
            return Err(Error::InvalidBisectionCount);
        }
        let len = self.triangles.len();
        if let Some(&id) = marked.iter().find(|&&id| id >= len) {
            return Err(Error::InvalidTriangle { id, len });
        }
        if marked.is_empty() {
            let mut same = self.clone();
            for (t, tri) in same.triangles.iter_mut().enumerate() {
                tri.parent = t;
            }
            return Ok(same);
        }
        let mut forest = Forest {
            vertices: self.vertices.clone(),
            nodes: self
                .triangles
                .iter()
                .enumerate()
                .map(|(t, tri)| Node {
                    raw: RawTriangle {
                        vertices: tri.vertices,
                        generation: tri.generation,
                        ancestor: tri.ancestor,
                        parent: t,
                    },
                    children: None,
                })
                .collect(),
            midpoints: HashMap::new(),
            roots: len,
        };
        let mut is_marked = vec![false; len];
        for &t in marked {
            is_marked[t] = true;
        }
        let mut targets: Vec<usize> = (0..len).filter(|&t| is_marked[t]).collect();
        for round in 0..b {
            if round > 0 {
                targets = forest
                    .leaves()
                    .into_iter()
                    .filter(|&n| is_marked[forest.nodes[n].raw.parent])
                    .collect();
            }
            forest.refine_round(&targets);
        }
        let raw = forest.leaves().into_iter().map(|n| forest.nodes[n].raw).collect();
        Mesh::assemble(forest.vertices, raw, self.roots.clone(), self.level + 1)
    }

    /// Bisects every triangle once.
    pub fn refine_uniform(&self) -> Result<Mesh> {
        let all: Vec<usize> = (0..self.triangles.len()).collect();
        self.refine(&all, 1)
    }
}
