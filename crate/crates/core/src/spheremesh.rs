//! Subdivided icosahedra whose vertices are the ray directions.
//!
//! Each refinement step inserts one vertex at the normalized centroid of
//! every face and then flips every pre-existing edge, so each face becomes
//! three and the vertex count grows by the face count:
//! 12, 32, 92, 272, 812, 2432, 7292, ... Without the flip, the 30 original
//! icosahedron edges would survive at every level as very long ray
//! adjacencies.

use std::collections::HashMap;
use std::fmt::Write;

use crate::geom::{add, cross, dot, normalize, Vec3};
use crate::{Error, Result};

/// Highest level [`mesh_at_level`] builds (21872 vertices).
pub const MAX_LEVEL: usize = 7;

// sign-test slack for directions lying on an edge
const EDGE_EPS: f64 = 1e-12;

/// Triangulated unit sphere. Faces are wound counter-clockwise seen from
/// outside.
#[derive(Clone, Debug)]
pub struct IcoMesh {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    level: usize,
    /// `face_neighbors[f][e]` is the face across edge `e` (`v[e] -> v[e+1]`).
    face_neighbors: Vec<[usize; 3]>,
    vertex_faces: Vec<Vec<usize>>,
}

impl IcoMesh {
    fn from_parts(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>, level: usize) -> Self {
        let mut directed = HashMap::with_capacity(faces.len() * 3);
        for (f, face) in faces.iter().enumerate() {
            for e in 0..3 {
                directed.insert((face[e], face[(e + 1) % 3]), f);
            }
        }
        let face_neighbors = faces
            .iter()
            .map(|face| {
                std::array::from_fn(|e| {
                    directed[&(face[(e + 1) % 3], face[e])]
                })
            })
            .collect();
        let mut vertex_faces = vec![Vec::new(); vertices.len()];
        for (f, face) in faces.iter().enumerate() {
            for &v in face {
                vertex_faces[v].push(f);
            }
        }
        Self { vertices, faces, level, face_neighbors, vertex_faces }
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Undirected edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<_> = self
            .faces
            .iter()
            .flat_map(|f| (0..3).map(move |e| (f[e].min(f[(e + 1) % 3]), f[e].max(f[(e + 1) % 3]))))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// Wavefront OBJ text (1-based `v`/`f` records).
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# icosphere level {}", self.level).unwrap();
        for v in &self.vertices {
            writeln!(out, "v {} {} {}", v[0], v[1], v[2]).unwrap();
        }
        for f in &self.faces {
            writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
        }
        out
    }

    /// Edge sign tests of `dir` against face `f`: `dir · (v_e × v_{e+1})`.
    /// All three are non-negative iff the gnomonic projection of `dir`
    /// falls inside the face.
    pub fn edge_signs(&self, f: usize, dir: Vec3) -> [f64; 3] {
        let [a, b, c] = self.faces[f].map(|v| self.vertices[v]);
        [dot(dir, cross(a, b)), dot(dir, cross(b, c)), dot(dir, cross(c, a))]
    }

    fn contains(&self, f: usize, dir: Vec3) -> bool {
        self.edge_signs(f, dir).iter().all(|&s| s >= -EDGE_EPS)
    }

    /// Same as [`locate_triangle`], starting the search at face `hint`.
    /// Coherent queries (neighbouring voxels) should pass the previous result.
    pub fn locate_from(&self, dir: Vec3, hint: usize) -> (usize, [f64; 3]) {
        let mut f = hint.min(self.faces.len() - 1);
        for _ in 0..self.faces.len() {
            let s = self.edge_signs(f, dir);
            let (worst, worst_sign) = s
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (e, v)| if v < acc.1 { (e, v) } else { acc });
            if worst_sign >= -EDGE_EPS {
                let f = if worst_sign <= EDGE_EPS { self.lowest_containing(f, dir) } else { f };
                return (f, self.barycentric(f, dir));
            }
            f = self.face_neighbors[f][worst];
        }
        let f = self.scan(dir);
        (f, self.barycentric(f, dir))
    }

    /// Lowest-index face around `f` containing `dir` (ties on edges and
    /// vertices).
    fn lowest_containing(&self, f: usize, dir: Vec3) -> usize {
        self.faces[f]
            .iter()
            .flat_map(|&v| self.vertex_faces[v].iter().copied())
            .filter(|&g| self.contains(g, dir))
            .min()
            .unwrap_or(f)
    }

    fn scan(&self, dir: Vec3) -> usize {
        (0..self.faces.len())
            .find(|&f| self.contains(f, dir))
            .unwrap_or_else(|| {
                // numerically lost: take the least-violating face
                (0..self.faces.len())
                    .map(|f| (f, self.edge_signs(f, dir).into_iter().fold(f64::INFINITY, f64::min)))
                    .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
                    .0
            })
    }

    /// Gnomonic barycentric weights of `dir` on face `f`, clamped to be
    /// non-negative and normalized to sum to one.
    pub fn barycentric(&self, f: usize, dir: Vec3) -> [f64; 3] {
        let [a, b, c] = self.faces[f].map(|v| self.vertices[v]);
        let det = dot(a, cross(b, c));
        let raw = [dot(dir, cross(b, c)) / det, dot(dir, cross(c, a)) / det, dot(dir, cross(a, b)) / det]
            .map(|w| w.max(0.0));
        let sum: f64 = raw.iter().sum();
        raw.map(|w| w / sum)
    }
}

/// The regular icosahedron: 12 vertices, 20 faces, 30 edges.
pub fn build_icosahedron() -> IcoMesh {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let raw: [Vec3; 12] = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let vertices: Vec<Vec3> = raw.iter().map(|&v| normalize(v)).collect();
    let mut faces = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for f in &mut faces {
        let [a, b, c] = f.map(|v| vertices[v]);
        if dot(a, cross(b, c)) < 0.0 {
            f.swap(1, 2);
        }
    }
    IcoMesh::from_parts(vertices, faces, 0)
}

/// One refinement step: `V' = V + F`, `F' = 3F`.
///
/// New vertices (normalized face centroids) are appended in face order.
/// Every old edge `a -> b` between faces `f` and `g` is replaced by the
/// edge between their centroids, giving triangles `(a, m_g, m_f)` and
/// `(b, m_f, m_g)`, emitted in face order then edge order.
pub fn subdivide_centroid(mesh: &IcoMesh) -> IcoMesh {
    let base = mesh.vertices.len();
    let mut vertices = mesh.vertices.clone();
    vertices.extend(mesh.faces.iter().map(|f| {
        let [a, b, c] = f.map(|v| mesh.vertices[v]);
        normalize(add(add(a, b), c))
    }));
    let mut faces = Vec::with_capacity(mesh.faces.len() * 3);
    for (f, face) in mesh.faces.iter().enumerate() {
        for e in 0..3 {
            let g = mesh.face_neighbors[f][e];
            if f < g {
                let (a, b) = (face[e], face[(e + 1) % 3]);
                let (mf, mg) = (base + f, base + g);
                faces.push([a, mg, mf]);
                faces.push([b, mf, mg]);
            }
        }
    }
    IcoMesh::from_parts(vertices, faces, mesh.level + 1)
}

/// The icosahedron refined `level` times.
pub fn mesh_at_level(level: usize) -> Result<IcoMesh> {
    if level > MAX_LEVEL {
        return Err(Error::MeshLevelTooLarge(level));
    }
    let mut mesh = build_icosahedron();
    for _ in 0..level {
        mesh = subdivide_centroid(&mesh);
    }
    Ok(mesh)
}

/// Vertex count after `level` refinements.
pub fn vertex_count_at_level(level: usize) -> usize {
    // V_k = V_{k-1} + 20 * 3^(k-1)
    (0..level).fold(12, |v, k| v + 20 * 3usize.pow(k as u32))
}

/// Sorted, deduplicated neighbour lists derived from the face edges.
pub fn vertex_adjacency(mesh: &IcoMesh) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); mesh.vertex_count()];
    for (i, j) in mesh.edges() {
        adj[i].push(j);
        adj[j].push(i);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

/// Face whose gnomonic projection contains `dir` and the barycentric
/// weights of `dir` on it. On shared edges the lowest face index wins.
pub fn locate_triangle(mesh: &IcoMesh, dir: Vec3) -> (usize, [f64; 3]) {
    mesh.locate_from(dir, 0)
}
