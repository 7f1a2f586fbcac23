//! Built-in mesh fixtures: single tets, Kuhn-split boxes and cubed-sphere shells.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{face_global, Mesh, Vec3};

/// The reference tetrahedron, all faces tagged `wall`.
pub fn single_tet() -> Mesh {
    let v = vec![
        [-1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ];
    tag_all(v, vec![[0, 1, 2, 3]], "wall")
}

/// The corner tet with unit legs.
pub fn single_tet_unit() -> Mesh {
    let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    tag_all(v, vec![[0, 1, 2, 3]], "wall")
}

/// Two tets sharing the face `z = 0` of the unit corner triangle.
pub fn two_tets() -> Mesh {
    let v = vec![
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.2, 0.3, -0.8],
    ];
    tag_all(v, vec![[0, 1, 2, 3], [0, 2, 1, 4]], "wall")
}

fn tag_all(v: Vec<Vec3>, tets: Vec<[usize; 4]>, tag: &str) -> Mesh {
    let mut m = Mesh::new(v, tets, &[]).expect("valid fixture");
    m.boundary_faces.iter_mut().for_each(|b| b.tag = tag.to_string());
    m
}

/// The six Kuhn tets of cube corner offsets, as index paths from corner 0
/// to corner 7 (bit k of a corner index is the offset along axis k).
const KUHN: [[usize; 4]; 6] = [
    [0, 1, 3, 7],
    [0, 1, 5, 7],
    [0, 2, 3, 7],
    [0, 2, 6, 7],
    [0, 4, 5, 7],
    [0, 4, 6, 7],
];

/// The unit cube split into six tets, faces tagged `wall`.
pub fn cube_six_tets() -> Mesh {
    let mut m = box_mesh([1, 1, 1], [0.0; 3], [1.0; 3]).expect("valid fixture");
    m.boundary_faces.iter_mut().for_each(|b| b.tag = "wall".into());
    m
}

/// Structured box of `n[0] × n[1] × n[2]` cubes, each split into six tets.
/// Boundary faces are tagged `xmin`, `xmax`, `ymin`, `ymax`, `zmin`, `zmax`.
pub fn box_mesh(n: [usize; 3], lo: Vec3, hi: Vec3) -> Result<Mesh> {
    if n.contains(&0) || (0..3).any(|k| hi[k] <= lo[k]) {
        return Err(Error::Config("box mesh needs positive cell counts and extents".into()));
    }
    let id = |i: usize, j: usize, k: usize| i + (n[0] + 1) * (j + (n[1] + 1) * k);
    let mut vertices = Vec::with_capacity((n[0] + 1) * (n[1] + 1) * (n[2] + 1));
    for k in 0..=n[2] {
        for j in 0..=n[1] {
            for i in 0..=n[0] {
                let c = [i, j, k];
                vertices.push(std::array::from_fn(|a| {
                    lo[a] + (hi[a] - lo[a]) * c[a] as f64 / n[a] as f64
                }));
            }
        }
    }
    let mut tets = Vec::with_capacity(6 * n[0] * n[1] * n[2]);
    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                let corner = |b: usize| id(i + (b & 1), j + ((b >> 1) & 1), k + ((b >> 2) & 1));
                for path in KUHN {
                    tets.push(path.map(corner));
                }
            }
        }
    }
    let mut mesh = Mesh::new(vertices, tets, &[])?;
    let names = ["xmin", "xmax", "ymin", "ymax", "zmin", "zmax"];
    let tol = 1e-12 * (0..3).map(|a| hi[a] - lo[a]).fold(0.0, f64::max);
    for b in mesh.boundary_faces.iter_mut() {
        let g = face_global(&mesh.tets[b.element], b.face);
        for a in 0..3 {
            if g.iter().all(|&v| (mesh.vertices[v][a] - lo[a]).abs() < tol) {
                b.tag = names[2 * a].into();
            } else if g.iter().all(|&v| (mesh.vertices[v][a] - hi[a]).abs() < tol) {
                b.tag = names[2 * a + 1].into();
            }
        }
    }
    Ok(mesh)
}

/// Parameters of a cubed-sphere shell around the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellParams {
    /// Cells along each edge of a cube-face patch.
    pub n: usize,
    /// Radial cell layers.
    pub layers: usize,
    pub r_inner: f64,
    pub r_outer: f64,
    /// Keep only `z >= 0`; the cut plane is tagged `symmetry`. Needs even `n`.
    pub half: bool,
}

impl Default for ShellParams {
    fn default() -> Self {
        ShellParams {
            n: 4,
            layers: 4,
            r_inner: 1.0,
            r_outer: 8.0,
            half: false,
        }
    }
}

/// Cubed-sphere shell between `r_inner` and `r_outer` with geometrically
/// graded layers. Faces on the inner sphere are tagged `wall`, on the outer
/// sphere `farfield`, and on the cut plane of a half shell `symmetry`.
///
/// Each patch orders its two tangential axes by increasing global axis so the
/// Kuhn diagonals of neighboring patches coincide on shared faces.
pub fn sphere_shell(p: &ShellParams) -> Result<Mesh> {
    if p.n == 0 || p.layers == 0 || !(p.r_inner > 0.0 && p.r_outer > p.r_inner) {
        return Err(Error::Config("invalid shell parameters".into()));
    }
    if p.half && !p.n.is_multiple_of(2) {
        return Err(Error::Config("half shell needs an even patch resolution".into()));
    }
    let n = p.n as i64;
    let radius = |k: usize| p.r_inner * (p.r_outer / p.r_inner).powf(k as f64 / p.layers as f64);
    let mut ids: HashMap<([i64; 3], usize), usize> = HashMap::new();
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut layer_of: Vec<usize> = Vec::new();
    let mut vertex = |c: [i64; 3], k: usize| -> usize {
        *ids.entry((c, k)).or_insert_with(|| {
            // Equiangular map of cube coordinates in [-n, n] onto the sphere.
            let d: Vec3 = std::array::from_fn(|a| {
                if c[a].abs() == n {
                    c[a].signum() as f64
                } else {
                    (std::f64::consts::FRAC_PI_4 * c[a] as f64 / n as f64).tan()
                }
            });
            let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let r = radius(k);
            vertices.push([r * d[0] / len, r * d[1] / len, r * d[2] / len]);
            layer_of.push(k);
            vertices.len() - 1
        })
    };
    let mut tets = Vec::new();
    for axis in 0..3 {
        let (b, c) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for sign in [-1i64, 1] {
            for i in 0..p.n {
                for j in 0..p.n {
                    for k in 0..p.layers {
                        let cube = |di: usize, dj: usize| {
                            let mut q = [0i64; 3];
                            q[axis] = sign * n;
                            q[b] = 2 * (i + di) as i64 - n;
                            q[c] = 2 * (j + dj) as i64 - n;
                            q
                        };
                        if p.half && (0..4).any(|m| cube(m & 1, m >> 1)[2] < 0) {
                            continue;
                        }
                        let mut corner = [0usize; 8];
                        for (bits, slot) in corner.iter_mut().enumerate() {
                            *slot = vertex(cube(bits & 1, (bits >> 1) & 1), k + ((bits >> 2) & 1));
                        }
                        for path in KUHN {
                            tets.push(path.map(|q| corner[q]));
                        }
                    }
                }
            }
        }
    }
    let mut mesh = Mesh::new(vertices, tets, &[])?;
    for bf in mesh.boundary_faces.iter_mut() {
        let g = face_global(&mesh.tets[bf.element], bf.face);
        bf.tag = if g.iter().all(|&v| layer_of[v] == 0) {
            "wall"
        } else if g.iter().all(|&v| layer_of[v] == p.layers) {
            "farfield"
        } else {
            "symmetry"
        }
        .into();
    }
    Ok(mesh)
}
