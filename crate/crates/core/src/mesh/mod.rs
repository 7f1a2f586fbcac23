//! Straight-sided tetrahedral meshes: connectivity, boundary tags, geometry checks.

pub mod generate;
pub mod gmsh;
pub mod submesh;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::refelem::FACE_VERTICES;

pub use submesh::{extract_submesh, BoundingBox, SubFaceKind, SubMesh};

pub type Vec3 = [f64; 3];

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryFace {
    pub element: usize,
    pub face: usize,
    pub tag: String,
}

/// An interior face shared by two elements. Local face vertex `k` of side
/// `a` is the same global vertex as local face vertex `perm[k]` of side `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceLink {
    pub a: (usize, usize),
    pub b: (usize, usize),
    pub perm: [usize; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceNeighbor {
    Interior { element: usize, face: usize, link: usize },
    Boundary { index: usize },
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub tets: Vec<[usize; 4]>,
    pub boundary_faces: Vec<BoundaryFace>,
    pub face_links: Vec<FaceLink>,
    pub neighbors: Vec<[FaceNeighbor; 4]>,
}

pub(crate) fn sub3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn signed_volume(x: &[Vec3; 4]) -> f64 {
    dot(sub3(x[1], x[0]), cross(sub3(x[2], x[0]), sub3(x[3], x[0]))) / 6.0
}

/// Global vertex ids of local face `f` of a tet, in local face order.
pub fn face_global(tet: &[usize; 4], f: usize) -> [usize; 3] {
    let fv = FACE_VERTICES[f];
    [tet[fv[0]], tet[fv[1]], tet[fv[2]]]
}

fn sorted3(mut v: [usize; 3]) -> [usize; 3] {
    v.sort_unstable();
    v
}

impl Mesh {
    /// Build a mesh from raw vertices, tets and tagged boundary triangles.
    ///
    /// Negatively oriented tets are reordered; untagged boundary faces get
    /// the tag `"untagged"`.
    pub fn new(vertices: Vec<Vec3>, mut tets: Vec<[usize; 4]>, triangles: &[([usize; 3], String)]) -> Result<Self> {
        for (k, tet) in tets.iter_mut().enumerate() {
            if tet.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::Config(format!("tet {k} references a missing vertex")));
            }
            let x = [vertices[tet[0]], vertices[tet[1]], vertices[tet[2]], vertices[tet[3]]];
            let vol = signed_volume(&x);
            if vol.abs() <= f64::EPSILON * bbox_scale(&x).powi(3) {
                return Err(Error::Config(format!("tet {k} has zero volume")));
            }
            if vol < 0.0 {
                tet.swap(2, 3);
            }
        }
        let mut tag_of: HashMap<[usize; 3], &str> = HashMap::new();
        for (tri, tag) in triangles {
            tag_of.insert(sorted3(*tri), tag.as_str());
        }
        let (face_links, boundary, neighbors) = build_connectivity(&tets)?;
        let mut neighbors = neighbors;
        let boundary_faces: Vec<BoundaryFace> = boundary
            .into_iter()
            .enumerate()
            .map(|(i, (e, f))| {
                neighbors[e][f] = FaceNeighbor::Boundary { index: i };
                let key = sorted3(face_global(&tets[e], f));
                BoundaryFace {
                    element: e,
                    face: f,
                    tag: tag_of
                        .get(&key)
                        .map(|s| s.to_string())
                        .unwrap_or_else(|| "untagged".into()),
                }
            })
            .collect();
        Ok(Mesh {
            vertices,
            tets,
            boundary_faces,
            face_links,
            neighbors,
        })
    }

    pub fn n_elements(&self) -> usize {
        self.tets.len()
    }

    pub fn element_vertices(&self, k: usize) -> [Vec3; 4] {
        let t = self.tets[k];
        [
            self.vertices[t[0]],
            self.vertices[t[1]],
            self.vertices[t[2]],
            self.vertices[t[3]],
        ]
    }

    pub fn volume(&self, k: usize) -> f64 {
        signed_volume(&self.element_vertices(k))
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.n_elements()).map(|k| self.volume(k)).sum()
    }

    /// Area of local face `f` of element `k`.
    pub fn face_area(&self, k: usize, f: usize) -> f64 {
        let g = face_global(&self.tets[k], f);
        let (a, b, c) = (self.vertices[g[0]], self.vertices[g[1]], self.vertices[g[2]]);
        0.5 * norm(cross(sub3(b, a), sub3(c, a)))
    }

    /// Diameter of the inscribed sphere, `6 V / total face area`.
    pub fn inscribed_diameter(&self, k: usize) -> f64 {
        let area: f64 = (0..4).map(|f| self.face_area(k, f)).sum();
        6.0 * self.volume(k) / area
    }

    /// Distinct boundary tags, sorted.
    pub fn tags(&self) -> Vec<String> {
        let mut t: Vec<String> = self.boundary_faces.iter().map(|b| b.tag.clone()).collect();
        t.sort();
        t.dedup();
        t
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.boundary_faces.iter().any(|b| b.tag == tag)
    }
}

fn bbox_scale(x: &[Vec3; 4]) -> f64 {
    let mut s: f64 = 0.0;
    for k in 0..3 {
        let lo = x.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
        let hi = x.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
        s = s.max(hi - lo);
    }
    s
}

type Connectivity = (Vec<FaceLink>, Vec<(usize, usize)>, Vec<[FaceNeighbor; 4]>);

/// Match faces by sorted vertex triples. Returns the interior links, the
/// boundary `(element, face)` pairs in element order, and per-face neighbors.
pub fn build_connectivity(tets: &[[usize; 4]]) -> Result<Connectivity> {
    let mut faces: HashMap<[usize; 3], Vec<(usize, usize)>> = HashMap::with_capacity(2 * tets.len());
    for (e, tet) in tets.iter().enumerate() {
        for f in 0..4 {
            faces.entry(sorted3(face_global(tet, f))).or_default().push((e, f));
        }
    }
    let placeholder = FaceNeighbor::Boundary { index: usize::MAX };
    let mut neighbors = vec![[placeholder; 4]; tets.len()];
    let mut links = Vec::new();
    let mut boundary = Vec::new();
    // Deterministic order: walk elements and faces, not the hash map.
    for (e, tet) in tets.iter().enumerate() {
        for f in 0..4 {
            let key = sorted3(face_global(tet, f));
            let owners = &faces[&key];
            match owners.len() {
                1 => boundary.push((e, f)),
                2 => {
                    let other = if owners[0] == (e, f) { owners[1] } else { owners[0] };
                    if (e, f) < other {
                        let ga = face_global(tet, f);
                        let gb = face_global(&tets[other.0], other.1);
                        let mut perm = [0; 3];
                        for k in 0..3 {
                            perm[k] = gb.iter().position(|&v| v == ga[k]).unwrap();
                        }
                        let link = links.len();
                        links.push(FaceLink {
                            a: (e, f),
                            b: other,
                            perm,
                        });
                        neighbors[e][f] = FaceNeighbor::Interior {
                            element: other.0,
                            face: other.1,
                            link,
                        };
                        neighbors[other.0][other.1] = FaceNeighbor::Interior {
                            element: e,
                            face: f,
                            link,
                        };
                    }
                }
                n => return Err(Error::Nonconforming(format!("face {key:?} shared by {n} elements"))),
            }
        }
    }
    Ok((links, boundary, neighbors))
}
