//! Bounding-box sub-mesh around the curved surface.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{FaceNeighbor, Mesh, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl BoundingBox {
    pub fn contains_strict(&self, x: &Vec3) -> bool {
        (0..3).all(|k| x[k] > self.lo[k] && x[k] < self.hi[k])
    }

    pub fn contains(&self, x: &Vec3, tol: f64) -> bool {
        (0..3).all(|k| x[k] >= self.lo[k] - tol && x[k] <= self.hi[k] + tol)
    }
}

/// Boundary class of a sub-mesh face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubFaceKind {
    /// On the object surface (displacement prescribed).
    Surface,
    /// Cut by the box or on an untreated outer boundary (held fixed).
    Cut,
    /// On a symmetry wall (sliding).
    Symmetry(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubFace {
    /// Local element index within the sub-mesh.
    pub element: usize,
    pub face: usize,
    pub kind: SubFaceKind,
}

#[derive(Clone, Debug)]
pub struct SubMesh {
    pub bbox: BoundingBox,
    /// Parent element index of each sub-mesh element, ascending.
    pub elements: Vec<usize>,
    /// Sub-mesh index of each parent element, if included.
    pub local_of: Vec<Option<usize>>,
    /// Parent vertex ids touched by the sub-mesh, ascending.
    pub vertices: Vec<usize>,
    pub faces: Vec<SubFace>,
}

impl SubMesh {
    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn count(&self, pred: impl Fn(&SubFaceKind) -> bool) -> usize {
        self.faces.iter().filter(|f| pred(&f.kind)).count()
    }
}

/// Select every tet with at least one vertex strictly inside `bbox` and
/// classify the boundary of the selection.
pub fn extract_submesh(mesh: &Mesh, bbox: BoundingBox, surface_tag: &str, symmetry_tags: &[String]) -> Result<SubMesh> {
    if !mesh.has_tag(surface_tag) {
        return Err(Error::Config(format!("surface tag '{surface_tag}' not found in mesh")));
    }
    let mut local_of = vec![None; mesh.n_elements()];
    let mut elements = Vec::new();
    for (k, tet) in mesh.tets.iter().enumerate() {
        if tet.iter().any(|&v| bbox.contains_strict(&mesh.vertices[v])) {
            local_of[k] = Some(elements.len());
            elements.push(k);
        }
    }
    if elements.is_empty() {
        return Err(Error::Config("bounding box selects no elements".into()));
    }
    let mut vertices: Vec<usize> = elements.iter().flat_map(|&k| mesh.tets[k]).collect();
    vertices.sort_unstable();
    vertices.dedup();

    let mut faces = Vec::new();
    for (local, &k) in elements.iter().enumerate() {
        for f in 0..4 {
            let kind = match mesh.neighbors[k][f] {
                FaceNeighbor::Interior { element, .. } => {
                    if local_of[element].is_some() {
                        continue;
                    }
                    SubFaceKind::Cut
                }
                FaceNeighbor::Boundary { index } => {
                    let tag = &mesh.boundary_faces[index].tag;
                    if tag == surface_tag {
                        SubFaceKind::Surface
                    } else if symmetry_tags.contains(tag) {
                        SubFaceKind::Symmetry(tag.clone())
                    } else {
                        SubFaceKind::Cut
                    }
                }
            };
            faces.push(SubFace {
                element: local,
                face: f,
                kind,
            });
        }
    }
    if !faces.iter().any(|f| f.kind == SubFaceKind::Surface) {
        return Err(Error::Config(format!(
            "bounding box contains no faces tagged '{surface_tag}'"
        )));
    }
    Ok(SubMesh {
        bbox,
        elements,
        local_of,
        vertices,
        faces,
    })
}
