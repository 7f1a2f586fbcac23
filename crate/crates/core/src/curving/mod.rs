//! Curved-element generation: surface projection, elasticity-driven mesh
//! deformation and the resulting curved collocation coordinates.

pub mod elasticity;
pub mod nurbs;
pub mod projection;

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{extract_submesh, norm, sub3, BoundingBox, Mesh, Vec3};
use crate::operators::{compute_mapping, straight_nodes};
use crate::refelem::{modal_basis_eval, ReferenceElement};

pub use elasticity::{solve_elasticity, DeformationField, ElasticMaterial, ElasticityOptions};
pub use nurbs::{parse_nurbs, NurbsSurface};
pub use projection::{closest_point, Projection};

/// Projection of `x` onto the sphere `|y - x0| = r`, as a displacement.
pub fn sphere_displacement(center: &Vec3, radius: f64, x: &Vec3) -> Result<Vec3> {
    let d = sub3(*x, *center);
    let len = norm(d);
    if len < 1e-14 {
        return Err(Error::Domain("point coincides with the sphere center".into()));
    }
    Ok(std::array::from_fn(|k| center[k] + radius * d[k] / len - x[k]))
}

/// `S(alpha*, beta*) - x` for the closest point over the given patches.
pub fn boundary_displacement(patches: &[NurbsSurface], x: &Vec3) -> Result<Vec3> {
    let (_, p) = projection::closest_point_patches(patches, x)?;
    Ok(sub3(p.point, *x))
}

/// Target surface of the curved boundary.
#[derive(Clone, Debug)]
pub enum SurfaceModel {
    Sphere {
        center: Vec3,
        radius: f64,
    },
    Nurbs(Vec<NurbsSurface>),
    /// No displacement; useful for checks.
    Identity,
}

impl SurfaceModel {
    pub fn displacement(&self, x: &Vec3) -> Result<Vec3> {
        match self {
            SurfaceModel::Sphere { center, radius } => sphere_displacement(center, *radius, x),
            SurfaceModel::Nurbs(p) => boundary_displacement(p, x),
            SurfaceModel::Identity => Ok([0.0; 3]),
        }
    }
}

/// Physical collocation coordinates of the curved elements at one degree.
/// Elements without an entry are straight (affine).
#[derive(Clone, Debug, PartialEq)]
pub struct CurvedMesh {
    pub degree: usize,
    pub n_elements: usize,
    pub curved: BTreeMap<usize, Vec<Vec3>>,
}

impl CurvedMesh {
    pub fn straight(mesh: &Mesh, degree: usize) -> Self {
        CurvedMesh {
            degree,
            n_elements: mesh.n_elements(),
            curved: BTreeMap::new(),
        }
    }

    pub fn is_curved(&self, k: usize) -> bool {
        self.curved.contains_key(&k)
    }

    /// Collocation coordinates of element `k` at this mesh's degree.
    pub fn element_nodes(&self, mesh: &Mesh, k: usize, re: &ReferenceElement) -> Vec<Vec3> {
        debug_assert_eq!(re.degree, self.degree);
        match self.curved.get(&k) {
            Some(n) => n.clone(),
            None => straight_nodes(&mesh.element_vertices(k), re),
        }
    }

    /// Re-interpolate the curved elements to another degree using the
    /// Lagrange basis of the current degree.
    pub fn to_degree(&self, from: &ReferenceElement, to: &ReferenceElement) -> Result<CurvedMesh> {
        if from.degree != self.degree {
            return Err(Error::Config("reference element degree mismatch".into()));
        }
        if to.degree == self.degree {
            return Ok(self.clone());
        }
        let interp = modal_basis_eval(from.degree, &to.colloc_nodes)? * &from.inv_vandermonde;
        let curved = self
            .curved
            .iter()
            .map(|(&k, nodes)| {
                let out = (0..to.n_basis)
                    .map(|i| {
                        let mut x = [0.0; 3];
                        for (j, n) in nodes.iter().enumerate() {
                            for c in 0..3 {
                                x[c] += interp[(i, j)] * n[c];
                            }
                        }
                        x
                    })
                    .collect();
                (k, out)
            })
            .collect();
        Ok(CurvedMesh {
            degree: to.degree,
            n_elements: self.n_elements,
            curved,
        })
    }
}

/// Straight collocation nodes plus the solved displacement, for every
/// sub-mesh element. Fails if any curved element has a non-positive
/// Jacobian at a quadrature node.
pub fn curve_mesh(mesh: &Mesh, field: &DeformationField, re: &ReferenceElement) -> Result<CurvedMesh> {
    let same = field.p_fem == re.degree;
    let interp = if same {
        None
    } else {
        Some(modal_basis_eval(field.p_fem, &re.colloc_nodes)? * &field.re.inv_vandermonde)
    };
    let entries: Vec<(usize, Vec<Vec3>, bool)> = field
        .elements
        .par_iter()
        .enumerate()
        .map(|(e, &k)| {
            let mut nodes = straight_nodes(&mesh.element_vertices(k), re);
            for (i, x) in nodes.iter_mut().enumerate() {
                let u = match &interp {
                    None => field.displacement[field.elem_nodes[e][i]],
                    Some(m) => {
                        let mut u = [0.0; 3];
                        for (j, &n) in field.elem_nodes[e].iter().enumerate() {
                            for c in 0..3 {
                                u[c] += m[(i, j)] * field.displacement[n][c];
                            }
                        }
                        u
                    }
                };
                for c in 0..3 {
                    x[c] += u[c];
                }
            }
            let ok = compute_mapping(k, &nodes, re).is_ok();
            (k, nodes, ok)
        })
        .collect();
    let failed: Vec<usize> = entries.iter().filter(|e| !e.2).map(|e| e.0).collect();
    if !failed.is_empty() {
        return Err(Error::CurvingFailed { elements: failed });
    }
    Ok(CurvedMesh {
        degree: re.degree,
        n_elements: mesh.n_elements(),
        curved: entries.into_iter().map(|(k, n, _)| (k, n)).collect(),
    })
}

/// Sub-mesh extraction, boundary displacement, elasticity solve and curved
/// collocation nodes at the degree of `re`.
#[allow(clippy::too_many_arguments)]
pub fn curve_pipeline(
    mesh: &Mesh,
    bbox: BoundingBox,
    surface_tag: &str,
    symmetry_tags: &[String],
    surface: &SurfaceModel,
    material: &ElasticMaterial,
    p_fem: usize,
    re: &ReferenceElement,
    opts: &ElasticityOptions,
) -> Result<(CurvedMesh, DeformationField)> {
    let sub = extract_submesh(mesh, bbox, surface_tag, symmetry_tags)?;
    let g = |x: &Vec3| surface.displacement(x);
    let field = solve_elasticity(mesh, &sub, material, &g, p_fem, opts)?;
    let curved = curve_mesh(mesh, &field, re)?;
    Ok((curved, field))
}
