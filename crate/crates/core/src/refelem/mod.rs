//! Degree-dependent data on the reference tetrahedron
//! `{-1 <= r, s, t; r + s + t <= -1}`.

pub mod basis;
pub mod dump;
pub mod nodes;
pub mod quadrature;

use log::debug;
use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use basis::{modal_basis_eval, n_basis};
pub use nodes::MAX_DEGREE;

pub type Point3 = [f64; 3];

/// Tolerance on barycentric coordinates for "inside the closed tetrahedron".
pub const BARY_TOL: f64 = 1e-12;

/// Reference vertices; vertex `i > 0` is the unit step along axis `i - 1`.
pub const REF_VERTICES: [Point3; 4] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
];

/// Local vertices of each face. Face 0 is `t = -1`, face 1 `s = -1`,
/// face 2 `r + s + t = -1`, face 3 `r = -1`.
pub const FACE_VERTICES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [1, 2, 3], [0, 2, 3]];

/// Area of the standard triangle `(-1,-1), (1,-1), (-1,1)` that face weights sum to.
pub const REF_TRIANGLE_AREA: f64 = 2.0;

pub const REF_VOLUME: f64 = 4.0 / 3.0;

/// Barycentric coordinates with respect to [`REF_VERTICES`].
pub fn barycentric(p: &Point3) -> [f64; 4] {
    [
        -0.5 * (1.0 + p[0] + p[1] + p[2]),
        0.5 * (1.0 + p[0]),
        0.5 * (1.0 + p[1]),
        0.5 * (1.0 + p[2]),
    ]
}

pub fn from_barycentric(l: &[f64; 4]) -> Point3 {
    let mut out = [0.0; 3];
    for (li, v) in l.iter().zip(REF_VERTICES.iter()) {
        for k in 0..3 {
            out[k] += li * v[k];
        }
    }
    out
}

/// Reference-space tangents `dr/dxi1`, `dr/dxi2` of face `f` parameterized
/// over the standard triangle.
pub fn face_tangents(f: usize) -> [Point3; 2] {
    let [a, b, c] = FACE_VERTICES[f];
    let (va, vb, vc) = (REF_VERTICES[a], REF_VERTICES[b], REF_VERTICES[c]);
    [
        [0.5 * (vb[0] - va[0]), 0.5 * (vb[1] - va[1]), 0.5 * (vb[2] - va[2])],
        [0.5 * (vc[0] - va[0]), 0.5 * (vc[1] - va[1]), 0.5 * (vc[2] - va[2])],
    ]
}

/// Outward (non-normalized) reference normal of face `f`.
pub fn face_normal_ref(f: usize) -> Point3 {
    match f {
        0 => [0.0, 0.0, -1.0],
        1 => [0.0, -1.0, 0.0],
        2 => [1.0, 1.0, 1.0],
        _ => [-1.0, 0.0, 0.0],
    }
}

/// Options controlling rule strengths.
#[derive(Clone, Copy, Debug, Default)]
pub struct RefElemOptions {
    /// Override of the volume cubature strength (default `2p + 1`).
    pub cubature_strength: Option<usize>,
    /// Override of the face quadrature strength (default `2p`).
    pub face_strength: Option<usize>,
}

impl RefElemOptions {
    /// Strengths that integrate the volume and surface terms of a constant
    /// flux exactly on degree-`p` isoparametric elements: the cofactor
    /// metrics have degree `2(p - 1)`, so the volume integrand has degree
    /// `3p - 3` and the surface integrand `3p - 2`.
    pub fn metric_exact(p: usize) -> Self {
        let vol = (2 * p + 1).max((3 * p).saturating_sub(3));
        RefElemOptions {
            cubature_strength: Some(vol | 1),
            face_strength: Some((2 * p).max((3 * p).saturating_sub(2))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReferenceElement {
    pub degree: usize,
    pub n_basis: usize,
    pub colloc_nodes: Vec<Point3>,
    /// Integer barycentric lattice index of each collocation node.
    pub lattice: Vec<[usize; 4]>,
    pub cub_nodes: Vec<Point3>,
    pub cub_weights: Vec<f64>,
    /// Triangle barycentrics of the face rule, shared by all four faces.
    pub face_bary: Vec<[f64; 3]>,
    /// Face quadrature nodes, face-major: node `q` of face `f` is `f * n_face + q`.
    pub face_nodes: Vec<Point3>,
    /// Weights on the standard triangle, summing to [`REF_TRIANGLE_AREA`].
    pub face_weights: Vec<f64>,
    pub vandermonde: DMatrix<f64>,
    pub inv_vandermonde: DMatrix<f64>,
    pub cub_vandermonde: DMatrix<f64>,
    pub grad_vandermonde: [DMatrix<f64>; 3],
    pub face_vandermonde: DMatrix<f64>,
    /// `V_cub V^-1`
    pub interp_cub: DMatrix<f64>,
    /// `V_g V^-1`
    pub interp_face: DMatrix<f64>,
    /// `D_r, D_s, D_t` at the cubature nodes.
    pub deriv_cub: [DMatrix<f64>; 3],
    /// `D_r, D_s, D_t` at the face quadrature nodes.
    pub deriv_face: [DMatrix<f64>; 3],
    pub vandermonde_condition: f64,
}

impl ReferenceElement {
    pub fn new(degree: usize) -> Result<Self> {
        Self::with_options(degree, RefElemOptions::default())
    }

    pub fn with_options(degree: usize, opts: RefElemOptions) -> Result<Self> {
        let colloc_nodes = build_colloc_nodes(degree)?;
        let lattice = nodes::lattice(degree);
        let cub_strength = opts.cubature_strength.unwrap_or(2 * degree + 1);
        let (cub_nodes, cub_weights) = build_cubature_strength(cub_strength);
        let face_strength = opts.face_strength.unwrap_or(2 * degree);
        let (face_bary, face_nodes, face_weights) = build_face_quadrature_strength(face_strength);

        let vandermonde = modal_basis_eval(degree, &colloc_nodes)?;
        let svd = vandermonde.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let cond = smax / smin;
        if !cond.is_finite() || smin < 1e-13 * smax {
            return Err(Error::Singular(format!("Vandermonde matrix at degree {degree}")));
        }
        debug!("degree {degree}: Vandermonde condition number {cond:.3e}");
        let inv_vandermonde = vandermonde
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular(format!("Vandermonde matrix at degree {degree}")))?;

        let cub_vandermonde = modal_basis_eval(degree, &cub_nodes)?;
        let grad_vandermonde = basis::grad_modal_basis_eval(degree, &cub_nodes)?;
        let face_vandermonde = modal_basis_eval(degree, &face_nodes)?;
        let grad_face = basis::grad_modal_basis_eval(degree, &face_nodes)?;

        let interp_cub = &cub_vandermonde * &inv_vandermonde;
        let interp_face = &face_vandermonde * &inv_vandermonde;
        let deriv_cub = [
            &grad_vandermonde[0] * &inv_vandermonde,
            &grad_vandermonde[1] * &inv_vandermonde,
            &grad_vandermonde[2] * &inv_vandermonde,
        ];
        let deriv_face = [
            &grad_face[0] * &inv_vandermonde,
            &grad_face[1] * &inv_vandermonde,
            &grad_face[2] * &inv_vandermonde,
        ];

        Ok(ReferenceElement {
            degree,
            n_basis: n_basis(degree),
            colloc_nodes,
            lattice,
            cub_nodes,
            cub_weights,
            face_bary,
            face_nodes,
            face_weights,
            vandermonde,
            inv_vandermonde,
            cub_vandermonde,
            grad_vandermonde,
            face_vandermonde,
            interp_cub,
            interp_face,
            deriv_cub,
            deriv_face,
            vandermonde_condition: cond,
        })
    }

    pub fn n_cub(&self) -> usize {
        self.cub_nodes.len()
    }

    /// Quadrature nodes per face.
    pub fn n_face(&self) -> usize {
        self.face_weights.len()
    }

    /// Collocation nodes lying on face `f`, in node order.
    pub fn face_node_indices(&self, f: usize) -> Vec<usize> {
        let opposite = (0..4).find(|v| !FACE_VERTICES[f].contains(v)).unwrap();
        self.lattice
            .iter()
            .enumerate()
            .filter(|(_, l)| l[opposite] == 0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Warp-and-blend collocation nodes for degree `p`.
pub fn build_colloc_nodes(p: usize) -> Result<Vec<Point3>> {
    nodes::warp_blend_nodes(p)
}

/// Volume cubature exact to degree `2p + 1`.
pub fn build_cubature(p: usize) -> Result<(Vec<Point3>, Vec<f64>)> {
    if p == 0 || p > MAX_DEGREE {
        return Err(Error::Config(format!("unsupported degree {p}")));
    }
    Ok(build_cubature_strength(2 * p + 1))
}

fn build_cubature_strength(strength: usize) -> (Vec<Point3>, Vec<f64>) {
    // Grundmann-Moeller index s is exact to degree 2s + 1.
    let s = strength.saturating_sub(1).div_ceil(2);
    quadrature::grundmann_moeller_tet(s)
}

/// Face quadrature exact to degree `2p`, replicated onto all four faces.
/// Returns `(nodes per face, flattened face-major nodes, weights)`.
pub fn build_face_quadrature(p: usize) -> Result<(Vec<[f64; 3]>, Vec<Point3>, Vec<f64>)> {
    if p == 0 || p > MAX_DEGREE {
        return Err(Error::Config(format!("unsupported degree {p}")));
    }
    Ok(build_face_quadrature_strength(2 * p))
}

fn build_face_quadrature_strength(strength: usize) -> (Vec<[f64; 3]>, Vec<Point3>, Vec<f64>) {
    let rule = quadrature::triangle_rule(strength);
    let mut face_nodes = Vec::with_capacity(4 * rule.bary.len());
    for fv in FACE_VERTICES.iter() {
        for mu in &rule.bary {
            let mut l = [0.0; 4];
            l[fv[0]] = mu[0];
            l[fv[1]] = mu[1];
            l[fv[2]] = mu[2];
            face_nodes.push(from_barycentric(&l));
        }
    }
    let weights = rule.weights.iter().map(|w| w * REF_TRIANGLE_AREA).collect();
    (rule.bary, face_nodes, weights)
}

/// Vandermonde matrix `V_ij = psi_j(nodes_i)` and the derivative matrices
/// `(V_r, V_s, V_t)` at the same nodes.
pub fn vandermonde(p: usize, nodes: &[Point3]) -> Result<(DMatrix<f64>, [DMatrix<f64>; 3])> {
    let v = modal_basis_eval(p, nodes)?;
    let g = basis::grad_modal_basis_eval(p, nodes)?;
    Ok((v, g))
}
