//! Per-element geometric factors and local DG matrices.

use nalgebra::{DMatrix, Matrix3};

use crate::error::{Error, Result};
use crate::mesh::Vec3;
use crate::refelem::{face_normal_ref, face_tangents, ReferenceElement};

/// Determinants at or below this value mark an element as inverted.
pub const MIN_JACOBIAN: f64 = 1e-14;

/// Block length rounded up to a multiple of 16.
pub fn padded_len(n: usize) -> usize {
    16 * n.div_ceil(16)
}

/// Leading dimension for per-element blocks of `n` rows.
pub fn leading_dim(n: usize, padded: bool) -> usize {
    if padded {
        padded_len(n)
    } else {
        n
    }
}

#[derive(Clone, Debug)]
pub struct ElementGeometry {
    pub phys_nodes: Vec<Vec3>,
    /// `det(dx/dr)` at cubature nodes.
    pub jac: Vec<f64>,
    /// `metrics[q][j][i] = d r_j / d x_i` at cubature nodes.
    pub metrics: Vec<[[f64; 3]; 3]>,
    /// Outward unit normals at face quadrature nodes (face-major).
    pub normals: Vec<Vec3>,
    /// Surface Jacobian at face quadrature nodes, relative to the standard triangle.
    pub face_jac: Vec<f64>,
    pub face_metrics: Vec<[[f64; 3]; 3]>,
    /// `det(dx/dr)` at face quadrature nodes.
    pub face_det: Vec<f64>,
}

impl ElementGeometry {
    pub fn min_jac(&self) -> f64 {
        self.jac
            .iter()
            .chain(&self.face_det)
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_jac(&self) -> f64 {
        self.jac
            .iter()
            .chain(&self.face_det)
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn forward_jacobian(d: &[DMatrix<f64>; 3], nodes: &[Vec3], q: usize) -> Matrix3<f64> {
    // a[(i, j)] = d x_i / d r_j
    let mut a = Matrix3::zeros();
    for j in 0..3 {
        let row = d[j].row(q);
        for (n, x) in nodes.iter().enumerate() {
            let w = row[n];
            for i in 0..3 {
                a[(i, j)] += w * x[i];
            }
        }
    }
    a
}

fn invert(a: &Matrix3<f64>) -> [[f64; 3]; 3] {
    let inv = a.try_inverse().unwrap_or_else(|| Matrix3::from_element(f64::NAN));
    std::array::from_fn(|j| std::array::from_fn(|i| inv[(j, i)]))
}

/// Isoparametric mapping data of one element from its `N_p` physical
/// collocation coordinates.
pub fn compute_mapping(element: usize, nodes: &[Vec3], re: &ReferenceElement) -> Result<ElementGeometry> {
    if nodes.len() != re.n_basis {
        return Err(Error::Config(format!(
            "element {element}: expected {} nodes, got {}",
            re.n_basis,
            nodes.len()
        )));
    }
    let nc = re.n_cub();
    let mut jac = Vec::with_capacity(nc);
    let mut metrics = Vec::with_capacity(nc);
    for q in 0..nc {
        let a = forward_jacobian(&re.deriv_cub, nodes, q);
        let det = a.determinant();
        if !(det > MIN_JACOBIAN) {
            return Err(Error::InvertedElement { element, det });
        }
        jac.push(det);
        metrics.push(invert(&a));
    }
    let ng = re.n_face();
    let mut normals = Vec::with_capacity(4 * ng);
    let mut face_jac = Vec::with_capacity(4 * ng);
    let mut face_metrics = Vec::with_capacity(4 * ng);
    let mut face_det = Vec::with_capacity(4 * ng);
    for f in 0..4 {
        let nref = face_normal_ref(f);
        let [t1, t2] = face_tangents(f);
        let tc = crate::mesh::cross(t1, t2);
        let tlen = crate::mesh::norm(tc);
        for g in 0..ng {
            let idx = f * ng + g;
            let a = forward_jacobian(&re.deriv_face, nodes, idx);
            let det = a.determinant();
            if !(det > MIN_JACOBIAN) {
                return Err(Error::InvertedElement { element, det });
            }
            let m = invert(&a);
            // Cofactor transform of the reference normal: det * G^T n_ref.
            let mut n = [0.0; 3];
            for i in 0..3 {
                for j in 0..3 {
                    n[i] += m[j][i] * nref[j];
                }
            }
            let len = crate::mesh::norm(n);
            let nref_len = crate::mesh::norm(nref);
            face_jac.push(det * len / nref_len * tlen);
            normals.push([n[0] / len, n[1] / len, n[2] / len]);
            face_metrics.push(m);
            face_det.push(det);
        }
    }
    Ok(ElementGeometry {
        phys_nodes: nodes.to_vec(),
        jac,
        metrics,
        normals,
        face_jac,
        face_metrics,
        face_det,
    })
}

/// Local operators of one element. Matrices with `N_p` rows are stored
/// column-major with leading dimension `ld` (padded rows are zero).
#[derive(Clone, Debug)]
pub struct ElementOperators {
    pub n_p: usize,
    pub ld: usize,
    pub n_cub: usize,
    pub n_trace: usize,
    /// `S_x, S_y, S_z`, each `ld x n_cub`.
    pub stiff: [Vec<f64>; 3],
    /// Mass matrix, unpadded.
    pub mass: DMatrix<f64>,
    /// Lower Cholesky factor of the mass matrix, `ld x n_p`.
    pub mass_chol: Vec<f64>,
    /// Face mass matrix, `ld x 4 N_g`.
    pub face_mass: Vec<f64>,
}

/// Local stiffness, mass and face mass matrices of one element.
pub fn build_operators(
    element: usize,
    geom: &ElementGeometry,
    re: &ReferenceElement,
    padded: bool,
) -> Result<ElementOperators> {
    let np = re.n_basis;
    let nc = re.n_cub();
    let nt = 4 * re.n_face();
    let ld = leading_dim(np, padded);
    let jw: Vec<f64> = (0..nc).map(|q| geom.jac[q] * re.cub_weights[q]).collect();

    let mut stiff = [vec![0.0; ld * nc], vec![0.0; ld * nc], vec![0.0; ld * nc]];
    for q in 0..nc {
        let g = &geom.metrics[q];
        for (m, s) in stiff.iter_mut().enumerate() {
            let col = &mut s[q * ld..q * ld + np];
            for (i, c) in col.iter_mut().enumerate() {
                let d = re.deriv_cub[0][(q, i)] * g[0][m]
                    + re.deriv_cub[1][(q, i)] * g[1][m]
                    + re.deriv_cub[2][(q, i)] * g[2][m];
                *c = d * jw[q];
            }
        }
    }

    let ic = &re.interp_cub;
    let mut mass = DMatrix::zeros(np, np);
    for q in 0..nc {
        for b in 0..np {
            let wb = ic[(q, b)] * jw[q];
            for a in 0..np {
                mass[(a, b)] += ic[(q, a)] * wb;
            }
        }
    }
    // Symmetrize away summation-order noise.
    let mass = (&mass + mass.transpose()) * 0.5;
    let chol = mass
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular(format!("mass matrix of element {element}")))?;
    let l = chol.l();
    let mut mass_chol = vec![0.0; ld * np];
    for j in 0..np {
        for i in j..np {
            mass_chol[j * ld + i] = l[(i, j)];
        }
    }

    let ng = re.n_face();
    let mut face_mass = vec![0.0; ld * nt];
    for g in 0..nt {
        let w = geom.face_jac[g] * re.face_weights[g % ng];
        for i in 0..np {
            face_mass[g * ld + i] = re.interp_face[(g, i)] * w;
        }
    }
    Ok(ElementOperators {
        n_p: np,
        ld,
        n_cub: nc,
        n_trace: nt,
        stiff,
        mass,
        mass_chol,
        face_mass,
    })
}

impl ElementOperators {
    /// `out += S_m f` for `f` given at cubature nodes.
    #[inline]
    pub fn apply_stiff(&self, m: usize, f: &[f64], out: &mut [f64]) {
        gemv_acc(&self.stiff[m], self.ld, f, out);
    }

    /// `out += M_dOmega g` for `g` given at face quadrature nodes.
    #[inline]
    pub fn apply_face_mass(&self, g: &[f64], out: &mut [f64]) {
        gemv_acc(&self.face_mass, self.ld, g, out);
    }

    /// Solve `M x = b` in place on the first `n_p` entries.
    pub fn solve_mass(&self, b: &mut [f64]) {
        let (n, ld, l) = (self.n_p, self.ld, &self.mass_chol);
        for j in 0..n {
            let y = b[j] / l[j * ld + j];
            b[j] = y;
            for i in j + 1..n {
                b[i] -= l[j * ld + i] * y;
            }
        }
        for j in (0..n).rev() {
            let mut s = b[j];
            for i in j + 1..n {
                s -= l[j * ld + i] * b[i];
            }
            b[j] = s / l[j * ld + j];
        }
    }
}

/// `out[0..ld] += A x` for column-major `A` with leading dimension `ld`.
#[inline]
pub(crate) fn gemv_acc(a: &[f64], ld: usize, x: &[f64], out: &mut [f64]) {
    let out = &mut out[..ld];
    for (col, &xj) in a.chunks_exact(ld).zip(x) {
        for (o, &c) in out.iter_mut().zip(col) {
            *o += c * xj;
        }
    }
}

/// Discrete divergence of the constant vector field `c`:
/// `|| M^-1 (sum_m S_m c_m 1 - M_dOmega (c . n)) ||_inf`.
pub fn discrete_divergence_check(geom: &ElementGeometry, ops: &ElementOperators, c: Vec3) -> f64 {
    let mut r = vec![0.0; ops.ld];
    for (m, &cm) in c.iter().enumerate() {
        ops.apply_stiff(m, &vec![cm; ops.n_cub], &mut r);
    }
    let cn: Vec<f64> = geom
        .normals
        .iter()
        .map(|n| -(c[0] * n[0] + c[1] * n[1] + c[2] * n[2]))
        .collect();
    ops.apply_face_mass(&cn, &mut r);
    ops.solve_mass(&mut r);
    r[..ops.n_p].iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// Map reference collocation nodes through the affine map of a straight tet.
pub fn straight_nodes(vertices: &[Vec3; 4], re: &ReferenceElement) -> Vec<Vec3> {
    re.colloc_nodes.iter().map(|r| affine_point(vertices, r)).collect()
}

pub fn affine_point(v: &[Vec3; 4], r: &[f64; 3]) -> Vec3 {
    let l = crate::refelem::barycentric(r);
    std::array::from_fn(|i| l[0] * v[0][i] + l[1] * v[1][i] + l[2] * v[2][i] + l[3] * v[3][i])
}
