//! Continuous Lagrange finite elements for linear elasticity on a sub-mesh.

use std::collections::HashMap;

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{cross, norm, sub3, Mesh, SubFaceKind, SubMesh, Vec3};
use crate::operators::affine_point;
use crate::refelem::{barycentric, modal_basis_eval, ReferenceElement, REF_VERTICES};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElasticMaterial {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub lame_lambda: f64,
    pub lame_mu: f64,
}

impl ElasticMaterial {
    pub fn new(youngs_modulus: f64, poisson_ratio: f64) -> Result<Self> {
        if !(youngs_modulus > 0.0) || !(poisson_ratio > -1.0 && poisson_ratio < 0.5) {
            return Err(Error::Config(format!(
                "invalid material: E={youngs_modulus}, nu={poisson_ratio}"
            )));
        }
        let (e, nu) = (youngs_modulus, poisson_ratio);
        Ok(ElasticMaterial {
            youngs_modulus: e,
            poisson_ratio: nu,
            lame_lambda: nu * e / ((1.0 + nu) * (1.0 - 2.0 * nu)),
            lame_mu: e / (2.0 * (1.0 + nu)),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElasticityOptions {
    /// Relative residual at which conjugate gradients stop.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ElasticityOptions {
    fn default() -> Self {
        ElasticityOptions {
            tol: 1e-12,
            max_iter: 20_000,
        }
    }
}

type NodeKey = [(usize, usize); 4];

fn node_key(tet: &[usize; 4], lat: &[usize; 4]) -> NodeKey {
    let mut k = [(usize::MAX, 0); 4];
    for i in 0..4 {
        if lat[i] > 0 {
            k[i] = (tet[i], lat[i]);
        }
    }
    k.sort_unstable();
    k
}

/// Solved displacement field on the sub-mesh.
#[derive(Clone, Debug)]
pub struct DeformationField {
    pub p_fem: usize,
    pub re: ReferenceElement,
    /// Parent element index of each sub-mesh element.
    pub elements: Vec<usize>,
    pub vertices: Vec<[Vec3; 4]>,
    /// Global FEM node ids per sub-mesh element, in lattice order.
    pub elem_nodes: Vec<Vec<usize>>,
    pub node_pos: Vec<Vec3>,
    /// Nodal displacement coefficients.
    pub displacement: Vec<Vec3>,
    /// Per node and component: prescribed by a boundary condition.
    pub constrained: Vec<[bool; 3]>,
    /// Inverse of the straight map `[v1-v0, v2-v0, v3-v0]`, per element.
    inv_maps: Vec<[[f64; 3]; 3]>,
    grid: PointGrid,
    pub cg_iterations: usize,
}

#[derive(Clone, Debug)]
struct PointGrid {
    lo: Vec3,
    cell: Vec3,
    dims: [usize; 3],
    cells: Vec<Vec<usize>>,
}

const LOCATE_TOL: f64 = 1e-10;

impl PointGrid {
    fn build(boxes: &[(Vec3, Vec3)]) -> Self {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for (a, b) in boxes {
            for k in 0..3 {
                lo[k] = lo[k].min(a[k]);
                hi[k] = hi[k].max(b[k]);
            }
        }
        let n = (boxes.len() as f64).cbrt().ceil().max(1.0) as usize;
        let dims = [n, n, n];
        let cell: Vec3 = std::array::from_fn(|k| ((hi[k] - lo[k]) / n as f64).max(f64::MIN_POSITIVE));
        let mut grid = PointGrid {
            lo,
            cell,
            dims,
            cells: vec![Vec::new(); n * n * n],
        };
        for (e, (a, b)) in boxes.iter().enumerate() {
            let ia = grid.index(a);
            let ib = grid.index(b);
            for i in ia[0]..=ib[0] {
                for j in ia[1]..=ib[1] {
                    for k in ia[2]..=ib[2] {
                        let c = grid.flat([i, j, k]);
                        grid.cells[c].push(e);
                    }
                }
            }
        }
        grid
    }

    fn index(&self, x: &Vec3) -> [usize; 3] {
        std::array::from_fn(|k| {
            let t = ((x[k] - self.lo[k]) / self.cell[k]).floor();
            (t.max(0.0) as usize).min(self.dims[k] - 1)
        })
    }

    fn flat(&self, i: [usize; 3]) -> usize {
        i[0] + self.dims[0] * (i[1] + self.dims[1] * i[2])
    }
}

fn element_stiffness(re: &ReferenceElement, verts: &[Vec3; 4], mat: &ElasticMaterial) -> (Vec<f64>, [[f64; 3]; 3]) {
    let n = re.n_basis;
    let cols = [
        sub3(verts[1], verts[0]),
        sub3(verts[2], verts[0]),
        sub3(verts[3], verts[0]),
    ];
    // dx/dr = cols / 2 on the reference tet.
    let a = nalgebra::Matrix3::from_fn(|i, j| 0.5 * cols[j][i]);
    let det = a.determinant();
    let inv = a.try_inverse().expect("element volumes are positive");
    let g: [[f64; 3]; 3] = std::array::from_fn(|j| std::array::from_fn(|i| inv[(j, i)]));
    let (lam, mu) = (mat.lame_lambda, mat.lame_mu);
    let mut k = vec![0.0; 9 * n * n];
    let mut grad = vec![[0.0; 3]; n];
    for q in 0..re.n_cub() {
        let w = re.cub_weights[q] * det;
        for (a_, gr) in grad.iter_mut().enumerate() {
            let dr = [
                re.deriv_cub[0][(q, a_)],
                re.deriv_cub[1][(q, a_)],
                re.deriv_cub[2][(q, a_)],
            ];
            *gr = std::array::from_fn(|i| g[0][i] * dr[0] + g[1][i] * dr[1] + g[2][i] * dr[2]);
        }
        for a_ in 0..n {
            let ga = grad[a_];
            for b in 0..n {
                let gb = grad[b];
                let dd = ga[0] * gb[0] + ga[1] * gb[1] + ga[2] * gb[2];
                for i in 0..3 {
                    let row = (3 * a_ + i) * 3 * n;
                    for j in 0..3 {
                        let mut v = lam * ga[i] * gb[j] + mu * ga[j] * gb[i];
                        if i == j {
                            v += mu * dd;
                        }
                        k[row + 3 * b + j] += w * v;
                    }
                }
            }
        }
    }
    let inv_map: [[f64; 3]; 3] = {
        let t = nalgebra::Matrix3::from_fn(|i, j| cols[j][i]);
        let ti = t.try_inverse().expect("element volumes are positive");
        std::array::from_fn(|i| std::array::from_fn(|j| ti[(i, j)]))
    };
    (k, inv_map)
}

/// Symmetric block-sparse matrix with 3x3 blocks per node pair.
struct BlockCsr {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<[f64; 9]>,
}

impl BlockCsr {
    fn pattern(n_nodes: usize, elem_nodes: &[Vec<usize>]) -> Self {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
        for nodes in elem_nodes {
            for &a in nodes {
                adj[a].extend_from_slice(nodes);
            }
        }
        let mut row_ptr = Vec::with_capacity(n_nodes + 1);
        let mut cols = Vec::new();
        row_ptr.push(0);
        for row in adj.iter_mut() {
            row.sort_unstable();
            row.dedup();
            cols.extend_from_slice(row);
            row_ptr.push(cols.len());
        }
        let nnz = cols.len();
        BlockCsr {
            row_ptr,
            cols,
            vals: vec![[0.0; 9]; nnz],
        }
    }

    fn slot(&self, r: usize, c: usize) -> usize {
        let s = &self.cols[self.row_ptr[r]..self.row_ptr[r + 1]];
        self.row_ptr[r] + s.binary_search(&c).expect("entry in pattern")
    }

    fn add_element(&mut self, nodes: &[usize], k: &[f64]) {
        let n = nodes.len();
        for (a, &ra) in nodes.iter().enumerate() {
            for (b, &cb) in nodes.iter().enumerate() {
                let s = self.slot(ra, cb);
                let blk = &mut self.vals[s];
                for i in 0..3 {
                    for j in 0..3 {
                        blk[3 * i + j] += k[(3 * a + i) * 3 * n + 3 * b + j];
                    }
                }
            }
        }
    }

    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.par_chunks_mut(3).enumerate().for_each(|(r, out)| {
            let mut acc = [0.0; 3];
            for s in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[s];
                let blk = &self.vals[s];
                for i in 0..3 {
                    acc[i] += blk[3 * i] * x[3 * c] + blk[3 * i + 1] * x[3 * c + 1] + blk[3 * i + 2] * x[3 * c + 2];
                }
            }
            out.copy_from_slice(&acc);
        });
    }

    fn diag(&self, r: usize, i: usize) -> f64 {
        self.vals[self.slot(r, r)][4 * i]
    }
}

/// Deterministic dot product: fixed chunks summed in order.
fn dot_det(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(4096)
        .zip(b.par_chunks(4096))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

/// Jacobi-preconditioned CG on the free dofs (`mask[i] == true` is fixed).
fn pcg(k: &BlockCsr, b: &[f64], mask: &[bool], x: &mut [f64], opts: &ElasticityOptions) -> Result<usize> {
    let n = b.len();
    let dinv: Vec<f64> = (0..n)
        .map(|i| if mask[i] { 0.0 } else { 1.0 / k.diag(i / 3, i % 3) })
        .collect();
    let apply = |v: &[f64], out: &mut [f64]| {
        k.matvec(v, out);
        out.iter_mut().zip(mask).for_each(|(o, &m)| {
            if m {
                *o = 0.0
            }
        });
    };
    let mut r = vec![0.0; n];
    apply(x, &mut r);
    for i in 0..n {
        r[i] = if mask[i] { 0.0 } else { b[i] - r[i] };
    }
    let bnorm = dot_det(b, b).sqrt();
    if bnorm == 0.0 {
        x.iter_mut().zip(mask).for_each(|(v, &m)| {
            if !m {
                *v = 0.0
            }
        });
        return Ok(0);
    }
    let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut rz = dot_det(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..opts.max_iter {
        let rnorm = dot_det(&r, &r).sqrt();
        if rnorm <= opts.tol * bnorm {
            return Ok(it);
        }
        apply(&p, &mut ap);
        let alpha = rz / dot_det(&p, &ap);
        x.par_iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
        r.par_iter_mut().zip(&ap).for_each(|(ri, a)| *ri -= alpha * a);
        z.par_iter_mut()
            .zip(&r)
            .zip(&dinv)
            .for_each(|((zi, ri), d)| *zi = ri * d);
        let rz_new = dot_det(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.par_iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    let rel = dot_det(&r, &r).sqrt() / bnorm;
    Err(Error::LinearSolver(rel))
}

fn symmetry_axis(mesh: &Mesh, k: usize, f: usize) -> Result<usize> {
    let g = crate::mesh::face_global(&mesh.tets[k], f);
    let (a, b, c) = (mesh.vertices[g[0]], mesh.vertices[g[1]], mesh.vertices[g[2]]);
    let n = cross(sub3(b, a), sub3(c, a));
    let len = norm(n);
    for axis in 0..3 {
        if (n[axis].abs() - len).abs() <= 1e-10 * len {
            return Ok(axis);
        }
    }
    Err(Error::Config(format!(
        "symmetry face {f} of element {k} is not axis-aligned"
    )))
}

/// Solve `div sigma = 0` on the sub-mesh with `u = g` on surface faces,
/// `u = 0` on cut faces and sliding on axis-aligned symmetry faces.
pub fn solve_elasticity(
    mesh: &Mesh,
    sub: &SubMesh,
    material: &ElasticMaterial,
    g: &(dyn Fn(&Vec3) -> Result<Vec3> + Sync),
    p_fem: usize,
    opts: &ElasticityOptions,
) -> Result<DeformationField> {
    let re = ReferenceElement::new(p_fem)?;
    let mut ids: HashMap<NodeKey, usize> = HashMap::new();
    let mut node_pos: Vec<Vec3> = Vec::new();
    let mut elem_nodes = Vec::with_capacity(sub.n_elements());
    let mut vertices = Vec::with_capacity(sub.n_elements());
    for &k in &sub.elements {
        let tet = mesh.tets[k];
        let verts = mesh.element_vertices(k);
        let nodes: Vec<usize> = re
            .lattice
            .iter()
            .zip(&re.colloc_nodes)
            .map(|(lat, r)| {
                *ids.entry(node_key(&tet, lat)).or_insert_with(|| {
                    node_pos.push(affine_point(&verts, r));
                    node_pos.len() - 1
                })
            })
            .collect();
        elem_nodes.push(nodes);
        vertices.push(verts);
    }
    let n_nodes = node_pos.len();

    // Boundary conditions; surface values take precedence over cut faces.
    let mut fixed: Vec<[Option<f64>; 3]> = vec![[None; 3]; n_nodes];
    let mut has_dirichlet = false;
    let face_nodes: Vec<Vec<usize>> = (0..4).map(|f| re.face_node_indices(f)).collect();
    for sf in &sub.faces {
        if let SubFaceKind::Symmetry(_) = sf.kind {
            let axis = symmetry_axis(mesh, sub.elements[sf.element], sf.face)?;
            for &i in &face_nodes[sf.face] {
                let node = elem_nodes[sf.element][i];
                fixed[node][axis].get_or_insert(0.0);
            }
        }
    }
    let mut surface_nodes: Vec<usize> = Vec::new();
    for sf in &sub.faces {
        match sf.kind {
            SubFaceKind::Cut => {
                has_dirichlet = true;
                for &i in &face_nodes[sf.face] {
                    fixed[elem_nodes[sf.element][i]] = [Some(0.0); 3];
                }
            }
            SubFaceKind::Surface => {
                has_dirichlet = true;
                surface_nodes.extend(face_nodes[sf.face].iter().map(|&i| elem_nodes[sf.element][i]));
            }
            SubFaceKind::Symmetry(_) => {}
        }
    }
    if !has_dirichlet {
        return Err(Error::Config("elasticity problem has no Dirichlet faces".into()));
    }
    surface_nodes.sort_unstable();
    surface_nodes.dedup();
    let values: Vec<Vec3> = surface_nodes
        .par_iter()
        .map(|&n| g(&node_pos[n]))
        .collect::<Result<_>>()?;
    for (&n, v) in surface_nodes.iter().zip(&values) {
        fixed[n] = [Some(v[0]), Some(v[1]), Some(v[2])];
    }

    // Assembly: element matrices in parallel chunks, merged in element order.
    let mut kmat = BlockCsr::pattern(n_nodes, &elem_nodes);
    let mut inv_maps = Vec::with_capacity(sub.n_elements());
    for chunk in (0..sub.n_elements()).collect::<Vec<_>>().chunks(256) {
        let local: Vec<(Vec<f64>, [[f64; 3]; 3])> = chunk
            .par_iter()
            .map(|&e| element_stiffness(&re, &vertices[e], material))
            .collect();
        for (&e, (k, inv)) in chunk.iter().zip(local) {
            kmat.add_element(&elem_nodes[e], &k);
            inv_maps.push(inv);
        }
    }

    let ndof = 3 * n_nodes;
    let mut x = vec![0.0; ndof];
    let mut mask = vec![false; ndof];
    for (n, f) in fixed.iter().enumerate() {
        for i in 0..3 {
            if let Some(v) = f[i] {
                x[3 * n + i] = v;
                mask[3 * n + i] = true;
            }
        }
    }
    // b = -K u_c on free dofs.
    let mut b = vec![0.0; ndof];
    kmat.matvec(&x, &mut b);
    for i in 0..ndof {
        b[i] = if mask[i] { 0.0 } else { -b[i] };
    }
    let mut xf: Vec<f64> = x.iter().zip(&mask).map(|(v, &m)| if m { 0.0 } else { *v }).collect();
    let iters = pcg(&kmat, &b, &mask, &mut xf, opts)?;
    debug!(
        "elasticity: {ndof} dofs, {} free, {iters} CG iterations",
        mask.iter().filter(|m| !**m).count()
    );
    for i in 0..ndof {
        if !mask[i] {
            x[i] = xf[i];
        }
    }
    let displacement = (0..n_nodes).map(|n| [x[3 * n], x[3 * n + 1], x[3 * n + 2]]).collect();
    let constrained = fixed
        .iter()
        .map(|f| [f[0].is_some(), f[1].is_some(), f[2].is_some()])
        .collect();

    let boxes: Vec<(Vec3, Vec3)> = vertices
        .iter()
        .map(|v| {
            let lo = std::array::from_fn(|k| v.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min) - LOCATE_TOL);
            let hi = std::array::from_fn(|k| v.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max) + LOCATE_TOL);
            (lo, hi)
        })
        .collect();
    Ok(DeformationField {
        p_fem,
        re,
        elements: sub.elements.clone(),
        vertices,
        elem_nodes,
        node_pos,
        displacement,
        constrained,
        inv_maps,
        grid: PointGrid::build(&boxes),
        cg_iterations: iters,
    })
}

impl DeformationField {
    pub fn n_nodes(&self) -> usize {
        self.node_pos.len()
    }

    /// Reference coordinates of `x` in sub-mesh element `e` and the smallest
    /// barycentric coordinate.
    fn locate_in(&self, e: usize, x: &Vec3) -> (Vec3, f64) {
        let d = sub3(*x, self.vertices[e][0]);
        let m = &self.inv_maps[e];
        let l: [f64; 3] = std::array::from_fn(|i| m[i][0] * d[0] + m[i][1] * d[1] + m[i][2] * d[2]);
        let l0 = 1.0 - l[0] - l[1] - l[2];
        let bary = [l0, l[0], l[1], l[2]];
        let r = std::array::from_fn(|k| (0..4).map(|i| bary[i] * REF_VERTICES[i][k]).sum());
        (r, bary.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Sub-mesh element containing `x` and its reference coordinates.
    pub fn locate(&self, x: &Vec3) -> Option<(usize, Vec3)> {
        let inside_grid = (0..3).all(|k| {
            x[k] >= self.grid.lo[k] - LOCATE_TOL
                && x[k] <= self.grid.lo[k] + self.grid.cell[k] * self.grid.dims[k] as f64 + LOCATE_TOL
        });
        if !inside_grid {
            return None;
        }
        let cell = self.grid.flat(self.grid.index(x));
        let mut best: Option<(usize, Vec3, f64)> = None;
        for &e in &self.grid.cells[cell] {
            let (r, m) = self.locate_in(e, x);
            if best.as_ref().is_none_or(|b| m > b.2) {
                best = Some((e, r, m));
            }
        }
        if best.as_ref().is_none_or(|b| b.2 < -LOCATE_TOL) {
            // Fallback scan over all elements.
            for e in 0..self.vertices.len() {
                let (r, m) = self.locate_in(e, x);
                if best.as_ref().is_none_or(|b| m > b.2) {
                    best = Some((e, r, m));
                }
            }
        }
        match best {
            Some((e, r, m)) if m >= -LOCATE_TOL => Some((e, r)),
            _ => None,
        }
    }

    /// Displacement at reference point `r` of sub-mesh element `e`.
    pub fn eval_in(&self, e: usize, r: &Vec3) -> Vec3 {
        let l = crate::refelem::barycentric(r);
        let clamped: Vec3 = if l.iter().any(|&v| v < 0.0) {
            let mut c = l.map(|v| v.max(0.0));
            let s: f64 = c.iter().sum();
            c.iter_mut().for_each(|v| *v /= s);
            crate::refelem::from_barycentric(&c)
        } else {
            *r
        };
        let phi = modal_basis_eval(self.p_fem, &[clamped]).expect("point clamped into the element")
            * &self.re.inv_vandermonde;
        let mut u = [0.0; 3];
        for (i, &n) in self.elem_nodes[e].iter().enumerate() {
            for k in 0..3 {
                u[k] += phi[(0, i)] * self.displacement[n][k];
            }
        }
        u
    }

    /// Displacement at `x`; the flag is false (and the value zero) outside
    /// the sub-mesh.
    pub fn query_displacement(&self, x: &Vec3) -> (Vec3, bool) {
        match self.locate(x) {
            Some((e, r)) => (self.eval_in(e, &r), true),
            None => ([0.0; 3], false),
        }
    }

    /// Strain energy `0.5 u^T K u` of arbitrary nodal values.
    pub fn energy(&self, material: &ElasticMaterial, u: &[Vec3]) -> f64 {
        let n = self.re.n_basis;
        let mut total = 0.0;
        for (e, nodes) in self.elem_nodes.iter().enumerate() {
            let (k, _) = element_stiffness(&self.re, &self.vertices[e], material);
            let ue: Vec<f64> = nodes.iter().flat_map(|&i| u[i]).collect();
            for a in 0..3 * n {
                let row = &k[a * 3 * n..(a + 1) * 3 * n];
                total += 0.5 * ue[a] * row.iter().zip(&ue).map(|(x, y)| x * y).sum::<f64>();
            }
        }
        total
    }

    /// Straight position of local node `i` of sub-mesh element `e`.
    pub fn straight_node(&self, e: usize, i: usize) -> Vec3 {
        let l = barycentric(&self.re.colloc_nodes[i]);
        let v = &self.vertices[e];
        std::array::from_fn(|k| (0..4).map(|j| l[j] * v[j][k]).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{extract_submesh, generate, BoundingBox};

    #[test]
    fn lame_parameters() {
        let m = ElasticMaterial::new(2.0, 0.25).unwrap();
        assert!((m.lame_lambda - 0.8).abs() < 1e-15);
        assert!((m.lame_mu - 0.8).abs() < 1e-15);
        assert!(ElasticMaterial::new(1.0, 0.5).is_err());
        assert!(ElasticMaterial::new(0.0, 0.3).is_err());
    }

    fn unit_box_sub(n: usize) -> (Mesh, SubMesh) {
        let mut m = generate::box_mesh([n, n, n], [0.0; 3], [1.0; 3]).unwrap();
        m.boundary_faces.iter_mut().for_each(|b| b.tag = "surf".into());
        let bbox = BoundingBox {
            lo: [-1.0; 3],
            hi: [2.0; 3],
        };
        let s = extract_submesh(&m, bbox, "surf", &[]).unwrap();
        (m, s)
    }

    #[test]
    fn zero_data_gives_zero_field() {
        let (m, s) = unit_box_sub(2);
        let mat = ElasticMaterial::new(1.0, 0.3).unwrap();
        let f = solve_elasticity(&m, &s, &mat, &|_| Ok([0.0; 3]), 2, &Default::default()).unwrap();
        assert!(f.displacement.iter().all(|u| *u == [0.0; 3]));
    }

    #[test]
    fn shared_nodes_are_merged() {
        let (m, s) = unit_box_sub(1);
        let mat = ElasticMaterial::new(1.0, 0.3).unwrap();
        let f = solve_elasticity(&m, &s, &mat, &|_| Ok([0.0; 3]), 2, &Default::default()).unwrap();
        // Degree-2 nodes of a 1x1x1 box: 27 lattice points.
        assert_eq!(f.n_nodes(), 27);
    }

    #[test]
    fn query_outside_is_flagged() {
        let (m, s) = unit_box_sub(2);
        let mat = ElasticMaterial::new(1.0, 0.3).unwrap();
        let f = solve_elasticity(&m, &s, &mat, &|x| Ok([x[0], 0.0, 0.0]), 1, &Default::default()).unwrap();
        assert_eq!(f.query_displacement(&[3.0, 0.5, 0.5]), ([0.0; 3], false));
        let (u, found) = f.query_displacement(&[0.25, 0.5, 0.75]);
        assert!(found && (u[0] - 0.25).abs() < 1e-12);
    }
}
