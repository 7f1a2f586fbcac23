//! Element operators of a whole mesh at one degree and the semidiscrete
//! right-hand side built from them.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curving::CurvedMesh;
use crate::error::{Error, Result};
use crate::euler::{
    admissible_pressure, boundary_state, max_wavespeed_any, smoothness_indicator, viscosity_amount, BoundaryKind, Gas,
    RiemannSolver, State, ViscosityModel, NVAR,
};
use crate::mesh::{FaceNeighbor, Mesh, Vec3};
use crate::operators::{build_operators, compute_mapping, gemv_acc, leading_dim, ElementOperators};
use crate::refelem::{n_basis, ReferenceElement};

use super::store::SolutionStore;

/// How the smoothness indicator integrates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorMode {
    /// Parseval on the reference element.
    #[default]
    Reference,
    /// Cubature in physical space, weighted by the Jacobian.
    Physical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Physics {
    pub gas: Gas,
    pub riemann: RiemannSolver,
    pub viscosity: ViscosityModel,
    pub indicator: IndicatorMode,
    pub freestream: State,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Interior { element: usize, face: usize, table: usize },
    Boundary(BoundaryKind),
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn perm_index(p: &[usize; 3]) -> usize {
    PERMS.iter().position(|q| q == p).expect("a permutation of 0..3")
}

fn invert_perm(p: &[usize; 3]) -> [usize; 3] {
    let mut inv = [0; 3];
    for k in 0..3 {
        inv[p[k]] = k;
    }
    inv
}

/// For each vertex permutation `P`, the face node `q'` whose barycentric
/// coordinates satisfy `bary[q'][P[k]] = bary[q][k]`.
fn pairing_tables(bary: &[[f64; 3]]) -> Result<Vec<Vec<usize>>> {
    PERMS
        .iter()
        .map(|p| {
            bary.iter()
                .map(|mu| {
                    let mut target = [0.0; 3];
                    for k in 0..3 {
                        target[p[k]] = mu[k];
                    }
                    bary.iter()
                        .position(|nu| (0..3).all(|k| (nu[k] - target[k]).abs() < 1e-12))
                        .ok_or_else(|| Error::Config("face quadrature is not symmetric".into()))
                })
                .collect()
        })
        .collect()
}

/// Scratch buffers of one element evaluation.
struct Scratch {
    ucub: Vec<f64>,
    fcub: Vec<f64>,
    fs: Vec<f64>,
    tmp: Vec<f64>,
}

/// Face data of one RHS evaluation; allocated once per discretization.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub traces: SolutionStore,
    pub eps: Vec<f64>,
    q: SolutionStore,
    q_traces: SolutionStore,
}

pub struct Discretization {
    pub re: ReferenceElement,
    pub padded: bool,
    /// Block length of solution fields.
    pub block: usize,
    /// Block length of trace fields.
    pub trace_block: usize,
    cub_block: usize,
    /// `I_cub`, column-major with leading dimension `cub_block`.
    interp_cub: Vec<f64>,
    /// `I_g`, column-major with leading dimension `trace_block`.
    interp_face: Vec<f64>,
    pub ops: Vec<ElementOperators>,
    /// Outward unit normals at face quadrature nodes.
    pub normals: Vec<Vec<Vec3>>,
    /// `J W` at cubature nodes, kept for the physical indicator.
    jac_weights: Vec<Vec<f64>>,
    /// Inscribed-sphere diameters.
    pub h: Vec<f64>,
    sides: Vec<[Side; 4]>,
    pair_tables: Vec<Vec<usize>>,
    pub physics: Physics,
}

fn col_major(m: &nalgebra::DMatrix<f64>, ld: usize) -> Vec<f64> {
    let mut out = vec![0.0; ld * m.ncols()];
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out[j * ld + i] = m[(i, j)];
        }
    }
    out
}

impl Discretization {
    /// Geometry and operators of every element. `bcs` maps boundary tags to
    /// flow boundary conditions; every tag of the mesh needs an entry.
    pub fn new(
        mesh: &Mesh,
        curved: &CurvedMesh,
        re: ReferenceElement,
        bcs: &BTreeMap<String, BoundaryKind>,
        physics: Physics,
        padded: bool,
    ) -> Result<Self> {
        if curved.degree != re.degree || curved.n_elements != mesh.n_elements() {
            return Err(Error::Config(
                "curved geometry does not match the mesh or degree".into(),
            ));
        }
        physics.viscosity.validate()?;
        let np = re.n_basis;
        let nc = re.n_cub();
        let ng = re.n_face();
        let block = leading_dim(np, padded);
        let trace_block = leading_dim(4 * ng, padded);
        let cub_block = leading_dim(nc, padded);
        let keep_jw = physics.indicator == IndicatorMode::Physical;

        let built: Vec<(ElementOperators, Vec<Vec3>, Vec<f64>)> = (0..mesh.n_elements())
            .into_par_iter()
            .map(|k| {
                let nodes = curved.element_nodes(mesh, k, &re);
                let geom = compute_mapping(k, &nodes, &re)?;
                let ops = build_operators(k, &geom, &re, padded)?;
                let jw = if keep_jw {
                    geom.jac.iter().zip(&re.cub_weights).map(|(j, w)| j * w).collect()
                } else {
                    Vec::new()
                };
                Ok((ops, geom.normals, jw))
            })
            .collect::<Result<_>>()?;
        let mut ops = Vec::with_capacity(built.len());
        let mut normals = Vec::with_capacity(built.len());
        let mut jac_weights = Vec::with_capacity(built.len());
        for (o, n, j) in built {
            ops.push(o);
            normals.push(n);
            jac_weights.push(j);
        }

        let mut sides = Vec::with_capacity(mesh.n_elements());
        for (e, nb) in mesh.neighbors.iter().enumerate() {
            let mut s = [Side::Boundary(BoundaryKind::Farfield); 4];
            for f in 0..4 {
                s[f] = match nb[f] {
                    FaceNeighbor::Interior { element, face, link } => {
                        let l = &mesh.face_links[link];
                        let p = if l.a == (e, f) { l.perm } else { invert_perm(&l.perm) };
                        Side::Interior {
                            element,
                            face,
                            table: perm_index(&p),
                        }
                    }
                    FaceNeighbor::Boundary { index } => {
                        let tag = &mesh.boundary_faces[index].tag;
                        let kind = bcs
                            .get(tag)
                            .ok_or_else(|| Error::Config(format!("no boundary condition for tag '{tag}'")))?;
                        Side::Boundary(*kind)
                    }
                };
            }
            sides.push(s);
        }

        let h: Vec<f64> = (0..mesh.n_elements()).map(|k| mesh.inscribed_diameter(k)).collect();
        Ok(Discretization {
            interp_cub: col_major(&re.interp_cub, cub_block),
            interp_face: col_major(&re.interp_face, trace_block),
            pair_tables: pairing_tables(&re.face_bary)?,
            re,
            padded,
            block,
            trace_block,
            cub_block,
            ops,
            normals,
            jac_weights,
            h,
            sides,
            physics,
        })
    }

    #[inline]
    fn field<'a>(&self, data: &'a [f64], k: usize, c: usize) -> &'a [f64] {
        let o = (k * NVAR + c) * self.block;
        &data[o..o + self.re.n_basis]
    }

    pub fn n_elements(&self) -> usize {
        self.ops.len()
    }

    pub fn degree(&self) -> usize {
        self.re.degree
    }

    fn viscous(&self) -> bool {
        !self.physics.viscosity.is_off() && self.re.degree > 0
    }

    pub fn new_store(&self) -> SolutionStore {
        SolutionStore::new(self.n_elements(), NVAR, self.re.n_basis, self.padded)
    }

    pub fn workspace(&self) -> Workspace {
        let n = self.n_elements();
        let nt = 4 * self.re.n_face();
        let (q, q_traces) = if self.viscous() {
            (
                SolutionStore::new(n, 3 * NVAR, self.re.n_basis, self.padded),
                SolutionStore::new(n, 3 * NVAR, nt, self.padded),
            )
        } else {
            (SolutionStore::new(0, 0, 0, false), SolutionStore::new(0, 0, 0, false))
        };
        Workspace {
            traces: SolutionStore::new(n, NVAR, nt, self.padded),
            eps: vec![0.0; n],
            q,
            q_traces,
        }
    }

    fn scratch(&self) -> Scratch {
        Scratch {
            ucub: vec![0.0; NVAR * self.cub_block],
            fcub: vec![0.0; 3 * NVAR * self.cub_block],
            fs: vec![0.0; NVAR * self.trace_block],
            tmp: vec![0.0; self.cub_block.max(self.trace_block).max(self.block)],
        }
    }

    /// Uniform state in every element.
    pub fn uniform(&self, u: &State) -> SolutionStore {
        let mut s = self.new_store();
        for k in 0..self.n_elements() {
            for c in 0..NVAR {
                s.field_mut(k, c).fill(u[c]);
            }
        }
        s
    }

    /// Trace of every field at the face quadrature nodes, `I_g U`.
    pub fn interpolate_to_faces(&self, u: &SolutionStore, traces: &mut SolutionStore) {
        self.traces_of(&u.data, traces);
    }

    fn traces_of(&self, u: &[f64], traces: &mut SolutionStore) {
        let tb = self.trace_block;
        let stride = traces.element_stride();
        traces.data.par_chunks_mut(stride).enumerate().for_each(|(k, out)| {
            for c in 0..NVAR {
                let o = &mut out[c * tb..(c + 1) * tb];
                o.fill(0.0);
                gemv_acc(&self.interp_face, tb, self.field(u, k, c), o);
            }
        });
    }

    /// Element viscosity from the density field.
    pub fn element_viscosity(&self, u: &SolutionStore, k: usize) -> f64 {
        self.viscosity_of(&u.data, k)
    }

    fn viscosity_of(&self, u: &[f64], k: usize) -> f64 {
        let p = self.re.degree;
        if !self.viscous() {
            return 0.0;
        }
        let rho = self.field(u, k, 0);
        let np = self.re.n_basis;
        let n_lower = n_basis(p - 1);
        let vinv = &self.re.inv_vandermonde;
        let modal: Vec<f64> = (0..np).map(|i| (0..np).map(|j| vinv[(i, j)] * rho[j]).sum()).collect();
        let s = match self.physics.indicator {
            IndicatorMode::Reference => smoothness_indicator(&modal, n_lower),
            IndicatorMode::Physical => {
                let vc = &self.re.cub_vandermonde;
                let jw = &self.jac_weights[k];
                let (mut top, mut all) = (0.0, 0.0);
                for (q, w) in jw.iter().enumerate() {
                    let full: f64 = (0..np).map(|j| vc[(q, j)] * modal[j]).sum();
                    let hi: f64 = (n_lower..np).map(|j| vc[(q, j)] * modal[j]).sum();
                    top += w * hi * hi;
                    all += w * full * full;
                }
                if all == 0.0 {
                    0.0
                } else {
                    top / all
                }
            }
        };
        viscosity_amount(s, p, &self.physics.viscosity)
    }

    /// Element and trace index of the neighbor's copy of face node `g`.
    fn neighbor_node(&self, k: usize, f: usize, g: usize) -> Option<(usize, usize)> {
        match self.sides[k][f] {
            Side::Interior { element, face, table } => {
                let ng = self.re.n_face();
                Some((element, face * ng + self.pair_tables[table][g]))
            }
            Side::Boundary(_) => None,
        }
    }

    fn ghost(&self, k: usize, f: usize, um: &State, n: &Vec3) -> State {
        match self.sides[k][f] {
            Side::Boundary(kind) => boundary_state(um, n, kind, &self.physics.freestream),
            Side::Interior { .. } => unreachable!("interior face has no ghost state"),
        }
    }

    /// Auxiliary gradient `q = grad(sqrt(eps) U)` of the first-order
    /// viscous system and its face traces.
    fn viscous_gradient(&self, u: &[f64], ws: &mut Workspace) {
        let np = self.re.n_basis;
        let ng = self.re.n_face();
        let nt = 4 * ng;
        let (cb, tb) = (self.cub_block, self.trace_block);
        let traces = &ws.traces;
        let eps = &ws.eps;
        let q_stride = ws.q.element_stride();
        ws.q.data.par_chunks_mut(q_stride).enumerate().for_each_init(
            || self.scratch(),
            |sc, (k, out)| {
                let ops = &self.ops[k];
                let se = eps[k].sqrt();
                let own = traces.element(k);
                // sqrt(eps) U at cubature nodes.
                for c in 0..NVAR {
                    let uc = &mut sc.ucub[c * cb..(c + 1) * cb];
                    uc.fill(0.0);
                    gemv_acc(&self.interp_cub, cb, self.field(u, k, c), uc);
                    for v in uc.iter_mut() {
                        *v *= -se;
                    }
                }
                // Central trace of sqrt(eps) U.
                for f in 0..4 {
                    for g in 0..ng {
                        let idx = f * ng + g;
                        let um: State = std::array::from_fn(|c| own[c * tb + idx]);
                        let star: State = match self.neighbor_node(k, f, g) {
                            Some((e2, i2)) => {
                                let nb = traces.element(e2);
                                let s2 = eps[e2].sqrt();
                                std::array::from_fn(|c| 0.5 * (se * um[c] + s2 * nb[c * tb + i2]))
                            }
                            None => match self.sides[k][f] {
                                Side::Boundary(BoundaryKind::Farfield) => {
                                    std::array::from_fn(|c| se * self.physics.freestream[c])
                                }
                                _ => {
                                    let gh = self.ghost(k, f, &um, &self.normals[k][idx]);
                                    std::array::from_fn(|c| 0.5 * se * (um[c] + gh[c]))
                                }
                            },
                        };
                        for c in 0..NVAR {
                            sc.fs[c * tb + idx] = star[c];
                        }
                    }
                }
                for m in 0..3 {
                    for c in 0..NVAR {
                        let o = &mut out[(m * NVAR + c) * self.block..(m * NVAR + c + 1) * self.block];
                        o.fill(0.0);
                        ops.apply_stiff(m, &sc.ucub[c * cb..c * cb + ops.n_cub], o);
                        let g = &mut sc.tmp[..nt];
                        for (i, gv) in g.iter_mut().enumerate() {
                            *gv = sc.fs[c * tb + i] * self.normals[k][i][m];
                        }
                        ops.apply_face_mass(g, o);
                        ops.solve_mass(o);
                        o[np..].fill(0.0);
                    }
                }
            },
        );
        let q = &ws.q;
        let qt_stride = ws.q_traces.element_stride();
        ws.q_traces
            .data
            .par_chunks_mut(qt_stride)
            .enumerate()
            .for_each(|(k, out)| {
                for f in 0..3 * NVAR {
                    let o = &mut out[f * tb..(f + 1) * tb];
                    o.fill(0.0);
                    gemv_acc(&self.interp_face, tb, q.field(k, f), o);
                }
            });
    }

    /// Phase 1: traces and element viscosity; the auxiliary gradient if
    /// viscosity is on.
    pub fn prepare(&self, u: &[f64], ws: &mut Workspace) {
        self.traces_of(u, &mut ws.traces);
        if self.viscous() {
            let eps: Vec<f64> = (0..self.n_elements())
                .into_par_iter()
                .map(|k| self.viscosity_of(u, k))
                .collect();
            ws.eps = eps;
            self.viscous_gradient(u, ws);
        }
    }

    /// `out = sum_m S_m F_m(I_cub U)`, including the viscous flux.
    pub fn volume_kernel(&self, u: &[f64], ws: &Workspace, out: &mut [f64]) -> Result<()> {
        let cb = self.cub_block;
        let gas = self.physics.gas;
        let viscous = self.viscous();
        let stride = NVAR * self.block;
        out.par_chunks_mut(stride)
            .enumerate()
            .map_init(
                || self.scratch(),
                |sc, (k, o)| -> Result<()> {
                    let ops = &self.ops[k];
                    let nc = ops.n_cub;
                    for c in 0..NVAR {
                        let uc = &mut sc.ucub[c * cb..(c + 1) * cb];
                        uc.fill(0.0);
                        gemv_acc(&self.interp_cub, cb, self.field(u, k, c), uc);
                    }
                    for q in 0..nc {
                        let s: State = std::array::from_fn(|c| sc.ucub[c * cb + q]);
                        let p = admissible_pressure(&s, &gas).map_err(|e| e.at(k, q))?;
                        let f = crate::euler::flux_with_pressure(&s, p);
                        for c in 0..NVAR {
                            for m in 0..3 {
                                sc.fcub[(m * NVAR + c) * cb + q] = f[c][m];
                            }
                        }
                    }
                    if viscous && ws.eps[k] > 0.0 {
                        let se = ws.eps[k].sqrt();
                        let tmp = &mut sc.tmp[..cb];
                        for mc in 0..3 * NVAR {
                            tmp.fill(0.0);
                            gemv_acc(&self.interp_cub, cb, ws.q.field(k, mc), tmp);
                            for q in 0..nc {
                                sc.fcub[mc * cb + q] -= se * tmp[q];
                            }
                        }
                    }
                    for c in 0..NVAR {
                        let oc = &mut o[c * self.block..(c + 1) * self.block];
                        oc.fill(0.0);
                        for m in 0..3 {
                            ops.apply_stiff(m, &sc.fcub[(m * NVAR + c) * cb..(m * NVAR + c) * cb + nc], oc);
                        }
                    }
                    Ok(())
                },
            )
            .collect::<Result<()>>()
    }

    /// `out = M^-1 (out - M_dOmega F*)`, with pads reset to zero.
    pub fn surface_kernel(&self, ws: &Workspace, out: &mut [f64]) -> Result<()> {
        let ng = self.re.n_face();
        let np = self.re.n_basis;
        let tb = self.trace_block;
        let gas = self.physics.gas;
        let riemann = self.physics.riemann;
        let viscous = self.viscous();
        let traces = &ws.traces;
        let stride = NVAR * self.block;
        out.par_chunks_mut(stride)
            .enumerate()
            .map_init(
                || self.scratch(),
                |sc, (k, o)| -> Result<()> {
                    let ops = &self.ops[k];
                    let own = traces.element(k);
                    for f in 0..4 {
                        for g in 0..ng {
                            let idx = f * ng + g;
                            let n = &self.normals[k][idx];
                            let um: State = std::array::from_fn(|c| own[c * tb + idx]);
                            let nb = self.neighbor_node(k, f, g);
                            let up: State = match nb {
                                Some((e2, i2)) => {
                                    let t2 = traces.element(e2);
                                    std::array::from_fn(|c| t2[c * tb + i2])
                                }
                                None => self.ghost(k, f, &um, n),
                            };
                            let fl = riemann.flux(&um, &up, n, &gas).map_err(|e| e.at(k, idx))?;
                            for c in 0..NVAR {
                                sc.fs[c * tb + idx] = -fl[c];
                            }
                            if viscous {
                                let se = ws.eps[k].sqrt();
                                let qm = ws.q_traces.element(k);
                                let mut v = [0.0; NVAR];
                                for (c, vc) in v.iter_mut().enumerate() {
                                    for m in 0..3 {
                                        let a = se * qm[(m * NVAR + c) * tb + idx];
                                        let star = match nb {
                                            Some((e2, i2)) => {
                                                let qp = ws.q_traces.element(e2);
                                                0.5 * (a + ws.eps[e2].sqrt() * qp[(m * NVAR + c) * tb + i2])
                                            }
                                            None => a,
                                        };
                                        *vc += star * n[m];
                                    }
                                }
                                if let Side::Boundary(BoundaryKind::SlipWall | BoundaryKind::Symmetry) =
                                    self.sides[k][f]
                                {
                                    // Mirror average: no diffusive flux of mass, energy or
                                    // tangential momentum through the plane.
                                    let vn = v[1] * n[0] + v[2] * n[1] + v[3] * n[2];
                                    v = [0.0, vn * n[0], vn * n[1], vn * n[2], 0.0];
                                }
                                for c in 0..NVAR {
                                    sc.fs[c * tb + idx] += v[c];
                                }
                            }
                        }
                    }
                    for c in 0..NVAR {
                        let oc = &mut o[c * self.block..(c + 1) * self.block];
                        ops.apply_face_mass(&sc.fs[c * tb..c * tb + 4 * ng], oc);
                        ops.solve_mass(oc);
                        oc[np..].fill(0.0);
                    }
                    Ok(())
                },
            )
            .collect::<Result<()>>()
    }

    /// Semidiscrete right-hand side `dU/dt`.
    pub fn compute_rhs(&self, u: &SolutionStore, ws: &mut Workspace, out: &mut SolutionStore) -> Result<()> {
        debug_assert!(u.block == self.block && out.block == self.block);
        self.rhs_slices(&u.data, ws, &mut out.data)
    }

    /// [`compute_rhs`](Self::compute_rhs) on raw store data in this
    /// discretization's layout.
    pub fn rhs_slices(&self, u: &[f64], ws: &mut Workspace, out: &mut [f64]) -> Result<()> {
        self.prepare(u, ws);
        self.volume_kernel(u, ws, out)?;
        self.surface_kernel(ws, out)
    }

    /// Largest stable pseudo-time step, `CFL h / ((p+1)^2 (lambda + eps (p+1)^2 / h))`
    /// minimized over elements.
    pub fn compute_timestep(&self, u: &SolutionStore, cfl: f64) -> Result<f64> {
        if !(cfl > 0.0) {
            return Err(Error::Config(format!("CFL must be positive, got {cfl}")));
        }
        let pp = ((self.re.degree + 1) * (self.re.degree + 1)) as f64;
        let gas = self.physics.gas;
        let dts: Vec<f64> = (0..self.n_elements())
            .into_par_iter()
            .map(|k| {
                let h = self.h[k];
                let mut lam: f64 = 0.0;
                for i in 0..self.re.n_basis {
                    let s: State = std::array::from_fn(|c| self.field(&u.data, k, c)[i]);
                    lam = lam.max(max_wavespeed_any(&s, &gas).map_err(|e| e.at(k, i))?);
                }
                let eps = self.viscosity_of(&u.data, k);
                if !(h > 0.0) || !(lam > 0.0) {
                    return Err(Error::Domain(format!(
                        "element {k}: nonpositive size {h} or wave speed {lam}"
                    )));
                }
                Ok(cfl * h / (pp * (lam + eps * pp / h)))
            })
            .collect::<Result<_>>()?;
        Ok(dts.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// `sum_k 1^T M_k r_k` for field `c`: the global integral of `r`.
    pub fn integral(&self, r: &SolutionStore, c: usize) -> f64 {
        let mut total = 0.0;
        for (k, ops) in self.ops.iter().enumerate() {
            let rk = r.field(k, c);
            for i in 0..ops.n_p {
                for j in 0..ops.n_p {
                    total += ops.mass[(i, j)] * rk[j];
                }
            }
        }
        total
    }
}
