//! Legacy ASCII VTK export of nodal DG fields.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::euler::{pressure, Gas, NVAR};
use crate::mesh::{signed_volume, Vec3};
use crate::refelem::ReferenceElement;
use crate::solver::SolutionStore;

/// Split of the degree-`p` node lattice into `p^3` linear tets, as local
/// node indices. Each lattice cell contributes an upright tet, the four
/// tets of the octahedron between them, and an inverted tet.
pub fn lattice_subtets(re: &ReferenceElement) -> Vec<[usize; 4]> {
    let p = re.degree;
    if p == 0 {
        return vec![];
    }
    let index: HashMap<[usize; 3], usize> = re
        .lattice
        .iter()
        .enumerate()
        .map(|(n, l)| ([l[1], l[2], l[3]], n))
        .collect();
    let at = |i: usize, j: usize, k: usize| index[&[i, j, k]];
    let mut out = Vec::with_capacity(p * p * p);
    for i in 0..p {
        for j in 0..p - i {
            for k in 0..p - i - j {
                let s = i + j + k;
                out.push([at(i, j, k), at(i + 1, j, k), at(i, j + 1, k), at(i, j, k + 1)]);
                if s + 2 <= p {
                    let a = at(i + 1, j, k);
                    let b = at(i, j + 1, k);
                    let c = at(i, j, k + 1);
                    let d = at(i + 1, j + 1, k);
                    let e = at(i + 1, j, k + 1);
                    let f = at(i, j + 1, k + 1);
                    out.push([a, f, b, d]);
                    out.push([a, f, d, e]);
                    out.push([a, f, e, c]);
                    out.push([a, f, c, b]);
                }
                if s + 3 <= p {
                    out.push([
                        at(i + 1, j + 1, k),
                        at(i + 1, j, k + 1),
                        at(i, j + 1, k + 1),
                        at(i + 1, j + 1, k + 1),
                    ]);
                }
            }
        }
    }
    out
}

/// Legacy VTK unstructured grid with density, velocity, pressure and Mach
/// number at every collocation node and the element viscosity per cell.
pub fn export_vtk(
    nodes: &[Vec<Vec3>],
    state: &SolutionStore,
    eps: &[f64],
    re: &ReferenceElement,
    gas: &Gas,
) -> Result<String> {
    let ne = nodes.len();
    let np = re.n_basis;
    if state.len != np || state.n_elements != ne || state.n_fields != NVAR || eps.len() != ne {
        return Err(Error::Format(format!(
            "state with {} nodes per element does not match degree {} ({} nodes)",
            state.len, re.degree, np
        )));
    }
    let sub = lattice_subtets(re);
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "tetdg solution, degree {}", re.degree);
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", ne * np);
    for el in nodes {
        for x in el {
            let _ = writeln!(s, "{} {} {}", x[0], x[1], x[2]);
        }
    }
    let nc = ne * sub.len();
    let _ = writeln!(s, "CELLS {} {}", nc, 5 * nc);
    for (k, el) in nodes.iter().enumerate() {
        for t in &sub {
            let v = t.map(|i| el[i]);
            let t = if signed_volume(&v) < 0.0 {
                [t[0], t[1], t[3], t[2]]
            } else {
                *t
            };
            let b = k * np;
            let _ = writeln!(s, "4 {} {} {} {}", b + t[0], b + t[1], b + t[2], b + t[3]);
        }
    }
    let _ = writeln!(s, "CELL_TYPES {nc}");
    for _ in 0..nc {
        let _ = writeln!(s, "10");
    }
    let _ = writeln!(s, "CELL_DATA {nc}");
    let _ = writeln!(s, "SCALARS viscosity double 1");
    let _ = writeln!(s, "LOOKUP_TABLE default");
    for e in eps {
        for _ in 0..sub.len() {
            let _ = writeln!(s, "{e}");
        }
    }
    let mut rho = String::new();
    let mut vel = String::new();
    let mut pre = String::new();
    let mut mach = String::new();
    for k in 0..ne {
        for i in 0..np {
            let u: [f64; NVAR] = std::array::from_fn(|c| state.field(k, c)[i]);
            let p = pressure(&u, gas).map_err(|e| e.at(k, i))?;
            let v: Vec3 = std::array::from_fn(|d| u[d + 1] / u[0]);
            let speed = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            let c = (gas.gamma * p.max(0.0) / u[0]).sqrt();
            let _ = writeln!(rho, "{}", u[0]);
            let _ = writeln!(vel, "{} {} {}", v[0], v[1], v[2]);
            let _ = writeln!(pre, "{p}");
            let _ = writeln!(mach, "{}", if c > 0.0 { speed / c } else { 0.0 });
        }
    }
    let _ = writeln!(s, "POINT_DATA {}", ne * np);
    for (name, body) in [("density", &rho), ("pressure", &pre), ("mach", &mach)] {
        let _ = writeln!(s, "SCALARS {name} double 1");
        let _ = writeln!(s, "LOOKUP_TABLE default");
        s.push_str(body);
    }
    let _ = writeln!(s, "VECTORS velocity double");
    s.push_str(&vel);
    Ok(s)
}
