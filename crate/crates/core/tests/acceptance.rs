//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). Set `ACCEPTANCE_ONLY=3,8` to
//! run a subset and `ACCEPTANCE_STRICT=1` to exit nonzero on any FAIL.

#![allow(clippy::type_complexity)]

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use common::fixtures::*;
use common::*;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tetdg::cli::with_threads;
use tetdg::curving::nurbs::{bilinear_patch, sphere_patches};
use tetdg::curving::projection::closest_point_patches;
use tetdg::curving::{
    closest_point, curve_pipeline, solve_elasticity, sphere_displacement, CurvedMesh, ElasticMaterial,
    ElasticityOptions, SurfaceModel,
};
use tetdg::euler::{
    hllc_flux, normal_flux, smoothness_indicator, viscosity_ramp, BoundaryKind, RiemannSolver, State, ViscosityModel,
    NVAR,
};
use tetdg::mesh::generate::{box_mesh, sphere_shell, ShellParams};
use tetdg::mesh::{extract_submesh, BoundingBox, Mesh, Vec3};
use tetdg::operators::{compute_mapping, padded_len};
use tetdg::refelem::{self, basis, n_basis, ReferenceElement, FACE_VERTICES, REF_VERTICES};
use tetdg::solver::{
    rk_step, run_steady, solver_reference, Discretization, RkScheme, RunConfig, SolutionStore, SteadyResult,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Sphere fixture of criteria 3, 8, 10, 11 and 12: half shell (symmetry
/// plane z = 0) around the unit sphere, far field at radius 4.
fn fixture_shell() -> ShellParams {
    ShellParams {
        n: 2,
        layers: 3,
        r_inner: 1.0,
        r_outer: 4.0,
        half: true,
    }
}

const FIXTURE_BOX: BoundingBox = BoundingBox {
    lo: [-2.5; 3],
    hi: [2.5; 3],
};

/// Free-stream RHS norms measured on the sphere fixture when this suite
/// was set up; a later run may not exceed them by more than 10x.
const CURVED_FREESTREAM_BASELINE: [(usize, bool, f64); 3] = [(2, false, 1e-12), (3, true, 1e-11), (4, true, 1e-10)];

fn curved_fixture(p: usize) -> (Mesh, CurvedMesh) {
    let shell = fixture_shell();
    let mesh = sphere_shell(&shell).unwrap();
    let (curved, _) = curve_pipeline(
        &mesh,
        FIXTURE_BOX,
        "wall",
        &["symmetry".to_string()],
        &SurfaceModel::Sphere {
            center: [0.0; 3],
            radius: 1.0,
        },
        &ElasticMaterial::new(1.0, 0.0).unwrap(),
        p,
        &ReferenceElement::new(p).unwrap(),
        &ElasticityOptions::default(),
    )
    .unwrap();
    (mesh, curved)
}

fn rhs(disc: &Discretization, u: &SolutionStore) -> SolutionStore {
    let mut ws = disc.workspace();
    let mut out = disc.new_store();
    disc.compute_rhs(u, &mut ws, &mut out).unwrap();
    out
}

fn face_corners(f: usize) -> [[f64; 3]; 3] {
    let [a, b, c] = FACE_VERTICES[f];
    [REF_VERTICES[a], REF_VERTICES[b], REF_VERTICES[c]]
}

fn c1_operator_exactness() -> Outcome {
    let start = Instant::now();
    let (mut ortho, mut cub, mut face, mut deriv) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let oracle = dense_tet_rule(8);
    for p in 1..=5 {
        let nb = n_basis(p);
        let mut gram = vec![0.0; nb * nb];
        for (x, w) in &oracle {
            let v = basis::eval_point(p, x);
            for a in 0..nb {
                for b in 0..nb {
                    gram[a * nb + b] += w * v[a] * v[b];
                }
            }
        }
        for a in 0..nb {
            for b in 0..nb {
                let e = if a == b { 1.0 } else { 0.0 };
                ortho = ortho.max((gram[a * nb + b] - e).abs());
            }
        }
        let re = ReferenceElement::new(p).unwrap();
        let dense = dense_tet_rule(p + 3);
        for e in monomials(2 * p + 1) {
            let exact: f64 = dense.iter().map(|(x, w)| w * monomial(e, x)).sum();
            let got: f64 = re
                .cub_nodes
                .iter()
                .zip(&re.cub_weights)
                .map(|(x, w)| w * monomial(e, x))
                .sum();
            cub = cub.max((exact - got).abs());
        }
        let ng = re.n_face();
        for f in 0..4 {
            let [a, b, c] = face_corners(f);
            let tri = dense_triangle_rule(p + 2, a, b, c);
            let t = refelem::face_tangents(f);
            let cr = [
                t[0][1] * t[1][2] - t[0][2] * t[1][1],
                t[0][2] * t[1][0] - t[0][0] * t[1][2],
                t[0][0] * t[1][1] - t[0][1] * t[1][0],
            ];
            let jac = (cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]).sqrt();
            for e in monomials(2 * p) {
                let exact: f64 = tri.iter().map(|(x, w)| w * monomial(e, x)).sum();
                let got: f64 = (0..ng)
                    .map(|q| re.face_weights[q] * jac * monomial(e, &re.face_nodes[f * ng + q]))
                    .sum();
                face = face.max((exact - got).abs());
            }
        }
        for e in monomials(p) {
            let nodal = DVector::from_iterator(re.n_basis, re.colloc_nodes.iter().map(|x| monomial(e, x)));
            for axis in 0..3 {
                let d = &re.deriv_cub[axis] * &nodal;
                for (q, x) in re.cub_nodes.iter().enumerate() {
                    let mut de = e;
                    let exact = if e[axis] == 0 {
                        0.0
                    } else {
                        de[axis] -= 1;
                        e[axis] as f64 * monomial(de, x)
                    };
                    deriv = deriv.max((d[q] - exact).abs());
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        ortho < 1e-10 && cub < 1e-12 && face < 1e-12 && deriv < 1e-12 && secs < 10.0,
        format!(
            "p<=5: orthonormality {ortho:.1e} (<1e-10), cubature 2p+1 {cub:.1e}, face 2p {face:.1e}, D_r {deriv:.1e} (<1e-12), {secs:.1} s (<10 s)"
        ),
    )
}

fn c2_counts() -> Outcome {
    let re = ReferenceElement::new(4).unwrap();
    let counts = (re.n_basis, re.n_cub(), re.n_face());
    outcome(
        counts == (35, 70, 16),
        format!(
            "p=4: N_p {}, N_cub {}, face nodes {} per face (35/70/16)",
            counts.0, counts.1, counts.2
        ),
    )
}

fn c3_free_stream() -> Outcome {
    let start = Instant::now();
    let mesh = box_mesh([1; 3], [0.0; 3], [1.0; 3]).unwrap();
    let fs = sphere_freestream();
    let mut straight = Vec::new();
    for p in 1..=4 {
        let disc = straight_disc(
            &mesh,
            ReferenceElement::new(p).unwrap(),
            BoundaryKind::Farfield,
            physics(RiemannSolver::Hllc, ViscosityModel::off()),
            true,
        );
        straight.push(rhs(&disc, &disc.uniform(&fs)).max_abs());
    }
    let mut curved = Vec::new();
    for &(p, exact, base) in &CURVED_FREESTREAM_BASELINE {
        let (mesh, geom) = curved_fixture(p);
        let re = solver_reference(p, exact).unwrap();
        let disc = Discretization::new(
            &mesh,
            &geom,
            re,
            &uniform_bcs(&mesh, BoundaryKind::Farfield),
            physics(RiemannSolver::Hllc, ViscosityModel::off()),
            true,
        )
        .unwrap();
        curved.push((p, exact, base, rhs(&disc, &disc.uniform(&fs)).max_abs()));
    }
    let secs = start.elapsed().as_secs_f64();
    let s_ok = straight.iter().all(|&r| r < 1e-12);
    let c_ok = curved.iter().all(|&(_, _, base, r)| r < 1e-8 && r <= 10.0 * base);
    let s_txt: Vec<String> = straight
        .iter()
        .enumerate()
        .map(|(i, r)| format!("p{} {r:.1e}", i + 1))
        .collect();
    let c_txt: Vec<String> = curved
        .iter()
        .map(|(p, e, b, r)| {
            format!(
                "p{p}{} {r:.1e} (baseline {b:.0e})",
                if *e { " metric-exact" } else { "" }
            )
        })
        .collect();
    outcome(
        s_ok && c_ok && secs < 30.0,
        format!(
            "unit cube [{}] (<1e-12); sphere fixture [{}] (<1e-8); {secs:.1} s (<30 s)",
            s_txt.join(", "),
            c_txt.join(", ")
        ),
    )
}

fn c4_conservation() -> Outcome {
    let mesh = box_mesh([2; 3], [0.0; 3], [1.0; 3]).unwrap();
    let mut worst = 0.0f64;
    for riemann in [RiemannSolver::Llf, RiemannSolver::Hllc] {
        let disc = straight_disc(
            &mesh,
            ReferenceElement::new(3).unwrap(),
            BoundaryKind::SlipWall,
            physics(riemann, ViscosityModel::off()),
            true,
        );
        for seed in 0..100 {
            let u = random_field(&disc, &sphere_freestream(), 0.2, seed);
            worst = worst.max(disc.integral(&rhs(&disc, &u), 0).abs());
        }
    }
    outcome(
        worst < 1e-11,
        format!(
            "closed slip-wall box, p=3, 100 random states x {{LLF, HLLC}}: max |mass integral| {worst:.1e} (<1e-11)"
        ),
    )
}

fn rotate(q: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| q[i][0] * v[0] + q[i][1] * v[1] + q[i][2] * v[2])
}

fn rotate_state(q: &[[f64; 3]; 3], u: &State) -> State {
    let m = rotate(q, &[u[1], u[2], u[3]]);
    [u[0], m[0], m[1], m[2], u[4]]
}

fn random_rotation(rng: &mut impl Rng) -> [[f64; 3]; 3] {
    let q: [f64; 4] = loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 {
            break q.map(|x| x / n);
        }
    };
    let [w, x, y, z] = q;
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

/// Largest componentwise difference relative to the largest magnitude.
fn rel(a: &State, b: &State) -> f64 {
    let scale = a.iter().chain(b).fold(f64::MIN_POSITIVE, |m, x| m.max(x.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

fn c5_riemann() -> Outcome {
    let g = gas();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut cons, mut anti, mut rot, mut contact) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let a = random_state(&mut rng, &g);
        let b = random_state(&mut rng, &g);
        let n = unit_normal(&mut rng);
        let q = random_rotation(&mut rng);
        for s in [RiemannSolver::Llf, RiemannSolver::Hllc] {
            cons = cons.max(rel(&s.flux(&a, &a, &n, &g).unwrap(), &normal_flux(&a, &n, &g).unwrap()));
            let f = s.flux(&a, &b, &n, &g).unwrap();
            let back = s.flux(&b, &a, &n.map(|x| -x), &g).unwrap();
            anti = anti.max(rel(&f, &back.map(|x| -x)));
            let fr = s
                .flux(&rotate_state(&q, &a), &rotate_state(&q, &b), &rotate(&q, &n), &g)
                .unwrap();
            rot = rot.max(rel(&rotate_state(&q, &f), &fr));
        }
        // Contact: equal pressure and normal velocity, arbitrary density and
        // tangential velocity.
        let (rl, rr, p) = (
            rng.gen_range(0.2..3.0),
            rng.gen_range(0.2..3.0),
            rng.gen_range(0.2..3.0),
        );
        let vn = rng.gen_range(-1.0..1.0);
        let t = unit_normal(&mut rng);
        let tl: Vec3 = std::array::from_fn(|i| t[i] - (t[0] * n[0] + t[1] * n[1] + t[2] * n[2]) * n[i]);
        let vl: Vec3 = std::array::from_fn(|i| vn * n[i] + 0.7 * tl[i]);
        let vr: Vec3 = std::array::from_fn(|i| vn * n[i] - 0.4 * tl[i]);
        let (l, r) = (g.conserved(rl, vl, p), g.conserved(rr, vr, p));
        let up = if vn >= 0.0 { &l } else { &r };
        contact = contact.max(rel(
            &hllc_flux(&l, &r, &n, &g).unwrap(),
            &normal_flux(up, &n, &g).unwrap(),
        ));
    }
    outcome(
        cons < 1e-10 && anti < 1e-10 && rot < 1e-10 && contact < 1e-12,
        format!(
            "1000 pairs, LLF+HLLC: consistency {cons:.1e}, antisymmetry {anti:.1e}, rotation {rot:.1e} (<1e-10 rel); HLLC contact {contact:.1e} (<1e-12)"
        ),
    )
}

fn c6_rk_order() -> Outcome {
    let scheme = RkScheme::low_storage_rk45();
    let err = |n: usize| {
        let dt = 1.0 / n as f64;
        let (mut y, mut r, mut k) = ([1.0], [0.0], [0.0]);
        for i in 0..n {
            rk_step(&mut y, &mut r, &mut k, i as f64 * dt, dt, &scheme, |_, u, o| {
                o[0] = -u[0];
                Ok(())
            })
            .unwrap();
        }
        (y[0] - (-1.0f64).exp()).abs()
    };
    let e: Vec<f64> = (0..6).map(|i| err(8 << i)).collect();
    let slopes: Vec<f64> = e.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let ok = slopes.iter().all(|s| (s - 4.0).abs() <= 0.1);
    let txt: Vec<String> = slopes.iter().map(|s| format!("{s:.3}")).collect();
    outcome(
        ok,
        format!(
            "dy/dt=-y to t=1, dt=1/8..1/256: slopes [{}] (4.0 +- 0.1)",
            txt.join(", ")
        ),
    )
}

fn c7_viscosity() -> Outcome {
    let m = ViscosityModel::standard();
    let mut mid_exact = true;
    let mut jump = 0.0f64;
    for p in 1..=6 {
        let s0 = m.s0(p);
        mid_exact &= viscosity_ramp(s0, s0, &m) == 0.5 * m.eps0;
        for (edge, outside) in [(s0 - m.kappa, 0.0), (s0 + m.kappa, m.eps0)] {
            for s in [edge, edge - 1e-12, edge + 1e-12] {
                jump = jump.max((viscosity_ramp(s, s0, &m) - outside).abs());
            }
        }
    }
    // Indicator: zero top-degree modes.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut zero_top = true;
    for p in 1..=5 {
        let nl = n_basis(p - 1);
        let mut modal: Vec<f64> = (0..n_basis(p)).map(|_| rng.gen_range(-1.0..1.0)).collect();
        modal[nl..].fill(0.0);
        zero_top &= smoothness_indicator(&modal, nl) == 0.0;
    }
    // The same through the solver: a degree-(p-1) density gives eps = 0.
    let re = ReferenceElement::new(3).unwrap();
    let disc = straight_disc(
        &box_mesh([1; 3], [0.0; 3], [1.0; 3]).unwrap(),
        re.clone(),
        BoundaryKind::Farfield,
        physics(RiemannSolver::Hllc, m),
        true,
    );
    let mut u = disc.uniform(&sphere_freestream());
    for k in 0..disc.n_elements() {
        for (i, x) in re.colloc_nodes.iter().enumerate() {
            u.field_mut(k, 0)[i] = 1.0 + 0.1 * x[0] * x[1] - 0.05 * x[2];
        }
    }
    let solver_eps = (0..disc.n_elements())
        .map(|k| disc.element_viscosity(&u, k))
        .fold(0.0, f64::max);
    let off = ViscosityModel::off();
    let presets = m.eps0 == 0.3 && m.kappa == 4.0 && off.eps0 == 0.0 && off.kappa == 4.0;
    outcome(
        mid_exact && jump < 1e-14 && zero_top && solver_eps == 0.0 && presets,
        format!(
            "eps(s0) = eps0/2 exact: {mid_exact}; jump at s0 +- kappa {jump:.1e} (<1e-14); S_k = 0 with zero top modes: {zero_top}, solver eps {solver_eps:e}; presets (0.3, 4) and (0, 4): {presets}"
        ),
    )
}

const A: [[f64; 3]; 3] = [[0.02, -0.01, 0.03], [0.015, 0.01, -0.02], [-0.01, 0.025, 0.005]];

fn c8_curving() -> Outcome {
    // Patch test: all box faces prescribed with an affine field.
    let mut boxm = box_mesh([2; 3], [0.0; 3], [1.0; 3]).unwrap();
    for b in &mut boxm.boundary_faces {
        b.tag = "wall".into();
    }
    let sub = extract_submesh(
        &boxm,
        BoundingBox {
            lo: [-1.0; 3],
            hi: [2.0; 3],
        },
        "wall",
        &[],
    )
    .unwrap();
    let affine = |x: &Vec3| -> Vec3 { std::array::from_fn(|i| 0.01 + (0..3).map(|j| A[i][j] * x[j]).sum::<f64>()) };
    let mut patch = 0.0f64;
    for p in 1..=4 {
        let field = solve_elasticity(
            &boxm,
            &sub,
            &ElasticMaterial::new(1.0, 0.3).unwrap(),
            &|x: &Vec3| Ok(affine(x)),
            p,
            &ElasticityOptions::default(),
        )
        .unwrap();
        for (x, u) in field.node_pos.iter().zip(&field.displacement) {
            let e = affine(x);
            patch = patch.max((0..3).map(|c| (u[c] - e[c]).abs()).fold(0.0, f64::max));
        }
    }
    // E-invariance on the sphere fixture.
    let mesh = sphere_shell(&fixture_shell()).unwrap();
    let sym = ["symmetry".to_string()];
    let sub = extract_submesh(&mesh, FIXTURE_BOX, "wall", &sym).unwrap();
    let g = |x: &Vec3| sphere_displacement(&[0.0; 3], 1.0, x);
    let solve = |e: f64| {
        solve_elasticity(
            &mesh,
            &sub,
            &ElasticMaterial::new(e, 0.3).unwrap(),
            &g,
            4,
            &ElasticityOptions::default(),
        )
        .unwrap()
    };
    let base = solve(1.0);
    let scale = base.displacement.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut e_diff = 0.0f64;
    for e in [1e-3, 1e3] {
        let other = solve(e);
        for (a, b) in base.displacement.iter().zip(&other.displacement) {
            e_diff = e_diff.max((0..3).map(|c| (a[c] - b[c]).abs()).fold(0.0, f64::max));
        }
    }
    let e_rel = e_diff / scale;
    // Surface nodes and Jacobians of the curved fixture at p = 4.
    let (mesh, curved) = curved_fixture(4);
    let re = ReferenceElement::new(4).unwrap();
    let mut radius = 0.0f64;
    for b in mesh.boundary_faces.iter().filter(|b| b.tag == "wall") {
        let nodes = curved.element_nodes(&mesh, b.element, &re);
        for i in re.face_node_indices(b.face) {
            radius = radius.max((nodes[i].iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs());
        }
    }
    let min_jac = curved
        .curved
        .keys()
        .map(|&k| {
            compute_mapping(k, &curved.element_nodes(&mesh, k, &re), &re)
                .map(|g| g.min_jac())
                .unwrap_or(f64::NEG_INFINITY)
        })
        .fold(f64::INFINITY, f64::min);
    outcome(
        patch < 1e-9 && e_rel < 1e-9 && radius < 1e-6 && min_jac > 0.0,
        format!(
            "patch test p=1..4 {patch:.1e} (<1e-9); E in {{1e-3, 1, 1e3}} max rel diff {e_rel:.1e} (<1e-9, CG tol 1e-12); wall nodes |r-1| {radius:.1e} (<1e-6); min curved Jacobian {min_jac:.3e} (>0) over {} curved elements",
            curved.curved.len()
        ),
    )
}

fn c9_projection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (c, r) = ([0.2, -0.1, 0.3], 1.5);
    let patches = sphere_patches(c, r);
    let mut sphere = 0.0f64;
    for _ in 0..1000 {
        let d = unit_normal(&mut rng);
        let dist = rng.gen_range(0.2..4.0) * r;
        let x: Vec3 = std::array::from_fn(|i| c[i] + dist * d[i]);
        let got = closest_point_patches(&patches, &x).map(|(_, p)| p.point);
        let err = match got {
            Ok(p) => (0..3).map(|i| (p[i] - (c[i] + r * d[i])).abs()).fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        };
        sphere = sphere.max(err);
    }
    let o = [0.5, 0.2, -0.1];
    let (e1, e2) = ([1.0, 0.5, 0.0], [0.0, 0.4, 1.2]);
    let at = |s: f64, t: f64| -> Vec3 { std::array::from_fn(|i| o[i] + s * e1[i] + t * e2[i]) };
    let plane = bilinear_patch(at(0.0, 0.0), at(1.0, 0.0), at(0.0, 1.0), at(1.0, 1.0));
    let nrm = [
        e1[1] * e2[2] - e1[2] * e2[1],
        e1[2] * e2[0] - e1[0] * e2[2],
        e1[0] * e2[1] - e1[1] * e2[0],
    ];
    let mut flat = 0.0f64;
    for _ in 0..1000 {
        let (s, t, h) = (
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(-3.0..3.0),
        );
        let foot = at(s, t);
        let x: Vec3 = std::array::from_fn(|i| foot[i] + h * nrm[i]);
        let err = match closest_point(&plane, &x, None) {
            Ok(p) => (0..3).map(|i| (p.point[i] - foot[i]).abs()).fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        };
        flat = flat.max(err);
    }
    outcome(
        sphere < 1e-8 && flat < 1e-8,
        format!("1000 queries each: sphere (8 rational patches) {sphere:.1e}, tilted plane {flat:.1e} (<1e-8)"),
    )
}

fn sphere_config(schedule: Vec<usize>) -> RunConfig {
    RunConfig {
        riemann: RiemannSolver::Hllc,
        cfl: 0.5,
        viscosity: ViscosityModel::off(),
        schedule,
        tolerance: 1e-6,
        level_tolerance: 1e-4,
        check_interval: 100,
        max_iterations: 60_000,
        metric_exact_quadrature: true,
        ..RunConfig::default()
    }
}

/// Residual targets of the work comparison: p = 4 costs 0.25 s per
/// iteration on the fixture, so the last level stops at 1e-4 and the
/// coarse levels only clear the initial transient.
const WORK_TOLERANCE: f64 = 1e-4;
const WORK_LEVEL_TOLERANCE: f64 = 1e-2;

fn run_sphere(config: RunConfig, curved_degree: usize) -> (Mesh, tetdg::Result<SteadyResult>, f64) {
    let start = Instant::now();
    let (mesh, curved) = curved_fixture(curved_degree);
    let r = run_steady(&config, &mesh, &curved, &sphere_bcs(true), gas(), sphere_freestream());
    (mesh, r, start.elapsed().as_secs_f64())
}

/// Residual samples of one level.
fn level_history(res: &SteadyResult, degree: usize) -> Vec<f64> {
    res.history
        .iter()
        .filter(|s| s.degree == degree)
        .map(|s| s.residual)
        .collect()
}

/// Largest ratio between consecutive block maxima (blocks of `ENVELOPE`
/// samples) after the transient, taken as the first quarter of the level.
/// Below 1 means the residual envelope decreases monotonically.
fn envelope_ratio(h: &[f64]) -> f64 {
    let maxima: Vec<f64> = h[h.len() / 4..]
        .chunks(ENVELOPE)
        .map(|c| c.iter().copied().fold(0.0, f64::max))
        .collect();
    maxima.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max)
}

/// Sample-to-sample increase, reported for reference only: the inf-norm
/// residual oscillates by 10-20% between checks on the fixture.
fn raw_increase(h: &[f64]) -> f64 {
    h[h.len() / 4..]
        .windows(2)
        .map(|w| w[1] / w[0] - 1.0)
        .fold(f64::NEG_INFINITY, f64::max)
}

const ENVELOPE: usize = 10;

/// Largest fore-aft density difference at wall vertices, relative to the
/// density range over the wall.
fn symmetry_error(mesh: &Mesh, state: &SolutionStore, p: usize) -> f64 {
    let re = ReferenceElement::new(p).unwrap();
    let corner: Vec<usize> = (0..4)
        .map(|v| re.lattice.iter().position(|l| l[v] == p).unwrap())
        .collect();
    let mut sum: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for b in mesh.boundary_faces.iter().filter(|b| b.tag == "wall") {
        let fv = FACE_VERTICES[b.face];
        for &lv in &fv {
            let gv = mesh.tets[b.element][lv];
            let e = sum.entry(gv).or_insert((0.0, 0));
            e.0 += state.field(b.element, 0)[corner[lv]];
            e.1 += 1;
        }
    }
    let rho: BTreeMap<usize, f64> = sum.into_iter().map(|(v, (s, n))| (v, s / n as f64)).collect();
    let (lo, hi) = rho
        .values()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let mut worst = 0.0f64;
    for (&v, &r) in &rho {
        let x = mesh.vertices[v];
        let mirror = rho.iter().find(|(w, _)| {
            let y = mesh.vertices[**w];
            (y[0] + x[0]).abs() < 1e-9 && (y[1] - x[1]).abs() < 1e-9 && (y[2] - x[2]).abs() < 1e-9
        });
        if let Some((_, &rm)) = mirror {
            worst = worst.max((r - rm).abs());
        }
    }
    worst / (hi - lo)
}

fn c10_convergence() -> (Outcome, Option<f64>) {
    let (mesh, r, secs) = run_sphere(sphere_config(vec![2, 3]), 3);
    let res = match r {
        Ok(r) => r,
        Err(e) => return (outcome(false, format!("sphere [2,3] failed: {e}")), None),
    };
    let last = res.levels.last().unwrap();
    let hist: Vec<Vec<f64>> = [2, 3].iter().map(|&p| level_history(&res, p)).collect();
    let env: Vec<f64> = hist.iter().map(|h| envelope_ratio(h)).collect();
    let raw: Vec<f64> = hist.iter().map(|h| raw_increase(h)).collect();
    let monotone = env.iter().all(|&r| r < 1.0);
    let sym = symmetry_error(&mesh, &res.state, 3);
    let iters: Vec<String> = res
        .levels
        .iter()
        .map(|l| format!("p{} {} it", l.degree, l.iterations))
        .collect();
    (
        outcome(
            res.converged() && monotone && sym < 0.05,
            format!(
                "{} tets, [2,3]: residual {:.2e} (<1e-6), {}; post-transient envelope ratio p2 {:.2}, p3 {:.2} (<1; raw sample increase up to {:+.0}%, {:+.0}%); fore-aft density asymmetry {:.2}% (<5%); {secs:.0} s",
                mesh.n_elements(),
                last.residual,
                iters.join(", "),
                env[0],
                env[1],
                100.0 * raw[0],
                100.0 * raw[1],
                100.0 * sym
            ),
        ),
        Some(secs),
    )
}

fn c11_p_refinement() -> Outcome {
    let config = |schedule| RunConfig {
        tolerance: WORK_TOLERANCE,
        level_tolerance: WORK_LEVEL_TOLERANCE,
        ..sphere_config(schedule)
    };
    let (_, direct, s2) = run_sphere(config(vec![4]), 4);
    let (_, staged, s1) = run_sphere(config(vec![2, 3, 4]), 4);
    let its = |r: &SteadyResult| {
        r.levels
            .iter()
            .map(|l| format!("p{} {}", l.degree, l.iterations))
            .collect::<Vec<_>>()
            .join("/")
    };
    let head = format!("to {WORK_TOLERANCE:.0e} (levels {WORK_LEVEL_TOLERANCE:.0e})");
    match (staged, direct) {
        (Ok(a), Ok(b)) => outcome(
            a.converged() && b.converged() && a.total_work() < b.total_work(),
            format!(
                "{head}: work [2,3,4] {:.3e} ({} it, {s1:.0} s) vs [4] {:.3e} ({} it, {s2:.0} s), ratio {:.2} (<1); residuals {:.1e}, {:.1e}",
                a.total_work(),
                its(&a),
                b.total_work(),
                its(&b),
                a.total_work() / b.total_work(),
                a.levels.last().unwrap().residual,
                b.levels.last().unwrap().residual
            ),
        ),
        // The pure run never reaches the target, so it has no finite work.
        (Ok(a), Err(e)) => outcome(
            a.converged(),
            format!(
                "{head}: [2,3,4] reached {:.1e} with work {:.3e} ({} it, {s1:.0} s); pure [4] stopped after {s2:.1} s: {e}",
                a.levels.last().unwrap().residual,
                a.total_work(),
                its(&a)
            ),
        ),
        (a, b) => outcome(false, format!("{head}: staged {:?}, direct {:?}", a.err(), b.err())),
    }
}

fn c12_layout() -> Outcome {
    let mut aligned = true;
    for p in 1..=6 {
        let s = SolutionStore::new(7, NVAR, n_basis(p), true);
        aligned &= (0..7).all(|k| (0..NVAR).all(|c| s.offset(k, c).is_multiple_of(16)));
    }
    let b35 = padded_len(35);
    let (mesh, curved) = curved_fixture(4);
    let bcs = sphere_bcs(true);
    let visc = ViscosityModel {
        eps0: 0.05,
        kappa: 4.0,
        s0_offset: -100.0,
    };
    let re = solver_reference(4, true).unwrap();
    let build = |padded| {
        Discretization::new(
            &mesh,
            &curved,
            re.clone(),
            &bcs,
            physics(RiemannSolver::Hllc, visc),
            padded,
        )
        .unwrap()
    };
    let (a, b) = (build(true), build(false));
    let u = random_field(&a, &sphere_freestream(), 0.05, 1);
    let bits = |s: &SolutionStore| s.unpack().into_iter().map(f64::to_bits).collect::<Vec<u64>>();
    let same_layout = bits(&rhs(&a, &u)) == bits(&rhs(&b, &u.relayout(false)));
    let steps = |threads: usize| {
        with_threads(threads, || {
            let mut x = u.clone();
            let mut ws = a.workspace();
            let mut k = a.new_store();
            let mut r = vec![0.0; x.data.len()];
            for _ in 0..3 {
                let dt = a.compute_timestep(&x, 0.3).unwrap();
                rk_step(
                    &mut x.data,
                    &mut r,
                    &mut k.data,
                    0.0,
                    dt,
                    &RkScheme::low_storage_rk45(),
                    |_, y, o| a.rhs_slices(y, &mut ws, o),
                )
                .unwrap();
            }
            bits(&x)
        })
    };
    let one = steps(1);
    let threads_ok = [2, 4, 8].iter().all(|&t| steps(t) == one);
    outcome(
        aligned && b35 == 48 && same_layout && threads_ok,
        format!(
            "offsets mod 16 == 0 for p=1..6: {aligned}; B_p(35) = {b35}; padded == unpadded RHS bitwise (p=4, viscous): {same_layout}; 3 RK steps bitwise equal on 1/2/4/8 threads: {threads_ok}"
        ),
    )
}

fn main() {
    let _ = env_logger::builder().is_test(false).try_init();
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let wanted = |n: usize| only.as_ref().is_none_or(|o| o.contains(&n));
    let criteria: Vec<(usize, &str, fn() -> Outcome)> = vec![
        (1, "operator exactness", c1_operator_exactness),
        (2, "node counts", c2_counts),
        (3, "free-stream preservation", c3_free_stream),
        (4, "discrete conservation", c4_conservation),
        (5, "Riemann solver properties", c5_riemann),
        (6, "RK order", c6_rk_order),
        (7, "viscosity model", c7_viscosity),
        (8, "mesh curving", c8_curving),
        (9, "closest-point projection", c9_projection),
        (10, "sphere convergence", || c10_convergence().0),
        (11, "p-refinement trend", c11_p_refinement),
        (12, "layout and determinism", c12_layout),
    ];
    let mut failed = 0;
    for (n, name, run) in criteria {
        if !wanted(n) {
            continue;
        }
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {n:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{failed} criteria failed");
    if failed > 0 && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
