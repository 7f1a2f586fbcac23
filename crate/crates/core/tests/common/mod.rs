//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};

/// Gauss-Legendre rule on [-1, 1] by Golub-Welsch (eigenvalues of the Jacobi matrix).
pub fn golub_welsch(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let b = kf / (4.0 * kf * kf - 1.0).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Dense collapsed-coordinate rule on the reference tetrahedron, `n^3` points.
pub fn dense_tet_rule(n: usize) -> Vec<([f64; 3], f64)> {
    let (x, w) = golub_welsch(n);
    let mut out = Vec::new();
    for (xa, wa) in x.iter().zip(&w) {
        for (xb, wb) in x.iter().zip(&w) {
            for (xc, wc) in x.iter().zip(&w) {
                let u = 0.5 * (1.0 + xa);
                let v = 0.5 * (1.0 + xb);
                let s = 0.5 * (1.0 + xc);
                let l1 = u;
                let l2 = v * (1.0 - u);
                let l3 = s * (1.0 - u) * (1.0 - v);
                let jac = (1.0 - u).powi(2) * (1.0 - v) / 8.0;
                let pt = [-1.0 + 2.0 * l1, -1.0 + 2.0 * l2, -1.0 + 2.0 * l3];
                // Unit simplex -> reference tet scales volume by 8.
                out.push((pt, wa * wb * wc * jac * 8.0));
            }
        }
    }
    out
}

/// Dense rule on a triangle given by three 3D vertices; weights include the area.
pub fn dense_triangle_rule(n: usize, a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> Vec<([f64; 3], f64)> {
    let (x, w) = golub_welsch(n);
    let e1 = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let e2 = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let cr = [
        e1[1] * e2[2] - e1[2] * e2[1],
        e1[2] * e2[0] - e1[0] * e2[2],
        e1[0] * e2[1] - e1[1] * e2[0],
    ];
    let area2 = (cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]).sqrt();
    let mut out = Vec::new();
    for (xa, wa) in x.iter().zip(&w) {
        for (xb, wb) in x.iter().zip(&w) {
            let u = 0.5 * (1.0 + xa);
            let v = 0.5 * (1.0 + xb) * (1.0 - u);
            let jac = (1.0 - u) / 4.0;
            let pt = [
                a[0] + u * e1[0] + v * e2[0],
                a[1] + u * e1[1] + v * e2[1],
                a[2] + u * e1[2] + v * e2[2],
            ];
            out.push((pt, wa * wb * jac * area2));
        }
    }
    out
}

/// Exponents `(a, b, c)` with `a + b + c <= deg`.
pub fn monomials(deg: usize) -> Vec<[i32; 3]> {
    let mut out = Vec::new();
    for a in 0..=deg {
        for b in 0..=deg - a {
            for c in 0..=deg - a - b {
                out.push([a as i32, b as i32, c as i32]);
            }
        }
    }
    out
}

pub fn monomial(e: [i32; 3], p: &[f64; 3]) -> f64 {
    p[0].powi(e[0]) * p[1].powi(e[1]) * p[2].powi(e[2])
}

/// Deterministic random points inside the reference tetrahedron.
pub fn random_ref_points(n: usize, seed: u64) -> Vec<[f64; 3]> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        if p[0] + p[1] + p[2] <= -1.0 {
            out.push(p);
        }
    }
    out
}

pub mod fixtures {
    use std::collections::BTreeMap;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use tetdg::curving::{curve_pipeline, CurvedMesh, ElasticMaterial, ElasticityOptions, SurfaceModel};
    use tetdg::euler::{BoundaryKind, Gas, RiemannSolver, State, ViscosityModel};
    use tetdg::mesh::generate::{box_mesh, sphere_shell, ShellParams};
    use tetdg::mesh::{BoundingBox, Mesh};
    use tetdg::refelem::ReferenceElement;
    use tetdg::solver::{freestream_state, Discretization, IndicatorMode, Physics, SolutionStore};

    pub fn gas() -> Gas {
        Gas::default()
    }

    pub fn sphere_freestream() -> State {
        freestream_state(&gas(), 0.38, 0.0, 1.0, 1.0).unwrap()
    }

    pub fn physics(riemann: RiemannSolver, viscosity: ViscosityModel) -> Physics {
        Physics {
            gas: gas(),
            riemann,
            viscosity,
            indicator: IndicatorMode::Reference,
            freestream: sphere_freestream(),
        }
    }

    pub fn sphere_bcs(half: bool) -> BTreeMap<String, BoundaryKind> {
        let mut b = BTreeMap::new();
        b.insert("wall".to_string(), BoundaryKind::SlipWall);
        b.insert("farfield".to_string(), BoundaryKind::Farfield);
        if half {
            b.insert("symmetry".to_string(), BoundaryKind::Symmetry);
        }
        b
    }

    pub fn uniform_bcs(mesh: &Mesh, kind: BoundaryKind) -> BTreeMap<String, BoundaryKind> {
        mesh.tags().into_iter().map(|t| (t, kind)).collect()
    }

    /// Unit sphere inside a cubed-sphere shell, curved at degree `p`.
    pub fn curved_sphere(shell: &ShellParams, p: usize) -> (Mesh, CurvedMesh) {
        let mesh = sphere_shell(shell).unwrap();
        let sym: Vec<String> = if shell.half { vec!["symmetry".into()] } else { vec![] };
        let re = ReferenceElement::new(p).unwrap();
        let (curved, _) = curve_pipeline(
            &mesh,
            BoundingBox {
                lo: [-2.5; 3],
                hi: [2.5; 3],
            },
            "wall",
            &sym,
            &SurfaceModel::Sphere {
                center: [0.0; 3],
                radius: 1.0,
            },
            &ElasticMaterial::new(1.0, 0.0).unwrap(),
            p,
            &re,
            &ElasticityOptions::default(),
        )
        .unwrap();
        (mesh, curved)
    }

    pub fn small_shell() -> ShellParams {
        ShellParams {
            n: 2,
            layers: 2,
            r_inner: 1.0,
            r_outer: 3.0,
            half: false,
        }
    }

    pub fn unit_box(n: usize) -> Mesh {
        box_mesh([n; 3], [0.0; 3], [1.0; 3]).unwrap()
    }

    /// Straight-sided discretization of `mesh` with one condition on every tag.
    pub fn straight_disc(
        mesh: &Mesh,
        re: ReferenceElement,
        kind: BoundaryKind,
        physics: Physics,
        padded: bool,
    ) -> Discretization {
        let curved = CurvedMesh::straight(mesh, re.degree);
        Discretization::new(mesh, &curved, re, &uniform_bcs(mesh, kind), physics, padded).unwrap()
    }

    /// Admissible state drawn uniformly in primitive variables.
    pub fn random_state(rng: &mut impl Rng, gas: &Gas) -> State {
        let rho = rng.gen_range(0.2..3.0);
        let v = [
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-1.5..1.5),
        ];
        let p = rng.gen_range(0.2..3.0);
        gas.conserved(rho, v, p)
    }

    /// Smooth-ish random perturbation of `base`, admissible at every node.
    pub fn random_field(disc: &Discretization, base: &State, amplitude: f64, seed: u64) -> SolutionStore {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = disc.uniform(base);
        for k in 0..disc.n_elements() {
            for c in 0..tetdg::euler::NVAR {
                for x in s.field_mut(k, c) {
                    *x *= 1.0 + amplitude * rng.gen_range(-1.0..1.0);
                }
            }
        }
        s
    }

    pub fn unit_normal(rng: &mut impl Rng) -> [f64; 3] {
        loop {
            let v: [f64; 3] = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 0.1 && n <= 1.0 {
                return v.map(|x| x / n);
            }
        }
    }
}
