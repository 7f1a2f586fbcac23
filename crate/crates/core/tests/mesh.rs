mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use tetdg::mesh::generate::{box_mesh, sphere_shell, ShellParams};
use tetdg::mesh::gmsh::{parse_gmsh, write_gmsh};
use tetdg::mesh::{extract_submesh, face_global, BoundingBox, FaceNeighbor, Mesh, SubFaceKind};

fn sorted(mut f: [usize; 3]) -> [usize; 3] {
    f.sort_unstable();
    f
}

/// Every face is either a boundary face or one side of exactly one link,
/// and linked faces share their vertices in the recorded order.
fn check_pairing(mesh: &Mesh) {
    let mut seen = vec![[0u8; 4]; mesh.n_elements()];
    for l in &mesh.face_links {
        let fa = face_global(&mesh.tets[l.a.0], l.a.1);
        let fb = face_global(&mesh.tets[l.b.0], l.b.1);
        for k in 0..3 {
            assert_eq!(fa[k], fb[l.perm[k]]);
        }
        seen[l.a.0][l.a.1] += 1;
        seen[l.b.0][l.b.1] += 1;
    }
    for b in &mesh.boundary_faces {
        seen[b.element][b.face] += 1;
    }
    assert!(seen.iter().flatten().all(|&c| c == 1));
    for (k, nb) in mesh.neighbors.iter().enumerate() {
        for (f, n) in nb.iter().enumerate() {
            if let FaceNeighbor::Interior { element, face, .. } = *n {
                assert!(
                    matches!(mesh.neighbors[element][face], FaceNeighbor::Interior { element: e, face: g, .. } if e == k && g == f)
                );
            }
        }
    }
}

fn tag_area(mesh: &Mesh, tag: &str) -> f64 {
    mesh.boundary_faces
        .iter()
        .filter(|b| b.tag == tag)
        .map(|b| mesh.face_area(b.element, b.face))
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn box_meshes_pair_and_round_trip(nx in 1usize..4, ny in 1usize..4, nz in 1usize..4) {
        let m = box_mesh([nx, ny, nz], [0.0; 3], [1.0, 2.0, 0.5]).unwrap();
        prop_assert_eq!(m.n_elements(), 6 * nx * ny * nz);
        check_pairing(&m);
        prop_assert!((m.total_volume() - 1.0).abs() < 1e-12);
        let back = parse_gmsh(&write_gmsh(&m)).unwrap();
        prop_assert_eq!(&back.tets, &m.tets);
        prop_assert_eq!(&back.vertices, &m.vertices);
        prop_assert_eq!(&back.boundary_faces, &m.boundary_faces);
        prop_assert_eq!(write_gmsh(&back), write_gmsh(&m));
    }

    #[test]
    fn element_order_does_not_change_the_mesh(seed in 0u64..1000) {
        let m = box_mesh([2, 2, 2], [0.0; 3], [1.0; 3]).unwrap();
        let mut order: Vec<usize> = (0..m.n_elements()).collect();
        order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let tets: Vec<[usize; 4]> = order.iter().map(|&k| m.tets[k]).collect();
        let tris: Vec<([usize; 3], String)> = m
            .boundary_faces
            .iter()
            .map(|b| (face_global(&m.tets[b.element], b.face), b.tag.clone()))
            .collect();
        let p = Mesh::new(m.vertices.clone(), tets, &tris).unwrap();
        check_pairing(&p);
        prop_assert_eq!(p.face_links.len(), m.face_links.len());
        for tag in m.tags() {
            prop_assert!((tag_area(&p, &tag) - tag_area(&m, &tag)).abs() < 1e-14);
        }
        for (i, &k) in order.iter().enumerate() {
            prop_assert!((p.volume(i) - m.volume(k)).abs() < 1e-15);
        }
        let mut a: Vec<[usize; 3]> = p.boundary_faces.iter().map(|b| sorted(face_global(&p.tets[b.element], b.face))).collect();
        let mut b: Vec<[usize; 3]> = m.boundary_faces.iter().map(|b| sorted(face_global(&m.tets[b.element], b.face))).collect();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn shells_are_watertight() {
    for half in [false, true] {
        let m = sphere_shell(&ShellParams {
            n: 2,
            layers: 2,
            r_inner: 1.0,
            r_outer: 3.0,
            half,
        })
        .unwrap();
        check_pairing(&m);
        // Straight facets inscribe the spheres.
        let wall = tag_area(&m, "wall");
        let full = if half { 2.0 } else { 4.0 } * std::f64::consts::PI;
        assert!(wall < full && wall > 0.8 * full, "{wall}");
        if half {
            assert!(m.boundary_faces.iter().filter(|b| b.tag == "symmetry").all(|b| {
                face_global(&m.tets[b.element], b.face)
                    .iter()
                    .all(|&v| m.vertices[v][2].abs() < 1e-12)
            }));
        }
    }
}

#[test]
fn submesh_classifies_sphere_faces() {
    let m = sphere_shell(&ShellParams {
        n: 2,
        layers: 3,
        r_inner: 1.0,
        r_outer: 6.0,
        half: true,
    })
    .unwrap();
    let bbox = BoundingBox {
        lo: [-2.0; 3],
        hi: [2.0; 3],
    };
    let sub = extract_submesh(&m, bbox, "wall", &["symmetry".to_string()]).unwrap();
    let walls = m.boundary_faces.iter().filter(|b| b.tag == "wall").count();
    assert_eq!(sub.count(|k| *k == SubFaceKind::Surface), walls);
    assert!(sub.count(|k| *k == SubFaceKind::Cut) > 0);
    assert!(sub.count(|k| matches!(k, SubFaceKind::Symmetry(_))) > 0);
    assert!(sub.n_elements() < m.n_elements());
    for (k, l) in sub.local_of.iter().enumerate() {
        if let Some(l) = l {
            assert_eq!(sub.elements[*l], k);
        }
    }
}
