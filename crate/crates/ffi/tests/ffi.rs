use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use tetdg_ffi::*;

fn last_error() -> String {
    let p = tetdg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(tetdg_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn reference_counts_at_degree_four() {
    let (mut np, mut nc, mut nf) = (0, 0, 0);
    let s = unsafe { tetdg_reference_counts(4, &mut np, &mut nc, &mut nf) };
    assert_eq!(s, TetdgStatus::Ok);
    assert_eq!((np, nc, nf), (35, 70, 16));
    let s = unsafe { tetdg_reference_counts(4, ptr::null_mut(), &mut nc, &mut nf) };
    assert_eq!(s, TetdgStatus::NullPointer);
}

#[test]
fn box_mesh_handle_lifecycle() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { tetdg_mesh_box(2, &mut m) }, TetdgStatus::Ok);
    assert!(!m.is_null());
    assert_eq!(unsafe { tetdg_mesh_element_count(m) }, 48);
    assert!((unsafe { tetdg_mesh_volume(m) } - 1.0).abs() < 1e-14);
    unsafe { tetdg_mesh_free(m) };
    unsafe { tetdg_mesh_free(ptr::null_mut()) };
    assert_eq!(unsafe { tetdg_mesh_element_count(ptr::null()) }, 0);
}

#[test]
fn invalid_inputs_report_codes_and_messages() {
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { tetdg_mesh_sphere(2, 2, 2.0, 1.0, 0, &mut m) },
        TetdgStatus::Config
    );
    assert!(m.is_null());
    assert!(last_error().contains("configuration"));

    let missing = CString::new("/nonexistent/mesh.msh").unwrap();
    assert_eq!(unsafe { tetdg_mesh_read(missing.as_ptr(), &mut m) }, TetdgStatus::Io);
    assert_eq!(
        unsafe { tetdg_mesh_read(ptr::null(), &mut m) },
        TetdgStatus::NullPointer
    );

    let mut c = ptr::null_mut();
    assert_eq!(unsafe { tetdg_case_load(missing.as_ptr(), &mut c) }, TetdgStatus::Io);
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { tetdg_solve(ptr::null(), &mut sol) }, TetdgStatus::NullPointer);
}

#[test]
fn solve_freestream_box_case() {
    let dir = tempfile::tempdir().unwrap();
    let mesh_path = dir.path().join("box.msh");
    let mesh = tetdg::mesh::generate::box_mesh([2; 3], [0.0; 3], [1.0; 3]).unwrap();
    std::fs::write(&mesh_path, tetdg::mesh::gmsh::write_gmsh(&mesh)).unwrap();
    let cmesh = CString::new(mesh_path.to_str().unwrap()).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { tetdg_mesh_read(cmesh.as_ptr(), &mut m) }, TetdgStatus::Ok);
    assert_eq!(unsafe { tetdg_mesh_element_count(m) }, 48);
    unsafe { tetdg_mesh_free(m) };
    let cfg = r#"{
        "mesh": "box.msh",
        "freestream": { "mach": 0.3, "density": 1.0, "pressure": 1.0 },
        "boundary_conditions": { "xmin": "farfield", "xmax": "farfield", "ymin": "farfield",
                                 "ymax": "farfield", "zmin": "farfield", "zmax": "farfield" },
        "run": { "riemann": "llf", "cfl": 0.5, "viscosity": { "eps0": 0.0, "kappa": 4.0 },
                 "schedule": [1], "tolerance": 1e-8, "level_tolerance": 1e-4,
                 "check_interval": 5, "max_iterations": 20, "padded": true },
        "output": { "curved_mesh": "c.cdg", "state": "s.state", "log": "log.csv", "vtk": "o.vtk" }
    }"#;
    let cfg_path = dir.path().join("case.json");
    std::fs::write(&cfg_path, cfg).unwrap();
    let cpath = CString::new(cfg_path.to_str().unwrap()).unwrap();
    let mut case = ptr::null_mut();
    assert_eq!(
        unsafe { tetdg_case_load(cpath.as_ptr(), &mut case) },
        TetdgStatus::Ok,
        "{}",
        last_error()
    );
    let mut sol = ptr::null_mut();
    assert_eq!(
        unsafe { tetdg_solve(case, &mut sol) },
        TetdgStatus::Ok,
        "{}",
        last_error()
    );
    assert_eq!(unsafe { tetdg_solution_degree(sol) }, 1);
    assert_eq!(unsafe { tetdg_solution_converged(sol) }, 1);
    assert!(unsafe { tetdg_solution_residual(sol) } < 1e-8);

    let mut n = 0;
    assert_eq!(
        unsafe { tetdg_solution_state(sol, ptr::null_mut(), 0, &mut n) },
        TetdgStatus::Ok
    );
    assert_eq!(n, 48 * 5 * 4);
    let mut small = vec![0.0; n - 1];
    assert_eq!(
        unsafe { tetdg_solution_state(sol, small.as_mut_ptr(), small.len(), &mut n) },
        TetdgStatus::BufferTooSmall
    );
    let mut buf = vec![0.0; n];
    assert_eq!(
        unsafe { tetdg_solution_state(sol, buf.as_mut_ptr(), n, &mut n) },
        TetdgStatus::Ok
    );
    assert!(buf.iter().step_by(20).all(|&rho| (rho - 1.0).abs() < 1e-12));
    assert!(dir.path().join("s.state").exists());
    assert!(dir.path().join("log.csv").exists());
    unsafe {
        tetdg_solution_free(sol);
        tetdg_case_free(case);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/tetdg.h")).unwrap();
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let mut count = 0;
    for line in src.lines() {
        if let Some(rest) = line.split("extern \"C\" fn ").nth(1) {
            let name = rest.split('(').next().unwrap();
            assert!(header.contains(&format!("{name}(")), "{name} missing from header");
            count += 1;
        }
    }
    assert!(count >= 15);
    assert!(header.contains("TETDG_STATUS_BUFFER_TOO_SMALL = 9"));
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/tetdg.h");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("t.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{}\"\nint main(void) {{ size_t a, b, c; return tetdg_reference_counts(2, &a, &b, &c); }}\n",
            header.display()
        ),
    )
    .unwrap();
    let out = match std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg(&src)
        .output()
    {
        Ok(o) => o,
        // No C compiler on this machine; nothing to check.
        Err(_) => return,
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
