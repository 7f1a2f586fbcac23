//! Command-line driver: `curve`, `solve`, `export`, `bench` and `gen-mesh`.

pub mod config;
pub mod files;
pub mod vtk;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curving::{curve_pipeline, CurvedMesh, ElasticMaterial, ElasticityOptions};
use crate::error::{Error, Result};
use crate::euler::{BoundaryKind, Gas, RiemannSolver, ViscosityModel, NVAR};
use crate::mesh::generate::{box_mesh, sphere_shell, ShellParams};
use crate::mesh::gmsh::{read_gmsh_file, write_gmsh_file};
use crate::mesh::{BoundingBox, Mesh};
use crate::operators::compute_mapping;
use crate::refelem::ReferenceElement;
use crate::solver::{log_csv, rk_step, run_steady, solver_reference, Discretization, IndicatorMode, Physics, RkScheme};

pub use config::CaseConfig;

#[derive(Debug, Parser)]
#[command(name = "tetdg", version, about = "Curved-mesh DG solver for the 3D Euler equations")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Fixed-order reductions. All reductions in this build are already
    /// fixed-order, so results never depend on the thread count.
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the elasticity problem and write the curved-node sidecar.
    Curve(ConfigArg),
    /// Run the p-refinement steady solve; writes the state and the CSV log.
    Solve(ConfigArg),
    /// Write a VTK file of a stored state.
    Export(ExportArgs),
    /// Time the RHS kernels and the RK update.
    Bench(BenchArgs),
    /// Generate a fixture mesh in Gmsh 2.2 format.
    GenMesh(GenMeshArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// State file; defaults to the config's output state.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Output path; defaults to the config's VTK path.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
    /// Approximate element count of the synthetic box mesh.
    #[arg(long, default_value_t = 5000)]
    pub elements: usize,
    #[arg(long, default_value_t = 5)]
    pub repetitions: usize,
    /// CSV output; stdout if absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MeshKind {
    Sphere,
    Box,
}

#[derive(Debug, Args)]
pub struct GenMeshArgs {
    #[arg(value_enum)]
    pub kind: MeshKind,
    #[arg(long)]
    pub output: PathBuf,
    /// Cells per cube-face edge (sphere) or per box edge.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub layers: usize,
    #[arg(long, default_value_t = 1.0)]
    pub r_inner: f64,
    #[arg(long, default_value_t = 8.0)]
    pub r_outer: f64,
    /// Half shell with a symmetry plane at z = 0.
    #[arg(long)]
    pub half: bool,
}

/// Parse arguments, configure the thread pool and run. Returns the process
/// exit code.
pub fn main_with_args(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be positive".into()));
        }
        // Ignore the error if a pool already exists (repeated calls in tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Curve(a) => cmd_curve(&CaseConfig::load(&a.config)?).map(|_| ()),
        Command::Solve(a) => cmd_solve(&CaseConfig::load(&a.config)?).map(|_| ()),
        Command::Export(a) => {
            let c = CaseConfig::load(&a.config)?;
            let state = a.state.clone().unwrap_or_else(|| c.output.state.clone());
            let out = a.output.clone().unwrap_or_else(|| c.output.vtk.clone());
            cmd_export(&c, &state, &out)
        }
        Command::Bench(a) => {
            let csv = cmd_bench(a.degree, a.elements, a.repetitions)?;
            match &a.output {
                Some(p) => std::fs::write(p, csv).map_err(|e| Error::io(p, e)),
                None => {
                    print!("{csv}");
                    Ok(())
                }
            }
        }
        Command::GenMesh(a) => {
            let mesh = match a.kind {
                MeshKind::Sphere => sphere_shell(&ShellParams {
                    n: a.n,
                    layers: a.layers,
                    r_inner: a.r_inner,
                    r_outer: a.r_outer,
                    half: a.half,
                })?,
                MeshKind::Box => box_mesh([a.n; 3], [0.0; 3], [1.0; 3])?,
            };
            info!("{} tetrahedra", mesh.n_elements());
            write_gmsh_file(&mesh, &a.output)
        }
    }
}

fn load_mesh(c: &CaseConfig) -> Result<Mesh> {
    let mesh = read_gmsh_file(&c.mesh)?;
    c.check_tags(&mesh)?;
    Ok(mesh)
}

/// Summary of a curving run.
#[derive(Clone, Debug)]
pub struct CurveReport {
    pub curved_elements: usize,
    pub min_jacobian: f64,
}

pub fn cmd_curve(c: &CaseConfig) -> Result<CurveReport> {
    let cc = c
        .curving
        .as_ref()
        .ok_or_else(|| Error::Config("config has no 'curving' section".into()))?;
    let mesh = load_mesh(c)?;
    let p = c.curving_degree();
    let re = ReferenceElement::new(p)?;
    let material = ElasticMaterial::new(cc.youngs_modulus, cc.poisson_ratio)?;
    let opts = ElasticityOptions {
        tol: cc.cg_tolerance,
        ..ElasticityOptions::default()
    };
    let start = Instant::now();
    let (curved, _) = curve_pipeline(
        &mesh,
        cc.bbox,
        &cc.surface_tag,
        &cc.symmetry_tags,
        &cc.surface.model()?,
        &material,
        cc.p_fem.unwrap_or(p),
        &re,
        &opts,
    )?;
    let min_jacobian = curved
        .curved
        .iter()
        .map(|(&k, nodes)| compute_mapping(k, nodes, &re).map(|g| g.min_jac()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    files::write_bytes(
        &c.output.curved_mesh,
        &files::encode_curved(&curved, files::mesh_checksum(&mesh)),
    )?;
    let report = CurveReport {
        curved_elements: curved.curved.len(),
        min_jacobian,
    };
    println!(
        "curved {} of {} elements at degree {p} in {:.2} s; minimum Jacobian {:.6e}",
        report.curved_elements,
        mesh.n_elements(),
        start.elapsed().as_secs_f64(),
        report.min_jacobian
    );
    Ok(report)
}

/// Curved sidecar named in the config, or straight elements.
fn load_geometry(c: &CaseConfig, mesh: &Mesh) -> Result<CurvedMesh> {
    match &c.curved_mesh {
        None => Ok(CurvedMesh::straight(mesh, c.curving_degree())),
        Some(path) => {
            let (curved, crc) = files::decode_curved(&files::read_bytes(path)?)?;
            if crc != files::mesh_checksum(mesh) || curved.n_elements != mesh.n_elements() {
                return Err(Error::Format(format!(
                    "{} was written for a different mesh",
                    path.display()
                )));
            }
            Ok(curved)
        }
    }
}

pub fn cmd_solve(c: &CaseConfig) -> Result<crate::solver::SteadyResult> {
    let mesh = load_mesh(c)?;
    let curved = load_geometry(c, &mesh)?;
    let result = run_steady(
        &c.run,
        &mesh,
        &curved,
        &c.boundary_conditions,
        c.gas()?,
        c.freestream_state()?,
    )?;
    let crc = files::mesh_checksum(&mesh);
    files::write_bytes(&c.output.state, &files::encode_state(&result.state, result.degree, crc))?;
    std::fs::write(&c.output.log, log_csv(&result.levels)).map_err(|e| Error::io(&c.output.log, e))?;
    let last = result.levels.last().expect("nonempty schedule");
    println!(
        "p={} residual {:.3e} after {} iterations ({})",
        result.degree,
        last.residual,
        result.levels.iter().map(|l| l.iterations).sum::<usize>(),
        if result.converged() {
            "converged"
        } else {
            "not converged"
        }
    );
    if !result.converged() {
        warn!("tolerance {:e} not reached", c.run.tolerance);
    }
    Ok(result)
}

pub fn cmd_export(c: &CaseConfig, state_path: &Path, out: &Path) -> Result<()> {
    let mesh = load_mesh(c)?;
    let (state, p, crc) = files::decode_state(&files::read_bytes(state_path)?)?;
    if crc != files::mesh_checksum(&mesh) || state.n_elements != mesh.n_elements() {
        return Err(Error::Format(format!(
            "{} was written for a different mesh",
            state_path.display()
        )));
    }
    let curved = load_geometry(c, &mesh)?;
    let re = solver_reference(p, c.run.metric_exact_quadrature)?;
    let geometry = curved.to_degree(&ReferenceElement::new(curved.degree)?, &re)?;
    let physics = Physics {
        gas: c.gas()?,
        riemann: c.run.riemann,
        viscosity: c.run.viscosity,
        indicator: c.run.indicator,
        freestream: c.freestream_state()?,
    };
    let disc = Discretization::new(&mesh, &geometry, re.clone(), &c.boundary_conditions, physics, false)?;
    let eps: Vec<f64> = (0..mesh.n_elements())
        .map(|k| disc.element_viscosity(&state, k))
        .collect();
    let nodes: Vec<_> = (0..mesh.n_elements())
        .map(|k| geometry.element_nodes(&mesh, k, &re))
        .collect();
    let text = vtk::export_vtk(&nodes, &state, &eps, &re, &c.gas()?)?;
    std::fs::write(out, text).map_err(|e| Error::io(out, e))
}

pub const BENCH_HEADER: &str = "kernel,layout,threads,degree,elements,repetitions,median_seconds";

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Random admissible state with smooth variations around a unit flow.
fn random_state(disc: &Discretization, gas: &Gas, seed: u64) -> crate::solver::SolutionStore {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = disc.new_store();
    let n = s.len;
    for k in 0..s.n_elements {
        for i in 0..n {
            let rho = rng.gen_range(0.8..1.2);
            let v = [
                rng.gen_range(-0.3..0.3),
                rng.gen_range(-0.3..0.3),
                rng.gen_range(-0.3..0.3),
            ];
            let u = gas.conserved(rho, v, rng.gen_range(0.8..1.2));
            for c in 0..NVAR {
                s.field_mut(k, c)[i] = u[c];
            }
        }
    }
    s
}

/// Median timings of the volume kernel, surface kernel and one RK step on
/// a box mesh with roughly `elements` tets, for both layouts and for one
/// versus all threads. The padded and unpadded RHS must agree bitwise.
pub fn cmd_bench(degree: usize, elements: usize, repetitions: usize) -> Result<String> {
    let mut csv = String::from(BENCH_HEADER);
    csv.push('\n');
    if repetitions == 0 {
        return Ok(csv);
    }
    let n = ((elements.max(6) as f64 / 6.0).cbrt().round() as usize).max(1);
    let mesh = box_mesh([n; 3], [0.0; 3], [1.0; 3])?;
    let ne = mesh.n_elements();
    let re = ReferenceElement::new(degree)?;
    let curved = CurvedMesh::straight(&mesh, degree);
    let gas = Gas::default();
    let bcs: BTreeMap<String, BoundaryKind> = mesh.tags().into_iter().map(|t| (t, BoundaryKind::SlipWall)).collect();
    let physics = Physics {
        gas,
        riemann: RiemannSolver::Hllc,
        viscosity: ViscosityModel::off(),
        indicator: IndicatorMode::Reference,
        freestream: gas.conserved(1.0, [0.3, 0.0, 0.0], 1.0),
    };
    let all = rayon::current_num_threads();
    let mut thread_counts = vec![1];
    if all > 1 {
        thread_counts.push(all);
    }
    let mut reference: Option<Vec<f64>> = None;
    for padded in [true, false] {
        let disc = Discretization::new(&mesh, &curved, re.clone(), &bcs, physics.clone(), padded)?;
        let u = random_state(&disc, &gas, 7);
        let mut ws = disc.workspace();
        let mut out = disc.new_store();
        disc.compute_rhs(&u, &mut ws, &mut out)?;
        let dense = out.unpack();
        match &reference {
            None => reference = Some(dense),
            Some(r) => {
                if r.iter().zip(&dense).any(|(a, b)| a.to_bits() != b.to_bits()) {
                    return Err(Error::Domain("padded and unpadded RHS differ".into()));
                }
            }
        }
        let layout = if padded { "padded" } else { "unpadded" };
        for &t in &thread_counts {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            let timings = pool.install(|| -> Result<[Vec<f64>; 3]> {
                let mut vol = Vec::new();
                let mut surf = Vec::new();
                let mut step = Vec::new();
                let scheme = RkScheme::low_storage_rk45();
                let mut state = u.clone();
                let mut res = vec![0.0; state.data.len()];
                let mut k = disc.new_store();
                for _ in 0..repetitions {
                    disc.prepare(&u.data, &mut ws);
                    let s = Instant::now();
                    disc.volume_kernel(&u.data, &ws, &mut out.data)?;
                    vol.push(s.elapsed().as_secs_f64());
                    let s = Instant::now();
                    disc.surface_kernel(&ws, &mut out.data)?;
                    surf.push(s.elapsed().as_secs_f64());
                    state.data.copy_from_slice(&u.data);
                    let s = Instant::now();
                    rk_step(&mut state.data, &mut res, &mut k.data, 0.0, 1e-6, &scheme, |_, x, o| {
                        disc.rhs_slices(x, &mut ws, o)
                    })?;
                    step.push(s.elapsed().as_secs_f64());
                }
                Ok([vol, surf, step])
            })?;
            for (name, t_s) in ["volume", "surface", "rk_step"].iter().zip(timings) {
                csv.push_str(&format!(
                    "{name},{layout},{t},{degree},{ne},{repetitions},{:e}\n",
                    median(t_s)
                ));
            }
        }
    }
    Ok(csv)
}

/// Run `f` on a pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
        .install(f)
}

/// Boundary condition map assigning `kind` to every mesh tag.
pub fn uniform_bcs(mesh: &Mesh, kind: BoundaryKind) -> BTreeMap<String, BoundaryKind> {
    mesh.tags().into_iter().map(|t| (t, kind)).collect()
}

/// Bounding box that encloses the mesh with margin `m`.
pub fn enclosing_box(mesh: &Mesh, m: f64) -> BoundingBox {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for v in &mesh.vertices {
        for c in 0..3 {
            lo[c] = lo[c].min(v[c]);
            hi[c] = hi[c].max(v[c]);
        }
    }
    BoundingBox {
        lo: lo.map(|x| x - m),
        hi: hi.map(|x| x + m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bench_zero_repetitions_is_header_only() {
        assert_eq!(cmd_bench(2, 50, 0).unwrap(), format!("{BENCH_HEADER}\n"));
    }

    #[test]
    fn bench_reports_all_kernels() {
        let csv = cmd_bench(1, 48, 1).unwrap();
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        let threads = if rayon::current_num_threads() > 1 { 2 } else { 1 };
        assert_eq!(rows.len(), 3 * 2 * threads);
        assert!(rows.iter().all(|r| r.split(',').count() == 7));
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn parse_global_flags() {
        let cli = Cli::try_parse_from([
            "tetdg",
            "solve",
            "--config",
            "a.json",
            "--threads",
            "2",
            "--deterministic",
        ])
        .unwrap();
        assert_eq!(cli.threads, Some(2));
        assert!(cli.deterministic);
        assert!(matches!(cli.command, Command::Solve(_)));
    }

    #[test]
    fn missing_config_is_exit_code_two() {
        let code = main_with_args(["tetdg", "solve", "--config", "/nonexistent/case.json"].map(Into::into));
        assert_eq!(code, 2);
    }
}
