//! Solution layout, right-hand side, pseudo-time stepping and
//! p-refinement driver.

mod discretization;
pub mod rk;
pub mod store;

use std::collections::BTreeMap;
use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};

use crate::curving::CurvedMesh;
use crate::error::{Error, Result};
use crate::euler::{BoundaryKind, Gas, RiemannSolver, State, ViscosityModel};
use crate::mesh::Mesh;
use crate::refelem::{RefElemOptions, ReferenceElement};

pub use discretization::{Discretization, IndicatorMode, Physics, Workspace};
pub use rk::{rk_step, RkScheme};
pub use store::SolutionStore;

/// Nodal field of degree `from.degree` re-expressed at degree `to.degree`
/// by zero-extending its modal coefficients.
pub fn p_refine_embed(u: &SolutionStore, from: &ReferenceElement, to: &ReferenceElement) -> Result<SolutionStore> {
    p_refine_embed_into(u, from, to, u.padded)
}

/// [`p_refine_embed`] with an explicit output layout.
pub fn p_refine_embed_into(
    u: &SolutionStore,
    from: &ReferenceElement,
    to: &ReferenceElement,
    padded: bool,
) -> Result<SolutionStore> {
    if to.degree < from.degree {
        return Err(Error::Config(format!(
            "cannot embed degree {} into lower degree {}",
            from.degree, to.degree
        )));
    }
    if u.len != from.n_basis {
        return Err(Error::Config("field length does not match the source degree".into()));
    }
    if to.degree == from.degree {
        return Ok(if padded == u.padded {
            u.clone()
        } else {
            u.relayout(padded)
        });
    }
    let (n1, n2) = (from.n_basis, to.n_basis);
    let mut out = SolutionStore::new(u.n_elements, u.n_fields, n2, padded);
    let mut modal = vec![0.0; n1];
    for k in 0..u.n_elements {
        for c in 0..u.n_fields {
            let src = u.field(k, c);
            for (i, m) in modal.iter_mut().enumerate() {
                *m = (0..n1).map(|j| from.inv_vandermonde[(i, j)] * src[j]).sum();
            }
            let dst = out.field_mut(k, c);
            for (i, d) in dst.iter_mut().enumerate() {
                *d = (0..n1).map(|j| to.vandermonde[(i, j)] * modal[j]).sum();
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualNorm {
    #[default]
    Inf,
    L2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub riemann: RiemannSolver,
    pub cfl: f64,
    pub viscosity: ViscosityModel,
    #[serde(default)]
    pub indicator: IndicatorMode,
    /// Strictly increasing polynomial degrees.
    pub schedule: Vec<usize>,
    /// Residual target of the last level.
    pub tolerance: f64,
    /// Residual target of the intermediate levels.
    pub level_tolerance: f64,
    /// Fixed iteration counts per level; overrides the tolerances.
    #[serde(default)]
    pub level_iterations: Option<Vec<usize>>,
    pub check_interval: usize,
    pub max_iterations: usize,
    #[serde(default)]
    pub residual_norm: ResidualNorm,
    pub padded: bool,
    /// Raise quadrature strengths so constant states are preserved exactly
    /// on curved elements of any degree.
    #[serde(default)]
    pub metric_exact_quadrature: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            riemann: RiemannSolver::Hllc,
            cfl: 0.5,
            viscosity: ViscosityModel::standard(),
            indicator: IndicatorMode::Reference,
            schedule: vec![2, 3, 4],
            tolerance: 1e-9,
            level_tolerance: 1e-4,
            level_iterations: None,
            check_interval: 1000,
            max_iterations: 1_000_000,
            residual_norm: ResidualNorm::Inf,
            padded: true,
            metric_exact_quadrature: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schedule.is_empty() || self.schedule.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "p-schedule must be nonempty and strictly increasing".into(),
            ));
        }
        if !(self.cfl > 0.0) {
            return Err(Error::Config(format!("CFL must be positive, got {}", self.cfl)));
        }
        if self.check_interval == 0 {
            return Err(Error::Config("check_interval must be positive".into()));
        }
        if !(self.tolerance > 0.0) || !(self.level_tolerance > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if let Some(it) = &self.level_iterations {
            if it.len() != self.schedule.len() {
                return Err(Error::Config("level_iterations needs one entry per level".into()));
            }
        }
        self.viscosity.validate()
    }

    fn level_target(&self, level: usize) -> f64 {
        if level + 1 == self.schedule.len() {
            self.tolerance
        } else {
            self.level_tolerance
        }
    }
}

/// One row of the convergence log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelLog {
    pub level: usize,
    pub degree: usize,
    pub iterations: usize,
    pub dt: f64,
    pub residual: f64,
    pub wall_seconds: f64,
    pub rhs_evaluations: usize,
    /// RHS evaluations weighted by the per-element operator size
    /// `N_p (3 N_cub + 4 N_g)`, summed over elements.
    pub work: f64,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualSample {
    pub degree: usize,
    pub iteration: usize,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct SteadyResult {
    pub state: SolutionStore,
    pub degree: usize,
    pub levels: Vec<LevelLog>,
    pub history: Vec<ResidualSample>,
}

impl SteadyResult {
    pub fn converged(&self) -> bool {
        self.levels.last().is_some_and(|l| l.converged)
    }

    pub fn total_work(&self) -> f64 {
        self.levels.iter().map(|l| l.work).sum()
    }
}

pub const LOG_HEADER: &str = "level,iteration,dt,residual_inf,wall_seconds";

/// Convergence log as CSV, one row per level keyed by the degree.
pub fn log_csv(levels: &[LevelLog]) -> String {
    let mut s = String::from(LOG_HEADER);
    s.push('\n');
    for l in levels {
        s.push_str(&format!(
            "{},{},{:e},{:e},{:.3}\n",
            l.degree, l.iterations, l.dt, l.residual, l.wall_seconds
        ));
    }
    s
}

/// Norm of the update over `count` meaningful entries (pads are zero on
/// both sides and do not contribute).
fn residual(norm: ResidualNorm, before: &[f64], after: &[f64], count: usize, dt: f64) -> f64 {
    match norm {
        ResidualNorm::Inf => before.iter().zip(after).fold(0.0_f64, |a, (x, y)| a.max((y - x).abs())) / dt,
        ResidualNorm::L2 => {
            let s: f64 = before.iter().zip(after).map(|(x, y)| (y - x) * (y - x)).sum();
            (s / count.max(1) as f64).sqrt() / dt
        }
    }
}

/// Pseudo-time stepping of one discretization until the residual drops
/// below `target` (checked every `check_interval` steps) or `max_iter`.
/// The step size is recomputed from the current state before every step.
/// Returns iterations, last residual, convergence flag, and the last step size.
pub fn iterate(
    disc: &Discretization,
    u: &mut SolutionStore,
    config: &RunConfig,
    target: Option<f64>,
    max_iter: usize,
    history: &mut Vec<ResidualSample>,
) -> Result<(usize, f64, bool, f64)> {
    let scheme = RkScheme::low_storage_rk45();
    let mut dt = disc.compute_timestep(u, config.cfl)?;
    let mut ws = disc.workspace();
    let mut k = disc.new_store();
    let mut res = vec![0.0; u.data.len()];
    let mut before = vec![0.0; u.data.len()];
    let mut initial: Option<f64> = None;
    let mut last = f64::INFINITY;
    let mut it = 0;
    while it < max_iter {
        let check = (it + 1) % config.check_interval == 0 || it + 1 == max_iter;
        if it > 0 {
            // Element viscosity and wave speeds change with the state.
            dt = disc.compute_timestep(u, config.cfl)?;
        }
        if check {
            before.copy_from_slice(&u.data);
        }
        rk_step(&mut u.data, &mut res, &mut k.data, 0.0, dt, &scheme, |_, x, out| {
            disc.rhs_slices(x, &mut ws, out)
        })?;
        it += 1;
        if check {
            let r = residual(
                config.residual_norm,
                &before,
                &u.data,
                u.n_elements * u.n_fields * u.len,
                dt,
            );
            history.push(ResidualSample {
                degree: disc.degree(),
                iteration: it,
                residual: r,
            });
            info!("p={} iteration {it}: residual {r:.3e}", disc.degree());
            let r0 = *initial.get_or_insert(r);
            if !r.is_finite() || r > 1e6 * r0 {
                return Err(Error::Diverged {
                    degree: disc.degree(),
                    iteration: it,
                    residual: r,
                });
            }
            last = r;
            if target.is_some_and(|t| r < t) {
                return Ok((it, r, true, dt));
            }
        }
    }
    Ok((it, last, target.is_none(), dt))
}

/// Reference element used by the solver at degree `p`.
pub fn solver_reference(p: usize, metric_exact: bool) -> Result<ReferenceElement> {
    if metric_exact {
        ReferenceElement::with_options(p, RefElemOptions::metric_exact(p))
    } else {
        ReferenceElement::new(p)
    }
}

/// Full p-refinement run from a uniform initial state.
pub fn run_steady(
    config: &RunConfig,
    mesh: &Mesh,
    curved: &CurvedMesh,
    bcs: &BTreeMap<String, BoundaryKind>,
    gas: Gas,
    freestream: State,
) -> Result<SteadyResult> {
    config.validate()?;
    let geom_re = ReferenceElement::new(curved.degree)?;
    let mut levels = Vec::new();
    let mut history = Vec::new();
    let mut state: Option<(SolutionStore, ReferenceElement)> = None;
    for (level, &p) in config.schedule.iter().enumerate() {
        let start = Instant::now();
        let re = solver_reference(p, config.metric_exact_quadrature)?;
        let geometry = curved.to_degree(&geom_re, &re)?;
        let physics = Physics {
            gas,
            riemann: config.riemann,
            viscosity: config.viscosity,
            indicator: config.indicator,
            freestream,
        };
        let disc = Discretization::new(mesh, &geometry, re.clone(), bcs, physics, config.padded)?;
        let mut u = match &state {
            None => disc.uniform(&freestream),
            Some((prev, prev_re)) => p_refine_embed_into(prev, prev_re, &re, config.padded)?,
        };
        let (target, max_iter) = match &config.level_iterations {
            Some(counts) => (None, counts[level]),
            None => (Some(config.level_target(level)), config.max_iterations),
        };
        let (iterations, residual, converged, dt) = iterate(&disc, &mut u, config, target, max_iter, &mut history)?;
        let per_eval: f64 = (re.n_basis * (3 * re.n_cub() + 4 * re.n_face())) as f64 * mesh.n_elements() as f64;
        let evals = iterations * RkScheme::low_storage_rk45().stages();
        let row = LevelLog {
            level,
            degree: p,
            iterations,
            dt,
            residual,
            wall_seconds: start.elapsed().as_secs_f64(),
            rhs_evaluations: evals,
            work: evals as f64 * per_eval,
            converged,
        };
        info!(
            "level {level} (p={p}): {iterations} iterations, dt {dt:.3e}, residual {residual:.3e}, {:.1} s",
            row.wall_seconds
        );
        levels.push(row);
        state = Some((u, re));
    }
    let (state, re) = state.expect("schedule is nonempty");
    Ok(SteadyResult {
        state,
        degree: re.degree,
        levels,
        history,
    })
}

/// Freestream state from Mach number and angle of attack (pitch in the
/// x-z plane).
pub fn freestream_state(gas: &Gas, mach: f64, alpha_deg: f64, rho: f64, p: f64) -> Result<State> {
    if !(mach >= 0.0) || !(rho > 0.0) || !(p > 0.0) {
        return Err(Error::Config(format!(
            "invalid freestream: Mach {mach}, density {rho}, pressure {p}"
        )));
    }
    let speed = mach * (gas.gamma * p / rho).sqrt();
    let a = alpha_deg.to_radians();
    Ok(gas.conserved(rho, [speed * a.cos(), 0.0, speed * a.sin()], p))
}
