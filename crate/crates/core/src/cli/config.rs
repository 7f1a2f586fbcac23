//! JSON case configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::curving::{parse_nurbs, ElasticMaterial, ElasticityOptions, SurfaceModel};
use crate::error::{Error, Result};
use crate::euler::{BoundaryKind, Gas, State};
use crate::mesh::{BoundingBox, Mesh, Vec3};
use crate::solver::{freestream_state, RunConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Freestream {
    pub mach: f64,
    /// Angle of attack in degrees, pitching in the x-z plane.
    #[serde(default)]
    pub alpha_deg: f64,
    pub density: f64,
    pub pressure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceConfig {
    Sphere { center: Vec3, radius: f64 },
    Nurbs { path: PathBuf },
    Identity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvingConfig {
    pub surface_tag: String,
    #[serde(default)]
    pub symmetry_tags: Vec<String>,
    pub bbox: BoundingBox,
    pub surface: SurfaceConfig,
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    /// Degree of the stored curved nodes; defaults to the highest degree
    /// of the p-schedule.
    #[serde(default)]
    pub degree: Option<usize>,
    /// Elasticity FEM degree; defaults to `degree`.
    #[serde(default)]
    pub p_fem: Option<usize>,
    #[serde(default = "default_cg_tol")]
    pub cg_tolerance: f64,
}

fn default_cg_tol() -> f64 {
    ElasticityOptions::default().tol
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub curved_mesh: PathBuf,
    pub state: PathBuf,
    pub log: PathBuf,
    pub vtk: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    /// Gmsh 2.2 ASCII mesh.
    pub mesh: PathBuf,
    /// Curved-node sidecar read by `solve`; absent means straight elements.
    #[serde(default)]
    pub curved_mesh: Option<PathBuf>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    pub freestream: Freestream,
    pub boundary_conditions: BTreeMap<String, BoundaryKind>,
    #[serde(default)]
    pub curving: Option<CurvingConfig>,
    pub run: RunConfig,
    pub output: OutputConfig,
}

fn default_gamma() -> f64 {
    1.4
}

impl CaseConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: CaseConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    /// Read a config file; relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut c = Self::from_json(&text)?;
        if let Some(dir) = path.parent() {
            c.resolve_paths(dir);
        }
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        fix(&mut self.mesh);
        if let Some(p) = &mut self.curved_mesh {
            fix(p);
        }
        if let Some(SurfaceConfig::Nurbs { path }) = self.curving.as_mut().map(|c| &mut c.surface) {
            fix(path);
        }
        fix(&mut self.output.curved_mesh);
        fix(&mut self.output.state);
        fix(&mut self.output.log);
        fix(&mut self.output.vtk);
    }

    pub fn validate(&self) -> Result<()> {
        let f = &self.freestream;
        if !(f.mach >= 0.0) || !f.alpha_deg.is_finite() {
            return Err(Error::Config(format!(
                "invalid freestream Mach {} / angle {}",
                f.mach, f.alpha_deg
            )));
        }
        self.gas()?;
        self.freestream_state()?;
        self.run.validate()?;
        if let Some(c) = &self.curving {
            ElasticMaterial::new(c.youngs_modulus, c.poisson_ratio)?;
            if c.degree == Some(0) || c.p_fem == Some(0) {
                return Err(Error::Config("curving degrees must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn gas(&self) -> Result<Gas> {
        Gas::new(self.gamma)
    }

    pub fn freestream_state(&self) -> Result<State> {
        let f = &self.freestream;
        freestream_state(&self.gas()?, f.mach, f.alpha_deg, f.density, f.pressure)
    }

    /// Every boundary tag of the mesh needs a condition, and every
    /// configured tag must exist.
    pub fn check_tags(&self, mesh: &Mesh) -> Result<()> {
        let tags = mesh.tags();
        for t in &tags {
            if !self.boundary_conditions.contains_key(t) {
                return Err(Error::Config(format!("mesh tag '{t}' has no boundary condition")));
            }
        }
        for t in self.boundary_conditions.keys() {
            if !tags.contains(t) {
                return Err(Error::Config(format!("boundary condition for unknown tag '{t}'")));
            }
        }
        Ok(())
    }

    /// Degree at which curved nodes are stored.
    pub fn curving_degree(&self) -> usize {
        self.curving
            .as_ref()
            .and_then(|c| c.degree)
            .unwrap_or_else(|| *self.run.schedule.iter().max().expect("validated schedule"))
    }
}

impl SurfaceConfig {
    pub fn model(&self) -> Result<SurfaceModel> {
        match self {
            SurfaceConfig::Sphere { center, radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::Config(format!("sphere radius must be positive, got {radius}")));
                }
                Ok(SurfaceModel::Sphere {
                    center: *center,
                    radius: *radius,
                })
            }
            SurfaceConfig::Nurbs { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                Ok(SurfaceModel::Nurbs(parse_nurbs(&text)?))
            }
            SurfaceConfig::Identity => Ok(SurfaceModel::Identity),
        }
    }
}
