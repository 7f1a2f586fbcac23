//! Compressible Euler physics: state algebra, fluxes, boundary states.

mod riemann;
mod viscosity;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use riemann::{hllc_fallback_count, hllc_flux, llf_flux, RiemannSolver};
pub use viscosity::{smoothness_indicator, viscosity_amount, viscosity_ramp, ViscosityModel};

pub const NVAR: usize = 5;

/// Conserved variables `(rho, rho u, rho v, rho w, rho E)`.
pub type State = [f64; NVAR];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gas {
    pub gamma: f64,
}

impl Default for Gas {
    fn default() -> Self {
        Gas { gamma: 1.4 }
    }
}

impl Gas {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::Config(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(Gas { gamma })
    }

    /// State from primitive variables.
    pub fn conserved(&self, rho: f64, vel: [f64; 3], p: f64) -> State {
        let ke = 0.5 * rho * (vel[0] * vel[0] + vel[1] * vel[1] + vel[2] * vel[2]);
        [
            rho,
            rho * vel[0],
            rho * vel[1],
            rho * vel[2],
            p / (self.gamma - 1.0) + ke,
        ]
    }
}

/// A state with non-positive density or pressure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inadmissible {
    pub rho: f64,
    pub pressure: f64,
}

impl Inadmissible {
    pub fn at(self, element: usize, node: usize) -> Error {
        Error::Inadmissible {
            element,
            node,
            rho: self.rho,
            pressure: self.pressure,
        }
    }
}

impl From<Inadmissible> for Error {
    fn from(e: Inadmissible) -> Self {
        Error::Domain(format!("inadmissible state: rho={:e}, p={:e}", e.rho, e.pressure))
    }
}

#[inline]
fn kinetic(u: &State) -> f64 {
    (u[1] * u[1] + u[2] * u[2] + u[3] * u[3]) / (2.0 * u[0])
}

/// `p = (gamma - 1)(rho E - |m|^2 / (2 rho))`. Fails only for `rho <= 0`.
pub fn pressure(u: &State, gas: &Gas) -> std::result::Result<f64, Inadmissible> {
    if !(u[0] > 0.0) {
        return Err(Inadmissible {
            rho: u[0],
            pressure: f64::NAN,
        });
    }
    Ok((gas.gamma - 1.0) * (u[4] - kinetic(u)))
}

/// Pressure of an admissible state, checking both positivity conditions.
#[inline]
pub fn admissible_pressure(u: &State, gas: &Gas) -> std::result::Result<f64, Inadmissible> {
    let p = pressure(u, gas)?;
    if !(p > 0.0) {
        return Err(Inadmissible { rho: u[0], pressure: p });
    }
    Ok(p)
}

/// Flux tensor `F[c][d]`: component `c`, direction `d`.
pub fn flux(u: &State, gas: &Gas) -> std::result::Result<[[f64; 3]; NVAR], Inadmissible> {
    let p = admissible_pressure(u, gas)?;
    Ok(flux_with_pressure(u, p))
}

#[inline]
pub(crate) fn flux_with_pressure(u: &State, p: f64) -> [[f64; 3]; NVAR] {
    let v = [u[1] / u[0], u[2] / u[0], u[3] / u[0]];
    let mut f = [[0.0; 3]; NVAR];
    for d in 0..3 {
        f[0][d] = u[1 + d];
        for m in 0..3 {
            f[1 + m][d] = u[1 + m] * v[d];
        }
        f[1 + d][d] += p;
        f[4][d] = (u[4] + p) * v[d];
    }
    f
}

/// `F(u) . n`.
pub fn normal_flux(u: &State, n: &[f64; 3], gas: &Gas) -> std::result::Result<State, Inadmissible> {
    let p = admissible_pressure(u, gas)?;
    Ok(normal_flux_with_pressure(u, p, n))
}

#[inline]
pub(crate) fn normal_flux_with_pressure(u: &State, p: f64, n: &[f64; 3]) -> State {
    let vn = (u[1] * n[0] + u[2] * n[1] + u[3] * n[2]) / u[0];
    [
        u[0] * vn,
        u[1] * vn + p * n[0],
        u[2] * vn + p * n[1],
        u[3] * vn + p * n[2],
        (u[4] + p) * vn,
    ]
}

/// `|v . n| + c`, with `n` a unit vector.
pub fn max_wavespeed(u: &State, gas: &Gas, n: &[f64; 3]) -> std::result::Result<f64, Inadmissible> {
    let p = admissible_pressure(u, gas)?;
    let vn = (u[1] * n[0] + u[2] * n[1] + u[3] * n[2]) / u[0];
    Ok(vn.abs() + (gas.gamma * p / u[0]).sqrt())
}

/// `|v| + c`, the bound over all directions.
pub fn max_wavespeed_any(u: &State, gas: &Gas) -> std::result::Result<f64, Inadmissible> {
    let p = admissible_pressure(u, gas)?;
    let v = (u[1] * u[1] + u[2] * u[2] + u[3] * u[3]).sqrt() / u[0];
    Ok(v + (gas.gamma * p / u[0]).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    SlipWall,
    Farfield,
    Symmetry,
}

impl std::str::FromStr for BoundaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "slip_wall" => Ok(BoundaryKind::SlipWall),
            "farfield" => Ok(BoundaryKind::Farfield),
            "symmetry" => Ok(BoundaryKind::Symmetry),
            other => Err(Error::Config(format!("unknown boundary kind '{other}'"))),
        }
    }
}

/// Ghost state for a boundary face with unit outward normal `n`.
pub fn boundary_state(u: &State, n: &[f64; 3], kind: BoundaryKind, freestream: &State) -> State {
    match kind {
        BoundaryKind::SlipWall | BoundaryKind::Symmetry => {
            let mn = u[1] * n[0] + u[2] * n[1] + u[3] * n[2];
            [
                u[0],
                u[1] - 2.0 * mn * n[0],
                u[2] - 2.0 * mn * n[1],
                u[3] - 2.0 * mn * n[2],
                u[4],
            ]
        }
        BoundaryKind::Farfield => *freestream,
    }
}
