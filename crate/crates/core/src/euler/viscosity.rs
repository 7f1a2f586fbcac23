//! Artificial viscosity: modal smoothness indicator and sine ramp.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViscosityModel {
    pub eps0: f64,
    pub kappa: f64,
    #[serde(default)]
    pub s0_offset: f64,
}

impl Default for ViscosityModel {
    fn default() -> Self {
        Self::standard()
    }
}

impl ViscosityModel {
    /// `kappa = 4`, `eps0 = 0.3`.
    pub fn standard() -> Self {
        ViscosityModel {
            eps0: 0.3,
            kappa: 4.0,
            s0_offset: 0.0,
        }
    }

    /// No viscosity.
    pub fn off() -> Self {
        ViscosityModel {
            eps0: 0.0,
            ..Self::standard()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps0 >= 0.0) || !(self.kappa > 0.0) || !self.s0_offset.is_finite() {
            return Err(Error::Config(format!("invalid viscosity model {self:?}")));
        }
        Ok(())
    }

    pub fn is_off(&self) -> bool {
        self.eps0 == 0.0
    }

    /// `s0 = log10(1 / p^4) + offset`.
    pub fn s0(&self, p: usize) -> f64 {
        -4.0 * (p as f64).log10() + self.s0_offset
    }
}

/// Energy fraction of the modes above index `n_lower` (Parseval on an
/// orthonormal basis). A zero field counts as smooth.
pub fn smoothness_indicator(modal: &[f64], n_lower: usize) -> f64 {
    let total: f64 = modal.iter().map(|c| c * c).sum();
    if total == 0.0 {
        return 0.0;
    }
    let top: f64 = modal[n_lower..].iter().map(|c| c * c).sum();
    top / total
}

/// Element viscosity from the indicator value `s_k` at degree `p`.
pub fn viscosity_amount(s_k: f64, p: usize, model: &ViscosityModel) -> f64 {
    if !(s_k > 0.0) {
        return 0.0;
    }
    viscosity_ramp(s_k.log10(), model.s0(p), model)
}

/// Sine ramp in `s = log10 S_k` around `s0`, zero below `s0 - kappa` and
/// `eps0` above `s0 + kappa`.
pub fn viscosity_ramp(s: f64, s0: f64, model: &ViscosityModel) -> f64 {
    if s < s0 - model.kappa {
        0.0
    } else if s > s0 + model.kappa {
        model.eps0
    } else {
        0.5 * model.eps0 * (1.0 + (std::f64::consts::PI * (s - s0) / (2.0 * model.kappa)).sin())
    }
}
