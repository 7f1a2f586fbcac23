//! Approximate Riemann solvers.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use super::{admissible_pressure, normal_flux_with_pressure, Gas, Inadmissible, State, NVAR};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiemannSolver {
    Llf,
    Hllc,
}

impl RiemannSolver {
    #[inline]
    pub fn flux(&self, ul: &State, ur: &State, n: &[f64; 3], gas: &Gas) -> Result<State, Inadmissible> {
        match self {
            RiemannSolver::Llf => llf_flux(ul, ur, n, gas),
            RiemannSolver::Hllc => hllc_flux(ul, ur, n, gas),
        }
    }
}

static HLLC_FALLBACKS: AtomicU64 = AtomicU64::new(0);

/// Number of HLLC evaluations that fell back to LLF since process start.
pub fn hllc_fallback_count() -> u64 {
    HLLC_FALLBACKS.load(Ordering::Relaxed)
}

#[inline]
fn vn(u: &State, n: &[f64; 3]) -> f64 {
    (u[1] * n[0] + u[2] * n[1] + u[3] * n[2]) / u[0]
}

fn llf_with_pressure(ul: &State, pl: f64, ur: &State, pr: f64, n: &[f64; 3], gas: &Gas) -> State {
    let fl = normal_flux_with_pressure(ul, pl, n);
    let fr = normal_flux_with_pressure(ur, pr, n);
    let sl = vn(ul, n).abs() + (gas.gamma * pl / ul[0]).sqrt();
    let sr = vn(ur, n).abs() + (gas.gamma * pr / ur[0]).sqrt();
    let lam = sl.max(sr);
    std::array::from_fn(|c| 0.5 * (fl[c] + fr[c]) - 0.5 * lam * (ur[c] - ul[c]))
}

/// Local Lax-Friedrichs flux.
pub fn llf_flux(ul: &State, ur: &State, n: &[f64; 3], gas: &Gas) -> Result<State, Inadmissible> {
    let pl = admissible_pressure(ul, gas)?;
    let pr = admissible_pressure(ur, gas)?;
    Ok(llf_with_pressure(ul, pl, ur, pr, n, gas))
}

/// HLLC flux with Einfeldt wave-speed bounds. Falls back to LLF when the
/// bounds degenerate.
pub fn hllc_flux(ul: &State, ur: &State, n: &[f64; 3], gas: &Gas) -> Result<State, Inadmissible> {
    let pl = admissible_pressure(ul, gas)?;
    let pr = admissible_pressure(ur, gas)?;
    let g = gas.gamma;
    let (rl, rr) = (ul[0], ur[0]);
    let (vnl, vnr) = (vn(ul, n), vn(ur, n));
    let cl = (g * pl / rl).sqrt();
    let cr = (g * pr / rr).sqrt();

    // Roe averages.
    let (sql, sqr) = (rl.sqrt(), rr.sqrt());
    let wsum = sql + sqr;
    let vel: [f64; 3] = std::array::from_fn(|d| (ul[1 + d] / sql + ur[1 + d] / sqr) / wsum);
    let hl = (ul[4] + pl) / rl;
    let hr = (ur[4] + pr) / rr;
    let h = (sql * hl + sqr * hr) / wsum;
    let v2 = vel[0] * vel[0] + vel[1] * vel[1] + vel[2] * vel[2];
    let c2 = (g - 1.0) * (h - 0.5 * v2);
    let vn_roe = vel[0] * n[0] + vel[1] * n[1] + vel[2] * n[2];

    let (s_l, s_r) = if c2 > 0.0 {
        let c = c2.sqrt();
        ((vnl - cl).min(vn_roe - c), (vnr + cr).max(vn_roe + c))
    } else {
        (vnl - cl, vnr + cr)
    };
    let denom = rl * (s_l - vnl) - rr * (s_r - vnr);
    if !(s_l < s_r) || !s_l.is_finite() || !s_r.is_finite() || denom == 0.0 {
        HLLC_FALLBACKS.fetch_add(1, Ordering::Relaxed);
        return Ok(llf_with_pressure(ul, pl, ur, pr, n, gas));
    }
    let s_star = (pr - pl + rl * vnl * (s_l - vnl) - rr * vnr * (s_r - vnr)) / denom;

    if s_l >= 0.0 {
        return Ok(normal_flux_with_pressure(ul, pl, n));
    }
    if s_r <= 0.0 {
        return Ok(normal_flux_with_pressure(ur, pr, n));
    }
    let star = |u: &State, p: f64, vnk: f64, s: f64| -> State {
        let f = normal_flux_with_pressure(u, p, n);
        let scale = u[0] * (s - vnk) / (s - s_star);
        let dv = s_star - vnk;
        let us: State = [
            scale,
            scale * (u[1] / u[0] + dv * n[0]),
            scale * (u[2] / u[0] + dv * n[1]),
            scale * (u[3] / u[0] + dv * n[2]),
            scale * (u[4] / u[0] + dv * (s_star + p / (u[0] * (s - vnk)))),
        ];
        let mut out = [0.0; NVAR];
        for c in 0..NVAR {
            out[c] = f[c] + s * (us[c] - u[c]);
        }
        out
    };
    if s_star >= 0.0 {
        Ok(star(ul, pl, vnl, s_l))
    } else {
        Ok(star(ur, pr, vnr, s_r))
    }
}
