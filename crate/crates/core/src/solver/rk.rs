//! Two-register low-storage Runge-Kutta stepping.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct RkScheme {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl RkScheme {
    /// Five-stage, fourth-order scheme of Carpenter and Kennedy (solution 3).
    pub fn low_storage_rk45() -> Self {
        RkScheme {
            a: vec![
                0.0,
                -567301805773.0 / 1357537059087.0,
                -2404267990393.0 / 2016746695238.0,
                -3550918686646.0 / 2091501179385.0,
                -1275806237668.0 / 842570457699.0,
            ],
            b: vec![
                1432997174477.0 / 9575080441755.0,
                5161836677717.0 / 13612068292357.0,
                1720146321549.0 / 2090206949498.0,
                3134564353537.0 / 4481467310338.0,
                2277821191437.0 / 14882151754819.0,
            ],
            c: vec![
                0.0,
                1432997174477.0 / 9575080441755.0,
                2526269341429.0 / 6820363183890.0,
                2006345519317.0 / 3224310063776.0,
                2802321613138.0 / 2924317926251.0,
            ],
        }
    }

    /// Single-stage forward Euler, for harness checks.
    pub fn forward_euler() -> Self {
        RkScheme {
            a: vec![0.0],
            b: vec![1.0],
            c: vec![0.0],
        }
    }

    pub fn stages(&self) -> usize {
        self.a.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.a.len();
        if n == 0 || self.b.len() != n || self.c.len() != n || self.a[0] != 0.0 {
            return Err(Error::Config("malformed Runge-Kutta scheme".into()));
        }
        Ok(())
    }
}

/// One step of size `dt` from time `t`. `rhs(t, u, out)` overwrites `out`
/// with the time derivative; `res` is the second register and `k` scratch
/// of the same length.
pub fn rk_step<F>(
    u: &mut [f64],
    res: &mut [f64],
    k: &mut [f64],
    t: f64,
    dt: f64,
    scheme: &RkScheme,
    mut rhs: F,
) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    if !(dt > 0.0) {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    for s in 0..scheme.stages() {
        rhs(t + scheme.c[s] * dt, u, k)?;
        let (a, b) = (scheme.a[s], scheme.b[s]);
        for ((r, x), &d) in res.iter_mut().zip(u.iter_mut()).zip(k.iter()) {
            *r = a * *r + dt * d;
            *x += b * *r;
        }
    }
    Ok(())
}
