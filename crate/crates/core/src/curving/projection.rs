//! Closest-point projection onto NURBS patches by projected Gauss-Newton.

use log::warn;

use crate::curving::nurbs::NurbsSurface;
use crate::error::{Error, Result};
use crate::mesh::{dot, norm, sub3, Vec3};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    pub alpha: f64,
    pub beta: f64,
    pub point: Vec3,
    pub distance: f64,
    /// Norm of the projected gradient of `0.5 |x - S|^2` at the result.
    pub stationarity: f64,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionOptions {
    pub step_tol: f64,
    pub stationarity_tol: f64,
    pub max_iter: usize,
    /// Largest stationarity accepted after the multi-start fallback.
    pub fallback_tol: f64,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        ProjectionOptions {
            step_tol: 1e-12,
            stationarity_tol: 1e-10,
            max_iter: 100,
            fallback_tol: 1e-6,
        }
    }
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

struct Eval {
    point: Vec3,
    residual: Vec3,
    sa: Vec3,
    sb: Vec3,
    obj: f64,
}

fn evaluate(s: &NurbsSurface, x: &Vec3, a: f64, b: f64) -> Eval {
    let (point, sa, sb) = s.eval_derivs(a, b).expect("parameters are clamped");
    let residual = sub3(*x, point);
    Eval {
        point,
        residual,
        sa,
        sb,
        obj: 0.5 * dot(residual, residual),
    }
}

/// `r . S_ab` for the second partials, by central differences of the
/// analytic first derivatives (one-sided next to the box edges).
fn curvature_term(s: &NurbsSurface, r: &Vec3, a: f64, b: f64) -> [f64; 3] {
    const H: f64 = 1e-6;
    let bracket = |t: f64| ((t - H).max(0.0), (t + H).min(1.0));
    let (a0, a1) = bracket(a);
    let (b0, b1) = bracket(b);
    let (_, sa0, _) = s.eval_derivs(a0, b).expect("inside box");
    let (_, sa1, _) = s.eval_derivs(a1, b).expect("inside box");
    let (_, sa2, sb2) = s.eval_derivs(a, b0).expect("inside box");
    let (_, sa3, sb3) = s.eval_derivs(a, b1).expect("inside box");
    let d = |p: Vec3, q: Vec3, h: f64| dot(*r, std::array::from_fn(|c| (q[c] - p[c]) / h));
    [d(sa0, sa1, a1 - a0), d(sa2, sa3, b1 - b0), d(sb2, sb3, b1 - b0)]
}

fn stationarity(e: &Eval, a: f64, b: f64) -> f64 {
    let ga = -dot(e.sa, e.residual);
    let gb = -dot(e.sb, e.residual);
    let pa = a - clamp01(a - ga);
    let pb = b - clamp01(b - gb);
    (pa * pa + pb * pb).sqrt()
}

/// Objective decreased, or stayed within rounding while the projected
/// gradient shrank (the objective alone cannot resolve the last digits).
fn accept(new: &Eval, na: f64, nb: f64, old: &Eval, a: f64, b: f64) -> bool {
    new.obj < old.obj
        || (new.obj <= old.obj * (1.0 + 8.0 * f64::EPSILON) && stationarity(new, na, nb) < stationarity(old, a, b))
}

/// Backtracking along the projected direction `(da, db)`.
fn line_search(s: &NurbsSurface, x: &Vec3, e: &Eval, a: f64, b: f64, da: f64, db: f64) -> Option<(f64, f64, Eval)> {
    let mut t = 1.0;
    for _ in 0..40 {
        let (na, nb) = (clamp01(a + t * da), clamp01(b + t * db));
        let ne = evaluate(s, x, na, nb);
        if accept(&ne, na, nb, e, a, b) {
            return Some((na, nb, ne));
        }
        t *= 0.5;
    }
    None
}

/// One Gauss-Newton run from `(a, b)`. Returns the best iterate and whether
/// a termination criterion was met within the iteration budget.
fn gauss_newton(s: &NurbsSurface, x: &Vec3, mut a: f64, mut b: f64, opts: &ProjectionOptions) -> (Projection, bool) {
    a = clamp01(a);
    b = clamp01(b);
    let mut e = evaluate(s, x, a, b);
    let mut converged = false;
    let mut it = 0;
    while it < opts.max_iter {
        it += 1;
        if stationarity(&e, a, b) < opts.stationarity_tol {
            converged = true;
            break;
        }
        // Normal equations of the linearized residual, lightly regularized
        // for degenerate parameterizations (collapsed edges). When the
        // residual is large compared with the curvature radius, plain
        // Gauss-Newton contracts slowly, so the residual-curvature term is
        // added whenever the full Hessian stays positive definite.
        let (mut haa, mut hab, mut hbb) = (dot(e.sa, e.sa), dot(e.sa, e.sb), dot(e.sb, e.sb));
        let (ra, rb) = (dot(e.sa, e.residual), dot(e.sb, e.residual));
        let [caa, cab, cbb] = curvature_term(s, &e.residual, a, b);
        let (naa, nab, nbb) = (haa - caa, hab - cab, hbb - cbb);
        if naa > 0.0 && naa * nbb - nab * nab > 1e-12 * (haa * hbb).max(f64::MIN_POSITIVE) {
            (haa, hab, hbb) = (naa, nab, nbb);
        }
        let reg = 1e-14 * (haa.abs() + hbb.abs()) + f64::MIN_POSITIVE;
        let (m11, m22) = (haa + reg, hbb + reg);
        // Parameters sitting on a bound with the descent pointing outward
        // are held fixed; the step is solved on the remaining ones.
        let fixed_a = (a <= 0.0 && ra < 0.0) || (a >= 1.0 && ra > 0.0);
        let fixed_b = (b <= 0.0 && rb < 0.0) || (b >= 1.0 && rb > 0.0);
        let (da, db) = match (fixed_a, fixed_b) {
            (false, false) => {
                let det = m11 * m22 - hab * hab;
                ((m22 * ra - hab * rb) / det, (m11 * rb - hab * ra) / det)
            }
            (true, false) => (0.0, rb / m22),
            (false, true) => (ra / m11, 0.0),
            (true, true) => (0.0, 0.0),
        };
        let found = line_search(s, x, &e, a, b, da, db).or_else(|| line_search(s, x, &e, a, b, ra / m11, rb / m22));
        let Some((na, nb, ne)) = found else {
            // No descent possible at working precision.
            converged = true;
            break;
        };
        let step = ((na - a).powi(2) + (nb - b).powi(2)).sqrt();
        a = na;
        b = nb;
        e = ne;
        if step < opts.step_tol {
            converged = true;
            break;
        }
    }
    let stat = stationarity(&e, a, b);
    if stat < opts.stationarity_tol {
        converged = true;
    }
    (
        Projection {
            alpha: a,
            beta: b,
            point: e.point,
            distance: norm(e.residual),
            stationarity: stat,
            iterations: it,
        },
        converged,
    )
}

fn grid_seed(s: &NurbsSurface, x: &Vec3, n: usize) -> (f64, f64, f64) {
    let mut best = (0.0, 0.0, f64::INFINITY);
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64);
            let d = norm(sub3(*x, s.eval(a, b).expect("grid inside domain")));
            if d < best.2 {
                best = (a, b, d);
            }
        }
    }
    best
}

/// Closest point of `x` on a single patch. Without an initial guess the
/// iteration starts from the best point of a 9x9 parameter grid.
pub fn closest_point(s: &NurbsSurface, x: &Vec3, initial: Option<(f64, f64)>) -> Result<Projection> {
    closest_point_with(s, x, initial, &ProjectionOptions::default())
}

pub fn closest_point_with(
    s: &NurbsSurface,
    x: &Vec3,
    initial: Option<(f64, f64)>,
    opts: &ProjectionOptions,
) -> Result<Projection> {
    if !x.iter().all(|c| c.is_finite()) {
        return Err(Error::Domain("query point is not finite".into()));
    }
    let (a0, b0) = initial.unwrap_or_else(|| {
        let (a, b, _) = grid_seed(s, x, 9);
        (a, b)
    });
    let (proj, ok) = gauss_newton(s, x, a0, b0, opts);
    if ok {
        return Ok(proj);
    }
    warn!(
        "closest point did not converge from ({a0:.3}, {b0:.3}); stationarity {:.3e}, trying multi-start",
        proj.stationarity
    );
    let mut best = proj;
    for i in 0..5 {
        for j in 0..5 {
            let (p, _) = gauss_newton(s, x, i as f64 / 4.0, j as f64 / 4.0, opts);
            if p.distance < best.distance || (p.distance == best.distance && p.stationarity < best.stationarity) {
                best = p;
            }
        }
    }
    if best.stationarity > opts.fallback_tol {
        return Err(Error::Projection(best.stationarity));
    }
    Ok(best)
}

/// Closest point over several patches. Returns the patch index as well.
pub fn closest_point_patches(patches: &[NurbsSurface], x: &Vec3) -> Result<(usize, Projection)> {
    if patches.is_empty() {
        return Err(Error::Config("no surface patches".into()));
    }
    let seeds: Vec<(f64, f64, f64)> = patches.iter().map(|s| grid_seed(s, x, 9)).collect();
    let best_seed = seeds.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
    let mut best: Option<(usize, Projection)> = None;
    let mut failure = None;
    for (k, (s, seed)) in patches.iter().zip(&seeds).enumerate() {
        if seed.2 > 1.5 * best_seed + 1e-12 {
            continue;
        }
        // A patch whose own projection fails cannot hold the closest point
        // if another candidate succeeds.
        let p = match closest_point(s, x, Some((seed.0, seed.1))) {
            Ok(p) => p,
            Err(e) => {
                failure = Some(e);
                continue;
            }
        };
        if best.as_ref().is_none_or(|(_, b)| p.distance < b.distance) {
            best = Some((k, p));
        }
    }
    match (best, failure) {
        (Some(b), _) => Ok(b),
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!("the best seed is always a candidate"),
    }
}
