//! Tensor-product NURBS surfaces on the parameter square `[0,1]^2`.
//!
//! Text format (whitespace separated, `#` starts a comment):
//!
//! ```text
//! nurbs 1
//! degree <p_u> <p_v>
//! count <n_u> <n_v>
//! knots_u <n_u + p_u + 1 values>
//! knots_v <n_v + p_v + 1 values>
//! <n_u * n_v lines: x y z w>     # row-major, u index outermost
//! ```
//!
//! Several patches may follow each other in one file.

use crate::error::{Error, Result};
use crate::mesh::Vec3;

#[derive(Clone, Debug, PartialEq)]
pub struct NurbsSurface {
    pub degree: [usize; 2],
    pub knots_u: Vec<f64>,
    pub knots_v: Vec<f64>,
    /// Control points, `n_u * n_v`, index `i * n_v + j`.
    pub control: Vec<Vec3>,
    pub weights: Vec<f64>,
    pub count: [usize; 2],
}

const KNOT_TOL: f64 = 1e-14;

fn check_knots(knots: &[f64], p: usize, n: usize, dir: &str) -> Result<()> {
    if knots.len() != n + p + 1 {
        return Err(Error::Config(format!(
            "{dir}: expected {} knots, got {}",
            n + p + 1,
            knots.len()
        )));
    }
    if knots.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config(format!("{dir}: knots must be nondecreasing")));
    }
    let clamped_lo = knots[..=p].iter().all(|&k| (k - 0.0).abs() < KNOT_TOL);
    let clamped_hi = knots[n..].iter().all(|&k| (k - 1.0).abs() < KNOT_TOL);
    if !clamped_lo || !clamped_hi {
        return Err(Error::Config(format!("{dir}: knots must be clamped on [0, 1]")));
    }
    for (i, k) in knots.iter().enumerate() {
        let mult = knots.iter().filter(|&&q| q == *k).count();
        if mult > p + 1 {
            return Err(Error::Config(format!(
                "{dir}: knot {i} has multiplicity {mult} > {}",
                p + 1
            )));
        }
    }
    Ok(())
}

fn find_span(knots: &[f64], p: usize, n: usize, u: f64) -> usize {
    if u >= knots[n] {
        // Last nonempty span.
        let mut s = n - 1;
        while s > p && knots[s] == knots[s + 1] {
            s -= 1;
        }
        return s;
    }
    let (mut lo, mut hi) = (p, n);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if u < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Nonzero basis functions and first derivatives on `span`.
fn basis_ders(knots: &[f64], p: usize, span: usize, u: f64) -> (Vec<f64>, Vec<f64>) {
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let n: Vec<f64> = (0..=p).map(|j| ndu[j][p]).collect();
    let mut d = vec![0.0; p + 1];
    if p > 0 {
        for r in 0..=p {
            let mut v = 0.0;
            if r >= 1 {
                v += ndu[r - 1][p - 1] / ndu[p][r - 1];
            }
            if r < p {
                v -= ndu[r][p - 1] / ndu[p][r];
            }
            d[r] = p as f64 * v;
        }
    }
    (n, d)
}

impl NurbsSurface {
    pub fn new(
        degree: [usize; 2],
        count: [usize; 2],
        knots_u: Vec<f64>,
        knots_v: Vec<f64>,
        control: Vec<Vec3>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if count[0] <= degree[0] || count[1] <= degree[1] {
            return Err(Error::Config("NURBS needs more control points than its degree".into()));
        }
        check_knots(&knots_u, degree[0], count[0], "knots_u")?;
        check_knots(&knots_v, degree[1], count[1], "knots_v")?;
        if control.len() != count[0] * count[1] || weights.len() != control.len() {
            return Err(Error::Config("NURBS control net size mismatch".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Config("NURBS weights must be positive".into()));
        }
        Ok(NurbsSurface {
            degree,
            knots_u,
            knots_v,
            control,
            weights,
            count,
        })
    }

    fn check_domain(a: f64, b: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
            return Err(Error::Domain(format!("NURBS parameters ({a}, {b}) outside [0,1]^2")));
        }
        Ok(())
    }

    /// Point and first partial derivatives of the rational map.
    pub fn eval_derivs(&self, a: f64, b: f64) -> Result<(Vec3, Vec3, Vec3)> {
        Self::check_domain(a, b)?;
        let [pu, pv] = self.degree;
        let [nu, nv] = self.count;
        let su = find_span(&self.knots_u, pu, nu, a);
        let sv = find_span(&self.knots_v, pv, nv, b);
        let (bu, du) = basis_ders(&self.knots_u, pu, su, a);
        let (bv, dv) = basis_ders(&self.knots_v, pv, sv, b);
        // Homogeneous sums: A = sum N w P, W = sum N w, and their partials.
        let mut a0 = [0.0; 3];
        let mut aa = [0.0; 3];
        let mut ab = [0.0; 3];
        let (mut w0, mut wa, mut wb) = (0.0, 0.0, 0.0);
        for k in 0..=pu {
            let i = su - pu + k;
            for l in 0..=pv {
                let j = sv - pv + l;
                let idx = i * nv + j;
                let w = self.weights[idx];
                let pnt = self.control[idx];
                let n00 = bu[k] * bv[l] * w;
                let n10 = du[k] * bv[l] * w;
                let n01 = bu[k] * dv[l] * w;
                w0 += n00;
                wa += n10;
                wb += n01;
                for c in 0..3 {
                    a0[c] += n00 * pnt[c];
                    aa[c] += n10 * pnt[c];
                    ab[c] += n01 * pnt[c];
                }
            }
        }
        let s: Vec3 = std::array::from_fn(|c| a0[c] / w0);
        let sa: Vec3 = std::array::from_fn(|c| (aa[c] - wa * s[c]) / w0);
        let sb: Vec3 = std::array::from_fn(|c| (ab[c] - wb * s[c]) / w0);
        Ok((s, sa, sb))
    }

    pub fn eval(&self, a: f64, b: f64) -> Result<Vec3> {
        Ok(self.eval_derivs(a, b)?.0)
    }

    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "nurbs 1");
        let _ = writeln!(out, "degree {} {}", self.degree[0], self.degree[1]);
        let _ = writeln!(out, "count {} {}", self.count[0], self.count[1]);
        let _ = writeln!(out, "knots_u {}", join(&self.knots_u));
        let _ = writeln!(out, "knots_v {}", join(&self.knots_v));
        for (p, w) in self.control.iter().zip(&self.weights) {
            let _ = writeln!(out, "{:?} {:?} {:?} {:?}", p[0], p[1], p[2], w);
        }
        out
    }
}

/// Parse one or more patches in the text format.
pub fn parse_nurbs(text: &str) -> Result<Vec<NurbsSurface>> {
    let mut toks: Vec<(usize, &str)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        toks.extend(line.split_whitespace().map(|t| (i + 1, t)));
    }
    let last_line = toks.last().map(|t| t.0).unwrap_or(0);
    let mut it = toks.into_iter().peekable();
    fn next<'a>(
        it: &mut std::iter::Peekable<std::vec::IntoIter<(usize, &'a str)>>,
        last_line: usize,
        what: &str,
    ) -> Result<(usize, &'a str)> {
        it.next().ok_or_else(|| Error::Parse {
            line: last_line,
            msg: format!("unexpected end of input, expected {what}"),
        })
    }
    fn num<T: std::str::FromStr>(t: (usize, &str), what: &str) -> Result<T> {
        t.1.parse().map_err(|_| Error::Parse {
            line: t.0,
            msg: format!("invalid {what} '{}'", t.1),
        })
    }
    fn keyword(t: (usize, &str), kw: &str) -> Result<()> {
        if t.1 != kw {
            return Err(Error::Parse {
                line: t.0,
                msg: format!("expected '{kw}', found '{}'", t.1),
            });
        }
        Ok(())
    }
    let mut out = Vec::new();
    while it.peek().is_some() {
        keyword(next(&mut it, last_line, "nurbs")?, "nurbs")?;
        let version: u32 = num(next(&mut it, last_line, "version")?, "version")?;
        if version != 1 {
            return Err(Error::Format(format!("unsupported NURBS format version {version}")));
        }
        keyword(next(&mut it, last_line, "degree")?, "degree")?;
        let pu: usize = num(next(&mut it, last_line, "degree")?, "degree")?;
        let pv: usize = num(next(&mut it, last_line, "degree")?, "degree")?;
        keyword(next(&mut it, last_line, "count")?, "count")?;
        let nu: usize = num(next(&mut it, last_line, "count")?, "count")?;
        let nv: usize = num(next(&mut it, last_line, "count")?, "count")?;
        keyword(next(&mut it, last_line, "knots_u")?, "knots_u")?;
        let mut ku = Vec::new();
        for _ in 0..nu + pu + 1 {
            ku.push(num(next(&mut it, last_line, "knot")?, "knot")?);
        }
        keyword(next(&mut it, last_line, "knots_v")?, "knots_v")?;
        let mut kv = Vec::new();
        for _ in 0..nv + pv + 1 {
            kv.push(num(next(&mut it, last_line, "knot")?, "knot")?);
        }
        let mut ctrl = Vec::with_capacity(nu * nv);
        let mut w = Vec::with_capacity(nu * nv);
        for _ in 0..nu * nv {
            let x = num(next(&mut it, last_line, "x")?, "coordinate")?;
            let y = num(next(&mut it, last_line, "y")?, "coordinate")?;
            let z = num(next(&mut it, last_line, "z")?, "coordinate")?;
            ctrl.push([x, y, z]);
            w.push(num(next(&mut it, last_line, "weight")?, "weight")?);
        }
        out.push(NurbsSurface::new([pu, pv], [nu, nv], ku, kv, ctrl, w)?);
    }
    if out.is_empty() {
        return Err(Error::Format("no NURBS patches in input".into()));
    }
    Ok(out)
}

pub fn write_nurbs(patches: &[NurbsSurface]) -> String {
    patches.iter().map(|p| p.to_text()).collect()
}

/// Bilinear patch through four corners `c00, c10, c01, c11` (first index `u`).
pub fn bilinear_patch(c00: Vec3, c10: Vec3, c01: Vec3, c11: Vec3) -> NurbsSurface {
    NurbsSurface::new(
        [1, 1],
        [2, 2],
        vec![0.0, 0.0, 1.0, 1.0],
        vec![0.0, 0.0, 1.0, 1.0],
        vec![c00, c01, c10, c11],
        vec![1.0; 4],
    )
    .expect("valid bilinear patch")
}

/// Exact rational biquadratic patch covering the sphere octant in the
/// direction `signs` (each `+1` or `-1`). The `v = 1` edge collapses onto
/// the pole on the z axis.
pub fn sphere_octant(center: Vec3, radius: f64, signs: [f64; 3]) -> NurbsSurface {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // Quarter circle in the xy plane from +x to +y, and the profile from
    // the equator (rho = 1, z = 0) to the pole (rho = 0, z = 1).
    let ring = [[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let profile = [[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let wq = [1.0, h, 1.0];
    let mut ctrl = Vec::with_capacity(9);
    let mut w = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            let rho = profile[j][0];
            let p = [ring[i][0] * rho, ring[i][1] * rho, profile[j][1]];
            ctrl.push(std::array::from_fn(|c| center[c] + radius * signs[c] * p[c]));
            w.push(wq[i] * wq[j]);
        }
    }
    let k = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
    NurbsSurface::new([2, 2], [3, 3], k.clone(), k, ctrl, w).expect("valid sphere octant")
}

/// All eight octants of a sphere.
pub fn sphere_patches(center: Vec3, radius: f64) -> Vec<NurbsSurface> {
    let mut out = Vec::with_capacity(8);
    for sz in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sx in [1.0, -1.0] {
                out.push(sphere_octant(center, radius, [sx, sy, sz]));
            }
        }
    }
    out
}

/// Quarter cylinder of the given radius around the z axis, `u` along the arc
/// from +x to +y and `v` along `z` from `z0` to `z1`.
pub fn cylinder_patch(radius: f64, z0: f64, z1: f64) -> NurbsSurface {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ring = [[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let wq = [1.0, h, 1.0];
    let mut ctrl = Vec::with_capacity(6);
    let mut w = Vec::with_capacity(6);
    for i in 0..3 {
        for z in [z0, z1] {
            ctrl.push([radius * ring[i][0], radius * ring[i][1], z]);
            w.push(wq[i]);
        }
    }
    NurbsSurface::new(
        [2, 1],
        [3, 2],
        vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
        vec![0.0, 0.0, 1.0, 1.0],
        ctrl,
        w,
    )
    .expect("valid cylinder patch")
}
