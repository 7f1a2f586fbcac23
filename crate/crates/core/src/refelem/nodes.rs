//! Warp-and-blend interpolation nodes on the reference tetrahedron.

use log::warn;

use crate::error::{Error, Result};
use crate::refelem::quadrature::gauss_lobatto;
use crate::refelem::Point3;

/// Optimized blending parameters per degree (index = degree - 1).
const ALPHA_OPT: [f64; 15] = [
    0.0, 0.0, 0.0, 0.1002, 1.1332, 1.5608, 1.3413, 1.2577, 1.1603, 1.10153, 0.6080, 0.4523, 0.8856, 0.8717, 0.9655,
];

pub const MAX_DEGREE: usize = 9;

const TOL: f64 = 1e-10;

/// Equidistant lattice of degree `p` as integer barycentric coordinates
/// `(l0, l1, l2, l3)` summing to `p`, with `l1, l2, l3` counting steps along
/// `r`, `s`, `t`. The ordering is `t` outermost, then `s`, then `r`.
pub fn lattice(p: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for c in 0..=p {
        for b in 0..=p - c {
            for a in 0..=p - c - b {
                out.push([p - a - b - c, a, b, c]);
            }
        }
    }
    out
}

/// Equidistant nodes in reference coordinates, same order as [`lattice`].
pub fn equidistant_nodes(p: usize) -> Vec<Point3> {
    let h = if p == 0 { 0.0 } else { 2.0 / p as f64 };
    lattice(p)
        .into_iter()
        .map(|[_, a, b, c]| {
            if p == 0 {
                [-0.5, -0.5, -0.5]
            } else {
                [-1.0 + a as f64 * h, -1.0 + b as f64 * h, -1.0 + c as f64 * h]
            }
        })
        .collect()
}

fn eval_warp(p: usize, gll: &[f64], xout: f64) -> f64 {
    // Equidistant points in descending order to match `gll`.
    let xeq: Vec<f64> = (0..=p).map(|i| -1.0 + 2.0 * (p - i) as f64 / p as f64).collect();
    let mut warp = 0.0;
    for i in 0..=p {
        let mut d = gll[i] - xeq[i];
        for j in 1..p {
            if i != j {
                d = d * (xout - xeq[j]) / (xeq[i] - xeq[j]);
            }
        }
        if i != 0 {
            d = -d / (xeq[i] - xeq[0]);
        }
        if i != p {
            d /= xeq[i] - xeq[p];
        }
        warp += d;
    }
    warp
}

fn eval_shift(p: usize, alpha: f64, gll: &[f64], l1: f64, l2: f64, l3: f64) -> (f64, f64) {
    let blend1 = l2 * l3;
    let blend2 = l1 * l3;
    let blend3 = l1 * l2;
    let wf1 = 4.0 * eval_warp(p, gll, l3 - l2);
    let wf2 = 4.0 * eval_warp(p, gll, l1 - l3);
    let wf3 = 4.0 * eval_warp(p, gll, l2 - l1);
    let warp1 = blend1 * wf1 * (1.0 + (alpha * l1).powi(2));
    let warp2 = blend2 * wf2 * (1.0 + (alpha * l2).powi(2));
    let warp3 = blend3 * wf3 * (1.0 + (alpha * l3).powi(2));
    let (c2, s2) = (
        (2.0 * std::f64::consts::PI / 3.0).cos(),
        (2.0 * std::f64::consts::PI / 3.0).sin(),
    );
    let (c4, s4) = (
        (4.0 * std::f64::consts::PI / 3.0).cos(),
        (4.0 * std::f64::consts::PI / 3.0).sin(),
    );
    (warp1 + c2 * warp2 + c4 * warp3, s2 * warp2 + s4 * warp3)
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn axpy(a: f64, x: [f64; 3], y: [f64; 3]) -> [f64; 3] {
    [y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2]]
}

fn normalized(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Warp-and-blend nodes of degree `p` (1..=9), in [`lattice`] order.
pub fn warp_blend_nodes(p: usize) -> Result<Vec<Point3>> {
    if p == 0 || p > MAX_DEGREE {
        return Err(Error::Config(format!(
            "collocation nodes support degrees 1..={MAX_DEGREE}, got {p}"
        )));
    }
    let alpha = match ALPHA_OPT.get(p - 1) {
        Some(a) => *a,
        None => {
            warn!("no tabulated blend parameter for degree {p}; using blend-only nodes");
            0.0
        }
    };
    // Descending, to pair with the descending equidistant points.
    let gll: Vec<f64> = gauss_lobatto(p + 1).into_iter().map(|x| -x).collect();

    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    let v1 = [-1.0, -1.0 / s3, -1.0 / s6];
    let v2 = [1.0, -1.0 / s3, -1.0 / s6];
    let v3 = [0.0, 2.0 / s3, -1.0 / s6];
    let v4 = [0.0, 0.0, 3.0 / s6];
    let mid = |a: [f64; 3], b: [f64; 3]| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])];
    let t1 = [
        normalized(sub(v2, v1)),
        normalized(sub(v2, v1)),
        normalized(sub(v3, v2)),
        normalized(sub(v3, v1)),
    ];
    let t2 = [
        normalized(sub(v3, mid(v1, v2))),
        normalized(sub(v4, mid(v1, v2))),
        normalized(sub(v4, mid(v2, v3))),
        normalized(sub(v4, mid(v1, v3))),
    ];

    let eq = equidistant_nodes(p);
    let mut out = Vec::with_capacity(eq.len());
    for [r, s, t] in eq {
        let l1 = 0.5 * (1.0 + t);
        let l2 = 0.5 * (1.0 + s);
        let l3 = -0.5 * (1.0 + r + s + t);
        let l4 = 0.5 * (1.0 + r);
        let mut xyz = [0.0; 3];
        xyz = axpy(l3, v1, xyz);
        xyz = axpy(l4, v2, xyz);
        xyz = axpy(l2, v3, xyz);
        xyz = axpy(l1, v4, xyz);

        let mut shift = [0.0; 3];
        for face in 0..4 {
            let (la, lb, lc, ld) = match face {
                0 => (l1, l2, l3, l4),
                1 => (l2, l1, l3, l4),
                2 => (l3, l1, l4, l2),
                _ => (l4, l1, l3, l2),
            };
            let (w1, w2) = eval_shift(p, alpha, &gll, lb, lc, ld);
            let mut blend = lb * lc * ld;
            let denom = (lb + 0.5 * la) * (lc + 0.5 * la) * (ld + 0.5 * la);
            if denom > TOL {
                blend = (1.0 + (alpha * la).powi(2)) * blend / denom;
            }
            shift = axpy(blend * w1, t1[face], shift);
            shift = axpy(blend * w2, t2[face], shift);
            let interior_count = [lb, lc, ld].iter().filter(|&&v| v > TOL).count();
            if la < TOL && interior_count < 3 {
                shift = axpy(w1, t1[face], [0.0; 3]);
                shift = axpy(w2, t2[face], shift);
            }
        }
        for k in 0..3 {
            xyz[k] += shift[k];
        }

        // Equilateral -> reference coordinates.
        let rhs = [
            xyz[0] - 0.5 * (v2[0] + v3[0] + v4[0] - v1[0]),
            xyz[1] - 0.5 * (v2[1] + v3[1] + v4[1] - v1[1]),
            xyz[2] - 0.5 * (v2[2] + v3[2] + v4[2] - v1[2]),
        ];
        let a = nalgebra::Matrix3::from_columns(&[
            nalgebra::Vector3::from(sub(v2, v1)) * 0.5,
            nalgebra::Vector3::from(sub(v3, v1)) * 0.5,
            nalgebra::Vector3::from(sub(v4, v1)) * 0.5,
        ]);
        let rst = a
            .lu()
            .solve(&nalgebra::Vector3::from(rhs))
            .expect("equilateral map is nonsingular");
        out.push([rst[0], rst[1], rst[2]]);
    }
    Ok(out)
}
