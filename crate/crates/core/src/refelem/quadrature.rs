//! Volume cubature on the tetrahedron and quadrature on its triangular faces.

use crate::refelem::{from_barycentric, Point3};

/// One-dimensional Gauss-Legendre rule on `[-1, 1]` with `n` points.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, z);
        x[i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Lobatto-Legendre nodes on `[-1, 1]`, ascending, `n >= 2` points.
pub fn gauss_lobatto(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let order = n - 1;
    let mut x: Vec<f64> = (0..n)
        .map(|i| (std::f64::consts::PI * i as f64 / order as f64).cos())
        .collect();
    for _ in 0..200 {
        let mut max_dx: f64 = 0.0;
        for xi in x.iter_mut() {
            let mut p0 = 1.0;
            let mut p1 = *xi;
            for k in 2..=order {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * *xi * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dx = (*xi * p1 - p0) / (n as f64 * p1);
            *xi -= dx;
            max_dx = max_dx.max(dx.abs());
        }
        if max_dx < 1e-16 {
            break;
        }
    }
    x.reverse();
    x
}

/// All `(b0, b1, b2, b3)` with nonnegative entries summing to `total`.
fn compositions4(total: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..=total {
        for b in 0..=total - a {
            for c in 0..=total - a - b {
                out.push([a, b, c, total - a - b - c]);
            }
        }
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Grundmann-Moeller rule of index `s` (exact to degree `2s + 1`) on the
/// reference tetrahedron, scaled so the weights sum to its volume `4/3`.
/// Weights alternate in sign between orbits.
pub fn grundmann_moeller_tet(s: usize) -> (Vec<Point3>, Vec<f64>) {
    let n = 3usize;
    let d = 2 * s + 1;
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    for i in 0..=s {
        let denom = (d + n - 2 * i) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let w = sign * 2f64.powi(-(2 * s as i32)) * denom.powi(d as i32) / (factorial(i) * factorial(d + n - i));
        for beta in compositions4(s - i) {
            let lam = [
                (2 * beta[0] + 1) as f64 / denom,
                (2 * beta[1] + 1) as f64 / denom,
                (2 * beta[2] + 1) as f64 / denom,
                (2 * beta[3] + 1) as f64 / denom,
            ];
            pts.push(from_barycentric(&lam));
            wts.push(w);
        }
    }
    let total: f64 = wts.iter().sum();
    let scale = (4.0 / 3.0) / total;
    wts.iter_mut().for_each(|w| *w *= scale);
    (pts, wts)
}

/// Number of points of the Grundmann-Moeller rule of index `s` in 3D.
pub fn grundmann_moeller_count(s: usize) -> usize {
    (0..=s).map(|m| (m + 1) * (m + 2) * (m + 3) / 6).sum()
}

/// A fully symmetric triangle rule in barycentric coordinates; weights sum to 1.
#[derive(Clone, Debug)]
pub struct TriangleRule {
    pub degree: usize,
    pub bary: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

fn push_orbit(rule: &mut TriangleRule, a: f64, b: f64, c: f64, w: f64) {
    let mut perms: Vec<[f64; 3]> = vec![[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]];
    perms.sort_by(|x, y| x.partial_cmp(y).unwrap());
    perms.dedup();
    for p in perms {
        rule.bary.push(p);
        rule.weights.push(w);
    }
}

fn orbit3(rule: &mut TriangleRule, a: f64, w: f64) {
    let b = 0.5 * (1.0 - a);
    push_orbit(rule, a, b, b, w);
}

fn orbit6(rule: &mut TriangleRule, a: f64, b: f64, w: f64) {
    push_orbit(rule, a, b, 1.0 - a - b, w);
}

/// Symmetric triangle rule exact for polynomials of total degree `degree`.
///
/// Degrees up to 8 use tabulated symmetric rules (3, 6, 12 and 16 points for
/// degrees 2, 4, 6, 8). Higher degrees symmetrize a collapsed Gauss product
/// rule over the six vertex permutations.
pub fn triangle_rule(degree: usize) -> TriangleRule {
    let mut rule = TriangleRule {
        degree,
        bary: Vec::new(),
        weights: Vec::new(),
    };
    match degree {
        0 | 1 => {
            push_orbit(&mut rule, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0);
        }
        2 => {
            orbit3(&mut rule, 2.0 / 3.0, 1.0 / 3.0);
        }
        3 | 4 => {
            orbit3(&mut rule, 0.108103018168070, 0.223381589678011);
            orbit3(&mut rule, 0.816847572980459, 0.109951743655322);
        }
        5 | 6 => {
            orbit3(&mut rule, 0.501426509658179, 0.116786275726379);
            orbit3(&mut rule, 0.873821971016996, 0.050844906370207);
            orbit6(&mut rule, 0.053145049844817, 0.310352451033784, 0.082851075618374);
        }
        7 | 8 => {
            push_orbit(&mut rule, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.144315607677787);
            orbit3(&mut rule, 0.081414823414554, 0.095091634267285);
            orbit3(&mut rule, 0.658861384496480, 0.103217370534718);
            orbit3(&mut rule, 0.898905543365938, 0.032458497623198);
            orbit6(&mut rule, 0.008394777409958, 0.263112829634638, 0.027230314174435);
        }
        _ => {
            let n = (degree + 2).div_ceil(2);
            let (x, w) = gauss_legendre(n);
            for (xi, wi) in x.iter().zip(&w) {
                for (eta, we) in x.iter().zip(&w) {
                    let u = 0.5 * (1.0 + xi);
                    let v = 0.5 * (1.0 + eta) * (1.0 - u);
                    // Collapsed-map Jacobian; normalized below.
                    let weight = wi * we * (1.0 - u);
                    let l = [1.0 - u - v, u, v];
                    for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                        rule.bary.push([l[perm[0]], l[perm[1]], l[perm[2]]]);
                        rule.weights.push(weight);
                    }
                }
            }
        }
    }
    // Tabulated weights carry 15 digits; renormalize the sum exactly.
    let total: f64 = rule.weights.iter().sum();
    rule.weights.iter_mut().for_each(|w| *w /= total);
    rule
}
