//! Orthonormal hierarchical modal basis on the reference tetrahedron.
//!
//! The basis is the collapsed-coordinate Jacobi construction. Each factor
//! `P_n(a) * ((1 - b) / 2)^n` is evaluated in homogeneous form
//! `q_n(x, y) = y^n P_n(x / y)`, which is a polynomial in `(r, s, t)` and has
//! no singularity at the collapsed vertices and edges. Derivatives come from
//! forward-mode dual numbers pushed through the same recurrences.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::refelem::{barycentric, Point3, BARY_TOL};

/// Value plus gradient with respect to `(r, s, t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: [f64; 3],
}

impl Dual {
    pub fn constant(v: f64) -> Self {
        Dual { v, d: [0.0; 3] }
    }

    fn var(v: f64, axis: usize) -> Self {
        let mut d = [0.0; 3];
        d[axis] = 1.0;
        Dual { v, d }
    }

    fn scale(self, c: f64) -> Self {
        Dual {
            v: self.v * c,
            d: [self.d[0] * c, self.d[1] * c, self.d[2] * c],
        }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual {
            v: self.v + o.v,
            d: [self.d[0] + o.d[0], self.d[1] + o.d[1], self.d[2] + o.d[2]],
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual {
            v: self.v - o.v,
            d: [self.d[0] - o.d[0], self.d[1] - o.d[1], self.d[2] - o.d[2]],
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            d: [
                self.d[0] * o.v + self.v * o.d[0],
                self.d[1] * o.v + self.v * o.d[1],
                self.d[2] * o.v + self.v * o.d[2],
            ],
        }
    }
}

/// Minimal scalar abstraction so the recurrences run on `f64` and [`Dual`].
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    fn from_f64(v: f64) -> Self;
    fn scaled(self, c: f64) -> Self;
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn scaled(self, c: f64) -> Self {
        self * c
    }
}

impl Scalar for Dual {
    fn from_f64(v: f64) -> Self {
        Dual::constant(v)
    }
    fn scaled(self, c: f64) -> Self {
        self.scale(c)
    }
}

fn gamma_fn(n: f64) -> f64 {
    // Only integer and small arguments are needed here.
    let mut acc = 1.0;
    let mut k = n - 1.0;
    while k > 1.0 {
        acc *= k;
        k -= 1.0;
    }
    acc
}

/// Homogeneous orthonormal Jacobi polynomials `q_n(x, y) = y^n P_n^{(alpha, 0)}(x / y)`
/// for `n = 0..=order`. With `y = 1` these are the ordinary orthonormal Jacobi
/// polynomials on `[-1, 1]`.
pub fn jacobi_homogeneous<T: Scalar>(order: usize, alpha: f64, beta: f64, x: T, y: T) -> Vec<T> {
    let ab = alpha + beta;
    let gamma0 = 2f64.powf(ab + 1.0) / (ab + 1.0) * gamma_fn(alpha + 1.0) * gamma_fn(beta + 1.0) / gamma_fn(ab + 1.0);
    let mut out = Vec::with_capacity(order + 1);
    out.push(T::from_f64(1.0 / gamma0.sqrt()));
    if order == 0 {
        return out;
    }
    let gamma1 = (alpha + 1.0) * (beta + 1.0) / (ab + 3.0) * gamma0;
    let p1 = (x.scaled((ab + 2.0) / 2.0) + y.scaled((alpha - beta) / 2.0)).scaled(1.0 / gamma1.sqrt());
    out.push(p1);
    let mut a_old = 2.0 / (2.0 + ab) * ((alpha + 1.0) * (beta + 1.0) / (ab + 3.0)).sqrt();
    let y2 = y * y;
    for i in 1..order {
        let fi = i as f64;
        let h1 = 2.0 * fi + ab;
        let a_new = 2.0 / (h1 + 2.0)
            * ((fi + 1.0) * (fi + 1.0 + ab) * (fi + 1.0 + alpha) * (fi + 1.0 + beta) / (h1 + 1.0) / (h1 + 3.0)).sqrt();
        let b_new = -(alpha * alpha - beta * beta) / h1 / (h1 + 2.0);
        let next = ((x - y.scaled(b_new)) * out[i] - (y2 * out[i - 1]).scaled(a_old)).scaled(1.0 / a_new);
        out.push(next);
        a_old = a_new;
    }
    out
}

/// Orthonormal Jacobi polynomials `P_n^{(alpha, beta)}(x)` for `n = 0..=order`.
pub fn jacobi(order: usize, alpha: f64, beta: f64, x: f64) -> Vec<f64> {
    jacobi_homogeneous(order, alpha, beta, x, 1.0)
}

/// Number of modes of total degree `<= p` in three dimensions.
pub fn n_basis(p: usize) -> usize {
    (p + 1) * (p + 2) * (p + 3) / 6
}

/// Mode multi-indices `(i, j, k)` ordered by total degree, so the first
/// `n_basis(p - 1)` modes of degree `p` are exactly the degree `p - 1` basis.
pub fn mode_indices(p: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(n_basis(p));
    for deg in 0..=p {
        for i in 0..=deg {
            for j in 0..=deg - i {
                out.push([i, j, deg - i - j]);
            }
        }
    }
    out
}

fn eval_all<T: Scalar>(p: usize, r: T, s: T, t: T) -> Vec<T> {
    let one = T::from_f64(1.0);
    let half = 0.5;
    let st = s + t;
    let x1 = one + r + st.scaled(half);
    let y1 = st.scaled(-half);
    let x2 = (one + s.scaled(2.0) + t).scaled(half);
    let y2 = (one - t).scaled(half);

    let q1 = jacobi_homogeneous(p, 0.0, 0.0, x1, y1);
    let modes = mode_indices(p);
    let mut q2: Vec<Vec<T>> = Vec::with_capacity(p + 1);
    for i in 0..=p {
        q2.push(jacobi_homogeneous(p - i, 2.0 * i as f64 + 1.0, 0.0, x2, y2));
    }
    let mut q3: Vec<Vec<Vec<T>>> = Vec::with_capacity(p + 1);
    for i in 0..=p {
        let mut row = Vec::with_capacity(p + 1 - i);
        for j in 0..=p - i {
            row.push(jacobi_homogeneous(p - i - j, 2.0 * (i + j) as f64 + 2.0, 0.0, t, one));
        }
        q3.push(row);
    }
    modes
        .iter()
        .map(|&[i, j, k]| {
            let c = 2.0 * 2f64.sqrt() * 4f64.powi(i as i32) * 2f64.powi(j as i32);
            (q1[i] * q2[i][j] * q3[i][j][k]).scaled(c)
        })
        .collect()
}

fn check_inside(pt: &Point3) -> Result<()> {
    let l = barycentric(pt);
    if l.iter().any(|&v| v < -BARY_TOL) {
        return Err(Error::Domain(format!(
            "point ({}, {}, {}) lies outside the reference tetrahedron",
            pt[0], pt[1], pt[2]
        )));
    }
    Ok(())
}

/// Values of all `n_basis(p)` modes at one point.
pub fn eval_point(p: usize, pt: &Point3) -> Vec<f64> {
    eval_all(p, pt[0], pt[1], pt[2])
}

/// Values and gradients of all modes at one point.
pub fn eval_point_grad(p: usize, pt: &Point3) -> Vec<Dual> {
    eval_all(p, Dual::var(pt[0], 0), Dual::var(pt[1], 1), Dual::var(pt[2], 2))
}

/// Modal basis evaluated at `points`: entry `(i, j)` is `psi_j(points[i])`.
pub fn modal_basis_eval(p: usize, points: &[Point3]) -> Result<DMatrix<f64>> {
    let nb = n_basis(p);
    let mut m = DMatrix::zeros(points.len(), nb);
    for (i, pt) in points.iter().enumerate() {
        check_inside(pt)?;
        for (j, v) in eval_point(p, pt).into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

/// Derivative Vandermonde matrices `(V_r, V_s, V_t)` at `points`.
pub fn grad_modal_basis_eval(p: usize, points: &[Point3]) -> Result<[DMatrix<f64>; 3]> {
    let nb = n_basis(p);
    let mut out = [
        DMatrix::zeros(points.len(), nb),
        DMatrix::zeros(points.len(), nb),
        DMatrix::zeros(points.len(), nb),
    ];
    for (i, pt) in points.iter().enumerate() {
        check_inside(pt)?;
        for (j, v) in eval_point_grad(p, pt).into_iter().enumerate() {
            for (axis, m) in out.iter_mut().enumerate() {
                m[(i, j)] = v.d[axis];
            }
        }
    }
    Ok(out)
}
