//! Plain 2-vectors and row-major 2×2 matrices over any [`Real`].

use crate::dual::Real;

pub type Vec2<T> = [T; 2];
pub type Mat2<T> = [[T; 2]; 2];

/// `Det(u, v) = u_a v_b − u_b v_a`.
#[inline]
pub fn det<T: Real>(u: Vec2<T>, v: Vec2<T>) -> T {
    u[0] * v[1] - u[1] * v[0]
}

/// `v^⊥ = (v_b, −v_a)`, so that `u · v^⊥ = Det(u, v)`.
#[inline]
pub fn perp<T: Real>(v: Vec2<T>) -> Vec2<T> {
    [v[1], -v[0]]
}

#[inline]
pub fn add<T: Real>(u: Vec2<T>, v: Vec2<T>) -> Vec2<T> {
    [u[0] + v[0], u[1] + v[1]]
}

#[inline]
pub fn sub<T: Real>(u: Vec2<T>, v: Vec2<T>) -> Vec2<T> {
    [u[0] - v[0], u[1] - v[1]]
}

#[inline]
pub fn scale<T: Real>(s: T, v: Vec2<T>) -> Vec2<T> {
    [s * v[0], s * v[1]]
}

#[inline]
pub fn lift<T: Real>(v: [f64; 2]) -> Vec2<T> {
    [T::cst(v[0]), T::cst(v[1])]
}

#[inline]
pub fn values<T: Real>(v: Vec2<T>) -> [f64; 2] {
    [v[0].value(), v[1].value()]
}

/// Rank-one matrix `u vᵀ`.
#[inline]
pub fn outer<T: Real>(u: Vec2<T>, v: Vec2<T>) -> Mat2<T> {
    [[u[0] * v[0], u[0] * v[1]], [u[1] * v[0], u[1] * v[1]]]
}

#[inline]
pub fn zeros<T: Real>() -> Mat2<T> {
    [[T::cst(0.0); 2]; 2]
}

#[inline]
pub fn identity<T: Real>() -> Mat2<T> {
    [[T::cst(1.0), T::cst(0.0)], [T::cst(0.0), T::cst(1.0)]]
}

#[inline]
pub fn mat_add<T: Real>(a: Mat2<T>, b: Mat2<T>) -> Mat2<T> {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

#[inline]
pub fn mat_sub<T: Real>(a: Mat2<T>, b: Mat2<T>) -> Mat2<T> {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}

#[inline]
pub fn mat_scale<T: Real>(s: T, a: Mat2<T>) -> Mat2<T> {
    [[s * a[0][0], s * a[0][1]], [s * a[1][0], s * a[1][1]]]
}

#[inline]
pub fn mat_mul<T: Real>(a: Mat2<T>, b: Mat2<T>) -> Mat2<T> {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

#[inline]
pub fn transpose<T: Real>(a: Mat2<T>) -> Mat2<T> {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

#[inline]
pub fn trace<T: Real>(a: Mat2<T>) -> T {
    a[0][0] + a[1][1]
}

#[inline]
pub fn mat_det<T: Real>(a: Mat2<T>) -> T {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn inverse<T: Real>(a: Mat2<T>) -> Mat2<T> {
    let inv = mat_det(a).recip();
    [
        [a[1][1] * inv, -a[0][1] * inv],
        [-a[1][0] * inv, a[0][0] * inv],
    ]
}

/// Trace of the product `a·b` without forming it.
#[inline]
pub fn trace_mul<T: Real>(a: Mat2<T>, b: Mat2<T>) -> T {
    a[0][0] * b[0][0] + a[0][1] * b[1][0] + a[1][0] * b[0][1] + a[1][1] * b[1][1]
}

#[inline]
pub fn mat_values<T: Real>(a: Mat2<T>) -> Mat2<f64> {
    [
        [a[0][0].value(), a[0][1].value()],
        [a[1][0].value(), a[1][1].value()],
    ]
}

pub fn max_abs_diff(a: Mat2<f64>, b: Mat2<f64>) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

pub fn max_abs(a: Mat2<f64>) -> f64 {
    a.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()))
}
