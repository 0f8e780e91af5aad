//! Small dense complex solves on top of nalgebra.

use nalgebra::{Matrix3, Matrix4x3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::theta::CVec3;

pub type CMat3 = [[Complex64; 3]; 3];

/// Systems whose condition number exceeds this are treated as singular.
pub const SINGULAR_COND: f64 = 1e12;

pub fn to_matrix(m: &CMat3) -> Matrix3<Complex64> {
    Matrix3::from_fn(|i, j| m[i][j])
}

pub fn from_matrix(m: &Matrix3<Complex64>) -> CMat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

fn norm1(m: &Matrix3<Complex64>) -> f64 {
    (0..3).map(|j| (0..3).map(|i| m[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// 1-norm condition number `‖m‖₁ ‖m⁻¹‖₁`; infinite when the LU inverse fails
/// or is not finite.
pub fn condition_number(m: &Matrix3<Complex64>) -> f64 {
    let Some(inv) = m.try_inverse() else {
        return f64::INFINITY;
    };
    let k = norm1(m) * norm1(&inv);
    if k.is_finite() {
        k
    } else {
        f64::INFINITY
    }
}

/// Solves `m x = b`, refusing numerically singular systems. Rows and columns
/// are equilibrated first, so pure scaling does not count as ill-conditioning.
pub fn solve3(m: &Matrix3<Complex64>, b: &CVec3, what: &'static str) -> Result<CVec3> {
    let mut r = [1.0f64; 3];
    let mut c = [1.0f64; 3];
    for _ in 0..2 {
        for i in 0..3 {
            let s = (0..3).map(|j| (m[(i, j)] * r[i] * c[j]).norm()).fold(0.0, f64::max);
            if s > 0.0 && s.is_finite() {
                r[i] /= s;
            }
        }
        for j in 0..3 {
            let s = (0..3).map(|i| (m[(i, j)] * r[i] * c[j]).norm()).fold(0.0, f64::max);
            if s > 0.0 && s.is_finite() {
                c[j] /= s;
            }
        }
    }
    let scaled = Matrix3::from_fn(|i, j| m[(i, j)] * r[i] * c[j]);
    if !(condition_number(&scaled) < SINGULAR_COND) {
        return Err(Error::Singular(what));
    }
    let rhs = Vector3::from_fn(|i, _| b[i] * r[i]);
    let y = scaled.lu().solve(&rhs).ok_or(Error::Singular(what))?;
    let x: CVec3 = std::array::from_fn(|j| y[j] * c[j]);
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Singular(what));
    }
    Ok(x)
}

/// Least-squares solution of the 4×3 system `r X = rhs` (three right-hand
/// sides) together with the relative residual `‖rX − rhs‖_F / ‖rhs‖_F`.
pub fn lstsq_4x3(r: &Matrix4x3<Complex64>, rhs: &Matrix4x3<Complex64>) -> Result<(Matrix3<Complex64>, f64)> {
    let qr = r.qr();
    let rr = qr.r();
    if !(condition_number(&rr) < SINGULAR_COND) {
        return Err(Error::Singular("least-squares system is rank deficient"));
    }
    let qt_b = qr.q().adjoint() * rhs;
    let x = rr
        .solve_upper_triangular(&qt_b)
        .ok_or(Error::Singular("least-squares system is rank deficient"))?;
    let resid = (r * x - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
    Ok((x, resid))
}

pub fn norm3(v: &CVec3) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖u × v‖ / (‖u‖ ‖v‖)`: zero exactly when `u` and `v` are proportional.
pub fn cross_residual(u: &CVec3, v: &CVec3) -> f64 {
    let cross = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let denom = norm3(u) * norm3(v);
    if denom == 0.0 {
        f64::INFINITY
    } else {
        norm3(&cross) / denom
    }
}
