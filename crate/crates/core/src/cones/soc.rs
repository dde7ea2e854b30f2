//! Barrier −ln(x₀² − ‖x̄‖²) for the second-order cone x₀ ≥ ‖x̄‖ (ν = 2).

use super::{smallest_positive_root, ConeError, StepLimit};
use crate::linalg::{Mat64, Vec64};

/// q(x) = x₀² − ‖x̄‖² = ⟨Jx, x⟩ with J = diag(1, −1, …, −1).
fn q(x: &Vec64) -> f64 {
    let tail: f64 = x.rows(1, x.len() - 1).norm_squared();
    x[0] * x[0] - tail
}

fn j_apply(x: &Vec64) -> Vec64 {
    let mut jx = -x.clone();
    jx[0] = x[0];
    jx
}

pub fn margin(x: &Vec64) -> f64 {
    x[0] - x.rows(1, x.len() - 1).norm()
}

pub fn value(x: &Vec64) -> Result<f64, ConeError> {
    Ok(-q(x).ln())
}

pub fn gradient(x: &Vec64) -> Result<Vec64, ConeError> {
    Ok(j_apply(x) * (-2.0 / q(x)))
}

pub fn hessian(x: &Vec64) -> Result<Mat64, ConeError> {
    let qx = q(x);
    let jx = j_apply(x);
    let mut h = &jx * jx.transpose() * (4.0 / (qx * qx));
    // plus −2J/q with J = diag(1, −1, …, −1)
    let s = -2.0 / qx;
    for i in 0..x.len() {
        h[(i, i)] += if i == 0 { s } else { -s };
    }
    Ok(h)
}

pub fn third(x: &Vec64, h: &Vec64) -> Result<Mat64, ConeError> {
    let qx = q(x);
    let jx = j_apply(x);
    let jh = j_apply(h);
    let jxh = jx.dot(h);
    let mut m = (&jh * jx.transpose() + &jx * jh.transpose()) * (4.0 / (qx * qx))
        - &jx * jx.transpose() * (16.0 * jxh / (qx * qx * qx));
    let s = 4.0 * jxh / (qx * qx);
    for i in 0..x.len() {
        m[(i, i)] += if i == 0 { s } else { -s };
    }
    Ok(m)
}

/// σ from the quadratic q(ρx − h) = ρ²q(x) − 2ρ⟨Jx,h⟩ + q(h) and the linear
/// constraint ρx₀ ≥ h₀.
pub fn sigma(x: &Vec64, h: &Vec64) -> Result<f64, ConeError> {
    let qx = q(x);
    let jxh = j_apply(x).dot(h);
    let qh = q(h);
    let m = (h[0] / x[0]).max(0.0);
    let disc = jxh * jxh - qx * qh;
    if disc <= 0.0 {
        return Ok(m);
    }
    let sq = disc.sqrt();
    let r_lo = (jxh - sq) / qx;
    let r_hi = (jxh + sq) / qx;
    Ok(if m <= r_lo { m } else { m.max(r_hi) })
}

pub fn max_step(x: &Vec64, d: &Vec64) -> Result<StepLimit, ConeError> {
    // first root of q(x + αd) = q(d)α² + 2⟨Jx,d⟩α + q(x); the path cannot
    // reach the mirrored cone without crossing q = 0.
    let a = q(d);
    let b = 2.0 * j_apply(x).dot(d);
    let c = q(x);
    Ok(match smallest_positive_root(a, b, c) {
        Some(r) => StepLimit::Finite(r),
        None => StepLimit::Unbounded,
    })
}

/// −∇F_*(s) = 2Js/q(s).
pub fn conjugate(s: &Vec64) -> Result<Vec64, ConeError> {
    Ok(j_apply(s) * (2.0 / q(s)))
}
