//! Barrier −ln det X for the PSD cone (ν = n).
//!
//! Matrices live in scaled svec coordinates: the diagonal entries are stored
//! as-is and each off-diagonal pair as √2·Xᵢⱼ, so the coordinate dot product
//! equals the trace inner product ⟨X, Y⟩ = tr(XY).

use super::{ConeError, StepLimit};
use crate::linalg::{Mat64, Vec64};
use nalgebra::Cholesky;

pub fn svec_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

pub fn mat_from_svec(n: usize, v: &Vec64) -> Mat64 {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = Mat64::zeros(n, n);
    let mut k = 0;
    for j in 0..n {
        for i in 0..=j {
            if i == j {
                m[(i, j)] = v[k];
            } else {
                m[(i, j)] = v[k] * inv_sqrt2;
                m[(j, i)] = v[k] * inv_sqrt2;
            }
            k += 1;
        }
    }
    m
}

pub fn svec_from_mat(m: &Mat64) -> Vec64 {
    let n = m.nrows();
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut v = Vec64::zeros(svec_dim(n));
    let mut k = 0;
    for j in 0..n {
        for i in 0..=j {
            v[k] = if i == j {
                m[(i, j)]
            } else {
                0.5 * (m[(i, j)] + m[(j, i)]) * sqrt2
            };
            k += 1;
        }
    }
    v
}

fn chol(n: usize, x: &Vec64) -> Result<Cholesky<f64, nalgebra::Dyn>, ConeError> {
    Cholesky::new(mat_from_svec(n, x)).ok_or(ConeError::OutsideCone)
}

pub fn margin(n: usize, x: &Vec64) -> f64 {
    if x.len() != svec_dim(n) {
        return f64::NEG_INFINITY;
    }
    mat_from_svec(n, x)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn value(n: usize, x: &Vec64) -> Result<f64, ConeError> {
    let l = chol(n, x)?;
    Ok(-2.0 * l.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>())
}

pub fn gradient(n: usize, x: &Vec64) -> Result<Vec64, ConeError> {
    let inv = chol(n, x)?.inverse();
    Ok(-svec_from_mat(&inv))
}

/// Operator H ↦ X⁻¹HX⁻¹ assembled column by column in svec coordinates.
pub fn hessian(n: usize, x: &Vec64) -> Result<Mat64, ConeError> {
    let inv = chol(n, x)?.inverse();
    let d = svec_dim(n);
    let mut h = Mat64::zeros(d, d);
    for k in 0..d {
        let mut e = Vec64::zeros(d);
        e[k] = 1.0;
        let basis = mat_from_svec(n, &e);
        let col = svec_from_mat(&(&inv * basis * &inv));
        h.set_column(k, &col);
    }
    Ok(h)
}

/// ∇³F(X)[H]: U ↦ −(X⁻¹ĤX⁻¹UX⁻¹ + X⁻¹UX⁻¹ĤX⁻¹) with Ĥ = mat(h).
pub fn third(n: usize, x: &Vec64, h: &Vec64) -> Result<Mat64, ConeError> {
    let inv = chol(n, x)?.inverse();
    let hm = mat_from_svec(n, h);
    let left = &inv * &hm * &inv;
    let d = svec_dim(n);
    let mut m = Mat64::zeros(d, d);
    for k in 0..d {
        let mut e = Vec64::zeros(d);
        e[k] = 1.0;
        let u = mat_from_svec(n, &e);
        let t = &left * &u * &inv + &inv * &u * &left;
        m.set_column(k, &(-svec_from_mat(&t)));
    }
    Ok(m)
}

/// Eigenvalues of X⁻¹-scaled H via L⁻¹ mat(h) L⁻ᵀ.
fn scaled_eigenvalues(n: usize, x: &Vec64, h: &Vec64) -> Result<Vec64, ConeError> {
    let l = chol(n, x)?.l();
    let half = l
        .solve_lower_triangular(&mat_from_svec(n, h))
        .ok_or(ConeError::OutsideCone)?;
    let w = l
        .solve_lower_triangular(&half.transpose())
        .ok_or(ConeError::OutsideCone)?;
    Ok(w.symmetric_eigenvalues())
}

pub fn sigma(n: usize, x: &Vec64, h: &Vec64) -> Result<f64, ConeError> {
    let ev = scaled_eigenvalues(n, x, h)?;
    Ok(ev.iter().copied().fold(0.0f64, f64::max))
}

pub fn max_step(n: usize, x: &Vec64, d: &Vec64) -> Result<StepLimit, ConeError> {
    let ev = scaled_eigenvalues(n, x, d)?;
    let lam_min = ev.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(if lam_min >= 0.0 {
        StepLimit::Unbounded
    } else {
        StepLimit::Finite(1.0 / -lam_min)
    })
}

pub fn conjugate(n: usize, s: &Vec64) -> Result<Vec64, ConeError> {
    let inv = chol(n, s)?.inverse();
    Ok(svec_from_mat(&inv))
}
