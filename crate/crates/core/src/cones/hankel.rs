//! Dual barrier −ln det H(s) for the cone of nonnegative polynomials of even
//! degree 2n. H(s) = Σ sₖ Hₖ where Hₖ has ones on the k-th anti-diagonal, so
//! the dual cone is the PSD Hankel matrices of order n+1 (ν = n+1). Assembly
//! is dense O(n³); there is no explicit primal barrier here.

use super::{ConeError, StepLimit};
use crate::linalg::{Mat64, Vec64};
use nalgebra::Cholesky;

fn matrix_order(deg: usize) -> usize {
    deg / 2 + 1
}

pub fn hankel_matrix(deg: usize, s: &Vec64) -> Mat64 {
    let m = matrix_order(deg);
    Mat64::from_fn(m, m, |i, j| s[i + j])
}

fn antidiag_sum(m: &Mat64, k: usize) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        if k >= i && k - i < n {
            acc += m[(i, k - i)];
        }
    }
    acc
}

fn chol(deg: usize, s: &Vec64) -> Result<Cholesky<f64, nalgebra::Dyn>, ConeError> {
    Cholesky::new(hankel_matrix(deg, s)).ok_or(ConeError::OutsideCone)
}

pub fn margin(deg: usize, s: &Vec64) -> f64 {
    if s.len() != deg + 1 {
        return f64::NEG_INFINITY;
    }
    hankel_matrix(deg, s)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn value(deg: usize, s: &Vec64) -> Result<f64, ConeError> {
    let l = chol(deg, s)?;
    Ok(-2.0 * l.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>())
}

/// ∇ₖ = −tr(H⁻¹Hₖ) = −Σ_{i+j=k} (H⁻¹)ᵢⱼ.
pub fn gradient(deg: usize, s: &Vec64) -> Result<Vec64, ConeError> {
    let inv = chol(deg, s)?.inverse();
    Ok(Vec64::from_fn(deg + 1, |k, _| -antidiag_sum(&inv, k)))
}

/// Hessᵏˡ = tr(H⁻¹HₖH⁻¹Hₗ) via Wₖ = Σ_{i+j=k} cᵢcⱼᵀ with cᵢ the columns of H⁻¹.
pub fn hessian(deg: usize, s: &Vec64) -> Result<Mat64, ConeError> {
    let inv = chol(deg, s)?.inverse();
    let m = matrix_order(deg);
    let dim = deg + 1;
    let mut h = Mat64::zeros(dim, dim);
    for k in 0..dim {
        let mut w = Mat64::zeros(m, m);
        for i in 0..m {
            if k >= i && k - i < m {
                let j = k - i;
                w += inv.column(i) * inv.column(j).transpose();
            }
        }
        for l in 0..dim {
            h[(k, l)] = antidiag_sum(&w, l);
        }
    }
    Ok(h)
}

/// ∇³F(s)[h]: with P = H⁻¹ĤH⁻¹, the (k,l) entry is
/// −tr(PHₖH⁻¹Hₗ) − tr(H⁻¹HₖPHₗ), assembled from outer products of the
/// columns of P and H⁻¹.
pub fn third(deg: usize, s: &Vec64, h: &Vec64) -> Result<Mat64, ConeError> {
    let inv = chol(deg, s)?.inverse();
    let hm = hankel_matrix(deg, h);
    let p = &inv * &hm * &inv;
    let m = matrix_order(deg);
    let dim = deg + 1;
    let mut out = Mat64::zeros(dim, dim);
    for k in 0..dim {
        let mut u = Mat64::zeros(m, m);
        for i in 0..m {
            if k >= i && k - i < m {
                let j = k - i;
                u += p.column(i) * inv.column(j).transpose();
                u += inv.column(i) * p.column(j).transpose();
            }
        }
        for l in 0..dim {
            out[(k, l)] = -antidiag_sum(&u, l);
        }
    }
    Ok(out)
}

fn scaled_eigenvalues(deg: usize, s: &Vec64, h: &Vec64) -> Result<Vec64, ConeError> {
    let l = chol(deg, s)?.l();
    let half = l
        .solve_lower_triangular(&hankel_matrix(deg, h))
        .ok_or(ConeError::OutsideCone)?;
    let w = l
        .solve_lower_triangular(&half.transpose())
        .ok_or(ConeError::OutsideCone)?;
    Ok(w.symmetric_eigenvalues())
}

pub fn sigma(deg: usize, s: &Vec64, h: &Vec64) -> Result<f64, ConeError> {
    let ev = scaled_eigenvalues(deg, s, h)?;
    Ok(ev.iter().copied().fold(0.0f64, f64::max))
}

pub fn max_step(deg: usize, s: &Vec64, d: &Vec64) -> Result<StepLimit, ConeError> {
    let ev = scaled_eigenvalues(deg, s, d)?;
    let lam_min = ev.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(if lam_min >= 0.0 {
        StepLimit::Unbounded
    } else {
        StepLimit::Finite(1.0 / -lam_min)
    })
}
