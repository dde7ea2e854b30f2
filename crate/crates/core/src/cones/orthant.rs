//! Barrier −Σ ln xᵢ for the nonnegative orthant (ν = n).

use super::{ConeError, StepLimit};
use crate::linalg::{Mat64, Vec64};

pub fn margin(x: &Vec64) -> f64 {
    x.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn value(x: &Vec64) -> Result<f64, ConeError> {
    Ok(-x.iter().map(|v| v.ln()).sum::<f64>())
}

pub fn gradient(x: &Vec64) -> Result<Vec64, ConeError> {
    Ok(x.map(|v| -1.0 / v))
}

pub fn hessian(x: &Vec64) -> Result<Mat64, ConeError> {
    Ok(Mat64::from_diagonal(&x.map(|v| 1.0 / (v * v))))
}

pub fn third(x: &Vec64, h: &Vec64) -> Result<Mat64, ConeError> {
    let d = Vec64::from_fn(x.len(), |i, _| -2.0 * h[i] / (x[i] * x[i] * x[i]));
    Ok(Mat64::from_diagonal(&d))
}

/// Ratio test: σ = max(0, maxᵢ hᵢ/xᵢ).
pub fn sigma(x: &Vec64, h: &Vec64) -> Result<f64, ConeError> {
    Ok(x.iter()
        .zip(h.iter())
        .map(|(&xi, &hi)| hi / xi)
        .fold(0.0f64, f64::max))
}

/// Ratio test: min over dᵢ < 0 of xᵢ/(−dᵢ).
pub fn max_step(x: &Vec64, d: &Vec64) -> Result<StepLimit, ConeError> {
    let mut best = f64::INFINITY;
    for (&xi, &di) in x.iter().zip(d.iter()) {
        if di < 0.0 {
            best = best.min(xi / -di);
        }
    }
    Ok(if best.is_finite() {
        StepLimit::Finite(best)
    } else {
        StepLimit::Unbounded
    })
}

pub fn conjugate(s: &Vec64) -> Result<Vec64, ConeError> {
    Ok(s.map(|v| 1.0 / v))
}
