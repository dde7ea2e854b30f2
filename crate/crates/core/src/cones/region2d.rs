//! Barriers for the two 2D example regions. Neither region is a cone; the
//! barriers are self-concordant on the region interior and are used only
//! through the reduced dual geometry.

use super::{smallest_positive_root, ConeError, StepLimit};
#[cfg(test)]
use super::BISECTION_MEMBERSHIP_MARGIN;
use crate::linalg::{Mat64, Vec64};

// ---- unit disc, barrier −ln(1 − ‖y‖²), ν = 2 ----

pub fn disc_margin(y: &Vec64) -> f64 {
    1.0 - y.norm()
}

pub fn disc_value(y: &Vec64) -> Result<f64, ConeError> {
    Ok(-(1.0 - y.norm_squared()).ln())
}

pub fn disc_gradient(y: &Vec64) -> Result<Vec64, ConeError> {
    Ok(y * (2.0 / (1.0 - y.norm_squared())))
}

pub fn disc_hessian(y: &Vec64) -> Result<Mat64, ConeError> {
    let q = 1.0 - y.norm_squared();
    let mut h = y * y.transpose() * (4.0 / (q * q));
    for i in 0..y.len() {
        h[(i, i)] += 2.0 / q;
    }
    Ok(h)
}

pub fn disc_sigma(y: &Vec64, h: &Vec64) -> Result<f64, ConeError> {
    if h.norm() <= 1.0 {
        return Ok(0.0);
    }
    // smallest ρ ≥ 0 with ‖ρy − h‖ ≤ 1
    let a = y.norm_squared();
    let b = -2.0 * y.dot(h);
    let c = h.norm_squared() - 1.0;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Err(ConeError::SigmaUndefined);
    }
    let r_lo = (-b - disc.sqrt()) / (2.0 * a);
    if r_lo >= 0.0 {
        Ok(r_lo)
    } else if (-b + disc.sqrt()) / (2.0 * a) >= 0.0 {
        Ok(0.0)
    } else {
        Err(ConeError::SigmaUndefined)
    }
}

pub fn disc_max_step(y: &Vec64, d: &Vec64) -> Result<StepLimit, ConeError> {
    if d.norm_squared() == 0.0 {
        return Ok(StepLimit::Unbounded);
    }
    let a = d.norm_squared();
    let b = 2.0 * y.dot(d);
    let c = y.norm_squared() - 1.0;
    Ok(match smallest_positive_root(a, b, c) {
        Some(r) => StepLimit::Finite(r),
        None => StepLimit::Unbounded,
    })
}

// ---- parabola region y₂ ≥ 0, y₁ ≥ y₂²; barrier −ln(y₁−y₂²) − ln y₂, ν = 2 ----

pub fn parabola_margin(y: &Vec64) -> f64 {
    (y[0] - y[1] * y[1]).min(y[1])
}

pub fn parabola_value(y: &Vec64) -> Result<f64, ConeError> {
    let omega = y[0] - y[1] * y[1];
    Ok(-omega.ln() - y[1].ln())
}

pub fn parabola_gradient(y: &Vec64) -> Result<Vec64, ConeError> {
    let omega = y[0] - y[1] * y[1];
    Ok(Vec64::from_row_slice(&[
        -1.0 / omega,
        2.0 * y[1] / omega - 1.0 / y[1],
    ]))
}

pub fn parabola_hessian(y: &Vec64) -> Result<Mat64, ConeError> {
    let omega = y[0] - y[1] * y[1];
    let o2 = omega * omega;
    Ok(Mat64::from_row_slice(
        2,
        2,
        &[
            1.0 / o2,
            -2.0 * y[1] / o2,
            -2.0 * y[1] / o2,
            2.0 / omega + 4.0 * y[1] * y[1] / o2 + 1.0 / (y[1] * y[1]),
        ],
    ))
}

#[cfg(test)]
fn parabola_contains(p: &Vec64) -> bool {
    parabola_margin(p) >= -BISECTION_MEMBERSHIP_MARGIN * (1.0 + p.norm())
}

pub fn parabola_sigma(y: &Vec64, h: &Vec64) -> Result<f64, ConeError> {
    // The region is not a cone: ρ-feasibility is a bounded interval. The two
    // constraints on ρy − h are ρy₂ ≥ h₂ and a concave quadratic in ρ.
    let m = (h[1] / y[1]).max(0.0);
    let a = -y[1] * y[1];
    let b = y[0] + 2.0 * y[1] * h[1];
    let c = -(h[0] + h[1] * h[1]);
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Err(ConeError::SigmaUndefined);
    }
    let sq = disc.sqrt();
    // a < 0, so the feasible interval is [r_lo, r_hi]
    let r_lo = (-b + sq) / (2.0 * a);
    let r_hi = (-b - sq) / (2.0 * a);
    let sigma = m.max(r_lo);
    if sigma <= r_hi {
        Ok(sigma)
    } else {
        Err(ConeError::SigmaUndefined)
    }
}

pub fn parabola_max_step(y: &Vec64, d: &Vec64) -> Result<StepLimit, ConeError> {
    // boundary pieces: ω(α) = (y₁+αd₁) − (y₂+αd₂)² = 0 (quadratic) and
    // y₂ + αd₂ = 0 (linear)
    let a = -d[1] * d[1];
    let b = d[0] - 2.0 * y[1] * d[1];
    let c = y[0] - y[1] * y[1];
    let from_omega = smallest_positive_root(a, b, c);
    let from_lin = if d[1] < 0.0 { Some(y[1] / -d[1]) } else { None };
    Ok(match (from_omega, from_lin) {
        (Some(p), Some(q)) => StepLimit::Finite(p.min(q)),
        (Some(p), None) => StepLimit::Finite(p),
        (None, Some(q)) => StepLimit::Finite(q),
        (None, None) => StepLimit::Unbounded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_steps_agree_with_bisection() {
        let y = Vec64::from_row_slice(&[2.0, 1.0]);
        for d in [
            Vec64::from_row_slice(&[-1.0, 0.1]),
            Vec64::from_row_slice(&[0.3, -0.7]),
            Vec64::from_row_slice(&[0.5, 0.9]),
        ] {
            let closed = parabola_max_step(&y, &d).unwrap();
            let bis = super::super::bisection_max_step(parabola_contains, &y, &d);
            match (closed, bis) {
                (StepLimit::Finite(a), StepLimit::Finite(b)) => {
                    assert!((a - b).abs() < 1e-6 * (1.0 + a), "{a} vs {b}");
                }
                (a, b) => assert_eq!(a, b),
            }
        }
    }

    #[test]
    fn parabola_sigma_boundary_cases() {
        let y = Vec64::from_row_slice(&[2.0, 1.0]);
        // −y is reachable with ρ = 0 shifted inside: σ(−y) should be 0 since
        // 0·y − (−y) = y is in the region.
        assert_eq!(parabola_sigma(&y, &(-y.clone())).unwrap(), 0.0);
        // σ at h = y must be ≥ 1 and finite: ρy − y on the boundary at ρ = 1+.
        let s = parabola_sigma(&y, &y).unwrap();
        let p = &y * s - &y;
        assert!(parabola_margin(&p) >= -1e-9);
        assert!(s >= 1.0);
    }
}
