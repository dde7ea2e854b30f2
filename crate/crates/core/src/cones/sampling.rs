//! Seeded samplers for interior points, cone members, and directions.
//! Used by the barrier certification suites; all randomness flows from a
//! caller-provided generator.

use super::{psd, ConeDescriptor};
use crate::linalg::{Mat64, Vec64};
use rand::Rng;

/// Standard normal via Box-Muller; keeps the dependency surface small.
pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = loop {
        let u = rng.random::<f64>();
        if u > 1e-300 {
            break u;
        }
    };
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

pub fn normal_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec64 {
    Vec64::from_fn(dim, |_, _| normal(rng))
}

/// A reasonably well-conditioned strictly interior point.
pub fn interior_point<R: Rng + ?Sized>(rng: &mut R, cone: &ConeDescriptor) -> Vec64 {
    match cone {
        ConeDescriptor::Orthant(n) => Vec64::from_fn(*n, |_, _| {
            (0.6 * normal(rng)).exp()
        }),
        ConeDescriptor::Psd(n) => {
            let g = Mat64::from_fn(*n, *n, |_, _| normal(rng) / (*n as f64).sqrt());
            let m = &g * g.transpose() + Mat64::identity(*n, *n) * 0.3;
            psd::svec_from_mat(&m)
        }
        ConeDescriptor::Soc(n) => {
            let tail = normal_vector(rng, n - 1);
            let mut x = Vec64::zeros(*n);
            x[0] = tail.norm() + 0.3 + rng.random::<f64>();
            x.rows_mut(1, n - 1).copy_from(&tail);
            x
        }
        ConeDescriptor::HankelPoly(deg) => {
            // moments of a positive measure with a Lebesgue-moment ridge so
            // the Hankel matrix stays well conditioned (the identity suites
            // solve through its Hessian, whose condition number is squared)
            let atoms = deg / 2 + 2;
            let mut s = Vec64::zeros(deg + 1);
            for _ in 0..atoms {
                let t = 2.4 * (rng.random::<f64>() - 0.5);
                let w = 0.5 + rng.random::<f64>();
                let mut tk = 1.0;
                for k in 0..=*deg {
                    s[k] += w * tk;
                    tk *= t;
                }
            }
            let lebesgue = Vec64::from_fn(deg + 1, |k, _| {
                if k % 2 == 0 {
                    2.0 / (k as f64 + 1.0)
                } else {
                    0.0
                }
            });
            let mut ridge = 0.25 * (1.0 + rng.random::<f64>());
            loop {
                let mix = &s + &lebesgue * ridge;
                let ev = super::hankel::hankel_matrix(*deg, &mix).symmetric_eigenvalues();
                let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
                let max = ev.iter().copied().fold(0.0f64, f64::max);
                if min > 3e-3 * max {
                    return mix;
                }
                ridge *= 2.0;
            }
        }
        ConeDescriptor::Parabola2d => {
            let y2 = 0.2 + rng.random::<f64>();
            let y1 = y2 * y2 + 0.2 + rng.random::<f64>();
            Vec64::from_row_slice(&[y1, y2])
        }
        ConeDescriptor::Disc2d => {
            let r = 0.8 * rng.random::<f64>();
            let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            Vec64::from_row_slice(&[r * phi.cos(), r * phi.sin()])
        }
        ConeDescriptor::Product(parts) => {
            let mut x = Vec64::zeros(cone.dim());
            let mut off = 0;
            for p in parts {
                x.rows_mut(off, p.dim()).copy_from(&interior_point(rng, p));
                off += p.dim();
            }
            x
        }
    }
}

/// A member of the cone K itself (possibly on the boundary). For the Hankel
/// descriptor K is the nonnegative-polynomial cone, sampled as a sum of two
/// squares. Not defined for the 2D regions.
pub fn cone_member<R: Rng + ?Sized>(rng: &mut R, cone: &ConeDescriptor) -> Option<Vec64> {
    match cone {
        ConeDescriptor::Orthant(n) => Some(Vec64::from_fn(*n, |_, _| normal(rng).abs())),
        ConeDescriptor::Psd(n) => {
            let g = Mat64::from_fn(*n, *n, |_, _| normal(rng) / (*n as f64).sqrt());
            Some(psd::svec_from_mat(&(&g * g.transpose())))
        }
        ConeDescriptor::Soc(n) => {
            let tail = normal_vector(rng, n - 1);
            let mut x = Vec64::zeros(*n);
            x[0] = tail.norm() + normal(rng).abs();
            x.rows_mut(1, n - 1).copy_from(&tail);
            Some(x)
        }
        ConeDescriptor::HankelPoly(deg) => {
            let half = deg / 2;
            let mut p = Vec64::zeros(deg + 1);
            for _ in 0..2 {
                let q = normal_vector(rng, half + 1);
                for i in 0..=half {
                    for j in 0..=half {
                        p[i + j] += q[i] * q[j];
                    }
                }
            }
            Some(p)
        }
        ConeDescriptor::Product(parts) => {
            let mut x = Vec64::zeros(cone.dim());
            let mut off = 0;
            for p in parts {
                x.rows_mut(off, p.dim()).copy_from(&cone_member(rng, p)?);
                off += p.dim();
            }
            Some(x)
        }
        ConeDescriptor::Parabola2d | ConeDescriptor::Disc2d => None,
    }
}

/// A member of the dual cone K*. Identical to [`cone_member`] for the
/// self-dual families; for the Hankel descriptor K* is the PSD Hankel cone,
/// sampled as the moment vector of a small positive measure.
pub fn dual_cone_member<R: Rng + ?Sized>(rng: &mut R, cone: &ConeDescriptor) -> Option<Vec64> {
    match cone {
        ConeDescriptor::HankelPoly(deg) => {
            let atoms = 1 + rng.random_range(0..deg / 2 + 1);
            let mut s = Vec64::zeros(deg + 1);
            for _ in 0..atoms {
                let t = 3.0 * (rng.random::<f64>() - 0.5);
                let w = 0.2 + rng.random::<f64>();
                let mut tk = 1.0;
                for k in 0..=*deg {
                    s[k] += w * tk;
                    tk *= t;
                }
            }
            Some(s)
        }
        ConeDescriptor::Product(parts) => {
            let mut x = Vec64::zeros(cone.dim());
            let mut off = 0;
            for p in parts {
                x.rows_mut(off, p.dim()).copy_from(&dual_cone_member(rng, p)?);
                off += p.dim();
            }
            Some(x)
        }
        _ => cone_member(rng, cone),
    }
}

/// A member of the cone the barrier's domain lives on: K for a primal-side
/// oracle, K* for a dual-side one.
pub fn domain_member<R: Rng + ?Sized>(
    rng: &mut R,
    cone: &ConeDescriptor,
    side: super::Side,
) -> Option<Vec64> {
    match side {
        super::Side::Primal => cone_member(rng, cone),
        super::Side::Dual => dual_cone_member(rng, cone),
    }
}
