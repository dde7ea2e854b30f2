//! Property tests for the measure/step primitives and the embeddings.

use conepredictor::cones::{BarrierOracle, ConeDescriptor, Side, StepLimit};
use conepredictor::geometry::{eta, xi};
use conepredictor::linalg::{NormSide, Vec64};
use proptest::prelude::*;

fn finite_vec(dim: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(lo..hi, dim)
}

proptest! {
    // σ_x(h) ≤ ‖h‖_x and ρ = σ puts ρx − h on the closed cone
    #[test]
    fn orthant_sigma_definition(
        x in finite_vec(4, 0.1, 5.0),
        h in finite_vec(4, -5.0, 5.0),
    ) {
        let oracle = BarrierOracle::new(ConeDescriptor::Orthant(4), Side::Primal).unwrap();
        let x = Vec64::from_vec(x);
        let h = Vec64::from_vec(h);
        let sigma = oracle.sigma_measure(&x, &h).unwrap();
        let hess = oracle.hessian(&x).unwrap();
        let local = hess.weighted_norm(&h, NormSide::Primal).unwrap();
        prop_assert!(sigma <= local + 1e-10);
        let point = &x * sigma - &h;
        prop_assert!(oracle.cone().contains(&point, 1e-9));
        // any smaller multiple leaves the cone (when σ > 0)
        if sigma > 1e-9 {
            let smaller = &x * (sigma * 0.99) - &h;
            prop_assert!(!oracle.cone().contains(&smaller, 1e-12));
        }
    }

    // the maximal step is the exact boundary parameter
    #[test]
    fn soc_max_step_is_boundary(
        tail in finite_vec(3, -2.0, 2.0),
        dir in finite_vec(4, -2.0, 2.0),
        head in 0.1f64..3.0,
    ) {
        let oracle = BarrierOracle::new(ConeDescriptor::Soc(4), Side::Primal).unwrap();
        let tail = Vec64::from_vec(tail);
        let mut x = Vec64::zeros(4);
        x[0] = tail.norm() + head;
        x.rows_mut(1, 3).copy_from(&tail);
        let d = Vec64::from_vec(dir);
        match oracle.max_step(&x, &d).unwrap() {
            StepLimit::Finite(alpha) => {
                prop_assert!(oracle.cone().contains(&(&x + &d * (alpha * 0.999)), 1e-9));
                prop_assert!(!oracle.cone().is_interior(&(&x + &d * (alpha * 1.001))));
            }
            StepLimit::Unbounded => {
                for t in [1.0, 10.0, 1e4] {
                    prop_assert!(oracle.cone().contains(&(&x + &d * t), 1e-9));
                }
            }
        }
    }

    // both algebraic forms of ξ agree; ξ increases in α, η stays below ᾱ
    #[test]
    fn xi_eta_laws(alpha_bar in 0.1f64..5.0, t in 0.0f64..0.99) {
        let alpha = alpha_bar * t;
        let a = xi(alpha_bar, alpha).unwrap();
        let b = 1.0 + alpha + alpha * alpha / (alpha_bar - alpha);
        prop_assert!((a - b).abs() <= 1e-12 * a);
        prop_assert!(a >= 1.0);
        if t < 0.98 {
            let further = xi(alpha_bar, alpha_bar * (t + 0.01)).unwrap();
            prop_assert!(further > a);
        }
        let next = eta(alpha_bar, alpha);
        prop_assert!(next <= alpha_bar);
        // escalation law: ξ(η(α)) ≥ 2ξ(α) − 1
        if next < alpha_bar {
            let xi_next = xi(alpha_bar, next).unwrap();
            prop_assert!(xi_next >= 2.0 * a - 1.0 - 1e-9 * a);
        }
    }

    // scaled svec embedding preserves the trace inner product
    #[test]
    fn svec_preserves_trace_inner_product(
        a in finite_vec(9, -3.0, 3.0),
        b in finite_vec(9, -3.0, 3.0),
    ) {
        use conepredictor::cones::psd::{mat_from_svec, svec_from_mat};
        let sym = |v: &[f64]| {
            let m = nalgebra::DMatrix::from_row_slice(3, 3, v);
            (&m + m.transpose()) * 0.5
        };
        let (ma, mb) = (sym(&a), sym(&b));
        let (va, vb) = (svec_from_mat(&ma), svec_from_mat(&mb));
        let trace_ip = (&ma * &mb).trace();
        prop_assert!((va.dot(&vb) - trace_ip).abs() <= 1e-12 * (1.0 + trace_ip.abs()));
        // and the embedding round-trips
        prop_assert!((mat_from_svec(3, &va) - &ma).amax() <= 1e-14);
    }
}
