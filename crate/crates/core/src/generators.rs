//! Example generators: the two 2D problems, sharp LP/SDP instances with a
//! strictly complementary optimum at a nondegenerate dual vertex (so both
//! the sharpness and boundedness assumptions hold), and boundary-optimum
//! SOC / nonnegative-polynomial instances. All constructions are
//! deterministic in the seed.

use crate::cones::{psd, sampling, ConeDescriptor};
use crate::geometry::{ConicProblem, GeometryError, KnownOptimum};
use crate::linalg::{LinearMap, Mat64, Vec64};
use crate::rng;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error("unknown example '{0}'")]
    UnknownExample(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            m: None,
            n: None,
            seed: rng::DEFAULT_SEED,
        }
    }
}

pub fn generate_example(
    name: &str,
    params: &GenParams,
) -> Result<(ConicProblem, Option<KnownOptimum>), GenerateError> {
    match name {
        "parabola2d" => parabola2d().map(|(p, o)| (p, Some(o))),
        "disc2d" => disc2d().map(|(p, o)| (p, Some(o))),
        "sharp_lp" => {
            let m = params.m.unwrap_or(3);
            let n = params.n.unwrap_or(6);
            sharp_lp(m, n, params.seed).map(|(p, o)| (p, Some(o)))
        }
        "sharp_sdp" => {
            let n = params.n.unwrap_or(3);
            sharp_sdp(n, params.seed).map(|(p, o)| (p, Some(o)))
        }
        "soc_test" => {
            let n = params.n.unwrap_or(4);
            soc_test(n, params.seed).map(|(p, o)| (p, Some(o)))
        }
        "hankel_poly" => {
            let n = params.n.unwrap_or(2);
            hankel_poly(n, params.seed).map(|(p, o)| (p, Some(o)))
        }
        other => Err(GenerateError::UnknownExample(other.to_string())),
    }
}

pub const EXAMPLE_NAMES: &[&str] = &[
    "parabola2d",
    "disc2d",
    "sharp_lp",
    "sharp_sdp",
    "soc_test",
    "hankel_poly",
];

/// The conic lift of max{⟨b, y⟩ : y₂ ≥ 0, y₁ ≥ y₂²} with b = (−1, 0):
/// slack (y₁, y₂, 1, y₂) in (PSD Hankel of order 2) × R₊. The optimum sits
/// at the parabola vertex with s_* = e₃.
pub fn parabola2d() -> Result<(ConicProblem, KnownOptimum), GenerateError> {
    let cone = ConeDescriptor::Product(vec![
        ConeDescriptor::HankelPoly(2),
        ConeDescriptor::Orthant(1),
    ]);
    let a = Mat64::from_row_slice(
        2,
        4,
        &[
            -1.0, 0.0, 0.0, 0.0, //
            0.0, -1.0, 0.0, -1.0,
        ],
    );
    let b = Vec64::from_row_slice(&[-1.0, 0.0]);
    let c = Vec64::from_row_slice(&[0.0, 0.0, 1.0, 0.0]);
    let y_start = Vec64::from_row_slice(&[2.0, 1.0]);
    let problem = ConicProblem::new(LinearMap::new(a), b, c, cone, y_start)?;
    let optimum = KnownOptimum {
        y_star: Vec64::zeros(2),
        s_star: Vec64::from_row_slice(&[0.0, 0.0, 1.0, 0.0]),
        x_star: Some(Vec64::from_row_slice(&[1.0, 0.0, 0.0, 0.0])),
        f_star: 0.0,
    };
    Ok((problem, optimum))
}

/// max{y₁ : ‖y‖ ≤ 1} over the unit disc. The maximum at (1, 0) is not sharp
/// (the boundary is smooth), which is exactly what makes this the negative
/// control for the superlinear rate.
pub fn disc2d() -> Result<(ConicProblem, KnownOptimum), GenerateError> {
    let a = -Mat64::identity(2, 2);
    let b = Vec64::from_row_slice(&[1.0, 0.0]);
    let c = Vec64::zeros(2);
    // off the symmetry axis: starting at y₂ = 0 would lock the iterates onto
    // the 1D central path and hide the curvature the example is meant to show
    let y_start = Vec64::from_row_slice(&[-0.3, 0.5]);
    let problem = ConicProblem::new(LinearMap::new(a), b, c, ConeDescriptor::Disc2d, y_start)?;
    let optimum = KnownOptimum {
        y_star: Vec64::from_row_slice(&[1.0, 0.0]),
        s_star: Vec64::from_row_slice(&[1.0, 0.0]),
        x_star: None,
        f_star: 1.0,
    };
    Ok((problem, optimum))
}

fn rand_mat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat64 {
    Mat64::from_fn(rows, cols, |_, _| sampling::normal(rng))
}

fn min_singular_value(m: &Mat64) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// LP over the orthant with a primal-dual strictly complementary pair at a
/// nondegenerate dual vertex: exactly m active constraints whose gradients
/// form a well-conditioned basis, so the dual maximum is sharp.
pub fn sharp_lp(
    m: usize,
    n: usize,
    seed: u64,
) -> Result<(ConicProblem, KnownOptimum), GenerateError> {
    if m == 0 || n <= m {
        return Err(GenerateError::Construction(format!(
            "sharp_lp needs 0 < m < n, got m={m} n={n}"
        )));
    }
    let mut rng = rng::stream(seed, "sharp-lp");
    for _ in 0..64 {
        let a = rand_mat(&mut rng, m, n);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let active: Vec<usize> = idx[..m].to_vec();
        let a_active = a.select_columns(active.iter());
        if min_singular_value(&a_active) < 0.2 {
            continue;
        }
        let y_star = sampling::normal_vector(&mut rng, m);
        let mut s_star = Vec64::zeros(n);
        let mut x_star = Vec64::zeros(n);
        for j in 0..n {
            if active.contains(&j) {
                x_star[j] = 0.5 + 1.5 * rng.random::<f64>();
            } else {
                s_star[j] = 0.5 + 1.5 * rng.random::<f64>();
            }
        }
        let c = a.tr_mul(&y_star) + &s_star;
        let b = &a * &x_star;
        // retreat into the interior along d with ⟨a_j, d⟩ = −1 on the basis
        let ones = Vec64::from_element(m, -1.0);
        let Some(d) = a_active.transpose().lu().solve(&ones) else {
            continue;
        };
        let ad = a.tr_mul(&d);
        let mut t = 0.5f64;
        for j in 0..n {
            if !active.contains(&j) && ad[j] > 0.0 {
                t = t.min(0.5 * s_star[j] / ad[j]);
            }
        }
        let y_start = &y_star + &d * t;
        let problem = match ConicProblem::new(
            LinearMap::new(a),
            b,
            c,
            ConeDescriptor::Orthant(n),
            y_start,
        ) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let f_star = problem.b().dot(&y_star);
        return Ok((
            problem,
            KnownOptimum {
                y_star,
                s_star,
                x_star: Some(x_star),
                f_star,
            },
        ));
    }
    Err(GenerateError::Construction(
        "sharp_lp: no well-conditioned basis found".into(),
    ))
}

/// Brute-force certification oracle for LP instances: enumerate all m-column
/// bases, solve for the vertex, keep the best feasible one. Independent of
/// the interior-point machinery; n must be small.
pub fn lp_vertex_optimum(problem: &ConicProblem) -> Option<(Vec64, f64)> {
    let a = problem.a().matrix();
    let (m, n) = (a.nrows(), a.ncols());
    let mut best: Option<(Vec64, f64)> = None;
    let mut subset: Vec<usize> = (0..m).collect();
    loop {
        let a_sub = a.select_columns(subset.iter());
        if let Some(y) = a_sub.transpose().lu().solve(
            &Vec64::from_iterator(m, subset.iter().map(|&j| problem.c()[j])),
        ) {
            let s = problem.slack(&y);
            let feasible = s.iter().all(|&v| v >= -1e-9 * (1.0 + s.norm()));
            if feasible {
                let val = problem.dual_objective(&y);
                if best.as_ref().is_none_or(|(_, bv)| val > *bv) {
                    best = Some((y, val));
                }
            }
        }
        // next lexicographic m-subset of 0..n
        let mut i = m;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if subset[i] < n - m + i {
                subset[i] += 1;
                for j in i + 1..m {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// SDP instance with a sharp dual vertex: the active eigenvalues live on
/// fixed coordinate axes (their constraint gradients are diagonal and form a
/// basis), while the inactive block is dense and stays positive definite.
/// Keeping the small eigenvalues on coordinate axes is what lets the slack
/// hold full relative precision down to μ ≈ 1e-13 in f64.
pub fn sharp_sdp(n: usize, seed: u64) -> Result<(ConicProblem, KnownOptimum), GenerateError> {
    if n < 2 {
        return Err(GenerateError::Construction(
            "sharp_sdp needs n ≥ 2".into(),
        ));
    }
    let inactive = 2.min(n - 1);
    let r = n - inactive; // active count = number of dual variables
    let m = r;
    let mut rng = rng::stream(seed, "sharp-sdp");
    for _ in 0..64 {
        // active-diagonal constraint basis
        let basis = rand_mat(&mut rng, m, r);
        if min_singular_value(&basis) < 0.2 {
            continue;
        }
        let y_star = sampling::normal_vector(&mut rng, m);
        let x_active = Vec64::from_fn(r, |_, _| 0.5 + 1.5 * rng.random::<f64>());
        let b = &basis * &x_active;
        let c_active = basis.tr_mul(&y_star);
        // dense inactive blocks
        let mut q_blocks = Vec::new();
        for _ in 0..m {
            let g = rand_mat(&mut rng, inactive, inactive);
            q_blocks.push((&g + g.transpose()) * 0.5);
        }
        let g = rand_mat(&mut rng, inactive, inactive);
        let s_star_block = &g * g.transpose() + Mat64::identity(inactive, inactive);
        let mut c_block = s_star_block.clone();
        for (q, w) in q_blocks.iter().zip(y_star.iter()) {
            c_block += q * *w;
        }

        let assemble = |diag: &Vec64, block: &Mat64| -> Mat64 {
            let mut full = Mat64::zeros(n, n);
            for j in 0..r {
                full[(j, j)] = diag[j];
            }
            full.view_mut((r, r), (inactive, inactive)).copy_from(block);
            full
        };

        let dim = psd::svec_dim(n);
        let mut a = Mat64::zeros(m, dim);
        for (i, q) in q_blocks.iter().enumerate() {
            let ai = assemble(&basis.row(i).transpose(), q);
            a.row_mut(i).copy_from(&psd::svec_from_mat(&ai).transpose());
        }
        let c = psd::svec_from_mat(&assemble(&c_active, &c_block));
        let s_star = psd::svec_from_mat(&assemble(&Vec64::zeros(r), &s_star_block));
        let mut x_full = Mat64::zeros(n, n);
        for j in 0..r {
            x_full[(j, j)] = x_active[j];
        }
        let x_star = psd::svec_from_mat(&x_full);

        // retreat: push the active diagonal to +t, keep the block PD
        let ones = Vec64::from_element(m, -1.0);
        let Some(d) = basis.transpose().lu().solve(&ones) else {
            continue;
        };
        let mut perturb = Mat64::zeros(inactive, inactive);
        for (q, w) in q_blocks.iter().zip(d.iter()) {
            perturb += q * *w;
        }
        let lam_min_s = s_star_block
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let perturb_norm = perturb
            .symmetric_eigenvalues()
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        let t = 0.5f64.min(0.4 * lam_min_s / perturb_norm.max(1e-12));
        let y_start = &y_star + &d * t;

        let problem = match ConicProblem::new(
            LinearMap::new(a),
            b,
            c,
            ConeDescriptor::Psd(n),
            y_start,
        ) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let f_star = problem.b().dot(&y_star);
        return Ok((
            problem,
            KnownOptimum {
                y_star,
                s_star,
                x_star: Some(x_star),
                f_star,
            },
        ));
    }
    Err(GenerateError::Construction(
        "sharp_sdp: no well-conditioned construction found".into(),
    ))
}

/// SOC instance with a known boundary optimum (strictly complementary pair
/// s_* = (1, w), x_* = (1, −w) with ‖w‖ = 1). The optimum is not a vertex of
/// the dual feasible set, so no sharpness is claimed.
pub fn soc_test(n: usize, seed: u64) -> Result<(ConicProblem, KnownOptimum), GenerateError> {
    if n < 3 {
        return Err(GenerateError::Construction("soc_test needs n ≥ 3".into()));
    }
    let m = (n / 2).max(1);
    let mut rng = rng::stream(seed, "soc-test");
    for _ in 0..64 {
        let a = rand_mat(&mut rng, m, n);
        let w = sampling::normal_vector(&mut rng, n - 1).normalize();
        let mut s_star = Vec64::zeros(n);
        s_star[0] = 1.0;
        s_star.rows_mut(1, n - 1).copy_from(&w);
        let mut x_star = Vec64::zeros(n);
        x_star[0] = 1.0;
        x_star.rows_mut(1, n - 1).copy_from(&(-&w));
        let y_star = sampling::normal_vector(&mut rng, m);
        let c = a.tr_mul(&y_star) + &s_star;
        let b = &a * &x_star;
        if b.norm() < 1e-6 {
            continue;
        }
        let d = -b.normalize();
        let cone = ConeDescriptor::Soc(n);
        let mut chosen = None;
        for t in [0.05, 0.1, 0.2, 0.5, 1.0] {
            let y_try = &y_star + &d * t;
            let s_try = &c - a.tr_mul(&y_try);
            if cone.is_interior(&s_try) && cone.margin(&s_try) > 1e-3 {
                chosen = Some(y_try);
            }
        }
        let Some(y_start) = chosen else { continue };
        let problem =
            match ConicProblem::new(LinearMap::new(a), b, c, cone, y_start) {
                Ok(p) => p,
                Err(_) => continue,
            };
        let f_star = problem.b().dot(&y_star);
        return Ok((
            problem,
            KnownOptimum {
                y_star,
                s_star,
                x_star: Some(x_star),
                f_star,
            },
        ));
    }
    Err(GenerateError::Construction(
        "soc_test: construction failed".into(),
    ))
}

fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Instance over the nonnegative-polynomial cone of degree 2n: the optimal
/// dual slack is the moment vector of an n-atom measure (rank-deficient
/// Hankel matrix) and the primal optimum is the squared node polynomial.
pub fn hankel_poly(n: usize, seed: u64) -> Result<(ConicProblem, KnownOptimum), GenerateError> {
    if n == 0 {
        return Err(GenerateError::Construction(
            "hankel_poly needs n ≥ 1".into(),
        ));
    }
    let deg = 2 * n;
    let dim = deg + 1;
    let m = n;
    let mut rng = rng::stream(seed, "hankel-poly");
    'outer: for _ in 0..64 {
        // distinct atoms
        let mut atoms = Vec::new();
        for _ in 0..n {
            atoms.push(3.0 * (rng.random::<f64>() - 0.5));
        }
        atoms.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if atoms.windows(2).any(|w| (w[1] - w[0]).abs() < 0.2) {
            continue;
        }
        let mut s_star = Vec64::zeros(dim);
        for &t in &atoms {
            let w = 0.5 + rng.random::<f64>();
            let mut tk = 1.0;
            for k in 0..dim {
                s_star[k] += w * tk;
                tk *= t;
            }
        }
        // node polynomial squared: Π(t − t_j)², nonnegative of degree 2n
        let mut node = vec![1.0];
        for &t in &atoms {
            node = poly_mul(&node, &[-t, 1.0]);
        }
        let x_star = Vec64::from_vec(poly_mul(&node, &node));

        let a = rand_mat(&mut rng, m, dim);
        let y_star = sampling::normal_vector(&mut rng, m);
        let c = a.tr_mul(&y_star) + &s_star;
        let b = &a * &x_star;

        // interior direction from the Hankel kernel vector z: pairing with
        // coeffs(z(t)²) is positive exactly when the slack moves inside
        let h = crate::cones::ConeDescriptor::HankelPoly(deg);
        let hm = Mat64::from_fn(n + 1, n + 1, |i, j| s_star[i + j]);
        let eig = nalgebra::SymmetricEigen::new(hm);
        let (mut zi, mut zv) = (0, f64::INFINITY);
        for (i, &ev) in eig.eigenvalues.iter().enumerate() {
            if ev < zv {
                zv = ev;
                zi = i;
            }
        }
        let z: Vec<f64> = eig.eigenvectors.column(zi).iter().copied().collect();
        let u = Vec64::from_vec(poly_mul(&z, &z));
        let q_dir = &a * &u;
        if q_dir.norm() < 1e-8 {
            continue;
        }
        let d = -q_dir.normalize();
        for t in [0.02, 0.05, 0.1, 0.3, 0.8] {
            let y_try = &y_star + &d * t;
            let s_try = &c - a.tr_mul(&y_try);
            if h.is_interior(&s_try) && h.margin(&s_try) > 1e-4 * (1.0 + s_try.norm()) {
                let problem = match ConicProblem::new(
                    LinearMap::new(a.clone()),
                    b.clone(),
                    c.clone(),
                    h.clone(),
                    y_try,
                ) {
                    Ok(p) => p,
                    Err(_) => continue 'outer,
                };
                let f_star = problem.b().dot(&y_star);
                return Ok((
                    problem,
                    KnownOptimum {
                        y_star,
                        s_star,
                        x_star: Some(x_star),
                        f_star,
                    },
                ));
            }
        }
    }
    Err(GenerateError::Construction(
        "hankel_poly: construction failed".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io;

    #[test]
    fn deterministic_in_seed() {
        for name in EXAMPLE_NAMES {
            let params = GenParams {
                seed: 42,
                ..Default::default()
            };
            let (p1, o1) = generate_example(name, &params).unwrap();
            let (p2, o2) = generate_example(name, &params).unwrap();
            assert_eq!(
                io::write_problem(&p1, o1.as_ref()),
                io::write_problem(&p2, o2.as_ref()),
                "{name} not deterministic"
            );
        }
    }

    #[test]
    fn unknown_example_is_reported() {
        assert!(matches!(
            generate_example("frobnicate", &GenParams::default()),
            Err(GenerateError::UnknownExample(_))
        ));
    }

    #[test]
    fn sharp_lp_certified_by_vertex_enumeration() {
        for seed in [1u64, 7, 23, 99] {
            let (p, opt) = sharp_lp(3, 6, seed).unwrap();
            let (y_best, val) = lp_vertex_optimum(&p).expect("some vertex is feasible");
            assert!(
                (val - opt.f_star).abs() <= 1e-8 * (1.0 + val.abs()),
                "seed {seed}: enumerated {val} vs constructed {}",
                opt.f_star
            );
            assert!((y_best - &opt.y_star).amax() < 1e-8);
        }
    }

    #[test]
    fn optimality_certificates() {
        // complementary slackness and feasibility of the constructed pairs
        for (name, n) in [("sharp_lp", None), ("sharp_sdp", Some(3)), ("sharp_sdp", Some(4)), ("soc_test", Some(5)), ("hankel_poly", Some(2))] {
            let params = GenParams {
                n,
                seed: 5,
                ..Default::default()
            };
            let (p, opt) = generate_example(name, &params).unwrap();
            let opt = opt.unwrap();
            // s* = c − A*y*
            let s_from_y = p.slack(&opt.y_star);
            assert!(
                (&s_from_y - &opt.s_star).amax() < 1e-9 * (1.0 + opt.s_star.amax()),
                "{name}: s* mismatch"
            );
            // s* in the closed dual cone
            assert!(p.cone().contains(&opt.s_star, 1e-9), "{name}: s* not in K*");
            let x = opt.x_star.as_ref().expect("constructed optimum has x*");
            // Ax* = b and complementarity ⟨s*, x*⟩ = 0
            assert!((p.a().apply(x) - p.b()).amax() < 1e-9 * (1.0 + p.b().amax()));
            assert!(opt.s_star.dot(x).abs() < 1e-9 * (1.0 + x.amax()));
            // f* is consistent
            assert!((p.b().dot(&opt.y_star) - opt.f_star).abs() < 1e-12 * (1.0 + opt.f_star.abs()));
        }
    }

    #[test]
    fn parabola_lift_matches_region_barrier() {
        // f(y) on the lift equals −ln(y₁ − y₂²) − ln y₂ up to the oracle's
        // Legendre constant; derivatives must agree exactly
        let (p, _) = parabola2d().unwrap();
        let y = Vec64::from_row_slice(&[2.0, 1.0]);
        let (_, grad, hess) = crate::geometry::f_derivatives(&p, &y).unwrap();
        let region = crate::cones::BarrierOracle::new(
            crate::cones::ConeDescriptor::Parabola2d,
            crate::cones::Side::Dual,
        )
        .unwrap();
        let g2 = region.gradient(&y).unwrap();
        let h2 = region.hessian(&y).unwrap();
        assert!((&grad - &g2).amax() < 1e-12);
        assert!((hess.matrix() - h2.matrix()).amax() < 1e-10);
    }
}
