//! Dense symmetric linear algebra used by the path-following machinery.
//!
//! Everything here is desk-scale (dimensions up to a few hundred), so we use
//! dense Cholesky without pivoting and treat a failed factorization as a
//! signal: for barrier Hessians it means the point left the cone interior.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use std::sync::OnceLock;

/// Relative asymmetry allowed when constructing a [`SymOperator`].
pub const SYMMETRY_TOL: f64 = 1e-8;

pub type Vec64 = DVector<f64>;
pub type Mat64 = DMatrix<f64>;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not symmetric (relative deviation {deviation:.3e})")]
    NotSymmetric { deviation: f64 },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("operator is rank deficient")]
    RankDeficient,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Which of the two norms induced by a positive definite operator to use:
/// `‖x‖_M = ⟨Mx, x⟩^{1/2}` for points, `‖s‖_M = ⟨s, M⁻¹s⟩^{1/2}` for functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormSide {
    Primal,
    Dual,
}

/// A self-adjoint operator stored as a dense symmetric matrix with a
/// write-once cached Cholesky factorization.
#[derive(Debug)]
pub struct SymOperator {
    matrix: Mat64,
    chol: OnceLock<Option<Cholesky<f64, Dyn>>>,
}

impl Clone for SymOperator {
    fn clone(&self) -> Self {
        SymOperator {
            matrix: self.matrix.clone(),
            chol: OnceLock::new(),
        }
    }
}

impl SymOperator {
    /// Builds the operator from a nominally symmetric matrix. The matrix is
    /// symmetrized by averaging; asymmetry beyond [`SYMMETRY_TOL`] relative is
    /// rejected as a construction error.
    pub fn new(matrix: Mat64) -> Result<Self, LinalgError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(LinalgError::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let scale = matrix.amax().max(1e-300);
        let mut dev: f64 = 0.0;
        for i in 0..matrix.nrows() {
            for j in (i + 1)..matrix.ncols() {
                dev = dev.max((matrix[(i, j)] - matrix[(j, i)]).abs());
            }
        }
        if dev > SYMMETRY_TOL * scale {
            return Err(LinalgError::NotSymmetric {
                deviation: dev / scale,
            });
        }
        Ok(Self::from_symmetric(matrix))
    }

    /// Builds the operator from a matrix that is symmetric by construction
    /// (assembled from a symmetric formula); still averages to kill rounding.
    pub fn from_symmetric(mut matrix: Mat64) -> Self {
        for i in 0..matrix.nrows() {
            for j in (i + 1)..matrix.ncols() {
                let avg = 0.5 * (matrix[(i, j)] + matrix[(j, i)]);
                matrix[(i, j)] = avg;
                matrix[(j, i)] = avg;
            }
        }
        SymOperator {
            matrix,
            chol: OnceLock::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_symmetric(Mat64::identity(n, n))
    }

    pub fn order(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat64 {
        &self.matrix
    }

    /// The cached Cholesky factorization; fails if a pivot is not positive.
    pub fn factorize(&self) -> Result<&Cholesky<f64, Dyn>, LinalgError> {
        self.chol
            .get_or_init(|| Cholesky::new(self.matrix.clone()))
            .as_ref()
            .ok_or(LinalgError::NotPositiveDefinite)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.factorize().is_ok()
    }

    /// Solves `M x = rhs`.
    pub fn solve(&self, rhs: &Vec64) -> Result<Vec64, LinalgError> {
        self.check_dim(rhs.len())?;
        Ok(self.factorize()?.solve(rhs))
    }

    /// Solves `M X = rhs` column by column.
    pub fn solve_matrix(&self, rhs: &Mat64) -> Result<Mat64, LinalgError> {
        self.check_dim(rhs.nrows())?;
        Ok(self.factorize()?.solve(rhs))
    }

    /// `⟨Mv, v⟩` without factorizing.
    pub fn quad_form(&self, v: &Vec64) -> f64 {
        (&self.matrix * v).dot(v)
    }

    /// `⟨v, M⁻¹v⟩` through the factorization, never an explicit inverse.
    pub fn inv_quad_form(&self, v: &Vec64) -> Result<f64, LinalgError> {
        Ok(self.solve(v)?.dot(v))
    }

    /// `‖v‖_M` on the primal side, `‖v‖_{M⁻¹}`-style on the dual side.
    pub fn weighted_norm(&self, v: &Vec64, side: NormSide) -> Result<f64, LinalgError> {
        self.check_dim(v.len())?;
        let q = match side {
            NormSide::Primal => {
                self.factorize()?;
                self.quad_form(v)
            }
            NormSide::Dual => self.inv_quad_form(v)?,
        };
        Ok(q.max(0.0).sqrt())
    }

    /// Dense inverse through the factorization.
    pub fn inverse(&self) -> Result<SymOperator, LinalgError> {
        let inv = self.factorize()?.inverse();
        Ok(SymOperator::from_symmetric(inv))
    }

    fn check_dim(&self, got: usize) -> Result<(), LinalgError> {
        if got != self.order() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.order(),
                got,
            });
        }
        Ok(())
    }
}

/// The constraint operator `A: E → H*` together with its adjoint, stored as a
/// dense `dim H × dim E` matrix. Must have full row rank.
#[derive(Debug, Clone)]
pub struct LinearMap {
    matrix: Mat64,
}

impl LinearMap {
    pub fn new(matrix: Mat64) -> Self {
        LinearMap { matrix }
    }

    /// Rows of the matrix: the dimension of the image space H*.
    pub fn dim_out(&self) -> usize {
        self.matrix.nrows()
    }

    /// Columns of the matrix: the dimension of the domain E.
    pub fn dim_in(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &Mat64 {
        &self.matrix
    }

    /// `A x`
    pub fn apply(&self, x: &Vec64) -> Vec64 {
        &self.matrix * x
    }

    /// `A* y`
    pub fn apply_adjoint(&self, y: &Vec64) -> Vec64 {
        self.matrix.tr_mul(y)
    }

    pub fn has_full_row_rank(&self) -> bool {
        let m = self.dim_out();
        if m > self.dim_in() {
            return false;
        }
        let sv = self.matrix.clone().svd(false, false).singular_values;
        let max = sv.iter().copied().fold(0.0f64, f64::max);
        let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
        min > 1e-10 * max.max(1e-300)
    }

    /// The fixed metric `G = A B⁻¹ A*` on H induced by a positive definite
    /// `B` on E.
    pub fn schur_metric(&self, b: &SymOperator) -> Result<SymOperator, LinalgError> {
        if b.order() != self.dim_in() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim_in(),
                got: b.order(),
            });
        }
        let binv_at = b.solve_matrix(&self.matrix.transpose())?;
        let g = SymOperator::from_symmetric(&self.matrix * binv_at);
        // the Cholesky pivot test alone misses borderline rank loss
        let ev = g.matrix().symmetric_eigenvalues();
        let max = ev.iter().copied().fold(0.0f64, f64::max);
        let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
        if min <= 1e-12 * max.max(1e-300) || g.factorize().is_err() {
            return Err(LinalgError::RankDeficient);
        }
        Ok(g)
    }
}
