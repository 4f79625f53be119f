use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// The proximal curvature matrix Q̄ = H + θI that every block subproblem
/// sees, where H is the Hessian of the smooth part.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureMatrix {
    qbar: DMatrix<f64>,
}

impl CurvatureMatrix {
    pub fn new(qbar: DMatrix<f64>) -> Result<Self> {
        if !qbar.is_square() {
            return Err(Error::InvalidInstance(format!(
                "curvature matrix is {}x{}, expected square",
                qbar.nrows(),
                qbar.ncols()
            )));
        }
        let scale = crate::linalg::max_abs(&qbar).max(1.0);
        let asym = (&qbar - qbar.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::InvalidInstance(format!("curvature matrix is not symmetric (gap {asym:e})")));
        }
        Ok(Self { qbar })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.qbar
    }

    pub fn dim(&self) -> usize {
        self.qbar.nrows()
    }

    /// Curvature along e_i − e_j: Q̄_ii + Q̄_jj − 2Q̄_ij.
    pub fn alpha(&self, i: usize, j: usize) -> f64 {
        self.qbar[(i, i)] + self.qbar[(j, j)] - 2.0 * self.qbar[(i, j)]
    }

    /// Matrix of pairwise curvatures α_ij (zero diagonal), the per-pair
    /// Lipschitz constants used by semi-greedy selection.
    pub fn pairwise_lipschitz(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { self.alpha(i, j) })
    }
}

pub fn curvature_alpha(q: &CurvatureMatrix, i: usize, j: usize) -> f64 {
    q.alpha(i, j)
}
