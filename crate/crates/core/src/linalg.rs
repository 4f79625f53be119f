//! Small dense linear-algebra helpers shared by the model and the solvers.

use nalgebra::{DMatrix, DVector};

pub const POWER_ITERATION_STEPS: usize = 200;
pub const POWER_ITERATION_TOL: f64 = 1e-8;

/// Dominant eigenvalue (in magnitude) of a symmetric matrix by power
/// iteration with a Rayleigh-quotient estimate.
///
/// The start vector is fixed so the estimate is reproducible. Returns the
/// signed Rayleigh quotient at the last iterate.
pub fn power_iteration(m: &DMatrix<f64>, steps: usize, tol: f64) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    // Golden-ratio sequence: unlikely to be orthogonal to the top eigenvector.
    let mut v = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.618_033_988_749_895).fract());
    v /= v.norm();
    let mut estimate = v.dot(&(m * &v));
    for _ in 0..steps {
        let w = m * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        v = w / norm;
        let next = v.dot(&(m * &v));
        let converged = (next - estimate).abs() <= tol * next.abs().max(1e-300);
        estimate = next;
        if converged {
            break;
        }
    }
    estimate
}

/// Spectral norm estimate of a symmetric matrix.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    power_iteration(m, POWER_ITERATION_STEPS, POWER_ITERATION_TOL).abs()
}

/// Smallest eigenvalue of a symmetric matrix (exact, via Jacobi/QR).
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}
