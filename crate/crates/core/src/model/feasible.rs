//! The three feasible sets and their Euclidean projections.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Hyperplane residual targeted by the box-hyperplane bisection.
const HYPERPLANE_TOL: f64 = 1e-10;
const BISECTION_MAX_ITERS: usize = 200;

/// The constraint set Ω of a problem family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeasibleSet {
    /// ‖x‖₁ = 1, x ≥ 0.
    Simplex,
    /// ‖x‖₂ = 1, x ≥ 0.
    NonnegSphere,
    /// −1 ≤ x ≤ 1, xᵀ1 = c.
    BoxHyperplane { c: f64 },
}

impl FeasibleSet {
    /// Euclidean projection of `x` onto the set.
    pub fn project(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        match *self {
            FeasibleSet::Simplex => Ok(project_simplex(x, 1.0)),
            FeasibleSet::NonnegSphere => {
                let clamped = x.map(|v| v.max(0.0));
                let norm = clamped.norm();
                if !(norm > 0.0) || !norm.is_finite() {
                    return Err(Error::DegenerateProjection);
                }
                Ok(clamped / norm)
            }
            FeasibleSet::BoxHyperplane { c } => project_box_hyperplane(x, c),
        }
    }

    /// Distance-like violation measure; zero exactly on the set.
    pub fn residual(&self, x: &DVector<f64>) -> f64 {
        let negative: f64 = x.iter().map(|v| (-v).max(0.0)).sum();
        match *self {
            FeasibleSet::Simplex => (x.lp_norm(1) - 1.0).abs() + negative,
            FeasibleSet::NonnegSphere => (x.norm_squared() - 1.0).abs() + negative,
            FeasibleSet::BoxHyperplane { c } => {
                let outside: f64 = x.iter().map(|v| (v.abs() - 1.0).max(0.0)).sum();
                (x.sum() - c).abs() + outside
            }
        }
    }
}

/// Projection onto {z ≥ 0, Σz = radius} by sort-and-threshold.
pub(crate) fn project_simplex(v: &DVector<f64>, radius: f64) -> DVector<f64> {
    let mut u: Vec<f64> = v.iter().copied().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let candidate = (cumsum - radius) / (j + 1) as f64;
        if uj - candidate > 0.0 {
            tau = candidate;
        }
    }
    v.map(|vi| (vi - tau).max(0.0))
}

fn project_box_hyperplane(x: &DVector<f64>, c: f64) -> Result<DVector<f64>> {
    let n = x.len();
    if !c.is_finite() || c.abs() > n as f64 {
        return Err(Error::InfeasibleTarget { c, n });
    }
    if c.abs() == n as f64 {
        return Ok(DVector::from_element(n, c.signum()));
    }
    let shifted = |tau: f64| x.map(|v| (v - tau).clamp(-1.0, 1.0));
    let excess = |tau: f64| shifted(tau).sum() - c;

    // excess(τ) is nonincreasing; these brackets drive every coordinate to ±1.
    let mut lo = x.min() - 1.0;
    let mut hi = x.max() + 1.0;
    let mut tau = 0.5 * (lo + hi);
    for _ in 0..BISECTION_MAX_ITERS {
        tau = 0.5 * (lo + hi);
        let e = excess(tau);
        if e.abs() <= HYPERPLANE_TOL {
            break;
        }
        if e > 0.0 {
            lo = tau;
        } else {
            hi = tau;
        }
    }

    // With the active set identified, the multiplier has a closed form on the
    // free coordinates; use it when it keeps the same active set.
    let z = shifted(tau);
    let free: Vec<usize> = (0..n).filter(|&i| z[i].abs() < 1.0).collect();
    if !free.is_empty() {
        let clamped_sum: f64 = (0..n).filter(|i| z[*i].abs() >= 1.0).map(|i| z[i]).sum();
        let free_sum: f64 = free.iter().map(|&i| x[i]).sum();
        let exact = (free_sum + clamped_sum - c) / free.len() as f64;
        let refined = shifted(exact);
        let same_active = (0..n).all(|i| (refined[i].abs() < 1.0) == (z[i].abs() < 1.0));
        if same_active && (refined.sum() - c).abs() <= (z.sum() - c).abs() {
            return Ok(refined);
        }
    }
    Ok(z)
}
