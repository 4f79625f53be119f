//! Executable checks of the theory: coordinate-wise stationarity probes, the
//! block residual, the random-block expectation identities, and the
//! exactness / extreme-point properties of stationary points.

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{top_s_norm, Family, ProblemInstance};
use crate::selection::{binomial, enumerate_working_sets};
use crate::solvers::START_TOL;
use crate::subsolvers::solve_block;

/// A block decrease at or below this does not count as an improvement.
pub const CWS_TOL: f64 = 1e-8;
/// Largest number of working sets an exhaustive probe visits.
pub const PROBE_LIMIT: u64 = 100_000;
/// Default tolerance of the geometry checkers.
pub const GEOMETRY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CwsReport {
    pub is_cws: bool,
    pub worst_block: Vec<usize>,
    /// Largest block-model decrease found (0 when nothing improves).
    pub worst_improvement: f64,
    pub blocks_probed: u64,
}

fn check_feasible(p: &ProblemInstance, x: &DVector<f64>) -> Result<()> {
    let residual = p.feasible_set().residual(x);
    if x.len() != p.n() || !(residual <= START_TOL) {
        return Err(Error::InfeasibleStart(residual));
    }
    Ok(())
}

fn all_blocks(n: usize, k: usize) -> Result<Vec<Vec<usize>>> {
    let count = binomial(n, k);
    if count > PROBE_LIMIT {
        return Err(Error::TooManyBlocks(count));
    }
    enumerate_working_sets(n, k)
}

/// Solves the block subproblem on each probed working set and reports the
/// largest available decrease. `x` is coordinate-wise stationary when no
/// block improves by more than [`CWS_TOL`].
pub fn probe_cws(p: &ProblemInstance, x: &DVector<f64>, k: usize, mode: ProbeMode) -> Result<CwsReport> {
    check_feasible(p, x)?;
    let blocks = match mode {
        ProbeMode::Exhaustive => all_blocks(p.n(), k)?,
        ProbeMode::Sampled { count, seed } => {
            if k < 1 || k > p.n() {
                return Err(Error::InvalidConfig(format!("probe needs 1 <= k <= n, got k = {k}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let mut b = index::sample(&mut rng, p.n(), k).into_vec();
                    b.sort_unstable();
                    b
                })
                .collect()
        }
    };
    let qbar = p.curvature();
    let grad = p.eval_gradient_f(x);
    let mut worst_block = blocks.first().cloned().unwrap_or_default();
    let mut worst = 0.0;
    for block in &blocks {
        let step = solve_block(p, &qbar, x, &grad, block)?;
        if -step.objective_delta > worst {
            worst = -step.objective_delta;
            worst_block = block.clone();
        }
    }
    Ok(CwsReport {
        is_cws: worst <= CWS_TOL,
        worst_block,
        worst_improvement: worst,
        blocks_probed: blocks.len() as u64,
    })
}

/// Mean optimal block step norm over all working sets of size k.
pub fn residual_r(p: &ProblemInstance, x: &DVector<f64>, k: usize) -> Result<f64> {
    check_feasible(p, x)?;
    let blocks = all_blocks(p.n(), k)?;
    let qbar = p.curvature();
    let grad = p.eval_gradient_f(x);
    let mut total = 0.0;
    for block in &blocks {
        total += solve_block(p, &qbar, x, &grad, block)?.step_norm();
    }
    Ok(total / blocks.len() as f64)
}

/// Largest relative error seen for each random-block identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockIdentityReport {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    /// E⟨x_B, d_B⟩ = (k/n)⟨x, d⟩
    pub inner_product: f64,
    /// E⟨U_B x_B, d⟩ = (k/n)⟨x, d⟩
    pub lifted_inner_product: f64,
    /// E‖x + U_B d_B‖² = (1 − k/n)‖x‖² + (k/n)‖x + d‖²
    pub squared_norm: f64,
    /// E h(x + U_B d_B) = (k/n)h(x + d) + (1 − k/n)h(x), h = ‖·‖₁
    pub separable: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Deviation between two sides relative to the magnitude of the terms that
/// produced them.
fn relative_gap(lhs: f64, rhs: f64, scale: f64) -> f64 {
    let gap = (lhs - rhs).abs();
    if gap == 0.0 {
        0.0
    } else {
        gap / scale.max(lhs.abs()).max(rhs.abs())
    }
}

/// Checks the four expectation identities for a uniformly random working
/// set by full enumeration, on `trials` Gaussian draws of (x, d).
pub fn verify_lemma7_identities(n: usize, k: usize, trials: usize, seed: u64) -> Result<BlockIdentityReport> {
    const TOL: f64 = 1e-10;
    let blocks = all_blocks(n, k)?;
    let count = blocks.len() as f64;
    let ratio = k as f64 / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0_f64; 4];

    for trial in 0..trials {
        let mut draw = || DVector::<f64>::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let x = draw();
        // Every tenth trial uses d = 0, where both sides coincide trivially.
        let d = if trial % 10 == 9 { DVector::zeros(n) } else { draw() };
        let xd = &x + &d;
        let term_scale: f64 = x.iter().zip(d.iter()).map(|(a, b)| (a * b).abs()).sum();

        let mut sums = [0.0; 4];
        for block in &blocks {
            let mut lifted = DVector::zeros(n);
            let mut moved = x.clone();
            for &i in block {
                sums[0] += x[i] * d[i];
                lifted[i] = x[i];
                moved[i] += d[i];
            }
            sums[1] += lifted.dot(&d);
            sums[2] += moved.norm_squared();
            sums[3] += moved.lp_norm(1);
        }
        let means = sums.map(|s| s / count);
        let rhs = [
            ratio * x.dot(&d),
            ratio * x.dot(&d),
            (1.0 - ratio) * x.norm_squared() + ratio * xd.norm_squared(),
            ratio * xd.lp_norm(1) + (1.0 - ratio) * x.lp_norm(1),
        ];
        let scales = [ratio * term_scale, ratio * term_scale, rhs[2], rhs[3]];
        for q in 0..4 {
            worst[q] = worst[q].max(relative_gap(means[q], rhs[q], scales[q]));
        }
    }
    Ok(BlockIdentityReport {
        n,
        k,
        trials,
        inner_product: worst[0],
        lifted_inner_product: worst[1],
        squared_norm: worst[2],
        separable: worst[3],
        tolerance: TOL,
        passed: worst.iter().all(|&w| w <= TOL),
    })
}

/// Spectral sandwich of the expected block curvature
/// E_B[U_B U_Bᵀ Q U_B U_Bᵀ] + θI between (k/n)H̲ + θ and (k/n)H̄ + θ.
///
/// H̄ is the largest block norm max_B ‖Q_BB‖. For the lower end the
/// smallest block eigenvalue min_B λ_min(Q_BB) is used: the smallest block
/// *norm* is not a valid lower bound (for Q = 11ᵀ, n = 3, k = 2 the
/// direction (1, −1, 0) has Rayleigh quotient 1/3 while (k/n)·min_B‖Q_BB‖ = 4/3).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureBoundsReport {
    pub lower_constant: f64,
    pub upper_constant: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub holds: bool,
}

pub fn check_curvature_bounds(q: &DMatrix<f64>, k: usize, theta: f64) -> Result<CurvatureBoundsReport> {
    let n = q.nrows();
    let blocks = all_blocks(n, k)?;
    let mut expected = DMatrix::zeros(n, n);
    let mut h_low = f64::INFINITY;
    let mut h_high = 0.0_f64;
    for block in &blocks {
        let sub = q.select_rows(block).select_columns(block);
        let eig = sub.clone().symmetric_eigen().eigenvalues;
        h_low = h_low.min(eig.min());
        h_high = h_high.max(eig.amax());
        for (a, &i) in block.iter().enumerate() {
            for (b, &j) in block.iter().enumerate() {
                expected[(i, j)] += sub[(a, b)];
            }
        }
    }
    expected /= blocks.len() as f64;
    for i in 0..n {
        expected[(i, i)] += theta;
    }
    let eig = expected.symmetric_eigen().eigenvalues;
    let ratio = k as f64 / n as f64;
    let lower_constant = ratio * h_low + theta;
    let upper_constant = ratio * h_high + theta;
    let slack = 1e-10 * (1.0 + linalg::max_abs(q));
    let (min_eigenvalue, max_eigenvalue) = (eig.min(), eig.max());
    Ok(CurvatureBoundsReport {
        lower_constant,
        upper_constant,
        min_eigenvalue,
        max_eigenvalue,
        holds: min_eigenvalue >= lower_constant - slack && max_eigenvalue <= upper_constant + slack,
    })
}

/// Sparsity and gradient-balance properties that stationary points of the
/// index tracking problem have once λ > 2‖∇f(x)‖∞.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SitExactnessReport {
    /// False when λ ≤ 2‖∇f(x)‖∞; nothing is asserted then.
    pub active: bool,
    pub threshold: f64,
    /// ‖x‖₁ − ‖x‖_\[s\].
    pub tail_mass: f64,
    /// max |∇_i f − ∇_j f| over coordinates with x_i > tol.
    pub gradient_spread: f64,
    pub witness_pair: Option<(usize, usize)>,
    pub passed: bool,
}

pub fn check_sit_exactness(p: &ProblemInstance, x: &DVector<f64>, tol: f64) -> Result<SitExactnessReport> {
    if p.family() != Family::Sit {
        return Err(Error::UnsupportedCombination(format!("sit exactness check on {}", p.family())));
    }
    let grad = p.eval_gradient_f(x);
    let threshold = 2.0 * grad.amax();
    let tail_mass = x.lp_norm(1) - top_s_norm(x.as_slice(), p.sparsity());
    let support: Vec<usize> = (0..x.len()).filter(|&i| x[i] > tol).collect();
    let mut spread = 0.0;
    let mut witness_pair = None;
    if let (Some(&lo), Some(&hi)) = (
        support.iter().min_by(|&&a, &&b| grad[a].total_cmp(&grad[b])),
        support.iter().max_by(|&&a, &&b| grad[a].total_cmp(&grad[b])),
    ) {
        spread = grad[hi] - grad[lo];
        if lo != hi {
            witness_pair = Some((hi, lo));
        }
    }
    let active = p.lambda() > threshold;
    Ok(SitExactnessReport {
        active,
        threshold,
        tail_mass,
        gradient_spread: spread,
        witness_pair,
        passed: !active || (tail_mass <= tol && spread <= tol),
    })
}

/// Every |x_r| lies in [1 − tol, 1 + tol].
pub fn check_extreme_point(x: &DVector<f64>, tol: f64) -> bool {
    x.iter().all(|v| (v.abs() - 1.0).abs() <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dcpb2Regime {
    /// λ ≤ φ√n: no property asserted.
    Inactive,
    /// φ√n < λ ≤ φ√(n+2): every coordinate is nonzero.
    NonzeroEntries,
    /// λ > φ√(n+2): every coordinate is ±1.
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dcpb2ExactnessReport {
    /// max(Q̄) − min(Q̄) over all entries.
    pub phi: f64,
    pub regime: Dcpb2Regime,
    pub min_abs_entry: f64,
    pub passed: bool,
}

pub fn check_dcpb2_exactness(p: &ProblemInstance, qbar: &DMatrix<f64>, x: &DVector<f64>, tol: f64) -> Dcpb2ExactnessReport {
    let phi = qbar.max() - qbar.min();
    let n = x.len() as f64;
    let lambda = p.lambda();
    let regime = if lambda > phi * (n + 2.0).sqrt() {
        Dcpb2Regime::Binary
    } else if lambda > phi * n.sqrt() {
        Dcpb2Regime::NonzeroEntries
    } else {
        Dcpb2Regime::Inactive
    };
    let min_abs_entry = x.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let passed = match regime {
        Dcpb2Regime::Inactive => true,
        Dcpb2Regime::NonzeroEntries => min_abs_entry > tol,
        Dcpb2Regime::Binary => check_extreme_point(x, tol) && min_abs_entry > tol,
    };
    Dcpb2ExactnessReport {
        phi,
        regime,
        min_abs_entry,
        passed,
    }
}
