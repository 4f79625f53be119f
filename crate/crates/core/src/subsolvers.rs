//! Block subproblem solvers.
//!
//! Each solver minimizes the proximal block model
//!
//! J(d) = ⟨∇_B f(x), d⟩ + ½ dᵀ Q̄_BB d + [penalty(x + U_B d) − penalty(x)]
//!
//! over the steps d that keep x + U_B d feasible. Because f is quadratic,
//! J(d) equals F(x + U_B d) − F(x) + (θ/2)‖d‖² exactly. The two-coordinate
//! solvers are global: they enumerate a finite breakpoint set that provably
//! contains a minimizer and score every breakpoint on the true J. The zero
//! step is always scored first, so ties keep the current point.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{project_simplex, top_s_support, CurvatureMatrix, Family, ProblemInstance};
use crate::polyroots;

/// Pairwise curvatures at or below this are treated as flat.
const FLAT_CURVATURE: f64 = 1e-14;
/// Tolerance on an empty step interval before it is reported.
const INTERVAL_SLACK: f64 = 1e-12;
/// Two-coordinate slices of the sphere with radius below this cannot move.
const DEGENERATE_RADIUS: f64 = 1e-12;
/// Largest block the local solver enumerates 2^k status sets for.
pub const MAX_LOCAL_BLOCK: usize = 20;
const LOCAL_INNER_ITERS: usize = 200;

/// A working set, the step chosen on it and the resulting model decrease.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockStep {
    pub working_set: Vec<usize>,
    pub d: Vec<f64>,
    /// J(d) − J(0); never positive.
    pub objective_delta: f64,
    pub candidates_evaluated: usize,
}

impl BlockStep {
    pub fn step_norm(&self) -> f64 {
        self.d.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|&v| v == 0.0)
    }

    /// x + U_B d.
    pub fn apply(&self, x: &mut DVector<f64>) {
        for (&i, &di) in self.working_set.iter().zip(&self.d) {
            x[i] += di;
        }
    }
}

/// Scores candidate steps on the true block model and keeps the best one.
struct Scorer<'a> {
    p: &'a ProblemInstance,
    qbar: &'a DMatrix<f64>,
    x: &'a DVector<f64>,
    grad: &'a DVector<f64>,
    block: Vec<usize>,
    support: Vec<usize>,
    scratch: DVector<f64>,
    best_d: Vec<f64>,
    best_value: f64,
    evaluated: usize,
}

impl<'a> Scorer<'a> {
    fn new(p: &'a ProblemInstance, qbar: &'a CurvatureMatrix, x: &'a DVector<f64>, grad: &'a DVector<f64>, block: Vec<usize>) -> Self {
        let k = block.len();
        let support = match p.family() {
            Family::Sit | Family::Nnspca => top_s_support(x.as_slice(), p.sparsity()),
            Family::Dcpb1 | Family::Dcpb2 => Vec::new(),
        };
        Self {
            p,
            qbar: qbar.matrix(),
            x,
            grad,
            support,
            scratch: x.clone(),
            best_d: vec![0.0; k],
            best_value: 0.0,
            evaluated: 1,
            block,
        }
    }

    fn value(&mut self, d: &[f64]) -> f64 {
        let mut lin = 0.0;
        let mut quad = 0.0;
        for (a, (&ia, &da)) in self.block.iter().zip(d).enumerate() {
            lin += self.grad[ia] * da;
            quad += self.qbar[(ia, ia)] * da * da;
            for (&ib, &db) in self.block[a + 1..].iter().zip(&d[a + 1..]) {
                quad += 2.0 * self.qbar[(ia, ib)] * da * db;
            }
        }
        let saved: Vec<f64> = self.block.iter().map(|&i| self.scratch[i]).collect();
        for (&i, &di) in self.block.iter().zip(d) {
            self.scratch[i] += di;
        }
        let penalty = self.p.penalty_delta(self.x, &self.support, &self.scratch, &self.block, d);
        for (&i, v) in self.block.iter().zip(saved) {
            self.scratch[i] = v;
        }
        lin + 0.5 * quad + penalty
    }

    fn offer(&mut self, d: &[f64]) {
        if d.iter().any(|v| !v.is_finite()) {
            return;
        }
        self.evaluated += 1;
        let v = self.value(d);
        if v < self.best_value {
            self.best_value = v;
            self.best_d = d.to_vec();
        }
    }

    fn finish(self) -> BlockStep {
        BlockStep {
            working_set: self.block,
            d: self.best_d,
            objective_delta: self.best_value,
            candidates_evaluated: self.evaluated,
        }
    }
}

fn distinct(i: usize, j: usize) -> Result<()> {
    if i == j {
        Err(Error::IdenticalIndices(i))
    } else {
        Ok(())
    }
}

/// Step interval [l, u] for η in x + η(e_i − e_j) inside the box [−1, 1].
fn box_interval(x: &DVector<f64>, i: usize, j: usize) -> Result<(f64, f64)> {
    let lower = (-1.0 - x[i]).max(x[j] - 1.0);
    let upper = (1.0 - x[i]).min(1.0 + x[j]);
    if lower > upper + INTERVAL_SLACK {
        return Err(Error::EmptyInterval { lower, upper });
    }
    Ok((lower, upper.max(lower)))
}

/// Sparse index tracking, pair (i, j): η ∈ [−x_i, x_j], d = (η, −η).
pub fn sit_block2(
    p: &ProblemInstance,
    qbar: &CurvatureMatrix,
    x: &DVector<f64>,
    grad: &DVector<f64>,
    i: usize,
    j: usize,
) -> Result<BlockStep> {
    distinct(i, j)?;
    let alpha = qbar.alpha(i, j);
    let beta = grad[i] - grad[j];
    let lambda = p.lambda();
    let (lo, hi) = (-x[i], x[j]);
    let clamp = |t: f64| t.max(lo).min(hi);

    let mut scorer = Scorer::new(p, qbar, x, grad, vec![i, j]);
    let mut etas = vec![lo, hi];
    if alpha > FLAT_CURVATURE {
        etas.extend([-beta / alpha, (lambda - beta) / alpha, -(lambda + beta) / alpha].map(clamp));
    }
    for eta in etas {
        scorer.offer(&[eta, -eta]);
    }
    Ok(scorer.finish())
}

/// Nonnegative sparse PCA, pair (i, j): rotates (x_i, x_j) along the
/// quarter circle of radius v = ‖(x_i, x_j)‖, x_i = v sin φ, x_j = v cos φ.
pub fn nnspca_block2(
    p: &ProblemInstance,
    qbar: &CurvatureMatrix,
    x: &DVector<f64>,
    grad: &DVector<f64>,
    i: usize,
    j: usize,
) -> Result<BlockStep> {
    distinct(i, j)?;
    let mut scorer = Scorer::new(p, qbar, x, grad, vec![i, j]);
    let v = x[i].hypot(x[j]);
    if v <= DEGENERATE_RADIUS {
        return Ok(scorer.finish());
    }
    let q = qbar.matrix();
    let lambda = p.lambda();
    let a = 0.5 * (q[(j, j)] - q[(i, i)]) * v * v;
    let b = (grad[i] + lambda - q[(i, i)] * x[i] - q[(i, j)] * x[j]) * v;
    let c = (grad[j] + lambda - q[(i, j)] * x[i] - q[(j, j)] * x[j]) * v;
    let d = q[(i, j)] * v * v;

    // (sin φ, cos φ) pairs: the two ends of the arc, then the stationary
    // points of each top-s membership case, with β = tan φ.
    let mut angles: Vec<(f64, f64)> = vec![(0.0, 1.0), (1.0, 0.0)];
    for (bh, ch) in [(b, c), (b - lambda * v, c), (b, c - lambda * v), (b - lambda * v, c - lambda * v)] {
        let quartic = polyroots::solve_real(
            d * d - ch * ch,
            4.0 * a * d + 2.0 * bh * ch,
            4.0 * a * a - 2.0 * d * d - bh * bh - ch * ch,
            2.0 * bh * ch - 4.0 * a * d,
            d * d - bh * bh,
        );
        let Ok(roots) = quartic else { continue };
        for beta in polyroots::nonneg_roots(&roots) {
            let r = beta.hypot(1.0);
            angles.push((beta / r, 1.0 / r));
        }
    }
    for (sin, cos) in angles {
        scorer.offer(&[v * sin - x[i], v * cos - x[j]]);
    }
    Ok(scorer.finish())
}

/// Box-constrained concave quadratic (DCPB1), pair (i, j): d = (η, −η).
pub fn dcpb1_block2(
    p: &ProblemInstance,
    qbar: &CurvatureMatrix,
    x: &DVector<f64>,
    grad: &DVector<f64>,
    i: usize,
    j: usize,
) -> Result<BlockStep> {
    distinct(i, j)?;
    let (lo, hi) = box_interval(x, i, j)?;
    let alpha = qbar.alpha(i, j);
    let beta = grad[i] - grad[j];

    let mut scorer = Scorer::new(p, qbar, x, grad, vec![i, j]);
    let mut etas = vec![lo, hi];
    // For α ≤ 0 the stationary point is a maximizer; the endpoints decide.
    if alpha > 0.0 {
        etas.push((-beta / alpha).max(lo).min(hi));
    }
    for eta in etas {
        scorer.offer(&[eta, -eta]);
    }
    Ok(scorer.finish())
}

/// Box-constrained least squares with −λ‖x‖₂ (DCPB2), pair (i, j).
///
/// Interior stationary points satisfy (αη + β)·√R = λ(2η + D) with
/// R(η) = N + 2η² + 2Dη, N = ‖x‖², D = x_i − x_j; squaring gives a quartic
/// whose spurious roots are discarded by scoring on the true objective.
pub fn dcpb2_block2(
    p: &ProblemInstance,
    qbar: &CurvatureMatrix,
    x: &DVector<f64>,
    grad: &DVector<f64>,
    i: usize,
    j: usize,
) -> Result<BlockStep> {
    distinct(i, j)?;
    let (lo, hi) = box_interval(x, i, j)?;
    let clamp = |t: f64| t.max(lo).min(hi);
    let alpha = qbar.alpha(i, j);
    let beta = grad[i] - grad[j];
    let lambda = p.lambda();
    let big_d = x[i] - x[j];
    let big_n = x.norm_squared();
    let (a2, ab, b2, l2) = (alpha * alpha, alpha * beta, beta * beta, lambda * lambda);

    let mut scorer = Scorer::new(p, qbar, x, grad, vec![i, j]);
    let mut etas = vec![lo, hi];
    if alpha.abs() > FLAT_CURVATURE {
        etas.push(clamp(-beta / alpha));
    }
    let quartic = polyroots::solve_real(
        2.0 * a2,
        2.0 * a2 * big_d + 4.0 * ab,
        a2 * big_n + 4.0 * ab * big_d + 2.0 * b2 - 4.0 * l2,
        2.0 * ab * big_n + 2.0 * b2 * big_d - 4.0 * l2 * big_d,
        b2 * big_n - l2 * big_d * big_d,
    );
    if let Ok(roots) = quartic {
        etas.extend(roots.roots().iter().map(|&r| clamp(r)));
    }
    for eta in etas {
        scorer.offer(&[eta, -eta]);
    }
    Ok(scorer.finish())
}

/// Local solver for a sparse index tracking block of size k.
///
/// For every assignment S ⊆ B of top-s membership, the penalty is linear and
/// J_S(d) = ½dᵀQ̄_BB d + ⟨∇_B f − λ1_S, d⟩ is convex. It is minimized over
/// {d ≥ −x_B, Σd = 0} by projected gradient with exact projection onto the
/// shifted simplex; each minimizer is then scored on the true J.
pub fn sit_blockk_local(
    p: &ProblemInstance,
    qbar: &CurvatureMatrix,
    x: &DVector<f64>,
    grad: &DVector<f64>,
    block: &[usize],
) -> Result<BlockStep> {
    let k = block.len();
    if k > MAX_LOCAL_BLOCK {
        return Err(Error::BlockTooLarge(k));
    }
    if k < 2 {
        return Err(Error::InvalidConfig(format!("local block needs at least 2 indices, got {k}")));
    }
    for (a, &i) in block.iter().enumerate() {
        if block[a + 1..].contains(&i) {
            return Err(Error::IdenticalIndices(i));
        }
    }

    let mut scorer = Scorer::new(p, qbar, x, grad, block.to_vec());
    let xb = DVector::from_iterator(k, block.iter().map(|&i| x[i]));
    let mass = xb.sum();
    if mass <= 0.0 {
        return Ok(scorer.finish());
    }
    let q = qbar.matrix().select_rows(block).select_columns(block);
    let gb = DVector::from_iterator(k, block.iter().map(|&i| grad[i]));

    // Feasible directions live in {Σd = 0}; the curvature that matters for
    // the step size is that of Q̄_BB restricted to this subspace.
    let centering = DMatrix::identity(k, k) - DMatrix::from_element(k, k, 1.0 / k as f64);
    let restricted = &centering * &q * &centering;
    let lipschitz = restricted.symmetric_eigen().eigenvalues.max();

    let lambda = p.lambda();
    let statuses: u32 = if lambda == 0.0 { 1 } else { 1 << k };
    for mask in 0..statuses {
        let linear = DVector::from_fn(k, |a, _| gb[a] - if mask >> a & 1 == 1 { lambda } else { 0.0 });
        let z = if lipschitz <= FLAT_CURVATURE {
            // J_S is linear on the feasible set: the best vertex is optimal.
            let best = linear.imin();
            DVector::from_fn(k, |a, _| if a == best { mass } else { 0.0 })
        } else {
            let mut z = xb.clone();
            let step = 1.0 / lipschitz;
            for _ in 0..LOCAL_INNER_ITERS {
                let gradient = &q * (&z - &xb) + &linear;
                let next = project_simplex(&(&z - gradient * step), mass);
                let moved = (&next - &z).amax();
                z = next;
                if moved <= 1e-15 * (1.0 + mass) {
                    break;
                }
            }
            z
        };
        let d: Vec<f64> = (0..k).map(|a| z[a] - xb[a]).collect();
        scorer.offer(&d);
    }
    Ok(scorer.finish())
}

/// The family's block solver for a working set: the global pair solvers for
/// |B| = 2, and the local solver for larger sparse index tracking blocks.
pub fn solve_block(
    p: &ProblemInstance,
    qbar: &CurvatureMatrix,
    x: &DVector<f64>,
    grad: &DVector<f64>,
    block: &[usize],
) -> Result<BlockStep> {
    match (block, p.family()) {
        (&[i, j], Family::Sit) => sit_block2(p, qbar, x, grad, i, j),
        (&[i, j], Family::Nnspca) => nnspca_block2(p, qbar, x, grad, i, j),
        (&[i, j], Family::Dcpb1) => dcpb1_block2(p, qbar, x, grad, i, j),
        (&[i, j], Family::Dcpb2) => dcpb2_block2(p, qbar, x, grad, i, j),
        (_, Family::Sit) => sit_blockk_local(p, qbar, x, grad, block),
        (_, family) => Err(Error::UnsupportedCombination(format!(
            "no block-{} solver for {family}",
            block.len()
        ))),
    }
}
