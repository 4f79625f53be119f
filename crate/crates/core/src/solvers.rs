//! Solver drivers: block coordinate descent with global pair subsolvers
//! (BCD-g) or the local block-k solver (BCD-l-k), and three baselines —
//! projected subgradient (PSG), multi-stage convex relaxation (MSCR) and the
//! proximal DC algorithm (PDCA).
//!
//! Every driver starts from a feasible point, records one [`TraceRecord`] per
//! iteration and stops after `max_iters` iterations or when the best
//! objective has not improved by a relative `tol` over the last `window`
//! iterations.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{Family, FeasibleSet, ProblemInstance};
use crate::selection::{SelectionKind, SelectionStrategy};
use crate::subsolvers::{self, MAX_LOCAL_BLOCK};

/// Largest feasibility residual accepted for a starting point.
pub const START_TOL: f64 = 1e-9;
/// Absolute slack of the sufficient-decrease monitor.
pub const DECREASE_SLACK: f64 = 1e-9;
/// Full gradient recompute period for BCD's incremental gradient.
const GRADIENT_REFRESH: usize = 1000;
const PSG_STEP: f64 = 0.01;
const PDCA_MARGIN: f64 = 1.1;
const MSCR_INNER_STEPS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Block coordinate descent with the exact pair solvers.
    Bcdg,
    /// Block coordinate descent with the local solver on blocks of size k.
    Bcdl(usize),
    Psg,
    Mscr,
    Pdca,
}

impl Method {
    pub fn is_bcd(self) -> bool {
        matches!(self, Method::Bcdg | Method::Bcdl(_))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Bcdg => f.write_str("bcd-g"),
            Method::Bcdl(k) => write!(f, "bcd-l-{k}"),
            Method::Psg => f.write_str("psg"),
            Method::Mscr => f.write_str("mscr"),
            Method::Pdca => f.write_str("pdca"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "bcd-g" | "bcdg" => Ok(Method::Bcdg),
            "psg" => Ok(Method::Psg),
            "mscr" => Ok(Method::Mscr),
            "pdca" => Ok(Method::Pdca),
            _ => lower
                .strip_prefix("bcd-l-")
                .and_then(|k| k.parse().ok())
                .map(Method::Bcdl)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown method '{s}'"))),
        }
    }
}

/// Lipschitz constant for PDCA: fixed, or 1.1 × the spectral norm of the
/// smooth Hessian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lipschitz {
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub max_iters: usize,
    /// Relative improvement below which a stall window counts as converged.
    pub tol: f64,
    /// Stall window; `None` means max(50, n).
    pub window: Option<usize>,
    pub selection: SelectionKind,
    pub seed: u64,
    /// Outer stages for MSCR.
    pub mscr_outer: usize,
    pub pdca_l: Lipschitz,
}

impl SolverConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            max_iters: 1000,
            tol: 1e-8,
            window: None,
            selection: SelectionKind::UniformRandom,
            seed: 0,
            mscr_outer: 10,
            pdca_l: Lipschitz::Auto,
        }
    }

    pub fn max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn window(mut self, window: usize) -> Self {
        self.window = Some(window);
        self
    }

    pub fn selection(mut self, selection: SelectionKind) -> Self {
        self.selection = selection;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn mscr_outer(mut self, outer: usize) -> Self {
        self.mscr_outer = outer;
        self
    }

    pub fn pdca_l(mut self, l: Lipschitz) -> Self {
        self.pdca_l = l;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.window == Some(0) {
            return Err(Error::InvalidConfig("window must be at least 1".into()));
        }
        if let Method::Bcdl(k) = self.method {
            if !(2..=MAX_LOCAL_BLOCK).contains(&k) {
                return Err(Error::InvalidConfig(format!("BCD-l needs 2 <= k <= {MAX_LOCAL_BLOCK}, got {k}")));
            }
        }
        if let Lipschitz::Value(l) = self.pdca_l {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidConfig(format!("PDCA Lipschitz constant must be positive, got {l}")));
            }
        }
        Ok(())
    }

    fn window_for(&self, n: usize) -> usize {
        self.window.unwrap_or(n.max(50))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub elapsed_s: f64,
    pub objective: f64,
    pub step_norm: f64,
    pub feas_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    /// The starting point as iteration 0.
    pub start: TraceRecord,
    /// One record per iteration, numbered from 1.
    pub records: Vec<TraceRecord>,
    pub final_x: DVector<f64>,
    /// Whether the stall rule stopped the run before `max_iters`.
    pub converged: bool,
}

impl SolveTrace {
    pub fn final_objective(&self) -> f64 {
        self.records.last().unwrap_or(&self.start).objective
    }

    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// Start record followed by the per-iteration records.
    pub fn all_records(&self) -> impl Iterator<Item = &TraceRecord> {
        std::iter::once(&self.start).chain(&self.records)
    }
}

/// Tracks the stall rule and assembles the trace.
struct Recorder {
    clock: Instant,
    set: FeasibleSet,
    start: TraceRecord,
    records: Vec<TraceRecord>,
    prefix_min: Vec<f64>,
    window: usize,
    tol: f64,
}

impl Recorder {
    fn new(set: FeasibleSet, x0: &DVector<f64>, f0: f64, window: usize, tol: f64) -> Self {
        let start = TraceRecord {
            iter: 0,
            elapsed_s: 0.0,
            objective: f0,
            step_norm: 0.0,
            feas_residual: set.residual(x0),
        };
        Self {
            clock: Instant::now(),
            set,
            start,
            records: Vec::new(),
            prefix_min: vec![f0],
            window,
            tol,
        }
    }

    /// Appends a record and reports whether the stall rule fires.
    fn push(&mut self, x: &DVector<f64>, objective: f64, step_norm: f64) -> bool {
        let iter = self.records.len() + 1;
        self.records.push(TraceRecord {
            iter,
            elapsed_s: self.clock.elapsed().as_secs_f64(),
            objective,
            step_norm,
            feas_residual: self.set.residual(x),
        });
        let best = self.prefix_min[iter - 1].min(objective);
        self.prefix_min.push(best);
        if iter < self.window {
            return false;
        }
        let before = self.prefix_min[iter - self.window];
        (before - best) / before.abs().max(1.0) < self.tol
    }

    fn finish(self, final_x: DVector<f64>, converged: bool) -> SolveTrace {
        SolveTrace {
            start: self.start,
            records: self.records,
            final_x,
            converged,
        }
    }
}

fn check_start(p: &ProblemInstance, x0: &DVector<f64>) -> Result<FeasibleSet> {
    if x0.len() != p.n() {
        return Err(Error::InvalidConfig(format!("start has length {}, expected {}", x0.len(), p.n())));
    }
    let set = p.feasible_set();
    let residual = set.residual(x0);
    if !(residual <= START_TOL) {
        return Err(Error::InfeasibleStart(residual));
    }
    Ok(set)
}

/// Runs whichever method `cfg` names.
pub fn run(p: &ProblemInstance, cfg: &SolverConfig, x0: &DVector<f64>) -> Result<SolveTrace> {
    match cfg.method {
        Method::Bcdg | Method::Bcdl(_) => bcd_run(p, cfg, x0),
        Method::Psg => psg_run(p, cfg, x0),
        Method::Mscr => mscr_run(p, cfg, x0),
        Method::Pdca => pdca_run(p, cfg, x0),
    }
}

/// Block coordinate descent. Each iteration selects a working set, solves
/// the block subproblem and checks the sufficient decrease
/// F(x⁺) − F(x) ≤ −(θ/2)‖x⁺ − x‖² up to [`DECREASE_SLACK`].
pub fn bcd_run(p: &ProblemInstance, cfg: &SolverConfig, x0: &DVector<f64>) -> Result<SolveTrace> {
    cfg.validate()?;
    let set = check_start(p, x0)?;
    let k = match cfg.method {
        Method::Bcdg => 2,
        Method::Bcdl(k) if p.family() == Family::Sit => k,
        Method::Bcdl(_) => {
            return Err(Error::UnsupportedCombination(format!("BCD-l is only defined for sit, not {}", p.family())))
        }
        other => return Err(Error::UnsupportedCombination(format!("{other} is not a BCD method"))),
    };
    if k > p.n() {
        return Err(Error::InvalidConfig(format!("block size {k} exceeds n = {}", p.n())));
    }
    let local = matches!(cfg.method, Method::Bcdl(_));
    let qbar = p.curvature();
    let hessian = p.hessian();
    let theta = p.theta();
    let needs_subgradient = matches!(cfg.selection, SelectionKind::SemiGreedySit | SelectionKind::SemiGreedyNnspca);

    let mut x = x0.clone();
    let mut grad = p.eval_gradient_f(&x);
    let mut f = p.objective(&x);
    let mut strategy = SelectionStrategy::new(cfg.selection, cfg.seed);
    let mut rec = Recorder::new(set, &x, f, cfg.window_for(p.n()), cfg.tol);
    let empty = DVector::zeros(0);

    for t in 0..cfg.max_iters {
        let composite = if needs_subgradient { &(&grad + p.penalty_subgradient(&x)) } else { &empty };
        let block = strategy.next_working_set(t, &x, composite, &qbar, k)?;
        let step = if local {
            subsolvers::sit_blockk_local(p, &qbar, &x, &grad, &block)?
        } else {
            subsolvers::solve_block(p, &qbar, &x, &grad, &block)?
        };

        let norm = step.step_norm();
        if !step.is_zero() {
            step.apply(&mut x);
            if (t + 1) % GRADIENT_REFRESH == 0 {
                grad = p.eval_gradient_f(&x);
            } else {
                for (&i, &di) in step.working_set.iter().zip(&step.d) {
                    grad.axpy(di, &hessian.column(i), 1.0);
                }
            }
            let f_new = p.objective(&x);
            let change = f_new - f;
            let bound = -0.5 * theta * norm * norm + DECREASE_SLACK;
            if change > bound {
                return Err(Error::MonotonicityBreach { iter: t + 1, change, bound });
            }
            f = f_new;
        }
        if rec.push(&x, f, norm) {
            return Ok(rec.finish(x, true));
        }
    }
    Ok(rec.finish(x, false))
}

/// One projected subgradient step: project(x − αg).
pub fn psg_step(set: &FeasibleSet, x: &DVector<f64>, g: &DVector<f64>, alpha: f64) -> Result<DVector<f64>> {
    set.project(&(x - g * alpha))
}

/// Projected subgradient with step 0.01/√t, t = 1, 2, …
pub fn psg_run(p: &ProblemInstance, cfg: &SolverConfig, x0: &DVector<f64>) -> Result<SolveTrace> {
    cfg.validate()?;
    let set = check_start(p, x0)?;
    let mut x = x0.clone();
    let mut rec = Recorder::new(set, &x, p.objective(&x), cfg.window_for(p.n()), cfg.tol);
    for t in 1..=cfg.max_iters {
        let g = p.composite_subgradient(&x);
        let next = psg_step(&set, &x, &g, PSG_STEP / (t as f64).sqrt())?;
        let norm = (&next - &x).norm();
        x = next;
        if rec.push(&x, p.objective(&x), norm) {
            return Ok(rec.finish(x, true));
        }
    }
    Ok(rec.finish(x, false))
}

/// Spectral norm of the smooth Hessian, or 1 when it vanishes.
fn hessian_scale(p: &ProblemInstance) -> f64 {
    let l = linalg::spectral_norm(p.hessian());
    if l > 0.0 {
        l
    } else {
        1.0
    }
}

/// Proximal DC algorithm: x⁺ = project(x − (∇f(x) + ∂g(x))/L).
pub fn pdca_run(p: &ProblemInstance, cfg: &SolverConfig, x0: &DVector<f64>) -> Result<SolveTrace> {
    cfg.validate()?;
    let set = check_start(p, x0)?;
    let l = match cfg.pdca_l {
        Lipschitz::Value(l) => l,
        Lipschitz::Auto => PDCA_MARGIN * hessian_scale(p),
    };
    let mut x = x0.clone();
    let mut rec = Recorder::new(set, &x, p.objective(&x), cfg.window_for(p.n()), cfg.tol);
    for _ in 0..cfg.max_iters {
        let g = p.composite_subgradient(&x);
        let next = set.project(&(&x - g / l))?;
        let norm = (&next - &x).norm();
        x = next;
        if rec.push(&x, p.objective(&x), norm) {
            return Ok(rec.finish(x, true));
        }
    }
    Ok(rec.finish(x, false))
}

/// Multi-stage convex relaxation: each of `mscr_outer` stages linearizes the
/// penalty at the current point and takes ten projected gradient steps on
/// the resulting convex model. One record per stage.
pub fn mscr_run(p: &ProblemInstance, cfg: &SolverConfig, x0: &DVector<f64>) -> Result<SolveTrace> {
    cfg.validate()?;
    let set = check_start(p, x0)?;
    let step = 1.0 / hessian_scale(p);
    let mut x = x0.clone();
    let mut rec = Recorder::new(set, &x, p.objective(&x), cfg.window_for(p.n()), cfg.tol);
    for _ in 0..cfg.mscr_outer {
        let w = p.penalty_subgradient(&x);
        let mut z = x.clone();
        for _ in 0..MSCR_INNER_STEPS {
            let g = p.eval_gradient_f(&z) + &w;
            z = set.project(&(&z - g * step))?;
        }
        let norm = (&z - &x).norm();
        x = z;
        if rec.push(&x, p.objective(&x), norm) {
            return Ok(rec.finish(x, true));
        }
    }
    Ok(rec.finish(x, false))
}

/// Runs `first`, then BCD from its final point; returns both traces.
pub fn hybrid_run(
    first: &SolverConfig,
    then_bcd: &SolverConfig,
    p: &ProblemInstance,
    x0: &DVector<f64>,
) -> Result<(SolveTrace, SolveTrace)> {
    if !then_bcd.method.is_bcd() {
        return Err(Error::UnsupportedCombination(format!(
            "hybrid second stage must be a BCD method, got {}",
            then_bcd.method
        )));
    }
    let a = run(p, first, x0)?;
    // Baselines end on a projection, which can leave a residual above the
    // start tolerance only through rounding; re-project in that case.
    let handoff = if p.feasible_set().residual(&a.final_x) <= START_TOL {
        a.final_x.clone()
    } else {
        p.feasible_set().project(&a.final_x)?
    };
    let b = bcd_run(p, then_bcd, &handoff)?;
    Ok((a, b))
}
