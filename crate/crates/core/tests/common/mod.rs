//! Independent oracles and instance generators shared by the integration
//! tests. Nothing here calls the closed-form machinery under test.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use nonsep_bcd::model::{Family, FeasibleSet, ProblemInstance, Shift};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn randn(r: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| r.sample(StandardNormal))
}

pub fn randn_vec(r: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| r.sample(StandardNormal))
}

// ---------------------------------------------------------------------------
// Polynomial roots by derivative recursion and bisection.

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().fold(0.0, |acc, &a| acc * x + a)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    let d = c.len() - 1;
    c[..d].iter().enumerate().map(|(i, &a)| a * (d - i) as f64).collect()
}

fn bisect(c: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = horner(c, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = horner(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Distinct real roots of a polynomial given highest-degree first. Critical
/// points (roots of the derivative) split the line into monotone pieces,
/// each bisected on a sign change; a critical point where |p| is
/// negligible is itself a (multiple) root.
pub fn oracle_real_roots(coeffs: &[f64]) -> Vec<f64> {
    let first = coeffs.iter().position(|&a| a != 0.0);
    let Some(first) = first else { return vec![] };
    let c = &coeffs[first..];
    match c.len() {
        0 | 1 => return vec![],
        2 => return vec![-c[1] / c[0]],
        _ => {}
    }
    let bound = 1.0 + c[1..].iter().map(|a| (a / c[0]).abs()).fold(0.0, f64::max);
    let crit: Vec<f64> = oracle_real_roots(&derivative(c)).into_iter().filter(|x| x.abs() < bound).collect();
    let mut knots = vec![-bound];
    knots.extend(&crit);
    knots.push(bound);
    let scale = c.iter().map(|a| a.abs()).fold(0.0, f64::max);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (fa, fb) = (horner(c, w[0]), horner(c, w[1]));
        if fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
            roots.push(bisect(c, w[0], w[1]));
        }
    }
    for &x in &crit {
        if horner(c, x).abs() <= 1e-11 * scale * (1.0 + x.abs()).powi(c.len() as i32 - 1) {
            roots.push(x);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-7 * (1.0 + b.abs()));
    roots
}

// ---------------------------------------------------------------------------
// Block subproblem oracle: dense grid plus local refinement on the true
// objective.

/// Minimizes `h` over [lo, hi]: a grid of spacing at most `step`, then a
/// 1e-7 grid around each of the best few grid-local minima.
pub fn grid_refine_min(lo: f64, hi: f64, step: f64, h: impl Fn(f64) -> f64) -> (f64, f64) {
    if hi - lo <= 0.0 {
        return (lo, h(lo));
    }
    let count = ((hi - lo) / step).ceil() as usize;
    let ts: Vec<f64> = (0..=count).map(|i| lo + (hi - lo) * i as f64 / count as f64).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| h(t)).collect();
    let mut local: Vec<usize> = (0..ts.len())
        .filter(|&i| (i == 0 || vals[i] <= vals[i - 1]) && (i + 1 == ts.len() || vals[i] <= vals[i + 1]))
        .collect();
    local.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    local.truncate(6);
    let h_grid = (hi - lo) / count as f64;
    let mut best = (ts[local[0]], vals[local[0]]);
    for &i in &local {
        let a = (ts[i] - h_grid).max(lo);
        let b = (ts[i] + h_grid).min(hi);
        let m = ((b - a) / 1e-7).ceil().max(1.0) as usize;
        for q in 0..=m {
            let t = a + (b - a) * q as f64 / m as f64;
            let v = h(t);
            if v < best.1 {
                best = (t, v);
            }
        }
    }
    best
}

/// Exact block objective F(x + d) + (θ/2)‖d‖² − F(x) along the block path.
pub fn block_change(p: &ProblemInstance, x: &DVector<f64>, d: &DVector<f64>) -> f64 {
    let xn = x + d;
    p.objective(&xn) + 0.5 * p.theta() * d.norm_squared() - p.objective(x)
}

/// Oracle minimum of the two-coordinate subproblem on (i, j).
pub fn oracle_block2(p: &ProblemInstance, x: &DVector<f64>, i: usize, j: usize) -> f64 {
    let n = x.len();
    match p.family() {
        Family::Nnspca => {
            let v = x[i].hypot(x[j]);
            let path = |phi: f64| {
                let mut d = DVector::zeros(n);
                d[i] = v * phi.sin() - x[i];
                d[j] = v * phi.cos() - x[j];
                block_change(p, x, &d)
            };
            grid_refine_min(0.0, std::f64::consts::FRAC_PI_2, 1e-4, path).1.min(0.0)
        }
        fam => {
            let (lo, hi) = match fam {
                Family::Sit => (-x[i], x[j]),
                _ => ((-1.0 - x[i]).max(x[j] - 1.0), (1.0 - x[i]).min(1.0 + x[j])),
            };
            let path = |eta: f64| {
                let mut d = DVector::zeros(n);
                d[i] = eta;
                d[j] = -eta;
                block_change(p, x, &d)
            };
            grid_refine_min(lo, hi.max(lo), 1e-4, path).1.min(0.0)
        }
    }
}

// ---------------------------------------------------------------------------
// Random instances and feasible points.

pub struct Case {
    pub p: ProblemInstance,
    pub x: DVector<f64>,
}

/// A random instance of `family` with n ∈ [2, 10] and a random feasible
/// point; some coordinates are zeroed or pushed to the box to hit kinks.
pub fn random_case(family: Family, seed: u64) -> Case {
    let mut r = rng(seed);
    let n = r.random_range(2..=10);
    let m = r.random_range(2..=12);
    let a = randn(&mut r, m, n);
    let y = randn_vec(&mut r, m);
    let s = r.random_range(1..=n);
    let lambda = 10f64.powf(r.random_range(-2.0..1.5));
    let theta = [0.0, 1e-4, 0.1][r.random_range(0..3)];
    let c = if r.random_bool(0.3) { r.random_range(-(n as i64)..=n as i64) as f64 } else { r.random_range(-(n as f64)..n as f64) };
    let p = match family {
        Family::Sit => ProblemInstance::sit(a, y, lambda, s, theta),
        Family::Nnspca => ProblemInstance::nnspca(a, lambda, s, Shift::Auto, theta),
        Family::Dcpb1 => ProblemInstance::dcpb1(a, y, c, Shift::Auto, theta),
        Family::Dcpb2 => ProblemInstance::dcpb2(a, y, lambda, c, theta),
    }
    .expect("valid random instance");
    let x = random_feasible(&p.feasible_set(), n, &mut r);
    Case { p, x }
}

pub fn random_feasible(set: &FeasibleSet, n: usize, r: &mut ChaCha8Rng) -> DVector<f64> {
    let mut g = randn_vec(r, n) * 2.0;
    if r.random_bool(0.3) {
        let k = r.random_range(0..n);
        g[k] = 0.0;
    }
    match set {
        FeasibleSet::Simplex | FeasibleSet::NonnegSphere => {
            let mut v = g.abs();
            if v.iter().all(|&t| t == 0.0) {
                v[0] = 1.0;
            }
            set.project(&v).unwrap()
        }
        FeasibleSet::BoxHyperplane { .. } => set.project(&g).unwrap(),
    }
}

pub fn two_distinct(r: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let i = r.random_range(0..n);
    let mut j = r.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// SIT instance of the benchmark shape with a projected |Gaussian| start.
pub fn sit_instance(m: usize, n: usize, lambda: f64, s: usize, theta: f64, seed: u64) -> (ProblemInstance, DVector<f64>) {
    let mut r = rng(seed);
    let a = randn(&mut r, m, n);
    let y = randn_vec(&mut r, m);
    let p = ProblemInstance::sit(a, y, lambda, s, theta).unwrap();
    let x0 = FeasibleSet::Simplex.project(&randn_vec(&mut r, n).abs()).unwrap();
    (p, x0)
}
