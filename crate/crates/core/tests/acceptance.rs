//! Acceptance suite. Runs as a plain binary (`harness = false`) so that one
//! PASS/FAIL line per criterion is always printed; exits nonzero if any
//! criterion fails.

mod common;

use std::time::Instant;

use common::{oracle_block2, oracle_real_roots, random_case, rng, sit_instance, two_distinct};
use nalgebra::DVector;
use nonsep_bcd::bench::{run_experiment, ExperimentSpec, RunOptions};
use nonsep_bcd::diagnostics::{check_sit_exactness, verify_lemma7_identities};
use nonsep_bcd::model::{Family, FeasibleSet, ProblemInstance, Shift};
use nonsep_bcd::polyroots::solve_real;
use nonsep_bcd::solvers::{self, hybrid_run, Method, SolveTrace, SolverConfig};
use nonsep_bcd::subsolvers::solve_block;
use rand::Rng;
use rayon::prelude::*;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

const FAMILIES: [Family; 4] = [Family::Sit, Family::Nnspca, Family::Dcpb1, Family::Dcpb2];

/// Block-2 solvers against the grid-plus-refinement oracle.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let worst: Vec<(Family, f64)> = FAMILIES
        .par_iter()
        .map(|&family| {
            let worst = (0..200u64)
                .map(|seed| {
                    let case = random_case(family, 10_000 + seed);
                    let (i, j) = two_distinct(&mut rng(seed), case.p.n());
                    let qbar = case.p.curvature();
                    let grad = case.p.eval_gradient_f(&case.x);
                    let step = solve_block(&case.p, &qbar, &case.x, &grad, &[i, j]).unwrap();
                    (step.objective_delta - oracle_block2(&case.p, &case.x, i, j)).abs()
                })
                .fold(0.0, f64::max);
            (family, worst)
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let ok = worst.iter().all(|&(_, w)| w <= 1e-6) && secs < 60.0;
    let parts: Vec<String> = worst.iter().map(|(f, w)| format!("{f} {w:.1e}")).collect();
    outcome(ok, format!("max |solver − oracle| per family: {}; {secs:.1}s", parts.join(", ")))
}

/// Quartic roots against derivative-bisection, plus constructed root sets.
fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let c: [f64; 5] = std::array::from_fn(|_| r.random_range(-10.0..10.0));
        let got = solve_real(c[0], c[1], c[2], c[3], c[4]).unwrap();
        let want = oracle_real_roots(&c);
        let same = got.len() == want.len()
            && got.roots().iter().zip(&want).all(|(a, b)| (a - b).abs() <= 1e-6 * (1.0 + b.abs()));
        if !same {
            mismatches += 1;
        }
    }
    let mut constructed_err: f64 = 0.0;
    let mut constructed_missing = 0;
    let mut sets: Vec<[f64; 4]> = vec![[1.0, 2.0, 3.0, 4.0]];
    for _ in 0..1000 {
        // Distinct quarter-integers in [−8, 8].
        let mut roots: Vec<f64> = Vec::new();
        while roots.len() < 4 {
            let v = r.random_range(-32i32..=32) as f64 / 4.0;
            if !roots.contains(&v) {
                roots.push(v);
            }
        }
        roots.sort_by(f64::total_cmp);
        sets.push([roots[0], roots[1], roots[2], roots[3]]);
    }
    for set in &sets {
        let e1: f64 = set.iter().sum();
        let e2 = set[0] * set[1] + set[0] * set[2] + set[0] * set[3] + set[1] * set[2] + set[1] * set[3] + set[2] * set[3];
        let e3 = set[0] * set[1] * set[2] + set[0] * set[1] * set[3] + set[0] * set[2] * set[3] + set[1] * set[2] * set[3];
        let e4: f64 = set.iter().product();
        let got = solve_real(1.0, -e1, e2, -e3, e4).unwrap();
        if got.len() != 4 {
            constructed_missing += 1;
            continue;
        }
        for (a, b) in got.roots().iter().zip(set) {
            constructed_err = constructed_err.max((a - b).abs());
        }
    }
    let ok = mismatches == 0 && constructed_missing == 0 && constructed_err <= 1e-9;
    outcome(
        ok,
        format!(
            "{mismatches}/10000 random draws differ from oracle; constructed sets: {} missing, max error {constructed_err:.1e}",
            constructed_missing
        ),
    )
}

/// Per-iteration violations of F(x⁺) − F(x) ≤ −(θ/2)‖x⁺ − x‖² + 1e−9.
fn decrease_violations(t: &SolveTrace, theta: f64) -> usize {
    let recs: Vec<_> = t.all_records().collect();
    recs.windows(2)
        .filter(|w| w[1].objective - w[0].objective > -0.5 * theta * w[1].step_norm.powi(2) + 1e-9)
        .count()
}

fn criterion_3() -> Outcome {
    let theta = 1e-4;
    let runs: Vec<(Family, Method, u64)> = FAMILIES
        .iter()
        .flat_map(|&f| {
            let methods: Vec<Method> =
                if f == Family::Sit { vec![Method::Bcdg, Method::Bcdl(3)] } else { vec![Method::Bcdg] };
            methods.into_iter().flat_map(move |m| (0..50u64).map(move |s| (f, m, s)))
        })
        .collect();
    let results: Vec<usize> = runs
        .par_iter()
        .map(|&(family, method, seed)| {
            let (p, x0) = if family == Family::Sit {
                sit_instance(30, 15, [1.0, 10.0, 100.0][seed as usize % 3], 4, theta, 3000 + seed)
            } else {
                let case = random_case(family, 3000 + seed);
                (case.p.with_theta(theta).unwrap(), case.x)
            };
            // Stall rule disabled: the window exceeds the iteration budget.
            let cfg = SolverConfig::new(method).max_iters(2000).tol(f64::MIN_POSITIVE).window(10_000).seed(seed);
            match solvers::run(&p, &cfg, &x0) {
                Ok(t) => decrease_violations(&t, theta),
                Err(_) => 1,
            }
        })
        .collect();
    let violations: usize = results.iter().sum();
    outcome(violations == 0, format!("{violations} violations over {} runs × 2000 iterations", runs.len()))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut failed = Vec::new();
    for n in 2..=8 {
        for k in 1..=3.min(n) {
            let r = verify_lemma7_identities(n, k, 100, (n * 10 + k) as u64).unwrap();
            worst = worst.max(r.inner_product).max(r.lifted_inner_product).max(r.squared_norm).max(r.separable);
            if !r.passed {
                failed.push((n, k));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = failed.is_empty() && worst <= 1e-10 && secs < 10.0;
    outcome(ok, format!("max relative error {worst:.1e}, failing (n,k): {failed:?}; {secs:.2}s"))
}

fn final_objectives(p: &ProblemInstance, x0: &DVector<f64>, seed: u64) -> [f64; 4] {
    let run = |cfg: SolverConfig| solvers::run(p, &cfg, x0).unwrap().final_objective();
    [
        run(SolverConfig::new(Method::Bcdg).max_iters(50_000).seed(seed)),
        run(SolverConfig::new(Method::Psg)),
        run(SolverConfig::new(Method::Mscr)),
        run(SolverConfig::new(Method::Pdca)),
    ]
}

fn criterion_5() -> Outcome {
    let finals: Vec<[f64; 4]> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let (p, x0) = sit_instance(40, 20, 1e3, 5, 1e-4, 5000 + seed);
            final_objectives(&p, &x0, seed)
        })
        .collect();
    let beats_each = finals.iter().filter(|f| f[1..].iter().all(|&b| f[0] <= b + 1e-6)).count();
    let beats_min = finals.iter().filter(|f| f[0] <= f[1].min(f[2]).min(f[3])).count();
    let ok = beats_each >= 80 && beats_min >= 60;
    outcome(ok, format!("BCD-g ≤ every baseline + 1e-6 in {beats_each}/100; ≤ best baseline in {beats_min}/100"))
}

fn criterion_6() -> Outcome {
    let results: Vec<(bool, bool)> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let (p, x0) = sit_instance(40, 20, 1e3, 5, 1e-4, 6000 + seed);
            let (a, b) = hybrid_run(&SolverConfig::new(Method::Pdca), &SolverConfig::new(Method::Bcdg).max_iters(50_000).seed(seed), &p, &x0)
                .unwrap();
            let combined: Vec<f64> = a.all_records().chain(b.all_records()).map(|r| r.objective).collect();
            let monotone = combined.windows(2).all(|w| w[1] <= w[0] + 1e-9);
            (a.final_objective() - b.final_objective() > 1e-6, monotone)
        })
        .collect();
    let escapes = results.iter().filter(|r| r.0).count();
    let monotone = results.iter().filter(|r| r.1).count();
    outcome(escapes >= 25 && monotone == 50, format!("BCD-g improves PDCA by > 1e-6 in {escapes}/50; monotone combined trace in {monotone}/50"))
}

fn criterion_7() -> Outcome {
    // (a) index tracking with λ above twice the gradient sup-norm.
    let sit: Vec<(bool, bool)> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let (p, x0) = sit_instance(40, 20, 1e4, 5, 1e-4, 7000 + seed);
            let cfg = SolverConfig::new(Method::Bcdg).max_iters(200_000).tol(1e-15).window(2000).seed(seed);
            let t = solvers::run(&p, &cfg, &x0).unwrap();
            let r = check_sit_exactness(&p, &t.final_x, 1e-6).unwrap();
            (r.active, r.tail_mass <= 1e-6 && r.gradient_spread <= 1e-5)
        })
        .collect();
    let sit_active = sit.iter().filter(|r| r.0).count();
    let sit_ok = sit.iter().filter(|r| r.0 && r.1).count();

    // (b) DCPB1 with every pairwise curvature ≤ 0: 4λ ≥ max‖a_i − a_j‖² + 2θ.
    let theta = 1e-4;
    let dcpb1: Vec<(bool, bool)> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let mut r = rng(7100 + seed);
            let n = 10;
            let a = common::randn(&mut r, 15, n);
            let y = common::randn_vec(&mut r, 15);
            let mut spread: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    spread = spread.max((a.column(i) - a.column(j)).norm_squared());
                }
            }
            let gram_norm = (a.transpose() * &a).symmetric_eigen().eigenvalues.max();
            let lambda = ((spread + 2.0 * theta) / 4.0).max(gram_norm / 2.0) * 1.01;
            let c = [-4.0, -2.0, 0.0, 2.0, 4.0][seed as usize % 5];
            let p = ProblemInstance::dcpb1(a, y, c, Shift::Value(lambda), theta).unwrap();
            let q = p.curvature();
            let concave = (0..n).all(|i| (i + 1..n).all(|j| q.alpha(i, j) <= 0.0));
            let x0 = FeasibleSet::BoxHyperplane { c }.project(&common::randn_vec(&mut r, n)).unwrap();
            let cfg = SolverConfig::new(Method::Bcdg).max_iters(50_000).window(1000).seed(seed);
            let t = solvers::run(&p, &cfg, &x0).unwrap();
            (concave, t.final_x.iter().all(|v| (v.abs() - 1.0).abs() <= 1e-6))
        })
        .collect();
    let dcpb1_ok = dcpb1.iter().filter(|r| r.0 && r.1).count();

    // (c) DCPB2 with λ > φ√(n+2), c = 0, n even.
    let dcpb2: Vec<bool> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let mut r = rng(7200 + seed);
            let n = 8;
            let a = common::randn(&mut r, 12, n);
            let y = common::randn_vec(&mut r, 12);
            let qbar = a.transpose() * &a + nalgebra::DMatrix::identity(n, n) * theta;
            let phi = qbar.max() - qbar.min();
            let lambda = 1.05 * phi * ((n + 2) as f64).sqrt();
            let p = ProblemInstance::dcpb2(a, y, lambda, 0.0, theta).unwrap();
            let x0 = FeasibleSet::BoxHyperplane { c: 0.0 }.project(&common::randn_vec(&mut r, n)).unwrap();
            let cfg = SolverConfig::new(Method::Bcdg).max_iters(50_000).window(1000).seed(seed);
            let t = solvers::run(&p, &cfg, &x0).unwrap();
            t.final_x.iter().all(|v| (v.abs() - 1.0).abs() <= 1e-6)
        })
        .collect();
    let dcpb2_ok = dcpb2.iter().filter(|&&b| b).count();
    let ok = sit_active == 50 && sit_ok == 50 && dcpb1_ok == 50 && dcpb2_ok == 50;
    outcome(
        ok,
        format!("(a) {sit_ok}/50 sparse and balanced ({sit_active} in regime); (b) {dcpb1_ok}/50 at ±1; (c) {dcpb2_ok}/50 binary"),
    )
}

fn criterion_8() -> Outcome {
    let gaps: Vec<f64> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let (p, x0) = sit_instance(30, 12, 0.0, 3, 1e-4, 8000 + seed);
            let cfg = |m| SolverConfig::new(m).max_iters(100_000).tol(1e-13).window(500).seed(seed);
            let g = solvers::run(&p, &cfg(Method::Bcdg), &x0).unwrap().final_objective();
            let l = solvers::run(&p, &cfg(Method::Bcdl(2)), &x0).unwrap().final_objective();
            (g - l).abs()
        })
        .collect();
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    let within = gaps.iter().filter(|&&g| g <= 1e-5).count();
    outcome(within == 50, format!("{within}/50 within 1e-5; max gap {worst:.1e}"))
}

fn criterion_9() -> Outcome {
    let lambdas = [1.0, 10.0, 100.0, 1e3, 1e4];
    let trials = 20u64;
    let stats: Vec<(f64, f64)> = lambdas
        .par_iter()
        .map(|&lambda| {
            let vals: Vec<f64> = (0..trials)
                .map(|seed| {
                    // Same data for every λ; the start varies by trial.
                    let (p, _) = sit_instance(40, 20, lambda, 5, 1e-4, 9000);
                    let x0 = FeasibleSet::Simplex.project(&common::randn_vec(&mut rng(9100 + seed), 20).abs()).unwrap();
                    let cfg = SolverConfig::new(Method::Bcdg).max_iters(50_000).seed(seed);
                    let t = solvers::run(&p, &cfg, &x0).unwrap();
                    p.penalty_form_objective(&t.final_x)
                })
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64;
            (mean, var)
        })
        .collect();
    let n = trials as f64;
    let mut ok = true;
    for w in stats.windows(2) {
        let pooled_se = ((w[0].1 + w[1].1) / 2.0 * (2.0 / n)).sqrt();
        if w[1].0 < w[0].0 - pooled_se {
            ok = false;
        }
    }
    let means: Vec<String> = stats.iter().map(|s| format!("{:.4}", s.0)).collect();
    outcome(ok, format!("mean penalty-form objective across λ: [{}]", means.join(", ")))
}

fn criterion_10(suite_start: Instant) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
family = "sit"
methods = ["bcd-g", "psg", "mscr", "pdca"]
trials = 3
seed = 10

[dataset]
kind = "synthetic"
m = 40
n = 20
seed = 10

[grid]
lambda = [1.0, 10.0, 100.0, 1000.0, 10000.0]
s = [5]

[solver]
max_iters = 1000
probe = "sampled:50"
"#;
    let spec = ExperimentSpec::from_toml(text, dir.path()).unwrap();
    let run = |name: &str, jobs: usize| {
        let out = dir.path().join(name);
        run_experiment(&spec, &RunOptions { jobs: Some(jobs), out_dir: Some(out.clone()), seed: None }).unwrap();
        std::fs::read(out.join("summary.csv")).unwrap()
    };
    let a = run("first", 4);
    let b = run("second", 1);
    let secs = suite_start.elapsed().as_secs_f64();
    let ok = a == b && secs < 900.0;
    outcome(ok, format!("summary.csv identical across re-runs: {}; suite time {secs:.1}s", a == b))
}

fn main() {
    let suite_start = Instant::now();
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("subsolver oracle equivalence", criterion_1),
        ("quartic roots vs oracle", criterion_2),
        ("sufficient decrease", criterion_3),
        ("random-block identities", criterion_4),
        ("optimality hierarchy trend", criterion_5),
        ("hybrid escape", criterion_6),
        ("geometry exactness", criterion_7),
        ("local/greedy parity at λ = 0", criterion_8),
        ("λ-sweep monotone trend", criterion_9),
    ];
    let mut all_ok = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        all_ok &= o.passed;
        println!("criterion {:>2} [{}] {name}: {}", i + 1, if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    let o = criterion_10(suite_start);
    all_ok &= o.passed;
    println!("criterion 10 [{}] reproducibility: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    if !all_ok {
        std::process::exit(1);
    }
}
