//! The two box-plus-hyperplane relaxations of binary least squares: a
//! concave-shifted quadratic and a negative ℓ₂ penalty. Both are solved by
//! block coordinate descent and checked for binary / extreme-point
//! solutions.
//!
//! cargo run --release --example binary_programs

use nonsep_bcd::bench::{gen_randn, initial_point};
use nonsep_bcd::diagnostics::{check_dcpb2_exactness, check_extreme_point};
use nonsep_bcd::model::{ProblemInstance, Shift};
use nonsep_bcd::solvers::{self, Method, SolverConfig};

fn main() -> nonsep_bcd::Result<()> {
    let (m, n) = (30, 12);
    let a = gen_randn(m, n, 4);
    let y = a.column_sum() * 0.1;
    let c = 2.0;
    let cfg = SolverConfig::new(Method::Bcdg).max_iters(20_000).seed(1);

    // Auto picks the smallest shift that makes the quadratic concave.
    let p1 = ProblemInstance::dcpb1(a.clone(), y.clone(), c, Shift::Auto, 1e-4)?;
    let x0 = initial_point(&p1.feasible_set(), n, 3).expect("box start");
    let t1 = solvers::run(&p1, &cfg, &x0)?;
    println!("shifted quadratic: objective {:.6}", t1.final_objective());
    println!("  x = {:.3?}", t1.final_x.as_slice());
    println!("  extreme point: {}", check_extreme_point(&t1.final_x, 1e-6));

    for lambda in [1.0, 1e3] {
        let p2 = ProblemInstance::dcpb2(a.clone(), y.clone(), lambda, c, 1e-4)?;
        let t2 = solvers::run(&p2, &cfg, &x0)?;
        let r = check_dcpb2_exactness(&p2, p2.curvature().matrix(), &t2.final_x, 1e-6);
        println!(
            "norm penalty λ={lambda:<6}: objective {:>12.4}  regime {:?}  passed {}",
            t2.final_objective(),
            r.regime,
            r.passed
        );
    }
    Ok(())
}
