//! Coordinate-wise stationarity: probe every pair (or a sample of pairs) for
//! an improving block step, before and after a solve.
//!
//! cargo run --release --example cws_probe

use nonsep_bcd::bench::{gen_randn, initial_point};
use nonsep_bcd::diagnostics::{probe_cws, residual_r, ProbeMode};
use nonsep_bcd::model::ProblemInstance;
use nonsep_bcd::solvers::{self, Method, SolverConfig};

fn main() -> nonsep_bcd::Result<()> {
    let n = 10;
    let a = gen_randn(30, n, 5);
    let y = a.column_sum() * 0.2;
    let p = ProblemInstance::dcpb2(a, y, 5.0, 0.0, 1e-4)?;
    let x0 = initial_point(&p.feasible_set(), n, 1).expect("box start");

    let trace = solvers::run(&p, &SolverConfig::new(Method::Bcdg).max_iters(50_000).window(500).seed(2), &x0)?;
    for (label, x) in [("start", &x0), ("solved", &trace.final_x)] {
        let full = probe_cws(&p, x, 2, ProbeMode::Exhaustive)?;
        let sampled = probe_cws(&p, x, 2, ProbeMode::Sampled { count: 20, seed: 9 })?;
        println!(
            "{label:>6}: cws={} worst pair {:?} decrease {:.3e} (sampled {:.3e})  R(x)={:.3e}",
            full.is_cws,
            full.worst_block,
            full.worst_improvement,
            sampled.worst_improvement,
            residual_r(&p, x, 2)?
        );
    }
    Ok(())
}
