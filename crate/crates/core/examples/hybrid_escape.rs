//! PDCA converges to a critical point; block coordinate descent started
//! there can still move, since coordinate-wise stationarity is stronger.
//!
//! cargo run --release --example hybrid_escape

use nonsep_bcd::bench::{gen_randn, initial_point};
use nonsep_bcd::diagnostics::{probe_cws, ProbeMode};
use nonsep_bcd::model::ProblemInstance;
use nonsep_bcd::solvers::{hybrid_run, Method, SolverConfig};

fn main() -> nonsep_bcd::Result<()> {
    let n = 15;
    let a = gen_randn(50, n, 21);
    let y = a.column_mean();
    let p = ProblemInstance::sit(a, y, 50.0, 3, 1e-4)?;
    let x0 = initial_point(&p.feasible_set(), n, 8).expect("simplex start");

    let pdca = SolverConfig::new(Method::Pdca).max_iters(2000);
    let bcd = SolverConfig::new(Method::Bcdg).max_iters(20_000).seed(4);
    let (first, second) = hybrid_run(&pdca, &bcd, &p, &x0)?;

    let before = probe_cws(&p, &first.final_x, 2, ProbeMode::Exhaustive)?;
    let after = probe_cws(&p, &second.final_x, 2, ProbeMode::Exhaustive)?;
    println!("PDCA  : objective {:.8}  best pair decrease {:.3e}", first.final_objective(), before.worst_improvement);
    println!("+BCD  : objective {:.8}  best pair decrease {:.3e}", second.final_objective(), after.worst_improvement);
    println!("BCD iterations after hand-off: {}", second.iterations());
    Ok(())
}
