//! Nonnegative sparse PCA on the unit sphere, with the semi-greedy
//! working-set rule against uniform sampling.
//!
//! cargo run --release --example nonnegative_sparse_pca

use nonsep_bcd::bench::{gen_randn, initial_point};
use nonsep_bcd::model::{ProblemInstance, Shift};
use nonsep_bcd::selection::SelectionKind;
use nonsep_bcd::solvers::{self, Method, SolverConfig};

fn main() -> nonsep_bcd::Result<()> {
    let (m, n, s) = (40, 25, 5);
    let a = gen_randn(m, n, 11);
    let p = ProblemInstance::nnspca(a, 10.0, s, Shift::Auto, 1e-4)?;
    let x0 = initial_point(&p.feasible_set(), n, 2).expect("sphere start");

    for selection in [SelectionKind::UniformRandom, SelectionKind::Cyclic, SelectionKind::SemiGreedyNnspca] {
        let cfg = SolverConfig::new(Method::Bcdg).max_iters(50_000).window(1000).selection(selection).seed(5);
        let trace = solvers::run(&p, &cfg, &x0)?;
        let x = &trace.final_x;
        let mut support: Vec<usize> = (0..n).filter(|&i| x[i] > 1e-8).collect();
        support.sort_by(|&i, &j| x[j].total_cmp(&x[i]));
        println!(
            "{:>18}: objective {:>12.6}  iters {:>4}  largest loadings {:?}",
            selection.name(),
            trace.final_objective(),
            trace.iterations(),
            &support[..support.len().min(s)]
        );
    }
    Ok(())
}
