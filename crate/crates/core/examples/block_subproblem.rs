//! One exact pair update by hand: the gradient and curvature at x, the step
//! the family's breakpoint solver returns, and the resulting objective
//! change.
//!
//! cargo run --example block_subproblem

use nalgebra::DVector;
use nonsep_bcd::bench::gen_randn;
use nonsep_bcd::model::{ProblemInstance, Shift};
use nonsep_bcd::subsolvers::solve_block;

fn main() -> nonsep_bcd::Result<()> {
    let a = gen_randn(8, 4, 3);
    let p = ProblemInstance::nnspca(a, 2.0, 2, Shift::Auto, 0.1)?;
    let x = DVector::from_element(4, 0.5);
    let qbar = p.curvature();
    let grad = p.eval_gradient_f(&x);

    for block in [[0, 1], [1, 3], [2, 3]] {
        let step = solve_block(&p, &qbar, &x, &grad, &block)?;
        let mut next = x.clone();
        step.apply(&mut next);
        println!(
            "block {block:?}: d = {:.4?}  model change {:.5}  objective {:.5} -> {:.5}  ({} candidates)",
            step.d,
            step.objective_delta,
            p.objective(&x),
            p.objective(&next),
            step.candidates_evaluated
        );
    }
    Ok(())
}
