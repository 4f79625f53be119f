//! The random-block expectation identities and curvature bounds, checked by
//! enumerating every working set.
//!
//! cargo run --example expectation_identities

use nonsep_bcd::bench::gen_randn;
use nonsep_bcd::diagnostics::{check_curvature_bounds, verify_lemma7_identities};

fn main() -> nonsep_bcd::Result<()> {
    for (n, k) in [(4, 2), (6, 3), (8, 2)] {
        let r = verify_lemma7_identities(n, k, 50, 1)?;
        println!(
            "n={n} k={k}: max relative gaps {:.1e} {:.1e} {:.1e} {:.1e}  passed {}",
            r.inner_product, r.lifted_inner_product, r.squared_norm, r.separable, r.passed
        );
        let g = gen_randn(n, n, 2);
        let q = &g * g.transpose();
        let b = check_curvature_bounds(&q, k, 1e-4)?;
        println!(
            "         curvature in [{:.4}, {:.4}] within [{:.4}, {:.4}]: {}",
            b.min_eigenvalue, b.max_eigenvalue, b.lower_constant, b.upper_constant, b.holds
        );
    }
    Ok(())
}
