//! Real roots of quartics, including a double root and a degree drop.
//!
//! cargo run --example quartic_roots

use nonsep_bcd::polyroots::{nonneg_roots, solve_real};

fn main() -> nonsep_bcd::Result<()> {
    let cases = [
        ("(x−1)(x−2)(x+3)(x−4)", [1.0, -4.0, -7.0, 34.0, -24.0]),
        ("(x²−2)²", [1.0, 0.0, -4.0, 0.0, 4.0]),
        ("x⁴ + 1", [1.0, 0.0, 0.0, 0.0, 1.0]),
        ("2x² − 3x − 2 (leading zeros)", [0.0, 0.0, 2.0, -3.0, -2.0]),
    ];
    for (label, [c4, c3, c2, c1, c0]) in cases {
        let rs = solve_real(c4, c3, c2, c1, c0)?;
        println!(
            "{label:<30} degree {}  roots {:?}  nonneg {:?}  |p| ≤ {:.1e}",
            rs.degree(),
            rs.roots(),
            nonneg_roots(&rs),
            rs.residual_bound()
        );
    }
    Ok(())
}
