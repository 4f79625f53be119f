//! The top-s norm ‖x‖_\[s\] and its subgradient.
//!
//! Ties in magnitude are broken by lower index, so the support is a
//! deterministic function of `x`.

/// Indices of `x` ordered by decreasing magnitude; equal magnitudes keep
/// index order (stable sort).
fn ranked(x: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[b].abs().total_cmp(&x[a].abs()));
    idx
}

/// Sum of the `s` largest entries of `x` in absolute value.
pub fn top_s_norm(x: &[f64], s: usize) -> f64 {
    let n = x.len();
    if s == 0 {
        return 0.0;
    }
    if s >= n {
        return x.iter().map(|v| v.abs()).sum();
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.select_nth_unstable_by(s - 1, |a, b| b.total_cmp(a));
    mags[..s].iter().sum()
}

/// Tie-broken top-`s` index set, in ascending index order.
pub fn top_s_support(x: &[f64], s: usize) -> Vec<usize> {
    let mut support: Vec<usize> = ranked(x).into_iter().take(s).collect();
    support.sort_unstable();
    support
}

/// A subgradient of ‖·‖_\[s\] at `x`: sign(x_i) on the support, 0 elsewhere
/// (including zero entries inside the support).
pub fn subgrad_top_s(x: &[f64], s: usize) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    for i in ranked(x).into_iter().take(s) {
        if x[i] != 0.0 {
            g[i] = x[i].signum();
        }
    }
    g
}

/// |x + d| − |x|, exact when x and x + d share a sign.
pub(crate) fn abs_change(x: f64, d: f64) -> f64 {
    let y = x + d;
    if x >= 0.0 && y >= 0.0 {
        d
    } else if x <= 0.0 && y <= 0.0 {
        -d
    } else {
        y.abs() - x.abs()
    }
}
