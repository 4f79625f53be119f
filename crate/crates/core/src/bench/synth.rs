//! Seeded synthetic data.
//!
//! All randomness comes from ChaCha8 streams seeded with `seed_from_u64`;
//! normal variates use the ziggurat sampler of `rand_distr::StandardNormal`.
//! Both are portable, so a seed gives the same matrix on every platform.

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::BenchError;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// m×n matrix of i.i.d. standard normals, filled column by column.
pub fn gen_randn(m: usize, n: usize, seed: u64) -> DMatrix<f64> {
    randn_from(&mut rng(seed), m, n)
}

pub fn randn_from(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_iterator(m, n, (0..m * n).map(|_| StandardNormal.sample(rng)))
}

pub fn randn_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(rng)))
}

/// Sorted index sets of `m` rows and `n` columns drawn uniformly without
/// replacement.
pub fn subsample_indices(rows: usize, cols: usize, m: usize, n: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>), BenchError> {
    if m > rows || n > cols || m == 0 || n == 0 {
        return Err(BenchError::TooLarge { requested: (m, n), available: (rows, cols) });
    }
    let mut r = rng(seed);
    let mut ri = index::sample(&mut r, rows, m).into_vec();
    let mut ci = index::sample(&mut r, cols, n).into_vec();
    ri.sort_unstable();
    ci.sort_unstable();
    Ok((ri, ci))
}

/// Uniform random m×n submatrix (rows and columns kept in original order).
pub fn subsample(a: &DMatrix<f64>, m: usize, n: usize, seed: u64) -> Result<DMatrix<f64>, BenchError> {
    let (ri, ci) = subsample_indices(a.nrows(), a.ncols(), m, n, seed)?;
    Ok(a.select_rows(&ri).select_columns(&ci))
}

/// SplitMix64 finalizer, used to derive independent per-run seeds.
pub fn mix_seed(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
