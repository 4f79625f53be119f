//! Working-set selection: cyclic sweeps, uniform sampling, and the two
//! semi-greedy pair rules that alternate random pairs with pairs chosen by an
//! optimality measure.

use std::str::FromStr;

use itertools::Itertools;
use nalgebra::DVector;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CurvatureMatrix;

/// Largest number of working sets `enumerate_working_sets` will produce.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;
/// Relative tolerance under which two scores count as tied.
const TIE_TOL: f64 = 1e-12;
/// Floor on pairwise curvature in the sparse-index-tracking measure.
const MIN_PAIR_CURVATURE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionKind {
    Cyclic,
    UniformRandom,
    SemiGreedySit,
    SemiGreedyNnspca,
}

impl SelectionKind {
    pub fn name(self) -> &'static str {
        match self {
            SelectionKind::Cyclic => "cyclic",
            SelectionKind::UniformRandom => "uniform_random",
            SelectionKind::SemiGreedySit => "semi_greedy_sit",
            SelectionKind::SemiGreedyNnspca => "semi_greedy_nnspca",
        }
    }
}

impl FromStr for SelectionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cyclic" => Ok(SelectionKind::Cyclic),
            "uniform_random" | "random" => Ok(SelectionKind::UniformRandom),
            "semi_greedy_sit" => Ok(SelectionKind::SemiGreedySit),
            "semi_greedy_nnspca" => Ok(SelectionKind::SemiGreedyNnspca),
            other => Err(Error::InvalidConfig(format!("unknown selection '{other}'"))),
        }
    }
}

/// Stateful working-set generator; one per solver run.
#[derive(Debug, Clone)]
pub struct SelectionStrategy {
    kind: SelectionKind,
    rng_seed: u64,
    cursor: usize,
    rng: ChaCha8Rng,
}

impl SelectionStrategy {
    pub fn new(kind: SelectionKind, rng_seed: u64) -> Self {
        Self {
            kind,
            rng_seed,
            cursor: 0,
            rng: ChaCha8Rng::seed_from_u64(rng_seed),
        }
    }

    /// Starts a cyclic sweep at a 0-based index.
    pub fn with_cursor(mut self, cursor: usize) -> Self {
        self.cursor = cursor;
        self
    }

    pub fn kind(&self) -> SelectionKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    /// Working set for iteration `t` (0-based). `g` is the composite
    /// subgradient at `x` and is only read by the semi-greedy kinds.
    pub fn next_working_set(
        &mut self,
        t: usize,
        x: &DVector<f64>,
        g: &DVector<f64>,
        l: &CurvatureMatrix,
        k: usize,
    ) -> Result<Vec<usize>> {
        let n = x.len();
        if k < 2 || k > n {
            return Err(Error::InvalidConfig(format!("working set size must satisfy 2 <= k <= n = {n}, got {k}")));
        }
        match self.kind {
            SelectionKind::Cyclic => {
                let start = self.cursor % n;
                self.cursor = (start + k) % n;
                Ok((0..k).map(|o| (start + o) % n).collect())
            }
            SelectionKind::UniformRandom => Ok(self.random_set(n, k)),
            SelectionKind::SemiGreedySit | SelectionKind::SemiGreedyNnspca if k != 2 => Err(Error::KMismatch(k)),
            _ if t % 2 == 1 => Ok(self.random_set(n, 2)),
            SelectionKind::SemiGreedySit => Ok(sit_greedy_pair(x, g, l)),
            SelectionKind::SemiGreedyNnspca => Ok(nnspca_greedy_pair(x, g)),
        }
    }

    fn random_set(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut set = index::sample(&mut self.rng, n, k).into_vec();
        set.sort_unstable();
        set
    }
}

/// Free-function form of [`SelectionStrategy::next_working_set`].
pub fn next_working_set(
    s: &mut SelectionStrategy,
    t: usize,
    x: &DVector<f64>,
    g: &DVector<f64>,
    l: &CurvatureMatrix,
    k: usize,
) -> Result<Vec<usize>> {
    s.next_working_set(t, x, g, l, k)
}

fn beats_max(candidate: f64, best: f64) -> bool {
    candidate > best + TIE_TOL * best.abs().max(1.0)
}

fn beats_min(candidate: f64, best: f64) -> bool {
    candidate < best - TIE_TOL * best.abs().max(1.0)
}

/// Index of the best score among `indices`; ties go to the earliest.
fn arg_best(indices: impl Iterator<Item = usize>, score: impl Fn(usize) -> f64, better: fn(f64, f64) -> bool) -> usize {
    let mut best: Option<(usize, f64)> = None;
    for r in indices {
        let s = score(r);
        match best {
            Some((_, b)) if !better(s, b) => {}
            _ => best = Some((r, s)),
        }
    }
    best.expect("at least two coordinates").0
}

/// j = argmin g; i maximizes √L_ij · min((g_i − g_j)/L_ij, x_i) over i ≠ j,
/// where L_ij is the pairwise curvature.
fn sit_greedy_pair(x: &DVector<f64>, g: &DVector<f64>, l: &CurvatureMatrix) -> Vec<usize> {
    let n = x.len();
    let j = arg_best(0..n, |r| g[r], beats_min);
    let measure = |i: usize| {
        let lij = l.alpha(i, j).max(MIN_PAIR_CURVATURE);
        lij.sqrt() * ((g[i] - g[j]) / lij).min(x[i])
    };
    let i = arg_best((0..n).filter(|&r| r != j), measure, beats_max);
    vec![i, j]
}

/// With s = ⟨x, g⟩ and z_r = |g_r x_r − s x_r²|: i = argmax z, j = argmin z
/// over r ≠ i.
fn nnspca_greedy_pair(x: &DVector<f64>, g: &DVector<f64>) -> Vec<usize> {
    let n = x.len();
    let s = x.dot(g);
    let z = |r: usize| (g[r] * x[r] - s * x[r] * x[r]).abs();
    let i = arg_best(0..n, z, beats_max);
    let j = arg_best((0..n).filter(|&r| r != i), z, beats_min);
    vec![i, j]
}

/// C(n, k), saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for step in 0..k {
        acc = acc * (n - step) as u128 / (step + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// All k-subsets of {0, …, n−1} in lexicographic order.
pub fn enumerate_working_sets(n: usize, k: usize) -> Result<Vec<Vec<usize>>> {
    if k < 1 || k > n {
        return Err(Error::InvalidConfig(format!("enumeration needs 1 <= k <= n, got n = {n}, k = {k}")));
    }
    if binomial(n, k) > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { n, k, limit: ENUMERATION_LIMIT });
    }
    Ok((0..n).combinations(k).collect())
}
