mod common;

use std::collections::HashMap;

use common::{random_case, rng};
use nalgebra::{DMatrix, DVector};
use nonsep_bcd::model::{CurvatureMatrix, Family};
use nonsep_bcd::selection::{binomial, SelectionKind, SelectionStrategy};
use proptest::prelude::*;

fn draws(kind: SelectionKind, seed: u64, count: usize, n: usize, k: usize) -> Vec<Vec<usize>> {
    let x = DVector::from_element(n, 1.0 / n as f64);
    let g = DVector::zeros(n);
    let l = CurvatureMatrix::new(DMatrix::identity(n, n)).unwrap();
    let mut s = SelectionStrategy::new(kind, seed);
    (0..count).map(|t| s.next_working_set(t, &x, &g, &l, k).unwrap()).collect()
}

#[test]
fn uniform_pairs_are_equally_likely() {
    let (n, k, count) = (6, 2, 100_000);
    let mut freq: HashMap<Vec<usize>, usize> = HashMap::new();
    for set in draws(SelectionKind::UniformRandom, 17, count, n, k) {
        *freq.entry(set).or_default() += 1;
    }
    let pairs = binomial(n, k) as usize;
    assert_eq!(freq.len(), pairs);
    let expected = count as f64 / pairs as f64;
    for (set, &c) in &freq {
        assert!((c as f64 - expected).abs() <= 0.15 * expected, "{set:?}: {c} vs {expected}");
    }
}

#[test]
fn cyclic_walks_consecutive_windows() {
    let sets = draws(SelectionKind::Cyclic, 0, 4, 5, 2);
    assert_eq!(sets, vec![vec![0, 1], vec![2, 3], vec![4, 0], vec![1, 2]]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn seeded_uniform_selection_is_reproducible(seed in any::<u64>(), n in 2usize..12, k in 2usize..6) {
        prop_assume!(k <= n);
        prop_assert_eq!(draws(SelectionKind::UniformRandom, seed, 50, n, k), draws(SelectionKind::UniformRandom, seed, 50, n, k));
        for set in draws(SelectionKind::UniformRandom, seed, 50, n, k) {
            prop_assert_eq!(set.len(), k);
            prop_assert!(set.windows(2).all(|w| w[0] < w[1]) && set[k - 1] < n);
        }
    }

    /// Greedy picks on even iterations depend on (x, g, L) only, and do not
    /// change when the gradient and curvature scale by a common factor.
    #[test]
    fn greedy_pairs_are_scale_invariant(seed in any::<u64>(), scale in 0.01f64..100.0) {
        let case = random_case(Family::Sit, seed);
        let mut r = rng(seed);
        let g = common::randn_vec(&mut r, case.p.n());
        let l = case.p.curvature();
        let scaled_l = CurvatureMatrix::new(l.matrix() * scale).unwrap();
        for (kind, x) in [
            (SelectionKind::SemiGreedySit, case.x.clone()),
            (SelectionKind::SemiGreedyNnspca, case.x.map(f64::abs)),
        ] {
            let a = SelectionStrategy::new(kind, 1).next_working_set(0, &x, &g, &l, 2).unwrap();
            let b = SelectionStrategy::new(kind, 99).next_working_set(0, &x, &(&g * scale), &scaled_l, 2).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert!(a.len() == 2 && a[0] != a[1]);
        }
    }
}
