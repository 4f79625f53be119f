mod common;

use common::{random_case, random_feasible, rng};
use nalgebra::{DMatrix, DVector};
use nonsep_bcd::model::{curvature_alpha, top_s_norm, CurvatureMatrix, Family, FeasibleSet};
use proptest::prelude::*;

fn vec_strategy(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    n.prop_flat_map(|n| prop::collection::vec(-5.0f64..5.0, n))
}

fn set_strategy() -> impl Strategy<Value = (FeasibleSet, Vec<f64>)> {
    vec_strategy(2..=9).prop_flat_map(|v| {
        let n = v.len() as f64;
        let sets = prop_oneof![
            Just(FeasibleSet::Simplex),
            Just(FeasibleSet::NonnegSphere),
            (-n..=n).prop_map(|c| FeasibleSet::BoxHyperplane { c }),
        ];
        (sets, Just(v))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn projection_is_idempotent((set, v) in set_strategy()) {
        let x = DVector::from_vec(v);
        prop_assume!(set != FeasibleSet::NonnegSphere || x.iter().any(|&t| t > 0.0));
        let p1 = set.project(&x).unwrap();
        let p2 = set.project(&p1).unwrap();
        prop_assert!((&p1 - &p2).amax() <= 1e-10);
        prop_assert!(set.residual(&p1) <= 1e-9);
    }

    #[test]
    fn top_s_at_full_size_is_l1(v in vec_strategy(1..=10)) {
        let l1: f64 = v.iter().map(|t| t.abs()).sum();
        prop_assert!((top_s_norm(&v, v.len()) - l1).abs() <= 1e-12 * (1.0 + l1));
    }

    #[test]
    fn top_s_is_permutation_invariant(v in vec_strategy(1..=10), s in 1usize..10, seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut w = v.clone();
        w.shuffle(&mut rng(seed));
        prop_assert!((top_s_norm(&v, s) - top_s_norm(&w, s)).abs() <= 1e-12 * (1.0 + top_s_norm(&v, s)));
    }

    /// ‖x‖₁ − ‖x‖_[s] vanishes exactly on s-sparse vectors.
    #[test]
    fn dc_identity_on_sparse_vectors(v in vec_strategy(2..=10), s in 1usize..10) {
        let s = s.min(v.len());
        let mut x = v.clone();
        for t in x.iter_mut().skip(s) {
            *t = 0.0;
        }
        let l1: f64 = x.iter().map(|t| t.abs()).sum();
        prop_assert!((l1 - top_s_norm(&x, s)).abs() <= 1e-12 * (1.0 + l1));
    }

    #[test]
    fn alpha_is_the_pair_quadratic_form(n in 2usize..8, seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = common::randn(&mut r, n, n);
        let q = CurvatureMatrix::new(&g + g.transpose()).unwrap();
        for i in 0..n {
            for j in 0..n {
                if i == j { continue; }
                let mut e = DVector::zeros(n);
                e[i] = 1.0;
                e[j] = -1.0;
                let dense = (e.transpose() * q.matrix() * &e)[(0, 0)];
                prop_assert!((curvature_alpha(&q, i, j) - dense).abs() <= 1e-12 * (1.0 + dense.abs()));
            }
        }
    }

    #[test]
    fn objective_is_finite_on_feasible_points(fam in 0usize..4, seed in any::<u64>()) {
        let family = [Family::Sit, Family::Nnspca, Family::Dcpb1, Family::Dcpb2][fam];
        let case = random_case(family, seed);
        let f = case.p.eval_objective(&case.x).unwrap();
        prop_assert!(f.is_finite());
        prop_assert_eq!(f, case.p.objective(&case.x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// No feasible point is closer than the projection.
    #[test]
    fn projection_minimizes_distance((set, v) in set_strategy(), seed in any::<u64>()) {
        let x = DVector::from_vec(v);
        prop_assume!(set != FeasibleSet::NonnegSphere || x.iter().any(|&t| t > 0.0));
        let px = set.project(&x).unwrap();
        let best = (&x - &px).norm();
        let mut r = rng(seed);
        for _ in 0..200 {
            let z = random_feasible(&set, x.len(), &mut r);
            prop_assert!(best <= (&x - &z).norm() + 1e-8);
        }
    }
}

#[test]
fn points_outside_the_separable_part_are_rejected() {
    let case = random_case(Family::Sit, 1);
    let mut off = case.x.clone();
    off[0] = -0.1;
    assert!(case.p.eval_objective(&off).is_err());
    let case = random_case(Family::Dcpb2, 1);
    let mut off = case.x.clone();
    off[0] = 1.5;
    assert!(case.p.eval_objective(&off).is_err());
}

#[test]
fn curvature_rejects_asymmetric_matrices() {
    let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
    assert!(CurvatureMatrix::new(m).is_err());
}
