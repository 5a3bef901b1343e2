mod common;

use careerpath_core::evaluation::{
    exact_p_value, normal_p_value, signed_ranks, wilcoxon_signed_rank, WilcoxonMethod,
};
use common::{naive_ranks, wilcoxon_enumeration};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small integer-valued samples so ties and zero differences are common.
fn fixture(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    let x = (0..n).map(|_| rng.random_range(-6..=6) as f64).collect();
    let y = (0..n).map(|_| rng.random_range(-6..=6) as f64).collect();
    (x, y)
}

#[test]
fn exact_mode_matches_sign_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for n in 1..=10 {
        for _ in 0..40 {
            let (x, y) = fixture(&mut rng, n);
            let r = wilcoxon_signed_rank(&x, &y).unwrap();
            let oracle = wilcoxon_enumeration(&x, &y);
            assert!(
                (r.p_value - oracle).abs() < 1e-12,
                "n={n} {x:?} {y:?}: {} vs {oracle}",
                r.p_value
            );
        }
    }
}

#[test]
fn exact_mode_matches_enumeration_at_the_regime_boundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    for _ in 0..3 {
        let x: Vec<f64> = (0..20).map(|_| rng.random_range(-10.0..10.0)).collect();
        let y: Vec<f64> = (0..20).map(|_| rng.random_range(-9.0..11.0)).collect();
        let r = wilcoxon_signed_rank(&x, &y).unwrap();
        assert_eq!(r.method, WilcoxonMethod::Exact);
        assert!((r.p_value - wilcoxon_enumeration(&x, &y)).abs() < 1e-12);
    }
}

#[test]
fn three_positive_differences() {
    let r = wilcoxon_signed_rank(&[1.0, 2.0, 3.0], &[0.0; 3]).unwrap();
    assert!((r.p_value - 0.25).abs() < 1e-15);
    assert!((wilcoxon_enumeration(&[1.0, 2.0, 3.0], &[0.0; 3]) - 0.25).abs() < 1e-15);
}

#[test]
fn normal_approximation_tracks_the_exact_distribution() {
    // n = 30 is past the exact cutoff; the subset-sum distribution still runs
    // there and is itself checked against full enumeration on the first 15.
    // Without a continuity correction the approximation is off by up to
    // about 0.015 near the centre at this size.
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for _ in 0..20 {
        let x: Vec<f64> = (0..30).map(|_| rng.random_range(-10.0..10.0)).collect();
        let y: Vec<f64> = (0..30).map(|_| rng.random_range(-9.0..11.0)).collect();
        let r = wilcoxon_signed_rank(&x, &y).unwrap();
        assert_eq!(r.method, WilcoxonMethod::Normal);
        let diffs: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let ranks: Vec<f64> = signed_ranks(&diffs).iter().map(|(r, _)| *r).collect();
        let exact = exact_p_value(&ranks, r.w_plus);
        assert!(
            (r.p_value - exact).abs() < 0.02,
            "normal {} exact {exact}",
            r.p_value
        );
        assert_eq!(normal_p_value(&ranks, r.w_plus), r.p_value);

        let head = wilcoxon_signed_rank(&x[..15], &y[..15]).unwrap();
        assert!((head.p_value - wilcoxon_enumeration(&x[..15], &y[..15])).abs() < 1e-12);
    }
}

#[test]
fn ranks_match_pairwise_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let d: Vec<f64> = (0..25)
            .map(|_| rng.random_range(1..=8) as f64 * if rng.random_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let fast: Vec<f64> = signed_ranks(&d).iter().map(|(r, _)| *r).collect();
        assert_eq!(fast, naive_ranks(&d));
    }
}

#[test]
fn identical_samples_give_p_one() {
    let x = [3.0, 1.5, -2.0, 8.0];
    assert_eq!(wilcoxon_signed_rank(&x, &x).unwrap().p_value, 1.0);
    let long: Vec<f64> = (0..100).map(|i| i as f64).collect();
    assert_eq!(wilcoxon_signed_rank(&long, &long).unwrap().p_value, 1.0);
}

proptest! {
    #[test]
    fn symmetric_and_bounded(pairs in prop::collection::vec((-20i32..20, -20i32..20), 1..60)) {
        let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
        let y: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
        let a = wilcoxon_signed_rank(&x, &y).unwrap();
        let b = wilcoxon_signed_rank(&y, &x).unwrap();
        prop_assert_eq!(a.p_value, b.p_value);
        prop_assert_eq!(a.statistic, b.statistic);
        prop_assert!((0.0..=1.0).contains(&a.p_value));
    }
}
