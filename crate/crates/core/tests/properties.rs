//! Property tests over randomly generated samples.

use std::sync::Arc;

use fdepth::depth::{depth_fd, depth_id, depth_mbd, depth_sample, depth_sd, DepthConfig, DepthMethod, FittedDepth};
use fdepth::functional::{FunctionalSample, Grid};
use fdepth::tasks::{kw_test, rank_by_depth};
use proptest::prelude::*;

fn sample_strategy(max_n: usize, max_t: usize) -> impl Strategy<Value = FunctionalSample> {
    (2..=max_n, 2..=max_t).prop_flat_map(|(n, t)| {
        prop::collection::vec(prop::collection::vec(-5.0..5.0f64, t), n).prop_map(move |rows| {
            let grid: Arc<Grid> = Grid::uniform(t).unwrap();
            FunctionalSample::from_rows(&grid, rows).unwrap()
        })
    })
}

fn small_config(u: f64, seed: u64) -> DepthConfig {
    DepthConfig { u, beta_directions: 100, pool_directions: 200, seed, rejection_cap: 1000 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn baseline_depths_are_bounded_and_ordered(sample in sample_strategy(15, 12)) {
        for x in sample.curves() {
            let fd = depth_fd(x, &sample).unwrap();
            let id = depth_id(x, &sample).unwrap();
            prop_assert!((0.0..=1.0).contains(&fd));
            prop_assert!(id <= fd);
            // A sample curve always lies in its own pair bands and halfspaces.
            prop_assert!(id >= 1.0 / sample.len() as f64);
            prop_assert!((0.0..=1.0).contains(&depth_mbd(x, &sample).unwrap()));
            prop_assert!((0.0..=1.0).contains(&depth_sd(x, &sample).unwrap()));
        }
    }

    #[test]
    fn baseline_depths_are_permutation_invariant(sample in sample_strategy(12, 8), shift in 1usize..11) {
        let k = shift % sample.len();
        let mut curves = sample.curves().to_vec();
        curves.rotate_left(k);
        let permuted = FunctionalSample::new(curves).unwrap();
        for method in [DepthMethod::Fd, DepthMethod::Id, DepthMethod::Mbd, DepthMethod::Sd] {
            let config = DepthConfig::default();
            let mut a = depth_sample(&sample, method, &config).unwrap().values;
            let b = depth_sample(&permuted, method, &config).unwrap().values;
            a.rotate_left(k);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12, "{method}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn rpd_is_bounded_and_reproducible(sample in sample_strategy(20, 10), seed in any::<u64>(), k in 0usize..3) {
        let u = [0.0, 0.1, 0.5][k];
        let method = DepthMethod::Rpd { u };
        let a = depth_sample(&sample, method, &small_config(u, seed)).unwrap();
        let b = depth_sample(&sample, method, &small_config(u, seed)).unwrap();
        prop_assert_eq!(&a.values, &b.values);
        prop_assert!(a.values.iter().all(|d| *d > 0.0 && *d <= 1.0));
    }

    #[test]
    fn sample_depths_agree_with_fitted_queries(sample in sample_strategy(15, 8), seed in any::<u64>()) {
        for method in [DepthMethod::Rpd { u: 0.1 }, DepthMethod::Fd, DepthMethod::Mbd, DepthMethod::Sd] {
            let config = small_config(0.1, seed);
            let batch = depth_sample(&sample, method, &config).unwrap().values;
            let fitted = FittedDepth::fit(&sample, method, &config).unwrap().depths(sample.curves()).unwrap();
            for (x, y) in batch.iter().zip(&fitted) {
                prop_assert!((x - y).abs() < 1e-12, "{method}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn kw_statistic_depends_only_on_ranks(values in prop::collection::vec(-1e3..1e3f64, 6..30)) {
        let half = values.len() / 2;
        let sizes = [half, values.len() - half];
        let ranks = rank_by_depth(&values);
        match (kw_test(&values, &sizes), kw_test(&ranks, &sizes)) {
            (Ok(a), Ok(b)) => prop_assert!((a.statistic - b.statistic).abs() < 1e-9),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }
}
