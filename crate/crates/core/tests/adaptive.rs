//! End-to-end behaviour of the data-driven frequency choice.

use levycov::adapt::{adaptive_estimate_with, oracle_start_interval, select_in_range};
use levycov::estimator::evaluate_grid;
use levycov::harness::{reference_model, stats};
use levycov::{
    adaptive_estimate, oracle_start_empirical, simulate_increments, BalancingConfig, BoundParams, FrequencyGrid,
    IncrementSample, LevyModel, SelectionMethod, SimulationConfig,
};

fn sample(model: &LevyModel, n: usize, seed: u64) -> IncrementSample {
    simulate_increments(model, &SimulationConfig::new(n, seed).unwrap()).unwrap()
}

fn reference_grid() -> FrequencyGrid {
    FrequencyGrid::log_spaced(0.1, 50.0, 500).unwrap()
}

#[test]
fn jump_free_adaptive_estimate() {
    let model = LevyModel::gaussian([[2.0, 1.0], [1.0, 1.0]]).unwrap();
    let grid = reference_grid();
    let config = BalancingConfig::default();
    let values: Vec<f64> = (0..20)
        .map(|seed| {
            adaptive_estimate(&sample(&model, 1000, seed), &grid, &config)
                .unwrap()
                .selection
                .estimate
        })
        .collect();
    let avg = stats::mean(&values);
    assert!((avg - 1.0).abs() <= 0.2, "{avg}");
}

#[test]
fn oracle_start_scales_with_root_n() {
    let grid = reference_grid();
    for (r1, r2) in [(0.2, 0.1), (0.5, 1.5)] {
        let model = reference_model(r1, r2).unwrap();
        let ratios: Vec<f64> = (0..20)
            .map(|seed| {
                let small = oracle_start_empirical(&sample(&model, 1000, seed), &grid, 0.5).unwrap();
                let large = oracle_start_empirical(&sample(&model, 4000, seed), &grid, 0.5).unwrap();
                assert!(!small.saturated && !large.saturated);
                large.u_start / small.u_start
            })
            .collect();
        let avg = stats::mean(&ratios);
        assert!((1.6..=2.4).contains(&avg), "({r1}, {r2}): {avg}");
    }
}

#[test]
fn oracle_start_inside_bracket_with_jumps() {
    let model = reference_model(0.2, 0.1).unwrap();
    let grid = reference_grid();
    let (lo, hi) = oracle_start_interval(&model, 1000, &grid).unwrap();
    assert!(lo < hi);
    let step = grid.local_step(lo, hi);
    let starts: Vec<f64> = (0..20)
        .map(|seed| {
            oracle_start_empirical(&sample(&model, 1000, seed), &grid, 0.5)
                .unwrap()
                .u_start
        })
        .collect();
    let med = stats::median(&starts);
    assert!(med >= lo - step && med <= hi + step, "{med} vs [{lo}, {hi}]");
}

#[test]
fn selection_stays_in_admissible_range() {
    let model = reference_model(0.5, 1.5).unwrap();
    let grid = reference_grid();
    let config = BalancingConfig::default();
    for seed in 0..5 {
        let s = sample(&model, 1000, seed);
        for method in [
            SelectionMethod::Balancing,
            SelectionMethod::Lepskii1,
            SelectionMethod::Lepskii2,
        ] {
            let out = adaptive_estimate_with(&s, &grid, &config, method).unwrap();
            assert!(out.selection.u >= out.oracle.u_start);
            assert!((out.start..=out.end).contains(&out.selection.index));
            assert_eq!(out.selection.method, method);
            assert!(!out.selection.trace.is_empty() || out.start == out.end);
            assert!(out.curves.s_env[out.start..].windows(2).all(|w| w[1] >= w[0]));
        }
    }
}

#[test]
fn flipping_second_coordinate_negates_selection() {
    let model = reference_model(0.5, 1.5).unwrap();
    let grid = reference_grid();
    let config = BalancingConfig::default();
    let s = sample(&model, 1000, 4);
    let out = adaptive_estimate(&s, &grid, &config).unwrap();
    let flipped = evaluate_grid(&s.flip_second(), grid.points(), &config.bounds).unwrap();
    for (a, b) in out.points.iter().zip(&flipped) {
        assert_eq!(a.estimate.value, -b.estimate.value);
        assert_eq!(a.bound.value, b.bound.value);
    }
    for method in [
        SelectionMethod::Balancing,
        SelectionMethod::Lepskii1,
        SelectionMethod::Lepskii2,
    ] {
        let (orig, _) = select_in_range(&out.points, 1000, out.start, out.end, &config, method).unwrap();
        let (flip, _) = select_in_range(&flipped, 1000, out.start, out.end, &config, method).unwrap();
        assert_eq!(orig.index, flip.index);
        assert_eq!(orig.estimate, -flip.estimate);
    }
}

#[test]
fn larger_constant_never_lowers_selection() {
    let model = reference_model(0.5, 1.5).unwrap();
    let grid = reference_grid();
    for seed in 0..5 {
        let s = sample(&model, 1000, seed);
        for method in [SelectionMethod::Balancing, SelectionMethod::Lepskii1] {
            let index = |big_c: f64| {
                let config = BalancingConfig {
                    bounds: BoundParams {
                        big_c,
                        ..BoundParams::default()
                    },
                    ..BalancingConfig::default()
                };
                adaptive_estimate_with(&s, &grid, &config, method)
                    .unwrap()
                    .selection
                    .index
            };
            let indices: Vec<usize> = [0.001, 0.01, 0.1, 1.0, 10.0].iter().map(|&c| index(c)).collect();
            assert!(indices.windows(2).all(|w| w[1] >= w[0]), "{method:?}: {indices:?}");
        }
    }
}

#[test]
fn pipeline_independent_of_thread_count() {
    let model = reference_model(0.2, 0.1).unwrap();
    let s = sample(&model, 800, 21);
    let grid = reference_grid();
    let config = BalancingConfig::default();
    let a = adaptive_estimate(&s, &grid, &config).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| adaptive_estimate(&s, &grid, &config).unwrap());
    assert_eq!(a, b);
}
