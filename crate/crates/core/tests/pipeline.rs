//! End-to-end runs over the whole pipeline: split, normalize, query, refit.

use std::sync::Arc;

use epis_core::{
    make_protocol_splits, run_active_learning, Dataset, LearnerConfig, LogRegParams, Normalizer,
    Strategy, SupportTable, TreeParams,
};

/// Two overlapping Gaussian-ish blobs, deterministic, with label noise near
/// the boundary so both kinds of uncertainty show up.
fn noisy_blobs(n: usize) -> Dataset {
    let mut state = 0x2498_10ab_513f_77u64;
    let mut unit = move || {
        // xorshift keeps the fixture free of any crate randomness.
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = u8::from(i % 2 == 0);
        let c = if label == 1 { 0.65 } else { 0.35 };
        let x0 = c + 0.35 * (unit() - 0.5);
        let x1 = c + 0.35 * (unit() - 0.5);
        // Flip a sliver of labels near the midline.
        let flip = (x0 - 0.5).abs() < 0.05 && unit() < 0.4;
        features.push(vec![x0, x1]);
        labels.push(if flip { 1 - label } else { label });
    }
    Dataset::new(features, labels).unwrap()
}

fn normalized_for(data: &Dataset, split: &epis_core::ProtocolSplit) -> Vec<Vec<f64>> {
    let fit_rows: Vec<usize> = split.train.iter().chain(&split.pool).copied().collect();
    let norm = Normalizer::fit(data, &fit_rows).unwrap();
    norm.apply_all(data).unwrap()
}

#[test]
fn every_strategy_completes_on_every_learner() {
    let data = noisy_blobs(140);
    let splits = make_protocol_splits(&data, 10, 0.1, 0.6, 42).unwrap();
    let table = Arc::new(SupportTable::new());
    let learners = [
        LearnerConfig::Parzen { k: None },
        LearnerConfig::Tree(TreeParams::default()),
        LearnerConfig::LogReg(LogRegParams { gamma: 1.0, grid: 5 }),
    ];
    let split = &splits[0];
    let x = normalized_for(&data, split);
    let budget = 8;
    for learner in &learners {
        let mut initial = Vec::new();
        for strategy in Strategy::ALL {
            let curve = run_active_learning(
                &x,
                data.labels(),
                split,
                learner,
                strategy,
                budget,
                0.1,
                7,
                &table,
            )
            .unwrap();
            assert_eq!(curve.accuracies.len(), budget + 1);
            assert_eq!(curve.queried_rows.len(), budget);
            assert!(curve.accuracies.iter().all(|a| (0.0..=1.0).contains(a)));
            // Queries must come from the pool, without repeats.
            let mut rows = curve.queried_rows.clone();
            rows.sort_unstable();
            rows.dedup();
            assert_eq!(rows.len(), budget, "a row was queried twice");
            assert!(rows.iter().all(|r| split.pool.contains(r)));
            initial.push(curve.accuracies[0]);
        }
        // Before any query every strategy holds the same model.
        assert!(
            initial.windows(2).all(|w| w[0] == w[1]),
            "initial accuracies differ for {}: {initial:?}",
            learner.name()
        );
    }
}

#[test]
fn whole_experiment_is_reproducible() {
    let data = noisy_blobs(120);
    let splits = make_protocol_splits(&data, 10, 0.1, 0.6, 9).unwrap();
    let run_all = || {
        let table = Arc::new(SupportTable::new());
        let mut out = Vec::new();
        for split in splits.iter().take(3) {
            let x = normalized_for(&data, split);
            for strategy in Strategy::ALL {
                let curve = run_active_learning(
                    &x,
                    data.labels(),
                    split,
                    &LearnerConfig::Parzen { k: None },
                    strategy,
                    6,
                    0.1,
                    13,
                    &table,
                )
                .unwrap();
                out.push((strategy.name(), split.fold, curve.accuracies, curve.queried_rows));
            }
        }
        out
    };
    // Fresh support tables on both sides: memoization must not leak into
    // results, only into speed.
    assert_eq!(run_all(), run_all());
}

#[test]
fn normalization_is_fit_without_test_rows() {
    let data = noisy_blobs(60);
    let splits = make_protocol_splits(&data, 6, 0.1, 0.6, 3).unwrap();
    let split = &splits[0];
    let x = normalized_for(&data, split);
    // Train and pool rows land inside the unit cube by construction.
    for &r in split.train.iter().chain(&split.pool) {
        assert!(x[r].iter().all(|v| (0.0..=1.0).contains(v)));
    }
    // Test rows outside the fitted range are clamped, not rescaled.
    assert!(x.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
}
