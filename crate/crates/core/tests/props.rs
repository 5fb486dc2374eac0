//! Property tests for the numeric primitives.

use hoegkit_core::features::mean_std;
use hoegkit_core::model::{loss, LossKind};
use hoegkit_core::train::{median_baseline, Predictor};
use proptest::prelude::*;

fn finite_vec(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e6f64..1e6, 1..=max_len)
}

proptest! {
    #[test]
    fn standardize_round_trips(values in finite_vec(64), x in -1e6f64..1e6) {
        let stats = mean_std(&values).unwrap();
        let z = stats.standardize(x);
        prop_assert!((stats.destandardize(z) - x).abs() <= 1e-6 * x.abs().max(1.0));
    }

    #[test]
    fn loss_matches_naive_reference(
        pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..64),
    ) {
        let (p, t): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let n = p.len() as f64;
        let naive_mae: f64 = p.iter().zip(&t).map(|(a, b)| (a - b).abs()).sum::<f64>() / n;
        let naive_mse: f64 = p.iter().zip(&t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n;
        prop_assert!((loss(&p, &t, LossKind::Mae).unwrap() - naive_mae).abs() < 1e-12 * naive_mae.max(1.0));
        prop_assert!((loss(&p, &t, LossKind::Mse).unwrap() - naive_mse).abs() < 1e-12 * naive_mse.max(1.0));
    }

    #[test]
    fn median_minimizes_mae_among_constants(targets in finite_vec(48)) {
        let Predictor::Constant(median) = median_baseline(&targets).unwrap() else {
            panic!("median baseline is a constant");
        };
        let mae = |c: f64| targets.iter().map(|t| (c - t).abs()).sum::<f64>() / targets.len() as f64;
        let median_mae = mae(median);
        for &candidate in &targets {
            prop_assert!(median_mae <= mae(candidate) + 1e-9);
        }
    }
}
