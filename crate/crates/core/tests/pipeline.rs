//! Cross-module behaviour: dataset -> encoder -> model -> report.

use modp::dataset::{residue_oracle, LabeledDataset, Modulus};
use modp::encoders::{decode, encode_dataset, EncoderKind};
use modp::fourier::{closed_form_coefficients, fit_fourier, FourierModel};
use modp::harness::{
    emit_plot_data, mean_std, reproduce_table, run, ExperimentConfig, Grid, ModelKind, PlotKind,
};
use proptest::prelude::*;

fn m(p: u64) -> Modulus {
    Modulus::new(p).unwrap()
}

#[test]
fn encoded_rows_decode_to_dataset_values() {
    let data = LabeledDataset::generate(17, 500, m(3)).unwrap();
    for kind in EncoderKind::ALL.into_iter().filter(|k| k.is_positional()) {
        let features = encode_dataset(&data, kind).unwrap();
        for (i, x) in data.xs().enumerate() {
            assert_eq!(decode(features.row(i), kind).unwrap(), x, "{kind}");
        }
        assert_eq!(features.labels(), data.labels().collect::<Vec<_>>());
    }
}

#[test]
fn fitted_model_survives_text_round_trip() {
    let (train, test) = LabeledDataset::generate(3, 30_000, m(7))
        .unwrap()
        .split(25_000.0 / 30_000.0)
        .unwrap();
    let model = fit_fourier(&train, 1e-5).unwrap();
    let back = FourierModel::from_text(&model.to_text()).unwrap();
    assert_eq!(back, model);
    assert_eq!(back.evaluate_accuracy(&test).unwrap(), 1.0);
}

#[test]
fn fitted_curve_matches_table5_at_integers() {
    let table5 = [
        -1.2893707213024186e-9,
        1.0000002318356833,
        1.9999997655855752,
        -1.2893706102801161e-9,
        1.0000002318356827,
        1.9999997655855757,
        -1.2893703882355112e-9,
        1.0000002318356822,
        1.999999765585576,
        -1.2893702772132087e-9,
    ];
    let csv = emit_plot_data(
        PlotKind::FittedCurve,
        m(3),
        &Grid::new(0.0, 9.0, 1.0).unwrap(),
        1,
    )
    .unwrap();
    let values: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split_once(',').unwrap().1.parse().unwrap())
        .collect();
    assert_eq!(values.len(), 10);
    for (got, want) in values.iter().zip(table5) {
        assert!((got - want).abs() <= 1e-3, "{got} vs {want}");
    }
}

#[test]
fn coefficient_tables_pass() {
    for name in ["mod3_coeffs", "mod7_coeffs", "table6"] {
        let bundle = reproduce_table(name).unwrap();
        assert!(bundle.all_pass(), "{name}:\n{}", bundle.csv);
    }
    let mod7 = reproduce_table("mod7_coeffs").unwrap();
    for key in ["gamma,", "alpha_3,", "beta_3,", "accuracy,"] {
        assert!(mod7.csv.contains(key), "{key}");
    }
}

#[test]
fn report_aggregates_its_replicates() {
    let mut config = ExperimentConfig::mlp(m(2), EncoderKind::OneGram);
    config.count = 2_000;
    config.mlp.epochs = 2;
    config.mlp.hidden = vec![8];
    config.replicate_seeds = vec![4, 5, 6, 7];
    let report = run(&config).unwrap();
    let accs: Vec<f64> = report.replicates.iter().map(|r| r.accuracy).collect();
    let seeds: Vec<u64> = report.replicates.iter().map(|r| r.seed).collect();
    assert_eq!(seeds, vec![4, 5, 6, 7]);
    assert_eq!((report.mean, report.std), mean_std(&accs));
    let csv = report.to_csv();
    assert!(csv.contains("# config.model=mlp\n"));
    assert!(csv.contains(&format!("# version={}\n", env!("CARGO_PKG_VERSION"))));
    assert_eq!(csv.lines().filter(|l| l.starts_with("std,,")).count(), 1);
}

#[test]
fn config_text_survives_round_trip_through_run() {
    let mut config = ExperimentConfig::fourier(m(5));
    config.model = ModelKind::FourierClosedForm;
    config.count = 600;
    let echoed = ExperimentConfig::from_text(&config.to_text()).unwrap();
    assert_eq!(
        run(&echoed).unwrap().to_csv(),
        run(&config).unwrap().to_csv()
    );
}

/// Without cosine columns the p=3 fit has two parameters for three residue
/// groups. Solving the normal equations by hand with group sizes n0, n1, n2
/// gives the fitted values below; none of them needs a regression to compute.
#[test]
fn sine_only_fit_is_fixed_by_class_counts() {
    use modp::fourier::{basis_spec, fit_fourier_with};
    for seed in 1..=10 {
        let (train, test) = LabeledDataset::generate(seed, 30_000, m(3))
            .unwrap()
            .split(25_000.0 / 30_000.0)
            .unwrap();
        let mut n = [0f64; 3];
        for y in train.labels() {
            n[y as usize] += 1.0;
        }
        let e1 = -3.0 * n[0] / (4.0 * n[1] + n[0] + n[0] * n[1] / n[2]);
        let e2 = n[1] * e1 / n[2];
        let expected = [-2.0 * n[1] * e1 / n[0], 1.0 + e1, 2.0 + e2];

        let model = fit_fourier_with(&train, basis_spec(m(3)).sine_only(), 1e-5).unwrap();
        for (r, want) in expected.iter().enumerate() {
            assert!(
                (model.raw(r as u64) - want).abs() < 1e-9,
                "seed {seed} residue {r}"
            );
        }
        // residue 0 always lands on 1; residues 1 and 2 sit on either side
        // of a .5 tie, so accuracy is the test share of whichever of them
        // rounds the right way.
        let mut share = [0f64; 3];
        for y in test.labels() {
            share[y as usize] += 1.0 / test.len() as f64;
        }
        let predicted = share[1] * f64::from(u8::from(expected[1] > 0.5))
            + share[2] * f64::from(u8::from(expected[2] >= 1.5));
        let accuracy = model.evaluate_accuracy(&test).unwrap();
        assert!((accuracy - predicted).abs() < 1e-12, "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_classifies_any_input(p in 2u64..60, x in any::<u64>()) {
        let model = closed_form_coefficients(m(p));
        let pred = model.predict_residue(x);
        prop_assert_eq!(pred.label, residue_oracle(x, m(p)));
        prop_assert!(pred.confident);
    }

    #[test]
    fn generated_labels_follow_oracle(seed in any::<u64>(), p in 2u64..100) {
        let data = LabeledDataset::generate(seed, 64, m(p)).unwrap();
        for s in data.samples() {
            prop_assert_eq!(s.y, s.x % p);
        }
    }
}
