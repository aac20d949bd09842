//! Compare regularizer families over training proportions and seeds,
//! aggregating mean and standard deviation of test accuracy per cell.

use gttn::cli::{run_sweep, DataSection, OutputSection, RegSection, RunConfig, SweepAxes, TrainSection};
use gttn::data::{LabelKind, SyntheticSpec};
use gttn::regularizers::NormFamily;
use gttn::trainer::TrainConfig;

fn main() -> gttn::Result<()> {
    let config = RunConfig {
        data: DataSection {
            synthetic: Some(SyntheticSpec {
                dims: vec![3, 3],
                tasks: 3,
                n0: 60,
                planted_subset: vec![1],
                planted_rank: 1,
                noise_std: 0.1,
                label_kind: LabelKind::Binary,
                seed: 2,
            input_alignment: 1.0,
            }),
            manifest: None,
        },
        regularizer: RegSection { family: NormFamily::Gttn, weight_mode: None },
        train: TrainSection {
            max_epochs: Some(10),
            ..TrainSection::from_resolved(&TrainConfig { lambda: 0.25, ..TrainConfig::default() })
        },
        output: OutputSection { directory: "unused".into(), formats: vec!["csv".into()] },
    };

    let cells = run_sweep(
        &config,
        SweepAxes {
            lambdas: None,
            proportions: Some(vec![0.5, 0.6, 0.7]),
            seeds: Some(vec![0, 1, 2]),
            families: Some(vec![
                "gttn".into(),
                "tucker".into(),
                "tt".into(),
                "laf".into(),
                "unregularized".into(),
            ]),
        },
    )?;

    println!("{:<14} {:>7} {:>11} {:>9} {:>8}", "family", "lambda", "proportion", "mean", "std");
    for c in &cells {
        println!(
            "{:<14} {:>7} {:>11} {:>9.4} {:>8.4}",
            c.family, c.lambda, c.proportion, c.mean_accuracy, c.std_accuracy
        );
    }
    Ok(())
}
