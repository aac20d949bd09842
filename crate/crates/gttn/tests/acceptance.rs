//! End-to-end acceptance checks. Each test prints one pass/fail line;
//! run with `cargo test --test acceptance -- --nocapture` to see them all.

use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use gttn::analysis::{dual_norm_upper_bound, generalization_bound, BoundInputs};
use gttn::cli;
use gttn::data::{generate_synthetic, split, LabelKind, SyntheticSpec};
use gttn::linalg;
use gttn::model::{Batch, LinearModel, LossKind, Model, MultilinearNet, TwoLayerNet};
use gttn::regularizers::{
    self, min_form_value, NormFamily, RegularizerSpec, WeightMode, WeightState,
};
use gttn::tensor::{canonical_subsets, inner_product, AxisSubset, DenseTensor};
use gttn::trainer::{lr_schedule, optimize_beta, train, TrainConfig, TrainedRun};

fn verdict(n: usize, name: &str, ok: bool, detail: &str) {
    println!(
        "criterion {n} ({name}): {}{}",
        if ok { "PASS" } else { "FAIL" },
        if detail.is_empty() { String::new() } else { format!(" — {detail}") }
    );
    assert!(ok, "criterion {n} ({name}) failed: {detail}");
}

fn random_tensor(dims: &[usize], rng: &mut ChaCha8Rng) -> DenseTensor {
    let n: usize = dims.iter().product();
    DenseTensor::from_dims(dims, (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect()).unwrap()
}

#[test]
fn criterion_01_flattening_count_law() {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for p in 2..=7usize {
        let count = canonical_subsets(p).unwrap().len();
        let expected = (1usize << (p - 1)) - 1;
        if count != expected {
            ok = false;
            detail = format!("order {p}: {count} subsets, expected {expected}");
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 1.0 {
        ok = false;
        detail = format!("took {elapsed:?}");
    }
    verdict(1, "flattening count law", ok, &detail);
}

#[test]
fn criterion_02_transpose_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let order = 3 + i % 3;
        let dims: Vec<usize> = (0..order).map(|_| rng.gen_range(2..=4)).collect();
        let w = random_tensor(&dims, &mut rng);
        for s in canonical_subsets(order).unwrap() {
            let a = linalg::trace_norm(&w.flatten(&s).unwrap()).unwrap();
            let comp = s.complement();
            let b = linalg::trace_norm(&w.flatten(&comp).unwrap()).unwrap();
            worst = worst.max((a - b).abs());
        }
    }
    verdict(2, "transpose invariance", worst < 1e-8, &format!("worst gap {worst:.3e}"));
}

#[test]
fn criterion_03_gradient_suite() {
    let start = Instant::now();
    let eps = 1e-6;
    let tol = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut worst_site = String::new();
    let mut check = |site: &str, analytic: f64, numeric: f64| {
        let rel = (analytic - numeric).abs() / numeric.abs().max(1e-8);
        if rel > worst {
            worst = rel;
            worst_site = site.to_string();
        }
    };

    for instance in 0..20 {
        // trace-norm subgradient on a matrix
        let (r, c) = (2 + instance % 4, 3 + instance % 3);
        let m = linalg::Matrix::new(
            r,
            c,
            (0..r * c).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect(),
        )
        .unwrap();
        let sub = linalg::trace_norm_subgradient(&m, 1e-10).unwrap();
        for _ in 0..10 {
            let dir: Vec<f64> = (0..r * c).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let perturb = |scale: f64| {
                let data: Vec<f64> =
                    m.data().iter().zip(&dir).map(|(v, d)| v + scale * d).collect();
                linalg::trace_norm(&linalg::Matrix::new(r, c, data).unwrap()).unwrap()
            };
            let numeric = (perturb(eps) - perturb(-eps)) / (2.0 * eps);
            let analytic: f64 = sub.data().iter().zip(&dir).map(|(g, d)| g * d).sum();
            check("trace_norm_subgradient", analytic, numeric);
        }

        // combined-regularizer gradients in the tensor and in the logits
        let dims = [2 + instance % 2, 3, 2 + instance % 3];
        let w = random_tensor(&dims, &mut rng);
        let spec = RegularizerSpec::new(NormFamily::Gttn, 3, WeightMode::LearnableSoftmax).unwrap();
        let beta: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() - 0.5).collect();
        let weights = WeightState::from_beta(beta.clone()).unwrap();
        let grad_w = regularizers::reg_subgrad_w(&w, &spec, &weights).unwrap();
        let grad_b = regularizers::reg_grad_beta(&w, &spec, &weights, 1.0).unwrap();
        for _ in 0..10 {
            let dir = random_tensor(&dims, &mut rng);
            let value = |t: &DenseTensor| regularizers::reg_value(t, &spec, &weights).unwrap();
            let numeric = (value(&w.add(&dir.scale(eps)).unwrap())
                - value(&w.add(&dir.scale(-eps)).unwrap()))
                / (2.0 * eps);
            check("reg_subgrad_w", inner_product(&grad_w, &dir).unwrap(), numeric);

            let bdir: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() - 0.5).collect();
            let value_b = |scale: f64| {
                let b: Vec<f64> = beta.iter().zip(&bdir).map(|(x, d)| x + scale * d).collect();
                regularizers::reg_value(&w, &spec, &WeightState::from_beta(b).unwrap()).unwrap()
            };
            let numeric = (value_b(eps) - value_b(-eps)) / (2.0 * eps);
            let analytic: f64 = grad_b.iter().zip(&bdir).map(|(g, d)| g * d).sum();
            check("reg_grad_beta", analytic, numeric);
        }

        // full-model backward for each architecture
        let seed = 100 + instance as u64;
        let models: Vec<(Model, LossKind)> = vec![
            (
                Model::Linear(LinearModel::init(&[2, 3], 1, 2, seed).unwrap()),
                LossKind::Logistic,
            ),
            (
                Model::Linear(LinearModel::init(&[2, 3], 1, 2, seed + 50).unwrap()),
                LossKind::Square,
            ),
            (
                Model::TwoLayer(TwoLayerNet::init(6, 4, 3, 2, seed).unwrap()),
                LossKind::CrossEntropy,
            ),
            (
                Model::Multilinear(MultilinearNet::init([2, 2, 2], [2, 2, 2], 2, 2, seed).unwrap()),
                LossKind::CrossEntropy,
            ),
        ];
        for (model, kind) in models {
            let input_dims: Vec<usize> = match &model {
                Model::Multilinear(_) => vec![2, 2, 2],
                Model::TwoLayer(_) => vec![6],
                Model::Linear(_) => vec![2, 3],
            };
            let label = match kind {
                LossKind::CrossEntropy => 1.0,
                LossKind::Logistic => -1.0,
                LossKind::Square => 1.0,
            };
            let batch = Batch::new(
                1,
                vec![random_tensor(&input_dims, &mut rng)],
                vec![label],
            )
            .unwrap();
            let grads = model.backward(&batch, kind).unwrap();
            let blocks = model.blocks();
            for (bi, block) in blocks.iter().enumerate() {
                for _ in 0..4 {
                    let dir = random_tensor(block.dims(), &mut rng);
                    let eval = |scale: f64| {
                        let mut m = model.clone();
                        let perturbed = m.blocks()[bi].add(&dir.scale(scale)).unwrap();
                        *m.blocks_mut()[bi] = perturbed;
                        let scores = m.forward(1, &batch.inputs[0]).unwrap();
                        gttn::model::loss(&scores, label, kind).unwrap()
                    };
                    let numeric = (eval(eps) - eval(-eps)) / (2.0 * eps);
                    let analytic = inner_product(&grads.blocks[bi], &dir).unwrap();
                    check("model backward", analytic, numeric);
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = worst < tol && elapsed.as_secs_f64() < 30.0;
    verdict(
        3,
        "gradient suite",
        ok,
        &format!("worst rel err {worst:.3e} at {worst_site}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_04_weight_only_optimization() {
    let shapes: [&[usize]; 3] = [&[2, 3, 4], &[3, 3, 3], &[2, 2, 2, 2]];
    let mut failures = Vec::new();
    for dims in shapes {
        let spec =
            RegularizerSpec::new(NormFamily::Gttn, dims.len(), WeightMode::LearnableSoftmax)
                .unwrap();
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(400 + seed);
            let w = random_tensor(dims, &mut rng);
            let weights = optimize_beta(&w, &spec, 2000, 4.0).unwrap();
            let value = regularizers::reg_value(&w, &spec, &weights).unwrap();
            let (min_value, _) = min_form_value(&w, &spec).unwrap();
            let norms = regularizers::flattening_norms(&w, &spec).unwrap();
            // alpha mass on the argmin set (ties within 1e-9 relative)
            let argmin_mass: f64 = norms
                .iter()
                .zip(weights.alpha())
                .filter(|(n, _)| **n <= min_value * (1.0 + 1e-9))
                .map(|(_, a)| a)
                .sum();
            if value > min_value * 1.02 || argmin_mass < 0.9 {
                failures.push(format!(
                    "dims {dims:?} seed {seed}: value {value:.6} vs min {min_value:.6}, \
                     argmin mass {argmin_mass:.3}"
                ));
            }
        }
    }
    verdict(4, "weight-only optimization reaches the min form", failures.is_empty(), &failures.join("; "));
}

#[test]
fn criterion_05_baseline_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for dims in [vec![2, 3, 4], vec![2, 2, 3, 2], vec![3, 2, 2]] {
        let p = dims.len();
        let w = random_tensor(&dims, &mut rng);
        let gttn = RegularizerSpec::new(NormFamily::Gttn, p, WeightMode::LearnableSoftmax).unwrap();

        // pattern alpha over the full roster equal to each baseline's roster
        let pattern = |subsets: &[AxisSubset], per: f64| -> f64 {
            let mut alpha = vec![0.0; gttn.subsets.len()];
            for s in subsets {
                let canonical = s.canonical();
                let pos = gttn.subsets.iter().position(|g| *g == canonical).unwrap();
                alpha[pos] += per;
            }
            let pinned = WeightState::from_alpha(alpha).unwrap();
            regularizers::reg_value(&w, &gttn, &pinned).unwrap()
        };

        let tucker = RegularizerSpec::new(NormFamily::Tucker, p, WeightMode::FixedUniform).unwrap();
        let tucker_value =
            regularizers::reg_value(&w, &tucker, &tucker.uniform_weights()).unwrap();
        let via_pattern = pattern(&tucker.subsets, 1.0 / tucker.subsets.len() as f64);
        worst = worst.max((tucker_value - via_pattern).abs());

        let tt = RegularizerSpec::new(NormFamily::Tt, p, WeightMode::FixedUniform).unwrap();
        let tt_value = regularizers::reg_value(&w, &tt, &tt.uniform_weights()).unwrap();
        let via_pattern = pattern(&tt.subsets, 1.0 / tt.subsets.len() as f64);
        worst = worst.max((tt_value - via_pattern).abs());

        let laf = RegularizerSpec::new(NormFamily::Laf, p, WeightMode::FixedUniform).unwrap();
        let laf_value = regularizers::reg_value(&w, &laf, &laf.uniform_weights()).unwrap();
        let via_pattern = pattern(&laf.subsets, 1.0);
        worst = worst.max((laf_value - via_pattern).abs());
    }
    verdict(5, "baseline family consistency", worst < 1e-10, &format!("worst gap {worst:.3e}"));
}

#[test]
fn criterion_06_holder_dual_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ok = true;
    let mut detail = String::new();
    for p in [3usize, 4, 5] {
        let spec = RegularizerSpec::new(NormFamily::Gttn, p, WeightMode::LearnableSoftmax).unwrap();
        for trial in 0..100 {
            let dims: Vec<usize> = (0..p).map(|_| rng.gen_range(2..=3)).collect();
            let w = random_tensor(&dims, &mut rng);
            let x = random_tensor(&dims, &mut rng);
            let raw: Vec<f64> = (0..spec.subsets.len()).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let sum: f64 = raw.iter().sum();
            let alpha: Vec<f64> = raw.iter().map(|v| v / sum).collect();
            let weights = WeightState::from_alpha(alpha).unwrap();
            let reg = regularizers::reg_value(&w, &spec, &weights).unwrap();
            let dual = dual_norm_upper_bound(&x, weights.alpha()).unwrap();
            let ip = inner_product(&w, &x).unwrap();
            if ip > reg * dual + 1e-10 {
                ok = false;
                detail = format!("p={p} trial {trial}: {ip} > {reg} * {dual}");
            }
        }
    }
    verdict(6, "Hölder dual bound", ok, &detail);
}

fn recovery_run(family: NormFamily, lambda: f64, seed: u64) -> (TrainedRun, RegularizerSpec) {
    let spec = SyntheticSpec {
        dims: vec![4, 4, 4],
        tasks: 4,
        n0: 200,
        planted_subset: vec![1],
        planted_rank: 1,
        noise_std: 0.1,
        label_kind: LabelKind::Binary,
        seed,
        input_alignment: 1.0,
    };
    let (dataset, _) = generate_synthetic(&spec).unwrap();
    let (train_set, test_set) = split(&dataset, 0.6, seed).unwrap();
    let mode = match family {
        NormFamily::Gttn => WeightMode::LearnableSoftmax,
        _ => WeightMode::FixedUniform,
    };
    let reg = RegularizerSpec::new(family, 4, mode).unwrap();
    let config = TrainConfig { lambda, max_epochs: 40, seed, eval_every: 40, ..TrainConfig::default() };
    let model = Model::Linear(LinearModel::init(&spec.dims, 1, spec.tasks, seed).unwrap());
    let run = train(
        model,
        WeightState::uniform(reg.subsets.len()),
        &train_set,
        Some(&test_set),
        &reg,
        LossKind::Square,
        &config,
    )
    .unwrap();
    (run, reg)
}

fn mean_test_accuracy(run: &TrainedRun) -> f64 {
    let last = run.metrics.iter().map(|r| r.epoch).max().unwrap();
    let accs: Vec<f64> = run
        .metrics
        .iter()
        .filter(|r| r.epoch == last && r.split == "test")
        .map(|r| r.accuracy)
        .collect();
    accs.iter().sum::<f64>() / accs.len() as f64
}

#[test]
fn criterion_07_planted_recovery() {
    let start = Instant::now();
    let seeds: Vec<u64> = (1..=5).collect();

    let mut gttn_accs = Vec::new();
    let mut argmax_hits = 0;
    for &seed in &seeds {
        let (run, reg) = recovery_run(NormFamily::Gttn, 0.25, seed);
        gttn_accs.push(mean_test_accuracy(&run));
        let alpha = &run.alpha_trace.last().unwrap().1;
        let amax = alpha
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        if reg.subsets[amax].indices() == [1] {
            argmax_hits += 1;
        }
    }
    let gttn_mean = gttn_accs.iter().sum::<f64>() / gttn_accs.len() as f64;
    let gttn_var = gttn_accs.iter().map(|a| (a - gttn_mean).powi(2)).sum::<f64>()
        / gttn_accs.len() as f64;

    let mut ok = argmax_hits >= 4;
    let mut detail = format!("alpha argmax at planted subset in {argmax_hits}/5 seeds");
    for (family, lambda) in [
        (NormFamily::Tucker, 0.25),
        (NormFamily::Tt, 0.25),
        (NormFamily::Laf, 0.25),
        (NormFamily::Gttn, 0.0), // unregularized
    ] {
        let accs: Vec<f64> = seeds
            .iter()
            .map(|&s| mean_test_accuracy(&recovery_run(family, lambda, s).0))
            .collect();
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        let var = accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / accs.len() as f64;
        let pooled = ((gttn_var + var) / 2.0).sqrt();
        let name = if lambda == 0.0 { "unregularized" } else { family.name() };
        detail.push_str(&format!("; vs {name}: {gttn_mean:.4} vs {mean:.4} (pooled std {pooled:.4})"));
        if gttn_mean < mean - pooled {
            ok = false;
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 300.0 {
        ok = false;
        detail.push_str(&format!("; took {elapsed:?}"));
    }
    verdict(7, "planted recovery", ok, &detail);
}

#[test]
fn criterion_08_protocol_fidelity() {
    let mut ok = true;
    let mut detail = String::new();

    if lr_schedule(0, 0.02) != 0.02 || lr_schedule(1, 0.02) != 0.01 {
        ok = false;
        detail.push_str("lr schedule wrong; ");
    }
    if TrainConfig::default().batch_size != 16 {
        ok = false;
        detail.push_str("default batch size wrong; ");
    }
    for lambda in [0.25, 0.65] {
        let config = TrainConfig { lambda, ..TrainConfig::default() };
        if config.validate().is_err() {
            ok = false;
            detail.push_str(&format!("lambda preset {lambda} rejected; "));
        }
    }

    // proportion sweep with 5-seed aggregation, checked via CSV shape
    let dir = tempfile::tempdir().unwrap();
    let config = cli::RunConfig {
        data: cli::DataSection {
            synthetic: Some(SyntheticSpec {
                dims: vec![2, 3],
                tasks: 2,
                n0: 40,
                planted_subset: vec![1],
                planted_rank: 1,
                noise_std: 0.1,
                label_kind: LabelKind::Binary,
                seed: 8,
                input_alignment: 1.0,
            }),
            manifest: None,
        },
        regularizer: cli::RegSection { family: NormFamily::Gttn, weight_mode: None },
        train: cli::TrainSection {
            max_epochs: Some(3),
            ..cli::TrainSection::from_resolved(&TrainConfig { lambda: 0.25, ..TrainConfig::default() })
        },
        output: cli::OutputSection {
            directory: dir.path().display().to_string(),
            formats: vec!["csv".into()],
        },
    };
    let cells = cli::run_sweep(
        &config,
        cli::SweepAxes {
            lambdas: None,
            proportions: Some(vec![0.5, 0.6, 0.7]),
            seeds: Some(vec![0, 1, 2, 3, 4]),
            families: None,
        },
    )
    .unwrap();
    if cells.len() != 3 || cells.iter().any(|c| c.seeds != 5) {
        ok = false;
        detail.push_str("sweep shape wrong; ");
    }
    let props: Vec<f64> = cells.iter().map(|c| c.proportion).collect();
    if props != vec![0.5, 0.6, 0.7] {
        ok = false;
        detail.push_str("proportion cells wrong; ");
    }

    // golden resolved config: defaults materialized
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, serde_json::to_string(&config).unwrap()).unwrap();
    let run_dir = dir.path().join("run");
    cli::cmd_train(&config_path, None, Some(&run_dir)).unwrap();
    let resolved: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(run_dir.join("resolved_config.json")).unwrap(),
    )
    .unwrap();
    let train = &resolved["train"];
    let golden = [
        ("lambda", 0.25),
        ("batch_size", 16.0),
        ("lr_base", 0.02),
        ("adam_beta1", 0.9),
        ("adam_beta2", 0.999),
    ];
    for (key, expected) in golden {
        if train[key].as_f64() != Some(expected) {
            ok = false;
            detail.push_str(&format!("resolved {key} != {expected}; "));
        }
    }
    let metrics = std::fs::read_to_string(run_dir.join("metrics.csv")).unwrap();
    if !metrics.starts_with("epoch,task,split,loss,accuracy,reg_value,min_form_value\n") {
        ok = false;
        detail.push_str("metrics header wrong; ");
    }
    verdict(8, "protocol fidelity", ok, &detail);
}

#[test]
fn criterion_09_bound_evaluator() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut ok = true;
    let mut detail = String::new();

    // independent re-evaluation, enumerating subsets by bitmask directly
    let independent = |b: &BoundInputs, emp: f64| -> f64 {
        let p = b.dims.len();
        let m = b.dims[p - 1] as f64;
        let n0 = b.n0 as f64;
        let d: f64 = b.dims[..p - 1].iter().product::<usize>() as f64;
        // masks over axes 2..p, axis 1 always in the subset, sorted into
        // lexicographic index-list order to line up with the alpha vector
        let mut subsets: Vec<Vec<usize>> = (0..(1u32 << (p - 1)) - 1)
            .map(|mask| {
                let mut s = vec![1usize];
                for axis in 1..p {
                    if mask >> (axis - 1) & 1 == 1 {
                        s.push(axis + 1);
                    }
                }
                s
            })
            .collect();
        subsets.sort();
        let mut best = f64::INFINITY;
        for (s, &a) in subsets.iter().zip(&b.alpha) {
            let rows: f64 = s.iter().map(|&axis| b.dims[axis - 1] as f64).product();
            let cols: f64 = (1..=p)
                .filter(|axis| !s.contains(axis))
                .map(|axis| b.dims[axis - 1] as f64)
                .product();
            let d_s = rows + cols;
            if a > 0.0 {
                let term = b.kappa * m * d_s.ln().sqrt() / (a * n0 * d) + d_s.ln() / (a * n0);
                best = best.min(term);
            }
        }
        let tail = if b.proof_tail {
            (2.0 / (m * n0) * (1.0 / b.delta).ln()).sqrt()
        } else {
            (2.0 / m * (1.0 / b.delta).ln()).sqrt()
        };
        emp + 2.0 * b.rho * b.gamma * b.c / (m * n0) * best + tail
    };

    // note: enumeration order must match lexicographic subset order
    let orders: Vec<Vec<usize>> = vec![vec![8, 8, 4], vec![2, 3, 4, 5], vec![6, 4]];
    let mut worst: f64 = 0.0;
    for trial in 0..20 {
        let dims = orders[trial % orders.len()].clone();
        let n_subsets = (1usize << (dims.len() - 1)) - 1;
        let raw: Vec<f64> = (0..n_subsets).map(|_| rng.gen::<f64>() + 0.01).collect();
        let sum: f64 = raw.iter().sum();
        let b = BoundInputs {
            rho: rng.gen::<f64>() + 0.5,
            gamma: rng.gen::<f64>() + 0.5,
            kappa: rng.gen::<f64>() * 4.0 + 0.5,
            delta: rng.gen::<f64>() * 0.9 + 0.01,
            c: 1.0,
            dims,
            n0: rng.gen_range(10..1000),
            alpha: raw.iter().map(|v| v / sum).collect(),
            proof_tail: trial % 2 == 0,
        };
        let emp = rng.gen::<f64>();
        let mine = generalization_bound(&b, emp).unwrap().value;
        let theirs = independent(&b, emp);
        worst = worst.max((mine - theirs).abs());
    }
    if worst >= 1e-12 {
        ok = false;
        detail = format!("formula mismatch {worst:.3e}");
    }

    // order sanity: the independent enumeration must line up subset-for-subset
    let subsets = canonical_subsets(4).unwrap();
    let mut bitmask_order: Vec<Vec<usize>> = (0..(1u32 << 3) - 1)
        .map(|mask| {
            let mut s = vec![1usize];
            for axis in 1..4 {
                if mask >> (axis - 1) & 1 == 1 {
                    s.push(axis + 1);
                }
            }
            s
        })
        .collect();
    bitmask_order.sort();
    for (s, bits) in subsets.iter().zip(&bitmask_order) {
        if s.indices() != &bits[..] {
            ok = false;
            detail.push_str("; subset enumeration orders diverge");
        }
    }

    // monotonicity over 50 perturbation trials
    for trial in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + trial);
        let raw: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() + 0.1).collect();
        let sum: f64 = raw.iter().sum();
        let base = BoundInputs {
            rho: rng.gen::<f64>() + 0.5,
            gamma: rng.gen::<f64>() + 0.5,
            kappa: rng.gen::<f64>() * 2.0 + 0.5,
            delta: 0.05,
            c: 1.0,
            dims: vec![rng.gen_range(2..9), rng.gen_range(2..9), rng.gen_range(2..6)],
            n0: rng.gen_range(10..500),
            alpha: raw.iter().map(|v| v / sum).collect(),
            proof_tail: false,
        };
        let v = |b: &BoundInputs| generalization_bound(b, 0.0).unwrap().value;
        let base_v = v(&base);
        let mut up_n = base.clone();
        up_n.n0 *= 2;
        let mut up_rho = base.clone();
        up_rho.rho *= 1.5;
        let mut up_gamma = base.clone();
        up_gamma.gamma *= 1.5;
        let mut up_kappa = base.clone();
        up_kappa.kappa *= 1.5;
        if !(v(&up_n) < base_v && v(&up_rho) > base_v && v(&up_gamma) > base_v && v(&up_kappa) > base_v)
        {
            ok = false;
            detail.push_str(&format!("; monotonicity trial {trial} failed"));
        }
    }
    verdict(9, "bound evaluator", ok, &detail);
}

#[test]
fn criterion_10_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config = cli::RunConfig {
        data: cli::DataSection {
            synthetic: Some(SyntheticSpec {
                dims: vec![2, 3],
                tasks: 2,
                n0: 30,
                planted_subset: vec![1],
                planted_rank: 1,
                noise_std: 0.1,
                label_kind: LabelKind::Binary,
                seed: 10,
                input_alignment: 1.0,
            }),
            manifest: None,
        },
        regularizer: cli::RegSection { family: NormFamily::Gttn, weight_mode: None },
        train: cli::TrainSection {
            max_epochs: Some(4),
            seed: Some(17),
            ..cli::TrainSection::from_resolved(&TrainConfig { lambda: 0.25, ..TrainConfig::default() })
        },
        output: cli::OutputSection {
            directory: dir.path().join("a").display().to_string(),
            formats: vec!["csv".into()],
        },
    };
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, serde_json::to_string(&config).unwrap()).unwrap();
    cli::cmd_train(&config_path, None, None).unwrap();
    cli::cmd_train(&config_path, None, Some(&dir.path().join("b"))).unwrap();
    let read = |side: &str, name: &str| std::fs::read(dir.path().join(side).join(name)).unwrap();
    let ok = read("a", "metrics.csv") == read("b", "metrics.csv")
        && read("a", "alpha_trace.csv") == read("b", "alpha_trace.csv");
    verdict(10, "determinism", ok, "bit-identical CSVs across two runs");
}
