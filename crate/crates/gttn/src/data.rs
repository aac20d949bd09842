//! Synthetic multi-task datasets with a planted low-rank flattening,
//! train/test splitting, and tensor/dataset file I/O.
//!
//! Tensor files use the GTN1 format: magic bytes `GTN1`, little-endian
//! u32 order, per-axis u64 dims, then f64 values in row-major order.
//! Files are written atomically (temp file + rename).

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{GttnError, Result};
use crate::linalg::Matrix;
use crate::tensor::{AxisSubset, DenseTensor};

/// Classification label layout of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    /// Labels in {-1, +1} from the sign of the planted score.
    Binary,
    /// Labels in 0..k from the argmax over a class axis.
    Multiclass { classes: usize },
}

impl LabelKind {
    pub fn num_classes(&self) -> usize {
        match self {
            LabelKind::Binary => 1,
            LabelKind::Multiclass { classes } => *classes,
        }
    }
}

/// Recipe for a synthetic multi-task problem with ground truth that is
/// low-rank along one chosen flattening of the parameter tensor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    /// Input dims d_1..d_{p-1} (excluding class and task axes).
    pub dims: Vec<usize>,
    /// Task count m (last axis of the parameter tensor).
    pub tasks: usize,
    /// Examples per task.
    pub n0: usize,
    /// Planted subset s* over the full parameter tensor (1-based axes).
    pub planted_subset: Vec<usize>,
    pub planted_rank: usize,
    pub noise_std: f64,
    pub label_kind: LabelKind,
    pub seed: u64,
    /// Anisotropy of the input distribution: each input mixes this much
    /// of the task's discriminative direction into an isotropic draw
    /// before normalization. 0 gives isotropic inputs; around 1, inputs
    /// carry enough signal for margins to survive the unit-norm cap
    /// (isotropic inputs dilute inner products by 1/sqrt(d)).
    #[serde(default)]
    pub input_alignment: f64,
}

impl SyntheticSpec {
    /// Shape of the ground-truth parameter tensor.
    pub fn param_dims(&self) -> Vec<usize> {
        let mut d = self.dims.clone();
        if let LabelKind::Multiclass { classes } = self.label_kind {
            d.push(classes);
        }
        d.push(self.tasks);
        d
    }

    fn validate(&self) -> Result<AxisSubset> {
        if self.n0 < 1 {
            return Err(GttnError::Config(vec!["n0 must be >= 1".into()]));
        }
        if self.tasks < 2 {
            return Err(GttnError::Config(vec!["tasks must be >= 2".into()]));
        }
        if !(self.input_alignment >= 0.0 && self.input_alignment.is_finite()) {
            return Err(GttnError::Config(vec![format!(
                "input_alignment must be a nonnegative finite value, got {}",
                self.input_alignment
            )]));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| d == 0) {
            return Err(GttnError::Config(vec![format!(
                "bad input dims {:?}",
                self.dims
            )]));
        }
        let pdims = self.param_dims();
        let subset = AxisSubset::new(&self.planted_subset, pdims.len())
            .map_err(|e| GttnError::Config(vec![format!("planted_subset: {e}")]))?;
        let (rows, cols) = subset.flattening_shape(&pdims);
        if self.planted_rank == 0 || self.planted_rank > rows.min(cols) {
            return Err(GttnError::Config(vec![format!(
                "planted_rank {} exceeds min({rows},{cols}) for subset {subset}",
                self.planted_rank
            )]));
        }
        Ok(subset)
    }
}

/// One task's examples.
#[derive(Debug, Clone)]
pub struct TaskData {
    pub inputs: Vec<DenseTensor>,
    pub labels: Vec<f64>,
}

/// Per-task example lists with uniform input shape.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub tasks: Vec<TaskData>,
    pub dims: Vec<usize>,
    pub label_kind: LabelKind,
}

impl Dataset {
    pub fn num_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn total_examples(&self) -> usize {
        self.tasks.iter().map(|t| t.inputs.len()).sum()
    }

    pub fn check_nonempty(&self) -> Result<()> {
        if self.tasks.is_empty() || self.tasks.iter().any(|t| t.inputs.is_empty()) {
            return Err(GttnError::Config(vec![
                "every task needs at least one example".into(),
            ]));
        }
        Ok(())
    }
}

/// Draw the dataset and the ground-truth parameter tensor.
///
/// The ground truth is `unflatten(A B, s*)` with standard normal factors,
/// rescaled to unit Frobenius norm. Inputs are standard normal rescaled
/// to unit norm (so `<x,x> <= 1` holds); labels come from the sign or
/// argmax of the planted scores with Gaussian score noise.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(Dataset, DenseTensor)> {
    let subset = spec.validate()?;
    let pdims = spec.param_dims();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let (rows, cols) = subset.flattening_shape(&pdims);
    let r = spec.planted_rank;
    let a = Matrix::new(rows, r, (0..rows * r).map(|_| rng.sample(StandardNormal)).collect())?;
    let b = Matrix::new(r, cols, (0..r * cols).map(|_| rng.sample(StandardNormal)).collect())?;
    let low_rank = a.matmul(&b)?;
    let mut truth = DenseTensor::unflatten(&low_rank, &subset, &pdims)?;
    let fro = truth.frobenius_norm();
    if fro == 0.0 {
        return Err(GttnError::Config(vec!["degenerate ground truth".into()]));
    }
    truth = truth.scale(1.0 / fro);

    let classes = spec.label_kind.num_classes();
    let input_len: usize = spec.dims.iter().product();
    let sqrt_d = (input_len as f64).sqrt();
    let mut tasks = Vec::with_capacity(spec.tasks);
    for task in 1..=spec.tasks {
        // unit discriminative direction per class slice of the ground truth
        let directions: Vec<Vec<f64>> = (0..classes)
            .map(|c| {
                let mut u: Vec<f64> = (0..input_len)
                    .map(|j| {
                        let w = truth.data();
                        if classes >= 2 {
                            w[j * classes * spec.tasks + c * spec.tasks + (task - 1)]
                        } else {
                            w[j * spec.tasks + (task - 1)]
                        }
                    })
                    .collect();
                let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    for v in u.iter_mut() {
                        *v /= norm;
                    }
                }
                u
            })
            .collect();
        let mut inputs = Vec::with_capacity(spec.n0);
        for _ in 0..spec.n0 {
            let mut x: Vec<f64> = (0..input_len)
                .map(|_| rng.sample::<f64, _>(StandardNormal) / sqrt_d)
                .collect();
            if spec.input_alignment > 0.0 {
                let c = if classes >= 2 { rng.gen_range(0..classes) } else { 0 };
                let z: f64 = rng.sample(StandardNormal);
                for (v, u) in x.iter_mut().zip(&directions[c]) {
                    *v += spec.input_alignment * z * u;
                }
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                for v in x.iter_mut() {
                    *v /= norm;
                }
            }
            inputs.push(DenseTensor::from_dims(&spec.dims, x)?);
        }
        // noise_std is a relative corruption level: the noise is scaled by
        // the task's score spread, so 0.1 flips a similar label fraction
        // regardless of how the dims dilute raw inner products
        let raw_scores: Vec<Vec<f64>> = inputs
            .iter()
            .map(|x| {
                (0..classes)
                    .map(|c| planted_score(&truth, x, c, classes, task, spec.tasks))
                    .collect()
            })
            .collect();
        let flat: Vec<f64> = raw_scores.iter().flatten().copied().collect();
        let mean = flat.iter().sum::<f64>() / flat.len() as f64;
        let var = flat.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / flat.len() as f64;
        let scale = var.sqrt().max(f64::MIN_POSITIVE);
        let labels: Vec<f64> = raw_scores
            .iter()
            .map(|scores| match spec.label_kind {
                LabelKind::Binary => {
                    let noise: f64 = rng.sample(StandardNormal);
                    if scores[0] + spec.noise_std * scale * noise >= 0.0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
                LabelKind::Multiclass { classes } => {
                    let mut best = 0usize;
                    let mut best_score = f64::NEG_INFINITY;
                    for (c, s) in scores.iter().enumerate() {
                        let noise: f64 = rng.sample(StandardNormal);
                        let noisy = s + spec.noise_std * scale * noise;
                        if noisy > best_score {
                            best_score = noisy;
                            best = c;
                        }
                    }
                    debug_assert!(best < classes);
                    best as f64
                }
            })
            .collect();
        tasks.push(TaskData { inputs, labels });
    }

    Ok((
        Dataset { tasks, dims: spec.dims.clone(), label_kind: spec.label_kind },
        truth,
    ))
}

/// Planted score `<W*[.., c, i], x>` for `classes >= 2`, or `<W*_i, x>`
/// for binary (classes = 1).
fn planted_score(
    truth: &DenseTensor,
    x: &DenseTensor,
    class: usize,
    classes: usize,
    task: usize,
    tasks: usize,
) -> f64 {
    let w = truth.data();
    let stride = classes * tasks;
    x.data()
        .iter()
        .enumerate()
        .map(|(j, xv)| {
            let off = if classes >= 2 {
                j * stride + class * tasks + (task - 1)
            } else {
                j * tasks + (task - 1)
            };
            xv * w[off]
        })
        .sum()
}

/// Per-task split, stratified by label for multiclass data. The train
/// side gets `floor(proportion * n_i)` examples of each task.
pub fn split(dataset: &Dataset, proportion: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(0.0 < proportion && proportion < 1.0) {
        return Err(GttnError::Config(vec![format!(
            "train proportion must be in (0,1), got {proportion}"
        )]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_tasks = Vec::new();
    let mut test_tasks = Vec::new();
    for task in &dataset.tasks {
        let n = task.inputs.len();
        let n_train = (proportion * n as f64).floor() as usize;
        if n_train == 0 || n_train == n {
            return Err(GttnError::Config(vec![format!(
                "degenerate split: {n_train}/{n} examples in train"
            )]));
        }
        // group indices by label, shuffle within groups, take proportional
        // prefixes; remainder is distributed by a final shuffled pass
        let mut by_label: Vec<(u64, Vec<usize>)> = Vec::new();
        for (i, &l) in task.labels.iter().enumerate() {
            let key = l.to_bits();
            match by_label.iter_mut().find(|(k, _)| *k == key) {
                Some((_, v)) => v.push(i),
                None => by_label.push((key, vec![i])),
            }
        }
        let mut train_idx: Vec<usize> = Vec::new();
        let mut rest: Vec<usize> = Vec::new();
        for (_, mut idx) in by_label {
            idx.shuffle(&mut rng);
            let take = (proportion * idx.len() as f64).floor() as usize;
            train_idx.extend(idx.drain(..take));
            rest.extend(idx);
        }
        rest.shuffle(&mut rng);
        while train_idx.len() < n_train {
            train_idx.push(rest.pop().expect("counts add up"));
        }
        let mut test_idx = rest;
        train_idx.sort_unstable();
        test_idx.sort_unstable();
        let pick = |idx: &[usize]| TaskData {
            inputs: idx.iter().map(|&i| task.inputs[i].clone()).collect(),
            labels: idx.iter().map(|&i| task.labels[i]).collect(),
        };
        train_tasks.push(pick(&train_idx));
        test_tasks.push(pick(&test_idx));
    }
    let mk = |tasks| Dataset { tasks, dims: dataset.dims.clone(), label_kind: dataset.label_kind };
    Ok((mk(train_tasks), mk(test_tasks)))
}

const MAGIC: &[u8; 4] = b"GTN1";

/// Write a tensor in the GTN1 format, atomically.
pub fn save_tensor(t: &DenseTensor, path: &Path) -> Result<()> {
    let mut buf = Vec::with_capacity(8 + 8 * t.order() + 8 * t.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(t.order() as u32).to_le_bytes());
    for &d in t.dims() {
        buf.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for v in t.data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    write_atomic(path, &buf)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |e: std::io::Error| GttnError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let tmp: PathBuf = path.with_extension("tmp.partial");
    {
        let mut f = fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(bytes).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    fs::rename(&tmp, path).map_err(io_err)
}

/// Read a GTN1 tensor file.
pub fn load_tensor(path: &Path) -> Result<DenseTensor> {
    let fmt = |message: String| GttnError::Format {
        path: path.display().to_string(),
        message,
    };
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| GttnError::Io { path: path.display().to_string(), source: e })?;
    if bytes.len() < 8 {
        return Err(fmt(format!("file too short: {} bytes", bytes.len())));
    }
    if &bytes[0..4] != MAGIC {
        return Err(fmt("bad magic".into()));
    }
    let p = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    if p == 0 {
        return Err(fmt("order field is zero".into()));
    }
    let header = 8 + 8 * p;
    if bytes.len() < header {
        return Err(fmt(format!(
            "truncated dims: expected {header} header bytes, got {}",
            bytes.len()
        )));
    }
    let mut dims = Vec::with_capacity(p);
    let mut count: u128 = 1;
    for i in 0..p {
        let d = u64::from_le_bytes(bytes[8 + 8 * i..16 + 8 * i].try_into().unwrap());
        if d == 0 {
            return Err(fmt(format!("dims[{i}] is zero")));
        }
        count *= d as u128;
        if count > usize::MAX as u128 / 8 {
            return Err(fmt(format!("dims overflow at dims[{i}] = {d}")));
        }
        dims.push(d as usize);
    }
    let n = count as usize;
    let expected = header + 8 * n;
    if bytes.len() != expected {
        return Err(fmt(format!(
            "payload size mismatch: expected {expected} bytes, got {}",
            bytes.len()
        )));
    }
    let data: Vec<f64> = bytes[header..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DenseTensor::from_dims(&dims, data)
}

/// Save a dataset as a manifest plus per-task GTN1 files. Each task gets
/// a stacked input tensor `(n_i, d_1, .., d_q)` and a label vector.
pub fn save_dataset(dataset: &Dataset, dir: &Path) -> Result<PathBuf> {
    dataset.check_nonempty()?;
    fs::create_dir_all(dir).map_err(|e| GttnError::Io {
        path: dir.display().to_string(),
        source: e,
    })?;
    let mut manifest = String::new();
    manifest.push_str("gttn-dataset v1\n");
    manifest.push_str(&format!(
        "dims {}\n",
        dataset.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
    ));
    manifest.push_str(&format!("tasks {}\n", dataset.num_tasks()));
    let lk = match dataset.label_kind {
        LabelKind::Binary => "binary".to_string(),
        LabelKind::Multiclass { classes } => format!("multiclass:{classes}"),
    };
    manifest.push_str(&format!("label_kind {lk}\n"));
    for (i, task) in dataset.tasks.iter().enumerate() {
        let n = task.inputs.len();
        let mut stacked_dims = vec![n];
        stacked_dims.extend_from_slice(&dataset.dims);
        let mut data = Vec::with_capacity(n * dataset.dims.iter().product::<usize>());
        for x in &task.inputs {
            data.extend_from_slice(x.data());
        }
        let inputs_name = format!("task{}_inputs.gtn", i + 1);
        let labels_name = format!("task{}_labels.gtn", i + 1);
        save_tensor(&DenseTensor::from_dims(&stacked_dims, data)?, &dir.join(&inputs_name))?;
        save_tensor(
            &DenseTensor::from_dims(&[n], task.labels.clone())?,
            &dir.join(&labels_name),
        )?;
        manifest.push_str(&format!(
            "task {} count {n} inputs {inputs_name} labels {labels_name}\n",
            i + 1
        ));
    }
    let manifest_path = dir.join("dataset.manifest");
    write_atomic(&manifest_path, manifest.as_bytes())?;
    Ok(manifest_path)
}

/// Load a dataset from a manifest written by [`save_dataset`].
pub fn load_dataset(manifest_path: &Path) -> Result<Dataset> {
    let fmt = |message: String| GttnError::Format {
        path: manifest_path.display().to_string(),
        message,
    };
    let text = fs::read_to_string(manifest_path).map_err(|e| GttnError::Io {
        path: manifest_path.display().to_string(),
        source: e,
    })?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let mut lines = text.lines();
    if lines.next() != Some("gttn-dataset v1") {
        return Err(fmt("bad manifest header".into()));
    }
    let mut dims: Option<Vec<usize>> = None;
    let mut label_kind: Option<LabelKind> = None;
    let mut num_tasks: Option<usize> = None;
    let mut tasks: Vec<TaskData> = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [] => {}
            ["dims", list] => {
                dims = Some(
                    list.split(',')
                        .map(|d| d.parse::<usize>().map_err(|_| fmt(format!("bad dim '{d}'"))))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            ["tasks", n] => {
                num_tasks = Some(n.parse().map_err(|_| fmt(format!("bad task count '{n}'")))?);
            }
            ["label_kind", lk] => {
                label_kind = Some(if *lk == "binary" {
                    LabelKind::Binary
                } else if let Some(k) = lk.strip_prefix("multiclass:") {
                    LabelKind::Multiclass {
                        classes: k.parse().map_err(|_| fmt(format!("bad class count '{k}'")))?,
                    }
                } else {
                    return Err(fmt(format!("unknown label_kind '{lk}'")));
                });
            }
            ["task", _id, "count", count, "inputs", inputs, "labels", labels] => {
                let n: usize = count.parse().map_err(|_| fmt(format!("bad count '{count}'")))?;
                let stacked = load_tensor(&dir.join(inputs))?;
                let label_t = load_tensor(&dir.join(labels))?;
                if stacked.dims()[0] != n || label_t.len() != n {
                    return Err(fmt(format!("task file sizes disagree with count {n}")));
                }
                let example_dims = stacked.dims()[1..].to_vec();
                let stride: usize = example_dims.iter().product();
                let inputs = (0..n)
                    .map(|i| {
                        DenseTensor::from_dims(
                            &example_dims,
                            stacked.data()[i * stride..(i + 1) * stride].to_vec(),
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                tasks.push(TaskData { inputs, labels: label_t.data().to_vec() });
            }
            _ => return Err(fmt(format!("unrecognized manifest line '{line}'"))),
        }
    }
    let dims = dims.ok_or_else(|| fmt("missing dims".into()))?;
    let label_kind = label_kind.ok_or_else(|| fmt("missing label_kind".into()))?;
    if Some(tasks.len()) != num_tasks {
        return Err(fmt("task count disagrees with task lines".into()));
    }
    let ds = Dataset { tasks, dims, label_kind };
    ds.check_nonempty()?;
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::tensor::canonical_subsets;

    fn base_spec() -> SyntheticSpec {
        SyntheticSpec {
            dims: vec![4, 4, 4],
            tasks: 4,
            n0: 20,
            planted_subset: vec![1],
            planted_rank: 1,
            noise_std: 0.0,
            label_kind: LabelKind::Binary,
            seed: 1,
            input_alignment: 0.0,
        }
    }

    #[test]
    fn planted_flattening_has_exact_rank() {
        let spec = base_spec();
        let (_, truth) = generate_synthetic(&spec).unwrap();
        let s = AxisSubset::new(&[1], 4).unwrap();
        let svd = linalg::svd(&truth.flatten(&s).unwrap()).unwrap();
        assert!(svd.singular_values[0] > 0.0);
        for &sv in &svd.singular_values[1..] {
            assert!(sv < 1e-12, "rank > 1: {sv}");
        }
        assert!((truth.frobenius_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_binary_labels_match_sign() {
        let spec = base_spec();
        let (ds, truth) = generate_synthetic(&spec).unwrap();
        for (i, task) in ds.tasks.iter().enumerate() {
            for (x, &y) in task.inputs.iter().zip(&task.labels) {
                let score = planted_score(&truth, x, 0, 1, i + 1, spec.tasks);
                assert_eq!(y, if score >= 0.0 { 1.0 } else { -1.0 });
            }
        }
    }

    #[test]
    fn inputs_satisfy_unit_ball() {
        let (ds, _) = generate_synthetic(&base_spec()).unwrap();
        for task in &ds.tasks {
            for x in &task.inputs {
                let ip: f64 = x.data().iter().map(|v| v * v).sum();
                assert!(ip <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn other_flattenings_usually_full_rank() {
        // sigma_{r+1}/sigma_1 > 1e-6 for non-planted subsets in >= 90% of draws
        let mut ok = 0;
        let total = 50;
        for seed in 0..total {
            let mut spec = base_spec();
            spec.seed = seed;
            spec.n0 = 1;
            let (_, truth) = generate_synthetic(&spec).unwrap();
            let mut all_pass = true;
            for s in canonical_subsets(4).unwrap() {
                if s.indices() == [1] {
                    continue;
                }
                let svd = linalg::svd(&truth.flatten(&s).unwrap()).unwrap();
                let r = spec.planted_rank;
                if svd.singular_values[r] / svd.singular_values[0] <= 1e-6 {
                    all_pass = false;
                }
            }
            if all_pass {
                ok += 1;
            }
        }
        assert!(ok * 10 >= total * 9, "only {ok}/{total} draws full-rank off the plant");
    }

    #[test]
    fn planted_subset_has_minimal_trace_norm_usually() {
        let mut ok = 0;
        let total = 50;
        for seed in 100..100 + total {
            let mut spec = base_spec();
            spec.seed = seed;
            spec.n0 = 1;
            let (_, truth) = generate_synthetic(&spec).unwrap();
            let planted = AxisSubset::new(&[1], 4).unwrap();
            let planted_norm = linalg::trace_norm(&truth.flatten(&planted).unwrap()).unwrap();
            let minimal = canonical_subsets(4).unwrap().iter().all(|s| {
                linalg::trace_norm(&truth.flatten(s).unwrap()).unwrap() >= planted_norm - 1e-10
            });
            if minimal {
                ok += 1;
            }
        }
        assert!(ok * 10 >= total * 9, "planted subset minimal in only {ok}/{total}");
    }

    #[test]
    fn rank_too_large_is_config_error() {
        let mut spec = base_spec();
        spec.planted_rank = 5; // min(4, 64) = 4
        assert!(matches!(generate_synthetic(&spec), Err(GttnError::Config(_))));
    }

    #[test]
    fn split_sizes_and_determinism() {
        let mut spec = base_spec();
        spec.n0 = 10;
        let (ds, _) = generate_synthetic(&spec).unwrap();
        let (train, test) = split(&ds, 0.5, 7).unwrap();
        for t in &train.tasks {
            assert_eq!(t.inputs.len(), 5);
        }
        for t in &test.tasks {
            assert_eq!(t.inputs.len(), 5);
        }
        let (train2, _) = split(&ds, 0.5, 7).unwrap();
        for (a, b) in train.tasks.iter().zip(&train2.tasks) {
            assert_eq!(a.labels, b.labels);
            for (x, y) in a.inputs.iter().zip(&b.inputs) {
                assert_eq!(x.data(), y.data());
            }
        }
        let (train3, _) = split(&ds, 0.5, 8).unwrap();
        let same = train
            .tasks
            .iter()
            .zip(&train3.tasks)
            .all(|(a, b)| a.inputs.iter().zip(&b.inputs).all(|(x, y)| x.data() == y.data()));
        assert!(!same, "different seed should permute differently");
    }

    #[test]
    fn split_union_is_original_multiset() {
        let mut spec = base_spec();
        spec.n0 = 13;
        let (ds, _) = generate_synthetic(&spec).unwrap();
        let (train, test) = split(&ds, 0.6, 3).unwrap();
        for ((orig, tr), te) in ds.tasks.iter().zip(&train.tasks).zip(&test.tasks) {
            let mut combined: Vec<u64> = tr
                .inputs
                .iter()
                .chain(&te.inputs)
                .map(|x| x.data().iter().map(|v| v.to_bits()).fold(0u64, |a, b| a ^ b.rotate_left(13)))
                .collect();
            let mut original: Vec<u64> = orig
                .inputs
                .iter()
                .map(|x| x.data().iter().map(|v| v.to_bits()).fold(0u64, |a, b| a ^ b.rotate_left(13)))
                .collect();
            combined.sort_unstable();
            original.sort_unstable();
            assert_eq!(combined, original);
        }
    }

    #[test]
    fn split_rejects_degenerate() {
        let mut spec = base_spec();
        spec.n0 = 1;
        let (ds, _) = generate_synthetic(&spec).unwrap();
        assert!(split(&ds, 0.5, 1).is_err());
        assert!(split(&ds, 0.0, 1).is_err());
        assert!(split(&ds, 1.0, 1).is_err());
    }

    #[test]
    fn tensor_roundtrip_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for dims in [vec![2, 3, 4], vec![7], vec![2, 2, 2, 2, 2, 2]] {
            let n: usize = dims.iter().product();
            let t = DenseTensor::from_dims(
                &dims,
                (0..n).map(|_| rng.gen::<f64>() * 100.0 - 50.0).collect(),
            )
            .unwrap();
            let path = dir.path().join("t.gtn");
            save_tensor(&t, &path).unwrap();
            let back = load_tensor(&path).unwrap();
            assert_eq!(back.dims(), t.dims());
            let same = back
                .data()
                .iter()
                .zip(t.data())
                .all(|(a, b)| a.to_bits() == b.to_bits());
            assert!(same);
        }
    }

    #[test]
    fn tensor_format_errors() {
        let dir = tempfile::tempdir().unwrap();
        let bad_magic = dir.path().join("bad.gtn");
        fs::write(&bad_magic, b"XXXX\x01\x00\x00\x00").unwrap();
        match load_tensor(&bad_magic) {
            Err(GttnError::Format { message, .. }) => assert!(message.contains("bad magic")),
            other => panic!("expected format error, got {other:?}"),
        }

        let t = DenseTensor::from_dims(&[2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let path = dir.path().join("trunc.gtn");
        save_tensor(&t, &path).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 8); // one f64 short
        fs::write(&path, &bytes).unwrap();
        match load_tensor(&path) {
            Err(GttnError::Format { message, .. }) => {
                assert!(message.contains("expected") && message.contains("got"), "{message}");
            }
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn dataset_manifest_roundtrip() {
        let mut spec = base_spec();
        spec.n0 = 6;
        spec.label_kind = LabelKind::Multiclass { classes: 3 };
        let (ds, _) = generate_synthetic(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let manifest = save_dataset(&ds, dir.path()).unwrap();
        let back = load_dataset(&manifest).unwrap();
        assert_eq!(back.num_tasks(), ds.num_tasks());
        assert_eq!(back.dims, ds.dims);
        assert_eq!(back.label_kind, ds.label_kind);
        for (a, b) in back.tasks.iter().zip(&ds.tasks) {
            assert_eq!(a.labels, b.labels);
            for (x, y) in a.inputs.iter().zip(&b.inputs) {
                assert_eq!(x.data(), y.data());
            }
        }
    }
}
