//! Multi-task predictors whose stacked per-task parameters form the
//! regularized tensor (last axis = task axis), plus losses and gradients.
//!
//! Three architectures:
//! - a linear tensor-inner-product model,
//! - a two-layer fully-connected net for vector inputs (shared first
//!   layer, per-task heads),
//! - a mode-wise multilinear net for 3-way inputs (shared per-mode
//!   transforms with rectifier activations, per-task heads).
//!
//! In every case only the stacked head tensor is regularized; shared
//! layers are trained unregularized.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{GttnError, Result};
use crate::linalg::Matrix;
use crate::tensor::{AxisSubset, DenseTensor};

/// Loss applied to forward scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    /// Multiclass cross-entropy over >= 2 scores; label is a class index.
    CrossEntropy,
    /// Squared error on a single score; label is a real value.
    Square,
    /// Binary logistic loss on a single score; label is +1 or -1.
    Logistic,
}

/// One task's mini-batch. `task_id` is 1-based.
#[derive(Debug, Clone)]
pub struct Batch {
    pub task_id: usize,
    pub inputs: Vec<DenseTensor>,
    pub labels: Vec<f64>,
}

impl Batch {
    pub fn new(task_id: usize, inputs: Vec<DenseTensor>, labels: Vec<f64>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(GttnError::InvalidArgument("empty batch".into()));
        }
        if inputs.len() != labels.len() {
            return Err(GttnError::InvalidArgument(format!(
                "{} inputs but {} labels",
                inputs.len(),
                labels.len()
            )));
        }
        let shape = inputs[0].shape().clone();
        if inputs.iter().any(|x| x.shape() != &shape) {
            return Err(GttnError::Shape("batch inputs have mixed shapes".into()));
        }
        Ok(Batch { task_id, inputs, labels })
    }
}

/// Loss value for one example.
pub fn loss(scores: &[f64], label: f64, kind: LossKind) -> Result<f64> {
    match kind {
        LossKind::CrossEntropy => {
            let k = scores.len();
            if k < 2 {
                return Err(GttnError::InvalidArgument(
                    "cross-entropy needs at least 2 scores".into(),
                ));
            }
            let class = label as usize;
            if label < 0.0 || label.fract() != 0.0 || class >= k {
                return Err(GttnError::InvalidArgument(format!(
                    "label {label} out of range for {k} classes"
                )));
            }
            Ok(log_sum_exp(scores) - scores[class])
        }
        LossKind::Square => {
            check_scalar_score(scores)?;
            let d = scores[0] - label;
            Ok(d * d)
        }
        LossKind::Logistic => {
            check_scalar_score(scores)?;
            if label != 1.0 && label != -1.0 {
                return Err(GttnError::InvalidArgument(format!(
                    "logistic label must be +1 or -1, got {label}"
                )));
            }
            // ln(1 + exp(-y s)), stable for large |s|
            let z = -label * scores[0];
            Ok(if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() })
        }
    }
}

/// d loss / d scores for one example.
pub fn loss_grad(scores: &[f64], label: f64, kind: LossKind) -> Result<Vec<f64>> {
    match kind {
        LossKind::CrossEntropy => {
            // checks shared with loss()
            loss(scores, label, kind)?;
            let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
            let sum: f64 = exps.iter().sum();
            let class = label as usize;
            Ok(exps
                .iter()
                .enumerate()
                .map(|(c, e)| e / sum - if c == class { 1.0 } else { 0.0 })
                .collect())
        }
        LossKind::Square => {
            check_scalar_score(scores)?;
            Ok(vec![2.0 * (scores[0] - label)])
        }
        LossKind::Logistic => {
            loss(scores, label, kind)?;
            let z = -label * scores[0];
            let sig = 1.0 / (1.0 + (-z).exp());
            Ok(vec![-label * sig])
        }
    }
}

fn check_scalar_score(scores: &[f64]) -> Result<()> {
    if scores.len() != 1 {
        return Err(GttnError::InvalidArgument(format!(
            "expected a single score, got {}",
            scores.len()
        )));
    }
    Ok(())
}

fn log_sum_exp(scores: &[f64]) -> f64 {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln()
}

/// Gradient blocks parallel to [`Model::blocks`].
#[derive(Debug, Clone)]
pub struct ModelGradient {
    pub blocks: Vec<DenseTensor>,
}

/// Linear per-task predictor: scores are inner products of head slices
/// with the input. Head shape is `input_dims (x classes) x tasks`.
#[derive(Debug, Clone)]
pub struct LinearModel {
    head: DenseTensor,
    input_dims: Vec<usize>,
    classes: usize,
    tasks: usize,
}

impl LinearModel {
    /// `classes = 1` gives a scalar-score model (logistic/square losses);
    /// `classes >= 2` appends a class axis before the task axis.
    pub fn init(input_dims: &[usize], classes: usize, tasks: usize, seed: u64) -> Result<Self> {
        if tasks < 2 {
            return Err(GttnError::InvalidArgument(format!(
                "need at least 2 tasks, got {tasks}"
            )));
        }
        let mut dims = input_dims.to_vec();
        if classes >= 2 {
            dims.push(classes);
        }
        dims.push(tasks);
        let fan_in: usize = input_dims.iter().product();
        let head = init_tensor(&dims, fan_in, seed);
        Ok(LinearModel {
            head,
            input_dims: input_dims.to_vec(),
            classes: classes.max(1),
            tasks,
        })
    }

    pub fn with_head(head: DenseTensor, classes: usize, tasks: usize) -> Result<Self> {
        let classes = classes.max(1);
        let extra = if classes >= 2 { 2 } else { 1 };
        let p = head.order();
        if p < extra + 1 {
            return Err(GttnError::Shape("head tensor order too small".into()));
        }
        let input_dims = head.dims()[..p - extra].to_vec();
        if head.dims()[p - 1] != tasks {
            return Err(GttnError::Shape("last axis must equal task count".into()));
        }
        if classes >= 2 && head.dims()[p - 2] != classes {
            return Err(GttnError::Shape("class axis mismatch".into()));
        }
        Ok(LinearModel { head, input_dims, classes, tasks })
    }

    fn check_input(&self, x: &DenseTensor) -> Result<()> {
        if x.dims() != self.input_dims.as_slice() {
            return Err(GttnError::Shape(format!(
                "input dims {:?}, model expects {:?}",
                x.dims(),
                self.input_dims
            )));
        }
        Ok(())
    }

    fn scores(&self, task: usize, x: &DenseTensor) -> Vec<f64> {
        let d: usize = self.input_dims.iter().product();
        let k = self.classes;
        let m = self.tasks;
        let w = self.head.data();
        let mut out = vec![0.0; k];
        for (c, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, xv) in x.data().iter().enumerate() {
                acc += xv * w[j * k * m + c * m + (task - 1)];
            }
            let _ = d;
            *o = acc;
        }
        out
    }
}

/// Two-layer fully-connected net for vector inputs: shared rectified
/// layer, per-task linear heads stacked into a 3-way tensor.
#[derive(Debug, Clone)]
pub struct TwoLayerNet {
    shared: DenseTensor, // (hidden, input)
    head: DenseTensor,   // (hidden, classes, tasks)
    input_dim: usize,
    hidden: usize,
    classes: usize,
    tasks: usize,
}

impl TwoLayerNet {
    pub fn init(
        input_dim: usize,
        hidden: usize,
        classes: usize,
        tasks: usize,
        seed: u64,
    ) -> Result<Self> {
        if classes < 2 {
            return Err(GttnError::InvalidArgument(
                "two-layer net needs >= 2 classes".into(),
            ));
        }
        let shared = init_tensor(&[hidden, input_dim], input_dim, seed);
        let head = init_tensor(&[hidden, classes, tasks], hidden, seed.wrapping_add(1));
        Ok(TwoLayerNet { shared, head, input_dim, hidden, classes, tasks })
    }

    fn hidden_activation(&self, x: &DenseTensor) -> Vec<f64> {
        let mut z = vec![0.0; self.hidden];
        let s = self.shared.data();
        for (h, zv) in z.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, xv) in x.data().iter().enumerate() {
                acc += s[h * self.input_dim + j] * xv;
            }
            *zv = acc.max(0.0);
        }
        z
    }

    fn head_scores(&self, task: usize, hidden: &[f64]) -> Vec<f64> {
        let k = self.classes;
        let m = self.tasks;
        let w = self.head.data();
        (0..k)
            .map(|c| {
                hidden
                    .iter()
                    .enumerate()
                    .map(|(h, a)| a * w[h * k * m + c * m + (task - 1)])
                    .sum()
            })
            .collect()
    }
}

/// Mode-wise multilinear net for 3-way inputs: one transform matrix per
/// mode with a rectifier after each mode product, then per-task heads
/// stacked into a 5-way tensor (hidden dims x classes x tasks).
#[derive(Debug, Clone)]
pub struct MultilinearNet {
    modes: [DenseTensor; 3], // (h_k, d_k) each
    head: DenseTensor,       // (h1, h2, h3, classes, tasks)
    input_dims: [usize; 3],
    #[allow(dead_code)]
    hidden: [usize; 3],
    classes: usize,
    tasks: usize,
}

impl MultilinearNet {
    pub fn init(
        input_dims: [usize; 3],
        hidden: [usize; 3],
        classes: usize,
        tasks: usize,
        seed: u64,
    ) -> Result<Self> {
        if classes < 2 {
            return Err(GttnError::InvalidArgument(
                "multilinear net needs >= 2 classes".into(),
            ));
        }
        let modes = [
            init_tensor(&[hidden[0], input_dims[0]], input_dims[0], seed),
            init_tensor(&[hidden[1], input_dims[1]], input_dims[1], seed.wrapping_add(1)),
            init_tensor(&[hidden[2], input_dims[2]], input_dims[2], seed.wrapping_add(2)),
        ];
        let head = init_tensor(
            &[hidden[0], hidden[1], hidden[2], classes, tasks],
            hidden.iter().product(),
            seed.wrapping_add(3),
        );
        Ok(MultilinearNet { modes, head, input_dims, hidden, classes, tasks })
    }

    /// Set transforms/head directly (test hook for hand-constructed nets).
    pub fn with_params(
        modes: [DenseTensor; 3],
        head: DenseTensor,
        classes: usize,
        tasks: usize,
    ) -> Result<Self> {
        let input_dims = [modes[0].dims()[1], modes[1].dims()[1], modes[2].dims()[1]];
        let hidden = [modes[0].dims()[0], modes[1].dims()[0], modes[2].dims()[0]];
        if head.dims() != [hidden[0], hidden[1], hidden[2], classes, tasks] {
            return Err(GttnError::Shape("head dims mismatch".into()));
        }
        Ok(MultilinearNet { modes, head, input_dims, hidden, classes, tasks })
    }

    /// Forward pass keeping pre-activation intermediates for backprop.
    fn forward_cached(&self, x: &DenseTensor) -> Result<MlCache> {
        let mut pre = Vec::with_capacity(3);
        let mut post = Vec::with_capacity(3);
        let mut cur = x.clone();
        for (k, mode) in self.modes.iter().enumerate() {
            let u = tensor_as_matrix(mode);
            let z = mode_product(&cur, &u, k + 1)?;
            let a = relu_tensor(&z);
            pre.push(z);
            cur = a.clone();
            post.push(a);
        }
        Ok(MlCache { pre, post })
    }

    fn head_scores(&self, task: usize, hidden: &DenseTensor) -> Vec<f64> {
        let k = self.classes;
        let m = self.tasks;
        let w = self.head.data();
        let n = hidden.len();
        (0..k)
            .map(|c| {
                (0..n)
                    .map(|j| hidden.data()[j] * w[j * k * m + c * m + (task - 1)])
                    .sum()
            })
            .collect()
    }
}

struct MlCache {
    pre: Vec<DenseTensor>,
    post: Vec<DenseTensor>,
}

/// Mode-k product: contracts axis k (1-based) of `t` with the columns of
/// `u`, replacing d_k by u.rows.
pub fn mode_product(t: &DenseTensor, u: &Matrix, mode: usize) -> Result<DenseTensor> {
    let p = t.order();
    if mode < 1 || mode > p {
        return Err(GttnError::InvalidArgument(format!("mode {mode} for order {p}")));
    }
    if u.cols() != t.dims()[mode - 1] {
        return Err(GttnError::Shape(format!(
            "mode-{mode} product: {} columns vs axis size {}",
            u.cols(),
            t.dims()[mode - 1]
        )));
    }
    if p == 1 {
        // plain matrix-vector
        let mut out = vec![0.0; u.rows()];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..u.cols()).map(|c| u.get(r, c) * t.data()[c]).sum();
        }
        return DenseTensor::from_dims(&[u.rows()], out);
    }
    let s = AxisSubset::new(&[mode], p)?;
    let flat = t.flatten(&s)?;
    let prod = u.matmul(&flat)?;
    let mut new_dims = t.dims().to_vec();
    new_dims[mode - 1] = u.rows();
    DenseTensor::unflatten(&prod, &AxisSubset::new(&[mode], p)?, &new_dims)
}

fn relu_tensor(t: &DenseTensor) -> DenseTensor {
    DenseTensor::from_dims(t.dims(), t.data().iter().map(|v| v.max(0.0)).collect()).unwrap()
}

fn tensor_as_matrix(t: &DenseTensor) -> Matrix {
    Matrix::new(t.dims()[0], t.dims()[1], t.data().to_vec()).unwrap()
}

fn init_tensor(dims: &[usize], fan_in: usize, seed: u64) -> DenseTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (fan_in as f64).sqrt();
    let n: usize = dims.iter().product();
    DenseTensor::from_dims(
        dims,
        (0..n).map(|_| (rng.gen::<f64>() * 2.0 - 1.0) * scale).collect(),
    )
    .unwrap()
}

/// A multi-task model with named parameter blocks; the last block is
/// always the regularized head tensor.
#[derive(Debug, Clone)]
pub enum Model {
    Linear(LinearModel),
    TwoLayer(TwoLayerNet),
    Multilinear(MultilinearNet),
}

impl Model {
    pub fn num_tasks(&self) -> usize {
        match self {
            Model::Linear(m) => m.tasks,
            Model::TwoLayer(m) => m.tasks,
            Model::Multilinear(m) => m.tasks,
        }
    }

    pub fn num_classes(&self) -> usize {
        match self {
            Model::Linear(m) => m.classes,
            Model::TwoLayer(m) => m.classes,
            Model::Multilinear(m) => m.classes,
        }
    }

    pub fn block_names(&self) -> Vec<&'static str> {
        match self {
            Model::Linear(_) => vec!["head"],
            Model::TwoLayer(_) => vec!["shared", "head"],
            Model::Multilinear(_) => vec!["mode1", "mode2", "mode3", "head"],
        }
    }

    pub fn blocks(&self) -> Vec<&DenseTensor> {
        match self {
            Model::Linear(m) => vec![&m.head],
            Model::TwoLayer(m) => vec![&m.shared, &m.head],
            Model::Multilinear(m) => {
                vec![&m.modes[0], &m.modes[1], &m.modes[2], &m.head]
            }
        }
    }

    pub fn blocks_mut(&mut self) -> Vec<&mut DenseTensor> {
        match self {
            Model::Linear(m) => vec![&mut m.head],
            Model::TwoLayer(m) => vec![&mut m.shared, &mut m.head],
            Model::Multilinear(m) => {
                let [a, b, c] = &mut m.modes;
                vec![a, b, c, &mut m.head]
            }
        }
    }

    /// Index of the regularized head block within [`blocks`](Self::blocks).
    pub fn regularized_index(&self) -> usize {
        self.blocks().len() - 1
    }

    pub fn regularized_block(&self) -> &DenseTensor {
        *self.blocks().last().unwrap()
    }

    fn check_task(&self, task_id: usize) -> Result<()> {
        if task_id < 1 || task_id > self.num_tasks() {
            return Err(GttnError::InvalidArgument(format!(
                "task {task_id} out of 1..={}",
                self.num_tasks()
            )));
        }
        Ok(())
    }

    /// Deterministic per-task scores for one input.
    pub fn forward(&self, task_id: usize, x: &DenseTensor) -> Result<Vec<f64>> {
        self.check_task(task_id)?;
        match self {
            Model::Linear(m) => {
                m.check_input(x)?;
                Ok(m.scores(task_id, x))
            }
            Model::TwoLayer(m) => {
                if x.dims() != [m.input_dim] {
                    return Err(GttnError::Shape(format!(
                        "expected vector input of length {}",
                        m.input_dim
                    )));
                }
                let hidden = m.hidden_activation(x);
                Ok(m.head_scores(task_id, &hidden))
            }
            Model::Multilinear(m) => {
                if x.dims() != m.input_dims {
                    return Err(GttnError::Shape(format!(
                        "expected 3-way input of dims {:?}",
                        m.input_dims
                    )));
                }
                let cache = m.forward_cached(x)?;
                Ok(m.head_scores(task_id, &cache.post[2]))
            }
        }
    }

    /// Gradient of the mean batch loss with respect to every parameter
    /// block. Shared blocks receive contributions from the batch's task
    /// only; head gradients land in that task's slice.
    pub fn backward(&self, batch: &Batch, kind: LossKind) -> Result<ModelGradient> {
        self.check_task(batch.task_id)?;
        let n = batch.inputs.len() as f64;
        let mut grads: Vec<DenseTensor> = self
            .blocks()
            .iter()
            .map(|b| DenseTensor::zeros(b.dims()).unwrap())
            .collect();

        for (x, &label) in batch.inputs.iter().zip(&batch.labels) {
            match self {
                Model::Linear(m) => {
                    m.check_input(x)?;
                    let scores = m.scores(batch.task_id, x);
                    let g = loss_grad(&scores, label, kind)?;
                    let k = m.classes;
                    let mm = m.tasks;
                    let gw = grads[0].data_mut();
                    for (c, gc) in g.iter().enumerate() {
                        let w = gc / n;
                        for (j, xv) in x.data().iter().enumerate() {
                            gw[j * k * mm + c * mm + (batch.task_id - 1)] += w * xv;
                        }
                    }
                }
                Model::TwoLayer(m) => {
                    let scores = self.forward(batch.task_id, x)?;
                    let g = loss_grad(&scores, label, kind)?;
                    // recompute hidden pre-activations
                    let mut z = vec![0.0; m.hidden];
                    for (h, zv) in z.iter_mut().enumerate() {
                        *zv = (0..m.input_dim)
                            .map(|j| m.shared.data()[h * m.input_dim + j] * x.data()[j])
                            .sum();
                    }
                    let a: Vec<f64> = z.iter().map(|v| v.max(0.0)).collect();
                    let k = m.classes;
                    let mm = m.tasks;
                    // head gradient
                    {
                        let gh = grads[1].data_mut();
                        for (c, gc) in g.iter().enumerate() {
                            let w = gc / n;
                            for (h, av) in a.iter().enumerate() {
                                gh[h * k * mm + c * mm + (batch.task_id - 1)] += w * av;
                            }
                        }
                    }
                    // shared gradient through relu
                    let gs = grads[0].data_mut();
                    for (h, zv) in z.iter().enumerate() {
                        if *zv <= 0.0 {
                            continue;
                        }
                        let da: f64 = g
                            .iter()
                            .enumerate()
                            .map(|(c, gc)| {
                                gc * m.head.data()[h * k * mm + c * mm + (batch.task_id - 1)]
                            })
                            .sum();
                        let w = da / n;
                        for (j, xv) in x.data().iter().enumerate() {
                            gs[h * m.input_dim + j] += w * xv;
                        }
                    }
                }
                Model::Multilinear(m) => {
                    let cache = m.forward_cached(x)?;
                    let scores = m.head_scores(batch.task_id, &cache.post[2]);
                    let g = loss_grad(&scores, label, kind)?;
                    let k = m.classes;
                    let mm = m.tasks;
                    let hidden = &cache.post[2];
                    // head gradient
                    {
                        let gh = grads[3].data_mut();
                        for (c, gc) in g.iter().enumerate() {
                            let w = gc / n;
                            for (j, hv) in hidden.data().iter().enumerate() {
                                gh[j * k * mm + c * mm + (batch.task_id - 1)] += w * hv;
                            }
                        }
                    }
                    // gradient into the last hidden tensor
                    let mut dcur = DenseTensor::zeros(hidden.dims())?;
                    {
                        let dd = dcur.data_mut();
                        for (c, gc) in g.iter().enumerate() {
                            for (j, dv) in dd.iter_mut().enumerate() {
                                *dv += gc
                                    * m.head.data()[j * k * mm + c * mm + (batch.task_id - 1)];
                            }
                        }
                    }
                    // backprop through the three mode layers, last first
                    for layer in (0..3).rev() {
                        // relu mask
                        let mut dz = dcur.clone();
                        for (dv, pv) in dz.data_mut().iter_mut().zip(cache.pre[layer].data()) {
                            if *pv <= 0.0 {
                                *dv = 0.0;
                            }
                        }
                        let layer_input: DenseTensor = if layer == 0 {
                            x.clone()
                        } else {
                            cache.post[layer - 1].clone()
                        };
                        let p = dz.order();
                        let s = AxisSubset::new(&[layer + 1], p)?;
                        let dz_flat = dz.flatten(&s)?;
                        let in_flat = layer_input.flatten(&s)?;
                        // dU = dZ_(k) X_(k)^T
                        let du = dz_flat.matmul(&in_flat.transpose())?;
                        {
                            let gm = grads[layer].data_mut();
                            for (slot, v) in gm.iter_mut().zip(du.data()) {
                                *slot += v / n;
                            }
                        }
                        if layer > 0 {
                            let u = tensor_as_matrix(&m.modes[layer]);
                            dcur = mode_product(&dz, &u.transpose(), layer + 1)?;
                        }
                    }
                }
            }
        }
        Ok(ModelGradient { blocks: grads })
    }
}
