//! Joint stochastic training of model parameters and flattening weights,
//! with per-epoch metrics and weight-trajectory recording.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{GttnError, Result};
use crate::model::{Batch, LossKind, Model};
use crate::regularizers::{
    self, min_form_value, RegularizerSpec, WeightMode, WeightState,
};
use crate::tensor::DenseTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Adam,
    Sgd,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub lambda: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub seed: u64,
    pub optimizer: Optimizer,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub lr_base: f64,
    /// Evaluate and record metrics every this many epochs (and always on
    /// the final epoch).
    pub eval_every: usize,
    pub train_proportion: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda: 0.25,
            batch_size: 16,
            max_epochs: 50,
            seed: 0,
            optimizer: Optimizer::Adam,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            lr_base: 0.02,
            eval_every: 1,
            train_proportion: 0.5,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.lambda >= 0.0) {
            problems.push(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if self.batch_size == 0 {
            problems.push("batch_size must be >= 1".into());
        }
        if !(self.lr_base > 0.0 && self.lr_base.is_finite()) {
            problems.push(format!("lr_base must be positive, got {}", self.lr_base));
        }
        if !(0.0 <= self.adam_beta1 && self.adam_beta1 < 1.0) {
            problems.push(format!("adam_beta1 must be in [0,1), got {}", self.adam_beta1));
        }
        if !(0.0 <= self.adam_beta2 && self.adam_beta2 < 1.0) {
            problems.push(format!("adam_beta2 must be in [0,1), got {}", self.adam_beta2));
        }
        if !(self.adam_epsilon > 0.0) {
            problems.push(format!("adam_epsilon must be positive, got {}", self.adam_epsilon));
        }
        if self.eval_every == 0 {
            problems.push("eval_every must be >= 1".into());
        }
        if !(0.0 < self.train_proportion && self.train_proportion < 1.0) {
            problems.push(format!(
                "train_proportion must be in (0,1), got {}",
                self.train_proportion
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(GttnError::Config(problems))
        }
    }
}

/// Decaying step size: `lr_base / (1 + iteration)`.
pub fn lr_schedule(iteration: usize, lr_base: f64) -> f64 {
    lr_base / (1.0 + iteration as f64)
}

/// Adam/SGD accumulators for every model block plus the weight logits.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub iteration: usize,
    /// Input to [`lr_schedule`]; the trainer advances it once per epoch so
    /// the rate decays on the epoch scale, not per batch.
    pub schedule_index: usize,
    block_m: Vec<Vec<f64>>,
    block_v: Vec<Vec<f64>>,
    beta_m: Vec<f64>,
    beta_v: Vec<f64>,
}

impl OptimizerState {
    pub fn new(model: &Model, weights: &WeightState) -> Self {
        let sizes: Vec<usize> = model.blocks().iter().map(|b| b.len()).collect();
        OptimizerState {
            iteration: 0,
            schedule_index: 0,
            block_m: sizes.iter().map(|&n| vec![0.0; n]).collect(),
            block_v: sizes.iter().map(|&n| vec![0.0; n]).collect(),
            beta_m: vec![0.0; weights.beta().len()],
            beta_v: vec![0.0; weights.beta().len()],
        }
    }
}

fn apply_update(
    params: &mut [f64],
    grad: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    lr: f64,
    t: usize,
    config: &TrainConfig,
) {
    match config.optimizer {
        Optimizer::Sgd => {
            for (p, g) in params.iter_mut().zip(grad) {
                *p -= lr * g;
            }
        }
        Optimizer::Adam => {
            let (b1, b2) = (config.adam_beta1, config.adam_beta2);
            let bc1 = 1.0 - b1.powi(t as i32 + 1);
            let bc2 = 1.0 - b2.powi(t as i32 + 1);
            for (((p, g), mi), vi) in params.iter_mut().zip(grad).zip(m).zip(v) {
                *mi = b1 * *mi + (1.0 - b1) * g;
                *vi = b2 * *vi + (1.0 - b2) * g * g;
                let m_hat = *mi / bc1;
                let v_hat = *vi / bc2;
                *p -= lr * m_hat / (v_hat.sqrt() + config.adam_epsilon);
            }
        }
    }
}

fn check_finite(grad: &[f64], iteration: usize, block: &str) -> Result<f64> {
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    if norm.is_finite() {
        Ok(norm)
    } else {
        Err(GttnError::NonFiniteGradient {
            iteration,
            block: block.to_string(),
            norm,
        })
    }
}

/// One optimizer update on a single batch: data gradient plus
/// `lambda * reg_subgrad_w` on the regularized block, and the weight-logit
/// gradient when the weights are learnable.
pub fn step(
    model: &mut Model,
    weights: &mut WeightState,
    batch: &Batch,
    spec: &RegularizerSpec,
    loss_kind: LossKind,
    config: &TrainConfig,
    state: &mut OptimizerState,
) -> Result<()> {
    let t = state.iteration;
    let lr = lr_schedule(state.schedule_index, config.lr_base);
    let mut grads = model.backward(batch, loss_kind)?;

    let reg_idx = model.regularized_index();
    if config.lambda > 0.0 {
        let sub = regularizers::reg_subgrad_w(model.regularized_block(), spec, weights)?;
        grads.blocks[reg_idx] = grads.blocks[reg_idx].add(&sub.scale(config.lambda))?;
    }
    let names = model.block_names();
    for (i, g) in grads.blocks.iter().enumerate() {
        check_finite(g.data(), t, names[i])?;
    }

    let beta_grad = if spec.weight_mode == WeightMode::LearnableSoftmax && config.lambda > 0.0 {
        let g = regularizers::reg_grad_beta(model.regularized_block(), spec, weights, config.lambda)?;
        check_finite(&g, t, "beta")?;
        Some(g)
    } else {
        None
    };

    for (i, block) in model.blocks_mut().into_iter().enumerate() {
        apply_update(
            block.data_mut(),
            grads.blocks[i].data(),
            &mut state.block_m[i],
            &mut state.block_v[i],
            lr,
            t,
            config,
        );
    }
    if let Some(g) = beta_grad {
        let mut beta = weights.beta().to_vec();
        apply_update(&mut beta, &g, &mut state.beta_m, &mut state.beta_v, lr, t, config);
        *weights = WeightState::from_beta(beta)?;
        let alpha_sum: f64 = weights.alpha().iter().sum();
        debug_assert!((alpha_sum - 1.0).abs() < 1e-10 && weights.alpha().iter().all(|&a| a >= 0.0));
    }
    state.iteration = t + 1;
    Ok(())
}

/// One loss/accuracy row of the metrics table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub epoch: usize,
    pub task: usize,
    pub split: &'static str,
    pub loss: f64,
    pub accuracy: f64,
    pub reg_value: f64,
    pub min_form_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub task: usize,
    pub loss: f64,
    pub accuracy: f64,
}

/// Predicted class index (0-based; sign encoded as +1/-1 for scalar scores).
pub fn predict(scores: &[f64]) -> f64 {
    if scores.len() == 1 {
        if scores[0] >= 0.0 {
            1.0
        } else {
            -1.0
        }
    } else {
        let mut best = 0;
        for (i, s) in scores.iter().enumerate() {
            if *s > scores[best] {
                best = i;
            }
        }
        best as f64
    }
}

/// Mean loss and accuracy per task.
pub fn evaluate(model: &Model, dataset: &Dataset, loss_kind: LossKind) -> Result<Vec<EvalRow>> {
    dataset.check_nonempty()?;
    let mut rows = Vec::with_capacity(dataset.num_tasks());
    for (i, task) in dataset.tasks.iter().enumerate() {
        let mut total_loss = 0.0;
        let mut correct = 0usize;
        for (x, &label) in task.inputs.iter().zip(&task.labels) {
            let scores = model.forward(i + 1, x)?;
            total_loss += crate::model::loss(&scores, label, loss_kind)?;
            if predict(&scores) == label {
                correct += 1;
            }
        }
        let n = task.inputs.len();
        rows.push(EvalRow {
            task: i + 1,
            loss: total_loss / n as f64,
            accuracy: correct as f64 / n as f64,
        });
    }
    Ok(rows)
}

/// Everything a finished run produces.
#[derive(Debug, Clone)]
pub struct TrainedRun {
    pub model: Model,
    pub weights: WeightState,
    pub metrics: Vec<MetricRow>,
    /// Per recorded epoch: (epoch, alpha vector in spec subset order).
    pub alpha_trace: Vec<(usize, Vec<f64>)>,
}

/// Per-task round-robin batch order for one epoch. Each task's examples
/// are shuffled once; cursors wrap within the epoch so every step draws a
/// full batch. The epoch has `ceil(total / batch_size)` steps.
fn epoch_batches(
    dataset: &Dataset,
    batch_size: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, Vec<usize>)> {
    let m = dataset.num_tasks();
    let mut orders: Vec<Vec<usize>> = dataset
        .tasks
        .iter()
        .map(|t| (0..t.inputs.len()).collect())
        .collect();
    for o in orders.iter_mut() {
        o.shuffle(rng);
    }
    let total: usize = dataset.total_examples();
    let steps = total.div_ceil(batch_size);
    let mut cursors = vec![0usize; m];
    let mut batches = Vec::with_capacity(steps);
    for step in 0..steps {
        let task = step % m;
        let order = &orders[task];
        let idx: Vec<usize> = (0..batch_size.min(order.len()))
            .map(|k| order[(cursors[task] + k) % order.len()])
            .collect();
        cursors[task] = (cursors[task] + idx.len()) % order.len();
        batches.push((task + 1, idx));
    }
    batches
}

/// Train for `max_epochs` epochs, recording metrics every `eval_every`
/// epochs (plus the last). Deterministic given the seed.
pub fn train(
    mut model: Model,
    mut weights: WeightState,
    train_set: &Dataset,
    test_set: Option<&Dataset>,
    spec: &RegularizerSpec,
    loss_kind: LossKind,
    config: &TrainConfig,
) -> Result<TrainedRun> {
    config.validate()?;
    train_set.check_nonempty()?;
    if train_set.num_tasks() != model.num_tasks() {
        return Err(GttnError::Config(vec![format!(
            "dataset has {} tasks but model expects {}",
            train_set.num_tasks(),
            model.num_tasks()
        )]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = OptimizerState::new(&model, &weights);
    let mut metrics = Vec::new();
    let mut alpha_trace = Vec::new();

    for epoch in 1..=config.max_epochs {
        state.schedule_index = epoch - 1;
        for (task_id, idx) in epoch_batches(train_set, config.batch_size, &mut rng) {
            let task = &train_set.tasks[task_id - 1];
            let batch = Batch::new(
                task_id,
                idx.iter().map(|&i| task.inputs[i].clone()).collect(),
                idx.iter().map(|&i| task.labels[i]).collect(),
            )?;
            step(&mut model, &mut weights, &batch, spec, loss_kind, config, &mut state)?;
        }
        if epoch % config.eval_every == 0 || epoch == config.max_epochs {
            let reg = regularizers::reg_value(model.regularized_block(), spec, &weights)?;
            let (min_form, _) = min_form_value(model.regularized_block(), spec)?;
            let mut record = |split: &'static str, rows: Vec<EvalRow>| {
                for r in rows {
                    metrics.push(MetricRow {
                        epoch,
                        task: r.task,
                        split,
                        loss: r.loss,
                        accuracy: r.accuracy,
                        reg_value: reg,
                        min_form_value: min_form,
                    });
                }
            };
            record("train", evaluate(&model, train_set, loss_kind)?);
            if let Some(test) = test_set {
                record("test", evaluate(&model, test, loss_kind)?);
            }
            alpha_trace.push((epoch, weights.alpha().to_vec()));
        }
    }

    let expected = config.max_epochs
        * train_set.total_examples().div_ceil(config.batch_size);
    debug_assert_eq!(state.iteration, expected);
    Ok(TrainedRun { model, weights, metrics, alpha_trace })
}

/// Gradient descent on the weight logits with the tensor held fixed.
/// Converges toward putting all weight on a minimal-trace-norm flattening.
pub fn optimize_beta(
    w: &DenseTensor,
    spec: &RegularizerSpec,
    iterations: usize,
    lr: f64,
) -> Result<WeightState> {
    if spec.weight_mode != WeightMode::LearnableSoftmax {
        return Err(GttnError::InvalidMode(
            "weight-only optimization requires learnable-softmax weights".into(),
        ));
    }
    let mut weights = WeightState::uniform(spec.subsets.len());
    for _ in 0..iterations {
        let g = regularizers::reg_grad_beta(w, spec, &weights, 1.0)?;
        let beta: Vec<f64> = weights.beta().iter().zip(&g).map(|(b, gi)| b - lr * gi).collect();
        weights = WeightState::from_beta(beta)?;
    }
    Ok(weights)
}

/// Render metrics rows as CSV.
pub fn metrics_csv(rows: &[MetricRow]) -> String {
    let mut out = String::from("epoch,task,split,loss,accuracy,reg_value,min_form_value\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.epoch, r.task, r.split, r.loss, r.accuracy, r.reg_value, r.min_form_value
        ));
    }
    out
}

/// Render the weight trajectory as CSV; subsets render like `{1,3}`.
pub fn alpha_trace_csv(trace: &[(usize, Vec<f64>)], spec: &RegularizerSpec) -> String {
    let mut out = String::from("epoch,subset,alpha\n");
    for (epoch, alpha) in trace {
        for (s, a) in spec.subsets.iter().zip(alpha) {
            out.push_str(&format!("{},\"{}\",{}\n", epoch, s, a));
        }
    }
    out
}
