//! Theory-facing diagnostics: a computable upper bound on the dual of the
//! weighted trace-norm combination, a generalization-bound evaluator, an
//! empirical covariance-constant estimate, and learned-weight reporting.
//!
//! The bound evaluator reports a bound *shape*: the absolute constant `c`
//! defaults to 1 and every report is up to that constant.

use serde::{Deserialize, Serialize};

use crate::error::{GttnError, Result};
use crate::linalg::{self, Matrix};
use crate::data::Dataset;
use crate::regularizers::RegularizerSpec;
use crate::tensor::{canonical_subsets, AxisSubset, DenseTensor};
use crate::trainer::TrainedRun;

/// Upper bound on the dual norm: `min_s spectral_norm(X_{s}) / alpha_s`
/// over canonical subsets, skipping zero-weight subsets (their bound is
/// infinite).
pub fn dual_norm_upper_bound(x: &DenseTensor, alpha: &[f64]) -> Result<f64> {
    let subsets = canonical_subsets(x.order())?;
    check_simplex(alpha, subsets.len())?;
    let mut best = f64::INFINITY;
    for (s, &a) in subsets.iter().zip(alpha) {
        if a == 0.0 {
            continue;
        }
        let bound = linalg::spectral_norm(&x.flatten(s)?)? / a;
        if bound < best {
            best = bound;
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(GttnError::InvalidArgument("all weights are zero".into()))
    }
}

fn check_simplex(alpha: &[f64], n: usize) -> Result<()> {
    if alpha.len() != n {
        return Err(GttnError::InvalidArgument(format!(
            "{} weights for {n} canonical subsets",
            alpha.len()
        )));
    }
    let sum: f64 = alpha.iter().sum();
    if alpha.iter().any(|&a| !(a >= 0.0)) || (sum - 1.0).abs() > 1e-8 {
        return Err(GttnError::InvalidArgument(format!(
            "weights must lie on the simplex (sum {sum})"
        )));
    }
    Ok(())
}

/// Inputs to the generalization-bound evaluator. `dims` covers the full
/// parameter tensor, with the last entry equal to the task count.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundInputs {
    /// Lipschitz constant of the loss.
    pub rho: f64,
    /// Trace-norm budget.
    pub gamma: f64,
    /// Covariance constant (see [`estimate_kappa`]).
    pub kappa: f64,
    /// Confidence level in (0,1).
    pub delta: f64,
    /// Absolute constant; the bound holds up to this factor. Default 1.
    pub c: f64,
    pub dims: Vec<usize>,
    /// Per-task sample count.
    pub n0: usize,
    /// Weights over the canonical subsets of `dims.len()` axes.
    pub alpha: Vec<f64>,
    /// Use the square-root tail with an extra 1/n0 factor instead of the
    /// headline 1/m factor (the two appear in different places; both are
    /// kept and the choice is explicit).
    pub proof_tail: bool,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (name, v) in [("rho", self.rho), ("gamma", self.gamma), ("kappa", self.kappa), ("c", self.c)] {
            if !(v > 0.0 && v.is_finite()) {
                problems.push(format!("{name} must be positive, got {v}"));
            }
        }
        if !(0.0 < self.delta && self.delta < 1.0) {
            problems.push(format!("delta must be in (0,1), got {}", self.delta));
        }
        if self.dims.len() < 2 || self.dims.iter().any(|&d| d == 0) {
            problems.push(format!("need >= 2 positive dims, got {:?}", self.dims));
        }
        if self.n0 == 0 {
            problems.push("n0 must be >= 1".into());
        }
        if !problems.is_empty() {
            return Err(GttnError::Config(problems));
        }
        check_simplex(&self.alpha, (1usize << (self.dims.len() - 1)) - 1)
    }

    fn m(&self) -> usize {
        *self.dims.last().unwrap()
    }

    /// Product of the non-task dims.
    fn d(&self) -> f64 {
        self.dims[..self.dims.len() - 1].iter().product::<usize>() as f64
    }
}

/// One subset's contribution to the complexity term.
#[derive(Debug, Clone)]
pub struct BoundTerm {
    pub subset: AxisSubset,
    pub alpha: f64,
    /// `kappa m sqrt(ln d_s) / (alpha_s n0 d) + ln d_s / (alpha_s n0)`;
    /// infinite when `alpha_s = 0`.
    pub term: f64,
}

/// Full evaluation: the per-subset terms, the index of the achieving
/// minimum, and the final bound value.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub terms: Vec<BoundTerm>,
    pub min_index: usize,
    pub empirical_loss: f64,
    pub complexity: f64,
    pub tail: f64,
    pub value: f64,
}

/// Evaluate the high-probability excess-risk bound:
/// `empirical + (2 rho gamma c / (m n0)) * min_s term_s + tail`.
pub fn generalization_bound(b: &BoundInputs, empirical_loss: f64) -> Result<BoundReport> {
    b.validate()?;
    if !empirical_loss.is_finite() {
        return Err(GttnError::InvalidArgument(format!(
            "empirical loss must be finite, got {empirical_loss}"
        )));
    }
    let subsets = canonical_subsets(b.dims.len())?;
    let m = b.m() as f64;
    let n0 = b.n0 as f64;
    let d = b.d();
    let mut terms = Vec::with_capacity(subsets.len());
    let mut min_index = 0usize;
    for (i, (s, &a)) in subsets.iter().zip(&b.alpha).enumerate() {
        let (rows, cols) = s.flattening_shape(&b.dims);
        let d_s = (rows + cols) as f64;
        debug_assert!(d_s > 1.0);
        let term = if a == 0.0 {
            f64::INFINITY
        } else {
            b.kappa * m * d_s.ln().sqrt() / (a * n0 * d) + d_s.ln() / (a * n0)
        };
        if term < terms.get(min_index).map_or(f64::INFINITY, |t: &BoundTerm| t.term) {
            min_index = i;
        }
        terms.push(BoundTerm { subset: s.clone(), alpha: a, term });
    }
    let min_term = terms[min_index].term;
    if !min_term.is_finite() {
        return Err(GttnError::InvalidArgument("all weights are zero".into()));
    }
    let complexity = 2.0 * b.rho * b.gamma * b.c / (m * n0) * min_term;
    let tail = if b.proof_tail {
        (2.0 / (m * n0) * (1.0 / b.delta).ln()).sqrt()
    } else {
        (2.0 / m * (1.0 / b.delta).ln()).sqrt()
    };
    Ok(BoundReport {
        terms,
        min_index,
        empirical_loss,
        complexity,
        tail,
        value: empirical_loss + complexity + tail,
    })
}

/// Render a bound report as CSV: one row per canonical subset with its
/// term value, flagging the achieving minimum.
pub fn bound_report_csv(report: &BoundReport) -> String {
    let mut out = String::from("subset,alpha,term,is_min\n");
    for (i, t) in report.terms.iter().enumerate() {
        out.push_str(&format!(
            "\"{}\",{},{},{}\n",
            t.subset,
            t.alpha,
            t.term,
            (i == report.min_index) as u8
        ));
    }
    out
}

/// Smallest empirical covariance constant: `d` times the largest spectral
/// norm over canonical flattenings of the inputs' mean second-moment
/// matrix. Order-1 inputs (plain vectors) have a single trivial
/// flattening, the vector itself.
pub fn estimate_kappa(dataset: &Dataset) -> Result<f64> {
    dataset.check_nonempty()?;
    let q = dataset.dims.len();
    let d: usize = dataset.dims.iter().product();
    let n = dataset.total_examples() as f64;
    // each entry: (rows, flattening of x into a rows x cols matrix)
    let flatten_fns: Vec<(usize, Box<dyn Fn(&DenseTensor) -> Result<Matrix>>)> = if q == 1 {
        let rows = dataset.dims[0];
        vec![(rows, Box::new(move |x: &DenseTensor| Matrix::new(rows, 1, x.data().to_vec())))]
    } else {
        canonical_subsets(q)?
            .into_iter()
            .map(|s| {
                let rows = s.flattening_shape(&dataset.dims).0;
                let f: Box<dyn Fn(&DenseTensor) -> Result<Matrix>> =
                    Box::new(move |x: &DenseTensor| x.flatten(&s));
                (rows, f)
            })
            .collect()
    };
    let mut worst: f64 = 0.0;
    for (rows, flatten) in &flatten_fns {
        let rows = *rows;
        let mut moment = Matrix::zeros(rows, rows);
        for task in &dataset.tasks {
            for x in &task.inputs {
                let xs = flatten(x)?;
                let outer = xs.matmul(&xs.transpose())?;
                for i in 0..rows {
                    for j in 0..rows {
                        moment.set(i, j, moment.get(i, j) + outer.get(i, j) / n);
                    }
                }
            }
        }
        let sn = linalg::spectral_norm(&moment)?;
        if sn > worst {
            worst = sn;
        }
    }
    Ok(d as f64 * worst)
}

/// Learned-weight table: ordered (subset, alpha) rows with the largest
/// entry flagged (ties go to the earliest subset).
#[derive(Debug, Clone)]
pub struct AlphaReport {
    pub rows: Vec<(AxisSubset, f64)>,
    pub max_index: usize,
}

impl AlphaReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, (s, a)) in self.rows.iter().enumerate() {
            let flag = if i == self.max_index { " *" } else { "" };
            out.push_str(&format!("{s:>12}  {a:.6}{flag}\n"));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("subset,alpha,is_max\n");
        for (i, (s, a)) in self.rows.iter().enumerate() {
            out.push_str(&format!("\"{s}\",{a},{}\n", (i == self.max_index) as u8));
        }
        out
    }
}

/// Final-epoch weight table from a finished run.
pub fn alpha_report(run: &TrainedRun, spec: &RegularizerSpec) -> Result<AlphaReport> {
    let (_, alpha) = run
        .alpha_trace
        .last()
        .ok_or_else(|| GttnError::InvalidArgument("run recorded no weight trajectory".into()))?;
    alpha_report_from(spec, alpha)
}

/// Weight table from an explicit alpha vector in spec subset order.
pub fn alpha_report_from(spec: &RegularizerSpec, alpha: &[f64]) -> Result<AlphaReport> {
    if alpha.len() != spec.subsets.len() {
        return Err(GttnError::InvalidArgument(format!(
            "{} weights for {} subsets",
            alpha.len(),
            spec.subsets.len()
        )));
    }
    let sum: f64 = alpha.iter().sum();
    if (sum - 1.0).abs() > 1e-8 {
        return Err(GttnError::InvalidArgument(format!("weights sum to {sum}, not 1")));
    }
    let mut max_index = 0;
    for (i, a) in alpha.iter().enumerate() {
        if *a > alpha[max_index] {
            max_index = i;
        }
    }
    Ok(AlphaReport {
        rows: spec.subsets.iter().cloned().zip(alpha.iter().copied()).collect(),
        max_index,
    })
}
