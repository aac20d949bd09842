//! Dense matrix SVD, trace norm, spectral norm, and trace-norm subgradient.
//!
//! The SVD is a one-sided Jacobi on columns: deterministic for a fixed
//! input, no randomized sketching. Output is sign-normalized (first
//! nonzero entry of each U column nonnegative) so results are unique for
//! distinct singular values.

use crate::error::{GttnError, Result};

/// Relative singular-value cutoff used by the subgradient when the caller
/// does not supply one.
pub const DEFAULT_SUBGRADIENT_TOL: f64 = 1e-10;

const JACOBI_SWEEP_CAP: usize = 100;
const JACOBI_EPS: f64 = 1e-14;

/// Row-major dense matrix of 64-bit reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(GttnError::Shape("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(GttnError::Shape(format!(
                "data length {} for {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(GttnError::Shape(format!(
                "matmul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Thin SVD: `U diag(s) V^T` with `k = min(rows, cols)` columns.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    pub v: Matrix,
}

impl SvdResult {
    pub fn rank(&self, tol: f64) -> usize {
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        self.singular_values
            .iter()
            .filter(|&&s| s > tol * smax)
            .count()
    }
}

/// One-sided Jacobi on a tall matrix (rows >= cols). Columns of `a` are
/// rotated pairwise until mutually orthogonal; V accumulates rotations.
fn jacobi_tall(m: &Matrix) -> Result<(Vec<Vec<f64>>, Vec<f64>, Matrix)> {
    let rows = m.rows;
    let n = m.cols;
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|c| (0..rows).map(|r| m.get(r, c)).collect())
        .collect();
    let mut v = Matrix::identity(n);

    let mut converged = false;
    let mut sweeps = 0;
    while !converged {
        if sweeps >= JACOBI_SWEEP_CAP {
            return Err(GttnError::NumericalFailure { iterations: sweeps });
        }
        converged = true;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let (mut a, mut b, mut g) = (0.0, 0.0, 0.0);
                    for r in 0..rows {
                        a += cols[p][r] * cols[p][r];
                        b += cols[q][r] * cols[q][r];
                        g += cols[p][r] * cols[q][r];
                    }
                    (a, b, g)
                };
                if gamma.abs() <= JACOBI_EPS * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                converged = false;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..rows {
                    let ap = cols[p][r];
                    let aq = cols[q][r];
                    cols[p][r] = c * ap - s * aq;
                    cols[q][r] = s * ap + c * aq;
                }
                for r in 0..n {
                    let vp = v.get(r, p);
                    let vq = v.get(r, q);
                    v.set(r, p, c * vp - s * vq);
                    v.set(r, q, s * vp + c * vq);
                }
            }
        }
        sweeps += 1;
    }

    let sigma: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    Ok((cols, sigma, v))
}

/// Orthonormalize U columns with near-zero singular values against the
/// rest, drawing candidates from the standard basis.
fn fill_null_columns(u: &mut Matrix, sigma: &[f64], smax: f64) {
    let rows = u.rows;
    let k = u.cols;
    let tiny = smax * 1e-14 + f64::MIN_POSITIVE;
    let mut filled: Vec<usize> = (0..k).filter(|&j| sigma[j] > tiny).collect();
    for j in 0..k {
        if sigma[j] > tiny {
            continue;
        }
        // Find a basis vector with a substantial residual after projection.
        let mut best: Option<Vec<f64>> = None;
        for e in 0..rows {
            let mut cand = vec![0.0; rows];
            cand[e] = 1.0;
            for &f in &filled {
                let dot: f64 = (0..rows).map(|r| cand[r] * u.get(r, f)).sum();
                for (r, cv) in cand.iter_mut().enumerate() {
                    *cv -= dot * u.get(r, f);
                }
            }
            let norm: f64 = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.5 {
                for cv in cand.iter_mut() {
                    *cv /= norm;
                }
                best = Some(cand);
                break;
            }
        }
        if let Some(cand) = best {
            for (r, cv) in cand.iter().enumerate() {
                u.set(r, j, *cv);
            }
            filled.push(j);
        }
    }
}

fn svd_tall(m: &Matrix) -> Result<SvdResult> {
    let (cols, sigma, v) = jacobi_tall(m)?;
    let rows = m.rows;
    let k = m.cols;
    // Sort nonincreasing.
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap());
    let smax = sigma[idx[0]];
    let mut u = Matrix::zeros(rows, k);
    let mut s_sorted = Vec::with_capacity(k);
    let mut v_sorted = Matrix::zeros(v.rows, k);
    for (new_j, &old_j) in idx.iter().enumerate() {
        let sj = sigma[old_j];
        s_sorted.push(sj);
        if sj > smax * 1e-14 + f64::MIN_POSITIVE {
            for r in 0..rows {
                u.set(r, new_j, cols[old_j][r] / sj);
            }
        }
        for r in 0..v.rows {
            v_sorted.set(r, new_j, v.get(r, old_j));
        }
    }
    fill_null_columns(&mut u, &s_sorted, smax);
    Ok(SvdResult { u, singular_values: s_sorted, v: v_sorted })
}

/// Sign convention: first entry of each U column with magnitude above
/// 1e-12 is made nonnegative; the paired V column flips with it.
fn normalize_signs(res: &mut SvdResult) {
    let k = res.singular_values.len();
    for j in 0..k {
        let mut sign = 1.0;
        for r in 0..res.u.rows {
            let v = res.u.get(r, j);
            if v.abs() > 1e-12 {
                if v < 0.0 {
                    sign = -1.0;
                }
                break;
            }
        }
        if sign < 0.0 {
            for r in 0..res.u.rows {
                let v = res.u.get(r, j);
                res.u.set(r, j, -v);
            }
            for r in 0..res.v.rows {
                let v = res.v.get(r, j);
                res.v.set(r, j, -v);
            }
        }
    }
}

/// Thin SVD via one-sided Jacobi. Deterministic for a fixed input.
pub fn svd(m: &Matrix) -> Result<SvdResult> {
    if !m.is_finite() {
        return Err(GttnError::InvalidArgument("non-finite matrix entries".into()));
    }
    let mut res = if m.rows >= m.cols {
        svd_tall(m)?
    } else {
        let r = svd_tall(&m.transpose())?;
        SvdResult { u: r.v, singular_values: r.singular_values, v: r.u }
    };
    normalize_signs(&mut res);
    Ok(res)
}

/// Sum of singular values.
pub fn trace_norm(m: &Matrix) -> Result<f64> {
    Ok(svd(m)?.singular_values.iter().sum())
}

/// Largest singular value.
pub fn spectral_norm(m: &Matrix) -> Result<f64> {
    Ok(svd(m)?
        .singular_values
        .first()
        .copied()
        .unwrap_or(0.0))
}

/// Subgradient of the trace norm: `U_r V_r^T` over singular values above
/// `tol * sigma_max`. Zero matrix maps to zero (a valid subgradient).
pub fn trace_norm_subgradient(m: &Matrix, tol: f64) -> Result<Matrix> {
    if tol <= 0.0 {
        return Err(GttnError::InvalidArgument(format!(
            "subgradient tolerance must be positive, got {tol}"
        )));
    }
    let res = svd(m)?;
    let smax = res.singular_values.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(Matrix::zeros(m.rows, m.cols));
    }
    let cutoff = tol * smax;
    let mut out = Matrix::zeros(m.rows, m.cols);
    for (j, &s) in res.singular_values.iter().enumerate() {
        if s <= cutoff {
            continue;
        }
        for r in 0..m.rows {
            let ur = res.u.get(r, j);
            if ur == 0.0 {
                continue;
            }
            for c in 0..m.cols {
                out.data[r * m.cols + c] += ur * res.v.get(c, j);
            }
        }
    }
    Ok(out)
}
