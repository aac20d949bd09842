//! Dense p-way tensors with permute/reshape/flatten primitives and
//! canonical flattening enumeration.
//!
//! A flattening groups a subset `s` of axes into matrix rows and the
//! complementary axes into columns. The pair `{s, ¬s}` yields transposed
//! matrices with equal trace norm, so only the representative containing
//! axis 1 is enumerated: `2^(p-1) - 1` subsets for a p-way tensor.
//!
//! Axis indices are 1-based throughout, matching the `{1,3}`-style labels
//! used in reports.

use crate::error::{GttnError, Result};
use crate::linalg::Matrix;

/// Dimensions of a p-way tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(GttnError::Shape("shape must have at least one axis".into()));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(GttnError::Shape(format!("zero dimension in {dims:?}")));
        }
        let mut count: usize = 1;
        for &d in dims {
            count = count
                .checked_mul(d)
                .ok_or_else(|| GttnError::Shape(format!("element count overflow for {dims:?}")))?;
        }
        let _ = count;
        Ok(Shape { dims: dims.to_vec() })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of axes p.
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Row-major strides (last axis fastest).
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Dense p-way real tensor, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Shape,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(shape: Shape, data: Vec<f64>) -> Result<Self> {
        if data.len() != shape.len() {
            return Err(GttnError::Shape(format!(
                "data length {} does not match shape {:?} ({} elements)",
                data.len(),
                shape.dims(),
                shape.len()
            )));
        }
        Ok(DenseTensor { shape, data })
    }

    pub fn from_dims(dims: &[usize], data: Vec<f64>) -> Result<Self> {
        Self::new(Shape::new(dims)?, data)
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        let shape = Shape::new(dims)?;
        let n = shape.len();
        Ok(DenseTensor { shape, data: vec![0.0; n] })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Entry at a 0-based multi-index.
    pub fn get(&self, idx: &[usize]) -> f64 {
        let s = strides(self.dims());
        let off: usize = idx.iter().zip(&s).map(|(i, st)| i * st).sum();
        self.data[off]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: f64) -> DenseTensor {
        DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &DenseTensor) -> Result<DenseTensor> {
        if self.shape != other.shape {
            return Err(GttnError::Shape("tensor shapes differ in add".into()));
        }
        Ok(DenseTensor {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Reorder axes: result axis k holds source axis `order[k]` (1-based).
    pub fn permute(&self, order: &[usize]) -> Result<DenseTensor> {
        let p = self.order();
        if order.len() != p {
            return Err(GttnError::InvalidPermutation(format!(
                "order has {} entries for a {}-way tensor",
                order.len(),
                p
            )));
        }
        let mut seen = vec![false; p];
        for &a in order {
            if a < 1 || a > p || seen[a - 1] {
                return Err(GttnError::InvalidPermutation(format!(
                    "{order:?} is not a permutation of 1..={p}"
                )));
            }
            seen[a - 1] = true;
        }
        let new_dims: Vec<usize> = order.iter().map(|&a| self.dims()[a - 1]).collect();
        let src_strides = strides(self.dims());
        let dst_strides = strides(&new_dims);
        let mut out = vec![0.0; self.data.len()];
        for (lin, slot) in out.iter_mut().enumerate() {
            let mut rem = lin;
            let mut src_off = 0;
            for k in 0..p {
                let idx = rem / dst_strides[k];
                rem %= dst_strides[k];
                src_off += idx * src_strides[order[k] - 1];
            }
            *slot = self.data[src_off];
        }
        DenseTensor::from_dims(&new_dims, out)
    }

    /// Metadata-only reshape; flat data is unchanged (row-major semantics).
    pub fn reshape(&self, dims: &[usize]) -> Result<DenseTensor> {
        let shape = Shape::new(dims)?;
        if shape.len() != self.data.len() {
            return Err(GttnError::Shape(format!(
                "cannot reshape {} elements to {:?}",
                self.data.len(),
                dims
            )));
        }
        Ok(DenseTensor { shape, data: self.data.clone() })
    }

    /// Flattening along subset `s`: rows indexed by axes in `s`, columns by
    /// the complement in increasing order.
    pub fn flatten(&self, s: &AxisSubset) -> Result<Matrix> {
        s.check_order(self.order())?;
        let order = s.permute_order();
        let permuted = self.permute(&order)?;
        let rows: usize = s.indices().iter().map(|&a| self.dims()[a - 1]).product();
        let cols = self.len() / rows;
        Matrix::new(rows, cols, permuted.into_data())
    }

    /// Inverse of [`flatten`](Self::flatten): rebuilds a tensor of shape
    /// `dims` from its flattening along `s`.
    pub fn unflatten(m: &Matrix, s: &AxisSubset, dims: &[usize]) -> Result<DenseTensor> {
        s.check_order(dims.len())?;
        let total: usize = dims.iter().product();
        if m.rows() * m.cols() != total {
            return Err(GttnError::Shape(format!(
                "matrix {}x{} does not hold {total} elements",
                m.rows(),
                m.cols()
            )));
        }
        let order = s.permute_order();
        let perm_dims: Vec<usize> = order.iter().map(|&a| dims[a - 1]).collect();
        let permuted = DenseTensor::from_dims(&perm_dims, m.data().to_vec())?;
        // Invert the permutation.
        let mut inv = vec![0usize; dims.len()];
        for (k, &a) in order.iter().enumerate() {
            inv[a - 1] = k + 1;
        }
        permuted.permute(&inv)
    }
}

/// Sum of elementwise products of two equal-shape tensors.
pub fn inner_product(a: &DenseTensor, b: &DenseTensor) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(GttnError::Shape(format!(
            "inner product of shapes {:?} and {:?}",
            a.dims(),
            b.dims()
        )));
    }
    Ok(a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum())
}

/// Nonempty proper subset of axes `{1,…,p}`, identifying one flattening.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AxisSubset {
    indices: Vec<usize>,
    order: usize,
}

impl AxisSubset {
    /// `indices` are 1-based, strictly increasing, nonempty, proper.
    pub fn new(indices: &[usize], order: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(GttnError::InvalidSubset("empty subset".into()));
        }
        if indices.len() >= order {
            return Err(GttnError::InvalidSubset(format!(
                "{indices:?} is not a proper subset of 1..={order}"
            )));
        }
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(GttnError::InvalidSubset(format!(
                    "{indices:?} is not strictly increasing"
                )));
            }
        }
        if indices[0] < 1 || *indices.last().unwrap() > order {
            return Err(GttnError::InvalidSubset(format!(
                "{indices:?} out of range for order {order}"
            )));
        }
        Ok(AxisSubset { indices: indices.to_vec(), order })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn contains(&self, axis: usize) -> bool {
        self.indices.binary_search(&axis).is_ok()
    }

    /// Complement ¬s in increasing order.
    pub fn complement(&self) -> AxisSubset {
        let comp: Vec<usize> = (1..=self.order).filter(|a| !self.contains(*a)).collect();
        AxisSubset { indices: comp, order: self.order }
    }

    /// Canonical representative of the pair `{s, ¬s}`: the one containing
    /// axis 1. Trace norms agree, so either works; this fixes the choice.
    pub fn canonical(&self) -> AxisSubset {
        if self.contains(1) {
            self.clone()
        } else {
            self.complement()
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.contains(1)
    }

    /// Permutation `[s, ¬s]` feeding flatten, 1-based.
    fn permute_order(&self) -> Vec<usize> {
        let mut order = self.indices.clone();
        order.extend(self.complement().indices.iter().copied());
        order
    }

    fn check_order(&self, p: usize) -> Result<()> {
        if self.order != p {
            return Err(GttnError::InvalidSubset(format!(
                "subset over order {} applied to a {}-way tensor",
                self.order, p
            )));
        }
        Ok(())
    }

    /// Flattening shape (rows, cols) for a tensor with the given dims.
    pub fn flattening_shape(&self, dims: &[usize]) -> (usize, usize) {
        let rows: usize = self.indices.iter().map(|&a| dims[a - 1]).product();
        let cols: usize = dims.iter().product::<usize>() / rows;
        (rows, cols)
    }
}

impl std::fmt::Display for AxisSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.indices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// All canonical flattenings of a p-way tensor: the `2^(p-1) - 1` proper
/// nonempty subsets of `{1,…,p}` that contain axis 1, lexicographic order.
pub fn canonical_subsets(p: usize) -> Result<Vec<AxisSubset>> {
    if p < 2 {
        return Err(GttnError::InvalidOrder(format!(
            "canonical subsets need p >= 2, got {p}"
        )));
    }
    let mut out = Vec::with_capacity((1usize << (p - 1)) - 1);
    // Bitmask over axes 2..=p; axis 1 is always included.
    for mask in 0..(1u64 << (p - 1)) {
        let mut idx = vec![1usize];
        for a in 2..=p {
            if mask & (1 << (a - 2)) != 0 {
                idx.push(a);
            }
        }
        if idx.len() < p {
            out.push(AxisSubset::new(&idx, p)?);
        }
    }
    out.sort();
    Ok(out)
}
