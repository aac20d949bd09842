//! Enumerate the canonical flattenings of a tensor shape and show that a
//! subset and its complement give the same trace norm (one is the
//! transpose of the other), which is why only canonical subsets count.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use gttn::linalg;
use gttn::tensor::{canonical_subsets, AxisSubset, DenseTensor};

fn main() -> gttn::Result<()> {
    let dims = [2usize, 3, 4];
    println!("canonical flattenings of a {dims:?} tensor:");
    for s in canonical_subsets(dims.len())? {
        let (rows, cols) = s.flattening_shape(&dims);
        println!("  {s}: {rows} x {cols}");
    }
    for p in 2..=7 {
        println!("order {p}: {} canonical flattenings", canonical_subsets(p)?.len());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = DenseTensor::from_dims(&dims, (0..24).map(|_| rng.gen::<f64>()).collect())?;
    let s = AxisSubset::new(&[1, 3], 3)?;
    let complement = AxisSubset::new(&[2], 3)?;
    let a = linalg::trace_norm(&w.flatten(&s)?)?;
    let b = linalg::trace_norm(&w.flatten(&complement)?)?;
    println!("trace norm over {s} = {a:.12}");
    println!("trace norm over {complement} = {b:.12} (same matrix, transposed)");
    Ok(())
}
