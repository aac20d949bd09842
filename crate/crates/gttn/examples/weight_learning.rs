//! With the tensor frozen, gradient descent on the combination logits
//! concentrates the weights on a minimal-trace-norm flattening, driving
//! the combined value down to the minimum over single flattenings.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use gttn::regularizers::{self, min_form_value, NormFamily, RegularizerSpec, WeightMode};
use gttn::tensor::DenseTensor;
use gttn::trainer::optimize_beta;

fn main() -> gttn::Result<()> {
    let dims = [2usize, 3, 4];
    let n: usize = dims.iter().product();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let w = DenseTensor::from_dims(&dims, (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())?;

    let spec = RegularizerSpec::new(NormFamily::Gttn, 3, WeightMode::LearnableSoftmax)?;
    let (min_value, argmin) = min_form_value(&w, &spec)?;
    println!("minimum single-flattening trace norm: {min_value:.8} at {argmin}");

    for iters in [0usize, 50, 200, 1000, 2000] {
        let weights = optimize_beta(&w, &spec, iters, 0.5)?;
        let value = regularizers::reg_value(&w, &spec, &weights)?;
        let alpha: Vec<String> =
            weights.alpha().iter().map(|a| format!("{a:.4}")).collect();
        println!("after {iters:>4} iterations: value {value:.8}, weights [{}]", alpha.join(", "));
    }
    Ok(())
}
