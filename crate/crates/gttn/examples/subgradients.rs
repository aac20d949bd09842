//! Check the regularizer's tensor subgradient against finite differences
//! in a few random directions.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use gttn::regularizers::{self, NormFamily, RegularizerSpec, WeightMode, WeightState};
use gttn::tensor::{inner_product, DenseTensor};

fn main() -> gttn::Result<()> {
    let dims = [3usize, 4, 2];
    let n: usize = dims.iter().product();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = DenseTensor::from_dims(&dims, (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())?;

    let spec = RegularizerSpec::new(NormFamily::Gttn, 3, WeightMode::LearnableSoftmax)?;
    let weights = WeightState::uniform(spec.subsets.len());
    let grad = regularizers::reg_subgrad_w(&w, &spec, &weights)?;
    let value = regularizers::reg_value(&w, &spec, &weights)?;
    println!("reg value = {value:.10}");

    let eps = 1e-6;
    for trial in 0..5 {
        let dir = DenseTensor::from_dims(&dims, (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())?;
        let plus = regularizers::reg_value(&w.add(&dir.scale(eps))?, &spec, &weights)?;
        let minus = regularizers::reg_value(&w.add(&dir.scale(-eps))?, &spec, &weights)?;
        let numeric = (plus - minus) / (2.0 * eps);
        let analytic = inner_product(&grad, &dir)?;
        println!(
            "direction {trial}: analytic {analytic:+.8}, finite-difference {numeric:+.8}, \
             rel err {:.2e}",
            (analytic - numeric).abs() / numeric.abs().max(1e-12)
        );
    }
    Ok(())
}
