//! Bound diagnostics: the computable dual-norm upper bound and the
//! generalization-bound shape with an empirically estimated covariance
//! constant.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use gttn::analysis::{dual_norm_upper_bound, estimate_kappa, generalization_bound, BoundInputs};
use gttn::data::{generate_synthetic, LabelKind, SyntheticSpec};
use gttn::regularizers::{self, NormFamily, RegularizerSpec, WeightMode, WeightState};
use gttn::tensor::{inner_product, DenseTensor};

fn main() -> gttn::Result<()> {
    let dims = [2usize, 3, 4];
    let n: usize = dims.iter().product();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut rand_tensor =
        || DenseTensor::from_dims(&dims, (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect());
    let w = rand_tensor()?;
    let x = rand_tensor()?;

    let spec = RegularizerSpec::new(NormFamily::Gttn, 3, WeightMode::LearnableSoftmax)?;
    let weights = WeightState::uniform(spec.subsets.len());
    let reg = regularizers::reg_value(&w, &spec, &weights)?;
    let dual = dual_norm_upper_bound(&x, weights.alpha())?;
    let ip = inner_product(&w, &x)?;
    println!("<W,X> = {ip:.6} <= reg(W) * dual_bound(X) = {:.6}", reg * dual);

    let data_spec = SyntheticSpec {
        dims: vec![4, 4],
        tasks: 4,
        n0: 50,
        planted_subset: vec![1],
        planted_rank: 1,
        noise_std: 0.1,
        label_kind: LabelKind::Binary,
        seed: 9,
            input_alignment: 1.0,
    };
    let (dataset, _) = generate_synthetic(&data_spec)?;
    let kappa = estimate_kappa(&dataset)?;
    println!("estimated covariance constant kappa = {kappa:.6}");

    for (label, proof_tail) in [("headline tail", false), ("per-sample tail", true)] {
        let inputs = BoundInputs {
            rho: 1.0,
            gamma: 1.0,
            kappa,
            delta: 0.05,
            c: 1.0,
            dims: vec![4, 4, 4],
            n0: 50,
            alpha: vec![1.0 / 3.0; 3],
            proof_tail,
        };
        let report = generalization_bound(&inputs, 0.3)?;
        println!(
            "{label}: bound = {:.6} (complexity {:.6}, tail {:.6}), min at {}",
            report.value,
            report.complexity,
            report.tail,
            report.terms[report.min_index].subset
        );
    }
    Ok(())
}
