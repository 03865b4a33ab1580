use std::env;
use std::time::Instant;

use sosae::analysis::{
    activation_profile, compressed_length, probe_train_eval, ProbeConfig,
};
use sosae::autoencoder::{codes, train, TrainConfig};
use sosae::datasets::{corrupt, synth_digits, NoiseSpec};
use sosae::experiments::noisy_probe_accuracy;
use sosae::numcore::Rng;
use sosae::regularizers::RegularizerSpec;

// args: <lambda> <epochs> <h> <seed>...
// per (seed, nu) trains dae + sosae at beta in {1e-5, 1e-4}; prints for each
// model the corrupt-fit probe (train+test corrupted) and the clean-fit probe
// (clean train features, corrupted test features).
fn main() {
    let mut args = env::args().skip(1);
    let lambda: f64 = args.next().unwrap().parse().unwrap();
    let epochs: usize = args.next().unwrap().parse().unwrap();
    let h: usize = args.next().unwrap().parse().unwrap();
    let seeds: Vec<u64> = args.map(|s| s.parse().unwrap()).collect();
    let data = synth_digits(10000, 42).unwrap();
    let x_val = data.gather_x(&data.val_idx);
    let x_train = data.gather_x(&data.train_idx);
    let y_train = data.gather_labels(&data.train_idx);
    let x_test = data.gather_x(&data.test_idx);
    let y_test = data.gather_labels(&data.test_idx);
    let pc = ProbeConfig::new(data.n_classes);

    for seed in seeds {
        for nu in [0.10f64, 0.55] {
            let noise = NoiseSpec::zero_mask(nu);
            for (name, spec) in [
                ("dae", RegularizerSpec::none()),
                ("sosae_b5", RegularizerSpec::push_contractive(lambda, 1e-5, 0.01)),
                ("sosae_b4", RegularizerSpec::push_contractive(lambda, 1e-4, 0.01)),
            ] {
                let t = Instant::now();
                let cfg = TrainConfig {
                    epochs,
                    learning_rate: 3e-4,
                    seed,
                    regularizer: spec,
                    noise,
                    ..Default::default()
                };
                let (params, _) = train(&data, h, &cfg).unwrap();
                let prof = activation_profile(&params, &x_val, &spec, 1e-3).unwrap();
                let cl = compressed_length(&prof);
                let p_corrupt = noisy_probe_accuracy(&data, &params, &spec, &noise, seed).unwrap();
                // clean-fit probe: decision boundary from clean features,
                // evaluated on features of corrupted test inputs
                let mut rng = Rng::new(seed ^ 0x5EED_CAFE);
                let x_test_noisy = corrupt(&x_test, &noise, &mut rng).unwrap();
                let p_mixed = probe_train_eval(
                    &codes(&params, &x_train, &spec).unwrap(),
                    &y_train,
                    &codes(&params, &x_test_noisy, &spec).unwrap(),
                    &y_test,
                    &pc,
                )
                .unwrap();
                println!(
                    "seed {seed} nu {nu} {name}: L*={cl} corrupt-fit={p_corrupt:.4} clean-fit={p_mixed:.4} ({:.0}s)",
                    t.elapsed().as_secs_f64()
                );
            }
        }
    }
}
