use std::env;
use std::time::Instant;

use sosae::analysis::{
    activation_profile, compressed_length, prefix_violations, reconstruction_mae, truncate_model,
};
use sosae::autoencoder::{train, TrainConfig};
use sosae::datasets::synth_digits;
use sosae::regularizers::RegularizerSpec;

// args: <lambda> <epochs> <seed>...
fn main() {
    let mut args = env::args().skip(1);
    let lambda: f64 = args.next().unwrap().parse().unwrap();
    let epochs: usize = args.next().unwrap().parse().unwrap();
    let seeds: Vec<u64> = args.map(|s| s.parse().unwrap()).collect();
    let data = synth_digits(10000, 42).unwrap();
    let x_val = data.gather_x(&data.val_idx);
    let spec = RegularizerSpec::push_contractive(lambda, 1e-5, 0.01);
    for seed in seeds {
        let t = Instant::now();
        let cfg = TrainConfig {
            epochs,
            learning_rate: 3e-4,
            seed,
            regularizer: spec,
            ..Default::default()
        };
        match train(&data, 400, &cfg) {
            Err(e) => println!("seed {seed}: FAILED {e}"),
            Ok((params, _)) => {
                let prof = activation_profile(&params, &x_val, &spec, 1e-3).unwrap();
                let cl = compressed_length(&prof);
                let viol = prefix_violations(&prof);
                let full_mae = reconstruction_mae(&params, &x_val).unwrap();
                let trunc = truncate_model(&params, cl.max(1)).unwrap();
                let t_mae = reconstruction_mae(&trunc, &x_val).unwrap();
                let beyond = prof.mean_abs[cl..].iter().cloned().fold(0.0f64, f64::max);
                let lo = cl.saturating_sub(6);
                let hi = (cl + 4).min(prof.mean_abs.len());
                let band: Vec<String> = prof.mean_abs[lo..hi]
                    .iter()
                    .map(|v| format!("{v:.1e}"))
                    .collect();
                println!(
                    "seed {seed}: L*={cl} viol={}@{:?} maeDelta={:.2e} beyond={:.2e} band[{lo}..{hi}]={} ({:.0}s)",
                    viol.len(),
                    &viol[..viol.len().min(8)],
                    (t_mae - full_mae).abs(),
                    beyond,
                    band.join(","),
                    t.elapsed().as_secs_f64()
                );
            }
        }
    }
}
