//! Checks the analytic gradients against central finite differences for
//! every regularizer kind.
//!
//! ```text
//! cargo run --release --example gradient_check
//! ```

use sosae::autoencoder::{loss_and_grads, AutoencoderParams, ReconLoss};
use sosae::numcore::{rng_uniform, Rng};
use sosae::regularizers::RegularizerSpec;

const D: usize = 7;
const H: usize = 6;
const BATCH: usize = 4;
const STEP: f64 = 1e-5;

fn main() {
    let specs = [
        ("none", RegularizerSpec::none()),
        ("l1", RegularizerSpec::l1(0.01)),
        ("l2", RegularizerSpec::l2(0.01)),
        ("ksparse", RegularizerSpec::ksparse(3)),
        ("contractive", RegularizerSpec::contractive(0.05)),
        ("push", RegularizerSpec::push(0.01, 0.01)),
        (
            "push_contractive",
            RegularizerSpec::push_contractive(0.01, 0.05, 0.01),
        ),
        (
            "ksparse_contractive",
            RegularizerSpec::ksparse_contractive(3, 0.05),
        ),
    ];

    println!("{:<20} {:>14} {:>10}", "regularizer", "max rel err", "verdict");
    let mut worst_overall = 0.0f64;
    for (name, spec) in specs {
        let mut rng = Rng::new(1234);
        let mut params = AutoencoderParams::init(D, H, &mut rng).unwrap();
        let x = rng_uniform(&mut rng, 0.0, 1.0, BATCH, D).unwrap();

        let (grads, _) = loss_and_grads(&params, &x, &x, &spec, ReconLoss::Mae).unwrap();
        let analytic: Vec<f64> = grads
            .w_enc
            .as_slice()
            .iter()
            .chain(grads.b_enc.iter())
            .chain(grads.w_dec.as_slice().iter())
            .chain(grads.b_dec.iter())
            .copied()
            .collect();

        // nudge each parameter in turn and difference the loss
        let mut worst = 0.0f64;
        for idx in 0..analytic.len() {
            let read = |p: &AutoencoderParams, i: usize| -> f64 {
                let we = p.w_enc.as_slice().len();
                let be = p.b_enc.len();
                let wd = p.w_dec.as_slice().len();
                if i < we {
                    p.w_enc.as_slice()[i]
                } else if i < we + be {
                    p.b_enc[i - we]
                } else if i < we + be + wd {
                    p.w_dec.as_slice()[i - we - be]
                } else {
                    p.b_dec[i - we - be - wd]
                }
            };
            let write = |p: &mut AutoencoderParams, i: usize, v: f64| {
                let we = p.w_enc.as_slice().len();
                let be = p.b_enc.len();
                let wd = p.w_dec.as_slice().len();
                if i < we {
                    p.w_enc.as_mut_slice()[i] = v;
                } else if i < we + be {
                    p.b_enc[i - we] = v;
                } else if i < we + be + wd {
                    p.w_dec.as_mut_slice()[i - we - be] = v;
                } else {
                    p.b_dec[i - we - be - wd] = v;
                }
            };

            let orig = read(&params, idx);
            write(&mut params, idx, orig + STEP);
            let (_, up) = loss_and_grads(&params, &x, &x, &spec, ReconLoss::Mae).unwrap();
            write(&mut params, idx, orig - STEP);
            let (_, down) = loss_and_grads(&params, &x, &x, &spec, ReconLoss::Mae).unwrap();
            write(&mut params, idx, orig);

            let numeric = (up.total - down.total) / (2.0 * STEP);
            let denom = analytic[idx].abs().max(numeric.abs());
            if denom > 1e-10 {
                worst = worst.max((analytic[idx] - numeric).abs() / denom);
            }
        }
        worst_overall = worst_overall.max(worst);
        let verdict = if worst < 1e-4 { "ok" } else { "MISMATCH" };
        println!("{name:<20} {worst:>14.3e} {verdict:>10}");
    }
    println!("\nworst over all kinds: {worst_overall:.3e} (tolerance 1e-4)");
}
