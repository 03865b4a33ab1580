//! Property tests for the numeric core and the penalty algebra.

mod common;

use proptest::prelude::*;
use sosae::analysis::{
    active_count, compressed_length, prefix_violations, training_flops, ActivationProfile,
};
use sosae::autoencoder::adam_step;
use sosae::datasets::{corrupt, NoiseSpec};
use sosae::numcore::{rng_uniform, sigmoid, Matrix, Rng};
use sosae::regularizers::{ksparse_project, l1_loss, push_loss};
use sosae::search::elbow;

fn matrix_from(rows: usize, cols: usize, vals: &[f64]) -> Matrix {
    Matrix::from_vec(rows, cols, vals.to_vec()).unwrap()
}

/// All permutations of 0..n (Heap's algorithm); n kept tiny by callers.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    fn heap(k: usize, idx: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(idx.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, idx, out);
            if k % 2 == 0 {
                idx.swap(i, k - 1);
            } else {
                idx.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut idx, &mut out);
    out
}

proptest! {
    #[test]
    fn push_dominates_scaled_l1(vals in proptest::collection::vec(0.0f64..1.0, 1..12)) {
        let h = matrix_from(1, vals.len(), &vals);
        let push = push_loss(&h, 0.01).unwrap();
        let l1 = l1_loss(&h);
        // every positional coefficient is at least (1+alpha)^1
        prop_assert!(push >= 1.01 * l1 - 1e-12);
    }

    #[test]
    fn descending_order_minimizes_push(vals in proptest::collection::vec(0.0f64..1.0, 2..6)) {
        let mut sorted = vals.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let best = push_loss(&matrix_from(1, sorted.len(), &sorted), 0.01).unwrap();
        for perm in permutations(vals.len()) {
            let arranged: Vec<f64> = perm.iter().map(|&i| vals[i]).collect();
            let loss = push_loss(&matrix_from(1, arranged.len(), &arranged), 0.01).unwrap();
            prop_assert!(best <= loss + 1e-12);
        }
    }

    #[test]
    fn ksparse_keeps_top_k_by_value(
        vals in proptest::collection::vec(-1.0f64..1.0, 1..10),
        k_frac in 0.0f64..1.0,
    ) {
        let n = vals.len();
        let k = 1 + ((n - 1) as f64 * k_frac) as usize;
        let h = matrix_from(1, n, &vals);
        let projected = ksparse_project(&h, k).unwrap();
        let kept: Vec<usize> = (0..n).filter(|&j| projected.get(0, j) != 0.0).collect();
        // at most k survivors, each equal to its original value
        prop_assert!(kept.len() <= k);
        for &j in &kept {
            prop_assert_eq!(projected.get(0, j), vals[j]);
        }
        // reference selection: sort by value descending, ties to lower index
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap().then(a.cmp(&b)));
        for &j in order.iter().take(k) {
            // a selected position is zero in the output only if its value was zero
            if vals[j] != 0.0 {
                prop_assert_eq!(projected.get(0, j), vals[j]);
            }
        }
        for &j in order.iter().skip(k) {
            prop_assert_eq!(projected.get(0, j), 0.0);
        }
    }

    #[test]
    fn corruption_stays_in_unit_interval(
        seed in any::<u64>(),
        nu in 0.0f64..1.0,
        sigma in 0.0f64..0.6,
    ) {
        let mut rng = Rng::new(seed);
        let x = rng_uniform(&mut rng, 0.0, 1.0, 4, 9).unwrap();
        for spec in [NoiseSpec::zero_mask(nu), NoiseSpec::gaussian(sigma), NoiseSpec::none()] {
            let mut noise_rng = Rng::derived(seed, 1);
            let out = corrupt(&x, &spec, &mut noise_rng).unwrap();
            for (&o, &i) in out.as_slice().iter().zip(x.as_slice()) {
                prop_assert!((0.0..=1.0).contains(&o));
                match spec.kind {
                    sosae::datasets::NoiseKind::ZeroMask => prop_assert!(o == i || o == 0.0),
                    sosae::datasets::NoiseKind::None => prop_assert_eq!(o, i),
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn matmul_associates(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let a = rng_uniform(&mut rng, -1.0, 1.0, 5, 7).unwrap();
        let b = rng_uniform(&mut rng, -1.0, 1.0, 7, 6).unwrap();
        let c = rng_uniform(&mut rng, -1.0, 1.0, 6, 4).unwrap();
        let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
        let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
        for (l, r) in left.as_slice().iter().zip(right.as_slice()) {
            prop_assert!((l - r).abs() <= 1e-9 * l.abs().max(1.0));
        }
    }

    #[test]
    fn sigmoid_is_symmetric(vals in proptest::collection::vec(-40.0f64..40.0, 1..20)) {
        let x = matrix_from(1, vals.len(), &vals);
        let neg = x.map(|v| -v);
        let s = sigmoid(&x);
        let sneg = sigmoid(&neg);
        for (a, b) in s.as_slice().iter().zip(sneg.as_slice()) {
            prop_assert!((a + b - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn adam_first_step_bounded_by_lr(g in -1e6f64..1e6, lr in 1e-6f64..1.0) {
        prop_assume!(g != 0.0);
        let mut theta = [0.0f64];
        let (mut m, mut v) = ([0.0], [0.0]);
        adam_step(&mut theta, &[g], &mut m, &mut v, 1, lr, 0.9, 0.999, 1e-8);
        prop_assert!(theta[0].abs() <= lr + 1e-12);
        prop_assert!(theta[0].signum() == -g.signum());
    }

    #[test]
    fn profile_scan_functions_agree(vals in proptest::collection::vec(0.0f64..2e-3, 1..40)) {
        let profile = ActivationProfile { mean_abs: vals.clone(), eps: 1e-3 };
        let cl = compressed_length(&profile);
        let active = active_count(&profile);
        let violations = prefix_violations(&profile);
        prop_assert!(active <= cl);
        prop_assert!(cl <= vals.len());
        for &j in (cl..vals.len()).collect::<Vec<_>>().iter() {
            prop_assert!(vals[j] <= 1e-3);
        }
        // the profile is a clean prefix exactly when the scans agree
        prop_assert_eq!(violations.is_empty(), active == cl);
    }

    #[test]
    fn elbow_monotone_in_tau(
        seed in any::<u64>(),
        tau1 in 0.0f64..0.5,
        tau2 in 0.0f64..0.5,
    ) {
        let (lo, hi) = if tau1 <= tau2 { (tau1, tau2) } else { (tau2, tau1) };
        let mut rng = Rng::new(seed);
        let hs: Vec<usize> = (1..=12).collect();
        // strictly decreasing loss curve
        let mut losses = vec![0.0f64; 12];
        let mut acc = 2.0;
        for l in losses.iter_mut() {
            acc -= 0.01 + rng.next_f64() * 0.1;
            *l = acc.max(0.05);
        }
        for w in losses.windows(2).map(|w| w[1] - w[0]) {
            prop_assume!(w < 0.0);
        }
        let tight = elbow(&hs, &losses, lo).unwrap();
        let loose = elbow(&hs, &losses, hi).unwrap();
        prop_assert!(loose <= tight);
    }

    #[test]
    fn shuffle_is_a_permutation(seed in any::<u64>(), n in 1usize..50) {
        let mut v: Vec<usize> = (0..n).collect();
        Rng::new(seed).shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn uniform_respects_bounds(seed in any::<u64>(), lo in -5.0f64..0.0, width in 1e-9f64..10.0) {
        let mut rng = Rng::new(seed);
        let hi = lo + width;
        let m = rng_uniform(&mut rng, lo, hi, 3, 17).unwrap();
        for &v in m.as_slice() {
            prop_assert!(v >= lo && v < hi);
        }
    }

    #[test]
    fn training_flops_scales_linearly(
        d in 1usize..100,
        h in 1usize..100,
        n in 1usize..1000,
        epochs in 1usize..20,
    ) {
        let one = training_flops(d, h, n, 1, 1);
        prop_assert_eq!(training_flops(d, h, n, epochs, 1), one * epochs as u64);
        prop_assert_eq!(training_flops(d, h, n, epochs, 7), one * epochs as u64);
        prop_assert_eq!(one, 12 * (d * h * n) as u64);
    }
}
