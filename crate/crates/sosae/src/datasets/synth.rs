//! Synthetic datasets: class-conditional Gaussian blobs and 28x28
//! seven-segment digits.
//!
//! The digit generator is the desk-scale stand-in for handwritten-digit
//! data: ten classes, geometric structure, per-sample jitter in position,
//! stroke width, and per-segment brightness, plus pixel noise. Pixels are
//! quantized to bytes at generation time so a round trip through the IDX
//! writer/loader is exact.

use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::numcore::{Matrix, Rng};

/// Image side length for the digit generator.
pub const DIGIT_SIDE: usize = 28;

/// Decorrelates the split shuffle from the sample-generation stream.
const SPLIT_SEED_SALT: u64 = 0xD1F7_5EED;

// Digit box size in pixels and segment endpoints in box units (y down).
const BOX_W: f64 = 14.0;
const BOX_H: f64 = 20.0;
const SEGS: [(f64, f64, f64, f64); 7] = [
    (0.15, 0.05, 0.85, 0.05), // A: top bar
    (0.85, 0.05, 0.85, 0.50), // B: upper right
    (0.85, 0.50, 0.85, 0.95), // C: lower right
    (0.15, 0.95, 0.85, 0.95), // D: bottom bar
    (0.15, 0.50, 0.15, 0.95), // E: lower left
    (0.15, 0.05, 0.15, 0.50), // F: upper left
    (0.15, 0.50, 0.85, 0.50), // G: middle bar
];
const DIGIT_SEGS: [&[usize]; 10] = [
    &[0, 1, 2, 3, 4, 5],    // 0: ABCDEF
    &[1, 2],                // 1: BC
    &[0, 1, 6, 4, 3],       // 2: ABGED
    &[0, 1, 6, 2, 3],       // 3: ABGCD
    &[5, 6, 1, 2],          // 4: FGBC
    &[0, 5, 6, 2, 3],       // 5: AFGCD
    &[0, 5, 6, 4, 3, 2],    // 6: AFGEDC
    &[0, 1, 2],             // 7: ABC
    &[0, 1, 2, 3, 4, 5, 6], // 8: ABCDEFG
    &[0, 1, 2, 3, 5, 6],    // 9: ABCDFG
];

fn seg_dist(px: f64, py: f64, x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    let (vx, vy) = (x2 - x1, y2 - y1);
    let l2 = vx * vx + vy * vy;
    let t = (((px - x1) * vx + (py - y1) * vy) / l2).clamp(0.0, 1.0);
    let (cx, cy) = (x1 + t * vx, y1 + t * vy);
    ((px - cx).powi(2) + (py - cy).powi(2)).sqrt()
}

/// Renders one digit as 8-bit pixels. Per call the RNG supplies: x offset,
/// y offset, stroke thickness, one amplitude per active segment, then one
/// normal deviate per pixel.
pub fn render_digit(digit: usize, rng: &mut Rng) -> Result<Vec<u8>> {
    if digit > 9 {
        return Err(Error::arg(format!("digit must be 0..=9, got {digit}")));
    }
    let dx = rng.uniform(-3.0, 3.0);
    let dy = rng.uniform(-2.5, 2.5);
    let thick = rng.uniform(1.0, 1.6);
    let ox = (DIGIT_SIDE as f64 - BOX_W) / 2.0 + dx;
    let oy = (DIGIT_SIDE as f64 - BOX_H) / 2.0 + dy;
    let segs = DIGIT_SEGS[digit];
    let placed: Vec<(f64, f64, f64, f64, f64)> = segs
        .iter()
        .map(|&s| {
            let (x1, y1, x2, y2) = SEGS[s];
            let amp = rng.uniform(0.55, 1.0);
            (
                ox + x1 * BOX_W,
                oy + y1 * BOX_H,
                ox + x2 * BOX_W,
                oy + y2 * BOX_H,
                amp,
            )
        })
        .collect();
    let mut out = Vec::with_capacity(DIGIT_SIDE * DIGIT_SIDE);
    for row in 0..DIGIT_SIDE {
        for col in 0..DIGIT_SIDE {
            let (px, py) = (col as f64, row as f64);
            let mut v: f64 = 0.0;
            for &(x1, y1, x2, y2, amp) in &placed {
                let d = seg_dist(px, py, x1, y1, x2, y2);
                v = v.max(amp * (-(d / thick) * (d / thick)).exp());
            }
            v += 0.02 * rng.normal();
            out.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
        }
    }
    Ok(out)
}

/// Generates `n` seven-segment digit samples (labels round-robin over 0..9,
/// then jointly shuffled) and returns them with a 0.6/0.15/0.25
/// train/val/test split derived from the same seed.
pub fn synth_digits(n: usize, seed: u64) -> Result<Dataset> {
    let (pixels, labels) = synth_digit_pixels(n, seed)?;
    let d = DIGIT_SIDE * DIGIT_SIDE;
    let data: Vec<f64> = pixels.iter().map(|&p| p as f64 / 255.0).collect();
    let mut ds = Dataset::from_parts(Matrix::from_vec(n, d, data)?, labels.iter().map(|&l| l as u32).collect(), 10)?;
    ds.split_ratios(0.60, 0.15, seed ^ SPLIT_SEED_SALT)?;
    Ok(ds)
}

/// Raw byte form of [`synth_digits`] for writing IDX files.
pub fn synth_digit_pixels(n: usize, seed: u64) -> Result<(Vec<u8>, Vec<u8>)> {
    if n == 0 {
        return Err(Error::arg("need at least one sample"));
    }
    let mut rng = Rng::new(seed);
    let d = DIGIT_SIDE * DIGIT_SIDE;
    let mut pixels = vec![0u8; n * d];
    let mut labels: Vec<u8> = (0..n).map(|i| (i % 10) as u8).collect();
    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);
    for (slot, &i) in order.iter().enumerate() {
        let label = (i % 10) as u8;
        let img = render_digit(label as usize, &mut rng)?;
        pixels[slot * d..(slot + 1) * d].copy_from_slice(&img);
        labels[slot] = label;
    }
    Ok((pixels, labels))
}

/// Class-conditional Gaussian blobs in [0,1]^d, linearly separable by
/// construction: centers are rejection-sampled at pairwise distance
/// >= 4 sigma (shrinking sigma if a crowded configuration cannot be
/// placed). Labels are round-robin; split 0.6/0.2/0.2 from the seed.
pub fn synth_blobs(n: usize, d: usize, n_classes: usize, seed: u64) -> Result<Dataset> {
    if n_classes < 2 || n < n_classes {
        return Err(Error::arg(format!(
            "need n >= n_classes >= 2, got n={n}, n_classes={n_classes}"
        )));
    }
    if d == 0 {
        return Err(Error::arg("need d >= 1"));
    }
    let mut rng = Rng::new(seed);
    let mut sigma = 0.06;
    let centers = loop {
        match place_centers(&mut rng, n_classes, d, 4.0 * sigma) {
            Some(c) => break c,
            None => sigma *= 0.75,
        }
    };
    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % n_classes;
        labels.push(c as u32);
        for j in 0..d {
            data.push((centers[c][j] + sigma * rng.normal()).clamp(0.0, 1.0));
        }
    }
    let mut ds = Dataset::from_parts(Matrix::from_vec(n, d, data)?, labels, n_classes)?;
    ds.split_ratios(0.60, 0.20, seed ^ SPLIT_SEED_SALT)?;
    Ok(ds)
}

fn place_centers(rng: &mut Rng, k: usize, d: usize, min_dist: f64) -> Option<Vec<Vec<f64>>> {
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut attempts = 0;
    while centers.len() < k {
        attempts += 1;
        if attempts > 200 * k {
            return None;
        }
        let cand: Vec<f64> = (0..d).map(|_| rng.uniform(0.15, 0.85)).collect();
        let ok = centers.iter().all(|c| {
            let d2: f64 = c.iter().zip(&cand).map(|(a, b)| (a - b) * (a - b)).sum();
            d2.sqrt() >= min_dist
        });
        if ok {
            centers.push(cand);
        }
    }
    Some(centers)
}
