//! Embedding-size search: exhaustive grid and random search over candidate
//! hidden widths versus the one-shot dynamic sizing a push-trained model
//! gets for free, with FLOPs tallies for the cost comparison.

use crate::analysis::{activation_profile, compressed_length, reconstruction_mae, DEFAULT_EPS};
use crate::autoencoder::{train, TrainConfig};
use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::numcore::Rng;
use crate::regularizers::RegularizerSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    Grid,
    Random,
    Sosae,
}

impl SearchMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SearchMethod::Grid => "grid",
            SearchMethod::Random => "random",
            SearchMethod::Sosae => "sosae",
        }
    }
}

/// One candidate training during a search.
#[derive(Debug, Clone, Copy)]
pub struct CandidateRun {
    pub h: usize,
    pub val_recon_loss: f64,
    pub flops: u64,
}

/// Outcome of one sizing strategy. `iterations` equals the log length for
/// grid/random and 1 for the one-shot run; `total_flops` is the sum of the
/// per-candidate tallies.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub method: SearchMethod,
    pub iterations: usize,
    pub tuned_value: usize,
    pub total_flops: u64,
    pub log: Vec<CandidateRun>,
}

impl SearchResult {
    pub const CSV_HEADER: &'static str = "method,iterations,tuned_value,total_flops";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.method.as_str(),
            self.iterations,
            self.tuned_value,
            self.total_flops
        )
    }
}

/// Smallest h whose loss is within a relative tolerance of the loss at the
/// largest h: the first size past the elbow of the length-vs-loss curve.
/// `hs` must be ascending and nonempty.
pub fn elbow(hs: &[usize], losses: &[f64], tau: f64) -> Result<usize> {
    if hs.is_empty() || hs.len() != losses.len() {
        return Err(Error::arg(format!(
            "elbow needs equal nonempty inputs, got {} / {}",
            hs.len(),
            losses.len()
        )));
    }
    if hs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::arg("elbow candidates must be strictly ascending"));
    }
    if losses.iter().any(|l| !l.is_finite()) {
        return Err(Error::arg("elbow losses must be finite"));
    }
    if tau < 0.0 {
        return Err(Error::arg(format!("tau must be >= 0, got {tau}")));
    }
    let reference = losses[losses.len() - 1];
    let bound = (1.0 + tau) * reference;
    for (&h, &l) in hs.iter().zip(losses) {
        if l <= bound {
            return Ok(h);
        }
    }
    Ok(hs[hs.len() - 1])
}

/// Keeps the error class (divergence stays divergence for exit-code
/// purposes) while recording which candidate width failed.
fn annotate_candidate(e: Error, h: usize) -> Error {
    match e {
        Error::Divergence { epoch, msg } => Error::Divergence {
            epoch,
            msg: format!("candidate h={h}: {msg}"),
        },
        Error::Argument(m) => Error::Argument(format!("candidate h={h}: {m}")),
        other => other,
    }
}

fn run_candidates(
    data: &Dataset,
    candidates: &[usize],
    cfg: &TrainConfig,
    tau: f64,
    method: SearchMethod,
) -> Result<SearchResult> {
    // Candidate trainings use a plain autoencoder: the search strategies
    // are compared on identical reconstruction objectives.
    let mut plain = cfg.clone();
    plain.regularizer = RegularizerSpec::none();
    let x_val = data.gather_x(&data.val_idx);
    let mut log = Vec::with_capacity(candidates.len());
    for &h in candidates {
        let (params, trace) = train(data, h, &plain).map_err(|e| annotate_candidate(e, h))?;
        let val = reconstruction_mae(&params, &x_val)?;
        log.push(CandidateRun {
            h,
            val_recon_loss: val,
            flops: trace.total_flops(),
        });
    }
    let hs: Vec<usize> = log.iter().map(|c| c.h).collect();
    let losses: Vec<f64> = log.iter().map(|c| c.val_recon_loss).collect();
    let tuned = elbow(&hs, &losses, tau)?;
    Ok(SearchResult {
        method,
        iterations: log.len(),
        tuned_value: tuned,
        total_flops: log.iter().map(|c| c.flops).sum(),
        log,
    })
}

/// Trains a plain autoencoder at every candidate width (ascending), scores
/// validation reconstruction loss, and selects the elbow.
pub fn grid_search(
    data: &Dataset,
    h_candidates: &[usize],
    cfg: &TrainConfig,
    tau: f64,
) -> Result<SearchResult> {
    if h_candidates.is_empty() {
        return Err(Error::arg("grid_search needs at least one candidate"));
    }
    if h_candidates.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::arg("grid_search candidates must be sorted ascending"));
    }
    run_candidates(data, h_candidates, cfg, tau, SearchMethod::Grid)
}

/// Samples `n_iters` widths uniformly without replacement from
/// `lo..=hi`, then proceeds exactly like grid search on the sampled set
/// (the log is ordered by h regardless of sampling order).
pub fn random_search(
    data: &Dataset,
    h_range: (usize, usize),
    n_iters: usize,
    seed: u64,
    cfg: &TrainConfig,
    tau: f64,
) -> Result<SearchResult> {
    let (lo, hi) = h_range;
    if lo < 1 || lo > hi {
        return Err(Error::arg(format!(
            "random_search needs 1 <= lo <= hi, got {lo}..={hi}"
        )));
    }
    let size = hi - lo + 1;
    if n_iters < 1 || n_iters > size {
        return Err(Error::arg(format!(
            "random_search needs 1 <= n_iters <= range size {size}, got {n_iters}"
        )));
    }
    let mut pool: Vec<usize> = (lo..=hi).collect();
    Rng::new(seed).shuffle(&mut pool);
    let mut sampled = pool[..n_iters].to_vec();
    sampled.sort_unstable();
    run_candidates(data, &sampled, cfg, tau, SearchMethod::Random)
}

/// One training run with a push spec; the tuned width is the compressed
/// length the run organizes itself into, and the tally is that single
/// run's FLOPs.
pub fn sosae_oneshot(data: &Dataset, h_start: usize, cfg: &TrainConfig) -> Result<SearchResult> {
    if !cfg.regularizer.kind.has_push() {
        return Err(Error::arg(format!(
            "sosae_oneshot needs a push or push_contractive regularizer, got {}",
            cfg.regularizer.kind.as_str()
        )));
    }
    let (params, trace) = train(data, h_start, cfg)?;
    let x_val = data.gather_x(&data.val_idx);
    let profile = activation_profile(&params, &x_val, &cfg.regularizer, DEFAULT_EPS)?;
    let tuned = compressed_length(&profile);
    let val = reconstruction_mae(&params, &x_val)?;
    let total = trace.total_flops();
    Ok(SearchResult {
        method: SearchMethod::Sosae,
        iterations: 1,
        tuned_value: tuned,
        total_flops: total,
        log: vec![CandidateRun {
            h: h_start,
            val_recon_loss: val,
            flops: total,
        }],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elbow_hand_scan() {
        let hs = [1, 2, 3, 4, 5];
        let losses = [1.0, 0.30, 0.21, 0.20, 0.20];
        assert_eq!(elbow(&hs, &losses, 0.05).unwrap(), 3);
    }

    #[test]
    fn elbow_flat_picks_smallest() {
        assert_eq!(elbow(&[2, 4, 8], &[0.3, 0.3, 0.3], 0.05).unwrap(), 2);
    }

    #[test]
    fn elbow_tau_zero_strictly_decreasing() {
        assert_eq!(elbow(&[1, 2, 3], &[0.5, 0.4, 0.3], 0.0).unwrap(), 3);
    }

    #[test]
    fn elbow_monotone_in_tau() {
        let hs = [1, 2, 3, 4];
        let losses = [0.9, 0.5, 0.31, 0.3];
        let mut prev = usize::MAX;
        for tau in [0.0, 0.05, 0.1, 0.5, 1.0, 3.0] {
            let e = elbow(&hs, &losses, tau).unwrap();
            assert!(e <= prev, "tau {tau} gave {e} after {prev}");
            prev = e;
        }
    }

    #[test]
    fn elbow_rejects_bad_input() {
        assert!(elbow(&[], &[], 0.05).is_err());
        assert!(elbow(&[2, 1], &[0.1, 0.2], 0.05).is_err());
        assert!(elbow(&[1, 2], &[f64::NAN, 0.2], 0.05).is_err());
    }
}
