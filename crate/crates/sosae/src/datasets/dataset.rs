//! Sample container with normalized pixels, labels, and split indices.

use crate::error::{Error, Result};
use crate::numcore::{Matrix, Rng};

/// A labeled dataset with entries in [0,1] and disjoint train/val/test
/// splits covering all rows.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: Matrix,
    pub labels: Vec<u32>,
    pub n_classes: usize,
    pub train_idx: Vec<usize>,
    pub val_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
}

impl Dataset {
    /// Wraps raw samples with all rows assigned to the train split; use
    /// [`Dataset::split_ratios`] to carve out val/test.
    pub fn from_parts(x: Matrix, labels: Vec<u32>, n_classes: usize) -> Result<Dataset> {
        if labels.len() != x.rows() {
            return Err(Error::arg(format!(
                "{} labels for {} samples",
                labels.len(),
                x.rows()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= n_classes) {
            return Err(Error::arg(format!(
                "label {bad} out of range for {n_classes} classes"
            )));
        }
        let n = x.rows();
        Ok(Dataset {
            x,
            labels,
            n_classes,
            train_idx: (0..n).collect(),
            val_idx: Vec::new(),
            test_idx: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn d(&self) -> usize {
        self.x.cols()
    }

    /// Reassigns splits by shuffling all rows with the seeded RNG and
    /// cutting at the given ratios (train, then val, remainder test).
    /// A pure function of (seed, ratios): the same inputs always produce
    /// the same index lists.
    pub fn split_ratios(&mut self, train_ratio: f64, val_ratio: f64, seed: u64) -> Result<()> {
        if !(0.0..=1.0).contains(&train_ratio)
            || !(0.0..=1.0).contains(&val_ratio)
            || train_ratio + val_ratio > 1.0
        {
            return Err(Error::arg(format!(
                "split ratios must be in [0,1] with train+val <= 1, got {train_ratio}/{val_ratio}"
            )));
        }
        let n = self.n();
        let mut perm: Vec<usize> = (0..n).collect();
        Rng::new(seed).shuffle(&mut perm);
        let n_train = (train_ratio * n as f64).floor() as usize;
        let n_val = (val_ratio * n as f64).floor() as usize;
        self.train_idx = perm[..n_train].to_vec();
        self.val_idx = perm[n_train..n_train + n_val].to_vec();
        self.test_idx = perm[n_train + n_val..].to_vec();
        Ok(())
    }

    /// Copies the selected rows into a new matrix.
    pub fn gather_x(&self, idx: &[usize]) -> Matrix {
        let d = self.d();
        let mut out = Matrix::zeros(idx.len(), d);
        for (r, &i) in idx.iter().enumerate() {
            out.row_mut(r).copy_from_slice(self.x.row(i));
        }
        out
    }

    pub fn gather_labels(&self, idx: &[usize]) -> Vec<u32> {
        idx.iter().map(|&i| self.labels[i]).collect()
    }

    /// Checks the container invariants: splits disjoint and covering,
    /// pixels in [0,1], labels in range.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        let mut seen = vec![false; n];
        for &i in self
            .train_idx
            .iter()
            .chain(&self.val_idx)
            .chain(&self.test_idx)
        {
            if i >= n {
                return Err(Error::arg(format!("split index {i} out of range (n={n})")));
            }
            if seen[i] {
                return Err(Error::arg(format!("split index {i} appears twice")));
            }
            seen[i] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::arg("splits do not cover all samples".to_string()));
        }
        if self
            .x
            .as_slice()
            .iter()
            .any(|&v| !(0.0..=1.0).contains(&v))
        {
            return Err(Error::arg("sample entries outside [0,1]".to_string()));
        }
        if let Some(&bad) = self
            .labels
            .iter()
            .find(|&&l| l as usize >= self.n_classes)
        {
            return Err(Error::arg(format!(
                "label {bad} out of range for {} classes",
                self.n_classes
            )));
        }
        Ok(())
    }
}
