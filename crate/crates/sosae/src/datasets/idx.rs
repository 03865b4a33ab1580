//! IDX binary ingestion (the MNIST container format) and writing.
//!
//! Big-endian headers: images carry magic 0x00000803 and three dimension
//! words (count, rows, cols), labels carry magic 0x00000801 and one. Pixel
//! bytes are scaled by 1/255 into [0,1] and images are flattened row-major.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::numcore::Matrix;

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

/// Loads an images/labels file pair into a [`Dataset`] (all rows in the
/// train split; carve splits afterwards). The class count is taken as
/// max label + 1.
///
/// Fails on bad magic (reporting the offending bytes), truncated or
/// oversized payloads, and image/label count mismatches; no partial dataset
/// is ever returned.
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<Dataset> {
    let img = fs::read(images_path)?;
    let (n, rows, cols, pixels) = parse_images(&img, images_path)?;
    let lab = fs::read(labels_path)?;
    let labels = parse_labels(&lab, labels_path)?;
    if labels.len() != n {
        return Err(Error::Format {
            path: labels_path.display().to_string(),
            msg: format!("{} labels for {} images", labels.len(), n),
        });
    }
    let d = rows * cols;
    let data: Vec<f64> = pixels.iter().map(|&p| p as f64 / 255.0).collect();
    let x = Matrix::from_vec(n, d, data)?;
    let n_classes = labels.iter().copied().max().map_or(1, |m| m as usize + 1);
    Dataset::from_parts(x, labels.iter().map(|&l| l as u32).collect(), n_classes)
}

fn parse_images<'a>(bytes: &'a [u8], path: &Path) -> Result<(usize, usize, usize, &'a [u8])> {
    let header = read_header(bytes, path, IMAGES_MAGIC, 3)?;
    let (n, rows, cols) = (header[0] as usize, header[1] as usize, header[2] as usize);
    let expect = 16 + n * rows * cols;
    if bytes.len() != expect {
        return Err(Error::Format {
            path: path.display().to_string(),
            msg: format!("expected {} bytes for {}x{}x{}, found {}", expect, n, rows, cols, bytes.len()),
        });
    }
    Ok((n, rows, cols, &bytes[16..]))
}

fn parse_labels<'a>(bytes: &'a [u8], path: &Path) -> Result<&'a [u8]> {
    let header = read_header(bytes, path, LABELS_MAGIC, 1)?;
    let n = header[0] as usize;
    let expect = 8 + n;
    if bytes.len() != expect {
        return Err(Error::Format {
            path: path.display().to_string(),
            msg: format!("expected {} bytes for {} labels, found {}", expect, n, bytes.len()),
        });
    }
    Ok(&bytes[8..])
}

fn read_header(bytes: &[u8], path: &Path, magic: u32, n_dims: usize) -> Result<Vec<u32>> {
    let need = 4 + 4 * n_dims;
    if bytes.len() < need {
        return Err(Error::Format {
            path: path.display().to_string(),
            msg: format!("file too short for IDX header ({} bytes)", bytes.len()),
        });
    }
    let got = u32::from_be_bytes(bytes[..4].try_into().unwrap());
    if got != magic {
        return Err(Error::Format {
            path: path.display().to_string(),
            msg: format!("bad magic 0x{got:08x} (expected 0x{magic:08x})"),
        });
    }
    Ok((0..n_dims)
        .map(|i| u32::from_be_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap()))
        .collect())
}

/// Writes images in IDX format (one byte per pixel, row-major).
pub fn write_idx_images(path: &Path, pixels: &[u8], n: usize, rows: usize, cols: usize) -> Result<()> {
    if pixels.len() != n * rows * cols {
        return Err(Error::arg(format!(
            "{} pixel bytes for {}x{}x{}",
            pixels.len(),
            n,
            rows,
            cols
        )));
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&IMAGES_MAGIC.to_be_bytes())?;
    f.write_all(&(n as u32).to_be_bytes())?;
    f.write_all(&(rows as u32).to_be_bytes())?;
    f.write_all(&(cols as u32).to_be_bytes())?;
    f.write_all(pixels)?;
    Ok(())
}

/// Writes labels in IDX format (one byte per label).
pub fn write_idx_labels(path: &Path, labels: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&LABELS_MAGIC.to_be_bytes())?;
    f.write_all(&(labels.len() as u32).to_be_bytes())?;
    f.write_all(labels)?;
    Ok(())
}

/// Loads the standard four-file layout (train + test pairs), carving a
/// validation set out of the training file. With the default
/// `val_fraction` = 1/6 this is the 5:1 train/val split; the test file rows
/// become the test split unchanged.
pub fn load_idx_split(
    train_images: &Path,
    train_labels: &Path,
    test_images: &Path,
    test_labels: &Path,
    val_fraction: f64,
    seed: u64,
) -> Result<Dataset> {
    if !(0.0..1.0).contains(&val_fraction) {
        return Err(Error::arg(format!(
            "val_fraction must be in [0,1), got {val_fraction}"
        )));
    }
    let tr = load_idx(train_images, train_labels)?;
    let te = load_idx(test_images, test_labels)?;
    if tr.d() != te.d() {
        return Err(Error::Format {
            path: test_images.display().to_string(),
            msg: format!("test dimensionality {} != train {}", te.d(), tr.d()),
        });
    }
    let n_tr = tr.n();
    let n = n_tr + te.n();
    let d = tr.d();
    let mut data = Vec::with_capacity(n * d);
    data.extend_from_slice(tr.x.as_slice());
    data.extend_from_slice(te.x.as_slice());
    let mut labels = tr.labels.clone();
    labels.extend_from_slice(&te.labels);
    let n_classes = tr.n_classes.max(te.n_classes);
    let mut ds = Dataset::from_parts(Matrix::from_vec(n, d, data)?, labels, n_classes)?;

    let mut perm: Vec<usize> = (0..n_tr).collect();
    crate::numcore::Rng::new(seed).shuffle(&mut perm);
    let n_val = (val_fraction * n_tr as f64).floor() as usize;
    ds.val_idx = perm[..n_val].to_vec();
    ds.train_idx = perm[n_val..].to_vec();
    ds.test_idx = (n_tr..n).collect();
    Ok(ds)
}
