//! Model checkpoint serialization.
//!
//! Layout: magic bytes "SOSAE1\n", then d and h as 32-bit little-endian
//! unsigned integers, then W_enc, b_enc, W_dec, b_dec as 64-bit
//! little-endian floats in row-major order.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::autoencoder::AutoencoderParams;
use crate::error::{Error, Result};
use crate::numcore::Matrix;

const MAGIC: &[u8; 7] = b"SOSAE1\n";

pub fn save_checkpoint(params: &AutoencoderParams, path: &Path) -> Result<()> {
    params.validate()?;
    let (d, h) = (params.d(), params.h());
    let mut buf = Vec::with_capacity(7 + 8 + 8 * (2 * d * h + d + h));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(d as u32).to_le_bytes());
    buf.extend_from_slice(&(h as u32).to_le_bytes());
    for block in [
        params.w_enc.as_slice(),
        &params.b_enc,
        params.w_dec.as_slice(),
        &params.b_dec,
    ] {
        for v in block {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<AutoencoderParams> {
    let bytes = fs::read(path)?;
    let perr = |msg: String| Error::Format {
        path: path.display().to_string(),
        msg,
    };
    if bytes.len() < 15 {
        return Err(perr(format!("file too short ({} bytes)", bytes.len())));
    }
    if &bytes[..7] != MAGIC {
        return Err(perr(format!(
            "bad magic {:02x?} (expected {:02x?})",
            &bytes[..7],
            MAGIC
        )));
    }
    let d = u32::from_le_bytes(bytes[7..11].try_into().unwrap()) as usize;
    let h = u32::from_le_bytes(bytes[11..15].try_into().unwrap()) as usize;
    let n_floats = 2 * d * h + d + h;
    let expect = 15 + 8 * n_floats;
    if bytes.len() != expect {
        return Err(perr(format!(
            "expected {expect} bytes for d={d}, h={h}, found {}",
            bytes.len()
        )));
    }
    let mut floats = bytes[15..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let mut take = |n: usize| -> Vec<f64> { floats.by_ref().take(n).collect() };
    let params = AutoencoderParams {
        w_enc: Matrix::from_vec(d, h, take(d * h))?,
        b_enc: take(h),
        w_dec: Matrix::from_vec(h, d, take(h * d))?,
        b_dec: take(d),
    };
    params.validate()?;
    Ok(params)
}
