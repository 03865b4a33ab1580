//! Sparsity penalties and their exact gradients.
//!
//! All penalties are reduced as the *mean* over the batch, so the weights
//! lambda/beta do not depend on batch size. Gradients returned here carry
//! that 1/batch factor and are with respect to the raw penalty (the caller
//! applies lambda/beta scaling, or uses [`penalty_and_grads`] which folds
//! the weights in).
//!
//! The absolute-value subgradient at exactly 0 is taken as 0 everywhere:
//! a unit that has been pushed to zero stays untouched by the penalty.

use crate::error::{Error, Result};
use crate::numcore::Matrix;

/// Which penalty a training run applies.
///
/// `KsparseContractive` combines the k-sparse projection with the
/// contractive penalty (computed on the pre-projection activations); it is
/// the "contractive k-sparse" baseline of the comparison harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegKind {
    None,
    L1,
    L2,
    Ksparse,
    Contractive,
    Push,
    PushContractive,
    KsparseContractive,
}

impl RegKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegKind::None => "none",
            RegKind::L1 => "l1",
            RegKind::L2 => "l2",
            RegKind::Ksparse => "ksparse",
            RegKind::Contractive => "contractive",
            RegKind::Push => "push",
            RegKind::PushContractive => "push_contractive",
            RegKind::KsparseContractive => "ksparse_contractive",
        }
    }

    pub fn parse(s: &str) -> Result<RegKind> {
        Ok(match s {
            "none" => RegKind::None,
            "l1" => RegKind::L1,
            "l2" => RegKind::L2,
            "ksparse" => RegKind::Ksparse,
            "contractive" => RegKind::Contractive,
            "push" => RegKind::Push,
            "push_contractive" => RegKind::PushContractive,
            "ksparse_contractive" => RegKind::KsparseContractive,
            other => return Err(Error::arg(format!("unknown regularizer kind '{other}'"))),
        })
    }

    /// True for kinds that include the push term.
    pub fn has_push(&self) -> bool {
        matches!(self, RegKind::Push | RegKind::PushContractive)
    }

    /// True for kinds that include the contractive term.
    pub fn has_contractive(&self) -> bool {
        matches!(
            self,
            RegKind::Contractive | RegKind::PushContractive | RegKind::KsparseContractive
        )
    }

    /// True for kinds that apply the k-sparse projection.
    pub fn has_ksparse(&self) -> bool {
        matches!(self, RegKind::Ksparse | RegKind::KsparseContractive)
    }
}

/// A penalty choice with its coefficients.
///
/// Unused fields are ignored by the chosen kind; `validate` checks the ones
/// that matter. lambda weights the sparsity term (L1/L2/push), beta the
/// contractive term, alpha is the push positional rate, k the number of
/// retained units for the k-sparse kinds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizerSpec {
    pub kind: RegKind,
    pub lambda: f64,
    pub beta: f64,
    pub alpha: f64,
    pub k: usize,
}

impl Default for RegularizerSpec {
    fn default() -> Self {
        RegularizerSpec {
            kind: RegKind::None,
            lambda: 0.0,
            beta: 0.0,
            alpha: 0.01,
            k: 1,
        }
    }
}

impl RegularizerSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn l1(lambda: f64) -> Self {
        RegularizerSpec {
            kind: RegKind::L1,
            lambda,
            ..Self::default()
        }
    }

    pub fn l2(lambda: f64) -> Self {
        RegularizerSpec {
            kind: RegKind::L2,
            lambda,
            ..Self::default()
        }
    }

    pub fn ksparse(k: usize) -> Self {
        RegularizerSpec {
            kind: RegKind::Ksparse,
            k,
            ..Self::default()
        }
    }

    pub fn contractive(beta: f64) -> Self {
        RegularizerSpec {
            kind: RegKind::Contractive,
            beta,
            ..Self::default()
        }
    }

    pub fn push(lambda: f64, alpha: f64) -> Self {
        RegularizerSpec {
            kind: RegKind::Push,
            lambda,
            alpha,
            ..Self::default()
        }
    }

    pub fn push_contractive(lambda: f64, beta: f64, alpha: f64) -> Self {
        RegularizerSpec {
            kind: RegKind::PushContractive,
            lambda,
            beta,
            alpha,
            ..Self::default()
        }
    }

    pub fn ksparse_contractive(k: usize, beta: f64) -> Self {
        RegularizerSpec {
            kind: RegKind::KsparseContractive,
            k,
            beta,
            ..Self::default()
        }
    }

    /// Checks coefficient constraints against a hidden width.
    pub fn validate(&self, hidden: usize) -> Result<()> {
        if self.lambda < 0.0 || self.beta < 0.0 {
            return Err(Error::arg(format!(
                "regularizer weights must be >= 0 (lambda={}, beta={})",
                self.lambda, self.beta
            )));
        }
        if self.kind.has_push() && !(self.alpha > 0.0) {
            return Err(Error::arg(format!(
                "push regularizer needs alpha > 0, got {}",
                self.alpha
            )));
        }
        if self.kind.has_ksparse() && (self.k < 1 || self.k > hidden) {
            return Err(Error::arg(format!(
                "ksparse needs 1 <= k <= hidden ({}), got k={}",
                hidden, self.k
            )));
        }
        Ok(())
    }
}

/// The positional weights (1+alpha)^(i+1) of the push loss, strictly
/// increasing in the slot index i.
#[derive(Debug, Clone)]
pub struct PushCoefficients {
    pub coeffs: Vec<f64>,
}

impl PushCoefficients {
    pub fn new(dim: usize, alpha: f64) -> Result<PushCoefficients> {
        if !(alpha > 0.0) {
            return Err(Error::arg(format!("push needs alpha > 0, got {alpha}")));
        }
        let base = 1.0 + alpha;
        let mut coeffs = Vec::with_capacity(dim);
        let mut c = 1.0;
        for _ in 0..dim {
            c *= base;
            coeffs.push(c);
        }
        Ok(PushCoefficients { coeffs })
    }
}

/// Push loss: mean over the batch of sum_k (1+alpha)^k |h_k|, k = 1..dim.
///
/// The exponentially growing coefficients make activation mass late in the
/// vector strictly more expensive than the same mass early, which is what
/// drives active units into a leading prefix.
pub fn push_loss(h: &Matrix, alpha: f64) -> Result<f64> {
    let pc = PushCoefficients::new(h.cols(), alpha)?;
    let mut total = 0.0;
    for i in 0..h.rows() {
        for (v, c) in h.row(i).iter().zip(&pc.coeffs) {
            total += c * v.abs();
        }
    }
    Ok(total / h.rows() as f64)
}

/// Gradient of [`push_loss`] with respect to h (mean-reduced).
pub fn push_grad(h: &Matrix, alpha: f64) -> Result<Matrix> {
    let pc = PushCoefficients::new(h.cols(), alpha)?;
    let inv_b = 1.0 / h.rows() as f64;
    let mut g = Matrix::zeros(h.rows(), h.cols());
    for i in 0..h.rows() {
        let hr = h.row(i);
        let gr = g.row_mut(i);
        for j in 0..hr.len() {
            gr[j] = sign0(hr[j]) * pc.coeffs[j] * inv_b;
        }
    }
    Ok(g)
}

/// L1 penalty: mean over the batch of sum |h_i|.
pub fn l1_loss(h: &Matrix) -> f64 {
    h.as_slice().iter().map(|v| v.abs()).sum::<f64>() / h.rows() as f64
}

/// Gradient of [`l1_loss`] (mean-reduced; 0 at exact zeros).
pub fn l1_grad(h: &Matrix) -> Matrix {
    let inv_b = 1.0 / h.rows() as f64;
    h.map(|v| sign0(v) * inv_b)
}

/// L2 penalty: mean over the batch of sum h_i^2.
pub fn l2_loss(h: &Matrix) -> f64 {
    h.as_slice().iter().map(|v| v * v).sum::<f64>() / h.rows() as f64
}

/// Gradient of [`l2_loss`] (mean-reduced).
pub fn l2_grad(h: &Matrix) -> Matrix {
    let inv_b = 2.0 / h.rows() as f64;
    h.map(|v| v * inv_b)
}

/// Keeps the k largest activations per row (by value, not magnitude, since
/// sigmoid codes are nonnegative), zeroing the rest. Ties keep the lower
/// index. Gradients pass straight through on the retained support only.
pub fn ksparse_project(h: &Matrix, k: usize) -> Result<Matrix> {
    Ok(ksparse_project_with_mask(h, k)?.0)
}

/// [`ksparse_project`] plus the 0/1 support mask needed for backprop.
pub fn ksparse_project_with_mask(h: &Matrix, k: usize) -> Result<(Matrix, Matrix)> {
    let dim = h.cols();
    if k < 1 || k > dim {
        return Err(Error::arg(format!(
            "ksparse_project needs 1 <= k <= {dim}, got k={k}"
        )));
    }
    let mut out = Matrix::zeros(h.rows(), dim);
    let mut mask = Matrix::zeros(h.rows(), dim);
    let mut order: Vec<usize> = Vec::with_capacity(dim);
    for i in 0..h.rows() {
        let row = h.row(i);
        order.clear();
        order.extend(0..dim);
        // Sort by value descending, index ascending, so ties keep the
        // earliest slot.
        order.sort_by(|&a, &b| {
            row[b]
                .partial_cmp(&row[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        for &j in order.iter().take(k) {
            out.set(i, j, row[j]);
            mask.set(i, j, 1.0);
        }
    }
    Ok((out, mask))
}

/// Contractive penalty: mean over the batch of
/// sum_j (h_j (1-h_j))^2 * ||W_enc column j||^2,
/// the squared Frobenius norm of the sigmoid encoder's Jacobian. It rewards
/// saturated (committed) units and small encoder columns, contracting the
/// feature map around the data.
pub fn contractive_penalty(h: &Matrix, w_enc: &Matrix) -> Result<f64> {
    check_contractive_shapes(h, w_enc)?;
    let wn = col_sq_norms(w_enc);
    let mut total = 0.0;
    for i in 0..h.rows() {
        for (v, w) in h.row(i).iter().zip(&wn) {
            let s = v * (1.0 - v);
            total += s * s * w;
        }
    }
    Ok(total / h.rows() as f64)
}

/// Gradients of [`contractive_penalty`] with respect to h and (directly)
/// W_enc, both mean-reduced. The W_enc part here is only the explicit
/// dependence; the caller also chains the h part back through the encoder.
pub fn contractive_grad(h: &Matrix, w_enc: &Matrix) -> Result<(Matrix, Matrix)> {
    check_contractive_shapes(h, w_enc)?;
    let b = h.rows() as f64;
    let wn = col_sq_norms(w_enc);
    let mut dh = Matrix::zeros(h.rows(), h.cols());
    // col_s2[j] = sum_b s_bj^2 with s = h(1-h)
    let mut col_s2 = vec![0.0; h.cols()];
    for i in 0..h.rows() {
        let hr = h.row(i);
        let dr = dh.row_mut(i);
        for j in 0..hr.len() {
            let v = hr[j];
            let s = v * (1.0 - v);
            // d/dh of s^2 = 2 s (1-2h)
            dr[j] = 2.0 * s * (1.0 - 2.0 * v) * wn[j] / b;
            col_s2[j] += s * s;
        }
    }
    let mut dw = Matrix::zeros(w_enc.rows(), w_enc.cols());
    for i in 0..w_enc.rows() {
        let wr = w_enc.row(i);
        let dr = dw.row_mut(i);
        for j in 0..wr.len() {
            dr[j] = 2.0 * wr[j] * col_s2[j] / b;
        }
    }
    Ok((dh, dw))
}

fn check_contractive_shapes(h: &Matrix, w_enc: &Matrix) -> Result<()> {
    if h.cols() != w_enc.cols() {
        return Err(Error::shape(
            "contractive_penalty",
            h.shape_str(),
            w_enc.shape_str(),
        ));
    }
    Ok(())
}

fn col_sq_norms(w: &Matrix) -> Vec<f64> {
    let mut out = vec![0.0; w.cols()];
    for i in 0..w.rows() {
        for (o, v) in out.iter_mut().zip(w.row(i)) {
            *o += v * v;
        }
    }
    out
}

/// Weighted penalty value only (forward pass), for a full
/// [`RegularizerSpec`]. `h` is pre-projection; see [`penalty_and_grads`].
pub fn penalty_value(spec: &RegularizerSpec, h: &Matrix, w_enc: &Matrix) -> Result<f64> {
    spec.validate(h.cols())?;
    let mut value = 0.0;
    if spec.kind.has_push() {
        value += spec.lambda * push_loss(h, spec.alpha)?;
    }
    match spec.kind {
        RegKind::L1 => value += spec.lambda * l1_loss(h),
        RegKind::L2 => value += spec.lambda * l2_loss(h),
        _ => {}
    }
    if spec.kind.has_contractive() {
        value += spec.beta * contractive_penalty(h, w_enc)?;
    }
    Ok(value)
}

/// Weighted penalty value and gradients for a full [`RegularizerSpec`].
///
/// `h` must be the raw (pre-projection) activations. Returns the penalty
/// value already scaled by lambda/beta, the gradient with respect to h, and
/// the direct gradient with respect to W_enc (contractive kinds only).
/// K-sparse kinds contribute no penalty term of their own: the projection is
/// applied in the forward pass instead.
pub fn penalty_and_grads(
    spec: &RegularizerSpec,
    h: &Matrix,
    w_enc: &Matrix,
) -> Result<(f64, Option<Matrix>, Option<Matrix>)> {
    spec.validate(h.cols())?;
    let mut value = 0.0;
    let mut dh: Option<Matrix> = None;
    let mut dw: Option<Matrix> = None;

    if spec.kind.has_push() {
        value += spec.lambda * push_loss(h, spec.alpha)?;
        let mut g = push_grad(h, spec.alpha)?;
        scale(&mut g, spec.lambda);
        dh = Some(g);
    }
    match spec.kind {
        RegKind::L1 => {
            value += spec.lambda * l1_loss(h);
            let mut g = l1_grad(h);
            scale(&mut g, spec.lambda);
            dh = Some(g);
        }
        RegKind::L2 => {
            value += spec.lambda * l2_loss(h);
            let mut g = l2_grad(h);
            scale(&mut g, spec.lambda);
            dh = Some(g);
        }
        _ => {}
    }
    if spec.kind.has_contractive() {
        value += spec.beta * contractive_penalty(h, w_enc)?;
        let (mut gh, mut gw) = contractive_grad(h, w_enc)?;
        scale(&mut gh, spec.beta);
        scale(&mut gw, spec.beta);
        match &mut dh {
            Some(acc) => add_into(acc, &gh),
            None => dh = Some(gh),
        }
        dw = Some(gw);
    }
    Ok((value, dh, dw))
}

#[inline]
fn sign0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn scale(m: &mut Matrix, a: f64) {
    for v in m.as_mut_slice() {
        *v *= a;
    }
}

fn add_into(acc: &mut Matrix, other: &Matrix) {
    for (a, o) in acc.as_mut_slice().iter_mut().zip(other.as_slice()) {
        *a += o;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(vals: &[f64]) -> Matrix {
        Matrix::from_rows(&[vals]).unwrap()
    }

    #[test]
    fn push_loss_hand_values() {
        assert_eq!(push_loss(&row(&[0.0, 0.0, 0.0]), 0.01).unwrap(), 0.0);
        assert!((push_loss(&row(&[1.0]), 0.01).unwrap() - 1.01).abs() < 1e-12);
        assert!((push_loss(&row(&[1.0, 1.0]), 0.01).unwrap() - 2.0301).abs() < 1e-12);
        // Positional pressure: the same mass costs more in a later slot.
        let early = push_loss(&row(&[1.0, 0.0]), 0.01).unwrap();
        let late = push_loss(&row(&[0.0, 1.0]), 0.01).unwrap();
        assert!((early - 1.01).abs() < 1e-12);
        assert!((late - 1.0201).abs() < 1e-12);
        assert!(early < late);
    }

    #[test]
    fn push_rejects_nonpositive_alpha() {
        assert!(push_loss(&row(&[1.0]), 0.0).is_err());
        assert!(push_loss(&row(&[1.0]), -1.0).is_err());
    }

    #[test]
    fn l1_l2_hand_values() {
        assert_eq!(l1_loss(&row(&[0.0, 0.0])), 0.0);
        assert_eq!(l1_loss(&row(&[0.5, -0.5])), 1.0);
        assert_eq!(l2_loss(&row(&[0.0])), 0.0);
        assert_eq!(l2_loss(&row(&[3.0, 4.0])), 25.0);
    }

    #[test]
    fn ksparse_selection_and_ties() {
        let p = ksparse_project(&row(&[0.2, 0.9, 0.5]), 2).unwrap();
        assert_eq!(p.row(0), &[0.0, 0.9, 0.5]);
        let full = ksparse_project(&row(&[0.2, 0.9, 0.5]), 3).unwrap();
        assert_eq!(full.row(0), &[0.2, 0.9, 0.5]);
        let tie = ksparse_project(&row(&[0.5, 0.5, 0.1]), 1).unwrap();
        assert_eq!(tie.row(0), &[0.5, 0.0, 0.0]);
        assert!(ksparse_project(&row(&[1.0]), 2).is_err());
    }

    #[test]
    fn contractive_hand_value() {
        let h = row(&[0.5]);
        let w = Matrix::from_rows(&[&[1.0], &[0.0]]).unwrap();
        let c = contractive_penalty(&h, &w).unwrap();
        assert!((c - 0.0625).abs() < 1e-15);
        // Saturated units kill the Jacobian entirely.
        let sat = row(&[0.0]);
        assert_eq!(contractive_penalty(&sat, &w).unwrap(), 0.0);
        let sat1 = row(&[1.0]);
        assert_eq!(contractive_penalty(&sat1, &w).unwrap(), 0.0);
    }
}
