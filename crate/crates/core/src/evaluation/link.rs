use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_row_times, CMatrix, CVector};

/// Desired and interference power seen by one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalTerms {
    pub signal: f64,
    pub interference: f64,
}

/// Effective row `t_k = v^H (H diag(q) G + Q) W`, returned as a column of
/// length `W.ncols()`. `q` is the concatenated RIS diagonal; `None` for the
/// RIS path or the direct path leaves that path out.
pub fn effective_row(
    v: &CVector,
    ris_path: Option<(&CMatrix, &CVector, &CMatrix)>,
    direct: Option<&CMatrix>,
    w: &CMatrix,
) -> Result<CVector> {
    let mut at_bs = CVector::zeros(w.nrows());
    if let Some((h, q, g)) = ris_path {
        if h.nrows() != v.len() || h.ncols() != q.len() || g.nrows() != q.len() || g.ncols() != w.nrows() {
            return Err(Error::dimension("RIS path does not conform with v and W"));
        }
        let r = hermitian_row_times(v, h).component_mul(q);
        at_bs += g.tr_mul(&r);
    }
    if let Some(qd) = direct {
        if qd.nrows() != v.len() || qd.ncols() != w.nrows() {
            return Err(Error::dimension("direct channel does not conform with v and W"));
        }
        at_bs += hermitian_row_times(v, qd);
    }
    Ok(w.tr_mul(&at_bs))
}

/// `signal = (P/K)|t_k f_k|^2`, `interference = (P/K) sum_{i != k} |t_k f_i|^2`.
pub fn received_signal_terms(row: &CVector, f: &CMatrix, k: usize, total_power: f64) -> Result<SignalTerms> {
    if row.len() != f.nrows() || k >= f.ncols() {
        return Err(Error::dimension("effective row does not conform with the precoder"));
    }
    let per_user = total_power / f.ncols() as f64;
    let mut signal = 0.0;
    let mut interference = 0.0;
    for i in 0..f.ncols() {
        let a: Complex64 = row.iter().zip(f.column(i).iter()).map(|(x, y)| x * y).sum();
        if i == k {
            signal = per_user * a.norm_sqr();
        } else {
            interference += per_user * a.norm_sqr();
        }
    }
    Ok(SignalTerms { signal, interference })
}

/// `log2(1 + signal / (interference + noise))`.
pub fn user_rate(signal: f64, interference: f64, noise: f64) -> f64 {
    if signal <= 0.0 {
        return 0.0;
    }
    (signal / (interference + noise)).ln_1p() / std::f64::consts::LN_2
}
