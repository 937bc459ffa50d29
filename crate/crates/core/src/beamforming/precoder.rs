use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{condition_number, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecoderKind {
    #[default]
    Mmse,
    Zf,
}

impl std::fmt::Display for PrecoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PrecoderKind::Mmse => "mmse",
            PrecoderKind::Zf => "zf",
        })
    }
}

/// Baseband precoder `F` (`L_B x K`), columns scaled so `||W f_k|| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitalPrecoder {
    pub f: CMatrix,
    pub kind: PrecoderKind,
}

/// Largest condition number of `T T^H` accepted by the ZF inverse.
pub const ZF_MAX_CONDITION: f64 = 1e12;

fn check_dims(t: &CMatrix, w: &CMatrix) -> Result<()> {
    if t.nrows() == 0 || t.ncols() == 0 {
        return Err(Error::dimension("effective channel is empty"));
    }
    if w.ncols() != t.ncols() {
        return Err(Error::dimension(format!(
            "effective channel has {} columns but W has {}",
            t.ncols(),
            w.ncols()
        )));
    }
    Ok(())
}

fn normalize_columns(f: &mut CMatrix, w: &CMatrix) -> Result<()> {
    let wf = w * &*f;
    for k in 0..f.ncols() {
        let n = wf.column(k).norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Singular(format!("precoder column {k} has no power")));
        }
        f.column_mut(k).unscale_mut(n);
    }
    Ok(())
}

/// Regularized MMSE precoder `(T^H T + (K sigma^2 / P) W^H W)^{-1} T^H`.
pub fn mmse_precoder(t: &CMatrix, w: &CMatrix, noise_power: f64, total_power: f64) -> Result<DigitalPrecoder> {
    check_dims(t, w)?;
    if !(noise_power >= 0.0) || !(total_power > 0.0) {
        return Err(Error::domain(
            "noise power must be nonnegative and transmit power positive",
        ));
    }
    let k = t.nrows() as f64;
    let reg = k * noise_power / total_power;
    let th = t.adjoint();
    let gram = &th * t + w.adjoint() * w * crate::Complex64::new(reg, 0.0);
    let lu = gram.lu();
    let mut f = lu
        .solve(&th)
        .ok_or_else(|| Error::Singular("regularized MMSE Gramian is singular".into()))?;
    if f.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular("regularized MMSE Gramian is singular".into()));
    }
    normalize_columns(&mut f, w)?;
    Ok(DigitalPrecoder {
        f,
        kind: PrecoderKind::Mmse,
    })
}

/// Zero-forcing precoder `T^H (T T^H)^{-1} Delta`.
pub fn zf_precoder(t: &CMatrix, w: &CMatrix) -> Result<DigitalPrecoder> {
    check_dims(t, w)?;
    if t.nrows() > t.ncols() {
        return Err(Error::Singular(format!(
            "{} users cannot be separated with {} RF chains",
            t.nrows(),
            t.ncols()
        )));
    }
    let th = t.adjoint();
    let gram = t * &th;
    let cond = condition_number(&gram);
    if !(cond < ZF_MAX_CONDITION) {
        return Err(Error::Singular(format!("T T^H is ill-conditioned (cond {cond:.3e})")));
    }
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::Singular("T T^H is not invertible".into()))?;
    let mut f = th * inv;
    normalize_columns(&mut f, w)?;
    Ok(DigitalPrecoder {
        f,
        kind: PrecoderKind::Zf,
    })
}

pub fn precoder(
    kind: PrecoderKind,
    t: &CMatrix,
    w: &CMatrix,
    noise_power: f64,
    total_power: f64,
) -> Result<DigitalPrecoder> {
    match kind {
        PrecoderKind::Mmse => mmse_precoder(t, w, noise_power, total_power),
        PrecoderKind::Zf => zf_precoder(t, w),
    }
}
