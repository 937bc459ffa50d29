use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{axis_phasors, reflection_matrix, UpaShape};
use crate::error::{Error, Result};
use crate::geometry::AnglePair;
use crate::linalg::{cis, CMatrix, CVector};

/// Per-sub-RIS reflection phases; every entry has unit modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct RisPhaseConfig {
    pub phases: Vec<CVector>,
}

impl RisPhaseConfig {
    pub fn new(phases: Vec<CVector>) -> Result<Self> {
        for (k, q) in phases.iter().enumerate() {
            if q.iter().any(|z| (z.norm() - 1.0).abs() > 1e-9) {
                return Err(Error::domain(format!("sub-RIS {k} has a non-unit-modulus phase")));
            }
        }
        Ok(Self { phases })
    }

    /// Independent uniform phases for `blocks` sub-RISs of `len` elements.
    pub fn random<R: Rng + ?Sized>(blocks: usize, len: usize, rng: &mut R) -> Self {
        let phases = (0..blocks)
            .map(|_| CVector::from_fn(len, |_, _| cis(rng.random_range(0.0..2.0 * PI))))
            .collect();
        Self { phases }
    }

    /// Concatenated diagonal of `O`.
    pub fn diagonal(&self) -> CVector {
        let all: Vec<Complex64> = self.phases.iter().flat_map(|q| q.iter().copied()).collect();
        CVector::from_vec(all)
    }

    pub fn reflection_matrix(&self) -> CMatrix {
        reflection_matrix(&self.phases)
    }
}

/// `y^H diag(x) z`, evaluated as `x^T (y^* . z)`.
pub fn diag_bilinear(y: &CVector, x: &CVector, z: &CVector) -> Complex64 {
    x.iter()
        .zip(y.iter().zip(z.iter()))
        .map(|(xi, (yi, zi))| xi * yi.conj() * zi)
        .sum()
}

/// The vector `(H^T v^*) . a` whose phases the closed-form solution aligns.
pub fn phase_target(h: &CMatrix, v: &CVector, incident: &CVector) -> Result<CVector> {
    if h.nrows() != v.len() || h.ncols() != incident.len() {
        return Err(Error::dimension(format!(
            "H is {}x{} but v has {} and the incident vector {} entries",
            h.nrows(),
            h.ncols(),
            v.len(),
            incident.len()
        )));
    }
    let htv = h.transpose() * v.map(|z| z.conj());
    Ok(htv.component_mul(incident))
}

/// `|q^T [(H^T v^*) . a]|^2`.
pub fn ris_objective(q: &CVector, h: &CMatrix, v: &CVector, incident: &CVector) -> Result<f64> {
    let x = phase_target(h, v, incident)?;
    Ok(q.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<Complex64>().norm_sqr())
}

/// Closed-form phase design and whether any entry had no defined phase.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormPhase {
    pub q: CVector,
    pub degenerate: bool,
}

/// `q = [(H^T v^*) . a_sa]^*`, with each entry divided by its magnitude.
/// Zero entries get phase 0 and set the degeneracy flag.
pub fn closed_form_ris_phase(h: &CMatrix, v: &CVector, a_sa: &CVector) -> Result<ClosedFormPhase> {
    let x = phase_target(h, v, a_sa)?;
    let scale = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut degenerate = false;
    let q = x.map(|z| {
        let m = z.norm();
        if m <= 1e-300 || m <= 1e-15 * scale {
            degenerate = true;
            Complex64::new(1.0, 0.0)
        } else {
            z.conj() / m
        }
    });
    Ok(ClosedFormPhase { q, degenerate })
}

/// Reflection that turns the incident steering vector `a_sa` into a beam
/// toward `aod`: `q = m_s n_s a_sd(aod) . a_sa^*` (unit modulus).
pub fn directional_phase(shape: &UpaShape, aod: &AnglePair, a_sa: &CVector, wavelength: f64) -> CVector {
    let (row, col) = axis_phasors(shape, aod, wavelength);
    let n = shape.len() as f64;
    CVector::from_fn(shape.len(), |i, _| {
        let a = row[i / shape.cols] * col[i % shape.cols];
        a * a_sa[i].conj() * n.sqrt()
    })
}
