use crate::channel::{steering_vector, UpaShape};
use crate::error::{Error, Result};
use crate::geometry::AnglePair;
use crate::linalg::{CMatrix, CVector};

/// Phase-only transmit beam of one BS subarray plus its power.
///
/// The weights have modulus `1/sqrt(m_t n_t)` (unit norm); the power is a
/// separate scalar rather than being folded into the phase vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitBeam {
    pub weights: CVector,
    pub power: f64,
}

/// Transmit beam of a subarray aimed along `aod` (the BS-side AOD toward its
/// sub-RIS).
pub fn design_transmit_beam(aod: &AnglePair, subarray: &UpaShape, power: f64, wavelength: f64) -> Result<TransmitBeam> {
    if !(power >= 0.0) || !power.is_finite() {
        return Err(Error::domain("subarray power must be nonnegative"));
    }
    Ok(TransmitBeam {
        weights: steering_vector(subarray, aod, wavelength).entries,
        power,
    })
}

/// Unit-norm receive combiner of a user aimed along its (estimated) AOA.
pub fn design_receive_beam(aoa: &AnglePair, user: &UpaShape, wavelength: f64) -> CVector {
    steering_vector(user, aoa, wavelength).entries
}

/// Block-diagonal analog precoder `W` of an array of subarrays.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogBeamformer {
    pub w: CMatrix,
    pub powers: Vec<f64>,
    block_len: usize,
}

impl AnalogBeamformer {
    pub fn from_beams(beams: &[TransmitBeam]) -> Result<Self> {
        let Some(first) = beams.first() else {
            return Err(Error::dimension("analog precoder needs at least one subarray"));
        };
        let n = first.weights.len();
        if beams.iter().any(|b| b.weights.len() != n) {
            return Err(Error::dimension("subarray beams differ in length"));
        }
        let l = beams.len();
        let mut w = CMatrix::zeros(l * n, l);
        for (k, b) in beams.iter().enumerate() {
            w.view_mut((k * n, k), (n, 1)).copy_from(&b.weights);
        }
        Ok(Self {
            w,
            powers: beams.iter().map(|b| b.power).collect(),
            block_len: n,
        })
    }

    pub fn subarrays(&self) -> usize {
        self.w.ncols()
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Weights of subarray `k`.
    pub fn beam(&self, k: usize) -> CVector {
        self.w
            .view((k * self.block_len, k), (self.block_len, 1))
            .column(0)
            .into_owned()
    }
}

/// Array gain `m n |a(probe)^H w|^2` of a unit-norm beam toward `probe`.
pub fn beam_gain(weights: &CVector, shape: &UpaShape, probe: &AnglePair, wavelength: f64) -> f64 {
    let a = steering_vector(shape, probe, wavelength).entries;
    shape.len() as f64 * a.dotc(weights).norm_sqr()
}
