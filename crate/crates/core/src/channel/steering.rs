use std::f64::consts::PI;

use num_complex::Complex64;

use crate::geometry::{AnglePair, ArrayGeometry};
use crate::linalg::{cis, CVector};

/// Element grid of one UPA block: `rows x cols` elements at `spacing`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpaShape {
    pub rows: usize,
    pub cols: usize,
    pub spacing: f64,
}

impl UpaShape {
    pub fn new(rows: usize, cols: usize, spacing: f64) -> Self {
        Self { rows, cols, spacing }
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl From<&ArrayGeometry> for UpaShape {
    fn from(g: &ArrayGeometry) -> Self {
        Self::new(g.rows, g.cols, g.element_spacing)
    }
}

/// Unit-norm array response of one UPA block toward an angle pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    pub entries: CVector,
    pub shape: UpaShape,
    pub angles: AnglePair,
}

impl SteeringVector {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn into_vector(self) -> CVector {
        self.entries
    }
}

/// Per-axis phase progressions `(exp(j k a u), exp(j k b v))` of the response
/// toward `angles`, with `k = 2 pi spacing / wavelength`.
pub fn axis_phasors(shape: &UpaShape, angles: &AnglePair, wavelength: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let k = 2.0 * PI * shape.spacing / wavelength;
    let (u, v) = angles.spatial_frequencies();
    let row = (0..shape.rows).map(|a| cis(k * a as f64 * u)).collect();
    let col = (0..shape.cols).map(|b| cis(k * b as f64 * v)).collect();
    (row, col)
}

/// UPA steering vector. Entry `a * cols + b` equals
/// `exp(j k [a cos(az) sin(el) + b sin(az) sin(el)]) / sqrt(rows cols)`.
pub fn steering_vector(shape: &UpaShape, angles: &AnglePair, wavelength: f64) -> SteeringVector {
    let (row, col) = axis_phasors(shape, angles, wavelength);
    let scale = 1.0 / (shape.len() as f64).sqrt();
    let mut entries = CVector::zeros(shape.len());
    for (a, ra) in row.iter().enumerate() {
        for (b, cb) in col.iter().enumerate() {
            entries[a * shape.cols + b] = ra * cb * scale;
        }
    }
    SteeringVector {
        entries,
        shape: *shape,
        angles: *angles,
    }
}

/// `a(angles)^H x` without materializing the steering vector.
pub fn project(shape: &UpaShape, angles: &AnglePair, wavelength: f64, x: &[Complex64]) -> Complex64 {
    debug_assert_eq!(x.len(), shape.len());
    let (row, col) = axis_phasors(shape, angles, wavelength);
    let scale = 1.0 / (shape.len() as f64).sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, ra) in row.iter().enumerate() {
        let chunk = &x[a * shape.cols..(a + 1) * shape.cols];
        let inner: Complex64 = col.iter().zip(chunk).map(|(c, z)| c.conj() * z).sum();
        acc += ra.conj() * inner;
    }
    acc * scale
}
