//! Placement, array layout and angle bookkeeping.
//!
//! All positions live in a global right-handed frame in meters. Every array
//! carries an [`Orientation`]; angles toward a remote point are computed in
//! the array's local frame, where the element grid spans the local x-y plane
//! (grid row index along local x, column index along local y).

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Rotation3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;

/// A point (or displacement) in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3D {
    pub const ORIGIN: Position3D = Position3D::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Checked constructor; rejects NaN and infinities.
    pub fn try_new(x: f64, y: f64, z: f64) -> Result<Self> {
        let p = Self::new(x, y, z);
        if p.is_finite() {
            Ok(p)
        } else {
            Err(Error::domain(format!("non-finite position {p:?}")))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(&self, other: &Position3D) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Position3D) -> Position3D {
        Position3D::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Position3D) -> f64 {
        (*self - *other).norm()
    }

    pub fn normalized(&self) -> Position3D {
        *self * (1.0 / self.norm())
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

impl From<[f64; 3]> for Position3D {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl From<Position3D> for [f64; 3] {
    fn from(p: Position3D) -> Self {
        [p.x, p.y, p.z]
    }
}

impl Add for Position3D {
    type Output = Position3D;
    fn add(self, o: Position3D) -> Position3D {
        Position3D::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Position3D {
    type Output = Position3D;
    fn sub(self, o: Position3D) -> Position3D {
        Position3D::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Position3D {
    type Output = Position3D;
    fn mul(self, s: f64) -> Position3D {
        Position3D::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Position3D {
    type Output = Position3D;
    fn neg(self) -> Position3D {
        Position3D::new(-self.x, -self.y, -self.z)
    }
}

/// Rigid rotation from an array's local frame into the global frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation(Rotation3<f64>);

impl Default for Orientation {
    fn default() -> Self {
        Self::identity()
    }
}

impl Orientation {
    pub fn identity() -> Self {
        Self(Rotation3::identity())
    }

    /// Z-Y-X (yaw, pitch, roll) Euler angles in degrees.
    pub fn from_yaw_pitch_roll_deg(yaw: f64, pitch: f64, roll: f64) -> Self {
        Self(Rotation3::from_euler_angles(
            roll.to_radians(),
            pitch.to_radians(),
            yaw.to_radians(),
        ))
    }

    pub fn rotation(&self) -> &Rotation3<f64> {
        &self.0
    }

    pub fn local_to_global(&self, p: Position3D) -> Position3D {
        Position3D::from_vector(&(self.0 * p.to_vector()))
    }

    pub fn global_to_local(&self, p: Position3D) -> Position3D {
        Position3D::from_vector(&(self.0.inverse() * p.to_vector()))
    }
}

/// Azimuth/elevation pair in radians.
///
/// Azimuth lies in (-pi, pi], elevation in [-pi/2, pi/2]; elevation is
/// measured from the local x-y plane (`asin(z / d)`).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AnglePair {
    pub azimuth: f64,
    pub elevation: f64,
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_azimuth(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

impl AnglePair {
    /// Builds a pair, wrapping azimuth and rejecting out-of-range elevation.
    pub fn new(azimuth: f64, elevation: f64) -> Result<Self> {
        if !azimuth.is_finite() || !elevation.is_finite() {
            return Err(Error::domain("non-finite angle"));
        }
        if elevation.abs() > PI / 2.0 + 1e-12 {
            return Err(Error::domain(format!("elevation {elevation} outside [-pi/2, pi/2]")));
        }
        Ok(Self {
            azimuth: wrap_azimuth(azimuth),
            elevation: elevation.clamp(-PI / 2.0, PI / 2.0),
        })
    }

    /// Angles of a (non-zero) direction: `atan2(y, x)` and `asin(z / |v|)`.
    pub fn from_direction(v: Position3D) -> Result<Self> {
        let d = v.norm();
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::domain("direction has zero or non-finite length"));
        }
        Ok(Self {
            azimuth: v.y.atan2(v.x),
            elevation: (v.z / d).clamp(-1.0, 1.0).asin(),
        })
    }

    /// Unit vector pointing along this pair.
    pub fn direction(&self) -> Position3D {
        let (sa, ca) = self.azimuth.sin_cos();
        let (se, ce) = self.elevation.sin_cos();
        Position3D::new(ce * ca, ce * sa, se)
    }

    /// The sign-flipped pair used for the opposite end of a link.
    pub fn negated(&self) -> Self {
        Self {
            azimuth: wrap_azimuth(-self.azimuth),
            elevation: -self.elevation,
        }
    }

    /// Great-circle angle between the two pointing directions.
    pub fn angular_distance(&self, other: &AnglePair) -> f64 {
        let a = self.direction();
        let b = other.direction();
        a.cross(&b).norm().atan2(a.dot(&b))
    }

    /// Spatial frequencies `(cos az sin el, sin az sin el)` entering the UPA
    /// array response.
    pub fn spatial_frequencies(&self) -> (f64, f64) {
        let s = self.elevation.sin();
        (self.azimuth.cos() * s, self.azimuth.sin() * s)
    }
}

/// A uniform planar array, optionally partitioned into a regular grid of
/// identical subarrays (BS) or sub-RISs (RIS).
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    /// Elements per block along local x.
    pub rows: usize,
    /// Elements per block along local y.
    pub cols: usize,
    /// Element pitch within a block, meters.
    pub element_spacing: f64,
    pub subgrid_rows: usize,
    pub subgrid_cols: usize,
    /// Center-to-center distance of adjacent blocks, meters.
    pub subgrid_spacing: f64,
    pub center: Position3D,
    pub orientation: Orientation,
}

impl ArrayGeometry {
    /// A single `rows x cols` UPA centered at `center` with identity orientation.
    pub fn upa(rows: usize, cols: usize, element_spacing: f64, center: Position3D) -> Result<Self> {
        let g = Self {
            rows,
            cols,
            element_spacing,
            subgrid_rows: 1,
            subgrid_cols: 1,
            subgrid_spacing: element_spacing,
            center,
            orientation: Orientation::identity(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_subgrid(mut self, rows: usize, cols: usize, spacing: f64) -> Result<Self> {
        self.subgrid_rows = rows;
        self.subgrid_cols = cols;
        self.subgrid_spacing = spacing;
        self.validate()?;
        Ok(self)
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::domain("array needs at least one element per axis"));
        }
        if self.subgrid_rows == 0 || self.subgrid_cols == 0 {
            return Err(Error::domain("array needs at least one block per axis"));
        }
        if !(self.element_spacing > 0.0) || !self.element_spacing.is_finite() {
            return Err(Error::domain("element spacing must be positive"));
        }
        if self.block_count() > 1 && !(self.subgrid_spacing >= self.element_spacing) {
            return Err(Error::domain("block spacing must be at least the element spacing"));
        }
        if !self.center.is_finite() {
            return Err(Error::domain("array center must be finite"));
        }
        Ok(())
    }

    pub fn elements_per_block(&self) -> usize {
        self.rows * self.cols
    }

    pub fn block_count(&self) -> usize {
        self.subgrid_rows * self.subgrid_cols
    }

    pub fn total_elements(&self) -> usize {
        self.elements_per_block() * self.block_count()
    }

    /// Grid index `(r, c)` of block `index` (row-major).
    pub fn block_index(&self, index: usize) -> (usize, usize) {
        (index / self.subgrid_cols, index % self.subgrid_cols)
    }

    /// Global center of block `index`; blocks sit on a regular grid centered
    /// on [`ArrayGeometry::center`].
    pub fn block_center(&self, index: usize) -> Position3D {
        let (r, c) = self.block_index(index);
        let off_r = (r as f64 - (self.subgrid_rows as f64 - 1.0) / 2.0) * self.subgrid_spacing;
        let off_c = (c as f64 - (self.subgrid_cols as f64 - 1.0) / 2.0) * self.subgrid_spacing;
        self.center + self.orientation.local_to_global(Position3D::new(off_r, off_c, 0.0))
    }

    /// Phase slope `2 pi * spacing / wavelength` of the element grid.
    pub fn phase_slope(&self, wavelength: f64) -> f64 {
        2.0 * PI * self.element_spacing / wavelength
    }

    /// Side lengths of the whole aperture along local x and y.
    pub fn aperture(&self) -> (f64, f64) {
        let block = |n: usize| (n as f64 - 1.0) * self.element_spacing;
        let x = block(self.rows) + (self.subgrid_rows as f64 - 1.0) * self.subgrid_spacing;
        let y = block(self.cols) + (self.subgrid_cols as f64 - 1.0) * self.subgrid_spacing;
        (x, y)
    }
}

/// Wavelength for a carrier frequency in Hz.
pub fn wavelength(frequency: f64) -> f64 {
    SPEED_OF_LIGHT / frequency
}

fn spacing_optimum(d1: f64, wavelength: f64, grid: usize, q: u32) -> Result<f64> {
    if !(d1 > 0.0) || !(wavelength > 0.0) {
        return Err(Error::domain("distance and wavelength must be positive"));
    }
    if grid == 0 || q == 0 {
        return Err(Error::domain("grid size and q must be at least 1"));
    }
    Ok((q as f64 * d1 * wavelength / grid as f64).sqrt())
}

/// Sub-RIS spacing that makes the BS-RIS channel columns orthogonal for an
/// `n x n` sub-RIS grid at link distance `d1`: `sqrt(q d1 lambda / n)`.
pub fn optimal_subris_spacing(d1: f64, wavelength: f64, n: usize, q: u32) -> Result<f64> {
    spacing_optimum(d1, wavelength, n, q)
}

/// BS subarray spacing for an `m x m` subarray grid: `sqrt(q d1 lambda / m)`.
pub fn optimal_bs_subarray_spacing(d1: f64, wavelength: f64, m: usize, q: u32) -> Result<f64> {
    spacing_optimum(d1, wavelength, m, q)
}

/// Near/far-field boundary `N^2 m_s n_s lambda / 2` of an `N x N` grid of
/// half-wavelength `m_s x n_s` sub-RISs.
pub fn field_boundary(n: usize, m_s: usize, n_s: usize, wavelength: f64) -> Result<f64> {
    if n == 0 || m_s == 0 || n_s == 0 {
        return Err(Error::domain("array counts must be at least 1"));
    }
    if !(wavelength > 0.0) {
        return Err(Error::domain("wavelength must be positive"));
    }
    Ok((n * n * m_s * n_s) as f64 * wavelength / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldRegion {
    NearField,
    FarField,
}

impl FieldRegion {
    pub fn classify(distance: f64, boundary: f64) -> Self {
        if distance < boundary {
            FieldRegion::NearField
        } else {
            FieldRegion::FarField
        }
    }
}

impl std::fmt::Display for FieldRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FieldRegion::NearField => "near-field",
            FieldRegion::FarField => "far-field",
        })
    }
}

/// Angles and length of one line-of-sight link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkAngles {
    /// Angle pair at the reference end (the RIS side), toward the remote end.
    pub at_reference: AnglePair,
    /// Angle pair at the remote end, sign-flipped per the link convention.
    pub at_remote: AnglePair,
    pub distance: f64,
}

/// Angles of the link between a reference array at `reference` (local frame
/// `ref_orientation`) and a remote array at `remote`.
///
/// The reference-side pair describes `remote - reference` in the reference
/// frame. The remote-side pair is the negation of the same displacement's
/// angles in the remote frame, which for identity orientations reduces to
/// `(-az, -el)` of the reference-side pair.
pub fn link_angles(
    reference: Position3D,
    ref_orientation: &Orientation,
    remote: Position3D,
    remote_orientation: &Orientation,
) -> Result<LinkAngles> {
    let delta = remote - reference;
    let distance = delta.norm();
    if !(distance > 0.0) {
        return Err(Error::domain("link endpoints coincide"));
    }
    let at_reference = AnglePair::from_direction(ref_orientation.global_to_local(delta))?;
    let at_remote = AnglePair::from_direction(remote_orientation.global_to_local(delta))?.negated();
    Ok(LinkAngles {
        at_reference,
        at_remote,
        distance,
    })
}

/// AOA at a sub-RIS from a BS subarray, the matching AOD at the BS, and the
/// BS-RIS distance, for identity-oriented arrays.
pub fn angles_bs_to_subris(bs_center: Position3D, subris_center: Position3D) -> Result<(AnglePair, AnglePair, f64)> {
    let id = Orientation::identity();
    let l = link_angles(subris_center, &id, bs_center, &id)?;
    Ok((l.at_reference, l.at_remote, l.distance))
}

/// AOD at a sub-RIS toward a (possibly estimated) user position, the user's
/// AOA and the RIS-user distance, for identity-oriented arrays.
pub fn angles_subris_to_user(user: Position3D, subris_center: Position3D) -> Result<(AnglePair, AnglePair, f64)> {
    let id = Orientation::identity();
    let l = link_angles(subris_center, &id, user, &id)?;
    Ok((l.at_reference, l.at_remote, l.distance))
}

/// Parameters of the BS-RIS column inner product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnInnerProduct {
    /// Sub-RIS grid size `N` (sum runs over `N x N` sub-RISs).
    pub subris_grid: usize,
    /// BS subarray grid size; subarray indices must be below it.
    pub bs_grid: usize,
    /// BS-RIS distance, meters.
    pub d1: f64,
    pub frequency: f64,
    /// Sub-RIS spacing, meters.
    pub spacing: f64,
    /// Absorption coefficient, 1/m.
    pub absorption: f64,
}

impl ColumnInnerProduct {
    /// Path-loss prefactor `(c / (4 pi f d1))^2 exp(-mu d1)`.
    pub fn prefactor(&self) -> f64 {
        let a = SPEED_OF_LIGHT / (4.0 * PI * self.frequency * self.d1);
        a * a * (-self.absorption * self.d1).exp()
    }

    /// Inner product between the channel columns of BS subarrays `first` and
    /// `second`, using the paraxial distance
    /// `d1 + spacing^2 [(u - x)^2 + (v - y)^2] / (2 d1)` to each sub-RIS
    /// `(u, v)`. The steering-vector factors are left out (set to one).
    pub fn evaluate(&self, first: (usize, usize), second: (usize, usize)) -> Result<Complex64> {
        let n = self.subris_grid;
        if n == 0 || self.bs_grid == 0 {
            return Err(Error::domain("grid sizes must be at least 1"));
        }
        for (x, y) in [first, second] {
            if x >= self.bs_grid || y >= self.bs_grid {
                return Err(Error::domain(format!(
                    "subarray index ({x}, {y}) outside {0}x{0} grid",
                    self.bs_grid
                )));
            }
        }
        if !(self.d1 > 0.0) || !(self.frequency > 0.0) {
            return Err(Error::domain("distance and frequency must be positive"));
        }
        let k = PI * self.frequency * self.spacing * self.spacing / (SPEED_OF_LIGHT * self.d1);
        let (x, y) = (first.0 as f64, first.1 as f64);
        let (xh, yh) = (second.0 as f64, second.1 as f64);
        let mut sum = Complex64::new(0.0, 0.0);
        for u in 0..n {
            let u = u as f64;
            for v in 0..n {
                let v = v as f64;
                let e = (u - x).powi(2) + (v - y).powi(2) - (u - xh).powi(2) - (v - yh).powi(2);
                sum += Complex64::from_polar(1.0, k * e);
            }
        }
        Ok(sum * self.prefactor())
    }

    /// `|<G_first, G_second>| / (N^2 prefactor)`, which is 1 for identical columns.
    pub fn normalized_magnitude(&self, first: (usize, usize), second: (usize, usize)) -> Result<f64> {
        let n2 = (self.subris_grid * self.subris_grid) as f64;
        Ok(self.evaluate(first, second)?.norm() / (n2 * self.prefactor()))
    }
}
