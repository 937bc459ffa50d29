use std::f64::consts::PI;

use crate::channel::{steering_vector, SteeringVector, UpaShape};
use crate::error::{Error, Result};
use crate::geometry::{wrap_azimuth, AnglePair};

/// A finite set of pointing directions for one array. Beams are computed on
/// demand from the pointing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub shape: UpaShape,
    pub pointing_grid: Vec<AnglePair>,
    pub resolution: f64,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.pointing_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pointing_grid.is_empty()
    }

    pub fn beam(&self, index: usize, wavelength: f64) -> SteeringVector {
        steering_vector(&self.shape, &self.pointing_grid[index], wavelength)
    }

    pub fn beams(&self, wavelength: f64) -> Vec<SteeringVector> {
        (0..self.len()).map(|i| self.beam(i, wavelength)).collect()
    }
}

fn axis_count(span: f64, resolution: f64) -> usize {
    if span <= 0.0 {
        1
    } else {
        2 * (span / (2.0 * resolution)).ceil() as usize + 1
    }
}

/// Uniform azimuth x elevation lattice covering `center +- span / 2` on both
/// axes, centered on `center`. Each axis holds `2 ceil(span / (2 res)) + 1`
/// points; points with elevation outside `[-pi/2, pi/2]` are dropped.
/// Ordering is elevation-major.
pub fn generate_codebook(shape: &UpaShape, resolution: f64, center: &AnglePair, span: f64) -> Result<Codebook> {
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(Error::domain("codebook resolution must be positive"));
    }
    if !(span >= 0.0) || !span.is_finite() {
        return Err(Error::domain("codebook span must be nonnegative"));
    }
    let n = axis_count(span, resolution);
    let half = (n as f64 - 1.0) / 2.0;
    let mut grid = Vec::with_capacity(n * n);
    for i in 0..n {
        let el = center.elevation + (i as f64 - half) * resolution;
        if el.abs() > PI / 2.0 + 1e-12 {
            continue;
        }
        for j in 0..n {
            let az = center.azimuth + (j as f64 - half) * resolution;
            grid.push(AnglePair {
                azimuth: wrap_azimuth(az),
                elevation: el.clamp(-PI / 2.0, PI / 2.0),
            });
        }
    }
    Ok(Codebook {
        shape: *shape,
        pointing_grid: grid,
        resolution,
    })
}

/// The global pointing lattice `(j res, i res)` over the whole sphere of
/// directions, from which cone-restricted sub-codebooks are drawn without
/// materializing the full set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularLattice {
    pub resolution: f64,
}

impl AngularLattice {
    pub fn new(resolution: f64) -> Result<Self> {
        if !(resolution > 0.0) || resolution > PI {
            return Err(Error::domain("lattice resolution must lie in (0, pi]"));
        }
        Ok(Self { resolution })
    }

    /// Number of points in the full lattice.
    pub fn len(&self) -> usize {
        let (i_max, j_lo, j_hi) = self.bounds();
        let per_row = (j_hi - j_lo + 1) as usize;
        let rows = 2 * i_max as usize + 1;
        if ((i_max as f64 * self.resolution) - PI / 2.0).abs() < 1e-9 {
            // Each pole is a single direction.
            (rows - 2) * per_row + 2
        } else {
            rows * per_row
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn bounds(&self) -> (i64, i64, i64) {
        let r = self.resolution;
        let i_max = ((PI / 2.0) / r + 1e-9).floor() as i64;
        // Azimuth indices with j r in (-pi, pi].
        let j_hi = (PI / r + 1e-9).floor() as i64;
        let j_lo = (-PI / r + 1e-9).floor() as i64 + 1;
        (i_max, j_lo, j_hi)
    }

    /// Lattice directions within great-circle distance `half_angle` of
    /// `center`, in ascending (elevation, azimuth) index order.
    pub fn points_in_cone(&self, center: &AnglePair, half_angle: f64) -> Vec<AnglePair> {
        let r = self.resolution;
        let (i_max, j_lo, j_hi) = self.bounds();
        let tol = 1e-12;
        let i0 = (((center.elevation - half_angle) / r) - 1e-9).ceil().max(-i_max as f64) as i64;
        let i1 = (((center.elevation + half_angle) / r) + 1e-9).floor().min(i_max as f64) as i64;
        let (sc, cc) = center.elevation.sin_cos();
        let mut out = Vec::new();
        for i in i0..=i1 {
            let el = (i as f64 * r).clamp(-PI / 2.0, PI / 2.0);
            let (se, ce) = el.sin_cos();
            // Azimuth half-width of the cone on this elevation row.
            let denom = ce * cc;
            let width = if denom <= 1e-12 {
                PI
            } else {
                let c = (half_angle.cos() - se * sc) / denom;
                if c > 1.0 + 1e-12 {
                    continue;
                }
                c.clamp(-1.0, 1.0).acos()
            };
            let at_pole = ce <= 1e-12;
            for j in j_lo..=j_hi {
                if at_pole && j != 0 {
                    continue;
                }
                let az = j as f64 * r;
                if wrap_azimuth(az - center.azimuth).abs() > width + 1e-9 {
                    continue;
                }
                let p = AnglePair {
                    azimuth: az,
                    elevation: el,
                };
                if p.angular_distance(center) <= half_angle + tol {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Materializes a cone-restricted sub-codebook.
    pub fn sub_codebook(&self, shape: &UpaShape, center: &AnglePair, half_angle: f64) -> Codebook {
        Codebook {
            shape: *shape,
            pointing_grid: self.points_in_cone(center, half_angle),
            resolution: self.resolution,
        }
    }
}
