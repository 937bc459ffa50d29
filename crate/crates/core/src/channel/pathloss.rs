use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::FieldRegion;
use crate::SPEED_OF_LIGHT;

/// Free-space spreading plus molecular absorption `exp(-mu d)` at one carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    /// Carrier frequency, Hz.
    pub frequency: f64,
    /// Absorption coefficient, 1/m.
    pub absorption: f64,
}

impl PathLossModel {
    pub fn new(frequency: f64, absorption: f64) -> Result<Self> {
        if !(frequency > 0.0) || !frequency.is_finite() {
            return Err(Error::domain("frequency must be positive"));
        }
        if !(absorption >= 0.0) || !absorption.is_finite() {
            return Err(Error::domain("absorption coefficient must be nonnegative"));
        }
        Ok(Self { frequency, absorption })
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency
    }

    fn spreading(&self, d: f64) -> f64 {
        let a = SPEED_OF_LIGHT / (4.0 * PI * self.frequency * d);
        a * a
    }

    fn check(d: f64) -> Result<()> {
        if d > 0.0 && d.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!("distance must be positive, got {d}")))
        }
    }

    /// `|beta|^2 = (c / (4 pi d f))^2 exp(-mu d)`.
    pub fn los_gain_sq(&self, d: f64) -> Result<f64> {
        Self::check(d)?;
        Ok(self.spreading(d) * (-self.absorption * d).exp())
    }

    /// LOS complex gain: the magnitude above with propagation phase
    /// `exp(-j 2 pi d / lambda)`.
    pub fn los_gain(&self, d: f64) -> Result<Complex64> {
        let mag = self.los_gain_sq(d)?.sqrt();
        let cycles = (d * self.frequency / SPEED_OF_LIGHT).fract();
        Ok(Complex64::from_polar(mag, -2.0 * PI * cycles))
    }

    /// Cascade loss when the RIS focuses in its near field: the link behaves
    /// like a single hop of length `d1 + d2`.
    pub fn cascade_pathloss_nearfield(&self, d1: f64, d2: f64) -> Result<f64> {
        Self::check(d1)?;
        Self::check(d2)?;
        self.los_gain_sq(d1 + d2)
    }

    /// Cascade loss in the far field: `c^2 / ((4 pi f)^2 d1^2 d2^2) exp(-mu (d1 + d2))`.
    pub fn cascade_pathloss_farfield(&self, d1: f64, d2: f64) -> Result<f64> {
        Self::check(d1)?;
        Self::check(d2)?;
        let c = SPEED_OF_LIGHT / (4.0 * PI * self.frequency);
        Ok(c * c / (d1 * d1 * d2 * d2) * (-self.absorption * (d1 + d2)).exp())
    }

    pub fn cascade_pathloss(&self, d1: f64, d2: f64, region: FieldRegion) -> Result<f64> {
        match region {
            FieldRegion::NearField => self.cascade_pathloss_nearfield(d1, d2),
            FieldRegion::FarField => self.cascade_pathloss_farfield(d1, d2),
        }
    }

    /// Amplitude factor that turns the product of the two per-hop LOS gains
    /// into the cascade loss of `region`:
    /// `sqrt(zeta(d1, d2) / (xi(d1) xi(d2)))`.
    pub fn cascade_correction(&self, d1: f64, d2: f64, region: FieldRegion) -> Result<f64> {
        let target = self.cascade_pathloss(d1, d2, region)?;
        let product = self.los_gain_sq(d1)? * self.los_gain_sq(d2)?;
        Ok((target / product).sqrt())
    }
}

/// Absorption coefficient versus frequency, linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionTable {
    /// `(frequency in Hz, mu in 1/m)`, strictly increasing in frequency.
    points: Vec<(f64, f64)>,
}

impl AbsorptionTable {
    /// Parses two whitespace-separated columns: frequency in GHz and the
    /// coefficient in 1/m. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(Error::domain(format!(
                    "absorption table line {}: expected 2 columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::domain(format!("absorption table line {}: {e}", lineno + 1)))
            };
            let (f, mu) = (num(cols[0])? * 1e9, num(cols[1])?);
            if !(mu >= 0.0) {
                return Err(Error::domain(format!(
                    "absorption table line {}: negative coefficient",
                    lineno + 1
                )));
            }
            if let Some(&(prev, _)) = points.last() {
                if f <= prev {
                    return Err(Error::domain(format!(
                        "absorption table line {}: frequencies must increase",
                        lineno + 1
                    )));
                }
            }
            points.push((f, mu));
        }
        if points.is_empty() {
            return Err(Error::domain("absorption table is empty"));
        }
        Ok(Self { points })
    }

    /// Coefficient at `frequency` (Hz); clamps outside the tabulated range.
    pub fn coefficient(&self, frequency: f64) -> f64 {
        let p = &self.points;
        if frequency <= p[0].0 {
            return p[0].1;
        }
        if frequency >= p[p.len() - 1].0 {
            return p[p.len() - 1].1;
        }
        let i = p.partition_point(|(f, _)| *f <= frequency);
        let (f0, m0) = p[i - 1];
        let (f1, m1) = p[i];
        m0 + (m1 - m0) * (frequency - f0) / (f1 - f0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn thz() -> PathLossModel {
        PathLossModel::new(350e9, 0.0).unwrap()
    }

    #[test]
    fn los_gain_at_one_meter() {
        let g = thz().los_gain_sq(1.0).unwrap();
        assert_relative_eq!(g, 4.646068291545675e-09, max_relative = 1e-12);
        assert!((10.0 * g.log10() + 83.33).abs() < 0.01);
    }

    #[test]
    fn los_gain_inverse_square_and_absorption() {
        let m = thz();
        let ratio = m.los_gain_sq(1.0).unwrap() / m.los_gain_sq(2.0).unwrap();
        assert!((10.0 * ratio.log10() - 6.0206).abs() < 1e-4);
        let absorbing = PathLossModel::new(350e9, 10f64.ln()).unwrap();
        assert_relative_eq!(
            absorbing.los_gain_sq(1.0).unwrap(),
            0.1 * m.los_gain_sq(1.0).unwrap(),
            max_relative = 1e-14
        );
        assert!(m.los_gain_sq(0.0).is_err());
        assert!(m.los_gain_sq(-1.0).is_err());
    }

    #[test]
    fn cascade_examples() {
        let m = thz();
        let near = m.cascade_pathloss_nearfield(6.0, 3.0).unwrap();
        let far = m.cascade_pathloss_farfield(6.0, 3.0).unwrap();
        assert_relative_eq!(near, 5.7358867796860186e-11, max_relative = 1e-12);
        assert_relative_eq!(far, 1.4339716949215046e-11, max_relative = 1e-12);
        assert!((10.0 * near.log10() + 102.41).abs() < 0.01);
        assert!((10.0 * far.log10() + 108.43).abs() < 0.01);
        assert_eq!(near, m.los_gain_sq(9.0).unwrap());
    }

    #[test]
    fn correction_restores_cascade_loss() {
        let m = thz();
        for region in [FieldRegion::NearField, FieldRegion::FarField] {
            let c = m.cascade_correction(6.0, 3.0, region).unwrap();
            let product = m.los_gain_sq(6.0).unwrap() * m.los_gain_sq(3.0).unwrap();
            assert_relative_eq!(
                c * c * product,
                m.cascade_pathloss(6.0, 3.0, region).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn table_interpolates_linearly() {
        let t = AbsorptionTable::parse("# f mu\n300 0.1\n350 0.3\n\n400 0.5 # tail\n").unwrap();
        assert_relative_eq!(t.coefficient(325e9), 0.2, max_relative = 1e-12);
        assert_eq!(t.coefficient(100e9), 0.1);
        assert_eq!(t.coefficient(500e9), 0.5);
        assert_relative_eq!(t.coefficient(350e9), 0.3, max_relative = 1e-12);
        assert!(AbsorptionTable::parse("300 0.1\n200 0.2").is_err());
        assert!(AbsorptionTable::parse("300").is_err());
        assert!(AbsorptionTable::parse("").is_err());
    }

    proptest! {
        #[test]
        fn los_gain_matches_closed_form(d in 0.1f64..100.0, f in 0.1e12f64..1e12, mu in 0.0f64..2.0) {
            let m = PathLossModel::new(f, mu).unwrap();
            let oracle = (SPEED_OF_LIGHT / (4.0 * PI * d * f)).powi(2) * (-mu * d).exp();
            let got = m.los_gain_sq(d).unwrap();
            prop_assert!((got - oracle).abs() <= 1e-12 * oracle);
        }

        #[test]
        fn cascades_symmetric(d1 in 0.1f64..50.0, d2 in 0.1f64..50.0, mu in 0.0f64..1.0) {
            let m = PathLossModel::new(350e9, mu).unwrap();
            let n12 = m.cascade_pathloss_nearfield(d1, d2).unwrap();
            let n21 = m.cascade_pathloss_nearfield(d2, d1).unwrap();
            let f12 = m.cascade_pathloss_farfield(d1, d2).unwrap();
            let f21 = m.cascade_pathloss_farfield(d2, d1).unwrap();
            prop_assert!((n12 - n21).abs() <= 1e-14 * n12);
            prop_assert!((f12 - f21).abs() <= 1e-14 * f12);
            if d1 * d2 >= d1 + d2 {
                prop_assert!(f12 <= n12 * (1.0 + 1e-12));
            }
        }
    }
}
