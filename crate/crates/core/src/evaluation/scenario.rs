use serde::{Deserialize, Serialize};

use crate::beamforming::{PbaParams, PrecoderKind};
use crate::channel::{NlosProfile, PathLossModel};
use crate::error::{Error, Result};
use crate::geometry::{
    field_boundary, optimal_bs_subarray_spacing, optimal_subris_spacing, wavelength, ArrayGeometry, FieldRegion,
    Orientation, Position3D,
};
use crate::localization::{HalfSpace, RangingErrorModel};

/// Which transceiver design a trial is evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Direct link only, beams on its strongest path, perfect CSI.
    NoRis,
    /// No-RIS beams plus a RIS with uniformly random phases.
    RandomPhase,
    /// Location-derived beams and closed-form RIS phases.
    Estimated,
    /// [`Variant::Estimated`] refined by the codebook search.
    EstimatedPba,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::NoRis,
        Variant::RandomPhase,
        Variant::Estimated,
        Variant::EstimatedPba,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::NoRis => "no_ris",
            Variant::RandomPhase => "random_phase",
            Variant::Estimated => "estimated",
            Variant::EstimatedPba => "estimated_pba",
        }
    }

    pub fn uses_ris(&self) -> bool {
        !matches!(self, Variant::NoRis)
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::config("variants", format!("unknown variant `{s}`")))
    }
}

/// How receiver noise enters the SINR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// `E|v^H n|^2 = sigma^2` for a unit-norm combiner.
    #[default]
    Analytic,
    /// One draw of `|v^H n|^2` with `n ~ CN(0, sigma^2 I)` per user and power.
    Sampled,
}

/// Channel knowledge behind the digital precoder of the located variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecoderCsi {
    /// The `K x K` effective channel after the analog beams and RIS phases
    /// are fixed, as measured by pilots.
    #[default]
    Effective,
    /// The LOS channel implied by the position estimates.
    Location,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flags {
    pub enable_direct_link: bool,
    pub enable_ris: bool,
    pub random_phase_baseline: bool,
    pub use_pba: bool,
    pub precoder: PrecoderKind,
    pub precoder_csi: PrecoderCsi,
}

impl Default for Flags {
    fn default() -> Self {
        Self {
            enable_direct_link: true,
            enable_ris: true,
            random_phase_baseline: false,
            use_pba: true,
            precoder: PrecoderKind::Mmse,
            precoder_csi: PrecoderCsi::Effective,
        }
    }
}

impl Flags {
    /// The single variant the flags select.
    pub fn variant(&self) -> Variant {
        if !self.enable_ris {
            Variant::NoRis
        } else if self.random_phase_baseline {
            Variant::RandomPhase
        } else if self.use_pba {
            Variant::EstimatedPba
        } else {
            Variant::Estimated
        }
    }

    /// Every variant a sweep should compare: the no-RIS baseline when the
    /// direct link exists, the random-phase baseline on request, and the
    /// located designs when the RIS is on.
    pub fn enabled_variants(&self) -> Vec<Variant> {
        let mut out = Vec::new();
        if self.enable_direct_link {
            out.push(Variant::NoRis);
        }
        if self.enable_ris {
            if self.random_phase_baseline {
                out.push(Variant::RandomPhase);
            }
            out.push(Variant::Estimated);
            if self.use_pba {
                out.push(Variant::EstimatedPba);
            }
        }
        out
    }
}

/// User handset array; one per user, centered on the user position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserArraySpec {
    pub rows: usize,
    pub cols: usize,
    pub element_spacing: f64,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationSettings {
    /// Ranging error scale `epsilon`, meters.
    pub ranging_error: f64,
    pub error_model: RangingErrorModel,
    /// Side of the anchor square on the RIS plane, meters.
    pub anchor_span: f64,
    pub half_space: HalfSpace,
    /// Positioning error radius `r_e` that bounds the codebook search, meters.
    pub error_radius: f64,
    /// Use the estimator's own confidence radius instead of `error_radius`.
    pub adaptive_error_radius: bool,
}

impl Default for LocalizationSettings {
    fn default() -> Self {
        Self {
            ranging_error: 0.05,
            error_model: RangingErrorModel::Gaussian,
            anchor_span: 1.0,
            half_space: HalfSpace::Positive,
            error_radius: 0.1,
            adaptive_error_radius: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamformingSettings {
    /// Angular step of the pointing lattice, radians.
    pub codebook_resolution: f64,
    pub pba: PbaParams,
}

impl Default for BeamformingSettings {
    fn default() -> Self {
        Self {
            codebook_resolution: 0.5f64.to_radians(),
            pba: PbaParams::default(),
        }
    }
}

/// Everything needed to run a Monte Carlo experiment.
///
/// User `k` is served by BS subarray `k` through sub-RIS `k`, so the BS and
/// RIS subgrids must both hold exactly one block per user.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    /// Carrier frequency, Hz.
    pub frequency: f64,
    /// Hz; rates are reported per Hz, so this is informational.
    pub bandwidth: f64,
    /// Receiver noise power over the band, dBm.
    pub noise_power_dbm: f64,
    /// Molecular absorption coefficient at the carrier, 1/m.
    pub absorption: f64,
    pub bs: ArrayGeometry,
    pub ris: ArrayGeometry,
    pub user_array: UserArraySpec,
    pub users: Vec<Position3D>,
    /// Scattering around the BS-RIS and RIS-user LOS rays.
    pub nlos_ris: NlosProfile,
    /// Scattered paths of the direct BS-user link.
    pub nlos_direct: NlosProfile,
    pub localization: LocalizationSettings,
    pub beamforming: BeamformingSettings,
    pub flags: Flags,
    pub transmit_power_dbm: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub noise_mode: NoiseMode,
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

impl ScenarioConfig {
    /// Square `n x n` arrays everywhere, RIS at `ris_center`, `sqrt(K) x sqrt(K)`
    /// subgrids at the orthogonal spacings for `q = 1`, half-wavelength
    /// elements and default settings otherwise.
    #[allow(clippy::too_many_arguments)]
    pub fn with_defaults(
        name: impl Into<String>,
        frequency: f64,
        bs_center: Position3D,
        ris_center: Position3D,
        users: Vec<Position3D>,
        bs_n: usize,
        ris_n: usize,
        user_n: usize,
    ) -> Result<Self> {
        let k = users.len();
        let grid = (k as f64).sqrt().round() as usize;
        if grid * grid != k || k == 0 {
            return Err(Error::config(
                "users.positions",
                format!("{k} users do not fill a square subgrid"),
            ));
        }
        let lambda = wavelength(frequency);
        let d1 = bs_center.distance(&ris_center);
        let half = lambda / 2.0;
        let ris_spacing = optimal_subris_spacing(d1, lambda, grid, 1)?.max(ris_n as f64 * half);
        let bs_spacing = optimal_bs_subarray_spacing(d1, lambda, grid, 1)?.max(bs_n as f64 * half);
        let cfg = Self {
            name: name.into(),
            frequency,
            bandwidth: 1e9,
            noise_power_dbm: -75.0,
            absorption: 0.0,
            bs: ArrayGeometry::upa(bs_n, bs_n, half, bs_center)?.with_subgrid(grid, grid, bs_spacing)?,
            ris: ArrayGeometry::upa(ris_n, ris_n, half, ris_center)?.with_subgrid(grid, grid, ris_spacing)?,
            user_array: UserArraySpec {
                rows: user_n,
                cols: user_n,
                element_spacing: half,
                orientation: Orientation::identity(),
            },
            users,
            nlos_ris: NlosProfile::default(),
            nlos_direct: NlosProfile::new(3, (10.0, 20.0), 40f64.to_radians())?,
            localization: LocalizationSettings::default(),
            beamforming: BeamformingSettings::default(),
            flags: Flags::default(),
            transmit_power_dbm: (-2..=6).map(|i| 5.0 * i as f64).collect(),
            trials: 1000,
            seed: 1,
            noise_mode: NoiseMode::Analytic,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.frequency)
    }

    pub fn model(&self) -> Result<PathLossModel> {
        PathLossModel::new(self.frequency, self.absorption)
    }

    /// `sigma^2` in watts.
    pub fn noise_power(&self) -> f64 {
        dbm_to_watts(self.noise_power_dbm)
    }

    pub fn user_geometry(&self, k: usize) -> ArrayGeometry {
        ArrayGeometry {
            rows: self.user_array.rows,
            cols: self.user_array.cols,
            element_spacing: self.user_array.element_spacing,
            subgrid_rows: 1,
            subgrid_cols: 1,
            subgrid_spacing: self.user_array.element_spacing,
            center: self.users[k],
            orientation: self.user_array.orientation,
        }
    }

    /// Near/far boundary of the whole RIS.
    pub fn field_boundary(&self) -> Result<f64> {
        let n = self.ris.subgrid_rows.max(self.ris.subgrid_cols);
        field_boundary(n, self.ris.rows, self.ris.cols, self.wavelength())
    }

    /// BS center to the center of sub-RIS `k`.
    pub fn bs_ris_distance(&self, k: usize) -> f64 {
        self.bs.center.distance(&self.ris.block_center(k))
    }

    /// Regime of the cascade through sub-RIS `k` for a user at distance `d2`:
    /// near field only if both hops are inside the boundary.
    pub fn cascade_region(&self, k: usize, d2: f64) -> Result<FieldRegion> {
        let d = self.bs_ris_distance(k).max(d2);
        Ok(FieldRegion::classify(d, self.field_boundary()?))
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !pos(self.frequency) {
            return Err(Error::config("frequency_hz", "must be positive"));
        }
        if !pos(self.bandwidth) {
            return Err(Error::config("bandwidth_hz", "must be positive"));
        }
        if !self.noise_power_dbm.is_finite() {
            return Err(Error::config("noise_power_dbm", "must be finite"));
        }
        if !(self.absorption >= 0.0) || !self.absorption.is_finite() {
            return Err(Error::config("absorption_per_m", "must be nonnegative"));
        }
        self.bs.validate().map_err(|e| Error::config("bs", e.to_string()))?;
        self.ris.validate().map_err(|e| Error::config("ris", e.to_string()))?;
        let u = &self.user_array;
        if u.rows == 0 || u.cols == 0 || !pos(u.element_spacing) {
            return Err(Error::config("users.elements", "needs positive dimensions and spacing"));
        }
        let k = self.users.len();
        if k == 0 {
            return Err(Error::config("users.positions", "at least one user is required"));
        }
        if self.ris.block_count() != k {
            return Err(Error::config(
                "ris",
                format!(
                    "{} sub-RISs for {k} users; each user needs its own sub-RIS",
                    self.ris.block_count()
                ),
            ));
        }
        if self.bs.block_count() != k {
            return Err(Error::config(
                "bs",
                format!(
                    "{} BS subarrays for {k} users; each user needs its own subarray",
                    self.bs.block_count()
                ),
            ));
        }
        for (i, p) in self.users.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::config(format!("users.positions[{i}]"), "must be finite"));
            }
            for s in 0..k {
                if p.distance(&self.ris.block_center(s)) <= 0.0 {
                    return Err(Error::config(
                        format!("users.positions[{i}]"),
                        "coincides with a sub-RIS",
                    ));
                }
            }
        }
        if self.bs.center.distance(&self.ris.center) <= 0.0 {
            return Err(Error::config("bs.center", "coincides with the RIS"));
        }
        self.nlos_ris
            .validate()
            .map_err(|e| Error::config("nlos.ris", e.to_string()))?;
        self.nlos_direct
            .validate()
            .map_err(|e| Error::config("nlos.direct", e.to_string()))?;
        let l = &self.localization;
        if !(l.ranging_error >= 0.0) || !l.ranging_error.is_finite() {
            return Err(Error::config("localization.ranging_error_m", "must be nonnegative"));
        }
        if !pos(l.anchor_span) {
            return Err(Error::config("localization.anchor_span_m", "must be positive"));
        }
        if !(l.error_radius >= 0.0) || !l.error_radius.is_finite() {
            return Err(Error::config("localization.error_radius_m", "must be nonnegative"));
        }
        let b = &self.beamforming;
        if !pos(b.codebook_resolution) || b.codebook_resolution > std::f64::consts::PI {
            return Err(Error::config(
                "beamforming.codebook_resolution_deg",
                "must lie in (0, 180]",
            ));
        }
        if b.pba.max_iters == 0 {
            return Err(Error::config("beamforming.pba_max_iters", "must be at least 1"));
        }
        if !(b.pba.tolerance >= 0.0) {
            return Err(Error::config("beamforming.pba_tolerance", "must be nonnegative"));
        }
        if self.transmit_power_dbm.is_empty() {
            return Err(Error::config("transmit_power_dbm", "needs at least one power"));
        }
        if self.transmit_power_dbm.iter().any(|p| !p.is_finite()) {
            return Err(Error::config("transmit_power_dbm", "powers must be finite"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        Ok(())
    }
}
