//! TOML scenario files.
//!
//! A file names the carrier, the three array families and the user
//! positions; everything else has a default. Unknown keys are rejected with
//! their full path.

use serde::{Deserialize, Serialize};

use risbeam_core::beamforming::{PbaParams, PrecoderKind};
use risbeam_core::channel::NlosProfile;
use risbeam_core::evaluation::{
    BeamformingSettings, Flags, LocalizationSettings, NoiseMode, PrecoderCsi, ScenarioConfig, UserArraySpec,
};
use risbeam_core::geometry::{optimal_bs_subarray_spacing, optimal_subris_spacing, wavelength, ArrayGeometry};
use risbeam_core::localization::{HalfSpace, RangingErrorModel};
use risbeam_core::{Orientation, Position3D};

use crate::CliError;

/// Keys without a default.
pub const REQUIRED_KEYS: [&str; 8] = [
    "frequency_hz",
    "noise_power_dbm",
    "bs.center",
    "bs.elements",
    "ris.center",
    "ris.elements",
    "users.positions",
    "users.elements",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub frequency_hz: f64,
    #[serde(default = "default_bandwidth")]
    pub bandwidth_hz: f64,
    pub noise_power_dbm: f64,
    #[serde(default)]
    pub absorption_per_m: f64,
    #[serde(default = "default_powers")]
    pub transmit_power_dbm: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub noise_mode: NoiseMode,
    pub bs: ArraySection,
    pub ris: ArraySection,
    pub users: UserSection,
    #[serde(default)]
    pub nlos: NlosSection,
    #[serde(default)]
    pub localization: LocalizationSection,
    #[serde(default)]
    pub beamforming: BeamformingSection,
    #[serde(default)]
    pub flags: FlagsSection,
}

/// BS or RIS: one `elements` block per user on a square subgrid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySection {
    pub center: [f64; 3],
    /// Elements per block, `[rows, cols]`.
    pub elements: [usize; 2],
    /// Defaults to half a wavelength.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_spacing_m: Option<f64>,
    /// Blocks per side; defaults to `sqrt(K)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgrid: Option<[usize; 2]>,
    /// Block pitch; defaults to the orthogonal spacing for `spacing_q`,
    /// widened if needed so that blocks do not overlap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subarray_spacing_m: Option<f64>,
    #[serde(default = "default_q")]
    pub spacing_q: u32,
    /// Yaw, pitch, roll.
    #[serde(default)]
    pub orientation_deg: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserSection {
    pub positions: Vec<[f64; 3]>,
    pub elements: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_spacing_m: Option<f64>,
    #[serde(default)]
    pub orientation_deg: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NlosEntry {
    pub count: usize,
    pub attenuation_db: [f64; 2],
    pub angular_spread_deg: f64,
}

impl NlosEntry {
    fn profile(&self) -> NlosProfile {
        NlosProfile {
            count: self.count,
            attenuation_db: (self.attenuation_db[0], self.attenuation_db[1]),
            angular_spread: self.angular_spread_deg.to_radians(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NlosSection {
    /// Around the BS-RIS and RIS-user rays.
    pub ris: NlosEntry,
    pub direct: NlosEntry,
}

impl Default for NlosSection {
    fn default() -> Self {
        Self {
            ris: NlosEntry {
                count: 2,
                attenuation_db: [10.0, 20.0],
                angular_spread_deg: 40.0,
            },
            direct: NlosEntry {
                count: 3,
                attenuation_db: [10.0, 20.0],
                angular_spread_deg: 40.0,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LocalizationSection {
    pub ranging_error_m: f64,
    pub error_model: RangingErrorModel,
    pub anchor_span_m: f64,
    pub half_space: HalfSpace,
    pub error_radius_m: f64,
    pub adaptive_error_radius: bool,
}

impl Default for LocalizationSection {
    fn default() -> Self {
        let d = LocalizationSettings::default();
        Self {
            ranging_error_m: d.ranging_error,
            error_model: d.error_model,
            anchor_span_m: d.anchor_span,
            half_space: d.half_space,
            error_radius_m: d.error_radius,
            adaptive_error_radius: d.adaptive_error_radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeamformingSection {
    pub codebook_resolution_deg: f64,
    pub pba_max_iters: usize,
    pub pba_tolerance: f64,
}

impl Default for BeamformingSection {
    fn default() -> Self {
        let d = BeamformingSettings::default();
        Self {
            codebook_resolution_deg: d.codebook_resolution.to_degrees(),
            pba_max_iters: d.pba.max_iters,
            pba_tolerance: d.pba.tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlagsSection {
    pub enable_direct_link: bool,
    pub enable_ris: bool,
    pub random_phase_baseline: bool,
    pub use_pba: bool,
    pub precoder: PrecoderKind,
    pub precoder_csi: PrecoderCsi,
}

impl Default for FlagsSection {
    fn default() -> Self {
        let d = Flags::default();
        Self {
            enable_direct_link: d.enable_direct_link,
            enable_ris: d.enable_ris,
            random_phase_baseline: d.random_phase_baseline,
            use_pba: d.use_pba,
            precoder: d.precoder,
            precoder_csi: d.precoder_csi,
        }
    }
}

fn default_name() -> String {
    "scenario".into()
}

fn default_bandwidth() -> f64 {
    1e9
}

fn default_powers() -> Vec<f64> {
    (-2..=6).map(|i| 5.0 * i as f64).collect()
}

fn default_trials() -> usize {
    1000
}

fn default_seed() -> u64 {
    1
}

fn default_q() -> u32 {
    1
}

fn point(p: [f64; 3]) -> Position3D {
    Position3D::new(p[0], p[1], p[2])
}

fn orientation(deg: [f64; 3]) -> Orientation {
    Orientation::from_yaw_pitch_roll_deg(deg[0], deg[1], deg[2])
}

fn cfg_err(key: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config(risbeam_core::Error::Config {
        key: key.into(),
        message: message.into(),
    })
}

impl FileConfig {
    /// Parses TOML text. Missing required keys are reported together.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| cfg_err("<file>", e.message()))?;
        let missing: Vec<&str> = REQUIRED_KEYS
            .iter()
            .copied()
            .filter(|key| {
                let mut node = Some(&table);
                let parts: Vec<&str> = key.split('.').collect();
                for part in &parts[..parts.len() - 1] {
                    node = node.and_then(|t| t.get(*part)).and_then(|v| v.as_table());
                }
                !node.is_some_and(|t| t.contains_key(parts[parts.len() - 1]))
            })
            .collect();
        if !missing.is_empty() {
            return Err(cfg_err(missing.join(", "), "missing required keys"));
        }
        serde_path_to_error::deserialize(table).map_err(|e| {
            let path = e.path().to_string();
            cfg_err(
                if path == "." { "<file>".into() } else { path },
                e.into_inner().message(),
            )
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario files serialize")
    }

    /// Resolves defaults that depend on the geometry and validates the result.
    pub fn to_scenario(&self) -> Result<ScenarioConfig, CliError> {
        let lambda = wavelength(self.frequency_hz);
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(cfg_err("frequency_hz", "must be positive"));
        }
        let k = self.users.positions.len();
        let side = (k as f64).sqrt().round() as usize;
        let d1 = point(self.bs.center).distance(&point(self.ris.center));
        let bs = self.array("bs", &self.bs, k, side, lambda, |n, q| {
            optimal_bs_subarray_spacing(d1, lambda, n, q)
        })?;
        let ris = self.array("ris", &self.ris, k, side, lambda, |n, q| {
            optimal_subris_spacing(d1, lambda, n, q)
        })?;
        let l = &self.localization;
        let b = &self.beamforming;
        let f = &self.flags;
        let cfg = ScenarioConfig {
            name: self.name.clone(),
            frequency: self.frequency_hz,
            bandwidth: self.bandwidth_hz,
            noise_power_dbm: self.noise_power_dbm,
            absorption: self.absorption_per_m,
            bs,
            ris,
            user_array: UserArraySpec {
                rows: self.users.elements[0],
                cols: self.users.elements[1],
                element_spacing: self.users.element_spacing_m.unwrap_or(lambda / 2.0),
                orientation: orientation(self.users.orientation_deg),
            },
            users: self.users.positions.iter().copied().map(point).collect(),
            nlos_ris: self.nlos.ris.profile(),
            nlos_direct: self.nlos.direct.profile(),
            localization: LocalizationSettings {
                ranging_error: l.ranging_error_m,
                error_model: l.error_model,
                anchor_span: l.anchor_span_m,
                half_space: l.half_space,
                error_radius: l.error_radius_m,
                adaptive_error_radius: l.adaptive_error_radius,
            },
            beamforming: BeamformingSettings {
                codebook_resolution: b.codebook_resolution_deg.to_radians(),
                pba: PbaParams {
                    max_iters: b.pba_max_iters,
                    tolerance: b.pba_tolerance,
                },
            },
            flags: Flags {
                enable_direct_link: f.enable_direct_link,
                enable_ris: f.enable_ris,
                random_phase_baseline: f.random_phase_baseline,
                use_pba: f.use_pba,
                precoder: f.precoder,
                precoder_csi: f.precoder_csi,
            },
            transmit_power_dbm: self.transmit_power_dbm.clone(),
            trials: self.trials,
            seed: self.seed,
            noise_mode: self.noise_mode,
        };
        cfg.validate().map_err(CliError::Config)?;
        Ok(cfg)
    }

    fn array(
        &self,
        key: &str,
        a: &ArraySection,
        k: usize,
        side: usize,
        lambda: f64,
        optimal: impl Fn(usize, u32) -> risbeam_core::Result<f64>,
    ) -> Result<ArrayGeometry, CliError> {
        let [rows, cols] = a.subgrid.unwrap_or([side, side]);
        let element_spacing = a.element_spacing_m.unwrap_or(lambda / 2.0);
        if a.spacing_q == 0 {
            return Err(cfg_err(format!("{key}.spacing_q"), "must be at least 1"));
        }
        let spacing = match a.subarray_spacing_m {
            Some(s) => s,
            None => {
                let widest = a.elements[0].max(a.elements[1]) as f64 * element_spacing;
                optimal(rows.max(cols), a.spacing_q)
                    .map_err(|e| cfg_err(format!("{key}.subarray_spacing_m"), e.to_string()))?
                    .max(widest)
            }
        };
        if rows * cols != k {
            return Err(cfg_err(
                format!("{key}.subgrid"),
                format!("{rows}x{cols} blocks for {k} users; each user needs its own block"),
            ));
        }
        ArrayGeometry::upa(a.elements[0], a.elements[1], element_spacing, point(a.center))
            .and_then(|g| g.with_subgrid(rows, cols, spacing))
            .map(|g| g.with_orientation(orientation(a.orientation_deg)))
            .map_err(|e| cfg_err(key, e.to_string()))
    }
}

/// Reads and resolves a scenario file.
pub fn load_config(path: &std::path::Path) -> Result<(FileConfig, ScenarioConfig), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let file = FileConfig::parse(&text)?;
    let cfg = file.to_scenario()?;
    Ok((file, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
frequency_hz = 350e9
noise_power_dbm = -75.0

[bs]
center = [-4.0, -4.0, -2.0]
elements = [4, 4]

[ris]
center = [0.0, 0.0, 0.0]
elements = [4, 4]

[users]
positions = [[2.0, 2.0, 1.0], [0.0, 3.4, 0.85], [4.0, 0.0, 2.07], [0.0, 0.0, 5.8]]
elements = [4, 4]
"#;

    #[test]
    fn minimal_file_matches_programmatic_defaults() {
        let file = FileConfig::parse(MINIMAL).unwrap();
        let cfg = file.to_scenario().unwrap();
        let mut reference = ScenarioConfig::with_defaults(
            "scenario",
            350e9,
            Position3D::new(-4.0, -4.0, -2.0),
            Position3D::ORIGIN,
            cfg.users.clone(),
            4,
            4,
            4,
        )
        .unwrap();
        reference.name = cfg.name.clone();
        assert_eq!(cfg, reference);
    }

    #[test]
    fn empty_file_lists_every_required_key() {
        let err = FileConfig::parse("").unwrap_err().to_string();
        for key in REQUIRED_KEYS {
            assert!(err.contains(key), "{err}");
        }
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = FileConfig::parse(&format!("foo = 1\n{MINIMAL}"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("foo"), "{err}");
        let nested = MINIMAL.replace("elements = [4, 4]\n\n[ris]", "elements = [4, 4]\ntilt = 3\n\n[ris]");
        let err = FileConfig::parse(&nested).unwrap_err().to_string();
        assert!(err.contains("tilt") && err.contains("bs"), "{err}");
    }

    #[test]
    fn bad_values_carry_their_path() {
        let text = format!("{MINIMAL}\n[localization]\nerror_model = \"cauchy\"\n");
        let err = FileConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("localization.error_model"), "{err}");

        let text = MINIMAL.replace("[[2.0, 2.0, 1.0], ", "[");
        let err = FileConfig::parse(&text).unwrap().to_scenario().unwrap_err().to_string();
        assert!(err.contains("subgrid"), "{err}");

        let text = format!("{MINIMAL}\n[localization]\nranging_error_m = -1.0\n");
        let err = FileConfig::parse(&text).unwrap().to_scenario().unwrap_err().to_string();
        assert!(err.contains("localization.ranging_error_m"), "{err}");
    }

    #[test]
    fn snapshot_round_trips() {
        let file = FileConfig::parse(MINIMAL).unwrap();
        let again = FileConfig::parse(&file.to_toml()).unwrap();
        assert_eq!(file, again);
        assert_eq!(file.to_toml(), again.to_toml());
    }
}
