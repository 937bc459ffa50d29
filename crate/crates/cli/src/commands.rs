//! Command implementations. Each returns what it would print.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use risbeam_core::beamforming::{error_cone_half_angle, search_complexity, AngularLattice, SearchScheme};
use risbeam_core::evaluation::{run_sweep, ScenarioConfig};
use risbeam_core::geometry::{optimal_bs_subarray_spacing, optimal_subris_spacing, ColumnInnerProduct};
use risbeam_core::AnglePair;

use crate::config::FileConfig;
use crate::manifest::{blob_sha256, now_rfc3339, Manifest};
use crate::output::write_sweep_csv;
use crate::presets::preset;
use crate::CliError;

/// Where a scenario comes from.
#[derive(Debug, Clone)]
pub enum Source {
    File(PathBuf),
    Preset(String),
}

impl Source {
    pub fn load(&self) -> Result<FileConfig, CliError> {
        match self {
            Source::File(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                FileConfig::parse(&text)
            }
            Source::Preset(name) => preset(name),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulateArgs {
    pub source: Source,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
}

/// Runs every enabled variant and writes `<variant>.csv`, `config.toml`
/// and `manifest.toml` into `out`.
pub fn simulate(args: &SimulateArgs) -> Result<String, CliError> {
    let mut file = args.source.load()?;
    if let Some(seed) = args.seed {
        file.seed = seed;
    }
    if let Some(trials) = args.trials {
        file.trials = trials;
    }
    let cfg = file.to_scenario()?;
    let variants = cfg.flags.enabled_variants();
    if variants.is_empty() {
        return Err(CliError::Config(risbeam_core::Error::Config {
            key: "flags".into(),
            message: "no variant enabled".into(),
        }));
    }
    let started_at = now_rfc3339();
    let results = run_sweep(&cfg, &variants)?;
    let finished_at = now_rfc3339();

    fs::create_dir_all(&args.out).map_err(|e| io_at(&args.out, e))?;
    let snapshot = file.to_toml();
    write(&args.out.join("config.toml"), snapshot.as_bytes())?;
    let mut outputs = Vec::new();
    let mut report = String::new();
    for r in &results {
        let name = format!("{}.csv", r.variant.as_str());
        let mut buf = Vec::new();
        write_sweep_csv(r, &mut buf)?;
        write(&args.out.join(&name), &buf)?;
        let last = r.points.last().expect("at least one power");
        let _ = writeln!(
            report,
            "{:<14} {:>8.3} bps/Hz at {} dBm",
            r.variant.as_str(),
            last.mean_sum_rate,
            last.power_dbm
        );
        outputs.push(name);
    }
    let degraded = results.first().map_or(0, |r| r.degraded_trials);
    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        scenario: cfg.name.clone(),
        seed: cfg.seed,
        trials: cfg.trials,
        config_file: "config.toml".into(),
        config_sha256: blob_sha256(snapshot.as_bytes()),
        started_at,
        finished_at,
        degraded_trials: degraded,
        outputs,
    };
    write(&args.out.join("manifest.toml"), manifest.to_toml().as_bytes())?;
    if degraded > 0 {
        let _ = writeln!(
            report,
            "{degraded} trial(s) had a user whose position fix was degenerate or failed"
        );
    }
    Ok(report)
}

/// Optimal spacings, the field boundary, per-user regimes and the worst
/// cross-column inner product of the BS-RIS channel.
pub fn geometry(source: &Source) -> Result<String, CliError> {
    let file = source.load()?;
    let cfg = file.to_scenario()?;
    let mut out = String::new();
    let lambda = cfg.wavelength();
    let n = cfg.ris.subgrid_rows.max(cfg.ris.subgrid_cols);
    let m = cfg.bs.subgrid_rows.max(cfg.bs.subgrid_cols);
    let d1 = cfg.bs.center.distance(&cfg.ris.center);
    let alpha = optimal_subris_spacing(d1, lambda, n, 1)?;
    let chi = optimal_bs_subarray_spacing(d1, lambda, m, 1)?;
    let boundary = cfg.field_boundary()?;
    let _ = writeln!(out, "scenario: {}", cfg.name);
    let _ = writeln!(out, "wavelength_m: {lambda:.6e}");
    let _ = writeln!(out, "bs_ris_distance_m: {d1:.4}");
    let _ = writeln!(out, "optimal_subris_spacing_m: {alpha:.6}");
    let _ = writeln!(out, "optimal_bs_subarray_spacing_m: {chi:.6}");
    let _ = writeln!(out, "subris_spacing_m: {:.6}", cfg.ris.subgrid_spacing);
    let _ = writeln!(out, "bs_subarray_spacing_m: {:.6}", cfg.bs.subgrid_spacing);
    let _ = writeln!(out, "field_boundary_m: {boundary:.4}");
    for (k, user) in cfg.users.iter().enumerate() {
        let d2 = user.distance(&cfg.ris.block_center(k));
        let region = cfg.cascade_region(k, d2)?;
        let _ = writeln!(
            out,
            "user {k}: d1 = {:.4} m, d2 = {d2:.4} m, {region}",
            cfg.bs_ris_distance(k)
        );
    }
    let _ = writeln!(out, "orthogonality_residual: {:.3e}", orthogonality_residual(&cfg)?);
    Ok(out)
}

/// Largest normalized inner product between channel columns of two distinct
/// BS subarrays. Zero means perfectly separated streams.
pub fn orthogonality_residual(cfg: &ScenarioConfig) -> Result<f64, CliError> {
    let n = cfg.ris.subgrid_rows.max(cfg.ris.subgrid_cols);
    let m = cfg.bs.subgrid_rows.max(cfg.bs.subgrid_cols);
    let ip = ColumnInnerProduct {
        subris_grid: n,
        bs_grid: m,
        d1: cfg.bs.center.distance(&cfg.ris.center),
        frequency: cfg.frequency,
        spacing: cfg.ris.subgrid_spacing,
        absorption: cfg.absorption,
    };
    let mut worst: f64 = 0.0;
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|x| (0..m).map(move |y| (x, y))).collect();
    for (i, &a) in cells.iter().enumerate() {
        for &b in &cells[i + 1..] {
            worst = worst.max(ip.normalized_magnitude(a, b)?);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy)]
pub struct ComplexityArgs {
    pub error_radius: f64,
    pub distance: f64,
    pub resolution_deg: f64,
}

impl Default for ComplexityArgs {
    fn default() -> Self {
        Self {
            error_radius: 0.1,
            distance: 3.0,
            resolution_deg: 0.5,
        }
    }
}

/// Beam-pair evaluations per scheme as CSV. The location-restricted column
/// is the product of the two cone sub-codebook sizes for a user at
/// `distance` with error radius `error_radius`.
pub fn complexity(ns: &[u64], args: ComplexityArgs) -> Result<String, CliError> {
    let lattice = AngularLattice::new(args.resolution_deg.to_radians())?;
    let half = error_cone_half_angle(args.error_radius, args.distance);
    let cone = lattice.points_in_cone(&AnglePair::new(0.0, 0.0)?, half).len();
    let sensor = SearchScheme::SensorPba {
        receive: cone,
        ris: cone,
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["n", "exhaustive", "td", "psd", "sensor_pba"])
        .map_err(csv_err)?;
    for &n in ns {
        let row = [SearchScheme::Exhaustive, SearchScheme::Td, SearchScheme::Psd, sensor]
            .map(|s| search_complexity(s, n).to_string());
        let mut record = vec![n.to_string()];
        record.extend(row);
        w.write_record(&record).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| io_at(path, e))
}

fn io_at(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}
