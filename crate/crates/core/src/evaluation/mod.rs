//! SINR and rate computation and the seeded Monte Carlo harness.

mod link;
mod scenario;
mod sweep;
mod trial;

pub use link::{effective_row, received_signal_terms, user_rate, SignalTerms};
pub use scenario::{
    dbm_to_watts, BeamformingSettings, Flags, LocalizationSettings, NoiseMode, PrecoderCsi, ScenarioConfig,
    UserArraySpec, Variant,
};
pub use sweep::{mean_ci95, paired_difference, run_sweep, SweepPoint, SweepResult};
pub use trial::{run_trial, PreparedTrial, Simulator, TrialResult};
