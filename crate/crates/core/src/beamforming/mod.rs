//! Analog transmit/receive beams, RIS phase design, codebook refinement and
//! digital precoders.

mod analog;
mod codebook;
mod complexity;
mod pba;
mod precoder;
mod ris;

pub use analog::{beam_gain, design_receive_beam, design_transmit_beam, AnalogBeamformer, TransmitBeam};
pub use codebook::{generate_codebook, AngularLattice, Codebook};
pub use complexity::{ceil_log3, search_complexity, SearchScheme};
pub use pba::{error_cone_half_angle, pba, pba_objective, PbaOutcome, PbaParams, PbaProblem};
pub use precoder::{mmse_precoder, precoder, zf_precoder, DigitalPrecoder, PrecoderKind, ZF_MAX_CONDITION};
pub use ris::{
    closed_form_ris_phase, diag_bilinear, directional_phase, phase_target, ris_objective, ClosedFormPhase,
    RisPhaseConfig,
};
