//! Steering vectors, THz path loss and channel synthesis.

mod pathloss;
mod steering;
mod synth;

pub use pathloss::{AbsorptionTable, PathLossModel};
pub use steering::{axis_phasors, project, steering_vector, SteeringVector, UpaShape};
pub use synth::{
    cascade, cascade_diag, reflection_matrix, synthesize_direct_q, synthesize_g, synthesize_h, CascadeScaling,
    ChannelKind, ChannelMatrix, NlosProfile, PathComponent,
};
