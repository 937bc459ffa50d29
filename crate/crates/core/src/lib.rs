//! Link-level simulation of RIS-aided terahertz multi-user MIMO.
//!
//! The crate follows the signal chain end to end:
//!
//! - [`geometry`]: placement of the BS subarrays, sub-RISs and users, the
//!   angle bookkeeping between them, optimal subarray spacings and the
//!   near/far-field boundary.
//! - [`channel`]: UPA steering vectors, THz line-of-sight gains with
//!   molecular absorption, and synthesis of the BS-RIS, RIS-user and direct
//!   channel matrices.
//! - [`localization`]: UWB ranging from four RIS-mounted anchors and 3D
//!   multilateration.
//! - [`beamforming`]: location-driven analog and RIS phase design, the
//!   codebook refinement search, and MMSE/ZF digital precoders.
//! - [`evaluation`]: SINR/rate computation and the seeded Monte Carlo harness.

// Range checks are written `!(x > 0.0)` so that NaN is rejected too, and
// per-user loops index several parallel vectors by user.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod beamforming;
pub mod channel;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod linalg;
pub mod localization;
pub mod rng;

pub use error::{Error, Result};
pub use geometry::{AnglePair, ArrayGeometry, FieldRegion, Orientation, Position3D};

pub use num_complex::Complex64;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
