//! Exact logical states from transversal injection on planar surface codes.
//!
//! Every data qubit starts in `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`;
//! a first round of stabiliser measurements then heralds a logical state
//! that depends on the measured outcomes (the trajectory). This crate
//! derives those states exactly as integer polynomials in the physical
//! amplitudes, checks them against a dense state-vector reference, and runs
//! noisy Monte-Carlo encodings with trajectory-whitelist post-selection.

pub mod amplitude;
pub mod cli;
pub mod derive;
pub mod error;
pub mod gf2;
pub mod layout;
pub mod noise_sim;
pub mod oracle;
pub mod postselect;
pub mod trajectory;

pub use amplitude::{AmplitudePoly, BlochPoint, LogicalStateForm, PhysicalRotation};
pub use derive::{derive_state, enumerate_all_states};
pub use error::{Error, Result};
pub use layout::{build_rotated_layout, build_unrotated_layout, CodeLayout, Variant};
pub use oracle::oracle_state;
pub use trajectory::Trajectory;
