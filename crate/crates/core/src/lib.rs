//! Simulation and analytics for a quantum repeater built from Rydberg-blockaded
//! atomic ensembles in fiber-coupled cavities.
//!
//! * [`statevec`]: exact link-level state vector with quantum-jump noise.
//! * [`linkprotocol`]: entanglement generation, diagnosis and heralding for one link.
//! * [`chainsim`]: chain-level simulation of generation rounds and swapping.
//! * [`analytics`]: closed-form success probabilities, round counts and times.

pub mod analytics;
pub mod chainsim;
pub mod error;
pub mod linkprotocol;
pub mod params;
pub mod record;
pub mod rng;
pub mod statevec;

pub use error::{ChainError, ParamError, StateError};
pub use params::{ChainParams, NoiseParams, Schedule};
