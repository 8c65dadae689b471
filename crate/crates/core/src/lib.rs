//! Three-flavor neutrino oscillation on a six-level discrete-time quantum walk.
//!
//! Each mass eigenstate is a two-component Dirac-like walker with its own coin
//! angle `θ_j`; the three sectors share a momentum `k̃` and together span the
//! coin basis `ζ1..ζ6`. Flavor states are PMNS superpositions of the sectors'
//! positive-energy eigenmodes, so the walk reproduces vacuum oscillations with
//! step phases `φ_j = arccos(cos θ_j cos k̃)` in place of `E_j t / ħ`.
//!
//! - [`walk`]: coin, shift and walk operators, eigenmodes, encodings, lattice.
//! - [`pmns`]: the mixing matrix.
//! - [`oscillation`]: flavor states, evolution, probabilities, physical units.
//! - [`wavepacket`]: Gaussian momentum packets and their entropies.
//! - [`config`] and [`run`]: the configuration-driven experiment runner.

pub mod checks;
pub mod config;
pub mod error;
pub mod numerics;
pub mod oscillation;
pub mod pmns;
pub mod run;
pub mod walk;
pub mod wavepacket;

pub use config::{parse_config, parse_config_with, ConfigError, Mode, Overrides, RunConfig};
pub use error::{Error, Result};
pub use oscillation::{
    continuum_probability, evolve, map_physical_to_walk, phase_argument, prepare_flavor,
    step_frequencies, transition_probability, FlavorState, PhysicalParams,
};
pub use pmns::{build_pmns, Flavor, MixingParams, PmnsMatrix};
pub use walk::{six_level_walk, Encoding, WalkParams};
pub use wavepacket::WavepacketSpec;
