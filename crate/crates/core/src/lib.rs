//! Denoise-and-forward physical-layer network coding with M-PAM and M-QAM.
//!
//! * [`constellation`]: PAM, square and cross QAM grids with binary or Gray
//!   labels, minimum-distance demodulation.
//! * [`mapping`]: superposed constellations, the modular coded-symbol table
//!   used by the relay, destination decoding and the Exclusive-Law checker.
//! * [`analysis`]: closed-form SER/BER expressions and bounds.
//! * [`channel`]: link budget, Rician fading and AWGN.
//! * [`sim`]: Monte Carlo symbol-level simulations and CSV sweeps.
//! * [`rate_adapt`]: modulation selection and the PNC/CNC/four-phase/direct
//!   throughput comparison over random topologies.
//! * [`cli`]: the `pnc` command-line front end.
//!
//! The numeric core is generic over [`Scalar`] (implemented for `f32` and
//! `f64`); the `*64` aliases below fix it to `f64`.

pub mod analysis;
pub mod channel;
pub mod cli;
pub mod constellation;
mod error;
pub mod mapping;
pub mod rate_adapt;
pub mod scalar;
pub mod sim;

pub use constellation::{BitLabel, Constellation, Labeling, ModKind, ModulationId};
pub use error::{Error, Result};
pub use mapping::{verify_exclusive_law, ExclusiveLawReport, MappingRule, MappingTable, SuperposedConstellation};
pub use scalar::Scalar;

pub type Constellation64 = Constellation<f64>;
pub type Constellation32 = Constellation<f32>;
pub type SuperposedConstellation64 = SuperposedConstellation<f64>;
pub type MappingTable64 = MappingTable<f64>;
pub type MappingTable32 = MappingTable<f32>;
pub type SnrPair64 = analysis::SnrPair<f64>;
pub type LinkBudget64 = channel::LinkBudget<f64>;
