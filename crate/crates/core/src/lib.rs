//! Flat LCDM background cosmology, Press-Schechter structure formation and
//! the cosmic star formation rate of a gas-reservoir model.
//!
//! The numerical core is generic over the scalar type ([`Real`], implemented
//! for `f32` and `f64`). The aliases below fix it to `f64`, which is what
//! the command-line tool uses.

// `!(a < b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod background;
pub mod cli;
pub mod csfr;
pub mod error;
pub mod numerics;
pub mod pipeline;
pub mod powerspec;
pub mod real;
pub mod structure;

pub use background::{Background, CosmologyParams, EpochTable};
pub use csfr::{csfr_at, imf_normalization, run_csfr, star_formation_rate, CSFRHistory, SFParams};
pub use error::{Error, Result};
pub use numerics::{Table1D, ToleranceSpec};
pub use pipeline::{Pipeline, PipelineConfig};
pub use powerspec::{PowerSpectrum, SigmaTable, SpectrumConfig, TransferModel};
pub use real::Real;
pub use structure::{MassFunctionSample, PressSchechter, StructureGrid};

pub type Cosmology = Background<f64>;
pub type Params = CosmologyParams<f64>;
pub type Tolerance = ToleranceSpec<f64>;
pub type Spectrum = PowerSpectrum<f64>;
pub type Sigma = SigmaTable<f64>;
pub type HaloModel = PressSchechter<f64>;
pub type Structures = StructureGrid<f64>;
pub type StarFormation = SFParams<f64>;
pub type History = CSFRHistory<f64>;
pub type Model = Pipeline<f64>;
pub type ModelConfig = PipelineConfig<f64>;
