//! Anisotropic multiresolution projectors on dyadic grids and numerical
//! checks of the Littlewood-Paley norm equivalence.

pub mod cli;
pub mod corpus;
pub mod czd;
pub mod error;
mod filters;
pub mod grid;
pub mod lpverify;
pub mod proj1d;
pub mod scaling;
pub mod suite;
pub mod tensor;

pub use error::{Error, Result};
pub use grid::{inner_product, lp_norm, Complex, Grid1D, GridND, MultiIndex, SampledFunction};
pub use proj1d::{Coefficients, Operator1D, ProjectorContext};
pub use scaling::{ConditionReport, ScalingSpec, ScalingSystem};
pub use tensor::{DetailPath, SignPattern, TensorContext};
