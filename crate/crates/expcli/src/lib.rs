//! Sweeps, figure presets, validation suite and file emitters built on
//! [`qdcascade`].

pub mod config;
pub mod emit;
pub mod error;
pub mod format;
pub mod presets;
pub mod svg;
pub mod sweep;
pub mod validate;

pub use error::{ExpError, Result};
