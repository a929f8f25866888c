//! Short-time Fourier transforms of model signals and numerical detection of anisotropic
//! Gelfand–Shilov wave front sets along the power curves λ ↦ (λᵗx, λˢξ).

pub mod airy;
pub mod error;
pub mod geometry;
pub mod signal;
pub mod stft;

pub use error::{Error, Result};
pub mod detector;
pub mod config;
pub mod operators;
pub mod presets;
