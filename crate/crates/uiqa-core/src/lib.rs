//! Benchmark toolkit for utility-oriented underwater image quality
//! assessment: synthesizes six underwater distortion families over
//! reference images, turns subjective ratings into MOS labels with
//! agreement statistics, implements the classical comparison metrics
//! (PSNR, SSIM, UCIQE, UIQM), and evaluates any model's score tables with
//! rank correlations plus significance-pair C0 analysis.

pub mod distortion;
pub mod error;
pub mod eval;
pub mod image;
pub mod manifest;
pub mod metrics;
pub mod subjective;
pub mod synth;

pub use error::{Error, Result};
pub use image::ImageBuffer;
pub use manifest::{DatasetManifest, ManifestEntry};
