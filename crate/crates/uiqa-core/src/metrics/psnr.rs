//! Peak signal-to-noise ratio over all channels on the 8-bit scale.

use crate::error::{Error, Result};
use crate::image::ImageBuffer;

/// `10 * log10(255^2 / MSE)`. Identical images return `f64::INFINITY`,
/// which orders above every finite score; only ordering matters to the
/// rank-based evaluation downstream.
pub fn psnr(reference: &ImageBuffer, test: &ImageBuffer) -> Result<f64> {
    if !reference.same_shape(test) {
        return Err(Error::invalid(format!(
            "psnr shape mismatch: {}x{}x{} vs {}x{}x{}",
            reference.width(),
            reference.height(),
            reference.channels(),
            test.width(),
            test.height(),
            test.channels()
        )));
    }
    let mut sum_sq = 0.0f64;
    for (&a, &b) in reference.data().iter().zip(test.data()) {
        let d = a as f64 - b as f64;
        sum_sq += d * d;
    }
    let mse = sum_sq / reference.data().len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0 * 255.0 / mse).log10())
}
