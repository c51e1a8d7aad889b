//! UCIQE: weighted sum of chroma spread, luminance contrast, and mean
//! saturation. CIELAB values are normalized by 100 so the three terms share
//! a comparable scale.

use super::constants::{UCIQE_C1, UCIQE_C2, UCIQE_C3, UCIQE_CONTRAST_QUANTILE};
use crate::error::Result;
use crate::image::{rgb_to_cielab, saturation_plane, ImageBuffer};
use crate::subjective::percentile;

/// The three UCIQE terms before weighting: chroma standard deviation,
/// luminance contrast (inter-quantile span), mean saturation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UciqeTerms {
    pub sigma_chroma: f64,
    pub contrast_luminance: f64,
    pub mean_saturation: f64,
}

pub fn uciqe_terms(img: &ImageBuffer) -> Result<UciqeTerms> {
    let lab = rgb_to_cielab(img)?;
    let n = lab.l.len() as f64;

    // Population standard deviation of chroma, in 1/100 Lab units.
    let chroma: Vec<f64> = lab
        .a
        .iter()
        .zip(&lab.b)
        .map(|(&a, &b)| (a * a + b * b).sqrt() / 100.0)
        .collect();
    let mean_c = chroma.iter().sum::<f64>() / n;
    let var_c = chroma.iter().map(|c| (c - mean_c) * (c - mean_c)).sum::<f64>() / n;

    // Luminance contrast: span between the bottom and top 1% quantiles of
    // L (normalized by 100), inclusive linear interpolation.
    let mut l_sorted: Vec<f64> = lab.l.iter().map(|&l| l / 100.0).collect();
    l_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let contrast = percentile(&l_sorted, 1.0 - UCIQE_CONTRAST_QUANTILE)
        - percentile(&l_sorted, UCIQE_CONTRAST_QUANTILE);

    let sat = saturation_plane(img)?;
    let mean_s = sat.iter().sum::<f64>() / n;

    Ok(UciqeTerms {
        sigma_chroma: var_c.sqrt(),
        contrast_luminance: contrast,
        mean_saturation: mean_s,
    })
}

pub fn uciqe(img: &ImageBuffer) -> Result<f64> {
    let t = uciqe_terms(img)?;
    Ok(UCIQE_C1 * t.sigma_chroma + UCIQE_C2 * t.contrast_luminance + UCIQE_C3 * t.mean_saturation)
}
