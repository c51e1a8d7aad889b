//! UIQM: colorfulness (UICM), sharpness (UISM), and contrast (UIConM)
//! terms combined with the published weights. All statistics run on
//! unit-interval reals; block terms use 8x8 blocks, ignoring partial edge
//! blocks, with natural logarithms.

use super::constants::{
    LUMA_WEIGHTS, UICM_ALPHA, UICM_MU_WEIGHT, UICM_SIGMA_WEIGHT, UIQM_BLOCK, UIQM_C1, UIQM_C2,
    UIQM_C3,
};
use crate::error::{Error, Result};
use crate::image::ImageBuffer;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UiqmTerms {
    pub uicm: f64,
    pub uism: f64,
    pub uiconm: f64,
}

pub fn uiqm_terms(img: &ImageBuffer) -> Result<UiqmTerms> {
    if img.channels() != 3 {
        return Err(Error::invalid("uiqm requires a 3-channel image"));
    }
    if img.width().min(img.height()) < 32 {
        return Err(Error::invalid(
            "uiqm requires a minimum dimension of 32 pixels",
        ));
    }
    Ok(UiqmTerms {
        uicm: uicm(img),
        uism: uism(img),
        uiconm: uiconm(img),
    })
}

pub fn uiqm(img: &ImageBuffer) -> Result<f64> {
    let t = uiqm_terms(img)?;
    Ok(UIQM_C1 * t.uicm + UIQM_C2 * t.uism + UIQM_C3 * t.uiconm)
}

/// Mean after trimming `floor(alpha * n)` samples from each end of the
/// sorted data.
fn alpha_trimmed_mean(sorted: &[f64], alpha: f64) -> f64 {
    let trim = (alpha * sorted.len() as f64).floor() as usize;
    let kept = &sorted[trim..sorted.len() - trim];
    kept.iter().sum::<f64>() / kept.len() as f64
}

/// Colorfulness from the RG and YB opponent channels: asymmetric
/// alpha-trimmed means plus full-sample variance about those means.
fn uicm(img: &ImageBuffer) -> f64 {
    let n = img.pixel_count();
    let mut rg = Vec::with_capacity(n);
    let mut yb = Vec::with_capacity(n);
    for px in img.data().chunks_exact(3) {
        let r = px[0] as f64 / 255.0;
        let g = px[1] as f64 / 255.0;
        let b = px[2] as f64 / 255.0;
        rg.push(r - g);
        yb.push((r + g) / 2.0 - b);
    }
    let stat = |values: &mut Vec<f64>| {
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mu = alpha_trimmed_mean(values, UICM_ALPHA);
        let var = values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / values.len() as f64;
        (mu, var)
    };
    let (mu_rg, var_rg) = stat(&mut rg);
    let (mu_yb, var_yb) = stat(&mut yb);
    UICM_MU_WEIGHT * (mu_rg * mu_rg + mu_yb * mu_yb).sqrt()
        + UICM_SIGMA_WEIGHT * (var_rg + var_yb).sqrt()
}

/// Sobel gradient magnitude, zero on the one-pixel border.
fn sobel_magnitude(plane: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut out = vec![0.0f64; w * h];
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let p = |dx: isize, dy: isize| {
                plane[(y as isize + dy) as usize * w + (x as isize + dx) as usize]
            };
            let gx = p(1, -1) + 2.0 * p(1, 0) + p(1, 1) - p(-1, -1) - 2.0 * p(-1, 0) - p(-1, 1);
            let gy = p(-1, 1) + 2.0 * p(0, 1) + p(1, 1) - p(-1, -1) - 2.0 * p(0, -1) - p(1, -1);
            out[y * w + x] = (gx * gx + gy * gy).sqrt();
        }
    }
    out
}

/// EME over 8x8 blocks: `(2 / K) * sum ln(max / min)`, skipping blocks
/// whose extrema are not strictly positive.
fn eme(plane: &[f64], w: usize, h: usize) -> f64 {
    let k1 = w / UIQM_BLOCK;
    let k2 = h / UIQM_BLOCK;
    let mut total = 0.0;
    for by in 0..k2 {
        for bx in 0..k1 {
            let mut max = f64::MIN;
            let mut min = f64::MAX;
            for dy in 0..UIQM_BLOCK {
                let row = (by * UIQM_BLOCK + dy) * w + bx * UIQM_BLOCK;
                for dx in 0..UIQM_BLOCK {
                    let v = plane[row + dx];
                    max = max.max(v);
                    min = min.min(v);
                }
            }
            if min > 0.0 && max > 0.0 {
                total += (max / min).ln();
            }
        }
    }
    2.0 / (k1 as f64 * k2 as f64) * total
}

/// Sharpness: Sobel-weighted channel planes fed through block EME and
/// combined with the luma weights.
fn uism(img: &ImageBuffer) -> f64 {
    let w = img.width() as usize;
    let h = img.height() as usize;
    let mut total = 0.0;
    for c in 0..3u8 {
        let plane = img.channel_plane(c);
        let sobel = sobel_magnitude(&plane, w, h);
        let weighted: Vec<f64> = sobel.iter().zip(&plane).map(|(&s, &v)| s * v).collect();
        total += LUMA_WEIGHTS[c as usize] * eme(&weighted, w, h);
    }
    total
}

/// Contrast: block logAMEE of the luma plane,
/// `(1 / K) * sum m * ln(m)` with the Michelson ratio
/// `m = (max - min) / (max + min)`; degenerate blocks contribute zero.
fn uiconm(img: &ImageBuffer) -> f64 {
    let w = img.width() as usize;
    let h = img.height() as usize;
    let luma: Vec<f64> = img.luma_plane_255().iter().map(|v| v / 255.0).collect();
    let k1 = w / UIQM_BLOCK;
    let k2 = h / UIQM_BLOCK;
    let mut total = 0.0;
    for by in 0..k2 {
        for bx in 0..k1 {
            let mut max = f64::MIN;
            let mut min = f64::MAX;
            for dy in 0..UIQM_BLOCK {
                let row = (by * UIQM_BLOCK + dy) * w + bx * UIQM_BLOCK;
                for dx in 0..UIQM_BLOCK {
                    let v = luma[row + dx];
                    max = max.max(v);
                    min = min.min(v);
                }
            }
            let top = max - min;
            let bot = max + min;
            if top > 0.0 && bot > 0.0 {
                let m = top / bot;
                total += m * m.ln();
            }
        }
    }
    total / (k1 as f64 * k2 as f64)
}
