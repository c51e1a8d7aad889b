//! sRGB to D65 CIELAB conversion and HSV saturation, the color inputs of
//! the no-reference underwater metrics.

use super::ImageBuffer;
use crate::error::{Error, Result};

// sRGB -> XYZ (D65) matrix. The white point is taken as the row sums so a
// neutral input maps to exactly zero chroma.
const M: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];
const XN: f64 = M[0][0] + M[0][1] + M[0][2];
const YN: f64 = M[1][0] + M[1][1] + M[1][2];
const ZN: f64 = M[2][0] + M[2][1] + M[2][2];

const LAB_EPSILON: f64 = 216.0 / 24389.0;
const LAB_KAPPA: f64 = 24389.0 / 27.0;

/// CIELAB planes of an RGB image, row-major, same dimensions as the source.
#[derive(Debug, Clone)]
pub struct LabPixelPlane {
    pub width: u32,
    pub height: u32,
    pub l: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl LabPixelPlane {
    /// Per-pixel chroma sqrt(a^2 + b^2).
    pub fn chroma(&self) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(&a, &b)| (a * a + b * b).sqrt())
            .collect()
    }
}

#[inline]
fn srgb_to_linear(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

#[inline]
fn lab_f(t: f64) -> f64 {
    if t > LAB_EPSILON {
        t.cbrt()
    } else {
        (LAB_KAPPA * t + 16.0) / 116.0
    }
}

/// sRGB (8-bit) to D65 CIELAB with standard gamma linearization.
pub fn rgb_to_cielab(img: &ImageBuffer) -> Result<LabPixelPlane> {
    if img.channels() != 3 {
        return Err(Error::invalid(
            "CIELAB conversion requires a 3-channel image",
        ));
    }
    let n = img.pixel_count();
    let mut l = Vec::with_capacity(n);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for px in img.data().chunks_exact(3) {
        let r = srgb_to_linear(px[0] as f64 / 255.0);
        let g = srgb_to_linear(px[1] as f64 / 255.0);
        let bl = srgb_to_linear(px[2] as f64 / 255.0);
        let x = M[0][0] * r + M[0][1] * g + M[0][2] * bl;
        let y = M[1][0] * r + M[1][1] * g + M[1][2] * bl;
        let z = M[2][0] * r + M[2][1] * g + M[2][2] * bl;
        let fx = lab_f(x / XN);
        let fy = lab_f(y / YN);
        let fz = lab_f(z / ZN);
        l.push(116.0 * fy - 16.0);
        a.push(500.0 * (fx - fy));
        b.push(200.0 * (fy - fz));
    }
    Ok(LabPixelPlane {
        width: img.width(),
        height: img.height(),
        l,
        a,
        b,
    })
}

/// HSV saturation plane: (max - min) / max per pixel, 0 for black.
pub fn saturation_plane(img: &ImageBuffer) -> Result<Vec<f64>> {
    if img.channels() != 3 {
        return Err(Error::invalid("saturation requires a 3-channel image"));
    }
    Ok(img
        .data()
        .chunks_exact(3)
        .map(|px| {
            let max = px.iter().copied().max().unwrap() as f64;
            let min = px.iter().copied().min().unwrap() as f64;
            if max == 0.0 {
                0.0
            } else {
                (max - min) / max
            }
        })
        .collect())
}
