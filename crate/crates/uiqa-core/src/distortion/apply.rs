//! Pixel-level implementation of the six distortion kinds.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::mask::region_mask_from_boxes;
use super::{DistortionKind, DistortionSpec, RegionTarget};
use crate::error::{Error, Result};
use crate::image::{quantize_unit, ImageBuffer};

/// Applies `spec` to a 3-channel image. Output dimensions equal the input;
/// the result is deterministic given `(img, spec)` including the seed.
pub fn apply_distortion(img: &ImageBuffer, spec: &DistortionSpec) -> Result<ImageBuffer> {
    if img.channels() != 3 {
        return Err(Error::invalid("distortions operate on 3-channel images"));
    }
    spec.validate()?;
    match spec.kind {
        DistortionKind::Channel => {
            let gains = [spec.params[0], spec.params[1], spec.params[2]];
            Ok(channel_attenuation(img, gains))
        }
        DistortionKind::Contrast => Ok(contrast_toward_mean(img, spec.params[0])),
        DistortionKind::Illumination => Ok(brightness_gain(img, spec.params[0])),
        DistortionKind::MotionBlur => {
            let length = spec.params[0] as u32;
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.unwrap());
            let angle = rng.random_range(0.0..PI);
            Ok(motion_blur(img, length, angle))
        }
        DistortionKind::Region => apply_region(img, spec),
        DistortionKind::OceanSnow => Ok(ocean_snow(img, spec.params[0], spec.seed.unwrap())),
    }
}

fn map_pixels(img: &ImageBuffer, f: impl Fn(usize, f64) -> f64) -> ImageBuffer {
    let channels = img.channels() as usize;
    let data: Vec<u8> = img
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| quantize_unit(f(i % channels, v as f64 / 255.0).clamp(0.0, 1.0)))
        .collect();
    ImageBuffer::new(img.width(), img.height(), img.channels(), data)
        .expect("shape is preserved")
}

fn channel_attenuation(img: &ImageBuffer, gains: [f64; 3]) -> ImageBuffer {
    map_pixels(img, |c, v| v * gains[c])
}

/// `out = mean + factor * (in - mean)` with a per-channel mean, so the mean
/// itself is preserved and a constant image is a fixed point.
fn contrast_toward_mean(img: &ImageBuffer, factor: f64) -> ImageBuffer {
    let means = channel_means(img);
    map_pixels(img, |c, v| means[c] + factor * (v - means[c]))
}

fn brightness_gain(img: &ImageBuffer, gain: f64) -> ImageBuffer {
    map_pixels(img, |_, v| v * gain)
}

fn channel_means(img: &ImageBuffer) -> [f64; 3] {
    let mut sums = [0.0f64; 3];
    for px in img.data().chunks_exact(3) {
        for c in 0..3 {
            sums[c] += px[c] as f64 / 255.0;
        }
    }
    let n = img.pixel_count() as f64;
    [sums[0] / n, sums[1] / n, sums[2] / n]
}

/// Normalized line kernel of `length` taps at `angle`, rasterized with
/// bilinear splatting. Length 1 degenerates to the identity kernel.
fn line_kernel(length: u32, angle: f64) -> Vec<(i32, i32, f64)> {
    let half = (length - 1) as f64 / 2.0;
    let size = length as i32;
    let mut grid = vec![0.0f64; (size * size) as usize];
    let (sin, cos) = angle.sin_cos();
    for i in 0..length {
        let t = i as f64 - half;
        let x = half + t * cos;
        let y = half + t * sin;
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        for (dx, dy, w) in [
            (0, 0, (1.0 - fx) * (1.0 - fy)),
            (1, 0, fx * (1.0 - fy)),
            (0, 1, (1.0 - fx) * fy),
            (1, 1, fx * fy),
        ] {
            let gx = x0 as i32 + dx;
            let gy = y0 as i32 + dy;
            if w > 0.0 && gx >= 0 && gx < size && gy >= 0 && gy < size {
                grid[(gy * size + gx) as usize] += w;
            }
        }
    }
    let total: f64 = grid.iter().sum();
    let center = (length as i32 - 1) / 2;
    grid.iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(i, &w)| {
            let gx = i as i32 % size - center;
            let gy = i as i32 / size - center;
            (gx, gy, w / total)
        })
        .collect()
}

fn motion_blur(img: &ImageBuffer, length: u32, angle: f64) -> ImageBuffer {
    let taps = line_kernel(length, angle);
    let (w, h) = (img.width() as i32, img.height() as i32);
    let channels = img.channels() as usize;
    let mut data = vec![0u8; img.data().len()];
    for y in 0..h {
        for x in 0..w {
            for c in 0..channels {
                let mut acc = 0.0;
                for &(dx, dy, weight) in &taps {
                    // clamp-to-edge
                    let sx = (x + dx).clamp(0, w - 1) as u32;
                    let sy = (y + dy).clamp(0, h - 1) as u32;
                    acc += weight * img.sample_real(sx, sy, c as u8);
                }
                data[(y as usize * w as usize + x as usize) * channels + c] =
                    quantize_unit(acc.clamp(0.0, 1.0));
            }
        }
    }
    ImageBuffer::new(img.width(), img.height(), img.channels(), data).expect("shape is preserved")
}

/// Region distortion: a length-9 horizontal blur plus a 0.5 contrast
/// compression, both scaled by `strength`, applied on one side of the mask
/// and blended through the feather band. Pixels with zero effective weight
/// are copied byte-for-byte.
fn apply_region(img: &ImageBuffer, spec: &DistortionSpec) -> Result<ImageBuffer> {
    let strength = spec.params[0];
    if strength <= 0.0 {
        return Err(Error::invalid("region strength must be positive"));
    }
    let region = spec.region.as_ref().expect("validated");
    let mask = region_mask_from_boxes(&region.boxes, img.width(), img.height(), region.feather)?;

    let mut blur_len = (9.0 * strength).round() as u32;
    if blur_len % 2 == 0 {
        blur_len += 1;
    }
    let contrast = (1.0 - 0.5 * strength).max(0.0);
    let degraded = contrast_toward_mean(&motion_blur(img, blur_len.max(1), 0.0), contrast);

    let target = spec.region_target().expect("region kind");
    let channels = img.channels() as usize;
    let mut data = Vec::with_capacity(img.data().len());
    for y in 0..img.height() {
        for x in 0..img.width() {
            let w = match target {
                RegionTarget::Foreground => mask.weight(x, y),
                RegionTarget::Background => 1.0 - mask.weight(x, y),
            };
            let base = (y as usize * img.width() as usize + x as usize) * channels;
            if w == 0.0 {
                data.extend_from_slice(&img.data()[base..base + channels]);
            } else {
                for c in 0..channels {
                    let orig = img.data()[base + c] as f64 / 255.0;
                    let dist = degraded.data()[base + c] as f64 / 255.0;
                    data.push(quantize_unit(w * dist + (1.0 - w) * orig));
                }
            }
        }
    }
    ImageBuffer::new(img.width(), img.height(), img.channels(), data)
}

/// Bright particles: seeded disks (radius 1..3 px) stamped into a coverage
/// mask, then a single +40% full-scale lift on covered pixels, clipped.
fn ocean_snow(img: &ImageBuffer, disks_per_megapixel: f64, seed: u64) -> ImageBuffer {
    let (w, h) = (img.width(), img.height());
    let n_pixels = img.pixel_count() as f64;
    let n_disks = ((disks_per_megapixel * n_pixels / 1.0e6).round() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut covered = vec![false; img.pixel_count()];
    for _ in 0..n_disks {
        let cx = rng.random_range(0.0..w as f64);
        let cy = rng.random_range(0.0..h as f64);
        let r = rng.random_range(1.0..=3.0);
        let x_lo = (cx - r).floor().max(0.0) as u32;
        let x_hi = ((cx + r).ceil() as u32).min(w - 1);
        let y_lo = (cy - r).floor().max(0.0) as u32;
        let y_hi = ((cy + r).ceil() as u32).min(h - 1);
        for py in y_lo..=y_hi {
            for px in x_lo..=x_hi {
                let dx = px as f64 + 0.5 - cx;
                let dy = py as f64 + 0.5 - cy;
                if dx * dx + dy * dy <= r * r {
                    covered[py as usize * w as usize + px as usize] = true;
                }
            }
        }
    }
    let channels = img.channels() as usize;
    let data: Vec<u8> = img
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if covered[i / channels] {
                quantize_unit((v as f64 / 255.0 + 0.4).min(1.0))
            } else {
                v
            }
        })
        .collect();
    ImageBuffer::new(w, h, img.channels(), data).expect("shape is preserved")
}
