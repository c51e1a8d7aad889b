//! Single-scale SSIM on grayscale with an 11x11 Gaussian window and
//! valid-region aggregation (windows fully inside the image; no padding).

use super::constants::{SSIM_K1, SSIM_K2, SSIM_L, SSIM_SIGMA, SSIM_WINDOW};
use crate::error::{Error, Result};
use crate::image::ImageBuffer;

fn gaussian_window() -> Vec<f64> {
    let half = (SSIM_WINDOW / 2) as isize;
    let mut w = Vec::with_capacity(SSIM_WINDOW * SSIM_WINDOW);
    for dy in -half..=half {
        for dx in -half..=half {
            let r2 = (dx * dx + dy * dy) as f64;
            w.push((-r2 / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp());
        }
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Mean local SSIM between two images of equal dimensions. Inputs are
/// collapsed to grayscale first; covariances are population-style
/// (weighted moments, no sample correction).
pub fn ssim(reference: &ImageBuffer, test: &ImageBuffer) -> Result<f64> {
    if reference.width() != test.width() || reference.height() != test.height() {
        return Err(Error::invalid("ssim requires equal dimensions"));
    }
    let w = reference.width() as usize;
    let h = reference.height() as usize;
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::invalid(format!(
            "image {w}x{h} is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window"
        )));
    }
    let a: Vec<f64> = reference
        .to_grayscale()
        .data()
        .iter()
        .map(|&v| v as f64)
        .collect();
    let b: Vec<f64> = test
        .to_grayscale()
        .data()
        .iter()
        .map(|&v| v as f64)
        .collect();

    let window = gaussian_window();
    let c1 = (SSIM_K1 * SSIM_L) * (SSIM_K1 * SSIM_L);
    let c2 = (SSIM_K2 * SSIM_L) * (SSIM_K2 * SSIM_L);
    let half = SSIM_WINDOW / 2;

    let mut total = 0.0f64;
    let mut count = 0usize;
    for cy in half..h - half {
        for cx in half..w - half {
            let mut mu_a = 0.0;
            let mut mu_b = 0.0;
            let mut aa = 0.0;
            let mut bb = 0.0;
            let mut ab = 0.0;
            let mut wi = 0;
            for dy in 0..SSIM_WINDOW {
                let row = (cy + dy - half) * w + cx - half;
                for dx in 0..SSIM_WINDOW {
                    let weight = window[wi];
                    wi += 1;
                    let va = a[row + dx];
                    let vb = b[row + dx];
                    mu_a += weight * va;
                    mu_b += weight * vb;
                    aa += weight * (va * va);
                    bb += weight * (vb * vb);
                    // grouped so ssim(a, b) == ssim(b, a) bit-for-bit
                    ab += weight * (va * vb);
                }
            }
            let var_a = aa - mu_a * mu_a;
            let var_b = bb - mu_b * mu_b;
            let cov = ab - mu_a * mu_b;
            let s = ((2.0 * (mu_a * mu_b) + c1) * (2.0 * cov + c2))
                / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
            total += s;
            count += 1;
        }
    }
    Ok(total / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_image(rng: &mut ChaCha8Rng, w: u32, h: u32) -> ImageBuffer {
        ImageBuffer::from_fn_rgb(w, h, |_, _| {
            [rng.random(), rng.random(), rng.random()]
        })
    }

    #[test]
    fn self_similarity_is_exactly_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let img = random_image(&mut rng, 24, 20);
        assert_eq!(ssim(&img, &img).unwrap(), 1.0);
    }

    #[test]
    fn ssim_is_symmetric_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let a = random_image(&mut rng, 16, 14);
            let b = random_image(&mut rng, 16, 14);
            assert_eq!(ssim(&a, &b).unwrap(), ssim(&b, &a).unwrap());
        }
    }

    #[test]
    fn degraded_image_scores_below_one() {
        let img = ImageBuffer::from_fn_rgb(32, 32, |x, y| {
            [((x * 8) % 255) as u8, ((y * 8) % 255) as u8, 128]
        });
        let worse = ImageBuffer::from_fn_rgb(32, 32, |x, y| {
            [((x * 8 + 40) % 255) as u8, ((y * 8) % 255) as u8, 128]
        });
        let s = ssim(&img, &worse).unwrap();
        assert!(s < 1.0 && s > -1.0);
    }

    #[test]
    fn window_larger_than_image_errors() {
        let img = ImageBuffer::constant(8, 8, 3, 10).unwrap();
        assert!(ssim(&img, &img).is_err());
    }

    #[test]
    fn shape_mismatch_errors() {
        let a = ImageBuffer::constant(16, 16, 3, 10).unwrap();
        let b = ImageBuffer::constant(16, 12, 3, 10).unwrap();
        assert!(ssim(&a, &b).is_err());
    }
}
