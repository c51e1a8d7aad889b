//! Procedural test material: a photographic-style fixture image, seeded
//! underwater scenes with box-annotated targets, and a synthetic rater
//! panel producing realistic rating tables for pipelines that need labels
//! without a subjective experiment.
//!
//! Everything here is integer/hash based (no trig), so outputs are
//! bit-identical across platforms.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::distortion::{BoxRect, DistortionKind};
use crate::image::ImageBuffer;
use crate::manifest::DatasetManifest;
use crate::subjective::{Rating, RatingTable};

fn hash2(x: u32, y: u32) -> u64 {
    let mut h = (x as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (y as u64).wrapping_mul(0xd1b5_4a32_d192_ed03);
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h ^ (h >> 31)
}

/// Fine-grained deterministic texture in [-amp, amp].
fn texture(x: u32, y: u32, amp: f64) -> f64 {
    let span = (2.0 * amp) as u64 + 1;
    (hash2(x, y) % span) as f64 - amp
}

/// The bundled photographic-style fixture: smooth color gradients, four
/// hard-edged disks, per-pixel texture, and a vignette, with every channel
/// kept inside [8, 168] so brightness gains up to 1.5x cannot clip.
pub fn photographic_fixture() -> ImageBuffer {
    const W: u32 = 192;
    const H: u32 = 144;
    const DISKS: [(f64, f64, f64, [f64; 3]); 4] = [
        (48.0, 40.0, 18.0, [150.0, 90.0, 60.0]),
        (130.0, 62.0, 24.0, [70.0, 140.0, 110.0]),
        (90.0, 110.0, 14.0, [160.0, 150.0, 60.0]),
        (160.0, 118.0, 10.0, [60.0, 70.0, 150.0]),
    ];
    ImageBuffer::from_fn_rgb(W, H, |x, y| {
        let u = x as f64 / (W - 1) as f64;
        let v = y as f64 / (H - 1) as f64;
        let mut rgb = [
            30.0 + 70.0 * u,
            55.0 + 55.0 * v + 15.0 * u,
            85.0 + 45.0 * (1.0 - u) * v,
        ];
        for &(cx, cy, radius, color) in &DISKS {
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            if dx * dx + dy * dy <= radius * radius {
                for c in 0..3 {
                    rgb[c] = 0.2 * rgb[c] + 0.8 * color[c];
                }
            }
        }
        let t = texture(x, y, 8.0);
        let dx = u - 0.5;
        let dy = v - 0.5;
        let vignette = -20.0 * (dx * dx + dy * dy) / 0.5;
        let mut px = [0u8; 3];
        for c in 0..3 {
            px[c] = (rgb[c] + t + vignette).clamp(8.0, 168.0).round() as u8;
        }
        px
    })
}

/// A seeded underwater scene: water column gradient, sandy seabed, and
/// `n_targets` bright fish-shaped ellipses. Returns the image and the
/// target bounding boxes (empty for a non-target scene).
pub fn scene(width: u32, height: u32, n_targets: usize, seed: u64) -> (ImageBuffer, Vec<BoxRect>) {
    assert!(width >= 48 && height >= 48, "scenes need at least 48x48");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // scene-level palette jitter so different seeds give different content
    let hue_shift: f64 = rng.random_range(-12.0..12.0);
    let seabed_v = rng.random_range(0.78..0.9);

    struct Fish {
        cx: f64,
        cy: f64,
        rx: f64,
        ry: f64,
        brightness: f64,
    }
    let mut fishes = Vec::with_capacity(n_targets);
    let mut boxes = Vec::with_capacity(n_targets);
    for _ in 0..n_targets {
        let rx = rng.random_range(width as f64 / 16.0..width as f64 / 9.0);
        let ry = rx * rng.random_range(0.4..0.6);
        let cx = rng.random_range(rx + 1.0..width as f64 - rx - 1.0);
        let cy = rng.random_range(ry + 1.0..height as f64 * seabed_v - ry - 1.0);
        let brightness = rng.random_range(150.0..190.0);
        let x0 = (cx - rx).floor().max(0.0) as u32;
        let y0 = (cy - ry).floor().max(0.0) as u32;
        let x1 = ((cx + rx).ceil() as u32).min(width - 1);
        let y1 = ((cy + ry).ceil() as u32).min(height - 1);
        boxes.push(BoxRect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1));
        fishes.push(Fish {
            cx,
            cy,
            rx,
            ry,
            brightness,
        });
    }

    let img = ImageBuffer::from_fn_rgb(width, height, |x, y| {
        let v = y as f64 / (height - 1) as f64;
        let mut rgb = if v >= seabed_v {
            // seabed
            [
                95.0 + texture(x, y + 7, 6.0),
                88.0 + hue_shift * 0.3,
                62.0,
            ]
        } else {
            // water column darkening with depth
            [
                18.0 + 14.0 * v + hue_shift * 0.2,
                92.0 - 34.0 * v + hue_shift,
                118.0 - 44.0 * v,
            ]
        };
        for f in &fishes {
            let dx = (x as f64 - f.cx) / f.rx;
            let dy = (y as f64 - f.cy) / f.ry;
            let d2 = dx * dx + dy * dy;
            if d2 <= 1.0 {
                // eye dot near the front of the body
                let eye = dx > 0.55 && dy.abs() < 0.25;
                let body = if eye { 30.0 } else { f.brightness };
                rgb = [body, body, body * 0.92];
            }
        }
        let t = texture(x, y, 5.0);
        [
            (rgb[0] + t).clamp(0.0, 255.0).round() as u8,
            (rgb[1] + t).clamp(0.0, 255.0).round() as u8,
            (rgb[2] + t).clamp(0.0, 255.0).round() as u8,
        ]
    });
    (img, boxes)
}

/// Nominal utility of an entry on the 1-5 rating scale: references are
/// near-pristine, non-targets are useless by definition, and distorted
/// images drop with level at a per-kind rate.
pub fn nominal_utility(entry: &crate::manifest::ManifestEntry) -> f64 {
    if !entry.is_target {
        return 1.3;
    }
    match &entry.distortion {
        None => 4.7,
        Some(spec) => {
            let max_level = if spec.kind == DistortionKind::OceanSnow {
                2.0
            } else {
                4.0
            };
            let weight = match spec.kind {
                DistortionKind::Channel => 1.6,
                DistortionKind::Contrast => 2.0,
                DistortionKind::Illumination => 2.4,
                DistortionKind::MotionBlur => 3.0,
                DistortionKind::Region => 2.2,
                DistortionKind::OceanSnow => 1.8,
            };
            4.7 - weight * spec.level as f64 / max_level
        }
    }
}

/// A synthetic rater panel: each subject scores every target entry as its
/// nominal utility plus triangular noise, rounded into 1..=5. The first
/// `n_verification` images (by id) are re-presented as `p2` repeats for
/// screening. Non-target images are not rated, matching the subjective
/// protocol.
pub fn synthetic_ratings(
    manifest: &DatasetManifest,
    n_subjects: usize,
    n_verification: usize,
    seed: u64,
) -> RatingTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratings = Vec::new();
    let mut rated: Vec<(&str, f64)> = manifest
        .entries
        .iter()
        .filter(|e| e.is_target)
        .map(|e| (e.image_id.as_str(), nominal_utility(e)))
        .collect();
    rated.sort_by(|a, b| a.0.cmp(b.0));
    let noisy_score = |rng: &mut ChaCha8Rng, truth: f64| -> u8 {
        let noise: f64 = (rng.random::<f64>() + rng.random::<f64>() + rng.random::<f64>() - 1.5) * 0.8;
        (truth + noise).round().clamp(1.0, 5.0) as u8
    };
    for s in 0..n_subjects {
        let subject_id = format!("subject_{s:02}");
        for &(image_id, truth) in &rated {
            ratings.push(Rating {
                subject_id: subject_id.clone(),
                image_id: image_id.to_string(),
                presentation_id: "p1".into(),
                score: noisy_score(&mut rng, truth),
            });
        }
        for &(image_id, truth) in rated.iter().take(n_verification) {
            ratings.push(Rating {
                subject_id: subject_id.clone(),
                image_id: image_id.to_string(),
                presentation_id: "p2".into(),
                score: noisy_score(&mut rng, truth),
            });
        }
    }
    RatingTable::new(ratings).expect("synthetic ratings are valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::ManifestEntry;

    #[test]
    fn fixture_is_deterministic_and_bounded() {
        let a = photographic_fixture();
        let b = photographic_fixture();
        assert_eq!(a, b);
        assert_eq!((a.width(), a.height(), a.channels()), (192, 144, 3));
        assert!(a.data().iter().all(|&v| (8..=168).contains(&v)));
    }

    #[test]
    fn scenes_are_seed_deterministic() {
        let (a, boxes_a) = scene(128, 96, 3, 11);
        let (b, boxes_b) = scene(128, 96, 3, 11);
        assert_eq!(a, b);
        assert_eq!(boxes_a, boxes_b);
        assert_eq!(boxes_a.len(), 3);
        let (c, _) = scene(128, 96, 3, 12);
        assert_ne!(a, c);
    }

    #[test]
    fn target_boxes_stay_inside_the_scene() {
        for seed in 0..20 {
            let (_, boxes) = scene(96, 80, 4, seed);
            for b in boxes {
                assert!(b.x + b.w <= 96 && b.y + b.h <= 80);
            }
        }
    }

    #[test]
    fn synthetic_ratings_cover_targets_only() {
        let manifest = DatasetManifest::new(vec![
            ManifestEntry::reference("r0", "r0.png", "g0"),
            ManifestEntry::non_target("n0", "n0.png", "g1"),
        ])
        .unwrap();
        let table = synthetic_ratings(&manifest, 5, 1, 3);
        assert!(table.images().contains("r0"));
        assert!(!table.images().contains("n0"));
        // 5 subjects x (1 primary + 1 verification repeat)
        assert_eq!(table.ratings().len(), 10);
        assert_eq!(table.verification_pairs().len(), 1);
    }

    #[test]
    fn references_outscore_heavy_distortions_on_average() {
        use crate::distortion::DistortionSpec;
        let reference = ManifestEntry::reference("r0", "r0.png", "g0");
        let heavy = ManifestEntry {
            image_id: "d0".into(),
            path: "d0.png".into(),
            content_group_id: "g0".into(),
            is_reference: false,
            is_target: true,
            distortion: Some(DistortionSpec::motion_blur(4, 17, 1)),
            reference_id: Some("r0".into()),
        };
        assert!(nominal_utility(&reference) > nominal_utility(&heavy) + 2.0);
    }
}
