//! Synthesis of the six underwater distortion families at parameterized
//! levels. Every distortion is deterministic given `(image, spec)`: the
//! stochastic kinds draw from a ChaCha stream seeded by the spec.

mod apply;
mod generate;
mod mask;

pub use apply::apply_distortion;
pub use generate::{generate_distorted_set, DistortConfig};
pub use mask::{region_mask_from_boxes, BoxRect, RegionMask};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The six distortion families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistortionKind {
    /// Wavelength-dependent per-channel attenuation (red absorbed most).
    Channel,
    /// Linear scaling toward the per-channel mean.
    Contrast,
    /// Global brightness gain, dim or glaring.
    Illumination,
    /// Seeded-angle line-kernel motion blur.
    MotionBlur,
    /// Blur + contrast loss restricted to the foreground or background.
    Region,
    /// Additive bright particulate speckle ("marine snow").
    OceanSnow,
}

impl DistortionKind {
    pub const ALL: [DistortionKind; 6] = [
        DistortionKind::Channel,
        DistortionKind::Contrast,
        DistortionKind::Illumination,
        DistortionKind::MotionBlur,
        DistortionKind::Region,
        DistortionKind::OceanSnow,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DistortionKind::Channel => "channel",
            DistortionKind::Contrast => "contrast",
            DistortionKind::Illumination => "illumination",
            DistortionKind::MotionBlur => "motion_blur",
            DistortionKind::Region => "region",
            DistortionKind::OceanSnow => "ocean_snow",
        }
    }

    fn index(&self) -> u64 {
        Self::ALL.iter().position(|k| k == self).unwrap() as u64
    }

    /// Kinds whose output depends on the spec seed.
    pub fn is_stochastic(&self) -> bool {
        matches!(self, DistortionKind::MotionBlur | DistortionKind::OceanSnow)
    }

    /// Number of parameters expected in `DistortionSpec::params`.
    fn arity(&self) -> usize {
        match self {
            DistortionKind::Channel => 3,
            DistortionKind::Region => 2,
            _ => 1,
        }
    }
}

impl std::str::FromStr for DistortionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DistortionKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown distortion kind '{s}'")))
    }
}

/// Which side of the region mask a `Region` distortion degrades.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionTarget {
    Foreground,
    Background,
}

/// Compact region descriptor stored in manifests; the per-pixel mask is
/// materialized from it with [`region_mask_from_boxes`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub boxes: Vec<BoxRect>,
    pub feather: u32,
}

/// A fully specified distortion instance.
///
/// `params` is positional and kind-specific:
/// - `channel`: `[gain_r, gain_g, gain_b]`
/// - `contrast`: `[factor]` with `out = mean + factor * (in - mean)`
/// - `illumination`: `[gain]`
/// - `motion_blur`: `[kernel_length]` (odd, >= 1)
/// - `region`: `[strength, target]` with target 0 = foreground, 1 = background
/// - `ocean_snow`: `[disks_per_megapixel]`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionSpec {
    pub kind: DistortionKind,
    pub level: u32,
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl DistortionSpec {
    pub fn channel(level: u32, gains: [f64; 3]) -> Self {
        DistortionSpec {
            kind: DistortionKind::Channel,
            level,
            params: gains.to_vec(),
            region: None,
            seed: None,
        }
    }

    pub fn contrast(level: u32, factor: f64) -> Self {
        DistortionSpec {
            kind: DistortionKind::Contrast,
            level,
            params: vec![factor],
            region: None,
            seed: None,
        }
    }

    pub fn illumination(level: u32, gain: f64) -> Self {
        DistortionSpec {
            kind: DistortionKind::Illumination,
            level,
            params: vec![gain],
            region: None,
            seed: None,
        }
    }

    pub fn motion_blur(level: u32, length: u32, seed: u64) -> Self {
        DistortionSpec {
            kind: DistortionKind::MotionBlur,
            level,
            params: vec![length as f64],
            region: None,
            seed: Some(seed),
        }
    }

    pub fn region(level: u32, strength: f64, target: RegionTarget, region: RegionSpec) -> Self {
        DistortionSpec {
            kind: DistortionKind::Region,
            level,
            params: vec![
                strength,
                match target {
                    RegionTarget::Foreground => 0.0,
                    RegionTarget::Background => 1.0,
                },
            ],
            region: Some(region),
            seed: None,
        }
    }

    pub fn ocean_snow(level: u32, disks_per_megapixel: f64, seed: u64) -> Self {
        DistortionSpec {
            kind: DistortionKind::OceanSnow,
            level,
            params: vec![disks_per_megapixel],
            region: None,
            seed: Some(seed),
        }
    }

    pub fn region_target(&self) -> Option<RegionTarget> {
        if self.kind != DistortionKind::Region {
            return None;
        }
        Some(if self.params.get(1).copied().unwrap_or(0.0) < 0.5 {
            RegionTarget::Foreground
        } else {
            RegionTarget::Background
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.level < 1 {
            return Err(Error::invalid("distortion level is 1-based"));
        }
        if self.params.len() != self.kind.arity() {
            return Err(Error::invalid(format!(
                "{} expects {} parameter(s), got {}",
                self.kind.name(),
                self.kind.arity(),
                self.params.len()
            )));
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("distortion parameters must be finite"));
        }
        match self.kind {
            DistortionKind::Region => {
                if self.region.is_none() {
                    return Err(Error::invalid(
                        "region distortion requires a region mask spec",
                    ));
                }
            }
            _ => {
                if self.region.is_some() {
                    return Err(Error::invalid(format!(
                        "{} does not take a region",
                        self.kind.name()
                    )));
                }
            }
        }
        if self.kind.is_stochastic() && self.seed.is_none() {
            return Err(Error::invalid(format!(
                "{} requires a seed",
                self.kind.name()
            )));
        }
        if self.kind == DistortionKind::MotionBlur {
            let len = self.params[0];
            if len < 1.0 || len.fract() != 0.0 || (len as u64) % 2 == 0 {
                return Err(Error::invalid("motion blur length must be odd and >= 1"));
            }
        }
        Ok(())
    }
}

/// Per-entry seed derivation: FNV-1a over the master seed, image id, kind
/// and level, finished with one SplitMix64 step. Stable across platforms
/// and independent of generation order, so entries may be produced
/// concurrently.
pub fn derive_seed(master_seed: u64, image_id: &str, kind: DistortionKind, level: u32) -> u64 {
    const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = FNV_OFFSET;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h = (h ^ b as u64).wrapping_mul(FNV_PRIME);
        }
    };
    eat(&master_seed.to_le_bytes());
    eat(image_id.as_bytes());
    eat(&[0xFF]); // separator so ("ab", 1) != ("a", ...) collisions stay unlikely
    eat(&kind.index().to_le_bytes());
    eat(&level.to_le_bytes());
    splitmix64(h)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
