//! Region masks for foreground/background distortion, built from
//! axis-aligned boxes with an optional linear feather band.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned pixel rectangle; `x, y` is the top-left corner, the box
/// covers `w * h` pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxRect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl BoxRect {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        BoxRect { x, y, w, h }
    }
}

/// Per-pixel foreground weights in `[0, 1]`; 1 means foreground.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMask {
    width: u32,
    height: u32,
    weights: Vec<f64>,
}

impl RegionMask {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, x: u32, y: u32) -> f64 {
        self.weights[y as usize * self.width as usize + x as usize]
    }
}

/// Weight 1 strictly inside the box union, 0 beyond `feather` pixels from
/// it, and a linear ramp across the feather band (Euclidean distance to the
/// nearest covered pixel).
pub fn region_mask_from_boxes(
    boxes: &[BoxRect],
    width: u32,
    height: u32,
    feather: u32,
) -> Result<RegionMask> {
    if width == 0 || height == 0 {
        return Err(Error::invalid("mask dimensions must be at least 1x1"));
    }
    for b in boxes {
        if b.w == 0 || b.h == 0 {
            return Err(Error::invalid("box width and height must be at least 1"));
        }
        if b.x.checked_add(b.w).map_or(true, |r| r > width)
            || b.y.checked_add(b.h).map_or(true, |r| r > height)
        {
            return Err(Error::invalid(format!(
                "box ({}, {}, {}, {}) exceeds {width}x{height} image",
                b.x, b.y, b.w, b.h
            )));
        }
    }

    let mut weights = vec![0.0f64; width as usize * height as usize];
    if boxes.is_empty() {
        return Ok(RegionMask {
            width,
            height,
            weights,
        });
    }
    let feather_f = feather as f64;
    for py in 0..height {
        for px in 0..width {
            let mut best = f64::INFINITY;
            for b in boxes {
                let dx = if px < b.x {
                    (b.x - px) as f64
                } else if px > b.x + b.w - 1 {
                    (px - (b.x + b.w - 1)) as f64
                } else {
                    0.0
                };
                let dy = if py < b.y {
                    (b.y - py) as f64
                } else if py > b.y + b.h - 1 {
                    (py - (b.y + b.h - 1)) as f64
                } else {
                    0.0
                };
                let d = (dx * dx + dy * dy).sqrt();
                if d < best {
                    best = d;
                }
                if best == 0.0 {
                    break;
                }
            }
            let w = if best == 0.0 {
                1.0
            } else if feather > 0 && best < feather_f {
                1.0 - best / feather_f
            } else {
                0.0
            };
            weights[py as usize * width as usize + px as usize] = w;
        }
    }
    Ok(RegionMask {
        width,
        height,
        weights,
    })
}
