//! Image representation and color conversions.
//!
//! Pixels are stored as 8-bit integers; all metric and distortion math runs
//! on unit-interval `f64` values and re-quantizes with round-half-up on the
//! way back. Buffers are immutable after construction and safe to share
//! across batch workers.

mod color;
mod io;

pub use color::{rgb_to_cielab, saturation_plane, LabPixelPlane};
pub use io::{load_image, save_image};

use crate::error::{Error, Result};

/// Decoded raster image: interleaved row-major samples, 1 (gray) or 3 (RGB)
/// channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: u32,
    height: u32,
    channels: u8,
    data: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: u32, height: u32, channels: u8, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "image dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::invalid(format!(
                "channel count must be 1 or 3, got {channels}"
            )));
        }
        let expected = width as usize * height as usize * channels as usize;
        if data.len() != expected {
            return Err(Error::invalid(format!(
                "data length {} does not match {width}x{height}x{channels} = {expected}",
                data.len()
            )));
        }
        Ok(ImageBuffer {
            width,
            height,
            channels,
            data,
        })
    }

    /// Builds a buffer by evaluating `f(x, y) -> [r, g, b]` at every pixel.
    pub fn from_fn_rgb(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        ImageBuffer::new(width, height, 3, data).expect("dimensions are consistent")
    }

    pub fn constant(width: u32, height: u32, channels: u8, value: u8) -> Result<Self> {
        let len = width as usize * height as usize * channels as usize;
        ImageBuffer::new(width, height, channels, vec![value; len])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    #[inline]
    pub fn sample(&self, x: u32, y: u32, channel: u8) -> u8 {
        debug_assert!(x < self.width && y < self.height && channel < self.channels);
        let idx = (y as usize * self.width as usize + x as usize) * self.channels as usize
            + channel as usize;
        self.data[idx]
    }

    /// Sample as a unit-interval real.
    #[inline]
    pub fn sample_real(&self, x: u32, y: u32, channel: u8) -> f64 {
        self.sample(x, y, channel) as f64 / 255.0
    }

    pub fn same_shape(&self, other: &ImageBuffer) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    /// One channel as a unit-interval plane, row-major.
    pub fn channel_plane(&self, channel: u8) -> Vec<f64> {
        assert!(channel < self.channels);
        self.data
            .iter()
            .skip(channel as usize)
            .step_by(self.channels as usize)
            .map(|&v| v as f64 / 255.0)
            .collect()
    }

    /// BT.601 luma. Three-channel input collapses with weights
    /// 0.299/0.587/0.114; single-channel input is returned unchanged.
    pub fn to_grayscale(&self) -> ImageBuffer {
        if self.channels == 1 {
            return self.clone();
        }
        let mut data = Vec::with_capacity(self.pixel_count());
        for px in self.data.chunks_exact(3) {
            let y = 0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64;
            data.push(quantize_255(y));
        }
        ImageBuffer {
            width: self.width,
            height: self.height,
            channels: 1,
            data,
        }
    }

    /// Grayscale plane on the 0..255 scale as `f64`, collapsing RGB with the
    /// BT.601 weights without intermediate quantization.
    pub fn luma_plane_255(&self) -> Vec<f64> {
        match self.channels {
            1 => self.data.iter().map(|&v| v as f64).collect(),
            _ => self
                .data
                .chunks_exact(3)
                .map(|px| 0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64)
                .collect(),
        }
    }
}

/// Round-half-up quantization from a 0..255-scale real to a byte.
#[inline]
pub fn quantize_255(value: f64) -> u8 {
    value.round().clamp(0.0, 255.0) as u8
}

/// Round-half-up quantization from a unit-interval real to a byte.
#[inline]
pub fn quantize_unit(value: f64) -> u8 {
    quantize_255(value * 255.0)
}
