//! Lossless image I/O: 8-bit PNG plus plain-text portable pixmaps (P2/P3)
//! for human-readable fixtures. The format is detected from file content on
//! load and from the extension on save.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use super::ImageBuffer;
use crate::error::{Error, Result};

pub fn load_image(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P3") {
        decode_text_pnm(path, &bytes)
    } else if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        decode_png(path, &bytes)
    } else {
        Err(Error::Decode {
            path: path.to_path_buf(),
            reason: "unsupported format (expected PNG or plain-text P2/P3 pixmap)".into(),
        })
    }
}

pub fn save_image(img: &ImageBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some("pgm") | Some("ppm") | Some("pnm") => save_text_pnm(img, path),
        _ => save_png(img, path),
    }
}

fn decode_png(path: &Path, bytes: &[u8]) -> Result<ImageBuffer> {
    let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png).map_err(
        |e| Error::Decode {
            path: path.to_path_buf(),
            reason: e.to_string(),
        },
    )?;
    match decoded {
        image::DynamicImage::ImageLuma8(img) => {
            let (w, h) = (img.width(), img.height());
            ImageBuffer::new(w, h, 1, img.into_raw())
        }
        image::DynamicImage::ImageRgb8(img) => {
            let (w, h) = (img.width(), img.height());
            ImageBuffer::new(w, h, 3, img.into_raw())
        }
        other => {
            // Alpha or 16-bit sources are flattened to 8-bit RGB.
            let img = other.into_rgb8();
            let (w, h) = (img.width(), img.height());
            ImageBuffer::new(w, h, 3, img.into_raw())
        }
    }
}

fn save_png(img: &ImageBuffer, path: &Path) -> Result<()> {
    let encode_err = |e: image::ImageError| Error::Encode {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    match img.channels() {
        1 => {
            let buf: image::GrayImage =
                image::ImageBuffer::from_raw(img.width(), img.height(), img.data().to_vec())
                    .expect("buffer invariant guarantees the length");
            buf.save_with_format(path, image::ImageFormat::Png)
                .map_err(encode_err)
        }
        _ => {
            let buf: image::RgbImage =
                image::ImageBuffer::from_raw(img.width(), img.height(), img.data().to_vec())
                    .expect("buffer invariant guarantees the length");
            buf.save_with_format(path, image::ImageFormat::Png)
                .map_err(encode_err)
        }
    }
}

fn decode_text_pnm(path: &Path, bytes: &[u8]) -> Result<ImageBuffer> {
    let text = std::str::from_utf8(bytes).map_err(|_| Error::Decode {
        path: path.to_path_buf(),
        reason: "plain-text pixmap is not valid UTF-8".into(),
    })?;
    let bad = |reason: &str| Error::Decode {
        path: path.to_path_buf(),
        reason: reason.into(),
    };

    // Tokenize, dropping '#' comments to end of line.
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split_ascii_whitespace().map(str::to_owned))
        .collect::<Vec<_>>()
        .into_iter();

    let magic = tokens.next().ok_or_else(|| bad("empty file"))?;
    let channels = match magic.as_str() {
        "P2" => 1u8,
        "P3" => 3u8,
        _ => return Err(bad("expected P2 or P3 magic")),
    };
    let mut next_u32 = |what: &str| -> Result<u32> {
        tokens
            .next()
            .ok_or_else(|| bad(&format!("missing {what}")))?
            .parse::<u32>()
            .map_err(|_| bad(&format!("malformed {what}")))
    };
    let width = next_u32("width")?;
    let height = next_u32("height")?;
    let maxval = next_u32("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(bad("maxval must be in 1..=255"));
    }
    let expected = width as usize * height as usize * channels as usize;
    let mut data = Vec::with_capacity(expected);
    for tok in tokens {
        let v: u32 = tok.parse().map_err(|_| bad("malformed sample value"))?;
        if v > maxval {
            return Err(bad("sample exceeds maxval"));
        }
        data.push(v as u8);
    }
    if data.len() != expected {
        return Err(bad(&format!(
            "expected {expected} samples, found {}",
            data.len()
        )));
    }
    ImageBuffer::new(width, height, channels, data)
}

fn save_text_pnm(img: &ImageBuffer, path: &Path) -> Result<()> {
    let magic = if img.channels() == 1 { "P2" } else { "P3" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height());
    for row in img
        .data()
        .chunks(img.width() as usize * img.channels() as usize)
    {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}
