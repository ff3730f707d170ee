//! Row-major 8-bit raster shared by every pipeline stage.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Pixel layout of a raster. Matches the `format` strings used on the
/// detector wire protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PixelFormat {
    Gray8,
    Rgb8,
}

impl PixelFormat {
    pub fn channels(self) -> usize {
        match self {
            PixelFormat::Gray8 => 1,
            PixelFormat::Rgb8 => 3,
        }
    }
}

impl std::fmt::Display for PixelFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PixelFormat::Gray8 => f.write_str("gray8"),
            PixelFormat::Rgb8 => f.write_str("rgb8"),
        }
    }
}

/// Cropping a region with no pixels in common with the source image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("crop region is empty or lies outside the image")]
pub struct InvalidCrop;

/// An owned image. `pixels` is row-major, `width * height * channels`
/// bytes; both dimensions are always at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    format: PixelFormat,
    pixels: Vec<u8>,
}

impl Image {
    /// Wraps a pixel buffer. Panics if the buffer length does not match
    /// the geometry or a dimension is zero; callers decoding untrusted
    /// input validate first.
    pub fn new(width: usize, height: usize, format: PixelFormat, pixels: Vec<u8>) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        assert_eq!(
            pixels.len(),
            width * height * format.channels(),
            "pixel buffer length does not match geometry"
        );
        Self { width, height, format, pixels }
    }

    pub fn filled(width: usize, height: usize, format: PixelFormat, value: u8) -> Self {
        Self::new(width, height, format, vec![value; width * height * format.channels()])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn format(&self) -> PixelFormat {
        self.format
    }

    pub fn channels(&self) -> usize {
        self.format.channels()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    /// Byte slice of row `y`.
    pub fn row(&self, y: usize) -> &[u8] {
        let stride = self.width * self.channels();
        &self.pixels[y * stride..(y + 1) * stride]
    }

    /// Gray value at `(x, y)`; rgb8 pixels are reduced by [`luma`].
    pub fn gray_at(&self, x: usize, y: usize) -> u8 {
        let c = self.channels();
        let at = (y * self.width + x) * c;
        match self.format {
            PixelFormat::Gray8 => self.pixels[at],
            PixelFormat::Rgb8 => luma(self.pixels[at], self.pixels[at + 1], self.pixels[at + 2]),
        }
    }

    /// Luma-converted copy; gray8 images are cloned unchanged.
    pub fn to_gray(&self) -> Image {
        match self.format {
            PixelFormat::Gray8 => self.clone(),
            PixelFormat::Rgb8 => {
                let gray: Vec<u8> = self
                    .pixels
                    .chunks_exact(3)
                    .map(|p| luma(p[0], p[1], p[2]))
                    .collect();
                Image::new(self.width, self.height, PixelFormat::Gray8, gray)
            }
        }
    }

    /// Channel-replicated rgb8 copy; rgb8 images are cloned unchanged.
    pub fn to_rgb8(&self) -> Image {
        match self.format {
            PixelFormat::Rgb8 => self.clone(),
            PixelFormat::Gray8 => {
                let mut rgb = Vec::with_capacity(self.pixels.len() * 3);
                for &v in &self.pixels {
                    rgb.extend_from_slice(&[v, v, v]);
                }
                Image::new(self.width, self.height, PixelFormat::Rgb8, rgb)
            }
        }
    }

    /// Copies the rectangle `[x0, x1) x [y0, y1)` clipped to the image
    /// bounds. Fails when the clipped region is empty.
    pub fn crop_clipped(
        &self,
        x0: usize,
        y0: usize,
        x1: usize,
        y1: usize,
    ) -> Result<Image, InvalidCrop> {
        let cx1 = x1.min(self.width);
        let cy1 = y1.min(self.height);
        if x0 >= cx1 || y0 >= cy1 {
            return Err(InvalidCrop);
        }
        let c = self.channels();
        let mut out = Vec::with_capacity((cx1 - x0) * (cy1 - y0) * c);
        for y in y0..cy1 {
            let row = self.row(y);
            out.extend_from_slice(&row[x0 * c..cx1 * c]);
        }
        Ok(Image::new(cx1 - x0, cy1 - y0, self.format, out))
    }

    /// Fills the rectangle `[x0, x1) x [y0, y1)`, clipped to bounds.
    /// `color` must have one byte per channel.
    pub fn fill_rect(&mut self, x0: usize, y0: usize, x1: usize, y1: usize, color: &[u8]) {
        let c = self.channels();
        assert_eq!(color.len(), c, "color length must match channel count");
        let x1 = x1.min(self.width);
        let y1 = y1.min(self.height);
        let stride = self.width * c;
        for y in y0..y1 {
            for x in x0..x1 {
                let at = y * stride + x * c;
                self.pixels[at..at + c].copy_from_slice(color);
            }
        }
    }

    /// One-pixel rectangle outline, clipped to bounds.
    pub fn draw_rect(&mut self, x0: usize, y0: usize, x1: usize, y1: usize, color: &[u8]) {
        if x0 >= x1 || y0 >= y1 {
            return;
        }
        self.fill_rect(x0, y0, x1, y0 + 1, color);
        self.fill_rect(x0, y1.saturating_sub(1).max(y0), x1, y1, color);
        self.fill_rect(x0, y0, x0 + 1, y1, color);
        self.fill_rect(x1.saturating_sub(1).max(x0), y0, x1, y1, color);
    }

    pub(crate) fn put_gray(&mut self, x: usize, y: usize, value: u8) {
        debug_assert_eq!(self.format, PixelFormat::Gray8);
        self.pixels[y * self.width + x] = value;
    }

    pub(crate) fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }
}

/// Integer ITU-R BT.601 luma: `round(0.299 R + 0.587 G + 0.114 B)`.
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luma_matches_float_reference() {
        for &(r, g, b) in &[(0, 0, 0), (255, 255, 255), (255, 0, 0), (12, 200, 77), (1, 2, 3)] {
            let want = (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64).round() as u8;
            assert_eq!(luma(r, g, b), want, "rgb ({r},{g},{b})");
        }
        // gray stays put under channel replication
        for v in 0..=255u8 {
            assert_eq!(luma(v, v, v), v);
        }
    }

    #[test]
    fn crop_clips_to_bounds() {
        let mut img = Image::filled(20, 20, PixelFormat::Gray8, 7);
        img.fill_rect(2, 2, 10, 6, &[200]);
        let crop = img.crop_clipped(2, 2, 10, 6).unwrap();
        assert_eq!((crop.width(), crop.height()), (8, 4));
        assert!(crop.pixels().iter().all(|&p| p == 200));

        let clipped = img.crop_clipped(15, 15, 40, 40).unwrap();
        assert_eq!((clipped.width(), clipped.height()), (5, 5));

        assert_eq!(img.crop_clipped(5, 5, 5, 9), Err(InvalidCrop));
        assert_eq!(img.crop_clipped(25, 0, 30, 5), Err(InvalidCrop));
    }

    #[test]
    fn gray_rgb_round_trip() {
        let img = Image::new(2, 1, PixelFormat::Gray8, vec![10, 250]);
        let rgb = img.to_rgb8();
        assert_eq!(rgb.pixels(), &[10, 10, 10, 250, 250, 250]);
        assert_eq!(rgb.to_gray(), img);
    }
}
