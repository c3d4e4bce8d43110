//! 8-bit grayscale images and bilinear resampling.

use crate::tensor::Tensor;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height} image needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Bilinear sample at continuous coordinates where pixel `(x, y)` has its
    /// centre at `(x + 0.5, y + 0.5)`. Coordinates are clamped to the border.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        bilinear(&self.pixels, self.width, self.height, x, y, |v| v as f64)
    }

    /// Network input tensor, `u ↦ (u/255 − 0.5)·2`.
    pub fn to_tensor(&self) -> Tensor<f32> {
        Tensor::from_gray(self.width, self.height, &self.pixels).expect("dimensions checked at construction")
    }

    /// Bilinear resize to `width×height` (no pre-filtering).
    pub fn resize(&self, width: usize, height: usize) -> GrayImage {
        let sx = self.width as f64 / width as f64;
        let sy = self.height as f64 / height as f64;
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            let fy = (y as f64 + 0.5) * sy;
            for x in 0..width {
                let fx = (x as f64 + 0.5) * sx;
                pixels.push(quantize(self.sample(fx, fy)));
            }
        }
        GrayImage { width, height, pixels }
    }

    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<GrayImage> {
        if x0 + width > self.width || y0 + height > self.height {
            return Err(Error::DimensionMismatch(format!(
                "crop {width}x{height} at ({x0}, {y0}) exceeds {}x{} image",
                self.width, self.height
            )));
        }
        let mut pixels = Vec::with_capacity(width * height);
        for y in y0..y0 + height {
            pixels.extend_from_slice(&self.pixels[y * self.width + x0..y * self.width + x0 + width]);
        }
        Ok(GrayImage { width, height, pixels })
    }
}

/// Bilinear interpolation over a row-major grid with pixel centres at `i + 0.5`.
pub fn bilinear<T: Copy>(data: &[T], width: usize, height: usize, x: f64, y: f64, to_f64: impl Fn(T) -> f64) -> f64 {
    let fx = (x - 0.5).clamp(0.0, (width - 1) as f64);
    let fy = (y - 0.5).clamp(0.0, (height - 1) as f64);
    let x0 = fx.floor() as usize;
    let y0 = fy.floor() as usize;
    let x1 = (x0 + 1).min(width - 1);
    let y1 = (y0 + 1).min(height - 1);
    let tx = fx - x0 as f64;
    let ty = fy - y0 as f64;
    let at = |xx: usize, yy: usize| to_f64(data[yy * width + xx]);
    let top = at(x0, y0) * (1.0 - tx) + at(x1, y0) * tx;
    let bottom = at(x0, y1) * (1.0 - tx) + at(x1, y1) * tx;
    top * (1.0 - ty) + bottom * ty
}

/// Rounds half away from zero and clamps to `[0, 255]`.
#[inline]
pub fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}
