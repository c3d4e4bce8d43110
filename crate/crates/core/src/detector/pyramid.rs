use crate::image::GrayImage;
use crate::netzoo::Window;
use crate::tensor::{Shape, Tensor};
use crate::{Error, Result};

/// Default ratio between consecutive pyramid levels, `1/√2`.
pub const DEFAULT_SCALE_FACTOR: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Debug, PartialEq)]
pub struct PyramidLevel {
    /// Nominal scale `factorᵏ`.
    pub scale: f64,
    /// Normalized network input of `⌊width·scale⌋ × ⌊height·scale⌋` pixels.
    pub image: Tensor<f32>,
}

impl PyramidLevel {
    /// Scale that maps level coordinates back inside the original image: the
    /// larger of the two per-axis ratios.
    pub fn effective_scale(&self, original: (usize, usize)) -> f64 {
        (self.image.width() as f64 / original.0 as f64).max(self.image.height() as f64 / original.1 as f64)
    }
}

fn scaled(dim: usize, scale: f64) -> usize {
    // The tolerance keeps products such as 64·(1/√2)² at exactly 32.
    (dim as f64 * scale + 1e-9).floor() as usize
}

/// Levels at scales `1, f, f², …` while both scaled dimensions still hold the
/// window. Downsampling is bilinear without pre-filtering.
pub fn build_pyramid(image: &GrayImage, factor: f64, window: Window) -> Result<Vec<PyramidLevel>> {
    if !(factor > 0.0 && factor < 1.0) {
        return Err(Error::InvalidConfig(format!("pyramid scale factor must lie in (0, 1), got {factor}")));
    }
    if image.width < window.width || image.height < window.height {
        return Err(Error::ImageTooSmall {
            image_w: image.width,
            image_h: image.height,
            window_w: window.width,
            window_h: window.height,
        });
    }
    let mut levels = Vec::new();
    for k in 0.. {
        let scale = factor.powi(k);
        let (w, h) = (scaled(image.width, scale), scaled(image.height, scale));
        if w < window.width || h < window.height {
            break;
        }
        let tensor = if k == 0 {
            image.to_tensor()
        } else {
            let (sx, sy) = (image.width as f64 / w as f64, image.height as f64 / h as f64);
            Tensor::from_fn(Shape::new(1, h, w), |_, y, x| {
                let v = image.sample((x as f64 + 0.5) * sx, (y as f64 + 0.5) * sy);
                ((v / 255.0 - 0.5) * 2.0) as f32
            })
        };
        levels.push(PyramidLevel { scale, image: tensor });
    }
    Ok(levels)
}
