//! Procedural backgrounds and stroke clutter.

use std::f64::consts::PI;

use rand::Rng;

use super::font::Stroke;
use crate::image::GrayImage;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackgroundKind {
    /// Smooth value noise at a random cell size.
    NoiseField,
    /// Linear ramp in a random direction.
    Gradient,
    /// Sinusoidal stripes with random period and orientation.
    Stripes,
    /// Sum of Gaussian bumps and dips.
    Blobs,
}

impl BackgroundKind {
    pub const ALL: [BackgroundKind; 4] = [
        BackgroundKind::NoiseField,
        BackgroundKind::Gradient,
        BackgroundKind::Stripes,
        BackgroundKind::Blobs,
    ];
}

fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// Grey levels (unclamped, nominally `[0, 255]`) of a `width×height` background
/// with mean level `level` and texture amplitude `amplitude`.
pub fn render_background<R: Rng + ?Sized>(
    kind: BackgroundKind,
    width: usize,
    height: usize,
    level: f64,
    amplitude: f64,
    rng: &mut R,
) -> Vec<f64> {
    let mut out = vec![level; width * height];
    match kind {
        BackgroundKind::NoiseField => {
            let cell = rng.random_range(3.0..14.0);
            let gw = (width as f64 / cell).ceil() as usize + 2;
            let gh = (height as f64 / cell).ceil() as usize + 2;
            let grid: Vec<f64> = (0..gw * gh).map(|_| rng.random_range(-1.0..1.0)).collect();
            for y in 0..height {
                for x in 0..width {
                    let fx = (x as f64 + 0.5) / cell;
                    let fy = (y as f64 + 0.5) / cell;
                    let (ix, iy) = (fx.floor() as usize, fy.floor() as usize);
                    let (tx, ty) = (smooth(fx.fract()), smooth(fy.fract()));
                    let g = |i: usize, j: usize| grid[j * gw + i];
                    let top = g(ix, iy) * (1.0 - tx) + g(ix + 1, iy) * tx;
                    let bot = g(ix, iy + 1) * (1.0 - tx) + g(ix + 1, iy + 1) * tx;
                    out[y * width + x] += amplitude * (top * (1.0 - ty) + bot * ty);
                }
            }
        }
        BackgroundKind::Gradient => {
            let theta = rng.random_range(0.0..2.0 * PI);
            let (s, c) = theta.sin_cos();
            let half = width.max(height) as f64 / 2.0;
            for y in 0..height {
                for x in 0..width {
                    let t = ((x as f64 - width as f64 / 2.0) * c + (y as f64 - height as f64 / 2.0) * s) / half;
                    out[y * width + x] += amplitude * t;
                }
            }
        }
        BackgroundKind::Stripes => {
            let period = rng.random_range(3.0..16.0);
            let theta = rng.random_range(0.0..PI);
            let phase = rng.random_range(0.0..2.0 * PI);
            let (s, c) = theta.sin_cos();
            for y in 0..height {
                for x in 0..width {
                    let t = x as f64 * c + y as f64 * s;
                    out[y * width + x] += amplitude * (2.0 * PI * t / period + phase).sin();
                }
            }
        }
        BackgroundKind::Blobs => {
            let n = rng.random_range(2..=7);
            for _ in 0..n {
                let cx = rng.random_range(0.0..width as f64);
                let cy = rng.random_range(0.0..height as f64);
                let r = rng.random_range(2.0..10.0);
                let a = amplitude * if rng.random_bool(0.5) { 1.0 } else { -1.0 } * rng.random_range(0.5..1.0);
                for y in 0..height {
                    for x in 0..width {
                        let d2 = (x as f64 + 0.5 - cx).powi(2) + (y as f64 + 0.5 - cy).powi(2);
                        out[y * width + x] += a * (-d2 / (2.0 * r * r)).exp();
                    }
                }
            }
        }
    }
    out
}

/// A random crop of a user-supplied image, upscaled first if it is smaller than
/// the requested size.
pub fn image_background<R: Rng + ?Sized>(img: &GrayImage, width: usize, height: usize, rng: &mut R) -> Vec<f64> {
    let img = if img.width < width || img.height < height {
        let s = (width as f64 / img.width as f64).max(height as f64 / img.height as f64);
        img.resize((img.width as f64 * s).ceil() as usize, (img.height as f64 * s).ceil() as usize)
    } else {
        img.clone()
    };
    let x0 = rng.random_range(0..=img.width - width);
    let y0 = rng.random_range(0..=img.height - height);
    let mut out = Vec::with_capacity(width * height);
    for y in y0..y0 + height {
        out.extend(img.pixels[y * img.width + x0..y * img.width + x0 + width].iter().map(|&v| v as f64));
    }
    out
}

/// Short random strokes (segments, hooks and arcs) scattered over the region
/// `[x0, x1) × [y0, y1)`: fine detail that locally resembles pieces of letters.
pub fn clutter_strokes<R: Rng + ?Sized>(x0: f64, y0: f64, x1: f64, y1: f64, count: usize, rng: &mut R) -> Vec<Stroke> {
    (0..count)
        .map(|_| {
            let cx = rng.random_range(x0..x1);
            let cy = rng.random_range(y0..y1);
            let len = rng.random_range(4.0..14.0);
            let dir = rng.random_range(0.0..2.0 * PI);
            match rng.random_range(0..3) {
                0 => vec![
                    (cx - 0.5 * len * dir.cos(), cy - 0.5 * len * dir.sin()),
                    (cx + 0.5 * len * dir.cos(), cy + 0.5 * len * dir.sin()),
                ],
                1 => {
                    let bend = dir + rng.random_range(0.6..2.2) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    let mid = (cx + 0.5 * len * dir.cos(), cy + 0.5 * len * dir.sin());
                    vec![
                        (cx, cy),
                        mid,
                        (mid.0 + 0.5 * len * bend.cos(), mid.1 + 0.5 * len * bend.sin()),
                    ]
                }
                _ => {
                    let r = len / 2.0;
                    let a0 = dir;
                    let sweep = rng.random_range(1.2..4.5);
                    (0..=12)
                        .map(|i| {
                            let a = a0 + sweep * i as f64 / 12.0;
                            (cx + r * a.cos(), cy + r * a.sin())
                        })
                        .collect()
                }
            }
        })
        .collect()
}
