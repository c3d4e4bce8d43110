use std::time::Instant;

use rand::Rng;

use super::pyramid::{build_pyramid, DEFAULT_SCALE_FACTOR};
use crate::image::GrayImage;
use crate::netzoo::{count_macs, forward_dense, NetworkParams, NetworkSpec, ResponseMap};
use crate::tensor::{Shape, Tensor};
use crate::{par, rng, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PyramidConfig {
    pub factor: f64,
    /// Run levels concurrently; results are identical either way.
    pub parallel: bool,
    /// Analyse only the first `n` levels.
    pub max_levels: Option<usize>,
}

impl Default for PyramidConfig {
    fn default() -> Self {
        Self {
            factor: DEFAULT_SCALE_FACTOR,
            parallel: false,
            max_levels: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelDetection {
    pub map: ResponseMap,
    /// `mask[i]` ⇔ `map.scores[i] ≥ threshold`.
    pub mask: Vec<bool>,
}

impl LevelDetection {
    pub fn positives(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn mask_image(&self) -> GrayImage {
        GrayImage {
            width: self.map.width,
            height: self.map.height,
            pixels: self.mask.iter().map(|&m| if m { 255 } else { 0 }).collect(),
        }
    }

    pub fn score_image(&self) -> GrayImage {
        GrayImage {
            width: self.map.width,
            height: self.map.height,
            pixels: self.map.to_gray(),
        }
    }

    /// Original-image rectangles `(x0, y0, x1, y1)` of every positive cell.
    pub fn positive_rects(&self) -> Vec<(f64, f64, f64, f64)> {
        (0..self.mask.len())
            .filter(|&i| self.mask[i])
            .map(|i| self.map.window_rect_original(i % self.map.width, i / self.map.width))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionResult {
    pub threshold: f64,
    pub original: (usize, usize),
    pub levels: Vec<LevelDetection>,
}

impl DetectionResult {
    /// True when some positive cell of level `level` has a window containing `(x, y)`.
    pub fn covers(&self, level: usize, x: f64, y: f64) -> bool {
        self.levels.get(level).is_some_and(|l| {
            l.positive_rects()
                .iter()
                .any(|&(x0, y0, x1, y1)| x0 <= x && x <= x1 && y0 <= y && y <= y1)
        })
    }
}

/// Dense inference over an image pyramid followed by thresholding.
pub fn detect(
    spec: &NetworkSpec,
    params: &NetworkParams,
    image: &GrayImage,
    threshold: f64,
    pyramid: &PyramidConfig,
) -> Result<DetectionResult> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidConfig(format!("threshold must lie in [0, 1], got {threshold}")));
    }
    let mut levels = build_pyramid(image, pyramid.factor, spec.window)?;
    if let Some(n) = pyramid.max_levels {
        levels.truncate(n.max(1));
    }
    let original = (image.width, image.height);
    let run = |i: usize| -> Result<LevelDetection> {
        let level = &levels[i];
        let mut map = forward_dense(spec, params, &level.image)?;
        map.scale = level.effective_scale(original);
        let mask = map.scores.iter().map(|&s| s as f64 >= threshold).collect();
        Ok(LevelDetection { map, mask })
    };
    let out = par::map_range_with(pyramid.parallel, levels.len(), run);
    Ok(DetectionResult {
        threshold,
        original,
        levels: out.into_iter().collect::<Result<_>>()?,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub size: usize,
    pub iterations: usize,
    /// Per-iteration wall-clock seconds.
    pub seconds: Vec<f64>,
    pub median_seconds: f64,
    pub fps: f64,
    pub macs_per_pixel: f64,
    /// `macs_per_pixel × size²`.
    pub total_macs: f64,
}

/// Times single-scale dense inference on a seeded random `size×size` image and
/// reports the median frame rate.
pub fn benchmark_fps(spec: &NetworkSpec, params: &NetworkParams, size: usize, iterations: usize) -> Result<BenchReport> {
    if iterations < 3 {
        return Err(Error::InvalidConfig(format!("benchmark needs at least 3 iterations, got {iterations}")));
    }
    let mut r = rng::stream(0, 0x6265_6e63, size as u64);
    let image = Tensor::from_fn(Shape::new(1, size, size), |_, _, _| r.random_range(-1.0f32..1.0));
    let mut seconds = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let t = Instant::now();
        std::hint::black_box(forward_dense(spec, params, &image)?);
        seconds.push(t.elapsed().as_secs_f64());
    }
    let mut sorted = seconds.clone();
    sorted.sort_by(f64::total_cmp);
    let median_seconds = if iterations % 2 == 1 {
        sorted[iterations / 2]
    } else {
        (sorted[iterations / 2 - 1] + sorted[iterations / 2]) / 2.0
    };
    let macs_per_pixel = count_macs(spec).total;
    Ok(BenchReport {
        size,
        iterations,
        seconds,
        median_seconds,
        fps: 1.0 / median_seconds.max(1e-12),
        macs_per_pixel,
        total_macs: macs_per_pixel * (size * size) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netzoo::{build_net, NetKind};

    fn noisy(w: usize, h: usize) -> GrayImage {
        GrayImage::new(w, h, (0..w * h).map(|i| ((i * 2654435761usize) >> 13) as u8).collect()).unwrap()
    }

    #[test]
    fn extreme_thresholds() {
        let spec = build_net(NetKind::Unigram);
        let params = NetworkParams::he_init(&spec, 3);
        let img = noisy(80, 70);
        let cfg = PyramidConfig::default();
        let all = detect(&spec, &params, &img, 0.0, &cfg).unwrap();
        assert!(all.levels.iter().all(|l| l.mask.iter().all(|&m| m)));
        let none = detect(&spec, &params, &img, 1.0, &cfg).unwrap();
        assert!(none.levels.iter().all(|l| l.positives() == 0));
        assert!(detect(&spec, &params, &img, 1.5, &cfg).is_err());
    }

    #[test]
    fn masks_are_monotone_and_rects_inside() {
        let spec = build_net(NetKind::BigramShared);
        let params = NetworkParams::he_init(&spec, 4);
        let img = noisy(150, 97);
        let cfg = PyramidConfig::default();
        let lo = detect(&spec, &params, &img, 0.3, &cfg).unwrap();
        let hi = detect(&spec, &params, &img, 0.6, &cfg).unwrap();
        for (a, b) in lo.levels.iter().zip(&hi.levels) {
            assert!(a.mask.iter().zip(&b.mask).all(|(&l, &h)| l || !h));
            for (x0, y0, x1, y1) in a.positive_rects() {
                assert!(x0 >= 0.0 && y0 >= 0.0 && x1 <= 150.0 + 1e-9 && y1 <= 97.0 + 1e-9);
            }
        }
    }

    #[test]
    fn parallel_levels_match_sequential() {
        let spec = build_net(NetKind::Unigram);
        let params = NetworkParams::he_init(&spec, 5);
        let img = noisy(100, 100);
        let seq = detect(&spec, &params, &img, 0.5, &PyramidConfig::default()).unwrap();
        let par = detect(&spec, &params, &img, 0.5, &PyramidConfig { parallel: true, ..Default::default() }).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn benchmark_reports_mac_totals() {
        let spec = build_net(NetKind::Unigram);
        let params = NetworkParams::he_init(&spec, 6);
        let r = benchmark_fps(&spec, &params, 64, 3).unwrap();
        assert_eq!(r.total_macs, 6808.0 * 64.0 * 64.0);
        assert_eq!(r.seconds.len(), 3);
        assert!(r.fps > 0.0);
        assert!(benchmark_fps(&spec, &params, 64, 2).is_err());
    }

    #[test]
    fn unigram_mac_total_at_512() {
        assert_eq!(count_macs(&build_net(NetKind::Unigram)).total * 512.0 * 512.0, 1_784_676_352.0);
    }
}
