//! Patch synthesis: distorted glyphs and bigrams composited onto procedural
//! backgrounds, plus hard negatives.

use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::background::{clutter_strokes, image_background, render_background, BackgroundKind};
use super::dataset::{Label, Sample};
use super::font::{extents, layout, render_strokes, Point, Stroke, CHARSET, LETTER_GAP};
use super::warp::Homography;
use crate::image::{quantize, GrayImage};
use crate::rng::{self, derive_seed};
use crate::{par, Error, Result};

const MAX_ATTEMPTS: usize = 100;
const STREAM_LABELS: u64 = 0x6c61_6265;
const STREAM_SAMPLE: u64 = 0x7361_6d70;

/// Positive geometry thresholds.
pub const MIN_INSIDE: f64 = 0.8;
pub const MIN_HEIGHT: f64 = 0.6;
/// Every glyph of a positive must itself be at least this much inside the window.
pub const MIN_GLYPH_INSIDE: f64 = 0.5;
/// Fragment glyphs are at most this much inside the window.
pub const MAX_FRAGMENT_INSIDE: f64 = 0.4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DataKind {
    Unigram,
    Bigram,
}

impl DataKind {
    /// Patch `(width, height)`.
    pub fn window(self) -> (usize, usize) {
        match self {
            DataKind::Unigram => (32, 32),
            DataKind::Bigram => (64, 32),
        }
    }

    pub fn glyphs(self) -> usize {
        match self {
            DataKind::Unigram => 1,
            DataKind::Bigram => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DataKind::Unigram => "unigram",
            DataKind::Bigram => "bigram",
        }
    }
}

impl FromStr for DataKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unigram" => Ok(DataKind::Unigram),
            "bigram" => Ok(DataKind::Bigram),
            other => Err(Error::InvalidConfig(format!("unknown data kind {other:?} (expected unigram or bigram)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub kind: DataKind,
    pub count: usize,
    pub positive_fraction: f64,
    pub seed: u64,
    /// Rotation drawn uniformly from `±rotation_deg`.
    pub rotation_deg: f64,
    /// Corner jitter as a fraction of the window size.
    pub perspective: f64,
    /// Text contrast range, fractions of the available grey-level headroom.
    pub contrast: (f64, f64),
    /// Additive Gaussian noise, grey levels.
    pub noise_sigma: f64,
    /// Procedural texture amplitude range, grey levels.
    pub texture_amplitude: (f64, f64),
    /// Probability of stroke clutter behind positives and pure backgrounds.
    pub clutter_prob: f64,
    /// Optional natural images used as backgrounds half of the time.
    pub backgrounds: Arc<Vec<GrayImage>>,
}

impl GenConfig {
    pub fn new(kind: DataKind, count: usize, seed: u64) -> Self {
        Self {
            kind,
            count,
            positive_fraction: 0.5,
            seed,
            rotation_deg: 15.0,
            perspective: 0.08,
            contrast: (0.3, 1.0),
            noise_sigma: 8.0,
            texture_amplitude: (5.0, 60.0),
            clutter_prob: 0.3,
            backgrounds: Arc::new(Vec::new()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.count == 0 {
            return bad("count must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.positive_fraction) {
            return bad(format!("positive fraction must lie in [0, 1], got {}", self.positive_fraction));
        }
        if !(0.0..=90.0).contains(&self.rotation_deg) {
            return bad(format!("rotation range must lie in [0, 90] degrees, got {}", self.rotation_deg));
        }
        if !(0.0..=0.25).contains(&self.perspective) {
            return bad(format!("perspective magnitude must lie in [0, 0.25], got {}", self.perspective));
        }
        let (c0, c1) = self.contrast;
        if !(0.0 < c0 && c0 <= c1 && c1 <= 1.0) {
            return bad(format!("contrast range must satisfy 0 < lo <= hi <= 1, got ({c0}, {c1})"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise sigma must be non-negative, got {}", self.noise_sigma));
        }
        let (t0, t1) = self.texture_amplitude;
        if !(0.0 <= t0 && t0 <= t1 && t1.is_finite()) {
            return bad(format!("texture amplitude range must satisfy 0 <= lo <= hi, got ({t0}, {t1})"));
        }
        if !(0.0..=1.0).contains(&self.clutter_prob) {
            return bad(format!("clutter probability must lie in [0, 1], got {}", self.clutter_prob));
        }
        let (w, h) = self.kind.window();
        if let Some(img) = self.backgrounds.iter().find(|b| b.width == 0 || b.height == 0) {
            return bad(format!("background image {}x{} is empty (window {w}x{h})", img.width, img.height));
        }
        Ok(())
    }

    /// Number of positives in a generated dataset, `⌈count × positive_fraction⌉`.
    pub fn positive_count(&self) -> usize {
        ((self.count as f64 * self.positive_fraction).ceil() as usize).min(self.count)
    }

    /// True when backgrounds are flat and no noise or clutter is added.
    pub fn is_constant_background(&self) -> bool {
        self.texture_amplitude.1 == 0.0 && self.noise_sigma == 0.0 && self.clutter_prob == 0.0 && self.backgrounds.is_empty()
    }
}

/// Axis-aligned box `[x0, x1] × [y0, y1]` in window pixels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl BBox {
    fn of_points(points: impl IntoIterator<Item = Point>, pad: f64) -> BBox {
        let mut b = BBox {
            x0: f64::INFINITY,
            y0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y1: f64::NEG_INFINITY,
        };
        for (x, y) in points {
            b.x0 = b.x0.min(x - pad);
            b.y0 = b.y0.min(y - pad);
            b.x1 = b.x1.max(x + pad);
            b.y1 = b.y1.max(y + pad);
        }
        b
    }

    pub fn union(&self, o: &BBox) -> BBox {
        BBox {
            x0: self.x0.min(o.x0),
            y0: self.y0.min(o.y0),
            x1: self.x1.max(o.x1),
            y1: self.y1.max(o.y1),
        }
    }

    pub fn width(&self) -> f64 {
        (self.x1 - self.x0).max(0.0)
    }

    pub fn height(&self) -> f64 {
        (self.y1 - self.y0).max(0.0)
    }

    pub fn center(&self) -> Point {
        ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    /// Fraction of the box area inside `[0, w] × [0, h]`.
    pub fn inside_fraction(&self, w: f64, h: f64) -> f64 {
        let area = self.width() * self.height();
        if area <= 0.0 {
            return 0.0;
        }
        let iw = (self.x1.min(w) - self.x0.max(0.0)).max(0.0);
        let ih = (self.y1.min(h) - self.y0.max(0.0)).max(0.0);
        iw * ih / area
    }

    /// Height of the part of the box inside the window, as a fraction of `h`.
    pub fn height_fraction(&self, h: f64) -> f64 {
        (self.y1.min(h) - self.y0.max(0.0)).max(0.0) / h
    }
}

/// Which generator produced a sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SampleClass {
    Positive,
    Background,
    Fragments,
    SingleGlyph,
}

/// Ground truth retained during synthesis.
#[derive(Clone, Debug, PartialEq)]
pub struct GenMeta {
    pub class: SampleClass,
    pub text: String,
    /// Per-glyph ink boxes (stroke thickness included), window pixels.
    pub glyph_boxes: Vec<BBox>,
    pub window: (usize, usize),
}

impl GenMeta {
    pub fn union_box(&self) -> Option<BBox> {
        self.glyph_boxes.iter().copied().reduce(|a, b| a.union(&b))
    }

    /// The positive label rule: exactly the kind's glyph count, union box at
    /// least 80% inside and at least 60% of the window height, and each glyph
    /// at least half inside.
    pub fn satisfies_positive(&self, kind: DataKind) -> bool {
        let (w, h) = (self.window.0 as f64, self.window.1 as f64);
        let Some(u) = self.union_box() else {
            return false;
        };
        self.glyph_boxes.len() == kind.glyphs()
            && u.inside_fraction(w, h) >= MIN_INSIDE
            && u.height_fraction(h) >= MIN_HEIGHT
            && self.glyph_boxes.iter().all(|b| b.inside_fraction(w, h) >= MIN_GLYPH_INSIDE)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub sample: Sample,
    pub meta: GenMeta,
}

/// Text rendered upright, ready to be warped into a canvas.
struct TextLayer {
    raster: Vec<f32>,
    rw: usize,
    rh: usize,
    /// Upright raster pixels → canvas pixels.
    to_canvas: Homography,
    /// Per-glyph strokes in upright raster pixels.
    glyph_strokes: Vec<Vec<Stroke>>,
    thickness: f64,
}

impl TextLayer {
    /// Lays out `text` at `scale` px per font unit and rotation `theta`, centred at
    /// the canvas origin; `place` then positions it.
    fn new(text: &str, scale: f64, thickness: f64, theta: f64) -> Result<TextLayer> {
        let glyphs = layout(text, LETTER_GAP)?;
        let all: Vec<Stroke> = glyphs.iter().flatten().cloned().collect();
        let (x0, y0, x1, y1) = extents(&all);
        let margin = thickness / 2.0 + 1.0;
        let rw = ((x1 - x0) * scale + 2.0 * margin).ceil() as usize;
        let rh = ((y1 - y0) * scale + 2.0 * margin).ceil() as usize;
        let glyph_strokes: Vec<Vec<Stroke>> = glyphs
            .iter()
            .map(|g| {
                g.iter()
                    .map(|s| s.iter().map(|&(x, y)| ((x - x0) * scale + margin, (y - y0) * scale + margin)).collect())
                    .collect()
            })
            .collect();
        let flat: Vec<Stroke> = glyph_strokes.iter().flatten().cloned().collect();
        let raster = render_strokes(&flat, rw, rh, thickness);
        let centre = Homography::translation(-((x1 - x0) * scale / 2.0 + margin), -((y1 - y0) * scale / 2.0 + margin));
        Ok(TextLayer {
            raster,
            rw,
            rh,
            to_canvas: Homography::rotation(theta).then_after(&centre),
            glyph_strokes,
            thickness,
        })
    }

    /// Moves the text centre to `(cx, cy)` and applies `warp` afterwards.
    fn place(&self, cx: f64, cy: f64, warp: &Homography) -> Homography {
        warp.then_after(&Homography::translation(cx, cy)).then_after(&self.to_canvas)
    }

    fn glyph_boxes(&self, m: &Homography) -> Vec<BBox> {
        self.glyph_strokes
            .iter()
            .map(|g| BBox::of_points(g.iter().flatten().map(|&p| m.apply(p)), self.thickness / 2.0))
            .collect()
    }

    /// Composites ink of grey level `ink` into `canvas` through transform `m`.
    fn composite(&self, m: &Homography, canvas: &mut [f64], cw: usize, ch: usize, ink: f64) -> Result<()> {
        let inv = m
            .inverse()
            .ok_or_else(|| Error::InvalidConfig("degenerate text transform".into()))?;
        let corners = [(0.0, 0.0), (self.rw as f64, 0.0), (self.rw as f64, self.rh as f64), (0.0, self.rh as f64)];
        let b = BBox::of_points(corners.iter().map(|&p| m.apply(p)), 1.0);
        let xs = b.x0.floor().max(0.0) as usize..(b.x1.ceil().max(0.0) as usize).min(cw);
        let ys = b.y0.floor().max(0.0) as usize..(b.y1.ceil().max(0.0) as usize).min(ch);
        for y in ys {
            for x in xs.clone() {
                let (u, v) = inv.apply((x as f64 + 0.5, y as f64 + 0.5));
                let a = bilinear_zero(&self.raster, self.rw, self.rh, u, v);
                if a > 0.0 {
                    let px = &mut canvas[y * cw + x];
                    *px = *px * (1.0 - a) + ink * a;
                }
            }
        }
        Ok(())
    }
}

/// Bilinear sample with pixel centres at `i + 0.5` and zero outside the grid.
fn bilinear_zero(data: &[f32], w: usize, h: usize, x: f64, y: f64) -> f64 {
    let fx = x - 0.5;
    let fy = y - 0.5;
    if fx <= -1.0 || fy <= -1.0 || fx >= w as f64 || fy >= h as f64 {
        return 0.0;
    }
    let (ix, iy) = (fx.floor() as i64, fy.floor() as i64);
    let (tx, ty) = (fx - ix as f64, fy - iy as f64);
    let at = |xx: i64, yy: i64| {
        if xx < 0 || yy < 0 || xx >= w as i64 || yy >= h as i64 {
            0.0
        } else {
            data[yy as usize * w + xx as usize] as f64
        }
    };
    let top = at(ix, iy) * (1.0 - tx) + at(ix + 1, iy) * tx;
    let bottom = at(ix, iy + 1) * (1.0 - tx) + at(ix + 1, iy + 1) * tx;
    top * (1.0 - ty) + bottom * ty
}

fn random_text<R: Rng + ?Sized>(n: usize, rng: &mut R) -> String {
    let chars: Vec<char> = CHARSET.chars().collect();
    (0..n).map(|_| chars[rng.random_range(0..chars.len())]).collect()
}

fn symmetric<R: Rng + ?Sized>(range: f64, rng: &mut R) -> f64 {
    if range > 0.0 {
        rng.random_range(-range..=range)
    } else {
        0.0
    }
}

fn uniform<R: Rng + ?Sized>((lo, hi): (f64, f64), rng: &mut R) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

/// Window-to-window perspective jitter: each corner moves by up to
/// `magnitude × window size` along each axis.
fn perspective_jitter<R: Rng + ?Sized>(w: f64, h: f64, magnitude: f64, rng: &mut R) -> Homography {
    if magnitude == 0.0 {
        return Homography::IDENTITY;
    }
    let src = [(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)];
    let dst = src.map(|(x, y)| (x + symmetric(magnitude * w, rng), y + symmetric(magnitude * h, rng)));
    Homography::from_quads(src, dst).unwrap_or(Homography::IDENTITY)
}

/// Ink grey level for contrast `c` against background level `level`: moves a
/// fraction `c` of the way to whichever extreme leaves more headroom, flipped at
/// random when both directions have room.
fn ink_level<R: Rng + ?Sized>(level: f64, c: f64, rng: &mut R) -> f64 {
    let dark = level;
    let light = 255.0 - level;
    let go_dark = if dark.min(light) > 60.0 { rng.random_bool(0.5) } else { dark >= light };
    if go_dark {
        level - c * dark
    } else {
        level + c * light
    }
}

/// Background grey levels plus the nominal mean level.
fn background<R: Rng + ?Sized>(cfg: &GenConfig, w: usize, h: usize, rng: &mut R) -> (Vec<f64>, f64) {
    if !cfg.backgrounds.is_empty() && rng.random_bool(0.5) {
        let img = &cfg.backgrounds[rng.random_range(0..cfg.backgrounds.len())];
        let bg = image_background(img, w, h, rng);
        let mean = bg.iter().sum::<f64>() / bg.len() as f64;
        return (bg, mean);
    }
    let level = rng.random_range(40.0..215.0);
    let kind = BackgroundKind::ALL[rng.random_range(0..BackgroundKind::ALL.len())];
    let amp = uniform(cfg.texture_amplitude, rng);
    (render_background(kind, w, h, level, amp, rng), level)
}

fn add_clutter<R: Rng + ?Sized>(cfg: &GenConfig, canvas: &mut [f64], w: usize, h: usize, level: f64, rng: &mut R) {
    let n = rng.random_range(3..=8);
    let strokes = clutter_strokes(0.0, 0.0, w as f64, h as f64, n, rng);
    let thickness = rng.random_range(1.0..2.5);
    let alpha = render_strokes(&strokes, w, h, thickness);
    let ink = ink_level(level, uniform(cfg.contrast, rng) * rng.random_range(0.4..1.0), rng);
    for (px, a) in canvas.iter_mut().zip(alpha) {
        let a = a as f64;
        *px = *px * (1.0 - a) + ink * a;
    }
}

fn finish<R: Rng + ?Sized>(cfg: &GenConfig, canvas: Vec<f64>, w: usize, h: usize, rng: &mut R) -> GrayImage {
    let pixels = if cfg.noise_sigma > 0.0 {
        let noise = Normal::new(0.0, cfg.noise_sigma).expect("sigma validated");
        canvas.into_iter().map(|v| quantize(v + noise.sample(rng))).collect()
    } else {
        canvas.into_iter().map(quantize).collect()
    };
    GrayImage { width: w, height: h, pixels }
}

/// Stroke thickness and scale (px per font unit) for text whose ink box is
/// `ink_w × ink_h` font units, aiming the ink height at 66–90% of `h` while
/// keeping the width inside 92% of `w`.
fn text_size<R: Rng + ?Sized>(ink_w: f64, ink_h: f64, w: f64, h: f64, rng: &mut R) -> (f64, f64) {
    let target = rng.random_range(0.66..0.9) * h;
    let thickness = rng.random_range(1.2..(0.14 * target).max(1.5));
    let scale = ((target - thickness) / ink_h).min((0.92 * w - thickness) / ink_w.max(1e-9));
    (scale, thickness)
}

fn ink_box(text: &str) -> Result<(f64, f64)> {
    let all: Vec<Stroke> = layout(text, LETTER_GAP)?.into_iter().flatten().collect();
    let (x0, y0, x1, y1) = extents(&all);
    Ok(((x1 - x0).max(0.5), (y1 - y0).max(0.5)))
}

/// Renders the kind's glyph count of random characters with full distortions,
/// retrying until the positive geometry holds.
pub fn synth_positive<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Result<Generated> {
    for _ in 0..MAX_ATTEMPTS {
        let text = random_text(cfg.kind.glyphs(), rng);
        if let Some(g) = render_centered(cfg, &text, SampleClass::Positive, rng)? {
            if g.meta.satisfies_positive(cfg.kind) {
                return Ok(g);
            }
        }
    }
    Err(Error::GenerationFailed(MAX_ATTEMPTS))
}

// Text near the window centre with rotation, jitter and perspective. Returns
// `None` when the sizing leaves the text too small to be useful.
fn render_centered<R: Rng + ?Sized>(
    cfg: &GenConfig,
    text: &str,
    class: SampleClass,
    rng: &mut R,
) -> Result<Option<Generated>> {
    let (w, h) = cfg.kind.window();
    let (wf, hf) = (w as f64, h as f64);
    let (ink_w, ink_h) = ink_box(text)?;
    let (scale, thickness) = text_size(ink_w, ink_h, wf, hf, rng);
    if scale <= 0.0 {
        return Ok(None);
    }
    let theta = symmetric(cfg.rotation_deg, rng).to_radians();
    let layer = TextLayer::new(text, scale, thickness, theta)?;
    let slack_x = ((wf - ink_w * scale) / 2.0).max(0.0) * 0.5;
    let slack_y = ((hf - ink_h * scale) / 2.0).max(0.0) * 0.5;
    let cx = wf / 2.0 + symmetric(slack_x, rng);
    let cy = hf / 2.0 + symmetric(slack_y, rng);
    let warp = perspective_jitter(wf, hf, cfg.perspective, rng);
    let m = layer.place(cx, cy, &warp);

    let (mut canvas, level) = background(cfg, w, h, rng);
    if rng.random_bool(cfg.clutter_prob) {
        add_clutter(cfg, &mut canvas, w, h, level, rng);
    }
    let ink = ink_level(level, uniform(cfg.contrast, rng), rng);
    layer.composite(&m, &mut canvas, w, h, ink)?;
    let patch = finish(cfg, canvas, w, h, rng);
    let label = if class == SampleClass::Positive { Label::Text } else { Label::NoText };
    Ok(Some(Generated {
        sample: Sample { patch, label },
        meta: GenMeta {
            class,
            text: text.to_string(),
            glyph_boxes: layer.glyph_boxes(&m),
            window: (w, h),
        },
    }))
}

/// Draws a hard or easy negative: 50% pure background, 30% clutter with glyph
/// fragments mostly cropped out of the window, 20% (bigram only) one centred
/// glyph. For unigram data the single-glyph share goes to pure background.
pub fn synth_negative<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Result<Generated> {
    let (w, h) = cfg.kind.window();
    let u: f64 = rng.random();
    let class = match (cfg.kind, u) {
        (_, u) if u < 0.5 => SampleClass::Background,
        (_, u) if u < 0.8 => SampleClass::Fragments,
        (DataKind::Bigram, _) => SampleClass::SingleGlyph,
        (DataKind::Unigram, _) => SampleClass::Background,
    };
    match class {
        SampleClass::Background => {
            let (mut canvas, level) = background(cfg, w, h, rng);
            if rng.random_bool(cfg.clutter_prob) {
                add_clutter(cfg, &mut canvas, w, h, level, rng);
            }
            let patch = finish(cfg, canvas, w, h, rng);
            Ok(Generated {
                sample: Sample { patch, label: Label::NoText },
                meta: GenMeta {
                    class,
                    text: String::new(),
                    glyph_boxes: Vec::new(),
                    window: (w, h),
                },
            })
        }
        SampleClass::Fragments => synth_fragments(cfg, rng),
        _ => {
            for _ in 0..MAX_ATTEMPTS {
                let text = random_text(1, rng);
                if let Some(g) = render_centered(cfg, &text, class, rng)? {
                    return Ok(g);
                }
            }
            Err(Error::GenerationFailed(MAX_ATTEMPTS))
        }
    }
}

fn synth_fragments<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Result<Generated> {
    let (w, h) = cfg.kind.window();
    let (wf, hf) = (w as f64, h as f64);
    let (mut canvas, level) = background(cfg, w, h, rng);
    add_clutter(cfg, &mut canvas, w, h, level, rng);
    let warp = perspective_jitter(wf, hf, cfg.perspective, rng);
    let mut text = String::new();
    let mut boxes = Vec::new();
    let pieces = rng.random_range(1..=2);
    for _ in 0..pieces {
        for _ in 0..MAX_ATTEMPTS {
            let ch = random_text(1, rng);
            let (ink_w, ink_h) = ink_box(&ch)?;
            let (scale, thickness) = text_size(ink_w, ink_h, wf, hf, rng);
            if scale <= 0.0 {
                continue;
            }
            let theta = symmetric(cfg.rotation_deg, rng).to_radians();
            let layer = TextLayer::new(&ch, scale, thickness, theta)?;
            let b = BBox::of_points(layer.glyph_boxes(&layer.to_canvas).iter().flat_map(|b| [(b.x0, b.y0), (b.x1, b.y1)]), 0.0);
            let (bw, bh) = (b.width(), b.height());
            let visible = rng.random_range(0.1..0.35);
            let (cx, cy) = match rng.random_range(0..4) {
                0 => (-bw / 2.0 + visible * bw, rng.random_range(0.25..0.75) * hf),
                1 => (wf + bw / 2.0 - visible * bw, rng.random_range(0.25..0.75) * hf),
                2 => (rng.random_range(0.2..0.8) * wf, -bh / 2.0 + visible * bh),
                _ => (rng.random_range(0.2..0.8) * wf, hf + bh / 2.0 - visible * bh),
            };
            let m = layer.place(cx, cy, &warp);
            let gb = layer.glyph_boxes(&m)[0];
            if gb.inside_fraction(wf, hf) > MAX_FRAGMENT_INSIDE {
                continue;
            }
            let ink = ink_level(level, uniform(cfg.contrast, rng), rng);
            layer.composite(&m, &mut canvas, w, h, ink)?;
            text.push_str(&ch);
            boxes.push(gb);
            break;
        }
    }
    let patch = finish(cfg, canvas, w, h, rng);
    Ok(Generated {
        sample: Sample { patch, label: Label::NoText },
        meta: GenMeta {
            class: SampleClass::Fragments,
            text,
            glyph_boxes: boxes,
            window: (w, h),
        },
    })
}

/// Generates `cfg.count` samples with exactly `cfg.positive_count()` positives in
/// a seeded random order. Sample `i` draws from its own derived stream, so the
/// output does not depend on the number of worker threads.
pub fn generate_dataset(cfg: &GenConfig) -> Result<Vec<Generated>> {
    cfg.validate()?;
    let mut labels = vec![false; cfg.count];
    labels[..cfg.positive_count()].fill(true);
    labels.shuffle(&mut rng::stream(cfg.seed, STREAM_LABELS, 0));
    par::map_range(cfg.count, |i| {
        let mut r = rng::stream(cfg.seed, STREAM_SAMPLE, i as u64);
        if labels[i] {
            synth_positive(cfg, &mut r)
        } else {
            synth_negative(cfg, &mut r)
        }
    })
    .into_iter()
    .collect()
}

/// Sample seed used by [`generate_dataset`] for index `i`.
pub fn sample_seed(seed: u64, i: usize) -> u64 {
    derive_seed(seed, STREAM_SAMPLE, i as u64)
}

/// A larger image with planted bigrams.
#[derive(Clone, Debug)]
pub struct Scene {
    pub image: GrayImage,
    pub texts: Vec<String>,
    pub boxes: Vec<BBox>,
}

impl Scene {
    pub fn centers(&self) -> Vec<Point> {
        self.boxes.iter().map(BBox::center).collect()
    }
}

/// A `width×height` procedural scene with `n` non-overlapping bigrams, each
/// sized as a bigram positive for a 64×32 window.
pub fn synth_scene(cfg: &GenConfig, width: usize, height: usize, n: usize, seed: u64) -> Result<Scene> {
    cfg.validate()?;
    let mut rng = rng::stream(seed, 0x7363_656e, 0);
    let (wf, hf) = (width as f64, height as f64);
    let (mut canvas, level) = background(cfg, width, height, &mut rng);
    if rng.random_bool(cfg.clutter_prob) {
        add_clutter(cfg, &mut canvas, width, height, level, &mut rng);
    }
    let (win_w, win_h) = DataKind::Bigram.window();
    let mut texts = Vec::new();
    let mut boxes: Vec<BBox> = Vec::new();
    let mut attempts = 0;
    while texts.len() < n {
        attempts += 1;
        if attempts > MAX_ATTEMPTS * n.max(1) {
            return Err(Error::GenerationFailed(attempts - 1));
        }
        let text = random_text(2, &mut rng);
        let (ink_w, ink_h) = ink_box(&text)?;
        let (scale, thickness) = text_size(ink_w, ink_h, win_w as f64, win_h as f64, &mut rng);
        if scale * ink_h < MIN_HEIGHT * win_h as f64 {
            continue;
        }
        let theta = symmetric(cfg.rotation_deg, &mut rng).to_radians();
        let layer = TextLayer::new(&text, scale, thickness, theta)?;
        let cx = rng.random_range(win_w as f64 / 2.0..wf - win_w as f64 / 2.0);
        let cy = rng.random_range(win_h as f64 / 2.0..hf - win_h as f64 / 2.0);
        let m = layer.place(cx, cy, &Homography::IDENTITY);
        let b = layer.glyph_boxes(&m).into_iter().reduce(|a, b| a.union(&b)).expect("two glyphs");
        let clear = |o: &BBox| b.x1 + 8.0 < o.x0 || o.x1 + 8.0 < b.x0 || b.y1 + 8.0 < o.y0 || o.y1 + 8.0 < b.y0;
        if b.x0 < 0.0 || b.y0 < 0.0 || b.x1 > wf || b.y1 > hf || !boxes.iter().all(clear) {
            continue;
        }
        let ink = ink_level(level, uniform(cfg.contrast, &mut rng), &mut rng);
        layer.composite(&m, &mut canvas, width, height, ink)?;
        texts.push(text);
        boxes.push(b);
    }
    let image = finish(cfg, canvas, width, height, &mut rng);
    Ok(Scene { image, texts, boxes })
}
