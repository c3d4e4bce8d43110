//! Synthetic training data: stroke-font glyphs and bigrams with rotation,
//! perspective, contrast and noise, composited onto procedural backgrounds.

mod background;
mod dataset;
mod font;
mod generate;
mod warp;

pub use background::{clutter_strokes, image_background, render_background, BackgroundKind};
pub use dataset::{decode_dataset, encode_dataset, read_dataset, write_dataset, Label, Sample, DATASET_MAGIC};
pub use font::{
    extents, glyph_strokes, layout, rasterize_glyph, render_strokes, GlyphMask, Point, Stroke, BASELINE, CAP_TOP, CHARSET,
    DESCENDER, EM, LETTER_GAP,
};
pub use generate::{
    generate_dataset, sample_seed, synth_negative, synth_positive, synth_scene, BBox, DataKind, GenConfig, GenMeta,
    Generated, SampleClass, Scene, MAX_FRAGMENT_INSIDE, MIN_GLYPH_INSIDE, MIN_HEIGHT, MIN_INSIDE,
};
pub use warp::Homography;
