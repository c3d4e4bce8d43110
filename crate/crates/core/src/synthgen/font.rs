//! Embedded single-stroke font covering `A–Z`, `a–z` and `0–9`.
//!
//! Glyphs are polylines in font units: the cap line is `y = 0`, the baseline
//! `y = 10`, the x-height `y = 4` and descenders reach `y = 13`. Curves are
//! flattened arcs.

use std::f64::consts::PI;

use crate::{Error, Result};

pub const CAP_TOP: f64 = 0.0;
pub const BASELINE: f64 = 10.0;
pub const DESCENDER: f64 = 13.0;
/// Full vertical extent of the font, cap line to descender.
pub const EM: f64 = DESCENDER - CAP_TOP;
/// Horizontal gap between neighbouring glyphs, in font units.
pub const LETTER_GAP: f64 = 1.6;

pub type Point = (f64, f64);
pub type Stroke = Vec<Point>;

/// Every character the font can render.
pub const CHARSET: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

fn line(points: &[Point]) -> Stroke {
    points.to_vec()
}

// Elliptical arc from `a0` to `a1` degrees (0° = +x, 90° = +y, i.e. downwards).
fn arc(cx: f64, cy: f64, rx: f64, ry: f64, a0: f64, a1: f64) -> Stroke {
    let steps = ((a1 - a0).abs() / 10.0).ceil().max(2.0) as usize;
    (0..=steps)
        .map(|i| {
            let a = (a0 + (a1 - a0) * i as f64 / steps as f64) * PI / 180.0;
            (cx + rx * a.cos(), cy + ry * a.sin())
        })
        .collect()
}

// Appends an arc to an existing polyline.
fn then(mut s: Stroke, tail: Stroke) -> Stroke {
    s.extend(tail);
    s
}

/// Stroke definition of `ch`, or an error naming the unsupported code point.
pub fn glyph_strokes(ch: char) -> Result<Vec<Stroke>> {
    let g = match ch {
        'A' => vec![line(&[(0.0, 10.0), (3.5, 0.0), (7.0, 10.0)]), line(&[(1.3, 6.3), (5.7, 6.3)])],
        'B' => vec![
            line(&[(0.0, 10.0), (0.0, 0.0)]),
            then(line(&[(0.0, 0.0), (3.8, 0.0)]), arc(3.8, 2.5, 2.5, 2.5, -90.0, 90.0)),
            then(line(&[(0.0, 5.0), (4.2, 5.0)]), then(arc(4.2, 7.5, 2.6, 2.5, -90.0, 90.0), line(&[(0.0, 10.0)]))),
        ],
        'C' => vec![arc(4.6, 5.0, 4.6, 5.0, -40.0, -320.0)],
        'D' => vec![then(
            line(&[(0.0, 10.0), (0.0, 0.0), (2.8, 0.0)]),
            then(arc(2.8, 5.0, 4.4, 5.0, -90.0, 90.0), line(&[(0.0, 10.0)])),
        )],
        'E' => vec![line(&[(6.0, 0.0), (0.0, 0.0), (0.0, 10.0), (6.0, 10.0)]), line(&[(0.0, 5.0), (4.6, 5.0)])],
        'F' => vec![line(&[(6.0, 0.0), (0.0, 0.0), (0.0, 10.0)]), line(&[(0.0, 5.0), (4.6, 5.0)])],
        'G' => vec![then(arc(4.6, 5.0, 4.6, 5.0, -40.0, -360.0), line(&[(5.2, 5.0)]))],
        'H' => vec![
            line(&[(0.0, 0.0), (0.0, 10.0)]),
            line(&[(7.0, 0.0), (7.0, 10.0)]),
            line(&[(0.0, 5.0), (7.0, 5.0)]),
        ],
        'I' => vec![line(&[(0.0, 0.0), (0.0, 10.0)])],
        'J' => vec![then(line(&[(5.0, 0.0), (5.0, 7.5)]), arc(2.5, 7.5, 2.5, 2.5, 0.0, 180.0))],
        'K' => vec![
            line(&[(0.0, 0.0), (0.0, 10.0)]),
            line(&[(6.2, 0.0), (0.0, 6.2)]),
            line(&[(2.1, 4.1), (6.6, 10.0)]),
        ],
        'L' => vec![line(&[(0.0, 0.0), (0.0, 10.0), (5.8, 10.0)])],
        'M' => vec![line(&[(0.0, 10.0), (0.0, 0.0), (4.0, 7.0), (8.0, 0.0), (8.0, 10.0)])],
        'N' => vec![line(&[(0.0, 10.0), (0.0, 0.0), (7.0, 10.0), (7.0, 0.0)])],
        'O' => vec![arc(4.6, 5.0, 4.6, 5.0, 0.0, 360.0)],
        'P' => vec![then(
            line(&[(0.0, 10.0), (0.0, 0.0), (4.0, 0.0)]),
            then(arc(4.0, 2.75, 2.75, 2.75, -90.0, 90.0), line(&[(0.0, 5.5)])),
        )],
        'Q' => vec![arc(4.6, 5.0, 4.6, 5.0, 0.0, 360.0), line(&[(5.4, 7.2), (9.0, 10.6)])],
        'R' => vec![
            then(
                line(&[(0.0, 10.0), (0.0, 0.0), (4.0, 0.0)]),
                then(arc(4.0, 2.75, 2.75, 2.75, -90.0, 90.0), line(&[(0.0, 5.5)])),
            ),
            line(&[(3.6, 5.5), (7.0, 10.0)]),
        ],
        'S' => vec![then(
            arc(3.5, 2.6, 3.3, 2.6, -30.0, -270.0),
            arc(3.5, 7.6, 3.5, 2.4, -90.0, 150.0),
        )],
        'T' => vec![line(&[(0.0, 0.0), (7.0, 0.0)]), line(&[(3.5, 0.0), (3.5, 10.0)])],
        'U' => vec![then(
            line(&[(0.0, 0.0), (0.0, 6.5)]),
            then(arc(3.5, 6.5, 3.5, 3.5, 180.0, 0.0), line(&[(7.0, 0.0)])),
        )],
        'V' => vec![line(&[(0.0, 0.0), (3.5, 10.0), (7.0, 0.0)])],
        'W' => vec![line(&[(0.0, 0.0), (2.2, 10.0), (4.5, 3.0), (6.8, 10.0), (9.0, 0.0)])],
        'X' => vec![line(&[(0.0, 0.0), (7.0, 10.0)]), line(&[(7.0, 0.0), (0.0, 10.0)])],
        'Y' => vec![line(&[(0.0, 0.0), (3.5, 5.0), (7.0, 0.0)]), line(&[(3.5, 5.0), (3.5, 10.0)])],
        'Z' => vec![line(&[(0.0, 0.0), (7.0, 0.0), (0.0, 10.0), (7.0, 10.0)])],

        'a' => vec![arc(2.8, 7.0, 2.8, 3.0, 0.0, 360.0), line(&[(5.6, 4.0), (5.6, 10.0)])],
        'b' => vec![line(&[(0.0, 0.0), (0.0, 10.0)]), arc(2.8, 7.0, 2.8, 3.0, 0.0, 360.0)],
        'c' => vec![arc(3.0, 7.0, 3.0, 3.0, -45.0, -315.0)],
        'd' => vec![arc(2.8, 7.0, 2.8, 3.0, 0.0, 360.0), line(&[(5.6, 0.0), (5.6, 10.0)])],
        'e' => vec![then(line(&[(0.2, 7.0), (5.9, 7.0)]), arc(3.0, 7.0, 2.9, 3.0, 0.0, -315.0))],
        'f' => vec![
            then(arc(4.0, 2.0, 2.0, 2.0, -30.0, -180.0), line(&[(2.0, 10.0)])),
            line(&[(0.2, 4.5), (4.2, 4.5)]),
        ],
        'g' => vec![
            arc(2.8, 7.0, 2.8, 3.0, 0.0, 360.0),
            then(line(&[(5.6, 4.0), (5.6, 11.0)]), arc(2.8, 11.0, 2.8, 2.0, 0.0, 150.0)),
        ],
        'h' => vec![
            line(&[(0.0, 0.0), (0.0, 10.0)]),
            then(arc(2.7, 6.7, 2.7, 2.7, 180.0, 360.0), line(&[(5.4, 10.0)])),
        ],
        'i' => vec![line(&[(0.0, 4.0), (0.0, 10.0)]), line(&[(0.0, 1.6), (0.0, 2.3)])],
        'j' => vec![
            then(line(&[(2.0, 4.0), (2.0, 11.5)]), arc(0.5, 11.5, 1.5, 1.5, 0.0, 150.0)),
            line(&[(2.0, 1.6), (2.0, 2.3)]),
        ],
        'k' => vec![
            line(&[(0.0, 0.0), (0.0, 10.0)]),
            line(&[(4.6, 4.0), (0.0, 7.6)]),
            line(&[(1.6, 6.4), (5.0, 10.0)]),
        ],
        'l' => vec![then(line(&[(0.0, 0.0), (0.0, 9.0)]), then(arc(1.0, 9.0, 1.0, 1.0, 180.0, 90.0), line(&[(1.6, 10.0)])))],
        'm' => vec![
            line(&[(0.0, 4.0), (0.0, 10.0)]),
            then(arc(1.9, 6.0, 1.9, 2.0, 180.0, 360.0), line(&[(3.8, 10.0)])),
            then(arc(5.7, 6.0, 1.9, 2.0, 180.0, 360.0), line(&[(7.6, 10.0)])),
        ],
        'n' => vec![
            line(&[(0.0, 4.0), (0.0, 10.0)]),
            then(arc(2.6, 6.6, 2.6, 2.6, 180.0, 360.0), line(&[(5.2, 10.0)])),
        ],
        'o' => vec![arc(3.0, 7.0, 3.0, 3.0, 0.0, 360.0)],
        'p' => vec![line(&[(0.0, 4.0), (0.0, 13.0)]), arc(2.8, 7.0, 2.8, 3.0, 0.0, 360.0)],
        'q' => vec![arc(2.8, 7.0, 2.8, 3.0, 0.0, 360.0), line(&[(5.6, 4.0), (5.6, 13.0)])],
        'r' => vec![line(&[(0.0, 4.0), (0.0, 10.0)]), arc(3.0, 7.0, 3.0, 3.0, 180.0, 300.0)],
        's' => vec![then(
            arc(2.4, 5.5, 2.3, 1.5, -30.0, -270.0),
            arc(2.4, 8.5, 2.4, 1.5, -90.0, 150.0),
        )],
        't' => vec![line(&[(1.5, 1.0), (1.5, 10.0), (3.6, 10.0)]), line(&[(0.0, 4.0), (3.6, 4.0)])],
        'u' => vec![
            then(line(&[(0.0, 4.0), (0.0, 7.4)]), arc(2.6, 7.4, 2.6, 2.6, 180.0, 0.0)),
            line(&[(5.2, 4.0), (5.2, 10.0)]),
        ],
        'v' => vec![line(&[(0.0, 4.0), (2.7, 10.0), (5.4, 4.0)])],
        'w' => vec![line(&[(0.0, 4.0), (1.8, 10.0), (3.6, 5.5), (5.4, 10.0), (7.2, 4.0)])],
        'x' => vec![line(&[(0.0, 4.0), (5.0, 10.0)]), line(&[(5.0, 4.0), (0.0, 10.0)])],
        'y' => vec![line(&[(0.0, 4.0), (2.7, 10.0)]), line(&[(5.4, 4.0), (1.5, 13.0)])],
        'z' => vec![line(&[(0.0, 4.0), (5.0, 4.0), (0.0, 10.0), (5.0, 10.0)])],

        '0' => vec![arc(3.2, 5.0, 3.2, 5.0, 0.0, 360.0)],
        '1' => vec![line(&[(0.8, 2.0), (3.0, 0.0), (3.0, 10.0)])],
        '2' => vec![then(arc(3.0, 3.0, 3.0, 3.0, -160.0, 20.0), line(&[(0.0, 10.0), (6.2, 10.0)]))],
        '3' => vec![then(
            arc(3.0, 2.6, 2.8, 2.6, -150.0, 90.0),
            arc(3.0, 7.5, 3.1, 2.5, -90.0, 150.0),
        )],
        '4' => vec![line(&[(5.0, 10.0), (5.0, 0.0), (0.0, 7.0), (7.0, 7.0)])],
        '5' => vec![then(line(&[(6.0, 0.0), (1.0, 0.0), (0.6, 4.6)]), arc(3.0, 7.0, 3.2, 3.0, -140.0, 150.0))],
        '6' => vec![arc(3.0, 7.0, 3.0, 3.0, 0.0, 360.0), arc(6.0, 7.0, 6.0, 7.0, -115.0, -180.0)],
        '7' => vec![line(&[(0.0, 0.0), (6.5, 0.0), (2.0, 10.0)])],
        '8' => vec![arc(3.0, 2.5, 2.5, 2.5, 0.0, 360.0), arc(3.0, 7.3, 3.0, 2.7, 0.0, 360.0)],
        '9' => vec![arc(3.0, 3.0, 3.0, 3.0, 0.0, 360.0), line(&[(6.0, 3.0), (5.0, 10.0)])],
        _ => {
            return Err(Error::UnsupportedChar {
                ch,
                code: ch as u32,
            })
        }
    };
    Ok(g)
}

/// Axis-aligned extents `(min_x, min_y, max_x, max_y)` of a set of strokes.
pub fn extents(strokes: &[Stroke]) -> (f64, f64, f64, f64) {
    strokes.iter().flatten().fold(
        (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        |(x0, y0, x1, y1), &(x, y)| (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
    )
}

/// Lays out `text` left to right with the natural letter gap. Each glyph is
/// shifted so its ink starts at the pen position. Returns the strokes of every
/// glyph, one entry per character.
pub fn layout(text: &str, gap: f64) -> Result<Vec<Vec<Stroke>>> {
    let mut pen = 0.0;
    let mut glyphs = Vec::new();
    for ch in text.chars() {
        let strokes = glyph_strokes(ch)?;
        let (x0, _, x1, _) = extents(&strokes);
        let shifted: Vec<Stroke> = strokes
            .into_iter()
            .map(|s| s.into_iter().map(|(x, y)| (x - x0 + pen, y)).collect())
            .collect();
        pen += x1 - x0 + gap;
        glyphs.push(shifted);
    }
    Ok(glyphs)
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

/// Anti-aliased stroke coverage on a `width×height` pixel grid.
///
/// Strokes are in pixel coordinates; a pixel's coverage is
/// `clamp(thickness/2 + 0.5 − d, 0, 1)` where `d` is the distance from the pixel
/// centre to the nearest segment.
pub fn render_strokes(strokes: &[Stroke], width: usize, height: usize, thickness: f64) -> Vec<f32> {
    let mut alpha = vec![0.0f32; width * height];
    let reach = thickness / 2.0 + 0.5;
    for stroke in strokes {
        let segments: Vec<(Point, Point)> = if stroke.len() == 1 {
            vec![(stroke[0], stroke[0])]
        } else {
            stroke.windows(2).map(|w| (w[0], w[1])).collect()
        };
        for (a, b) in segments {
            let x_lo = ((a.0.min(b.0) - reach).floor().max(0.0)) as usize;
            let x_hi = ((a.0.max(b.0) + reach).ceil().min(width as f64)) as usize;
            let y_lo = ((a.1.min(b.1) - reach).floor().max(0.0)) as usize;
            let y_hi = ((a.1.max(b.1) + reach).ceil().min(height as f64)) as usize;
            for y in y_lo..y_hi {
                for x in x_lo..x_hi {
                    let d = segment_distance((x as f64 + 0.5, y as f64 + 0.5), a, b);
                    let cov = (reach - d).clamp(0.0, 1.0) as f32;
                    let px = &mut alpha[y * width + x];
                    *px = px.max(cov);
                }
            }
        }
    }
    alpha
}

/// Rasterized glyph coverage.
#[derive(Clone, Debug, PartialEq)]
pub struct GlyphMask {
    pub glyph: char,
    pub width: usize,
    pub height: usize,
    /// Row-major coverage in `[0, 1]`.
    pub alpha: Vec<f32>,
    /// Pen advance to the next glyph, in pixels.
    pub advance: f64,
}

/// Renders `ch` so that the full font extent (cap line to descender) spans
/// `height` pixels including a half-stroke margin.
pub fn rasterize_glyph(ch: char, height: usize, thickness: f64) -> Result<GlyphMask> {
    if height < 8 {
        return Err(Error::InvalidConfig(format!("glyph height must be at least 8 px, got {height}")));
    }
    if !(thickness > 0.0 && thickness.is_finite()) {
        return Err(Error::InvalidConfig(format!("stroke thickness must be positive, got {thickness}")));
    }
    let strokes = glyph_strokes(ch)?;
    let (x0, _, x1, _) = extents(&strokes);
    let margin = thickness / 2.0 + 0.5;
    let scale = (height as f64 - 2.0 * margin) / EM;
    if scale <= 0.0 {
        return Err(Error::InvalidConfig(format!("stroke thickness {thickness} too large for height {height}")));
    }
    let width = ((x1 - x0) * scale + 2.0 * margin).ceil() as usize;
    let px: Vec<Stroke> = strokes
        .iter()
        .map(|s| s.iter().map(|&(x, y)| ((x - x0) * scale + margin, (y - CAP_TOP) * scale + margin)).collect())
        .collect();
    Ok(GlyphMask {
        glyph: ch,
        width,
        height,
        alpha: render_strokes(&px, width, height, thickness),
        advance: (x1 - x0 + LETTER_GAP) * scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charset_has_62_members() {
        assert_eq!(CHARSET.chars().count(), 62);
    }

    #[test]
    fn capital_i_is_a_narrow_vertical_band() {
        let m = rasterize_glyph('I', 16, 1.5).unwrap();
        let cols: Vec<usize> = (0..m.width)
            .filter(|&x| (0..m.height).any(|y| m.alpha[y * m.width + x] > 0.0))
            .collect();
        assert!(cols.len() <= 3, "{cols:?}");
        let rows = (0..m.height).filter(|&y| (0..m.width).any(|x| m.alpha[y * m.width + x] > 0.5)).count();
        assert!(rows >= 10);
    }

    #[test]
    fn rendering_is_deterministic() {
        let a = rasterize_glyph('g', 24, 2.0).unwrap();
        let b = rasterize_glyph('g', 24, 2.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn every_glyph_renders_with_solid_ink() {
        for ch in CHARSET.chars() {
            for (h, t) in [(8, 2.0), (16, 2.0), (32, 3.0), (48, 1.8)] {
                let m = rasterize_glyph(ch, h, t).unwrap();
                let max = m.alpha.iter().copied().fold(0.0f32, f32::max);
                assert!(m.alpha.iter().all(|&a| (0.0..=1.0).contains(&a)));
                assert!(max >= 0.9, "{ch} at {h}px: max alpha {max}");
            }
        }
    }

    #[test]
    fn unsupported_character_names_code_point() {
        let err = rasterize_glyph('€', 16, 2.0).unwrap_err();
        assert!(matches!(err, Error::UnsupportedChar { ch: '€', code: 0x20AC }));
        assert!(err.to_string().contains("U+20AC"));
    }

    #[test]
    fn glyphs_stay_inside_font_box() {
        for ch in CHARSET.chars() {
            let (x0, y0, x1, y1) = extents(&glyph_strokes(ch).unwrap());
            assert!(y0 >= CAP_TOP - 0.01 && y1 <= DESCENDER + 0.01, "{ch}: {y0}..{y1}");
            assert!(x1 - x0 <= 10.0, "{ch} too wide");
        }
    }

    #[test]
    fn layout_advances_by_ink_width_plus_gap() {
        let g = layout("HI", 1.0).unwrap();
        let (_, _, hx1, _) = extents(&g[0]);
        let (ix0, _, _, _) = extents(&g[1]);
        assert!((hx1 - 7.0).abs() < 1e-12);
        assert!((ix0 - 8.0).abs() < 1e-12);
    }
}
