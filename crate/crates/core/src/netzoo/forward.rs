use super::params::NetworkParams;
use super::spec::{LayerSpec, NetworkSpec, Window, TEXT_CLASS};
use crate::tensor::{conv2d_valid, maxpool2, maxpool2_truncating, relu, softmax, Shape, Tensor};
use crate::{Error, Result};

/// Dense text-probability grid for one image (or one pyramid level).
#[derive(Clone, Debug, PartialEq)]
pub struct ResponseMap {
    /// Scale of the analysed image relative to the original.
    pub scale: f64,
    /// Pixels (at `scale`) between horizontally or vertically adjacent cells.
    pub grid_stride: usize,
    pub window: Window,
    pub width: usize,
    pub height: usize,
    /// Row-major; `scores[y·width + x]` is the text probability of the window whose
    /// top-left corner is `(x·grid_stride, y·grid_stride)` in the scaled image.
    pub scores: Vec<f32>,
}

impl ResponseMap {
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.scores[y * self.width + x]
    }

    /// Top-left corner of cell `(x, y)`'s window in the scaled image.
    pub fn window_origin(&self, x: usize, y: usize) -> (usize, usize) {
        (x * self.grid_stride, y * self.grid_stride)
    }

    /// Window of cell `(x, y)` in original-image coordinates as `(x0, y0, x1, y1)`.
    pub fn window_rect_original(&self, x: usize, y: usize) -> (f64, f64, f64, f64) {
        let (ox, oy) = self.window_origin(x, y);
        let s = self.scale;
        (
            ox as f64 / s,
            oy as f64 / s,
            (ox + self.window.width) as f64 / s,
            (oy + self.window.height) as f64 / s,
        )
    }

    /// 8-bit visualisation: `round(score · 255)`.
    pub fn to_gray(&self) -> Vec<u8> {
        self.scores.iter().map(|&s| (s * 255.0).round().clamp(0.0, 255.0) as u8).collect()
    }
}

// Runs every layer but the softmax head in eval mode. `on_conv` receives the
// multiply-accumulate count of each convolution actually executed.
fn run_layers(
    spec: &NetworkSpec,
    params: &NetworkParams,
    input: &Tensor<f32>,
    truncate: bool,
    on_conv: &mut dyn FnMut(u64),
) -> Result<Tensor<f32>> {
    let mut x = input.clone();
    let mut convs = params.convs.iter();
    for layer in &spec.layers {
        x = match layer {
            LayerSpec::Conv { .. } => {
                let p = convs.next().expect("params checked against spec");
                let y = conv2d_valid(&x, p)?;
                on_conv((y.shape().len() * p.fan_in()) as u64);
                y
            }
            LayerSpec::Relu => relu(&x),
            LayerSpec::MaxPool2 if truncate => maxpool2_truncating(&x),
            LayerSpec::MaxPool2 => maxpool2(&x)?,
            LayerSpec::Dropout { .. } => x,
            LayerSpec::SoftmaxHead => break,
        };
    }
    Ok(x)
}

fn check_inference(spec: &NetworkSpec, params: &NetworkParams, input: Shape) -> Result<()> {
    if params.training {
        return Err(Error::TrainingMode);
    }
    params.check(spec)?;
    if input.channels != spec.input_channels {
        return Err(Error::ShapeMismatch {
            context: "network input channels",
            expected: spec.input_channels.to_string(),
            actual: input.to_string(),
        });
    }
    Ok(())
}

/// Raw two-class logits of a window-sized patch, in eval mode.
pub fn forward_logits(spec: &NetworkSpec, params: &NetworkParams, patch: &Tensor<f32>) -> Result<[f32; 2]> {
    check_inference(spec, params, patch.shape())?;
    if patch.width() != spec.window.width || patch.height() != spec.window.height {
        return Err(Error::ShapeMismatch {
            context: "forward_window patch",
            expected: format!("{} window", spec.window),
            actual: format!("{}x{}", patch.width(), patch.height()),
        });
    }
    let out = run_layers(spec, params, patch, false, &mut |_| {})?;
    debug_assert_eq!(out.shape(), Shape::new(2, 1, 1));
    Ok([out.data()[0], out.data()[1]])
}

/// Text probability of a single window-sized patch.
pub fn forward_window(spec: &NetworkSpec, params: &NetworkParams, patch: &Tensor<f32>) -> Result<f32> {
    let logits = forward_logits(spec, params, patch)?;
    Ok(softmax(&logits)[TEXT_CLASS])
}

/// Applies the network convolutionally over a whole image, giving one score per
/// window position on a `grid_stride` lattice.
pub fn forward_dense(spec: &NetworkSpec, params: &NetworkParams, image: &Tensor<f32>) -> Result<ResponseMap> {
    forward_dense_counted(spec, params, image).map(|(map, _)| map)
}

/// [`forward_dense`] that also returns the number of multiply-accumulates executed.
pub fn forward_dense_counted(
    spec: &NetworkSpec,
    params: &NetworkParams,
    image: &Tensor<f32>,
) -> Result<(ResponseMap, u64)> {
    check_inference(spec, params, image.shape())?;
    let w = spec.window;
    if image.width() < w.width || image.height() < w.height {
        return Err(Error::ImageTooSmall {
            image_w: image.width(),
            image_h: image.height(),
            window_w: w.width,
            window_h: w.height,
        });
    }
    let mut macs = 0u64;
    let logits = run_layers(spec, params, image, true, &mut |m| macs += m)?;
    let stride = spec.grid_stride();
    let width = (image.width() - w.width) / stride + 1;
    let height = (image.height() - w.height) / stride + 1;
    if logits.channels() != 2 || logits.width() != width || logits.height() != height {
        return Err(Error::InvalidNetwork(format!(
            "dense output {} does not match the {height}x{width} window grid",
            logits.shape()
        )));
    }
    let plane = width * height;
    let d = logits.data();
    let scores = (0..plane).map(|i| softmax(&[d[i], d[plane + i]])[TEXT_CLASS]).collect();
    Ok((
        ResponseMap {
            scale: 1.0,
            grid_stride: stride,
            window: w,
            width,
            height,
            scores,
        },
        macs,
    ))
}
