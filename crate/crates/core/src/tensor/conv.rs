use super::{Real, Shape, Tensor};
use crate::{par, Error, Result};

/// Output columns handled per im2col block. Small inputs (training windows) fit in
/// one block; large dense inputs are split by output rows.
const BLOCK_COLS: usize = 4096;

/// Weights of a valid 2-D convolution.
///
/// `kernels` is laid out `(out_channels, in_channels, kernel_h, kernel_w)`, which
/// is also the row-major `out_channels × (in_channels·kernel_h·kernel_w)` weight
/// matrix used by the im2col product.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvParams<T = f32> {
    pub out_channels: usize,
    pub in_channels: usize,
    pub kernel_h: usize,
    pub kernel_w: usize,
    pub kernels: Vec<T>,
    pub bias: Vec<T>,
}

impl<T: Real> ConvParams<T> {
    pub fn new(
        out_channels: usize,
        in_channels: usize,
        kernel_h: usize,
        kernel_w: usize,
        kernels: Vec<T>,
        bias: Vec<T>,
    ) -> Result<Self> {
        if out_channels == 0 || in_channels == 0 || kernel_h == 0 || kernel_w == 0 {
            return Err(Error::InvalidNetwork(format!(
                "conv dimensions must be positive, got out={out_channels} in={in_channels} \
                 kernel={kernel_h}x{kernel_w}"
            )));
        }
        let expected = out_channels * in_channels * kernel_h * kernel_w;
        if kernels.len() != expected {
            return Err(Error::ShapeMismatch {
                context: "ConvParams::new kernels",
                expected: format!("{expected} values ({out_channels}x{in_channels}x{kernel_h}x{kernel_w})"),
                actual: format!("{} values", kernels.len()),
            });
        }
        if bias.len() != out_channels {
            return Err(Error::ShapeMismatch {
                context: "ConvParams::new bias",
                expected: format!("{out_channels} values"),
                actual: format!("{} values", bias.len()),
            });
        }
        Ok(Self {
            out_channels,
            in_channels,
            kernel_h,
            kernel_w,
            kernels,
            bias,
        })
    }

    pub fn zeros(out_channels: usize, in_channels: usize, kernel_h: usize, kernel_w: usize) -> Self {
        Self {
            out_channels,
            in_channels,
            kernel_h,
            kernel_w,
            kernels: vec![T::zero(); out_channels * in_channels * kernel_h * kernel_w],
            bias: vec![T::zero(); out_channels],
        }
    }

    /// Inputs feeding one output value: `in_channels · kernel_h · kernel_w`.
    pub fn fan_in(&self) -> usize {
        self.in_channels * self.kernel_h * self.kernel_w
    }

    pub fn output_shape(&self, input: Shape) -> Result<Shape> {
        if input.channels != self.in_channels {
            return Err(Error::ShapeMismatch {
                context: "conv2d input channels",
                expected: format!(
                    "{} channels (kernels {}x{}x{}x{})",
                    self.in_channels, self.out_channels, self.in_channels, self.kernel_h, self.kernel_w
                ),
                actual: format!("input {input}"),
            });
        }
        if input.height < self.kernel_h || input.width < self.kernel_w {
            return Err(Error::KernelTooLarge {
                kernel_h: self.kernel_h,
                kernel_w: self.kernel_w,
                height: input.height,
                width: input.width,
            });
        }
        Ok(Shape::new(
            self.out_channels,
            input.height - self.kernel_h + 1,
            input.width - self.kernel_w + 1,
        ))
    }

    pub fn cast<U: Real>(&self) -> ConvParams<U> {
        ConvParams {
            out_channels: self.out_channels,
            in_channels: self.in_channels,
            kernel_h: self.kernel_h,
            kernel_w: self.kernel_w,
            kernels: self.kernels.iter().map(|v| U::from_f64(Real::to_f64(*v))).collect(),
            bias: self.bias.iter().map(|v| U::from_f64(Real::to_f64(*v))).collect(),
        }
    }
}

/// Gradients of a convolution with respect to its input and parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct GradBundle<T = f32> {
    pub grad_input: Tensor<T>,
    pub grad_kernels: Vec<T>,
    pub grad_bias: Vec<T>,
}

// Output rows [y0, y1) of one im2col block.
fn row_blocks(out_h: usize, out_w: usize) -> Vec<(usize, usize)> {
    let rows = (BLOCK_COLS / out_w.max(1)).max(1);
    (0..out_h)
        .step_by(rows)
        .map(|y0| (y0, (y0 + rows).min(out_h)))
        .collect()
}

// Unrolls output rows [y0, y1) into a K×N column matrix,
// K = in_c·kh·kw, N = (y1 − y0)·out_w.
fn im2col<T: Real>(input: &Tensor<T>, p: &ConvParams<T>, out_w: usize, y0: usize, y1: usize) -> Vec<T> {
    let n = (y1 - y0) * out_w;
    let k = p.fan_in();
    let mut cols = vec![T::zero(); k * n];
    let data = input.data();
    for i in 0..p.in_channels {
        for dy in 0..p.kernel_h {
            for dx in 0..p.kernel_w {
                let row = (i * p.kernel_h + dy) * p.kernel_w + dx;
                let dst = &mut cols[row * n..(row + 1) * n];
                for y in y0..y1 {
                    let src = input.index(i, y + dy, dx);
                    let off = (y - y0) * out_w;
                    dst[off..off + out_w].copy_from_slice(&data[src..src + out_w]);
                }
            }
        }
    }
    cols
}

// Scatter-adds a K×N column-gradient block back onto the input gradient.
fn col2im<T: Real>(cols: &[T], p: &ConvParams<T>, grad_input: &mut Tensor<T>, out_w: usize, y0: usize, y1: usize) {
    let n = (y1 - y0) * out_w;
    for i in 0..p.in_channels {
        for dy in 0..p.kernel_h {
            for dx in 0..p.kernel_w {
                let row = (i * p.kernel_h + dy) * p.kernel_w + dx;
                let src = &cols[row * n..(row + 1) * n];
                for y in y0..y1 {
                    let dst = grad_input.index(i, y + dy, dx);
                    let off = (y - y0) * out_w;
                    let dst = &mut grad_input.data_mut()[dst..dst + out_w];
                    for (d, &s) in dst.iter_mut().zip(&src[off..off + out_w]) {
                        *d += s;
                    }
                }
            }
        }
    }
}

/// Valid (unpadded, stride 1) convolution:
/// `out[o, y, x] = bias[o] + Σ_{i,dy,dx} input[i, y+dy, x+dx] · kernels[o, i, dy, dx]`.
pub fn conv2d_valid<T: Real>(input: &Tensor<T>, params: &ConvParams<T>) -> Result<Tensor<T>> {
    let out_shape = params.output_shape(input.shape())?;
    let (out_h, out_w) = (out_shape.height, out_shape.width);
    let plane = out_shape.plane();
    let k = params.fan_in();
    let oc = params.out_channels;

    let blocks = row_blocks(out_h, out_w);
    let compute = |b: usize| {
        let (y0, y1) = blocks[b];
        let n = (y1 - y0) * out_w;
        let cols = im2col(input, params, out_w, y0, y1);
        let mut out = Vec::with_capacity(oc * n);
        for &b in &params.bias {
            out.extend(std::iter::repeat_n(b, n));
        }
        T::gemm(
            oc,
            k,
            n,
            T::one(),
            (&params.kernels, k as isize, 1),
            (&cols, n as isize, 1),
            T::one(),
            (&mut out, n as isize, 1),
        );
        out
    };
    let parts = if blocks.len() == 1 {
        vec![compute(0)]
    } else {
        par::map_range(blocks.len(), compute)
    };

    let mut data = vec![T::zero(); out_shape.len()];
    for (&(y0, y1), part) in blocks.iter().zip(&parts) {
        let n = (y1 - y0) * out_w;
        for o in 0..oc {
            let dst = o * plane + y0 * out_w;
            data[dst..dst + n].copy_from_slice(&part[o * n..(o + 1) * n]);
        }
    }
    Ok(Tensor::from_raw(out_shape, data))
}

fn check_grad_output<T: Real>(input: &Tensor<T>, params: &ConvParams<T>, grad_output: &Tensor<T>) -> Result<Shape> {
    let out_shape = params.output_shape(input.shape())?;
    if grad_output.shape() != out_shape {
        return Err(Error::ShapeMismatch {
            context: "conv2d_backward grad_output",
            expected: out_shape.to_string(),
            actual: grad_output.shape().to_string(),
        });
    }
    Ok(out_shape)
}

fn backward_impl<T: Real>(
    input: &Tensor<T>,
    params: &ConvParams<T>,
    grad_output: &Tensor<T>,
    need_input: bool,
) -> Result<(Option<Tensor<T>>, Vec<T>, Vec<T>)> {
    let out_shape = check_grad_output(input, params, grad_output)?;
    let (out_h, out_w) = (out_shape.height, out_shape.width);
    let plane = out_shape.plane();
    let k = params.fan_in();
    let oc = params.out_channels;
    let g = grad_output.data();

    let grad_bias: Vec<T> = (0..oc).map(|o| g[o * plane..(o + 1) * plane].iter().copied().sum()).collect();
    let mut grad_kernels = vec![T::zero(); params.kernels.len()];
    let mut grad_input = need_input.then(|| Tensor::zeros(input.shape()));

    // Blocks are reduced in a fixed order so results do not depend on threading.
    for (y0, y1) in row_blocks(out_h, out_w) {
        let n = (y1 - y0) * out_w;
        let cols = im2col(input, params, out_w, y0, y1);
        let g_block = &g[y0 * out_w..];
        // dK (oc×K) += G (oc×n, row stride = plane) · colsᵀ (n×K)
        T::gemm(
            oc,
            n,
            k,
            T::one(),
            (g_block, plane as isize, 1),
            (&cols, 1, n as isize),
            T::one(),
            (&mut grad_kernels, k as isize, 1),
        );
        if let Some(gi) = grad_input.as_mut() {
            // dCols (K×n) = Wᵀ (K×oc) · G (oc×n)
            let mut dcols = vec![T::zero(); k * n];
            T::gemm(
                k,
                oc,
                n,
                T::one(),
                (&params.kernels, 1, k as isize),
                (g_block, plane as isize, 1),
                T::zero(),
                (&mut dcols, n as isize, 1),
            );
            col2im(&dcols, params, gi, out_w, y0, y1);
        }
    }
    Ok((grad_input, grad_kernels, grad_bias))
}

/// Exact partial derivatives of [`conv2d_valid`] given the upstream gradient.
pub fn conv2d_backward<T: Real>(
    input: &Tensor<T>,
    params: &ConvParams<T>,
    grad_output: &Tensor<T>,
) -> Result<GradBundle<T>> {
    let (grad_input, grad_kernels, grad_bias) = backward_impl(input, params, grad_output, true)?;
    Ok(GradBundle {
        grad_input: grad_input.expect("input gradient requested"),
        grad_kernels,
        grad_bias,
    })
}

/// Like [`conv2d_backward`] but skips the input gradient; returns
/// `(grad_kernels, grad_bias)`. Used for the first layer, whose input is the image.
pub fn conv2d_backward_params<T: Real>(
    input: &Tensor<T>,
    params: &ConvParams<T>,
    grad_output: &Tensor<T>,
) -> Result<(Vec<T>, Vec<T>)> {
    let (_, grad_kernels, grad_bias) = backward_impl(input, params, grad_output, false)?;
    Ok((grad_kernels, grad_bias))
}
