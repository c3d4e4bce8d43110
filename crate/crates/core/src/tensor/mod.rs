//! Minimal numeric engine: single-sample `(channels, height, width)` tensors and the
//! layer kernels used by the detector networks.
//!
//! Production inference and training run in `f32`. Every kernel is generic over
//! [`Real`] so the gradient checker can re-run the same code in `f64`.

mod conv;
mod dropout;
pub mod gradcheck;
mod pool;
mod real;
mod relu;
mod softmax;
#[allow(clippy::module_inception)]
mod tensor;

pub use conv::{conv2d_backward, conv2d_backward_params, conv2d_valid, ConvParams, GradBundle};
pub use dropout::{dropout, dropout_backward, DropoutMask, Mode};
pub use pool::{maxpool2, maxpool2_backward, maxpool2_truncating};
pub use real::Real;
pub use relu::{relu, relu_backward};
pub use softmax::{softmax, softmax_xent, softmax_xent_backward, SoftmaxXent};
pub use tensor::{normalize_pixel, Shape, Tensor};
