//! The three detector architectures and everything that runs them: per-window and
//! dense inference, network-level backpropagation and analytic MAC accounting.

mod backprop;
mod forward;
mod macs;
mod params;
mod spec;

pub use backprop::{loss_and_grads, NetworkGrads, SampleGrads};
pub use forward::{forward_dense, forward_dense_counted, forward_logits, forward_window, ResponseMap};
pub use macs::{count_macs, LayerMacs, MacReport};
pub use params::NetworkParams;
pub use spec::{build_net, ConvLayer, LayerSpec, NetKind, NetworkSpec, Window, TEXT_CLASS};
