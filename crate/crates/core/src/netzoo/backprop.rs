use rand::Rng;

use super::params::NetworkParams;
use super::spec::{LayerSpec, NetworkSpec, TEXT_CLASS};
use crate::tensor::{
    conv2d_backward, conv2d_backward_params, conv2d_valid, dropout, dropout_backward, maxpool2, maxpool2_backward,
    relu, relu_backward, softmax_xent, softmax_xent_backward, DropoutMask, Mode, Shape, Tensor,
};
use crate::{Error, Result};

/// Parameter gradients, laid out like [`NetworkParams::convs`].
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkGrads {
    /// `(grad_kernels, grad_bias)` per conv layer.
    pub convs: Vec<(Vec<f32>, Vec<f32>)>,
}

impl NetworkGrads {
    pub fn zeros_like(params: &NetworkParams) -> Self {
        Self {
            convs: params
                .convs
                .iter()
                .map(|c| (vec![0.0; c.kernels.len()], vec![0.0; c.bias.len()]))
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &NetworkGrads) {
        for ((k, b), (ok, ob)) in self.convs.iter_mut().zip(&other.convs) {
            k.iter_mut().zip(ok).for_each(|(a, b)| *a += b);
            b.iter_mut().zip(ob).for_each(|(a, b)| *a += b);
        }
    }

    pub fn scale(&mut self, factor: f32) {
        for (k, b) in &mut self.convs {
            k.iter_mut().chain(b.iter_mut()).for_each(|v| *v *= factor);
        }
    }

    /// Same order as [`NetworkParams::slices`].
    pub fn slices(&self) -> Vec<&[f32]> {
        self.convs.iter().flat_map(|(k, b)| [k.as_slice(), b.as_slice()]).collect()
    }
}

/// Loss, text probability and parameter gradients for one labelled patch.
#[derive(Clone, Debug)]
pub struct SampleGrads {
    pub loss: f32,
    pub text_prob: f32,
    pub grads: NetworkGrads,
}

enum Saved {
    Conv(Tensor<f32>),
    Relu(Tensor<f32>),
    Pool(Tensor<f32>),
    Dropout(Option<DropoutMask<f32>>),
}

/// Forward and backward pass of one sample. Dropout is active when `mode` is
/// [`Mode::Train`], drawing from `rng`.
pub fn loss_and_grads<R: Rng + ?Sized>(
    spec: &NetworkSpec,
    params: &NetworkParams,
    patch: &Tensor<f32>,
    label: usize,
    mode: Mode,
    rng: &mut R,
) -> Result<SampleGrads> {
    params.check(spec)?;
    let window = Shape::new(spec.input_channels, spec.window.height, spec.window.width);
    if patch.shape() != window {
        return Err(Error::ShapeMismatch {
            context: "loss_and_grads patch",
            expected: window.to_string(),
            actual: patch.shape().to_string(),
        });
    }

    let mut saved = Vec::with_capacity(spec.layers.len());
    let mut x = patch.clone();
    let mut conv_idx = 0;
    for layer in &spec.layers {
        match *layer {
            LayerSpec::Conv { .. } => {
                let y = conv2d_valid(&x, &params.convs[conv_idx])?;
                conv_idx += 1;
                saved.push(Saved::Conv(std::mem::replace(&mut x, y)));
            }
            LayerSpec::Relu => {
                let y = relu(&x);
                saved.push(Saved::Relu(std::mem::replace(&mut x, y)));
            }
            LayerSpec::MaxPool2 => {
                let y = maxpool2(&x)?;
                saved.push(Saved::Pool(std::mem::replace(&mut x, y)));
            }
            LayerSpec::Dropout { p } => {
                let (y, mask) = dropout(&x, p as f64, mode, rng)?;
                x = y;
                saved.push(Saved::Dropout(mask));
            }
            LayerSpec::SoftmaxHead => break,
        }
    }

    let head = softmax_xent(x.data(), label);
    let mut grad = Tensor::from_vec(x.shape(), softmax_xent_backward(&head.probs, label))?;
    let mut grads = NetworkGrads::zeros_like(params);

    for (layer_pos, entry) in saved.iter().enumerate().rev() {
        grad = match entry {
            Saved::Conv(input) => {
                conv_idx -= 1;
                let p = &params.convs[conv_idx];
                if layer_pos == 0 {
                    let (gk, gb) = conv2d_backward_params(input, p, &grad)?;
                    grads.convs[conv_idx] = (gk, gb);
                    break;
                }
                let b = conv2d_backward(input, p, &grad)?;
                grads.convs[conv_idx] = (b.grad_kernels, b.grad_bias);
                b.grad_input
            }
            Saved::Relu(input) => relu_backward(input, &grad)?,
            Saved::Pool(input) => maxpool2_backward(input, &grad)?,
            Saved::Dropout(mask) => dropout_backward(mask.as_ref(), &grad)?,
        };
    }

    Ok(SampleGrads {
        loss: head.loss,
        text_prob: head.probs[TEXT_CLASS],
        grads,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netzoo::{build_net, forward_window, NetKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn patch(seed: u64, w: usize, h: usize) -> Tensor<f32> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Tensor::from_fn(Shape::new(1, h, w), |_, _, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn eval_mode_probability_matches_inference() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for kind in NetKind::ALL {
            let spec = build_net(kind);
            let params = NetworkParams::he_init(&spec, 1);
            let x = patch(2, spec.window.width, spec.window.height);
            let g = loss_and_grads(&spec, &params, &x, 1, Mode::Eval, &mut rng).unwrap();
            let p = forward_window(&spec, &params, &x).unwrap();
            assert!((g.text_prob - p).abs() < 1e-6);
            assert!((g.loss + p.ln()).abs() < 1e-4);
        }
    }

    // Whole-network finite differences on a handful of parameters, in f32 with a
    // loose tolerance; the tight per-layer checks live in the gradcheck module.
    #[test]
    fn network_gradient_spot_check() {
        let spec = build_net(NetKind::BigramShared);
        let params = NetworkParams::he_init(&spec, 9);
        let x = patch(3, 64, 32);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let g = loss_and_grads(&spec, &params, &x, 0, Mode::Eval, &mut rng).unwrap();
        let loss_at = |p: &NetworkParams| {
            let logits = crate::netzoo::forward_logits(&spec, p, &x).unwrap();
            crate::tensor::softmax_xent(&logits.map(|v| v as f64), 0).loss
        };
        let h = 1e-2f32;
        for (layer, idx) in [(0, 7), (1, 100), (2, 5000), (3, 1234), (4, 50)] {
            let mut plus = params.clone();
            plus.convs[layer].kernels[idx] += h;
            let mut minus = params.clone();
            minus.convs[layer].kernels[idx] -= h;
            let numeric = (loss_at(&plus) - loss_at(&minus)) / (2.0 * h as f64);
            let analytic = g.grads.convs[layer].0[idx] as f64;
            assert!(
                (numeric - analytic).abs() <= 2e-3 + 0.02 * analytic.abs(),
                "layer {layer}: {numeric} vs {analytic}"
            );
        }
    }

    #[test]
    fn train_mode_dropout_is_seeded() {
        let spec = build_net(NetKind::Unigram);
        let params = NetworkParams::he_init(&spec, 1);
        let x = patch(4, 32, 32);
        let a = loss_and_grads(&spec, &params, &x, 1, Mode::Train, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = loss_and_grads(&spec, &params, &x, 1, Mode::Train, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a.grads, b.grads);
        assert_eq!(a.loss, b.loss);
    }
}
