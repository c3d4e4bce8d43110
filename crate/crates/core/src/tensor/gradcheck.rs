//! Central-difference gradient checking in `f64`.
//!
//! Each probe is reduced to a scalar objective: softmax cross-entropy uses its own
//! loss, every other probe uses `L = Σ wⱼ·yⱼ` with a fixed pseudo-random weighting
//! `w` of its output. The analytic gradient comes from the layer backward passes
//! driven by `w`; the numeric one perturbs every input element and parameter by
//! `±h` with `h = 1e-5`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    conv2d_backward, conv2d_valid, maxpool2, maxpool2_backward, relu, relu_backward, softmax_xent,
    softmax_xent_backward, ConvParams, Tensor,
};
use crate::Result;

pub const STEP: f64 = 1e-5;

/// Layer (or short layer stack) to check.
#[derive(Clone, Debug)]
pub enum Probe {
    Conv(ConvParams<f64>),
    /// conv → ReLU
    ConvRelu(ConvParams<f64>),
    /// conv → ReLU → 2×2 max pool
    ConvReluPool(ConvParams<f64>),
    Relu,
    MaxPool,
    /// Softmax cross-entropy over the input's elements (the logits).
    SoftmaxXent { label: usize },
}

fn weights(len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6772_6164 ^ len as u64);
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// Scalar objective for the probe evaluated at (input, params).
fn objective(probe: &Probe, params: Option<&ConvParams<f64>>, input: &Tensor<f64>) -> Result<f64> {
    let out = match probe {
        Probe::Conv(_) => conv2d_valid(input, params.unwrap())?,
        Probe::ConvRelu(_) => relu(&conv2d_valid(input, params.unwrap())?),
        Probe::ConvReluPool(_) => maxpool2(&relu(&conv2d_valid(input, params.unwrap())?))?,
        Probe::Relu => relu(input),
        Probe::MaxPool => maxpool2(input)?,
        Probe::SoftmaxXent { label } => return Ok(softmax_xent(input.data(), *label).loss),
    };
    Ok(dot(&weights(out.shape().len()), out.data()))
}

// Analytic gradients: (d input, d kernels ++ d bias).
fn analytic(probe: &Probe, input: &Tensor<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let conv_chain = |p: &ConvParams<f64>, with_relu: bool, with_pool: bool| -> Result<(Vec<f64>, Vec<f64>)> {
        let z = conv2d_valid(input, p)?;
        let a = relu(&z);
        let out_shape = if with_pool {
            maxpool2(&a)?.shape()
        } else {
            z.shape()
        };
        let mut g = Tensor::from_vec(out_shape, weights(out_shape.len()))?;
        if with_pool {
            g = maxpool2_backward(&a, &g)?;
        }
        if with_relu {
            g = relu_backward(&z, &g)?;
        }
        let b = conv2d_backward(input, p, &g)?;
        let mut params = b.grad_kernels;
        params.extend(b.grad_bias);
        Ok((b.grad_input.into_vec(), params))
    };
    match probe {
        Probe::Conv(p) => conv_chain(p, false, false),
        Probe::ConvRelu(p) => conv_chain(p, true, false),
        Probe::ConvReluPool(p) => conv_chain(p, true, true),
        Probe::Relu => {
            let g = Tensor::from_vec(input.shape(), weights(input.shape().len()))?;
            Ok((relu_backward(input, &g)?.into_vec(), Vec::new()))
        }
        Probe::MaxPool => {
            let s = maxpool2(input)?.shape();
            let g = Tensor::from_vec(s, weights(s.len()))?;
            Ok((maxpool2_backward(input, &g)?.into_vec(), Vec::new()))
        }
        Probe::SoftmaxXent { label } => {
            let out = softmax_xent(input.data(), *label);
            Ok((softmax_xent_backward(&out.probs, *label), Vec::new()))
        }
    }
}

// Parameter `j` in kernels-then-bias order.
fn param_mut(q: &mut ConvParams<f64>, j: usize) -> &mut f64 {
    let nk = q.kernels.len();
    if j < nk {
        &mut q.kernels[j]
    } else {
        &mut q.bias[j - nk]
    }
}

fn rel_err(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(1e-12)
}

/// Max relative error `|analytic − numeric| / max(|analytic|, |numeric|, 1e-12)`
/// over every input element and parameter of the probe.
pub fn grad_check(probe: &Probe, input: &Tensor<f64>) -> Result<f64> {
    let params = match probe {
        Probe::Conv(p) | Probe::ConvRelu(p) | Probe::ConvReluPool(p) => Some(p),
        _ => None,
    };
    let (g_in, g_params) = analytic(probe, input)?;
    let mut worst = 0.0f64;

    let mut x = input.clone();
    for (i, &a) in g_in.iter().enumerate() {
        let orig = x.data()[i];
        x.data_mut()[i] = orig + STEP;
        let plus = objective(probe, params, &x)?;
        x.data_mut()[i] = orig - STEP;
        let minus = objective(probe, params, &x)?;
        x.data_mut()[i] = orig;
        worst = worst.max(rel_err(a, (plus - minus) / (2.0 * STEP)));
    }

    if let Some(p) = params {
        let mut q = p.clone();
        for (j, &a) in g_params.iter().enumerate() {
            let orig = *param_mut(&mut q, j);
            *param_mut(&mut q, j) = orig + STEP;
            let plus = objective(probe, Some(&q), input)?;
            *param_mut(&mut q, j) = orig - STEP;
            let minus = objective(probe, Some(&q), input)?;
            *param_mut(&mut q, j) = orig;
            worst = worst.max(rel_err(a, (plus - minus) / (2.0 * STEP)));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Shape;

    fn rand_tensor(rng: &mut ChaCha8Rng, s: Shape) -> Tensor<f64> {
        Tensor::from_fn(s, |_, _, _| rng.random_range(-1.0..1.0))
    }

    fn rand_params(rng: &mut ChaCha8Rng, oc: usize, ic: usize, kh: usize, kw: usize) -> ConvParams<f64> {
        ConvParams::new(
            oc,
            ic,
            kh,
            kw,
            (0..oc * ic * kh * kw).map(|_| rng.random_range(-1.0..1.0)).collect(),
            (0..oc).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn conv_on_6x6() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = rand_tensor(&mut rng, Shape::new(1, 6, 6));
        let p = rand_params(&mut rng, 1, 1, 3, 3);
        assert!(grad_check(&Probe::Conv(p), &x).unwrap() <= 1e-5);
    }

    #[test]
    fn softmax_xent_on_random_logits() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for label in 0..2 {
            let x = rand_tensor(&mut rng, Shape::new(2, 1, 1)).map(|v| 3.0 * v);
            assert!(grad_check(&Probe::SoftmaxXent { label }, &x).unwrap() <= 1e-6);
        }
    }

    #[test]
    fn linear_one_by_one_layer() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x = rand_tensor(&mut rng, Shape::new(4, 3, 3));
        let p = rand_params(&mut rng, 2, 4, 1, 1);
        assert!(grad_check(&Probe::Conv(p), &x).unwrap() <= 1e-7);
    }

    #[test]
    fn relu_away_from_kink() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let x = rand_tensor(&mut rng, Shape::new(2, 5, 5)).map(|v| if v.abs() < 1e-3 { 0.5 } else { v });
        assert!(grad_check(&Probe::Relu, &x).unwrap() <= 1e-5);
    }

    #[test]
    fn pooled_stack() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let x = rand_tensor(&mut rng, Shape::new(2, 7, 7));
        let p = rand_params(&mut rng, 3, 2, 4, 2);
        assert!(grad_check(&Probe::ConvReluPool(p), &x).unwrap() <= 1e-5);
        let x = rand_tensor(&mut rng, Shape::new(2, 4, 6));
        assert!(grad_check(&Probe::MaxPool, &x).unwrap() <= 1e-5);
    }

    #[test]
    fn detects_a_wrong_gradient() {
        // A broken objective/gradient pair must be caught: compare the conv analytic
        // gradient against the numeric gradient of a different probe.
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let x = rand_tensor(&mut rng, Shape::new(1, 5, 5));
        let p = rand_params(&mut rng, 1, 1, 2, 2);
        let (g_in, _) = analytic(&Probe::Conv(p.clone()), &x).unwrap();
        let mut y = x.clone();
        y.data_mut()[0] += STEP;
        let plus = objective(&Probe::ConvRelu(p.clone()), Some(&p), &y).unwrap();
        y.data_mut()[0] -= 2.0 * STEP;
        let minus = objective(&Probe::ConvRelu(p.clone()), Some(&p), &y).unwrap();
        let numeric = (plus - minus) / (2.0 * STEP);
        // The two agree only if no pre-activation touching pixel 0 is negative.
        let z = conv2d_valid(&x, &p).unwrap();
        if z.get(0, 0, 0) < 0.0 {
            assert!(rel_err(g_in[0], numeric) > 1e-3);
        }
    }
}
