use rand::Rng;

use super::{Real, Tensor};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Per-element multipliers applied by a training-mode dropout: `0` or `1/(1−p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DropoutMask<T = f32> {
    pub scales: Vec<T>,
}

/// Inverted dropout. Eval mode returns the input unchanged and no mask.
pub fn dropout<T: Real, R: Rng + ?Sized>(
    input: &Tensor<T>,
    p: f64,
    mode: Mode,
    rng: &mut R,
) -> Result<(Tensor<T>, Option<DropoutMask<T>>)> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidDropout(p));
    }
    if mode == Mode::Eval {
        return Ok((input.clone(), None));
    }
    let keep = T::from_f64(1.0 / (1.0 - p));
    let scales: Vec<T> = (0..input.shape().len())
        .map(|_| if rng.random::<f64>() < p { T::zero() } else { keep })
        .collect();
    let data = input.data().iter().zip(&scales).map(|(&v, &s)| v * s).collect();
    Ok((Tensor::from_raw(input.shape(), data), Some(DropoutMask { scales })))
}

pub fn dropout_backward<T: Real>(mask: Option<&DropoutMask<T>>, grad_output: &Tensor<T>) -> Result<Tensor<T>> {
    let Some(mask) = mask else {
        return Ok(grad_output.clone());
    };
    if mask.scales.len() != grad_output.shape().len() {
        return Err(Error::ShapeMismatch {
            context: "dropout_backward",
            expected: format!("{} elements", mask.scales.len()),
            actual: grad_output.shape().to_string(),
        });
    }
    let data = grad_output.data().iter().zip(&mask.scales).map(|(&g, &s)| g * s).collect();
    Ok(Tensor::from_raw(grad_output.shape(), data))
}
