use super::{Real, Tensor};
use crate::{Error, Result};

/// `max(0, x)` elementwise.
pub fn relu<T: Real>(input: &Tensor<T>) -> Tensor<T> {
    input.map(|v| if v > T::zero() { v } else { T::zero() })
}

/// Passes `grad_output` through where `input > 0`; the gradient at exactly zero is zero.
pub fn relu_backward<T: Real>(input: &Tensor<T>, grad_output: &Tensor<T>) -> Result<Tensor<T>> {
    if input.shape() != grad_output.shape() {
        return Err(Error::ShapeMismatch {
            context: "relu_backward",
            expected: input.shape().to_string(),
            actual: grad_output.shape().to_string(),
        });
    }
    let data = input
        .data()
        .iter()
        .zip(grad_output.data())
        .map(|(&x, &g)| if x > T::zero() { g } else { T::zero() })
        .collect();
    Ok(Tensor::from_raw(input.shape(), data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Shape;

    #[test]
    fn clamps_negatives() {
        let t = Tensor::from_vec(Shape::new(1, 1, 3), vec![-1.0f32, 0.0, 2.0]).unwrap();
        assert_eq!(relu(&t).data(), &[0.0, 0.0, 2.0]);
        let g = Tensor::filled(t.shape(), 5.0f32);
        assert_eq!(relu_backward(&t, &g).unwrap().data(), &[0.0, 0.0, 5.0]);
    }

    #[test]
    fn all_negative_is_all_zero() {
        let t = Tensor::filled(Shape::new(2, 3, 3), -0.5f32);
        assert!(relu(&t).data().iter().all(|&v| v == 0.0));
        let g = Tensor::filled(t.shape(), 1.0f32);
        assert!(relu_backward(&t, &g).unwrap().data().iter().all(|&v| v == 0.0));
    }
}
