use super::{Real, Shape, Tensor};
use crate::{Error, Result};

fn pool_impl<T: Real>(input: &Tensor<T>) -> Tensor<T> {
    let s = input.shape();
    let out = Shape::new(s.channels, s.height / 2, s.width / 2);
    Tensor::from_fn(out, |c, y, x| {
        let (y2, x2) = (2 * y, 2 * x);
        input
            .get(c, y2, x2)
            .max(input.get(c, y2, x2 + 1))
            .max(input.get(c, y2 + 1, x2))
            .max(input.get(c, y2 + 1, x2 + 1))
    })
}

/// Non-overlapping 2×2 max pooling with stride 2. Odd dimensions are rejected.
pub fn maxpool2<T: Real>(input: &Tensor<T>) -> Result<Tensor<T>> {
    let s = input.shape();
    if s.height % 2 != 0 || s.width % 2 != 0 {
        return Err(Error::OddPoolInput {
            height: s.height,
            width: s.width,
        });
    }
    Ok(pool_impl(input))
}

/// 2×2 max pooling that drops a trailing odd row or column, used for dense
/// inference where every kept cell still corresponds to an aligned window.
pub fn maxpool2_truncating<T: Real>(input: &Tensor<T>) -> Tensor<T> {
    pool_impl(input)
}

/// Routes each pooled gradient to the argmax of its block. Ties go to the first
/// element in row-major order.
pub fn maxpool2_backward<T: Real>(input: &Tensor<T>, grad_output: &Tensor<T>) -> Result<Tensor<T>> {
    let s = input.shape();
    let expected = Shape::new(s.channels, s.height / 2, s.width / 2);
    if grad_output.shape() != expected {
        return Err(Error::ShapeMismatch {
            context: "maxpool2_backward",
            expected: expected.to_string(),
            actual: grad_output.shape().to_string(),
        });
    }
    let mut grad = Tensor::zeros(s);
    for c in 0..expected.channels {
        for y in 0..expected.height {
            for x in 0..expected.width {
                let (mut by, mut bx) = (2 * y, 2 * x);
                let mut best = input.get(c, by, bx);
                for (dy, dx) in [(0, 1), (1, 0), (1, 1)] {
                    let v = input.get(c, 2 * y + dy, 2 * x + dx);
                    if v > best {
                        best = v;
                        by = 2 * y + dy;
                        bx = 2 * x + dx;
                    }
                }
                grad.set(c, by, bx, grad_output.get(c, y, x));
            }
        }
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unigram_pool_shape() {
        let t = Tensor::<f32>::zeros(Shape::new(16, 28, 28));
        assert_eq!(maxpool2(&t).unwrap().shape(), Shape::new(16, 14, 14));
    }

    #[test]
    fn block_max() {
        let t = Tensor::from_vec(Shape::new(1, 2, 2), vec![1.0f32, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(maxpool2(&t).unwrap().data(), &[4.0]);
    }

    #[test]
    fn odd_input_rejected_but_truncated_in_dense_mode() {
        let t = Tensor::<f32>::zeros(Shape::new(1, 5, 4));
        assert!(matches!(maxpool2(&t), Err(Error::OddPoolInput { height: 5, width: 4 })));
        assert_eq!(maxpool2_truncating(&t).shape(), Shape::new(1, 2, 2));
    }

    #[test]
    fn backward_routes_to_each_argmax_position() {
        for argmax in 0..4 {
            let mut data = vec![0.0f32; 4];
            data[argmax] = 1.0;
            let t = Tensor::from_vec(Shape::new(1, 2, 2), data).unwrap();
            let g = Tensor::filled(Shape::new(1, 1, 1), 3.0f32);
            let back = maxpool2_backward(&t, &g).unwrap();
            for (i, &v) in back.data().iter().enumerate() {
                assert_eq!(v, if i == argmax { 3.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn ties_go_to_first_in_row_major_order() {
        let t = Tensor::from_vec(Shape::new(1, 2, 2), vec![0.0f32, 2.0, 2.0, 2.0]).unwrap();
        let g = Tensor::filled(Shape::new(1, 1, 1), 1.0f32);
        assert_eq!(maxpool2_backward(&t, &g).unwrap().data(), &[0.0, 1.0, 0.0, 0.0]);
    }
}
