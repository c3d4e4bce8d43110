use super::Real;

/// Result of the softmax cross-entropy head.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftmaxXent<T = f32> {
    pub probs: Vec<T>,
    pub loss: T,
}

/// Max-shifted softmax.
pub fn softmax<T: Real>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Softmax followed by the negative log-likelihood of `label`.
///
/// The loss is computed as `logsumexp(logits) − logits[label]` so that it stays
/// finite even when `probs[label]` underflows.
pub fn softmax_xent<T: Real>(logits: &[T], label: usize) -> SoftmaxXent<T> {
    assert!(label < logits.len(), "label {label} out of range for {} logits", logits.len());
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let sum: T = logits.iter().map(|&l| (l - max).exp()).sum();
    let probs = logits.iter().map(|&l| (l - max).exp() / sum).collect();
    let loss = sum.ln() + max - logits[label];
    SoftmaxXent { probs, loss }
}

/// Gradient of the loss with respect to the logits: `probs − onehot(label)`.
pub fn softmax_xent_backward<T: Real>(probs: &[T], label: usize) -> Vec<T> {
    probs
        .iter()
        .enumerate()
        .map(|(k, &p)| if k == label { p - T::one() } else { p })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equal_logits_are_uniform() {
        let out = softmax_xent(&[0.0f64, 0.0], 1);
        assert_eq!(out.probs, vec![0.5, 0.5]);
        assert!((out.loss - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn closed_form_two_class() {
        // p0 = 1 / (1 + e^{-3})
        let p0 = 1.0 / (1.0 + (-3.0f64).exp());
        let out = softmax_xent(&[2.0f64, -1.0], 0);
        assert!((out.probs[0] - p0).abs() < 1e-15);
        assert!((out.probs[0] - 0.9526).abs() < 1e-4);
        assert!((out.probs[1] - 0.0474).abs() < 1e-4);
    }

    #[test]
    fn confident_correct_label_has_vanishing_loss() {
        let out = softmax_xent(&[40.0f64, -40.0], 0);
        assert!(out.loss < 1e-30);
        let out = softmax_xent(&[1000.0f32, -1000.0], 1);
        assert!(out.loss.is_finite() && out.loss > 1999.0);
    }

    #[test]
    fn backward_is_probs_minus_onehot() {
        let out = softmax_xent(&[0.3f64, -0.2], 1);
        let g = softmax_xent_backward(&out.probs, 1);
        assert_eq!(g, vec![out.probs[0], out.probs[1] - 1.0]);
    }

    proptest! {
        #[test]
        fn probabilities_sum_to_one_and_stay_inside(a in -8.0f32..8.0, b in -8.0f32..8.0) {
            let p = softmax(&[a, b]);
            prop_assert!((p[0] + p[1] - 1.0).abs() <= 1e-6);
            prop_assert!(p.iter().all(|&v| v > 0.0 && v < 1.0));
        }

        #[test]
        fn shift_invariant(a in -20.0f64..20.0, b in -20.0f64..20.0, c in -50.0f64..50.0) {
            let p = softmax(&[a, b]);
            let q = softmax(&[a + c, b + c]);
            prop_assert!((p[0] - q[0]).abs() < 1e-12);
        }
    }
}
