use rand_distr::{Distribution, Normal};

use super::spec::NetworkSpec;
use crate::rng;
use crate::tensor::ConvParams;
use crate::{Error, Result};

/// Learned weights of a network, one [`ConvParams`] per conv layer in layer order.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkParams {
    pub convs: Vec<ConvParams<f32>>,
    /// Set while a trainer owns the parameters; inference refuses to run on them.
    pub training: bool,
}

impl NetworkParams {
    pub fn zeros(spec: &NetworkSpec) -> Self {
        let convs = spec
            .conv_layers()
            .iter()
            .map(|c| ConvParams::zeros(c.out_channels, c.in_channels, c.kernel_h, c.kernel_w))
            .collect();
        Self { convs, training: false }
    }

    /// He-normal kernels (`σ = √(2/fan_in)`) and zero biases, seeded.
    pub fn he_init(spec: &NetworkSpec, seed: u64) -> Self {
        let mut params = Self::zeros(spec);
        for (i, conv) in params.convs.iter_mut().enumerate() {
            let mut rng = rng::stream(seed, 0x696e_6974, i as u64);
            let std = (2.0 / conv.fan_in() as f64).sqrt();
            let normal = Normal::new(0.0, std).expect("finite std");
            for w in &mut conv.kernels {
                *w = normal.sample(&mut rng) as f32;
            }
        }
        params
    }

    /// Verifies that every conv's shape matches the layer it belongs to.
    pub fn check(&self, spec: &NetworkSpec) -> Result<()> {
        let layers = spec.conv_layers();
        if layers.len() != self.convs.len() {
            return Err(Error::ShapeMismatch {
                context: "NetworkParams",
                expected: format!("{} conv layers", layers.len()),
                actual: format!("{} conv layers", self.convs.len()),
            });
        }
        for (l, p) in layers.iter().zip(&self.convs) {
            let want = (l.out_channels, l.in_channels, l.kernel_h, l.kernel_w);
            let got = (p.out_channels, p.in_channels, p.kernel_h, p.kernel_w);
            if want != got || p.kernels.len() != p.fan_in() * p.out_channels || p.bias.len() != p.out_channels {
                return Err(Error::ShapeMismatch {
                    context: "NetworkParams conv layer",
                    expected: format!("{want:?} (out, in, h, w) at layer {}", l.layer_index),
                    actual: format!("{got:?}"),
                });
            }
        }
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        self.convs.iter().map(|c| c.kernels.len() + c.bias.len()).sum()
    }

    /// Parameter slices in a fixed order: kernels then bias of each conv layer.
    pub fn slices_mut(&mut self) -> Vec<&mut [f32]> {
        self.convs
            .iter_mut()
            .flat_map(|c| [c.kernels.as_mut_slice(), c.bias.as_mut_slice()])
            .collect()
    }

    pub fn slices(&self) -> Vec<&[f32]> {
        self.convs
            .iter()
            .flat_map(|c| [c.kernels.as_slice(), c.bias.as_slice()])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netzoo::{build_net, NetKind};

    #[test]
    fn he_init_is_seeded_and_scaled() {
        let spec = build_net(NetKind::Unigram);
        let a = NetworkParams::he_init(&spec, 5);
        let b = NetworkParams::he_init(&spec, 5);
        let c = NetworkParams::he_init(&spec, 6);
        assert_eq!(a, b);
        assert_ne!(a, c);
        a.check(&spec).unwrap();
        // Layer 3 has fan-in 32·25 = 800 and 51200 weights; sample std ≈ √(2/800).
        let w = &a.convs[2].kernels;
        let var = w.iter().map(|&v| (v as f64).powi(2)).sum::<f64>() / w.len() as f64;
        assert!((var.sqrt() - (2.0f64 / 800.0).sqrt()).abs() < 0.002);
        assert!(a.convs.iter().all(|c| c.bias.iter().all(|&b| b == 0.0)));
    }

    #[test]
    fn check_rejects_foreign_params() {
        let u = NetworkParams::zeros(&build_net(NetKind::Unigram));
        assert!(u.check(&build_net(NetKind::BigramShared)).is_err());
        assert!(u.check(&build_net(NetKind::BigramNaive)).is_err());
    }
}
