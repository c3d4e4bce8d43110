use super::spec::{LayerSpec, NetworkSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct LayerMacs {
    pub layer_index: usize,
    pub layer: LayerSpec,
    pub in_channels: usize,
    /// Cumulative pooling factor per axis before this layer.
    pub downsample: usize,
    pub macs_per_pixel: f64,
}

/// Multiply-accumulates per full-resolution input pixel, by conv layer.
#[derive(Clone, Debug, PartialEq)]
pub struct MacReport {
    pub layers: Vec<LayerMacs>,
    pub total: f64,
}

/// Analytic MACs per input pixel of a dense pass.
///
/// A conv layer running on a grid downsampled by `d` per axis costs
/// `out_c · in_c · kernel_h · kernel_w / d²` per input pixel. Only convolutions
/// are counted.
pub fn count_macs(spec: &NetworkSpec) -> MacReport {
    let layers: Vec<LayerMacs> = spec
        .conv_layers()
        .into_iter()
        .map(|c| LayerMacs {
            layer_index: c.layer_index,
            layer: spec.layers[c.layer_index],
            in_channels: c.in_channels,
            downsample: c.downsample,
            macs_per_pixel: (c.out_channels * c.in_channels * c.kernel_h * c.kernel_w) as f64
                / (c.downsample * c.downsample) as f64,
        })
        .collect();
    let total = layers.iter().map(|l| l.macs_per_pixel).sum();
    MacReport { layers, total }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netzoo::{build_net, NetKind, Window};

    #[test]
    fn single_conv_without_pooling() {
        let spec = NetworkSpec {
            kind: NetKind::Unigram,
            window: Window::new(3, 3),
            input_channels: 4,
            layers: vec![
                LayerSpec::Conv {
                    out_channels: 2,
                    kernel_h: 3,
                    kernel_w: 3,
                },
                LayerSpec::SoftmaxHead,
            ],
        };
        spec.validate().unwrap();
        assert_eq!(count_macs(&spec).total, (2 * 4 * 3 * 3) as f64);
    }

    #[test]
    fn reference_totals() {
        let u = count_macs(&build_net(NetKind::Unigram));
        let per_layer: Vec<f64> = u.layers.iter().map(|l| l.macs_per_pixel).collect();
        assert_eq!(per_layer, vec![400.0, 3200.0, 3200.0, 8.0]);
        assert_eq!(u.total, 6808.0);

        let s = count_macs(&build_net(NetKind::BigramShared));
        let per_layer: Vec<f64> = s.layers.iter().map(|l| l.macs_per_pixel).collect();
        assert_eq!(per_layer, vec![400.0, 3200.0, 3200.0, 1728.0, 6.0]);
        assert_eq!(s.total, 8534.0);
        assert!((s.total / u.total - 1.2535).abs() < 1e-4);

        let n = count_macs(&build_net(NetKind::BigramNaive));
        assert_eq!(n.total, 400.0 + 8320.0 + 5760.0 + 8.0);
        assert!(n.total > s.total && s.total > u.total);
    }

    #[test]
    fn total_is_sum_of_layers() {
        for kind in NetKind::ALL {
            let r = count_macs(&build_net(kind));
            assert_eq!(r.total, r.layers.iter().map(|l| l.macs_per_pixel).sum::<f64>());
        }
    }
}
