use std::fmt;
use std::str::FromStr;

use crate::tensor::Shape;
use crate::{Error, Result};

/// Index of the "text" class in the two-way softmax head.
pub const TEXT_CLASS: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NetKind {
    Unigram,
    BigramNaive,
    BigramShared,
}

impl NetKind {
    pub const ALL: [NetKind; 3] = [NetKind::Unigram, NetKind::BigramNaive, NetKind::BigramShared];

    pub fn name(self) -> &'static str {
        match self {
            NetKind::Unigram => "unigram",
            NetKind::BigramNaive => "bigram-naive",
            NetKind::BigramShared => "bigram-shared",
        }
    }

    /// Tag byte used by the model file format.
    pub fn tag(self) -> u8 {
        match self {
            NetKind::Unigram => 0,
            NetKind::BigramNaive => 1,
            NetKind::BigramShared => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(NetKind::Unigram),
            1 => Ok(NetKind::BigramNaive),
            2 => Ok(NetKind::BigramShared),
            t => Err(Error::UnknownKindTag(t)),
        }
    }

    pub fn window(self) -> Window {
        match self {
            NetKind::Unigram => Window::new(32, 32),
            NetKind::BigramNaive | NetKind::BigramShared => Window::new(64, 32),
        }
    }

    pub fn is_bigram(self) -> bool {
        self != NetKind::Unigram
    }
}

impl fmt::Display for NetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NetKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown network {s:?}; expected unigram, bigram-naive or bigram-shared")))
    }
}

/// Window size in pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub width: usize,
    pub height: usize,
}

impl Window {
    pub const fn new(width: usize, height: usize) -> Self {
        Self { width, height }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LayerSpec {
    Conv {
        out_channels: usize,
        kernel_h: usize,
        kernel_w: usize,
    },
    Relu,
    MaxPool2,
    Dropout {
        p: f32,
    },
    SoftmaxHead,
}

impl fmt::Display for LayerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Kernel sizes are printed width×height.
            LayerSpec::Conv {
                out_channels,
                kernel_h,
                kernel_w,
            } => write!(f, "conv {kernel_w}x{kernel_h}x{out_channels}"),
            LayerSpec::Relu => f.write_str("relu"),
            LayerSpec::MaxPool2 => f.write_str("maxpool 2x2"),
            LayerSpec::Dropout { p } => write!(f, "dropout {p}"),
            LayerSpec::SoftmaxHead => f.write_str("softmax"),
        }
    }
}

/// A conv layer with its resolved input channel count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvLayer {
    pub layer_index: usize,
    pub in_channels: usize,
    pub out_channels: usize,
    pub kernel_h: usize,
    pub kernel_w: usize,
    /// Product of the pooling strides applied before this layer, per axis.
    pub downsample: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSpec {
    pub kind: NetKind,
    pub window: Window,
    pub input_channels: usize,
    pub layers: Vec<LayerSpec>,
}

fn conv(out_channels: usize, kernel_w: usize, kernel_h: usize) -> LayerSpec {
    LayerSpec::Conv {
        out_channels,
        kernel_h,
        kernel_w,
    }
}

/// The reference architecture for `kind`.
///
/// All three share the 5×5×16 first layer and a 2-way 1×1 classifier preceded by
/// dropout 0.5. Kernel arguments below are `(out_channels, width, height)`.
pub fn build_net(kind: NetKind) -> NetworkSpec {
    use LayerSpec::{Dropout, MaxPool2, Relu, SoftmaxHead};
    let layers = match kind {
        NetKind::Unigram => vec![
            conv(16, 5, 5),
            Relu,
            MaxPool2,
            conv(32, 5, 5),
            Relu,
            MaxPool2,
            conv(64, 5, 5),
            Relu,
            Dropout { p: 0.5 },
            conv(2, 1, 1),
            SoftmaxHead,
        ],
        NetKind::BigramNaive => vec![
            conv(16, 5, 5),
            Relu,
            MaxPool2,
            conv(32, 13, 5),
            Relu,
            MaxPool2,
            conv(64, 9, 5),
            Relu,
            Dropout { p: 0.5 },
            conv(2, 1, 1),
            SoftmaxHead,
        ],
        // Unigram trunk, then a 9-wide, 1-tall layer combining neighbouring letters.
        NetKind::BigramShared => vec![
            conv(16, 5, 5),
            Relu,
            MaxPool2,
            conv(32, 5, 5),
            Relu,
            MaxPool2,
            conv(64, 5, 5),
            Relu,
            conv(48, 9, 1),
            Relu,
            Dropout { p: 0.5 },
            conv(2, 1, 1),
            SoftmaxHead,
        ],
    };
    let spec = NetworkSpec {
        kind,
        window: kind.window(),
        input_channels: 1,
        layers,
    };
    debug_assert!(spec.validate().is_ok());
    spec
}

impl NetworkSpec {
    /// Output shape after every layer for an input of `input` shape. With `truncate`
    /// set, pooling drops a trailing odd row/column instead of failing.
    pub fn shape_chain(&self, input: Shape, truncate: bool) -> Result<Vec<Shape>> {
        let mut shape = input;
        let mut chain = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            shape = match *layer {
                LayerSpec::Conv {
                    out_channels,
                    kernel_h,
                    kernel_w,
                } => {
                    if shape.height < kernel_h || shape.width < kernel_w {
                        return Err(Error::InvalidNetwork(format!(
                            "layer {i} ({layer}) does not fit its {shape} input"
                        )));
                    }
                    Shape::new(out_channels, shape.height - kernel_h + 1, shape.width - kernel_w + 1)
                }
                LayerSpec::MaxPool2 => {
                    if !truncate && (shape.height % 2 != 0 || shape.width % 2 != 0) {
                        return Err(Error::InvalidNetwork(format!("layer {i} pools an odd {shape} input")));
                    }
                    Shape::new(shape.channels, shape.height / 2, shape.width / 2)
                }
                LayerSpec::Relu | LayerSpec::Dropout { .. } | LayerSpec::SoftmaxHead => shape,
            };
            if shape.is_empty() {
                return Err(Error::InvalidNetwork(format!("layer {i} ({layer}) produces an empty output")));
            }
            chain.push(shape);
        }
        Ok(chain)
    }

    /// Checks the structural invariants: a single trailing softmax head, valid
    /// dropout rates, and a shape chain that ends in 2×1×1 on the nominal window.
    pub fn validate(&self) -> Result<()> {
        if self.input_channels == 0 {
            return Err(Error::InvalidNetwork("zero input channels".into()));
        }
        match self.layers.iter().position(|l| *l == LayerSpec::SoftmaxHead) {
            Some(i) if i + 1 == self.layers.len() => {}
            _ => return Err(Error::InvalidNetwork("network must end in exactly one softmax head".into())),
        }
        if self.layers.iter().filter(|l| **l == LayerSpec::SoftmaxHead).count() != 1 {
            return Err(Error::InvalidNetwork("network must end in exactly one softmax head".into()));
        }
        for l in &self.layers {
            if let LayerSpec::Dropout { p } = l {
                if !(0.0..1.0).contains(p) {
                    return Err(Error::InvalidDropout(*p as f64));
                }
            }
            if let LayerSpec::Conv {
                out_channels,
                kernel_h,
                kernel_w,
            } = l
            {
                if *out_channels == 0 || *kernel_h == 0 || *kernel_w == 0 {
                    return Err(Error::InvalidNetwork(format!("degenerate layer {l}")));
                }
            }
        }
        let input = Shape::new(self.input_channels, self.window.height, self.window.width);
        let chain = self.shape_chain(input, false)?;
        let logits = chain[chain.len() - 1];
        if logits != Shape::new(2, 1, 1) {
            return Err(Error::InvalidNetwork(format!(
                "shape chain over the {} window ends in {logits}, expected 2x1x1",
                self.window
            )));
        }
        Ok(())
    }

    pub fn conv_layers(&self) -> Vec<ConvLayer> {
        let mut in_channels = self.input_channels;
        let mut downsample = 1;
        let mut out = Vec::new();
        for (layer_index, layer) in self.layers.iter().enumerate() {
            match *layer {
                LayerSpec::Conv {
                    out_channels,
                    kernel_h,
                    kernel_w,
                } => {
                    out.push(ConvLayer {
                        layer_index,
                        in_channels,
                        out_channels,
                        kernel_h,
                        kernel_w,
                        downsample,
                    });
                    in_channels = out_channels;
                }
                LayerSpec::MaxPool2 => downsample *= 2,
                _ => {}
            }
        }
        out
    }

    /// Distance in input pixels between adjacent dense-output cells.
    pub fn grid_stride(&self) -> usize {
        self.layers.iter().filter(|l| **l == LayerSpec::MaxPool2).fold(1, |s, _| s * 2)
    }
}
