//! Layout: ASCII magic `BGNM0001`, `u8` kind tag, `u32` layer count, then per
//! layer a `u8` type tag (0 conv, 1 relu, 2 pool, 3 dropout, 4 softmax). Conv
//! layers carry `u32` out, in, kernel height and width followed by `f32` kernels
//! in (o, i, h, w) order and `f32` biases; dropout carries its `f32` rate. All
//! values little-endian.

use std::path::Path;

use crate::netzoo::{LayerSpec, NetKind, NetworkParams, NetworkSpec};
use crate::tensor::ConvParams;
use crate::{Error, Result};

pub const MODEL_MAGIC: &[u8; 8] = b"BGNM0001";

pub fn encode_model(spec: &NetworkSpec, params: &NetworkParams) -> Result<Vec<u8>> {
    spec.validate()?;
    params.check(spec)?;
    let mut out = Vec::with_capacity(32 + 4 * params.param_count());
    out.extend_from_slice(MODEL_MAGIC);
    out.push(spec.kind.tag());
    out.extend_from_slice(&(spec.layers.len() as u32).to_le_bytes());
    let mut convs = params.convs.iter();
    let mut in_channels = spec.input_channels;
    for layer in &spec.layers {
        match *layer {
            LayerSpec::Conv { out_channels, .. } => {
                let c = convs.next().expect("checked against spec");
                out.push(0);
                for v in [c.out_channels, in_channels, c.kernel_h, c.kernel_w] {
                    out.extend_from_slice(&(v as u32).to_le_bytes());
                }
                for v in c.kernels.iter().chain(&c.bias) {
                    out.extend_from_slice(&v.to_le_bytes());
                }
                in_channels = out_channels;
            }
            LayerSpec::Relu => out.push(1),
            LayerSpec::MaxPool2 => out.push(2),
            LayerSpec::Dropout { p } => {
                out.push(3);
                out.extend_from_slice(&p.to_le_bytes());
            }
            LayerSpec::SoftmaxHead => out.push(4),
        }
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize, what: &str) -> Result<&[u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Truncated(format!(
                "model file ends at byte {} while reading {what}",
                self.bytes.len()
            )));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")) as usize)
    }

    fn f32s(&mut self, n: usize, what: &str) -> Result<Vec<f32>> {
        let len = n.checked_mul(4).ok_or_else(|| Error::Truncated(format!("{what} too large")))?;
        Ok(self
            .take(len, what)?
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect())
    }
}

pub fn decode_model(bytes: &[u8]) -> Result<(NetworkSpec, NetworkParams)> {
    if bytes.len() < 8 || &bytes[..8] != MODEL_MAGIC {
        return Err(Error::BadMagic { expected: "BGNM0001" });
    }
    let mut r = Reader { bytes, pos: 8 };
    let kind = NetKind::from_tag(r.u8("kind tag")?)?;
    let count = r.u32("layer count")?;
    let mut layers = Vec::new();
    let mut convs = Vec::new();
    for i in 0..count {
        let what = format!("layer {i}");
        match r.u8(&what)? {
            0 => {
                let (o, c, kh, kw) = (r.u32(&what)?, r.u32(&what)?, r.u32(&what)?, r.u32(&what)?);
                let n = o
                    .checked_mul(c)
                    .and_then(|v| v.checked_mul(kh))
                    .and_then(|v| v.checked_mul(kw))
                    .ok_or_else(|| Error::InvalidNetwork(format!("{what}: conv dimensions overflow")))?;
                let kernels = r.f32s(n, &what)?;
                let bias = r.f32s(o, &what)?;
                convs.push(ConvParams::new(o, c, kh, kw, kernels, bias)?);
                layers.push(LayerSpec::Conv {
                    out_channels: o,
                    kernel_h: kh,
                    kernel_w: kw,
                });
            }
            1 => layers.push(LayerSpec::Relu),
            2 => layers.push(LayerSpec::MaxPool2),
            3 => {
                let p = r.f32s(1, &what)?[0];
                layers.push(LayerSpec::Dropout { p });
            }
            4 => layers.push(LayerSpec::SoftmaxHead),
            tag => return Err(Error::UnknownLayerTag(tag)),
        }
    }
    if r.pos != bytes.len() {
        return Err(Error::TrailingData(bytes.len() - r.pos));
    }
    let spec = NetworkSpec {
        kind,
        window: kind.window(),
        input_channels: 1,
        layers,
    };
    spec.validate()?;
    let params = NetworkParams { convs, training: false };
    params.check(&spec)?;
    Ok((spec, params))
}

pub fn save_model(spec: &NetworkSpec, params: &NetworkParams, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_model(spec, params)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<(NetworkSpec, NetworkParams)> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_model(&bytes)
}
