use rand::seq::SliceRandom;

use super::adam::{adam_step, AdamState};
use super::TrainConfig;
use crate::netzoo::{forward_logits, loss_and_grads, NetworkGrads, NetworkParams, NetworkSpec};
use crate::rng::{self, Rng};
use crate::synthgen::Sample;
use crate::tensor::{softmax_xent, Mode, Tensor};
use crate::{par, Error, Result};

const STREAM_SHUFFLE: u64 = 0x7368_7566;
const STREAM_DROPOUT: u64 = 0x6472_6f70;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochRecord {
    /// 1-based epoch number.
    pub epoch: usize,
    /// Mean training loss over the epoch, with dropout active.
    pub train_loss: f64,
    /// Validation accuracy and loss in eval mode; NaN without a validation set.
    pub val_accuracy: f64,
    pub val_loss: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainLog {
    pub epochs: Vec<EpochRecord>,
}

impl TrainLog {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_accuracy,val_loss\n");
        for r in &self.epochs {
            out.push_str(&format!("{},{:.6},{:.6},{:.6}\n", r.epoch, r.train_loss, r.val_accuracy, r.val_loss));
        }
        out
    }
}

fn check_dims(spec: &NetworkSpec, data: &[Sample], what: &str) -> Result<()> {
    let (w, h) = (spec.window.width, spec.window.height);
    match data.iter().position(|s| (s.width(), s.height()) != (w, h)) {
        Some(i) => Err(Error::DimensionMismatch(format!(
            "{what} sample {i} is {}x{}, network {} expects {w}x{h}",
            data[i].width(),
            data[i].height(),
            spec.kind.name()
        ))),
        None => Ok(()),
    }
}

/// Mean eval-mode loss and accuracy (text iff p(text) ≥ 0.5) over `data`.
pub fn evaluate(spec: &NetworkSpec, params: &NetworkParams, data: &[Sample]) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_dims(spec, data, "evaluation")?;
    let per: Vec<Result<(f64, bool)>> = par::map_range(data.len(), |i| {
        let s = &data[i];
        let logits = forward_logits(spec, params, &s.patch.to_tensor())?;
        let out = softmax_xent(&logits.map(|v| v as f64), s.label.class());
        let predicted = out.probs[1] >= 0.5;
        Ok((out.loss, predicted == s.label.is_text()))
    });
    let mut loss = 0.0;
    let mut correct = 0usize;
    for r in per {
        let (l, ok) = r?;
        loss += l;
        correct += ok as usize;
    }
    Ok((loss / data.len() as f64, correct as f64 / data.len() as f64))
}

/// Mean gradient and summed loss of one batch. Per-sample work may run in
/// parallel; the reduction is in batch order.
fn batch_gradients(
    spec: &NetworkSpec,
    params: &NetworkParams,
    data: &[Sample],
    batch: &[usize],
    dropout_seeds: &[u64],
) -> Result<(NetworkGrads, f64)> {
    let per = par::map_range(batch.len(), |j| {
        let s = &data[batch[j]];
        let mut r = <Rng as rand::SeedableRng>::seed_from_u64(dropout_seeds[j]);
        let patch: Tensor<f32> = s.patch.to_tensor();
        loss_and_grads(spec, params, &patch, s.label.class(), Mode::Train, &mut r)
    });
    let mut total = NetworkGrads::zeros_like(params);
    let mut loss = 0.0f64;
    for g in per {
        let g = g?;
        total.add_assign(&g.grads);
        loss += g.loss as f64;
    }
    total.scale(1.0 / batch.len() as f32);
    Ok((total, loss))
}

/// [`train_with_progress`] without a callback.
pub fn train(
    spec: &NetworkSpec,
    data: &[Sample],
    val: &[Sample],
    cfg: &TrainConfig,
) -> Result<(NetworkParams, TrainLog)> {
    train_with_progress(spec, data, val, cfg, |_| {})
}

/// Trains from a seeded He initialization with mini-batch Adam, calling
/// `on_epoch` after every epoch. An empty `val` set yields NaN validation fields.
pub fn train_with_progress(
    spec: &NetworkSpec,
    data: &[Sample],
    val: &[Sample],
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<(NetworkParams, TrainLog)> {
    cfg.validate()?;
    spec.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_dims(spec, data, "training")?;
    check_dims(spec, val, "validation")?;

    let mut params = NetworkParams::he_init(spec, cfg.seed);
    let mut state = AdamState::new(&params.slices());
    let mut log = TrainLog::default();
    let mut order: Vec<usize> = (0..data.len()).collect();

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng::stream(cfg.seed, STREAM_SHUFFLE, epoch as u64));
        let mut loss_sum = 0.0;
        for (b, batch) in order.chunks(cfg.batch_size).enumerate() {
            let base = (b * cfg.batch_size) as u64;
            let seeds: Vec<u64> = (0..batch.len())
                .map(|j| rng::derive_seed(cfg.seed ^ STREAM_DROPOUT, epoch as u64, base + j as u64))
                .collect();
            params.training = true;
            let (grads, loss) = batch_gradients(spec, &params, data, batch, &seeds)?;
            loss_sum += loss;
            adam_step(&mut params.slices_mut(), &grads.slices(), &mut state, cfg)?;
        }
        params.training = false;
        if params.slices().iter().any(|s| s.iter().any(|v| !v.is_finite())) {
            return Err(Error::NonFinite);
        }
        let (val_loss, val_accuracy) = if val.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            evaluate(spec, &params, val)?
        };
        let record = EpochRecord {
            epoch: epoch + 1,
            train_loss: loss_sum / data.len() as f64,
            val_accuracy,
            val_loss,
        };
        on_epoch(&record);
        log.epochs.push(record);
    }
    params.training = false;
    Ok((params, log))
}
