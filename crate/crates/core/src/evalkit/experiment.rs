//! The unigram versus bigram comparison: generate, train, score, compare.

use super::operating::{operating_point, relative_reduction, OperatingPoint};
use super::report::{format_comparison, ComparisonRow};
use super::roc::{roc_curve, score_dataset, RocPoint};
use crate::netzoo::{build_net, count_macs, NetKind, NetworkParams, NetworkSpec};
use crate::rng::derive_seed;
use crate::synthgen::{generate_dataset, DataKind, GenConfig, Sample};
use crate::trainer::{train_with_progress, EpochRecord, TrainConfig, TrainLog};
use crate::Result;

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub train_count: usize,
    pub val_count: usize,
    pub test_count: usize,
    pub epochs: usize,
    pub seed: u64,
    pub precision: f64,
    /// Generator settings shared by all splits; kind, count and seed are
    /// overridden per split.
    pub generator: GenConfig,
    pub trainer: TrainConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            train_count: 20_000,
            val_count: 1_000,
            test_count: 4_000,
            epochs: 10,
            seed: 2016,
            precision: 0.9,
            generator: GenConfig::new(DataKind::Unigram, 1, 0),
            trainer: TrainConfig::default(),
        }
    }
}

/// One trained detector and its held-out evaluation.
#[derive(Debug)]
pub struct Arm {
    pub spec: NetworkSpec,
    pub params: NetworkParams,
    pub log: TrainLog,
    pub curve: Vec<RocPoint>,
    pub point: Result<OperatingPoint>,
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub unigram: Arm,
    pub bigram: Arm,
    pub reduction: Result<f64>,
    pub precision: f64,
}

impl ExperimentOutcome {
    pub fn table(&self) -> String {
        let mut rows = Vec::new();
        let mut notes = String::new();
        for arm in [&self.unigram, &self.bigram] {
            match &arm.point {
                Ok(p) => rows.push(ComparisonRow {
                    name: arm.spec.kind.name().to_string(),
                    macs_per_pixel: Some(count_macs(&arm.spec).total),
                    point: *p,
                }),
                Err(e) => notes.push_str(&format!("{}: {e}\n", arm.spec.kind.name())),
            }
        }
        let mut out = format_comparison(&rows, self.precision, self.reduction.as_ref().ok().copied());
        if let Err(e) = &self.reduction {
            notes.push_str(&format!("relative FPR reduction unavailable: {e}\n"));
        }
        out.push_str(&notes);
        out
    }
}

/// Phase notifications from [`run_experiment`].
#[derive(Clone, Debug)]
pub enum Progress<'a> {
    Generated { kind: DataKind, split: &'static str, count: usize },
    Epoch { net: NetKind, record: &'a EpochRecord },
    Scored { net: NetKind },
}

fn split(cfg: &ExperimentConfig, kind: DataKind, index: u64, count: usize) -> Result<Vec<Sample>> {
    let g = GenConfig {
        kind,
        count,
        seed: derive_seed(cfg.seed, 0x6461_7461 + kind as u64, index),
        ..cfg.generator.clone()
    };
    Ok(generate_dataset(&g)?.into_iter().map(|g| g.sample).collect())
}

fn run_arm(
    cfg: &ExperimentConfig,
    kind: DataKind,
    net: NetKind,
    progress: &mut dyn FnMut(Progress<'_>),
) -> Result<Arm> {
    let mut data = Vec::new();
    for (i, (name, count)) in [("train", cfg.train_count), ("val", cfg.val_count), ("test", cfg.test_count)]
        .into_iter()
        .enumerate()
    {
        data.push(if count == 0 { Vec::new() } else { split(cfg, kind, i as u64, count)? });
        progress(Progress::Generated { kind, split: name, count });
    }
    let spec = build_net(net);
    let tcfg = TrainConfig {
        epochs: cfg.epochs,
        seed: derive_seed(cfg.seed, 0x6e65_74, net.tag() as u64),
        ..cfg.trainer.clone()
    };
    let (params, log) = train_with_progress(&spec, &data[0], &data[1], &tcfg, |record| {
        progress(Progress::Epoch { net, record })
    })?;
    let curve = roc_curve(&score_dataset(&spec, &params, &data[2])?)?;
    progress(Progress::Scored { net });
    let point = operating_point(&curve, cfg.precision);
    Ok(Arm {
        spec,
        params,
        log,
        curve,
        point,
    })
}

/// Trains Unigram on unigram data and BigramShared on bigram data, then
/// compares their false positive rates at the target precision on held-out sets.
pub fn run_experiment(cfg: &ExperimentConfig, mut progress: impl FnMut(Progress<'_>)) -> Result<ExperimentOutcome> {
    cfg.generator.validate()?;
    let unigram = run_arm(cfg, DataKind::Unigram, NetKind::Unigram, &mut progress)?;
    let bigram = run_arm(cfg, DataKind::Bigram, NetKind::BigramShared, &mut progress)?;
    let reduction = match (&unigram.point, &bigram.point) {
        (Ok(a), Ok(b)) => relative_reduction(a.fpr, b.fpr),
        (Err(_), _) => Err(crate::Error::InvalidConfig("unigram operating point unavailable".into())),
        (_, Err(_)) => Err(crate::Error::InvalidConfig("bigram operating point unavailable".into())),
    };
    Ok(ExperimentOutcome {
        unigram,
        bigram,
        reduction,
        precision: cfg.precision,
    })
}
