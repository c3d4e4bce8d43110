use crate::netzoo::{forward_window, NetworkParams, NetworkSpec};
use crate::synthgen::Sample;
use crate::{par, Error, Result};

/// Offset above 1.0 of the all-negative endpoint threshold.
pub const TOP_EPSILON: f64 = 1e-6;

/// Classifier scores paired with ground-truth labels.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoredSet {
    pub scores: Vec<f64>,
    pub labels: Vec<bool>,
}

impl ScoredSet {
    pub fn new(scores: Vec<f64>, labels: Vec<bool>) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::ShapeMismatch {
                context: "ScoredSet",
                expected: format!("{} labels", scores.len()),
                actual: format!("{} labels", labels.len()),
            });
        }
        if let Some(s) = scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(Error::InvalidConfig(format!("score {s} outside [0, 1]")));
        }
        Ok(Self { scores, labels })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn negatives(&self) -> usize {
        self.len() - self.positives()
    }
}

/// Text probability of every sample, in eval mode.
pub fn score_dataset(spec: &NetworkSpec, params: &NetworkParams, data: &[Sample]) -> Result<ScoredSet> {
    let (w, h) = (spec.window.width, spec.window.height);
    if let Some(i) = data.iter().position(|s| (s.width(), s.height()) != (w, h)) {
        return Err(Error::DimensionMismatch(format!(
            "sample {i} is {}x{}, network {} expects {w}x{h}",
            data[i].width(),
            data[i].height(),
            spec.kind.name()
        )));
    }
    let scores = par::map_range(data.len(), |i| forward_window(spec, params, &data[i].patch.to_tensor()))
        .into_iter()
        .map(|r| r.map(f64::from))
        .collect::<Result<Vec<f64>>>()?;
    ScoredSet::new(scores, data.iter().map(|s| s.label.is_text()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RocPoint {
    pub threshold: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
    pub tpr: f64,
    pub fpr: f64,
    /// `tp/(tp+fp)`, or 1 when nothing is classified positive.
    pub precision: f64,
    pub recall: f64,
}

impl RocPoint {
    pub fn from_counts(threshold: f64, tp: usize, fp: usize, tn: usize, fn_: usize) -> Self {
        let p = (tp + fn_) as f64;
        let n = (fp + tn) as f64;
        let tpr = tp as f64 / p;
        Self {
            threshold,
            tp,
            fp,
            tn,
            fn_,
            tpr,
            fpr: fp as f64 / n,
            precision: if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 1.0 },
            recall: tpr,
        }
    }

    pub fn f_score(&self) -> f64 {
        f_score(self.precision, self.recall)
    }
}

/// Harmonic mean of precision and recall (0 when both are 0).
pub fn f_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

fn check_classes(set: &ScoredSet) -> Result<()> {
    let (p, n) = (set.positives(), set.negatives());
    if p == 0 || n == 0 {
        return Err(Error::SingleClass {
            positives: p,
            negatives: n,
        });
    }
    Ok(())
}

/// Confusion counts when classifying `score ≥ threshold` as text.
pub fn confusion_at(set: &ScoredSet, threshold: f64) -> Result<RocPoint> {
    check_classes(set)?;
    let (mut tp, mut fp) = (0, 0);
    for (&s, &l) in set.scores.iter().zip(&set.labels) {
        if s >= threshold {
            if l {
                tp += 1;
            } else {
                fp += 1;
            }
        }
    }
    Ok(RocPoint::from_counts(threshold, tp, fp, set.negatives() - fp, set.positives() - tp))
}

/// Points at `1 + ε`, at every distinct score, and at `0.0`, by descending
/// threshold; classification is `score ≥ threshold`.
pub fn roc_curve(set: &ScoredSet) -> Result<Vec<RocPoint>> {
    check_classes(set)?;
    let (p, n) = (set.positives(), set.negatives());
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by(|&a, &b| set.scores[b].total_cmp(&set.scores[a]));

    let mut points = vec![RocPoint::from_counts(1.0 + TOP_EPSILON, 0, 0, n, p)];
    let (mut tp, mut fp) = (0, 0);
    let mut i = 0;
    while i < order.len() {
        let threshold = set.scores[order[i]];
        while i < order.len() && set.scores[order[i]] == threshold {
            if set.labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint::from_counts(threshold, tp, fp, n - fp, p - tp));
    }
    if points.last().is_some_and(|pt| pt.threshold > 0.0) {
        points.push(RocPoint::from_counts(0.0, p, n, 0, 0));
    }
    Ok(points)
}
