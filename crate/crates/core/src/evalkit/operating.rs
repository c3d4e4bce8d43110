use super::roc::{f_score, RocPoint};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatingPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub recall: f64,
    pub precision: f64,
    pub f_score: f64,
}

/// The curve point with precision at least `target` and the highest recall.
///
/// Among points of equal recall the one with the lowest false positive rate
/// wins. Points that classify nothing as text are not candidates.
pub fn operating_point(curve: &[RocPoint], target: f64) -> Result<OperatingPoint> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::InvalidConfig(format!("target precision must lie in (0, 1], got {target}")));
    }
    let candidates = curve.iter().filter(|p| p.tp + p.fp > 0);
    let best = candidates.clone().filter(|p| p.precision >= target).min_by(|a, b| {
        b.recall
            .total_cmp(&a.recall)
            .then(a.fpr.total_cmp(&b.fpr))
            .then(b.threshold.total_cmp(&a.threshold))
    });
    match best {
        Some(p) => Ok(OperatingPoint {
            threshold: p.threshold,
            fpr: p.fpr,
            recall: p.recall,
            precision: p.precision,
            f_score: f_score(p.precision, p.recall),
        }),
        None => Err(Error::PrecisionUnreachable {
            target,
            max_precision: candidates.map(|p| p.precision).fold(0.0, f64::max),
        }),
    }
}

/// Relative false positive rate reduction of `b` against baseline `a`.
pub fn relative_reduction(fpr_a: f64, fpr_b: f64) -> Result<f64> {
    if fpr_a == 0.0 {
        return Err(Error::BaselinePerfect);
    }
    Ok((fpr_a - fpr_b) / fpr_a)
}

/// `(fpr_a − fpr_b)/fpr_a` at the `target` precision operating points.
pub fn compare(curve_a: &[RocPoint], curve_b: &[RocPoint], target: f64) -> Result<f64> {
    let a = operating_point(curve_a, target)?;
    let b = operating_point(curve_b, target)?;
    relative_reduction(a.fpr, b.fpr)
}
