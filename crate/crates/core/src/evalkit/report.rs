use std::fmt::Write as _;
use std::path::Path;

use super::operating::OperatingPoint;
use super::roc::RocPoint;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "threshold,tp,fp,tn,fn,tpr,fpr,precision,recall";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Svg,
}

/// One row per point, reals with six decimals.
pub fn roc_to_csv(curve: &[RocPoint]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for p in curve {
        writeln!(
            out,
            "{:.6},{},{},{},{},{:.6},{:.6},{:.6},{:.6}",
            p.threshold, p.tp, p.fp, p.tn, p.fn_, p.tpr, p.fpr, p.precision, p.recall
        )
        .expect("writing to a String");
    }
    out
}

pub fn parse_roc_csv(text: &str) -> Result<Vec<RocPoint>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Csv(e.to_string()))?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(Error::Csv(format!("expected header {CSV_HEADER:?}")));
    }
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        let row = i + 2;
        let field = |k: usize| record.get(k).unwrap_or("");
        let real = |k: usize| {
            field(k)
                .parse::<f64>()
                .map_err(|_| Error::Csv(format!("line {row}: field {} is not a number: {:?}", k + 1, field(k))))
        };
        let count = |k: usize| {
            field(k)
                .parse::<usize>()
                .map_err(|_| Error::Csv(format!("line {row}: field {} is not a count: {:?}", k + 1, field(k))))
        };
        points.push(RocPoint {
            threshold: real(0)?,
            tp: count(1)?,
            fp: count(2)?,
            tn: count(3)?,
            fn_: count(4)?,
            tpr: real(5)?,
            fpr: real(6)?,
            precision: real(7)?,
            recall: real(8)?,
        });
    }
    if points.is_empty() {
        return Err(Error::Csv("no data rows".into()));
    }
    Ok(points)
}

/// Self-contained SVG plot of the (fpr, tpr) staircase with labelled axes.
pub fn roc_to_svg(curve: &[RocPoint], title: &str) -> String {
    const SIZE: f64 = 400.0;
    const MARGIN: f64 = 50.0;
    let x = |fpr: f64| MARGIN + fpr * SIZE;
    let y = |tpr: f64| MARGIN + (1.0 - tpr) * SIZE;
    let pts: Vec<String> = curve.iter().map(|p| format!("{:.2},{:.2}", x(p.fpr), y(p.tpr))).collect();
    let total = SIZE + 2.0 * MARGIN;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total}\" height=\"{total}\" viewBox=\"0 0 {total} {total}\">\n"
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"30\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        total / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        "<path d=\"M{m},{m} V{b} H{r}\" fill=\"none\" stroke=\"black\"/>",
        m = MARGIN,
        b = MARGIN + SIZE,
        r = MARGIN + SIZE
    );
    for i in 0..=10 {
        let v = i as f64 / 10.0;
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{v:.1}</text>",
            x(v),
            MARGIN + SIZE + 15.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{v:.1}</text>",
            MARGIN - 5.0,
            y(v) + 3.0
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">false positive rate</text>",
        total / 2.0,
        total - 10.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"14\" y=\"{0}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {0})\">true positive rate</text>",
        total / 2.0
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbb\" stroke-dasharray=\"4 4\"/>",
        x(0.0),
        y(0.0),
        x(1.0),
        y(1.0)
    );
    let _ = writeln!(
        svg,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\"/>",
        pts.join(" ")
    );
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn emit_report(curve: &[RocPoint], path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    if curve.is_empty() {
        return Err(Error::InvalidConfig("cannot write a report for an empty curve".into()));
    }
    let path = path.as_ref();
    let body = match format {
        ReportFormat::Csv => roc_to_csv(curve),
        ReportFormat::Svg => roc_to_svg(curve, "ROC"),
    };
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

pub fn read_roc_csv(path: impl AsRef<Path>) -> Result<Vec<RocPoint>> {
    let path = path.as_ref();
    parse_roc_csv(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

/// One detector's operating point for a comparison table.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub name: String,
    pub macs_per_pixel: Option<f64>,
    pub point: OperatingPoint,
}

/// Plain-text table of operating points plus the relative FPR reduction of the
/// last row against the first.
pub fn format_comparison(rows: &[ComparisonRow], target: f64, reduction: Option<f64>) -> String {
    let mut out = format!("operating point at precision >= {target:.2}\n");
    let _ = writeln!(
        out,
        "{:<14} {:>10} {:>10} {:>9} {:>9} {:>9} {:>8}",
        "detector", "MACs/px", "threshold", "precision", "recall", "FPR", "f-score"
    );
    for r in rows {
        let macs = r.macs_per_pixel.map_or("-".to_string(), |m| format!("{m:.0}"));
        let p = &r.point;
        let _ = writeln!(
            out,
            "{:<14} {:>10} {:>10.4} {:>9.4} {:>9.4} {:>9.4} {:>8.4}",
            r.name, macs, p.threshold, p.precision, p.recall, p.fpr, p.f_score
        );
    }
    if let Some(red) = reduction {
        let _ = writeln!(out, "relative FPR reduction: {:.2}%", red * 100.0);
    }
    out
}
