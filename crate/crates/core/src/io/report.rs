use std::fmt::Write as _;

use crate::online::{DatasetSummary, MetricSeries};

pub const SERIES_HEADER: &str = "t,ia,weighted_ia";
pub const SUMMARY_HEADER: &str = "video_id,avg_ia,avg_weighted_ia";
pub const COMPARISON_HEADER: &str = "detector,mAP,cAP,maIA,weighted_maIA";

/// One CSV row per evaluation instant, six decimals.
pub fn write_metric_series(series: &MetricSeries) -> String {
    let mut out = String::with_capacity(32 * (series.points.len() + 1));
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for p in &series.points {
        let _ = writeln!(out, "{:.6},{:.6},{:.6}", p.t_prime, p.ia, p.weighted_ia);
    }
    out
}

/// Per-video averages followed by a `maIA` row.
pub fn write_summary(summary: &DatasetSummary) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for v in &summary.videos {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6}",
            v.video_id, v.avg_ia, v.avg_weighted_ia
        );
    }
    let _ = writeln!(out, "maIA,{:.6},{:.6}", summary.maia, summary.weighted_maia);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub detector: String,
    pub map: f64,
    pub cap: f64,
    pub maia: f64,
    pub weighted_maia: f64,
}

pub fn write_comparison(rows: &[ComparisonRow]) -> String {
    let mut out = String::from(COMPARISON_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6}",
            r.detector, r.map, r.cap, r.maia, r.weighted_maia
        );
    }
    out
}
