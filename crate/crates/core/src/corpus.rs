//! Corpus-level evaluation. Videos are independent, so they are mapped on the
//! rayon pool when the `parallel` feature is on; each video's fold stays
//! sequential. Results are collected in input order.

use crate::error::{Error, Result};
use crate::io::{DetectionSet, GroundTruth};
use crate::offline::{FrameScoreTable, OfflineReport};
use crate::online::{
    evaluate_video, DatasetSummary, EvaluatorConfig, MetricSeries, VideoAccumulator, VideoAverage,
};
use crate::par;
use crate::timeline::{classify_slot, rasterize, LabeledInterval, SlotGrid, SlotLabeler};

/// One video's inputs, borrowed from the parsed files.
#[derive(Debug, Clone, Copy)]
pub struct VideoCase<'a> {
    pub video_id: &'a str,
    pub duration: f64,
    pub ground_truth: &'a [LabeledInterval],
    pub detections: &'a [LabeledInterval],
}

/// Pairs every ground-truth video with its detections (none if absent).
pub fn cases<'a>(gt: &'a GroundTruth, detections: &'a DetectionSet) -> Vec<VideoCase<'a>> {
    gt.videos
        .iter()
        .map(|v| VideoCase {
            video_id: &v.video_id,
            duration: v.duration,
            ground_truth: gt.intervals(&v.video_id),
            detections: detections.intervals(&v.video_id),
        })
        .collect()
}

impl VideoCase<'_> {
    pub fn grid(&self, delta_t: f64) -> Result<SlotGrid> {
        SlotGrid::new(self.duration, delta_t)
            .map_err(|e| Error::invalid(format!("video {}: {e}", self.video_id)))
    }

    /// Full IA series, materializing both labelings.
    pub fn series(&self, config: &EvaluatorConfig, class_count: u32) -> Result<MetricSeries> {
        let grid = self.grid(config.delta_t())?;
        let gt = rasterize(self.ground_truth, &grid, class_count)?;
        let pred = rasterize(self.detections, &grid, class_count)?;
        evaluate_video(self.video_id, &gt, &pred, config)
    }

    /// Time-averaged IA without storing labels or points: memory is bounded
    /// by the number of intervals, not the video length.
    pub fn average(&self, config: &EvaluatorConfig, class_count: u32) -> Result<VideoAverage> {
        let grid = self.grid(config.delta_t())?;
        let gt = SlotLabeler::new(self.ground_truth, &grid, class_count)?;
        let pred = SlotLabeler::new(self.detections, &grid, class_count)?;
        let dt = config.delta_t();
        let mut acc = VideoAccumulator::new();
        for (g, p) in gt.zip(pred) {
            acc.push(classify_slot(g, p), dt);
        }
        acc.finish(self.video_id)
    }

    pub fn score_table(&self, delta_t: f64, class_count: u32) -> Result<FrameScoreTable> {
        let grid = self.grid(delta_t)?;
        let gt = rasterize(self.ground_truth, &grid, class_count)?;
        FrameScoreTable::from_video(&gt, self.detections, class_count)
    }
}

pub fn evaluate_series(
    cases: &[VideoCase<'_>],
    config: &EvaluatorConfig,
    class_count: u32,
) -> Result<Vec<MetricSeries>> {
    par::map_slice(cases, |c| c.series(config, class_count))
        .into_iter()
        .collect()
}

pub fn summarize(
    cases: &[VideoCase<'_>],
    config: &EvaluatorConfig,
    class_count: u32,
) -> Result<DatasetSummary> {
    let averages = par::map_slice(cases, |c| c.average(config, class_count))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    DatasetSummary::from_averages(averages)
}

/// Same as [`summarize`] but always on the calling thread.
pub fn summarize_sequential(
    cases: &[VideoCase<'_>],
    config: &EvaluatorConfig,
    class_count: u32,
) -> Result<DatasetSummary> {
    let averages = par::map_slice_sequential(cases, |c| c.average(config, class_count))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    DatasetSummary::from_averages(averages)
}

/// Per-slot AP / cAP over the whole corpus: one ranking per class across all videos.
pub fn offline_report(
    cases: &[VideoCase<'_>],
    delta_t: f64,
    class_count: u32,
) -> Result<OfflineReport> {
    let tables = par::map_slice(cases, |c| c.score_table(delta_t, class_count));
    let mut corpus = FrameScoreTable::new(class_count);
    for t in tables {
        corpus.append(&t?)?;
    }
    Ok(OfflineReport::from_table(&corpus))
}
