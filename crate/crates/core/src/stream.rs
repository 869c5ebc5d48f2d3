//! Live evaluation from a detection event stream.
//!
//! Slot `k` of a video is reported once that video's latest emit time reaches
//! `(k + 1) * delta_t + latency`. Later events may still reach back in time,
//! but if one would change the label of a slot that was already reported the
//! stream is rejected as a causality violation. Anything not yet reported is
//! flushed by [`StreamSession::finish`], so the final series always equals
//! the batch evaluation of the same detections.

use crate::error::{Error, Result};
use crate::io::{DetectionEvent, GroundTruth};
use crate::online::{EvaluatorConfig, MetricPoint, MetricSeries, VideoAccumulator};
use crate::timeline::{classify_slot, rasterize, ClassId, LabeledInterval, SlotGrid, SlotLabeler};

/// Default reporting delay in seconds; equals the longest detection the random baseline draws.
pub const DEFAULT_LATENCY: f64 = 30.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Tick {
    pub video_id: String,
    pub point: MetricPoint,
}

struct VideoStream {
    video_id: String,
    grid: SlotGrid,
    gt: Vec<ClassId>,
    detections: Vec<LabeledInterval>,
    reported: Vec<ClassId>,
    acc: VideoAccumulator,
    points: Vec<MetricPoint>,
    watermark: f64,
}

pub struct StreamSession {
    config: EvaluatorConfig,
    latency: f64,
    class_count: u32,
    videos: Vec<VideoStream>,
    gt_index: std::collections::HashMap<String, usize>,
}

impl StreamSession {
    pub fn new(gt: &GroundTruth, config: EvaluatorConfig, latency: f64) -> Result<Self> {
        if !(latency.is_finite() && latency >= 0.0) {
            return Err(Error::invalid(format!(
                "latency must be non-negative, got {latency}"
            )));
        }
        let class_count = gt.catalog.len();
        let mut videos = Vec::with_capacity(gt.videos.len());
        let mut gt_index = std::collections::HashMap::new();
        for (i, v) in gt.videos.iter().enumerate() {
            let grid = SlotGrid::new(v.duration, config.delta_t())
                .map_err(|e| Error::invalid(format!("video {}: {e}", v.video_id)))?;
            let labels = rasterize(gt.intervals(&v.video_id), &grid, class_count)?;
            videos.push(VideoStream {
                video_id: v.video_id.clone(),
                grid,
                gt: labels.labels().to_vec(),
                detections: Vec::new(),
                reported: Vec::new(),
                acc: VideoAccumulator::new(),
                points: Vec::new(),
                watermark: 0.0,
            });
            gt_index.insert(v.video_id.clone(), i);
        }
        Ok(Self {
            config,
            latency,
            class_count,
            videos,
            gt_index,
        })
    }

    /// Feeds one event and returns the ticks it makes final.
    pub fn push(&mut self, event: DetectionEvent) -> Result<Vec<Tick>> {
        let &i = self.gt_index.get(&event.video_id).ok_or_else(|| {
            Error::parse(event.line, format!("unknown video \"{}\"", event.video_id))
        })?;
        let class_count = self.class_count;
        let v = &mut self.videos[i];
        if event.emit_time < v.watermark {
            return Err(Error::StreamOrder {
                line: event.line,
                message: format!(
                    "emit time {} precedes {} for video \"{}\"",
                    event.emit_time, v.watermark, v.video_id
                ),
            });
        }
        v.detections.push(event.detection);
        check_no_revision(v, &event, class_count)?;
        v.watermark = event.emit_time;

        let mut ready = v.reported.len();
        while ready < v.grid.slot_count() && v.grid.slot_end(ready) + self.latency <= v.watermark {
            ready += 1;
        }
        report_until(v, ready, self.config.delta_t(), class_count)
    }

    /// Reports every remaining slot and returns the full series, in ground-truth order.
    pub fn finish(mut self) -> Result<(Vec<Tick>, Vec<MetricSeries>)> {
        let mut ticks = Vec::new();
        let dt = self.config.delta_t();
        for v in &mut self.videos {
            let n = v.grid.slot_count();
            ticks.extend(report_until(v, n, dt, self.class_count)?);
        }
        let series = self
            .videos
            .into_iter()
            .map(|v| MetricSeries {
                video_id: v.video_id,
                config: self.config,
                video_duration: v.grid.duration(),
                points: v.points,
            })
            .collect();
        Ok((ticks, series))
    }
}

fn check_no_revision(v: &VideoStream, event: &DetectionEvent, class_count: u32) -> Result<()> {
    let reported = v.reported.len();
    if reported == 0 || event.detection.start() >= v.grid.slot_start(reported) {
        return Ok(());
    }
    let first = v.grid.slot_of(event.detection.start()).min(reported);
    let mut labeler = SlotLabeler::new(&v.detections, &v.grid, class_count)
        .map_err(|e| Error::parse(event.line, e.to_string()))?;
    labeler.skip_to(first);
    for (slot, label) in (first..reported).zip(labeler) {
        if label != v.reported[slot] {
            return Err(Error::Causality {
                line: event.line,
                message: format!(
                    "event changes slot {slot} of video \"{}\" already reported at t={:.6}",
                    v.video_id,
                    v.grid.slot_end(slot)
                ),
            });
        }
    }
    Ok(())
}

fn report_until(v: &mut VideoStream, ready: usize, dt: f64, class_count: u32) -> Result<Vec<Tick>> {
    let from = v.reported.len();
    if ready <= from {
        return Ok(Vec::new());
    }
    let mut labeler = SlotLabeler::new(&v.detections, &v.grid, class_count)?;
    labeler.skip_to(from);
    let mut ticks = Vec::with_capacity(ready - from);
    for (slot, pred) in (from..ready).zip(labeler) {
        let point = v.acc.push(classify_slot(v.gt[slot], pred), dt);
        v.reported.push(pred);
        v.points.push(point);
        ticks.push(Tick {
            video_id: v.video_id.clone(),
            point,
        });
    }
    Ok(ticks)
}
