//! Line-delimited detection events for online replay.
//!
//! Each event carries the instant the detector emitted it. Within one video
//! emit times never decrease, and no event may cover time after its own
//! emission. Events may still reach back before earlier emissions; whether
//! that is acceptable is decided by the consumer (see `stream`).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;

use super::annotations::parse_interval_row;
use super::{fields, number, DetectionSet, GroundTruth};
use crate::error::{Error, Result};
use crate::timeline::LabeledInterval;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionEvent {
    /// 1-based line of the event in its stream (0 when synthesized).
    pub line: usize,
    pub video_id: String,
    pub detection: LabeledInterval,
    pub emit_time: f64,
}

pub struct EventReader<'g, R> {
    lines: std::io::Lines<R>,
    line_no: usize,
    durations: HashMap<String, f64>,
    gt: &'g GroundTruth,
    last_emit: HashMap<String, f64>,
    done: bool,
}

pub fn read_event_stream<R: BufRead>(reader: R, gt: &GroundTruth) -> EventReader<'_, R> {
    EventReader {
        lines: reader.lines(),
        line_no: 0,
        durations: gt
            .videos
            .iter()
            .map(|v| (v.video_id.clone(), v.duration))
            .collect(),
        gt,
        last_emit: HashMap::new(),
        done: false,
    }
}

impl<R: BufRead> EventReader<'_, R> {
    fn parse(&mut self, line: &str) -> Result<DetectionEvent> {
        let n = self.line_no;
        let f = fields(n, line, 6, "video_id,class_name,start,end,score,emit_time")?;
        let (video_id, detection) =
            parse_interval_row(n, &f[..4], &self.durations, &self.gt.catalog, Some(f[4]))?;
        let emit_time = number(n, f[5], "emit time")?;
        if detection.end() > emit_time {
            return Err(Error::Causality {
                line: n,
                message: format!(
                    "event ends at {} after its emission at {emit_time}",
                    detection.end()
                ),
            });
        }
        if let Some(&last) = self.last_emit.get(&video_id) {
            if emit_time < last {
                return Err(Error::StreamOrder {
                    line: n,
                    message: format!(
                        "emit time {emit_time} precedes {last} for video \"{video_id}\""
                    ),
                });
            }
        }
        self.last_emit.insert(video_id.clone(), emit_time);
        Ok(DetectionEvent {
            line: n,
            video_id,
            detection,
            emit_time,
        })
    }
}

impl<R: BufRead> Iterator for EventReader<'_, R> {
    type Item = Result<DetectionEvent>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            let raw = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => {
                    self.done = true;
                    return Some(Err(e.into()));
                }
            };
            self.line_no += 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let item = self.parse(line);
            if item.is_err() {
                self.done = true;
            }
            return Some(item);
        }
    }
}

/// Replays a batch detection file as if every detection were emitted the
/// moment it ended. Ordered by emit time, ties in ground-truth video order.
pub fn detections_to_events(set: &DetectionSet, gt: &GroundTruth) -> Vec<DetectionEvent> {
    let mut events: Vec<DetectionEvent> = gt
        .videos
        .iter()
        .flat_map(|v| {
            set.intervals(&v.video_id).iter().map(|d| DetectionEvent {
                line: 0,
                video_id: v.video_id.clone(),
                detection: *d,
                emit_time: d.end(),
            })
        })
        .collect();
    events.sort_by(|a, b| a.emit_time.total_cmp(&b.emit_time));
    events
}

pub fn write_event_stream(events: &[DetectionEvent], gt: &GroundTruth) -> String {
    let mut out = String::new();
    for e in events {
        let d = &e.detection;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            e.video_id,
            gt.catalog.name(d.class).expect("validated class"),
            d.start(),
            d.end(),
            d.score.unwrap_or(1.0),
            e.emit_time
        );
    }
    out
}
