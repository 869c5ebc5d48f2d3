//! Slot quantization of the video timeline.
//!
//! Time is cut into fixed slots of `delta_t` seconds. Slot `k` covers
//! `[k * delta_t, (k + 1) * delta_t)`; a trailing remainder shorter than one
//! slot is never evaluated. Interval annotations and detections are turned
//! into one class label per slot, with `0` standing for background.
//!
//! A slot is a candidate for class `c` when the (merged) intervals of `c`
//! cover at least half of it. Among candidates the largest overlap wins, then
//! the higher score, then the earlier start, then the smaller class id. The
//! result does not depend on input order.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Action class identifier. `0` is background and never appears on an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ClassId(pub u32);

impl ClassId {
    pub const BACKGROUND: ClassId = ClassId(0);

    pub fn is_background(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A half-open span `[start, end)` in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeInterval {
    start: f64,
    end: f64,
}

impl TimeInterval {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() {
            return Err(Error::invalid("interval bounds must be finite"));
        }
        if start < 0.0 {
            return Err(Error::invalid(format!(
                "interval starts before zero ({start})"
            )));
        }
        if end <= start {
            return Err(Error::invalid(format!(
                "end before start ({start} .. {end})"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

/// An action interval, optionally carrying a detector confidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledInterval {
    pub interval: TimeInterval,
    pub class: ClassId,
    pub score: Option<f64>,
}

impl LabeledInterval {
    pub fn new(interval: TimeInterval, class: ClassId, score: Option<f64>) -> Result<Self> {
        if class.is_background() {
            return Err(Error::invalid(
                "background (class 0) cannot label an interval",
            ));
        }
        if let Some(s) = score {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::invalid(format!("score {s} outside [0, 1]")));
            }
        }
        Ok(Self {
            interval,
            class,
            score,
        })
    }

    pub fn ground_truth(start: f64, end: f64, class: ClassId) -> Result<Self> {
        Self::new(TimeInterval::new(start, end)?, class, None)
    }

    pub fn detection(start: f64, end: f64, class: ClassId, score: f64) -> Result<Self> {
        Self::new(TimeInterval::new(start, end)?, class, Some(score))
    }

    pub fn start(&self) -> f64 {
        self.interval.start
    }

    pub fn end(&self) -> f64 {
        self.interval.end
    }
}

/// The `delta_t` quantization of one video.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotGrid {
    delta_t: f64,
    duration: f64,
    slot_count: usize,
}

/// Relative slack when flooring `duration / delta_t`, so that e.g. 0.3 / 0.1 yields 3 slots.
const FLOOR_SLACK: f64 = 1e-10;
/// Relative slack on the half-slot coverage threshold.
const COVERAGE_SLACK: f64 = 1e-9;

impl SlotGrid {
    pub fn new(duration: f64, delta_t: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::invalid(format!(
                "duration must be positive, got {duration}"
            )));
        }
        if !(delta_t.is_finite() && delta_t > 0.0) {
            return Err(Error::invalid(format!(
                "delta_t must be positive, got {delta_t}"
            )));
        }
        let ratio = duration / delta_t;
        let slots = (ratio * (1.0 + FLOOR_SLACK)).floor();
        if slots < 1.0 {
            return Err(Error::invalid(format!(
                "delta_t {delta_t} exceeds duration {duration}: no full slot fits"
            )));
        }
        if slots > usize::MAX as f64 {
            return Err(Error::invalid("slot count overflows"));
        }
        Ok(Self {
            delta_t,
            duration,
            slot_count: slots as usize,
        })
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn slot_count(&self) -> usize {
        self.slot_count
    }

    /// Duration actually covered by whole slots.
    pub fn evaluable_duration(&self) -> f64 {
        self.slot_count as f64 * self.delta_t
    }

    pub fn slot_start(&self, slot: usize) -> f64 {
        slot as f64 * self.delta_t
    }

    pub fn slot_end(&self, slot: usize) -> f64 {
        (slot + 1) as f64 * self.delta_t
    }

    /// Minimum overlap for an interval to claim a slot: half a slot.
    pub fn coverage_threshold(&self) -> f64 {
        0.5 * self.delta_t * (1.0 - COVERAGE_SLACK)
    }

    /// Length of `[start, end)` inside slot `slot`; negative when disjoint.
    pub fn overlap(&self, slot: usize, start: f64, end: f64) -> f64 {
        end.min(self.slot_end(slot)) - start.max(self.slot_start(slot))
    }

    /// Index of the slot containing time `t` (not clamped to the grid).
    pub fn slot_of(&self, t: f64) -> usize {
        (t / self.delta_t).floor().max(0.0) as usize
    }
}

/// Shorthand for [`SlotGrid::new`].
pub fn build_slot_grid(duration: f64, delta_t: f64) -> Result<SlotGrid> {
    SlotGrid::new(duration, delta_t)
}

/// One class label per slot of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLabeling {
    grid: SlotGrid,
    labels: Vec<ClassId>,
}

impl DenseLabeling {
    pub fn new(grid: SlotGrid, labels: Vec<ClassId>) -> Result<Self> {
        if labels.len() != grid.slot_count {
            return Err(Error::invalid(format!(
                "{} labels for a grid of {} slots",
                labels.len(),
                grid.slot_count
            )));
        }
        Ok(Self { grid, labels })
    }

    pub fn background(grid: SlotGrid) -> Self {
        Self {
            grid,
            labels: vec![ClassId::BACKGROUND; grid.slot_count],
        }
    }

    pub fn grid(&self) -> &SlotGrid {
        &self.grid
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.labels
    }

    pub fn action_slots(&self) -> usize {
        self.labels.iter().filter(|c| !c.is_background()).count()
    }

    /// Slot-aligned intervals, one per maximal run of a non-background class.
    pub fn to_intervals(&self) -> Vec<LabeledInterval> {
        let mut out = Vec::new();
        let mut k = 0;
        while k < self.labels.len() {
            let class = self.labels[k];
            let run_start = k;
            while k < self.labels.len() && self.labels[k] == class {
                k += 1;
            }
            if !class.is_background() {
                let iv = TimeInterval {
                    start: self.grid.slot_start(run_start),
                    end: self.grid.slot_start(k),
                };
                out.push(LabeledInterval {
                    interval: iv,
                    class,
                    score: None,
                });
            }
        }
        out
    }
}

/// A validated, clipped interval after same-class merging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Span {
    pub start: f64,
    pub end: f64,
    pub class: ClassId,
    /// `NO_SCORE` for ground truth.
    pub score: f64,
}

pub(crate) const NO_SCORE: f64 = -1.0;

/// Clips to the grid, unions overlapping or touching intervals of the same
/// class (keeping the highest score) and sorts by start.
pub(crate) fn prepare_spans(
    intervals: &[LabeledInterval],
    grid: &SlotGrid,
    class_count: u32,
) -> Result<Vec<Span>> {
    let mut spans = Vec::with_capacity(intervals.len());
    for iv in intervals {
        if iv.class.is_background() || iv.class.0 > class_count {
            return Err(Error::invalid(format!("unknown class id {}", iv.class)));
        }
        if iv.start() > grid.duration {
            return Err(Error::invalid(format!(
                "interval starts at {} beyond duration {}",
                iv.start(),
                grid.duration
            )));
        }
        let end = iv.end().min(grid.duration);
        if end <= iv.start() {
            continue;
        }
        spans.push(Span {
            start: iv.start(),
            end,
            class: iv.class,
            score: iv.score.unwrap_or(NO_SCORE),
        });
    }

    spans.sort_by(|a, b| {
        a.class
            .cmp(&b.class)
            .then(a.start.total_cmp(&b.start))
            .then(a.end.total_cmp(&b.end))
    });
    let mut merged: Vec<Span> = Vec::with_capacity(spans.len());
    for s in spans {
        match merged.last_mut() {
            Some(last) if last.class == s.class && s.start <= last.end => {
                last.end = last.end.max(s.end);
                last.score = last.score.max(s.score);
            }
            _ => merged.push(s),
        }
    }
    merged.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.class.cmp(&b.class)));
    Ok(merged)
}

/// Lazy per-slot labeler. Memory is proportional to the number of intervals,
/// never to the number of slots.
#[derive(Debug, Clone)]
pub struct SlotLabeler {
    grid: SlotGrid,
    spans: Vec<Span>,
    next_span: usize,
    active: Vec<usize>,
    slot: usize,
}

impl SlotLabeler {
    /// Validates, clips and merges `intervals`. Classes must lie in `1..=class_count`.
    pub fn new(intervals: &[LabeledInterval], grid: &SlotGrid, class_count: u32) -> Result<Self> {
        Ok(Self {
            grid: *grid,
            spans: prepare_spans(intervals, grid, class_count)?,
            next_span: 0,
            active: Vec::new(),
            slot: 0,
        })
    }

    pub fn grid(&self) -> &SlotGrid {
        &self.grid
    }

    /// Index of the slot the next call to `next()` labels.
    pub fn position(&self) -> usize {
        self.slot
    }

    /// Jump forward to `slot`. Moving backwards is not supported and is ignored.
    pub fn skip_to(&mut self, slot: usize) {
        if slot <= self.slot {
            return;
        }
        self.slot = slot.min(self.grid.slot_count);
        let lo = self.grid.slot_start(self.slot);
        while self.next_span < self.spans.len() && self.spans[self.next_span].start < lo {
            self.active.push(self.next_span);
            self.next_span += 1;
        }
        let spans = &self.spans;
        self.active.retain(|&i| spans[i].end > lo);
    }

    fn label_current(&mut self) -> ClassId {
        let lo = self.grid.slot_start(self.slot);
        let hi = self.grid.slot_end(self.slot);
        while self.next_span < self.spans.len() && self.spans[self.next_span].start < hi {
            self.active.push(self.next_span);
            self.next_span += 1;
        }
        let spans = &self.spans;
        self.active.retain(|&i| spans[i].end > lo);

        let threshold = self.grid.coverage_threshold();
        let mut best: Option<(f64, &Span)> = None;
        for &i in &self.active {
            let s = &spans[i];
            let overlap = s.end.min(hi) - s.start.max(lo);
            if overlap < threshold {
                continue;
            }
            let better = match best {
                None => true,
                Some((best_overlap, b)) => {
                    candidate_order(overlap, s, best_overlap, b) == Ordering::Greater
                }
            };
            if better {
                best = Some((overlap, s));
            }
        }
        best.map_or(ClassId::BACKGROUND, |(_, s)| s.class)
    }
}

/// Greater means `a` beats `b`.
fn candidate_order(a_overlap: f64, a: &Span, b_overlap: f64, b: &Span) -> Ordering {
    a_overlap
        .total_cmp(&b_overlap)
        .then(a.score.total_cmp(&b.score))
        .then(b.start.total_cmp(&a.start))
        .then(b.class.cmp(&a.class))
}

impl Iterator for SlotLabeler {
    type Item = ClassId;

    fn next(&mut self) -> Option<ClassId> {
        if self.slot >= self.grid.slot_count {
            return None;
        }
        let label = self.label_current();
        self.slot += 1;
        Some(label)
    }

    fn nth(&mut self, n: usize) -> Option<ClassId> {
        self.skip_to(self.slot.saturating_add(n));
        self.next()
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.grid.slot_count - self.slot;
        (left, Some(left))
    }
}

impl ExactSizeIterator for SlotLabeler {}

/// Dense per-slot labeling of `intervals` on `grid`.
pub fn rasterize(
    intervals: &[LabeledInterval],
    grid: &SlotGrid,
    class_count: u32,
) -> Result<DenseLabeling> {
    let labels: Vec<ClassId> = SlotLabeler::new(intervals, grid, class_count)?.collect();
    Ok(DenseLabeling {
        grid: *grid,
        labels,
    })
}

/// Confusion outcome of a single slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotOutcome {
    TruePositive,
    TrueNegative,
    FalsePositive,
    /// Includes an action slot predicted as a different action class.
    FalseNegative,
}

impl SlotOutcome {
    /// Counts toward the IA numerator.
    pub fn is_true(self) -> bool {
        matches!(self, SlotOutcome::TruePositive | SlotOutcome::TrueNegative)
    }

    /// The ground truth of this slot is an action.
    pub fn is_action_slot(self) -> bool {
        matches!(self, SlotOutcome::TruePositive | SlotOutcome::FalseNegative)
    }
}

pub fn classify_slot(gt: ClassId, pred: ClassId) -> SlotOutcome {
    match (gt.is_background(), pred.is_background()) {
        (true, true) => SlotOutcome::TrueNegative,
        (true, false) => SlotOutcome::FalsePositive,
        (false, _) if pred == gt => SlotOutcome::TruePositive,
        (false, _) => SlotOutcome::FalseNegative,
    }
}
