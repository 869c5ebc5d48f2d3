//! Per-slot average precision (AP) and calibrated average precision (cAP).
//!
//! These are the offline baselines IA is compared against. Both need the full
//! score table of a video (or corpus) before they can be finalized.
//!
//! Ranking sorts by score descending; ties keep input order. Entries with a
//! score of zero or less count as never retrieved: a positive ranked there
//! contributes nothing to the sum, so a detector that emits nothing scores 0.
//!
//! Calibrated precision at rank `k` rescales true positives by
//! `w = negatives / positives`:
//!
//! ```text
//! cPrec(k) = w * TP(k) / (w * TP(k) + FP(k))
//! ```

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::par;
use crate::timeline::{prepare_spans, ClassId, DenseLabeling, LabeledInterval, NO_SCORE};

/// Indices of the retrieved entries (score above zero; NaN is not), best first.
fn ranking(entries: &[(f64, bool)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..entries.len()).filter(|&i| entries[i].0 > 0.0).collect();
    order.sort_by(|&a, &b| entries[b].0.total_cmp(&entries[a].0));
    order
}

/// Sums `precision(tp, fp)` at each retrieved positive, divided by the number of positives.
fn ranked_average(entries: &[(f64, bool)], precision: impl Fn(u64, u64) -> f64) -> f64 {
    let positives = entries.iter().filter(|e| e.1).count();
    if positives == 0 {
        return 0.0;
    }
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut sum = 0.0;
    for i in ranking(entries) {
        if entries[i].1 {
            tp += 1;
            sum += precision(tp, fp);
        } else {
            fp += 1;
        }
    }
    sum / positives as f64
}

pub fn average_precision(entries: &[(f64, bool)]) -> f64 {
    ranked_average(entries, |tp, fp| tp as f64 / (tp + fp) as f64)
}

pub fn calibrated_average_precision(entries: &[(f64, bool)]) -> f64 {
    let p = entries.iter().filter(|e| e.1).count() as u128;
    let n = entries.len() as u128 - p;
    ranked_average(entries, |tp, fp| {
        if fp == 0 {
            return 1.0;
        }
        // w*tp / (w*tp + fp) with w = n/p, multiplied through by p.
        let num = tp as u128 * n;
        num as f64 / (num + fp as u128 * p) as f64
    })
}

/// Unweighted mean over action classes.
pub fn mean_over_classes(per_class: &BTreeMap<ClassId, f64>) -> Result<f64> {
    if per_class.is_empty() {
        return Err(Error::invalid("no class to average over"));
    }
    Ok(per_class.values().sum::<f64>() / per_class.len() as f64)
}

/// Per-slot, per-class detector scores together with the ground-truth label of each slot.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameScoreTable {
    class_count: u32,
    gt: Vec<ClassId>,
    /// Row-major, `class_count` columns; column `c - 1` holds class `c`.
    scores: Vec<f64>,
}

impl FrameScoreTable {
    pub fn new(class_count: u32) -> Self {
        Self {
            class_count,
            gt: Vec::new(),
            scores: Vec::new(),
        }
    }

    /// Table for one video. A slot's score for class `c` is the highest score
    /// among (merged) detections of `c` covering at least half the slot, else 0.
    /// Detections without a score count as 1.
    pub fn from_video(
        gt: &DenseLabeling,
        detections: &[LabeledInterval],
        class_count: u32,
    ) -> Result<Self> {
        let grid = *gt.grid();
        let width = class_count as usize;
        let mut scores = vec![0.0_f64; grid.slot_count() * width];
        let threshold = grid.coverage_threshold();
        for span in prepare_spans(detections, &grid, class_count)? {
            let score = if span.score == NO_SCORE {
                1.0
            } else {
                span.score
            };
            let first = grid.slot_of(span.start);
            let last = grid
                .slot_of(span.end)
                .min(grid.slot_count().saturating_sub(1));
            let col = span.class.0 as usize - 1;
            for slot in first..=last {
                if grid.overlap(slot, span.start, span.end) >= threshold {
                    let cell = &mut scores[slot * width + col];
                    *cell = cell.max(score);
                }
            }
        }
        for &c in gt.labels() {
            if c.0 > class_count {
                return Err(Error::invalid(format!(
                    "unknown class id {c} in ground truth"
                )));
            }
        }
        Ok(Self {
            class_count,
            gt: gt.labels().to_vec(),
            scores,
        })
    }

    /// Appends another table's rows. Both must share the class count.
    pub fn append(&mut self, other: &FrameScoreTable) -> Result<()> {
        if other.class_count != self.class_count {
            return Err(Error::invalid("class count mismatch"));
        }
        self.gt.extend_from_slice(&other.gt);
        self.scores.extend_from_slice(&other.scores);
        Ok(())
    }

    pub fn class_count(&self) -> u32 {
        self.class_count
    }

    pub fn slot_count(&self) -> usize {
        self.gt.len()
    }

    pub fn score(&self, slot: usize, class: ClassId) -> f64 {
        self.scores[slot * self.class_count as usize + class.0 as usize - 1]
    }

    pub fn gt(&self) -> &[ClassId] {
        &self.gt
    }

    /// The first `slots` rows only.
    pub fn truncated(&self, slots: usize) -> Self {
        let slots = slots.min(self.gt.len());
        Self {
            class_count: self.class_count,
            gt: self.gt[..slots].to_vec(),
            scores: self.scores[..slots * self.class_count as usize].to_vec(),
        }
    }

    /// `(score, is_positive)` for every slot, for one class.
    pub fn class_entries(&self, class: ClassId) -> Vec<(f64, bool)> {
        (0..self.gt.len())
            .map(|k| (self.score(k, class), self.gt[k] == class))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassScores {
    pub class: ClassId,
    pub positives: usize,
    pub ap: f64,
    pub cap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OfflineReport {
    pub per_class: Vec<ClassScores>,
    /// Mean AP over classes with at least one positive slot; 0 when there are none.
    pub map: f64,
    pub cap: f64,
}

impl OfflineReport {
    pub fn from_table(table: &FrameScoreTable) -> Self {
        let classes: Vec<ClassId> = (1..=table.class_count).map(ClassId).collect();
        let per_class = par::map_slice(&classes, |&class| {
            let entries = table.class_entries(class);
            ClassScores {
                class,
                positives: entries.iter().filter(|e| e.1).count(),
                ap: average_precision(&entries),
                cap: calibrated_average_precision(&entries),
            }
        });
        let present: Vec<&ClassScores> = per_class.iter().filter(|c| c.positives > 0).collect();
        let ap_map: BTreeMap<ClassId, f64> = present.iter().map(|c| (c.class, c.ap)).collect();
        let cap_map: BTreeMap<ClassId, f64> = present.iter().map(|c| (c.class, c.cap)).collect();
        Self {
            map: mean_over_classes(&ap_map).unwrap_or(0.0),
            cap: mean_over_classes(&cap_map).unwrap_or(0.0),
            per_class,
        }
    }
}
