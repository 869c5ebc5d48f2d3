//! Instantaneous Accuracy as a streaming fold.
//!
//! `IA(t')` is the slot accuracy over the `K' = floor(t' / delta_t)` slots seen
//! so far. The weighted variant rescales the true-positive term by the ratio
//! of ground-truth background to action slots seen so far and renormalizes:
//!
//! ```text
//! w   = gt_background / gt_action
//! wIA = (w * tp + tn) / (w * gt_action + gt_background)
//! ```
//!
//! which is `(tp / gt_action + tn / gt_background) / 2`. When either
//! ground-truth count is still zero the weighted value falls back to `IA`.
//!
//! Counters are exact integers; floating point only appears at read-out.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::timeline::{classify_slot, DenseLabeling, SlotOutcome};

/// Default slot length in seconds.
pub const DEFAULT_DELTA_T: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluatorConfig {
    delta_t: f64,
    /// Selects which IA flavour headline summaries report. Both are always computed.
    pub weighted: bool,
}

impl EvaluatorConfig {
    pub fn new(delta_t: f64, weighted: bool) -> Result<Self> {
        if !(delta_t.is_finite() && delta_t > 0.0) {
            return Err(Error::invalid(format!(
                "delta_t must be positive, got {delta_t}"
            )));
        }
        Ok(Self { delta_t, weighted })
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }
}

impl Default for EvaluatorConfig {
    fn default() -> Self {
        Self {
            delta_t: DEFAULT_DELTA_T,
            weighted: true,
        }
    }
}

/// Running prefix sums of one video's slot outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvaluatorState {
    pub slots_seen: u64,
    pub tp_sum: u64,
    pub tn_sum: u64,
    pub gt_action_slots: u64,
    pub gt_background_slots: u64,
}

impl EvaluatorState {
    pub fn new() -> Self {
        Self::default()
    }

    /// State after observing `outcome` for the next slot.
    #[must_use]
    pub fn advance(mut self, outcome: SlotOutcome) -> Self {
        self.record(outcome);
        self
    }

    pub fn record(&mut self, outcome: SlotOutcome) {
        self.slots_seen += 1;
        match outcome {
            SlotOutcome::TruePositive => {
                self.tp_sum += 1;
                self.gt_action_slots += 1;
            }
            SlotOutcome::FalseNegative => self.gt_action_slots += 1,
            SlotOutcome::TrueNegative => {
                self.tn_sum += 1;
                self.gt_background_slots += 1;
            }
            SlotOutcome::FalsePositive => self.gt_background_slots += 1,
        }
    }

    pub fn ia(&self) -> Result<f64> {
        if self.slots_seen == 0 {
            return Err(Error::UndefinedAtZero);
        }
        Ok((self.tp_sum + self.tn_sum) as f64 / self.slots_seen as f64)
    }

    pub fn weighted_ia(&self) -> Result<f64> {
        let a = self.gt_action_slots as u128;
        let b = self.gt_background_slots as u128;
        if a == 0 || b == 0 {
            return self.ia();
        }
        // (w*tp + tn) / (w*a + b) with w = b/a, multiplied through by a.
        let num = b * self.tp_sum as u128 + a * self.tn_sum as u128;
        let den = 2 * a * b;
        Ok(num as f64 / den as f64)
    }
}

pub fn advance(state: EvaluatorState, outcome: SlotOutcome) -> EvaluatorState {
    state.advance(outcome)
}

pub fn ia_at(state: &EvaluatorState) -> Result<f64> {
    state.ia()
}

pub fn weighted_ia_at(state: &EvaluatorState) -> Result<f64> {
    state.weighted_ia()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricPoint {
    pub t_prime: f64,
    pub ia: f64,
    pub weighted_ia: f64,
}

impl MetricPoint {
    fn read(state: &EvaluatorState, delta_t: f64) -> Self {
        debug_assert!(state.slots_seen > 0);
        Self {
            t_prime: state.slots_seen as f64 * delta_t,
            ia: state.ia().unwrap_or(0.0),
            weighted_ia: state.weighted_ia().unwrap_or(0.0),
        }
    }
}

/// IA sampled at every evaluation instant `delta_t, 2 delta_t, ...` of one video.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub video_id: String,
    pub config: EvaluatorConfig,
    pub video_duration: f64,
    pub points: Vec<MetricPoint>,
}

/// Per-video time averages of IA and weighted IA.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoAverage {
    pub video_id: String,
    pub avg_ia: f64,
    pub avg_weighted_ia: f64,
    pub slot_count: u64,
}

/// Folds one video slot by slot, keeping only the state and two running sums.
#[derive(Debug, Clone, Default)]
pub struct VideoAccumulator {
    state: EvaluatorState,
    sum_ia: f64,
    sum_weighted_ia: f64,
}

impl VideoAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&self) -> &EvaluatorState {
        &self.state
    }

    /// Records the next slot and returns the metric point at its end.
    pub fn push(&mut self, outcome: SlotOutcome, delta_t: f64) -> MetricPoint {
        self.state.record(outcome);
        let p = MetricPoint::read(&self.state, delta_t);
        self.sum_ia += p.ia;
        self.sum_weighted_ia += p.weighted_ia;
        p
    }

    pub fn finish(self, video_id: impl Into<String>) -> Result<VideoAverage> {
        let video_id = video_id.into();
        if self.state.slots_seen == 0 {
            return Err(Error::invalid(format!(
                "video {video_id} has no evaluated slot"
            )));
        }
        let n = self.state.slots_seen as f64;
        Ok(VideoAverage {
            video_id,
            avg_ia: self.sum_ia / n,
            avg_weighted_ia: self.sum_weighted_ia / n,
            slot_count: self.state.slots_seen,
        })
    }
}

fn check_pair(gt: &DenseLabeling, pred: &DenseLabeling, config: &EvaluatorConfig) -> Result<()> {
    if gt.grid() != pred.grid() {
        return Err(Error::invalid("ground truth and prediction grids differ"));
    }
    if gt.grid().delta_t() != config.delta_t() {
        return Err(Error::invalid(format!(
            "grid delta_t {} does not match evaluator delta_t {}",
            gt.grid().delta_t(),
            config.delta_t()
        )));
    }
    Ok(())
}

pub fn evaluate_video(
    video_id: impl Into<String>,
    gt: &DenseLabeling,
    pred: &DenseLabeling,
    config: &EvaluatorConfig,
) -> Result<MetricSeries> {
    check_pair(gt, pred, config)?;
    let dt = config.delta_t();
    let mut acc = VideoAccumulator::new();
    let points = gt
        .labels()
        .iter()
        .zip(pred.labels())
        .map(|(&g, &p)| acc.push(classify_slot(g, p), dt))
        .collect();
    Ok(MetricSeries {
        video_id: video_id.into(),
        config: *config,
        video_duration: gt.grid().duration(),
        points,
    })
}

impl MetricSeries {
    /// Time average of the series over the evaluable duration (`slot_count * delta_t`).
    pub fn average(&self) -> Result<VideoAverage> {
        if self.points.is_empty() {
            return Err(Error::invalid(format!(
                "series for {} is empty",
                self.video_id
            )));
        }
        let (sum_ia, sum_w) = self
            .points
            .iter()
            .fold((0.0, 0.0), |(a, w), p| (a + p.ia, w + p.weighted_ia));
        let n = self.points.len() as f64;
        Ok(VideoAverage {
            video_id: self.video_id.clone(),
            avg_ia: sum_ia / n,
            avg_weighted_ia: sum_w / n,
            slot_count: self.points.len() as u64,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSummary {
    pub videos: Vec<VideoAverage>,
    pub maia: f64,
    pub weighted_maia: f64,
}

impl DatasetSummary {
    pub fn from_averages(videos: Vec<VideoAverage>) -> Result<Self> {
        if videos.is_empty() {
            return Err(Error::invalid("cannot summarize an empty corpus"));
        }
        let mut seen = HashSet::new();
        for v in &videos {
            if !seen.insert(v.video_id.as_str()) {
                return Err(Error::invalid(format!("duplicate video id {}", v.video_id)));
            }
        }
        let n = videos.len() as f64;
        let maia = videos.iter().map(|v| v.avg_ia).sum::<f64>() / n;
        let weighted_maia = videos.iter().map(|v| v.avg_weighted_ia).sum::<f64>() / n;
        Ok(Self {
            videos,
            maia,
            weighted_maia,
        })
    }

    pub fn video_count(&self) -> usize {
        self.videos.len()
    }

    /// The headline figure selected by `weighted`.
    pub fn headline(&self, weighted: bool) -> f64 {
        if weighted {
            self.weighted_maia
        } else {
            self.maia
        }
    }
}

/// Mean average IA over a set of videos.
pub fn maia(series: &[MetricSeries]) -> Result<DatasetSummary> {
    let averages = series
        .iter()
        .map(MetricSeries::average)
        .collect::<Result<Vec<_>>>()?;
    DatasetSummary::from_averages(averages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeline::{rasterize, ClassId, LabeledInterval, SlotGrid};
    use SlotOutcome::*;

    fn state(tp: u64, fn_: u64, tn: u64, fp: u64) -> EvaluatorState {
        EvaluatorState {
            slots_seen: tp + fn_ + tn + fp,
            tp_sum: tp,
            tn_sum: tn,
            gt_action_slots: tp + fn_,
            gt_background_slots: tn + fp,
        }
    }

    fn worked_example() -> MetricSeries {
        let grid = SlotGrid::new(10.0, 1.0).unwrap();
        let a = ClassId(1);
        let gt = rasterize(
            &[LabeledInterval::ground_truth(3.0, 7.0, a).unwrap()],
            &grid,
            1,
        )
        .unwrap();
        let pred = rasterize(
            &[LabeledInterval::detection(4.0, 8.0, a, 0.9).unwrap()],
            &grid,
            1,
        )
        .unwrap();
        evaluate_video("v1", &gt, &pred, &EvaluatorConfig::new(1.0, true).unwrap()).unwrap()
    }

    #[test]
    fn advance_examples() {
        let s = advance(EvaluatorState::new(), TruePositive);
        assert_eq!(s, state(1, 0, 0, 0));
        let s = advance(EvaluatorState::new(), FalsePositive);
        assert_eq!(s, state(0, 0, 0, 1));
        let s = advance(advance(EvaluatorState::new(), TruePositive), TrueNegative);
        assert_eq!(s, state(1, 0, 1, 0));
    }

    #[test]
    fn ia_examples() {
        assert_eq!(ia_at(&state(3, 1, 5, 1)).unwrap(), 0.8);
        for k in 1..50 {
            assert_eq!(ia_at(&state(0, 0, k, 0)).unwrap(), 1.0);
        }
        assert_eq!(ia_at(&state(0, 2, 0, 2)).unwrap(), 0.0);
        assert!(matches!(
            ia_at(&EvaluatorState::new()),
            Err(Error::UndefinedAtZero)
        ));
        assert!(matches!(
            weighted_ia_at(&EvaluatorState::new()),
            Err(Error::UndefinedAtZero)
        ));
    }

    #[test]
    fn weighted_examples() {
        let w = weighted_ia_at(&state(3, 1, 5, 1)).unwrap();
        assert!((w - 9.5 / 12.0).abs() < 1e-15);
        assert_eq!(weighted_ia_at(&state(7, 0, 11, 0)).unwrap(), 1.0);
        assert_eq!(weighted_ia_at(&state(0, 0, 5, 0)).unwrap(), 1.0);
        // Only actions so far: falls back to plain accuracy.
        assert_eq!(weighted_ia_at(&state(1, 3, 0, 0)).unwrap(), 0.25);
    }

    #[test]
    fn worked_example_series() {
        let s = worked_example();
        assert_eq!(s.points.len(), 10);
        assert_eq!(s.points[4].t_prime, 5.0);
        assert_eq!(s.points[4].ia, 0.8);
        assert_eq!(s.points[9].ia, 0.8);
        assert!((s.points[9].weighted_ia - 9.5 / 12.0).abs() < 1e-15);
        let summary = maia(std::slice::from_ref(&s)).unwrap();
        assert!((summary.maia - 0.856_825_396_825_396_8).abs() < 1e-12);
    }

    #[test]
    fn all_background_agreement() {
        let grid = SlotGrid::new(10.0, 0.5).unwrap();
        let bg = DenseLabeling::background(grid);
        let s = evaluate_video("v", &bg, &bg, &EvaluatorConfig::default()).unwrap();
        assert_eq!(s.points.len(), 20);
        assert!(s.points.iter().all(|p| p.ia == 1.0 && p.weighted_ia == 1.0));
    }

    #[test]
    fn grid_mismatch_rejected() {
        let a = DenseLabeling::background(SlotGrid::new(10.0, 0.5).unwrap());
        let b = DenseLabeling::background(SlotGrid::new(11.0, 0.5).unwrap());
        assert!(evaluate_video("v", &a, &b, &EvaluatorConfig::default()).is_err());
        let cfg = EvaluatorConfig::new(1.0, true).unwrap();
        assert!(evaluate_video("v", &a, &a, &cfg).is_err());
    }

    #[test]
    fn maia_examples() {
        let mk = |id: &str, v: f64| VideoAverage {
            video_id: id.into(),
            avg_ia: v,
            avg_weighted_ia: v,
            slot_count: 1,
        };
        let s = DatasetSummary::from_averages(vec![mk("a", 0.8), mk("b", 0.6)]).unwrap();
        assert!((s.maia - 0.7).abs() < 1e-15);
        assert_eq!(s.video_count(), 2);
        assert!(DatasetSummary::from_averages(vec![]).is_err());
        assert!(DatasetSummary::from_averages(vec![mk("a", 0.8), mk("a", 0.6)]).is_err());
        assert!(maia(&[]).is_err());
    }

    #[test]
    fn accumulator_matches_series_average() {
        let s = worked_example();
        let from_series = s.average().unwrap();
        let mut acc = VideoAccumulator::new();
        for o in [
            TrueNegative,
            TrueNegative,
            TrueNegative,
            FalseNegative,
            TruePositive,
            TruePositive,
            TruePositive,
            FalsePositive,
            TrueNegative,
            TrueNegative,
        ] {
            acc.push(o, 1.0);
        }
        assert_eq!(*acc.state(), state(3, 1, 5, 1));
        let from_acc = acc.finish("v1").unwrap();
        assert_eq!(from_acc.avg_ia, from_series.avg_ia);
        assert_eq!(from_acc.avg_weighted_ia, from_series.avg_weighted_ia);
    }
}
