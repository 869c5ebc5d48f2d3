//! Evaluation toolkit for online action detection.
//!
//! The central metric is the Instantaneous Accuracy `IA(t')`: slot-level
//! accuracy (actions and background) over everything observed up to `t'`,
//! computed as a streaming fold so it is available while the video plays.
//! Alongside it live a class-balanced weighted IA, the corpus summary
//! `maIA`, and the offline per-slot AP / calibrated AP it is compared against.
//!
//! ```
//! use oad_ia::{rasterize, evaluate_video, ClassId, EvaluatorConfig, LabeledInterval, SlotGrid};
//!
//! let grid = SlotGrid::new(10.0, 1.0).unwrap();
//! let run = ClassId(1);
//! let gt = rasterize(&[LabeledInterval::ground_truth(3.0, 7.0, run).unwrap()], &grid, 1).unwrap();
//! let det = rasterize(&[LabeledInterval::detection(4.0, 8.0, run, 0.9).unwrap()], &grid, 1).unwrap();
//! let series = evaluate_video("v1", &gt, &det, &EvaluatorConfig::new(1.0, true).unwrap()).unwrap();
//! assert_eq!(series.points[4].ia, 0.8);
//! ```

pub mod baselines;
pub mod corpus;
mod error;
pub mod io;
pub mod offline;
pub mod online;
mod par;
pub mod stream;
pub mod timeline;

pub use error::{Error, Result};
pub use par::is_parallel;

pub use baselines::{all_background, perfect_model, uniform_random, BaselineKind};
pub use corpus::{
    cases, evaluate_series, offline_report, summarize, summarize_sequential, VideoCase,
};
pub use offline::{
    average_precision, calibrated_average_precision, mean_over_classes, FrameScoreTable,
    OfflineReport,
};
pub use online::{
    advance, evaluate_video, ia_at, maia, weighted_ia_at, DatasetSummary, EvaluatorConfig,
    EvaluatorState, MetricPoint, MetricSeries, VideoAccumulator, VideoAverage, DEFAULT_DELTA_T,
};
pub use timeline::{
    build_slot_grid, classify_slot, rasterize, ClassId, DenseLabeling, LabeledInterval, SlotGrid,
    SlotLabeler, SlotOutcome, TimeInterval,
};
