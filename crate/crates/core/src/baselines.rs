//! Synthetic reference detectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::io::{DetectionSet, GroundTruth};
use crate::timeline::{ClassId, LabeledInterval};

/// Longest detection the random baseline draws, in seconds.
pub const RANDOM_MAX_LENGTH: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineKind {
    /// Never predicts an action.
    AllBackground,
    /// Reproduces the ground truth with score 1.
    PerfectModel,
    UniformRandom {
        seed: u64,
        detections_per_minute: f64,
    },
}

impl BaselineKind {
    pub fn name(&self) -> &'static str {
        match self {
            BaselineKind::AllBackground => "all-bg",
            BaselineKind::PerfectModel => "pm",
            BaselineKind::UniformRandom { .. } => "random",
        }
    }
}

pub fn all_background(_video_duration: f64) -> Vec<LabeledInterval> {
    Vec::new()
}

pub fn perfect_model(gt: &[LabeledInterval]) -> Vec<LabeledInterval> {
    gt.iter()
        .map(|iv| LabeledInterval {
            score: Some(1.0),
            ..*iv
        })
        .collect()
}

/// Seeded random detections for one video. See [`uniform_random_with`].
pub fn uniform_random(
    seed: u64,
    video_duration: f64,
    classes: &[ClassId],
    detections_per_minute: f64,
    delta_t: f64,
) -> Result<Vec<LabeledInterval>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    uniform_random_with(
        &mut rng,
        video_duration,
        classes,
        detections_per_minute,
        delta_t,
    )
}

/// Draws a Poisson number of detections with mean `rate * duration / 60`.
/// Starts are uniform in `[0, duration)`, lengths uniform in
/// `[delta_t, 30 s]` (clipped to the video), classes and scores uniform.
pub fn uniform_random_with<R: Rng + ?Sized>(
    rng: &mut R,
    video_duration: f64,
    classes: &[ClassId],
    detections_per_minute: f64,
    delta_t: f64,
) -> Result<Vec<LabeledInterval>> {
    if !(video_duration.is_finite() && video_duration > 0.0) {
        return Err(Error::invalid("video duration must be positive"));
    }
    if classes.is_empty() {
        return Err(Error::invalid("random baseline needs at least one class"));
    }
    if !(detections_per_minute.is_finite() && detections_per_minute > 0.0) {
        return Err(Error::invalid("detection rate must be positive"));
    }
    if !(delta_t.is_finite() && delta_t > 0.0) {
        return Err(Error::invalid("delta_t must be positive"));
    }
    let mean = detections_per_minute * video_duration / 60.0;
    let count = Poisson::new(mean)
        .map_err(|e| Error::invalid(format!("bad detection rate: {e}")))?
        .sample(rng) as usize;

    let min_len = delta_t.min(RANDOM_MAX_LENGTH);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let start = rng.gen_range(0.0..video_duration);
        let len = if min_len < RANDOM_MAX_LENGTH {
            rng.gen_range(min_len..=RANDOM_MAX_LENGTH)
        } else {
            min_len
        };
        let end = (start + len).min(video_duration);
        let class = classes[rng.gen_range(0..classes.len())];
        let score = rng.gen_range(0.0..=1.0);
        out.push(LabeledInterval::detection(start, end, class, score)?);
    }
    out.sort_by(|a, b| a.start().total_cmp(&b.start()).then(a.class.cmp(&b.class)));
    Ok(out)
}

/// Detections of `kind` for every video of `gt`. The random baseline draws
/// from a single generator, visiting videos in declaration order.
pub fn generate(kind: BaselineKind, gt: &GroundTruth, delta_t: f64) -> Result<DetectionSet> {
    let mut set = DetectionSet::default();
    let classes: Vec<ClassId> = gt.catalog.ids().collect();
    let mut rng = match kind {
        BaselineKind::UniformRandom { seed, .. } => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    for v in &gt.videos {
        let dets = match kind {
            BaselineKind::AllBackground => all_background(v.duration),
            BaselineKind::PerfectModel => perfect_model(gt.intervals(&v.video_id)),
            BaselineKind::UniformRandom {
                detections_per_minute,
                ..
            } => uniform_random_with(
                rng.as_mut().expect("seeded above"),
                v.duration,
                &classes,
                detections_per_minute,
                delta_t,
            )?,
        };
        if !dets.is_empty() {
            set.by_video.insert(v.video_id.clone(), dets);
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::online::{evaluate_video, EvaluatorConfig};
    use crate::timeline::{rasterize, SlotGrid};

    fn classes() -> Vec<ClassId> {
        vec![ClassId(1), ClassId(2), ClassId(3)]
    }

    #[test]
    fn all_bg_is_empty() {
        assert!(all_background(600.0).is_empty());
        let grid = SlotGrid::new(600.0, 0.5).unwrap();
        let dense = rasterize(&all_background(600.0), &grid, 3).unwrap();
        assert_eq!(dense.action_slots(), 0);
    }

    #[test]
    fn all_bg_never_scores_true_positive() {
        let grid = SlotGrid::new(10.0, 1.0).unwrap();
        let gt_iv = [LabeledInterval::ground_truth(3.0, 7.0, ClassId(1)).unwrap()];
        let gt = rasterize(&gt_iv, &grid, 1).unwrap();
        let pred = rasterize(&all_background(10.0), &grid, 1).unwrap();
        let s = evaluate_video("v", &gt, &pred, &EvaluatorConfig::new(1.0, true).unwrap()).unwrap();
        // IA is the background fraction of the prefix.
        let expect = [
            1.0,
            1.0,
            1.0,
            0.75,
            0.6,
            0.5,
            3.0 / 7.0,
            0.5,
            5.0 / 9.0,
            0.6,
        ];
        for (p, e) in s.points.iter().zip(expect) {
            assert!((p.ia - e).abs() < 1e-15);
        }
    }

    #[test]
    fn pm_copies_with_full_score() {
        let gt = vec![
            LabeledInterval::ground_truth(3.0, 7.0, ClassId(1)).unwrap(),
            LabeledInterval::ground_truth(8.0, 9.5, ClassId(2)).unwrap(),
        ];
        let pm = perfect_model(&gt);
        assert_eq!(pm.len(), 2);
        for (a, b) in gt.iter().zip(&pm) {
            assert_eq!(a.interval, b.interval);
            assert_eq!(a.class, b.class);
            assert_eq!(b.score, Some(1.0));
        }
        assert!(perfect_model(&[]).is_empty());
    }

    #[test]
    fn random_is_deterministic() {
        let a = uniform_random(7, 600.0, &classes(), 2.0, 0.5).unwrap();
        let b = uniform_random(7, 600.0, &classes(), 2.0, 0.5).unwrap();
        assert_eq!(a, b);
        let c = uniform_random(8, 600.0, &classes(), 2.0, 0.5).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn random_respects_bounds() {
        for seed in 0..20 {
            let dets = uniform_random(seed, 95.0, &classes(), 6.0, 0.5).unwrap();
            for d in dets {
                assert!(d.start() >= 0.0 && d.start() < 95.0);
                assert!(d.end() <= 95.0);
                let len = d.end() - d.start();
                assert!(len <= RANDOM_MAX_LENGTH);
                assert!(len >= 0.5 || d.end() == 95.0);
                assert!(classes().contains(&d.class));
                assert!((0.0..=1.0).contains(&d.score.unwrap()));
            }
        }
    }

    #[test]
    fn vanishing_rate_is_all_background() {
        let d = uniform_random(7, 600.0, &classes(), 1e-12, 0.5).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn random_rejects_bad_arguments() {
        assert!(uniform_random(1, 600.0, &[], 2.0, 0.5).is_err());
        assert!(uniform_random(1, 600.0, &classes(), 0.0, 0.5).is_err());
        assert!(uniform_random(1, 0.0, &classes(), 2.0, 0.5).is_err());
    }
}
