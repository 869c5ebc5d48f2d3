use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use super::{check_video_id, content_lines, fields, number, ClassCatalog, VideoMeta};
use crate::error::{Error, Result};
use crate::timeline::{LabeledInterval, TimeInterval};

/// A parsed ground-truth file.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub catalog: ClassCatalog,
    /// In declaration order.
    pub videos: Vec<VideoMeta>,
    pub annotations: BTreeMap<String, Vec<LabeledInterval>>,
    index: HashMap<String, usize>,
}

impl GroundTruth {
    pub fn new(
        catalog: ClassCatalog,
        videos: Vec<VideoMeta>,
        annotations: BTreeMap<String, Vec<LabeledInterval>>,
    ) -> Result<Self> {
        let mut index = HashMap::with_capacity(videos.len());
        for (i, v) in videos.iter().enumerate() {
            check_video_id(&v.video_id).map_err(Error::InvalidArgument)?;
            if !(v.duration.is_finite() && v.duration > 0.0) {
                return Err(Error::invalid(format!(
                    "video {} has no positive duration",
                    v.video_id
                )));
            }
            if index.insert(v.video_id.clone(), i).is_some() {
                return Err(Error::invalid(format!(
                    "duplicate video \"{}\"",
                    v.video_id
                )));
            }
        }
        for (id, ivs) in &annotations {
            let meta = index
                .get(id)
                .map(|&i| &videos[i])
                .ok_or_else(|| Error::invalid(format!("unknown video \"{id}\"")))?;
            for iv in ivs {
                if iv.class.0 > catalog.len() || iv.class.is_background() {
                    return Err(Error::invalid(format!("unknown class id {}", iv.class)));
                }
                if iv.end() > meta.duration {
                    return Err(Error::invalid(format!(
                        "interval ends at {} beyond duration {} of video {id}",
                        iv.end(),
                        meta.duration
                    )));
                }
            }
        }
        Ok(Self {
            catalog,
            videos,
            annotations,
            index,
        })
    }

    pub fn video(&self, id: &str) -> Option<&VideoMeta> {
        self.index.get(id).map(|&i| &self.videos[i])
    }

    pub fn video_position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn intervals(&self, id: &str) -> &[LabeledInterval] {
        self.annotations.get(id).map_or(&[], Vec::as_slice)
    }
}

/// Detector output, keyed by video id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DetectionSet {
    pub by_video: BTreeMap<String, Vec<LabeledInterval>>,
}

impl DetectionSet {
    pub fn intervals(&self, id: &str) -> &[LabeledInterval] {
        self.by_video.get(id).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.by_video.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Classes,
    Videos,
    Annotations,
    Detections,
}

fn section(line_no: usize, line: &str, allowed: &[(&str, Section)]) -> Result<Option<Section>> {
    let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) else {
        return Ok(None);
    };
    allowed
        .iter()
        .find(|(n, _)| *n == name.trim())
        .map(|(_, s)| Some(*s))
        .ok_or_else(|| Error::parse(line_no, format!("unknown section [{}]", name.trim())))
}

/// Shared row layout `video_id,class_name,start,end[,score]`, validated against the ground truth.
pub(crate) fn parse_interval_row(
    line_no: usize,
    f: &[&str],
    videos: &HashMap<String, f64>,
    catalog: &ClassCatalog,
    score: Option<&str>,
) -> Result<(String, LabeledInterval)> {
    let video_id = f[0];
    let duration = *videos
        .get(video_id)
        .ok_or_else(|| Error::parse(line_no, format!("unknown video \"{video_id}\"")))?;
    let class = catalog
        .id(f[1])
        .ok_or_else(|| Error::parse(line_no, format!("unknown class \"{}\"", f[1])))?;
    let start = number(line_no, f[2], "start time")?;
    let end = number(line_no, f[3], "end time")?;
    if start < 0.0 {
        return Err(Error::parse(line_no, "start before zero"));
    }
    if end <= start {
        return Err(Error::parse(line_no, "end before start"));
    }
    if end > duration {
        return Err(Error::parse(
            line_no,
            format!("interval ends at {end} beyond duration {duration} of video \"{video_id}\""),
        ));
    }
    let score = match score {
        None => None,
        Some(s) => {
            let v = number(line_no, s, "score")?;
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::parse(line_no, format!("score {s} outside [0, 1]")));
            }
            Some(v)
        }
    };
    let iv = TimeInterval::new(start, end).map_err(|e| Error::parse(line_no, e.to_string()))?;
    let labeled =
        LabeledInterval::new(iv, class, score).map_err(|e| Error::parse(line_no, e.to_string()))?;
    Ok((video_id.to_string(), labeled))
}

pub fn parse_ground_truth(text: &str) -> Result<GroundTruth> {
    const SECTIONS: &[(&str, Section)] = &[
        ("classes", Section::Classes),
        ("videos", Section::Videos),
        ("annotations", Section::Annotations),
    ];
    let mut declared: Option<ClassCatalog> = None;
    let mut videos: Vec<VideoMeta> = Vec::new();
    let mut durations: HashMap<String, f64> = HashMap::new();
    let mut rows: Vec<(usize, &str)> = Vec::new();
    let mut current = Section::None;

    for (line_no, line) in content_lines(text) {
        if let Some(s) = section(line_no, line, SECTIONS)? {
            if s == Section::Classes && declared.is_none() {
                declared = Some(ClassCatalog::default());
            }
            current = s;
            continue;
        }
        match current {
            Section::None | Section::Detections => {
                return Err(Error::parse(line_no, "row outside any section"));
            }
            Section::Classes => {
                let catalog = declared.as_mut().expect("set on section entry");
                catalog
                    .insert(line.to_string())
                    .map_err(|e| Error::parse(line_no, strip_kind(e)))?;
            }
            Section::Videos => {
                let f = fields(line_no, line, 2, "video_id,duration")?;
                check_video_id(f[0]).map_err(|m| Error::parse(line_no, m))?;
                let duration = number(line_no, f[1], "duration")?;
                if duration <= 0.0 {
                    return Err(Error::parse(line_no, "duration must be positive"));
                }
                if durations.insert(f[0].to_string(), duration).is_some() {
                    return Err(Error::parse(
                        line_no,
                        format!("duplicate video \"{}\"", f[0]),
                    ));
                }
                videos.push(VideoMeta {
                    video_id: f[0].to_string(),
                    duration,
                });
            }
            Section::Annotations => rows.push((line_no, line)),
        }
    }

    // Without a [classes] section, classes are numbered by first use.
    let catalog = match declared {
        Some(c) => c,
        None => {
            let mut c = ClassCatalog::default();
            for &(line_no, line) in &rows {
                let f = fields(line_no, line, 4, "video_id,class_name,start,end")?;
                if c.id(f[1]).is_none() {
                    c.insert(f[1].to_string())
                        .map_err(|e| Error::parse(line_no, strip_kind(e)))?;
                }
            }
            c
        }
    };

    let mut annotations: BTreeMap<String, Vec<LabeledInterval>> = BTreeMap::new();
    for (line_no, line) in rows {
        let f = fields(line_no, line, 4, "video_id,class_name,start,end")?;
        let (video, iv) = parse_interval_row(line_no, &f, &durations, &catalog, None)?;
        annotations.entry(video).or_default().push(iv);
    }
    GroundTruth::new(catalog, videos, annotations)
}

pub fn parse_detections(text: &str, gt: &GroundTruth) -> Result<DetectionSet> {
    const SECTIONS: &[(&str, Section)] = &[("detections", Section::Detections)];
    let durations: HashMap<String, f64> = gt
        .videos
        .iter()
        .map(|v| (v.video_id.clone(), v.duration))
        .collect();
    let mut set = DetectionSet::default();
    for (line_no, line) in content_lines(text) {
        if section(line_no, line, SECTIONS)?.is_some() {
            continue;
        }
        let f = fields(line_no, line, 5, "video_id,class_name,start,end,score")?;
        let (video, iv) =
            parse_interval_row(line_no, &f[..4], &durations, &gt.catalog, Some(f[4]))?;
        set.by_video.entry(video).or_default().push(iv);
    }
    Ok(set)
}

fn strip_kind(e: Error) -> String {
    match e {
        Error::InvalidArgument(m) => m,
        other => other.to_string(),
    }
}

fn class_name<'a>(gt: &'a GroundTruth, iv: &LabeledInterval) -> &'a str {
    gt.catalog.name(iv.class).expect("validated class")
}

pub fn write_ground_truth(gt: &GroundTruth) -> String {
    let mut out = String::from("[classes]\n");
    for name in gt.catalog.names() {
        let _ = writeln!(out, "{name}");
    }
    out.push_str("[videos]\n");
    for v in &gt.videos {
        let _ = writeln!(out, "{},{}", v.video_id, v.duration);
    }
    out.push_str("[annotations]\n");
    for v in &gt.videos {
        for iv in gt.intervals(&v.video_id) {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                v.video_id,
                class_name(gt, iv),
                iv.start(),
                iv.end()
            );
        }
    }
    out
}

/// Rows follow the ground truth's video order.
pub fn write_detections(set: &DetectionSet, gt: &GroundTruth) -> String {
    let mut out = String::from("[detections]\n");
    for v in &gt.videos {
        for iv in set.intervals(&v.video_id) {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                v.video_id,
                class_name(gt, iv),
                iv.start(),
                iv.end(),
                iv.score.unwrap_or(1.0)
            );
        }
    }
    out
}
