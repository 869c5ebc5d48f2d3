//! Text formats: ground truth, detections, event streams and metric reports.
//!
//! Ground truth and detection files are comma-separated UTF-8 with `#` comment
//! lines and `[section]` headers:
//!
//! ```text
//! # optional; otherwise classes are numbered in order of first use
//! [classes]
//! Run
//! Jump
//! [videos]
//! v1,600.0
//! [annotations]
//! v1,Run,3.0,7.0
//! ```
//!
//! Detections use a single `[detections]` section (the header may be
//! omitted) with rows `video_id,class_name,start,end,score`. Event streams are
//! header-less rows `video_id,class_name,start,end,score,emit_time`.
//!
//! Numbers always use `.` as the decimal point. Times are written with the
//! shortest representation that parses back to the same `f64`.

mod annotations;
mod events;
mod report;

pub use annotations::{
    parse_detections, parse_ground_truth, write_detections, write_ground_truth, DetectionSet,
    GroundTruth,
};
pub use events::{
    detections_to_events, read_event_stream, write_event_stream, DetectionEvent, EventReader,
};
pub use report::{
    write_comparison, write_metric_series, write_summary, ComparisonRow, SERIES_HEADER,
    SUMMARY_HEADER,
};

use crate::error::{Error, Result};
use crate::timeline::ClassId;

pub const BACKGROUND_NAME: &str = "background";

/// Action class names; class `k` is `names[k - 1]`. Background is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassCatalog {
    names: Vec<String>,
}

impl ClassCatalog {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut catalog = Self::default();
        for name in names {
            catalog.insert(name.into())?;
        }
        Ok(catalog)
    }

    fn insert(&mut self, name: String) -> Result<ClassId> {
        if name.is_empty() {
            return Err(Error::invalid("empty class name"));
        }
        if name == BACKGROUND_NAME {
            return Err(Error::invalid("\"background\" is reserved"));
        }
        if self.names.contains(&name) {
            return Err(Error::invalid(format!("duplicate class \"{name}\"")));
        }
        self.names.push(name);
        Ok(ClassId(self.names.len() as u32))
    }

    pub fn id(&self, name: &str) -> Option<ClassId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| ClassId(i as u32 + 1))
    }

    pub fn name(&self, class: ClassId) -> Option<&str> {
        if class.is_background() {
            return Some(BACKGROUND_NAME);
        }
        self.names.get(class.0 as usize - 1).map(String::as_str)
    }

    pub fn len(&self) -> u32 {
        self.names.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ClassId> {
        (1..=self.len()).map(ClassId)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VideoMeta {
    pub video_id: String,
    pub duration: f64,
}

/// Ids end up in file names, so separators and the dot entries are refused.
pub(crate) fn check_video_id(id: &str) -> std::result::Result<(), String> {
    if id.is_empty() {
        return Err("empty video id".into());
    }
    if id == "." || id == ".." || id.contains(['/', '\\']) {
        return Err(format!("video id \"{id}\" is not a valid file name"));
    }
    Ok(())
}

/// Non-blank, non-comment lines with their 1-based numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn fields<'a>(
    line_no: usize,
    line: &'a str,
    expect: usize,
    layout: &str,
) -> Result<Vec<&'a str>> {
    let f: Vec<&str> = line.split(',').map(str::trim).collect();
    if f.len() != expect {
        return Err(Error::parse(
            line_no,
            format!("expected {expect} fields ({layout}), got {}", f.len()),
        ));
    }
    Ok(f)
}

pub(crate) fn number(line_no: usize, field: &str, what: &str) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::parse(line_no, format!("invalid {what} \"{field}\""))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_ids() {
        let c = ClassCatalog::new(["Run", "Jump"]).unwrap();
        assert_eq!(c.id("Run"), Some(ClassId(1)));
        assert_eq!(c.id("Jump"), Some(ClassId(2)));
        assert_eq!(c.id("Swim"), None);
        assert_eq!(c.name(ClassId(2)), Some("Jump"));
        assert_eq!(c.name(ClassId(0)), Some("background"));
        assert_eq!(c.name(ClassId(3)), None);
        assert!(ClassCatalog::new(["Run", "Run"]).is_err());
        assert!(ClassCatalog::new(["background"]).is_err());
        assert!(ClassCatalog::new([""]).is_err());
    }

    #[test]
    fn video_ids() {
        assert!(check_video_id("ep01_take2").is_ok());
        assert!(check_video_id("").is_err());
        assert!(check_video_id("..").is_err());
        assert!(check_video_id("a/b").is_err());
    }

    #[test]
    fn numbers_are_locale_free() {
        assert_eq!(number(1, "3.25", "time").unwrap(), 3.25);
        assert!(number(1, "3,25", "time").is_err());
        assert!(number(1, "NaN", "time").is_err());
        assert!(number(1, "inf", "time").is_err());
    }
}
