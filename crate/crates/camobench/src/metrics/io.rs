//! Tracker output on disk: one directory per tracker, one `<sequence>.txt`
//! per sequence with an `x,y,w,h` line for every frame (including absent
//! ones — the tracker does not know the absence labels).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::MetricsError;
use crate::dataset::BoundingBox;

/// The per-frame boxes one tracker produced, keyed by sequence name.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackerResult {
    pub tracker: String,
    predictions: BTreeMap<String, Vec<BoundingBox>>,
}

impl TrackerResult {
    pub fn new(tracker: impl Into<String>) -> Self {
        Self {
            tracker: tracker.into(),
            predictions: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, sequence: impl Into<String>, boxes: Vec<BoundingBox>) {
        self.predictions.insert(sequence.into(), boxes);
    }

    pub fn get(&self, sequence: &str) -> Option<&[BoundingBox]> {
        self.predictions.get(sequence).map(Vec::as_slice)
    }

    /// Covered sequence names, sorted.
    pub fn sequences(&self) -> impl Iterator<Item = &str> {
        self.predictions.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }
}

fn io_err(path: &Path, source: std::io::Error) -> MetricsError {
    MetricsError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_prediction_file(path: &Path, text: &str) -> Result<Vec<BoundingBox>, MetricsError> {
    let mut lines: Vec<&str> = text.lines().collect();
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    let mut boxes = Vec::with_capacity(lines.len());
    for (idx, line) in lines.iter().enumerate() {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 4 {
            return Err(MetricsError::PredictionParse {
                path: path.display().to_string(),
                line: idx + 1,
                detail: format!("expected 4 comma-separated values, found {}", fields.len()),
            });
        }
        let mut vals = [0.0f64; 4];
        for (i, field) in fields.iter().enumerate() {
            vals[i] =
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| MetricsError::PredictionParse {
                        path: path.display().to_string(),
                        line: idx + 1,
                        detail: format!("invalid number {:?}", field.trim()),
                    })?;
        }
        boxes.push(BoundingBox::new(vals[0], vals[1], vals[2], vals[3]));
    }
    Ok(boxes)
}

/// Load every `*.txt` in `dir` as one sequence's predictions; the directory
/// name is the tracker name.
pub fn load_tracker_result(dir: &Path) -> Result<TrackerResult, MetricsError> {
    let tracker = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "tracker".to_string());
    let mut result = TrackerResult::new(tracker);
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| io_err(dir, e))?
        .into_iter()
        .map(|entry| entry.path())
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .collect();
    paths.sort();
    for path in paths {
        let name = path
            .file_stem()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
        result.insert(name, parse_prediction_file(&path, &text)?);
    }
    Ok(result)
}

/// Write a tracker's predictions under `dir`, one file per sequence.
pub fn save_tracker_result(dir: &Path, result: &TrackerResult) -> Result<(), MetricsError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for (name, boxes) in &result.predictions {
        let mut body = String::new();
        for b in boxes {
            body.push_str(&format!("{},{},{},{}\n", b.x, b.y, b.w, b.h));
        }
        let path = dir.join(format!("{name}.txt"));
        fs::write(&path, body).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}
