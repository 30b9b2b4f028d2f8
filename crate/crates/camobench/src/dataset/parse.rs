//! Reading and writing the on-disk sequence format.
//!
//! Parsing is strict about *format* (field counts, numeric tokens, matching
//! line counts) and lenient about *semantics* (degenerate geometry, a box on
//! an absent frame): semantic problems are the business of
//! [`validate_rules`](super::validate_rules), which needs to see them to
//! report them.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use super::types::{BoundingBox, Dataset, FrameAnnotation, Sequence};
use crate::dataset::AttributeSet;

/// Errors from loading, parsing, or writing dataset files.
#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("groundtruth line {line}: expected 4 comma-separated values, found {found}")]
    BoxFieldCount { line: usize, found: usize },
    #[error("groundtruth line {line}: invalid number {token:?}")]
    BoxNumber { line: usize, token: String },
    #[error("absence label line {line}: expected 0 or 1, found {token:?}")]
    AbsenceValue { line: usize, token: String },
    #[error("groundtruth has {boxes} frames but absence labels have {absence}")]
    FrameCountMismatch { boxes: usize, absence: usize },
    #[error("attributes line: expected 12 comma-separated flags, found {found}")]
    AttributeCount { found: usize },
    #[error("attributes flag {position}: expected 0 or 1, found {token:?}")]
    AttributeValue { position: usize, token: String },
    #[error("attributes file: expected exactly 1 line, found {found}")]
    AttributeLines { found: usize },
    #[error("meta line {line}: expected key=value, found {content:?}")]
    MetaLine { line: usize, content: String },
    #[error("meta: missing required key {key:?}")]
    MetaMissingKey { key: &'static str },
    #[error("meta key {key:?}: invalid value {token:?}")]
    MetaValue { key: &'static str, token: String },
    #[error("duplicate sequence name {name:?}")]
    DuplicateSequence { name: String },
    #[error("sequence list is empty")]
    EmptyList,
}

fn io_err(path: &Path, source: io::Error) -> DatasetError {
    DatasetError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// The raw file bodies of one sequence directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceFiles {
    /// `groundtruth.txt`: one `x,y,w,h` line per frame.
    pub groundtruth: String,
    /// `absence.label`: one `0`/`1` per frame; `None` means the file is
    /// missing and every frame is present.
    pub absence: Option<String>,
    /// `attributes.txt`: a single line of 12 comma-separated flags.
    pub attributes: String,
    /// `meta.ini`: `key=value` pairs.
    pub meta: String,
}

/// Sequence-level metadata stored in `meta.ini`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceMeta {
    pub category: String,
    pub width: u32,
    pub height: u32,
}

impl SequenceMeta {
    /// Parse `key=value` lines; `#` starts a comment, blank lines are
    /// skipped, unknown keys are ignored so sidecar tools can add their own.
    pub fn parse(text: &str) -> Result<Self, DatasetError> {
        let mut category = None;
        let mut width = None;
        let mut height = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(DatasetError::MetaLine {
                    line: idx + 1,
                    content: raw.to_string(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "category" => category = Some(value.to_string()),
                "width" => {
                    width = Some(value.parse::<u32>().map_err(|_| DatasetError::MetaValue {
                        key: "width",
                        token: value.to_string(),
                    })?)
                }
                "height" => {
                    height = Some(value.parse::<u32>().map_err(|_| DatasetError::MetaValue {
                        key: "height",
                        token: value.to_string(),
                    })?)
                }
                _ => {}
            }
        }
        Ok(Self {
            category: category.ok_or(DatasetError::MetaMissingKey { key: "category" })?,
            width: width.ok_or(DatasetError::MetaMissingKey { key: "width" })?,
            height: height.ok_or(DatasetError::MetaMissingKey { key: "height" })?,
        })
    }

    pub fn to_ini(&self) -> String {
        format!(
            "category={}\nwidth={}\nheight={}\n",
            self.category, self.width, self.height
        )
    }
}

/// Lines of a file with trailing blank lines dropped (editors and shell
/// redirects disagree about final newlines).
fn content_lines(text: &str) -> Vec<&str> {
    let mut lines: Vec<&str> = text.lines().collect();
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    lines
}

fn parse_box_line(idx: usize, line: &str) -> Result<BoundingBox, DatasetError> {
    let fields: Vec<&str> = line.trim().split(',').collect();
    if fields.len() != 4 {
        return Err(DatasetError::BoxFieldCount {
            line: idx + 1,
            found: fields.len(),
        });
    }
    let mut vals = [0.0f64; 4];
    for (i, field) in fields.iter().enumerate() {
        vals[i] = field
            .trim()
            .parse::<f64>()
            .map_err(|_| DatasetError::BoxNumber {
                line: idx + 1,
                token: field.trim().to_string(),
            })?;
    }
    Ok(BoundingBox::new(vals[0], vals[1], vals[2], vals[3]))
}

/// Parse the file bodies of one sequence.
///
/// An absent frame whose groundtruth line is all zeros gets `bbox: None`
/// (the conventional placeholder); any other box on an absent frame is kept
/// so validation can report it.
pub fn parse_sequence(name: &str, files: &SequenceFiles) -> Result<Sequence, DatasetError> {
    let box_lines = content_lines(&files.groundtruth);
    let absent: Vec<bool> = match &files.absence {
        Some(text) => {
            let lines = content_lines(text);
            if lines.len() != box_lines.len() {
                return Err(DatasetError::FrameCountMismatch {
                    boxes: box_lines.len(),
                    absence: lines.len(),
                });
            }
            let mut flags = Vec::with_capacity(lines.len());
            for (idx, line) in lines.iter().enumerate() {
                flags.push(match line.trim() {
                    "0" => false,
                    "1" => true,
                    token => {
                        return Err(DatasetError::AbsenceValue {
                            line: idx + 1,
                            token: token.to_string(),
                        })
                    }
                });
            }
            flags
        }
        None => vec![false; box_lines.len()],
    };

    let mut frames = Vec::with_capacity(box_lines.len());
    for (idx, line) in box_lines.iter().enumerate() {
        let bbox = parse_box_line(idx, line)?;
        let is_zero = bbox.x == 0.0 && bbox.y == 0.0 && bbox.w == 0.0 && bbox.h == 0.0;
        frames.push(FrameAnnotation {
            bbox: if absent[idx] && is_zero { None } else { Some(bbox) },
            absent: absent[idx],
        });
    }

    let attr_lines = content_lines(&files.attributes);
    if attr_lines.len() != 1 {
        return Err(DatasetError::AttributeLines {
            found: attr_lines.len(),
        });
    }
    let attributes = AttributeSet::parse_line(attr_lines[0])?;
    let meta = SequenceMeta::parse(&files.meta)?;

    Ok(Sequence {
        name: name.to_string(),
        category: meta.category,
        frames,
        attributes,
        frame_width: meta.width,
        frame_height: meta.height,
    })
}

/// Render a float the short way: `10` not `10.0`, full precision otherwise.
fn fmt_coord(v: f64) -> String {
    format!("{v}")
}

/// Render a sequence back into file bodies.
///
/// Absent frames are written as the `0,0,0,0` placeholder (any stray box
/// they carried in memory is not round-tripped; writing is canonical).
pub fn serialize_sequence(seq: &Sequence) -> SequenceFiles {
    let mut groundtruth = String::new();
    let mut absence = String::new();
    for frame in &seq.frames {
        match frame.present_box() {
            Some(b) => {
                let _ = writeln!(
                    groundtruth,
                    "{},{},{},{}",
                    fmt_coord(b.x),
                    fmt_coord(b.y),
                    fmt_coord(b.w),
                    fmt_coord(b.h)
                );
            }
            None => groundtruth.push_str("0,0,0,0\n"),
        }
        absence.push_str(if frame.absent { "1\n" } else { "0\n" });
    }
    let meta = SequenceMeta {
        category: seq.category.clone(),
        width: seq.frame_width,
        height: seq.frame_height,
    };
    SequenceFiles {
        groundtruth,
        absence: Some(absence),
        attributes: format!("{}\n", seq.attributes.to_line()),
        meta: meta.to_ini(),
    }
}

/// Load one sequence from its directory; the directory name is the sequence
/// name. `absence.label` may be missing (all frames present).
pub fn load_sequence(dir: &Path) -> Result<Sequence, DatasetError> {
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let read = |file: &str| -> Result<String, DatasetError> {
        let path = dir.join(file);
        fs::read_to_string(&path).map_err(|e| io_err(&path, e))
    };
    let absence_path = dir.join("absence.label");
    let absence = if absence_path.exists() {
        Some(fs::read_to_string(&absence_path).map_err(|e| io_err(&absence_path, e))?)
    } else {
        None
    };
    let files = SequenceFiles {
        groundtruth: read("groundtruth.txt")?,
        absence,
        attributes: read("attributes.txt")?,
        meta: read("meta.ini")?,
    };
    parse_sequence(&name, &files)
}

/// Write one sequence into `dir`, creating it if needed.
pub fn save_sequence(dir: &Path, seq: &Sequence) -> Result<(), DatasetError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let files = serialize_sequence(seq);
    let write = |file: &str, body: &str| -> Result<(), DatasetError> {
        let path = dir.join(file);
        fs::write(&path, body).map_err(|e| io_err(&path, e))
    };
    write("groundtruth.txt", &files.groundtruth)?;
    if let Some(absence) = &files.absence {
        write("absence.label", absence)?;
    }
    write("attributes.txt", &files.attributes)?;
    write("meta.ini", &files.meta)
}

/// Load a dataset rooted at `root`: `list.txt` names one sequence directory
/// per line (blank lines and `#` comments skipped).
pub fn load_dataset(root: &Path) -> Result<Dataset, DatasetError> {
    let list_path = root.join("list.txt");
    let list = fs::read_to_string(&list_path).map_err(|e| io_err(&list_path, e))?;
    let names: Vec<&str> = list
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if names.is_empty() {
        return Err(DatasetError::EmptyList);
    }
    let mut seen = BTreeSet::new();
    for name in &names {
        if !seen.insert(*name) {
            return Err(DatasetError::DuplicateSequence {
                name: name.to_string(),
            });
        }
    }
    let mut sequences = Vec::with_capacity(names.len());
    for name in names {
        sequences.push(load_sequence(&root.join(name))?);
    }
    let name = root
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    Dataset::new(name, sequences)
}

/// Write a dataset under `root`: `list.txt` plus one directory per sequence.
pub fn save_dataset(root: &Path, ds: &Dataset) -> Result<(), DatasetError> {
    fs::create_dir_all(root).map_err(|e| io_err(root, e))?;
    let mut list = String::new();
    for seq in ds.sequences() {
        list.push_str(&seq.name);
        list.push('\n');
        save_sequence(&root.join(&seq.name), seq)?;
    }
    let list_path = root.join("list.txt");
    fs::write(&list_path, list).map_err(|e| io_err(&list_path, e))
}
