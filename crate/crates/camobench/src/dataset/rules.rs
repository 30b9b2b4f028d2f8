//! Annotation quality rules.
//!
//! Four editorial rules govern the annotations, plus one structural check:
//!
//! 1. **Tightness** — boxes tightly enclose the visible target. Judging
//!    tightness needs the pixels, so this validator cannot evaluate it.
//! 2. **AbsenceBox** — a frame marked absent carries no box, and a present
//!    frame carries exactly one.
//! 3. **FirstFrame** — the first frame of every sequence is present: a
//!    tracker is initialized there.
//! 4. **Transition** — frames entering or leaving full occlusion are
//!    re-checked by a second annotator. An editorial process, not a
//!    property of the files; also not evaluable here.
//!
//! **BoxBounds** is the structural check: every present box has finite,
//! positive extent and lies inside the frame rectangle.

use serde::{Deserialize, Serialize};

use super::types::Sequence;

/// Identifier of one validation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleId {
    Tightness,
    AbsenceBox,
    FirstFrame,
    Transition,
    BoxBounds,
}

impl RuleId {
    pub fn name(self) -> &'static str {
        match self {
            RuleId::Tightness => "tightness",
            RuleId::AbsenceBox => "absence-box",
            RuleId::FirstFrame => "first-frame",
            RuleId::Transition => "transition",
            RuleId::BoxBounds => "box-bounds",
        }
    }

    /// Position in the editorial rule list; `None` for the structural
    /// bounds check, which is ours rather than the annotators'.
    pub fn number(self) -> Option<u8> {
        match self {
            RuleId::Tightness => Some(1),
            RuleId::AbsenceBox => Some(2),
            RuleId::FirstFrame => Some(3),
            RuleId::Transition => Some(4),
            RuleId::BoxBounds => None,
        }
    }

    /// Human-readable label, e.g. `rule 3 (first-frame)`.
    pub fn label(self) -> String {
        match self.number() {
            Some(n) => format!("rule {n} ({})", self.name()),
            None => format!("structural ({})", self.name()),
        }
    }
}

impl std::fmt::Display for RuleId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One rule breach, located by frame where that makes sense.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleViolation {
    pub rule: RuleId,
    /// 0-based frame index; `None` for sequence-level findings.
    pub frame: Option<usize>,
    pub detail: String,
}

impl std::fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.frame {
            Some(idx) => write!(f, "[{}] frame {}: {}", self.rule, idx, self.detail),
            None => write!(f, "[{}] {}", self.rule, self.detail),
        }
    }
}

/// Outcome of validating one sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleReport {
    pub sequence: String,
    pub violations: Vec<RuleViolation>,
    /// Rules this validator cannot judge from the annotation files alone.
    pub not_evaluated: Vec<RuleId>,
}

impl RuleReport {
    /// True when every evaluable rule passed.
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check one sequence against the evaluable rules.
pub fn validate_rules(seq: &Sequence) -> RuleReport {
    let mut violations = Vec::new();

    if seq.frames.is_empty() {
        violations.push(RuleViolation {
            rule: RuleId::FirstFrame,
            frame: None,
            detail: "sequence has no frames".to_string(),
        });
    } else if seq.frames[0].present_box().is_none() {
        violations.push(RuleViolation {
            rule: RuleId::FirstFrame,
            frame: Some(0),
            detail: "first frame must contain a present target".to_string(),
        });
    }

    let (fw, fh) = (f64::from(seq.frame_width), f64::from(seq.frame_height));
    for (idx, frame) in seq.frames.iter().enumerate() {
        if frame.absent {
            if let Some(b) = frame.bbox {
                violations.push(RuleViolation {
                    rule: RuleId::AbsenceBox,
                    frame: Some(idx),
                    detail: format!(
                        "absent frame carries a box ({},{},{},{})",
                        b.x, b.y, b.w, b.h
                    ),
                });
            }
            continue;
        }
        let Some(b) = frame.bbox else {
            violations.push(RuleViolation {
                rule: RuleId::AbsenceBox,
                frame: Some(idx),
                detail: "present frame is missing its box".to_string(),
            });
            continue;
        };
        if !b.is_valid() {
            violations.push(RuleViolation {
                rule: RuleId::BoxBounds,
                frame: Some(idx),
                detail: format!(
                    "box ({},{},{},{}) must be finite with positive extent",
                    b.x, b.y, b.w, b.h
                ),
            });
        } else if b.x < 0.0 || b.y < 0.0 || b.right() > fw || b.bottom() > fh {
            violations.push(RuleViolation {
                rule: RuleId::BoxBounds,
                frame: Some(idx),
                detail: format!(
                    "box ({},{},{},{}) exceeds the {}x{} frame",
                    b.x, b.y, b.w, b.h, seq.frame_width, seq.frame_height
                ),
            });
        }
    }

    RuleReport {
        sequence: seq.name.clone(),
        violations,
        not_evaluated: vec![RuleId::Tightness, RuleId::Transition],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::types::{BoundingBox, FrameAnnotation};
    use crate::dataset::AttributeSet;

    fn seq(frames: Vec<FrameAnnotation>) -> Sequence {
        Sequence {
            name: "s".into(),
            category: "fish".into(),
            frames,
            attributes: AttributeSet::default(),
            frame_width: 100,
            frame_height: 80,
        }
    }

    #[test]
    fn clean_sequence_passes() {
        let report = validate_rules(&seq(vec![
            FrameAnnotation::present(BoundingBox::new(0.0, 0.0, 10.0, 10.0)),
            FrameAnnotation::missing(),
            FrameAnnotation::present(BoundingBox::new(90.0, 70.0, 10.0, 10.0)),
        ]));
        assert!(report.is_clean());
        assert_eq!(
            report.not_evaluated,
            vec![RuleId::Tightness, RuleId::Transition]
        );
    }

    #[test]
    fn first_frame_must_be_present() {
        let report = validate_rules(&seq(vec![
            FrameAnnotation::missing(),
            FrameAnnotation::present(BoundingBox::new(0.0, 0.0, 10.0, 10.0)),
        ]));
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].rule, RuleId::FirstFrame);

        let report = validate_rules(&seq(vec![]));
        assert_eq!(report.violations[0].rule, RuleId::FirstFrame);
        assert_eq!(report.violations[0].frame, None);
    }

    #[test]
    fn absent_frame_with_box_is_flagged() {
        let mut frames = vec![
            FrameAnnotation::present(BoundingBox::new(0.0, 0.0, 10.0, 10.0)),
            FrameAnnotation::missing(),
        ];
        frames[1].bbox = Some(BoundingBox::new(5.0, 5.0, 9.0, 9.0));
        let report = validate_rules(&seq(frames));
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].rule, RuleId::AbsenceBox);
        assert_eq!(report.violations[0].frame, Some(1));
    }

    #[test]
    fn out_of_bounds_and_degenerate_boxes_are_flagged() {
        let report = validate_rules(&seq(vec![
            FrameAnnotation::present(BoundingBox::new(0.0, 0.0, 10.0, 10.0)),
            FrameAnnotation::present(BoundingBox::new(95.0, 0.0, 10.0, 10.0)), // right = 105 > 100
            FrameAnnotation::present(BoundingBox::new(5.0, -1.0, 10.0, 10.0)),
            FrameAnnotation::present(BoundingBox::new(5.0, 5.0, 0.0, 10.0)),
        ]));
        assert_eq!(report.violations.len(), 3);
        assert!(report
            .violations
            .iter()
            .all(|v| v.rule == RuleId::BoxBounds));
        assert_eq!(
            report.violations.iter().map(|v| v.frame).collect::<Vec<_>>(),
            vec![Some(1), Some(2), Some(3)]
        );
    }

    #[test]
    fn boxes_touching_the_border_are_fine() {
        let report = validate_rules(&seq(vec![FrameAnnotation::present(BoundingBox::new(
            0.0, 0.0, 100.0, 80.0,
        ))]));
        assert!(report.is_clean());
    }
}
