//! Record schema and ingestion for image–caption–OCR corpora.
//!
//! One record per JSONL line:
//!
//! ```text
//! {"image_id": str, "image_uri": str?, "image_size": [w,h]?, "caption": str?,
//!  "ocr": [{"text": str, "bbox": [x,y,w,h], "confidence": float?}],
//!  "qa": [{"question": str, "answers": [str,...]}]?}
//! ```
//!
//! Token text is kept verbatim. Records without OCR are valid; the objective
//! builders decide eligibility.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hash::fingerprint128;

/// Largest answer list accepted for a QA annotation.
pub const MAX_ANSWERS: usize = 10;

/// Axis-aligned box in pixels; `(x, y)` is the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    /// Fails unless width and height are strictly positive and all fields finite.
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        if ![x, y, w, h].iter().all(|v| v.is_finite()) {
            return Err(Error::Schema("bbox has a non-finite coordinate".into()));
        }
        if w <= 0.0 || h <= 0.0 {
            return Err(Error::Schema(format!(
                "bbox width and height must be positive, got w={w} h={h}"
            )));
        }
        Ok(BBox { x, y, w, h })
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn center_y(&self) -> f64 {
        self.y + self.h / 2.0
    }

    fn fits(&self, size: ImageSize) -> bool {
        self.x >= 0.0
            && self.y >= 0.0
            && self.right() <= f64::from(size.width)
            && self.bottom() <= f64::from(size.height)
    }
}

impl Serialize for BBox {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x, self.y, self.w, self.h].serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageSize {
    pub width: u32,
    pub height: u32,
}

impl Serialize for ImageSize {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.width, self.height].serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OcrToken {
    pub text: String,
    pub bbox: BBox,
    pub confidence: f64,
}

impl OcrToken {
    pub fn new(text: impl Into<String>, bbox: BBox) -> Self {
        OcrToken {
            text: text.into(),
            bbox,
            confidence: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QaAnnotation {
    pub question: String,
    pub answers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub image_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image_uri: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image_size: Option<ImageSize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caption: Option<String>,
    pub ocr: Vec<OcrToken>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qa: Option<Vec<QaAnnotation>>,
}

impl Record {
    pub fn new(image_id: impl Into<String>) -> Self {
        Record {
            image_id: image_id.into(),
            image_uri: None,
            image_size: None,
            caption: None,
            ocr: Vec::new(),
            qa: None,
        }
    }

    /// The record as one compact JSON line (no trailing newline).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serialization is infallible")
    }
}

// Wire-level shapes; everything optional so that schema errors carry our own messages.
#[derive(Deserialize)]
struct RawRecord {
    image_id: Option<String>,
    image_uri: Option<String>,
    image_size: Option<[u32; 2]>,
    caption: Option<String>,
    #[serde(default)]
    ocr: Option<Vec<RawToken>>,
    qa: Option<Vec<RawQa>>,
}

#[derive(Deserialize)]
struct RawToken {
    text: Option<String>,
    bbox: Option<[f64; 4]>,
    confidence: Option<f64>,
}

#[derive(Deserialize)]
struct RawQa {
    question: Option<String>,
    answers: Option<Vec<String>>,
}

/// Only the identifier of a line; used by streaming passes that do not need the full record.
#[derive(Deserialize)]
struct IdOnly {
    image_id: Option<String>,
}

fn map_json_error(err: serde_json::Error) -> Error {
    use serde_json::error::Category;
    match err.classify() {
        Category::Data => Error::Schema(err.to_string()),
        _ => Error::Parse {
            offset: err.column().saturating_sub(1),
            message: err.to_string(),
        },
    }
}

/// Parse one JSONL line into a [`Record`]. Unknown fields are ignored.
pub fn parse_record(line: &str) -> Result<Record> {
    let raw: RawRecord = serde_json::from_str(line).map_err(map_json_error)?;

    let image_id = match raw.image_id {
        Some(id) if !id.is_empty() => id,
        Some(_) => return Err(Error::Schema("image_id is empty".into())),
        None => return Err(Error::Schema("missing image_id".into())),
    };

    let image_size = match raw.image_size {
        Some([width, height]) if width > 0 && height > 0 => Some(ImageSize { width, height }),
        Some(_) => return Err(Error::Schema("image_size must be positive".into())),
        None => None,
    };

    let mut ocr = Vec::new();
    for (i, tok) in raw.ocr.unwrap_or_default().into_iter().enumerate() {
        let text = tok
            .text
            .ok_or_else(|| Error::Schema(format!("ocr[{i}]: missing text")))?;
        if text.trim().is_empty() {
            return Err(Error::Schema(format!("ocr[{i}]: empty token text")));
        }
        if text.contains(['\n', '\r']) {
            return Err(Error::Schema(format!("ocr[{i}]: token text contains a newline")));
        }
        let [x, y, w, h] = tok
            .bbox
            .ok_or_else(|| Error::Schema(format!("ocr[{i}]: missing bbox")))?;
        let bbox = BBox::new(x, y, w, h).map_err(|e| match e {
            Error::Schema(m) => Error::Schema(format!("ocr[{i}]: {m}")),
            other => other,
        })?;
        ocr.push(OcrToken {
            text,
            bbox,
            confidence: tok.confidence.unwrap_or(1.0),
        });
    }

    let qa = match raw.qa {
        None => None,
        Some(items) => {
            let mut out = Vec::with_capacity(items.len());
            for (i, q) in items.into_iter().enumerate() {
                let question = q.question.unwrap_or_default();
                if question.trim().is_empty() {
                    return Err(Error::Schema(format!("qa[{i}]: empty question")));
                }
                let answers = q.answers.unwrap_or_default();
                if answers.is_empty() {
                    return Err(Error::Schema(format!("qa[{i}]: no answers")));
                }
                out.push(QaAnnotation { question, answers });
            }
            Some(out)
        }
    };

    Ok(Record {
        image_id,
        image_uri: raw.image_uri,
        image_size,
        caption: raw.caption,
        ocr,
        qa,
    })
}

/// Extract only `image_id` from a line, without validating the rest.
pub fn parse_image_id(line: &str) -> Result<String> {
    let raw: IdOnly = serde_json::from_str(line).map_err(map_json_error)?;
    match raw.image_id {
        Some(id) if !id.is_empty() => Ok(id),
        _ => Err(Error::Schema("missing image_id".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    BboxOutOfBounds { token: usize },
    ConfidenceRange { token: usize },
    DuplicateImageId,
    QaAnswerCount { qa: usize, count: usize },
}

impl Violation {
    pub fn code(&self) -> &'static str {
        match self {
            Violation::BboxOutOfBounds { .. } => "bbox_out_of_bounds",
            Violation::ConfidenceRange { .. } => "confidence_range",
            Violation::DuplicateImageId => "duplicate_image_id",
            Violation::QaAnswerCount { .. } => "qa_answer_count",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BboxOutOfBounds { token } => write!(f, "bbox_out_of_bounds (ocr[{token}])"),
            Violation::ConfidenceRange { token } => write!(f, "confidence_range (ocr[{token}])"),
            Violation::DuplicateImageId => f.write_str("duplicate_image_id"),
            Violation::QaAnswerCount { qa, count } => {
                write!(f, "qa_answer_count (qa[{qa}] has {count})")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    /// A record with no violations may enter the pipeline.
    pub fn is_eligible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, code: &str) -> bool {
        self.violations.iter().any(|v| v.code() == code)
    }
}

/// Per-record checks that need no stream context.
pub fn validate_record(record: &Record) -> ValidationReport {
    let mut violations = Vec::new();
    for (i, tok) in record.ocr.iter().enumerate() {
        let in_bounds = match record.image_size {
            Some(size) => tok.bbox.fits(size),
            None => tok.bbox.x >= 0.0 && tok.bbox.y >= 0.0,
        };
        if !in_bounds {
            violations.push(Violation::BboxOutOfBounds { token: i });
        }
        if !(0.0..=1.0).contains(&tok.confidence) {
            violations.push(Violation::ConfidenceRange { token: i });
        }
    }
    for (i, qa) in record.qa.iter().flatten().enumerate() {
        if qa.answers.len() > MAX_ANSWERS {
            violations.push(Violation::QaAnswerCount {
                qa: i,
                count: qa.answers.len(),
            });
        }
    }
    ValidationReport { violations }
}

/// Stream validator: adds duplicate-`image_id` detection on top of [`validate_record`].
///
/// The first occurrence of an id is accepted; later ones are flagged.
#[derive(Debug, Default)]
pub struct StreamValidator {
    seen: HashSet<u128>,
}

impl StreamValidator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn validate(&mut self, record: &Record) -> ValidationReport {
        let mut report = validate_record(record);
        if !self.seen.insert(fingerprint128(&record.image_id)) {
            report.violations.push(Violation::DuplicateImageId);
        }
        report
    }
}
