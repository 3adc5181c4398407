//! Deterministic scene-text corpus construction and evaluation.
//!
//! Converts image–caption–OCR records into sequence-to-sequence pre-training
//! examples (OCR, SPLITOCR, CAP, SPLITCAP) and downstream fine-tuning examples
//! (scene-text VQA and captioning), and scores predictions with VQA accuracy,
//! ANLS, CIDEr-D, BLEU@4 and ROUGE-L.
//!
//! ```
//! use scenetext::corpus::parse_record;
//! use scenetext::objective::{build_splitocr_at, ObjectiveConfig};
//!
//! let record = parse_record(
//!     r#"{"image_id":"a","ocr":[{"text":"OPEN","bbox":[60,5,30,10]},{"text":"NOW","bbox":[5,6,30,10]}]}"#,
//! ).unwrap();
//! let ex = build_splitocr_at(&record, 1, &ObjectiveConfig::default()).unwrap();
//! assert_eq!(ex.input_ocr, ["NOW"]);
//! assert_eq!(ex.target, "OPEN");
//! ```
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod finetune;
pub mod format;
pub mod hash;
pub mod io;
pub mod metrics;
pub mod objective;
pub mod order;
pub mod pipeline;
pub mod shuffle;

pub use error::{Error, Ineligible, Result};
