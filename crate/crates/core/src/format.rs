//! Rendering of model-facing input text.
//!
//! Pre-training and fine-tuning share this one renderer so that a CAP
//! pre-training example and a captioning fine-tune example built from the same
//! record have byte-identical inputs.

use serde::{Deserialize, Serialize};

use crate::order::join_texts;

/// Delimiters used to assemble `prompt [question] <delim> OCR: tok tok ...`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextFormat {
    /// Between OCR tokens, and between prompt and the following words.
    pub separator: String,
    /// Between the prompt/question head and the OCR segment.
    pub segment_delimiter: String,
    /// Prefix of the OCR segment.
    pub ocr_label: String,
}

impl Default for TextFormat {
    fn default() -> Self {
        TextFormat {
            separator: " ".into(),
            segment_delimiter: " \n ".into(),
            ocr_label: "OCR: ".into(),
        }
    }
}

impl TextFormat {
    /// `prompt`, then each non-empty `extra`, then the OCR segment when `ocr` is given.
    ///
    /// An empty OCR slice still renders the (empty) segment; `None` omits it.
    pub fn render(&self, prompt: &str, extras: &[&str], ocr: Option<&[String]>) -> String {
        let head = std::iter::once(prompt).chain(extras.iter().copied().filter(|e| !e.is_empty()));
        let mut out = join_texts(head, &self.separator);
        if let Some(tokens) = ocr {
            out.push_str(&self.segment_delimiter);
            out.push_str(&self.ocr_label);
            out.push_str(&join_texts(tokens.iter().map(String::as_str), &self.separator));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_layout() {
        let f = TextFormat::default();
        let ocr = vec!["STOP".to_string()];
        assert_eq!(
            f.render("answer:", &["what does the sign say"], Some(&ocr)),
            "answer: what does the sign say \n OCR: STOP"
        );
        assert_eq!(f.render("caption:", &[], Some(&ocr)), "caption: \n OCR: STOP");
        assert_eq!(f.render("caption:", &[], None), "caption:");
        assert_eq!(f.render("caption:", &[""], Some(&[])), "caption: \n OCR: ");
    }
}
