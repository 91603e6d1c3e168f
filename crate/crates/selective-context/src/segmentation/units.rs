//! Lexical units: the rows that filtering operates on.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::scoring::ScoredToken;
use crate::segmentation::{chunk_noun_phrases, tag_tokens, SegmentedDocument, Span};

/// Granularity of a lexical unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitKind {
    Token,
    Phrase,
    Sentence,
}

impl UnitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            UnitKind::Token => "token",
            UnitKind::Phrase => "phrase",
            UnitKind::Sentence => "sentence",
        }
    }
}

impl std::str::FromStr for UnitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "token" => Ok(UnitKind::Token),
            "phrase" => Ok(UnitKind::Phrase),
            "sentence" => Ok(UnitKind::Sentence),
            other => Err(Error::InvalidArgument(format!(
                "unknown unit level {other:?}; expected token, phrase, or sentence"
            ))),
        }
    }
}

/// A contiguous run of tokens scored and kept or dropped as one piece.
#[derive(Debug, Clone, PartialEq)]
pub struct LexicalUnit {
    pub kind: UnitKind,
    /// Indices into the document's token list.
    pub token_range: Range<usize>,
    /// Byte extent in the normalized text, from the first token's start to
    /// the last token's end.
    pub span: Span,
    /// The covered text, interior whitespace included.
    pub text: String,
    /// Sum of the member tokens' self-information, in bits.
    pub self_info: f64,
}

impl LexicalUnit {
    pub fn token_count(&self) -> usize {
        self.token_range.len()
    }
}

/// Groups scored tokens into units of the requested granularity.
///
/// `scored` must line up one-to-one with the document's tokens; a length or
/// span mismatch reports the first diverging index. A unit's self-information
/// is the plain left-to-right sum over its member tokens, so a unit of one
/// token carries exactly that token's value.
pub fn merge_units(
    scored: &[ScoredToken],
    level: UnitKind,
    doc: &SegmentedDocument,
) -> Result<Vec<LexicalUnit>> {
    if scored.len() != doc.tokens().len() {
        return Err(Error::MisalignedInput {
            index: scored.len().min(doc.tokens().len()),
            message: format!(
                "{} scored tokens for a document with {} tokens",
                scored.len(),
                doc.tokens().len()
            ),
        });
    }
    for (i, (s, t)) in scored.iter().zip(doc.tokens()).enumerate() {
        if s.span != *t {
            return Err(Error::MisalignedInput {
                index: i,
                message: format!(
                    "scored token at bytes {}..{} but document token at {}..{}",
                    s.span.start, s.span.end, t.start, t.end
                ),
            });
        }
    }

    let ranges: Vec<Range<usize>> = match level {
        UnitKind::Token => (0..doc.tokens().len()).map(|i| i..i + 1).collect(),
        UnitKind::Sentence => doc.sentence_token_ranges(),
        UnitKind::Phrase => {
            let tags = tag_tokens(doc);
            doc.sentence_token_ranges()
                .into_iter()
                .flat_map(|sentence| {
                    chunk_noun_phrases(&tags[sentence.clone()])
                        .into_iter()
                        .map(move |r| sentence.start + r.start..sentence.start + r.end)
                })
                .collect()
        }
    };

    Ok(ranges
        .into_iter()
        .map(|r| {
            let span = Span::new(doc.tokens()[r.start].start, doc.tokens()[r.end - 1].end);
            LexicalUnit {
                kind: level,
                text: span.slice(doc.text()).to_string(),
                self_info: scored[r.clone()].iter().map(|t| t.self_info).sum(),
                token_range: r,
                span,
            }
        })
        .collect())
}
