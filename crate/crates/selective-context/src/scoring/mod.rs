//! Token-level surprisal scoring.
//!
//! A scorer backend assigns each token a natural-log probability conditioned
//! on the tokens before it within one conditioning segment; this module turns
//! those into self-information in bits and handles how a document is cut into
//! segments (per sentence or whole document).

use crate::error::{Error, Result};
use crate::segmentation::{SegmentedDocument, Span};

mod ngram;
mod remote;
mod uniform;

pub use ngram::NgramModel;
pub use remote::{RemoteConfig, RemoteProfile, RemoteScorer};
pub use uniform::UniformScorer;

/// One token with its probability under the scoring backend.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredToken {
    pub text: String,
    /// Byte range in the document's normalized text.
    pub span: Span,
    /// Natural-log probability of the token given its conditioning context;
    /// never positive.
    pub logprob: f64,
    /// Self-information in bits: `-logprob / ln 2`, never negative.
    pub self_info: f64,
}

/// How conditioning context is reset while scoring a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoringMode {
    /// Context restarts at every sentence: each sentence is scored
    /// independently, starting from the begin-of-sequence marker.
    #[default]
    PerSentence,
    /// One context runs through the whole document, which makes sequence
    /// self-information add up exactly across any split point.
    WholeDocument,
}

/// One conditioning segment handed to a backend: a slice of document text
/// plus the token spans within it (relative to `text`).
#[derive(Debug, Clone)]
pub struct Segment {
    pub text: String,
    pub token_spans: Vec<Span>,
}

/// A source of token log probabilities.
///
/// Implementations must be deterministic for a given input and safe to share
/// across threads; scoring never mutates the backend.
pub trait ScorerBackend: Send + Sync {
    /// Short human-readable backend name for reports and diagnostics.
    fn name(&self) -> &str;

    /// Natural-log probability of each token in the segment, conditioned
    /// left to right starting from the begin-of-sequence marker. Returns one
    /// value per entry of `token_spans`.
    fn score_segment(&self, text: &str, token_spans: &[Span]) -> Result<Vec<f64>>;

    /// Upper bound on segment text size in bytes, if the backend has one.
    fn max_segment_bytes(&self) -> Option<usize> {
        None
    }

    /// Scores several segments; the default runs them sequentially.
    /// Implementations may parallelize but must keep output order equal to
    /// input order.
    fn score_segments(&self, segments: &[Segment]) -> Vec<Result<Vec<f64>>> {
        segments
            .iter()
            .map(|s| self.score_segment(&s.text, &s.token_spans))
            .collect()
    }
}

/// Scores every token of `doc`, resetting context according to `mode`.
///
/// In whole-document mode a backend with a byte budget still gets bounded
/// requests: consecutive sentences are batched up to the budget and context
/// restarts at each batch, which is the closest a size-capped backend can get
/// to one unbroken context.
pub fn score_tokens(
    doc: &SegmentedDocument,
    backend: &dyn ScorerBackend,
    mode: ScoringMode,
) -> Result<Vec<ScoredToken>> {
    if doc.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot score a document with no tokens".into(),
        ));
    }

    let ranges = segment_token_ranges(doc, backend.max_segment_bytes(), mode)?;
    let segments: Vec<Segment> = ranges
        .iter()
        .map(|r| {
            let base = doc.tokens()[r.start].start;
            let end = doc.tokens()[r.end - 1].end;
            Segment {
                text: doc.text()[base..end].to_string(),
                token_spans: doc.tokens()[r.clone()]
                    .iter()
                    .map(|s| Span::new(s.start - base, s.end - base))
                    .collect(),
            }
        })
        .collect();

    let results = backend.score_segments(&segments);
    debug_assert_eq!(results.len(), segments.len());

    let mut scored = Vec::with_capacity(doc.tokens().len());
    for (range, outcome) in ranges.iter().zip(results) {
        let base = doc.tokens()[range.start].start;
        let seg_end = doc.tokens()[range.end - 1].end;
        let logprobs = outcome.map_err(|e| relocate_error(e, base))?;
        if logprobs.len() != range.len() {
            return Err(Error::Scoring {
                start: base,
                end: seg_end,
                message: format!(
                    "backend {} returned {} log probabilities for {} tokens",
                    backend.name(),
                    logprobs.len(),
                    range.len()
                ),
            });
        }
        for (i, lp) in range.clone().zip(logprobs) {
            let span = doc.tokens()[i];
            let logprob = validate_logprob(lp, span)?;
            scored.push(ScoredToken {
                text: doc.token_text(i).to_string(),
                span,
                logprob,
                self_info: self_info_bits(logprob),
            });
        }
    }
    Ok(scored)
}

/// Bits of self-information for a natural-log probability.
pub fn self_info_bits(logprob: f64) -> f64 {
    if logprob == 0.0 {
        0.0
    } else {
        -logprob / std::f64::consts::LN_2
    }
}

fn validate_logprob(lp: f64, span: Span) -> Result<f64> {
    if lp.is_nan() || lp > 1e-9 {
        return Err(Error::Scoring {
            start: span.start,
            end: span.end,
            message: format!("backend produced an invalid log probability {lp}"),
        });
    }
    // Forgive float dust barely above zero.
    Ok(lp.min(0.0))
}

/// Shifts segment-relative byte offsets in an error to document offsets.
fn relocate_error(e: Error, base: usize) -> Error {
    match e {
        Error::MisalignedOffsets { start, end } => Error::MisalignedOffsets {
            start: start + base,
            end: end + base,
        },
        Error::Scoring {
            start,
            end,
            message,
        } => Error::Scoring {
            start: start + base,
            end: end + base,
            message,
        },
        other => other,
    }
}

fn segment_token_ranges(
    doc: &SegmentedDocument,
    byte_budget: Option<usize>,
    mode: ScoringMode,
) -> Result<Vec<std::ops::Range<usize>>> {
    let sentence_ranges = doc.sentence_token_ranges();

    let extent = |r: &std::ops::Range<usize>| {
        doc.tokens()[r.end - 1].end - doc.tokens()[r.start].start
    };
    if let Some(budget) = byte_budget {
        if let Some(r) = sentence_ranges.iter().find(|r| extent(r) > budget) {
            return Err(Error::Scoring {
                start: doc.tokens()[r.start].start,
                end: doc.tokens()[r.end - 1].end,
                message: format!(
                    "sentence of {} bytes exceeds the backend's {} byte segment budget",
                    extent(r),
                    budget
                ),
            });
        }
    }

    match mode {
        ScoringMode::PerSentence => Ok(sentence_ranges),
        ScoringMode::WholeDocument => match byte_budget {
            None => Ok(vec![0..doc.tokens().len()]),
            Some(budget) => {
                let mut batches: Vec<std::ops::Range<usize>> = Vec::new();
                for r in sentence_ranges {
                    match batches.last_mut() {
                        Some(last) if extent(&(last.start..r.end)) <= budget => {
                            last.end = r.end;
                        }
                        _ => batches.push(r),
                    }
                }
                Ok(batches)
            }
        },
    }
}

/// Mean self-information in bits per token.
pub fn sentence_entropy(tokens: &[ScoredToken]) -> Result<f64> {
    if tokens.is_empty() {
        return Err(Error::InvalidArgument(
            "entropy of an empty token list is undefined".into(),
        ));
    }
    Ok(tokens.iter().map(|t| t.self_info).sum::<f64>() / tokens.len() as f64)
}

/// Perplexity: two raised to the entropy.
pub fn sentence_perplexity(tokens: &[ScoredToken]) -> Result<f64> {
    Ok(sentence_entropy(tokens)?.exp2())
}
