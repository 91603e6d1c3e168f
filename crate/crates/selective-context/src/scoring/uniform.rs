//! Flat-probability backend, mostly useful as a baseline and in tests.

use crate::error::{Error, Result};
use crate::segmentation::Span;

use super::ScorerBackend;

/// Assigns every token the same probability `1 / vocab_size`, so every token
/// carries `log2(vocab_size)` bits regardless of context.
#[derive(Debug, Clone)]
pub struct UniformScorer {
    vocab_size: u64,
    logprob: f64,
}

impl UniformScorer {
    pub fn new(vocab_size: u64) -> Result<Self> {
        if vocab_size == 0 {
            return Err(Error::InvalidArgument(
                "uniform scorer needs a vocabulary of at least 1".into(),
            ));
        }
        Ok(UniformScorer {
            vocab_size,
            logprob: -(vocab_size as f64).ln(),
        })
    }

    pub fn vocab_size(&self) -> u64 {
        self.vocab_size
    }
}

impl ScorerBackend for UniformScorer {
    fn name(&self) -> &str {
        "uniform"
    }

    fn score_segment(&self, _text: &str, token_spans: &[Span]) -> Result<Vec<f64>> {
        Ok(vec![self.logprob; token_spans.len()])
    }
}
