//! Prompt compression by informativeness filtering.
//!
//! The pipeline measures how surprising each token is under a language
//! model, merges tokens into lexical units (tokens, noun phrases, or
//! sentences), and drops the units a model could most easily reconstruct.
//! What remains is a shorter text that preserves the content the model
//! would otherwise have had to be told.
//!
//! A typical run:
//!
//! ```
//! use selective_context::{compress, render_retained, CompressionConfig, NgramModel};
//!
//! let corpus: Vec<&str> = "the quick brown fox jumps over the lazy dog the fox sleeps"
//!     .split(' ')
//!     .collect();
//! let model = NgramModel::train(&corpus, 2, 0.1).unwrap();
//! let config = CompressionConfig { ratio: 0.4, ..CompressionConfig::default() };
//! let result = compress("The quick brown fox jumps over the lazy dog.", &model, &config).unwrap();
//! let shorter = render_retained(&result);
//! assert!(!shorter.is_empty());
//! ```
//!
//! Scoring backends are pluggable through [`ScorerBackend`]: the built-in
//! options are a hand-rolled n-gram model ([`NgramModel`]), an HTTP client
//! for echo-capable model servers ([`RemoteScorer`]), and a fixed-vocabulary
//! uniform scorer ([`UniformScorer`]) for tests and baselines.

pub mod error;
pub mod metrics;
pub mod rng;
pub mod scoring;
pub mod segmentation;
pub mod selection;

pub use error::{Error, Result};
pub use metrics::{bleu, metric_tokens, rouge_l, rouge_n, savings, RougeScore, SavingsReport};
pub use scoring::{
    score_tokens, sentence_entropy, sentence_perplexity, NgramModel, RemoteConfig, RemoteProfile,
    RemoteScorer, ScoredToken, ScorerBackend, ScoringMode, Segment, UniformScorer,
};
pub use segmentation::{
    AbbreviationList, LexicalUnit, SegmentedDocument, Span, UnitKind,
};
pub use selection::{
    compress, filter_units, percentile_threshold, random_compress, render_retained,
    score_and_merge, CompressionConfig, CompressionResult,
};
