//! Overlap metrics for judging compressed text against its source.
//!
//! The scores here operate on pre-tokenized word sequences; use
//! [`metric_tokens`] to fold case and normalization before comparing.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::segmentation::{nfc, tokenize};

/// Precision, recall, and their harmonic mean for one overlap measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    fn from_counts(overlap: u64, candidate_total: u64, reference_total: u64) -> RougeScore {
        let precision = if candidate_total == 0 {
            0.0
        } else {
            overlap as f64 / candidate_total as f64
        };
        let recall = if reference_total == 0 {
            0.0
        } else {
            overlap as f64 / reference_total as f64
        };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        RougeScore { precision, recall, f1 }
    }
}

/// Token counts before and after compression, with the saved fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SavingsReport {
    pub original_tokens: usize,
    pub retained_tokens: usize,
    /// Fraction of tokens removed: `1 - retained / original`.
    pub savings: f64,
}

/// Lowercases, normalizes, and tokenizes text for metric comparison, so that
/// case and composition differences do not count as mismatches.
pub fn metric_tokens(text: &str) -> Vec<String> {
    let normalized = nfc(&text.to_lowercase());
    tokenize(&normalized)
        .iter()
        .map(|span| span.slice(&normalized).to_string())
        .collect()
}

/// Modified n-gram precision score of `candidate` against one or more
/// references, with brevity penalty.
///
/// Candidate n-gram counts are clipped to the largest count any single
/// reference offers, so repeating a reference word does not inflate the
/// score. Precisions for orders `1..=max_n` (capped at the candidate length)
/// are combined by geometric mean and multiplied by `exp(1 - r/c)` whenever
/// the candidate is shorter than the closest reference; length ties resolve
/// to the shorter reference.
///
/// Without smoothing, any order with zero matches zeroes the whole score.
/// With `smoothing`, orders above 1 score `(matches + 1) / (total + 1)`
/// instead, keeping short near-miss candidates comparable.
pub fn bleu(
    candidate: &[&str],
    references: &[&[&str]],
    max_n: usize,
    smoothing: bool,
) -> Result<f64> {
    if max_n == 0 {
        return Err(Error::InvalidArgument(
            "n-gram order must be at least 1".into(),
        ));
    }
    if references.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one reference is required".into(),
        ));
    }
    if candidate.is_empty() {
        return Ok(0.0);
    }

    let effective_max = max_n.min(candidate.len());
    let mut precisions = Vec::with_capacity(effective_max);
    for n in 1..=effective_max {
        let cand_counts = ngram_counts(candidate, n);
        let ref_counts: Vec<_> = references.iter().map(|r| ngram_counts(r, n)).collect();
        let total = (candidate.len() + 1 - n) as u64;
        let mut clipped = 0u64;
        for (gram, &count) in &cand_counts {
            let allowed = ref_counts
                .iter()
                .map(|counts| counts.get(gram).copied().unwrap_or(0))
                .max()
                .unwrap_or(0);
            clipped += count.min(allowed);
        }
        if smoothing && n >= 2 {
            precisions.push((clipped + 1) as f64 / (total + 1) as f64);
        } else if clipped == 0 {
            return Ok(0.0);
        } else {
            precisions.push(clipped as f64 / total as f64);
        }
    }

    let c = candidate.len();
    let r = references
        .iter()
        .map(|r| r.len())
        .min_by_key(|&len| (len.abs_diff(c), len))
        .expect("references checked non-empty");
    let brevity = if c >= r {
        1.0
    } else {
        (1.0 - r as f64 / c as f64).exp()
    };

    let mean = if precisions.len() == 1 {
        precisions[0]
    } else {
        let log_sum: f64 = precisions.iter().map(|p| p.ln()).sum();
        (log_sum / precisions.len() as f64).exp()
    };
    Ok(brevity * mean)
}

/// N-gram overlap between candidate and reference, counting each repeated
/// n-gram only as far as both sides contain it.
pub fn rouge_n(candidate: &[&str], reference: &[&str], n: usize) -> Result<RougeScore> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "n-gram order must be at least 1".into(),
        ));
    }
    let cand_counts = ngram_counts(candidate, n);
    let ref_counts = ngram_counts(reference, n);
    let overlap: u64 = cand_counts
        .iter()
        .map(|(gram, &count)| count.min(ref_counts.get(gram).copied().unwrap_or(0)))
        .sum();
    let cand_total = (candidate.len() + 1).saturating_sub(n) as u64;
    let ref_total = (reference.len() + 1).saturating_sub(n) as u64;
    Ok(RougeScore::from_counts(overlap, cand_total, ref_total))
}

/// Longest-common-subsequence overlap between candidate and reference.
pub fn rouge_l(candidate: &[&str], reference: &[&str]) -> RougeScore {
    let lcs = lcs_length(candidate, reference) as u64;
    RougeScore::from_counts(lcs, candidate.len() as u64, reference.len() as u64)
}

/// Fraction of tokens removed by compression.
pub fn savings(original_tokens: usize, retained_tokens: usize) -> Result<SavingsReport> {
    if original_tokens == 0 {
        return Err(Error::InvalidArgument(
            "savings over zero original tokens is undefined".into(),
        ));
    }
    if retained_tokens > original_tokens {
        return Err(Error::InvalidArgument(format!(
            "retained {retained_tokens} tokens exceeds original {original_tokens}"
        )));
    }
    Ok(SavingsReport {
        original_tokens,
        retained_tokens,
        savings: 1.0 - retained_tokens as f64 / original_tokens as f64,
    })
}

fn ngram_counts<'a>(tokens: &'a [&'a str], n: usize) -> HashMap<&'a [&'a str], u64> {
    let mut counts = HashMap::new();
    if n > 0 && tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

fn lcs_length(a: &[&str], b: &[&str]) -> usize {
    let mut previous = vec![0usize; b.len() + 1];
    let mut current = vec![0usize; b.len() + 1];
    for &x in a {
        for (j, &y) in b.iter().enumerate() {
            current[j + 1] = if x == y {
                previous[j] + 1
            } else {
                current[j].max(previous[j + 1])
            };
        }
        std::mem::swap(&mut previous, &mut current);
    }
    previous[b.len()]
}
