//! Choosing which lexical units to keep.
//!
//! Units whose self-information reaches the percentile threshold survive;
//! everything below it is dropped. A seeded random baseline removes the same
//! fraction of units blindly, for comparison runs.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::scoring::{score_tokens, ScorerBackend, ScoringMode};
use crate::segmentation::{merge_units, AbbreviationList, LexicalUnit, SegmentedDocument, UnitKind};

/// Settings for one compression run.
#[derive(Debug, Clone)]
pub struct CompressionConfig {
    /// Fraction of units targeted for removal, in `[0, 1]`.
    pub ratio: f64,
    pub level: UnitKind,
    pub mode: ScoringMode,
    /// Seed for the random baseline; ignored by informativeness filtering.
    pub seed: u64,
    pub abbreviations: AbbreviationList,
}

impl Default for CompressionConfig {
    fn default() -> Self {
        CompressionConfig {
            ratio: 0.5,
            level: UnitKind::Phrase,
            mode: ScoringMode::PerSentence,
            seed: 0,
            abbreviations: AbbreviationList::default(),
        }
    }
}

/// Outcome of filtering: the kept and dropped units, both in reading order,
/// plus the bookkeeping needed for reports and rendering.
#[derive(Debug, Clone)]
pub struct CompressionResult {
    pub retained: Vec<LexicalUnit>,
    pub removed: Vec<LexicalUnit>,
    /// Self-information cutoff in bits; `None` for the random baseline,
    /// where no threshold applies.
    pub threshold: Option<f64>,
    pub requested_ratio: f64,
    /// Fraction of units actually removed.
    pub achieved_unit_ratio: f64,
    /// Fraction of tokens actually removed.
    pub achieved_token_ratio: f64,
}

impl CompressionResult {
    /// All units interleaved back into reading order.
    pub fn all_units(&self) -> Vec<&LexicalUnit> {
        let mut units: Vec<&LexicalUnit> = self.retained.iter().chain(&self.removed).collect();
        units.sort_by_key(|u| u.token_range.start);
        units
    }

    pub fn total_tokens(&self) -> usize {
        self.retained
            .iter()
            .chain(&self.removed)
            .map(LexicalUnit::token_count)
            .sum()
    }

    pub fn retained_tokens(&self) -> usize {
        self.retained.iter().map(LexicalUnit::token_count).sum()
    }

    pub fn total_units(&self) -> usize {
        self.retained.len() + self.removed.len()
    }
}

/// Threshold below which the given percentile of the values falls, using
/// linear interpolation between order statistics.
///
/// With `n` sorted values the percentile `p` sits at rank `p / 100 * (n - 1)`;
/// a fractional rank interpolates between its two neighbours. `p` must be in
/// `[0, 100]` and the values finite and non-empty.
pub fn percentile_threshold(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidArgument(
            "percentile of an empty list is undefined".into(),
        ));
    }
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "percentile must be within [0, 100], got {p}"
        )));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "percentile requires finite values, got {bad}"
        )));
    }

    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values compare"));
    let rank = p / 100.0 * (sorted.len() - 1) as f64;
    let low = rank.floor() as usize;
    let high = rank.ceil() as usize;
    let fraction = rank - low as f64;
    Ok(sorted[low] + (sorted[high] - sorted[low]) * fraction)
}

/// Splits units at the given self-information percentile: units scoring at
/// or above the threshold are retained, the rest removed, both sides keeping
/// their original order. Ties sit on the threshold itself and are retained.
pub fn filter_units(units: Vec<LexicalUnit>, percentile: f64) -> Result<CompressionResult> {
    let infos: Vec<f64> = units.iter().map(|u| u.self_info).collect();
    let threshold = percentile_threshold(&infos, percentile)?;

    let total_tokens: usize = units.iter().map(LexicalUnit::token_count).sum();
    let total_units = units.len();
    let (retained, removed): (Vec<_>, Vec<_>) =
        units.into_iter().partition(|u| u.self_info >= threshold);

    let removed_tokens: usize = removed.iter().map(LexicalUnit::token_count).sum();
    Ok(CompressionResult {
        requested_ratio: percentile / 100.0,
        achieved_unit_ratio: removed.len() as f64 / total_units as f64,
        achieved_token_ratio: removed_tokens as f64 / total_tokens as f64,
        threshold: Some(threshold),
        retained,
        removed,
    })
}

/// Runs the full pipeline up to unit merging: segment, score, merge.
pub fn score_and_merge(
    text: &str,
    backend: &dyn ScorerBackend,
    config: &CompressionConfig,
) -> Result<Vec<LexicalUnit>> {
    let doc = SegmentedDocument::with_abbreviations(text, &config.abbreviations);
    if doc.is_empty() {
        return Err(Error::InvalidArgument(
            "text contains no tokens after normalization".into(),
        ));
    }
    let scored = score_tokens(&doc, backend, config.mode)?;
    merge_units(&scored, config.level, &doc)
}

/// Compresses `text` by dropping its least informative units.
pub fn compress(
    text: &str,
    backend: &dyn ScorerBackend,
    config: &CompressionConfig,
) -> Result<CompressionResult> {
    validate_ratio(config.ratio)?;
    let units = score_and_merge(text, backend, config)?;
    filter_units(units, config.ratio * 100.0)
}

/// Baseline that removes `round(ratio * n)` units chosen uniformly at random
/// with the crate's fixed portable generator, so a seed reproduces the same
/// deletion set everywhere. Halves round away from zero.
pub fn random_compress(
    units: Vec<LexicalUnit>,
    ratio: f64,
    seed: u64,
) -> Result<CompressionResult> {
    validate_ratio(ratio)?;
    if units.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot compress an empty unit list".into(),
        ));
    }

    let total_units = units.len();
    let total_tokens: usize = units.iter().map(LexicalUnit::token_count).sum();
    let remove = (ratio * total_units as f64).round() as usize;
    let picked = SplitMix64::new(seed).sample_indices(total_units, remove);

    let mut retained = Vec::with_capacity(total_units - remove);
    let mut removed = Vec::with_capacity(remove);
    let mut next_pick = picked.iter().peekable();
    for (i, unit) in units.into_iter().enumerate() {
        if next_pick.peek() == Some(&&i) {
            next_pick.next();
            removed.push(unit);
        } else {
            retained.push(unit);
        }
    }

    let removed_tokens: usize = removed.iter().map(LexicalUnit::token_count).sum();
    Ok(CompressionResult {
        requested_ratio: ratio,
        achieved_unit_ratio: removed.len() as f64 / total_units as f64,
        achieved_token_ratio: removed_tokens as f64 / total_tokens as f64,
        threshold: None,
        retained,
        removed,
    })
}

fn validate_ratio(ratio: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::InvalidArgument(format!(
            "ratio must be within [0, 1], got {ratio}"
        )));
    }
    Ok(())
}

/// Joins the retained units back into text.
///
/// Units are separated by single spaces, except that no space is placed
/// before a unit that starts with closing punctuation (commas, periods,
/// closing brackets and quotes), mirroring ordinary typography. Opening
/// brackets keep their leading space.
pub fn render_retained(result: &CompressionResult) -> String {
    let mut out = String::new();
    for unit in &result.retained {
        if !out.is_empty() && !glues_left(&unit.text) {
            out.push(' ');
        }
        out.push_str(&unit.text);
    }
    out
}

/// True if the unit text starts with punctuation that conventionally attaches
/// to the preceding word.
fn glues_left(text: &str) -> bool {
    matches!(
        text.chars().next(),
        Some(
            ',' | '.' | ';' | ':' | '!' | '?' | ')' | ']' | '}' | '%' | '\u{2026}' | '\u{2019}'
                | '\u{201d}' | '\u{bb}'
        )
    )
}
