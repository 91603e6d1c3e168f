//! The per-document JSON report, schema version 1.
//!
//! Field order is fixed by the struct, and every float is rounded to six
//! significant digits before it is stored, so parsing an emitted report and
//! re-emitting it reproduces the bytes exactly.

use std::collections::HashSet;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use selective_context::{CompressionResult, UnitKind};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitReport {
    pub text: String,
    pub self_info: f64,
    pub retained: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub id: String,
    pub requested_ratio: f64,
    pub achieved_token_ratio: f64,
    pub achieved_unit_ratio: f64,
    /// Self-information cutoff in bits; null when no threshold applies
    /// (random baseline, or nothing to compress).
    pub threshold_bits: Option<f64>,
    pub level: String,
    pub units: Vec<UnitReport>,
    pub retained_text: String,
}

impl Report {
    /// Builds the report for one document. `retained_text` is the rendered
    /// retention, with `appended` (a conversation's final turn) following on
    /// its own line.
    pub fn new(
        id: &str,
        result: &CompressionResult,
        level: UnitKind,
        appended: Option<&str>,
    ) -> Report {
        let retained_starts: HashSet<usize> = result
            .retained
            .iter()
            .map(|u| u.token_range.start)
            .collect();
        let units = result
            .all_units()
            .into_iter()
            .map(|unit| UnitReport {
                text: unit.text.clone(),
                self_info: round_sig(unit.self_info, 6),
                retained: retained_starts.contains(&unit.token_range.start),
            })
            .collect();

        let mut retained_text = selective_context::render_retained(result);
        if let Some(turn) = appended {
            if !retained_text.is_empty() {
                retained_text.push('\n');
            }
            retained_text.push_str(turn);
        }

        Report {
            schema: SCHEMA_VERSION,
            id: id.to_string(),
            requested_ratio: round_sig(result.requested_ratio, 6),
            achieved_token_ratio: round_sig(result.achieved_token_ratio, 6),
            achieved_unit_ratio: round_sig(result.achieved_unit_ratio, 6),
            threshold_bits: result.threshold.map(|t| round_sig(t, 6)),
            level: level.as_str().to_string(),
            units,
            retained_text,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn from_json(json: &str) -> Result<Report> {
        serde_json::from_str(json).context("parsing compression report")
    }
}

/// Rounds to the given number of significant decimal digits. Zero and
/// non-finite values pass through unchanged.
pub fn round_sig(value: f64, digits: u32) -> f64 {
    if value == 0.0 || !value.is_finite() {
        return value;
    }
    let magnitude = value.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits as i32 - 1 - magnitude);
    (value * scale).round() / scale
}
