//! Self-contained HTML rendering of a compression result.
//!
//! Two panels: the original text with every unit shaded by self-information
//! and removed units struck through, and the filtered text with only the
//! retained units. Shade intensity is the unit's self-information mapped
//! affinely onto [0, 1] by min-max normalization over the document; when all
//! units score the same, every intensity is 0. Each span carries its
//! intensity in a `data-i` attribute. No external assets are referenced.

use std::collections::HashSet;
use std::fmt::Write;

use selective_context::{CompressionResult, LexicalUnit};

use crate::report::round_sig;

/// Renders both panels for one document. `appended` (a conversation's final
/// turn) is shown verbatim after the filtered panel.
pub fn render_html(id: &str, result: &CompressionResult, appended: Option<&str>) -> String {
    let units = result.all_units();
    let intensities = intensities(&units);
    let retained_starts: HashSet<usize> = result
        .retained
        .iter()
        .map(|u| u.token_range.start)
        .collect();

    let mut original = String::new();
    let mut filtered = String::new();
    for (unit, &intensity) in units.iter().zip(&intensities) {
        let retained = retained_starts.contains(&unit.token_range.start);
        let span = unit_span(unit, intensity, !retained);
        if !original.is_empty() {
            original.push(' ');
        }
        original.push_str(&span);
        if retained {
            if !filtered.is_empty() {
                filtered.push(' ');
            }
            filtered.push_str(&unit_span(unit, intensity, false));
        }
    }

    let mut page = String::new();
    page.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(page, "<title>{}</title>", escape(id));
    page.push_str(
        "<style>\n\
         body { font-family: Georgia, 'Times New Roman', serif; max-width: 46rem;\n\
                margin: 2rem auto; padding: 0 1rem; line-height: 1.8; color: #222; }\n\
         h1 { font-size: 1.3rem; } h2 { font-size: 1.05rem; margin-top: 2rem; }\n\
         .unit { padding: 0.05rem 0.15rem; border-radius: 0.2rem; }\n\
         .removed { text-decoration: line-through; opacity: 0.75; }\n\
         .appended { border-left: 3px solid #888; padding-left: 0.8rem; }\n\
         </style>\n</head>\n<body>\n",
    );
    let _ = writeln!(page, "<h1>{}</h1>", escape(id));
    let _ = writeln!(
        page,
        "<section id=\"original\">\n<h2>Original</h2>\n<p>{original}</p>\n</section>"
    );
    let _ = writeln!(
        page,
        "<section id=\"filtered\">\n<h2>Filtered</h2>\n<p>{filtered}</p>\n</section>"
    );
    if let Some(turn) = appended {
        let _ = writeln!(
            page,
            "<section id=\"appended\">\n<h2>Appended</h2>\n<p class=\"appended\">{}</p>\n</section>",
            escape(turn)
        );
    }
    page.push_str("</body>\n</html>\n");
    page
}

fn unit_span(unit: &LexicalUnit, intensity: f64, struck: bool) -> String {
    let class = if struck { "unit removed" } else { "unit" };
    format!(
        "<span class=\"{class}\" data-i=\"{intensity}\" \
         style=\"background: rgba(214, 81, 8, {intensity})\">{}</span>",
        escape(&unit.text)
    )
}

/// Min-max normalized self-information per unit. A document whose units all
/// score the same has no spread to map, so every intensity is 0.
fn intensities(units: &[&LexicalUnit]) -> Vec<f64> {
    let lowest = units.iter().map(|u| u.self_info).fold(f64::INFINITY, f64::min);
    let highest = units
        .iter()
        .map(|u| u.self_info)
        .fold(f64::NEG_INFINITY, f64::max);
    let spread = highest - lowest;
    units
        .iter()
        .map(|u| {
            if spread > 0.0 {
                round_sig((u.self_info - lowest) / spread, 6)
            } else {
                0.0
            }
        })
        .collect()
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(ch),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use selective_context::{CompressionResult, Span, UnitKind};

    fn unit(text: &str, index: usize, self_info: f64) -> LexicalUnit {
        LexicalUnit {
            kind: UnitKind::Phrase,
            token_range: index..index + 1,
            span: Span::new(index * 4, index * 4 + 3),
            text: text.to_string(),
            self_info,
        }
    }

    fn result(retained: Vec<LexicalUnit>, removed: Vec<LexicalUnit>) -> CompressionResult {
        CompressionResult {
            retained,
            removed,
            threshold: Some(1.0),
            requested_ratio: 0.5,
            achieved_unit_ratio: 0.5,
            achieved_token_ratio: 0.5,
        }
    }

    fn count(haystack: &str, needle: &str) -> usize {
        haystack.matches(needle).count()
    }

    #[test]
    fn both_panels_have_one_span_per_unit() {
        let html = render_html(
            "doc",
            &result(
                vec![unit("alpha", 0, 3.0), unit("gamma", 2, 2.0)],
                vec![unit("beta", 1, 1.0)],
            ),
            None,
        );
        let (original, filtered) = html.split_once("id=\"filtered\"").unwrap();
        assert_eq!(count(original, "<span"), 3);
        assert_eq!(count(filtered, "<span"), 2);
        assert_eq!(count(&html, "</span>"), 5);
    }

    #[test]
    fn removed_units_are_struck_only_in_the_original_panel() {
        let html = render_html(
            "doc",
            &result(vec![unit("keep", 0, 2.0)], vec![unit("drop", 1, 1.0)]),
            None,
        );
        let (original, filtered) = html.split_once("id=\"filtered\"").unwrap();
        assert_eq!(count(original, "unit removed"), 1);
        assert_eq!(count(filtered, "unit removed"), 0);
        assert!(!filtered.contains(">drop<"));
        assert!(filtered.contains(">keep<"));
    }

    #[test]
    fn intensity_is_min_max_normalized() {
        let html = render_html(
            "doc",
            &result(
                vec![unit("low", 0, 0.0), unit("high", 2, 100.0)],
                vec![unit("mid", 1, 50.0)],
            ),
            None,
        );
        let (original, _) = html.split_once("id=\"filtered\"").unwrap();
        assert!(original.contains("data-i=\"0\""));
        assert!(original.contains("data-i=\"0.5\""));
        assert!(original.contains("data-i=\"1\""));
    }

    #[test]
    fn equal_scores_map_to_zero_intensity() {
        let html = render_html(
            "doc",
            &result(
                vec![unit("a", 0, 4.0), unit("b", 1, 4.0), unit("c", 2, 4.0)],
                vec![],
            ),
            None,
        );
        assert_eq!(count(&html, "data-i=\"0\""), 6);
    }

    #[test]
    fn text_is_escaped() {
        let html = render_html(
            "<doc> & \"friends\"",
            &result(vec![unit("<script>alert('x')</script>", 0, 1.0)], vec![]),
            None,
        );
        assert!(!html.contains("<script>"));
        assert!(html.contains("&lt;script&gt;"));
        assert!(html.contains("&lt;doc&gt; &amp; &quot;friends&quot;"));
    }

    #[test]
    fn appended_turn_is_rendered_outside_the_panels() {
        let html = render_html(
            "chat",
            &result(vec![unit("history", 0, 1.0)], vec![]),
            Some("user: final <q>"),
        );
        assert!(html.contains("id=\"appended\""));
        assert!(html.contains("user: final &lt;q&gt;"));
        let after_filtered = html.split_once("id=\"appended\"").unwrap().1;
        assert_eq!(count(after_filtered, "<span"), 0);
    }

    #[test]
    fn page_is_self_contained() {
        let html = render_html("doc", &result(vec![unit("a", 0, 1.0)], vec![]), None);
        assert!(html.starts_with("<!DOCTYPE html>"));
        assert!(!html.contains("http://"));
        assert!(!html.contains("https://"));
        assert!(!html.contains("<link"));
        assert_eq!(count(&html, "<section"), count(&html, "</section>"));
        assert_eq!(count(&html, "<p"), count(&html, "</p>"));
    }
}
