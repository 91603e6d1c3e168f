//! Splitting raw text into tokens, sentences, part-of-speech tags, and
//! mergeable lexical units.
//!
//! All byte spans produced here index into the NFC-normalized copy of the
//! input text, which [`SegmentedDocument::new`] builds once; every later
//! stage (scoring, unit merging, rendering) works against that same string.

use std::ops::Range;
use std::path::Path;

use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

mod chunk;
mod pos;
mod units;

pub use chunk::chunk_noun_phrases;
pub use pos::{tag_tokens, tag_word, PosTag};
pub use units::{merge_units, LexicalUnit, UnitKind};

/// Half-open byte range into a document's normalized text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start..self.end]
    }
}

/// NFC-normalizes `text`, allocating only when the input is not already NFC.
pub fn nfc(text: &str) -> String {
    text.nfc().collect()
}

/// Splits normalized text into token spans: whitespace-separated words with
/// leading and trailing punctuation peeled off into their own tokens.
///
/// Interior punctuation stays attached ("don't", "3.14", "state-of-the-art").
/// The spans are ascending, non-overlapping, and cover exactly the
/// non-whitespace bytes of the input, so the text between and around them is
/// all whitespace. Input must already be NFC-normalized; spans index into it.
pub fn tokenize(text: &str) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut word_start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = word_start.take() {
                split_word(text, s, i, &mut spans);
            }
        } else if word_start.is_none() {
            word_start = Some(i);
        }
    }
    if let Some(s) = word_start {
        split_word(text, s, text.len(), &mut spans);
    }
    spans
}

/// Peels punctuation off both ends of the word at `text[start..end]`.
fn split_word(text: &str, start: usize, end: usize, spans: &mut Vec<Span>) {
    let word = &text[start..end];

    let mut core_start = start;
    for c in word.chars() {
        if c.is_alphanumeric() {
            break;
        }
        spans.push(Span::new(core_start, core_start + c.len_utf8()));
        core_start += c.len_utf8();
    }
    if core_start == end {
        return;
    }

    let mut core_end = end;
    let mut tail = Vec::new();
    for c in text[core_start..end].chars().rev() {
        if c.is_alphanumeric() {
            break;
        }
        core_end -= c.len_utf8();
        tail.push(Span::new(core_end, core_end + c.len_utf8()));
    }

    spans.push(Span::new(core_start, core_end));
    spans.extend(tail.into_iter().rev());
}

const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "dr.", "mr.", "mrs.", "ms.", "prof.", "jr.", "sr.", "st.", "mt.", "vs.", "etc.", "e.g.",
    "i.e.", "et al.", "cf.", "ca.", "fig.", "figs.", "tab.", "eq.", "sec.", "ch.", "dept.",
    "inc.", "ltd.", "co.", "approx.",
];

/// Words that end in a period without ending a sentence.
///
/// Matching is ASCII-case-insensitive and requires a non-alphanumeric
/// character (or start of text) before the entry, so "al." will not fire
/// inside "Hal.".
#[derive(Debug, Clone)]
pub struct AbbreviationList {
    entries: Vec<String>,
}

impl Default for AbbreviationList {
    fn default() -> Self {
        AbbreviationList {
            entries: DEFAULT_ABBREVIATIONS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl AbbreviationList {
    /// Loads a replacement list from a UTF-8 file: one entry per line, blank
    /// lines and lines starting with `#` ignored.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let raw = std::fs::read_to_string(path.as_ref()).map_err(Error::Io)?;
        Ok(Self::from_lines(raw.lines()))
    }

    pub fn from_lines<'a>(lines: impl IntoIterator<Item = &'a str>) -> Self {
        let entries = lines
            .into_iter()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_ascii_lowercase())
            .collect();
        AbbreviationList { entries }
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    /// True if the text ending at byte `end` (exclusive, just past a period)
    /// ends with one of the entries on a word boundary.
    fn matches_ending_at(&self, text: &str, end: usize) -> bool {
        self.entries.iter().any(|entry| {
            let len = entry.len();
            if end < len || !text.is_char_boundary(end - len) {
                return false;
            }
            if !text[end - len..end].eq_ignore_ascii_case(entry) {
                return false;
            }
            match text[..end - len].chars().next_back() {
                None => true,
                Some(prev) => !prev.is_alphanumeric(),
            }
        })
    }
}

const SENTENCE_TERMINATORS: &[char] = &['.', '!', '?'];
const CLOSING_TRAIL: &[char] = &['"', '\'', '\u{201d}', '\u{2019}', '\u{bb}', ')', ']', '}'];
const OPENING_QUOTES: &[char] = &['"', '\'', '\u{201c}', '\u{2018}', '\u{ab}', '(', '['];

/// Splits normalized text into sentence spans.
///
/// A boundary is placed after a `.`, `!`, or `?` (plus any trailing closing
/// quotes or brackets) when it is followed by whitespace and then an
/// uppercase letter or an opening quote, unless the period ends a known
/// abbreviation. Spans run from the first to the last non-whitespace byte of
/// each sentence, so together they cover exactly the non-whitespace extent of
/// the text and never cut through a token.
pub fn split_sentences(text: &str, abbreviations: &AbbreviationList) -> Vec<Span> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();

    let mut sentence_start = match chars.iter().find(|(_, c)| !c.is_whitespace()) {
        Some(&(i, _)) => i,
        None => return sentences,
    };
    let last_non_ws_end = chars
        .iter()
        .rev()
        .find(|(_, c)| !c.is_whitespace())
        .map(|&(i, c)| i + c.len_utf8())
        .expect("non-whitespace char exists");

    let mut idx = 0;
    while idx < chars.len() {
        let (byte, c) = chars[idx];
        if byte >= sentence_start && SENTENCE_TERMINATORS.contains(&c) {
            let mut close = idx + 1;
            while close < chars.len() && CLOSING_TRAIL.contains(&chars[close].1) {
                close += 1;
            }
            let sentence_end = chars
                .get(close)
                .map_or(text.len(), |&(b, _)| b)
                .min(last_non_ws_end);

            if close < chars.len() && chars[close].1.is_whitespace() {
                let mut next = close;
                while next < chars.len() && chars[next].1.is_whitespace() {
                    next += 1;
                }
                if let Some(&(next_byte, next_char)) = chars.get(next) {
                    let opens_sentence =
                        next_char.is_uppercase() || OPENING_QUOTES.contains(&next_char);
                    let abbreviation = c == '.'
                        && abbreviations.matches_ending_at(text, byte + c.len_utf8());
                    if opens_sentence && !abbreviation {
                        sentences.push(Span::new(sentence_start, sentence_end));
                        sentence_start = next_byte;
                        idx = next;
                        continue;
                    }
                }
            }
        }
        idx += 1;
    }

    if sentence_start < last_non_ws_end {
        sentences.push(Span::new(sentence_start, last_non_ws_end));
    }
    sentences
}

/// A document's normalized text together with its token and sentence spans.
#[derive(Debug, Clone)]
pub struct SegmentedDocument {
    text: String,
    tokens: Vec<Span>,
    sentences: Vec<Span>,
    token_sentence: Vec<usize>,
}

impl SegmentedDocument {
    pub fn new(text: &str) -> Self {
        Self::with_abbreviations(text, &AbbreviationList::default())
    }

    pub fn with_abbreviations(text: &str, abbreviations: &AbbreviationList) -> Self {
        let text = nfc(text);
        let tokens = tokenize(&text);
        let sentences = split_sentences(&text, abbreviations);

        // Sentences cover the non-whitespace extent and tokens are
        // non-whitespace, so every token falls inside exactly one sentence.
        let mut token_sentence = Vec::with_capacity(tokens.len());
        let mut s = 0;
        for token in &tokens {
            while s + 1 < sentences.len() && token.start >= sentences[s].end {
                s += 1;
            }
            debug_assert!(
                s < sentences.len()
                    && token.start >= sentences[s].start
                    && token.end <= sentences[s].end
            );
            token_sentence.push(s);
        }

        SegmentedDocument {
            text,
            tokens,
            sentences,
            token_sentence,
        }
    }

    /// The NFC-normalized text all spans index into.
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn tokens(&self) -> &[Span] {
        &self.tokens
    }

    pub fn sentences(&self) -> &[Span] {
        &self.sentences
    }

    pub fn token_text(&self, index: usize) -> &str {
        self.tokens[index].slice(&self.text)
    }

    /// Sentence index of each token.
    pub fn token_sentences(&self) -> &[usize] {
        &self.token_sentence
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token index ranges of the sentences, in order; empty sentences cannot
    /// occur because every sentence span contains at least one token.
    pub fn sentence_token_ranges(&self) -> Vec<Range<usize>> {
        let mut ranges: Vec<Range<usize>> = Vec::with_capacity(self.sentences.len());
        for (i, &s) in self.token_sentence.iter().enumerate() {
            if s == ranges.len() {
                ranges.push(i..i + 1);
            } else {
                ranges.last_mut().expect("sentence in order").end = i + 1;
            }
        }
        ranges
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn token_strings(text: &str) -> Vec<String> {
        let normalized = nfc(text);
        tokenize(&normalized)
            .iter()
            .map(|s| s.slice(&normalized).to_string())
            .collect()
    }

    fn sentence_strings(text: &str) -> Vec<String> {
        let normalized = nfc(text);
        split_sentences(&normalized, &AbbreviationList::default())
            .iter()
            .map(|s| s.slice(&normalized).to_string())
            .collect()
    }

    #[test]
    fn tokenize_peels_punctuation() {
        assert_eq!(token_strings("Hello, world"), ["Hello", ",", "world"]);
        assert_eq!(token_strings("(CL),"), ["(", "CL", ")", ","]);
        assert_eq!(token_strings("...fine"), [".", ".", ".", "fine"]);
    }

    #[test]
    fn tokenize_keeps_interior_punctuation() {
        assert_eq!(token_strings("don't stop"), ["don't", "stop"]);
        assert_eq!(token_strings("pi is 3.14"), ["pi", "is", "3.14"]);
        assert_eq!(token_strings("state-of-the-art"), ["state-of-the-art"]);
    }

    #[test]
    fn tokenize_all_punctuation_word() {
        assert_eq!(token_strings("--"), ["-", "-"]);
        assert_eq!(token_strings("?!"), ["?", "!"]);
    }

    #[test]
    fn tokenize_empty_and_whitespace() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  \t\n ").is_empty());
    }

    #[test]
    fn tokenize_spans_cover_non_whitespace_exactly() {
        let text = nfc("  Hello, world!  This (one) has  gaps. ");
        let spans = tokenize(&text);
        let mut covered = vec![false; text.len()];
        let mut prev_end = 0;
        for span in &spans {
            assert!(span.start >= prev_end, "spans must ascend");
            assert!(!span.is_empty());
            prev_end = span.end;
            for b in span.start..span.end {
                covered[b] = true;
            }
        }
        for (i, c) in text.char_indices() {
            assert_eq!(
                covered[i],
                !c.is_whitespace(),
                "byte {i} ({c:?}) coverage is wrong"
            );
        }
    }

    #[test]
    fn tokenize_normalizes_combining_marks() {
        // "e" + combining acute composes to a single char under NFC.
        let decomposed = "cafe\u{301} time";
        let normalized = nfc(decomposed);
        assert_eq!(normalized, "café time");
        let tokens = token_strings(decomposed);
        assert_eq!(tokens, ["café", "time"]);
    }

    #[test]
    fn sentences_split_on_terminator_and_capital() {
        assert_eq!(
            sentence_strings("Hello world. Bye now!"),
            ["Hello world.", "Bye now!"]
        );
        assert_eq!(
            sentence_strings("Really?! Yes. maybe."),
            ["Really?!", "Yes. maybe."]
        );
    }

    #[test]
    fn sentences_need_following_capital_or_quote() {
        assert_eq!(sentence_strings("He slept. then woke."), ["He slept. then woke."]);
        assert_eq!(
            sentence_strings("He said. \"Go home.\""),
            ["He said.", "\"Go home.\""]
        );
    }

    #[test]
    fn sentences_respect_abbreviations() {
        assert_eq!(
            sentence_strings("Dr. Smith arrived. He sat."),
            ["Dr. Smith arrived.", "He sat."]
        );
        assert_eq!(
            sentence_strings("See Smith et al. Then decide."),
            ["See Smith et al. Then decide."]
        );
    }

    #[test]
    fn abbreviation_needs_word_boundary() {
        // "Hal." must not be shielded by the "al." suffix of "et al.".
        let list = AbbreviationList::from_lines(["al."]);
        assert_eq!(
            split_sentences("I met Hal. Great guy.", &list).len(),
            2
        );
        assert_eq!(split_sentences("From fielda al. Great.", &list).len(), 1);
    }

    #[test]
    fn abbreviation_file_format() {
        let list = AbbreviationList::from_lines(["# comment", "", "  Approx.  ", "q.v."]);
        assert_eq!(list.entries(), ["approx.", "q.v."]);
    }

    #[test]
    fn sentences_ignore_decimal_points() {
        assert_eq!(sentence_strings("Pi is 3.14 nearly."), ["Pi is 3.14 nearly."]);
    }

    #[test]
    fn sentences_keep_closing_quote_with_terminator() {
        assert_eq!(
            sentence_strings("He said \"stop.\" Then left."),
            ["He said \"stop.\"", "Then left."]
        );
    }

    #[test]
    fn sentence_without_final_terminator() {
        assert_eq!(
            sentence_strings("First one. Second has no end"),
            ["First one.", "Second has no end"]
        );
    }

    #[test]
    fn document_assigns_tokens_to_sentences() {
        let doc = SegmentedDocument::new("Good day. Nice fox.");
        assert_eq!(doc.sentences().len(), 2);
        assert_eq!(doc.tokens().len(), 6);
        assert_eq!(doc.token_sentences(), &[0, 0, 0, 1, 1, 1]);
        assert_eq!(doc.sentence_token_ranges(), vec![0..3, 3..6]);
        assert_eq!(doc.token_text(2), ".");
        assert_eq!(doc.token_text(3), "Nice");
    }

    #[test]
    fn document_sentences_partition_tokens() {
        let doc = SegmentedDocument::new(" One two. Three? Four five six! ");
        let ranges = doc.sentence_token_ranges();
        assert_eq!(ranges.len(), doc.sentences().len());
        let mut next = 0;
        for range in &ranges {
            assert_eq!(range.start, next);
            assert!(range.end > range.start);
            next = range.end;
        }
        assert_eq!(next, doc.tokens().len());
    }
}
