//! Noun-phrase chunking over part-of-speech tags.

use std::ops::Range;

use super::PosTag;

/// Groups one sentence's tokens into phrase ranges.
///
/// Matches `DET? ADJ* NOUN+` and `PROPN+` greedily left to right; every token
/// outside a match forms its own range, so verbs in particular are never
/// merged. Punctuation is then folded into the range before it (sentence-
/// leading punctuation has no predecessor and stays alone). The returned
/// ranges are contiguous and cover `0..tags.len()` exactly.
pub fn chunk_noun_phrases(tags: &[PosTag]) -> Vec<Range<usize>> {
    let mut ranges: Vec<Range<usize>> = Vec::new();
    let mut i = 0;
    while i < tags.len() {
        let end = match tags[i] {
            PosTag::Propn => {
                let mut j = i + 1;
                while j < tags.len() && tags[j] == PosTag::Propn {
                    j += 1;
                }
                j
            }
            PosTag::Det | PosTag::Adj | PosTag::Noun => {
                let mut j = i;
                if tags[j] == PosTag::Det {
                    j += 1;
                }
                while j < tags.len() && tags[j] == PosTag::Adj {
                    j += 1;
                }
                let noun_start = j;
                while j < tags.len() && tags[j] == PosTag::Noun {
                    j += 1;
                }
                if j > noun_start {
                    j
                } else {
                    i + 1
                }
            }
            _ => i + 1,
        };

        if tags[i] == PosTag::Punct && !ranges.is_empty() {
            ranges.last_mut().expect("checked non-empty").end = end;
        } else {
            ranges.push(i..end);
        }
        i = end;
    }
    ranges
}

#[cfg(test)]
mod tests {
    use super::*;
    use PosTag::*;

    #[test]
    fn det_adj_noun_merges() {
        assert_eq!(chunk_noun_phrases(&[Det, Adj, Noun, Verb]), [0..3, 3..4]);
    }

    #[test]
    fn proper_noun_run_merges() {
        assert_eq!(chunk_noun_phrases(&[Propn, Propn]), [0..2]);
        assert_eq!(chunk_noun_phrases(&[Noun, Propn, Propn]), [0..1, 1..3]);
    }

    #[test]
    fn determiner_without_noun_stays_alone() {
        assert_eq!(chunk_noun_phrases(&[Det, Verb, Noun]), [0..1, 1..2, 2..3]);
        assert_eq!(chunk_noun_phrases(&[Det, Adj, Verb]), [0..1, 1..2, 2..3]);
    }

    #[test]
    fn verbs_never_merge() {
        assert_eq!(chunk_noun_phrases(&[Verb, Verb, Verb]), [0..1, 1..2, 2..3]);
    }

    #[test]
    fn noun_run_merges_without_determiner() {
        assert_eq!(chunk_noun_phrases(&[Noun, Noun, Noun]), [0..3]);
        assert_eq!(chunk_noun_phrases(&[Adj, Noun]), [0..2]);
    }

    #[test]
    fn punctuation_attaches_to_previous_unit() {
        assert_eq!(chunk_noun_phrases(&[Noun, Punct, Noun]), [0..2, 2..3]);
        assert_eq!(chunk_noun_phrases(&[Propn, Propn, Punct, Punct]), [0..4]);
    }

    #[test]
    fn leading_punctuation_stays_alone() {
        assert_eq!(chunk_noun_phrases(&[Punct, Noun]), [0..1, 1..2]);
    }

    #[test]
    fn empty_input() {
        assert!(chunk_noun_phrases(&[]).is_empty());
    }

    #[test]
    fn ranges_cover_input_exactly() {
        let tags = [Det, Adj, Adj, Noun, Verb, Adp, Det, Noun, Punct, Propn, Punct];
        let ranges = chunk_noun_phrases(&tags);
        let mut next = 0;
        for r in &ranges {
            assert_eq!(r.start, next);
            assert!(r.end > r.start);
            next = r.end;
        }
        assert_eq!(next, tags.len());
    }
}
