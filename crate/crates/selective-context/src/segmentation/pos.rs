//! Lexicon-driven part-of-speech tagging.
//!
//! The tagger only needs to be good enough to drive noun-phrase chunking: it
//! combines closed-class word lists with a handful of suffix heuristics and
//! defaults everything else to NOUN, which errs on the side of merging
//! neighbouring words into one unit rather than splitting them.

use super::SegmentedDocument;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosTag {
    Det,
    Adj,
    Noun,
    Propn,
    Verb,
    Adv,
    Pron,
    Adp,
    Conj,
    Punct,
}

// Lists must stay sorted; lookups use binary search.

const DETERMINERS: &[&str] = &[
    "a", "all", "an", "another", "any", "both", "each", "either", "every", "few", "her", "his",
    "its", "many", "more", "most", "much", "my", "neither", "no", "our", "several", "some",
    "such", "that", "the", "their", "these", "this", "those", "what", "which", "whose", "your",
];

const PRONOUNS: &[&str] = &[
    "anyone", "anything", "everyone", "everything", "he", "herself", "him", "himself", "i", "it",
    "itself", "me", "mine", "myself", "nothing", "one", "ours", "she", "someone", "something",
    "theirs", "them", "themselves", "they", "us", "we", "who", "whom", "you", "yours",
];

const ADPOSITIONS: &[&str] = &[
    "about", "above", "across", "after", "against", "along", "among", "around", "as", "at",
    "before", "behind", "below", "beneath", "beside", "between", "beyond", "by", "despite",
    "down", "during", "for", "from", "in", "inside", "into", "like", "near", "of", "off", "on",
    "onto", "out", "outside", "over", "per", "since", "through", "throughout", "to", "toward",
    "towards", "under", "until", "up", "upon", "via", "with", "within", "without",
];

const CONJUNCTIONS: &[&str] = &[
    "although", "and", "because", "but", "if", "nor", "or", "so", "than", "though", "unless",
    "whereas", "whether", "while", "yet",
];

const AUXILIARIES: &[&str] = &[
    "am", "are", "be", "been", "being", "can", "could", "did", "do", "does", "doing", "done",
    "had", "has", "have", "having", "is", "may", "might", "must", "shall", "should", "was",
    "were", "will", "would",
];

const ADVERBS: &[&str] = &[
    "again", "almost", "already", "also", "always", "even", "ever", "finally", "further", "here",
    "how", "however", "indeed", "instead", "just", "later", "moreover", "never", "not", "now",
    "often", "only", "perhaps", "quite", "rather", "really", "respectively", "sometimes", "soon",
    "still", "then", "there", "therefore", "thus", "together", "too", "typically", "usually",
    "very", "well", "when", "where", "why",
];

const ADJECTIVES: &[&str] = &[
    "able", "advanced", "available", "bad", "best", "better", "big", "black", "blue", "brown",
    "certain", "common", "current", "different", "difficult", "early", "easy", "effective",
    "efficient", "empty", "entire", "final", "first", "following", "free", "full", "general",
    "good", "great", "green", "high", "higher", "important", "large", "larger", "last", "late",
    "little", "long", "low", "lower", "main", "major", "new", "next", "old", "original", "other",
    "own", "particular", "poor", "possible", "previous", "promising", "proper", "public",
    "quick", "recent", "red", "related", "relevant", "right", "same", "second", "short",
    "significant", "similar", "simple", "single", "slow", "small", "special", "specific",
    "strong", "third", "true", "unique", "various", "white", "whole", "wide", "young",
];

const NUMBER_WORDS: &[&str] = &[
    "billion", "eight", "five", "four", "hundred", "million", "nine", "one", "seven", "six",
    "ten", "thousand", "three", "two", "zero",
];

/// Base forms recognised directly as verbs and used as stems by the
/// suffix heuristics ("jumps" -> "jump", "trained" -> "train").
const VERB_STEMS: &[&str] = &[
    "achieve", "adapt", "add", "adopt", "allow", "appear", "apply", "ask", "assume", "become",
    "begin", "believe", "bring", "build", "carry", "change", "choose", "come", "compare",
    "compute", "consider", "contain", "continue", "create", "decide", "demonstrate", "denote",
    "depend", "describe", "develop", "differ", "discuss", "employ", "enable", "enhance",
    "evaluate", "exist", "expect", "explain", "explore", "fail", "fall", "feel", "find",
    "follow", "gain", "get", "give", "go", "grow", "happen", "hear", "help", "hold",
    "illustrate", "improve", "include", "increase", "indicate", "introduce", "investigate",
    "involve", "jump", "keep", "know", "lead", "learn", "leave", "let", "lose", "make", "mean",
    "meet", "move", "observe", "obtain", "occur", "offer", "outperform", "pay", "perform",
    "present", "produce", "propose", "prove", "provide", "put", "raise", "reach", "read",
    "receive", "reduce", "remain", "remember", "remove", "report", "represent", "require",
    "retain", "reveal", "run", "say", "see", "seem", "sell", "send", "serve", "show", "sit",
    "speak", "spend", "stand", "start", "stay", "stop", "suggest", "summarize", "take", "talk",
    "tell", "tend", "think", "train", "try", "turn", "understand", "vary", "wait", "walk",
    "want", "watch", "win", "write",
];

fn in_list(list: &[&str], word: &str) -> bool {
    list.binary_search(&word).is_ok()
}

fn is_verb_form(lower: &str) -> bool {
    if in_list(VERB_STEMS, lower) {
        return true;
    }
    for suffix in ["ing", "ed", "es", "s", "d"] {
        if lower.len() > suffix.len() + 1 {
            if let Some(stem) = lower.strip_suffix(suffix) {
                if in_list(VERB_STEMS, stem) {
                    return true;
                }
                // "makes" -> "make": restore a dropped final e.
                let mut restored = stem.to_string();
                restored.push('e');
                if in_list(VERB_STEMS, &restored) {
                    return true;
                }
                // "running" -> "run": undo consonant doubling.
                let bytes = stem.as_bytes();
                if bytes.len() >= 2 && bytes[bytes.len() - 1] == bytes[bytes.len() - 2] {
                    if in_list(VERB_STEMS, &stem[..stem.len() - 1]) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Tags a single token. `sentence_initial` suppresses the
/// capitalized-word-is-a-proper-noun rule, since any word is capitalized
/// at the start of a sentence.
pub fn tag_word(word: &str, sentence_initial: bool) -> PosTag {
    if !word.chars().any(char::is_alphanumeric) {
        return PosTag::Punct;
    }
    // Numerals modify nouns the way adjectives do, which is all the chunk
    // grammar needs from them.
    if word.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        return PosTag::Adj;
    }

    let lower = word.to_lowercase();
    if in_list(DETERMINERS, &lower) {
        return PosTag::Det;
    }
    if in_list(PRONOUNS, &lower) {
        return PosTag::Pron;
    }
    if in_list(ADPOSITIONS, &lower) {
        return PosTag::Adp;
    }
    if in_list(CONJUNCTIONS, &lower) {
        return PosTag::Conj;
    }
    if in_list(AUXILIARIES, &lower) {
        return PosTag::Verb;
    }
    if in_list(ADVERBS, &lower) {
        return PosTag::Adv;
    }
    if in_list(ADJECTIVES, &lower) {
        return PosTag::Adj;
    }
    if in_list(NUMBER_WORDS, &lower) {
        return PosTag::Adj;
    }

    if !sentence_initial && word.chars().next().is_some_and(char::is_uppercase) {
        return PosTag::Propn;
    }
    if lower.len() > 3 && lower.ends_with("ly") {
        return PosTag::Adv;
    }
    if is_verb_form(&lower) {
        return PosTag::Verb;
    }
    for suffix in ["ous", "ful", "ive", "able", "ible", "ish", "less"] {
        if lower.len() > suffix.len() + 1 && lower.ends_with(suffix) {
            return PosTag::Adj;
        }
    }
    PosTag::Noun
}

/// Tags every token of the document in order.
pub fn tag_tokens(doc: &SegmentedDocument) -> Vec<PosTag> {
    let sentences = doc.token_sentences();
    (0..doc.tokens().len())
        .map(|i| {
            let initial = i == 0 || sentences[i] != sentences[i - 1];
            tag_word(doc.token_text(i), initial)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_lists_are_sorted_for_binary_search() {
        for list in [
            DETERMINERS,
            PRONOUNS,
            ADPOSITIONS,
            CONJUNCTIONS,
            AUXILIARIES,
            ADVERBS,
            ADJECTIVES,
            NUMBER_WORDS,
            VERB_STEMS,
        ] {
            for pair in list.windows(2) {
                assert!(pair[0] < pair[1], "{:?} out of order", pair);
            }
        }
    }

    #[test]
    fn tags_basic_sentence() {
        let doc = SegmentedDocument::new("the quick fox jumps");
        assert_eq!(
            tag_tokens(&doc),
            [PosTag::Det, PosTag::Adj, PosTag::Noun, PosTag::Verb]
        );
    }

    #[test]
    fn capitalized_mid_sentence_is_proper_noun() {
        let doc = SegmentedDocument::new("we value Continual Learning");
        assert_eq!(
            tag_tokens(&doc),
            [PosTag::Pron, PosTag::Noun, PosTag::Propn, PosTag::Propn]
        );
    }

    #[test]
    fn sentence_initial_capital_is_not_proper_noun() {
        assert_eq!(tag_word("Models", true), PosTag::Noun);
        assert_eq!(tag_word("Models", false), PosTag::Propn);
        assert_eq!(tag_word("The", true), PosTag::Det);
    }

    #[test]
    fn closed_class_words() {
        assert_eq!(tag_word("the", false), PosTag::Det);
        assert_eq!(tag_word("of", false), PosTag::Adp);
        assert_eq!(tag_word("and", false), PosTag::Conj);
        assert_eq!(tag_word("they", false), PosTag::Pron);
        assert_eq!(tag_word("is", false), PosTag::Verb);
        assert_eq!(tag_word("run", true), PosTag::Verb);
    }

    #[test]
    fn suffix_heuristics() {
        assert_eq!(tag_word("quickly", false), PosTag::Adv);
        assert_eq!(tag_word("jumps", false), PosTag::Verb);
        assert_eq!(tag_word("trained", false), PosTag::Verb);
        assert_eq!(tag_word("running", true), PosTag::Verb);
        assert_eq!(tag_word("makes", false), PosTag::Verb);
        assert_eq!(tag_word("useless", false), PosTag::Adj);
    }

    #[test]
    fn default_is_noun() {
        assert_eq!(tag_word("fox", false), PosTag::Noun);
        assert_eq!(tag_word("buildings", false), PosTag::Noun);
        assert_eq!(tag_word("paradigm", false), PosTag::Noun);
    }

    #[test]
    fn punctuation_and_numbers() {
        assert_eq!(tag_word(",", false), PosTag::Punct);
        assert_eq!(tag_word("(", false), PosTag::Punct);
        assert_eq!(tag_word("62", false), PosTag::Adj);
        assert_eq!(tag_word("3.14", false), PosTag::Adj);
        assert_eq!(tag_word("two", false), PosTag::Adj);
    }
}
