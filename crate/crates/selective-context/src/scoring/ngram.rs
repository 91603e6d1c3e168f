//! Count-based n-gram language model with add-k smoothing.
//!
//! Probabilities are `(count(context -> next) + k) / (count(context -> *) +
//! k * (V + 1))` where `V` is the vocabulary size; the `+ 1` reserves one
//! smoothed slot shared by all out-of-vocabulary tokens, so the distribution
//! over vocabulary plus unknown sums to exactly one for every context.
//!
//! Models serialize to a little-endian binary file: magic `SCNG`, format
//! version, order, k, then the vocabulary (sorted, length-prefixed UTF-8) and
//! the count records (context token ids, successor id, count) in ascending id
//! order. Ids index the sorted vocabulary, so training the same corpus with
//! the same flags always writes byte-identical files.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::segmentation::Span;

use super::ScorerBackend;

const MAGIC: &[u8; 4] = b"SCNG";
const FORMAT_VERSION: u32 = 1;

/// Reserved id for any token outside the vocabulary.
const UNKNOWN_ID: u32 = u32::MAX;
/// Reserved id for the begin-of-sequence marker; never trained, so contexts
/// containing it fall back to the unseen-context distribution.
const BOS_ID: u32 = u32::MAX - 1;

#[derive(Debug, Clone, Default)]
struct ContextCounts {
    total: u64,
    successors: BTreeMap<u32, u64>,
}

#[derive(Debug, Clone)]
pub struct NgramModel {
    order: usize,
    k: f64,
    /// Sorted; a token's id is its index here.
    vocab: Vec<String>,
    ids: HashMap<String, u32>,
    contexts: BTreeMap<Vec<u32>, ContextCounts>,
}

impl NgramModel {
    /// Counts every window of `order` consecutive corpus tokens once.
    pub fn train(corpus: &[&str], order: usize, k: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("order must be at least 1".into()));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "smoothing k must be positive and finite, got {k}"
            )));
        }
        if corpus.len() < order {
            return Err(Error::InvalidArgument(format!(
                "corpus of {} token(s) is shorter than the model order {order}",
                corpus.len()
            )));
        }

        let vocab: Vec<String> = corpus
            .iter()
            .map(|t| t.to_string())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if vocab.len() as u64 > (BOS_ID - 1) as u64 {
            return Err(Error::InvalidArgument("vocabulary too large".into()));
        }
        let ids: HashMap<String, u32> = vocab
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();

        let mut contexts: BTreeMap<Vec<u32>, ContextCounts> = BTreeMap::new();
        for window in corpus.windows(order) {
            let context: Vec<u32> = window[..order - 1].iter().map(|t| ids[*t]).collect();
            let next = ids[window[order - 1]];
            let entry = contexts.entry(context).or_default();
            entry.total += 1;
            *entry.successors.entry(next).or_insert(0) += 1;
        }

        Ok(NgramModel {
            order,
            k,
            vocab,
            ids,
            contexts,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    fn id_of(&self, token: &str) -> u32 {
        self.ids.get(token).copied().unwrap_or(UNKNOWN_ID)
    }

    /// Maps the last `order - 1` context tokens to ids, left-padding with the
    /// begin-of-sequence marker when fewer are available.
    fn context_key(&self, context: &[&str]) -> Vec<u32> {
        let want = self.order - 1;
        let mut key = vec![BOS_ID; want.saturating_sub(context.len())];
        key.extend(
            context[context.len().saturating_sub(want)..]
                .iter()
                .map(|t| self.id_of(t)),
        );
        key
    }

    fn prob_by_ids(&self, key: &[u32], next: u32) -> f64 {
        let (count, total) = match self.contexts.get(key) {
            Some(entry) => (
                entry.successors.get(&next).copied().unwrap_or(0),
                entry.total,
            ),
            None => (0, 0),
        };
        (count as f64 + self.k)
            / (total as f64 + self.k * (self.vocab.len() as f64 + 1.0))
    }

    /// Probability of `next` after `context`; only the last `order - 1`
    /// context tokens matter, and unknown tokens use the reserved
    /// out-of-vocabulary slot.
    pub fn prob(&self, context: &[&str], next: &str) -> f64 {
        self.prob_by_ids(&self.context_key(context), self.id_of(next))
    }

    /// Natural-log probability of every token, each conditioned on the
    /// tokens before it, with `preceding` as context carried in from earlier
    /// text (empty for a fresh start at the begin-of-sequence marker).
    pub fn token_logprobs(&self, tokens: &[&str], preceding: &[&str]) -> Vec<f64> {
        let want = self.order - 1;
        let mut window: Vec<u32> = vec![BOS_ID; want];
        for (slot, token) in window.iter_mut().rev().zip(preceding.iter().rev()) {
            *slot = self.id_of(token);
        }

        let mut out = Vec::with_capacity(tokens.len());
        for token in tokens {
            let id = self.id_of(token);
            out.push(self.prob_by_ids(&window, id).ln());
            if want > 0 {
                window.rotate_left(1);
                window[want - 1] = id;
            }
        }
        out
    }

    pub fn save_to(&self, writer: &mut impl Write) -> Result<()> {
        writer.write_all(MAGIC)?;
        writer.write_all(&FORMAT_VERSION.to_le_bytes())?;
        writer.write_all(&(self.order as u32).to_le_bytes())?;
        writer.write_all(&self.k.to_le_bytes())?;
        writer.write_all(&(self.vocab.len() as u32).to_le_bytes())?;
        for token in &self.vocab {
            writer.write_all(&(token.len() as u32).to_le_bytes())?;
            writer.write_all(token.as_bytes())?;
        }
        for (context, entry) in &self.contexts {
            for (&next, &count) in &entry.successors {
                for &id in context {
                    writer.write_all(&id.to_le_bytes())?;
                }
                writer.write_all(&next.to_le_bytes())?;
                writer.write_all(&count.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.save_to(&mut file)?;
        file.flush()?;
        Ok(())
    }

    pub fn load_from(reader: &mut impl Read) -> Result<Self> {
        let mut data = Vec::new();
        reader.read_to_end(&mut data)?;
        let mut cursor = 0usize;

        let take = |cursor: &mut usize, n: usize| -> Result<&[u8]> {
            let piece = data
                .get(*cursor..*cursor + n)
                .ok_or_else(|| Error::ModelFormat("file truncated".into()))?;
            *cursor += n;
            Ok(piece)
        };
        let take_u32 = |cursor: &mut usize| -> Result<u32> {
            Ok(u32::from_le_bytes(take(cursor, 4)?.try_into().unwrap()))
        };

        if take(&mut cursor, 4)? != MAGIC {
            return Err(Error::ModelFormat(
                "bad magic; not an n-gram model file".into(),
            ));
        }
        let version = take_u32(&mut cursor)?;
        if version != FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported format version {version}, expected {FORMAT_VERSION}"
            )));
        }
        let order = take_u32(&mut cursor)? as usize;
        if order == 0 {
            return Err(Error::ModelFormat("order must be at least 1".into()));
        }
        let k = f64::from_le_bytes(take(&mut cursor, 8)?.try_into().unwrap());
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::ModelFormat(format!("invalid smoothing k {k}")));
        }

        let vocab_len = take_u32(&mut cursor)? as usize;
        let mut vocab = Vec::with_capacity(vocab_len);
        for _ in 0..vocab_len {
            let len = take_u32(&mut cursor)? as usize;
            let token = std::str::from_utf8(take(&mut cursor, len)?)
                .map_err(|_| Error::ModelFormat("vocabulary entry is not UTF-8".into()))?;
            vocab.push(token.to_string());
        }

        let record_len = (order - 1) * 4 + 4 + 8;
        if (data.len() - cursor) % record_len != 0 {
            return Err(Error::ModelFormat(format!(
                "count records truncated: {} trailing bytes are not a multiple of {record_len}",
                data.len() - cursor
            )));
        }
        let mut contexts: BTreeMap<Vec<u32>, ContextCounts> = BTreeMap::new();
        while cursor < data.len() {
            let mut context = Vec::with_capacity(order - 1);
            for _ in 0..order - 1 {
                context.push(take_u32(&mut cursor)?);
            }
            let next = take_u32(&mut cursor)?;
            let count = u64::from_le_bytes(take(&mut cursor, 8)?.try_into().unwrap());
            if context.iter().any(|&id| id as usize >= vocab_len)
                || next as usize >= vocab_len
            {
                return Err(Error::ModelFormat(
                    "count record references a token id outside the vocabulary".into(),
                ));
            }
            let entry = contexts.entry(context).or_default();
            entry.total += count;
            entry.successors.insert(next, count);
        }

        let ids = vocab
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Ok(NgramModel {
            order,
            k,
            vocab,
            ids,
            contexts,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::load_from(&mut file)
    }
}

impl ScorerBackend for NgramModel {
    fn name(&self) -> &str {
        "ngram"
    }

    fn score_segment(&self, text: &str, token_spans: &[Span]) -> Result<Vec<f64>> {
        let tokens: Vec<&str> = token_spans.iter().map(|s| s.slice(text)).collect();
        Ok(self.token_logprobs(&tokens, &[]))
    }
}
