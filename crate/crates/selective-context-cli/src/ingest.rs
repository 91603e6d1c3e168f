//! Reading documents from plain text, JSONL batches, and conversation files.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

/// One turn of a conversation.
#[derive(Debug, Clone, Deserialize)]
pub struct Turn {
    pub speaker: String,
    pub text: String,
}

impl Turn {
    /// The turn as a single prefixed line.
    pub fn rendered(&self) -> String {
        format!("{}: {}", self.speaker, self.text)
    }
}

/// A document to compress. Conversations keep their turns so the final
/// query can be carried through untouched.
#[derive(Debug, Clone)]
pub struct InputDocument {
    pub id: String,
    pub body: String,
    pub turns: Option<Vec<Turn>>,
}

impl InputDocument {
    fn article(id: String, body: String) -> InputDocument {
        InputDocument {
            id,
            body,
            turns: None,
        }
    }

    fn conversation(id: String, turns: Vec<Turn>) -> InputDocument {
        let body = turns
            .iter()
            .map(Turn::rendered)
            .collect::<Vec<_>>()
            .join("\n");
        InputDocument {
            id,
            body,
            turns: Some(turns),
        }
    }

    /// The text compression operates on: the whole body for articles, every
    /// turn but the last for conversations.
    pub fn compressible(&self) -> String {
        match &self.turns {
            None => self.body.clone(),
            Some(turns) => turns[..turns.len() - 1]
                .iter()
                .map(Turn::rendered)
                .collect::<Vec<_>>()
                .join("\n"),
        }
    }

    /// Text appended to the output verbatim: a conversation's final turn.
    pub fn appended(&self) -> Option<String> {
        self.turns
            .as_ref()
            .and_then(|turns| turns.last())
            .map(Turn::rendered)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Txt,
    Jsonl,
    ConvoJson,
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::Txt => "txt",
            InputFormat::Jsonl => "jsonl",
            InputFormat::ConvoJson => "convo-json",
        })
    }
}

#[derive(Deserialize)]
struct JsonlRecord {
    id: Option<String>,
    body: Option<String>,
}

#[derive(Deserialize)]
struct ConversationRecord {
    id: Option<String>,
    turns: Vec<Turn>,
}

/// Reads documents from `path` in the given format. An empty file yields an
/// empty batch; malformed content is an error naming the offending line.
pub fn ingest(path: &Path, format: InputFormat) -> Result<Vec<InputDocument>> {
    let content = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let documents = match format {
        InputFormat::Txt => ingest_txt(path, &content),
        InputFormat::Jsonl => ingest_jsonl(path, &content)?,
        InputFormat::ConvoJson => ingest_convo(path, &content)?,
    };

    let mut seen = HashSet::new();
    for doc in &documents {
        if !seen.insert(doc.id.as_str()) {
            bail!(
                "{}: duplicate document id {:?} in batch",
                path.display(),
                doc.id
            );
        }
    }
    Ok(documents)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "document".to_string())
}

fn ingest_txt(path: &Path, content: &str) -> Vec<InputDocument> {
    if content.trim().is_empty() {
        return Vec::new();
    }
    vec![InputDocument::article(stem(path), content.to_string())]
}

fn ingest_jsonl(path: &Path, content: &str) -> Result<Vec<InputDocument>> {
    let mut documents = Vec::new();
    for (index, line) in content.lines().enumerate() {
        let number = index + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: JsonlRecord = serde_json::from_str(line)
            .map_err(|e| anyhow!("{} line {number}: {e}", path.display()))?;
        let body = record.body.ok_or_else(|| {
            anyhow!("{} line {number}: missing \"body\" field", path.display())
        })?;
        let id = record.id.unwrap_or_else(|| format!("line-{number}"));
        documents.push(InputDocument::article(id, body));
    }
    Ok(documents)
}

fn ingest_convo(path: &Path, content: &str) -> Result<Vec<InputDocument>> {
    if content.trim().is_empty() {
        return Ok(Vec::new());
    }
    let records: Vec<ConversationRecord> = if content.trim_start().starts_with('[') {
        serde_json::from_str(content)
            .map_err(|e| anyhow!("{}: {e}", path.display()))?
    } else {
        vec![serde_json::from_str(content)
            .map_err(|e| anyhow!("{}: {e}", path.display()))?]
    };

    let mut documents = Vec::new();
    for (index, record) in records.into_iter().enumerate() {
        if record.turns.is_empty() {
            bail!(
                "{}: conversation {} has no turns",
                path.display(),
                index + 1
            );
        }
        let id = record.id.unwrap_or_else(|| {
            if index == 0 {
                stem(path)
            } else {
                format!("{}-{}", stem(path), index + 1)
            }
        });
        documents.push(InputDocument::conversation(id, record.turns));
    }
    Ok(documents)
}
