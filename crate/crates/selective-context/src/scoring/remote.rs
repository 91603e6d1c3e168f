//! HTTP client for log-probability scoring services.
//!
//! The native wire format is a single POST to `<endpoint>/score` with
//! `{"text": ..., "echo": true}`, answered by parallel arrays of sub-tokens,
//! their natural-log probabilities, and their byte offsets into the submitted
//! text. An adapter profile speaks to OpenAI-style completion endpoints
//! instead, using echo mode with zero generated tokens.
//!
//! Servers tokenize however they like, so the client folds sub-tokens back
//! onto the caller's tokens by byte offset, summing log probabilities. A
//! sub-token whose non-whitespace bytes straddle two caller tokens is a hard
//! error: silently dropping or splitting its mass would corrupt the scores.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segmentation::Span;

use super::{ScorerBackend, Segment};

/// Which request/response shape the server speaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RemoteProfile {
    /// `POST <endpoint>/score` with the native schema.
    Native,
    /// `POST <endpoint>/v1/completions` in OpenAI completion-echo form.
    OpenAi { model: String },
}

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    /// Base URL, e.g. `http://localhost:8080`; the path is appended per profile.
    pub endpoint: String,
    /// Sent as a bearer token when present.
    pub auth_token: Option<String>,
    pub profile: RemoteProfile,
    /// Total tries per request, including the first.
    pub max_attempts: u32,
    /// Delay before the first retry; doubles per retry, capped at 5 s.
    pub initial_backoff: Duration,
    /// Largest segment text, in bytes, sent in one request.
    pub byte_budget: usize,
    /// Concurrent request cap when scoring many segments.
    pub max_in_flight: usize,
    pub timeout: Duration,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        RemoteConfig {
            endpoint: endpoint.into(),
            auth_token: None,
            profile: RemoteProfile::Native,
            max_attempts: 3,
            initial_backoff: Duration::from_millis(100),
            byte_budget: 8 * 1024,
            max_in_flight: 4,
            timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Serialize)]
struct ScoreRequest<'a> {
    text: &'a str,
    echo: bool,
}

#[derive(Deserialize)]
struct ScoreResponse {
    tokens: Vec<String>,
    token_logprobs: Vec<Option<f64>>,
    byte_offsets: Vec<(usize, usize)>,
}

#[derive(Serialize)]
struct OpenAiRequest<'a> {
    model: &'a str,
    prompt: &'a str,
    max_tokens: u32,
    echo: bool,
    logprobs: u32,
    temperature: f32,
}

#[derive(Deserialize)]
struct OpenAiResponse {
    choices: Vec<OpenAiChoice>,
}

#[derive(Deserialize)]
struct OpenAiChoice {
    logprobs: OpenAiLogprobs,
}

#[derive(Deserialize)]
struct OpenAiLogprobs {
    tokens: Vec<String>,
    token_logprobs: Vec<Option<f64>>,
    text_offset: Vec<usize>,
}

pub struct RemoteScorer {
    config: RemoteConfig,
    client: reqwest::blocking::Client,
    retries: AtomicU64,
}

impl RemoteScorer {
    pub fn new(config: RemoteConfig) -> Result<Self> {
        if config.endpoint.is_empty() {
            return Err(Error::InvalidArgument("remote endpoint is empty".into()));
        }
        if config.max_attempts == 0 {
            return Err(Error::InvalidArgument(
                "remote scorer needs at least one attempt".into(),
            ));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| Error::Remote {
                message: format!("building HTTP client: {e}"),
                attempts: 0,
            })?;
        Ok(RemoteScorer {
            config,
            client,
            retries: AtomicU64::new(0),
        })
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    /// Retries performed so far across all requests (not counting each
    /// request's first attempt).
    pub fn retries(&self) -> u64 {
        self.retries.load(Ordering::Relaxed)
    }

    fn url(&self) -> String {
        let base = self.config.endpoint.trim_end_matches('/');
        match self.config.profile {
            RemoteProfile::Native => format!("{base}/score"),
            RemoteProfile::OpenAi { .. } => format!("{base}/v1/completions"),
        }
    }

    fn request(&self, text: &str) -> Result<ScoreResponse> {
        let url = self.url();
        let mut attempt = 0u32;
        loop {
            attempt += 1;
            let mut builder = self.client.post(&url);
            if let Some(token) = &self.config.auth_token {
                builder = builder.bearer_auth(token);
            }
            builder = match &self.config.profile {
                RemoteProfile::Native => builder.json(&ScoreRequest { text, echo: true }),
                RemoteProfile::OpenAi { model } => builder.json(&OpenAiRequest {
                    model,
                    prompt: text,
                    max_tokens: 0,
                    echo: true,
                    logprobs: 0,
                    temperature: 0.0,
                }),
            };

            let failure = match builder.send() {
                Ok(response) if response.status().is_success() => {
                    return self.parse_response(response);
                }
                Ok(response) => {
                    let status = response.status();
                    let retryable = status.is_server_error()
                        || status == reqwest::StatusCode::TOO_MANY_REQUESTS;
                    if !retryable {
                        return Err(Error::Remote {
                            message: format!("server answered {status}"),
                            attempts: attempt,
                        });
                    }
                    format!("server answered {status}")
                }
                Err(e) => format!("request failed: {e}"),
            };

            if attempt >= self.config.max_attempts {
                return Err(Error::Remote {
                    message: failure,
                    attempts: attempt,
                });
            }
            self.retries.fetch_add(1, Ordering::Relaxed);
            let backoff = self
                .config
                .initial_backoff
                .saturating_mul(1 << (attempt - 1).min(16))
                .min(Duration::from_secs(5));
            log::warn!("retrying remote scoring after failure ({failure})");
            std::thread::sleep(backoff);
        }
    }

    fn parse_response(&self, response: reqwest::blocking::Response) -> Result<ScoreResponse> {
        match &self.config.profile {
            RemoteProfile::Native => response.json::<ScoreResponse>().map_err(|e| {
                Error::RemoteContract(format!("undecodable response body: {e}"))
            }),
            RemoteProfile::OpenAi { .. } => {
                let body: OpenAiResponse = response.json().map_err(|e| {
                    Error::RemoteContract(format!("undecodable response body: {e}"))
                })?;
                let choice = body
                    .choices
                    .into_iter()
                    .next()
                    .ok_or_else(|| Error::RemoteContract("response has no choices".into()))?;
                let lp = choice.logprobs;
                if lp.text_offset.len() != lp.tokens.len() {
                    return Err(Error::RemoteContract(
                        "text_offset and tokens lengths differ".into(),
                    ));
                }
                // Convert start offsets to byte ranges; each sub-token ends
                // where the next begins.
                let mut byte_offsets = Vec::with_capacity(lp.tokens.len());
                for (i, (&start, token)) in lp.text_offset.iter().zip(&lp.tokens).enumerate() {
                    let end = lp
                        .text_offset
                        .get(i + 1)
                        .copied()
                        .unwrap_or(start + token.len());
                    byte_offsets.push((start, end));
                }
                Ok(ScoreResponse {
                    tokens: lp.tokens,
                    token_logprobs: lp.token_logprobs,
                    byte_offsets,
                })
            }
        }
    }
}

/// Folds server sub-tokens onto caller tokens by byte offsets.
///
/// Whitespace-only sub-tokens (and the leading whitespace that GPT-style
/// tokenizers glue onto the following word) belong to the next caller token,
/// or to the previous one at the very end of the text. A missing log
/// probability is tolerated only at position 0, where echo servers have
/// nothing to condition on; it scores as zero bits.
fn fold_sub_tokens(
    text: &str,
    token_spans: &[Span],
    response: &ScoreResponse,
) -> Result<Vec<f64>> {
    let n = response.tokens.len();
    if response.token_logprobs.len() != n || response.byte_offsets.len() != n {
        return Err(Error::RemoteContract(format!(
            "parallel arrays disagree: {} tokens, {} logprobs, {} offsets",
            n,
            response.token_logprobs.len(),
            response.byte_offsets.len()
        )));
    }

    let mut sums = vec![0.0f64; token_spans.len()];
    let mut covered = vec![false; token_spans.len()];

    for (i, (&(start, end), lp)) in response
        .byte_offsets
        .iter()
        .zip(&response.token_logprobs)
        .enumerate()
    {
        let lp = match lp {
            Some(v) => *v,
            None if i == 0 => {
                log::warn!("first sub-token has no log probability; scoring it as 0 bits");
                0.0
            }
            None => {
                return Err(Error::RemoteContract(format!(
                    "missing log probability at sub-token {i}"
                )));
            }
        };
        if start > end
            || end > text.len()
            || !text.is_char_boundary(start)
            || !text.is_char_boundary(end)
        {
            return Err(Error::RemoteContract(format!(
                "sub-token {i} has invalid byte range {start}..{end}"
            )));
        }

        let piece = &text[start..end];
        let lead_ws = piece.len() - piece.trim_start().len();
        let trail_ws = piece.len() - piece.trim_end().len();
        let owner = if piece.trim().is_empty() {
            // Pure whitespace: attach forward, or backward at the end.
            match token_spans.iter().position(|s| s.end > start) {
                Some(idx) => idx,
                None => token_spans.len() - 1,
            }
        } else {
            let core = Span::new(start + lead_ws, end - trail_ws);
            let idx = match token_spans
                .iter()
                .rposition(|s| s.start <= core.start)
            {
                Some(idx) => idx,
                None => return Err(Error::MisalignedOffsets {
                    start: core.start,
                    end: core.end,
                }),
            };
            if core.end > token_spans[idx].end {
                return Err(Error::MisalignedOffsets {
                    start: core.start,
                    end: core.end,
                });
            }
            covered[idx] = true;
            idx
        };
        sums[owner] += lp;
    }

    if let Some(missing) = covered.iter().position(|c| !c) {
        let span = token_spans[missing];
        return Err(Error::RemoteContract(format!(
            "no sub-token covers caller token at bytes {}..{}",
            span.start, span.end
        )));
    }
    Ok(sums)
}

impl ScorerBackend for RemoteScorer {
    fn name(&self) -> &str {
        "remote"
    }

    fn score_segment(&self, text: &str, token_spans: &[Span]) -> Result<Vec<f64>> {
        if text.len() > self.config.byte_budget {
            return Err(Error::Scoring {
                start: 0,
                end: text.len(),
                message: format!(
                    "segment of {} bytes exceeds the {} byte request budget",
                    text.len(),
                    self.config.byte_budget
                ),
            });
        }
        let response = self.request(text)?;
        fold_sub_tokens(text, token_spans, &response)
    }

    fn max_segment_bytes(&self) -> Option<usize> {
        Some(self.config.byte_budget)
    }

    /// Scores segments with up to `max_in_flight` requests running at once.
    /// Results are written by input index, so order never depends on timing.
    fn score_segments(&self, segments: &[Segment]) -> Vec<Result<Vec<f64>>> {
        let workers = self.config.max_in_flight.max(1).min(segments.len());
        if workers <= 1 {
            return segments
                .iter()
                .map(|s| self.score_segment(&s.text, &s.token_spans))
                .collect();
        }

        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<Result<Vec<f64>>>>> =
            (0..segments.len()).map(|_| Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    if i >= segments.len() {
                        break;
                    }
                    let outcome =
                        self.score_segment(&segments[i].text, &segments[i].token_spans);
                    *slots[i].lock().unwrap() = Some(outcome);
                });
            }
        });
        slots
            .into_iter()
            .map(|slot| slot.into_inner().unwrap().expect("every slot filled"))
            .collect()
    }
}
