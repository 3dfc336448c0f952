//! Provider-agnostic generation with retries, follow-ups and replay.
//!
//! Every request is context-free: a prompt and parameters, never a prior
//! conversation. Follow-ups resend the same prompt with the next attempt
//! ordinal, which is also what keys the replay store.

mod extract;
mod http;
mod refine;
mod replay;

use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use extract::extract_code;
pub use http::{network_requests, OpenAiCompatible};
pub use refine::{build_refinement_prompt, render_refinement, AnalysisFindings};
pub use replay::{replay_key, RecordingProvider, ReplayProvider, ReplayStore, Transcript};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GatewayError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("provider refused: {0}")]
    Refusal(String),
    #[error("no recorded transcript for provider '{provider_id}' attempt {attempt} (key {key})")]
    ReplayMiss { provider_id: String, attempt: u32, key: String },
    #[error("gave up after {tries} tries: {last}")]
    RetriesExhausted { tries: u32, last: String },
    #[error("maximum of {max} attempts reached")]
    MaxAttemptsExceeded { max: u32 },
    #[error("provider configuration: {0}")]
    Config(String),
    #[error("replay store: {0}")]
    Store(String),
}

impl GatewayError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, GatewayError::Transport(_))
    }
}

/// Requests never carry conversation history.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextPolicy {
    #[default]
    Fresh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationParams {
    pub temperature: f64,
    pub max_tokens: u32,
    #[serde(default)]
    pub stop: Vec<String>,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams { temperature: 0.0, max_tokens: 2048, stop: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub provider_id: String,
    pub prompt_text: String,
    pub params: GenerationParams,
    pub context_policy: ContextPolicy,
    /// 1 for the first request, incremented by each follow-up.
    pub attempt: u32,
}

impl GenerationRequest {
    pub fn new(provider_id: &str, prompt_text: &str, params: GenerationParams) -> Self {
        GenerationRequest {
            provider_id: provider_id.into(),
            prompt_text: prompt_text.into(),
            params,
            context_policy: ContextPolicy::Fresh,
            attempt: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerationMetadata {
    pub latency_ms: Option<u64>,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
    pub model: Option<String>,
}

/// What a provider returns for one request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderReply {
    pub raw_text: String,
    pub metadata: GenerationMetadata,
    pub transcript_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationResult {
    pub attempt: u32,
    pub raw_text: String,
    /// Code pulled out of `raw_text`; empty when nothing code-like was found.
    pub extracted_source: String,
    pub metadata: GenerationMetadata,
    pub transcript_id: Option<String>,
}

pub trait Provider: Send + Sync {
    fn id(&self) -> &str;
    fn complete(&self, req: &GenerationRequest) -> Result<ProviderReply, GatewayError>;
}

/// Retry and attempt policy around one provider.
#[derive(Clone)]
pub struct Gateway {
    provider: Arc<dyn Provider>,
    pub max_attempts: u32,
    /// Extra tries after a retryable failure.
    pub transport_retries: u32,
    pub retry_backoff: Duration,
}

impl Gateway {
    pub fn new(provider: Arc<dyn Provider>) -> Self {
        Gateway { provider, max_attempts: 3, transport_retries: 2, retry_backoff: Duration::from_millis(200) }
    }

    pub fn provider_id(&self) -> &str {
        self.provider.id()
    }

    pub fn generate(&self, req: &GenerationRequest) -> Result<GenerationResult, GatewayError> {
        let mut tries = 0;
        loop {
            tries += 1;
            match self.provider.complete(req) {
                Ok(reply) => {
                    return Ok(GenerationResult {
                        attempt: req.attempt,
                        extracted_source: extract_code(&reply.raw_text).to_string(),
                        raw_text: reply.raw_text,
                        metadata: reply.metadata,
                        transcript_id: reply.transcript_id,
                    })
                }
                Err(e) if e.is_retryable() && tries <= self.transport_retries => {
                    std::thread::sleep(self.retry_backoff * 2u32.saturating_pow(tries - 1));
                }
                Err(e) if e.is_retryable() => {
                    return Err(GatewayError::RetriesExhausted { tries, last: e.to_string() })
                }
                Err(e) => return Err(e),
            }
        }
    }

    /// Resends the same prompt as a fresh request with the next attempt
    /// ordinal. Nothing about the prior outcome is included.
    pub fn follow_up(
        &self,
        req: &GenerationRequest,
        prior: &GenerationResult,
    ) -> Result<GenerationResult, GatewayError> {
        if prior.attempt >= self.max_attempts {
            return Err(GatewayError::MaxAttemptsExceeded { max: self.max_attempts });
        }
        let next = GenerationRequest { attempt: prior.attempt + 1, ..req.clone() };
        self.generate(&next)
    }
}
