//! OpenAI-compatible chat-completions provider.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use super::{GatewayError, GenerationMetadata, GenerationRequest, Provider, ProviderReply};

static NETWORK_REQUESTS: AtomicU64 = AtomicU64::new(0);

/// Requests sent over the network by any provider in this process.
pub fn network_requests() -> u64 {
    NETWORK_REQUESTS.load(Ordering::SeqCst)
}

pub struct OpenAiCompatible {
    id: String,
    url: String,
    model: String,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
    /// Smallest gap between two request starts.
    min_interval: Duration,
    last_start: Mutex<Option<Instant>>,
}

impl OpenAiCompatible {
    /// `endpoint` is the API base (`.../v1`); `api_key_env` names the
    /// environment variable holding the credential, if one is needed.
    pub fn new(
        id: &str,
        endpoint: &str,
        model: &str,
        api_key_env: Option<&str>,
        timeout: Duration,
        requests_per_minute: Option<u32>,
    ) -> Result<Self, GatewayError> {
        let api_key = match api_key_env {
            Some(var) => Some(std::env::var(var).map_err(|_| {
                GatewayError::Config(format!("provider '{id}': environment variable {var} is not set"))
            })?),
            None => None,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| GatewayError::Config(format!("provider '{id}': {e}")))?;
        let min_interval = match requests_per_minute {
            Some(0) => {
                return Err(GatewayError::Config(format!("provider '{id}': requests_per_minute must be positive")))
            }
            Some(n) => Duration::from_secs(60) / n,
            None => Duration::ZERO,
        };
        Ok(OpenAiCompatible {
            id: id.into(),
            url: format!("{}/chat/completions", endpoint.trim_end_matches('/')),
            model: model.into(),
            api_key,
            client,
            min_interval,
            last_start: Mutex::new(None),
        })
    }

    fn pace(&self) {
        let mut last = self.last_start.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(prev) = *last {
            let next = prev + self.min_interval;
            let now = Instant::now();
            if next > now {
                std::thread::sleep(next - now);
            }
        }
        *last = Some(Instant::now());
    }

    fn body(&self, req: &GenerationRequest) -> Value {
        let mut body = json!({
            "model": self.model,
            "messages": [{"role": "user", "content": req.prompt_text}],
            "temperature": req.params.temperature,
            "max_tokens": req.params.max_tokens,
        });
        if !req.params.stop.is_empty() {
            body["stop"] = json!(req.params.stop);
        }
        body
    }
}

fn parse_reply(v: &Value) -> Result<(String, GenerationMetadata), GatewayError> {
    let choice = v["choices"].get(0).ok_or_else(|| GatewayError::Transport("response has no choices".into()))?;
    if choice["finish_reason"].as_str() == Some("content_filter") {
        return Err(GatewayError::Refusal("content filter".into()));
    }
    let text = choice["message"]["content"]
        .as_str()
        .ok_or_else(|| GatewayError::Transport("response has no message content".into()))?;
    let meta = GenerationMetadata {
        latency_ms: None,
        prompt_tokens: v["usage"]["prompt_tokens"].as_u64(),
        completion_tokens: v["usage"]["completion_tokens"].as_u64(),
        model: v["model"].as_str().map(str::to_string),
    };
    Ok((text.to_string(), meta))
}

impl Provider for OpenAiCompatible {
    fn id(&self) -> &str {
        &self.id
    }

    fn complete(&self, req: &GenerationRequest) -> Result<ProviderReply, GatewayError> {
        self.pace();
        let start = Instant::now();
        NETWORK_REQUESTS.fetch_add(1, Ordering::SeqCst);
        let mut call = self.client.post(&self.url).json(&self.body(req));
        if let Some(key) = &self.api_key {
            call = call.bearer_auth(key);
        }
        let resp = call.send().map_err(|e| GatewayError::Transport(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| GatewayError::Transport(e.to_string()))?;
        if status.as_u16() == 429 || status.as_u16() == 408 || status.is_server_error() {
            return Err(GatewayError::Transport(format!("HTTP {status}")));
        }
        if !status.is_success() {
            let snippet: String = text.chars().take(200).collect();
            return Err(GatewayError::Refusal(format!("HTTP {status}: {snippet}")));
        }
        let v: Value =
            serde_json::from_str(&text).map_err(|e| GatewayError::Transport(format!("response body: {e}")))?;
        let (raw_text, mut metadata) = parse_reply(&v)?;
        metadata.latency_ms = Some(start.elapsed().as_millis() as u64);
        Ok(ProviderReply { raw_text, metadata, transcript_id: None })
    }
}
