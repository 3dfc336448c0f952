//! Transcript store keyed by SHA-256 of `[provider_id, prompt, attempt]`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{GatewayError, GenerationMetadata, GenerationRequest, Provider, ProviderReply};

pub fn replay_key(provider_id: &str, prompt: &str, attempt: u32) -> String {
    let canonical = serde_json::to_string(&(provider_id, prompt, attempt)).expect("tuple serializes");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub provider_id: String,
    pub attempt: u32,
    pub prompt: String,
    pub raw_text: String,
    #[serde(default)]
    pub metadata: GenerationMetadata,
}

impl Transcript {
    pub fn key(&self) -> String {
        replay_key(&self.provider_id, &self.prompt, self.attempt)
    }
}

/// A directory of `<key>.json` transcripts.
#[derive(Debug, Clone)]
pub struct ReplayStore {
    dir: PathBuf,
}

impl ReplayStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ReplayStore { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn get(&self, key: &str) -> Result<Option<Transcript>, GatewayError> {
        let path = self.dir.join(format!("{key}.json"));
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(GatewayError::Store(format!("{}: {e}", path.display()))),
        };
        let t: Transcript =
            serde_json::from_str(&text).map_err(|e| GatewayError::Store(format!("{}: {e}", path.display())))?;
        if t.key() != key {
            return Err(GatewayError::Store(format!("{}: contents do not match its key", path.display())));
        }
        Ok(Some(t))
    }

    /// Writes a transcript and returns its key.
    pub fn put(&self, t: &Transcript) -> Result<String, GatewayError> {
        let key = t.key();
        std::fs::create_dir_all(&self.dir).map_err(|e| GatewayError::Store(format!("{}: {e}", self.dir.display())))?;
        let mut text = serde_json::to_string_pretty(t).expect("transcript serializes");
        text.push('\n');
        let path = self.dir.join(format!("{key}.json"));
        let tmp = self.dir.join(format!(".{key}.tmp"));
        std::fs::write(&tmp, text)
            .and_then(|_| std::fs::rename(&tmp, &path))
            .map_err(|e| GatewayError::Store(format!("{}: {e}", path.display())))?;
        Ok(key)
    }
}

/// Answers only from the store; a missing transcript is an error.
pub struct ReplayProvider {
    id: String,
    store: ReplayStore,
}

impl ReplayProvider {
    pub fn new(id: &str, store: ReplayStore) -> Self {
        ReplayProvider { id: id.into(), store }
    }
}

impl Provider for ReplayProvider {
    fn id(&self) -> &str {
        &self.id
    }

    fn complete(&self, req: &GenerationRequest) -> Result<ProviderReply, GatewayError> {
        let key = replay_key(&self.id, &req.prompt_text, req.attempt);
        match self.store.get(&key)? {
            Some(t) => Ok(ProviderReply { raw_text: t.raw_text, metadata: t.metadata, transcript_id: Some(key) }),
            None => Err(GatewayError::ReplayMiss { provider_id: self.id.clone(), attempt: req.attempt, key }),
        }
    }
}

/// Forwards to a live provider and stores every successful reply.
pub struct RecordingProvider {
    inner: Arc<dyn Provider>,
    store: ReplayStore,
}

impl RecordingProvider {
    pub fn new(inner: Arc<dyn Provider>, store: ReplayStore) -> Self {
        RecordingProvider { inner, store }
    }
}

impl Provider for RecordingProvider {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn complete(&self, req: &GenerationRequest) -> Result<ProviderReply, GatewayError> {
        let reply = self.inner.complete(req)?;
        let key = self.store.put(&Transcript {
            provider_id: self.inner.id().to_string(),
            attempt: req.attempt,
            prompt: req.prompt_text.clone(),
            raw_text: reply.raw_text.clone(),
            metadata: reply.metadata.clone(),
        })?;
        Ok(ProviderReply { transcript_id: Some(key), ..reply })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::{Gateway, GenerationParams, GenerationRequest};

    fn transcript(attempt: u32, text: &str) -> Transcript {
        Transcript {
            provider_id: "alpha".into(),
            attempt,
            prompt: "Implement quick_sort.".into(),
            raw_text: text.into(),
            metadata: GenerationMetadata::default(),
        }
    }

    #[test]
    fn key_depends_on_every_part() {
        let k = replay_key("alpha", "P", 1);
        assert_eq!(k.len(), 64);
        assert_ne!(k, replay_key("beta", "P", 1));
        assert_ne!(k, replay_key("alpha", "P ", 1));
        assert_ne!(k, replay_key("alpha", "P", 2));
        assert_eq!(k, replay_key("alpha", "P", 1));
    }

    #[test]
    fn replay_returns_recorded_text_byte_identically() {
        let dir = tempfile::tempdir().unwrap();
        let store = ReplayStore::new(dir.path());
        let text = "Here:\n```python\ndef quick_sort(a):\n    return sorted(a)\n```\n\u{00e9}\r\n";
        store.put(&transcript(1, text)).unwrap();
        let g = Gateway::new(Arc::new(ReplayProvider::new("alpha", store)));
        let req = GenerationRequest::new("alpha", "Implement quick_sort.", GenerationParams::default());
        let r = g.generate(&req).unwrap();
        assert_eq!(r.raw_text, text);
        assert_eq!(r.transcript_id.as_deref(), Some(replay_key("alpha", "Implement quick_sort.", 1).as_str()));
    }

    #[test]
    fn attempts_come_back_in_recorded_order_then_miss() {
        let dir = tempfile::tempdir().unwrap();
        let store = ReplayStore::new(dir.path());
        store.put(&transcript(1, "first")).unwrap();
        store.put(&transcript(2, "second")).unwrap();
        let g = Gateway::new(Arc::new(ReplayProvider::new("alpha", store)));
        let req = GenerationRequest::new("alpha", "Implement quick_sort.", GenerationParams::default());
        let a1 = g.generate(&req).unwrap();
        let a2 = g.follow_up(&req, &a1).unwrap();
        assert_eq!((a1.raw_text.as_str(), a2.raw_text.as_str()), ("first", "second"));
        let miss = g.follow_up(&req, &a2).unwrap_err();
        assert!(matches!(miss, GatewayError::ReplayMiss { attempt: 3, .. }));
    }

    #[test]
    fn tampered_transcript_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let store = ReplayStore::new(dir.path());
        let key = store.put(&transcript(1, "x")).unwrap();
        let path = dir.path().join(format!("{key}.json"));
        let edited = std::fs::read_to_string(&path).unwrap().replace("\"attempt\": 1", "\"attempt\": 2");
        std::fs::write(&path, edited).unwrap();
        assert!(matches!(store.get(&key), Err(GatewayError::Store(_))));
    }
}
