//! Chat-completion client. Failures never propagate: every path ends in a
//! [`FeedbackResult`], with `ok == false` and one of the documented error
//! strings when no reply was obtained.

use std::time::Duration;

use kinecoach_core::PromptBundle;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const ENV_API_KEY: &str = "KINECOACH_API_KEY";
pub const ENV_MODEL: &str = "KINECOACH_MODEL";
pub const ENV_API_BASE: &str = "KINECOACH_API_BASE";

pub const DEFAULT_MODEL: &str = "gpt-4o";
pub const DEFAULT_API_BASE: &str = "https://api.openai.com/v1";
pub const TEMPERATURE: f64 = 0.2;
pub const MAX_TOKENS: u32 = 120;
pub const TIMEOUT: Duration = Duration::from_secs(30);

/// Returned when no API key is configured. No request is made.
pub const MISSING_KEY_MESSAGE: &str = "ERROR: no API key configured (set KINECOACH_API_KEY); feedback not generated.";
/// Prefix of every failure string after a request was attempted.
pub const REQUEST_FAILED_PREFIX: &str = "ERROR: LLM request failed: ";

#[derive(Debug, Clone, PartialEq)]
pub struct LlmConfig {
    pub api_key: Option<String>,
    pub model: String,
    pub api_base: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub timeout: Duration,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            api_key: None,
            model: DEFAULT_MODEL.into(),
            api_base: DEFAULT_API_BASE.into(),
            temperature: TEMPERATURE,
            max_tokens: MAX_TOKENS,
            timeout: TIMEOUT,
        }
    }
}

impl LlmConfig {
    pub fn from_env() -> Self {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    /// Builds a config from any variable source; blank values count as unset.
    pub fn from_lookup(lookup: impl Fn(&str) -> Option<String>) -> Self {
        let get = |k: &str| lookup(k).map(|v| v.trim().to_string()).filter(|v| !v.is_empty());
        LlmConfig {
            api_key: get(ENV_API_KEY),
            model: get(ENV_MODEL).unwrap_or_else(|| DEFAULT_MODEL.into()),
            api_base: get(ENV_API_BASE).unwrap_or_else(|| DEFAULT_API_BASE.into()),
            ..LlmConfig::default()
        }
    }

    pub fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.api_base.trim_end_matches('/'))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackResult {
    pub text: String,
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub ok: bool,
}

pub fn request_body(bundle: &PromptBundle, config: &LlmConfig) -> Value {
    json!({
        "model": config.model,
        "temperature": config.temperature,
        "max_tokens": config.max_tokens,
        "messages": [
            {"role": "system", "content": bundle.system_prompt},
            {"role": "user", "content": bundle.user_prompt},
        ],
    })
}

fn status_class(code: u16) -> &'static str {
    match code {
        400..=499 => "client error",
        500..=599 => "server error",
        _ => "unexpected status",
    }
}

fn call(config: &LlmConfig, key: &str, body: &Value) -> Result<String, String> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(config.timeout))
        .http_status_as_error(false)
        .build()
        .into();
    let mut response = agent
        .post(config.endpoint())
        .header("Authorization", format!("Bearer {key}"))
        .header("Content-Type", "application/json")
        .send(body.to_string())
        .map_err(|e| match e {
            ureq::Error::Timeout(_) => format!("timed out after {} s", config.timeout.as_secs()),
            other => format!("transport error ({other})"),
        })?;
    let code = response.status().as_u16();
    if !(200..300).contains(&code) {
        return Err(format!("HTTP {code} ({})", status_class(code)));
    }
    let text = response.body_mut().read_to_string().map_err(|e| format!("unreadable response ({e})"))?;
    let reply: Value = serde_json::from_str(&text).map_err(|_| "malformed response (not JSON)".to_string())?;
    reply["choices"][0]["message"]["content"]
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| "malformed response (no choices[0].message.content)".to_string())
}

/// One chat-completion call with the configured decoding settings.
pub fn generate_feedback(bundle: &PromptBundle, config: &LlmConfig) -> FeedbackResult {
    let result = |text: String, ok: bool| FeedbackResult {
        text,
        model: config.model.clone(),
        temperature: config.temperature,
        max_tokens: config.max_tokens,
        ok,
    };
    let Some(key) = config.api_key.as_deref() else {
        return result(MISSING_KEY_MESSAGE.to_string(), false);
    };
    match call(config, key, &request_body(bundle, config)) {
        Ok(text) => result(text, true),
        Err(reason) => result(format!("{REQUEST_FAILED_PREFIX}{reason}"), false),
    }
}
