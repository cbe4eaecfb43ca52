use serde::{Deserialize, Serialize};

use crate::model::{Assignment, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    Bot,
    User,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TurnMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intent: Option<String>,
    /// Decision being collected when the bot asked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_decision: Option<String>,
    /// Input the bot asked for in this turn.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asked: Option<String>,
    /// Collected values when the turn was produced.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collected: Option<Assignment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub speaker: Speaker,
    pub text: String,
    #[serde(default)]
    pub meta: TurnMeta,
}

impl Turn {
    pub fn bot(text: impl Into<String>, meta: TurnMeta) -> Self {
        Turn {
            speaker: Speaker::Bot,
            text: text.into(),
            meta,
        }
    }

    pub fn user(text: impl Into<String>, intent: Option<String>) -> Self {
        Turn {
            speaker: Speaker::User,
            text: text.into(),
            meta: TurnMeta {
                intent,
                ..TurnMeta::default()
            },
        }
    }
}

/// One `bot: ...` or `user: ...` line per turn.
pub fn render(transcript: &[Turn]) -> String {
    let mut out = String::new();
    for t in transcript {
        let who = match t.speaker {
            Speaker::Bot => "bot",
            Speaker::User => "user",
        };
        out.push_str(who);
        out.push_str(": ");
        out.push_str(&t.text);
        out.push('\n');
    }
    out
}

/// Utterances of a script file: one per line, `#` comments and blank
/// lines skipped.
pub fn parse_script(script: &str) -> Vec<String> {
    script
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}
