//! Chatito files and agent bundles.

mod bundle;
mod chatito;

use thiserror::Error;

pub use bundle::{
    bundle_digest, export_agent_bundle, load_agent_bundle, read_bundle_dir, read_bundle_zip, write_bundle_dir, write_bundle_zip,
    Bundle, LoadError,
};
pub use chatito::{read_chatito, write_chatito};

use crate::agent::AgentSpec;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("chatito line {line}: {reason}")]
    Chatito { line: usize, reason: String },
    #[error(transparent)]
    Grammar(#[from] crate::phrase::PhraseError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("zip: {0}")]
    Zip(String),
}

/// One Chatito file per intent with a non-empty grammar, keyed by file name.
pub fn export_chatito(agent: &AgentSpec) -> Vec<(String, String)> {
    agent
        .intents
        .iter()
        .filter(|i| i.grammar.intents.values().any(|r| !r.templates.is_empty()))
        .map(|i| (format!("{}.chatito", i.name), write_chatito(&i.grammar)))
        .collect()
}
