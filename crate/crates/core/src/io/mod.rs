//! Readers and writers for decision models.

mod json;
mod unary;
mod xml;

use std::path::Path;

use thiserror::Error;

use crate::model::{DataKind, DecisionModel, ModelError};

pub use json::{parse_model_json, write_model_json};
pub use unary::{parse_decimal, parse_literal, parse_unary_test};
pub use xml::parse_dmn_xml;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {position}: {reason}")]
    Syntax { position: usize, reason: String },
    #[error("`{literal}` is not a valid {expected}")]
    TypeMismatch { literal: String, expected: DataKind },
    #[error("malformed XML: {0}")]
    Xml(String),
    #[error("{path}: unsupported hit policy `{policy}`")]
    UnsupportedHitPolicy { path: String, policy: String },
    #[error("{path}: unsupported construct: {what}")]
    UnsupportedConstruct { path: String, what: String },
    #[error("{path}: {reason}")]
    Invalid { path: String, reason: String },
    #[error("schema error at {pointer}: {reason}")]
    Schema { pointer: String, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFormat {
    Dmn,
    Json,
}

impl ModelFormat {
    /// `.dmn` and `.xml` are XML, everything else JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("dmn") | Some("xml") => ModelFormat::Dmn,
            _ => ModelFormat::Json,
        }
    }
}

pub fn parse_model(document: &[u8], format: ModelFormat) -> Result<DecisionModel, ParseError> {
    match format {
        ModelFormat::Dmn => parse_dmn_xml(document),
        ModelFormat::Json => parse_model_json(document),
    }
}
