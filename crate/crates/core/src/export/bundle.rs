//! Agent bundles: `agent.json`, `entities/`, `intents/` and `models/`,
//! stored as a directory or a zip archive.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Cursor, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{AgentSpec, DecisionEntry, Entity, Intent, Messages, Metadata, NUMBER_ENTITY};
use crate::io::{parse_model_json, write_model_json, ParseError};

use super::ExportError;

/// Bundle contents: relative path to file bytes.
pub type Bundle = BTreeMap<String, Vec<u8>>;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("missing file `{0}`")]
    Missing(String),
    #[error("{path}: {reason}")]
    Json { path: String, reason: String },
    #[error("{path}: {source}")]
    Model {
        path: String,
        #[source]
        source: ParseError,
    },
    #[error("intent `{intent}` parameter `{parameter}` refers to missing entity `{entity}`")]
    DanglingEntity {
        intent: String,
        parameter: String,
        entity: String,
    },
    #[error("inconsistent agent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("zip: {0}")]
    Zip(String),
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    metadata: Metadata,
    decisions: Vec<DecisionEntry>,
    intents: Vec<String>,
    messages: Messages,
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("agent types serialize");
    out.push(b'\n');
    out
}

fn parse<T: for<'de> Deserialize<'de>>(bundle: &Bundle, path: &str) -> Result<T, LoadError> {
    let bytes = bundle.get(path).ok_or_else(|| LoadError::Missing(path.to_owned()))?;
    serde_json::from_slice(bytes).map_err(|e| LoadError::Json {
        path: path.to_owned(),
        reason: e.to_string(),
    })
}

pub fn export_agent_bundle(agent: &AgentSpec) -> Bundle {
    let mut b = Bundle::new();
    let manifest = Manifest {
        metadata: agent.metadata.clone(),
        decisions: agent.decisions.clone(),
        intents: agent.intents.iter().map(|i| i.name.clone()).collect(),
        messages: agent.messages.clone(),
    };
    b.insert("agent.json".to_owned(), json(&manifest));
    for e in &agent.entities {
        b.insert(format!("entities/{}.json", e.name), json(e));
    }
    for i in &agent.intents {
        b.insert(format!("intents/{}.json", i.name), json(i));
    }
    for (name, model) in &agent.models {
        let mut bytes = write_model_json(model);
        bytes.push(b'\n');
        b.insert(format!("models/{name}.json"), bytes);
    }
    b
}

/// Rebuilds an agent, checking that every reference resolves. Entities are
/// ordered by first use.
pub fn load_agent_bundle(bundle: &Bundle) -> Result<AgentSpec, LoadError> {
    let manifest: Manifest = parse(bundle, "agent.json")?;
    let mut intents = Vec::new();
    for name in &manifest.intents {
        let i: Intent = parse(bundle, &format!("intents/{name}.json"))?;
        intents.push(i);
    }
    let available: BTreeSet<&str> = bundle
        .keys()
        .filter_map(|k| k.strip_prefix("entities/")?.strip_suffix(".json"))
        .collect();
    let mut order: Vec<String> = Vec::new();
    for i in &intents {
        for p in &i.parameters {
            if p.entity == NUMBER_ENTITY || order.contains(&p.entity) {
                continue;
            }
            if !available.contains(p.entity.as_str()) {
                return Err(LoadError::DanglingEntity {
                    intent: i.name.clone(),
                    parameter: p.name.clone(),
                    entity: p.entity.clone(),
                });
            }
            order.push(p.entity.clone());
        }
    }
    for name in available {
        if !order.iter().any(|o| o == name) {
            order.push(name.to_owned());
        }
    }
    let mut entities: Vec<Entity> = Vec::new();
    for name in &order {
        entities.push(parse(bundle, &format!("entities/{name}.json"))?);
    }
    let mut models = BTreeMap::new();
    for d in &manifest.decisions {
        let path = format!("models/{}.json", d.name);
        let bytes = bundle.get(&path).ok_or_else(|| LoadError::Missing(path.clone()))?;
        let model = parse_model_json(bytes).map_err(|source| LoadError::Model { path, source })?;
        models.insert(d.name.clone(), model);
    }
    let agent = AgentSpec {
        metadata: manifest.metadata,
        decisions: manifest.decisions,
        entities,
        intents,
        messages: manifest.messages,
        models,
    };
    agent.check().map_err(LoadError::Inconsistent)?;
    Ok(agent)
}

pub fn write_bundle_dir(bundle: &Bundle, dir: &Path) -> Result<(), ExportError> {
    for (path, bytes) in bundle {
        let target = dir.join(path);
        if let Some(parent) = target.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(target, bytes)?;
    }
    Ok(())
}

pub fn read_bundle_dir(dir: &Path) -> Result<Bundle, LoadError> {
    let mut b = Bundle::new();
    let manifest = dir.join("agent.json");
    if !manifest.is_file() {
        return Err(LoadError::Missing(manifest.display().to_string()));
    }
    b.insert("agent.json".to_owned(), std::fs::read(manifest)?);
    for sub in ["entities", "intents", "models"] {
        let d = dir.join(sub);
        if !d.is_dir() {
            continue;
        }
        for entry in std::fs::read_dir(&d)? {
            let entry = entry?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if name.ends_with(".json") && entry.file_type()?.is_file() {
                b.insert(format!("{sub}/{name}"), std::fs::read(entry.path())?);
            }
        }
    }
    Ok(b)
}

/// Deterministic archive: sorted entries, fixed timestamps, deflate.
pub fn write_bundle_zip(bundle: &Bundle) -> Result<Vec<u8>, ExportError> {
    use zip::write::SimpleFileOptions;
    let options = SimpleFileOptions::default()
        .compression_method(zip::CompressionMethod::Deflated)
        .last_modified_time(zip::DateTime::default())
        .unix_permissions(0o644);
    let mut w = zip::ZipWriter::new(Cursor::new(Vec::new()));
    for (path, bytes) in bundle {
        w.start_file(path.as_str(), options).map_err(|e| ExportError::Zip(e.to_string()))?;
        w.write_all(bytes)?;
    }
    let cursor = w.finish().map_err(|e| ExportError::Zip(e.to_string()))?;
    Ok(cursor.into_inner())
}

pub fn read_bundle_zip(bytes: &[u8]) -> Result<Bundle, LoadError> {
    let zerr = |e: zip::result::ZipError| LoadError::Zip(e.to_string());
    let mut archive = zip::ZipArchive::new(Cursor::new(bytes)).map_err(zerr)?;
    let mut b = Bundle::new();
    for i in 0..archive.len() {
        let mut f = archive.by_index(i).map_err(zerr)?;
        if f.is_dir() {
            continue;
        }
        let name = f.name().map_err(zerr)?.into_owned();
        let mut data = Vec::new();
        f.read_to_end(&mut data)?;
        b.insert(name, data);
    }
    Ok(b)
}

/// SHA-256 over every path and file, in path order.
pub fn bundle_digest(bundle: &Bundle) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    for (path, bytes) in bundle {
        h.update((path.len() as u64).to_le_bytes());
        h.update(path.as_bytes());
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}
