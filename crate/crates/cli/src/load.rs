use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dmnbot_core::agent::{AgentSpec, DecisionSource, Synonyms};
use dmnbot_core::compile::{compile, CompileOptions};
use dmnbot_core::export::{load_agent_bundle, read_bundle_dir, read_bundle_zip};
use dmnbot_core::io::{parse_model, ModelFormat};
use dmnbot_core::model::{slug, DecisionModel};
use dmnbot_core::phrase::ParamStyle;

/// How to turn model files into decision sources.
#[derive(Debug, Clone, Default)]
pub struct SourceOptions {
    /// Only these decisions; all roots of each model when empty.
    pub roots: Vec<String>,
    pub of: Vec<String>,
    pub ask: Vec<String>,
    pub synonyms: Option<PathBuf>,
    pub format: Option<ModelFormat>,
}

pub fn read_model(path: &Path, format: Option<ModelFormat>) -> Result<DecisionModel> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let format = format.unwrap_or_else(|| ModelFormat::from_path(path));
    parse_model(&bytes, format).with_context(|| format!("{}: invalid model", path.display()))
}

pub fn sources(paths: &[PathBuf], opts: &SourceOptions) -> Result<Vec<DecisionSource>> {
    let synonyms: Synonyms = match &opts.synonyms {
        Some(p) => {
            let text = std::fs::read(p).with_context(|| format!("cannot read {}", p.display()))?;
            let raw: Synonyms =
                serde_json::from_slice(&text).with_context(|| format!("{}: invalid synonyms file", p.display()))?;
            raw.into_iter().map(|(input, entries)| (slug(&input), entries)).collect()
        }
        None => BTreeMap::new(),
    };
    let wanted: Vec<String> = opts.roots.iter().map(|r| slug(r)).collect();
    let mut out = Vec::new();
    for path in paths {
        let model = read_model(path, opts.format)?;
        for root in model.roots() {
            if !wanted.is_empty() && !wanted.contains(root) {
                continue;
            }
            let mut s = DecisionSource::new(model.clone(), root);
            for i in &opts.of {
                s.styles.insert(slug(i), ParamStyle::Of);
            }
            s.ask = opts.ask.iter().map(|a| slug(a)).collect();
            s.synonyms = synonyms.clone();
            out.push(s);
        }
    }
    if out.is_empty() {
        bail!("no decision selected");
    }
    Ok(out)
}

/// Loads a bundle directory or zip, or compiles a model file.
pub fn agent(path: &Path, sources_opts: &SourceOptions, compile_opts: &CompileOptions) -> Result<AgentSpec> {
    if path.is_dir() {
        let b = read_bundle_dir(path)?;
        return Ok(load_agent_bundle(&b)?);
    }
    if path.extension().is_some_and(|e| e == "zip") {
        let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        return Ok(load_agent_bundle(&read_bundle_zip(&bytes)?)?);
    }
    let s = sources(&[path.to_path_buf()], sources_opts)?;
    Ok(compile(&s, compile_opts)?)
}
