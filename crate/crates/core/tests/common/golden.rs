use std::collections::BTreeMap;
use std::path::PathBuf;

use dmnbot_core::agent::AgentSpec;
use dmnbot_core::compile::{compile, CompileOptions};
use dmnbot_core::fixtures::{agent_sources, script_agent, AGENTS};

pub struct Script {
    pub name: String,
    pub agent: String,
    pub text: String,
}

pub fn scripts_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/scripts")
}

pub fn scripts() -> Vec<Script> {
    let mut out: Vec<Script> = std::fs::read_dir(scripts_dir())
        .expect("scripts directory")
        .filter_map(|e| {
            let path = e.ok()?.path();
            if path.extension()? != "script" {
                return None;
            }
            let text = std::fs::read_to_string(&path).ok()?;
            let agent = script_agent(&text).expect("script names its agent").to_owned();
            Some(Script {
                name: path.file_stem()?.to_string_lossy().into_owned(),
                agent,
                text,
            })
        })
        .collect();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

pub fn golden_path(name: &str) -> PathBuf {
    scripts_dir().join(format!("{name}.golden"))
}

pub fn agents() -> BTreeMap<String, AgentSpec> {
    AGENTS
        .iter()
        .map(|name| {
            let sources = agent_sources(name).unwrap();
            (name.to_string(), compile(&sources, &CompileOptions::default()).unwrap())
        })
        .collect()
}
