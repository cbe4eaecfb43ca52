#![allow(dead_code)]

use std::path::PathBuf;

use dmnbot_core::agent::AgentSpec;
use dmnbot_core::compile::{compile, CompileOptions};
use dmnbot_core::fixtures::{agent_sources, script_agent};

pub fn core_fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

/// `(name, agent, script text, golden text)` for every golden script.
pub fn goldens() -> Vec<(String, String, String, String)> {
    let dir = core_fixtures().join("scripts");
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| {
            let path = e.ok()?.path();
            if path.extension()? != "script" {
                return None;
            }
            let name = path.file_stem()?.to_string_lossy().into_owned();
            let text = std::fs::read_to_string(&path).ok()?;
            let golden = std::fs::read_to_string(dir.join(format!("{name}.golden"))).ok()?;
            let agent = script_agent(&text)?.to_owned();
            Some((name, agent, text, golden))
        })
        .collect();
    out.sort();
    out
}

pub fn agent(name: &str) -> AgentSpec {
    compile(&agent_sources(name).unwrap(), &CompileOptions::default()).unwrap()
}

/// Command-line arguments that build the named agent configuration.
pub fn agent_args(name: &str) -> Vec<String> {
    let f = |n: &str| core_fixtures().join(n).to_string_lossy().into_owned();
    match name {
        "risk_category" => vec![f("risk_category.json"), "--of".into(), "existingcustomer".into()],
        "risk_category_full" => vec![f("risk_category_full.json"), "--of".into(), "existingcustomer".into()],
        "job_suitability" => vec![f("job_suitability_hierarchy.json")],
        "job_suitability_ask" => vec![f("job_suitability_hierarchy.json"), "--ask".into(), "riskcategory".into()],
        "membership_offer" => vec![f("membership_offer.json")],
        "coverage_gap" => vec![f("coverage_gap.json")],
        "premium_and_plan" => vec![f("insurance_premium.json"), f("gym_plan.json")],
        other => panic!("unknown agent {other}"),
    }
}
