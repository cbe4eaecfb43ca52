mod common;

use common::golden::{agents, golden_path, scripts};
use dmnbot_core::runtime::{render, Runtime};

#[test]
fn transcripts_match_golden_files() {
    let bless = std::env::var_os("DMNBOT_BLESS").is_some();
    let agents = agents();
    let mut failures = Vec::new();
    let all = scripts();
    assert!(all.len() >= 20, "only {} scripts", all.len());
    for s in all {
        let rt = Runtime::new(agents[&s.agent].clone()).unwrap();
        let transcript = render(&rt.replay(&s.name, &s.text).transcript);
        let path = golden_path(&s.name);
        if bless {
            std::fs::write(&path, &transcript).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_default();
        if expected != transcript {
            failures.push(format!("{}:\n--- expected\n{expected}--- actual\n{transcript}", s.name));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn replay_is_deterministic() {
    let agents = agents();
    for s in scripts() {
        let a = Runtime::new(agents[&s.agent].clone()).unwrap();
        let b = Runtime::new(agents[&s.agent].clone()).unwrap();
        assert_eq!(a.replay("x", &s.text).transcript, b.replay("x", &s.text).transcript, "{}", s.name);
    }
}
