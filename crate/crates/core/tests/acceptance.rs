//! One PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::golden::{agents, scripts};
use common::{brute_necessary, only_table, partial_assignments, valid_model};
use dmnbot_core::agent::AgentSpec;
use dmnbot_core::compile::{compile, CompileOptions};
use dmnbot_core::engine::{validate_model, validate_unique, ConflictKind, DecisionPlan};
use dmnbot_core::export::{export_agent_bundle, load_agent_bundle, read_bundle_zip, write_bundle_zip};
use dmnbot_core::fixtures::{self, agent_sources};
use dmnbot_core::model::{Assignment, Value};
use dmnbot_core::runtime::{render, Runtime, Session, Speaker, Status};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn agent(name: &str, seed: u64) -> AgentSpec {
    let opts = CompileOptions {
        seed,
        ..CompileOptions::default()
    };
    compile(&agent_sources(name).unwrap(), &opts).unwrap()
}

fn questions(s: &Session) -> Vec<String> {
    s.transcript.iter().filter_map(|t| t.meta.asked.clone()).collect()
}

fn wildcard_pruning() -> Outcome {
    let t = Instant::now();
    let plan = DecisionPlan::new(&fixtures::risk_category(), "riskcategory").unwrap();
    let a = Assignment::new().with("existingcustomer", true).with("applicationriskscore", 50);
    ensure!(!plan.is_necessary("creditscore", &a).unwrap(), "credit score still necessary");
    ensure!(plan.decision(&a).unwrap() == Value::from("LOW"), "decision is not LOW");
    let rt = Runtime::new(agent("risk_category", 42)).unwrap();
    let s = rt.replay("a", "hello\nI want to know the risk category\nyes\n50");
    let asked = questions(&s);
    ensure!(!asked.iter().any(|q| q == "creditscore"), "credit score asked: {asked:?}");
    ensure!(s.decision == Some(Value::from("LOW")), "conversation decided {:?}", s.decision);
    let elapsed = t.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("questions {asked:?}, decision LOW, {} ms", elapsed.as_millis()))
}

fn hierarchy_necessity() -> Outcome {
    let ask: BTreeSet<String> = ["riskcategory".to_owned()].into();
    let plan = DecisionPlan::with_ask(&fixtures::job_suitability_hierarchy(), "jobsuitability", &ask).unwrap();
    let employed = plan.is_necessary("riskcategory", &Assignment::new().with("currentlyemployed", true)).unwrap();
    let unemployed = plan.is_necessary("riskcategory", &Assignment::new().with("currentlyemployed", false)).unwrap();
    ensure!(!employed && unemployed, "employed {employed}, unemployed {unemployed}");
    Ok("employed: false, unemployed: true".to_owned())
}

fn oracle_equivalence() -> Outcome {
    let t = Instant::now();
    let mut queries = 0usize;
    let models = 240u64;
    for seed in 0..models {
        let model = valid_model(seed);
        let table = only_table(&model);
        let plan = DecisionPlan::new(&model, table.name()).unwrap();
        ensure!(table.inputs().len() <= 4 && table.rules().len() <= 12, "generator out of bounds at seed {seed}");
        for c in table.inputs() {
            let reps = plan.representatives(&c.name).map_or(0, <[Value]>::len);
            ensure!(reps <= 6, "seed {seed}: {} has {reps} representatives", c.name);
        }
        for partial in partial_assignments(table, seed) {
            for clause in table.inputs() {
                if partial.contains(&clause.name) {
                    continue;
                }
                queries += 1;
                let got = plan.is_necessary(&clause.name, &partial).unwrap();
                let want = brute_necessary(table, &clause.name, &partial);
                ensure!(got == want, "seed {seed}: {} under {partial:?}: engine {got}, brute force {want}", clause.name);
            }
        }
    }
    let elapsed = t.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{models} models, {queries} queries, 100% agreement, {:.1} s", elapsed.as_secs_f64()))
}

fn order_independence() -> Outcome {
    let rt = Runtime::new(agent("risk_category", 42)).unwrap();
    let forms = ["it is not an existing customer", "the risk score is 80", "the credit score is 700"];
    let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut outcomes = BTreeSet::new();
    for o in orders {
        let mut script = String::from("risk category\n");
        for i in o {
            script.push_str(forms[i]);
            script.push('\n');
        }
        let s = rt.replay("order", &script);
        ensure!(s.status == Status::Decided, "order {o:?} did not decide");
        let point: Vec<String> = s.collected.iter().map(|(k, v)| format!("{k}={}", v.to_literal())).collect();
        let decision = s.decision.as_ref().map(Value::to_literal).unwrap_or_default();
        outcomes.insert(format!("{decision} at {{{}}}", point.join(", ")));
    }
    ensure!(outcomes.len() == 1, "{} distinct outcomes", outcomes.len());
    Ok(format!("6 orders, 1 outcome: {}", outcomes.into_iter().next().unwrap()))
}

fn one_shot() -> Outcome {
    let rt = Runtime::new(agent("risk_category", 42)).unwrap();
    let text = "What is the risk category of an existing customer with a risk score of 35";
    let s = rt.start("one-shot");
    let active: BTreeSet<String> = s.contexts.keys().cloned().collect();
    let m = rt.match_utterance(&s, &active, text).ok_or("no intent matched")?;
    let got: Assignment = m.extracted.into_iter().map(|e| (e.input, e.value)).collect();
    let want = Assignment::new().with("existingcustomer", true).with("applicationriskscore", 35);
    ensure!(m.intent == "riskcategory_intent", "matched {}", m.intent);
    ensure!(got == want, "extracted {got:?}");
    let s = rt.replay("one-shot", text);
    let asked = questions(&s);
    ensure!(asked.len() <= 1, "asked {asked:?}");
    let decision = s.decision.as_ref().map(Value::to_literal).unwrap_or_default();
    Ok(format!("extracted 2 parameters, {} question(s), decision {decision}", asked.len()))
}

fn transcript_audit() -> Outcome {
    let agents = agents();
    let scripts = scripts();
    ensure!(scripts.len() >= 20, "only {} golden scripts", scripts.len());
    let mut asked = 0;
    let mut violations = Vec::new();
    for script in &scripts {
        let rt = Runtime::new(agents[&script.agent].clone()).unwrap();
        let s = rt.replay("audit", &script.text);
        for t in s.transcript.iter().filter(|t| t.speaker == Speaker::Bot) {
            let Some(input) = &t.meta.asked else { continue };
            asked += 1;
            let collected = t.meta.collected.clone().unwrap_or_default();
            let plan = t.meta.active_decision.as_deref().and_then(|d| rt.plan(d));
            let ok = plan.is_some_and(|p| p.is_necessary(input, &collected).unwrap_or(false));
            if !ok {
                violations.push(format!("{}: {input}", script.name));
            }
        }
    }
    ensure!(violations.is_empty(), "violations: {violations:?}");
    Ok(format!("{} scripts, {asked} questions, 0 violations", scripts.len()))
}

fn phrase_generation() -> Outcome {
    let a = agent("risk_category", 7);
    let b = agent("risk_category", 7);
    let ja = serde_json::to_string(&a.intents).unwrap();
    ensure!(ja == serde_json::to_string(&b.intents).unwrap(), "two runs differ");
    let phrases = &a.intent("riskcategory_intent").unwrap().training_phrases;
    let shapes: Vec<Vec<&str>> = phrases.iter().map(|p| p.spans.iter().map(|s| s.parameter.as_str()).collect()).collect();
    let params = ["p_existingcustomer", "p_applicationriskscore", "p_creditscore"];
    for p in params {
        ensure!(shapes.contains(&vec![p]), "no 1-permutation for {p}");
    }
    ensure!(shapes.contains(&params.to_vec()), "forward 3-permutation missing");
    let reversed: Vec<&str> = params.iter().rev().copied().collect();
    ensure!(shapes.contains(&reversed), "reversed 3-permutation missing");
    ensure!(phrases.iter().any(|p| p.text == "risk category"), "bare decision name missing");
    let mut surfaces: BTreeSet<(String, bool)> = BTreeSet::new();
    for i in &a.intents {
        for p in &i.training_phrases {
            for s in &p.spans {
                if let Value::Bool(v) = s.value {
                    surfaces.insert((p.text[s.start..s.end].to_owned(), v));
                }
            }
        }
    }
    let entity = a.entity("ent_existingcustomer").ok_or("boolean entity missing")?;
    let mut forms = 0;
    for e in &entity.entries {
        let v = e.reference.as_bool().unwrap();
        for syn in &e.synonyms {
            forms += 1;
            ensure!(surfaces.contains(&(syn.clone(), v)), "surface {syn:?} never generated");
        }
    }
    Ok(format!("{} decision phrases, {forms} boolean surfaces, byte-identical", phrases.len()))
}

fn round_trip() -> Outcome {
    let agents = agents();
    let mut count = 0;
    for script in scripts() {
        let before = &agents[&script.agent];
        let zipped = write_bundle_zip(&export_agent_bundle(before)).map_err(|e| e.to_string())?;
        let after = load_agent_bundle(&read_bundle_zip(&zipped).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure!(&after == before, "{}: reloaded agent differs", script.agent);
        let x = render(&Runtime::new(before.clone()).unwrap().replay("rt", &script.text).transcript);
        let y = render(&Runtime::new(after).unwrap().replay("rt", &script.text).transcript);
        ensure!(x == y, "{}: transcripts differ", script.name);
        count += 1;
    }
    Ok(format!("{count} scripts replayed identically after zip export and load"))
}

fn unique_validation() -> Outcome {
    let clean = [
        fixtures::risk_category(),
        fixtures::risk_category_full(),
        fixtures::job_suitability(),
        fixtures::job_suitability_hierarchy(),
        fixtures::insurance_premium(),
        fixtures::gym_plan(),
        fixtures::membership_offer(),
    ];
    for m in &clean {
        let c = validate_model(m);
        ensure!(c.is_empty(), "unexpected conflict {}", c[0]);
    }
    let model = fixtures::overlapping();
    let conflicts = validate_unique(model.table("discount").unwrap());
    ensure!(!conflicts.is_empty(), "overlap not reported");
    ensure!(
        conflicts.iter().all(|c| c.kind == ConflictKind::Overlap && c.rules == [1, 2]),
        "conflicts {conflicts:?}"
    );
    Ok(format!("{} clean fixtures, overlap reported as rules [1, 2]", clean.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("wildcard pruning", wildcard_pruning),
        ("hierarchy necessity", hierarchy_necessity),
        ("oracle equivalence", oracle_equivalence),
        ("order independence", order_independence),
        ("one-shot extraction", one_shot),
        ("transcript audit", transcript_audit),
        ("phrase generation", phrase_generation),
        ("bundle round trip", round_trip),
        ("unique validation", unique_validation),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
