use std::collections::BTreeSet;

use dmnbot_core::engine::{validate_model, validate_unique, ConflictKind, DecisionPlan, EngineError};
use dmnbot_core::fixtures;
use dmnbot_core::model::{raw_inputs, Assignment, Value};

fn names(model: &dmnbot_core::model::DecisionModel, root: &str) -> Vec<String> {
    raw_inputs(model, root).unwrap().into_iter().map(|c| c.name).collect()
}

#[test]
fn credit_score_is_pruned_by_the_wildcard() {
    let plan = DecisionPlan::new(&fixtures::risk_category(), "riskcategory").unwrap();
    let a = Assignment::new().with("existingcustomer", true).with("applicationriskscore", 50);
    assert!(!plan.is_necessary("creditscore", &a).unwrap());
    assert_eq!(plan.decision(&a).unwrap(), Value::from("LOW"));
    let full = a.clone().with("creditscore", 700);
    assert_eq!(plan.evaluate(&full).unwrap(), Value::from("LOW"));
}

#[test]
fn credit_score_matters_in_the_middle_band() {
    let plan = DecisionPlan::new(&fixtures::risk_category(), "riskcategory").unwrap();
    let a = Assignment::new().with("existingcustomer", true).with("applicationriskscore", 80);
    assert!(plan.is_necessary("creditscore", &a).unwrap());
    assert_eq!(plan.decision(&a), Err(EngineError::MissingInput("creditscore".into())));
}

#[test]
fn risk_category_is_necessary_only_for_the_unemployed() {
    let model = fixtures::job_suitability();
    let plan = DecisionPlan::new(&model, "jobsuitability").unwrap();
    let employed = Assignment::new().with("currentlyemployed", true);
    let unemployed = Assignment::new().with("currentlyemployed", false);
    assert!(!plan.is_necessary("riskcategory", &employed).unwrap());
    assert!(plan.is_necessary("riskcategory", &unemployed).unwrap());

    let hierarchy = fixtures::job_suitability_hierarchy();
    let ask: BTreeSet<String> = ["riskcategory".to_owned()].into();
    let plan = DecisionPlan::with_ask(&hierarchy, "jobsuitability", &ask).unwrap();
    assert!(!plan.is_necessary("riskcategory", &employed).unwrap());
    assert!(plan.is_necessary("riskcategory", &unemployed).unwrap());
}

#[test]
fn derived_input_is_judged_over_the_child_outputs() {
    let plan = DecisionPlan::new(&fixtures::job_suitability_hierarchy(), "jobsuitability").unwrap();
    let employed = Assignment::new().with("currentlyemployed", true);
    let unemployed = Assignment::new().with("currentlyemployed", false);
    assert!(!plan.is_necessary("riskcategory", &employed).unwrap());
    assert!(plan.is_necessary("riskcategory", &unemployed).unwrap());
    assert!(!plan.is_necessary("existingcustomer", &employed).unwrap());
    assert!(plan.is_necessary("existingcustomer", &unemployed).unwrap());
    assert_eq!(
        plan.decision(&Assignment::new().with("currentlyemployed", true).with("riskcategory", "LOW")),
        Err(EngineError::DerivedInputBound("riskcategory".into()))
    );
}

#[test]
fn hierarchy_agrees_with_two_step_evaluation() {
    let hierarchy = fixtures::job_suitability_hierarchy();
    let root = DecisionPlan::new(&hierarchy, "jobsuitability").unwrap();
    let child = DecisionPlan::new(&fixtures::risk_category(), "riskcategory").unwrap();
    let top = DecisionPlan::new(&fixtures::job_suitability(), "jobsuitability").unwrap();
    for employed in [true, false] {
        for customer in [true, false] {
            for score in [10, 60, 61, 100, 150] {
                for credit in [350, 599, 600, 800] {
                    let raw = Assignment::new()
                        .with("existingcustomer", customer)
                        .with("applicationriskscore", score)
                        .with("creditscore", credit);
                    let category = child.evaluate(&raw).unwrap();
                    let by_hand = top
                        .evaluate(&Assignment::new().with("currentlyemployed", employed).with("riskcategory", category))
                        .unwrap();
                    let full = raw.with("currentlyemployed", employed);
                    assert_eq!(root.evaluate(&full).unwrap(), by_hand);
                }
            }
        }
    }
}

#[test]
fn raw_input_expansion_order() {
    assert_eq!(names(&fixtures::risk_category(), "riskcategory"), ["existingcustomer", "applicationriskscore", "creditscore"]);
    assert_eq!(
        names(&fixtures::job_suitability_hierarchy(), "jobsuitability"),
        ["currentlyemployed", "existingcustomer", "applicationriskscore", "creditscore"]
    );
    assert_eq!(names(&fixtures::membership_offer(), "membershipoffer"), ["age", "student"]);
}

#[test]
fn dmn_and_json_fixtures_agree() {
    let json = fixtures::risk_category();
    let xml = fixtures::risk_category_dmn();
    assert_eq!(json.table("riskcategory").unwrap().rules(), xml.table("riskcategory").unwrap().rules());
    assert_eq!(json.table("riskcategory").unwrap().inputs(), xml.table("riskcategory").unwrap().inputs());
    let h = fixtures::job_suitability_hierarchy_dmn();
    assert_eq!(h.requirements(), fixtures::job_suitability_hierarchy().requirements());
    assert_eq!(h.roots(), ["jobsuitability"]);
}

#[test]
fn wildcards_sit_in_rules_one_and_eight() {
    let model = fixtures::risk_category_dmn();
    let table = model.table("riskcategory").unwrap();
    let wild: Vec<usize> = table.rules().iter().filter(|r| r.input_entries[2].is_any()).map(|r| r.index).collect();
    assert_eq!(wild, [1, 8]);
}

#[test]
fn fixtures_validate_cleanly() {
    for model in [
        fixtures::risk_category(),
        fixtures::risk_category_full(),
        fixtures::job_suitability(),
        fixtures::job_suitability_hierarchy(),
        fixtures::insurance_premium(),
        fixtures::gym_plan(),
        fixtures::membership_offer(),
    ] {
        assert_eq!(validate_model(&model), []);
    }
}

#[test]
fn overlap_names_both_rules() {
    let model = fixtures::overlapping();
    let conflicts = validate_unique(model.table("discount").unwrap());
    assert!(!conflicts.is_empty());
    assert!(conflicts.iter().all(|c| c.kind == ConflictKind::Overlap && c.rules == [1, 2]));
}

#[test]
fn gap_is_reported_with_its_point() {
    let model = fixtures::coverage_gap();
    let conflicts = validate_unique(model.table("loanapproval").unwrap());
    assert_eq!(conflicts.len(), 1);
    assert_eq!(conflicts[0].kind, ConflictKind::Gap);
    assert_eq!(
        conflicts[0].assignment,
        Assignment::new().with("existingcustomer", false).with("risk", "HIGH")
    );
}

#[test]
fn runtime_errors_are_structured() {
    let plan = DecisionPlan::new(&fixtures::overlapping(), "discount").unwrap();
    let a = Assignment::new().with("member", true).with("ordertotal", 500);
    assert_eq!(
        plan.decision(&a),
        Err(EngineError::MultipleMatchingRules { table: "discount".into(), rules: vec![1, 2] })
    );
    let plan = DecisionPlan::new(&fixtures::coverage_gap(), "loanapproval").unwrap();
    let a = Assignment::new().with("existingcustomer", false);
    assert!(plan.is_necessary("risk", &a).unwrap());
    assert_eq!(
        plan.decision(&a.with("risk", "HIGH")),
        Err(EngineError::NoMatchingRule("loanapproval".into()))
    );
    let plan = DecisionPlan::new(&fixtures::risk_category(), "riskcategory").unwrap();
    let a = Assignment::new().with("creditscore", 700);
    assert_eq!(plan.is_necessary("creditscore", &a), Err(EngineError::AlreadyBound("creditscore".into())));
    assert_eq!(plan.is_necessary("bogus", &Assignment::new()), Err(EngineError::UnknownInput("bogus".into())));
    assert!(matches!(
        plan.decision(&Assignment::new().with("creditscore", 5000)),
        Err(EngineError::InvalidValue { .. })
    ));
}
