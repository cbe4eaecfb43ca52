//! Bundled example models and golden conversation scripts.

use crate::io::{parse_dmn_xml, parse_model_json};
use crate::agent::DecisionSource;
use crate::model::DecisionModel;
use crate::phrase::ParamStyle;

pub const RISK_CATEGORY_JSON: &str = include_str!("../fixtures/risk_category.json");
pub const RISK_CATEGORY_DMN: &str = include_str!("../fixtures/risk_category.dmn");
pub const RISK_CATEGORY_FULL_JSON: &str = include_str!("../fixtures/risk_category_full.json");
pub const JOB_SUITABILITY_JSON: &str = include_str!("../fixtures/job_suitability.json");
pub const JOB_SUITABILITY_HIERARCHY_JSON: &str = include_str!("../fixtures/job_suitability_hierarchy.json");
pub const JOB_SUITABILITY_HIERARCHY_DMN: &str = include_str!("../fixtures/job_suitability_hierarchy.dmn");
pub const OVERLAPPING_JSON: &str = include_str!("../fixtures/overlapping.json");
pub const COVERAGE_GAP_JSON: &str = include_str!("../fixtures/coverage_gap.json");
pub const FIRST_HIT_POLICY_DMN: &str = include_str!("../fixtures/first_hit_policy.dmn");
pub const INSURANCE_PREMIUM_JSON: &str = include_str!("../fixtures/insurance_premium.json");
pub const GYM_PLAN_JSON: &str = include_str!("../fixtures/gym_plan.json");
pub const MEMBERSHIP_OFFER_JSON: &str = include_str!("../fixtures/membership_offer.json");

fn json(doc: &str) -> DecisionModel {
    parse_model_json(doc.as_bytes()).expect("bundled fixture parses")
}

/// Eight-rule risk table with wildcards on Credit Score in rules 1 and 8.
pub fn risk_category() -> DecisionModel {
    json(RISK_CATEGORY_JSON)
}

/// The same decision with every cell filled in (twelve rules).
pub fn risk_category_full() -> DecisionModel {
    json(RISK_CATEGORY_FULL_JSON)
}

/// Job suitability with Risk Category asked directly.
pub fn job_suitability() -> DecisionModel {
    json(JOB_SUITABILITY_JSON)
}

/// Job suitability with Risk Category computed by the risk table.
pub fn job_suitability_hierarchy() -> DecisionModel {
    json(JOB_SUITABILITY_HIERARCHY_JSON)
}

pub fn overlapping() -> DecisionModel {
    json(OVERLAPPING_JSON)
}

pub fn coverage_gap() -> DecisionModel {
    json(COVERAGE_GAP_JSON)
}

pub fn insurance_premium() -> DecisionModel {
    json(INSURANCE_PREMIUM_JSON)
}

pub fn gym_plan() -> DecisionModel {
    json(GYM_PLAN_JSON)
}

/// Two-level hierarchy where Age is read by both tables.
pub fn membership_offer() -> DecisionModel {
    json(MEMBERSHIP_OFFER_JSON)
}

pub fn risk_category_dmn() -> DecisionModel {
    parse_dmn_xml(RISK_CATEGORY_DMN.as_bytes()).expect("bundled fixture parses")
}

pub fn job_suitability_hierarchy_dmn() -> DecisionModel {
    parse_dmn_xml(JOB_SUITABILITY_HIERARCHY_DMN.as_bytes()).expect("bundled fixture parses")
}

/// Agent configurations the golden scripts run against.
pub const AGENTS: [&str; 7] = [
    "risk_category",
    "risk_category_full",
    "job_suitability",
    "job_suitability_ask",
    "membership_offer",
    "coverage_gap",
    "premium_and_plan",
];

/// Decision sources of a named agent configuration.
pub fn agent_sources(name: &str) -> Option<Vec<DecisionSource>> {
    let of = |mut s: DecisionSource, input: &str| {
        s.styles.insert(input.to_owned(), ParamStyle::Of);
        s
    };
    Some(match name {
        "risk_category" => vec![of(DecisionSource::new(risk_category(), "riskcategory"), "existingcustomer")],
        "risk_category_full" => vec![of(DecisionSource::new(risk_category_full(), "riskcategory"), "existingcustomer")],
        "job_suitability" => vec![DecisionSource::new(job_suitability_hierarchy(), "jobsuitability")],
        "job_suitability_ask" => {
            let mut s = DecisionSource::new(job_suitability_hierarchy(), "jobsuitability");
            s.ask.insert("riskcategory".to_owned());
            vec![s]
        }
        "membership_offer" => vec![DecisionSource::new(membership_offer(), "membershipoffer")],
        "coverage_gap" => vec![DecisionSource::new(coverage_gap(), "loanapproval")],
        "premium_and_plan" => vec![
            DecisionSource::new(insurance_premium(), "insurancepremium"),
            DecisionSource::new(gym_plan(), "gymplan"),
        ],
        _ => return None,
    })
}

/// Agent named in a script's `# agent: <name>` header line.
pub fn script_agent(script: &str) -> Option<&str> {
    script
        .lines()
        .find_map(|l| l.trim().strip_prefix("# agent:"))
        .map(str::trim)
}
