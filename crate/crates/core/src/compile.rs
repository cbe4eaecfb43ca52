//! End-to-end compilation: decision models in, agent with training phrases out.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::agent::{compose_agents, AgentError, AgentSpec, DecisionSource, Entity, IntentKind};
use crate::engine::DecisionPlan;
use crate::model::{DataType, Value};
use crate::phrase::{
    build_decision_grammar, build_input_grammar, default_surface_rules, expand_intent, InputVocabulary,
    PhraseError, SlotValue, SurfaceRule,
};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_DECISION_BUDGET: usize = 60;
pub const DEFAULT_INPUT_BUDGET: usize = 30;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Phrase(#[from] PhraseError),
}

#[derive(Debug, Clone)]
pub struct CompileOptions {
    pub seed: u64,
    pub decision_budget: usize,
    pub input_budget: usize,
    pub surface_rules: Vec<SurfaceRule>,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            seed: DEFAULT_SEED,
            decision_budget: DEFAULT_DECISION_BUDGET,
            input_budget: DEFAULT_INPUT_BUDGET,
            surface_rules: default_surface_rules(),
        }
    }
}

/// Surfaces of the plain parameter slot for one input.
pub fn slot_values(plan: &DecisionPlan, input: &str, entity: Option<&Entity>) -> Vec<SlotValue> {
    let Some(clause) = plan.input(input) else {
        return Vec::new();
    };
    let mut out: Vec<SlotValue> = Vec::new();
    let mut push = |surface: String, value: &Value| {
        if !out.iter().any(|s| s.surface == surface) {
            out.push(SlotValue {
                surface,
                value: value.clone(),
            });
        }
    };
    match &clause.data_type {
        DataType::Number { .. } => {
            for v in plan.representatives(input).unwrap_or_default() {
                push(v.to_string(), v);
            }
        }
        _ => {
            for e in entity.map(|e| e.entries.as_slice()).unwrap_or_default() {
                if !matches!(e.reference, Value::Bool(_)) {
                    push(e.reference.to_string().to_lowercase(), &e.reference);
                }
                for s in &e.synonyms {
                    push(s.to_lowercase(), &e.reference);
                }
            }
        }
    }
    out
}

/// Composes the sources into one agent and generates grammars and
/// training phrases for every decision and input intent.
pub fn compile(sources: &[DecisionSource], options: &CompileOptions) -> Result<AgentSpec, CompileError> {
    let mut agent = compose_agents(sources)?;
    agent.metadata.seed = options.seed;
    agent.metadata.decision_budget = options.decision_budget;
    agent.metadata.input_budget = options.input_budget;

    let mut vocab: BTreeMap<String, Vec<InputVocabulary>> = BTreeMap::new();
    let mut names: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (source, entry) in sources.iter().zip(&agent.decisions) {
        let plan = source.plan()?;
        let list = entry
            .inputs
            .iter()
            .map(|a| InputVocabulary {
                input: plan.input(&a.name).expect("askable input").clone(),
                parameter: a.parameter.clone(),
                style: a.style,
                values: slot_values(&plan, &a.name, agent.entity(&a.entity)),
            })
            .collect();
        vocab.insert(entry.name.clone(), list);
        names.insert(entry.name.clone(), vec![plan.output().name.clone(), entry.label.clone()]);
    }

    for intent in &mut agent.intents {
        let Some(decision) = intent.decision.clone() else {
            continue;
        };
        let inputs = &vocab[&decision];
        let (grammar, budget) = match intent.kind {
            IntentKind::Decision => (
                build_decision_grammar(&intent.name, &names[&decision], inputs, &options.surface_rules),
                options.decision_budget,
            ),
            IntentKind::Input => {
                let asked = intent.input.as_deref().expect("input intent names its input");
                (
                    build_input_grammar(&intent.name, asked, inputs, &options.surface_rules),
                    options.input_budget,
                )
            }
            IntentKind::Support => continue,
        };
        intent.training_phrases = expand_intent(&grammar, &intent.name, options.seed, budget)?;
        intent.grammar = grammar;
    }
    Ok(agent)
}
