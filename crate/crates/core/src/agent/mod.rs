//! Compiled chatbot agents: entities, intents, contexts and parameters.

mod map;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{DecisionModel, Value};
use crate::phrase::{AnnotatedPhrase, GenerationGrammar, ParamStyle};

pub use map::{
    boolean_synonyms, catalog, compose_agents, map_entities, map_intents, DecisionSource, Synonyms,
    NUMBER_ENTITY,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AgentError {
    #[error("generated name `{0}` is used twice")]
    NameClash(String),
    #[error("decision `{0}` is included twice")]
    DuplicateDecisionName(String),
    #[error("an agent needs at least one decision")]
    NoDecisions,
    #[error(transparent)]
    Engine(#[from] crate::engine::EngineError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityEntry {
    pub reference: Value,
    pub synonyms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub name: String,
    /// Input slug the entity was generated for.
    pub input: String,
    pub entries: Vec<EntityEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    pub input: String,
    /// Entity name, or the built-in `@sys.number`.
    pub entity: String,
    pub required: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntentKind {
    Decision,
    Input,
    Support,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    /// Merge parameters and run the question loop.
    Collect,
    Fallback,
    Greeting,
    Goodbye,
    Help,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Intent {
    pub name: String,
    pub kind: IntentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    pub input_contexts: Vec<String>,
    pub output_contexts: Vec<String>,
    pub parameters: Vec<Parameter>,
    pub action: Action,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub responses: Vec<String>,
    pub grammar: GenerationGrammar,
    pub training_phrases: Vec<AnnotatedPhrase>,
}

impl Intent {
    pub fn required(&self) -> Option<&Parameter> {
        self.parameters.iter().find(|p| p.required)
    }

    pub fn parameter_for(&self, input: &str) -> Option<&Parameter> {
        self.parameters.iter().find(|p| p.input == input)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AskableInput {
    pub name: String,
    pub label: String,
    pub parameter: String,
    pub entity: String,
    pub intent: String,
    pub context: String,
    pub style: ParamStyle,
}

/// One decision served by the agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionEntry {
    /// Slug of the root table.
    pub name: String,
    /// Prefix applied to generated names; empty for single-decision agents.
    pub prefix: String,
    /// Decision label, used in greetings and answers.
    pub label: String,
    pub intent: String,
    pub context: String,
    pub inputs: Vec<AskableInput>,
    /// Derivable inputs that are asked instead.
    pub ask: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Messages {
    pub greeting: String,
    pub ask: String,
    pub range: String,
    pub invalid: String,
    pub decided: String,
    pub choose: String,
    pub expects: String,
    pub error: String,
    pub closed: String,
}

impl Messages {
    /// Substitutes `{key}` placeholders.
    pub fn fill(template: &str, vars: &[(&str, &str)]) -> String {
        let mut out = template.to_owned();
        for (k, v) in vars {
            out = out.replace(&format!("{{{k}}}"), v);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub seed: u64,
    pub decision_budget: usize,
    pub input_budget: usize,
    /// SHA-256 over the canonical JSON of every source model.
    pub source_digest: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentSpec {
    pub metadata: Metadata,
    pub decisions: Vec<DecisionEntry>,
    pub entities: Vec<Entity>,
    pub intents: Vec<Intent>,
    pub messages: Messages,
    /// Source model of each decision, keyed by decision name.
    pub models: BTreeMap<String, DecisionModel>,
}

impl AgentSpec {
    pub fn intent(&self, name: &str) -> Option<&Intent> {
        self.intents.iter().find(|i| i.name == name)
    }

    pub fn entity(&self, name: &str) -> Option<&Entity> {
        self.entities.iter().find(|e| e.name == name)
    }

    pub fn decision(&self, name: &str) -> Option<&DecisionEntry> {
        self.decisions.iter().find(|d| d.name == name)
    }

    /// Checks name uniqueness and that every reference resolves.
    pub fn check(&self) -> Result<(), String> {
        let mut seen = std::collections::BTreeSet::new();
        for i in &self.intents {
            if !seen.insert(&i.name) {
                return Err(format!("intent `{}` is defined twice", i.name));
            }
        }
        let mut produced: std::collections::BTreeSet<&str> = std::collections::BTreeSet::new();
        for i in &self.intents {
            produced.extend(i.output_contexts.iter().map(String::as_str));
        }
        for d in &self.decisions {
            if self.intent(&d.intent).is_none() {
                return Err(format!("decision `{}` refers to missing intent `{}`", d.name, d.intent));
            }
            for a in &d.inputs {
                // awaiting contexts are raised by the runtime when it asks
                produced.insert(&a.context);
                if self.intent(&a.intent).is_none() {
                    return Err(format!("input `{}` refers to missing intent `{}`", a.name, a.intent));
                }
            }
        }
        for i in &self.intents {
            for p in &i.parameters {
                if p.entity != NUMBER_ENTITY && self.entity(&p.entity).is_none() {
                    return Err(format!("parameter `{}` of `{}` refers to missing entity `{}`", p.name, i.name, p.entity));
                }
            }
            for c in &i.input_contexts {
                if !produced.contains(c.as_str()) {
                    return Err(format!("context `{c}` of `{}` is never produced", i.name));
                }
            }
        }
        Ok(())
    }
}
