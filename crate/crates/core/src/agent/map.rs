use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::engine::DecisionPlan;
use crate::io::write_model_json;
use crate::model::{DataType, DecisionModel, Value};
use crate::phrase::{article, sentence, AnnotatedPhrase, GenerationGrammar, IntentRule, ParamStyle};

use super::{
    Action, AgentError, AgentSpec, AskableInput, DecisionEntry, Entity, EntityEntry, Intent,
    IntentKind, Messages, Metadata, Parameter,
};

pub const NUMBER_ENTITY: &str = "@sys.number";

/// Synonym overrides: input name, then value label, then synonyms.
pub type Synonyms = BTreeMap<String, BTreeMap<String, Vec<String>>>;

#[derive(Deserialize)]
struct Catalog {
    intents: Vec<CatalogIntent>,
    messages: Messages,
}

#[derive(Deserialize)]
struct CatalogIntent {
    name: String,
    action: Action,
    phrases: Vec<String>,
    responses: Vec<String>,
}

fn load_catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| serde_json::from_str(include_str!("catalog.json")).expect("embedded catalog is valid"))
}

/// The model-independent support intents and default messages.
pub fn catalog() -> (Vec<Intent>, Messages) {
    let c = load_catalog();
    let intents = c
        .intents
        .iter()
        .map(|ci| {
            let mut grammar = GenerationGrammar::default();
            grammar.intents.insert(
                ci.name.clone(),
                IntentRule {
                    mandatory: ci.phrases.len(),
                    templates: ci.phrases.iter().map(|p| sentence(p)).collect(),
                },
            );
            Intent {
                name: ci.name.clone(),
                kind: IntentKind::Support,
                decision: None,
                input: None,
                input_contexts: Vec::new(),
                output_contexts: Vec::new(),
                parameters: Vec::new(),
                action: ci.action,
                responses: ci.responses.clone(),
                grammar,
                training_phrases: ci
                    .phrases
                    .iter()
                    .map(|p| AnnotatedPhrase {
                        text: p.clone(),
                        spans: Vec::new(),
                    })
                    .collect(),
            }
        })
        .collect();
    (intents, c.messages.clone())
}

/// Default synonyms of a boolean input, derived from its label.
pub fn boolean_synonyms(label: &str) -> (Vec<String>, Vec<String>) {
    let l = label.to_lowercase();
    let a = article(&l);
    (
        vec![
            "yes".to_owned(),
            "ok".to_owned(),
            "correct".to_owned(),
            l.clone(),
            format!("{a} {l}"),
            format!("with {a} {l}"),
            format!("with {l}"),
        ],
        vec![
            "no".to_owned(),
            format!("non {l}"),
            format!("not {a} {l}"),
            format!("without {a} {l}"),
            format!("without {l}"),
        ],
    )
}

/// One entity per non-numeric askable input.
pub fn map_entities(plan: &DecisionPlan, prefix: &str, overrides: &Synonyms) -> Vec<Entity> {
    let mut out = Vec::new();
    for clause in plan.inputs() {
        let mut entries = match &clause.data_type {
            DataType::Number { .. } => continue,
            DataType::Boolean => {
                let (t, f) = boolean_synonyms(&clause.label);
                vec![
                    EntityEntry {
                        reference: Value::Bool(true),
                        synonyms: t,
                    },
                    EntityEntry {
                        reference: Value::Bool(false),
                        synonyms: f,
                    },
                ]
            }
            DataType::Enumeration { values } => values
                .iter()
                .map(|v| EntityEntry {
                    reference: Value::Text(v.clone()),
                    synonyms: Vec::new(),
                })
                .collect(),
            DataType::Text => {
                let reps = plan.representatives(&clause.name).unwrap_or_default();
                // the last representative is the "anything else" sentinel
                reps[..reps.len().saturating_sub(1)]
                    .iter()
                    .map(|v| EntityEntry {
                        reference: v.clone(),
                        synonyms: Vec::new(),
                    })
                    .collect()
            }
        };
        if let Some(over) = overrides.get(&clause.name) {
            for e in &mut entries {
                let label = e.reference.to_string();
                if let Some((_, syn)) = over.iter().find(|(k, _)| k.eq_ignore_ascii_case(&label)) {
                    e.synonyms = syn.clone();
                }
            }
        }
        out.push(Entity {
            name: format!("{prefix}ent_{}", clause.name),
            input: clause.name.clone(),
            entries,
        });
    }
    out
}

fn parameters(plan: &DecisionPlan, prefix: &str, required: Option<&str>) -> Vec<Parameter> {
    plan.inputs()
        .iter()
        .map(|c| Parameter {
            name: format!("p_{}", c.name),
            input: c.name.clone(),
            entity: match c.data_type {
                DataType::Number { .. } => NUMBER_ENTITY.to_owned(),
                _ => format!("{prefix}ent_{}", c.name),
            },
            required: required == Some(c.name.as_str()),
        })
        .collect()
}

fn context(plan: &DecisionPlan) -> String {
    format!("{}_ctx", plan.root())
}

/// The decision intent and one input intent per askable input. Grammars
/// and phrases are left empty.
pub fn map_intents(plan: &DecisionPlan, prefix: &str) -> Vec<Intent> {
    let ctx = context(plan);
    let mut out = vec![Intent {
        name: format!("{}_intent", plan.root()),
        kind: IntentKind::Decision,
        decision: Some(plan.root().to_owned()),
        input: None,
        input_contexts: Vec::new(),
        output_contexts: vec![ctx.clone()],
        parameters: parameters(plan, prefix, None),
        action: Action::Collect,
        responses: Vec::new(),
        grammar: GenerationGrammar::default(),
        training_phrases: Vec::new(),
    }];
    for c in plan.inputs() {
        out.push(Intent {
            name: format!("{prefix}{}_intent", c.name),
            kind: IntentKind::Input,
            decision: Some(plan.root().to_owned()),
            input: Some(c.name.clone()),
            input_contexts: vec![format!("{prefix}awaiting_{}", c.name), ctx.clone()],
            output_contexts: vec![ctx.clone()],
            parameters: parameters(plan, prefix, Some(&c.name)),
            action: Action::Collect,
            responses: Vec::new(),
            grammar: GenerationGrammar::default(),
            training_phrases: Vec::new(),
        });
    }
    out
}

/// A decision to include in an agent.
#[derive(Debug, Clone)]
pub struct DecisionSource {
    pub model: DecisionModel,
    pub root: String,
    /// Derivable inputs that are asked instead of derived.
    pub ask: BTreeSet<String>,
    pub styles: BTreeMap<String, ParamStyle>,
    pub synonyms: Synonyms,
}

impl DecisionSource {
    pub fn new(model: DecisionModel, root: &str) -> Self {
        DecisionSource {
            model,
            root: crate::model::slug(root),
            ask: BTreeSet::new(),
            styles: BTreeMap::new(),
            synonyms: Synonyms::new(),
        }
    }

    pub fn plan(&self) -> Result<DecisionPlan, AgentError> {
        Ok(DecisionPlan::with_ask(&self.model, &self.root, &self.ask)?)
    }
}

/// Merges decisions into one agent. With several decisions every generated
/// name that does not already start with the decision slug gets a
/// `<decision>_` prefix.
pub fn compose_agents(sources: &[DecisionSource]) -> Result<AgentSpec, AgentError> {
    if sources.is_empty() {
        return Err(AgentError::NoDecisions);
    }
    let mut seen = BTreeSet::new();
    for s in sources {
        if !seen.insert(s.root.clone()) {
            return Err(AgentError::DuplicateDecisionName(s.root.clone()));
        }
    }
    let multi = sources.len() > 1;
    let mut decisions = Vec::new();
    let mut entities = Vec::new();
    let mut intents = Vec::new();
    let mut digest = Sha256::new();
    let mut models = BTreeMap::new();
    for s in sources {
        let plan = s.plan()?;
        let prefix = if multi { format!("{}_", s.root) } else { String::new() };
        let ents = map_entities(&plan, &prefix, &s.synonyms);
        let ints = map_intents(&plan, &prefix);
        let inputs = plan
            .inputs()
            .iter()
            .map(|c| AskableInput {
                name: c.name.clone(),
                label: c.label.clone(),
                parameter: format!("p_{}", c.name),
                entity: match c.data_type {
                    DataType::Number { .. } => NUMBER_ENTITY.to_owned(),
                    _ => format!("{prefix}ent_{}", c.name),
                },
                intent: format!("{prefix}{}_intent", c.name),
                context: format!("{prefix}awaiting_{}", c.name),
                style: s.styles.get(&c.name).copied().unwrap_or_default(),
            })
            .collect();
        decisions.push(DecisionEntry {
            name: s.root.clone(),
            prefix,
            label: plan.root_table().label().to_owned(),
            intent: ints[0].name.clone(),
            context: context(&plan),
            inputs,
            ask: s.ask.iter().cloned().collect(),
        });
        digest.update(write_model_json(&s.model));
        models.insert(s.root.clone(), s.model.clone());
        entities.extend(ents);
        intents.extend(ints);
    }
    let (support, messages) = catalog();
    intents.extend(support);
    let mut names = BTreeSet::new();
    for n in intents.iter().map(|i| &i.name).chain(entities.iter().map(|e| &e.name)) {
        if !names.insert(n.clone()) {
            return Err(AgentError::NameClash(n.clone()));
        }
    }
    Ok(AgentSpec {
        metadata: Metadata {
            version: env!("CARGO_PKG_VERSION").to_owned(),
            seed: 0,
            decision_budget: 0,
            input_budget: 0,
            source_digest: hex::encode(digest.finalize()),
        },
        decisions,
        entities,
        intents,
        messages,
        models,
    })
}

