//! Deterministic dialogue runtime for compiled agents.

mod matcher;
mod transcript;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{Action, AgentSpec, DecisionEntry, IntentKind, Messages};
use crate::engine::{DecisionPlan, EngineError};
use crate::model::{Assignment, DataType, Value};

pub use matcher::{normalize, Extracted, IntentMatcher, Lexicon};
pub use transcript::{parse_script, render, Speaker, Turn, TurnMeta};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuntimeError {
    #[error("session is closed")]
    Closed,
    #[error("decision `{0}` has no source model")]
    MissingModel(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Greeting,
    Collecting,
    Decided,
    Closed,
}

/// Lifespan of a decision context: until the decision completes.
const UNTIL_DECIDED: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub active_decision: Option<String>,
    /// Active contexts and their remaining lifespans in user turns.
    pub contexts: BTreeMap<String, u32>,
    pub collected: Assignment,
    /// Input asked by the last question, if still unanswered.
    pub pending: Option<String>,
    pub decision: Option<Value>,
    pub status: Status,
    pub transcript: Vec<Turn>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub intent: String,
    pub extracted: Vec<Extracted>,
    /// Fraction of user tokens consumed by the winning template.
    pub coverage: f64,
}

pub struct Runtime {
    agent: AgentSpec,
    plans: Vec<DecisionPlan>,
    matchers: Vec<IntentMatcher>,
    lexicons: Vec<Lexicon>,
}

fn rank(kind: IntentKind) -> u8 {
    match kind {
        IntentKind::Input => 0,
        IntentKind::Decision => 1,
        IntentKind::Support => 2,
    }
}

fn fmt_number(n: f64) -> String {
    Value::Number(n).to_string()
}

impl Runtime {
    pub fn new(agent: AgentSpec) -> Result<Self, RuntimeError> {
        let mut plans = Vec::new();
        let mut lexicons = Vec::new();
        for d in &agent.decisions {
            let model = agent.models.get(&d.name).ok_or_else(|| RuntimeError::MissingModel(d.name.clone()))?;
            let ask: BTreeSet<String> = d.ask.iter().cloned().collect();
            let plan = DecisionPlan::with_ask(model, &d.name, &ask)?;
            let intents: Vec<_> = agent.intents.iter().filter(|i| i.decision.as_deref() == Some(d.name.as_str())).collect();
            let numeric = plan
                .inputs()
                .iter()
                .filter(|c| matches!(c.data_type, DataType::Number { .. }))
                .map(|c| (c.name.clone(), c.data_type.clone()))
                .collect();
            lexicons.push(Lexicon::new(&intents, numeric));
            plans.push(plan);
        }
        let matchers = agent.intents.iter().map(IntentMatcher::new).collect();
        Ok(Runtime {
            agent,
            plans,
            matchers,
            lexicons,
        })
    }

    pub fn agent(&self) -> &AgentSpec {
        &self.agent
    }

    pub fn plan(&self, decision: &str) -> Option<&DecisionPlan> {
        self.position(decision).map(|i| &self.plans[i])
    }

    fn position(&self, decision: &str) -> Option<usize> {
        self.agent.decisions.iter().position(|d| d.name == decision)
    }

    fn decisions_phrase(&self) -> String {
        let labels: Vec<String> = self
            .agent
            .decisions
            .iter()
            .map(|d| format!("the {}", d.label.to_lowercase()))
            .collect();
        labels.join(" or ")
    }

    /// A fresh session whose transcript holds the greeting.
    pub fn start(&self, id: &str) -> Session {
        let mut s = Session {
            id: id.to_owned(),
            active_decision: None,
            contexts: BTreeMap::new(),
            collected: Assignment::new(),
            pending: None,
            decision: None,
            status: Status::Greeting,
            transcript: Vec::new(),
        };
        let greeting = Messages::fill(&self.agent.messages.greeting, &[("decisions", &self.decisions_phrase())]);
        s.transcript.push(Turn::bot(greeting, TurnMeta::default()));
        s
    }

    /// Best admissible intent for `text` given the session state.
    pub fn match_utterance(&self, session: &Session, active: &BTreeSet<String>, text: &str) -> Option<MatchResult> {
        let tokens = normalize(text);
        if tokens.is_empty() {
            return None;
        }
        let collecting = session.status == Status::Collecting;
        let mut best: Option<(usize, usize, matcher::Recognition)> = None;
        for (i, intent) in self.agent.intents.iter().enumerate() {
            if !intent.input_contexts.iter().all(|c| active.contains(c)) {
                continue;
            }
            if intent.kind == IntentKind::Decision && collecting && intent.decision != session.active_decision {
                continue;
            }
            let Some(r) = self.matchers[i].recognize(&tokens) else {
                continue;
            };
            let better = match &best {
                None => true,
                Some((bi, consumed, _)) => {
                    r.consumed > *consumed
                        || (r.consumed == *consumed && rank(intent.kind) < rank(self.agent.intents[*bi].kind))
                }
            };
            if better {
                let c = r.consumed;
                best = Some((i, c, r));
            }
        }
        let (i, consumed, r) = best?;
        let intent = &self.agent.intents[i];
        let mut extracted = r.values;
        if let Some(d) = intent.decision.as_deref().and_then(|d| self.position(d)) {
            let mut known = if session.active_decision == intent.decision {
                session.collected.clone()
            } else {
                Assignment::new()
            };
            for e in &extracted {
                known.bind(e.input.clone(), e.value.clone());
            }
            extracted.extend(self.lexicons[d].leftovers(&tokens, &r.used, &known));
            extracted.sort_by_key(|e| e.start);
        }
        Some(MatchResult {
            intent: intent.name.clone(),
            extracted,
            coverage: consumed as f64 / tokens.len() as f64,
        })
    }

    /// Processes one user utterance and returns the bot replies.
    pub fn step(&self, session: &mut Session, text: &str) -> Result<Vec<String>, RuntimeError> {
        if session.status == Status::Closed {
            return Err(RuntimeError::Closed);
        }
        let first_reply = session.transcript.len() + 1;
        let active: BTreeSet<String> = session.contexts.keys().cloned().collect();
        session.contexts.retain(|_, life| {
            if *life != UNTIL_DECIDED {
                *life -= 1;
            }
            *life > 0
        });
        let m = self.match_utterance(session, &active, text);
        session.transcript.push(Turn::user(text, m.as_ref().map(|m| m.intent.clone())));
        match m {
            None => self.support(session, Action::Fallback, "support_fallback"),
            Some(m) => {
                let intent = self.agent.intent(&m.intent).expect("matched intent exists");
                match intent.kind {
                    IntentKind::Support => self.support(session, intent.action, &intent.name),
                    IntentKind::Decision => {
                        let d = intent.decision.clone().expect("decision intent names its decision");
                        if !(session.status == Status::Collecting && session.active_decision.as_deref() == Some(d.as_str())) {
                            self.begin(session, &d);
                        }
                        self.merge(session, &m.extracted);
                        self.ask_or_decide(session);
                    }
                    IntentKind::Input => {
                        self.merge(session, &m.extracted);
                        self.ask_or_decide(session);
                    }
                }
            }
        }
        Ok(session.transcript[first_reply..].iter().map(|t| t.text.clone()).collect())
    }

    fn entry(&self, decision: &str) -> &DecisionEntry {
        self.agent.decision(decision).expect("known decision")
    }

    fn begin(&self, session: &mut Session, decision: &str) {
        let entry = self.entry(decision);
        session.active_decision = Some(decision.to_owned());
        session.collected = Assignment::new();
        session.pending = None;
        session.decision = None;
        session.contexts.clear();
        session.contexts.insert(entry.context.clone(), UNTIL_DECIDED);
        session.status = Status::Collecting;
    }

    fn merge(&self, session: &mut Session, extracted: &[Extracted]) {
        let Some(d) = session.active_decision.clone() else { return };
        let plan = self.plan(&d).expect("known decision");
        for e in extracted {
            let Some(clause) = plan.input(&e.input) else { continue };
            if session.collected.contains(&e.input) {
                continue;
            }
            if clause.data_type.conforms(&e.value) {
                session.collected.bind(e.input.clone(), e.value.clone());
                continue;
            }
            let label = clause.label.clone();
            let text = match clause.data_type.bounds() {
                Some(b) => Messages::fill(
                    &self.agent.messages.range,
                    &[("label", &label), ("lower", &fmt_number(b.lower)), ("upper", &fmt_number(b.upper))],
                ),
                None => Messages::fill(&self.agent.messages.invalid, &[("label", &label)]),
            };
            session.transcript.push(Turn::bot(text, TurnMeta::default()));
        }
    }

    fn ask(&self, session: &mut Session, input: &str) {
        let d = session.active_decision.clone().expect("asking within a decision");
        let a = self
            .entry(&d)
            .inputs
            .iter()
            .find(|a| a.name == input)
            .expect("askable input");
        let text = Messages::fill(&self.agent.messages.ask, &[("label", &a.label)]);
        session.contexts.insert(a.context.clone(), 1);
        session.pending = Some(input.to_owned());
        let meta = TurnMeta {
            active_decision: Some(d),
            asked: Some(input.to_owned()),
            collected: Some(session.collected.clone()),
            ..TurnMeta::default()
        };
        session.transcript.push(Turn::bot(text, meta));
    }

    fn ask_or_decide(&self, session: &mut Session) {
        let d = session.active_decision.clone().expect("collecting within a decision");
        let plan = self.plan(&d).expect("known decision");
        let next = plan.next_question(&session.collected).map(|q| q.map(|c| c.name.clone()));
        match next {
            Ok(Some(input)) => self.ask(session, &input),
            Ok(None) => match plan.decision(&session.collected) {
                Ok(value) => {
                    let entry = self.entry(&d);
                    let text = Messages::fill(
                        &self.agent.messages.decided,
                        &[("decision", &entry.label), ("value", &value.to_string())],
                    );
                    let meta = TurnMeta {
                        collected: Some(session.collected.clone()),
                        decision: Some(value.clone()),
                        ..TurnMeta::default()
                    };
                    session.transcript.push(Turn::bot(text, meta));
                    session.decision = Some(value);
                    session.status = Status::Decided;
                    session.contexts.clear();
                    session.pending = None;
                }
                Err(e) => self.fail(session, e),
            },
            Err(e) => self.fail(session, e),
        }
    }

    fn fail(&self, session: &mut Session, error: EngineError) {
        let text = Messages::fill(&self.agent.messages.error, &[("error", &error.to_string())]);
        let meta = TurnMeta {
            collected: Some(session.collected.clone()),
            error: Some(error.to_string()),
            ..TurnMeta::default()
        };
        session.transcript.push(Turn::bot(text, meta));
        session.active_decision = None;
        session.collected = Assignment::new();
        session.contexts.clear();
        session.pending = None;
        session.status = Status::Greeting;
    }

    fn support(&self, session: &mut Session, action: Action, name: &str) {
        let response = self
            .agent
            .intent(name)
            .and_then(|i| i.responses.first().cloned())
            .unwrap_or_default();
        if !response.is_empty() {
            session.transcript.push(Turn::bot(response, TurnMeta::default()));
        }
        if action == Action::Goodbye {
            session.status = Status::Closed;
            session.contexts.clear();
            session.pending = None;
            return;
        }
        match session.pending.clone().filter(|_| session.status == Status::Collecting) {
            Some(input) => {
                if action != Action::Greeting {
                    let d = session.active_decision.clone().expect("pending implies a decision");
                    let clause = self.plan(&d).and_then(|p| p.input(&input)).expect("askable input");
                    let text = Messages::fill(&self.agent.messages.expects, &[("expected", &clause.data_type.describe())]);
                    session.transcript.push(Turn::bot(text, TurnMeta::default()));
                }
                // the question is repeated, which also renews its context
                self.ask(session, &input);
            }
            None => {
                let text = Messages::fill(&self.agent.messages.choose, &[("decisions", &self.decisions_phrase())]);
                session.transcript.push(Turn::bot(text, TurnMeta::default()));
            }
        }
    }

    /// Replays a script in a fresh session. Lines after a goodbye are ignored.
    pub fn replay(&self, id: &str, script: &str) -> Session {
        let mut s = self.start(id);
        for line in parse_script(script) {
            if self.step(&mut s, &line).is_err() {
                break;
            }
        }
        s
    }
}
