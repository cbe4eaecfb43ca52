use std::collections::{BTreeSet, HashMap};

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::Value;

use super::grammar::{slot_parameter, GenerationGrammar, IntentRule, Sentence, Token};
use super::PhraseError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Span {
    /// Byte offsets into the phrase text.
    pub start: usize,
    pub end: usize,
    pub parameter: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedPhrase {
    pub text: String,
    pub spans: Vec<Span>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode {
    /// Optional aliases only when they can produce a slot; first alternatives.
    Canonical,
    Random,
}

struct Piece {
    text: String,
    slot: Option<(String, usize)>,
}

struct Realizer<'g> {
    grammar: &'g GenerationGrammar,
    with_slots: BTreeSet<String>,
    rng: ChaCha8Rng,
    cursors: HashMap<String, (Vec<usize>, usize)>,
    contains: HashMap<(String, String), bool>,
}

fn name_hash(name: &str) -> u64 {
    // FNV-1a, stable across platforms and releases.
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x1000_0000_01b3))
}

impl<'g> Realizer<'g> {
    fn new(grammar: &'g GenerationGrammar, seed: u64, intent: &str) -> Self {
        Realizer {
            grammar,
            with_slots: grammar.aliases_with_slots(),
            rng: ChaCha8Rng::seed_from_u64(seed ^ name_hash(intent)),
            cursors: HashMap::new(),
            contains: HashMap::new(),
        }
    }

    fn sentence_has(&mut self, s: &Sentence, slot: &str) -> bool {
        s.iter().any(|t| match t {
            Token::Slot { name, .. } => name == slot,
            Token::Alias { name, .. } => self.alias_has(name, slot),
            Token::Text(_) => false,
        })
    }

    fn alias_has(&mut self, alias: &str, slot: &str) -> bool {
        let key = (alias.to_owned(), slot.to_owned());
        if let Some(v) = self.contains.get(&key) {
            return *v;
        }
        self.contains.insert(key.clone(), false);
        let alts = &self.grammar.aliases[alias];
        let v = alts.iter().any(|alt| self.sentence_has(alt, slot));
        self.contains.insert(key, v);
        v
    }

    fn next_value(&mut self, slot: &str) -> usize {
        let len = self.grammar.slots[slot].len();
        if !self.cursors.contains_key(slot) {
            let mut order: Vec<usize> = (0..len).collect();
            order.shuffle(&mut self.rng);
            self.cursors.insert(slot.to_owned(), (order, 0));
        }
        let (order, pos) = self.cursors.get_mut(slot).expect("cursor exists");
        let v = order[*pos % len];
        *pos += 1;
        v
    }

    fn realize(&mut self, s: &Sentence, mode: Mode, force: &mut Option<(String, usize)>, out: &mut Vec<Piece>) {
        for t in s {
            match t {
                Token::Text(text) => out.push(Piece {
                    text: text.clone(),
                    slot: None,
                }),
                Token::Slot { name, optional } => {
                    if *optional && mode == Mode::Random && self.rng.random_bool(0.5) {
                        continue;
                    }
                    let idx = match force {
                        Some((f, i)) if f == name => {
                            let i = *i;
                            *force = None;
                            i
                        }
                        _ => self.next_value(name),
                    };
                    out.push(Piece {
                        text: self.grammar.slots[name][idx].surface.clone(),
                        slot: Some((name.clone(), idx)),
                    });
                }
                Token::Alias { name, optional } => {
                    let alts = &self.grammar.aliases[name];
                    if alts.is_empty() {
                        continue;
                    }
                    let pick = match mode {
                        Mode::Canonical => {
                            let wanted = force.as_ref().map(|(f, _)| f.clone());
                            let forced_alt = wanted.and_then(|f| {
                                alts.iter().position(|alt| self.sentence_has(alt, &f))
                            });
                            if *optional && forced_alt.is_none() && !self.with_slots.contains(name) {
                                continue;
                            }
                            forced_alt.unwrap_or(0)
                        }
                        Mode::Random => {
                            if *optional && self.rng.random_bool(0.5) {
                                continue;
                            }
                            self.rng.random_range(0..alts.len())
                        }
                    };
                    let alt = alts[pick].clone();
                    self.realize(&alt, mode, force, out);
                }
            }
        }
    }

    fn phrase(&mut self, s: &Sentence, mode: Mode, force: Option<(String, usize)>) -> (AnnotatedPhrase, Vec<(String, usize)>, bool) {
        let mut pieces = Vec::new();
        let mut force = force;
        let had_force = force.is_some();
        self.realize(s, mode, &mut force, &mut pieces);
        let forced_used = had_force && force.is_none();
        let mut text = String::new();
        let mut spans = Vec::new();
        let mut used = Vec::new();
        for p in pieces {
            if p.text.is_empty() {
                continue;
            }
            if !text.is_empty() && !p.text.starts_with(',') {
                text.push(' ');
            }
            let start = text.len();
            text.push_str(&p.text);
            if let Some((slot, idx)) = p.slot {
                let value = self.grammar.slots[&slot][idx].value.clone();
                spans.push(Span {
                    start,
                    end: text.len(),
                    parameter: slot_parameter(&slot).to_owned(),
                    value,
                });
                used.push((slot, idx));
            }
        }
        (AnnotatedPhrase { text, spans }, used, forced_used)
    }
}

struct Corpus {
    phrases: Vec<AnnotatedPhrase>,
    texts: BTreeSet<String>,
    used: BTreeSet<(String, usize)>,
    budget: usize,
}

impl Corpus {
    fn full(&self) -> bool {
        self.phrases.len() >= self.budget
    }

    fn push(&mut self, phrase: AnnotatedPhrase, used: Vec<(String, usize)>) -> bool {
        if self.full() || !self.texts.insert(phrase.text.clone()) {
            return false;
        }
        self.used.extend(used);
        self.phrases.push(phrase);
        true
    }
}

/// Expands one intent rule into at most `budget` distinct phrases.
///
/// Mandatory templates come first, then phrases that give every slot value
/// at least one appearance, then a seeded sample of the other templates and
/// finally random variants.
pub fn expand_intent(grammar: &GenerationGrammar, intent: &str, seed: u64, budget: usize) -> Result<Vec<AnnotatedPhrase>, PhraseError> {
    grammar.check()?;
    let rule: &IntentRule = grammar
        .intents
        .get(intent)
        .ok_or_else(|| PhraseError::UnknownIntent(intent.to_owned()))?;
    if budget < rule.mandatory {
        return Err(PhraseError::BudgetTooSmall {
            intent: intent.to_owned(),
            budget,
            mandatory: rule.mandatory,
        });
    }
    let mut r = Realizer::new(grammar, seed, intent);
    let mut corpus = Corpus {
        phrases: Vec::new(),
        texts: BTreeSet::new(),
        used: BTreeSet::new(),
        budget,
    };
    for t in &rule.templates[..rule.mandatory] {
        let (p, used, _) = r.phrase(t, Mode::Canonical, None);
        corpus.push(p, used);
    }

    'slots: for (slot, values) in &grammar.slots {
        for idx in 0..values.len() {
            if corpus.full() {
                break 'slots;
            }
            if corpus.used.contains(&(slot.clone(), idx)) {
                continue;
            }
            for t in &rule.templates {
                let (p, used, forced) = r.phrase(t, Mode::Canonical, Some((slot.clone(), idx)));
                if forced && corpus.push(p, used) {
                    break;
                }
            }
        }
    }

    let mut others: Vec<usize> = (rule.mandatory..rule.templates.len()).collect();
    others.shuffle(&mut r.rng);
    for i in others {
        if corpus.full() {
            break;
        }
        let (p, used, _) = r.phrase(&rule.templates[i], Mode::Canonical, None);
        corpus.push(p, used);
    }

    let mut attempts = 0;
    while !corpus.full() && attempts < budget * 20 && !rule.templates.is_empty() {
        attempts += 1;
        let i = r.rng.random_range(0..rule.templates.len());
        let (p, used, _) = r.phrase(&rule.templates[i], Mode::Random, None);
        corpus.push(p, used);
    }
    Ok(corpus.phrases)
}

/// Expands every intent rule of the grammar.
pub fn expand(grammar: &GenerationGrammar, seed: u64, budget: usize) -> Result<IndexMap<String, Vec<AnnotatedPhrase>>, PhraseError> {
    grammar
        .intents
        .keys()
        .map(|name| Ok((name.clone(), expand_intent(grammar, name, seed, budget)?)))
        .collect()
}
