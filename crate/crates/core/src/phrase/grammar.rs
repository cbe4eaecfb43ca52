use std::collections::{BTreeSet, HashMap};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::model::Value;

use super::PhraseError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Token {
    Text(String),
    Alias { name: String, optional: bool },
    Slot { name: String, optional: bool },
}

pub type Sentence = Vec<Token>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentRule {
    /// The first `mandatory` templates are always realized.
    pub mandatory: usize,
    pub templates: Vec<Sentence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotValue {
    pub surface: String,
    pub value: Value,
}

/// Chatito-style generation spec: intent templates, aliases and slots.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerationGrammar {
    pub intents: IndexMap<String, IntentRule>,
    pub aliases: IndexMap<String, Vec<Sentence>>,
    pub slots: IndexMap<String, Vec<SlotValue>>,
}

/// Parameter a slot fills: the slot name up to any `#variation` suffix.
pub fn slot_parameter(slot: &str) -> &str {
    slot.split('#').next().unwrap_or(slot)
}

/// Parses the `text ~[alias?] @[slot]` notation. Adjacent words become one
/// text token.
pub fn sentence(notation: &str) -> Sentence {
    let mut out = Vec::new();
    let mut text = String::new();
    let mut rest = notation;
    let flush = |text: &mut String, out: &mut Vec<Token>| {
        let t = text.trim();
        if !t.is_empty() {
            out.push(Token::Text(t.to_owned()));
        }
        text.clear();
    };
    while !rest.is_empty() {
        let reference = (rest.starts_with("~[") || rest.starts_with("@["))
            .then(|| rest.find(']'))
            .flatten();
        match reference {
            Some(close) => {
                flush(&mut text, &mut out);
                let inner = &rest[2..close];
                let (name, optional) = match inner.strip_suffix('?') {
                    Some(n) => (n.to_owned(), true),
                    None => (inner.to_owned(), false),
                };
                out.push(if rest.starts_with('~') {
                    Token::Alias { name, optional }
                } else {
                    Token::Slot { name, optional }
                });
                rest = &rest[close + 1..];
            }
            None => {
                let c = rest.chars().next().expect("non-empty");
                text.push(c);
                rest = &rest[c.len_utf8()..];
            }
        }
    }
    flush(&mut text, &mut out);
    out
}

pub struct Notation<'a>(pub &'a [Token]);

impl fmt::Display for Notation<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match t {
                Token::Text(s) => f.write_str(s)?,
                Token::Alias { name, optional } => write!(f, "~[{name}{}]", if *optional { "?" } else { "" })?,
                Token::Slot { name, optional } => write!(f, "@[{name}{}]", if *optional { "?" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl GenerationGrammar {
    /// Every reference resolves and aliases do not recurse.
    pub fn check(&self) -> Result<(), PhraseError> {
        let all = self
            .intents
            .values()
            .flat_map(|r| r.templates.iter())
            .chain(self.aliases.values().flatten());
        for sentence in all {
            for t in sentence {
                match t {
                    Token::Alias { name, .. } if !self.aliases.contains_key(name) => {
                        return Err(PhraseError::UndefinedAlias(name.clone()))
                    }
                    Token::Slot { name, .. } if !self.slots.contains_key(name) => {
                        return Err(PhraseError::UndefinedSlot(name.clone()))
                    }
                    _ => {}
                }
            }
        }
        for rule in self.intents.values() {
            if rule.mandatory > rule.templates.len() {
                return Err(PhraseError::MandatoryOutOfRange);
            }
        }
        let mut done = BTreeSet::new();
        for name in self.aliases.keys() {
            self.visit(name, &mut Vec::new(), &mut done)?;
        }
        Ok(())
    }

    fn visit<'a>(&'a self, name: &'a str, stack: &mut Vec<&'a str>, done: &mut BTreeSet<&'a str>) -> Result<(), PhraseError> {
        if done.contains(name) {
            return Ok(());
        }
        if stack.contains(&name) {
            return Err(PhraseError::RecursiveAlias(name.to_owned()));
        }
        stack.push(name);
        for alt in &self.aliases[name] {
            for t in alt {
                if let Token::Alias { name: inner, .. } = t {
                    self.visit(inner, stack, done)?;
                }
            }
        }
        stack.pop();
        done.insert(name);
        Ok(())
    }

    /// Aliases that can produce a slot, directly or through other aliases.
    pub fn aliases_with_slots(&self) -> BTreeSet<String> {
        let mut memo: HashMap<&str, bool> = HashMap::new();
        fn has<'a>(g: &'a GenerationGrammar, name: &'a str, memo: &mut HashMap<&'a str, bool>) -> bool {
            if let Some(v) = memo.get(name) {
                return *v;
            }
            memo.insert(name, false);
            let v = g.aliases[name].iter().flatten().any(|t| match t {
                Token::Slot { .. } => true,
                Token::Alias { name, .. } => has(g, name, memo),
                Token::Text(_) => false,
            });
            memo.insert(name, v);
            v
        }
        self.aliases
            .keys()
            .filter(|k| has(self, k, &mut memo))
            .cloned()
            .collect()
    }

    /// Keeps only the aliases and slots reachable from the intent rules.
    pub fn prune(&mut self) {
        let mut aliases = BTreeSet::new();
        let mut slots = BTreeSet::new();
        let mut stack: Vec<&Sentence> = self.intents.values().flat_map(|r| r.templates.iter()).collect();
        while let Some(s) = stack.pop() {
            for t in s {
                match t {
                    Token::Alias { name, .. } => {
                        if aliases.insert(name.clone()) {
                            if let Some(alts) = self.aliases.get(name) {
                                stack.extend(alts.iter());
                            }
                        }
                    }
                    Token::Slot { name, .. } => {
                        slots.insert(name.clone());
                    }
                    Token::Text(_) => {}
                }
            }
        }
        self.aliases.retain(|k, _| aliases.contains(k));
        self.slots.retain(|k, _| slots.contains(k));
    }
}
