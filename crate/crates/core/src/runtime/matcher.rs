//! Grammar-backed intent recognition over normalized tokens.

use std::collections::{BTreeSet, HashMap};

use crate::agent::{Intent, NUMBER_ENTITY};
use crate::io::parse_decimal;
use crate::model::{Assignment, DataType, Value};
use crate::phrase::{slot_parameter, Sentence, Token};

/// Lowercases, strips punctuation and splits on whitespace. Signed and
/// decimal numbers survive as single tokens.
pub fn normalize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let cleaned: String = lowered
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '.' || c == '-' { c } else { ' ' })
        .collect();
    let mut out = Vec::new();
    for piece in cleaned.split_whitespace() {
        let trimmed = piece.trim_end_matches('.');
        if parse_decimal(trimmed).is_some() {
            out.push(trimmed.to_owned());
        } else {
            out.extend(piece.split(['.', '-']).filter(|w| !w.is_empty()).map(str::to_owned));
        }
    }
    out
}

pub fn as_number(token: &str) -> Option<f64> {
    parse_decimal(token)
}

/// A value read off the utterance, with its token range.
#[derive(Debug, Clone, PartialEq)]
pub struct Extracted {
    pub input: String,
    pub value: Value,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Default)]
struct Path {
    score: usize,
    used: Vec<usize>,
    values: Vec<Extracted>,
}

impl Path {
    fn join(&self, other: &Path) -> Path {
        let mut p = self.clone();
        p.score += other.score;
        p.used.extend_from_slice(&other.used);
        p.values.extend(other.values.iter().cloned());
        p
    }
}

type Frontier = Vec<Option<Path>>;

fn offer(slot: &mut Option<Path>, candidate: Path) {
    if slot.as_ref().is_none_or(|p| candidate.score > p.score) {
        *slot = Some(candidate);
    }
}

fn skip_closure(f: &mut Frontier) {
    for j in 1..f.len() {
        if let Some(prev) = f[j - 1].clone() {
            offer(&mut f[j], prev);
        }
    }
}

#[derive(Debug, Clone)]
enum Sym {
    Word(String),
    Alias(usize, bool),
    Slot(usize, bool),
}

#[derive(Debug, Clone)]
struct SlotMatcher {
    input: String,
    numeric: bool,
    surfaces: Vec<(Vec<String>, Value)>,
}

/// One intent's grammar, compiled for recognition.
#[derive(Debug, Clone)]
pub struct IntentMatcher {
    templates: Vec<Vec<Sym>>,
    aliases: Vec<Vec<Vec<Sym>>>,
    slots: Vec<SlotMatcher>,
}

pub struct Recognition {
    pub consumed: usize,
    pub values: Vec<Extracted>,
    pub used: BTreeSet<usize>,
}

impl IntentMatcher {
    pub fn new(intent: &Intent) -> Self {
        let g = &intent.grammar;
        let alias_index: HashMap<&str, usize> = g.aliases.keys().enumerate().map(|(i, k)| (k.as_str(), i)).collect();
        let slot_index: HashMap<&str, usize> = g.slots.keys().enumerate().map(|(i, k)| (k.as_str(), i)).collect();
        let compile = |s: &Sentence| -> Vec<Sym> {
            let mut out = Vec::new();
            for t in s {
                match t {
                    Token::Text(text) => out.extend(normalize(text).into_iter().map(Sym::Word)),
                    Token::Alias { name, optional } => {
                        if let Some(&i) = alias_index.get(name.as_str()) {
                            out.push(Sym::Alias(i, *optional));
                        }
                    }
                    Token::Slot { name, optional } => {
                        if let Some(&i) = slot_index.get(name.as_str()) {
                            out.push(Sym::Slot(i, *optional));
                        }
                    }
                }
            }
            out
        };
        let templates = g.intents.values().flat_map(|r| r.templates.iter().map(compile)).collect();
        let aliases = g.aliases.values().map(|alts| alts.iter().map(compile).collect()).collect();
        let slots = g
            .slots
            .iter()
            .map(|(name, values)| {
                let p = intent.parameters.iter().find(|p| p.name == slot_parameter(name));
                SlotMatcher {
                    input: p.map(|p| p.input.clone()).unwrap_or_default(),
                    numeric: p.is_some_and(|p| p.entity == NUMBER_ENTITY),
                    surfaces: values.iter().map(|v| (normalize(&v.surface), v.value.clone())).collect(),
                }
            })
            .collect();
        IntentMatcher {
            templates,
            aliases,
            slots,
        }
    }

    /// Best parse of `tokens`: the most template-consuming path.
    pub fn recognize(&self, tokens: &[String]) -> Option<Recognition> {
        let mut run = Run {
            m: self,
            tokens,
            memo: HashMap::new(),
        };
        let n = tokens.len();
        let mut best: Option<Path> = None;
        for t in &self.templates {
            let mut start: Frontier = vec![None; n + 1];
            start[0] = Some(Path::default());
            let end = run.sequence(t, start);
            if let Some(p) = end[n].clone() {
                if best.as_ref().is_none_or(|b| p.score > b.score) {
                    best = Some(p);
                }
            }
        }
        best.filter(|p| p.score > 0).map(|p| Recognition {
            consumed: p.score,
            values: p.values,
            used: p.used.into_iter().collect(),
        })
    }
}

struct Run<'a> {
    m: &'a IntentMatcher,
    tokens: &'a [String],
    memo: HashMap<(usize, usize), Frontier>,
}

impl Run<'_> {
    fn sequence(&mut self, syms: &[Sym], mut cur: Frontier) -> Frontier {
        skip_closure(&mut cur);
        for s in syms {
            cur = self.symbol(s, &cur);
            skip_closure(&mut cur);
        }
        cur
    }

    fn symbol(&mut self, sym: &Sym, cur: &Frontier) -> Frontier {
        let n = self.tokens.len();
        let mut next: Frontier = vec![None; n + 1];
        match sym {
            Sym::Word(w) => {
                for j in 0..n {
                    if let Some(p) = &cur[j] {
                        if &self.tokens[j] == w {
                            let mut q = p.clone();
                            q.score += 1;
                            q.used.push(j);
                            offer(&mut next[j + 1], q);
                        }
                    }
                }
            }
            Sym::Slot(i, optional) => {
                let slot = &self.m.slots[*i];
                for j in 0..=n {
                    let Some(p) = &cur[j] else { continue };
                    if *optional {
                        offer(&mut next[j], p.clone());
                    }
                    for (len, value) in slot_matches(slot, &self.tokens[j..]) {
                        let mut q = p.clone();
                        q.score += len;
                        q.used.extend(j..j + len);
                        q.values.push(Extracted {
                            input: slot.input.clone(),
                            value,
                            start: j,
                            end: j + len,
                        });
                        offer(&mut next[j + len], q);
                    }
                }
            }
            Sym::Alias(a, optional) => {
                for i in 0..=n {
                    let Some(p) = cur[i].clone() else { continue };
                    if *optional {
                        offer(&mut next[i], p.clone());
                    }
                    let sub = self.alias_from(*a, i);
                    for (j, q) in sub.iter().enumerate() {
                        if let Some(q) = q {
                            offer(&mut next[j], p.join(q));
                        }
                    }
                }
            }
        }
        next
    }

    fn alias_from(&mut self, alias: usize, i: usize) -> Frontier {
        if let Some(f) = self.memo.get(&(alias, i)) {
            return f.clone();
        }
        let n = self.tokens.len();
        let mut out: Frontier = vec![None; n + 1];
        let alts = self.m.aliases[alias].clone();
        for alt in &alts {
            let mut start: Frontier = vec![None; n + 1];
            start[i] = Some(Path::default());
            let end = self.sequence(alt, start);
            for (j, p) in end.into_iter().enumerate() {
                if let Some(p) = p {
                    offer(&mut out[j], p);
                }
            }
        }
        self.memo.insert((alias, i), out.clone());
        out
    }
}

fn slot_matches(slot: &SlotMatcher, rest: &[String]) -> Vec<(usize, Value)> {
    if slot.numeric {
        return rest
            .first()
            .and_then(|t| as_number(t))
            .map(|n| vec![(1, Value::Number(n))])
            .unwrap_or_default();
    }
    let mut out: Vec<(usize, Value)> = Vec::new();
    for (words, value) in &slot.surfaces {
        if !words.is_empty() && rest.len() >= words.len() && rest[..words.len()] == words[..] && !out.iter().any(|(l, _)| *l == words.len()) {
            out.push((words.len(), value.clone()));
        }
    }
    out
}

/// Surface forms of one decision's non-numeric inputs, used to pick up
/// values the winning template did not cover.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<Vec<String>, Vec<(String, Value)>>,
    longest: usize,
    numeric: Vec<(String, DataType)>,
}

impl Lexicon {
    pub fn new(intents: &[&Intent], numeric: Vec<(String, DataType)>) -> Self {
        let mut lex = Lexicon {
            numeric,
            ..Lexicon::default()
        };
        for intent in intents {
            for (name, values) in &intent.grammar.slots {
                let Some(p) = intent.parameters.iter().find(|p| p.name == slot_parameter(name)) else {
                    continue;
                };
                if p.entity == NUMBER_ENTITY {
                    continue;
                }
                for v in values {
                    let key = normalize(&v.surface);
                    if key.is_empty() {
                        continue;
                    }
                    lex.longest = lex.longest.max(key.len());
                    let e = lex.entries.entry(key).or_default();
                    if !e.iter().any(|(i, _)| *i == p.input) {
                        e.push((p.input.clone(), v.value.clone()));
                    }
                }
            }
        }
        lex
    }

    /// Unambiguous values among tokens outside `used`, skipping inputs in
    /// `known`. Numbers only go to inputs whose bounds admit them.
    pub fn leftovers(&self, tokens: &[String], used: &BTreeSet<usize>, known: &Assignment) -> Vec<Extracted> {
        let mut out: Vec<Extracted> = Vec::new();
        let taken = |out: &Vec<Extracted>, input: &str| known.contains(input) || out.iter().any(|e| e.input == input);
        let mut i = 0;
        while i < tokens.len() {
            if used.contains(&i) {
                i += 1;
                continue;
            }
            let mut found = None;
            for len in (1..=self.longest.min(tokens.len() - i)).rev() {
                if (i..i + len).any(|k| used.contains(&k)) {
                    continue;
                }
                if let Some(c) = self.entries.get(&tokens[i..i + len]) {
                    found = Some((len, c));
                    break;
                }
            }
            if let Some((len, candidates)) = found {
                let open: Vec<&(String, Value)> = candidates.iter().filter(|(inp, _)| !taken(&out, inp)).collect();
                if let [(input, value)] = open.as_slice() {
                    out.push(Extracted {
                        input: input.clone(),
                        value: value.clone(),
                        start: i,
                        end: i + len,
                    });
                }
                i += len;
                continue;
            }
            if let Some(n) = as_number(&tokens[i]) {
                let fits: Vec<&(String, DataType)> = self
                    .numeric
                    .iter()
                    .filter(|(inp, t)| !taken(&out, inp) && t.conforms(&Value::Number(n)))
                    .collect();
                let pick = match fits.as_slice() {
                    [one] => Some(*one),
                    _ => None,
                };
                if let Some((input, _)) = pick {
                    out.push(Extracted {
                        input: input.clone(),
                        value: Value::Number(n),
                        start: i,
                        end: i + 1,
                    });
                }
            }
            i += 1;
        }
        out
    }
}
