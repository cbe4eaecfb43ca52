use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{DataType, InputClause, Value};

use super::grammar::{sentence, GenerationGrammar, IntentRule, Sentence, SlotValue, Token};

/// How an input is attached to a decision phrase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamStyle {
    /// "... of an existing customer"
    Of,
    /// "... with a credit score of 700"
    #[default]
    With,
}

/// Everything phrase generation needs to know about one askable input.
#[derive(Debug, Clone, PartialEq)]
pub struct InputVocabulary {
    pub input: InputClause,
    pub parameter: String,
    pub style: ParamStyle,
    /// Surfaces of the plain parameter slot.
    pub values: Vec<SlotValue>,
}

/// Surface tweak for inputs whose label contains `word`: the label after a
/// numeric slot is replaced by `suffix`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceRule {
    pub word: String,
    pub suffix: String,
}

pub fn default_surface_rules() -> Vec<SurfaceRule> {
    vec![SurfaceRule {
        word: "age".to_owned(),
        suffix: "years old".to_owned(),
    }]
}

pub const INIT_PHRASES: [&str; 5] = [
    "I want to know the",
    "I want to determine the",
    "I want to know a",
    "what is the",
    "tell me the",
];

/// Templates beyond which the permutation space is subsampled.
pub const MAX_TEMPLATES: usize = 5000;

pub fn article(word: &str) -> &'static str {
    match word.chars().next().map(|c| c.to_ascii_lowercase()) {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    }
}

pub fn spoken_label(input: &InputClause) -> String {
    input.label.to_lowercase()
}

/// Of-style boolean surfaces: the label and its negations.
pub fn of_surfaces(label: &str) -> Vec<SlotValue> {
    let a = article(label);
    vec![
        slot(format!("{a} {label}"), true),
        slot(format!("a non {label}"), false),
        slot(format!("not {a} {label}"), false),
    ]
}

/// With-style boolean surfaces, with and without the article.
pub fn with_surfaces(label: &str) -> Vec<SlotValue> {
    let a = article(label);
    vec![
        slot(format!("with {a} {label}"), true),
        slot(format!("with {label}"), true),
        slot(format!("without {a} {label}"), false),
        slot(format!("without {label}"), false),
    ]
}

fn slot(surface: String, value: impl Into<Value>) -> SlotValue {
    SlotValue {
        surface,
        value: value.into(),
    }
}

fn suffix_for<'r>(input: &InputClause, rules: &'r [SurfaceRule]) -> Option<&'r str> {
    let label = spoken_label(input);
    rules
        .iter()
        .find(|r| label.split_whitespace().any(|w| w == r.word))
        .map(|r| r.suffix.as_str())
}

fn add_slots(g: &mut GenerationGrammar, v: &InputVocabulary) {
    let label = spoken_label(&v.input);
    g.slots.insert(v.parameter.clone(), v.values.clone());
    if v.input.data_type == DataType::Boolean {
        g.slots.insert(format!("{}#of", v.parameter), of_surfaces(&label));
        g.slots.insert(format!("{}#with", v.parameter), with_surfaces(&label));
    } else {
        let a = article(&label);
        g.aliases.insert(
            format!("with {}", v.input.name),
            vec![
                sentence(&format!("{a} {label} of")),
                sentence(&format!("a value of {label} of")),
                sentence(&format!("{label} as")),
            ],
        );
    }
}

fn and_alias(g: &mut GenerationGrammar) {
    g.aliases.insert("and".to_owned(), vec![sentence("and"), sentence(", and")]);
}

fn alias(name: String, optional: bool) -> Token {
    Token::Alias { name, optional }
}

/// Decision intent grammar: an optional opener, the decision name and
/// k-permutations of parameter tails.
pub fn build_decision_grammar(
    intent: &str,
    decision_names: &[String],
    inputs: &[InputVocabulary],
    rules: &[SurfaceRule],
) -> GenerationGrammar {
    let mut g = GenerationGrammar::default();
    g.aliases.insert("init".to_owned(), INIT_PHRASES.iter().map(|p| sentence(p)).collect());
    let mut names: Vec<Sentence> = Vec::new();
    for n in decision_names {
        let s = sentence(&n.to_lowercase());
        if !names.contains(&s) {
            names.push(s);
        }
    }
    g.aliases.insert("decision".to_owned(), names);
    and_alias(&mut g);
    for v in inputs {
        add_slots(&mut g, v);
        let label = spoken_label(&v.input);
        let p = &v.parameter;
        let boolean = v.input.data_type == DataType::Boolean;
        let suffix = suffix_for(&v.input, rules);
        let alts = match (v.style, boolean) {
            (ParamStyle::Of, true) => vec![sentence(&format!("of @[{p}#of]"))],
            (ParamStyle::Of, false) => vec![sentence(&format!("of @[{p}] {}", suffix.unwrap_or(&label)))],
            (ParamStyle::With, true) => vec![sentence(&format!("@[{p}#with]"))],
            (ParamStyle::With, false) => {
                let mut alts = vec![sentence(&format!("with ~[with {}] @[{p}]", v.input.name))];
                if let Some(s) = suffix {
                    alts.push(sentence(&format!("@[{p}] {s}")));
                }
                alts
            }
        };
        g.aliases.insert(format!("param {}", v.input.name), alts);
    }
    let head = vec![alias("init".to_owned(), true), alias("decision".to_owned(), false)];
    let names: Vec<&str> = inputs.iter().map(|v| v.input.name.as_str()).collect();
    let (templates, mandatory) = permutation_templates(&names, head, "param", true);
    g.intents.insert(intent.to_owned(), IntentRule { mandatory, templates });
    g.prune();
    g
}

/// Input intent grammar: the answer to the pending question, optionally
/// followed by values for the other inputs.
pub fn build_input_grammar(intent: &str, asked: &str, inputs: &[InputVocabulary], rules: &[SurfaceRule]) -> GenerationGrammar {
    let mut g = GenerationGrammar::default();
    and_alias(&mut g);
    for v in inputs {
        let label = spoken_label(&v.input);
        let p = &v.parameter;
        let boolean = v.input.data_type == DataType::Boolean;
        let suffix = suffix_for(&v.input, rules);
        add_slots(&mut g, v);
        if v.input.name == asked {
            let mut alts = vec![
                sentence(&format!("@[{p}]")),
                sentence(&format!("it is @[{p}]")),
                sentence(&format!("the {label} is @[{p}]")),
            ];
            if let Some(s) = suffix {
                alts.push(sentence(&format!("@[{p}] {s}")));
            }
            g.aliases.insert("answer".to_owned(), alts);
            continue;
        }
        let alts = match (v.style, boolean) {
            (ParamStyle::Of, true) => vec![sentence(&format!("it is @[{p}#of]"))],
            (ParamStyle::Of, false) => vec![sentence(&format!("it is @[{p}] {}", suffix.unwrap_or(&label)))],
            (ParamStyle::With, true) => vec![
                sentence(&format!("@[{p}#with]")),
                sentence(&format!("the {label} is @[{p}]")),
            ],
            (ParamStyle::With, false) => vec![
                sentence(&format!("the {label} is @[{p}]")),
                sentence(&format!("with ~[with {}] @[{p}]", v.input.name)),
            ],
        };
        g.aliases.insert(format!("more {}", v.input.name), alts);
    }
    let others: Vec<&str> = inputs
        .iter()
        .map(|v| v.input.name.as_str())
        .filter(|n| *n != asked)
        .collect();
    let head = vec![alias("answer".to_owned(), true), alias("and".to_owned(), true)];
    let (mut templates, mut mandatory) = permutation_templates(&others, head, "more", false);
    templates.insert(0, vec![alias("answer".to_owned(), false)]);
    mandatory += 1;
    g.intents.insert(intent.to_owned(), IntentRule { mandatory, templates });
    g.prune();
    g
}

/// `head` followed by every k-permutation tail of `names` (k >= 1, plus
/// k = 0 when `with_empty`). Mandatory templates come first: the empty tail,
/// all 1-permutations and the full permutation in both orders.
fn permutation_templates(names: &[&str], head: Sentence, prefix: &str, with_empty: bool) -> (Vec<Sentence>, usize) {
    let n = names.len();
    let mut mandatory: Vec<Vec<usize>> = Vec::new();
    if with_empty {
        mandatory.push(Vec::new());
    }
    if n > 0 {
        for i in 0..n {
            mandatory.push(vec![i]);
        }
        let full: Vec<usize> = (0..n).collect();
        let reversed: Vec<usize> = full.iter().rev().copied().collect();
        for p in [full, reversed] {
            if !mandatory.contains(&p) {
                mandatory.push(p);
            }
        }
    }
    let taken: BTreeSet<Vec<usize>> = mandatory.iter().cloned().collect();
    let total: usize = (1..=n).map(|k| partial_factorial(n, k)).fold(0, usize::saturating_add);
    let mut rest: Vec<Vec<usize>> = Vec::new();
    if total <= MAX_TEMPLATES {
        for k in 2..=n {
            k_permutations(n, k, &mut Vec::new(), &mut rest);
        }
        rest.retain(|p| !taken.contains(p));
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut seen = taken.clone();
        let want = MAX_TEMPLATES.saturating_sub(mandatory.len());
        let mut attempts = 0;
        while rest.len() < want && attempts < want * 20 {
            attempts += 1;
            let k = rng.random_range(2..=n);
            let p: Vec<usize> = sample(&mut rng, n, k).into_iter().collect();
            if seen.insert(p.clone()) {
                rest.push(p);
            }
        }
    }
    let count = mandatory.len();
    let templates = mandatory
        .into_iter()
        .chain(rest)
        .map(|perm| {
            let mut s = head.clone();
            for (j, &i) in perm.iter().enumerate() {
                if j > 0 {
                    s.push(alias("and".to_owned(), true));
                }
                s.push(alias(format!("{prefix} {}", names[i]), false));
            }
            s
        })
        .collect();
    (templates, count)
}

fn partial_factorial(n: usize, k: usize) -> usize {
    ((n - k + 1)..=n).fold(1usize, |acc, x| acc.saturating_mul(x))
}

fn k_permutations(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == k {
        out.push(prefix.clone());
        return;
    }
    for i in 0..n {
        if !prefix.contains(&i) {
            prefix.push(i);
            k_permutations(n, k, prefix, out);
            prefix.pop();
        }
    }
}
