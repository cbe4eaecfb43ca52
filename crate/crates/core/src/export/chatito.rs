//! Chatito-subset writer and reader.

use indexmap::IndexMap;

use crate::io::parse_decimal;
use crate::model::Value;
use crate::phrase::{sentence, GenerationGrammar, IntentRule, Notation, SlotValue};

use super::ExportError;

const INDENT: &str = "    ";

fn value_alias(slot: &str, value: &Value) -> String {
    format!("{slot}={}", value.to_literal())
}

fn value_from_literal(lit: &str) -> Value {
    if let Some(inner) = lit.strip_prefix('"').and_then(|s| s.strip_suffix('"')) {
        return Value::Text(inner.to_owned());
    }
    match lit {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ => parse_decimal(lit).map(Value::Number).unwrap_or_else(|| Value::Text(lit.to_owned())),
    }
}

fn listed_directly(v: &SlotValue) -> bool {
    matches!(v.value, Value::Number(_)) && v.surface == v.value.to_string()
}

/// Renders a grammar as a Chatito file. Slot values whose surface is not
/// their own canonical spelling are listed through `slot=value` aliases.
pub fn write_chatito(grammar: &GenerationGrammar) -> String {
    let mut out = String::new();
    for (name, rule) in &grammar.intents {
        out.push_str(&format!("%[{name}]('mandatory': '{}')\n", rule.mandatory));
        for t in &rule.templates {
            out.push_str(&format!("{INDENT}{}\n", Notation(t)));
        }
        out.push('\n');
    }
    for (name, alts) in &grammar.aliases {
        out.push_str(&format!("~[{name}]\n"));
        for a in alts {
            out.push_str(&format!("{INDENT}{}\n", Notation(a)));
        }
        out.push('\n');
    }
    let mut groups: Vec<(String, Vec<&str>)> = Vec::new();
    for (name, values) in &grammar.slots {
        out.push_str(&format!("@[{name}]\n"));
        let mut local: IndexMap<String, Vec<&str>> = IndexMap::new();
        for v in values {
            if listed_directly(v) {
                out.push_str(&format!("{INDENT}{}\n", v.surface));
                continue;
            }
            let alias = value_alias(name, &v.value);
            if !local.contains_key(&alias) {
                out.push_str(&format!("{INDENT}~[{alias}]\n"));
            }
            local.entry(alias).or_default().push(&v.surface);
        }
        out.push('\n');
        groups.extend(local);
    }
    for (alias, surfaces) in groups {
        out.push_str(&format!("~[{alias}]\n"));
        for s in surfaces {
            out.push_str(&format!("{INDENT}{s}\n"));
        }
        out.push('\n');
    }
    out
}

enum Block {
    Intent(String),
    Alias(String),
    Slot(String),
}

fn header_name(line: &str, sigil: char) -> Option<(String, &str)> {
    let rest = line.strip_prefix(sigil)?.strip_prefix('[')?;
    let end = rest.find(']')?;
    Some((rest[..end].to_owned(), &rest[end + 1..]))
}

fn mandatory_arg(args: &str) -> usize {
    args.split(['(', ')', ',', ':'])
        .map(|s| s.trim().trim_matches('\''))
        .collect::<Vec<_>>()
        .windows(2)
        .find(|w| w[0] == "mandatory")
        .and_then(|w| w[1].parse().ok())
        .unwrap_or(0)
}

/// Parses files produced by [`write_chatito`].
pub fn read_chatito(text: &str) -> Result<GenerationGrammar, ExportError> {
    let mut g = GenerationGrammar::default();
    let mut value_groups: IndexMap<String, Vec<String>> = IndexMap::new();
    let mut raw_slots: IndexMap<String, Vec<String>> = IndexMap::new();
    let mut current: Option<Block> = None;
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with("//") || line.starts_with('#') {
            continue;
        }
        if let Some(body) = line.strip_prefix(INDENT) {
            let body = body.trim_end();
            match &current {
                Some(Block::Intent(name)) => g.intents[name].templates.push(sentence(body)),
                Some(Block::Alias(name)) if name.contains('=') => value_groups[name].push(body.to_owned()),
                Some(Block::Alias(name)) => g.aliases[name].push(sentence(body)),
                Some(Block::Slot(name)) => raw_slots[name].push(body.to_owned()),
                None => {
                    return Err(ExportError::Chatito {
                        line: n + 1,
                        reason: "alternative outside of a definition".to_owned(),
                    })
                }
            }
            continue;
        }
        let bad = || ExportError::Chatito {
            line: n + 1,
            reason: format!("cannot parse `{line}`"),
        };
        current = Some(match line.chars().next() {
            Some('%') => {
                let (name, args) = header_name(line, '%').ok_or_else(bad)?;
                g.intents.insert(
                    name.clone(),
                    IntentRule {
                        mandatory: mandatory_arg(args),
                        templates: Vec::new(),
                    },
                );
                Block::Intent(name)
            }
            Some('~') => {
                let (name, _) = header_name(line, '~').ok_or_else(bad)?;
                if name.contains('=') {
                    value_groups.insert(name.clone(), Vec::new());
                } else {
                    g.aliases.insert(name.clone(), Vec::new());
                }
                Block::Alias(name)
            }
            Some('@') => {
                let (name, _) = header_name(line, '@').ok_or_else(bad)?;
                raw_slots.insert(name.clone(), Vec::new());
                Block::Slot(name)
            }
            _ => return Err(bad()),
        });
    }
    for (name, lines) in raw_slots {
        let mut values = Vec::new();
        for l in lines {
            match l.strip_prefix("~[").and_then(|r| r.strip_suffix(']')) {
                Some(alias) => {
                    let (_, lit) = alias.split_once('=').ok_or_else(|| ExportError::Chatito {
                        line: 0,
                        reason: format!("slot `{name}` refers to grammar alias `{alias}`"),
                    })?;
                    let value = value_from_literal(lit);
                    let surfaces = value_groups.get(alias).ok_or_else(|| ExportError::Chatito {
                        line: 0,
                        reason: format!("value alias `{alias}` is not defined"),
                    })?;
                    values.extend(surfaces.iter().map(|s| SlotValue {
                        surface: s.clone(),
                        value: value.clone(),
                    }));
                }
                None => values.push(SlotValue {
                    value: value_from_literal(&l),
                    surface: l,
                }),
            }
        }
        g.slots.insert(name, values);
    }
    g.check()?;
    Ok(g)
}
