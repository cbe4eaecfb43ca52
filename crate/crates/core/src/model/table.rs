use std::collections::HashSet;

use super::unary::UnaryTest;
use super::value::{DataType, Value};
use super::{slug, ModelError};

#[derive(Debug, Clone, PartialEq)]
pub struct InputClause {
    /// Canonical slug, unique within the table.
    pub name: String,
    /// Display label as written by the author.
    pub label: String,
    pub data_type: DataType,
}

impl InputClause {
    pub fn new(name: &str, label: Option<&str>, data_type: DataType) -> Self {
        InputClause {
            name: slug(name),
            label: label.unwrap_or(name).trim().to_owned(),
            data_type,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputClause {
    pub name: String,
    pub data_type: DataType,
    pub allowed_values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    /// 1-based position in the table.
    pub index: usize,
    pub input_entries: Vec<UnaryTest>,
    pub output_entry: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HitPolicy {
    #[default]
    Unique,
}

impl HitPolicy {
    pub fn code(self) -> &'static str {
        "U"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTable {
    name: String,
    label: String,
    hit_policy: HitPolicy,
    inputs: Vec<InputClause>,
    output: OutputClause,
    rules: Vec<Rule>,
}

impl DecisionTable {
    /// Builds and validates a table. Rule indices are renumbered 1..=n.
    pub fn new(
        name: &str,
        label: Option<&str>,
        inputs: Vec<InputClause>,
        output: OutputClause,
        mut rules: Vec<Rule>,
    ) -> Result<Self, ModelError> {
        let table = slug(name);
        if table.is_empty() {
            return Err(ModelError::EmptyName);
        }
        if inputs.is_empty() {
            return Err(ModelError::NoInputs(table));
        }
        if rules.is_empty() {
            return Err(ModelError::NoRules(table));
        }
        let mut seen = HashSet::new();
        for input in &inputs {
            if input.name.is_empty() {
                return Err(ModelError::EmptyName);
            }
            if !seen.insert(input.name.clone()) {
                return Err(ModelError::DuplicateInput {
                    table,
                    input: input.name.clone(),
                });
            }
        }
        for allowed in &output.allowed_values {
            if !output.data_type.conforms(allowed) {
                return Err(ModelError::OutputNotAllowed {
                    table,
                    rule: 0,
                    value: allowed.to_literal(),
                });
            }
        }
        for (i, rule) in rules.iter_mut().enumerate() {
            rule.index = i + 1;
            if rule.input_entries.len() != inputs.len() {
                return Err(ModelError::RuleArity {
                    table,
                    rule: rule.index,
                    expected: inputs.len(),
                    found: rule.input_entries.len(),
                });
            }
            for (entry, clause) in rule.input_entries.iter().zip(&inputs) {
                entry
                    .check_type(&clause.data_type)
                    .map_err(|reason| ModelError::TestType {
                        table: table.clone(),
                        rule: rule.index,
                        input: clause.name.clone(),
                        reason,
                    })?;
            }
            if !output.allowed_values.contains(&rule.output_entry) {
                return Err(ModelError::OutputNotAllowed {
                    table,
                    rule: rule.index,
                    value: rule.output_entry.to_literal(),
                });
            }
        }
        Ok(DecisionTable {
            label: label.unwrap_or(name).trim().to_owned(),
            name: table,
            hit_policy: HitPolicy::Unique,
            inputs,
            output,
            rules,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn hit_policy(&self) -> HitPolicy {
        self.hit_policy
    }

    pub fn inputs(&self) -> &[InputClause] {
        &self.inputs
    }

    pub fn output(&self) -> &OutputClause {
        &self.output
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn input_position(&self, input: &str) -> Option<usize> {
        self.inputs.iter().position(|c| c.name == input)
    }

    pub fn input(&self, input: &str) -> Option<&InputClause> {
        self.inputs.iter().find(|c| c.name == input)
    }
}

impl OutputClause {
    /// Allowed values default to the enumeration labels, both booleans, or
    /// the distinct rule outputs in rule order.
    pub fn new(name: &str, data_type: DataType, allowed: Option<Vec<Value>>, rules: &[Rule]) -> Self {
        let allowed_values = allowed.unwrap_or_else(|| match &data_type {
            DataType::Enumeration { values } => values.iter().map(|v| Value::Text(v.clone())).collect(),
            DataType::Boolean => vec![Value::Bool(true), Value::Bool(false)],
            _ => {
                let mut out: Vec<Value> = Vec::new();
                for r in rules {
                    if !out.contains(&r.output_entry) {
                        out.push(r.output_entry.clone());
                    }
                }
                out
            }
        });
        OutputClause {
            name: name.trim().to_owned(),
            data_type,
            allowed_values,
        }
    }
}
