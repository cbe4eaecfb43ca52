//! Unique-hit-policy evaluation and necessity analysis over representative
//! grids.

mod bits;
mod domain;
mod plan;
mod validate;

use thiserror::Error;

use crate::model::{Assignment, DecisionModel, DecisionTable, ModelError, Rule, Value};

pub use domain::{representatives, RepresentativeDomain};
pub use plan::DecisionPlan;
pub use validate::{validate_model, validate_unique, Conflict, ConflictKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("unknown decision `{0}`")]
    UnknownTable(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("unknown input `{0}`")]
    UnknownInput(String),
    #[error("input `{0}` is already bound")]
    AlreadyBound(String),
    #[error("input `{0}` is computed by a sub-decision and cannot be bound")]
    DerivedInputBound(String),
    #[error("{value} is not a valid value for `{input}`")]
    InvalidValue { input: String, value: String },
    #[error("assignment does not bind `{0}`")]
    IncompleteAssignment(String),
    #[error("missing input `{0}`")]
    MissingInput(String),
    #[error("no rule of `{0}` matches")]
    NoMatchingRule(String),
    #[error("rules {rules:?} of `{table}` all match")]
    MultipleMatchingRules { table: String, rules: Vec<usize> },
}

/// True iff every entry of `rule` accepts the value bound to its column.
pub fn matches(table: &DecisionTable, rule: &Rule, assignment: &Assignment) -> Result<bool, EngineError> {
    let mut all = true;
    for (clause, test) in table.inputs().iter().zip(&rule.input_entries) {
        let value = assignment
            .get(&clause.name)
            .ok_or_else(|| EngineError::IncompleteAssignment(clause.name.clone()))?;
        all &= test.matches(value);
    }
    Ok(all)
}

/// Decision of `root` with every derivable input derived.
pub fn decision(model: &DecisionModel, root: &str, assignment: &Assignment) -> Result<Value, EngineError> {
    DecisionPlan::new(model, root)?.decision(assignment)
}

pub fn is_necessary(
    model: &DecisionModel,
    root: &str,
    input: &str,
    assignment: &Assignment,
) -> Result<bool, EngineError> {
    DecisionPlan::new(model, root)?.is_necessary(input, assignment)
}
