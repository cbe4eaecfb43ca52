//! Decision vocabulary: values, unary tests, decision tables and the
//! requirement graph tying tables into a hierarchy.

mod hierarchy;
mod table;
mod unary;
mod value;

use std::collections::{BTreeSet, HashMap};

use indexmap::IndexMap;
use thiserror::Error;

pub use hierarchy::{expand_hierarchy, raw_inputs, DerivedInput, Expansion};
pub use table::{DecisionTable, HitPolicy, InputClause, OutputClause, Rule};
pub use unary::{CmpOp, Endpoint, UnaryTest};
pub use value::{Assignment, DataKind, DataType, NumericBounds, Value};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("names must contain at least one letter or digit")]
    EmptyName,
    #[error("table `{0}` has no inputs")]
    NoInputs(String),
    #[error("table `{0}` has no rules")]
    NoRules(String),
    #[error("table `{table}` declares input `{input}` twice")]
    DuplicateInput { table: String, input: String },
    #[error("table `{table}` rule {rule} has {found} input entries, expected {expected}")]
    RuleArity {
        table: String,
        rule: usize,
        expected: usize,
        found: usize,
    },
    #[error("table `{table}` rule {rule}, input `{input}`: {reason}")]
    TestType {
        table: String,
        rule: usize,
        input: String,
        reason: String,
    },
    #[error("table `{table}` rule {rule}: output {value} is not an allowed value")]
    OutputNotAllowed {
        table: String,
        rule: usize,
        value: String,
    },
    #[error("duplicate table `{0}`")]
    DuplicateTable(String),
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("table `{table}` has no input `{input}`")]
    UnknownInput { table: String, input: String },
    #[error("input `{input}` of `{parent}` is fed by more than one decision")]
    DuplicateRequirement { parent: String, input: String },
    #[error("output of `{child}` does not have the type of input `{input}` of `{parent}`")]
    RequirementType {
        parent: String,
        input: String,
        child: String,
    },
    #[error("cyclic decision hierarchy: {}", .0.join(" -> "))]
    CyclicHierarchy(Vec<String>),
    #[error("input `{0}` appears with different types across the hierarchy")]
    ConflictingInputTypes(String),
    #[error("the model has no decision tables")]
    Empty,
    #[error("the model names no root decision")]
    NoRoot,
}

/// Canonical identifier used in every generated artifact name:
/// lowercase ASCII letters, digits and underscores, everything else dropped.
pub fn slug(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_ascii_alphanumeric() || *c == '_')
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

/// The output of `child` feeds input `input` of table `parent`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Requirement {
    pub parent: String,
    pub input: String,
    pub child: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionModel {
    tables: IndexMap<String, DecisionTable>,
    requirements: Vec<Requirement>,
    roots: Vec<String>,
}

impl DecisionModel {
    /// Validates references, types and acyclicity of the requirement graph.
    /// With no explicit roots, every table that feeds no other becomes one.
    pub fn new(
        tables: Vec<DecisionTable>,
        requirements: Vec<Requirement>,
        roots: Vec<String>,
    ) -> Result<Self, ModelError> {
        if tables.is_empty() {
            return Err(ModelError::Empty);
        }
        let mut by_name = IndexMap::new();
        for t in tables {
            let name = t.name().to_owned();
            if by_name.insert(name.clone(), t).is_some() {
                return Err(ModelError::DuplicateTable(name));
            }
        }
        let mut fed = BTreeSet::new();
        for req in &requirements {
            let parent = by_name
                .get(&req.parent)
                .ok_or_else(|| ModelError::UnknownTable(req.parent.clone()))?;
            let child = by_name
                .get(&req.child)
                .ok_or_else(|| ModelError::UnknownTable(req.child.clone()))?;
            let input = parent.input(&req.input).ok_or_else(|| ModelError::UnknownInput {
                table: req.parent.clone(),
                input: req.input.clone(),
            })?;
            if !fed.insert((req.parent.clone(), req.input.clone())) {
                return Err(ModelError::DuplicateRequirement {
                    parent: req.parent.clone(),
                    input: req.input.clone(),
                });
            }
            let compatible = input.data_type.kind() == child.output().data_type.kind()
                && child
                    .output()
                    .allowed_values
                    .iter()
                    .all(|v| input.data_type.conforms(v));
            if !compatible {
                return Err(ModelError::RequirementType {
                    parent: req.parent.clone(),
                    input: req.input.clone(),
                    child: req.child.clone(),
                });
            }
        }
        let roots: Vec<String> = if roots.is_empty() {
            let children: BTreeSet<&str> = requirements.iter().map(|r| r.child.as_str()).collect();
            by_name
                .keys()
                .filter(|k| !children.contains(k.as_str()))
                .cloned()
                .collect()
        } else {
            roots.iter().map(|r| slug(r)).collect()
        };
        if roots.is_empty() {
            return Err(ModelError::NoRoot);
        }
        for r in &roots {
            if !by_name.contains_key(r) {
                return Err(ModelError::UnknownTable(r.clone()));
            }
        }
        let model = DecisionModel {
            tables: by_name,
            requirements,
            roots,
        };
        model.check_acyclic()?;
        Ok(model)
    }

    /// Convenience constructor for a one-table model.
    pub fn single(table: DecisionTable) -> Self {
        let root = table.name().to_owned();
        DecisionModel::new(vec![table], Vec::new(), vec![root]).expect("a single table is a valid model")
    }

    pub fn tables(&self) -> impl Iterator<Item = &DecisionTable> {
        self.tables.values()
    }

    pub fn table(&self, name: &str) -> Option<&DecisionTable> {
        self.tables.get(name)
    }

    pub fn requirements(&self) -> &[Requirement] {
        &self.requirements
    }

    pub fn roots(&self) -> &[String] {
        &self.roots
    }

    /// The child table feeding `input` of `parent`, if any.
    pub fn feeder(&self, parent: &str, input: &str) -> Option<&str> {
        self.requirements
            .iter()
            .find(|r| r.parent == parent && r.input == input)
            .map(|r| r.child.as_str())
    }

    /// Same model re-rooted on a single decision.
    pub fn with_root(&self, root: &str) -> Result<Self, ModelError> {
        let root = slug(root);
        if !self.tables.contains_key(&root) {
            return Err(ModelError::UnknownTable(root));
        }
        Ok(DecisionModel {
            roots: vec![root],
            ..self.clone()
        })
    }

    fn check_acyclic(&self) -> Result<(), ModelError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Visiting,
            Done,
        }
        let mut children: HashMap<&str, Vec<&str>> = HashMap::new();
        for r in &self.requirements {
            children.entry(r.parent.as_str()).or_default().push(r.child.as_str());
        }
        let mut marks: HashMap<&str, Mark> = HashMap::new();
        fn visit<'a>(
            node: &'a str,
            children: &HashMap<&'a str, Vec<&'a str>>,
            marks: &mut HashMap<&'a str, Mark>,
            stack: &mut Vec<&'a str>,
        ) -> Result<(), ModelError> {
            match marks.get(node) {
                Some(Mark::Done) => return Ok(()),
                Some(Mark::Visiting) => {
                    let start = stack.iter().position(|n| *n == node).unwrap_or(0);
                    let mut cycle: Vec<String> = stack[start..].iter().map(|s| s.to_string()).collect();
                    cycle.push(node.to_owned());
                    return Err(ModelError::CyclicHierarchy(cycle));
                }
                None => {}
            }
            marks.insert(node, Mark::Visiting);
            stack.push(node);
            for child in children.get(node).into_iter().flatten() {
                visit(child, children, marks, stack)?;
            }
            stack.pop();
            marks.insert(node, Mark::Done);
            Ok(())
        }
        for name in self.tables.keys() {
            visit(name, &children, &mut marks, &mut Vec::new())?;
        }
        Ok(())
    }
}
