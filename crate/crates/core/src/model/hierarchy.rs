use std::collections::BTreeSet;

use super::{DecisionModel, InputClause, ModelError};

/// A parent input whose value is computed by a child decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedInput {
    pub parent: String,
    pub input: String,
    pub child: String,
}

/// Flattened view of a decision hierarchy.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    /// Askable inputs in question order.
    pub raw: Vec<InputClause>,
    /// Inputs computed from child decisions (only those in derive mode).
    pub derived: Vec<DerivedInput>,
    /// Tables that take part in evaluation, root first.
    pub tables: Vec<String>,
    pub warnings: Vec<String>,
}

/// Askable inputs of the hierarchy under `root`, with every fed input derived.
pub fn raw_inputs(model: &DecisionModel, root: &str) -> Result<Vec<InputClause>, ModelError> {
    Ok(expand_hierarchy(model, root, &BTreeSet::new())?.raw)
}

/// Expands `root` depth-first: each derived column is replaced in place by
/// the child's own inputs. Inputs named in `ask` stay askable even when a
/// child decision could compute them. Duplicate names are unified, first
/// occurrence wins.
pub fn expand_hierarchy(
    model: &DecisionModel,
    root: &str,
    ask: &BTreeSet<String>,
) -> Result<Expansion, ModelError> {
    if model.table(root).is_none() {
        return Err(ModelError::UnknownTable(root.to_owned()));
    }
    let mut out = Expansion {
        raw: Vec::new(),
        derived: Vec::new(),
        tables: Vec::new(),
        warnings: Vec::new(),
    };
    let mut origin: Vec<String> = Vec::new();
    let mut stack = Vec::new();
    visit(model, root, ask, &mut stack, &mut out, &mut origin)?;
    Ok(out)
}

fn visit(
    model: &DecisionModel,
    name: &str,
    ask: &BTreeSet<String>,
    stack: &mut Vec<String>,
    out: &mut Expansion,
    origin: &mut Vec<String>,
) -> Result<(), ModelError> {
    if stack.iter().any(|s| s == name) {
        let mut cycle = stack.clone();
        cycle.push(name.to_owned());
        return Err(ModelError::CyclicHierarchy(cycle));
    }
    let table = model
        .table(name)
        .ok_or_else(|| ModelError::UnknownTable(name.to_owned()))?;
    if out.tables.iter().any(|t| t == name) {
        return Ok(());
    }
    out.tables.push(name.to_owned());
    stack.push(name.to_owned());
    for clause in table.inputs() {
        match model.feeder(name, &clause.name) {
            Some(child) if !ask.contains(&clause.name) => {
                out.derived.push(DerivedInput {
                    parent: name.to_owned(),
                    input: clause.name.clone(),
                    child: child.to_owned(),
                });
                visit(model, child, ask, stack, out, origin)?;
            }
            _ => {
                if let Some(pos) = out.raw.iter().position(|c| c.name == clause.name) {
                    if out.raw[pos].data_type != clause.data_type {
                        return Err(ModelError::ConflictingInputTypes(clause.name.clone()));
                    }
                    out.warnings.push(format!(
                        "input `{}` appears in `{}` and `{}`; it is asked once",
                        clause.name, origin[pos], name
                    ));
                } else {
                    out.raw.push(clause.clone());
                    origin.push(name.to_owned());
                }
            }
        }
    }
    stack.pop();
    Ok(())
}
