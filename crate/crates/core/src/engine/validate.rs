use serde::Serialize;

use crate::model::{Assignment, DecisionModel, DecisionTable, Value};

use super::domain::representatives;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConflictKind {
    /// Two or more rules match.
    Overlap,
    /// No rule matches.
    Gap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conflict {
    pub table: String,
    pub kind: ConflictKind,
    pub assignment: Assignment,
    /// 1-based indices of the matching rules; empty for gaps.
    pub rules: Vec<usize>,
}

impl std::fmt::Display for Conflict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let point: Vec<String> = self.assignment.iter().map(|(k, v)| format!("{k}={}", v.to_literal())).collect();
        match self.kind {
            ConflictKind::Overlap => {
                let rules: Vec<String> = self.rules.iter().map(ToString::to_string).collect();
                write!(f, "{}: rules {} overlap at {{{}}}", self.table, rules.join(", "), point.join(", "))
            }
            ConflictKind::Gap => write!(f, "{}: no rule covers {{{}}}", self.table, point.join(", ")),
        }
    }
}

/// Sweeps the table's own representative grid and reports every point
/// matched by zero or several rules.
pub fn validate_unique(table: &DecisionTable) -> Vec<Conflict> {
    let domains: Vec<Vec<Value>> = table
        .inputs()
        .iter()
        .enumerate()
        .map(|(c, clause)| representatives(&clause.data_type, table.rules().iter().map(|r| &r.input_entries[c])))
        .collect();
    let mut conflicts = Vec::new();
    let mut point = vec![0usize; domains.len()];
    loop {
        let matching: Vec<usize> = table
            .rules()
            .iter()
            .filter(|r| {
                r.input_entries
                    .iter()
                    .zip(&point)
                    .enumerate()
                    .all(|(c, (test, &k))| test.matches(&domains[c][k]))
            })
            .map(|r| r.index)
            .collect();
        if matching.len() != 1 {
            let assignment = table
                .inputs()
                .iter()
                .zip(&point)
                .enumerate()
                .map(|(c, (clause, &k))| (clause.name.clone(), domains[c][k].clone()))
                .collect();
            conflicts.push(Conflict {
                table: table.name().to_owned(),
                kind: if matching.is_empty() {
                    ConflictKind::Gap
                } else {
                    ConflictKind::Overlap
                },
                assignment,
                rules: matching,
            });
        }
        let mut i = 0;
        loop {
            if i == point.len() {
                return conflicts;
            }
            point[i] += 1;
            if point[i] < domains[i].len() {
                break;
            }
            point[i] = 0;
            i += 1;
        }
    }
}

pub fn validate_model(model: &DecisionModel) -> Vec<Conflict> {
    model.tables().flat_map(validate_unique).collect()
}
