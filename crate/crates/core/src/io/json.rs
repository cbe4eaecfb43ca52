//! Compact JSON table format.
//!
//! ```json
//! {
//!   "tables": [{
//!     "name": "Risk Category", "hitPolicy": "U",
//!     "inputs": [{ "name": "Credit Score", "label": "Credit Score", "type": "number", "bounds": [300, 850] }],
//!     "output": { "name": "Risk Category", "type": "enumeration", "values": ["HIGH", "LOW"] },
//!     "rules": [{ "when": ["<600"], "then": "HIGH" }, { "when": [">=600"], "then": "LOW" }]
//!   }],
//!   "requirements": [{ "parent": "...", "input": "...", "child": "..." }],
//!   "root": "riskcategory"
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::model::{
    slug, DataKind, DataType, DecisionModel, DecisionTable, InputClause, OutputClause,
    Requirement, Rule, Value,
};

use super::unary::{parse_literal, parse_unary_test};
use super::ParseError;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    tables: Vec<RawTable>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    requirements: Vec<RawRequirement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<RawRoot>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawRoot {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRequirement {
    parent: String,
    input: String,
    child: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawTable {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default = "unique_code")]
    hit_policy: String,
    inputs: Vec<RawInput>,
    output: RawOutput,
    rules: Vec<RawRule>,
}

fn unique_code() -> String {
    "U".to_owned()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(rename = "type")]
    kind: DataKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bounds: Option<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    name: String,
    #[serde(rename = "type")]
    kind: DataKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bounds: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    allowed: Option<Vec<Value>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    when: Vec<String>,
    then: Value,
}

fn schema(pointer: impl Into<String>, reason: impl Into<String>) -> ParseError {
    ParseError::Schema {
        pointer: pointer.into(),
        reason: reason.into(),
    }
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

fn data_type(
    kind: DataKind,
    values: &Option<Vec<String>>,
    bounds: &Option<[f64; 2]>,
    at: &str,
) -> Result<DataType, ParseError> {
    if kind != DataKind::Enumeration && values.is_some() {
        return Err(schema(format!("{at}/values"), "only enumerations take values"));
    }
    if kind != DataKind::Number && bounds.is_some() {
        return Err(schema(format!("{at}/bounds"), "only numbers take bounds"));
    }
    match kind {
        DataKind::Boolean => Ok(DataType::Boolean),
        DataKind::Text => Ok(DataType::Text),
        DataKind::Number => match bounds {
            Some([lo, hi]) => DataType::bounded(*lo, *hi).map_err(|e| schema(format!("{at}/bounds"), e)),
            None => Ok(DataType::number()),
        },
        DataKind::Enumeration => {
            let vs = values
                .clone()
                .ok_or_else(|| schema(format!("{at}/values"), "enumerations need values"))?;
            DataType::enumeration(vs).map_err(|e| schema(format!("{at}/values"), e))
        }
    }
}

fn coerce_output(value: &Value, ty: &DataType, at: &str) -> Result<Value, ParseError> {
    let text = match value {
        Value::Text(s) => s.clone(),
        other => other.to_string(),
    };
    parse_literal(&text, ty).map_err(|e| schema(at, e.to_string()))
}

pub fn parse_model_json(document: &[u8]) -> Result<DecisionModel, ParseError> {
    let de = &mut serde_json::Deserializer::from_slice(document);
    let raw: RawModel = serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = json_pointer(e.path());
        schema(pointer, e.into_inner().to_string())
    })?;

    let mut tables = Vec::with_capacity(raw.tables.len());
    for (ti, t) in raw.tables.iter().enumerate() {
        let at = format!("/tables/{ti}");
        if t.hit_policy != "U" && !t.hit_policy.eq_ignore_ascii_case("unique") {
            return Err(ParseError::UnsupportedHitPolicy {
                path: format!("{at}/hitPolicy"),
                policy: t.hit_policy.clone(),
            });
        }
        let mut inputs = Vec::with_capacity(t.inputs.len());
        for (ii, input) in t.inputs.iter().enumerate() {
            let ty = data_type(input.kind, &input.values, &input.bounds, &format!("{at}/inputs/{ii}"))?;
            inputs.push(InputClause::new(&input.name, input.label.as_deref(), ty));
        }
        let out_at = format!("{at}/output");
        let out_ty = data_type(t.output.kind, &t.output.values, &t.output.bounds, &out_at)?;
        let mut rules = Vec::with_capacity(t.rules.len());
        for (ri, r) in t.rules.iter().enumerate() {
            let rule_at = format!("{at}/rules/{ri}");
            if r.when.len() != inputs.len() {
                return Err(schema(
                    rule_at,
                    format!("rule has {} entries, the table has {} inputs", r.when.len(), inputs.len()),
                ));
            }
            let mut entries = Vec::with_capacity(inputs.len());
            for (ci, (cell, clause)) in r.when.iter().zip(&inputs).enumerate() {
                let test = parse_unary_test(cell, &clause.data_type)
                    .map_err(|e| schema(format!("{rule_at}/when/{ci}"), e.to_string()))?;
                entries.push(test);
            }
            let output = coerce_output(&r.then, &out_ty, &format!("{rule_at}/then"))?;
            rules.push(Rule {
                index: ri + 1,
                input_entries: entries,
                output_entry: output,
            });
        }
        let allowed = match &t.output.allowed {
            Some(vs) => Some(
                vs.iter()
                    .enumerate()
                    .map(|(i, v)| coerce_output(v, &out_ty, &format!("{out_at}/allowed/{i}")))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            None => None,
        };
        let output = OutputClause::new(&t.output.name, out_ty, allowed, &rules);
        let table = DecisionTable::new(&t.name, t.label.as_deref(), inputs, output, rules)
            .map_err(|e| schema(at.clone(), e.to_string()))?;
        tables.push(table);
    }
    let requirements = raw
        .requirements
        .iter()
        .map(|r| Requirement {
            parent: slug(&r.parent),
            input: slug(&r.input),
            child: slug(&r.child),
        })
        .collect();
    let roots = match raw.root {
        None => Vec::new(),
        Some(RawRoot::One(r)) => vec![r],
        Some(RawRoot::Many(rs)) => rs,
    };
    Ok(DecisionModel::new(tables, requirements, roots)?)
}

fn raw_type(ty: &DataType) -> (DataKind, Option<Vec<String>>, Option<[f64; 2]>) {
    (
        ty.kind(),
        match ty {
            DataType::Enumeration { values } => Some(values.clone()),
            _ => None,
        },
        ty.bounds().map(|b| [b.lower, b.upper]),
    )
}

fn literal_json(v: &Value) -> Value {
    match v {
        Value::Text(_) => Value::Text(v.to_literal()),
        other => other.clone(),
    }
}

/// Pretty-printed JSON with stable field order.
pub fn write_model_json(model: &DecisionModel) -> Vec<u8> {
    let tables = model
        .tables()
        .map(|t| {
            let inputs = t
                .inputs()
                .iter()
                .map(|c| {
                    let (kind, values, bounds) = raw_type(&c.data_type);
                    RawInput {
                        name: c.name.clone(),
                        label: Some(c.label.clone()),
                        kind,
                        values,
                        bounds,
                    }
                })
                .collect();
            let out = t.output();
            let (kind, values, bounds) = raw_type(&out.data_type);
            let default_allowed = OutputClause::new(&out.name, out.data_type.clone(), None, t.rules());
            let allowed = (default_allowed.allowed_values != out.allowed_values)
                .then(|| out.allowed_values.iter().map(literal_json).collect());
            RawTable {
                name: t.name().to_owned(),
                label: Some(t.label().to_owned()),
                hit_policy: t.hit_policy().code().to_owned(),
                inputs,
                output: RawOutput {
                    name: out.name.clone(),
                    kind,
                    values,
                    bounds,
                    allowed,
                },
                rules: t
                    .rules()
                    .iter()
                    .map(|r| RawRule {
                        when: r.input_entries.iter().map(ToString::to_string).collect(),
                        then: literal_json(&r.output_entry),
                    })
                    .collect(),
            }
        })
        .collect();
    let roots = model.roots();
    let raw = RawModel {
        tables,
        requirements: model
            .requirements()
            .iter()
            .map(|r| RawRequirement {
                parent: r.parent.clone(),
                input: r.input.clone(),
                child: r.child.clone(),
            })
            .collect(),
        root: Some(if roots.len() == 1 {
            RawRoot::One(roots[0].clone())
        } else {
            RawRoot::Many(roots.to_vec())
        }),
    };
    let mut bytes = serde_json::to_vec_pretty(&raw).expect("model JSON is always serializable");
    bytes.push(b'\n');
    bytes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelError;

    const SMALL: &str = r#"{
      "tables": [{
        "name": "Approval",
        "inputs": [
          { "name": "Member", "type": "boolean" },
          { "name": "Score", "type": "number", "bounds": [0, 100] }
        ],
        "output": { "name": "Approved", "type": "enumeration", "values": ["YES", "NO"] },
        "rules": [
          { "when": ["true", "-"], "then": "YES" },
          { "when": ["false", ">=50"], "then": "YES" },
          { "when": ["false", "<50"], "then": "no" },
          { "when": ["false"], "then": "NO" }
        ]
      }],
      "root": "approval"
    }"#;

    #[test]
    fn wrong_arity_points_at_the_rule() {
        match parse_model_json(SMALL.as_bytes()) {
            Err(ParseError::Schema { pointer, .. }) => assert_eq!(pointer, "/tables/0/rules/3"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structural_errors_point_into_the_document() {
        let doc = SMALL.replace("\"type\": \"boolean\"", "\"type\": \"bool\"");
        match parse_model_json(doc.as_bytes()) {
            Err(ParseError::Schema { pointer, .. }) => assert_eq!(pointer, "/tables/0/inputs/0/type"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cell_errors_point_at_the_cell() {
        let doc = SMALL.replace("\">=50\"", "\">=fifty\"");
        match parse_model_json(doc.as_bytes()) {
            Err(ParseError::Schema { pointer, .. }) => assert_eq!(pointer, "/tables/0/rules/1/when/1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn other_hit_policies_are_rejected() {
        let doc = SMALL.replace("\"name\": \"Approval\",", "\"name\": \"Approval\", \"hitPolicy\": \"F\",");
        assert!(matches!(
            parse_model_json(doc.as_bytes()),
            Err(ParseError::UnsupportedHitPolicy { .. })
        ));
    }

    #[test]
    fn round_trip_and_canonical_outputs() {
        let doc = SMALL.replace(",\n          { \"when\": [\"false\"], \"then\": \"NO\" }", "");
        let model = parse_model_json(doc.as_bytes()).unwrap();
        let t = model.table("approval").unwrap();
        assert_eq!(t.rules()[2].output_entry, Value::Text("NO".into()));
        let again = parse_model_json(&write_model_json(&model)).unwrap();
        assert_eq!(again, model);
    }

    #[test]
    fn cyclic_requirements() {
        let doc = r#"{
          "tables": [
            { "name": "a", "inputs": [{ "name": "b", "type": "boolean" }],
              "output": { "name": "a", "type": "boolean" }, "rules": [{ "when": ["-"], "then": "true" }] },
            { "name": "b", "inputs": [{ "name": "a", "type": "boolean" }],
              "output": { "name": "b", "type": "boolean" }, "rules": [{ "when": ["-"], "then": true }] }
          ],
          "requirements": [
            { "parent": "a", "input": "b", "child": "b" },
            { "parent": "b", "input": "a", "child": "a" }
          ],
          "root": "a"
        }"#;
        assert!(matches!(
            parse_model_json(doc.as_bytes()),
            Err(ParseError::Model(ModelError::CyclicHierarchy(_)))
        ));
    }
}
