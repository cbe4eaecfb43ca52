//! Reader for the decision-table subset of DMN 1.3 XML. Namespaces are
//! ignored; elements are matched by local name.

use roxmltree::{Document, Node};

use crate::model::{
    slug, DataType, DecisionModel, DecisionTable, InputClause, OutputClause, Requirement, Rule,
};

use super::unary::{parse_decimal, parse_literal, parse_unary_test};
use super::ParseError;

fn children<'a, 'i>(node: Node<'a, 'i>, name: &'a str) -> impl Iterator<Item = Node<'a, 'i>> + 'a {
    node.children()
        .filter(move |c| c.is_element() && c.tag_name().name() == name)
}

fn child<'a, 'i>(node: Node<'a, 'i>, name: &'a str) -> Option<Node<'a, 'i>> {
    children(node, name).next()
}

fn text_of(node: Node<'_, '_>) -> Option<String> {
    child(node, "text")
        .and_then(|t| t.text())
        .map(|s| s.trim().to_owned())
        .filter(|s| !s.is_empty())
}

fn invalid(path: &str, reason: impl Into<String>) -> ParseError {
    ParseError::Invalid {
        path: path.to_owned(),
        reason: reason.into(),
    }
}

/// Splits `"A","B"` style value lists; quotes are optional.
fn split_values(list: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut quoted = false;
    for c in list.chars() {
        match c {
            '"' => quoted = !quoted,
            ',' if !quoted => {
                out.push(current.trim().to_owned());
                current.clear();
            }
            _ => current.push(c),
        }
    }
    out.push(current.trim().to_owned());
    out.retain(|s| !s.is_empty());
    out
}

fn bounds_from(list: &str) -> Option<(f64, f64)> {
    let inner = list.trim().strip_prefix('[')?.strip_suffix(']')?;
    let (lo, hi) = inner.split_once("..")?;
    Some((parse_decimal(lo.trim())?, parse_decimal(hi.trim())?))
}

fn type_of(type_ref: Option<&str>, values: Option<String>, path: &str) -> Result<DataType, ParseError> {
    let type_ref = type_ref.unwrap_or("string").to_ascii_lowercase();
    match type_ref.as_str() {
        "boolean" => Ok(DataType::Boolean),
        "number" | "integer" | "long" | "double" => match values.as_deref().and_then(bounds_from) {
            Some((lo, hi)) => DataType::bounded(lo, hi).map_err(|e| invalid(path, e)),
            None => Ok(DataType::number()),
        },
        "string" => match values {
            Some(list) => DataType::enumeration(split_values(&list)).map_err(|e| invalid(path, e)),
            None => Ok(DataType::Text),
        },
        other => Err(ParseError::UnsupportedConstruct {
            path: path.to_owned(),
            what: format!("typeRef `{other}`"),
        }),
    }
}

struct ParsedDecision {
    id: String,
    name: String,
    table: DecisionTable,
    required: Vec<String>,
}

pub fn parse_dmn_xml(document: &[u8]) -> Result<DecisionModel, ParseError> {
    let text = std::str::from_utf8(document).map_err(|e| ParseError::Xml(e.to_string()))?;
    let doc = Document::parse(text).map_err(|e| ParseError::Xml(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "definitions" {
        return Err(ParseError::UnsupportedConstruct {
            path: root.tag_name().name().to_owned(),
            what: "document root must be `definitions`".to_owned(),
        });
    }
    let mut decisions = Vec::new();
    for (i, decision) in children(root, "decision").enumerate() {
        decisions.push(parse_decision(decision, i)?);
    }
    if decisions.is_empty() {
        return Err(invalid("definitions", "no decision elements"));
    }

    let mut requirements = Vec::new();
    for d in &decisions {
        for href in &d.required {
            let target = href.trim_start_matches('#');
            let child = decisions
                .iter()
                .find(|c| c.id == target)
                .ok_or_else(|| invalid(&format!("definitions/decision[@id='{}']/informationRequirement", d.id), format!("unknown decision `{href}`")))?;
            let keys = [slug(&child.name), slug(&child.table.output().name), child.table.name().to_owned()];
            let input = d
                .table
                .inputs()
                .iter()
                .find(|c| keys.contains(&c.name) || keys.contains(&slug(&c.label)))
                .ok_or_else(|| {
                    invalid(
                        &format!("definitions/decision[@id='{}']/informationRequirement", d.id),
                        format!("no input of `{}` takes the output of `{}`", d.name, child.name),
                    )
                })?;
            requirements.push(Requirement {
                parent: d.table.name().to_owned(),
                input: input.name.clone(),
                child: child.table.name().to_owned(),
            });
        }
    }
    let tables = decisions.into_iter().map(|d| d.table).collect();
    Ok(DecisionModel::new(tables, requirements, Vec::new())?)
}

fn parse_decision(decision: Node<'_, '_>, index: usize) -> Result<ParsedDecision, ParseError> {
    let id = decision.attribute("id").map(str::to_owned).unwrap_or_else(|| format!("decision{index}"));
    let path = format!("definitions/decision[@id='{id}']");
    let name = decision
        .attribute("name")
        .map(str::to_owned)
        .unwrap_or_else(|| id.clone());
    if child(decision, "literalExpression").is_some() {
        return Err(ParseError::UnsupportedConstruct {
            path: format!("{path}/literalExpression"),
            what: "literal expression decisions".to_owned(),
        });
    }
    let table_node = child(decision, "decisionTable").ok_or_else(|| ParseError::UnsupportedConstruct {
        path: path.clone(),
        what: "decision without a decisionTable".to_owned(),
    })?;
    let tpath = format!("{path}/decisionTable");
    if let Some(policy) = table_node.attribute("hitPolicy") {
        if !policy.eq_ignore_ascii_case("UNIQUE") {
            return Err(ParseError::UnsupportedHitPolicy {
                path: format!("{tpath}/@hitPolicy"),
                policy: policy.to_owned(),
            });
        }
    }
    if children(table_node, "output").count() != 1 {
        return Err(ParseError::UnsupportedConstruct {
            path: format!("{tpath}/output"),
            what: "tables must have exactly one output".to_owned(),
        });
    }

    let mut inputs = Vec::new();
    for (i, input) in children(table_node, "input").enumerate() {
        let ipath = format!("{tpath}/input[{}]", i + 1);
        let expr = child(input, "inputExpression");
        let expr_text = expr.and_then(text_of);
        let label = input.attribute("label").map(str::to_owned);
        let ident = expr_text
            .clone()
            .or_else(|| label.clone())
            .ok_or_else(|| invalid(&ipath, "input needs a label or an inputExpression"))?;
        let ty = type_of(
            expr.and_then(|e| e.attribute("typeRef")),
            child(input, "inputValues").and_then(text_of),
            &ipath,
        )?;
        inputs.push(InputClause::new(&ident, Some(label.as_deref().unwrap_or(&ident)), ty));
    }

    let output = child(table_node, "output").expect("checked above");
    let opath = format!("{tpath}/output");
    let out_name = output
        .attribute("label")
        .or_else(|| output.attribute("name"))
        .unwrap_or(&name)
        .to_owned();
    let out_ty = type_of(
        output.attribute("typeRef"),
        child(output, "outputValues").and_then(text_of),
        &opath,
    )?;

    let mut rules = Vec::new();
    for (ri, rule) in children(table_node, "rule").enumerate() {
        let rpath = format!("{tpath}/rule[{}]", ri + 1);
        let entries: Vec<Node> = children(rule, "inputEntry").collect();
        if entries.len() != inputs.len() {
            return Err(invalid(
                &rpath,
                format!("{} input entries for {} inputs", entries.len(), inputs.len()),
            ));
        }
        let mut tests = Vec::new();
        for (ci, (entry, clause)) in entries.iter().zip(&inputs).enumerate() {
            let cell = text_of(*entry).unwrap_or_else(|| "-".to_owned());
            let test = parse_unary_test(&cell, &clause.data_type)
                .map_err(|e| invalid(&format!("{rpath}/inputEntry[{}]", ci + 1), e.to_string()))?;
            tests.push(test);
        }
        let out_entry = child(rule, "outputEntry")
            .and_then(text_of)
            .ok_or_else(|| invalid(&rpath, "missing outputEntry"))?;
        let value = parse_literal(&out_entry, &out_ty)
            .map_err(|e| invalid(&format!("{rpath}/outputEntry"), e.to_string()))?;
        rules.push(Rule {
            index: ri + 1,
            input_entries: tests,
            output_entry: value,
        });
    }
    let output = OutputClause::new(&out_name, out_ty, None, &rules);
    let table = DecisionTable::new(&name, Some(&name), inputs, output, rules)
        .map_err(|e| invalid(&tpath, e.to_string()))?;
    let required = children(decision, "informationRequirement")
        .filter_map(|ir| child(ir, "requiredDecision"))
        .filter_map(|rd| rd.attribute("href").map(str::to_owned))
        .collect();
    Ok(ParsedDecision {
        id,
        name,
        table,
        required,
    })
}
