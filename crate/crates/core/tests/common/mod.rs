//! Random table generators and a brute-force evaluator that only uses
//! `UnaryTest::matches` over a dense value grid.

#![allow(dead_code)]

pub mod golden;

use dmnbot_core::model::{
    Assignment, CmpOp, DataType, DecisionModel, DecisionTable, Endpoint, InputClause, OutputClause,
    Rule, UnaryTest, Value,
};
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const OUTPUTS: [&str; 3] = ["A", "B", "C"];
const ENDPOINTS: [f64; 5] = [0.0, 2.0, 4.0, 6.0, 8.0];

#[derive(Debug, Clone)]
enum Column {
    Bool,
    Enum(Vec<String>),
    Num(Vec<f64>),
}

fn random_columns(rng: &mut ChaCha8Rng) -> Vec<Column> {
    let n = rng.random_range(1..=4);
    (0..n)
        .map(|_| match rng.random_range(0..3) {
            0 => Column::Bool,
            1 => {
                let k = rng.random_range(2..=3);
                Column::Enum(["RED", "GREEN", "BLUE"][..k].iter().map(|s| s.to_string()).collect())
            }
            _ => {
                let k = rng.random_range(1..=2);
                let mut e: Vec<f64> = rand::seq::index::sample(rng, ENDPOINTS.len(), k)
                    .into_iter()
                    .map(|i| ENDPOINTS[i])
                    .collect();
                e.sort_by(f64::total_cmp);
                Column::Num(e)
            }
        })
        .collect()
}

fn data_type(c: &Column) -> DataType {
    match c {
        Column::Bool => DataType::Boolean,
        Column::Enum(v) => DataType::enumeration(v.clone()).unwrap(),
        Column::Num(_) => DataType::number(),
    }
}

/// A partition of the column's values into cells.
fn cells(c: &Column, rng: &mut ChaCha8Rng) -> Vec<UnaryTest> {
    match c {
        Column::Bool => vec![UnaryTest::Equal(true.into()), UnaryTest::Equal(false.into())],
        Column::Enum(values) => {
            let mut vs: Vec<Value> = values.iter().map(|v| Value::Text(v.clone())).collect();
            vs.shuffle(rng);
            let split = rng.random_range(1..vs.len());
            let first = vs[..split].to_vec();
            let rest = vs[split..].to_vec();
            let one = |g: Vec<Value>| {
                if g.len() == 1 {
                    UnaryTest::Equal(g[0].clone())
                } else {
                    UnaryTest::OneOf(g)
                }
            };
            if rng.random_bool(0.5) {
                vec![one(first.clone()), UnaryTest::Not(Box::new(one(first)))]
            } else {
                vec![one(first), one(rest)]
            }
        }
        Column::Num(e) => {
            let left_closed = rng.random_bool(0.5);
            let mut out = Vec::new();
            let lo = e[0];
            out.push(if left_closed {
                UnaryTest::Compare(CmpOp::Lt, lo)
            } else {
                UnaryTest::Compare(CmpOp::Le, lo)
            });
            if e.len() == 2 {
                let (a, b) = if left_closed {
                    (Endpoint::closed(e[0]), Endpoint::open(e[1]))
                } else {
                    (Endpoint::open(e[0]), Endpoint::closed(e[1]))
                };
                out.push(UnaryTest::interval(a, b).unwrap());
            }
            let hi = *e.last().unwrap();
            out.push(if left_closed {
                UnaryTest::Compare(CmpOp::Ge, hi)
            } else {
                UnaryTest::Compare(CmpOp::Gt, hi)
            });
            out
        }
    }
}

fn output(rng: &mut ChaCha8Rng) -> Value {
    Value::from(OUTPUTS[rng.random_range(0..OUTPUTS.len())])
}

fn split_tree(
    cols: &[Column],
    free: Vec<usize>,
    prefix: Vec<UnaryTest>,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<(Vec<UnaryTest>, Value)>,
) {
    if free.is_empty() || rng.random_bool(0.3) {
        out.push((prefix, output(rng)));
        return;
    }
    let pick = free[rng.random_range(0..free.len())];
    let rest: Vec<usize> = free.iter().copied().filter(|c| *c != pick).collect();
    for cell in cells(&cols[pick], rng) {
        let mut p = prefix.clone();
        p[pick] = cell;
        split_tree(cols, rest.clone(), p, rng, out);
    }
}

fn build(cols: &[Column], rules: Vec<(Vec<UnaryTest>, Value)>) -> DecisionModel {
    let inputs = cols
        .iter()
        .enumerate()
        .map(|(i, c)| InputClause::new(&format!("in{i}"), None, data_type(c)))
        .collect();
    let rules: Vec<Rule> = rules
        .into_iter()
        .map(|(input_entries, output_entry)| Rule {
            index: 0,
            input_entries,
            output_entry,
        })
        .collect();
    let out = OutputClause::new(
        "Out",
        DataType::enumeration(OUTPUTS).unwrap(),
        None,
        &rules,
    );
    DecisionModel::single(DecisionTable::new("t", None, inputs, out, rules).unwrap())
}

/// A complete, overlap-free table built as a random decision tree with at
/// most twelve leaves.
pub fn valid_model(seed: u64) -> DecisionModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let cols = random_columns(&mut rng);
        let mut rules = Vec::new();
        split_tree(&cols, (0..cols.len()).collect(), vec![UnaryTest::Any; cols.len()], &mut rng, &mut rules);
        if rules.len() <= 12 {
            return build(&cols, rules);
        }
    }
}

/// Arbitrary rules: overlaps and gaps are allowed.
pub fn arbitrary_model(seed: u64) -> DecisionModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols = random_columns(&mut rng);
    let n = rng.random_range(1..=12);
    let rules = (0..n)
        .map(|_| {
            let entries = cols
                .iter()
                .map(|c| {
                    if rng.random_bool(0.35) {
                        UnaryTest::Any
                    } else {
                        let cs = cells(c, &mut rng);
                        cs[rng.random_range(0..cs.len())].clone()
                    }
                })
                .collect();
            (entries, output(&mut rng))
        })
        .collect();
    build(&cols, rules)
}

/// Every integer from -1 to 9 for numbers; endpoints are even integers, so
/// each cell of every generated test holds at least one of them.
pub fn dense_domain(ty: &DataType) -> Vec<Value> {
    match ty {
        DataType::Boolean => vec![true.into(), false.into()],
        DataType::Enumeration { values } => values.iter().map(|v| Value::Text(v.clone())).collect(),
        DataType::Number { .. } => (-1..=9).map(Value::from).collect(),
        DataType::Text => vec!["x".into()],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Brute {
    Value(Value),
    NoMatch,
    Multiple(Vec<usize>),
}

pub fn brute_outcome(table: &DecisionTable, point: &Assignment) -> Brute {
    let hits: Vec<&Rule> = table
        .rules()
        .iter()
        .filter(|r| {
            table
                .inputs()
                .iter()
                .zip(&r.input_entries)
                .all(|(c, t)| t.matches(point.get(&c.name).expect("complete point")))
        })
        .collect();
    match hits.as_slice() {
        [] => Brute::NoMatch,
        [one] => Brute::Value(one.output_entry.clone()),
        many => Brute::Multiple(many.iter().map(|r| r.index).collect()),
    }
}

/// All completions of `partial` over the dense domains.
pub fn completions(table: &DecisionTable, partial: &Assignment) -> Vec<Assignment> {
    let mut points = vec![partial.clone()];
    for c in table.inputs() {
        if partial.contains(&c.name) {
            continue;
        }
        points = points
            .into_iter()
            .flat_map(|p| dense_domain(&c.data_type).into_iter().map(move |v| p.clone().with(c.name.clone(), v)))
            .collect();
    }
    points
}

/// Necessary iff two completions differing only in `input` disagree.
pub fn brute_necessary(table: &DecisionTable, input: &str, partial: &Assignment) -> bool {
    let clause = table.input(input).unwrap();
    for base in completions(table, &partial.clone().with(input, dense_domain(&clause.data_type)[0].clone())) {
        let mut base = base;
        let mut seen: Option<Brute> = None;
        for v in dense_domain(&clause.data_type) {
            base.bind(input, v);
            let o = brute_outcome(table, &base);
            match &seen {
                None => seen = Some(o),
                Some(s) if *s != o => return true,
                _ => {}
            }
        }
    }
    false
}

/// A handful of partial assignments drawn from the dense domains.
pub fn partial_assignments(table: &DecisionTable, seed: u64) -> Vec<Assignment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut out = vec![Assignment::new()];
    for _ in 0..4 {
        let mut a = Assignment::new();
        for c in table.inputs() {
            if rng.random_bool(0.5) {
                let d = dense_domain(&c.data_type);
                a.bind(c.name.clone(), d[rng.random_range(0..d.len())].clone());
            }
        }
        out.push(a);
    }
    out
}

pub fn only_table(model: &DecisionModel) -> &DecisionTable {
    model.tables().next().unwrap()
}

/// The model's only table under another name.
pub fn renamed(model: &DecisionModel, name: &str) -> DecisionModel {
    let t = only_table(model);
    DecisionModel::single(
        DecisionTable::new(name, None, t.inputs().to_vec(), t.output().clone(), t.rules().to_vec()).unwrap(),
    )
}

/// What a user would type to give `value` for a question.
pub fn spoken(value: &Value) -> String {
    match value {
        Value::Bool(true) => "yes".to_owned(),
        Value::Bool(false) => "no".to_owned(),
        Value::Number(n) => n.to_string(),
        Value::Text(s) => s.to_lowercase(),
    }
}
