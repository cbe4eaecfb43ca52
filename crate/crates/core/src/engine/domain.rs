use crate::model::{DataType, UnaryTest, Value};

/// Finite set of values per input that witnesses every distinct verdict
/// the input's tests can give.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentativeDomain {
    pub input: String,
    pub representatives: Vec<Value>,
}

const TEXT_SENTINEL: &str = "other";

/// Representatives of a clause of type `ty` constrained by `tests`.
///
/// Numbers: every endpoint, midpoints between neighbours, and one value past
/// each end, clipped to the declared bounds (which count as endpoints).
pub fn representatives<'a>(ty: &DataType, tests: impl IntoIterator<Item = &'a UnaryTest>) -> Vec<Value> {
    match ty {
        DataType::Boolean => vec![Value::Bool(true), Value::Bool(false)],
        DataType::Enumeration { values } => values.iter().map(|v| Value::Text(v.clone())).collect(),
        DataType::Text => {
            let mut literals = Vec::new();
            for t in tests {
                t.text_literals(&mut literals);
            }
            let mut out: Vec<String> = Vec::new();
            for l in literals {
                if !out.contains(&l) {
                    out.push(l);
                }
            }
            let mut sentinel = TEXT_SENTINEL.to_owned();
            while out.contains(&sentinel) {
                sentinel.push('_');
            }
            out.push(sentinel);
            out.into_iter().map(Value::Text).collect()
        }
        DataType::Number { bounds } => {
            let mut points = Vec::new();
            for t in tests {
                t.numeric_endpoints(&mut points);
            }
            if let Some(b) = bounds {
                points.push(b.lower);
                points.push(b.upper);
            }
            points.retain(|p| p.is_finite());
            points.sort_by(f64::total_cmp);
            points.dedup();
            let Some((&min, &max)) = points.first().zip(points.last()) else {
                return vec![Value::Number(0.0)];
            };
            let mut out = vec![min - 1.0];
            for pair in points.windows(2) {
                out.push(pair[0]);
                out.push((pair[0] + pair[1]) / 2.0);
            }
            out.push(max);
            out.push(max + 1.0);
            out.retain(|n| bounds.is_none_or(|b| b.contains(*n)));
            out.into_iter().map(Value::Number).collect()
        }
    }
}
