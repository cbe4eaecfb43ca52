use std::fmt;

use super::value::{DataKind, DataType, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endpoint {
    pub value: f64,
    pub closed: bool,
}

impl Endpoint {
    pub fn closed(value: f64) -> Self {
        Endpoint { value, closed: true }
    }

    pub fn open(value: f64) -> Self {
        Endpoint {
            value,
            closed: false,
        }
    }
}

/// Condition held by a single rule cell.
#[derive(Debug, Clone, PartialEq)]
pub enum UnaryTest {
    /// The `-` wildcard.
    Any,
    Equal(Value),
    Compare(CmpOp, f64),
    Interval { lower: Endpoint, upper: Endpoint },
    OneOf(Vec<Value>),
    Not(Box<UnaryTest>),
}

impl UnaryTest {
    pub fn interval(lower: Endpoint, upper: Endpoint) -> Result<Self, String> {
        let ok = lower.value < upper.value
            || (lower.value == upper.value && lower.closed && upper.closed);
        if !ok || !lower.value.is_finite() || !upper.value.is_finite() {
            return Err(format!(
                "empty interval between {} and {}",
                lower.value, upper.value
            ));
        }
        Ok(UnaryTest::Interval { lower, upper })
    }

    pub fn matches(&self, value: &Value) -> bool {
        match self {
            UnaryTest::Any => true,
            UnaryTest::Equal(v) => v == value,
            UnaryTest::Compare(op, rhs) => value.as_number().is_some_and(|n| op.holds(n, *rhs)),
            UnaryTest::Interval { lower, upper } => value.as_number().is_some_and(|n| {
                let above = if lower.closed {
                    n >= lower.value
                } else {
                    n > lower.value
                };
                let below = if upper.closed {
                    n <= upper.value
                } else {
                    n < upper.value
                };
                above && below
            }),
            UnaryTest::OneOf(vs) => vs.iter().any(|v| v == value),
            UnaryTest::Not(inner) => !inner.matches(value),
        }
    }

    pub fn is_any(&self) -> bool {
        matches!(self, UnaryTest::Any)
    }

    /// Numeric constants at which this test can change its verdict.
    pub fn numeric_endpoints(&self, out: &mut Vec<f64>) {
        match self {
            UnaryTest::Any => {}
            UnaryTest::Equal(v) => out.extend(v.as_number()),
            UnaryTest::Compare(_, n) => out.push(*n),
            UnaryTest::Interval { lower, upper } => {
                out.push(lower.value);
                out.push(upper.value);
            }
            UnaryTest::OneOf(vs) => out.extend(vs.iter().filter_map(Value::as_number)),
            UnaryTest::Not(inner) => inner.numeric_endpoints(out),
        }
    }

    /// Text literals mentioned by this test.
    pub fn text_literals(&self, out: &mut Vec<String>) {
        match self {
            UnaryTest::Equal(Value::Text(s)) => out.push(s.clone()),
            UnaryTest::OneOf(vs) => {
                out.extend(vs.iter().filter_map(|v| v.as_text().map(str::to_owned)))
            }
            UnaryTest::Not(inner) => inner.text_literals(out),
            _ => {}
        }
    }

    /// Checks that the test makes sense for a clause of type `data_type`.
    pub fn check_type(&self, data_type: &DataType) -> Result<(), String> {
        match self {
            UnaryTest::Any => Ok(()),
            UnaryTest::Equal(v) => check_literal(v, data_type),
            UnaryTest::Compare(..) | UnaryTest::Interval { .. } => {
                if data_type.kind() == DataKind::Number {
                    Ok(())
                } else {
                    Err(format!(
                        "comparisons need a number clause, found {}",
                        data_type.kind()
                    ))
                }
            }
            UnaryTest::OneOf(vs) => {
                if vs.is_empty() {
                    return Err("empty list".to_owned());
                }
                vs.iter().try_for_each(|v| check_literal(v, data_type))
            }
            UnaryTest::Not(inner) => inner.check_type(data_type),
        }
    }
}

fn check_literal(v: &Value, data_type: &DataType) -> Result<(), String> {
    let ok = match (data_type, v) {
        (DataType::Boolean, Value::Bool(_)) => true,
        (DataType::Number { .. }, Value::Number(n)) => n.is_finite(),
        (DataType::Text, Value::Text(_)) => true,
        (DataType::Enumeration { .. }, Value::Text(_)) => data_type.conforms(v),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(format!("literal {} is not a {}", v.to_literal(), data_type.kind()))
    }
}

impl fmt::Display for UnaryTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnaryTest::Any => f.write_str("-"),
            UnaryTest::Equal(v) => f.write_str(&v.to_literal()),
            UnaryTest::Compare(op, n) => write!(f, "{}{}", op.symbol(), n),
            UnaryTest::Interval { lower, upper } => write!(
                f,
                "{}{}..{}{}",
                if lower.closed { '[' } else { '(' },
                lower.value,
                upper.value,
                if upper.closed { ']' } else { ')' }
            ),
            UnaryTest::OneOf(vs) => {
                let parts: Vec<String> = vs.iter().map(Value::to_literal).collect();
                f.write_str(&parts.join(", "))
            }
            UnaryTest::Not(inner) => write!(f, "not({inner})"),
        }
    }
}
