use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A concrete value bound to an input or produced by a decision.
///
/// Enumeration labels and free text share the `Text` variant; the clause's
/// [`DataType`] tells them apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Number(f64),
    Text(String),
}

impl Value {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Cell-literal form. Text stays bare when it cannot be mistaken for
    /// another literal or syntax, otherwise it is quoted.
    pub fn to_literal(&self) -> String {
        match self {
            Value::Text(s) if is_bare_safe(s) => s.clone(),
            Value::Text(s) => format!("\"{s}\""),
            other => other.to_string(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Number(n) => write!(f, "{n}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<f64> for Value {
    fn from(n: f64) -> Self {
        Value::Number(n)
    }
}

impl From<i32> for Value {
    fn from(n: i32) -> Self {
        Value::Number(f64::from(n))
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_owned())
    }
}

fn is_bare_safe(s: &str) -> bool {
    let mut chars = s.chars();
    let starts_alpha = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
    starts_alpha
        && !s.ends_with(' ')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == ' ')
        && !s.eq_ignore_ascii_case("true")
        && !s.eq_ignore_ascii_case("false")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataKind {
    Boolean,
    Number,
    Text,
    Enumeration,
}

impl fmt::Display for DataKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DataKind::Boolean => "boolean",
            DataKind::Number => "number",
            DataKind::Text => "text",
            DataKind::Enumeration => "enumeration",
        })
    }
}

/// Closed numeric interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericBounds {
    pub lower: f64,
    pub upper: f64,
}

impl NumericBounds {
    pub fn contains(&self, n: f64) -> bool {
        n >= self.lower && n <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataType {
    Boolean,
    Number { bounds: Option<NumericBounds> },
    Text,
    Enumeration { values: Vec<String> },
}

impl DataType {
    pub fn number() -> Self {
        DataType::Number { bounds: None }
    }

    pub fn bounded(lower: f64, upper: f64) -> Result<Self, String> {
        if !(lower.is_finite() && upper.is_finite()) || lower > upper {
            return Err(format!("invalid numeric bounds [{lower}, {upper}]"));
        }
        Ok(DataType::Number {
            bounds: Some(NumericBounds { lower, upper }),
        })
    }

    /// Enumerations need at least two values that stay distinct ignoring case.
    pub fn enumeration<I, S>(values: I) -> Result<Self, String>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        if values.len() < 2 {
            return Err("an enumeration needs at least two values".to_owned());
        }
        for (i, v) in values.iter().enumerate() {
            if v.trim().is_empty() {
                return Err("enumeration values must be non-empty".to_owned());
            }
            if values[..i].iter().any(|w| w.eq_ignore_ascii_case(v)) {
                return Err(format!("duplicate enumeration value {v:?}"));
            }
        }
        Ok(DataType::Enumeration { values })
    }

    pub fn kind(&self) -> DataKind {
        match self {
            DataType::Boolean => DataKind::Boolean,
            DataType::Number { .. } => DataKind::Number,
            DataType::Text => DataKind::Text,
            DataType::Enumeration { .. } => DataKind::Enumeration,
        }
    }

    pub fn bounds(&self) -> Option<NumericBounds> {
        match self {
            DataType::Number { bounds } => *bounds,
            _ => None,
        }
    }

    pub fn enum_values(&self) -> &[String] {
        match self {
            DataType::Enumeration { values } => values,
            _ => &[],
        }
    }

    /// Canonical spelling of an enumeration label, matched case-insensitively.
    pub fn canonical_label(&self, label: &str) -> Option<&str> {
        self.enum_values()
            .iter()
            .find(|v| v.eq_ignore_ascii_case(label.trim()))
            .map(String::as_str)
    }

    pub fn conforms(&self, value: &Value) -> bool {
        match (self, value) {
            (DataType::Boolean, Value::Bool(_)) => true,
            (DataType::Number { bounds }, Value::Number(n)) => {
                n.is_finite() && bounds.is_none_or(|b| b.contains(*n))
            }
            (DataType::Text, Value::Text(_)) => true,
            (DataType::Enumeration { values }, Value::Text(s)) => values.iter().any(|v| v == s),
            _ => false,
        }
    }

    /// Short human description used by help and re-ask messages.
    pub fn describe(&self) -> String {
        match self {
            DataType::Boolean => "yes or no".to_owned(),
            DataType::Number { bounds: Some(b) } => {
                format!("a number between {} and {}", b.lower, b.upper)
            }
            DataType::Number { bounds: None } => "a number".to_owned(),
            DataType::Text => "some text".to_owned(),
            DataType::Enumeration { values } => format!("one of {}", values.join(", ")),
        }
    }
}

/// Partial map from input name to value. Ordered so iteration is deterministic.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment {
    bindings: BTreeMap<String, Value>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, input: impl Into<String>, value: impl Into<Value>) -> Self {
        self.bind(input, value);
        self
    }

    pub fn bind(&mut self, input: impl Into<String>, value: impl Into<Value>) -> Option<Value> {
        self.bindings.insert(input.into(), value.into())
    }

    pub fn unbind(&mut self, input: &str) -> Option<Value> {
        self.bindings.remove(input)
    }

    pub fn get(&self, input: &str) -> Option<&Value> {
        self.bindings.get(input)
    }

    pub fn contains(&self, input: &str) -> bool {
        self.bindings.contains_key(input)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Bindings of `other` that are not yet bound here are copied over;
    /// existing bindings win.
    pub fn merge_missing(&mut self, other: &Assignment) -> Vec<String> {
        let mut added = Vec::new();
        for (k, v) in other.iter() {
            if !self.contains(k) {
                self.bindings.insert(k.to_owned(), v.clone());
                added.push(k.to_owned());
            }
        }
        added
    }
}

impl<K: Into<String>, V: Into<Value>> FromIterator<(K, V)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (K, V)>>(iter: T) -> Self {
        let mut a = Assignment::new();
        for (k, v) in iter {
            a.bind(k, v);
        }
        a
    }
}
