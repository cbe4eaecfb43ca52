//! Cell grammar:
//!
//! ```text
//! cell     := "-" | "not" "(" list ")" | list
//! list     := item ("," item)*          (more than one item: literals only)
//! item     := cmp number | interval | literal
//! cmp      := "<" | "<=" | ">" | ">="
//! interval := ("[" | "(") number ".." number ("]" | ")")
//! literal  := number | "true" | "false" | '"' chars '"' | bare word
//! ```

use crate::model::{CmpOp, DataType, Endpoint, UnaryTest, Value};

use super::ParseError;

pub fn parse_unary_test(cell: &str, clause_type: &DataType) -> Result<UnaryTest, ParseError> {
    let mut p = Parser::new(cell);
    p.skip_ws();
    if p.at_end() {
        return Err(p.syntax("empty cell"));
    }
    let rest = cell[p.byte_pos()..].trim_end();
    if rest == "-" {
        return Ok(UnaryTest::Any);
    }
    let test = if p.eat_keyword_call("not") {
        let inner = p.parse_list(clause_type)?;
        p.skip_ws();
        if !p.eat(')') {
            return Err(p.syntax("expected `)` to close `not(`"));
        }
        UnaryTest::Not(Box::new(inner))
    } else {
        p.parse_list(clause_type)?
    };
    p.skip_ws();
    if !p.at_end() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(test)
}

/// Parses a single literal (an output entry, for instance) of the given type.
pub fn parse_literal(text: &str, clause_type: &DataType) -> Result<Value, ParseError> {
    let mut p = Parser::new(text);
    p.skip_ws();
    if p.at_end() {
        return Err(p.syntax("empty literal"));
    }
    let v = p.parse_literal(clause_type)?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(v)
}

/// Decimal number with optional sign and fraction; no exponent.
pub fn parse_decimal(s: &str) -> Option<f64> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    let (int, frac) = match digits.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (digits, None),
    };
    let all_digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int) || frac.is_some_and(|f| !all_digits(f)) {
        return None;
    }
    s.parse::<f64>().ok().filter(|n| n.is_finite())
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

const DELIMITERS: &[char] = &[',', '(', ')', '[', ']', '<', '>', '"'];

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            chars: src.char_indices().collect(),
            pos: 0,
        }
    }

    fn byte_pos(&self) -> usize {
        self.chars.get(self.pos).map_or(self.src.len(), |(b, _)| *b)
    }

    fn syntax(&self, reason: &str) -> ParseError {
        ParseError::Syntax {
            position: self.pos,
            reason: reason.to_owned(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    /// Consumes `kw` followed by optional whitespace and `(`.
    fn eat_keyword_call(&mut self, kw: &str) -> bool {
        let start = self.pos;
        for expected in kw.chars() {
            match self.peek() {
                Some(c) if c.eq_ignore_ascii_case(&expected) => self.pos += 1,
                _ => {
                    self.pos = start;
                    return false;
                }
            }
        }
        self.skip_ws();
        if self.eat('(') {
            true
        } else {
            self.pos = start;
            false
        }
    }

    fn parse_list(&mut self, ty: &DataType) -> Result<UnaryTest, ParseError> {
        let mut items = vec![self.parse_item(ty)?];
        loop {
            self.skip_ws();
            if !self.eat(',') {
                break;
            }
            items.push(self.parse_item(ty)?);
        }
        if items.len() == 1 {
            return Ok(items.pop().expect("one item"));
        }
        let mut values = Vec::with_capacity(items.len());
        for item in items {
            match item {
                UnaryTest::Equal(v) => values.push(v),
                _ => return Err(self.syntax("only literals may appear in a comma-separated list")),
            }
        }
        Ok(UnaryTest::OneOf(values))
    }

    fn parse_item(&mut self, ty: &DataType) -> Result<UnaryTest, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.syntax("expected a condition")),
            Some('<') | Some('>') => {
                let lt = self.peek() == Some('<');
                self.pos += 1;
                let eq = self.eat('=');
                let op = match (lt, eq) {
                    (true, false) => CmpOp::Lt,
                    (true, true) => CmpOp::Le,
                    (false, false) => CmpOp::Gt,
                    (false, true) => CmpOp::Ge,
                };
                require_number(ty, op.symbol())?;
                let n = self.parse_number()?;
                Ok(UnaryTest::Compare(op, n))
            }
            Some('[') | Some('(') => {
                let lower_closed = self.peek() == Some('[');
                self.pos += 1;
                require_number(ty, "interval")?;
                let lo = self.parse_number()?;
                self.skip_ws();
                if !(self.eat('.') && self.eat('.')) {
                    return Err(self.syntax("expected `..` inside interval"));
                }
                let hi = self.parse_number()?;
                self.skip_ws();
                let upper_closed = match self.peek() {
                    Some(']') => true,
                    Some(')') => false,
                    _ => return Err(self.syntax("expected `]` or `)` to close interval")),
                };
                self.pos += 1;
                let start = self.pos;
                let lower = Endpoint { value: lo, closed: lower_closed };
                let upper = Endpoint { value: hi, closed: upper_closed };
                UnaryTest::interval(lower, upper).map_err(|reason| ParseError::Syntax {
                    position: start,
                    reason,
                })
            }
            Some(_) => Ok(UnaryTest::Equal(self.parse_literal(ty)?)),
        }
    }

    fn parse_number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some('-') {
            self.pos += 1;
        }
        while let Some(c) = self.peek() {
            let dot_then_digit = c == '.'
                && self
                    .chars
                    .get(self.pos + 1)
                    .is_some_and(|(_, n)| n.is_ascii_digit());
            if c.is_ascii_digit() || dot_then_digit {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = self.slice(start, self.pos);
        parse_decimal(text).ok_or_else(|| ParseError::Syntax {
            position: start,
            reason: "expected a decimal number".to_owned(),
        })
    }

    fn slice(&self, from: usize, to: usize) -> &'a str {
        let a = self.chars.get(from).map_or(self.src.len(), |(b, _)| *b);
        let b = self.chars.get(to).map_or(self.src.len(), |(b, _)| *b);
        &self.src[a..b]
    }

    fn parse_literal(&mut self, ty: &DataType) -> Result<Value, ParseError> {
        self.skip_ws();
        if self.eat('"') {
            let start = self.pos;
            while let Some(c) = self.peek() {
                if c == '"' {
                    let text = self.slice(start, self.pos);
                    self.pos += 1;
                    return coerce(text, true, ty);
                }
                self.pos += 1;
            }
            return Err(ParseError::Syntax {
                position: start.saturating_sub(1),
                reason: "unterminated string".to_owned(),
            });
        }
        let start = self.pos;
        while self.peek().is_some_and(|c| !DELIMITERS.contains(&c)) {
            self.pos += 1;
        }
        let text = self.slice(start, self.pos).trim();
        if text.is_empty() {
            return Err(ParseError::Syntax {
                position: start,
                reason: "expected a literal".to_owned(),
            });
        }
        coerce(text, false, ty)
    }
}

fn require_number(ty: &DataType, what: &str) -> Result<(), ParseError> {
    match ty {
        DataType::Number { .. } => Ok(()),
        other => Err(ParseError::TypeMismatch {
            literal: what.to_owned(),
            expected: other.kind(),
        }),
    }
}

fn coerce(text: &str, quoted: bool, ty: &DataType) -> Result<Value, ParseError> {
    let mismatch = || ParseError::TypeMismatch {
        literal: text.to_owned(),
        expected: ty.kind(),
    };
    match ty {
        DataType::Boolean if !quoted => {
            if text.eq_ignore_ascii_case("true") {
                Ok(Value::Bool(true))
            } else if text.eq_ignore_ascii_case("false") {
                Ok(Value::Bool(false))
            } else {
                Err(mismatch())
            }
        }
        DataType::Number { .. } if !quoted => parse_decimal(text).map(Value::Number).ok_or_else(mismatch),
        DataType::Text => Ok(Value::Text(text.to_owned())),
        DataType::Enumeration { .. } => ty
            .canonical_label(text)
            .map(|c| Value::Text(c.to_owned()))
            .ok_or_else(mismatch),
        _ => Err(mismatch()),
    }
}
