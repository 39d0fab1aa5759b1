//! Runtime data.
//!
//! Everything the machine manipulates is a [`Value`]. Lists double as quoted
//! programs, so the same type describes the stack, the input buffer contents
//! and the bodies of library definitions.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

/// A datum on the stack or in a quotation.
///
/// Equality is structural. Values of different kinds are never equal, so
/// `1 true =` is simply `false`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
    /// Contents of a double-quoted literal, without the quotes.
    Str(String),
    /// A token name. Never contains whitespace and is never `[` or `]`.
    Word(String),
    List(Arc<Vec<Value>>),
}

impl Value {
    pub fn int(n: impl Into<BigInt>) -> Value {
        Value::Int(n.into())
    }

    pub fn word(w: impl Into<String>) -> Value {
        Value::Word(w.into())
    }

    pub fn string(s: impl Into<String>) -> Value {
        Value::Str(s.into())
    }

    pub fn list(items: Vec<Value>) -> Value {
        Value::List(Arc::new(items))
    }

    pub fn empty_list() -> Value {
        Value::list(Vec::new())
    }

    pub fn as_list(&self) -> Option<&Arc<Vec<Value>>> {
        match self {
            Value::List(items) => Some(items),
            _ => None,
        }
    }

    /// Canonical text: what the reader would turn back into this value.
    pub fn render(&self) -> String {
        self.to_string()
    }

    /// Short human name of the value's kind, used in error sentences.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "a number",
            Value::Bool(_) => "a truth value",
            Value::Str(_) => "a string",
            Value::Word(_) => "a word",
            Value::List(_) => "a list",
        }
    }
}

/// Structural equality, the behavior of the `=` kernel token.
pub fn equal(a: &Value, b: &Value) -> bool {
    a == b
}

/// Writes a string literal with `"` and `\` escaped.
pub(crate) fn write_quoted(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(true) => f.write_str("true"),
            Value::Bool(false) => f.write_str("false"),
            Value::Str(s) => write_quoted(f, s),
            Value::Word(w) => f.write_str(w),
            Value::List(items) => {
                f.write_str("[")?;
                for item in items.iter() {
                    write!(f, " {item}")?;
                }
                f.write_str(" ]")
            }
        }
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Value {
        Value::Int(n.into())
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Value {
        Value::Bool(b)
    }
}

impl From<Vec<Value>> for Value {
    fn from(items: Vec<Value>) -> Value {
        Value::list(items)
    }
}

/// Renders a sequence of values separated by single spaces.
pub fn render_seq<'a>(values: impl IntoIterator<Item = &'a Value>) -> String {
    let mut out = String::new();
    for (i, v) in values.into_iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&v.to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_scalars() {
        assert_eq!(Value::int(3).render(), "3");
        assert_eq!(Value::int(-12).render(), "-12");
        assert_eq!(Value::Bool(true).render(), "true");
        assert_eq!(Value::string("inc").render(), "\"inc\"");
        assert_eq!(Value::string("a \"b\" \\").render(), r#""a \"b\" \\""#);
    }

    #[test]
    fn renders_nested_lists() {
        let v = Value::list(vec![Value::int(1), Value::list(vec![Value::int(2)])]);
        assert_eq!(v.render(), "[ 1 [ 2 ] ]");
        assert_eq!(Value::empty_list().render(), "[ ]");
    }

    #[test]
    fn equality_is_structural_and_cross_kind_false() {
        assert!(equal(&Value::int(3), &Value::int(3)));
        assert!(equal(
            &Value::list(vec![Value::int(1)]),
            &Value::list(vec![Value::int(1)])
        ));
        assert!(!equal(&Value::int(1), &Value::Bool(true)));
        assert!(!equal(&Value::string("x"), &Value::word("x")));
        assert!(!equal(&Value::empty_list(), &Value::string("")));
    }
}
