//! Source text to tokens.
//!
//! Tokens are whitespace separated. `[` and `]` must stand alone, string
//! literals are double quoted and stay on one line, and a token starting with
//! `#` comments out the rest of its line.

use std::path::PathBuf;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{ErrorKind, Pos, ReadError};
use crate::value::{write_quoted, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Open,
    Close,
    Int(BigInt),
    Bool(bool),
    Str(String),
    Word(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Pos,
}

impl Token {
    /// Canonical source text of the token.
    pub fn text(&self) -> String {
        match &self.kind {
            TokenKind::Open => "[".into(),
            TokenKind::Close => "]".into(),
            TokenKind::Int(n) => n.to_string(),
            TokenKind::Bool(b) => b.to_string(),
            TokenKind::Str(s) => {
                let mut out = String::new();
                write_quoted(&mut out, s).expect("writing to a String");
                out
            }
            TokenKind::Word(w) => w.clone(),
        }
    }

    /// The literal value of a non-bracket token. Words become [`Value::Word`].
    pub fn value(&self) -> Option<Value> {
        match &self.kind {
            TokenKind::Open | TokenKind::Close => None,
            TokenKind::Int(n) => Some(Value::Int(n.clone())),
            TokenKind::Bool(b) => Some(Value::Bool(*b)),
            TokenKind::Str(s) => Some(Value::Str(s.clone())),
            TokenKind::Word(w) => Some(Value::Word(w.clone())),
        }
    }
}

/// True for text the reader would classify as an integer literal.
pub fn is_int_literal(text: &str) -> bool {
    let digits = text.strip_prefix('-').unwrap_or(text);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn classify(text: &str) -> TokenKind {
    match text {
        "[" => TokenKind::Open,
        "]" => TokenKind::Close,
        "true" => TokenKind::Bool(true),
        "false" => TokenKind::Bool(false),
        t if is_int_literal(t) => TokenKind::Int(t.parse().expect("checked digits")),
        t => TokenKind::Word(t.to_string()),
    }
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, ReadError> {
    tokenize_in(source, None)
}

/// Tokenizes text that came from `file`; positions remember the file.
pub fn tokenize_in(source: &str, file: Option<Arc<PathBuf>>) -> Result<Vec<Token>, ReadError> {
    let mut tokens = Vec::new();
    for (line_no, line) in source.lines().enumerate() {
        let line_no = line_no as u32 + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            if chars[i].is_whitespace() {
                i += 1;
                continue;
            }
            let col = i as u32 + 1;
            let pos = Pos {
                line: line_no,
                col,
                index: tokens.len() as u32,
                file: file.clone(),
            };
            if chars[i] == '#' {
                break;
            }
            if chars[i] == '"' {
                let mut content = String::new();
                let mut j = i + 1;
                loop {
                    match chars.get(j) {
                        None => return Err(ReadError::UnterminatedString { line: line_no, col }),
                        Some('"') => break,
                        Some('\\') => match chars.get(j + 1) {
                            Some(&c @ ('"' | '\\')) => {
                                content.push(c);
                                j += 2;
                            }
                            Some(&escape) => {
                                return Err(ReadError::BadEscape { escape, line: line_no, col: j as u32 + 1 })
                            }
                            None => return Err(ReadError::UnterminatedString { line: line_no, col }),
                        },
                        Some(&c) => {
                            content.push(c);
                            j += 1;
                        }
                    }
                }
                // j sits on the closing quote
                let end = j + 1;
                if end < chars.len() && !chars[end].is_whitespace() {
                    let token: String = chars[i..]
                        .iter()
                        .take_while(|c| !c.is_whitespace())
                        .collect();
                    return Err(ReadError::StrayQuote { token, line: line_no, col });
                }
                tokens.push(Token { kind: TokenKind::Str(content), pos });
                i = end;
                continue;
            }
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            if text.contains('"') {
                return Err(ReadError::StrayQuote { token: text, line: line_no, col });
            }
            if text.len() > 1 && (text.contains('[') || text.contains(']')) {
                return Err(ReadError::AttachedBracket { token: text, line: line_no, col });
            }
            tokens.push(Token { kind: classify(&text), pos });
        }
    }
    Ok(tokens)
}

/// Reads data: brackets build lists, everything else is taken literally.
/// Words stay unevaluated, as they would inside a quotation.
pub fn parse_values(source: &str) -> Result<Vec<Value>, ErrorKind> {
    let mut frames: Vec<Vec<Value>> = vec![Vec::new()];
    for token in tokenize(source)? {
        match token.kind {
            TokenKind::Open => frames.push(Vec::new()),
            TokenKind::Close => {
                if frames.len() == 1 {
                    return Err(ErrorKind::NoOpenList);
                }
                let done = frames.pop().expect("nested frame");
                frames.last_mut().expect("outer frame").push(Value::list(done));
            }
            _ => {
                let v = token.value().expect("non-bracket token");
                frames.last_mut().expect("frame").push(v);
            }
        }
    }
    if frames.len() > 1 {
        return Err(ErrorKind::UnclosedList);
    }
    Ok(frames.pop().unwrap_or_default())
}
