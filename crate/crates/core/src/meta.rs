//! Dot-prefixed system tokens.
//!
//! These change the session rather than computing on the stack: they define
//! tokens, load files, show sources and the token listing, set the trace
//! depth and end the session.

use std::path::PathBuf;
use std::sync::Arc;

use num_traits::ToPrimitive;

use crate::engine::{Behavior, Item, Machine};
use crate::error::ErrorKind;
use crate::reader;
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MetaOp {
    Def,
    Depth,
    Language,
    Load,
    Quit,
    Src,
}

impl MetaOp {
    pub const ALL: [MetaOp; 6] = [
        MetaOp::Def,
        MetaOp::Depth,
        MetaOp::Language,
        MetaOp::Load,
        MetaOp::Quit,
        MetaOp::Src,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetaOp::Def => ".def",
            MetaOp::Depth => ".depth",
            MetaOp::Language => ".language",
            MetaOp::Load => ".load",
            MetaOp::Quit => ".quit",
            MetaOp::Src => ".src",
        }
    }

    pub(crate) fn apply(self, m: &mut Machine, item: &Item) -> Result<(), ErrorKind> {
        let name = self.name();
        match self {
            MetaOp::Def => {
                need(m, name, 2)?;
                let n = m.stack.len();
                let Value::List(body) = &m.stack[n - 1] else {
                    return Err(ErrorKind::wrong_kind(
                        name,
                        "a list on top of the stack to use as the definition",
                        &m.stack[n - 1],
                    ));
                };
                let Value::Str(new_name) = &m.stack[n - 2] else {
                    return Err(ErrorKind::wrong_kind(
                        name,
                        "a name in double quotes below the list",
                        &m.stack[n - 2],
                    ));
                };
                let (new_name, body) = (new_name.clone(), body.to_vec());
                m.define(&new_name, body)?;
                m.stack.truncate(n - 2);
            }
            MetaOp::Load => {
                let path = string_operand(m, name, "a file name in double quotes")?;
                let resolved = m
                    .resolve_load_path(&path, item)
                    .ok_or_else(|| ErrorKind::FileUnreadable(path.clone()))?;
                let source = std::fs::read_to_string(&resolved)
                    .map_err(|_| ErrorKind::FileUnreadable(path.clone()))?;
                let tokens = reader::tokenize_in(&source, Some(Arc::new(PathBuf::from(&resolved))))?;
                m.stack.pop();
                m.prepend_tokens(tokens, item.depth);
            }
            MetaOp::Src => {
                let token = string_operand(m, name, "a token name in double quotes")?;
                let def = m
                    .lookup(&token)
                    .ok_or_else(|| ErrorKind::UnknownToken(token.clone()))?;
                let text = match &def.behavior {
                    Behavior::Library(_) => def.source_text().expect("library source"),
                    _ => return Err(ErrorKind::BuiltIn(token)),
                };
                m.stack.pop();
                m.output.push(text);
            }
            MetaOp::Language => {
                let banner = m.language_banner();
                m.output.extend(banner);
            }
            MetaOp::Quit => m.quit = true,
            MetaOp::Depth => {
                need(m, name, 1)?;
                let depth = match m.stack.last() {
                    Some(Value::Int(n)) => n,
                    Some(other) => return Err(ErrorKind::wrong_kind(name, "a number", other)),
                    None => unreachable!(),
                };
                if depth.sign() == num_bigint::Sign::Minus {
                    return Err(ErrorKind::NegativeDepth);
                }
                m.depth_limit = Some(depth.to_u32().unwrap_or(u32::MAX));
                m.stack.pop();
            }
        }
        Ok(())
    }
}

fn need(m: &Machine, token: &str, needed: usize) -> Result<(), ErrorKind> {
    if m.stack.len() < needed {
        return Err(ErrorKind::NotEnough { token: token.to_string(), needed, found: m.stack.len() });
    }
    Ok(())
}

fn string_operand(m: &Machine, token: &str, expected: &str) -> Result<String, ErrorKind> {
    need(m, token, 1)?;
    match m.stack.last() {
        Some(Value::Str(s)) => Ok(s.clone()),
        Some(other) => Err(ErrorKind::wrong_kind(token, expected, other)),
        None => unreachable!(),
    }
}
