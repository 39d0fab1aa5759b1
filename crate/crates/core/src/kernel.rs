//! Built-in operators.
//!
//! Each operator checks its operands before touching the stack, so a failed
//! operator leaves the stack exactly as it found it.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::ErrorKind;
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelOp {
    Mul,
    Add,
    Sub,
    Div,
    Less,
    Equal,
    Open,
    Close,
    And,
    Cat,
    Choice,
    Count,
    Drop,
    Dup,
    IsEmpty,
    Get,
    Dequote,
    Id,
    Last,
    Lcut,
    Ljoin,
    Mod,
    NewStack,
    Not,
    Or,
    Rcut,
    RollDown,
    RollUp,
    Stack,
    StackSize,
    Swap,
    Unstack,
}

/// What the engine must do after an operator ran.
#[derive(Debug)]
pub enum Effect {
    Done,
    /// Prepend the program to the input buffer.
    Dequote(Arc<Vec<Value>>),
}

impl KernelOp {
    pub const ALL: [KernelOp; 32] = [
        KernelOp::Mul,
        KernelOp::Add,
        KernelOp::Sub,
        KernelOp::Div,
        KernelOp::Less,
        KernelOp::Equal,
        KernelOp::Open,
        KernelOp::Close,
        KernelOp::And,
        KernelOp::Cat,
        KernelOp::Choice,
        KernelOp::Count,
        KernelOp::Drop,
        KernelOp::Dup,
        KernelOp::IsEmpty,
        KernelOp::Get,
        KernelOp::Dequote,
        KernelOp::Id,
        KernelOp::Last,
        KernelOp::Lcut,
        KernelOp::Ljoin,
        KernelOp::Mod,
        KernelOp::NewStack,
        KernelOp::Not,
        KernelOp::Or,
        KernelOp::Rcut,
        KernelOp::RollDown,
        KernelOp::RollUp,
        KernelOp::Stack,
        KernelOp::StackSize,
        KernelOp::Swap,
        KernelOp::Unstack,
    ];

    pub fn name(self) -> &'static str {
        use KernelOp::*;
        match self {
            Mul => "*",
            Add => "+",
            Sub => "-",
            Div => "/",
            Less => "<",
            Equal => "=",
            Open => "[",
            Close => "]",
            And => "and",
            Cat => "cat",
            Choice => "choice",
            Count => "count",
            Drop => "drop",
            Dup => "dup",
            IsEmpty => "empty?",
            Get => "get",
            Dequote => "i",
            Id => "id",
            Last => "last",
            Lcut => "lcut",
            Ljoin => "ljoin",
            Mod => "mod",
            NewStack => "newstack",
            Not => "not",
            Or => "or",
            Rcut => "rcut",
            RollDown => "rolldown",
            RollUp => "rollup",
            Stack => "stack",
            StackSize => "stack-size",
            Swap => "swap",
            Unstack => "unstack",
        }
    }

    /// Number of values taken from the stack. `unstack` replaces the whole
    /// stack but only requires its one operand.
    pub fn arity(self) -> usize {
        use KernelOp::*;
        match self {
            Open | Close | Id | NewStack | Stack | StackSize => 0,
            Count | Drop | Dup | IsEmpty | Dequote | Last | Lcut | Not | Rcut | Unstack => 1,
            Mul | Add | Sub | Div | Less | Equal | And | Cat | Get | Ljoin | Mod | Or | Swap => 2,
            Choice | RollDown | RollUp => 3,
        }
    }

    pub fn from_name(name: &str) -> Option<KernelOp> {
        KernelOp::ALL.iter().copied().find(|op| op.name() == name)
    }

    /// Runs the operator on `stack` (bottom first, top last).
    pub fn apply(self, stack: &mut Vec<Value>) -> Result<Effect, ErrorKind> {
        use KernelOp::*;
        let name = self.name();
        let needed = self.arity();
        if stack.len() < needed {
            return Err(match self {
                Dup => ErrorKind::EmptyCopy,
                Drop => ErrorKind::EmptyDiscard,
                _ => ErrorKind::NotEnough {
                    token: name.to_string(),
                    needed,
                    found: stack.len(),
                },
            });
        }
        let n = stack.len();
        match self {
            Add | Sub | Mul | Div | Mod | Less => {
                let a = int(name, &stack[n - 2])?;
                let b = int(name, &stack[n - 1])?;
                let result = match self {
                    Add => Value::Int(a + b),
                    Sub => Value::Int(a - b),
                    Mul => Value::Int(a * b),
                    Div | Mod if b.is_zero() => return Err(ErrorKind::DivideByZero),
                    Div => Value::Int(a.div_floor(b)),
                    Mod => Value::Int(a.mod_floor(b)),
                    _ => Value::Bool(a < b),
                };
                replace_top(stack, 2, result);
            }
            Equal => {
                let eq = stack[n - 2] == stack[n - 1];
                replace_top(stack, 2, Value::Bool(eq));
            }
            And | Or => {
                let a = boolean(name, &stack[n - 2])?;
                let b = boolean(name, &stack[n - 1])?;
                let r = if self == And { a && b } else { a || b };
                replace_top(stack, 2, Value::Bool(r));
            }
            Not => {
                let a = boolean(name, &stack[n - 1])?;
                replace_top(stack, 1, Value::Bool(!a));
            }
            Dup => {
                let top = stack[n - 1].clone();
                stack.push(top);
            }
            Drop => {
                stack.pop();
            }
            Swap => stack.swap(n - 2, n - 1),
            // x y z -> z x y
            RollUp => stack[n - 3..].rotate_right(1),
            // x y z -> y z x
            RollDown => stack[n - 3..].rotate_left(1),
            Id | Open | Close => {}
            Cat => {
                list(name, "two lists", &stack[n - 2])?;
                list(name, "two lists", &stack[n - 1])?;
                let b = stack.pop().expect("checked");
                let Some(Value::List(a)) = stack.last_mut() else { unreachable!() };
                let b = b.as_list().expect("checked").clone();
                Arc::make_mut(a).extend(b.iter().cloned());
            }
            Ljoin => {
                list(name, "a list on top of the stack", &stack[n - 1])?;
                let l = stack.pop().expect("checked");
                let x = stack.pop().expect("checked");
                let Value::List(mut items) = l else { unreachable!() };
                Arc::make_mut(&mut items).insert(0, x);
                stack.push(Value::List(items));
            }
            Lcut | Rcut => {
                let items = list(name, "a list", &stack[n - 1])?;
                if items.is_empty() {
                    return Err(ErrorKind::EmptyCut);
                }
                let Some(Value::List(mut items)) = stack.pop() else { unreachable!() };
                let v = Arc::make_mut(&mut items);
                if self == Lcut {
                    let head = v.remove(0);
                    stack.push(head);
                    stack.push(Value::List(items));
                } else {
                    let last = v.pop().expect("nonempty");
                    stack.push(Value::List(items));
                    stack.push(last);
                }
            }
            Count => {
                let len = list(name, "a list", &stack[n - 1])?.len();
                replace_top(stack, 1, Value::int(len));
            }
            IsEmpty => {
                let empty = list(name, "a list", &stack[n - 1])?.is_empty();
                replace_top(stack, 1, Value::Bool(empty));
            }
            Last => {
                let items = list(name, "a list", &stack[n - 1])?;
                let last = items.last().ok_or(ErrorKind::EmptyLast)?.clone();
                replace_top(stack, 1, last);
            }
            Get => {
                let items = list(name, "a list below a position number", &stack[n - 2])?;
                let index = int(name, &stack[n - 1])?;
                let item = index
                    .to_usize()
                    .and_then(|i| items.get(i))
                    .ok_or_else(|| ErrorKind::OutOfRange {
                        index: index.to_string(),
                        len: items.len(),
                    })?
                    .clone();
                replace_top(stack, 2, item);
            }
            Dequote => {
                list(name, "a list to run", &stack[n - 1])?;
                let Some(Value::List(program)) = stack.pop() else { unreachable!() };
                return Ok(Effect::Dequote(program));
            }
            Choice => {
                let c = match &stack[n - 3] {
                    Value::Bool(b) => *b,
                    other => {
                        return Err(ErrorKind::wrong_kind(
                            name,
                            "a truth value (true or false) as its condition",
                            other,
                        ))
                    }
                };
                let f = stack.pop().expect("checked");
                let t = stack.pop().expect("checked");
                stack.pop();
                stack.push(if c { t } else { f });
            }
            Stack => {
                let snapshot = Value::list(stack.clone());
                stack.push(snapshot);
            }
            Unstack => {
                list(name, "a list", &stack[n - 1])?;
                let Some(Value::List(items)) = stack.pop() else { unreachable!() };
                *stack = Arc::unwrap_or_clone(items);
            }
            NewStack => stack.clear(),
            StackSize => {
                let size = stack.len();
                stack.push(Value::int(size));
            }
        }
        Ok(Effect::Done)
    }
}

fn replace_top(stack: &mut Vec<Value>, n: usize, v: Value) {
    stack.truncate(stack.len() - n);
    stack.push(v);
}

fn int<'a>(op: &str, v: &'a Value) -> Result<&'a BigInt, ErrorKind> {
    match v {
        Value::Int(n) => Ok(n),
        other => Err(ErrorKind::wrong_kind(op, "numbers", other)),
    }
}

fn boolean(op: &str, v: &Value) -> Result<bool, ErrorKind> {
    match v {
        Value::Bool(b) => Ok(*b),
        other => Err(ErrorKind::wrong_kind(op, "truth values (true or false)", other)),
    }
}

fn list<'a>(op: &str, expected: &str, v: &'a Value) -> Result<&'a Arc<Vec<Value>>, ErrorKind> {
    match v {
        Value::List(items) => Ok(items),
        other => Err(ErrorKind::wrong_kind(op, expected, other)),
    }
}
