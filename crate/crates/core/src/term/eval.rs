use std::fmt;

use super::{Const, Kind, Op, Sort, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Bool(bool),
    List(Vec<i64>),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Int(_) => Sort::Int,
            Value::Bool(_) => Sort::Bool,
            Value::List(_) => Sort::IntList,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::List(xs) => write!(f, "{xs:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(&'static str),
    #[error("pattern variable in evaluated term")]
    PatternVariable,
    #[error("`{0}` has no first-order value")]
    HigherOrder(&'static str),
}

/// Variable bindings for evaluation, one slot per substrate variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Environment {
    slots: [Option<Value>; 8],
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: Var, value: Value) -> Self {
        self.bind(var, value);
        self
    }

    pub fn bind(&mut self, var: Var, value: Value) {
        debug_assert_eq!(var.sort(), value.sort(), "binding {} with wrong sort", var.name());
        self.slots[var.index()] = Some(value);
    }

    pub fn get(&self, var: Var) -> Option<&Value> {
        self.slots[var.index()].as_ref()
    }
}

pub fn eval(term: &Term, env: &Environment) -> Result<Value, EvalError> {
    match term.kind() {
        Kind::Var(v) => env.get(*v).cloned().ok_or(EvalError::Unbound(v.name())),
        Kind::PVar(_) => Err(EvalError::PatternVariable),
        Kind::Const(Const::Int(v)) => Ok(Value::Int(*v)),
        Kind::Const(Const::Bool(b)) => Ok(Value::Bool(*b)),
        Kind::Const(Const::Nil) => Ok(Value::List(Vec::new())),
        Kind::Prim(p) => Err(EvalError::HigherOrder(p.name())),
        Kind::App(op, args) => eval_app(*op, args, env),
    }
}

fn int(term: &Term, env: &Environment) -> Result<i64, EvalError> {
    match eval(term, env)? {
        Value::Int(v) => Ok(v),
        other => unreachable!("well-sorted Int term evaluated to {other}"),
    }
}

fn boolean(term: &Term, env: &Environment) -> Result<bool, EvalError> {
    match eval(term, env)? {
        Value::Bool(b) => Ok(b),
        other => unreachable!("well-sorted Bool term evaluated to {other}"),
    }
}

fn list(term: &Term, env: &Environment) -> Result<Vec<i64>, EvalError> {
    match eval(term, env)? {
        Value::List(xs) => Ok(xs),
        other => unreachable!("well-sorted IntList term evaluated to {other}"),
    }
}

fn prim(term: &Term) -> Result<super::Prim, EvalError> {
    match term.kind() {
        Kind::Prim(p) => Ok(*p),
        Kind::PVar(_) => Err(EvalError::PatternVariable),
        _ => unreachable!("function-sorted argument is always a primitive"),
    }
}

fn eval_app(op: Op, args: &[Term], env: &Environment) -> Result<Value, EvalError> {
    Ok(match op {
        Op::Add => Value::Int(int(&args[0], env)?.wrapping_add(int(&args[1], env)?)),
        Op::Sub => Value::Int(int(&args[0], env)?.wrapping_sub(int(&args[1], env)?)),
        Op::Mul => Value::Int(int(&args[0], env)?.wrapping_mul(int(&args[1], env)?)),
        Op::And => Value::Bool(boolean(&args[0], env)? & boolean(&args[1], env)?),
        Op::Or => Value::Bool(boolean(&args[0], env)? | boolean(&args[1], env)?),
        Op::Not => Value::Bool(!boolean(&args[0], env)?),
        Op::Map => {
            let f = prim(&args[0])?;
            Value::List(list(&args[1], env)?.into_iter().map(|x| f.apply_fun(x)).collect())
        }
        Op::Filter => {
            let p = prim(&args[0])?;
            Value::List(list(&args[1], env)?.into_iter().filter(|&x| p.test(x)).collect())
        }
        Op::Fold(b) => {
            let init = int(&args[0], env)?;
            Value::Int(list(&args[1], env)?.into_iter().fold(init, |acc, x| b.apply(acc, x)))
        }
        Op::Reverse => {
            let mut xs = list(&args[0], env)?;
            xs.reverse();
            Value::List(xs)
        }
        Op::Length => Value::Int(list(&args[0], env)?.len() as i64),
        Op::Append => {
            let mut xs = list(&args[0], env)?;
            xs.extend(list(&args[1], env)?);
            Value::List(xs)
        }
        Op::Cons => {
            let head = int(&args[0], env)?;
            let mut xs = list(&args[1], env)?;
            xs.insert(0, head);
            Value::List(xs)
        }
    })
}
