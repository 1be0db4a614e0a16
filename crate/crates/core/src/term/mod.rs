//! Sorted expression trees over the three substrate grammars.
//!
//! A [`Term`] is an immutable, reference-counted tree. The same type is used
//! for concrete terms (built from substrate variables and constants) and for
//! patterns, which additionally contain pattern variables `A`, `B`, ...

mod enumerate;
mod eval;
mod substrate;
mod text;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use enumerate::{count_terms, enumerate_terms, walk_terms, EnumerationError, Token, DEFAULT_ENUMERATION_CAP};
pub use eval::{eval, Environment, EvalError, Value};
pub use substrate::{Domain, Soundness, Substrate};
pub use text::{parse_rule, parse_term, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sort {
    Int,
    Bool,
    IntList,
    Fun1,
    Pred,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Sort::Int => "Int",
            Sort::Bool => "Bool",
            Sort::IntList => "IntList",
            Sort::Fun1 => "Fun1",
            Sort::Pred => "Pred",
        };
        f.write_str(s)
    }
}

/// Free variables of the three grammars. Each has a fixed sort.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    Y,
    Z,
    P,
    Q,
    R,
    Xs,
    Ys,
}

impl Var {
    pub const ALL: [Var; 8] = [Var::X, Var::Y, Var::Z, Var::P, Var::Q, Var::R, Var::Xs, Var::Ys];

    pub fn sort(self) -> Sort {
        match self {
            Var::X | Var::Y | Var::Z => Sort::Int,
            Var::P | Var::Q | Var::R => Sort::Bool,
            Var::Xs | Var::Ys => Sort::IntList,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
            Var::P => "p",
            Var::Q => "q",
            Var::R => "r",
            Var::Xs => "xs",
            Var::Ys => "ys",
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

/// Binary integer operator usable as the combining function of `fold`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

impl BinOp {
    pub const ALL: [BinOp; 3] = [BinOp::Add, BinOp::Sub, BinOp::Mul];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }

    pub fn apply(self, a: i64, b: i64) -> i64 {
        match self {
            BinOp::Add => a.wrapping_add(b),
            BinOp::Sub => a.wrapping_sub(b),
            BinOp::Mul => a.wrapping_mul(b),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Add,
    Sub,
    Mul,
    And,
    Or,
    Not,
    Map,
    Filter,
    Fold(BinOp),
    Reverse,
    Length,
    Append,
    Cons,
}

impl Op {
    pub fn arg_sorts(self) -> &'static [Sort] {
        use Sort::*;
        match self {
            Op::Add | Op::Sub | Op::Mul => &[Int, Int],
            Op::And | Op::Or => &[Bool, Bool],
            Op::Not => &[Bool],
            Op::Map => &[Fun1, IntList],
            Op::Filter => &[Pred, IntList],
            Op::Fold(_) => &[Int, IntList],
            Op::Reverse => &[IntList],
            Op::Length => &[IntList],
            Op::Append => &[IntList, IntList],
            Op::Cons => &[Int, IntList],
        }
    }

    pub fn result_sort(self) -> Sort {
        match self {
            Op::Add | Op::Sub | Op::Mul | Op::Fold(_) | Op::Length => Sort::Int,
            Op::And | Op::Or | Op::Not => Sort::Bool,
            Op::Map | Op::Filter | Op::Reverse | Op::Append | Op::Cons => Sort::IntList,
        }
    }

    pub fn arity(self) -> usize {
        self.arg_sorts().len()
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Sub => "-",
            Op::Mul => "*",
            Op::And => "and",
            Op::Or => "or",
            Op::Not => "not",
            Op::Map => "map",
            Op::Filter => "filter",
            Op::Fold(_) => "fold",
            Op::Reverse => "reverse",
            Op::Length => "length",
            Op::Append => "append",
            Op::Cons => "cons",
        }
    }
}

/// Named unary functions (`Fun1`) and predicates (`Pred`) of the list grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prim {
    Inc,
    Dec,
    Double,
    Square,
    Neg,
    Id,
    IsPos,
    IsNeg,
    IsZero,
    Nonzero,
    IsEven,
    IsOdd,
}

impl Prim {
    pub const FUNS: [Prim; 6] = [Prim::Inc, Prim::Dec, Prim::Double, Prim::Square, Prim::Neg, Prim::Id];
    pub const PREDS: [Prim; 6] =
        [Prim::IsPos, Prim::IsNeg, Prim::IsZero, Prim::Nonzero, Prim::IsEven, Prim::IsOdd];

    pub fn sort(self) -> Sort {
        match self {
            Prim::Inc | Prim::Dec | Prim::Double | Prim::Square | Prim::Neg | Prim::Id => Sort::Fun1,
            _ => Sort::Pred,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Prim::Inc => "inc",
            Prim::Dec => "dec",
            Prim::Double => "double",
            Prim::Square => "square",
            Prim::Neg => "neg",
            Prim::Id => "id",
            Prim::IsPos => "is_pos",
            Prim::IsNeg => "is_neg",
            Prim::IsZero => "is_zero",
            Prim::Nonzero => "nonzero",
            Prim::IsEven => "is_even",
            Prim::IsOdd => "is_odd",
        }
    }

    pub(crate) fn apply_fun(self, x: i64) -> i64 {
        match self {
            Prim::Inc => x.wrapping_add(1),
            Prim::Dec => x.wrapping_sub(1),
            Prim::Double => x.wrapping_mul(2),
            Prim::Square => x.wrapping_mul(x),
            Prim::Neg => x.wrapping_neg(),
            Prim::Id => x,
            _ => unreachable!("predicate applied as a function"),
        }
    }

    pub(crate) fn test(self, x: i64) -> bool {
        match self {
            Prim::IsPos => x > 0,
            Prim::IsNeg => x < 0,
            Prim::IsZero => x == 0,
            Prim::Nonzero => x != 0,
            Prim::IsEven => x.rem_euclid(2) == 0,
            Prim::IsOdd => x.rem_euclid(2) == 1,
            _ => unreachable!("function applied as a predicate"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Const {
    Int(i64),
    Bool(bool),
    Nil,
}

impl Const {
    pub fn sort(self) -> Sort {
        match self {
            Const::Int(_) => Sort::Int,
            Const::Bool(_) => Sort::Bool,
            Const::Nil => Sort::IntList,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Var(Var),
    /// Pattern variable; index 0 prints as `A`.
    PVar(u16),
    Const(Const),
    Prim(Prim),
    App(Op, Box<[Term]>),
}

#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Node {
    kind: Kind,
    sort: Sort,
    size: u32,
    depth: u32,
}

/// Immutable sorted term. Cloning is a reference-count bump.
///
/// The derived ordering is the canonical order used for every tie-break.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term(Arc<Node>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("operator `{op}` expects {expected} arguments, got {got}")]
    Arity { op: &'static str, expected: usize, got: usize },
    #[error("operator `{op}` argument {index} expects sort {expected}, got {got}")]
    ArgSort { op: &'static str, index: usize, expected: Sort, got: Sort },
}

impl Term {
    fn leaf(kind: Kind, sort: Sort) -> Term {
        Term(Arc::new(Node { kind, sort, size: 1, depth: 1 }))
    }

    pub fn var(v: Var) -> Term {
        Term::leaf(Kind::Var(v), v.sort())
    }

    pub fn pvar(index: u16, sort: Sort) -> Term {
        Term::leaf(Kind::PVar(index), sort)
    }

    pub fn constant(c: Const) -> Term {
        Term::leaf(Kind::Const(c), c.sort())
    }

    pub fn int(v: i64) -> Term {
        Term::constant(Const::Int(v))
    }

    pub fn boolean(v: bool) -> Term {
        Term::constant(Const::Bool(v))
    }

    pub fn nil() -> Term {
        Term::constant(Const::Nil)
    }

    pub fn prim(p: Prim) -> Term {
        Term::leaf(Kind::Prim(p), p.sort())
    }

    /// Checked application.
    pub fn app(op: Op, args: Vec<Term>) -> Result<Term, TermError> {
        let sorts = op.arg_sorts();
        if sorts.len() != args.len() {
            return Err(TermError::Arity { op: op.symbol(), expected: sorts.len(), got: args.len() });
        }
        for (index, (arg, &expected)) in args.iter().zip(sorts).enumerate() {
            if arg.sort() != expected {
                return Err(TermError::ArgSort { op: op.symbol(), index, expected, got: arg.sort() });
            }
        }
        Ok(Term::app_unchecked(op, args))
    }

    pub(crate) fn app_unchecked(op: Op, args: Vec<Term>) -> Term {
        debug_assert_eq!(op.arity(), args.len());
        let size = 1 + args.iter().map(Term::size).sum::<u32>();
        let depth = 1 + args.iter().map(Term::depth).max().unwrap_or(0);
        Term(Arc::new(Node { kind: Kind::App(op, args.into_boxed_slice()), sort: op.result_sort(), size, depth }))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn sort(&self) -> Sort {
        self.0.sort
    }

    pub fn size(&self) -> u32 {
        self.0.size
    }

    pub fn depth(&self) -> u32 {
        self.0.depth
    }

    pub fn args(&self) -> &[Term] {
        match &self.0.kind {
            Kind::App(_, args) => args,
            _ => &[],
        }
    }

    pub fn op(&self) -> Option<Op> {
        match &self.0.kind {
            Kind::App(op, _) => Some(*op),
            _ => None,
        }
    }

    pub fn is_pattern_var(&self) -> bool {
        matches!(self.0.kind, Kind::PVar(_))
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// True when the term contains no pattern variables.
    pub fn is_concrete(&self) -> bool {
        match &self.0.kind {
            Kind::PVar(_) => false,
            Kind::App(_, args) => args.iter().all(Term::is_concrete),
            _ => true,
        }
    }

    /// Free substrate variables in left-to-right preorder, first appearance only.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.visit_preorder(&mut |t| {
            if let Kind::Var(v) = t.kind() {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
        });
        out
    }

    /// Pattern variable indices in preorder, first appearance only.
    pub fn pattern_vars(&self) -> Vec<u16> {
        let mut out = Vec::new();
        self.visit_preorder(&mut |t| {
            if let Kind::PVar(i) = t.kind() {
                if !out.contains(i) {
                    out.push(*i);
                }
            }
        });
        out
    }

    pub fn visit_preorder(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        for a in self.args() {
            a.visit_preorder(f);
        }
    }

    /// Recomputes size and depth from the tree, ignoring the cached fields.
    pub fn recomputed_size_depth(&self) -> (u32, u32) {
        let mut size = 1;
        let mut depth = 0;
        for a in self.args() {
            let (s, d) = a.recomputed_size_depth();
            size += s;
            depth = depth.max(d);
        }
        (size, depth + 1)
    }

    /// Rebuilds the term with `f` applied bottom-up to every leaf.
    pub fn map_leaves(&self, f: &mut impl FnMut(&Term) -> Term) -> Term {
        match &self.0.kind {
            Kind::App(op, args) => {
                let new: Vec<Term> = args.iter().map(|a| a.map_leaves(f)).collect();
                if new.iter().zip(args.iter()).all(|(n, o)| n.ptr_eq(o)) {
                    self.clone()
                } else {
                    Term::app_unchecked(*op, new)
                }
            }
            _ => f(self),
        }
    }

    /// Replaces the subterm at `path` (child indices from the root) with `replacement`.
    pub fn replace_at(&self, path: &[usize], replacement: Term) -> Term {
        match path.split_first() {
            None => replacement,
            Some((&i, rest)) => match &self.0.kind {
                Kind::App(op, args) => {
                    let mut new = args.to_vec();
                    new[i] = new[i].replace_at(rest, replacement);
                    Term::app_unchecked(*op, new)
                }
                _ => panic!("replace_at: path descends into a leaf"),
            },
        }
    }

    pub fn subterm_at(&self, path: &[usize]) -> &Term {
        path.iter().fold(self, |t, &i| &t.args()[i])
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Sort-preserving map from pattern variable index to concrete term.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    slots: Vec<Option<Term>>,
}

impl Substitution {
    pub fn get(&self, index: u16) -> Option<&Term> {
        self.slots.get(index as usize).and_then(Option::as_ref)
    }

    pub fn bind(&mut self, index: u16, term: Term) {
        let i = index as usize;
        if self.slots.len() <= i {
            self.slots.resize(i + 1, None);
        }
        self.slots[i] = Some(term);
    }

    pub fn len(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (u16, &Term)> {
        self.slots.iter().enumerate().filter_map(|(i, t)| t.as_ref().map(|t| (i as u16, t)))
    }

    fn clear(&mut self) {
        self.slots.iter_mut().for_each(|s| *s = None);
    }
}

/// Matches `pattern` against `term` at the root.
///
/// Pattern variables occurring in `term` are treated as rigid leaves, so the
/// same routine serves reducibility probes on patterns.
pub fn match_term(pattern: &Term, term: &Term) -> Option<Substitution> {
    let mut subst = Substitution::default();
    if match_into(pattern, term, &mut subst) {
        Some(subst)
    } else {
        None
    }
}

/// Like [`match_term`], reusing `subst` as scratch space.
pub fn matches_with(pattern: &Term, term: &Term, subst: &mut Substitution) -> bool {
    subst.clear();
    match_into(pattern, term, subst)
}

fn match_into(pattern: &Term, term: &Term, subst: &mut Substitution) -> bool {
    if pattern.sort() != term.sort() || pattern.size() > term.size() && !pattern.is_pattern_var() {
        return false;
    }
    match (pattern.kind(), term.kind()) {
        (Kind::PVar(i), _) => match subst.get(*i) {
            Some(bound) => bound == term,
            None => {
                subst.bind(*i, term.clone());
                true
            }
        },
        (Kind::App(pop, pargs), Kind::App(top, targs)) => {
            pop == top && pargs.iter().zip(targs.iter()).all(|(p, t)| match_into(p, t, subst))
        }
        (Kind::App(..), _) => false,
        (a, b) => a == b,
    }
}

/// Applies `subst` to `pattern`. Unbound pattern variables are left in place.
pub fn instantiate(pattern: &Term, subst: &Substitution) -> Term {
    pattern.map_leaves(&mut |leaf| match leaf.kind() {
        Kind::PVar(i) => subst.get(*i).cloned().unwrap_or_else(|| leaf.clone()),
        _ => leaf.clone(),
    })
}

/// Replaces every free variable of `lhs` and `rhs` with a pattern variable,
/// using one shared map. Indices follow first appearance in a preorder walk
/// of `lhs`, then `rhs`.
pub fn generalize(lhs: &Term, rhs: &Term) -> (Term, Term) {
    let mut order = lhs.free_vars();
    for v in rhs.free_vars() {
        if !order.contains(&v) {
            order.push(v);
        }
    }
    let mut rename = |leaf: &Term| match leaf.kind() {
        Kind::Var(v) => {
            let idx = order.iter().position(|o| o == v).expect("variable collected above");
            Term::pvar(idx as u16, v.sort())
        }
        _ => leaf.clone(),
    };
    (lhs.map_leaves(&mut rename), rhs.map_leaves(&mut rename))
}

/// Every subterm of size at least two, preorder, the term itself included.
pub fn subterms(term: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    term.visit_preorder(&mut |t| {
        if t.size() >= 2 {
            out.push(t.clone());
        }
    });
    out
}
