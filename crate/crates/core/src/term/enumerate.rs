//! Exhaustive enumeration and counting of well-sorted terms up to a depth.
//!
//! Canonical order: leaves first (variables, constants, primitives), then
//! operators in grammar order; arguments vary lexicographically with the
//! first argument outermost.

use std::collections::HashMap;

use num_bigint::BigUint;

use super::{Op, Sort, Substrate, Term};

pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumerationError {
    #[error("enumeration too large: {count} terms of sort {sort} at depth {depth} exceed cap {cap}")]
    TooLarge { sort: Sort, depth: u32, count: BigUint, cap: u64 },
    #[error("maximum depth must be at least 1")]
    ZeroDepth,
}

/// |T_d| per sort by the leaf-count-plus-products recurrence, in exact arithmetic.
pub fn count_terms(spec: &Substrate, sort: Sort, max_depth: u32) -> BigUint {
    let mut memo = HashMap::new();
    count_memo(spec, sort, max_depth.max(1), &mut memo)
}

fn count_memo(spec: &Substrate, sort: Sort, depth: u32, memo: &mut HashMap<(Sort, u32), BigUint>) -> BigUint {
    if let Some(c) = memo.get(&(sort, depth)) {
        return c.clone();
    }
    let mut total = BigUint::from(spec.leaves(sort).len());
    if depth > 1 {
        for op in spec.ops_producing(sort) {
            let mut prod = BigUint::from(1u32);
            for &arg in op.arg_sorts() {
                prod *= count_memo(spec, arg, depth - 1, memo);
            }
            total += prod;
        }
    }
    memo.insert((sort, depth), total.clone());
    total
}

/// All terms of `sort` with depth at most `max_depth`, in canonical order.
///
/// Refuses with [`EnumerationError::TooLarge`] when the exact count exceeds `cap`.
pub fn enumerate_terms(
    spec: &Substrate,
    sort: Sort,
    max_depth: u32,
    cap: u64,
) -> Result<Vec<Term>, EnumerationError> {
    if max_depth == 0 {
        return Err(EnumerationError::ZeroDepth);
    }
    let count = count_terms(spec, sort, max_depth);
    if count > BigUint::from(cap) {
        return Err(EnumerationError::TooLarge { sort, depth: max_depth, count, cap });
    }
    let mut memo = HashMap::new();
    Ok(build(spec, sort, max_depth, &mut memo))
}

fn build(spec: &Substrate, sort: Sort, depth: u32, memo: &mut HashMap<(Sort, u32), Vec<Term>>) -> Vec<Term> {
    if let Some(v) = memo.get(&(sort, depth)) {
        return v.clone();
    }
    let mut out: Vec<Term> = spec.leaves(sort).to_vec();
    if depth > 1 {
        for op in spec.ops_producing(sort) {
            let pools: Vec<Vec<Term>> = op.arg_sorts().iter().map(|&s| build(spec, s, depth - 1, memo)).collect();
            if pools.iter().any(Vec::is_empty) {
                continue;
            }
            let mut idx = vec![0usize; pools.len()];
            'product: loop {
                let args = idx.iter().zip(&pools).map(|(&i, p)| p[i].clone()).collect();
                out.push(Term::app_unchecked(op, args));
                // odometer, last argument fastest
                let mut k = pools.len();
                loop {
                    if k == 0 {
                        break 'product;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < pools[k].len() {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        }
    }
    memo.insert((sort, depth), out.clone());
    out
}

/// Preorder token of a term produced by [`walk_terms`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Token {
    /// Index into `Substrate::leaves(sort)`.
    Leaf(Sort, u16),
    Op(Op),
}

impl Token {
    /// Rebuilds a term from a complete preorder token sequence.
    pub fn to_term(spec: &Substrate, tokens: &[Token]) -> Term {
        fn go(spec: &Substrate, tokens: &[Token], pos: &mut usize) -> Term {
            let tok = tokens[*pos];
            *pos += 1;
            match tok {
                Token::Leaf(sort, i) => spec.leaves(sort)[i as usize].clone(),
                Token::Op(op) => {
                    let args = (0..op.arity()).map(|_| go(spec, tokens, pos)).collect();
                    Term::app_unchecked(op, args)
                }
            }
        }
        let mut pos = 0;
        let t = go(spec, tokens, &mut pos);
        assert_eq!(pos, tokens.len(), "token sequence longer than one term");
        t
    }
}

/// Streams every term of `sort` up to `max_depth` as a preorder token
/// sequence, in canonical order, without materialising the set.
pub fn walk_terms(spec: &Substrate, sort: Sort, max_depth: u32, visit: &mut dyn FnMut(&[Token])) {
    let walker = Walker {
        leaf_counts: [Sort::Int, Sort::Bool, Sort::IntList, Sort::Fun1, Sort::Pred]
            .map(|s| spec.leaves(s).len() as u16),
        ops: [Sort::Int, Sort::Bool, Sort::IntList, Sort::Fun1, Sort::Pred]
            .map(|s| spec.ops_producing(s).collect::<Vec<_>>()),
    };
    let mut buf = Vec::with_capacity(64);
    walker.walk(sort, max_depth.max(1), &mut buf, &mut |b| visit(b));
}

struct Walker {
    leaf_counts: [u16; 5],
    ops: [Vec<Op>; 5],
}

fn slot(sort: Sort) -> usize {
    match sort {
        Sort::Int => 0,
        Sort::Bool => 1,
        Sort::IntList => 2,
        Sort::Fun1 => 3,
        Sort::Pred => 4,
    }
}

impl Walker {
    fn walk(&self, sort: Sort, depth: u32, buf: &mut Vec<Token>, k: &mut dyn FnMut(&mut Vec<Token>)) {
        for i in 0..self.leaf_counts[slot(sort)] {
            buf.push(Token::Leaf(sort, i));
            k(buf);
            buf.pop();
        }
        if depth > 1 {
            for &op in &self.ops[slot(sort)] {
                buf.push(Token::Op(op));
                self.walk_args(op.arg_sorts(), depth - 1, buf, k);
                buf.pop();
            }
        }
    }

    fn walk_args(&self, sorts: &[Sort], depth: u32, buf: &mut Vec<Token>, k: &mut dyn FnMut(&mut Vec<Token>)) {
        match sorts.split_first() {
            None => k(buf),
            Some((&s, rest)) => {
                let mut next = |b: &mut Vec<Token>| self.walk_args(rest, depth, b, k);
                self.walk(s, depth, buf, &mut next)
            }
        }
    }
}
