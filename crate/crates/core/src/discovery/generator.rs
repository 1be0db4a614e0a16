//! Candidate term proposal policies.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng;
use crate::term::{subterms, Op, Sort, Substrate, Term};

/// Probability of stopping at a leaf below the depth cap.
pub const LEAF_PROBABILITY: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Random,
    Compositional,
    Freq,
    MdlGreedy,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 4] =
        [GeneratorKind::Random, GeneratorKind::Compositional, GeneratorKind::Freq, GeneratorKind::MdlGreedy];

    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::Random => "random",
            GeneratorKind::Compositional => "compositional",
            GeneratorKind::Freq => "freq",
            GeneratorKind::MdlGreedy => "mdl_greedy",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GeneratorKind::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| format!("unknown generator `{s}`"))
    }
}

/// Harvested subterm pool with usage counts and the generation stream.
pub struct GeneratorState {
    pool: Vec<Term>,
    freq: Vec<u64>,
    index: HashMap<Term, usize>,
    rng: rng::Rng,
}

impl GeneratorState {
    pub fn new(seed: u64) -> Self {
        Self::with_rng(rng::stream(seed, rng::STREAM_GENERATOR))
    }

    pub fn with_rng(rng: rng::Rng) -> Self {
        GeneratorState { pool: Vec::new(), freq: Vec::new(), index: HashMap::new(), rng }
    }

    /// Distinct pool entries in first-harvest order.
    pub fn pool(&self) -> &[Term] {
        &self.pool
    }

    pub fn freq_of(&self, t: &Term) -> u64 {
        self.index.get(t).map_or(0, |&i| self.freq[i])
    }

    /// Adds the size-two-or-more subterms of `term`, bumping the count of each harvested entry.
    pub fn harvest(&mut self, term: &Term) {
        for s in subterms(term) {
            let i = *self.index.entry(s.clone()).or_insert_with(|| {
                self.pool.push(s);
                self.freq.push(0);
                self.pool.len() - 1
            });
            self.freq[i] += 1;
        }
    }

    pub fn rng_mut(&mut self) -> &mut rng::Rng {
        &mut self.rng
    }
}

/// Grow-method random term of `sort` with depth at most `depth`.
pub fn random_term<R: Rng + ?Sized>(spec: &Substrate, sort: Sort, depth: u32, rng: &mut R) -> Term {
    let ops: Vec<Op> = spec.ops_producing(sort).collect();
    if depth <= 1 || ops.is_empty() || rng.gen_bool(LEAF_PROBABILITY) {
        return random_leaf(spec, sort, rng);
    }
    let op = ops[rng.gen_range(0..ops.len())];
    let args = op.arg_sorts().iter().map(|&s| random_term(spec, s, depth - 1, rng)).collect();
    Term::app(op, args).expect("generated arguments follow the signature")
}

pub fn random_leaf<R: Rng + ?Sized>(spec: &Substrate, sort: Sort, rng: &mut R) -> Term {
    let leaves = spec.leaves(sort);
    leaves[rng.gen_range(0..leaves.len())].clone()
}

/// Proposes one candidate term for the discovery loop.
pub fn generate_candidate(state: &mut GeneratorState, kind: GeneratorKind, spec: &Substrate, depth: u32) -> Term {
    let sorts = spec.principal_sorts();
    let sort = sorts[state.rng.gen_range(0..sorts.len())];
    if kind == GeneratorKind::Random {
        return random_term(spec, sort, depth, &mut state.rng);
    }
    // a join adds one level, so only pool terms strictly shallower than the cap are usable
    let eligible: Vec<usize> = (0..state.pool.len()).filter(|&i| state.pool[i].depth() < depth).collect();
    if eligible.is_empty() {
        return random_term(spec, sort, depth, &mut state.rng);
    }
    let first = match kind {
        GeneratorKind::MdlGreedy => *eligible
            .iter()
            .max_by(|&&a, &&b| {
                let (ta, tb) = (&state.pool[a], &state.pool[b]);
                ta.size()
                    .cmp(&tb.size())
                    .then(state.freq[a].cmp(&state.freq[b]))
                    .then(tb.cmp(ta))
            })
            .expect("eligible is non-empty"),
        GeneratorKind::Freq => weighted_draw(&eligible, &state.freq, &mut state.rng),
        _ => eligible[state.rng.gen_range(0..eligible.len())],
    };
    let second = match kind {
        GeneratorKind::Freq => weighted_draw(&eligible, &state.freq, &mut state.rng),
        _ => eligible[state.rng.gen_range(0..eligible.len())],
    };
    let (t1, t2) = (state.pool[first].clone(), state.pool[second].clone());
    join(spec, sort, t1, t2, &mut state.rng).unwrap_or_else(|| random_term(spec, sort, depth, &mut state.rng))
}

fn weighted_draw<R: Rng + ?Sized>(eligible: &[usize], freq: &[u64], rng: &mut R) -> usize {
    let total: u64 = eligible.iter().map(|&i| freq[i]).sum();
    if total == 0 {
        return eligible[rng.gen_range(0..eligible.len())];
    }
    let mut target = rng.gen_range(0..total);
    for &i in eligible {
        if target < freq[i] {
            return i;
        }
        target -= freq[i];
    }
    unreachable!("target below total weight")
}

/// Places `t1` and `t2` under a uniformly chosen operator of result `sort`
/// that has a slot for at least one of them; unfilled slots get random leaves.
fn join<R: Rng + ?Sized>(spec: &Substrate, sort: Sort, t1: Term, t2: Term, rng: &mut R) -> Option<Term> {
    let compatible: Vec<Op> = spec
        .ops_producing(sort)
        .filter(|op| op.arg_sorts().iter().any(|&s| s == t1.sort() || s == t2.sort()))
        .collect();
    if compatible.is_empty() {
        return None;
    }
    let op = compatible[rng.gen_range(0..compatible.len())];
    let mut slots: Vec<Option<Term>> = vec![None; op.arity()];
    for t in [t1, t2] {
        if let Some(i) = (0..slots.len()).find(|&i| slots[i].is_none() && op.arg_sorts()[i] == t.sort()) {
            slots[i] = Some(t);
        }
    }
    let args = slots
        .into_iter()
        .zip(op.arg_sorts())
        .map(|(slot, &s)| slot.unwrap_or_else(|| random_leaf(spec, s, rng)))
        .collect();
    Some(Term::app(op, args).expect("slots follow the signature"))
}
