use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BinOp, Const, Environment, Op, Prim, Sort, Term, Value, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Arith,
    Bool,
    List,
}

impl Domain {
    pub const ALL: [Domain; 3] = [Domain::Arith, Domain::Bool, Domain::List];

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Arith => "arith",
            Domain::Bool => "bool",
            Domain::List => "list",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Domain {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "arith" => Ok(Domain::Arith),
            "bool" => Ok(Domain::Bool),
            "list" => Ok(Domain::List),
            _ => Err(format!("unknown domain `{s}` (expected arith, bool or list)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Soundness {
    RandomSamples(usize),
    Exhaustive(usize),
}

/// Integer range for sampled environments.
pub const SAMPLE_INT_RANGE: (i64, i64) = (-10, 10);
/// Inclusive bounds on sampled list lengths.
pub const SAMPLE_LIST_LEN: (usize, usize) = (0, 5);

/// One substrate grammar: operators, variables, constants and primitives in
/// their fixed canonical order.
#[derive(Clone, Debug)]
pub struct Substrate {
    pub domain: Domain,
    pub ops: Vec<Op>,
    pub vars: Vec<Var>,
    pub consts: Vec<Const>,
    pub prims: Vec<Prim>,
    pub soundness: Soundness,
    leaves: [Vec<Term>; 5],
}

fn sort_slot(sort: Sort) -> usize {
    match sort {
        Sort::Int => 0,
        Sort::Bool => 1,
        Sort::IntList => 2,
        Sort::Fun1 => 3,
        Sort::Pred => 4,
    }
}

impl Substrate {
    pub fn new(domain: Domain) -> Substrate {
        let (ops, vars, consts, prims, soundness) = match domain {
            Domain::Arith => (
                vec![Op::Add, Op::Mul],
                vec![Var::X, Var::Y, Var::Z],
                vec![Const::Int(0), Const::Int(1), Const::Int(2)],
                vec![],
                Soundness::RandomSamples(12),
            ),
            Domain::Bool => (
                vec![Op::And, Op::Or, Op::Not],
                vec![Var::P, Var::Q, Var::R],
                vec![Const::Bool(false), Const::Bool(true)],
                vec![],
                Soundness::Exhaustive(8),
            ),
            Domain::List => {
                let mut ops = vec![Op::Map, Op::Filter];
                ops.extend(BinOp::ALL.iter().map(|&b| Op::Fold(b)));
                ops.extend([Op::Reverse, Op::Length, Op::Append, Op::Cons, Op::Add, Op::Sub, Op::Mul]);
                let mut prims = Prim::FUNS.to_vec();
                prims.extend(Prim::PREDS);
                (
                    ops,
                    vec![Var::Xs, Var::Ys, Var::X, Var::Y, Var::Z],
                    vec![Const::Int(0), Const::Int(1), Const::Int(2), Const::Nil],
                    prims,
                    Soundness::RandomSamples(12),
                )
            }
        };
        let mut leaves: [Vec<Term>; 5] = Default::default();
        for &v in &vars {
            leaves[sort_slot(v.sort())].push(Term::var(v));
        }
        for &c in &consts {
            leaves[sort_slot(c.sort())].push(Term::constant(c));
        }
        for &p in &prims {
            leaves[sort_slot(p.sort())].push(Term::prim(p));
        }
        Substrate { domain, ops, vars, consts, prims, soundness, leaves }
    }

    /// Leaves of `sort`: variables, then constants, then primitives.
    pub fn leaves(&self, sort: Sort) -> &[Term] {
        &self.leaves[sort_slot(sort)]
    }

    pub fn ops_producing(&self, sort: Sort) -> impl Iterator<Item = Op> + '_ {
        self.ops.iter().copied().filter(move |op| op.result_sort() == sort)
    }

    /// Result sorts a discovery candidate may take.
    pub fn principal_sorts(&self) -> &'static [Sort] {
        match self.domain {
            Domain::Arith => &[Sort::Int],
            Domain::Bool => &[Sort::Bool],
            Domain::List => &[Sort::IntList, Sort::Int],
        }
    }

    /// Sorts over which terms may be enumerated.
    pub fn sorts(&self) -> Vec<Sort> {
        [Sort::Int, Sort::Bool, Sort::IntList, Sort::Fun1, Sort::Pred]
            .into_iter()
            .filter(|&s| !self.leaves(s).is_empty())
            .collect()
    }

    pub fn sample_value<R: Rng + ?Sized>(sort: Sort, rng: &mut R) -> Value {
        let (lo, hi) = SAMPLE_INT_RANGE;
        match sort {
            Sort::Int => Value::Int(rng.gen_range(lo..=hi)),
            Sort::Bool => Value::Bool(rng.gen()),
            Sort::IntList => {
                let len = rng.gen_range(SAMPLE_LIST_LEN.0..=SAMPLE_LIST_LEN.1);
                Value::List((0..len).map(|_| rng.gen_range(lo..=hi)).collect())
            }
            Sort::Fun1 | Sort::Pred => unreachable!("no variables of function sort"),
        }
    }

    /// A random environment binding every variable of the grammar.
    pub fn random_environment<R: Rng + ?Sized>(&self, rng: &mut R) -> Environment {
        let mut env = Environment::new();
        for &v in &self.vars {
            env.bind(v, Self::sample_value(v.sort(), rng));
        }
        env
    }

    /// All 2^n truth assignments to the variables; only meaningful for bool.
    pub fn all_worlds(&self) -> Vec<Environment> {
        let n = self.vars.len();
        (0..1usize << n)
            .map(|mask| {
                let mut env = Environment::new();
                for (i, &v) in self.vars.iter().enumerate() {
                    env.bind(v, Value::Bool(mask >> (n - 1 - i) & 1 == 1));
                }
                env
            })
            .collect()
    }

    /// Environments for a soundness check: exhaustive worlds or fresh samples.
    pub fn soundness_environments<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Environment> {
        match self.soundness {
            Soundness::Exhaustive(_) => self.all_worlds(),
            Soundness::RandomSamples(n) => (0..n).map(|_| self.random_environment(rng)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grammars_have_expected_leaves() {
        let arith = Substrate::new(Domain::Arith);
        assert_eq!(arith.leaves(Sort::Int).len(), 6);
        let b = Substrate::new(Domain::Bool);
        let names: Vec<String> = b.leaves(Sort::Bool).iter().map(|t| t.to_string()).collect();
        assert_eq!(names, ["p", "q", "r", "0", "1"]);
        assert_eq!(b.all_worlds().len(), 8);
        let list = Substrate::new(Domain::List);
        assert_eq!(list.leaves(Sort::Fun1).len(), 6);
        assert_eq!(list.leaves(Sort::Pred).len(), 6);
        assert_eq!(list.leaves(Sort::IntList).len(), 3);
        assert_eq!(list.leaves(Sort::Int).len(), 6);
    }

    #[test]
    fn sampled_values_stay_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let list = Substrate::new(Domain::List);
        for _ in 0..500 {
            let env = list.random_environment(&mut rng);
            match env.get(Var::Xs) {
                Some(Value::List(xs)) => {
                    assert!(xs.len() <= 5);
                    assert!(xs.iter().all(|v| (-10..=10).contains(v)));
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }
}
