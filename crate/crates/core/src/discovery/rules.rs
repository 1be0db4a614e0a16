//! Oriented rewrite rules and hit-count-ordered normalization.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use crate::term::{instantiate, matches_with, parse_rule, Kind, Op, ParseError, Substitution, Term};

/// Rewrite steps allowed per normalization.
pub const NORMALIZE_STEP_CAP: usize = 48;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
    pub hit_count: u64,
    pub insertion_index: usize,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} => {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("rule sides have different sorts")]
    SortMismatch,
    #[error("left-hand side must be an operator application")]
    LhsNotApplication,
    #[error("right-hand side uses a pattern variable absent from the left-hand side")]
    UnboundRhsVariable,
    #[error("rule sides must be patterns without free substrate variables")]
    FreeVariable,
}

/// Result of [`RuleSet::normalize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub term: Term,
    pub steps: usize,
}

/// Ordered rule set indexed by the root operator of each left-hand side.
#[derive(Clone, Debug, Default)]
pub struct RuleSet {
    rules: Vec<Rule>,
    by_root: HashMap<Op, Vec<usize>>,
    seen: HashSet<(Term, Term)>,
}

/// Lower is tried first: more hits, then earlier insertion.
fn rank(rule: &Rule) -> (std::cmp::Reverse<u64>, usize) {
    (std::cmp::Reverse(rule.hit_count), rule.insertion_index)
}

struct Redex {
    rule: usize,
    path: Vec<usize>,
    subst: Substitution,
}

impl RuleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Rules in insertion order.
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn contains(&self, lhs: &Term, rhs: &Term) -> bool {
        self.seen.contains(&(lhs.clone(), rhs.clone()))
    }

    /// Adds a rule. Returns `Ok(false)` when the identical rule is already present.
    ///
    /// Size orientation is not checked here; the discovery loop enforces it.
    pub fn insert(&mut self, lhs: Term, rhs: Term) -> Result<bool, RuleError> {
        if lhs.sort() != rhs.sort() {
            return Err(RuleError::SortMismatch);
        }
        let Some(op) = lhs.op() else {
            return Err(RuleError::LhsNotApplication);
        };
        if !lhs.free_vars().is_empty() || !rhs.free_vars().is_empty() {
            return Err(RuleError::FreeVariable);
        }
        let lvars = lhs.pattern_vars();
        if rhs.pattern_vars().iter().any(|v| !lvars.contains(v)) {
            return Err(RuleError::UnboundRhsVariable);
        }
        if !self.seen.insert((lhs.clone(), rhs.clone())) {
            return Ok(false);
        }
        let insertion_index = self.rules.len();
        self.by_root.entry(op).or_default().push(insertion_index);
        self.rules.push(Rule { lhs, rhs, hit_count: 0, insertion_index });
        Ok(true)
    }

    /// Rules sorted by application priority.
    pub fn ordered(&self) -> Vec<&Rule> {
        let mut v: Vec<&Rule> = self.rules.iter().collect();
        v.sort_by_key(|r| rank(r));
        v
    }

    /// The highest-priority rule applicable anywhere in `term`, at its
    /// leftmost-outermost position.
    fn find_redex(&self, term: &Term) -> Option<Redex> {
        let mut best: Option<Redex> = None;
        let mut path = Vec::new();
        let mut scratch = Substitution::default();
        self.scan(term, &mut path, &mut scratch, &mut best);
        best
    }

    fn scan(&self, t: &Term, path: &mut Vec<usize>, scratch: &mut Substitution, best: &mut Option<Redex>) {
        let Kind::App(op, args) = t.kind() else {
            return;
        };
        if let Some(candidates) = self.by_root.get(op) {
            for &ri in candidates {
                let rule = &self.rules[ri];
                if let Some(b) = best {
                    if rank(rule) >= rank(&self.rules[b.rule]) {
                        continue;
                    }
                }
                if matches_with(&rule.lhs, t, scratch) {
                    *best = Some(Redex { rule: ri, path: path.clone(), subst: scratch.clone() });
                }
            }
        }
        for (i, a) in args.iter().enumerate() {
            path.push(i);
            self.scan(a, path, scratch, best);
            path.pop();
        }
    }

    /// True when some rule matches some position of `term`. Hit counts are untouched.
    pub fn is_reducible(&self, term: &Term) -> bool {
        let mut scratch = Substitution::default();
        let mut found = false;
        term.visit_preorder(&mut |t| {
            if found {
                return;
            }
            if let Some(op) = t.op() {
                if let Some(candidates) = self.by_root.get(&op) {
                    found = candidates.iter().any(|&ri| matches_with(&self.rules[ri].lhs, t, &mut scratch));
                }
            }
        });
        found
    }

    /// Rewrites with the highest-priority applicable rule until no rule
    /// applies or [`NORMALIZE_STEP_CAP`] steps have been taken. Every
    /// application increments the applied rule's hit count.
    pub fn normalize(&mut self, term: &Term) -> Normalized {
        let mut current = term.clone();
        let mut steps = 0;
        while steps < NORMALIZE_STEP_CAP {
            let Some(redex) = self.find_redex(&current) else {
                break;
            };
            let rule = &mut self.rules[redex.rule];
            let replacement = instantiate(&rule.rhs, &redex.subst);
            rule.hit_count += 1;
            current = current.replace_at(&redex.path, replacement);
            steps += 1;
        }
        Normalized { term: current, steps }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RuleTextError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One `lhs => rhs` line per rule, in insertion order.
pub fn write_rules<W: Write>(rules: &RuleSet, mut w: W) -> std::io::Result<()> {
    for r in rules.rules() {
        writeln!(w, "{r}")?;
    }
    Ok(())
}

/// Reads a rule file; blank lines and lines starting with `#` are skipped.
pub fn read_rules<R: BufRead>(reader: R) -> Result<Vec<(Term, Term)>, RuleTextError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        out.push(parse_rule(text, None).map_err(|source| RuleTextError::Parse { line: i + 1, source })?);
    }
    Ok(out)
}
