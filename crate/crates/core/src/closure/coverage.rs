use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::term::{enumerate_terms, match_term, EnumerationError, Substrate, Term, DEFAULT_ENUMERATION_CAP};

/// Where a pattern must match an enumerated term to cover it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Position {
    /// The whole term is an instance of the pattern.
    #[default]
    Root,
    /// Some subterm is an instance of the pattern.
    Subterm,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverageError {
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error("at least one rule is required")]
    NoRules,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageReport {
    pub fractions: Vec<f64>,
    pub mu_hat: f64,
    /// `|Cov_i ∩ Cov_j| / min(|Cov_i|, |Cov_j|)`, 0 when either set is empty.
    pub overlap: Vec<Vec<f64>>,
    pub depth: u32,
    pub position: Position,
}

fn covers(pattern: &Term, term: &Term, position: Position) -> bool {
    match position {
        Position::Root => match_term(pattern, term).is_some(),
        Position::Subterm => {
            let mut hit = false;
            term.visit_preorder(&mut |s| hit = hit || (s.sort() == pattern.sort() && match_term(pattern, s).is_some()));
            hit
        }
    }
}

/// Indices into the canonical enumeration of `T_d` (sort of `pattern`) covered
/// by `pattern`, and the size of `T_d`.
pub fn coverage_set(
    pattern: &Term,
    spec: &Substrate,
    d: u32,
    position: Position,
) -> Result<(Vec<usize>, usize), EnumerationError> {
    let terms = enumerate_terms(spec, pattern.sort(), d, DEFAULT_ENUMERATION_CAP)?;
    let set = terms.iter().enumerate().filter(|(_, t)| covers(pattern, t, position)).map(|(i, _)| i).collect();
    Ok((set, terms.len()))
}

/// `|Cov(pattern)| / |T_d|`.
pub fn coverage_fraction(pattern: &Term, spec: &Substrate, d: u32, position: Position) -> Result<f64, EnumerationError> {
    let (set, total) = coverage_set(pattern, spec, d, position)?;
    Ok(set.len() as f64 / total as f64)
}

fn intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Unweighted mean coverage of the left-hand sides and their pairwise overlap.
///
/// Patterns of different sorts live in different `T_d` and never overlap.
pub fn estimate_mu(lhs: &[Term], spec: &Substrate, d: u32, position: Position) -> Result<CoverageReport, CoverageError> {
    if lhs.is_empty() {
        return Err(CoverageError::NoRules);
    }
    let sets = lhs.iter().map(|p| coverage_set(p, spec, d, position)).collect::<Result<Vec<_>, _>>()?;
    let fractions: Vec<f64> = sets.iter().map(|(s, total)| s.len() as f64 / *total as f64).collect();
    let mu_hat = fractions.iter().sum::<f64>() / fractions.len() as f64;
    let overlap = (0..lhs.len())
        .map(|i| {
            (0..lhs.len())
                .map(|j| {
                    let (a, b) = (&sets[i].0, &sets[j].0);
                    let m = a.len().min(b.len());
                    if m == 0 || lhs[i].sort() != lhs[j].sort() {
                        0.0
                    } else {
                        intersection_len(a, b) as f64 / m as f64
                    }
                })
                .collect()
        })
        .collect();
    Ok(CoverageReport { fractions, mu_hat, overlap, depth: d, position })
}

impl CoverageReport {
    /// `rule,fraction` rows.
    pub fn write_fractions_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "rule,fraction")?;
        for (i, f) in self.fractions.iter().enumerate() {
            writeln!(w, "{i},{f}")?;
        }
        Ok(())
    }

    /// Square matrix with a `rule` header column.
    pub fn write_overlap_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = String::from("rule");
        for i in 0..self.overlap.len() {
            write!(header, ",{i}").unwrap();
        }
        writeln!(w, "{header}")?;
        for (i, row) in self.overlap.iter().enumerate() {
            let mut line = i.to_string();
            for v in row {
                write!(line, ",{v}").unwrap();
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_term, Domain, Sort};

    fn pat(s: &str, sort: Sort) -> Term {
        parse_term(s, Some(sort)).unwrap()
    }

    #[test]
    fn universal_pattern_covers_everything() {
        let spec = Substrate::new(Domain::Arith);
        assert_eq!(coverage_fraction(&pat("A", Sort::Int), &spec, 2, Position::Root).unwrap(), 1.0);
        let r = estimate_mu(&[pat("A", Sort::Int)], &spec, 2, Position::Root).unwrap();
        assert_eq!(r.mu_hat, 1.0);
        assert_eq!(r.overlap, vec![vec![1.0]]);
    }

    #[test]
    fn concrete_term_covers_itself() {
        let spec = Substrate::new(Domain::Arith);
        let f = coverage_fraction(&pat("(+ x 1)", Sort::Int), &spec, 2, Position::Root).unwrap();
        assert_eq!(f, 1.0 / 78.0);
    }

    #[test]
    fn addition_pattern_over_depth_two() {
        let spec = Substrate::new(Domain::Arith);
        // every 6 x 6 pair of leaves under a root `+`
        let f = coverage_fraction(&pat("(+ A B)", Sort::Int), &spec, 2, Position::Root).unwrap();
        assert_eq!(f, 36.0 / 78.0);
        let sub = coverage_fraction(&pat("(+ A B)", Sort::Int), &spec, 2, Position::Subterm).unwrap();
        assert_eq!(sub, f);
    }

    #[test]
    fn disjoint_roots_do_not_overlap() {
        let spec = Substrate::new(Domain::Arith);
        let r = estimate_mu(&[pat("(+ A B)", Sort::Int), pat("(* A B)", Sort::Int)], &spec, 2, Position::Root).unwrap();
        assert_eq!(r.overlap[0][1], 0.0);
        assert_eq!(r.overlap[1][0], 0.0);
        assert_eq!(r.overlap[0][0], 1.0);
    }

    #[test]
    fn instantiation_never_enlarges_coverage() {
        let spec = Substrate::new(Domain::Arith);
        let chain = ["(+ A B)", "(+ A A)", "(+ x A)", "(+ x x)"];
        let fr: Vec<f64> =
            chain.iter().map(|p| coverage_fraction(&pat(p, Sort::Int), &spec, 3, Position::Root).unwrap()).collect();
        assert!(fr.windows(2).all(|w| w[0] >= w[1]), "{fr:?}");
    }

    #[test]
    fn csv_shapes() {
        let spec = Substrate::new(Domain::Bool);
        let r = estimate_mu(&[pat("(and A B)", Sort::Bool), pat("(or A A)", Sort::Bool)], &spec, 2, Position::Root).unwrap();
        let mut buf = Vec::new();
        r.write_overlap_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("rule,0,1"));
        assert_eq!(text.lines().count(), 3);
        assert!(estimate_mu(&[], &spec, 2, Position::Root).is_err());
    }
}
