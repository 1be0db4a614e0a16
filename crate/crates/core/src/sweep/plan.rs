use serde::{Deserialize, Serialize};

use crate::discovery::{ArchConfig, ConfigError, FilterKind, GeneratorKind, SWEEP_BATCH_SIZES, SWEEP_DEPTHS};
use crate::term::Domain;

/// Cartesian product of architecture choices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepPlan {
    pub domains: Vec<Domain>,
    pub generators: Vec<GeneratorKind>,
    pub filters: Vec<FilterKind>,
    pub depths: Vec<u32>,
    pub batch_sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub epochs: usize,
    /// Config keys to leave out of the product.
    pub exclude: Vec<String>,
    /// Worker threads; `None` uses every available core.
    pub workers: Option<usize>,
    /// Admit depths and batch sizes outside the sweep sets.
    pub allow_override: bool,
}

impl Default for SweepPlan {
    fn default() -> Self {
        SweepPlan::short_range()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("{key}: {source}")]
    Config { key: String, source: ConfigError },
    #[error("plan field `{0}` is empty")]
    Empty(&'static str),
}

impl SweepPlan {
    /// Full short-range grid, 30 epochs, seeds 0 and 1: 240 configs per domain.
    pub fn short_range() -> SweepPlan {
        SweepPlan {
            domains: Domain::ALL.to_vec(),
            generators: GeneratorKind::ALL.to_vec(),
            filters: FilterKind::ALL.to_vec(),
            depths: SWEEP_DEPTHS.to_vec(),
            batch_sizes: SWEEP_BATCH_SIZES.to_vec(),
            seeds: vec![0, 1],
            epochs: 30,
            exclude: Vec::new(),
            workers: None,
            allow_override: false,
        }
    }

    /// List substrate, compositional generator, no filter, depth 2, batch 80, seeds 0–4, 500 epochs.
    pub fn long_range() -> SweepPlan {
        SweepPlan {
            domains: vec![Domain::List],
            generators: vec![GeneratorKind::Compositional],
            filters: vec![FilterKind::Any],
            depths: vec![2],
            batch_sizes: vec![80],
            seeds: (0..5).collect(),
            epochs: 500,
            ..SweepPlan::short_range()
        }
    }

    pub fn empty() -> SweepPlan {
        SweepPlan {
            domains: vec![],
            generators: vec![],
            filters: vec![],
            depths: vec![],
            batch_sizes: vec![],
            seeds: vec![],
            ..SweepPlan::short_range()
        }
    }

    /// Every config in the product, minus exclusions, in plan order.
    pub fn configs(&self) -> Result<Vec<ArchConfig>, PlanError> {
        let mut out = Vec::new();
        for &domain in &self.domains {
            for &generator in &self.generators {
                for &filter in &self.filters {
                    for &depth in &self.depths {
                        for &batch_size in &self.batch_sizes {
                            for &seed in &self.seeds {
                                let c = ArchConfig { domain, generator, filter, depth, batch_size, seed, epochs: self.epochs };
                                c.validate(self.allow_override)
                                    .map_err(|source| PlanError::Config { key: c.key(), source })?;
                                if !self.exclude.contains(&c.key()) {
                                    out.push(c);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_size() {
        let c = SweepPlan::short_range().configs().unwrap();
        assert_eq!(c.len(), 720);
        assert_eq!(c.iter().filter(|c| c.domain == Domain::List).count(), 240);
        assert_eq!(SweepPlan::long_range().configs().unwrap().len(), 5);
        assert!(SweepPlan::empty().configs().unwrap().is_empty());
    }

    #[test]
    fn exclusions_and_validation() {
        let mut p = SweepPlan::long_range();
        p.exclude.push("list/compositional/any/d2/bs80/s3/e500".into());
        assert_eq!(p.configs().unwrap().len(), 4);
        p.batch_sizes = vec![7];
        assert!(p.configs().is_err());
        p.allow_override = true;
        // the exclusion names batch size 80, so it no longer applies
        assert_eq!(p.configs().unwrap().len(), 5);
    }

    #[test]
    fn json_with_defaults() {
        let p: SweepPlan = serde_json::from_str(r#"{"domains":["bool"],"seeds":[3],"epochs":5}"#).unwrap();
        assert_eq!(p.configs().unwrap().len(), 4 * 2 * 3 * 5);
        assert!(serde_json::from_str::<SweepPlan>(r#"{"domain":["bool"]}"#).is_err());
    }
}
