//! The epoch loop: generate, normalize, group, check, generalize, filter, commit.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::generator::{generate_candidate, GeneratorKind, GeneratorState};
use super::rules::RuleSet;
use crate::rng;
use crate::term::{eval, generalize, Domain, Environment, Soundness, Substrate, Term, Value};

pub const ENGINE_VERSION: &str = concat!("eqgrowth-engine/", env!("CARGO_PKG_VERSION"));

pub const SWEEP_DEPTHS: [u32; 3] = [2, 3, 4];
pub const SWEEP_BATCH_SIZES: [usize; 5] = [40, 60, 80, 120, 160];

/// Probe environments used to fingerprint normal forms in sampled domains.
pub const PROBE_COUNT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Any,
    Novelty,
}

impl FilterKind {
    pub const ALL: [FilterKind; 2] = [FilterKind::Any, FilterKind::Novelty];

    pub fn as_str(self) -> &'static str {
        match self {
            FilterKind::Any => "any",
            FilterKind::Novelty => "novelty",
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FilterKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "any" => Ok(FilterKind::Any),
            "novelty" => Ok(FilterKind::Novelty),
            _ => Err(format!("unknown filter `{s}` (expected any or novelty)")),
        }
    }
}

/// One sweep point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArchConfig {
    pub domain: Domain,
    pub generator: GeneratorKind,
    pub filter: FilterKind,
    pub depth: u32,
    pub batch_size: usize,
    pub seed: u64,
    pub epochs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("depth {0} outside the sweep set {{2, 3, 4}}")]
    Depth(u32),
    #[error("batch size {0} outside the sweep set {{40, 60, 80, 120, 160}}")]
    BatchSize(usize),
    #[error("depth must be at least 2, got {0}")]
    DepthTooSmall(u32),
    #[error("batch size must be positive")]
    EmptyBatch,
}

impl ArchConfig {
    /// Checks the config against the sweep sets; `allow_override` admits any
    /// depth ≥ 2 and any positive batch size.
    pub fn validate(&self, allow_override: bool) -> Result<(), ConfigError> {
        if self.depth < 2 {
            return Err(ConfigError::DepthTooSmall(self.depth));
        }
        if self.batch_size == 0 {
            return Err(ConfigError::EmptyBatch);
        }
        if !allow_override {
            if !SWEEP_DEPTHS.contains(&self.depth) {
                return Err(ConfigError::Depth(self.depth));
            }
            if !SWEEP_BATCH_SIZES.contains(&self.batch_size) {
                return Err(ConfigError::BatchSize(self.batch_size));
            }
        }
        Ok(())
    }

    /// Stable identifier used for resumable sweeps and report rows.
    pub fn key(&self) -> String {
        format!(
            "{}/{}/{}/d{}/bs{}/s{}/e{}",
            self.domain, self.generator, self.filter, self.depth, self.batch_size, self.seed, self.epochs
        )
    }
}

/// Cumulative committed-rule counts, one entry per epoch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    #[serde(flatten)]
    pub config: ArchConfig,
    pub sizes: Vec<usize>,
    pub engine_version: String,
    pub prng_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_per_epoch: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("trajectory serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Trajectory, serde_json::Error> {
        serde_json::from_str(line)
    }
}

/// Output of a discovery run: the trajectory and the final rule set.
pub struct DiscoveryRun {
    pub trajectory: Trajectory,
    pub rules: RuleSet,
}

/// Equality on every soundness environment: all 8 worlds for bool, 12 fresh samples otherwise.
pub fn sound<R: rand::Rng + ?Sized>(lhs: &Term, rhs: &Term, spec: &Substrate, rng: &mut R) -> bool {
    spec.soundness_environments(rng).iter().all(|env| agree(lhs, rhs, env))
}

fn agree(lhs: &Term, rhs: &Term, env: &Environment) -> bool {
    match (eval(lhs, env), eval(rhs, env)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

/// `any` accepts everything; `novelty` accepts only left sides no current rule can rewrite.
pub fn filter_passes(kind: FilterKind, lhs: &Term, _rhs: &Term, rules: &RuleSet) -> bool {
    match kind {
        FilterKind::Any => true,
        FilterKind::Novelty => !rules.is_reducible(lhs),
    }
}

/// Semantic fingerprint environments for grouping.
fn probe_environments(spec: &Substrate, seed: u64) -> Vec<Environment> {
    match spec.soundness {
        Soundness::Exhaustive(_) => spec.all_worlds(),
        Soundness::RandomSamples(_) => {
            let mut rng = rng::stream(seed, rng::STREAM_PROBES);
            (0..PROBE_COUNT).map(|_| spec.random_environment(&mut rng)).collect()
        }
    }
}

fn fingerprint(t: &Term, envs: &[Environment]) -> Option<Vec<Value>> {
    envs.iter().map(|e| eval(t, e).ok()).collect()
}

pub fn discover(spec: &Substrate, config: &ArchConfig) -> Trajectory {
    run(spec, config).trajectory
}

/// One discovery run; also returns the committed rule set.
pub fn run(spec: &Substrate, config: &ArchConfig) -> DiscoveryRun {
    let mut gen = GeneratorState::new(config.seed);
    let mut sound_rng = rng::stream(config.seed, rng::STREAM_SOUNDNESS);
    let probes = probe_environments(spec, config.seed);
    let mut rules = RuleSet::new();
    let mut sizes = Vec::with_capacity(config.epochs);

    for _ in 0..config.epochs {
        let mut groups: Vec<Vec<Term>> = Vec::new();
        let mut index: HashMap<(crate::term::Sort, Vec<Value>), usize> = HashMap::new();
        for _ in 0..config.batch_size {
            let cand = generate_candidate(&mut gen, config.generator, spec, config.depth);
            let nf = rules.normalize(&cand).term;
            let Some(fp) = fingerprint(&nf, &probes) else { continue };
            let slot = *index.entry((nf.sort(), fp)).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[slot].push(cand);
        }
        for group in &groups {
            if group.len() < 2 {
                continue;
            }
            let (l, r) = pick(group);
            if l.size() <= r.size() || !sound(&l, &r, spec, &mut sound_rng) {
                continue;
            }
            let (gl, gr) = generalize(&l, &r);
            if !filter_passes(config.filter, &gl, &gr, &rules) {
                continue;
            }
            if let Ok(true) = rules.insert(gl, gr) {
                gen.harvest(&l);
                gen.harvest(&r);
            }
        }
        sizes.push(rules.len());
    }
    DiscoveryRun {
        trajectory: Trajectory {
            config: config.clone(),
            sizes,
            engine_version: ENGINE_VERSION.to_string(),
            prng_id: rng::PRNG_ID.to_string(),
            wall_clock_per_epoch: None,
        },
        rules,
    }
}

fn largest<'a>(it: impl Iterator<Item = &'a Term>) -> Option<Term> {
    it.max_by(|a, b| a.size().cmp(&b.size()).then(b.cmp(a))).cloned()
}

fn smallest<'a>(it: impl Iterator<Item = &'a Term>) -> Option<Term> {
    it.min_by(|a, b| a.size().cmp(&b.size()).then(a.cmp(b))).cloned()
}

/// ℓ′ and r′: the largest and smallest candidate of a semantic class.
fn pick(group: &[Term]) -> (Term, Term) {
    (largest(group.iter()).expect("group is non-empty"), smallest(group.iter()).expect("group is non-empty"))
}
