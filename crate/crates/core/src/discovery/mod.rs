//! Rule discovery over a substrate.

mod engine;
mod generator;
mod rules;

pub use engine::{
    discover, filter_passes, run, sound, ArchConfig, ConfigError, DiscoveryRun, FilterKind, Trajectory,
    ENGINE_VERSION, PROBE_COUNT, SWEEP_BATCH_SIZES, SWEEP_DEPTHS,
};
pub use generator::{generate_candidate, random_leaf, random_term, GeneratorKind, GeneratorState, LEAF_PROBABILITY};
pub use rules::{read_rules, write_rules, Normalized, Rule, RuleError, RuleSet, RuleTextError, NORMALIZE_STEP_CAP};
