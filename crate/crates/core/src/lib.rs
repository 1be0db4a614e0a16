pub mod closure;
pub mod config;
pub mod discovery;
pub mod growth;
pub mod ingest;
pub mod regress;
pub mod rng;
pub mod sweep;
pub mod term;
