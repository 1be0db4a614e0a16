//! Mean-field closure model: the growth ODE, its power-law limit, and
//! coverage-based estimates of the closure rate μ.

mod coverage;
mod ode;

pub use coverage::{coverage_fraction, coverage_set, estimate_mu, CoverageError, CoverageReport, Position};
pub use ode::{closed_form_ivp, closed_form_power, power_exponent, simulate_ode, ClosureParams, DomainError, N0_LIFT};
