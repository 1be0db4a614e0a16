use serde::{Deserialize, Serialize};

use crate::growth::GrowthSeries;

/// Starting size used when `n0 = 0` and `k > 0`, where `S = 0` is a fixed point.
pub const N0_LIFT: f64 = 1e-6;

/// `dS/dt = K · S^k · exp(−μ S)`, `S(0) = n0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureParams {
    #[serde(rename = "K")]
    pub big_k: f64,
    pub k: f64,
    pub mu: f64,
    pub n0: f64,
}

impl ClosureParams {
    pub fn rate(&self, s: f64) -> f64 {
        self.big_k * s.max(0.0).powf(self.k) * (-self.mu * s).exp()
    }

    /// Size at which the rate has dropped by `1/e`; `None` for `μ ≤ 0`.
    pub fn knee(&self) -> Option<f64> {
        (self.mu > 0.0).then(|| 1.0 / self.mu)
    }

    fn start(&self) -> f64 {
        if self.n0 == 0.0 && self.k > 0.0 {
            N0_LIFT
        } else {
            self.n0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("k = {0} must be below 1 for the power-law solution")]
    BlowUp(f64),
    #[error("t = {0} must be non-negative")]
    NegativeTime(f64),
    #[error("step {0} must be positive and finite")]
    Step(f64),
    #[error("end time {0} must be at least 1")]
    EndTime(f64),
}

/// Classical RK4 with `ceil(1/dt)` equal steps per unit time, sampled at
/// `t = 1, 2, ..., floor(t_end)`.
pub fn simulate_ode(params: &ClosureParams, t_end: f64, dt: f64) -> Result<GrowthSeries, DomainError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DomainError::Step(dt));
    }
    if !(t_end >= 1.0 && t_end.is_finite()) {
        return Err(DomainError::EndTime(t_end));
    }
    let steps = (1.0 / dt).ceil() as usize;
    let h = 1.0 / steps as f64;
    let units = t_end.floor() as usize;
    let f = |s: f64| params.rate(s);
    let mut s = params.start();
    let mut out = Vec::with_capacity(units);
    for _ in 0..units {
        for _ in 0..steps {
            let k1 = f(s);
            let k2 = f(s + 0.5 * h * k1);
            let k3 = f(s + 0.5 * h * k2);
            let k4 = f(s + h * k3);
            s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            debug_assert!(s >= 0.0);
        }
        out.push(s);
    }
    Ok(GrowthSeries::from_counts(out).expect("RK4 output is finite and non-negative"))
}

/// `((1 − k) K t)^{1/(1 − k)}`, the μ = 0 solution from `S(0) = 0`.
pub fn closed_form_power(big_k: f64, k: f64, t: f64) -> Result<f64, DomainError> {
    if k >= 1.0 {
        return Err(DomainError::BlowUp(k));
    }
    if t < 0.0 {
        return Err(DomainError::NegativeTime(t));
    }
    Ok(((1.0 - k) * big_k * t).powf(power_exponent(k)?))
}

/// The μ = 0 solution from `S(0) = n0`: `(n0^{1−k} + (1 − k) K t)^{1/(1 − k)}`.
pub fn closed_form_ivp(big_k: f64, k: f64, n0: f64, t: f64) -> Result<f64, DomainError> {
    if k >= 1.0 {
        return Err(DomainError::BlowUp(k));
    }
    if t < 0.0 {
        return Err(DomainError::NegativeTime(t));
    }
    Ok((n0.powf(1.0 - k) + (1.0 - k) * big_k * t).powf(power_exponent(k)?))
}

/// `b = 1/(1 − k)`.
pub fn power_exponent(k: f64) -> Result<f64, DomainError> {
    if k >= 1.0 {
        return Err(DomainError::BlowUp(k));
    }
    Ok(1.0 / (1.0 - k))
}
