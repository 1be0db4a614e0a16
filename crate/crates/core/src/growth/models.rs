//! Growth-law families: value, analytic gradient, feasibility and start points.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::series::GrowthSeries;

/// Saturating fits are degenerate beyond these bounds.
pub const MAX_ABS_K: f64 = 5.0;
pub const MAX_ABS_MU: f64 = 0.1;
/// A stretched exponential whose time scale exceeds this multiple of the
/// observed span has collapsed onto a power law.
pub const STRETCHED_TAU_SPAN: f64 = 10.0;
/// Likewise for a log-normal whose median `e^m` lies beyond this multiple of the span.
pub const LOG_NORMAL_MEDIAN_SPAN: f64 = 10.0;
/// A run whose time scale passes this multiple of the span is drifting
/// towards the power-law limit and is abandoned.
pub const RUNAWAY_SPAN: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    PowerLaw,
    StretchedExp,
    SaturatingPl,
    Linear,
    LogNormal,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] =
        [ModelKind::PowerLaw, ModelKind::StretchedExp, ModelKind::SaturatingPl, ModelKind::Linear, ModelKind::LogNormal];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::PowerLaw => "power_law",
            ModelKind::StretchedExp => "stretched_exp",
            ModelKind::SaturatingPl => "saturating_pl",
            ModelKind::Linear => "linear",
            ModelKind::LogNormal => "log_normal",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::PowerLaw => &["a", "b"],
            ModelKind::StretchedExp => &["a", "tau", "beta"],
            ModelKind::SaturatingPl => &["a", "k", "mu"],
            ModelKind::Linear => &["a", "b"],
            ModelKind::LogNormal => &["a", "m", "s"],
        }
    }

    pub fn n_params(self) -> usize {
        self.param_names().len()
    }

    pub fn eval(self, p: &[f64], t: f64) -> f64 {
        match self {
            ModelKind::PowerLaw => p[0] * t.powf(p[1]),
            ModelKind::StretchedExp => p[0] * -(-(t / p[1]).powf(p[2])).exp_m1(),
            ModelKind::SaturatingPl => {
                let w = t.powf(p[1]);
                p[0] * w / (1.0 + p[2] * w)
            }
            ModelKind::Linear => p[0] + p[1] * t,
            ModelKind::LogNormal => p[0] * normal_cdf((t.ln() - p[1]) / p[2]),
        }
    }

    /// Partial derivatives with respect to each parameter at `t`.
    pub fn gradient(self, p: &[f64], t: f64, g: &mut [f64]) {
        match self {
            ModelKind::PowerLaw => {
                let w = t.powf(p[1]);
                g[0] = w;
                g[1] = p[0] * w * t.ln();
            }
            ModelKind::StretchedExp => {
                let r = t / p[1];
                let u = r.powf(p[2]);
                let e = (-u).exp();
                g[0] = -(-u).exp_m1();
                g[1] = -p[0] * e * p[2] * u / p[1];
                g[2] = p[0] * e * u * r.ln();
            }
            ModelKind::SaturatingPl => {
                let w = t.powf(p[1]);
                let d = 1.0 + p[2] * w;
                g[0] = w / d;
                g[1] = p[0] * w * t.ln() / (d * d);
                g[2] = -p[0] * w * w / (d * d);
            }
            ModelKind::Linear => {
                g[0] = 1.0;
                g[1] = t;
            }
            ModelKind::LogNormal => {
                let z = (t.ln() - p[1]) / p[2];
                let phi = normal_pdf(z);
                g[0] = normal_cdf(z);
                g[1] = -p[0] * phi / p[2];
                g[2] = -p[0] * phi * z / p[2];
            }
        }
    }

    /// Parameter region the optimizer may step into.
    pub fn feasible(self, p: &[f64], series: &GrowthSeries) -> bool {
        if p.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            ModelKind::Linear => true,
            ModelKind::PowerLaw => p[0] > 0.0,
            ModelKind::StretchedExp => p[0] > 0.0 && p[1] > 0.0 && p[2] > 0.0,
            ModelKind::LogNormal => p[0] > 0.0 && p[2] > 0.0,
            ModelKind::SaturatingPl => p[0] > 0.0 && series.t().iter().all(|&t| 1.0 + p[2] * t.powf(p[1]) > 0.0),
        }
    }

    /// A converged fit whose parameters describe a collapsed or unphysical curve.
    pub fn is_degenerate(self, p: &[f64], series: &GrowthSeries) -> bool {
        match self {
            ModelKind::SaturatingPl => p[2] <= 0.0 || p[1].abs() > MAX_ABS_K || p[2].abs() > MAX_ABS_MU,
            ModelKind::StretchedExp => p[1] > STRETCHED_TAU_SPAN * span(series),
            ModelKind::LogNormal => p[1] > (LOG_NORMAL_MEDIAN_SPAN * span(series)).ln(),
            _ => false,
        }
    }

    /// The time scale has left the data far behind; the optimum lies at infinity.
    pub fn is_runaway(self, p: &[f64], series: &GrowthSeries) -> bool {
        match self {
            ModelKind::StretchedExp => p[1] > RUNAWAY_SPAN * span(series),
            ModelKind::LogNormal => p[1] > (RUNAWAY_SPAN * span(series)).ln(),
            _ => false,
        }
    }
}

fn span(series: &GrowthSeries) -> f64 {
    series.t().last().copied().unwrap_or(1.0)
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| format!("unknown model `{s}`"))
    }
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numeric_gradient(m: ModelKind, p: &[f64], t: f64) -> Vec<f64> {
        (0..p.len())
            .map(|i| {
                let h = 1e-6 * p[i].abs().max(1e-3);
                let (mut hi, mut lo) = (p.to_vec(), p.to_vec());
                hi[i] += h;
                lo[i] -= h;
                (m.eval(&hi, t) - m.eval(&lo, t)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let cases: [(ModelKind, &[f64]); 5] = [
            (ModelKind::PowerLaw, &[2.0, 0.7]),
            (ModelKind::StretchedExp, &[100.0, 30.0, 0.8]),
            (ModelKind::SaturatingPl, &[5.0, 0.9, 0.01]),
            (ModelKind::Linear, &[10.0, 3.0]),
            (ModelKind::LogNormal, &[1000.0, 4.0, 0.8]),
        ];
        for (m, p) in cases {
            for t in [1.0, 7.5, 60.0, 200.0] {
                let mut g = vec![0.0; p.len()];
                m.gradient(p, t, &mut g);
                for (a, n) in g.iter().zip(numeric_gradient(m, p, t)) {
                    assert!((a - n).abs() <= 1e-5 * n.abs().max(1.0), "{m} t={t}: {a} vs {n}");
                }
            }
        }
    }

    #[test]
    fn saturating_with_zero_mu_is_a_power_law() {
        for t in [1.0, 3.0, 50.0] {
            assert_eq!(ModelKind::SaturatingPl.eval(&[2.0, 0.5, 0.0], t), ModelKind::PowerLaw.eval(&[2.0, 0.5], t));
        }
    }

    #[test]
    fn normal_cdf_reference_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.959963984540054) - 0.975).abs() < 1e-12);
        assert!(normal_cdf(-40.0) >= 0.0);
    }
}
