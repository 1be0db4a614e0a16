//! Damped Gauss-Newton (Levenberg-Marquardt) for models with at most a few parameters.

use super::models::ModelKind;
use super::series::GrowthSeries;

pub const MAX_ITERATIONS: usize = 500;
pub const RELATIVE_TOLERANCE: f64 = 1e-10;
const LAMBDA_START: f64 = 1e-3;
const LAMBDA_FACTOR: f64 = 10.0;
const LAMBDA_MAX: f64 = 1e16;

#[derive(Clone, Debug, PartialEq)]
pub struct LmOutcome {
    pub params: Vec<f64>,
    pub rss: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub fn rss(model: ModelKind, p: &[f64], series: &GrowthSeries) -> f64 {
    series.t().iter().zip(series.n()).map(|(&t, &n)| (n - model.eval(p, t)).powi(2)).sum()
}

/// Minimizes the linear-space residual sum of squares from `start`.
///
/// Converges when an accepted step improves RSS by less than
/// [`RELATIVE_TOLERANCE`] relative, when RSS reaches zero, or when no damped
/// step can improve it any more. Runs drifting to an infinite time scale stop
/// early without converging.
pub fn levenberg_marquardt(model: ModelKind, series: &GrowthSeries, start: &[f64]) -> LmOutcome {
    let np = model.n_params();
    let mut p = start.to_vec();
    if !model.feasible(&p, series) {
        return LmOutcome { params: p, rss: f64::INFINITY, converged: false, iterations: 0 };
    }
    let mut cur = rss(model, &p, series);
    if !cur.is_finite() {
        return LmOutcome { params: p, rss: f64::INFINITY, converged: false, iterations: 0 };
    }
    let mut lambda = LAMBDA_START;
    let mut g = vec![0.0; np];
    for iter in 1..=MAX_ITERATIONS {
        if cur == 0.0 {
            return LmOutcome { params: p, rss: cur, converged: true, iterations: iter - 1 };
        }
        // normal equations J^T J and J^T r
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for (&t, &n) in series.t().iter().zip(series.n()) {
            model.gradient(&p, t, &mut g);
            let r = n - model.eval(&p, t);
            for i in 0..np {
                jtr[i] += g[i] * r;
                for j in 0..=i {
                    jtj[i][j] += g[i] * g[j];
                }
            }
        }
        for i in 0..np {
            for j in 0..i {
                jtj[j][i] = jtj[i][j];
            }
        }
        loop {
            let mut a = jtj;
            for (i, row) in a.iter_mut().enumerate().take(np) {
                row[i] += lambda * jtj[i][i].max(1e-300);
            }
            let step = solve(&a, &jtr, np);
            let trial: Vec<f64> = match step {
                Some(d) => p.iter().zip(&d).map(|(x, dx)| x + dx).collect(),
                None => p.clone(),
            };
            let next = if step.is_some() && model.feasible(&trial, series) {
                rss(model, &trial, series)
            } else {
                f64::INFINITY
            };
            if next.is_finite() && next <= cur {
                let improvement = cur - next;
                p = trial;
                let done = improvement <= RELATIVE_TOLERANCE * cur;
                cur = next;
                lambda = (lambda / LAMBDA_FACTOR).max(1e-12);
                if done {
                    return LmOutcome { params: p, rss: cur, converged: true, iterations: iter };
                }
                if model.is_runaway(&p, series) {
                    return LmOutcome { params: p, rss: cur, converged: false, iterations: iter };
                }
                break;
            }
            lambda *= LAMBDA_FACTOR;
            if lambda > LAMBDA_MAX {
                // no damped step improves: a stationary point up to rounding
                return LmOutcome { params: p, rss: cur, converged: true, iterations: iter };
            }
        }
    }
    LmOutcome { params: p, rss: cur, converged: false, iterations: MAX_ITERATIONS }
}

/// Gaussian elimination with partial pivoting on the leading `n`×`n` block.
fn solve(a: &[[f64; 3]; 3], b: &[f64; 3], n: usize) -> Option<[f64; 3]> {
    let mut m = *a;
    let mut x = *b;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 || !m[piv][col].is_finite() {
            return None;
        }
        m.swap(col, piv);
        x.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            x[row] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for k in col + 1..n {
            s -= m[col][k] * x[k];
        }
        x[col] = s / m[col][col];
    }
    x.iter().take(n).all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_systems() {
        let a = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        let x = solve(&a, &[3.0, 5.0, 5.0], 3).unwrap();
        for (v, e) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((v - e).abs() < 1e-12);
        }
        assert!(solve(&[[0.0; 3]; 3], &[1.0, 0.0, 0.0], 2).is_none());
    }

    #[test]
    fn runaway_time_scale_stops_early() {
        // a pure power law pulls the stretched exponential towards τ → ∞
        let s = GrowthSeries::from_counts((1..=100).map(|t| 3.0 * (t as f64).powf(0.6))).unwrap();
        let out = levenberg_marquardt(ModelKind::StretchedExp, &s, &[100.0, 50.0, 0.5]);
        assert!(!out.converged);
        assert!(out.iterations < MAX_ITERATIONS);
        assert!(ModelKind::StretchedExp.is_runaway(&out.params, &s));
    }

    #[test]
    fn recovers_power_law_from_a_rough_start() {
        let s = GrowthSeries::from_counts((1..=50).map(|t| 3.0 * (t as f64).powf(0.6))).unwrap();
        let out = levenberg_marquardt(ModelKind::PowerLaw, &s, &[1.0, 1.0]);
        assert!(out.converged);
        assert!((out.params[0] - 3.0).abs() < 1e-6 && (out.params[1] - 0.6).abs() < 1e-8, "{:?}", out.params);
    }

    #[test]
    fn infeasible_start_does_not_converge() {
        let s = GrowthSeries::from_counts([1.0, 2.0, 3.0]).unwrap();
        assert!(!levenberg_marquardt(ModelKind::PowerLaw, &s, &[-1.0, 1.0]).converged);
    }
}
