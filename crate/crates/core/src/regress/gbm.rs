use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    pub n_estimators: usize,
    pub max_depth: u32,
    pub learning_rate: f64,
}

impl Default for GbmParams {
    fn default() -> Self {
        GbmParams { n_estimators: 200, max_depth: 3, learning_rate: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GbmError {
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("feature rows have inconsistent lengths")]
    Ragged,
    #[error("target value {0} is not finite")]
    NonFinite(usize),
}

/// Axis-aligned regression tree stored as a flat node array; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
enum Node {
    Leaf(f64),
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf(v) => return v,
                Node::Split { feature, threshold, left, right } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn max_leaf(&self) -> f64 {
        self.nodes.iter().filter_map(|n| if let Node::Leaf(v) = n { Some(v.abs()) } else { None }).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbmModel {
    pub initial_prediction: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
    /// Total squared-error reduction credited to each feature.
    pub split_gain: Vec<f64>,
    /// Training MSE after 0, 1, ..., trees.len() stages.
    pub train_mse: Vec<f64>,
}

impl GbmModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.initial_prediction + self.learning_rate * self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }
}

pub const MIN_SAMPLES: usize = 10;

/// Least-squares boosting with exact greedy splits.
///
/// Ties in gain go to the lowest feature index, then the lowest threshold.
pub fn fit_gbm(x: &[Vec<f64>], y: &[f64], params: &GbmParams) -> Result<GbmModel, GbmError> {
    if y.len() < MIN_SAMPLES || x.len() != y.len() {
        return Err(GbmError::TooFewSamples { min: MIN_SAMPLES, got: y.len().min(x.len()) });
    }
    let nf = x[0].len();
    if x.iter().any(|r| r.len() != nf) {
        return Err(GbmError::Ragged);
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(GbmError::NonFinite(i));
    }
    let n = y.len() as f64;
    let init = y.iter().sum::<f64>() / n;
    let mut pred = vec![init; y.len()];
    let mse = |p: &[f64]| p.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / n;
    let mut model = GbmModel {
        initial_prediction: init,
        learning_rate: params.learning_rate,
        trees: Vec::new(),
        split_gain: vec![0.0; nf],
        train_mse: vec![mse(&pred)],
    };
    // features sorted once; nodes filter these orders
    let orders: Vec<Vec<usize>> = (0..nf)
        .map(|f| {
            let mut o: Vec<usize> = (0..y.len()).collect();
            o.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
            o
        })
        .collect();
    for _ in 0..params.n_estimators {
        let resid: Vec<f64> = y.iter().zip(&pred).map(|(a, p)| a - p).collect();
        if resid.iter().all(|r| *r == 0.0) {
            break;
        }
        let mut tree = Tree { nodes: Vec::new() };
        let members: Vec<bool> = vec![true; y.len()];
        grow(&mut tree, x, &resid, &orders, &members, params.max_depth, &mut model.split_gain);
        if tree.nodes.len() == 1 && matches!(tree.nodes[0], Node::Leaf(v) if v == 0.0) {
            break;
        }
        for (p, row) in pred.iter_mut().zip(x) {
            *p += params.learning_rate * tree.predict(row);
        }
        model.trees.push(tree);
        model.train_mse.push(mse(&pred));
    }
    Ok(model)
}

fn grow(
    tree: &mut Tree,
    x: &[Vec<f64>],
    r: &[f64],
    orders: &[Vec<usize>],
    members: &[bool],
    depth: u32,
    gains: &mut [f64],
) -> usize {
    let idx = tree.nodes.len();
    let (cnt, sum, sq) = members
        .iter()
        .zip(r)
        .filter(|(m, _)| **m)
        .fold((0usize, 0.0, 0.0), |(c, s, q), (_, v)| (c + 1, s + v, q + v * v));
    let mean = sum / cnt as f64;
    tree.nodes.push(Node::Leaf(mean));
    if depth == 0 || cnt < 2 {
        return idx;
    }
    let Some((feature, threshold, gain)) = best_split(x, r, orders, members, cnt, sum, sq) else {
        return idx;
    };
    gains[feature] += gain;
    let left_m: Vec<bool> = members.iter().zip(x).map(|(m, row)| *m && row[feature] <= threshold).collect();
    let right_m: Vec<bool> = members.iter().zip(x).map(|(m, row)| *m && row[feature] > threshold).collect();
    let left = grow(tree, x, r, orders, &left_m, depth - 1, gains);
    let right = grow(tree, x, r, orders, &right_m, depth - 1, gains);
    tree.nodes[idx] = Node::Split { feature, threshold, left, right };
    idx
}

/// Largest reduction in squared error over all midpoints between distinct values.
fn best_split(
    x: &[Vec<f64>],
    r: &[f64],
    orders: &[Vec<usize>],
    members: &[bool],
    cnt: usize,
    sum: f64,
    sq: f64,
) -> Option<(usize, f64, f64)> {
    let parent = sum * sum / cnt as f64;
    // ignore gains at rounding level of the node's residual energy
    let floor = 1e-12 * sq;
    let mut best: Option<(usize, f64, f64)> = None;
    for (f, order) in orders.iter().enumerate() {
        let (mut lc, mut ls) = (0usize, 0.0);
        let mut prev: Option<usize> = None;
        for &i in order.iter().filter(|&&i| members[i]) {
            if let Some(p) = prev {
                if x[i][f] > x[p][f] {
                    let rc = cnt - lc;
                    let rs = sum - ls;
                    let gain = ls * ls / lc as f64 + rs * rs / rc as f64 - parent;
                    let thr = 0.5 * (x[p][f] + x[i][f]);
                    // strict comparison keeps the earliest feature and threshold on ties
                    if gain > floor && best.map_or(true, |b| gain > b.2) {
                        best = Some((f, thr, gain));
                    }
                }
            }
            lc += 1;
            ls += r[i];
            prev = Some(i);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|i| vec![(i % 2) as f64, (i % 5) as f64, (i / 7) as f64]).collect()
    }

    #[test]
    fn constant_target_has_no_trees() {
        let x = grid(20);
        let m = fit_gbm(&x, &[0.5; 20], &GbmParams::default()).unwrap();
        assert!(m.trees.is_empty());
        assert_eq!(m.predict(&[9.0, 9.0, 9.0]), 0.5);
    }

    #[test]
    fn separable_binary_target_is_learned() {
        let x = grid(30);
        let y: Vec<f64> = x.iter().map(|r| r[0]).collect();
        let m = fit_gbm(&x, &y, &GbmParams::default()).unwrap();
        assert!(*m.train_mse.last().unwrap() < 1e-12, "{:?}", m.train_mse.last());
        assert!(m.split_gain[0] > 0.0 && m.split_gain[1] == 0.0 && m.split_gain[2] == 0.0);
    }

    #[test]
    fn training_loss_never_increases() {
        let x = grid(40);
        let y: Vec<f64> = x.iter().map(|r| (r[1] * 1.3).sin() + 0.2 * r[2] - r[0]).collect();
        let m = fit_gbm(&x, &y, &GbmParams::default()).unwrap();
        assert!(m.train_mse.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        assert!(m.trees.len() <= 200);
    }

    #[test]
    fn predictions_stay_within_margin() {
        let x = grid(40);
        let y: Vec<f64> = x.iter().map(|r| r[1] * r[1] - r[2]).collect();
        let m = fit_gbm(&x, &y, &GbmParams::default()).unwrap();
        let margin = m.learning_rate * m.trees.iter().map(Tree::max_leaf).fold(0.0, f64::max) * m.trees.len() as f64;
        let (lo, hi) = y.iter().fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(*v), b.max(*v)));
        for row in &x {
            let p = m.predict(row);
            assert!(p >= lo - margin && p <= hi + margin);
        }
    }

    #[test]
    fn deterministic_fits() {
        let x = grid(25);
        let y: Vec<f64> = x.iter().map(|r| r[1] + r[0]).collect();
        assert_eq!(fit_gbm(&x, &y, &GbmParams::default()).unwrap(), fit_gbm(&x, &y, &GbmParams::default()).unwrap());
    }

    #[test]
    fn rejects_small_or_bad_input() {
        assert!(fit_gbm(&grid(5), &[0.0; 5], &GbmParams::default()).is_err());
        let mut y = vec![0.0; 12];
        y[3] = f64::NAN;
        assert!(matches!(fit_gbm(&grid(12), &y, &GbmParams::default()), Err(GbmError::NonFinite(3))));
    }
}
