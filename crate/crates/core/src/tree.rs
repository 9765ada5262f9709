//! Axis-aligned regression trees grown from per-sample (gradient, hessian)
//! pairs.
//!
//! A split maximizes `G_L²/H_L + G_R²/H_R − G²/H` and a leaf predicts
//! `−G/H`. With `g = −y`, `h = 1` this is exactly least-squares CART:
//! the gain equals the reduction in sum of squared errors and a leaf
//! predicts the mean response. The random forest uses that special case;
//! the boosters pass real loss derivatives.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// Minimum hessian sum on each side of a split. With unit hessians this
    /// is a second sample-count bound.
    pub min_child_weight: f64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 12,
            min_samples_leaf: 1,
            min_child_weight: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

/// The best split found at a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

struct Builder<'a> {
    x: &'a [&'a [f64]],
    grad: &'a [f64],
    hess: &'a [f64],
    params: TreeParams,
    nodes: Vec<Node>,
}

impl RegressionTree {
    /// Grows a tree over `x` (one row per sample; duplicates allowed).
    ///
    /// Panics if the slices disagree in length or `x` is empty.
    pub fn fit(x: &[&[f64]], grad: &[f64], hess: &[f64], params: TreeParams) -> Self {
        assert!(!x.is_empty(), "cannot grow a tree on zero samples");
        assert_eq!(x.len(), grad.len());
        assert_eq!(x.len(), hess.len());
        let mut builder = Builder {
            x,
            grad,
            hess,
            params: TreeParams {
                max_depth: params.max_depth,
                min_samples_leaf: params.min_samples_leaf.max(1),
                ..params
            },
            nodes: Vec::new(),
        };
        let mut rows: Vec<usize> = (0..x.len()).collect();
        builder.grow(&mut rows, 0);
        RegressionTree { nodes: builder.nodes }
    }

    /// Least-squares tree on responses `y`.
    pub fn fit_least_squares(x: &[&[f64]], y: &[f64], params: TreeParams) -> Self {
        let grad: Vec<f64> = y.iter().map(|v| -v).collect();
        let hess = vec![1.0; y.len()];
        Self::fit(x, &grad, &hess, params)
    }

    pub fn constant(value: f64) -> Self {
        RegressionTree {
            nodes: vec![Node::Leaf { value }],
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => idx = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn scale_leaves(&mut self, factor: f64) {
        for node in &mut self.nodes {
            if let Node::Leaf { value } = node {
                *value *= factor;
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], idx: usize) -> usize {
            match &nodes[idx] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Root split, if the tree has one.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match &self.nodes[0] {
            Node::Split {
                feature, threshold, ..
            } => Some((*feature, *threshold)),
            Node::Leaf { .. } => None,
        }
    }
}

const TIE_MARGIN: f64 = 1e-9;

/// Best split of `rows` by the Newton gain, or `None` when no split with
/// positive gain satisfies `min_samples_leaf` and `min_child_weight`. Ties keep the first split
/// found scanning features in order and thresholds ascending.
pub fn best_split(
    x: &[&[f64]],
    grad: &[f64],
    hess: &[f64],
    rows: &[usize],
    min_samples_leaf: usize,
    min_child_weight: f64,
) -> Option<SplitChoice> {
    let min_leaf = min_samples_leaf.max(1);
    let n = rows.len();
    if n < 2 * min_leaf {
        return None;
    }
    let g_total: f64 = rows.iter().map(|&r| grad[r]).sum();
    let h_total: f64 = rows.iter().map(|&r| hess[r]).sum();
    let parent = g_total * g_total / h_total;
    let tolerance = 1e-12 * parent.abs().max(1e-12);

    let dim = x[rows[0]].len();
    let mut order = rows.to_vec();
    let mut best: Option<SplitChoice> = None;
    for feature in 0..dim {
        order.sort_by(|&a, &b| x[a][feature].total_cmp(&x[b][feature]));
        let mut g_left = 0.0;
        let mut h_left = 0.0;
        for i in 0..n - 1 {
            let r = order[i];
            g_left += grad[r];
            h_left += hess[r];
            let here = x[r][feature];
            let next = x[order[i + 1]][feature];
            if here == next {
                continue;
            }
            let n_left = i + 1;
            if n_left < min_leaf || n - n_left < min_leaf {
                continue;
            }
            let g_right = g_total - g_left;
            let h_right = h_total - h_left;
            if h_left < min_child_weight || h_right < min_child_weight {
                continue;
            }
            let gain = g_left * g_left / h_left + g_right * g_right / h_right - parent;
            // Splits that separate the same rows have equal gain up to
            // rounding; the margin keeps the first of them.
            if gain > tolerance && best.is_none_or(|b| gain > b.gain + TIE_MARGIN * b.gain.abs()) {
                let mut threshold = 0.5 * (here + next);
                if threshold >= next {
                    threshold = here;
                }
                best = Some(SplitChoice {
                    feature,
                    threshold,
                    gain,
                });
            }
        }
    }
    best
}

impl Builder<'_> {
    fn grow(&mut self, rows: &mut [usize], depth: usize) -> usize {
        let idx = self.nodes.len();
        self.nodes.push(Node::Leaf { value: 0.0 });
        let split = if depth < self.params.max_depth {
            best_split(
                self.x,
                self.grad,
                self.hess,
                rows,
                self.params.min_samples_leaf,
                self.params.min_child_weight,
            )
        } else {
            None
        };
        match split {
            None => {
                let g: f64 = rows.iter().map(|&r| self.grad[r]).sum();
                let h: f64 = rows.iter().map(|&r| self.hess[r]).sum();
                self.nodes[idx] = Node::Leaf { value: -g / h };
            }
            Some(s) => {
                let mid = partition(rows, |r| self.x[r][s.feature] <= s.threshold);
                let (lo, hi) = rows.split_at_mut(mid);
                let left = self.grow(lo, depth + 1);
                let right = self.grow(hi, depth + 1);
                self.nodes[idx] = Node::Split {
                    feature: s.feature,
                    threshold: s.threshold,
                    left,
                    right,
                };
            }
        }
        idx
    }
}

/// Stable partition; returns the number of rows satisfying `pred`.
fn partition(rows: &mut [usize], pred: impl Fn(usize) -> bool) -> usize {
    let (yes, no): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| pred(r));
    let mid = yes.len();
    for (slot, r) in rows.iter_mut().zip(yes.into_iter().chain(no)) {
        *slot = r;
    }
    mid
}
