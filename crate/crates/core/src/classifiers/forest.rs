//! Random forest of CART trees.
//!
//! Each tree is grown on a bootstrap resample using Gini impurity, looking
//! at a fresh random subset of features at every split. A split sends
//! `x[f] <= threshold` left, where the threshold is the lower of two
//! adjacent distinct training values. Because thresholds are training
//! values rather than midpoints, applying the same strictly increasing
//! transform to every feature of train and test rows yields the same
//! predictions.

use serde::{Deserialize, Serialize};

use super::RfConfig;
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        class: usize,
        counts: Vec<usize>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    fn classify(&self, x: &[f64]) -> usize {
        let mut node = self;
        loop {
            match node {
                Node::Leaf { class, .. } => return *class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold {
                        left
                    } else {
                        right
                    }
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub n_classes: usize,
    pub trees: Vec<Node>,
}

impl RandomForest {
    pub fn vote_fractions(&self, x: &[f64]) -> Vec<f64> {
        let mut votes = vec![0.0; self.n_classes];
        for tree in &self.trees {
            votes[tree.classify(x)] += 1.0;
        }
        let total = self.trees.len() as f64;
        votes.iter_mut().for_each(|v| *v /= total);
        votes
    }
}

struct Grower<'a> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    n_classes: usize,
    max_features: usize,
    max_depth: Option<usize>,
    min_samples_split: usize,
    rng: SeededRng,
    candidates: Vec<usize>,
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl Grower<'_> {
    fn counts(&self, idx: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.n_classes];
        for &i in idx {
            c[self.y[i]] += 1;
        }
        c
    }

    fn grow(&mut self, idx: &mut [usize], depth: usize) -> Node {
        let counts = self.counts(idx);
        let leaf = |counts: Vec<usize>| Node::Leaf {
            class: majority(&counts),
            counts,
        };
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || idx.len() < self.min_samples_split || self.max_depth.is_some_and(|d| depth >= d)
        {
            return leaf(counts);
        }
        let Some(best) = self.best_split(idx, &counts) else {
            return leaf(counts);
        };
        // Stable partition keeps bootstrap order inside each child.
        let (mut left, mut right): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.x[i][best.feature] <= best.threshold);
        Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: Box::new(self.grow(&mut left, depth + 1)),
            right: Box::new(self.grow(&mut right, depth + 1)),
        }
    }

    /// Candidates are drawn one at a time (partial Fisher-Yates). After
    /// `max_features` draws the search stops if a valid split exists,
    /// otherwise it keeps drawing until one turns up or features run out.
    fn best_split(&mut self, idx: &[usize], counts: &[usize]) -> Option<BestSplit> {
        let m = self.candidates.len();
        let parent = gini(counts, idx.len());
        let n = idx.len();
        let mut best: Option<BestSplit> = None;
        let mut order: Vec<usize> = idx.to_vec();
        let mut left = vec![0usize; self.n_classes];
        let mut right = vec![0usize; self.n_classes];
        for drawn in 0..m {
            if drawn >= self.max_features && best.is_some() {
                break;
            }
            let j = drawn + self.rng.below(m - drawn);
            self.candidates.swap(drawn, j);
            let f = self.candidates[drawn];
            order.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]).then(a.cmp(&b)));
            left.iter_mut().for_each(|c| *c = 0);
            for pos in 0..n - 1 {
                left[self.y[order[pos]]] += 1;
                let lo = self.x[order[pos]][f];
                let hi = self.x[order[pos + 1]][f];
                if lo == hi {
                    continue;
                }
                let n_left = pos + 1;
                for ((r, t), l) in right.iter_mut().zip(counts).zip(&left) {
                    *r = t - l;
                }
                let weighted = (n_left as f64 * gini(&left, n_left)
                    + (n - n_left) as f64 * gini(&right, n - n_left))
                    / n as f64;
                let score = parent - weighted;
                if best.as_ref().is_none_or(|b| score > b.score) {
                    best = Some(BestSplit {
                        feature: f,
                        threshold: lo,
                        score,
                    });
                }
            }
        }
        best
    }
}

pub fn train(
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    cfg: &RfConfig,
    seed: u64,
) -> RandomForest {
    let n = x.len();
    let m = x[0].len();
    let max_features = cfg
        .features_per_split
        .unwrap_or_else(|| ((m as f64).sqrt().round() as usize).max(1))
        .min(m);
    let trees = (0..cfg.trees)
        .map(|t| {
            let mut rng = SeededRng::derived(seed, t as u64);
            let mut idx: Vec<usize> = if cfg.bootstrap {
                (0..n).map(|_| rng.below(n)).collect()
            } else {
                (0..n).collect()
            };
            let mut grower = Grower {
                x,
                y,
                n_classes,
                max_features,
                max_depth: cfg.max_depth,
                min_samples_split: cfg.min_samples_split,
                rng,
                candidates: (0..m).collect(),
            };
            grower.grow(&mut idx, 0)
        })
        .collect();
    RandomForest { n_classes, trees }
}
