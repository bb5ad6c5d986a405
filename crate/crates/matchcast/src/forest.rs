//! From-scratch random forest over the three match outcomes: bootstrap
//! sampling, Gini splits, mtry feature subsampling, leaf-distribution
//! averaging. Deterministic for a given seed; tree fitting is parallel
//! across trees with per-tree RNG streams, so parallel and sequential
//! training produce identical forests.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Outcome;
use crate::error::{Error, Result};
use crate::odds::OutcomeProbs;
use crate::par;

pub const ARTIFACT_TYPE: &str = "random_forest";
pub const ARTIFACT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features sampled per split; `None` means ceil(sqrt(d)).
    pub mtry: Option<usize>,
    pub bootstrap: bool,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            n_trees: 500,
            max_depth: None,
            min_leaf: 5,
            mtry: None,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        counts: [u32; 3],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    fn leaf_counts(&self, x: &[f64]) -> &[u32; 3] {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { counts } => return counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Total of leaf class counts, which must equal the sample size the
    /// tree was grown on.
    pub fn total_leaf_count(&self) -> u32 {
        self.nodes
            .iter()
            .map(|n| match n {
                Node::Leaf { counts } => counts.iter().sum::<u32>(),
                _ => 0,
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<DecisionTree>,
    pub n_features: usize,
    pub seed: u64,
    pub hyperparams: Hyperparams,
    /// Set when training data contained a single class; the forest then
    /// predicts that class with probability 1.
    pub single_class: Option<Outcome>,
}

fn gini(counts: &[u32; 3]) -> f64 {
    let total: u32 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / t;
            p * p
        })
        .sum::<f64>()
}

struct TreeBuilder<'a> {
    rows: &'a [(Vec<f64>, Outcome)],
    n_features: usize,
    params: &'a Hyperparams,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

impl<'a> TreeBuilder<'a> {
    fn build(&mut self, indices: Vec<usize>, depth: usize, rng: &mut ChaCha8Rng) -> usize {
        let counts = class_counts(self.rows, &indices);
        let depth_capped = self.params.max_depth.is_some_and(|d| depth >= d);
        if depth_capped || gini(&counts) == 0.0 || indices.len() < 2 * self.params.min_leaf {
            return self.push_leaf(counts);
        }

        let mtry = self
            .params
            .mtry
            .unwrap_or_else(|| (self.n_features as f64).sqrt().ceil() as usize)
            .clamp(1, self.n_features);
        let features = sample_features(self.n_features, mtry, rng);

        let Some(best) = self.best_split(&indices, &features) else {
            return self.push_leaf(counts);
        };

        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
            .into_iter()
            .partition(|&i| self.rows[i].0[best.feature] <= best.threshold);

        let node = self.nodes.len();
        self.nodes.push(Node::Leaf { counts }); // placeholder
        let left = self.build(left_idx, depth + 1, rng);
        let right = self.build(right_idx, depth + 1, rng);
        self.nodes[node] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        node
    }

    fn push_leaf(&mut self, counts: [u32; 3]) -> usize {
        self.nodes.push(Node::Leaf { counts });
        self.nodes.len() - 1
    }

    // Exhaustive threshold scan per candidate feature. Ties resolve to
    // the lowest feature index, then the lowest threshold.
    fn best_split(&self, indices: &[usize], features: &[usize]) -> Option<BestSplit> {
        let n = indices.len() as f64;
        let mut best: Option<BestSplit> = None;

        for &feature in features {
            let mut values: Vec<(f64, Outcome)> = indices
                .iter()
                .map(|&i| (self.rows[i].0[feature], self.rows[i].1))
                .collect();
            values.sort_by(|a, b| a.0.total_cmp(&b.0));

            let mut left = [0u32; 3];
            let mut right = class_counts_of(values.iter().map(|(_, o)| *o));
            let mut n_left = 0usize;

            for w in 0..values.len() - 1 {
                let (v, outcome) = values[w];
                left[outcome.index()] += 1;
                right[outcome.index()] -= 1;
                n_left += 1;
                let next_v = values[w + 1].0;
                if next_v == v {
                    continue;
                }
                let n_right = values.len() - n_left;
                if n_left < self.params.min_leaf || n_right < self.params.min_leaf {
                    continue;
                }
                let impurity =
                    (n_left as f64 * gini(&left) + n_right as f64 * gini(&right)) / n;
                let threshold = v + (next_v - v) / 2.0;
                let better = match &best {
                    None => true,
                    Some(b) => {
                        impurity < b.impurity - 1e-12
                            || ((impurity - b.impurity).abs() <= 1e-12
                                && (feature, threshold) < (b.feature, b.threshold))
                    }
                };
                if better {
                    best = Some(BestSplit {
                        feature,
                        threshold,
                        impurity,
                    });
                }
            }
        }
        // reject splits that don't improve on the parent impurity
        let parent = gini(&class_counts(self.rows, indices));
        best.filter(|b| b.impurity < parent - 1e-12)
    }
}

fn class_counts(rows: &[(Vec<f64>, Outcome)], indices: &[usize]) -> [u32; 3] {
    class_counts_of(indices.iter().map(|&i| rows[i].1))
}

fn class_counts_of(outcomes: impl Iterator<Item = Outcome>) -> [u32; 3] {
    let mut counts = [0u32; 3];
    for o in outcomes {
        counts[o.index()] += 1;
    }
    counts
}

fn sample_features(d: usize, mtry: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if mtry >= d {
        return (0..d).collect();
    }
    // partial Fisher-Yates, then sorted for deterministic scan order
    let mut pool: Vec<usize> = (0..d).collect();
    for i in 0..mtry {
        let j = rng.gen_range(i..d);
        pool.swap(i, j);
    }
    let mut chosen = pool[..mtry].to_vec();
    chosen.sort_unstable();
    chosen
}

fn tree_rng(seed: u64, tree_index: usize) -> ChaCha8Rng {
    // splitmix64 over (seed, tree_index) gives independent per-tree streams
    let mut z = seed
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(tree_index as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

fn fit_one_tree(
    rows: &[(Vec<f64>, Outcome)],
    n_features: usize,
    params: &Hyperparams,
    seed: u64,
    tree_index: usize,
) -> DecisionTree {
    let mut rng = tree_rng(seed, tree_index);
    let indices: Vec<usize> = if params.bootstrap {
        (0..rows.len())
            .map(|_| rng.gen_range(0..rows.len()))
            .collect()
    } else {
        (0..rows.len()).collect()
    };
    let mut builder = TreeBuilder {
        rows,
        n_features,
        params,
        nodes: Vec::new(),
    };
    builder.build(indices, 0, &mut rng);
    DecisionTree {
        nodes: builder.nodes,
    }
}

fn validate_and_canonicalize(
    rows: &[(Vec<f64>, Outcome)],
) -> Result<(Vec<(Vec<f64>, Outcome)>, usize, Option<Outcome>)> {
    if rows.len() < 2 {
        return Err(Error::Model(format!(
            "need at least 2 training rows, got {}",
            rows.len()
        )));
    }
    let n_features = rows[0].0.len();
    if rows.iter().any(|(x, _)| x.len() != n_features) {
        return Err(Error::Model("inconsistent feature dimensionality".into()));
    }
    // canonical row order makes the fit invariant to input permutation
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| lex_cmp(&a.0, &b.0).then(a.1.cmp(&b.1)));
    let first = sorted[0].1;
    let single = sorted.iter().all(|(_, o)| *o == first).then_some(first);
    Ok((sorted, n_features, single))
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let c = x.total_cmp(y);
        if c != std::cmp::Ordering::Equal {
            return c;
        }
    }
    a.len().cmp(&b.len())
}

/// Trains a forest; parallel across trees when the `parallel` feature is
/// enabled. Output is identical to [`train_seq`].
pub fn train(rows: &[(Vec<f64>, Outcome)], params: &Hyperparams, seed: u64) -> Result<Forest> {
    train_inner(rows, params, seed, false)
}

/// Sequential twin of [`train`] for benches and equivalence tests.
pub fn train_seq(rows: &[(Vec<f64>, Outcome)], params: &Hyperparams, seed: u64) -> Result<Forest> {
    train_inner(rows, params, seed, true)
}

fn train_inner(
    rows: &[(Vec<f64>, Outcome)],
    params: &Hyperparams,
    seed: u64,
    sequential: bool,
) -> Result<Forest> {
    let (rows, n_features, single_class) = validate_and_canonicalize(rows)?;
    if let Some(class) = single_class {
        return Ok(Forest {
            trees: Vec::new(),
            n_features,
            seed,
            hyperparams: *params,
            single_class: Some(class),
        });
    }
    let fit = |i: usize| fit_one_tree(&rows, n_features, params, seed, i);
    let trees = if sequential {
        par::map_indices_seq(params.n_trees, fit)
    } else {
        par::map_indices(params.n_trees, fit)
    };
    Ok(Forest {
        trees,
        n_features,
        seed,
        hyperparams: *params,
        single_class: None,
    })
}

/// Average of per-tree leaf class distributions, normalized to sum 1.
pub fn predict_proba(forest: &Forest, x: &[f64]) -> Result<OutcomeProbs> {
    if x.len() != forest.n_features {
        return Err(Error::Model(format!(
            "feature vector length {} does not match model dimensionality {}",
            x.len(),
            forest.n_features
        )));
    }
    if let Some(class) = forest.single_class {
        let mut p = [0.0; 3];
        p[class.index()] = 1.0;
        return Ok(OutcomeProbs {
            home: p[0],
            draw: p[1],
            away: p[2],
        });
    }
    let mut acc = [0.0f64; 3];
    for tree in &forest.trees {
        let counts = tree.leaf_counts(x);
        let total: u32 = counts.iter().sum();
        if total > 0 {
            for (a, &c) in acc.iter_mut().zip(counts) {
                *a += c as f64 / total as f64;
            }
        }
    }
    OutcomeProbs::from_masses(acc[0], acc[1], acc[2])
}

/// Argmax of [`predict_proba`]; ties resolve homewin < draw < awaywin.
pub fn predict(forest: &Forest, x: &[f64]) -> Result<Outcome> {
    Ok(predict_proba(forest, x)?.argmax())
}

// ---- artifact ----

#[derive(Serialize, Deserialize)]
struct ForestArtifact {
    #[serde(rename = "type")]
    kind: String,
    version: u32,
    forest: Forest,
}

pub fn save_artifact(forest: &Forest, path: &Path) -> Result<()> {
    let artifact = ForestArtifact {
        kind: ARTIFACT_TYPE.to_string(),
        version: ARTIFACT_VERSION,
        forest: forest.clone(),
    };
    let bytes = serde_json::to_vec(&artifact)
        .map_err(|e| Error::Model(format!("artifact serialization failed: {e}")))?;
    crate::corpus::write_atomic(path, &bytes)
}

pub fn load_artifact(path: &Path) -> Result<Forest> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let artifact: ForestArtifact = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| Error::Model(format!("{}: invalid artifact: {e}", path.display())))?;
    if artifact.kind != ARTIFACT_TYPE || artifact.version != ARTIFACT_VERSION {
        return Err(Error::Model(format!(
            "unsupported artifact {}@{}",
            artifact.kind, artifact.version
        )));
    }
    Ok(artifact.forest)
}

/// Synthetic classification tasks and a k-NN reference classifier used by
/// accuracy-bound tests.
#[doc(hidden)]
pub mod test_support {
    use super::*;

    pub fn synthetic_3class(n: usize, seed: u64) -> Vec<(Vec<f64>, Outcome)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let class = rng.gen_range(0..3usize);
                let (cx, cy) = [(0.0, 0.0), (3.0, 0.0), (1.5, 2.5)][class];
                let x = vec![
                    cx + rng.gen::<f64>() - 0.5,
                    cy + rng.gen::<f64>() - 0.5,
                    rng.gen::<f64>(), // noise feature
                ];
                (x, Outcome::from_index(class))
            })
            .collect()
    }

    // leave-one-out 3-NN with exhaustive distance scan
    pub fn knn_oracle_accuracy(rows: &[(Vec<f64>, Outcome)]) -> f64 {
        let mut correct = 0;
        for (i, (x, y)) in rows.iter().enumerate() {
            let mut dists: Vec<(f64, Outcome)> = rows
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, (xj, yj))| {
                    let d: f64 = x.iter().zip(xj).map(|(a, b)| (a - b) * (a - b)).sum();
                    (d, *yj)
                })
                .collect();
            dists.sort_by(|a, b| a.0.total_cmp(&b.0));
            let counts = class_counts_of(dists[..3].iter().map(|(_, o)| *o));
            let pred = (0..3).max_by_key(|&k| (counts[k], 2 - k)).unwrap();
            if Outcome::from_index(pred) == *y {
                correct += 1;
            }
        }
        correct as f64 / rows.len() as f64
    }
}
