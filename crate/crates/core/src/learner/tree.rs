//! CART decision trees over mixed ordinal/categorical slots.
//!
//! Numeric slots split on midpoint thresholds; categorical slots with at
//! most [`MAX_SUBSET_CARDINALITY`] distinct codes split on a value subset
//! found by the positive-rate ordering scan (optimal for binary impurity),
//! and fall back to ordinal thresholds above that. Leaves store the
//! positive fraction of the training rows that reached them.

use super::TrainData;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Impurity measure for split selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    Gini,
    Entropy,
}

impl Criterion {
    /// Binary impurity of a node with `pos` positives out of `total`.
    pub fn impurity(self, pos: f64, total: f64) -> f64 {
        if total <= 0.0 {
            return 0.0;
        }
        let p = pos / total;
        let q = 1.0 - p;
        match self {
            Criterion::Gini => 2.0 * p * q,
            Criterion::Entropy => {
                let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
                term(p) + term(q)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Gini => "gini",
            Criterion::Entropy => "entropy",
        }
    }
}

/// Largest categorical cardinality handled by subset splits.
pub const MAX_SUBSET_CARDINALITY: usize = 12;

/// Minimum impurity decrease for a split to be worth keeping.
const MIN_GAIN: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SplitTest {
    /// Goes left when `value <= threshold`.
    Threshold(f64),
    /// Goes left when the rounded value is in the (sorted) code list.
    Categories(Vec<u32>),
}

impl SplitTest {
    pub fn goes_left(&self, value: f64) -> bool {
        match self {
            SplitTest::Threshold(t) => value <= *t,
            SplitTest::Categories(codes) => codes.binary_search(&(value as u32)).is_ok(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        /// Fraction of positive training rows at this leaf.
        prob: f64,
        samples: usize,
    },
    Split {
        slot: usize,
        test: SplitTest,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn predict(&self, features: &[f64]) -> f64 {
        match self {
            TreeNode::Leaf { prob, .. } => *prob,
            TreeNode::Split {
                slot, test, left, right,
            } => {
                if test.goes_left(features[*slot]) {
                    left.predict(features)
                } else {
                    right.predict(features)
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }
}

pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub criterion: Criterion,
    /// Number of slots considered per node; usually √(total slots).
    pub feature_subsample: usize,
}

struct CandidateSplit {
    slot: usize,
    test: SplitTest,
    gain: f64,
}

/// Trains one tree on the rows named by `indices` (duplicates allowed —
/// that is how bootstrap resamples arrive). The RNG drives per-node
/// feature subsampling only, so equal seeds give equal trees.
pub fn train_tree<R: Rng>(
    data: &TrainData,
    indices: &[usize],
    params: &TreeParams,
    rng: &mut R,
) -> TreeNode {
    build_node(data, indices, params, rng, 0)
}

fn leaf(data: &TrainData, indices: &[usize]) -> TreeNode {
    let pos = indices.iter().filter(|i| data.labels[**i]).count();
    TreeNode::Leaf {
        prob: pos as f64 / indices.len() as f64,
        samples: indices.len(),
    }
}

fn build_node<R: Rng>(
    data: &TrainData,
    indices: &[usize],
    params: &TreeParams,
    rng: &mut R,
    depth: usize,
) -> TreeNode {
    let pos = indices.iter().filter(|i| data.labels[**i]).count();
    let n = indices.len();
    let depth_reached = params.max_depth.is_some_and(|d| depth >= d);
    if n < 2 || pos == 0 || pos == n || depth_reached {
        return leaf(data, indices);
    }

    // Per-node feature subsample, in ascending slot order so that gain ties
    // resolve toward the lowest slot.
    let k = params.feature_subsample.clamp(1, data.n_slots);
    let mut slots = rand::seq::index::sample(rng, data.n_slots, k).into_vec();
    slots.sort_unstable();

    let parent_impurity = params.criterion.impurity(pos as f64, n as f64);
    let mut best: Option<CandidateSplit> = None;
    for slot in slots {
        let candidate = if data.categorical.contains(&slot) {
            best_categorical_split(data, indices, slot, parent_impurity, params.criterion)
                .or_else(|| {
                    best_threshold_split(data, indices, slot, parent_impurity, params.criterion)
                })
        } else {
            best_threshold_split(data, indices, slot, parent_impurity, params.criterion)
        };
        if let Some(c) = candidate {
            let better = match &best {
                None => c.gain > MIN_GAIN,
                Some(b) => c.gain > b.gain + MIN_GAIN,
            };
            if better {
                best = Some(c);
            }
        }
    }

    let Some(split) = best else {
        return leaf(data, indices);
    };
    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
        .iter()
        .partition(|i| split.test.goes_left(data.features[**i][split.slot]));
    if left_idx.is_empty() || right_idx.is_empty() {
        return leaf(data, indices);
    }
    let left = build_node(data, &left_idx, params, rng, depth + 1);
    let right = build_node(data, &right_idx, params, rng, depth + 1);
    TreeNode::Split {
        slot: split.slot,
        test: split.test,
        left: Box::new(left),
        right: Box::new(right),
    }
}

/// Weighted impurity of a (left, right) partition.
fn partition_impurity(
    criterion: Criterion,
    l_pos: f64,
    l_n: f64,
    r_pos: f64,
    r_n: f64,
) -> f64 {
    let n = l_n + r_n;
    (l_n / n) * criterion.impurity(l_pos, l_n) + (r_n / n) * criterion.impurity(r_pos, r_n)
}

fn best_threshold_split(
    data: &TrainData,
    indices: &[usize],
    slot: usize,
    parent_impurity: f64,
    criterion: Criterion,
) -> Option<CandidateSplit> {
    let mut rows: Vec<(f64, bool)> = indices
        .iter()
        .map(|i| (data.features[*i][slot], data.labels[*i]))
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = rows.len() as f64;
    let total_pos = rows.iter().filter(|(_, l)| *l).count() as f64;

    let mut best: Option<(f64, f64)> = None; // (gain, threshold)
    let mut l_n = 0.0;
    let mut l_pos = 0.0;
    for w in 0..rows.len() - 1 {
        l_n += 1.0;
        if rows[w].1 {
            l_pos += 1.0;
        }
        if rows[w].0 == rows[w + 1].0 {
            continue; // no boundary between equal values
        }
        let threshold = (rows[w].0 + rows[w + 1].0) / 2.0;
        let gain = parent_impurity
            - partition_impurity(criterion, l_pos, l_n, total_pos - l_pos, n - l_n);
        let better = match best {
            None => gain > MIN_GAIN,
            Some((bg, _)) => gain > bg + MIN_GAIN,
        };
        if better {
            best = Some((gain, threshold));
        }
    }
    best.map(|(gain, threshold)| CandidateSplit {
        slot,
        test: SplitTest::Threshold(threshold),
        gain,
    })
}

fn best_categorical_split(
    data: &TrainData,
    indices: &[usize],
    slot: usize,
    parent_impurity: f64,
    criterion: Criterion,
) -> Option<CandidateSplit> {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<u32, (f64, f64)> = BTreeMap::new(); // code -> (pos, n)
    for i in indices {
        let code = data.features[*i][slot] as u32;
        let g = groups.entry(code).or_insert((0.0, 0.0));
        if data.labels[*i] {
            g.0 += 1.0;
        }
        g.1 += 1.0;
    }
    if groups.len() < 2 || groups.len() > MAX_SUBSET_CARDINALITY {
        return None; // caller falls back to a threshold split
    }
    let n: f64 = groups.values().map(|(_, c)| c).sum();
    let total_pos: f64 = groups.values().map(|(p, _)| p).sum();

    // Order groups by positive rate (ties by code): the best binary subset
    // split of a binary target is a prefix of this ordering.
    let mut ordered: Vec<(u32, f64, f64)> = groups
        .into_iter()
        .map(|(code, (p, c))| (code, p, c))
        .collect();
    ordered.sort_by(|a, b| (a.1 / a.2).total_cmp(&(b.1 / b.2)).then(a.0.cmp(&b.0)));

    let mut best: Option<(f64, usize)> = None; // (gain, prefix length)
    let mut l_pos = 0.0;
    let mut l_n = 0.0;
    for k in 0..ordered.len() - 1 {
        l_pos += ordered[k].1;
        l_n += ordered[k].2;
        let gain = parent_impurity
            - partition_impurity(criterion, l_pos, l_n, total_pos - l_pos, n - l_n);
        let better = match best {
            None => gain > MIN_GAIN,
            Some((bg, _)) => gain > bg + MIN_GAIN,
        };
        if better {
            best = Some((gain, k + 1));
        }
    }
    best.map(|(gain, k)| {
        let mut codes: Vec<u32> = ordered[..k].iter().map(|(c, _, _)| *c).collect();
        codes.sort_unstable();
        CandidateSplit {
            slot,
            test: SplitTest::Categories(codes),
            gain,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::sampling::TrainingExample;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::BTreeSet;

    fn examples(rows: &[(&[f64], bool)]) -> Vec<TrainingExample> {
        rows.iter()
            .map(|(f, l)| TrainingExample {
                features: f.to_vec(),
                label: *l,
                doc_id: "t".into(),
                pronoun: 0,
                candidate: 0,
            })
            .collect()
    }

    #[test]
    fn impurity_closed_forms() {
        // Gini(p) = 2p(1-p); Entropy(p) = -p log2 p - q log2 q
        assert_eq!(Criterion::Gini.impurity(0.0, 4.0), 0.0);
        assert_eq!(Criterion::Gini.impurity(4.0, 4.0), 0.0);
        assert!((Criterion::Gini.impurity(2.0, 4.0) - 0.5).abs() < 1e-15);
        assert!((Criterion::Gini.impurity(1.0, 4.0) - 0.375).abs() < 1e-15);
        assert_eq!(Criterion::Entropy.impurity(0.0, 7.0), 0.0);
        assert!((Criterion::Entropy.impurity(2.0, 4.0) - 1.0).abs() < 1e-15);
        let p: f64 = 0.25;
        let expect = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        assert!((Criterion::Entropy.impurity(1.0, 4.0) - expect).abs() < 1e-15);
    }

    #[test]
    fn learns_a_threshold() {
        let ex = examples(&[
            (&[0.1], false),
            (&[0.4], false),
            (&[0.6], true),
            (&[0.9], true),
        ]);
        let cats = BTreeSet::new();
        let data = TrainData::from_examples(&ex, &cats).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let tree = train_tree(
            &data,
            &[0, 1, 2, 3],
            &TreeParams {
                max_depth: None,
                criterion: Criterion::Gini,
                feature_subsample: 1,
            },
            &mut rng,
        );
        // Midpoint between 0.4 and 0.6
        match &tree {
            TreeNode::Split { test: SplitTest::Threshold(t), .. } => {
                assert!((t - 0.5).abs() < 1e-12)
            }
            other => panic!("expected a threshold split, got {other:?}"),
        }
        assert_eq!(tree.predict(&[0.2]), 0.0);
        assert_eq!(tree.predict(&[0.8]), 1.0);
    }

    #[test]
    fn learns_a_category_subset() {
        // Codes 2 and 5 are positive; 1, 3, 7 negative. No threshold can
        // separate {2,5} from {3}, a subset split can.
        let ex = examples(&[
            (&[1.0], false),
            (&[2.0], true),
            (&[3.0], false),
            (&[5.0], true),
            (&[7.0], false),
            (&[2.0], true),
            (&[5.0], true),
            (&[3.0], false),
        ]);
        let cats: BTreeSet<usize> = [0].into();
        let data = TrainData::from_examples(&ex, &cats).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let tree = train_tree(
            &data,
            &(0..8).collect::<Vec<_>>(),
            &TreeParams {
                max_depth: None,
                criterion: Criterion::Entropy,
                feature_subsample: 1,
            },
            &mut rng,
        );
        match &tree {
            TreeNode::Split { test: SplitTest::Categories(codes), .. } => {
                // either {2,5} on the left or {1,3,7}; both are pure
                assert!(codes == &vec![2, 5] || codes == &vec![1, 3, 7]);
            }
            other => panic!("expected a category split, got {other:?}"),
        }
        assert_eq!(tree.predict(&[2.0]), 1.0);
        assert_eq!(tree.predict(&[5.0]), 1.0);
        assert_eq!(tree.predict(&[3.0]), 0.0);
    }

    #[test]
    fn pure_node_is_a_leaf() {
        let ex = examples(&[(&[1.0], true), (&[2.0], true)]);
        let cats = BTreeSet::new();
        let data = TrainData::from_examples(&ex, &cats).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let tree = train_tree(
            &data,
            &[0, 1],
            &TreeParams {
                max_depth: None,
                criterion: Criterion::Gini,
                feature_subsample: 1,
            },
            &mut rng,
        );
        assert_eq!(tree, TreeNode::Leaf { prob: 1.0, samples: 2 });
    }

    #[test]
    fn max_depth_zero_means_a_stump_leaf() {
        let ex = examples(&[(&[0.0], false), (&[1.0], true)]);
        let cats = BTreeSet::new();
        let data = TrainData::from_examples(&ex, &cats).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let tree = train_tree(
            &data,
            &[0, 1],
            &TreeParams {
                max_depth: Some(0),
                criterion: Criterion::Gini,
                feature_subsample: 1,
            },
            &mut rng,
        );
        assert_eq!(tree, TreeNode::Leaf { prob: 0.5, samples: 2 });
    }

    #[test]
    fn equal_seeds_build_equal_trees() {
        let rows: Vec<(Vec<f64>, bool)> = (0..40)
            .map(|i| {
                let x = (i as f64 * 37.0) % 11.0;
                let y = (i as f64 * 13.0) % 7.0;
                (vec![x, y], x + y > 8.0)
            })
            .collect();
        let ex: Vec<TrainingExample> = rows
            .iter()
            .map(|(f, l)| TrainingExample {
                features: f.clone(),
                label: *l,
                doc_id: "t".into(),
                pronoun: 0,
                candidate: 0,
            })
            .collect();
        let cats = BTreeSet::new();
        let data = TrainData::from_examples(&ex, &cats).unwrap();
        let idx: Vec<usize> = (0..ex.len()).collect();
        let params = TreeParams {
            max_depth: Some(6),
            criterion: Criterion::Gini,
            feature_subsample: 1,
        };
        let t1 = train_tree(&data, &idx, &params, &mut ChaCha20Rng::seed_from_u64(42));
        let t2 = train_tree(&data, &idx, &params, &mut ChaCha20Rng::seed_from_u64(42));
        assert_eq!(t1, t2);
    }
}
