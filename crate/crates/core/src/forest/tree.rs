//! Decision trees grown to purity.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::bootstrap::random_subset;
use super::impurity::Criterion;
use super::split::{best_candidate, class_counts};
use crate::indicators::{FeatureVector, N_FEATURES};
use crate::preprocess::Direction;

/// A tree node. Trees are stored as preorder arenas, so a node's id is its
/// position and a split's left child is always the next node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        label: Direction,
        /// Training rows reaching this leaf, indexed by [`Direction::class_index`].
        counts: [usize; 2],
    },
}

/// Where the random feature subset is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubspaceMode {
    /// Once per tree; every split of the tree searches the same subset.
    #[default]
    Tree,
    /// Afresh at every split node.
    Node,
}

impl SubspaceMode {
    pub fn name(self) -> &'static str {
        match self {
            SubspaceMode::Tree => "tree",
            SubspaceMode::Node => "node",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "tree" => Some(SubspaceMode::Tree),
            "node" => Some(SubspaceMode::Node),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowOptions {
    pub criterion: Criterion,
    pub max_depth: Option<usize>,
    /// Per-node subset size; only read in [`SubspaceMode::Node`].
    pub m_try: usize,
    pub subspace: SubspaceMode,
}

impl Default for GrowOptions {
    fn default() -> Self {
        Self {
            criterion: Criterion::Gini,
            max_depth: None,
            m_try: N_FEATURES,
            subspace: SubspaceMode::Tree,
        }
    }
}

/// One member of a forest.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    /// Preorder node arena; the root is node 0.
    pub nodes: Vec<Node>,
    /// Feature ids the split search could use.
    pub feature_subset: Vec<usize>,
    /// Bootstrap sample as indices into the training rows, with repeats.
    pub bag: Vec<usize>,
}

fn majority(counts: [usize; 2]) -> Direction {
    if counts[1] >= counts[0] {
        Direction::Rise
    } else {
        Direction::Fall
    }
}

/// Grows a tree over `rows` (indices into `features`/`labels`, repeats
/// allowed) and returns its preorder node arena.
///
/// A node splits while it is impure and some feature in its subset still
/// varies, using the best split even when that split's gain is zero. It
/// becomes a majority leaf (ties go to `Rise`) otherwise, or at the depth cap.
pub fn grow_tree<R: Rng + ?Sized>(
    features: &[FeatureVector],
    labels: &[Direction],
    rows: &[usize],
    subset: &[usize],
    options: &GrowOptions,
    rng: &mut R,
) -> Vec<Node> {
    struct Pending {
        rows: Vec<usize>,
        depth: usize,
        parent: Option<usize>,
    }

    let mut nodes = Vec::new();
    let mut scratch = Vec::new();
    let mut stack = vec![Pending {
        rows: rows.to_vec(),
        depth: 0,
        parent: None,
    }];
    while let Some(task) = stack.pop() {
        let id = nodes.len();
        // Left children are pushed last, so they are popped right after their
        // parent and get id parent + 1; right children need patching.
        if let Some(p) = task.parent {
            if let Node::Split { left, right, .. } = &mut nodes[p] {
                if *left != id {
                    *right = id;
                }
            }
        }
        let counts = class_counts(labels, &task.rows);
        let leaf = Node::Leaf {
            label: majority(counts),
            counts,
        };
        let at_cap = options.max_depth.is_some_and(|d| task.depth >= d);
        if counts[0] == 0 || counts[1] == 0 || at_cap {
            nodes.push(leaf);
            continue;
        }
        let node_subset;
        let search = match options.subspace {
            SubspaceMode::Tree => subset,
            SubspaceMode::Node => {
                node_subset = random_subset(options.m_try, N_FEATURES, rng);
                &node_subset[..]
            }
        };
        let Some(split) = best_candidate(
            features,
            labels,
            &task.rows,
            search,
            options.criterion,
            &mut scratch,
        ) else {
            nodes.push(leaf);
            continue;
        };
        let (go_left, go_right): (Vec<usize>, Vec<usize>) = task
            .rows
            .iter()
            .partition(|&&r| features[r].0[split.feature] <= split.threshold);
        nodes.push(Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: id + 1,
            right: usize::MAX,
        });
        stack.push(Pending {
            rows: go_right,
            depth: task.depth + 1,
            parent: Some(id),
        });
        stack.push(Pending {
            rows: go_left,
            depth: task.depth + 1,
            parent: Some(id),
        });
    }
    nodes
}

impl DecisionTree {
    /// Node ids visited from the root to the leaf reached by `x`.
    pub fn path<'a>(&'a self, x: &'a FeatureVector) -> impl Iterator<Item = usize> + 'a {
        let mut next = Some(0);
        core::iter::from_fn(move || {
            let id = next?;
            next = match self.nodes[id] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => Some(if x.0[feature] <= threshold {
                    left
                } else {
                    right
                }),
                Node::Leaf { .. } => None,
            };
            Some(id)
        })
    }

    pub fn leaf_id(&self, x: &FeatureVector) -> usize {
        self.path(x).last().unwrap_or(0)
    }

    pub fn predict(&self, x: &FeatureVector) -> Direction {
        match self.nodes[self.leaf_id(x)] {
            Node::Leaf { label, .. } => label,
            Node::Split { .. } => unreachable!("paths end at leaves"),
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn n_splits(&self) -> usize {
        self.nodes.len() - self.n_leaves()
    }

    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        let mut max = 0;
        for (id, node) in self.nodes.iter().enumerate() {
            max = max.max(depth[id]);
            if let Node::Split { left, right, .. } = *node {
                depth[left] = depth[id] + 1;
                depth[right] = depth[id] + 1;
            }
        }
        max
    }

    /// Whether the arena is a well-formed preorder tree whose splits only use
    /// features from `feature_subset` (or any feature, when `any_feature`).
    pub fn is_well_formed(&self, any_feature: bool) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        // Preorder check: walking from the root must visit ids 0, 1, 2, ...
        let mut expected = 0usize;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            if id != expected || id >= self.nodes.len() {
                return false;
            }
            expected += 1;
            if let Node::Split {
                feature,
                threshold,
                left,
                right,
            } = self.nodes[id]
            {
                let allowed = if any_feature {
                    feature < N_FEATURES
                } else {
                    self.feature_subset.contains(&feature)
                };
                if !allowed || !threshold.is_finite() || left != id + 1 {
                    return false;
                }
                stack.push(right);
                stack.push(left);
            }
        }
        expected == self.nodes.len()
    }
}
