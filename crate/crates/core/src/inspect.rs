//! Graphviz export of trees and per-sample decision traces.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::forest::{DecisionTree, Forest, Node, Prediction};
use crate::indicators::{Feature, FeatureVector};
use crate::preprocess::Direction;

/// Tree `tree_id` as a Graphviz digraph.
///
/// Node ids are preorder positions. Splits read `feature <= threshold` with the
/// threshold at four decimals; leaves read `Rise` or `Fall`. Each split has a
/// `True` edge to its left child and a `False` edge to its right child.
pub fn export_dot(tree: &DecisionTree, tree_id: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph tree_{tree_id} {{");
    let _ = writeln!(out, "    node [shape=box];");
    for (id, node) in tree.nodes.iter().enumerate() {
        match *node {
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                let name = Feature::from_index(feature).map_or("?", Feature::key);
                let _ = writeln!(out, "    {id} [label=\"{name} <= {threshold:.4}\"];");
                let _ = writeln!(out, "    {id} -> {left} [label=\"True\"];");
                let _ = writeln!(out, "    {id} -> {right} [label=\"False\"];");
            }
            Node::Leaf { label, .. } => {
                let _ = writeln!(out, "    {id} [label=\"{label}\"];");
            }
        }
    }
    out.push_str("}\n");
    out
}

/// One threshold comparison on a sample's way down a tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub node_id: usize,
    pub feature: Feature,
    pub feature_value: f64,
    pub threshold: f64,
    /// `feature_value <= threshold`; true continues to the left child.
    pub branch_taken: bool,
    pub next_node: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeTrace {
    pub tree_id: usize,
    pub steps: Vec<TraceStep>,
    pub leaf_id: usize,
    pub label: Direction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    pub trees: Vec<TreeTrace>,
    pub rise_votes: usize,
    pub fall_votes: usize,
    pub label: Direction,
}

pub fn trace_tree(tree: &DecisionTree, tree_id: usize, x: &FeatureVector) -> TreeTrace {
    let mut steps = Vec::new();
    let mut id = 0;
    loop {
        match tree.nodes[id] {
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                let value = x.0[feature];
                let branch_taken = value <= threshold;
                let next_node = if branch_taken { left } else { right };
                steps.push(TraceStep {
                    node_id: id,
                    feature: Feature::from_index(feature).expect("feature id in range"),
                    feature_value: value,
                    threshold,
                    branch_taken,
                    next_node,
                });
                id = next_node;
            }
            Node::Leaf { label, .. } => {
                return TreeTrace {
                    tree_id,
                    steps,
                    leaf_id: id,
                    label,
                }
            }
        }
    }
}

/// Routes `x` through every tree, recording each comparison.
pub fn trace(forest: &Forest, x: &FeatureVector) -> TraceResult {
    let trees: Vec<TreeTrace> = forest
        .trees()
        .iter()
        .enumerate()
        .map(|(k, t)| trace_tree(t, k, x))
        .collect();
    let rise_votes = trees.iter().filter(|t| t.label == Direction::Rise).count();
    let vote = Prediction::from_votes(rise_votes, trees.len() - rise_votes);
    TraceResult {
        rise_votes,
        fall_votes: vote.fall_votes,
        label: vote.label,
        trees,
    }
}

fn capitalized(b: bool) -> &'static str {
    if b {
        "True"
    } else {
        "False"
    }
}

impl fmt::Display for TreeTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "For Tree {}:", self.tree_id)?;
        for s in &self.steps {
            writeln!(
                f,
                "At node {}:({}={}) <= {}?",
                s.node_id,
                s.feature.display_name(),
                s.feature_value,
                s.threshold
            )?;
            writeln!(
                f,
                "{}: Go to Node {}",
                capitalized(s.branch_taken),
                s.next_node
            )?;
        }
        writeln!(f, "Leaf Node {} is labeled as {}", self.leaf_id, self.label)
    }
}

impl fmt::Display for TraceResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.trees {
            writeln!(f, "{t}")?;
        }
        let total = self.rise_votes + self.fall_votes;
        writeln!(
            f,
            "{} of {} trees predict Rise, {} predict Fall",
            self.rise_votes, total, self.fall_votes
        )?;
        writeln!(f, "Ensemble output: {}", self.label)
    }
}

impl TraceResult {
    pub fn render(&self) -> String {
        format!("{self}")
    }
}
