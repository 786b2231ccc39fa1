//! Out-of-bag error estimation.

use alloc::vec;
use alloc::vec::Vec;

use super::{check_data, grow_member, DecisionTree, Forest, ForestError, ForestParams, Prediction};
use crate::indicators::FeatureVector;
use crate::preprocess::Direction;

/// Out-of-bag error of a forest on its own training rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OobEstimate {
    /// Misclassified fraction over rows with at least one out-of-bag tree.
    pub error: f64,
    /// Rows with at least one voting tree.
    pub scored_rows: usize,
    /// Rows that every tree's bag contains.
    pub unscored_rows: usize,
}

/// Running per-row out-of-bag vote tallies: `[fall, rise]`.
struct OobVotes {
    votes: Vec<[usize; 2]>,
    in_bag: Vec<bool>,
}

impl OobVotes {
    fn new(n: usize) -> Self {
        Self {
            votes: vec![[0, 0]; n],
            in_bag: vec![false; n],
        }
    }

    fn add_tree(&mut self, tree: &DecisionTree, features: &[FeatureVector]) {
        self.in_bag.fill(false);
        for &i in &tree.bag {
            self.in_bag[i] = true;
        }
        for (i, x) in features.iter().enumerate() {
            if !self.in_bag[i] {
                self.votes[i][tree.predict(x).class_index()] += 1;
            }
        }
    }

    fn estimate(&self, labels: &[Direction]) -> Result<OobEstimate, ForestError> {
        let mut scored = 0;
        let mut wrong = 0;
        for (v, &y) in self.votes.iter().zip(labels) {
            if v[0] + v[1] == 0 {
                continue;
            }
            scored += 1;
            if Prediction::from_votes(v[1], v[0]).label != y {
                wrong += 1;
            }
        }
        if scored == 0 {
            return Err(ForestError::NoOobRows);
        }
        Ok(OobEstimate {
            error: wrong as f64 / scored as f64,
            scored_rows: scored,
            unscored_rows: labels.len() - scored,
        })
    }
}

/// OOB error over the first `b` trees of `forest`.
pub fn oob_error_prefix(
    forest: &Forest,
    features: &[FeatureVector],
    labels: &[Direction],
    b: usize,
) -> Result<OobEstimate, ForestError> {
    if features.len() != forest.n_train() || labels.len() != forest.n_train() {
        return Err(ForestError::RowCountMismatch {
            expected: forest.n_train(),
            got: features.len().min(labels.len()),
        });
    }
    let mut votes = OobVotes::new(features.len());
    for tree in forest.trees().iter().take(b) {
        votes.add_tree(tree, features);
    }
    votes.estimate(labels)
}

/// Each row is voted on only by trees whose bag excludes it; ties go to `Rise`.
/// `features` and `labels` must be the rows the forest was trained on.
pub fn oob_error(
    forest: &Forest,
    features: &[FeatureVector],
    labels: &[Direction],
) -> Result<OobEstimate, ForestError> {
    oob_error_prefix(forest, features, labels, forest.n_trees())
}

/// OOB error after each tree count in `b_values` (ascending), growing one
/// forest of `max(b_values)` trees and scoring its prefixes.
pub fn oob_curve(
    features: &[FeatureVector],
    labels: &[Direction],
    b_values: &[usize],
    params: &ForestParams,
) -> Result<Vec<(usize, f64)>, ForestError> {
    let Some(&max_b) = b_values.last() else {
        return Ok(Vec::new());
    };
    if b_values.windows(2).any(|w| w[0] >= w[1]) || b_values[0] == 0 {
        return Err(ForestError::NoTrees);
    }
    let params = ForestParams {
        n_trees: max_b,
        ..*params
    };
    params.validate()?;
    check_data(features, labels)?;
    let mut votes = OobVotes::new(features.len());
    let mut out = Vec::with_capacity(b_values.len());
    let mut wanted = b_values.iter().peekable();
    for k in 0..max_b {
        votes.add_tree(&grow_member(features, labels, &params, k), features);
        if wanted.peek() == Some(&&(k + 1)) {
            wanted.next();
            out.push((k + 1, votes.estimate(labels)?.error));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::tests::noisy_rows;
    use crate::forest::{train_rows, tree_rng, Node};
    use Direction::*;

    /// Direct definition: for each row, poll every tree whose bag lacks it.
    fn direct_oob(forest: &Forest, x: &[FeatureVector], y: &[Direction]) -> (f64, usize) {
        let (mut scored, mut wrong) = (0usize, 0usize);
        for i in 0..x.len() {
            let voters: Vec<&DecisionTree> = forest
                .trees()
                .iter()
                .filter(|t| !t.bag.contains(&i))
                .collect();
            if voters.is_empty() {
                continue;
            }
            scored += 1;
            let rise = voters.iter().filter(|t| t.predict(&x[i]) == Rise).count();
            let label = if 2 * rise >= voters.len() { Rise } else { Fall };
            if label != y[i] {
                wrong += 1;
            }
        }
        (wrong as f64 / scored as f64, scored)
    }

    #[test]
    fn matches_direct_definition() {
        let (x, y) = noisy_rows(150, 8);
        let f = train_rows(
            &x,
            &y,
            &ForestParams {
                n_trees: 15,
                ..ForestParams::default()
            },
        )
        .unwrap();
        let est = oob_error(&f, &x, &y).unwrap();
        let (err, scored) = direct_oob(&f, &x, &y);
        assert_eq!(est.error, err);
        assert_eq!(est.scored_rows, scored);
        assert_eq!(est.scored_rows + est.unscored_rows, 150);
    }

    #[test]
    fn perfect_single_tree_has_zero_oob() {
        // Classes sit in two clusters with a wide gap, so any bag holding
        // both classes yields a stump that classifies every row correctly.
        let x: Vec<FeatureVector> = (0..40)
            .map(|i| FeatureVector([if i < 20 { i as f64 } else { 100.0 + i as f64 }; 6]))
            .collect();
        let y: Vec<Direction> = (0..40).map(|i| if i < 20 { Fall } else { Rise }).collect();
        let params = ForestParams {
            n_trees: 1,
            m_try: 6,
            ..ForestParams::default()
        };
        let f = train_rows(&x, &y, &params).unwrap();
        let t = &f.trees()[0];
        assert!(matches!(t.nodes[0], Node::Split { .. }));
        assert!((0..40).all(|i| t.predict(&x[i]) == y[i]));
        let est = oob_error(&f, &x, &y).unwrap();
        assert_eq!(est.error, 0.0);
        assert!(est.scored_rows > 0);
    }

    #[test]
    fn all_in_bag_is_an_error() {
        let x = vec![FeatureVector([0.0; 6]), FeatureVector([1.0; 6])];
        let y = vec![Fall, Rise];
        // Find a seed whose single bag holds both rows.
        let seed = (0..100u64)
            .find(|&s| {
                let mut r = tree_rng(s, 0);
                let b = crate::forest::bootstrap(2, &mut r);
                b.contains(&0) && b.contains(&1)
            })
            .unwrap();
        let params = ForestParams {
            n_trees: 1,
            m_try: 6,
            seed,
            ..ForestParams::default()
        };
        let f = train_rows(&x, &y, &params).unwrap();
        assert_eq!(oob_error(&f, &x, &y), Err(ForestError::NoOobRows));
    }

    #[test]
    fn curve_matches_prefixes() {
        let (x, y) = noisy_rows(120, 9);
        let params = ForestParams {
            n_trees: 20,
            ..ForestParams::default()
        };
        let f = train_rows(&x, &y, &params).unwrap();
        let curve = oob_curve(&x, &y, &[2, 7, 20], &params).unwrap();
        assert_eq!(curve.len(), 3);
        for (b, e) in curve {
            assert_eq!(e, oob_error_prefix(&f, &x, &y, b).unwrap().error);
        }
        assert!(oob_curve(&x, &y, &[5, 5], &params).is_err());
        assert_eq!(oob_curve(&x, &y, &[1], &params).unwrap().len(), 1);
    }

    #[test]
    fn random_labels_give_coin_flip_oob() {
        use rand::Rng;
        let (x, _) = noisy_rows(400, 10);
        let mut rng = tree_rng(77, 0);
        let y: Vec<Direction> = (0..400)
            .map(|_| if rng.random_bool(0.5) { Rise } else { Fall })
            .collect();
        let f = train_rows(
            &x,
            &y,
            &ForestParams {
                n_trees: 51,
                ..ForestParams::default()
            },
        )
        .unwrap();
        let e = oob_error(&f, &x, &y).unwrap().error;
        assert!((e - 0.5).abs() < 0.1, "{e}");
    }
}
