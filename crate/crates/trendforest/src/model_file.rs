//! Plain-text forest serialization.
//!
//! ```text
//! trendforest-forest 1
//! criterion gini
//! subspace tree
//! m_try 3
//! max_depth none
//! seed 42
//! n_train 812
//! n_trees 65
//! tree 0
//! subset 0 3 4
//! bag 17 4 ...
//! nodes 3
//! S 3 0.125 1 2
//! L Fall 40 0
//! L Rise 0 38
//! ...
//! end
//! ```
//!
//! Split lines are `S feature threshold left right`, leaf lines are
//! `L label fall_count rise_count`. Floats are written in their shortest
//! round-trip form, so reading a written model gives back an identical forest.

use std::fmt::Write as _;
use std::str::{FromStr, SplitWhitespace};

use thiserror::Error;
use trendforest_core::forest::{ForestError, Node};
use trendforest_core::{Criterion, DecisionTree, Direction, Forest, ForestParams, SubspaceMode};

pub const MAGIC: &str = "trendforest-forest";
pub const VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum ModelFileError {
    #[error("not a trendforest model file")]
    NotAModel,
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("inconsistent model: {0}")]
    Invalid(#[from] ForestError),
}

pub fn write_model(forest: &Forest) -> String {
    let p = forest.params();
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "criterion {}", p.criterion.name());
    let _ = writeln!(out, "subspace {}", p.subspace.name());
    let _ = writeln!(out, "m_try {}", p.m_try);
    match p.max_depth {
        Some(d) => {
            let _ = writeln!(out, "max_depth {d}");
        }
        None => out.push_str("max_depth none\n"),
    }
    let _ = writeln!(out, "seed {}", p.seed);
    let _ = writeln!(out, "n_train {}", forest.n_train());
    let _ = writeln!(out, "n_trees {}", forest.n_trees());
    for (k, tree) in forest.trees().iter().enumerate() {
        let _ = writeln!(out, "tree {k}");
        out.push_str("subset");
        for f in &tree.feature_subset {
            let _ = write!(out, " {f}");
        }
        out.push_str("\nbag");
        for i in &tree.bag {
            let _ = write!(out, " {i}");
        }
        let _ = writeln!(out, "\nnodes {}", tree.nodes.len());
        for node in &tree.nodes {
            let _ = match *node {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => writeln!(out, "S {feature} {threshold} {left} {right}"),
                Node::Leaf { label, counts } => {
                    writeln!(out, "L {} {} {}", label.name(), counts[0], counts[1])
                }
            };
        }
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, reason: impl Into<String>) -> ModelFileError {
        ModelFileError::Parse {
            line: self.line,
            reason: reason.into(),
        }
    }

    /// Next non-blank line, split on whitespace, with its leading keyword checked.
    fn expect(&mut self, keyword: &str) -> Result<SplitWhitespace<'a>, ModelFileError> {
        loop {
            let Some((i, text)) = self.inner.next() else {
                self.line += 1;
                return Err(self.err(format!("unexpected end of file, wanted {keyword:?}")));
            };
            self.line = i + 1;
            if text.trim().is_empty() {
                continue;
            }
            let mut words = text.split_whitespace();
            return match words.next() {
                Some(w) if w == keyword => Ok(words),
                Some(w) => Err(self.err(format!("expected {keyword:?}, found {w:?}"))),
                None => unreachable!(),
            };
        }
    }

    fn parse<T: FromStr>(&self, word: Option<&str>, what: &str) -> Result<T, ModelFileError> {
        let word = word.ok_or_else(|| self.err(format!("missing {what}")))?;
        word.parse()
            .map_err(|_| self.err(format!("bad {what} {word:?}")))
    }

    fn single<T: FromStr>(&mut self, keyword: &str) -> Result<T, ModelFileError> {
        let mut words = self.expect(keyword)?;
        let v = self.parse(words.next(), keyword)?;
        self.done(words)?;
        Ok(v)
    }

    fn done(&self, mut words: SplitWhitespace<'_>) -> Result<(), ModelFileError> {
        match words.next() {
            Some(w) => Err(self.err(format!("unexpected trailing {w:?}"))),
            None => Ok(()),
        }
    }

    fn list(&mut self, keyword: &str) -> Result<Vec<usize>, ModelFileError> {
        let words = self.expect(keyword)?;
        words.map(|w| self.parse(Some(w), keyword)).collect()
    }
}

fn parse_node(lines: &mut Lines<'_>) -> Result<Node, ModelFileError> {
    let (i, text) = lines
        .inner
        .next()
        .ok_or_else(|| lines.err("unexpected end of file inside a tree"))?;
    lines.line = i + 1;
    let mut words = text.split_whitespace();
    let node = match words.next() {
        Some("S") => Node::Split {
            feature: lines.parse(words.next(), "feature")?,
            threshold: {
                let t: f64 = lines.parse(words.next(), "threshold")?;
                if !t.is_finite() {
                    return Err(lines.err("threshold must be finite"));
                }
                t
            },
            left: lines.parse(words.next(), "left child")?,
            right: lines.parse(words.next(), "right child")?,
        },
        Some("L") => {
            let label = match words.next() {
                Some("Rise") => Direction::Rise,
                Some("Fall") => Direction::Fall,
                other => return Err(lines.err(format!("bad leaf label {other:?}"))),
            };
            Node::Leaf {
                label,
                counts: [
                    lines.parse(words.next(), "fall count")?,
                    lines.parse(words.next(), "rise count")?,
                ],
            }
        }
        other => return Err(lines.err(format!("expected a node line, found {other:?}"))),
    };
    lines.done(words)?;
    Ok(node)
}

pub fn parse_model(text: &str) -> Result<Forest, ModelFileError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    let mut first = lines.expect(MAGIC).map_err(|_| ModelFileError::NotAModel)?;
    let version = first.next().unwrap_or("");
    if version != VERSION.to_string() {
        return Err(ModelFileError::UnsupportedVersion(version.to_string()));
    }

    let criterion: String = lines.single("criterion")?;
    let criterion = Criterion::from_name(&criterion)
        .ok_or_else(|| lines.err(format!("unknown criterion {criterion:?}")))?;
    let subspace: String = lines.single("subspace")?;
    let subspace = SubspaceMode::from_name(&subspace)
        .ok_or_else(|| lines.err(format!("unknown subspace {subspace:?}")))?;
    let m_try = lines.single("m_try")?;
    let max_depth: String = lines.single("max_depth")?;
    let max_depth = match max_depth.as_str() {
        "none" => None,
        d => Some(lines.parse(Some(d), "max_depth")?),
    };
    let seed = lines.single("seed")?;
    let n_train = lines.single("n_train")?;
    let n_trees: usize = lines.single("n_trees")?;

    let mut trees = Vec::with_capacity(n_trees.min(1 << 16));
    for k in 0..n_trees {
        let id: usize = lines.single("tree")?;
        if id != k {
            return Err(lines.err(format!("expected tree {k}, found tree {id}")));
        }
        let feature_subset = lines.list("subset")?;
        let bag = lines.list("bag")?;
        let n_nodes: usize = lines.single("nodes")?;
        let nodes = (0..n_nodes)
            .map(|_| parse_node(&mut lines))
            .collect::<Result<Vec<_>, _>>()?;
        trees.push(DecisionTree {
            nodes,
            feature_subset,
            bag,
        });
    }
    let tail = lines.expect("end")?;
    lines.done(tail)?;
    if let Some((i, extra)) = lines.inner.find(|(_, l)| !l.trim().is_empty()) {
        return Err(ModelFileError::Parse {
            line: i + 1,
            reason: format!("content after end: {extra:?}"),
        });
    }
    let params = ForestParams {
        n_trees,
        m_try,
        criterion,
        subspace,
        max_depth,
        seed,
    };
    Ok(Forest::from_trees(params, n_train, trees)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use trendforest_core::forest::train_rows;
    use trendforest_core::FeatureVector;

    fn rows(n: usize, seed: u64) -> (Vec<FeatureVector>, Vec<Direction>) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<FeatureVector> = (0..n)
            .map(|_| FeatureVector(std::array::from_fn(|_| rng.random_range(-50.0..50.0) / 7.0)))
            .collect();
        let y = x
            .iter()
            .map(|v| {
                if v.0[0] + 0.5 * v.0[3] + rng.random_range(-2.0..2.0) > 0.0 {
                    Direction::Rise
                } else {
                    Direction::Fall
                }
            })
            .collect();
        (x, y)
    }

    fn sample_forest() -> Forest {
        let (x, y) = rows(120, 3);
        train_rows(
            &x,
            &y,
            &ForestParams {
                n_trees: 7,
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn header_layout() {
        let text = write_model(&sample_forest());
        let head: Vec<&str> = text.lines().take(9).collect();
        assert_eq!(
            head,
            [
                "trendforest-forest 1",
                "criterion gini",
                "subspace tree",
                "m_try 3",
                "max_depth none",
                "seed 42",
                "n_train 120",
                "n_trees 7",
                "tree 0"
            ]
        );
        assert!(text.ends_with("end\n"));
    }

    #[test]
    fn corrupted_files() {
        let text = write_model(&sample_forest());
        assert_eq!(parse_model("hello\n"), Err(ModelFileError::NotAModel));
        assert_eq!(
            parse_model(&text.replacen("forest 1", "forest 2", 1)),
            Err(ModelFileError::UnsupportedVersion("2".into()))
        );
        assert!(matches!(
            parse_model(&text.replacen("criterion gini", "criterion chaos", 1)),
            Err(ModelFileError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_model(text.trim_end_matches("end\n")),
            Err(ModelFileError::Parse { .. })
        ));
        assert!(matches!(
            parse_model(&format!("{text}tree 9\n")),
            Err(ModelFileError::Parse { .. })
        ));
        // A split on a feature outside the tree's subset fails the structural check.
        let broken: Vec<String> = text
            .lines()
            .map(|l| match l.strip_prefix("S ") {
                Some(rest) => format!("S 9 {}", rest.split_once(' ').unwrap().1),
                None => l.to_string(),
            })
            .collect();
        assert!(matches!(
            parse_model(&broken.join("\n")),
            Err(ModelFileError::Invalid(_))
        ));
        // Bag entries must index the training rows.
        let n_train = text.replacen("n_train 120", "n_train 119", 1);
        assert!(matches!(
            parse_model(&n_train),
            Err(ModelFileError::Invalid(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn round_trip_is_exact(
            seed in any::<u64>(),
            n_trees in 1usize..6,
            m_try in 1usize..=6,
            entropy in any::<bool>(),
            node_mode in any::<bool>(),
            depth in prop::option::of(1usize..5),
        ) {
            let (x, y) = rows(60, seed);
            prop_assume!(y.contains(&Direction::Rise) && y.contains(&Direction::Fall));
            let params = ForestParams {
                n_trees,
                m_try,
                criterion: if entropy { Criterion::Entropy } else { Criterion::Gini },
                subspace: if node_mode { SubspaceMode::Node } else { SubspaceMode::Tree },
                max_depth: depth,
                seed,
            };
            let forest = train_rows(&x, &y, &params).unwrap();
            let text = write_model(&forest);
            let back = parse_model(&text).unwrap();
            prop_assert_eq!(&back, &forest);
            prop_assert_eq!(write_model(&back), text);
        }
    }
}
