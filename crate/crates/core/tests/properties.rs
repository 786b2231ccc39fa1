//! Cross-module properties on randomly generated inputs.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trendforest_core::evaluate::{confusion, margin_report, metrics, roc};
use trendforest_core::forest::{oob_error_prefix, train_rows, Node};
use trendforest_core::indicators::{
    macd, obv, proc, rsi, stochastic_k, williams_r, FlatWindowPolicy,
};
use trendforest_core::inspect::{export_dot, trace};
use trendforest_core::separability::{pca_2d, standardize};
use trendforest_core::{Direction, FeatureVector, ForestParams, N_FEATURES};

/// A positive random-walk price path with highs and lows around it.
fn prices(len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    prop::collection::vec((-0.05f64..0.05, 0.0f64..0.03, 0.0f64..0.03), len).prop_map(|steps| {
        let mut c = 50.0;
        let mut closes = Vec::new();
        let mut highs = Vec::new();
        let mut lows = Vec::new();
        for (r, up, down) in steps {
            c *= 1.0 + r;
            closes.push(c);
            highs.push(c * (1.0 + up));
            lows.push(c * (1.0 - down));
        }
        (closes, highs, lows)
    })
}

fn rows(n: usize, seed: u64) -> (Vec<FeatureVector>, Vec<Direction>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<FeatureVector> = (0..n)
        .map(|_| FeatureVector(std::array::from_fn(|_| rng.random_range(-3.0..3.0))))
        .collect();
    let y = x
        .iter()
        .map(|v| {
            let noise: f64 = rng.random_range(-1.0..1.0);
            if v.0[0] - v.0[2] + noise > 0.0 {
                Direction::Rise
            } else {
                Direction::Fall
            }
        })
        .collect();
    (x, y)
}

proptest! {
    #[test]
    fn oscillators_stay_in_range((c, h, l) in prices(80), period in 2usize..20) {
        for v in rsi(&c, period).unwrap().into_iter().flatten() {
            prop_assert!((0.0..=100.0).contains(&v));
        }
        for v in stochastic_k(&c, &h, &l, period, FlatWindowPolicy::Midpoint).unwrap().into_iter().flatten() {
            prop_assert!((0.0..=100.0).contains(&v), "{v}");
        }
        for v in williams_r(&c, &h, &l, period, FlatWindowPolicy::Midpoint).unwrap().into_iter().flatten() {
            prop_assert!((-100.0..=0.0).contains(&v), "{v}");
        }
    }

    #[test]
    fn price_scale_invariance((c, h, l) in prices(60), k in 0.01f64..100.0) {
        let scale = |v: &[f64]| v.iter().map(|x| x * k).collect::<Vec<_>>();
        let (cs, hs, ls) = (scale(&c), scale(&h), scale(&l));
        let same = |a: Vec<Option<f64>>, b: Vec<Option<f64>>| {
            a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| match (x, y) {
                (Some(x), Some(y)) => (x - y).abs() <= 1e-9 * (1.0 + x.abs()),
                (None, None) => true,
                _ => false,
            })
        };
        let p = FlatWindowPolicy::Midpoint;
        prop_assert!(same(rsi(&c, 14).unwrap(), rsi(&cs, 14).unwrap()));
        prop_assert!(same(stochastic_k(&c, &h, &l, 14, p).unwrap(), stochastic_k(&cs, &hs, &ls, 14, p).unwrap()));
        prop_assert!(same(williams_r(&c, &h, &l, 14, p).unwrap(), williams_r(&cs, &hs, &ls, 14, p).unwrap()));
        prop_assert!(same(proc(&c, 10).unwrap(), proc(&cs, 10).unwrap()));
        let (m, ms) = (macd(&c).unwrap(), macd(&cs).unwrap());
        for (a, b) in m.macd.iter().zip(&ms.macd) {
            prop_assert!((a * k - b).abs() <= 1e-9 * c[0] * k);
        }
    }

    #[test]
    fn obv_sees_only_change_signs(
        (c, _, _) in prices(50),
        volumes in prop::collection::vec(0.0f64..1e7, 50),
        warp in 0.1f64..10.0,
    ) {
        // A strictly increasing transform of the closes keeps every change's sign.
        let warped: Vec<f64> = c.iter().map(|x| x.powf(warp) + 3.0 * x).collect();
        let a = obv(&c, &volumes).unwrap();
        let b = obv(&warped, &volumes).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-6 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn explained_variance_bounded(seed in any::<u64>(), n in 3usize..40) {
        let (x, _) = rows(n, seed);
        let z = standardize(&x, false).unwrap();
        let p = pca_2d(&z.rows).unwrap();
        let [a, b] = p.explained_variance;
        prop_assert!(a >= -1e-12 && b >= -1e-12);
        prop_assert!(a + b <= p.total_variance * (1.0 + 1e-12));
        // Standardized columns each carry unit variance.
        prop_assert!(p.total_variance <= N_FEATURES as f64 + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn monotone_feature_transforms_keep_predictions(seed in any::<u64>()) {
        // Split tests only compare order, so an increasing transform grows the
        // same trees up to threshold values. Thresholds are midpoints, which
        // commute with affine maps only, so predictions are checked under one.
        let (x, y) = rows(150, seed);
        let (probes, _) = rows(100, seed ^ 1);
        let params = ForestParams { n_trees: 9, seed, ..Default::default() };
        let f = train_rows(&x, &y, &params).unwrap();

        let bend = |v: &FeatureVector| FeatureVector(v.0.map(|t| t.exp() + t.powi(3)));
        let xb: Vec<FeatureVector> = x.iter().map(bend).collect();
        let fb = train_rows(&xb, &y, &params).unwrap();
        for (t, tb) in f.trees().iter().zip(fb.trees()) {
            prop_assert_eq!(t.nodes.len(), tb.nodes.len());
            for (a, b) in t.nodes.iter().zip(&tb.nodes) {
                match (*a, *b) {
                    (Node::Split { feature: fa, left: la, right: ra, .. },
                     Node::Split { feature: fb, left: lb, right: rb, .. }) => {
                        prop_assert_eq!((fa, la, ra), (fb, lb, rb));
                    }
                    (a, b) => prop_assert_eq!(a, b),
                }
            }
            for &r in &t.bag {
                prop_assert_eq!(t.leaf_id(&x[r]), tb.leaf_id(&xb[r]));
            }
        }

        let shift = |v: &FeatureVector| FeatureVector(v.0.map(|t| 4.0 * t - 2.0));
        let xs: Vec<FeatureVector> = x.iter().map(shift).collect();
        let fs = train_rows(&xs, &y, &params).unwrap();
        for p in &probes {
            prop_assert_eq!(f.predict(p), fs.predict(&shift(p)));
        }
    }

    #[test]
    fn trace_agrees_with_forest(seed in any::<u64>()) {
        let (x, y) = rows(120, seed);
        let f = train_rows(&x, &y, &ForestParams { n_trees: 11, seed, ..Default::default() }).unwrap();
        let (probes, _) = rows(60, seed.wrapping_add(7));
        for p in &probes {
            let t = trace(&f, p);
            let pred = f.predict(p);
            prop_assert_eq!(t.label, pred.label);
            prop_assert_eq!((t.rise_votes, t.fall_votes), (pred.rise_votes, pred.fall_votes));
            for (tree, tt) in f.trees().iter().zip(&t.trees) {
                for step in &tt.steps {
                    match tree.nodes[step.node_id] {
                        Node::Split { feature, threshold, left, right } => {
                            let goes_left = p.0[feature] <= threshold;
                            prop_assert_eq!(step.branch_taken, goes_left);
                            prop_assert_eq!(step.next_node, if goes_left { left } else { right });
                        }
                        Node::Leaf { .. } => prop_assert!(false, "step at a leaf"),
                    }
                }
            }
        }
    }

    #[test]
    fn dot_statement_counts(seed in any::<u64>()) {
        let (x, y) = rows(80, seed);
        let f = train_rows(&x, &y, &ForestParams { n_trees: 4, seed, ..Default::default() }).unwrap();
        for (k, tree) in f.trees().iter().enumerate() {
            let dot = export_dot(tree, k);
            let edges = dot.lines().filter(|l| l.contains(" -> ")).count();
            let nodes = dot
                .lines()
                .filter(|l| !l.contains(" -> ") && l.trim_start().starts_with(|c: char| c.is_ascii_digit()))
                .count();
            prop_assert_eq!(nodes, tree.n_splits() + tree.n_leaves());
            prop_assert_eq!(edges, 2 * tree.n_splits());
        }
    }

    #[test]
    fn held_out_metrics_agree(seed in any::<u64>()) {
        let (x, y) = rows(160, seed);
        let f = train_rows(&x[..100], &y[..100], &ForestParams { n_trees: 15, seed, ..Default::default() }).unwrap();
        let (tx, ty) = (&x[100..], &y[100..]);
        let preds: Vec<_> = tx.iter().map(|v| f.predict(v)).collect();
        let labels: Vec<Direction> = preds.iter().map(|p| p.label).collect();
        let m = metrics(&confusion(&labels, ty).unwrap());
        let hits = labels.iter().zip(ty).filter(|(a, b)| a == b).count();
        let accuracy = hits as f64 / ty.len() as f64;
        prop_assert!((m.accuracy.unwrap() - accuracy).abs() <= 1e-12);
        let margins = margin_report(&f, tx, ty).unwrap();
        prop_assert!((margins.empirical_error - (1.0 - accuracy)).abs() <= 1e-12);

        if ty.contains(&Direction::Rise) && ty.contains(&Direction::Fall) {
            let scores: Vec<f64> = preds.iter().map(|p| p.vote_fraction()).collect();
            let curve = roc(&scores, ty).unwrap();
            for w in curve.points.windows(2) {
                prop_assert!(w[0].fpr <= w[1].fpr && w[0].tpr <= w[1].tpr);
            }
        }
    }
}

#[test]
fn oob_settles_as_trees_are_added() {
    let (x, y) = rows(400, 5);
    let f = train_rows(
        &x,
        &y,
        &ForestParams {
            n_trees: 256,
            ..Default::default()
        },
    )
    .unwrap();
    let spread = |bs: std::ops::RangeInclusive<usize>| {
        let errs: Vec<f64> = bs
            .map(|b| oob_error_prefix(&f, &x, &y, b).unwrap().error)
            .collect();
        errs.iter().cloned().fold(f64::MIN, f64::max)
            - errs.iter().cloned().fold(f64::MAX, f64::min)
    };
    let (early, late) = (spread(4..=16), spread(192..=256));
    assert!(late < early, "early {early}, late {late}");
    assert!(late <= 0.03, "late {late}");
}
