//! The representation engine against the brute-force weight-counting
//! oracle, plus its algebraic properties.

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::Rng;

use common::{rng, weight_counting_oracle};
use hierq_core::repgroup::{contains, decompose_product, IrrepLabel, RepMultiset};

fn labels(two_js: &[u32]) -> Vec<IrrepLabel> {
    two_js.iter().map(|&j| IrrepLabel::new(j)).collect()
}

fn as_map(set: &RepMultiset) -> BTreeMap<u32, u64> {
    set.iter().map(|(rep, m)| (rep.two_j, m)).collect()
}

/// Every rep sequence of length ≤ 5 with two_j ≤ 3, all 1365 of them.
#[test]
fn decomposition_matches_weight_oracle_exhaustively() {
    let mut sequences: Vec<Vec<u32>> = vec![vec![]];
    for len in 1..=5usize {
        let mut level: Vec<Vec<u32>> = Vec::new();
        let count = 4usize.pow(len as u32);
        for code in 0..count {
            let mut seq = Vec::with_capacity(len);
            let mut rest = code;
            for _ in 0..len {
                seq.push((rest % 4) as u32);
                rest /= 4;
            }
            level.push(seq);
        }
        sequences.extend(level);
    }
    assert_eq!(sequences.len(), 1 + 4 + 16 + 64 + 256 + 1024);

    for seq in &sequences {
        let reps = labels(seq);
        let got = as_map(&decompose_product(&reps));
        let expected = weight_counting_oracle(&reps);
        assert_eq!(got, expected, "sequence {seq:?}");
    }
}

#[test]
fn frozen_decompositions() {
    // Values frozen from the weight oracle by hand: three spin-½
    // factors give doublet twice plus one quartet; four give two
    // singlets, three triplets and one quintet.
    let got = as_map(&decompose_product(&labels(&[1, 1, 1])));
    assert_eq!(got, BTreeMap::from([(1, 2), (3, 1)]));

    let got = as_map(&decompose_product(&labels(&[1, 1, 1, 1])));
    assert_eq!(got, BTreeMap::from([(0, 2), (2, 3), (4, 1)]));
}

#[test]
fn containment_matches_oracle() {
    let cases: &[(&[u32], u32)] = &[
        (&[1, 1], 0),
        (&[1, 1, 1], 0),
        (&[1], 1),
        (&[2, 2, 2], 2),
        (&[3, 1, 2], 0),
    ];
    for &(seq, target) in cases {
        let reps = labels(seq);
        let oracle = weight_counting_oracle(&reps)
            .get(&target)
            .copied()
            .unwrap_or(0);
        assert_eq!(contains(&reps, IrrepLabel::new(target)), oracle);
    }
}

#[test]
fn dimension_conservation_on_random_sequences() {
    let mut rng = rng(21);
    for _ in 0..1000 {
        let len = rng.gen_range(0..=6);
        let seq: Vec<u32> = (0..len).map(|_| rng.gen_range(0..=4)).collect();
        let reps = labels(&seq);
        let product_dim: u64 = reps.iter().map(IrrepLabel::dimension).product();
        assert_eq!(decompose_product(&reps).total_dimension(), product_dim);
    }
}

proptest! {
    #[test]
    fn prop_order_independence(seq in prop::collection::vec(0u32..5, 0..6), swap_a in 0usize..6, swap_b in 0usize..6) {
        let mut permuted = seq.clone();
        if !permuted.is_empty() {
            let a = swap_a % permuted.len();
            let b = swap_b % permuted.len();
            permuted.swap(a, b);
        }
        prop_assert_eq!(
            decompose_product(&labels(&seq)),
            decompose_product(&labels(&permuted))
        );
    }

    #[test]
    fn prop_parity(seq in prop::collection::vec(0u32..5, 0..6)) {
        let total: u32 = seq.iter().sum();
        let series = decompose_product(&labels(&seq));
        for (rep, _) in series.iter() {
            prop_assert_eq!(rep.two_j % 2, total % 2);
        }
    }

    #[test]
    fn prop_couple_pair_bounds(a in 0u32..8, b in 0u32..8) {
        let series = decompose_product(&labels(&[a, b]));
        let lo = a.abs_diff(b);
        let hi = a + b;
        for (rep, mult) in series.iter() {
            prop_assert!(rep.two_j >= lo && rep.two_j <= hi);
            prop_assert_eq!(mult, 1);
        }
        prop_assert_eq!(series.multiplicity(IrrepLabel::new(lo)), 1);
        prop_assert_eq!(series.multiplicity(IrrepLabel::new(hi)), 1);
    }
}
