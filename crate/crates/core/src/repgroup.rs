//! SU(2) irreducible representation arithmetic.
//!
//! Labels carry `two_j` (twice the spin) so half-integer spins stay in
//! integer arithmetic; an irrep labeled `two_j` has dimension
//! `two_j + 1`. Coupling a pair produces every label from
//! `|a − b|` to `a + b` in steps of two, and products of many factors
//! are folded pairwise with multiplicity bookkeeping, which keeps
//! length-10 products instant.

use std::collections::BTreeMap;
use std::fmt;

/// An SU(2) irrep label; `two_j = 1` is spin-½.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IrrepLabel {
    pub two_j: u32,
}

impl IrrepLabel {
    pub fn new(two_j: u32) -> Self {
        Self { two_j }
    }

    pub fn dimension(&self) -> u64 {
        u64::from(self.two_j) + 1
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_j.is_multiple_of(2) {
            write!(f, "j={}", self.two_j / 2)
        } else {
            write!(f, "j={}/2", self.two_j)
        }
    }
}

/// A multiset of irreps with positive multiplicities, ordered by label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RepMultiset {
    mults: BTreeMap<u32, u64>,
}

impl RepMultiset {
    /// The singleton `{two_j = 0 : 1}`, the decomposition of an empty
    /// tensor product.
    pub fn trivial() -> Self {
        let mut mults = BTreeMap::new();
        mults.insert(0, 1);
        Self { mults }
    }

    pub fn multiplicity(&self, rep: IrrepLabel) -> u64 {
        self.mults.get(&rep.two_j).copied().unwrap_or(0)
    }

    /// Irreps and multiplicities in ascending `two_j` order.
    pub fn iter(&self) -> impl Iterator<Item = (IrrepLabel, u64)> + '_ {
        self.mults
            .iter()
            .map(|(&two_j, &m)| (IrrepLabel::new(two_j), m))
    }

    /// `Σ mult · (two_j + 1)`; equals the product of the factor
    /// dimensions after any decomposition.
    pub fn total_dimension(&self) -> u64 {
        self.mults
            .iter()
            .map(|(&two_j, &m)| m * (u64::from(two_j) + 1))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.mults.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mults.is_empty()
    }

    fn add(&mut self, two_j: u32, count: u64) {
        if count > 0 {
            *self.mults.entry(two_j).or_insert(0) += count;
        }
    }
}

/// Clebsch–Gordan series of a pair: every `two_j` from `|a − b|` to
/// `a + b` in steps of 2, multiplicity one each.
pub fn couple_pair(a: IrrepLabel, b: IrrepLabel) -> RepMultiset {
    let lo = a.two_j.abs_diff(b.two_j);
    let hi = a.two_j + b.two_j;
    let mut out = RepMultiset::default();
    let mut two_j = lo;
    while two_j <= hi {
        out.add(two_j, 1);
        two_j += 2;
    }
    out
}

/// Decomposes `⊗ reps` into irreps by folding [`couple_pair`] with
/// multiplicity accounting. An empty product is the trivial rep.
pub fn decompose_product(reps: &[IrrepLabel]) -> RepMultiset {
    let mut acc = RepMultiset::trivial();
    for &rep in reps {
        let mut next = RepMultiset::default();
        for (carried, mult) in acc.iter() {
            for (coupled, _) in couple_pair(carried, rep).iter() {
                next.add(coupled.two_j, mult);
            }
        }
        acc = next;
    }
    acc
}

/// Multiplicity of `target` in the decomposition of `⊗ reps`;
/// zero means the assembly cannot form the target.
pub fn contains(reps: &[IrrepLabel], target: IrrepLabel) -> u64 {
    decompose_product(reps).multiplicity(target)
}
