//! Seeded generators and independent oracles shared by the
//! integration tests. Everything here is deliberately naive: oracles
//! enumerate or loop directly and never reuse the code paths they
//! check.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hierq_core::density::JointCoefficients;
use hierq_core::linalg::{Operator, StateVector};
use hierq_core::repgroup::IrrepLabel;
use hierq_core::tree::HierNode;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
}

pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> StateVector {
    StateVector::new((0..dim).map(|_| random_complex(rng)).collect()).unwrap()
}

/// Normalized random state.
pub fn random_unit_state(rng: &mut ChaCha8Rng, dim: usize) -> StateVector {
    let v = random_state(rng, dim);
    v.scaled(Complex64::new(1.0 / v.norm(), 0.0))
}

/// Random hermitian matrix built as `(A + A†)/2`.
pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> Operator {
    let a = Operator::new(dim, (0..dim * dim).map(|_| random_complex(rng)).collect()).unwrap();
    a.add(&a.adjoint())
        .unwrap()
        .scaled(Complex64::new(0.5, 0.0))
}

/// Random normalized coefficient tensor.
pub fn random_coefficients(
    rng: &mut ChaCha8Rng,
    macro_dim: usize,
    micro_dims: &[usize],
) -> JointCoefficients {
    let total = macro_dim * micro_dims.iter().product::<usize>();
    let mut coeffs: Vec<Complex64> = (0..total).map(|_| random_complex(rng)).collect();
    let norm = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut coeffs {
        *z /= norm;
    }
    JointCoefficients::new(macro_dim, micro_dims.to_vec(), coeffs).unwrap()
}

/// Random tree of the given depth: distinct sibling labels, levels
/// increasing by one, random arity and random state slots.
pub fn random_tree(rng: &mut ChaCha8Rng, depth: usize) -> HierNode {
    build_random_node(rng, 0, depth, "n")
}

fn build_random_node(rng: &mut ChaCha8Rng, level: u32, depth: usize, label: &str) -> HierNode {
    let rep = IrrepLabel::new(rng.gen_range(0..4));
    let mut node = HierNode::leaf(label, level, rep);
    if rng.gen_bool(0.7) {
        let dim = rng.gen_range(1..4);
        node = node.with_state(random_state(rng, dim));
    }
    if depth > 1 {
        let arity = rng.gen_range(1..4);
        node.children = (0..arity)
            .map(|i| build_random_node(rng, level + 1, depth - 1, &format!("{label}{i}")))
            .collect();
    }
    node
}

/// Brute-force SU(2) multiplicities by weight counting: enumerate all
/// `Π (two_j + 1)` basis weights, count occurrences `N(m)` of each
/// total weight, and read off `mult(J) = N(J) − N(J + 2)` in `two_j`
/// units.
pub fn weight_counting_oracle(reps: &[IrrepLabel]) -> BTreeMap<u32, u64> {
    let mut weight_counts: BTreeMap<i64, u64> = BTreeMap::new();
    let mut stack: Vec<i64> = vec![0];
    for rep in reps {
        let mut next = Vec::with_capacity(stack.len() * rep.dimension() as usize);
        let two_j = i64::from(rep.two_j);
        for &w in &stack {
            let mut m = -two_j;
            while m <= two_j {
                next.push(w + m);
                m += 2;
            }
        }
        stack = next;
    }
    for w in stack {
        *weight_counts.entry(w).or_insert(0) += 1;
    }
    let mut mults = BTreeMap::new();
    for (&w, &count) in &weight_counts {
        if w < 0 {
            continue;
        }
        let above = weight_counts.get(&(w + 2)).copied().unwrap_or(0);
        if count > above {
            mults.insert(w as u32, count - above);
        }
    }
    mults
}
