//! Hierarchical Haar encoding of a register of leaf states.
//!
//! A layer of `2^(N−1)` leaves is folded pairwise into sum and
//! difference combinations, `φ = (u + v)/√2` and `ψ = (u − v)/√2`,
//! level by level; the φ side keeps being folded while every ψ is
//! retained. The stored result is the top φ plus all ψ levels,
//! exactly as many independent vectors as there were leaves.
//!
//! The transform is a linear isometry on the stacked coefficient space:
//! nothing is renormalized per vector, which is what keeps it exactly
//! invertible and norm-preserving even for non-orthogonal leaves.
//! Levels are indexed with 0 at the top.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::StateVector;

/// The input register: a power-of-two count of equal-dimension states.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafLayer {
    leaves: Vec<StateVector>,
}

impl LeafLayer {
    pub fn new(leaves: Vec<StateVector>) -> Result<Self> {
        let count = leaves.len();
        if count == 0 || !count.is_power_of_two() {
            return Err(Error::MalformedTree(format!(
                "leaf count must be a power of two, got {count}"
            )));
        }
        if count > crate::linalg::MAX_DIM {
            return Err(Error::DimensionCap {
                dim: count,
                max: crate::linalg::MAX_DIM,
            });
        }
        let dim = leaves[0].dim();
        for leaf in &leaves {
            if leaf.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "leaf layer",
                    expected: dim,
                    got: leaf.dim(),
                });
            }
        }
        Ok(Self { leaves })
    }

    pub fn leaves(&self) -> &[StateVector] {
        &self.leaves
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn local_dim(&self) -> usize {
        self.leaves[0].dim()
    }

    /// Number of hierarchy levels `N` with `2^(N−1)` leaves.
    pub fn level_count(&self) -> usize {
        self.leaves.len().trailing_zeros() as usize + 1
    }

    pub fn total_norm_sqr(&self) -> f64 {
        self.leaves.iter().map(StateVector::norm_sqr).sum()
    }
}

/// The encoded register: the top φ and the retained ψ vectors, level 0
/// at the top, level `l` holding `2^l` vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarTree {
    phi_top: StateVector,
    psi_levels: Vec<Vec<StateVector>>,
}

impl HaarTree {
    pub fn new(phi_top: StateVector, psi_levels: Vec<Vec<StateVector>>) -> Result<Self> {
        let max_levels = crate::linalg::MAX_DIM.trailing_zeros() as usize;
        if psi_levels.len() > max_levels {
            return Err(Error::MalformedTree(format!(
                "{} levels exceed the supported maximum of {max_levels}",
                psi_levels.len()
            )));
        }
        let dim = phi_top.dim();
        for (level, psis) in psi_levels.iter().enumerate() {
            let expected = 1usize << level;
            if psis.len() != expected {
                return Err(Error::MalformedTree(format!(
                    "level {level} holds {} psi vectors, expected {expected}",
                    psis.len()
                )));
            }
            for psi in psis {
                if psi.dim() != dim {
                    return Err(Error::MalformedTree(format!(
                        "psi vector at level {level} has dimension {}, expected {dim}",
                        psi.dim()
                    )));
                }
            }
        }
        Ok(Self {
            phi_top,
            psi_levels,
        })
    }

    pub fn phi_top(&self) -> &StateVector {
        &self.phi_top
    }

    pub fn psi_levels(&self) -> &[Vec<StateVector>] {
        &self.psi_levels
    }

    pub fn local_dim(&self) -> usize {
        self.phi_top.dim()
    }

    /// Leaves the decoded register will have: `2^(levels)`.
    pub fn leaf_count(&self) -> usize {
        1 << self.psi_levels.len()
    }

    /// Independent vectors held by the tree; equals [`Self::leaf_count`].
    pub fn stored_vector_count(&self) -> usize {
        1 + self.psi_levels.iter().map(|psis| psis.len()).sum::<usize>()
    }

    pub fn total_norm_sqr(&self) -> f64 {
        self.phi_top.norm_sqr()
            + self
                .psi_levels
                .iter()
                .flatten()
                .map(StateVector::norm_sqr)
                .sum::<f64>()
    }

    /// Zeroes every ψ whose norm is at or below `threshold`. Lossy:
    /// nothing guarantees the decoded register stays close.
    pub fn truncate(&mut self, threshold: f64) -> usize {
        let mut dropped = 0;
        for psis in &mut self.psi_levels {
            for psi in psis.iter_mut() {
                if psi.norm() <= threshold && psi.norm_sqr() != 0.0 {
                    *psi = StateVector::zeros(psi.dim()).expect("dim > 0");
                    dropped += 1;
                }
            }
        }
        dropped
    }
}

/// One folding step: `φ = (u + v)/√2`, `ψ = (u − v)/√2`. Exact linear
/// combination, not renormalized per vector.
pub fn encode_pair(u: &StateVector, v: &StateVector) -> Result<(StateVector, StateVector)> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            context: "haar pair",
            expected: u.dim(),
            got: v.dim(),
        });
    }
    let phi = u.add(v)?.scaled(Complex64::new(FRAC_1_SQRT_2, 0.0));
    let psi = u.sub(v)?.scaled(Complex64::new(FRAC_1_SQRT_2, 0.0));
    Ok((phi, psi))
}

/// Inverse of [`encode_pair`].
pub fn decode_pair(phi: &StateVector, psi: &StateVector) -> Result<(StateVector, StateVector)> {
    if phi.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            context: "haar pair",
            expected: phi.dim(),
            got: psi.dim(),
        });
    }
    let u = phi.add(psi)?.scaled(Complex64::new(FRAC_1_SQRT_2, 0.0));
    let v = phi.sub(psi)?.scaled(Complex64::new(FRAC_1_SQRT_2, 0.0));
    Ok((u, v))
}

/// Folds a leaf layer level by level into a [`HaarTree`].
pub fn encode(layer: &LeafLayer) -> Result<HaarTree> {
    let mut phis: Vec<StateVector> = layer.leaves().to_vec();
    let mut psi_levels: Vec<Vec<StateVector>> = Vec::new();
    while phis.len() > 1 {
        let mut next_phis = Vec::with_capacity(phis.len() / 2);
        let mut psis = Vec::with_capacity(phis.len() / 2);
        for pair in phis.chunks_exact(2) {
            let (phi, psi) = encode_pair(&pair[0], &pair[1])?;
            next_phis.push(phi);
            psis.push(psi);
        }
        psi_levels.push(psis);
        phis = next_phis;
    }
    psi_levels.reverse();
    HaarTree::new(phis.pop().expect("one phi remains"), psi_levels)
}

/// Unfolds a [`HaarTree`] back into its leaf layer, top-down.
pub fn decode(tree: &HaarTree) -> Result<LeafLayer> {
    let mut phis = vec![tree.phi_top().clone()];
    for psis in tree.psi_levels() {
        let mut next = Vec::with_capacity(phis.len() * 2);
        for (phi, psi) in phis.iter().zip(psis) {
            let (u, v) = decode_pair(phi, psi)?;
            next.push(u);
            next.push(v);
        }
        phis = next;
    }
    LeafLayer::new(phis)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::SQRT_2;

    use super::*;

    fn qubit(i: usize) -> StateVector {
        StateVector::basis(2, i).unwrap()
    }

    #[test]
    fn encode_pair_of_basis_states() {
        let (phi, psi) = encode_pair(&qubit(0), &qubit(1)).unwrap();
        let h = 1.0 / SQRT_2;
        assert!((phi.amps()[0].re - h).abs() < 1e-15);
        assert!((phi.amps()[1].re - h).abs() < 1e-15);
        assert!((psi.amps()[0].re - h).abs() < 1e-15);
        assert!((psi.amps()[1].re + h).abs() < 1e-15);
    }

    #[test]
    fn encode_pair_of_equal_states() {
        let u = StateVector::from_reals(&[0.6, 0.8]).unwrap();
        let (phi, psi) = encode_pair(&u, &u).unwrap();
        assert_eq!(psi.norm_sqr(), 0.0);
        let expected = u.scaled(Complex64::new(SQRT_2, 0.0));
        assert!(phi.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn encode_pair_rejects_dim_mismatch() {
        let u = StateVector::zeros(2).unwrap();
        let v = StateVector::zeros(3).unwrap();
        assert!(matches!(
            encode_pair(&u, &v),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn encode_four_alternating_qubits() {
        let layer = LeafLayer::new(vec![qubit(0), qubit(1), qubit(0), qubit(1)]).unwrap();
        let tree = encode(&layer).unwrap();
        assert_eq!(tree.stored_vector_count(), 4);

        // Both mid-level φ are equal, so ψ⁰ vanishes and the top φ is
        // |0⟩ + |1⟩ with unit amplitudes.
        let psi0 = &tree.psi_levels()[0][0];
        assert_eq!(psi0.norm_sqr(), 0.0);
        let phi0 = tree.phi_top();
        assert!((phi0.amps()[0].re - 1.0).abs() < 1e-15);
        assert!((phi0.amps()[1].re - 1.0).abs() < 1e-15);

        let h = 1.0 / SQRT_2;
        for psi in &tree.psi_levels()[1] {
            assert!((psi.amps()[0].re - h).abs() < 1e-15);
            assert!((psi.amps()[1].re + h).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_signal_concentrates_at_top() {
        let u = StateVector::from_reals(&[0.3, -0.4]).unwrap();
        let layer = LeafLayer::new(vec![u.clone(); 4]).unwrap();
        let tree = encode(&layer).unwrap();
        // 4 leaves: top φ = 2·u, every ψ zero.
        let expected = u.scaled(Complex64::new(2.0, 0.0));
        assert!(tree.phi_top().max_abs_diff(&expected).unwrap() < 1e-12);
        for psis in tree.psi_levels() {
            for psi in psis {
                assert!(psi.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn single_leaf_is_its_own_tree() {
        let u = StateVector::from_reals(&[0.6, 0.8]).unwrap();
        let layer = LeafLayer::new(vec![u.clone()]).unwrap();
        let tree = encode(&layer).unwrap();
        assert!(tree.psi_levels().is_empty());
        assert_eq!(tree.phi_top(), &u);
        let back = decode(&tree).unwrap();
        assert_eq!(back.leaves(), layer.leaves());
    }

    #[test]
    fn decode_of_zero_psis_gives_equal_leaves() {
        let phi = StateVector::from_reals(&[SQRT_2, 0.0]).unwrap();
        let zero = StateVector::zeros(2).unwrap();
        let tree = HaarTree::new(phi, vec![vec![zero]]).unwrap();
        let layer = decode(&tree).unwrap();
        assert_eq!(layer.len(), 2);
        assert_eq!(layer.leaves()[0], layer.leaves()[1]);
        assert!((layer.leaves()[0].amps()[0].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn leaf_layer_rejects_bad_counts() {
        assert!(LeafLayer::new(vec![]).is_err());
        assert!(LeafLayer::new(vec![qubit(0); 3]).is_err());
        let mixed = vec![qubit(0), StateVector::zeros(3).unwrap()];
        assert!(LeafLayer::new(mixed).is_err());
    }

    #[test]
    fn haar_tree_validates_level_sizes() {
        let zero = StateVector::zeros(2).unwrap();
        assert!(HaarTree::new(zero.clone(), vec![vec![zero.clone(), zero.clone()]]).is_err());
        assert!(HaarTree::new(zero.clone(), vec![vec![StateVector::zeros(3).unwrap()]]).is_err());
    }

    #[test]
    fn truncate_zeroes_small_psis() {
        let layer = LeafLayer::new(vec![
            StateVector::from_reals(&[1.0, 0.0]).unwrap(),
            StateVector::from_reals(&[1.0, 1e-9]).unwrap(),
        ])
        .unwrap();
        let mut tree = encode(&layer).unwrap();
        let dropped = tree.truncate(1e-6);
        assert_eq!(dropped, 1);
        assert_eq!(tree.psi_levels()[0][0].norm_sqr(), 0.0);
    }
}
