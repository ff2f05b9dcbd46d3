//! Labeled trees of wave-function slots.
//!
//! Each node carries a level index, an SU(2) irrep tag and an optional
//! local state. Levels are stored explicitly rather than inferred from
//! depth, so partial trees produced during repair keep their original
//! depth labels. A node's slot is independent information: building a
//! whole from parts leaves the whole's slot empty.
//!
//! Two trees are numerically comparable only when their [`TreeShape`]s
//! are equal; the shape records labels, levels, irrep tags, arity and
//! which slots are occupied (with their dimensions). Cross-shape
//! comparison is a hard [`Error::ShapeMismatch`], never a number.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{inner_product, StateVector};
use crate::repgroup::{contains, IrrepLabel};

/// A node of a hierarchical state tree.
#[derive(Debug, Clone, PartialEq)]
pub struct HierNode {
    pub label: String,
    pub level: u32,
    pub rep: IrrepLabel,
    pub state: Option<StateVector>,
    pub children: Vec<HierNode>,
}

impl HierNode {
    /// A childless node with an empty state slot.
    pub fn leaf(label: impl Into<String>, level: u32, rep: IrrepLabel) -> Self {
        Self {
            label: label.into(),
            level,
            rep,
            state: None,
            children: Vec::new(),
        }
    }

    pub fn with_state(mut self, state: StateVector) -> Self {
        self.state = Some(state);
        self
    }

    pub fn with_children(mut self, children: Vec<HierNode>) -> Self {
        self.children = children;
        self
    }

    /// The states-erased skeleton used by the comparability gate.
    pub fn shape(&self) -> TreeShape {
        TreeShape {
            label: self.label.clone(),
            level: self.level,
            two_j: self.rep.two_j,
            state_dim: self.state.as_ref().map(StateVector::dim),
            children: self.children.iter().map(HierNode::shape).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(HierNode::node_count)
            .sum::<usize>()
    }

    /// Number of node tiers from this node to its deepest leaf.
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(HierNode::depth).max().unwrap_or(0)
    }

    /// Recursively clears every state slot.
    pub fn cleared(&self) -> Self {
        Self {
            label: self.label.clone(),
            level: self.level,
            rep: self.rep,
            state: None,
            children: self.children.iter().map(HierNode::cleared).collect(),
        }
    }
}

/// The skeleton of a tree: labels, levels, irrep tags, arity and the
/// occupancy pattern of state slots (amplitudes erased, dimensions
/// kept). States on unequal shapes live in different spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeShape {
    pub label: String,
    pub level: u32,
    pub two_j: u32,
    pub state_dim: Option<usize>,
    pub children: Vec<TreeShape>,
}

/// One violated invariant, located by its node path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Labels from the root to the offending node, joined by `/`.
    pub path: String,
    pub message: String,
}

/// Everything `validate` found; an empty report means the tree is valid.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks structural invariants and, when `check_consistency` is set,
/// that every parent irrep occurs in the product of its children's
/// irreps. Violations are report entries, not errors.
pub fn validate(root: &HierNode, check_consistency: bool) -> ValidationReport {
    let mut report = ValidationReport::default();
    walk(root, &root.label, check_consistency, &mut report);
    report
}

fn walk(node: &HierNode, path: &str, check_consistency: bool, report: &mut ValidationReport) {
    let mut seen: Vec<&str> = Vec::with_capacity(node.children.len());
    for child in &node.children {
        let child_path = format!("{path}/{}", child.label);
        if child.level != node.level + 1 {
            report.violations.push(Violation {
                path: child_path.clone(),
                message: format!(
                    "level step != 1 (parent level {}, child level {})",
                    node.level, child.level
                ),
            });
        }
        if seen.contains(&child.label.as_str()) {
            report.violations.push(Violation {
                path: child_path.clone(),
                message: format!("duplicate sibling label {:?}", child.label),
            });
        } else {
            seen.push(&child.label);
        }
        walk(child, &child_path, check_consistency, report);
    }
    if check_consistency && !node.children.is_empty() {
        let child_reps: Vec<IrrepLabel> = node.children.iter().map(|c| c.rep).collect();
        if contains(&child_reps, node.rep) == 0 {
            report.violations.push(Violation {
                path: path.to_string(),
                message: format!(
                    "product of child representations does not contain two_j = {}",
                    node.rep.two_j
                ),
            });
        }
    }
}

/// Re-parents `parts` (all at the same level `L ≥ 1`) under a new node
/// at level `L − 1`. The new node's state slot is empty: the whole's
/// wave function is new information, not derivable from the parts.
pub fn bind(
    parts: Vec<HierNode>,
    new_label: impl Into<String>,
    new_rep: IrrepLabel,
) -> Result<HierNode> {
    let first_level = match parts.first() {
        None => return Err(Error::EmptyParts),
        Some(p) => p.level,
    };
    for part in &parts {
        if part.level != first_level {
            return Err(Error::LevelMismatch(format!(
                "part {:?} is at level {}, expected {}",
                part.label, part.level, first_level
            )));
        }
    }
    if first_level == 0 {
        return Err(Error::LevelMismatch(
            "parts at level 0 cannot be bound under a new whole".to_string(),
        ));
    }
    Ok(HierNode {
        label: new_label.into(),
        level: first_level - 1,
        rep: new_rep,
        state: None,
        children: parts,
    })
}

/// Product of slot-wise inner products `⟨a_slot|b_slot⟩` over all
/// occupied slots. Fails with [`Error::ShapeMismatch`] unless the two
/// trees have equal shape; the empty product is 1.
pub fn overlap(a: &HierNode, b: &HierNode) -> Result<Complex64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch);
    }
    overlap_same_shape(a, b)
}

fn overlap_same_shape(a: &HierNode, b: &HierNode) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    if let (Some(sa), Some(sb)) = (&a.state, &b.state) {
        acc *= inner_product(sa, sb)?;
    }
    for (ca, cb) in a.children.iter().zip(&b.children) {
        acc *= overlap_same_shape(ca, cb)?;
    }
    Ok(acc)
}

/// Euclidean distance over all occupied slots, gated by shape equality.
pub fn state_distance(a: &HierNode, b: &HierNode) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch);
    }
    Ok(distance_sqr(a, b)?.sqrt())
}

fn distance_sqr(a: &HierNode, b: &HierNode) -> Result<f64> {
    let mut acc = 0.0;
    if let (Some(sa), Some(sb)) = (&a.state, &b.state) {
        acc += sa.sub(sb)?.norm_sqr();
    }
    for (ca, cb) in a.children.iter().zip(&b.children) {
        acc += distance_sqr(ca, cb)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(two_j: u32) -> IrrepLabel {
        IrrepLabel::new(two_j)
    }

    #[test]
    fn single_node_is_valid() {
        let node = HierNode::leaf("root", 0, rep(0));
        assert!(validate(&node, true).is_valid());
    }

    #[test]
    fn level_step_violation_is_reported() {
        let child = HierNode::leaf("a", 0, rep(1));
        let root = HierNode::leaf("root", 0, rep(0)).with_children(vec![child]);
        let report = validate(&root, false);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].path, "root/a");
        assert!(report.violations[0].message.contains("level step"));
    }

    #[test]
    fn duplicate_sibling_labels_are_reported() {
        let root = HierNode::leaf("root", 0, rep(0)).with_children(vec![
            HierNode::leaf("a", 1, rep(1)),
            HierNode::leaf("a", 1, rep(1)),
        ]);
        let report = validate(&root, false);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].message.contains("duplicate"));
    }

    #[test]
    fn consistency_holds_for_singlet_of_two_half_spins() {
        let root = HierNode::leaf("root", 0, rep(0)).with_children(vec![
            HierNode::leaf("a", 1, rep(1)),
            HierNode::leaf("b", 1, rep(1)),
        ]);
        assert!(validate(&root, true).is_valid());
    }

    #[test]
    fn consistency_violation_is_reported() {
        // A single spin-½ child cannot couple to a spin-0 parent.
        let root =
            HierNode::leaf("root", 0, rep(0)).with_children(vec![HierNode::leaf("a", 1, rep(1))]);
        let report = validate(&root, true);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].path, "root");
    }

    #[test]
    fn bind_builds_a_new_whole() {
        let parts = vec![
            HierNode::leaf("cell1", 1, rep(1)),
            HierNode::leaf("cell2", 1, rep(1)),
        ];
        let whole = bind(parts, "organism", rep(0)).unwrap();
        assert_eq!(whole.level, 0);
        assert_eq!(whole.children.len(), 2);
        assert!(whole.state.is_none());
        assert_eq!(whole.children[0].label, "cell1");
        assert!(validate(&whole, true).is_valid());
    }

    #[test]
    fn bind_rejects_level_mismatch_and_empty_parts() {
        let parts = vec![
            HierNode::leaf("a", 1, rep(1)),
            HierNode::leaf("b", 2, rep(1)),
        ];
        assert!(matches!(
            bind(parts, "whole", rep(0)),
            Err(Error::LevelMismatch(_))
        ));
        assert!(matches!(
            bind(vec![], "whole", rep(0)),
            Err(Error::EmptyParts)
        ));
    }

    #[test]
    fn bind_then_validate_triplet() {
        let parts = vec![
            HierNode::leaf("a", 1, rep(1)),
            HierNode::leaf("b", 1, rep(1)),
        ];
        let whole = bind(parts, "whole", rep(2)).unwrap();
        assert!(validate(&whole, true).is_valid());
    }

    #[test]
    fn shape_gate_rejects_different_slot_occupancy() {
        let q = StateVector::basis(2, 0).unwrap();
        let leaves = || {
            vec![
                HierNode::leaf("a", 1, rep(1)).with_state(q.clone()),
                HierNode::leaf("b", 1, rep(1)).with_state(q.clone()),
            ]
        };
        // Parts-only tree: slots on the leaves only.
        let assembled = HierNode::leaf("cat", 0, rep(0)).with_children(leaves());
        // Whole-and-parts tree: the root slot is occupied as well.
        let with_whole = HierNode::leaf("cat", 0, rep(0))
            .with_state(q.clone())
            .with_children(leaves());
        assert!(matches!(
            overlap(&assembled, &with_whole),
            Err(Error::ShapeMismatch)
        ));
        assert!(matches!(
            state_distance(&assembled, &with_whole),
            Err(Error::ShapeMismatch)
        ));
        // Same shape compares fine.
        assert!(overlap(&assembled, &assembled).is_ok());
    }

    #[test]
    fn overlap_multiplies_slotwise_inner_products() {
        let q0 = StateVector::basis(2, 0).unwrap();
        let q1 = StateVector::basis(2, 1).unwrap();
        let a = HierNode::leaf("n", 0, rep(0)).with_state(q0.clone());
        let b = HierNode::leaf("n", 0, rep(0)).with_state(q1);
        // Equal shapes (same dims), orthogonal slots.
        let z = overlap(&a, &b).unwrap();
        assert_eq!(z, Complex64::new(0.0, 0.0));
        let z = overlap(&a, &a).unwrap();
        assert_eq!(z, Complex64::new(1.0, 0.0));
    }
}
