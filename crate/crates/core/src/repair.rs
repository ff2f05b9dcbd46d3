//! The three-level self-repair cascade.
//!
//! An organism is a three-tier tree (whole, cells, components) whose
//! cell representations couple to a declared target irrep. Damage
//! removes cells; if the surviving cells can no longer couple to the
//! target, the remainder descends to the component level, and the
//! missing cells are rebuilt by cloning a surviving cell's sub-tree
//! until the original cell count is restored.
//!
//! Every step is a pure rewrite of immutable trees, and a cascade run
//! is recorded as an ordered trace of stage snapshots so it can be
//! replayed and compared byte for byte after canonical serialization.
//! Deeper hierarchies would need a correspondingly deeper cascade;
//! they are rejected rather than guessed at.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::repgroup::{contains, IrrepLabel};
use crate::tree::{validate, HierNode};

/// Tiers in an organism tree: whole / cells / components.
const ORGANISM_DEPTH: usize = 3;

/// A healthy three-tier organism: the cell representations couple to
/// `target` and the whole tree passes consistency validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Organism {
    tree: HierNode,
    target: IrrepLabel,
}

impl Organism {
    pub fn new(tree: HierNode, target: IrrepLabel, cell_count: usize) -> Result<Self> {
        let depth = tree.depth();
        if depth != ORGANISM_DEPTH {
            return Err(Error::UnsupportedDepth { got: depth });
        }
        if tree.children.is_empty() {
            return Err(Error::InvalidOrganism("organism has no cells".to_string()));
        }
        if tree.children.len() != cell_count {
            return Err(Error::InvalidOrganism(format!(
                "declared cell count {cell_count} does not match the {} cells present",
                tree.children.len()
            )));
        }
        for cell in &tree.children {
            if cell.children.is_empty() {
                return Err(Error::InvalidOrganism(format!(
                    "cell {:?} has no components",
                    cell.label
                )));
            }
        }
        if tree.rep != target {
            return Err(Error::InvalidOrganism(format!(
                "root representation two_j = {} does not match the target two_j = {}",
                tree.rep.two_j, target.two_j
            )));
        }
        let report = validate(&tree, true);
        if !report.is_valid() {
            let first = &report.violations[0];
            return Err(Error::InvalidOrganism(format!(
                "tree fails validation at {}: {}",
                first.path, first.message
            )));
        }
        if contains(&cell_reps(&tree), target) == 0 {
            return Err(Error::InvalidOrganism(format!(
                "cell representations do not couple to the target two_j = {}",
                target.two_j
            )));
        }
        Ok(Self { tree, target })
    }

    pub fn tree(&self) -> &HierNode {
        &self.tree
    }

    pub fn target(&self) -> IrrepLabel {
        self.target
    }

    pub fn cell_count(&self) -> usize {
        self.tree.children.len()
    }
}

fn cell_reps(tree: &HierNode) -> Vec<IrrepLabel> {
    tree.children.iter().map(|c| c.rep).collect()
}

/// A destructive event: the set of cell indices (0-based) to remove.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DamageEvent {
    removed: BTreeSet<usize>,
}

impl DamageEvent {
    pub fn new(removed: impl IntoIterator<Item = usize>) -> Self {
        Self {
            removed: removed.into_iter().collect(),
        }
    }

    pub fn removed(&self) -> &BTreeSet<usize> {
        &self.removed
    }

    pub fn is_empty(&self) -> bool {
        self.removed.is_empty()
    }
}

/// What is left after damage. Not an [`Organism`]: it may no longer be
/// able to form one.
#[derive(Debug, Clone, PartialEq)]
pub struct Remainder {
    tree: HierNode,
    target: IrrepLabel,
    original_cell_count: usize,
    surviving_indices: Vec<usize>,
}

impl Remainder {
    pub fn tree(&self) -> &HierNode {
        &self.tree
    }

    pub fn target(&self) -> IrrepLabel {
        self.target
    }

    pub fn original_cell_count(&self) -> usize {
        self.original_cell_count
    }

    pub fn surviving_cells(&self) -> &[HierNode] {
        &self.tree.children
    }

    /// Original organism indices of the surviving cells, in order.
    pub fn surviving_indices(&self) -> &[usize] {
        &self.surviving_indices
    }

    /// Whether the surviving cells still couple to the target.
    pub fn is_feasible(&self) -> bool {
        contains(&cell_reps(&self.tree), self.target) > 0
    }
}

/// Removes the damaged cells, keeping the survivors' sub-trees intact.
/// The whole's state slot is cleared (its wave function is invalidated
/// by the loss), except for an empty damage event, which is a no-op.
pub fn apply_damage(org: &Organism, damage: &DamageEvent) -> Result<Remainder> {
    let n = org.cell_count();
    for &index in damage.removed() {
        if index >= n {
            return Err(Error::IndexOutOfRange {
                context: "damaged cell",
                index,
                bound: n,
            });
        }
    }
    if damage.removed().len() == n {
        return Err(Error::EmptyRemainder);
    }
    let mut tree = org.tree().clone();
    let mut surviving_indices: Vec<usize> = (0..n).collect();
    if !damage.is_empty() {
        tree.state = None;
        let mut index = 0;
        tree.children.retain(|_| {
            let keep = !damage.removed().contains(&index);
            index += 1;
            keep
        });
        surviving_indices.retain(|i| !damage.removed().contains(i));
    }
    Ok(Remainder {
        tree,
        target: org.target(),
        original_cell_count: n,
        surviving_indices,
    })
}

/// One component surviving the descent, tagged with the cell it came
/// from.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolComponent {
    /// Index of the source cell in the original organism.
    pub source_cell: usize,
    pub node: HierNode,
}

/// A cell's worth of surviving components, keeping the cell's identity
/// so the pool can be regrouped.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivingCell {
    /// Index in the original organism.
    pub index: usize,
    pub label: String,
    pub level: u32,
    pub rep: IrrepLabel,
    pub components: Vec<HierNode>,
}

/// The component-level pool of a descended remainder: the flattened
/// multiset of component sub-trees, grouped by provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentPool {
    organism_label: String,
    root_level: u32,
    cells: Vec<SurvivingCell>,
}

impl ComponentPool {
    pub fn cells(&self) -> &[SurvivingCell] {
        &self.cells
    }

    pub fn organism_label(&self) -> &str {
        &self.organism_label
    }

    /// The flattened component view, in cell order.
    pub fn components(&self) -> Vec<PoolComponent> {
        self.cells
            .iter()
            .flat_map(|cell| {
                cell.components.iter().map(|node| PoolComponent {
                    source_cell: cell.index,
                    node: node.clone(),
                })
            })
            .collect()
    }

    /// The flattened multiset of component representations.
    pub fn component_reps(&self) -> Vec<IrrepLabel> {
        self.cells
            .iter()
            .flat_map(|cell| cell.components.iter().map(|node| node.rep))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.cells.iter().map(|c| c.components.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Breaks the remainder down to its component level. The cells' own
/// wave functions dissolve; the component sub-trees (and their states)
/// carry over, tagged with where they came from. The surviving-cell
/// order preserves the original cell order.
pub fn descend(remainder: &Remainder) -> ComponentPool {
    let cells = remainder
        .surviving_cells()
        .iter()
        .zip(remainder.surviving_indices())
        .map(|(cell, &index)| SurvivingCell {
            index,
            label: cell.label.clone(),
            level: cell.level,
            rep: cell.rep,
            components: cell.children.clone(),
        })
        .collect();
    ComponentPool {
        organism_label: remainder.tree().label.clone(),
        root_level: remainder.tree().level,
        cells,
    }
}

/// Rebuilds a full organism from a descended pool: the surviving cells
/// are reassembled from their components, and the missing cells are
/// clones of `template` (a cell sub-tree) with every state slot empty,
/// until exactly `n` cells exist. Fails with
/// [`Error::InfeasibleRebuild`] when the resulting cell representations
/// still cannot couple to `target`.
pub fn rebuild(
    pool: &ComponentPool,
    template: &HierNode,
    n: usize,
    target: IrrepLabel,
) -> Result<Organism> {
    if pool.is_empty() {
        return Err(Error::EmptyRemainder);
    }
    let survivors = pool.cells().len();
    if survivors > n {
        return Err(Error::InvalidOrganism(format!(
            "pool holds {survivors} cells but the rebuilt organism wants {n}"
        )));
    }

    let mut cell_nodes: Vec<HierNode> = pool
        .cells()
        .iter()
        .map(|cell| HierNode {
            label: cell.label.clone(),
            level: cell.level,
            rep: cell.rep,
            state: None,
            children: cell.components.clone(),
        })
        .collect();

    let mut taken: BTreeSet<String> = cell_nodes.iter().map(|c| c.label.clone()).collect();
    for _ in survivors..n {
        let mut clone = template.cleared();
        let mut suffix = 1usize;
        let mut label = format!("{}-r{suffix}", template.label);
        while taken.contains(&label) {
            suffix += 1;
            label = format!("{}-r{suffix}", template.label);
        }
        taken.insert(label.clone());
        clone.label = label;
        cell_nodes.push(clone);
    }

    let reps: Vec<IrrepLabel> = cell_nodes.iter().map(|c| c.rep).collect();
    if contains(&reps, target) == 0 {
        return Err(Error::InfeasibleRebuild {
            cells: reps.len(),
            target_two_j: target.two_j,
        });
    }

    let root = HierNode {
        label: pool.organism_label.clone(),
        level: pool.root_level,
        rep: target,
        state: None,
        children: cell_nodes,
    };
    Organism::new(root, target, n)
}

/// Stages a cascade run can pass through, in rewrite order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageKind {
    Damaged,
    Infeasible,
    Descended,
    Rebuilt,
    Healthy,
}

impl StageKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StageKind::Damaged => "damaged",
            StageKind::Infeasible => "infeasible",
            StageKind::Descended => "descended",
            StageKind::Rebuilt => "rebuilt",
            StageKind::Healthy => "healthy",
        }
    }
}

/// One trace entry: the stage tag plus the full tree snapshot at that
/// point.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub kind: StageKind,
    pub tree: HierNode,
}

/// How a cascade run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CascadeOutcome {
    /// The organism was still (or again) able to form a whole without
    /// descending.
    Healthy,
    /// The missing cells were rebuilt.
    Rebuilt,
    /// Rebuilding could not restore the target symmetry.
    InfeasibleRebuild,
}

impl CascadeOutcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            CascadeOutcome::Healthy => "healthy",
            CascadeOutcome::Rebuilt => "rebuilt",
            CascadeOutcome::InfeasibleRebuild => "infeasible_rebuild",
        }
    }
}

/// A complete, replayable record of one cascade run.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeTrace {
    pub stages: Vec<Stage>,
    pub outcome: CascadeOutcome,
    /// Number of tree rewrites performed (damage, descent, rebuild);
    /// feasibility checks do not count.
    pub rewrite_steps: usize,
}

impl CascadeTrace {
    /// The tree of the final stage.
    pub fn final_tree(&self) -> &HierNode {
        &self
            .stages
            .last()
            .expect("trace has at least one stage")
            .tree
    }
}

/// Runs the staged cascade: damage, feasibility check, descent,
/// rebuild. Stops at `healthy` when the remainder can still couple to
/// the target; records `infeasible_rebuild` when cloning cannot restore
/// it. An empty damage event yields the single-stage healthy trace.
pub fn repair_cascade(org: &Organism, damage: &DamageEvent) -> Result<CascadeTrace> {
    if damage.is_empty() {
        return Ok(CascadeTrace {
            stages: vec![Stage {
                kind: StageKind::Healthy,
                tree: org.tree().clone(),
            }],
            outcome: CascadeOutcome::Healthy,
            rewrite_steps: 0,
        });
    }

    let remainder = apply_damage(org, damage)?;
    let mut stages = vec![Stage {
        kind: StageKind::Damaged,
        tree: remainder.tree().clone(),
    }];

    if remainder.is_feasible() {
        stages.push(Stage {
            kind: StageKind::Healthy,
            tree: remainder.tree().clone(),
        });
        return Ok(CascadeTrace {
            stages,
            outcome: CascadeOutcome::Healthy,
            rewrite_steps: 1,
        });
    }

    stages.push(Stage {
        kind: StageKind::Infeasible,
        tree: remainder.tree().clone(),
    });

    let pool = descend(&remainder);
    stages.push(Stage {
        kind: StageKind::Descended,
        tree: descended_snapshot(&remainder, &pool),
    });

    // Lowest-index survivor serves as the cloning template.
    let template = &remainder.surviving_cells()[0];
    match rebuild(
        &pool,
        template,
        remainder.original_cell_count(),
        org.target(),
    ) {
        Ok(rebuilt) => {
            stages.push(Stage {
                kind: StageKind::Rebuilt,
                tree: rebuilt.tree().clone(),
            });
            Ok(CascadeTrace {
                stages,
                outcome: CascadeOutcome::Rebuilt,
                rewrite_steps: 3,
            })
        }
        Err(Error::InfeasibleRebuild { .. }) => Ok(CascadeTrace {
            stages,
            outcome: CascadeOutcome::InfeasibleRebuild,
            rewrite_steps: 2,
        }),
        Err(other) => Err(other),
    }
}

/// The component-level form of the remainder: the cell tier dissolves
/// and the components hang off the root, keeping their original level
/// labels. Component labels are qualified by their source cell so
/// siblings stay distinct.
fn descended_snapshot(remainder: &Remainder, pool: &ComponentPool) -> HierNode {
    let mut root = remainder.tree().clone();
    root.state = None;
    root.children = pool
        .cells()
        .iter()
        .flat_map(|cell| {
            cell.components.iter().map(|node| {
                let mut qualified = node.clone();
                qualified.label = format!("{}.{}", cell.label, node.label);
                qualified
            })
        })
        .collect();
    root
}
