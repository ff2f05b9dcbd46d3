//! Canonical JSON encoding and strict decoding of every payload type.
//!
//! Writing is hand-rolled so that the output is canonical: fixed key
//! order, no whitespace, and every float printed with 17 significant
//! digits (`{:.16e}`), which round-trips an `f64` bit-exactly through
//! decimal. Serializing, parsing and serializing again reproduces the
//! same bytes, so golden files and trace comparisons can be exact.
//!
//! Parsing goes through serde mirror structs with
//! `deny_unknown_fields`: unknown keys are rejected, not ignored.
//! Complex numbers travel as two-element `[re, im]` arrays.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Deserialize;

use crate::density::{DensityMatrix, JointCoefficients, MacroConditionedOperator};
use crate::error::{Error, Result};
use crate::haar::{HaarTree, LeafLayer};
use crate::linalg::{Operator, StateVector};
use crate::repair::{CascadeTrace, DamageEvent, Organism};
use crate::repgroup::{IrrepLabel, RepMultiset};
use crate::tree::{HierNode, ValidationReport};

// ---------------------------------------------------------------------------
// Canonical writing
// ---------------------------------------------------------------------------

/// 17 significant digits: enough to identify any finite `f64` uniquely.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_complex(out: &mut String, z: Complex64) {
    let _ = write!(out, "[{},{}]", fmt_f64(z.re), fmt_f64(z.im));
}

fn push_complex_seq(out: &mut String, zs: &[Complex64]) {
    out.push('[');
    for (i, &z) in zs.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_complex(out, z);
    }
    out.push(']');
}

fn push_json_string(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn push_tree(out: &mut String, node: &HierNode) {
    out.push_str("{\"label\":");
    push_json_string(out, &node.label);
    let _ = write!(
        out,
        ",\"level\":{},\"two_j\":{},\"state\":",
        node.level, node.rep.two_j
    );
    match &node.state {
        None => out.push_str("null"),
        Some(state) => push_complex_seq(out, state.amps()),
    }
    out.push_str(",\"children\":[");
    for (i, child) in node.children.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_tree(out, child);
    }
    out.push_str("]}");
}

pub fn tree_to_json(node: &HierNode) -> String {
    let mut out = String::new();
    push_tree(&mut out, node);
    out
}

pub fn operator_to_json(op: &Operator) -> String {
    let mut out = String::new();
    let _ = write!(out, "{{\"dim\":{},\"entries\":", op.dim());
    push_complex_seq(&mut out, op.entries());
    out.push('}');
    out
}

pub fn density_to_json(rho: &DensityMatrix) -> String {
    operator_to_json(rho.as_operator())
}

pub fn coefficients_to_json(c: &JointCoefficients) -> String {
    let mut out = String::new();
    let _ = write!(out, "{{\"macro_dim\":{},\"micro_dims\":[", c.macro_dim());
    for (i, d) in c.micro_dims().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{d}");
    }
    out.push_str("],\"coeffs\":");
    push_complex_seq(&mut out, c.coeffs());
    out.push('}');
    out
}

pub fn macro_operator_to_json(b: &MacroConditionedOperator) -> String {
    let mut out = String::from("{\"blocks\":[");
    for (i, block) in b.blocks().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&operator_to_json(block));
    }
    out.push_str("]}");
    out
}

pub fn leaf_layer_to_json(layer: &LeafLayer) -> String {
    let mut out = String::from("{\"leaves\":[");
    for (i, leaf) in layer.leaves().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_complex_seq(&mut out, leaf.amps());
    }
    out.push_str("]}");
    out
}

pub fn haar_tree_to_json(tree: &HaarTree) -> String {
    let mut out = String::from("{\"phi_top\":");
    push_complex_seq(&mut out, tree.phi_top().amps());
    out.push_str(",\"psi_levels\":[");
    for (l, psis) in tree.psi_levels().iter().enumerate() {
        if l > 0 {
            out.push(',');
        }
        out.push('[');
        for (i, psi) in psis.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            push_complex_seq(&mut out, psi.amps());
        }
        out.push(']');
    }
    out.push_str("]}");
    out
}

pub fn report_to_json(report: &ValidationReport) -> String {
    let mut out = String::new();
    let _ = write!(out, "{{\"valid\":{},\"violations\":[", report.is_valid());
    for (i, v) in report.violations.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str("{\"path\":");
        push_json_string(&mut out, &v.path);
        out.push_str(",\"message\":");
        push_json_string(&mut out, &v.message);
        out.push('}');
    }
    out.push_str("]}");
    out
}

pub fn trace_to_json(trace: &CascadeTrace) -> String {
    let mut out = String::from("{\"outcome\":");
    push_json_string(&mut out, trace.outcome.as_str());
    let _ = write!(
        out,
        ",\"rewrite_steps\":{},\"stages\":[",
        trace.rewrite_steps
    );
    for (i, stage) in trace.stages.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str("{\"stage\":");
        push_json_string(&mut out, stage.kind.as_str());
        out.push_str(",\"tree\":");
        push_tree(&mut out, &stage.tree);
        out.push('}');
    }
    out.push_str("]}");
    out
}

/// Output of a representation-coupling query.
pub fn coupling_to_json(reps: &[IrrepLabel], target: IrrepLabel, series: &RepMultiset) -> String {
    let mut out = String::from("{\"reps\":[");
    for (i, rep) in reps.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{}", rep.two_j);
    }
    let _ = write!(
        out,
        "],\"target_two_j\":{},\"multiplicity\":{},\"decomposition\":[",
        target.two_j,
        series.multiplicity(target)
    );
    for (i, (rep, mult)) in series.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{{\"two_j\":{},\"multiplicity\":{mult}}}", rep.two_j);
    }
    out.push_str("]}");
    out
}

/// A single real result, e.g. an expectation value.
pub fn value_to_json(value: f64) -> String {
    format!("{{\"value\":{}}}", fmt_f64(value))
}

/// Output of a density-matrix diagonalization.
pub fn weights_to_json(weights: &[f64], eigvecs: &Operator) -> String {
    let mut out = String::from("{\"weights\":[");
    for (i, &w) in weights.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&fmt_f64(w));
    }
    out.push_str("],\"eigvecs\":");
    out.push_str(&operator_to_json(eigvecs));
    out.push('}');
    out
}

// ---------------------------------------------------------------------------
// Strict parsing
// ---------------------------------------------------------------------------

fn parse_error(err: &serde_json::Error) -> Error {
    let mut message = err.to_string();
    if let Some(pos) = message.rfind(" at line ") {
        message.truncate(pos);
    }
    Error::Parse {
        line: err.line(),
        column: err.column(),
        message,
    }
}

fn from_str<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| parse_error(&e))
}

fn complex_vec(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs
        .iter()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireTree {
    label: String,
    level: u32,
    two_j: u32,
    #[serde(default)]
    state: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    children: Vec<WireTree>,
}

impl WireTree {
    fn into_node(self) -> Result<HierNode> {
        let state = match self.state {
            None => None,
            Some(pairs) => Some(StateVector::new(complex_vec(&pairs))?),
        };
        let children = self
            .children
            .into_iter()
            .map(WireTree::into_node)
            .collect::<Result<Vec<_>>>()?;
        Ok(HierNode {
            label: self.label,
            level: self.level,
            rep: IrrepLabel::new(self.two_j),
            state,
            children,
        })
    }
}

pub fn tree_from_json(text: &str) -> Result<HierNode> {
    from_str::<WireTree>(text)?.into_node()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireOperator {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl WireOperator {
    fn into_operator(self) -> Result<Operator> {
        Operator::new(self.dim, complex_vec(&self.entries))
    }
}

pub fn operator_from_json(text: &str) -> Result<Operator> {
    from_str::<WireOperator>(text)?.into_operator()
}

/// Parses a density matrix and checks its static invariants
/// (hermiticity, unit trace) at the given tolerance.
pub fn density_from_json(text: &str, tolerance: f64) -> Result<DensityMatrix> {
    DensityMatrix::from_operator(operator_from_json(text)?, tolerance)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireCoefficients {
    macro_dim: usize,
    micro_dims: Vec<usize>,
    coeffs: Vec<[f64; 2]>,
}

pub fn coefficients_from_json(text: &str) -> Result<JointCoefficients> {
    let wire: WireCoefficients = from_str(text)?;
    JointCoefficients::new(wire.macro_dim, wire.micro_dims, complex_vec(&wire.coeffs))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireMacroOperator {
    blocks: Vec<WireOperator>,
}

pub fn macro_operator_from_json(text: &str) -> Result<MacroConditionedOperator> {
    let wire: WireMacroOperator = from_str(text)?;
    let blocks = wire
        .blocks
        .into_iter()
        .map(WireOperator::into_operator)
        .collect::<Result<Vec<_>>>()?;
    MacroConditionedOperator::new(blocks)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireLeafLayer {
    leaves: Vec<Vec<[f64; 2]>>,
}

pub fn leaf_layer_from_json(text: &str) -> Result<LeafLayer> {
    let wire: WireLeafLayer = from_str(text)?;
    let leaves = wire
        .leaves
        .iter()
        .map(|pairs| StateVector::new(complex_vec(pairs)))
        .collect::<Result<Vec<_>>>()?;
    LeafLayer::new(leaves)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireHaarTree {
    phi_top: Vec<[f64; 2]>,
    psi_levels: Vec<Vec<Vec<[f64; 2]>>>,
}

pub fn haar_tree_from_json(text: &str) -> Result<HaarTree> {
    let wire: WireHaarTree = from_str(text)?;
    let phi_top = StateVector::new(complex_vec(&wire.phi_top))?;
    let psi_levels = wire
        .psi_levels
        .iter()
        .map(|level| {
            level
                .iter()
                .map(|pairs| StateVector::new(complex_vec(pairs)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    HaarTree::new(phi_top, psi_levels)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireScenario {
    organism: WireOrganism,
    damage: WireDamage,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireOrganism {
    tree: WireTree,
    target_two_j: u32,
    cell_count: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireDamage {
    removed: Vec<usize>,
}

/// A parsed repair scenario: the organism plus the damage to apply.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub organism: Organism,
    pub damage: DamageEvent,
}

pub fn scenario_from_json(text: &str) -> Result<Scenario> {
    let wire: WireScenario = from_str(text)?;
    let tree = wire.organism.tree.into_node()?;
    let organism = Organism::new(
        tree,
        IrrepLabel::new(wire.organism.target_two_j),
        wire.organism.cell_count,
    )?;
    let damage = DamageEvent::new(wire.damage.removed);
    Ok(Scenario { organism, damage })
}

/// Canonical scenario encoding, used to write test fixtures.
pub fn scenario_to_json(organism: &Organism, damage: &DamageEvent) -> String {
    let mut out = String::from("{\"organism\":{\"tree\":");
    push_tree(&mut out, organism.tree());
    let _ = write!(
        out,
        ",\"target_two_j\":{},\"cell_count\":{}}},\"damage\":{{\"removed\":[",
        organism.target().two_j,
        organism.cell_count()
    );
    for (i, index) in damage.removed().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{index}");
    }
    out.push_str("]}}");
    out
}
