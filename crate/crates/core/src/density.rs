//! Micro/macro joint states, density matrices, reduced density
//! matrices and macrolevel-conditioned observables.
//!
//! A joint state over one macrolevel index `j` and `k` microlevel
//! factors is stored as the coefficient tensor `C^j_{i1..ik}` with the
//! macro index most significant and the micro indices in the mixed
//! radix order of [`crate::linalg`]. Macro states are assumed
//! orthonormal, so tracing them out is a plain sum over `j`.
//!
//! Index convention: the density matrix row index is the un-conjugated
//! micro index, `ρ[i][i′] = Σ_j C^j_i · conj(C^j_{i′})`, which makes
//! `ρ = Σ_j |c_j⟩⟨c_j|` over the macro slices `c_j`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, flatten_unchecked, inner_product, strides, Operator, StateVector, MAX_DIM,
};

/// The coefficient tensor `C^j_{i1..ik}` of a micro/macro joint state.
#[derive(Debug, Clone, PartialEq)]
pub struct JointCoefficients {
    macro_dim: usize,
    micro_dims: Vec<usize>,
    coeffs: Vec<Complex64>,
}

impl JointCoefficients {
    /// Validates shape, finiteness and the dimension cap. Normalization
    /// is checked by the operations, against the run tolerance.
    pub fn new(macro_dim: usize, micro_dims: Vec<usize>, coeffs: Vec<Complex64>) -> Result<Self> {
        if macro_dim == 0 {
            return Err(Error::ZeroDimension {
                context: "macro dimension",
            });
        }
        if micro_dims.is_empty() || micro_dims.contains(&0) {
            return Err(Error::ZeroDimension {
                context: "micro dimensions",
            });
        }
        let mut micro_dim = 1usize;
        for &d in &micro_dims {
            micro_dim = match micro_dim.checked_mul(d) {
                Some(t) if t <= MAX_DIM => t,
                _ => {
                    return Err(Error::DimensionCap {
                        dim: micro_dim.saturating_mul(d),
                        max: MAX_DIM,
                    })
                }
            };
        }
        let total = macro_dim
            .checked_mul(micro_dim)
            .filter(|&t| t <= MAX_DIM)
            .ok_or(Error::DimensionCap {
                dim: macro_dim.saturating_mul(micro_dim),
                max: MAX_DIM,
            })?;
        if coeffs.len() != total {
            return Err(Error::DimensionMismatch {
                context: "coefficient tensor",
                expected: total,
                got: coeffs.len(),
            });
        }
        for (index, z) in coeffs.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(Self {
            macro_dim,
            micro_dims,
            coeffs,
        })
    }

    pub fn macro_dim(&self) -> usize {
        self.macro_dim
    }

    pub fn micro_dims(&self) -> &[usize] {
        &self.micro_dims
    }

    /// Total micro dimension `D = Π d_s`.
    pub fn micro_dim(&self) -> usize {
        self.micro_dims.iter().product()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// The micro-space slice `c_j` for one macro index.
    pub fn macro_slice(&self, j: usize) -> &[Complex64] {
        let d = self.micro_dim();
        &self.coeffs[j * d..(j + 1) * d]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Checks `|Σ |C|² − 1| ≤ tolerance`.
    pub fn check_normalized(&self, tolerance: f64) -> Result<()> {
        let deviation = (self.norm_sqr() - 1.0).abs();
        if deviation > tolerance {
            return Err(Error::NotNormalized {
                deviation,
                tolerance,
            });
        }
        Ok(())
    }

    /// The flattened joint vector with the macro index most significant,
    /// i.e. `ψ[j·D + i] = C^j_i`.
    pub fn joint_vector(&self) -> Result<StateVector> {
        StateVector::new(self.coeffs.clone())
    }
}

/// A hermitian, trace-one, positive-semidefinite matrix on the micro
/// space. Hermiticity and trace are checked on construction;
/// positivity surfaces when the matrix is diagonalized.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: Operator,
}

impl DensityMatrix {
    pub fn from_operator(matrix: Operator, tolerance: f64) -> Result<Self> {
        matrix.check_hermitian(tolerance)?;
        let trace = matrix.trace();
        let deviation = (trace - Complex64::new(1.0, 0.0)).norm();
        if deviation > tolerance {
            return Err(Error::NotNormalized {
                deviation,
                tolerance,
            });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn as_operator(&self) -> &Operator {
        &self.matrix
    }

    /// `trace(ρ²)`, 1 for pure states.
    pub fn purity(&self) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                // trace(ρ²) = Σ |ρ[r][c]|² for hermitian ρ.
                acc += self.matrix.get(r, c).norm_sqr();
            }
        }
        acc
    }
}

/// `ρ[i][i′] = Σ_j C^j_i · conj(C^j_{i′})` over the orthonormal macro
/// states; the outer-product sum of the macro slices.
pub fn build_density(c: &JointCoefficients, tolerance: f64) -> Result<DensityMatrix> {
    c.check_normalized(tolerance)?;
    let d = c.micro_dim();
    let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
    for j in 0..c.macro_dim() {
        let slice = c.macro_slice(j);
        for (row, zr) in slice.iter().enumerate() {
            if zr.norm_sqr() == 0.0 {
                continue;
            }
            for (col, zc) in slice.iter().enumerate() {
                entries[row * d + col] += zr * zc.conj();
            }
        }
    }
    // Hermitian by construction; the trace check reuses the
    // normalization deviation.
    DensityMatrix::from_operator(Operator::new(d, entries)?, tolerance)
}

/// `⟨A⟩ = trace(ρ A)` for a hermitian observable on the full micro
/// space. The imaginary residue must stay below `tolerance`.
pub fn expectation(c: &JointCoefficients, a: &Operator, tolerance: f64) -> Result<f64> {
    let d = c.micro_dim();
    if a.dim() != d {
        return Err(Error::DimensionMismatch {
            context: "observable",
            expected: d,
            got: a.dim(),
        });
    }
    a.check_hermitian(tolerance)?;
    let rho = build_density(c, tolerance)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..d {
        for k in 0..d {
            acc += rho.as_operator().get(r, k) * a.get(k, r);
        }
    }
    real_part(acc, tolerance, "expectation")
}

/// Reduced density matrix of micro factor `s` (1-based, as in
/// "subsystem 1..k"), averaging over the macro index and every other
/// micro factor.
pub fn reduce(c: &JointCoefficients, s: usize, tolerance: f64) -> Result<DensityMatrix> {
    let k = c.micro_dims().len();
    if s == 0 || s > k {
        return Err(Error::IndexOutOfRange {
            context: "subsystem",
            index: s,
            bound: k + 1,
        });
    }
    c.check_normalized(tolerance)?;
    let axis = s - 1;
    let dims = c.micro_dims();
    let d_s = dims[axis];
    let stride = strides(dims)[axis];

    // Enumerate the complementary axes once; for each completion the
    // kept axis scans its own stride.
    let other_dims: Vec<usize> = dims
        .iter()
        .enumerate()
        .filter(|&(t, _)| t != axis)
        .map(|(_, &d)| d)
        .collect();
    let other_total: usize = other_dims.iter().product();

    let mut entries = vec![Complex64::new(0.0, 0.0); d_s * d_s];
    for j in 0..c.macro_dim() {
        let slice = c.macro_slice(j);
        for other_flat in 0..other_total {
            let base = base_offset(dims, axis, &other_dims, other_flat);
            for a in 0..d_s {
                let za = slice[base + a * stride];
                if za.norm_sqr() == 0.0 {
                    continue;
                }
                for b in 0..d_s {
                    entries[a * d_s + b] += za * slice[base + b * stride].conj();
                }
            }
        }
    }
    DensityMatrix::from_operator(Operator::new(d_s, entries)?, tolerance)
}

/// Flat offset of a completion of all axes except `axis`, with the
/// kept axis at 0.
fn base_offset(dims: &[usize], axis: usize, other_dims: &[usize], other_flat: usize) -> usize {
    let mut idx = vec![0usize; dims.len()];
    let mut rest = other_flat;
    for (slot, &d) in other_dims.iter().enumerate().rev() {
        let t = if slot < axis { slot } else { slot + 1 };
        idx[t] = rest % d;
        rest /= d;
    }
    flatten_unchecked(dims, &idx)
}

/// Spectral decomposition of a density matrix: occupation weights in
/// descending order with matching eigenvector columns. Weights within
/// `−tolerance` of zero are clamped to 0; anything more negative is a
/// numeric invariant failure.
pub fn diagonalize(rho: &DensityMatrix, tolerance: f64) -> Result<(Vec<f64>, Operator)> {
    let dec = eig_hermitian(rho.as_operator(), tolerance)?;
    let n = dec.values.len();
    let mut weights = Vec::with_capacity(n);
    let mut vectors = Operator::zeros(n)?;
    // Ascending → descending.
    for (new_col, old_col) in (0..n).rev().enumerate() {
        let w = dec.values[old_col];
        if w < -tolerance {
            return Err(Error::Numeric(format!(
                "density matrix has negative weight {w:.3e} beyond tolerance {tolerance:.3e}"
            )));
        }
        weights.push(w.max(0.0));
        for r in 0..n {
            vectors.set(r, new_col, dec.vectors.get(r, old_col));
        }
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > tolerance {
        return Err(Error::Numeric(format!(
            "density matrix weights sum to {total} instead of 1"
        )));
    }
    Ok((weights, vectors))
}

/// An observable whose micro-level action depends on the macrolevel
/// index: one micro-space block per macro state.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroConditionedOperator {
    blocks: Vec<Operator>,
}

impl MacroConditionedOperator {
    pub fn new(blocks: Vec<Operator>) -> Result<Self> {
        let first_dim = match blocks.first() {
            None => {
                return Err(Error::ZeroDimension {
                    context: "macro-conditioned operator",
                })
            }
            Some(b) => b.dim(),
        };
        for b in &blocks {
            if b.dim() != first_dim {
                return Err(Error::DimensionMismatch {
                    context: "macro-conditioned block",
                    expected: first_dim,
                    got: b.dim(),
                });
            }
        }
        Ok(Self { blocks })
    }

    pub fn macro_dim(&self) -> usize {
        self.blocks.len()
    }

    pub fn micro_dim(&self) -> usize {
        self.blocks[0].dim()
    }

    pub fn blocks(&self) -> &[Operator] {
        &self.blocks
    }

    pub fn check_observable(&self, tolerance: f64) -> Result<()> {
        for b in &self.blocks {
            b.check_hermitian(tolerance)?;
        }
        Ok(())
    }
}

/// `⟨B⟩ = Σ_{j,i,i′} conj(C^j_i) · B^j[i][i′] · C^j_{i′}`: each macro
/// sector is scored by its own block.
pub fn macro_expectation(
    c: &JointCoefficients,
    b: &MacroConditionedOperator,
    tolerance: f64,
) -> Result<f64> {
    if b.macro_dim() != c.macro_dim() {
        return Err(Error::DimensionMismatch {
            context: "macro-conditioned operator",
            expected: c.macro_dim(),
            got: b.macro_dim(),
        });
    }
    if b.micro_dim() != c.micro_dim() {
        return Err(Error::DimensionMismatch {
            context: "macro-conditioned block",
            expected: c.micro_dim(),
            got: b.micro_dim(),
        });
    }
    b.check_observable(tolerance)?;
    c.check_normalized(tolerance)?;

    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..c.macro_dim() {
        let slice = StateVector::new(c.macro_slice(j).to_vec())?;
        let acted = b.blocks()[j].apply(&slice)?;
        acc += inner_product(&slice, &acted)?;
    }
    real_part(acc, tolerance, "macro expectation")
}

fn real_part(z: Complex64, tolerance: f64, context: &str) -> Result<f64> {
    if z.im.abs() > tolerance {
        return Err(Error::Numeric(format!(
            "{context} has imaginary residue {:.3e} beyond tolerance {tolerance:.3e}",
            z.im
        )));
    }
    Ok(z.re)
}
