//! Dense complex vectors, operators and multi-index bookkeeping.
//!
//! Storage is plain `Vec<Complex64>` behind validated constructors:
//! entries are finite and total dimensions stay below [`MAX_DIM`].
//!
//! Kronecker products use the *first factor most significant*
//! convention everywhere: the index of `a` in `a ⊗ b` is the slow
//! index, so the joint index is `ia * b.dim() + ib`. Every multi-index
//! encoding in this crate (including [`MultiIndex`] and the coefficient
//! tensors in [`crate::density`]) follows the same rule.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on the total dimension of any dense object.
pub const MAX_DIM: usize = 4096;

/// Default absolute comparison tolerance (max-entry norm).
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

fn check_finite(values: &[Complex64]) -> Result<()> {
    for (index, z) in values.iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite { index });
        }
    }
    Ok(())
}

/// A dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Builds a vector from raw amplitudes, rejecting empty, oversized
    /// or non-finite input.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::ZeroDimension {
                context: "state vector",
            });
        }
        if amps.len() > MAX_DIM {
            return Err(Error::DimensionCap {
                dim: amps.len(),
                max: MAX_DIM,
            });
        }
        check_finite(&amps)?;
        Ok(Self { amps })
    }

    /// Convenience constructor from real amplitudes.
    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&re| Complex64::new(re, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); dim])
    }

    /// The computational basis vector `|index⟩` of the given dimension.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                context: "basis state",
                index,
                bound: dim,
            });
        }
        let mut v = Self::zeros(dim)?;
        v.amps[index] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Checks the `normalized` invariant `| ‖v‖₂ − 1 | ≤ tolerance`.
    pub fn check_normalized(&self, tolerance: f64) -> Result<()> {
        let deviation = (self.norm() - 1.0).abs();
        if deviation > tolerance {
            return Err(Error::NotNormalized {
                deviation,
                tolerance,
            });
        }
        Ok(())
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            amps: self.amps.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "vector addition")?;
        Ok(Self {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "vector subtraction")?;
        Ok(Self {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other, "vector comparison")?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Kronecker product; `self` supplies the most significant index.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.dim() * other.dim();
        if dim > MAX_DIM {
            return Err(Error::DimensionCap { dim, max: MAX_DIM });
        }
        let mut amps = Vec::with_capacity(dim);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self::new(amps)
    }

    fn check_same_dim(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

/// `⟨a|b⟩ = Σ conj(a_i) b_i`, conjugate-linear in the first argument.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            context: "inner product",
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// A dense complex square matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Operator {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension {
                context: "operator",
            });
        }
        if dim > MAX_DIM {
            return Err(Error::DimensionCap { dim, max: MAX_DIM });
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                context: "operator entries",
                expected: dim * dim,
                got: entries.len(),
            });
        }
        check_finite(&entries)?;
        Ok(Self { dim, entries })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut op = Self::zeros(dim)?;
        for i in 0..dim {
            op.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Ok(op)
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(dim, vec![Complex64::new(0.0, 0.0); dim * dim])
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let mut op = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            op.entries[i * diag.len() + i] = Complex64::new(d, 0.0);
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn adjoint(&self) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); self.dim * self.dim];
        for r in 0..self.dim {
            for c in 0..self.dim {
                entries[c * self.dim + r] = self.get(r, c).conj();
            }
        }
        Self {
            dim: self.dim,
            entries,
        }
    }

    /// Largest `|A[r][c] − conj(A[c][r])|` over all entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                let d = (self.get(r, c) - self.get(c, r).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn check_hermitian(&self, tolerance: f64) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        if deviation > tolerance {
            return Err(Error::NotHermitian {
                deviation,
                tolerance,
            });
        }
        Ok(())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if self.dim != v.dim() {
            return Err(Error::DimensionMismatch {
                context: "operator application",
                expected: self.dim,
                got: v.dim(),
            });
        }
        let mut amps = Vec::with_capacity(self.dim);
        for r in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..self.dim {
                acc += self.get(r, c) * v.amps()[c];
            }
            amps.push(acc);
        }
        StateVector::new(amps)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                expected: self.dim,
                got: other.dim,
            });
        }
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..n {
                    entries[r * n + c] += a * other.get(k, c);
                }
            }
        }
        Self::new(n, entries)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                context: "matrix addition",
                expected: self.dim,
                got: other.dim,
            });
        }
        Self::new(
            self.dim,
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                context: "matrix comparison",
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Kronecker product; `self` supplies the most significant index.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.dim * other.dim;
        if dim > MAX_DIM {
            return Err(Error::DimensionCap { dim, max: MAX_DIM });
        }
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for ra in 0..self.dim {
            for ca in 0..self.dim {
                let a = self.get(ra, ca);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for rb in 0..other.dim {
                    for cb in 0..other.dim {
                        let r = ra * other.dim + rb;
                        let c = ca * other.dim + cb;
                        entries[r * dim + c] = a * other.get(rb, cb);
                    }
                }
            }
        }
        Self::new(dim, entries)
    }
}

/// Result of a hermitian eigendecomposition `H = V Λ V†`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, ordered like `values`.
    pub vectors: Operator,
}

/// Diagonalizes a hermitian matrix with cyclic Jacobi rotations.
///
/// The input must be hermitian within `tolerance`; it is symmetrized
/// before iterating so the rotations act on an exactly hermitian copy.
pub fn eig_hermitian(h: &Operator, tolerance: f64) -> Result<EigenDecomposition> {
    h.check_hermitian(tolerance)?;
    let n = h.dim();

    // Work on (H + H†)/2; within the tolerance gate this moves entries
    // by at most tolerance/2.
    let mut w = h.add(&h.adjoint())?.scaled(Complex64::new(0.5, 0.0));
    let mut v = Operator::identity(n)?;

    let scale = w
        .entries()
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let stop = 1e-14 * scale;

    const MAX_SWEEPS: usize = 64;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(w.get(p, q).norm());
            }
        }
        if off <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut w, &mut v, p, q, stop);
            }
        }
    }
    if !converged {
        // One final check: the last sweep may have finished the job.
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(w.get(p, q).norm());
            }
        }
        if off > stop {
            return Err(Error::Numeric(format!(
                "jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (residual {off:.3e})"
            )));
        }
    }

    // Sort ascending and permute the eigenvector columns to match.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        w.get(a, a)
            .re
            .partial_cmp(&w.get(b, b).re)
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| w.get(i, i).re).collect();
    let mut vectors = Operator::zeros(n)?;
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, new_col, v.get(r, old_col));
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Zeroes `w[p][q]` with a unitary plane rotation and accumulates it
/// into `v`. No-op when the entry is already below `thresh`.
fn jacobi_rotate(w: &mut Operator, v: &mut Operator, p: usize, q: usize, thresh: f64) {
    let b = w.get(p, q);
    let b_abs = b.norm();
    if b_abs <= thresh {
        return;
    }
    let phase = b / b_abs; // e^{iβ}
    let a = w.get(p, p).re;
    let d = w.get(q, q).re;

    // Choose the smaller-angle root of t² + 2ζt − 1 = 0.
    let zeta = (a - d) / (2.0 * b_abs);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (zeta * zeta + 1.0).sqrt())
    } else {
        -1.0 / (-zeta + (zeta * zeta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = w.dim();
    let cs = Complex64::new(c, 0.0);
    let s_phase = phase * s; // s·e^{iβ}
    let s_phase_conj = s_phase.conj(); // s·e^{−iβ}

    // Columns p and q of W, then rows by hermiticity.
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let wkp = w.get(k, p);
        let wkq = w.get(k, q);
        let new_kp = wkp * cs + wkq * s_phase_conj;
        let new_kq = -wkp * s_phase + wkq * cs;
        w.set(k, p, new_kp);
        w.set(k, q, new_kq);
        w.set(p, k, new_kp.conj());
        w.set(q, k, new_kq.conj());
    }
    let app = a * c * c + d * s * s + 2.0 * s * c * b_abs;
    let aqq = a * s * s + d * c * c - 2.0 * s * c * b_abs;
    w.set(p, p, Complex64::new(app, 0.0));
    w.set(q, q, Complex64::new(aqq, 0.0));
    w.set(p, q, Complex64::new(0.0, 0.0));
    w.set(q, p, Complex64::new(0.0, 0.0));

    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * cs + vkq * s_phase_conj);
        v.set(k, q, -vkp * s_phase + vkq * cs);
    }
}

/// A bounds-checked index into a mixed-radix axis system.
///
/// The first axis is the most significant digit, matching the tensor
/// product convention of this module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndex {
    dims: Vec<usize>,
    idx: Vec<usize>,
}

impl MultiIndex {
    /// The total index space `Π dims` must fit in `usize`.
    pub fn new(dims: Vec<usize>, idx: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::ZeroDimension {
                context: "multi-index",
            });
        }
        if dims.len() != idx.len() {
            return Err(Error::DimensionMismatch {
                context: "multi-index components",
                expected: dims.len(),
                got: idx.len(),
            });
        }
        for (axis, (&d, &i)) in dims.iter().zip(&idx).enumerate() {
            if d == 0 {
                return Err(Error::ZeroDimension {
                    context: "multi-index axis",
                });
            }
            if i >= d {
                return Err(Error::IndexOutOfRange {
                    context: "multi-index component",
                    index: axis,
                    bound: d,
                });
            }
        }
        Ok(Self { dims, idx })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn idx(&self) -> &[usize] {
        &self.idx
    }

    /// Mixed-radix encoding with the first axis most significant.
    pub fn flatten(&self) -> usize {
        flatten_unchecked(&self.dims, &self.idx)
    }

    /// Inverse of [`MultiIndex::flatten`].
    pub fn unflatten(dims: Vec<usize>, n: usize) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::ZeroDimension {
                context: "multi-index axis",
            });
        }
        let total = dims.iter().fold(1usize, |acc, &d| acc.saturating_mul(d));
        if n >= total {
            return Err(Error::IndexOutOfRange {
                context: "flat index",
                index: n,
                bound: total,
            });
        }
        let mut idx = vec![0usize; dims.len()];
        let mut rest = n;
        for (axis, &d) in dims.iter().enumerate().rev() {
            idx[axis] = rest % d;
            rest /= d;
        }
        Ok(Self { dims, idx })
    }
}

pub(crate) fn flatten_unchecked(dims: &[usize], idx: &[usize]) -> usize {
    let mut flat = 0usize;
    for (&d, &i) in dims.iter().zip(idx) {
        flat = flat * d + i;
    }
    flat
}

/// Per-axis strides for the mixed-radix layout (first axis slowest).
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut out = vec![1usize; dims.len()];
    for axis in (0..dims.len().saturating_sub(1)).rev() {
        out[axis] = out[axis + 1] * dims[axis + 1];
    }
    out
}
