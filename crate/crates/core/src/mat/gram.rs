//! Modified Gram-Schmidt with re-orthogonalization over flat real
//! coordinate vectors, plus the rank and null-space computations built
//! on it. Matrices and complex vectors enter through their realification
//! (`to_real_coords`), because dynamical Lie algebras are real vector
//! spaces even when their elements are complex matrices.

use super::{CMatrix, MatError};

/// A growing orthonormal set of real coordinate vectors.
#[derive(Clone, Debug, Default)]
pub struct RealSpan {
    basis: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl RealSpan {
    pub fn new() -> Self {
        RealSpan { basis: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Subtracts the projection onto the span. Two passes: a single
    /// modified Gram-Schmidt pass loses orthogonality once the residual
    /// is small relative to the input, and rank decisions hinge on
    /// exactly those residuals.
    pub fn project_out(&self, v: &mut [f64]) {
        for _ in 0..2 {
            for q in &self.basis {
                let c = dot(q, v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
    }

    /// Orthogonalizes `v` against the span and inserts it when the
    /// residual norm exceeds `threshold`. Returns the residual norm if
    /// the vector was inserted.
    pub fn try_insert(&mut self, mut v: Vec<f64>, threshold: f64) -> Option<f64> {
        self.project_out(&mut v);
        let r = norm(&v);
        if r <= threshold {
            return None;
        }
        for x in &mut v {
            *x /= r;
        }
        self.basis.push(v);
        Some(r)
    }
}

/// Rank and orthonormal basis of the real span of a list of matrices
/// under the Re-Hilbert-Schmidt inner product.
///
/// The discard threshold is relative: a candidate is dropped when its
/// orthogonal residual falls below `tol` times the largest input
/// Frobenius norm. Generator norms vary over orders of magnitude between
/// Fock truncations, so an absolute threshold would misclassify.
pub fn real_span_rank(mats: &[CMatrix], tol: f64) -> Result<(usize, Vec<CMatrix>), MatError> {
    if mats.is_empty() {
        return Err(MatError::EmptyInput);
    }
    let dim = mats[0].dim();
    for m in mats {
        if m.dim() != dim {
            return Err(MatError::DimMismatch {
                left: dim,
                right: m.dim(),
            });
        }
        if !m.is_finite() {
            return Err(MatError::NonFinite);
        }
    }
    let scale = mats
        .iter()
        .map(|m| m.frobenius_norm())
        .fold(0.0_f64, f64::max);
    let threshold = tol * scale;
    let mut span = RealSpan::new();
    for m in mats {
        span.try_insert(m.to_real_coords(), threshold);
    }
    let basis = span
        .basis()
        .iter()
        .map(|v| CMatrix::from_real_coords(dim, v))
        .collect();
    Ok((span.rank(), basis))
}

/// Orthonormal basis of the null space of the real linear map whose rows
/// are given.
///
/// Row rank is determined by Gram-Schmidt with the relative threshold
/// `tol · max row norm`; the null space is then completed greedily from
/// the standard basis, always taking the direction with the largest
/// residual against everything accepted so far. The greedy pivot keeps
/// the construction stable when the row space nearly contains some
/// coordinate axes.
pub fn real_null_space(rows: &[Vec<f64>], width: usize, tol: f64) -> Vec<Vec<f64>> {
    let scale = rows.iter().map(|r| norm(r)).fold(0.0_f64, f64::max);
    let threshold = tol * scale;
    let mut row_space = RealSpan::new();
    for r in rows {
        debug_assert_eq!(r.len(), width);
        row_space.try_insert(r.clone(), threshold);
    }
    let rank = row_space.rank();
    let nullity = width - rank;

    let mut accepted = row_space;
    let mut null_basis: Vec<Vec<f64>> = Vec::with_capacity(nullity);
    for _ in 0..nullity {
        // Pick the standard basis direction with the largest residual.
        let mut best: Option<(f64, Vec<f64>)> = None;
        for k in 0..width {
            let mut e = vec![0.0; width];
            e[k] = 1.0;
            accepted.project_out(&mut e);
            let r = norm(&e);
            if best.as_ref().is_none_or(|(br, _)| r > *br) {
                best = Some((r, e));
            }
        }
        let (r, mut v) = best.expect("width > 0");
        debug_assert!(r > 0.0, "null-space completion exhausted early");
        for x in &mut v {
            *x /= r;
        }
        accepted.basis.push(v.clone());
        null_basis.push(v);
    }
    null_basis
}
