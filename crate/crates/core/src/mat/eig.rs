//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Jacobi is slower than tridiagonalization-based solvers but converges
//! unconditionally on Hermitian input and delivers eigenvectors that are
//! orthonormal to machine precision, which is what the spectral matrix
//! exponential needs to keep long propagator products exactly unitary.

use super::{CMatrix, MatError};
use num_complex::Complex64;

const MAX_SWEEPS: usize = 60;

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns `(eigenvalues, v)` with eigenvalues ascending and the columns
/// of `v` the matching orthonormal eigenvectors, so `m = v · Λ · v†`.
/// The input is symmetrized first; callers pass matrices that are
/// Hermitian up to roundoff.
pub fn eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix), MatError> {
    if !m.is_finite() {
        return Err(MatError::NonFinite);
    }
    let n = m.dim();
    // (M + M†)/2 removes accumulated roundoff skew.
    let mut a = CMatrix::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = CMatrix::identity(n);

    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let target = scale * 1e-15;

    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(MatError::EigNotConverged {
            sweeps,
            off: off_diagonal_norm(&a),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let eigvals: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok((eigvals, vectors))
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One complex Jacobi rotation annihilating the (p, q) entry.
///
/// With α = a_pp, β = a_qq (both real) and γ = a_pq = r·e^{iφ}, the
/// rotation J differs from the identity only in J_pp = c, J_pq = s,
/// J_qp = -s̄, J_qq = c with c real, s = t·c·e^{iφ}, and t the smaller
/// root of r·t² - (α-β)·t - r = 0 for stability.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let gamma = a[(p, q)];
    let r = gamma.norm();
    if r == 0.0 {
        return;
    }
    let alpha = a[(p, p)].re;
    let beta = a[(q, q)].re;
    // Skip rotations that cannot move the off-diagonal mass meaningfully.
    if r <= (alpha.abs() + beta.abs()) * 1e-300 {
        return;
    }
    let phase = gamma / Complex64::new(r, 0.0);
    let tau = (beta - alpha) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = phase * (t * c);

    let n = a.dim();
    // A ← J† A J: columns first, then rows.
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * c - aiq * s.conj();
        a[(i, q)] = aip * s + aiq * c;
    }
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * c - aqj * s;
        a[(q, j)] = apj * s.conj() + aqj * c;
    }
    // Pin the exactly-known entries.
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * c - viq * s.conj();
        v[(i, q)] = vip * s + viq * c;
    }
}
