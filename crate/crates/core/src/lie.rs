//! Dynamical Lie algebras: closure of a generating set under
//! commutation, structure constants, piecewise-constant propagators, and
//! coadjoint-orbit data for abstract algebras given by their structure
//! constants.

use crate::mat::{
    commutator, expm, re_hs_inner, real_null_space, CMatrix, MatError, RealSpan, SkewHermitian,
};
use crate::numerics::NumericsConfig;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LieError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(
        "matrix {index} is not Hermitian: relative deviation {deviation:.3e} exceeds {tol:.3e}"
    )]
    NotHermitian {
        index: usize,
        deviation: f64,
        tol: f64,
    },
    #[error("a control system needs at least one control Hamiltonian")]
    NoControls,
    #[error("basis is not closed under commutation: residual {residual:.3e} exceeds {tol:.3e}")]
    BasisNotClosed { residual: f64, tol: f64 },
    #[error("structure constants require a saturated basis")]
    NotSaturated,
    #[error("schedule has no intervals")]
    EmptySchedule,
    #[error("schedule breakpoints must be finite and strictly increasing")]
    BadBreakpoints,
    #[error("schedule expects {expected} control values per interval, found {got}")]
    ScheduleShape { expected: usize, got: usize },
    #[error("covector length {got} does not match algebra dimension {expected}")]
    MuShape { expected: usize, got: usize },
    #[error("vector lies outside the isotropy subalgebra: residual {residual:.3e}")]
    ZetaOutsideIsotropy { residual: f64 },
}

/// Affine quantum control system `H(u) = H0 + Σ u_k H_k` on an
/// n-dimensional Hilbert space.
///
/// Construction symmetrizes each matrix onto its Hermitian part and
/// records the largest relative deviation removed; inputs loaded from
/// decimal text carry roundoff that would otherwise poison skewness
/// checks downstream.
#[derive(Clone, Debug)]
pub struct ControlSystem {
    dim: usize,
    drift: CMatrix,
    controls: Vec<CMatrix>,
    hermiticity_deviation: f64,
}

impl ControlSystem {
    pub fn new(
        drift: CMatrix,
        controls: Vec<CMatrix>,
        tol_hermiticity: f64,
    ) -> Result<Self, LieError> {
        if controls.is_empty() {
            return Err(LieError::NoControls);
        }
        let dim = drift.dim();
        let mut worst = 0.0_f64;
        let mut check = |index: usize, m: &CMatrix| -> Result<CMatrix, LieError> {
            if m.dim() != dim {
                return Err(MatError::DimMismatch {
                    left: dim,
                    right: m.dim(),
                }
                .into());
            }
            if !m.is_finite() {
                return Err(MatError::NonFinite.into());
            }
            let deviation = m.hermiticity_defect();
            if deviation > tol_hermiticity {
                return Err(LieError::NotHermitian {
                    index,
                    deviation,
                    tol: tol_hermiticity,
                });
            }
            worst = worst.max(deviation);
            Ok(m.add(&m.dagger()).scale(Complex64::new(0.5, 0.0)))
        };
        let drift = check(0, &drift)?;
        let controls = controls
            .iter()
            .enumerate()
            .map(|(k, m)| check(k + 1, m))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ControlSystem {
            dim,
            drift,
            controls,
            hermiticity_deviation: worst,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn drift(&self) -> &CMatrix {
        &self.drift
    }

    pub fn controls(&self) -> &[CMatrix] {
        &self.controls
    }

    pub fn num_controls(&self) -> usize {
        self.controls.len()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.hermiticity_deviation
    }

    /// The skew-Hermitian generators `iH_0, iH_1, …, iH_r`.
    pub fn generators(&self) -> Vec<CMatrix> {
        let i = Complex64::new(0.0, 1.0);
        let mut gens = vec![self.drift.scale(i)];
        gens.extend(self.controls.iter().map(|h| h.scale(i)));
        gens
    }

    /// Hamiltonian for one constant control vector.
    pub fn hamiltonian(&self, u: &[f64]) -> Result<CMatrix, LieError> {
        if u.len() != self.controls.len() {
            return Err(LieError::ScheduleShape {
                expected: self.controls.len(),
                got: u.len(),
            });
        }
        let mut h = self.drift.clone();
        for (uk, hk) in u.iter().zip(&self.controls) {
            h = h.add(&hk.scale(Complex64::new(*uk, 0.0)));
        }
        Ok(h)
    }
}

/// Orthonormal basis of a dynamical Lie algebra under the real
/// Hilbert-Schmidt form.
#[derive(Clone, Debug)]
pub struct LieBasis {
    basis: Vec<SkewHermitian>,
    generators_included: Vec<bool>,
    saturated: bool,
    space_dim: usize,
}

impl LieBasis {
    pub fn dim_algebra(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SkewHermitian] {
        &self.basis
    }

    pub fn matrices(&self) -> Vec<&CMatrix> {
        self.basis.iter().map(|b| b.matrix()).collect()
    }

    /// Whether each original generator contributed a new direction.
    pub fn generators_included(&self) -> &[bool] {
        &self.generators_included
    }

    /// True when the closure terminated by exhausting commutators rather
    /// than by hitting the dimension cap.
    pub fn saturated(&self) -> bool {
        self.saturated
    }

    /// Dimension of the underlying Hilbert space.
    pub fn space_dim(&self) -> usize {
        self.space_dim
    }
}

/// Closure of the generators `iH_0 … iH_r` under commutation.
///
/// Starts from the real span of the generators and commutes basis pairs
/// in lexicographic (older index, newer index) order, appending each new
/// direction as soon as it is found; new elements immediately join the
/// pair queue. The iteration order is fixed so reports are reproducible.
///
/// The working basis is orthonormal, so residuals are compared against
/// the unit scale: a commutator whose orthogonal part exceeds
/// `cfg.rank_tol` becomes a new basis element. `max_dim` is clamped to
/// `n²` (the algebra lives inside `u(n)`); if growth is still required
/// at the cap the result is marked unsaturated instead of looping on
/// numerically non-closing truncated generators.
pub fn lie_closure(
    sys: &ControlSystem,
    cfg: &NumericsConfig,
    max_dim: Option<usize>,
) -> Result<LieBasis, LieError> {
    let n = sys.dim();
    let cap = max_dim.unwrap_or(n * n).min(n * n).max(1);
    let gens = sys.generators();
    let scale = gens
        .iter()
        .map(|g| g.frobenius_norm())
        .fold(0.0_f64, f64::max);
    let threshold_seed = cfg.rank_tol * scale;

    let mut span = RealSpan::new();
    let mut mats: Vec<CMatrix> = Vec::new();
    let mut generators_included = Vec::with_capacity(gens.len());
    for g in &gens {
        let inserted = span
            .try_insert(g.to_real_coords(), threshold_seed)
            .is_some();
        generators_included.push(inserted);
        if inserted {
            mats.push(CMatrix::from_real_coords(n, span.basis().last().unwrap()));
        }
    }
    // The generator span itself is never truncated; the cap only limits
    // growth from commutators.
    let cap = cap.max(mats.len());

    // Pairs are processed in lexicographic (older, newer) order; a fresh
    // element spawns its pairs immediately, so the set ordering realizes
    // the documented traversal.
    let mut work: std::collections::BTreeSet<(usize, usize)> = (1..mats.len())
        .flat_map(|newer| (0..newer).map(move |older| (older, newer)))
        .collect();
    let mut saturated = true;
    while let Some(&(older, newer)) = work.iter().next() {
        work.remove(&(older, newer));
        let cand = commutator(&mats[older], &mats[newer])?;
        let mut probe = cand.to_real_coords();
        span.project_out(&mut probe);
        let residual = probe.iter().map(|x| x * x).sum::<f64>().sqrt();
        if residual > cfg.rank_tol {
            if mats.len() == cap {
                // Growth demanded beyond the cap: report unsaturated.
                saturated = false;
                break;
            }
            span.try_insert(cand.to_real_coords(), cfg.rank_tol);
            let idx = mats.len();
            mats.push(CMatrix::from_real_coords(n, span.basis().last().unwrap()));
            for k in 0..idx {
                work.insert((k, idx));
            }
        }
    }

    let basis = mats
        .into_iter()
        .map(|m| SkewHermitian::symmetrize(m).0)
        .collect();
    Ok(LieBasis {
        basis,
        generators_included,
        saturated,
        space_dim: n,
    })
}

/// Real 3-tensor `C^l_{kj}` with `[B_k, B_j] = Σ_l C^l_{kj} B_l`.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    dim: usize,
    c: Vec<f64>,
    residual: f64,
}

impl StructureConstants {
    fn zeros(dim: usize) -> Self {
        StructureConstants {
            dim,
            c: vec![0.0; dim * dim * dim],
            residual: 0.0,
        }
    }

    pub fn dim_algebra(&self) -> usize {
        self.dim
    }

    /// `C^l_{kj}`.
    pub fn get(&self, l: usize, k: usize, j: usize) -> f64 {
        self.c[(l * self.dim + k) * self.dim + j]
    }

    fn set(&mut self, l: usize, k: usize, j: usize, value: f64) {
        self.c[(l * self.dim + k) * self.dim + j] = value;
    }

    /// Largest projection residual observed while extracting the tensor.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Largest violation of the contracted Jacobi identity.
    pub fn jacobi_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for k in 0..d {
            for j in 0..d {
                for l in 0..d {
                    for s in 0..d {
                        let mut acc = 0.0;
                        for m in 0..d {
                            acc += self.get(m, k, j) * self.get(s, m, l)
                                + self.get(m, j, l) * self.get(s, m, k)
                                + self.get(m, l, k) * self.get(s, m, j);
                        }
                        worst = worst.max(acc.abs());
                    }
                }
            }
        }
        worst
    }

    /// Heisenberg algebra: basis (X, Y, Z) with [X, Y] = Z.
    pub fn heisenberg() -> Self {
        let mut sc = StructureConstants::zeros(3);
        sc.set(2, 0, 1, 1.0);
        sc.set(2, 1, 0, -1.0);
        sc
    }

    /// Oscillator algebra in the skew basis (e0, e1, e2, e3) realizing
    /// (iH0, iH1, iH2, iI): bracket(e0,e1) = -e2, bracket(e0,e2) = e1,
    /// bracket(e1,e2) = e3.
    pub fn oscillator() -> Self {
        let mut sc = StructureConstants::zeros(4);
        sc.set(2, 0, 1, -1.0);
        sc.set(2, 1, 0, 1.0);
        sc.set(1, 0, 2, 1.0);
        sc.set(1, 2, 0, -1.0);
        sc.set(3, 1, 2, 1.0);
        sc.set(3, 2, 1, -1.0);
        sc
    }

    /// Build from an explicit `d×d×d` tensor laid out as `t[l][k][j]`.
    pub fn from_tensor(t: &[Vec<Vec<f64>>]) -> Result<Self, LieError> {
        let d = t.len();
        let mut sc = StructureConstants::zeros(d);
        for (l, plane) in t.iter().enumerate() {
            if plane.len() != d {
                return Err(LieError::MuShape {
                    expected: d,
                    got: plane.len(),
                });
            }
            for (k, row) in plane.iter().enumerate() {
                if row.len() != d {
                    return Err(LieError::MuShape {
                        expected: d,
                        got: row.len(),
                    });
                }
                for (j, &v) in row.iter().enumerate() {
                    sc.set(l, k, j, v);
                }
            }
        }
        Ok(sc)
    }
}

/// Structure constants of a saturated orthonormal basis:
/// `C^l_{kj} = Re⟨B_l, [B_k, B_j]⟩`. A projection residual above `tol`
/// means the basis is not actually closed and is reported as an error.
pub fn structure_constants(basis: &LieBasis, tol: f64) -> Result<StructureConstants, LieError> {
    if !basis.saturated() {
        return Err(LieError::NotSaturated);
    }
    let d = basis.dim_algebra();
    let mats = basis.matrices();
    let mut sc = StructureConstants::zeros(d);
    let mut worst = 0.0_f64;
    for k in 0..d {
        for j in (k + 1)..d {
            let com = commutator(mats[k], mats[j])?;
            let mut remainder = com.clone();
            for (l, basis_mat) in mats.iter().enumerate() {
                let coeff = re_hs_inner(basis_mat, &com)?;
                sc.set(l, k, j, coeff);
                sc.set(l, j, k, -coeff);
                remainder = remainder.sub(&basis_mat.scale(Complex64::new(coeff, 0.0)));
            }
            worst = worst.max(remainder.frobenius_norm());
        }
    }
    if worst > tol {
        return Err(LieError::BasisNotClosed {
            residual: worst,
            tol,
        });
    }
    sc.residual = worst;
    Ok(sc)
}

/// Structure constants of truncated-space operators read off a window.
///
/// Commutators are taken in the full truncated space and only then
/// restricted to the leading `window × window` block, together with the
/// operators themselves; coefficients come from solving the Gram system
/// of the restricted (not orthonormalized) operators. Truncation damage
/// sits in the top rows and columns, so relations that hold in the
/// untruncated algebra become exact on the window. Restricting before
/// commuting would re-corrupt the new edge and no finite-dimensional
/// commutator can globally equal a multiple of the identity anyway
/// (commutators are traceless), so the order here is the only one that
/// can exhibit the algebra.
pub fn windowed_structure_constants(
    ops: &[CMatrix],
    window: usize,
    tol: f64,
) -> Result<StructureConstants, LieError> {
    if ops.is_empty() {
        return Err(MatError::EmptyInput.into());
    }
    let d = ops.len();
    let restricted: Vec<CMatrix> = ops.iter().map(|m| m.leading_block(window)).collect();
    let mut gram = vec![vec![0.0; d]; d];
    for k in 0..d {
        for l in 0..d {
            gram[k][l] = re_hs_inner(&restricted[k], &restricted[l])?;
        }
    }
    let scale = restricted
        .iter()
        .map(|m| m.frobenius_norm())
        .fold(0.0_f64, f64::max);

    let mut sc = StructureConstants::zeros(d);
    let mut worst = 0.0_f64;
    for k in 0..d {
        for j in (k + 1)..d {
            let com = commutator(&ops[k], &ops[j])?.leading_block(window);
            let rhs: Vec<f64> = restricted
                .iter()
                .map(|b| re_hs_inner(b, &com))
                .collect::<Result<_, _>>()?;
            let coeffs = solve_dense(&gram, &rhs).ok_or(LieError::BasisNotClosed {
                residual: f64::INFINITY,
                tol,
            })?;
            let mut remainder = com.clone();
            for (l, &cl) in coeffs.iter().enumerate() {
                sc.set(l, k, j, cl);
                sc.set(l, j, k, -cl);
                remainder = remainder.sub(&restricted[l].scale(Complex64::new(cl, 0.0)));
            }
            worst = worst.max(remainder.frobenius_norm() / scale.max(1.0));
        }
    }
    if worst > tol {
        return Err(LieError::BasisNotClosed {
            residual: worst,
            tol,
        });
    }
    sc.residual = worst;
    Ok(sc)
}

/// Gaussian elimination with partial pivoting for the small symmetric
/// systems above. Returns None on a (numerically) singular matrix.
fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot =
            (col..n).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            let (pivot_row, tail) = {
                let (head, tail) = m.split_at_mut(col + 1);
                (&head[col], &mut tail[row - col - 1])
            };
            for (t, p) in tail.iter_mut().zip(pivot_row).skip(col) {
                *t -= f * p;
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for k in (col + 1)..n {
            acc -= m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
    }
    Some(x)
}

/// Piecewise-constant control schedule: strictly increasing breakpoints
/// `t_0 < … < t_f` and one control vector per interval.
#[derive(Clone, Debug)]
pub struct ControlSchedule {
    breakpoints: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl ControlSchedule {
    pub fn new(breakpoints: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self, LieError> {
        if values.is_empty() || breakpoints.len() != values.len() + 1 {
            return Err(LieError::EmptySchedule);
        }
        if breakpoints.iter().any(|t| !t.is_finite())
            || breakpoints.windows(2).any(|w| w[0] >= w[1])
            || values.iter().flatten().any(|u| !u.is_finite())
        {
            return Err(LieError::BadBreakpoints);
        }
        Ok(ControlSchedule {
            breakpoints,
            values,
        })
    }

    pub fn intervals(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, u)| (w[1] - w[0], u.as_slice()))
    }

    pub fn num_intervals(&self) -> usize {
        self.values.len()
    }
}

/// Propagator of the schedule: the time-ordered product of interval
/// exponentials `exp(-i(H0 + Σ u_k H_k) Δt)`.
pub fn propagate(sys: &ControlSystem, sched: &ControlSchedule) -> Result<CMatrix, LieError> {
    let mut u_total = CMatrix::identity(sys.dim());
    for (dt, u) in sched.intervals() {
        let h = sys.hamiltonian(u)?;
        let gen = SkewHermitian::from_hermitian(&h.scale(Complex64::new(dt, 0.0)));
        let step = expm(&gen)?;
        u_total = step.matmul(&u_total);
    }
    Ok(u_total)
}

/// A point in the dual of an abstract Lie algebra.
#[derive(Clone, Debug)]
pub struct CoadjointPoint {
    algebra: StructureConstants,
    mu: Vec<f64>,
}

impl CoadjointPoint {
    pub fn new(algebra: StructureConstants, mu: Vec<f64>) -> Result<Self, LieError> {
        if mu.len() != algebra.dim_algebra() {
            return Err(LieError::MuShape {
                expected: algebra.dim_algebra(),
                got: mu.len(),
            });
        }
        Ok(CoadjointPoint { algebra, mu })
    }

    pub fn algebra(&self) -> &StructureConstants {
        &self.algebra
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }
}

/// Isotropy subalgebra of `mu` and the dimension of its coadjoint orbit.
///
/// Solves `Σ_l C^l_{kj} ξ^k μ_l = 0` for all `j`; the null space is the
/// isotropy algebra and `orbit_dim = dim - dim isotropy`. Orbits are
/// symplectic, so the result is always even.
pub fn coadjoint_isotropy(pt: &CoadjointPoint, tol: f64) -> (Vec<Vec<f64>>, usize) {
    let d = pt.algebra.dim_algebra();
    let mut rows = Vec::with_capacity(d);
    for j in 0..d {
        let mut row = vec![0.0; d];
        for (k, slot) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (l, &ml) in pt.mu.iter().enumerate() {
                acc += pt.algebra.get(l, k, j) * ml;
            }
            *slot = acc;
        }
        rows.push(row);
    }
    let scale = rows.iter().flatten().fold(0.0_f64, |m, &x| m.max(x.abs()));
    if scale == 0.0 {
        // mu = 0 (or an abelian algebra): the whole algebra stabilizes it.
        let isotropy = (0..d)
            .map(|k| {
                let mut e = vec![0.0; d];
                e[k] = 1.0;
                e
            })
            .collect();
        return (isotropy, 0);
    }
    let isotropy = real_null_space(&rows, d, tol);
    let orbit_dim = d - isotropy.len();
    (isotropy, orbit_dim)
}

/// Value of the character `χ_μ(exp ζ) = e^{i⟨μ, ζ⟩}` for `ζ` in the
/// isotropy subalgebra of `μ` (membership checked within `tol`).
pub fn character_value(pt: &CoadjointPoint, zeta: &[f64], tol: f64) -> Result<Complex64, LieError> {
    let d = pt.algebra.dim_algebra();
    if zeta.len() != d {
        return Err(LieError::MuShape {
            expected: d,
            got: zeta.len(),
        });
    }
    let (isotropy, _) = coadjoint_isotropy(pt, tol);
    let mut residual = zeta.to_vec();
    for basis_vec in &isotropy {
        let c: f64 = basis_vec.iter().zip(&residual).map(|(a, b)| a * b).sum();
        for (r, v) in residual.iter_mut().zip(basis_vec) {
            *r -= c * v;
        }
    }
    let res_norm = residual.iter().map(|x| x * x).sum::<f64>().sqrt();
    let zeta_norm = zeta.iter().map(|x| x * x).sum::<f64>().sqrt();
    if res_norm > tol * zeta_norm.max(1.0) {
        return Err(LieError::ZetaOutsideIsotropy { residual: res_norm });
    }
    let pairing: f64 = pt.mu.iter().zip(zeta).map(|(m, z)| m * z).sum();
    Ok(Complex64::from_polar(1.0, pairing))
}
