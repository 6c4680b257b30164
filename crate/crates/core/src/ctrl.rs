//! Controllability verdicts: operator, pure-state, von Neumann
//! (irreducibility via the commutant), cyclicity of individual states,
//! and the spectral-resonance sufficient condition for approximate
//! controllability. Every verdict carries the numbers that back it.

use crate::lie::{lie_closure, ControlSystem, LieBasis, LieError};
use crate::mat::{
    commutator, eigh, hs_inner, real_null_space, CMatrix, CVector, MatError, RealSpan,
    SkewHermitian, StateVector,
};
use crate::numerics::NumericsConfig;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CtrlError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("spectrum is degenerate within tolerance: gap {gap:.3e} between levels {index} and {next}", next = index + 1)]
    DegenerateSpectrum { index: usize, gap: f64 },
}

/// Which controllability question a verdict answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    Operator,
    PureState,
    VonNeumann,
    Cyclic,
    ChambrionApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Yes,
    No,
    Inconclusive,
}

/// Structured result of a controllability test. An outcome is never
/// bare: the evidence map records the ranks, dimensions, and residuals
/// that produced it, and the tolerances snapshot makes it reproducible.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub outcome: Outcome,
    pub evidence: BTreeMap<String, f64>,
    pub tolerances_used: NumericsConfig,
}

impl Verdict {
    fn new(kind: VerdictKind, outcome: Outcome, cfg: &NumericsConfig) -> Self {
        Verdict {
            kind,
            outcome,
            evidence: BTreeMap::new(),
            tolerances_used: cfg.clone(),
        }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.evidence.insert(key.to_string(), value);
        self
    }
}

/// Basis of the algebra commutant `{X : [X, B_j] = 0 ∀j}` with its
/// complex dimension. `complex_dim == 1` is Schur's irreducibility
/// criterion; anything larger certifies an invariant splitting.
#[derive(Debug, Clone)]
pub struct CommutantResult {
    pub complex_dim: usize,
    pub basis: Vec<CMatrix>,
    pub residual: f64,
}

/// Commutant of a Lie-algebra basis on the n-dimensional space.
///
/// The commutation constraints are assembled as one real linear system
/// over the realified unknown (2n² coordinates) and solved by the
/// rank-revealing orthogonal null-space routine with relative threshold
/// `tol`. The real null space is closed under multiplication by i, so
/// its complex dimension is half the real one; the returned basis is
/// complex-orthonormalized.
pub fn commutant(basis: &LieBasis, tol: f64) -> CommutantResult {
    let n = basis.space_dim();
    let width = 2 * n * n;
    let ops = basis.matrices();
    let mut rows: Vec<Vec<f64>> = vec![Vec::with_capacity(width); ops.len() * width];

    // Column c of the constraint block for op B is the realification of
    // [E_c, B], where E_c runs over the elementary real/imaginary parts.
    for (block, op) in ops.iter().enumerate() {
        let mut columns: Vec<Vec<f64>> = Vec::with_capacity(width);
        for c in 0..width {
            let mut coords = vec![0.0; width];
            coords[c] = 1.0;
            let e = CMatrix::from_real_coords(n, &coords);
            let com = commutator(&e, op).expect("dims match");
            columns.push(com.to_real_coords());
        }
        for r in 0..width {
            let row = &mut rows[block * width + r];
            for col in columns.iter() {
                row.push(col[r]);
            }
        }
    }

    let null = real_null_space(&rows, width, tol);
    debug_assert_eq!(null.len() % 2, 0, "commutant must be complex-linear");

    // Complex orthonormalization halves the realified null basis.
    let mut complex_basis: Vec<CMatrix> = Vec::new();
    for coords in &null {
        let mut m = CMatrix::from_real_coords(n, coords);
        for _ in 0..2 {
            for q in complex_basis.iter() {
                let overlap = hs_inner(q, &m).expect("dims match");
                m = m.sub(&q.scale(overlap));
            }
        }
        let norm = m.frobenius_norm();
        // Genuinely new complex directions keep O(1) residuals; vectors
        // that are i-multiples of earlier ones collapse to roundoff.
        if norm > 1e-6 {
            complex_basis.push(m.scale(Complex64::new(1.0 / norm, 0.0)));
        }
    }

    let mut residual = 0.0_f64;
    for x in &complex_basis {
        for op in &ops {
            residual = residual.max(commutator(x, op).expect("dims match").frobenius_norm());
        }
    }
    CommutantResult {
        complex_dim: complex_basis.len(),
        basis: complex_basis,
        residual,
    }
}

/// Von Neumann controllability: the system is controllable in the
/// linear-superposition sense exactly when its dynamical group acts
/// irreducibly, i.e. when the commutant is the scalars.
pub fn von_neumann_controllable(
    sys: &ControlSystem,
    cfg: &NumericsConfig,
) -> Result<Verdict, CtrlError> {
    let basis = lie_closure(sys, cfg, None)?;
    verdict_from_closure(&basis, cfg)
}

/// Same analysis starting from a precomputed closure.
pub fn verdict_from_closure(basis: &LieBasis, cfg: &NumericsConfig) -> Result<Verdict, CtrlError> {
    if !basis.saturated() {
        return Ok(
            Verdict::new(VerdictKind::VonNeumann, Outcome::Inconclusive, cfg)
                .with("algebra_dim", basis.dim_algebra() as f64)
                .with("saturated", 0.0),
        );
    }
    let com = commutant(basis, cfg.rank_tol);
    let outcome = if com.complex_dim == 1 {
        Outcome::Yes
    } else {
        Outcome::No
    };
    Ok(Verdict::new(VerdictKind::VonNeumann, outcome, cfg)
        .with("algebra_dim", basis.dim_algebra() as f64)
        .with("commutant_complex_dim", com.complex_dim as f64)
        .with("commutant_residual", com.residual)
        .with("saturated", 1.0))
}

/// Cyclicity of a state: the complex Krylov flag generated by the basis
/// operators. The span stabilizes at the closed linear orbit of the
/// dynamical group through the state (derivatives of `e^{tB}ψ` generate
/// every power `B^k ψ`), so the state is cyclic exactly when the flag
/// fills the space.
pub fn cyclic(psi0: &StateVector, basis: &LieBasis, tol: f64, cfg: &NumericsConfig) -> Verdict {
    let dim = krylov_dim(psi0.vector(), &basis.matrices(), tol);
    let n = basis.space_dim();
    let outcome = if dim == n { Outcome::Yes } else { Outcome::No };
    Verdict::new(VerdictKind::Cyclic, outcome, cfg)
        .with("krylov_dim", dim as f64)
        .with("space_dim", n as f64)
}

/// Dimension of the complex span of repeated operator applications to a
/// starting vector. Deterministic processing order: vectors in creation
/// order, operators in basis order.
pub fn krylov_dim(start: &CVector, ops: &[&CMatrix], tol: f64) -> usize {
    let n = start.dim();
    let mut flag: Vec<CVector> = vec![start.normalized()];
    let mut next = 0;
    while next < flag.len() && flag.len() < n {
        let current = flag[next].clone();
        for op in ops {
            let mut cand = op.apply(&current);
            for _ in 0..2 {
                for q in flag.iter() {
                    let overlap = q.inner(&cand);
                    cand = cand.sub(&q.scale(overlap));
                }
            }
            let norm = cand.norm();
            if norm > tol {
                flag.push(cand.scale(Complex64::new(1.0 / norm, 0.0)));
                if flag.len() == n {
                    return n;
                }
            }
        }
        next += 1;
    }
    flag.len()
}

/// Operator controllability: the closure must be all of `u(n)`, or
/// `su(n)` when every basis element is traceless — the latter reaches
/// every unitary up to global phase and is reported Yes with the
/// `phase_deficient` flag set, since states cannot see the phase.
pub fn operator_controllable(
    sys: &ControlSystem,
    cfg: &NumericsConfig,
) -> Result<Verdict, CtrlError> {
    let basis = lie_closure(sys, cfg, None)?;
    Ok(operator_verdict_from_closure(&basis, cfg))
}

/// Same analysis starting from a precomputed closure.
pub fn operator_verdict_from_closure(basis: &LieBasis, cfg: &NumericsConfig) -> Verdict {
    let n = basis.space_dim();
    let full = n * n;
    let dim = basis.dim_algebra();
    if !basis.saturated() {
        return Verdict::new(VerdictKind::Operator, Outcome::Inconclusive, cfg)
            .with("algebra_dim", dim as f64)
            .with("full_dim", full as f64)
            .with("saturated", 0.0);
    }
    let trace_tol = cfg.rank_tol * n as f64;
    let traceless = basis
        .matrices()
        .iter()
        .all(|m| m.trace().norm() <= trace_tol);
    let (outcome, phase_deficient) = if dim == full {
        (Outcome::Yes, false)
    } else if dim == full - 1 && traceless {
        (Outcome::Yes, true)
    } else {
        (Outcome::No, false)
    };
    Verdict::new(VerdictKind::Operator, outcome, cfg)
        .with("algebra_dim", dim as f64)
        .with("full_dim", full as f64)
        .with("traceless", if traceless { 1.0 } else { 0.0 })
        .with("phase_deficient", if phase_deficient { 1.0 } else { 0.0 })
        .with("saturated", 1.0)
}

/// Real dimension of the algebra's tangent directions at a state:
/// the real span of `{Bψ : B ∈ basis}`. Skew generators make every
/// direction tangent to the unit sphere automatically (`Re⟨ψ, Bψ⟩ = 0`),
/// so no component removal is needed; transitivity on the sphere needs
/// rank `2n - 1`.
pub fn pure_state_rank(basis: &LieBasis, psi: &StateVector, cfg: &NumericsConfig) -> usize {
    let mut span = RealSpan::new();
    let mut scale = 0.0_f64;
    let images: Vec<CVector> = basis
        .matrices()
        .iter()
        .map(|b| b.apply(psi.vector()))
        .collect();
    for v in &images {
        scale = scale.max(v.norm());
    }
    for v in &images {
        span.try_insert(v.to_real_coords(), cfg.rank_tol * scale.max(1e-300));
    }
    span.rank()
}

/// Pure-state controllability by sampled tangent rank.
///
/// Reducibility rules it out immediately (a proper invariant subspace
/// blocks transitivity), which is recorded as a short-circuit. Otherwise
/// the tangent rank is evaluated at seeded Haar-random states: maximal
/// rank `2n - 1` on a dense sample implies one open orbit on the
/// connected sphere. Disagreeing ranks across samples are reported
/// Inconclusive rather than guessed.
pub fn pure_state_controllable(
    sys: &ControlSystem,
    cfg: &NumericsConfig,
    samples: Option<usize>,
) -> Result<Verdict, CtrlError> {
    let basis = lie_closure(sys, cfg, None)?;
    pure_state_verdict_from_closure(&basis, cfg, samples)
}

/// Same analysis starting from a precomputed closure.
pub fn pure_state_verdict_from_closure(
    basis: &LieBasis,
    cfg: &NumericsConfig,
    samples: Option<usize>,
) -> Result<Verdict, CtrlError> {
    let n = basis.space_dim();
    let vn = verdict_from_closure(basis, cfg)?;
    let base = Verdict::new(VerdictKind::PureState, Outcome::Inconclusive, cfg)
        .with("algebra_dim", basis.dim_algebra() as f64)
        .with("required_rank", (2 * n - 1) as f64);
    if vn.outcome == Outcome::Inconclusive {
        return Ok(base.with("saturated", 0.0));
    }
    if vn.outcome == Outcome::No {
        let mut v = base;
        v.outcome = Outcome::No;
        return Ok(v
            .with("reducibility_short_circuit", 1.0)
            .with(
                "commutant_complex_dim",
                vn.evidence["commutant_complex_dim"],
            )
            .with("saturated", 1.0));
    }

    let count = samples.unwrap_or(cfg.state_samples).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut min_rank = usize::MAX;
    let mut max_rank = 0;
    for _ in 0..count {
        let psi = haar_state(&mut rng, n);
        let rank = pure_state_rank(basis, &psi, cfg);
        min_rank = min_rank.min(rank);
        max_rank = max_rank.max(rank);
    }
    let outcome = if min_rank != max_rank {
        Outcome::Inconclusive
    } else if max_rank == 2 * n - 1 {
        Outcome::Yes
    } else {
        Outcome::No
    };
    let mut v = base;
    v.outcome = outcome;
    Ok(v.with("min_sampled_rank", min_rank as f64)
        .with("max_sampled_rank", max_rank as f64)
        .with("samples", count as f64)
        .with("reducibility_short_circuit", 0.0)
        .with("saturated", 1.0))
}

/// Haar-random unit vector: normalized i.i.d. complex Gaussians.
pub fn haar_state(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    let v = CVector::new(
        (0..n)
            .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
            .collect(),
    );
    StateVector::normalize(&v).expect("Gaussian sample is nonzero")
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// The pair `A = -i(H0 + μH1)`, `B = -i(H1 - μH0)` that replaces the
/// drift/control split before a spectral-resonance check; an irrational
/// small `μ` breaks spectral degeneracies without changing the generated
/// algebra.
pub fn mu_perturbation(sys: &ControlSystem, mu: f64) -> (SkewHermitian, SkewHermitian) {
    let h0 = sys.drift();
    let h1 = &sys.controls()[0];
    let a = SkewHermitian::from_hermitian(&h0.add(&h1.scale(Complex64::new(mu, 0.0))));
    let b = SkewHermitian::from_hermitian(&h1.sub(&h0.scale(Complex64::new(mu, 0.0))));
    (a, b)
}

/// Result of the spectral-resonance screening.
///
/// `resonance_found` means some ratio of consecutive spectral gaps is
/// within `tol` of a rational with denominator at most `denom_bound`.
/// Numerical rational independence is undecidable, so this is explicitly
/// a heuristic — `heuristic` is always true and the bound travels with
/// the report.
#[derive(Debug, Clone)]
pub struct ChambrionReport {
    pub gaps: Vec<f64>,
    pub couplings: Vec<Complex64>,
    pub resonance_found: bool,
    pub denom_bound: u64,
    pub min_coupling: f64,
    pub heuristic: bool,
    /// `(i, j, p, q)`: gap ratio `gaps[i]/gaps[j] ≈ p/q` that fired.
    pub resonant_pair: Option<(usize, usize, i64, u64)>,
}

/// Checks the sufficient condition for approximate controllability of
/// the bilinear pair `(A, B)`: non-degenerate spectrum of `A`, gap
/// ratios far from low rationals, and nonvanishing consecutive couplings
/// `⟨φ_n, Bφ_{n+1}⟩` in the eigenbasis of `A`.
pub fn chambrion_check(
    a: &SkewHermitian,
    b: &SkewHermitian,
    denom_bound: u64,
    tol: f64,
) -> Result<ChambrionReport, CtrlError> {
    let h = a.matrix().scale(Complex64::new(0.0, 1.0));
    let (vals, vecs) = eigh(&h)?;
    let n = vals.len();
    let spread = (vals[n - 1] - vals[0]).abs().max(1.0);
    let mut gaps = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let gap = vals[i + 1] - vals[i];
        if gap <= tol * spread {
            return Err(CtrlError::DegenerateSpectrum { index: i, gap });
        }
        gaps.push(gap);
    }

    let columns: Vec<CVector> = (0..n)
        .map(|j| CVector::new((0..n).map(|i| vecs[(i, j)]).collect()))
        .collect();
    let couplings: Vec<Complex64> = (0..n - 1)
        .map(|i| columns[i].inner(&b.matrix().apply(&columns[i + 1])))
        .collect();
    let min_coupling = couplings
        .iter()
        .map(|c| c.norm())
        .fold(f64::INFINITY, f64::min);

    let mut resonance_found = false;
    let mut resonant_pair = None;
    'search: for i in 0..gaps.len() {
        for j in (i + 1)..gaps.len() {
            let ratio = gaps[i] / gaps[j];
            let (p, q, err) = best_rational(ratio, denom_bound);
            if err <= tol {
                resonance_found = true;
                resonant_pair = Some((i, j, p, q));
                break 'search;
            }
        }
    }

    Ok(ChambrionReport {
        gaps,
        couplings,
        resonance_found,
        denom_bound,
        min_coupling,
        heuristic: true,
        resonant_pair,
    })
}

/// Best rational approximation `p/q` to `x` with `1 ≤ q ≤ qmax`, by
/// continued-fraction convergents and the final semiconvergent. Returns
/// `(p, q, |x - p/q|)`.
pub fn best_rational(x: f64, qmax: u64) -> (i64, u64, f64) {
    assert!(qmax >= 1, "denominator bound must be positive");
    let mut best = (x.round() as i64, 1u64, (x - x.round()).abs());
    let mut consider = |p: i64, q: u64| {
        if q >= 1 && q <= qmax {
            let err = (x - p as f64 / q as f64).abs();
            if err < best.2 {
                best = (p, q, err);
            }
        }
    };

    // Convergents p_k/q_k of the continued fraction of x.
    let (mut p_prev, mut q_prev) = (1i64, 0u64);
    let (mut p_cur, mut q_cur) = (x.floor() as i64, 1u64);
    let mut frac = x - x.floor();
    consider(p_cur, q_cur);
    for _ in 0..64 {
        if frac.abs() < 1e-18 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        if a >= 9.0e18 {
            break;
        }
        let a_int = a as i64;
        let p_next = a_int * p_cur + p_prev;
        let q_next = (a_int as u64).saturating_mul(q_cur).saturating_add(q_prev);
        if q_next > qmax {
            // Largest semiconvergent still under the bound.
            let room = (qmax - q_prev) / q_cur.max(1);
            if room >= 1 {
                let p_semi = room as i64 * p_cur + p_prev;
                let q_semi = room * q_cur + q_prev;
                consider(p_semi, q_semi);
            }
            break;
        }
        consider(p_next, q_next);
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
    }
    best
}

#[cfg(test)]
mod tests;
