//! Truncated bosonic Fock space: ladder, number, and quadrature
//! operators, coherent states with explicit truncation-tail accounting,
//! and the four-operator oscillator algebra realized on the truncation.

use crate::lie::{ControlSystem, LieError};
use crate::mat::{commutator, CMatrix, CVector, MatError, StateVector};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("a Fock truncation needs at least 2 levels, got {0}")]
    TooFewLevels(usize),
    #[error("the four-operator algebra check needs at least 4 levels, got {0}")]
    WindowTooSmall(usize),
    #[error(
        "cutoff {cutoff} too small for |z| = {z_abs:.3}: truncation tail {tail:.3e} exceeds {tol:.3e}"
    )]
    CutoffTooSmall {
        cutoff: usize,
        z_abs: f64,
        tail: f64,
        tol: f64,
    },
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Bosonic Hilbert space truncated to levels `0 .. cutoff-1`, with the
/// standard operators realized as dense matrices. Ladder entries are
/// exact (`a|n⟩ = √n |n-1⟩`); truncation damage is confined to the top
/// rows and columns of operator products.
#[derive(Clone, Debug)]
pub struct FockSpace {
    cutoff: usize,
    a: CMatrix,
    adag: CMatrix,
    h0: CMatrix,
    q: CMatrix,
    p: CMatrix,
}

/// Builds the truncated space; `cutoff >= 2`.
pub fn make_fock(cutoff: usize) -> Result<FockSpace, FockError> {
    if cutoff < 2 {
        return Err(FockError::TooFewLevels(cutoff));
    }
    let a = crate::systems::ladder(cutoff);
    let adag = a.dagger();
    let h0 = CMatrix::from_fn(cutoff, |i, j| {
        if i == j {
            c(i as f64 + 0.5, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let inv_sqrt2 = 1.0 / 2f64.sqrt();
    let q = a.add(&adag).scale(c(inv_sqrt2, 0.0));
    let p = adag.sub(&a).scale(c(0.0, inv_sqrt2));
    Ok(FockSpace {
        cutoff,
        a,
        adag,
        h0,
        q,
        p,
    })
}

impl FockSpace {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn annihilation(&self) -> &CMatrix {
        &self.a
    }

    pub fn creation(&self) -> &CMatrix {
        &self.adag
    }

    /// Oscillator Hamiltonian `a†a + 1/2`.
    pub fn h0(&self) -> &CMatrix {
        &self.h0
    }

    /// Position quadrature `(a + a†)/√2`.
    pub fn q(&self) -> &CMatrix {
        &self.q
    }

    /// Momentum quadrature `i(a† - a)/√2`.
    pub fn p(&self) -> &CMatrix {
        &self.p
    }

    /// The Kerr-arm unitary `e^{iφ/2} e^{-iφ h0}`, which is the diagonal
    /// `diag(e^{-iφ n})`: the half-quantum phases cancel against the
    /// explicit prefactor level by level.
    pub fn kerr_unitary(&self, phi: f64) -> CMatrix {
        CMatrix::diag(
            &(0..self.cutoff)
                .map(|n| Complex64::from_polar(1.0, -phi * n as f64))
                .collect::<Vec<_>>(),
        )
    }

    /// Applies the Kerr-arm unitary in O(cutoff) using its diagonality.
    pub fn apply_kerr(&self, v: &CVector, phi: f64) -> CVector {
        CVector::new(
            v.as_slice()
                .iter()
                .enumerate()
                .map(|(n, amp)| amp * Complex64::from_polar(1.0, -phi * n as f64))
                .collect(),
        )
    }
}

/// Coherent state `|z⟩` truncated to the space, renormalized, with the
/// probability mass lost above the cutoff recorded.
#[derive(Clone, Debug)]
pub struct CoherentState {
    pub z: Complex64,
    pub vec: StateVector,
    pub tail_weight: f64,
}

/// Builds the truncated coherent state with amplitudes `∝ zⁿ/√(n!)`.
///
/// Refuses to build when the truncation would swallow more than
/// `tail_tol` of the probability mass; downstream probability formulas
/// assume unit vectors, and `tail_weight` keeps the discarded mass
/// visible instead of silently renormalizing it away.
pub fn coherent(z: Complex64, cutoff: usize, tail_tol: f64) -> Result<CoherentState, FockError> {
    if cutoff < 2 {
        return Err(FockError::TooFewLevels(cutoff));
    }
    // t_n = zⁿ e^{-|z|²/2} / √(n!) by stable recurrence.
    let mut amps = Vec::with_capacity(cutoff);
    let mut t = c((-z.norm_sqr() / 2.0).exp(), 0.0);
    amps.push(t);
    for n in 1..cutoff {
        t = t * z / c((n as f64).sqrt(), 0.0);
        amps.push(t);
    }
    let kept: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let tail_weight = (1.0 - kept).max(0.0);
    if tail_weight > tail_tol {
        return Err(FockError::CutoffTooSmall {
            cutoff,
            z_abs: z.norm(),
            tail: tail_weight,
            tol: tail_tol,
        });
    }
    let vec = StateVector::normalize(&CVector::new(amps))?;
    Ok(CoherentState {
        z,
        vec,
        tail_weight,
    })
}

/// Rotates a coherent state by the Kerr-arm unitary: `|z⟩ ↦ |z e^{-iφ}⟩`.
///
/// The map multiplies level n by `e^{-iφn}`, exactly the amplitude
/// pattern of the rotated label, so the returned state is again a valid
/// truncated coherent state with the same tail weight.
pub fn rotate_coherent(fs: &FockSpace, state: &CoherentState, phi: f64) -> CoherentState {
    let rotated = fs.apply_kerr(state.vec.vector(), phi);
    CoherentState {
        z: state.z * Complex64::from_polar(1.0, -phi),
        vec: StateVector::new(rotated).expect("diagonal phases preserve the norm"),
        tail_weight: state.tail_weight,
    }
}

/// Smallest cutoff whose coherent tail stays under 1e-10, capped at 256.
pub fn suggest_cutoff(z: Complex64) -> usize {
    let z2 = z.norm_sqr();
    let mut mass = (-z2).exp();
    let mut kept = mass;
    for n in 1..256usize {
        if 1.0 - kept < 1e-10 {
            return n.max(2);
        }
        mass *= z2 / n as f64;
        kept += mass;
    }
    256
}

/// The four-operator algebra generated by the controlled oscillator on
/// the truncation, with the bracket relations checked on the interior.
///
/// The third generator is fixed to the momentum quadrature `p`; its sign
/// is the one that makes all three bracket relations hold, and the
/// choice is recorded here as part of the result. The identity relation
/// can never hold globally on a finite space (commutators are
/// traceless), so residuals are measured on the leading
/// `(cutoff-2)`-block where ladder products are undamaged.
#[derive(Clone, Debug)]
pub struct OscillatorAlgebra {
    /// Drift `h0`, control `-q`.
    pub system: ControlSystem,
    /// Momentum-type third generator (`p`).
    pub h2: CMatrix,
    pub identity: CMatrix,
    /// Interior window size, `cutoff - 2`.
    pub interior: usize,
    /// Interior residuals of the three bracket relations, in order
    /// `[h0,h1] - i h2`, `[h0,h2] + i h1`, `[h1,h2] + i I`.
    pub residuals: [f64; 3],
}

/// Realizes `(h0, -q, p, I)` and verifies the oscillator bracket
/// relations on the interior block.
pub fn oscillator_algebra(fs: &FockSpace) -> Result<OscillatorAlgebra, FockError> {
    let n = fs.cutoff();
    if n < 4 {
        return Err(FockError::WindowTooSmall(n));
    }
    let window = n - 2;
    let h0 = fs.h0().clone();
    let h1 = fs.q().scale(c(-1.0, 0.0));
    let h2 = fs.p().clone();
    let identity = CMatrix::identity(n);

    let i = c(0.0, 1.0);
    let rel = |lhs: CMatrix, rhs: CMatrix| -> Result<f64, FockError> {
        Ok(lhs.sub(&rhs).leading_block(window).frobenius_norm())
    };
    let r0 = rel(commutator(&h0, &h1)?, h2.scale(i))?;
    let r1 = rel(commutator(&h0, &h2)?, h1.scale(-i))?;
    let r2 = rel(commutator(&h1, &h2)?, identity.scale(-i))?;

    let system = ControlSystem::new(h0, vec![h1], 1e-12)?;
    Ok(OscillatorAlgebra {
        system,
        h2,
        identity,
        interior: window,
        residuals: [r0, r1, r2],
    })
}

#[cfg(test)]
mod tests;
