//! Ready-made control systems used by the analyses, the CLI scenario
//! builders, and the test suites.

use crate::lie::{ControlSystem, LieError};
use crate::mat::CMatrix;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Truncated annihilation operator on `levels` levels, `a|n⟩ = √n|n-1⟩`.
pub fn ladder(levels: usize) -> CMatrix {
    CMatrix::from_fn(levels, |i, j| {
        if j == i + 1 {
            c((j as f64).sqrt(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Controlled harmonic oscillator truncated to the first `levels`
/// eigenstates: drift `a†a + 1/2`, control `-(a + a†)/√2`.
pub fn truncated_oscillator(levels: usize) -> Result<ControlSystem, LieError> {
    let a = ladder(levels);
    let h0 = CMatrix::from_fn(levels, |i, j| {
        if i == j {
            c(i as f64 + 0.5, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let q = a.add(&a.dagger()).scale(c(1.0 / 2f64.sqrt(), 0.0));
    ControlSystem::new(h0, vec![q.scale(c(-1.0, 0.0))], 1e-12)
}

/// Angular momentum matrices for spin j = `two_j`/2 in the basis
/// ordered by descending magnetic quantum number.
pub fn spin_operators(two_j: u32) -> (CMatrix, CMatrix, CMatrix) {
    let dim = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let m_of = |row: usize| j - row as f64;
    let jz = CMatrix::from_fn(
        dim,
        |r, s| if r == s { c(m_of(r), 0.0) } else { c(0.0, 0.0) },
    );
    // ⟨m+1|J+|m⟩ = √(j(j+1) - m(m+1)); m+1 sits one row above m.
    let jplus = CMatrix::from_fn(dim, |r, s| {
        if s == r + 1 {
            let m = m_of(s);
            c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let jminus = jplus.dagger();
    let jx = jplus.add(&jminus).scale(c(0.5, 0.0));
    let jy = jplus.sub(&jminus).scale(c(0.0, -0.5));
    (jx, jy, jz)
}

/// Spin-j representation of the two-generator control problem:
/// drift `Jz`, control `Jx` on `two_j + 1` levels.
pub fn spin(two_j: u32) -> ControlSystem {
    let (jx, _, jz) = spin_operators(two_j);
    ControlSystem::new(jz, vec![jx], 1e-12).expect("spin matrices are Hermitian")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::commutator;

    #[test]
    fn spin_operators_satisfy_su2_relations() {
        for two_j in [1u32, 2, 3, 5] {
            let (jx, jy, jz) = spin_operators(two_j);
            // [Jx, Jy] = iJz and cyclic.
            let xy = commutator(&jx, &jy).unwrap();
            assert!(xy.sub(&jz.scale(c(0.0, 1.0))).frobenius_norm() < 1e-12);
            let yz = commutator(&jy, &jz).unwrap();
            assert!(yz.sub(&jx.scale(c(0.0, 1.0))).frobenius_norm() < 1e-12);
            // Casimir = j(j+1) I.
            let j = two_j as f64 / 2.0;
            let casimir = jx.matmul(&jx).add(&jy.matmul(&jy)).add(&jz.matmul(&jz));
            let expected = CMatrix::identity(two_j as usize + 1).scale(c(j * (j + 1.0), 0.0));
            assert!(casimir.sub(&expected).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn oscillator_builder_matches_ladder_entries() {
        let sys = truncated_oscillator(2).unwrap();
        // a on two levels is [[0, 1], [0, 0]]; control is -(a+a†)/√2.
        let expected = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(-1.0 / 2f64.sqrt(), 0.0)],
            vec![c(-1.0 / 2f64.sqrt(), 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(sys.controls()[0].sub(&expected).frobenius_norm() < 1e-14);
        assert!((sys.drift()[(0, 0)] - c(0.5, 0.0)).norm() < 1e-14);
        assert!((sys.drift()[(1, 1)] - c(1.5, 0.0)).norm() < 1e-14);
    }
}
