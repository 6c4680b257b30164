use super::*;
use crate::lie::lie_closure;
use crate::mat::{expm, SkewHermitian};
use crate::numerics::NumericsConfig;
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn two_level_ladder_entries_are_exact() {
    let fs = make_fock(2).unwrap();
    assert_eq!(fs.annihilation()[(0, 1)], c(1.0, 0.0));
    assert_eq!(fs.annihilation()[(0, 0)], c(0.0, 0.0));
    assert_eq!(fs.annihilation()[(1, 0)], c(0.0, 0.0));
    assert_eq!(fs.annihilation()[(1, 1)], c(0.0, 0.0));
    assert!(matches!(make_fock(1), Err(FockError::TooFewLevels(1))));
}

#[test]
fn number_operator_diagonal_is_half_integers() {
    let fs = make_fock(5).unwrap();
    for n in 0..5 {
        assert_eq!(fs.h0()[(n, n)], c(n as f64 + 0.5, 0.0));
    }
}

#[test]
fn canonical_commutator_holds_on_the_leading_block() {
    let fs = make_fock(16).unwrap();
    let qp = crate::mat::commutator(fs.q(), fs.p()).unwrap();
    let interior = qp.leading_block(14);
    let expected = CMatrix::identity(14).scale(c(0.0, 1.0));
    assert!(interior.sub(&expected).frobenius_norm() < 1e-12);
}

#[test]
fn vacuum_coherent_state() {
    let state = coherent(c(0.0, 0.0), 8, 1e-8).unwrap();
    assert_eq!(state.tail_weight, 0.0);
    assert!((state.vec.vector()[0] - c(1.0, 0.0)).norm() < 1e-15);
    for n in 1..8 {
        assert!(state.vec.vector()[n].norm() < 1e-15);
    }
}

#[test]
fn coherent_state_is_approximate_ladder_eigenvector() {
    let fs = make_fock(32).unwrap();
    let z = c(1.0, 0.0);
    let state = coherent(z, 32, 1e-8).unwrap();
    let av = fs.annihilation().apply(state.vec.vector());
    let residual = av.sub(&state.vec.vector().scale(z)).norm();
    // The only damage is the missing amplitude above the cutoff.
    let bound = (32.0 * state.tail_weight).sqrt().max(1e-13);
    assert!(residual <= bound, "residual {residual} vs bound {bound}");
    assert!(residual < 1e-13);
}

#[test]
fn coherent_refuses_undersized_cutoff() {
    let err = coherent(c(3.0, 0.0), 4, 1e-8).unwrap_err();
    assert!(matches!(err, FockError::CutoffTooSmall { cutoff: 4, .. }));
}

#[test]
fn rotate_by_zero_and_full_turn_is_identity() {
    let fs = make_fock(24).unwrap();
    let state = coherent(c(0.8, 0.3), 24, 1e-8).unwrap();
    let same = rotate_coherent(&fs, &state, 0.0);
    assert!(same.vec.vector().sub(state.vec.vector()).norm() < 1e-15);
    let turned = rotate_coherent(&fs, &state, 2.0 * PI);
    assert!(turned.vec.vector().sub(state.vec.vector()).norm() < 1e-12);
    assert!((turned.z - state.z).norm() < 1e-12);
}

#[test]
fn rotate_matches_directly_built_coherent_state() {
    let fs = make_fock(48).unwrap();
    let state = coherent(c(1.0, 0.0), 48, 1e-8).unwrap();
    let rotated = rotate_coherent(&fs, &state, PI / 3.0);
    let direct = coherent(
        c(1.0, 0.0) * Complex64::from_polar(1.0, -PI / 3.0),
        48,
        1e-8,
    )
    .unwrap();
    let overlap = rotated.vec.vector().inner(direct.vec.vector()).norm_sqr();
    assert!(overlap >= 1.0 - 1e-9, "overlap {overlap}");
    // Norm preserved exactly by the diagonal application.
    assert!((rotated.vec.vector().norm() - 1.0).abs() < 1e-15);
}

#[test]
fn kerr_unitary_agrees_with_spectral_exponential() {
    let fs = make_fock(24).unwrap();
    let phi = 0.7319;
    // e^{-iφ h0} is diagonal; check the O(N) path against full expm.
    let gen = SkewHermitian::from_hermitian(&fs.h0().scale(c(phi, 0.0)));
    let full = expm(&gen).unwrap();
    let diag = CMatrix::diag(
        &(0..24)
            .map(|n| Complex64::from_polar(1.0, -phi * (n as f64 + 0.5)))
            .collect::<Vec<_>>(),
    );
    assert!(full.sub(&diag).frobenius_norm() < 1e-10);
    // kerr_unitary folds in the e^{iφ/2} prefactor.
    let half = Complex64::from_polar(1.0, phi / 2.0);
    assert!(fs.kerr_unitary(phi).sub(&diag.scale(half)).frobenius_norm() < 1e-10);
}

#[test]
fn oscillator_algebra_relations_hold_on_interior() {
    let fs = make_fock(32).unwrap();
    let alg = oscillator_algebra(&fs).unwrap();
    assert_eq!(alg.interior, 30);
    for (k, r) in alg.residuals.iter().enumerate() {
        assert!(*r <= 1e-8, "relation {k} residual {r}");
    }
    // Interior equality spelled out for the first relation.
    let com = crate::mat::commutator(alg.system.drift(), &alg.system.controls()[0]).unwrap();
    let diff = com
        .sub(&alg.h2.scale(c(0.0, 1.0)))
        .leading_block(alg.interior)
        .frobenius_norm();
    assert!(diff <= 1e-8);
    assert!(matches!(
        oscillator_algebra(&make_fock(3).unwrap()),
        Err(FockError::WindowTooSmall(3))
    ));
}

#[test]
fn tiny_truncation_closure_explodes_to_full_algebra() {
    // On 3 levels the four-operator algebra is destroyed by truncation:
    // the closure of the generating pair fills all of u(3).
    let alg = oscillator_algebra(&make_fock(4).unwrap()).unwrap();
    let _ = alg;
    let sys = crate::systems::truncated_oscillator(3).unwrap();
    let basis = lie_closure(&sys, &NumericsConfig::default(), None).unwrap();
    assert_eq!(basis.dim_algebra(), 9);
    assert!(basis.saturated());
}

#[test]
fn suggested_cutoffs_are_small_and_capped() {
    assert_eq!(suggest_cutoff(c(0.0, 0.0)), 2);
    let n1 = suggest_cutoff(c(1.0, 0.0));
    assert!((8..=32).contains(&n1), "cutoff {n1}");
    let state = coherent(c(1.0, 0.0), n1, 1e-10);
    assert!(state.is_ok());
    assert_eq!(suggest_cutoff(c(20.0, 0.0)), 256);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coherent_overlap_matches_closed_form(
        zr in -1.5f64..1.5, zi in -1.3f64..1.3,
        wr in -1.5f64..1.5, wi in -1.3f64..1.3,
    ) {
        let z = c(zr, zi);
        let w = c(wr, wi);
        let sz = coherent(z, 64, 1e-10).unwrap();
        let sw = coherent(w, 64, 1e-10).unwrap();
        let overlap = sz.vec.vector().inner(sw.vec.vector());
        let closed = (c(-z.norm_sqr() / 2.0 - w.norm_sqr() / 2.0, 0.0) + z.conj() * w).exp();
        prop_assert!((overlap - closed).norm() < 1e-10);
    }

    #[test]
    fn tail_weight_is_monotone(zr in 0.1f64..2.0, n in 8usize..24) {
        // Increasing |z| at fixed cutoff loses more mass; increasing the
        // cutoff at fixed z loses less.
        let small = coherent(c(zr, 0.0), n, 1.0).unwrap();
        let bigger = coherent(c(zr * 1.3, 0.0), n, 1.0).unwrap();
        prop_assert!(bigger.tail_weight + 1e-13 >= small.tail_weight);
        let deeper = coherent(c(zr, 0.0), n + 6, 1.0).unwrap();
        prop_assert!(deeper.tail_weight <= small.tail_weight + 1e-13);
    }

    #[test]
    fn rotation_preserves_norm_and_label(phi in -6.0f64..6.0, zr in 0.0f64..1.4) {
        let fs = make_fock(40).unwrap();
        let state = coherent(c(zr, 0.2), 40, 1e-8).unwrap();
        let rotated = rotate_coherent(&fs, &state, phi);
        prop_assert!((rotated.vec.vector().norm() - 1.0).abs() < 1e-14);
        prop_assert!((rotated.z.norm() - state.z.norm()).abs() < 1e-14);
        let direct = coherent(rotated.z, 40, 1e-8).unwrap();
        prop_assert!(rotated.vec.vector().inner(direct.vec.vector()).norm_sqr() > 1.0 - 1e-9);
    }
}
