use super::*;
use crate::mat::pauli::{sigma_x, sigma_y, sigma_z};
use crate::systems;
use crate::testutil::{random_hermitian, random_state, random_unitary, rng};
use num_complex::Complex64;
use rand::Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cfg() -> NumericsConfig {
    NumericsConfig::default()
}

fn closure_of(sys: &ControlSystem) -> LieBasis {
    lie_closure(sys, &cfg(), None).unwrap()
}

fn two_level(h0: CMatrix, h1: CMatrix) -> ControlSystem {
    ControlSystem::new(h0, vec![h1], 1e-10).unwrap()
}

/// Doubled system: the same Hamiltonians acting on two copies of C^2.
fn doubled_system() -> ControlSystem {
    ControlSystem::new(
        sigma_z().direct_sum(&sigma_z()),
        vec![sigma_x().direct_sum(&sigma_x())],
        1e-10,
    )
    .unwrap()
}

/// Complex nullity of the stacked commutation constraints, by Gaussian
/// elimination over C. Independent route used to cross-check the
/// realified null-space computation inside `commutant`.
fn commutant_dim_oracle(ops: &[&CMatrix]) -> usize {
    let n = ops[0].dim();
    let unknowns = n * n;
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for b in ops {
        for a_row in 0..n {
            for b_col in 0..n {
                // Entry (a_row, b_col) of [X, B]: sum_k X[a_row,k]B[k,b_col] - B[a_row,k]X[k,b_col].
                let mut row = vec![c(0.0, 0.0); unknowns];
                for k in 0..n {
                    row[a_row * n + k] += b[(k, b_col)];
                    row[k * n + b_col] -= b[(a_row, k)];
                }
                rows.push(row);
            }
        }
    }
    // Rank by elimination with partial pivoting.
    let mut rank = 0;
    let mut col = 0;
    let m = rows.len();
    while rank < m && col < unknowns {
        let pivot = (rank..m).max_by(|&i, &j| {
            rows[i][col]
                .norm()
                .partial_cmp(&rows[j][col].norm())
                .unwrap()
        });
        let pivot = pivot.unwrap();
        if rows[pivot][col].norm() < 1e-10 {
            col += 1;
            continue;
        }
        rows.swap(rank, pivot);
        let inv = c(1.0, 0.0) / rows[rank][col];
        for entry in rows[rank].iter_mut().skip(col) {
            *entry *= inv;
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank {
                let f = row[col];
                if f.norm() > 0.0 {
                    for (entry, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                        *entry -= f * p;
                    }
                }
            }
        }
        rank += 1;
        col += 1;
    }
    unknowns - rank
}

#[test]
fn commutant_of_irreducible_pauli_basis_is_scalar() {
    let basis = closure_of(&two_level(sigma_x(), sigma_y()));
    let com = commutant(&basis, 1e-8);
    assert_eq!(com.complex_dim, 1);
    assert!(com.residual < 1e-10);
    // The single element is a multiple of the identity.
    let x = &com.basis[0];
    let scaled_id = CMatrix::identity(2).scale(x[(0, 0)]);
    assert!(x.sub(&scaled_id).frobenius_norm() < 1e-8);
}

#[test]
fn commutant_of_single_diagonal_generator_is_all_diagonals() {
    let sys = ControlSystem::new(CMatrix::zeros(2), vec![sigma_z()], 1e-10).unwrap();
    let basis = closure_of(&sys);
    assert_eq!(basis.dim_algebra(), 1);
    let com = commutant(&basis, 1e-8);
    assert_eq!(com.complex_dim, 2);
    for x in &com.basis {
        assert!(x[(0, 1)].norm() < 1e-8 && x[(1, 0)].norm() < 1e-8);
    }
}

#[test]
fn commutant_of_doubled_representation_has_full_intertwiner_block() {
    let basis = closure_of(&doubled_system());
    let com = commutant(&basis, 1e-8);
    assert_eq!(com.complex_dim, 4);
    assert_eq!(com.complex_dim, commutant_dim_oracle(&basis.matrices()));
}

#[test]
fn commutant_matches_complex_elimination_oracle_on_block_sums() {
    // Inequivalent irreducible blocks: the commutant is the two block
    // scalars, complex dimension 2, for both 2+2 and 2+3 splits.
    let mut r = rng(211);
    for extra in [2usize, 3] {
        let h0a = random_hermitian(&mut r, 2);
        let h1a = random_hermitian(&mut r, 2);
        let h0b = random_hermitian(&mut r, extra);
        let h1b = random_hermitian(&mut r, extra);
        let sys =
            ControlSystem::new(h0a.direct_sum(&h0b), vec![h1a.direct_sum(&h1b)], 1e-10).unwrap();
        let basis = closure_of(&sys);
        let com = commutant(&basis, 1e-8);
        assert_eq!(com.complex_dim, 2, "block sizes 2+{extra}");
        assert_eq!(com.complex_dim, commutant_dim_oracle(&basis.matrices()));
    }
}

#[test]
fn commutant_dim_is_invariant_under_unitary_conjugation() {
    let mut r = rng(223);
    let sys = doubled_system();
    let basis = closure_of(&sys);
    let u = random_unitary(&mut r, 4);
    let conjugated = ControlSystem::new(
        sys.drift().conjugate_by(&u),
        vec![sys.controls()[0].conjugate_by(&u)],
        1e-8,
    )
    .unwrap();
    let basis_c = closure_of(&conjugated);
    assert_eq!(
        commutant(&basis, 1e-8).complex_dim,
        commutant(&basis_c, 1e-8).complex_dim
    );
}

#[test]
fn von_neumann_verdicts() {
    let yes = von_neumann_controllable(&two_level(sigma_z(), sigma_x()), &cfg()).unwrap();
    assert_eq!(yes.outcome, Outcome::Yes);
    assert_eq!(yes.evidence["commutant_complex_dim"], 1.0);
    assert_eq!(yes.evidence["algebra_dim"], 3.0);

    let no = von_neumann_controllable(&doubled_system(), &cfg()).unwrap();
    assert_eq!(no.outcome, Outcome::No);
    assert_eq!(no.evidence["commutant_complex_dim"], 4.0);

    for levels in 2..=4 {
        let sys = systems::truncated_oscillator(levels).unwrap();
        let v = von_neumann_controllable(&sys, &cfg()).unwrap();
        assert_eq!(v.outcome, Outcome::Yes, "levels {levels}");
        assert_eq!(v.evidence["algebra_dim"], (levels * levels) as f64);
    }
}

#[test]
fn von_neumann_inconclusive_when_capped() {
    let sys = systems::truncated_oscillator(4).unwrap();
    let basis = lie_closure(&sys, &cfg(), Some(5)).unwrap();
    let v = verdict_from_closure(&basis, &cfg()).unwrap();
    assert_eq!(v.outcome, Outcome::Inconclusive);
}

#[test]
fn cyclic_verdicts_on_irreducible_and_abelian_bases() {
    let su2 = closure_of(&two_level(sigma_z(), sigma_x()));
    let mut r = rng(227);
    for _ in 0..5 {
        let psi = random_state(&mut r, 2);
        let v = cyclic(&psi, &su2, 1e-8, &cfg());
        assert_eq!(v.outcome, Outcome::Yes);
        assert_eq!(v.evidence["krylov_dim"], 2.0);
    }

    let phase_gen = ControlSystem::new(CMatrix::zeros(2), vec![sigma_z()], 1e-10).unwrap();
    let u1 = closure_of(&phase_gen);
    let pole = StateVector::new(CVector::basis(2, 0)).unwrap();
    let v = cyclic(&pole, &u1, 1e-8, &cfg());
    assert_eq!(v.outcome, Outcome::No);
    assert_eq!(v.evidence["krylov_dim"], 1.0);

    let balanced = StateVector::normalize(&CVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)])).unwrap();
    let v = cyclic(&balanced, &u1, 1e-8, &cfg());
    assert_eq!(v.outcome, Outcome::Yes);
    assert_eq!(v.evidence["krylov_dim"], 2.0);
}

#[test]
fn cyclic_outcome_ignores_global_phase() {
    let u1 = closure_of(&ControlSystem::new(CMatrix::zeros(2), vec![sigma_z()], 1e-10).unwrap());
    let mut r = rng(229);
    for _ in 0..10 {
        let psi = random_state(&mut r, 2);
        let phase = Complex64::from_polar(1.0, r.gen_range(0.0..std::f64::consts::TAU));
        let rotated = StateVector::new(psi.vector().scale(phase)).unwrap();
        let a = cyclic(&psi, &u1, 1e-8, &cfg());
        let b = cyclic(&rotated, &u1, 1e-8, &cfg());
        assert_eq!(a.outcome, b.outcome);
    }
}

#[test]
fn operator_controllability_verdicts() {
    let su2 = operator_controllable(&two_level(sigma_z(), sigma_x()), &cfg()).unwrap();
    assert_eq!(su2.outcome, Outcome::Yes);
    assert_eq!(su2.evidence["phase_deficient"], 1.0);
    assert_eq!(su2.evidence["algebra_dim"], 3.0);

    let with_identity = operator_controllable(
        &two_level(sigma_z().add(&CMatrix::identity(2)), sigma_x()),
        &cfg(),
    )
    .unwrap();
    assert_eq!(with_identity.outcome, Outcome::Yes);
    assert_eq!(with_identity.evidence["phase_deficient"], 0.0);
    assert_eq!(with_identity.evidence["algebra_dim"], 4.0);

    let spin1 = operator_controllable(&systems::spin(2), &cfg()).unwrap();
    assert_eq!(spin1.outcome, Outcome::No);
    assert_eq!(spin1.evidence["algebra_dim"], 3.0);
    assert_eq!(spin1.evidence["full_dim"], 9.0);
}

#[test]
fn tangent_rank_examples() {
    let su2 = closure_of(&two_level(sigma_z(), sigma_x()));
    let pole = StateVector::new(CVector::basis(2, 0)).unwrap();
    assert_eq!(pure_state_rank(&su2, &pole, &cfg()), 3);

    let u1 = closure_of(&ControlSystem::new(CMatrix::zeros(2), vec![sigma_z()], 1e-10).unwrap());
    assert_eq!(pure_state_rank(&u1, &pole, &cfg()), 1);

    let spin1 = closure_of(&systems::spin(2));
    let mut r = rng(233);
    let psi = random_state(&mut r, 3);
    assert_eq!(pure_state_rank(&spin1, &psi, &cfg()), 3);
}

#[test]
fn pure_state_verdicts() {
    let yes = pure_state_controllable(&two_level(sigma_z(), sigma_x()), &cfg(), None).unwrap();
    assert_eq!(yes.outcome, Outcome::Yes);
    assert_eq!(yes.evidence["min_sampled_rank"], 3.0);

    // Spin-1: irreducible (superposition-controllable) yet rank-deficient
    // on the sphere — the strict inclusion between the two notions.
    let spin1 = pure_state_controllable(&systems::spin(2), &cfg(), None).unwrap();
    assert_eq!(spin1.outcome, Outcome::No);
    assert_eq!(spin1.evidence["max_sampled_rank"], 3.0);
    assert_eq!(spin1.evidence["required_rank"], 5.0);
    assert_eq!(spin1.evidence["reducibility_short_circuit"], 0.0);

    let doubled = pure_state_controllable(&doubled_system(), &cfg(), None).unwrap();
    assert_eq!(doubled.outcome, Outcome::No);
    assert_eq!(doubled.evidence["reducibility_short_circuit"], 1.0);
}

#[test]
fn pure_state_yes_implies_von_neumann_yes_on_random_systems() {
    let mut r = rng(239);
    for _ in 0..20 {
        let n = r.gen_range(2..=4);
        let sys = ControlSystem::new(
            random_hermitian(&mut r, n),
            vec![random_hermitian(&mut r, n)],
            1e-10,
        )
        .unwrap();
        let pure = pure_state_controllable(&sys, &cfg(), None).unwrap();
        let vn = von_neumann_controllable(&sys, &cfg()).unwrap();
        if pure.outcome == Outcome::Yes {
            assert_eq!(vn.outcome, Outcome::Yes);
        }
    }
}

#[test]
fn schur_consistency_between_commutant_and_krylov_flags() {
    // Irreducible closures: every standard basis vector is cyclic.
    // Axis-aligned reducible closures: some basis vector is not.
    let mut r = rng(241);
    for n in 2..=6 {
        let irreducible = ControlSystem::new(
            random_hermitian(&mut r, n),
            vec![random_hermitian(&mut r, n)],
            1e-10,
        )
        .unwrap();
        let basis = closure_of(&irreducible);
        let com = commutant(&basis, 1e-8);
        assert_eq!(com.complex_dim, 1, "generic {n}-dim system");
        for k in 0..n {
            let e = StateVector::new(CVector::basis(n, k)).unwrap();
            assert_eq!(cyclic(&e, &basis, 1e-8, &cfg()).outcome, Outcome::Yes);
        }
    }
    for split in [(2usize, 2usize), (2, 3), (3, 3)] {
        let h0 = random_hermitian(&mut r, split.0).direct_sum(&random_hermitian(&mut r, split.1));
        let h1 = random_hermitian(&mut r, split.0).direct_sum(&random_hermitian(&mut r, split.1));
        let sys = ControlSystem::new(h0, vec![h1], 1e-10).unwrap();
        let basis = closure_of(&sys);
        let com = commutant(&basis, 1e-8);
        assert!(com.complex_dim > 1);
        let n = split.0 + split.1;
        let some_invariant = (0..n).any(|k| {
            let e = StateVector::new(CVector::basis(n, k)).unwrap();
            cyclic(&e, &basis, 1e-8, &cfg()).outcome == Outcome::No
        });
        assert!(some_invariant, "split {split:?}");
    }
}

#[test]
fn mu_perturbation_definition() {
    let sys = two_level(sigma_z(), sigma_x());
    let (a, b) = mu_perturbation(&sys, 0.0);
    assert!(
        a.matrix()
            .sub(&sigma_z().scale(c(0.0, -1.0)))
            .frobenius_norm()
            < 1e-14
    );
    assert!(
        b.matrix()
            .sub(&sigma_x().scale(c(0.0, -1.0)))
            .frobenius_norm()
            < 1e-14
    );

    // Explicit entries for μ = 1/√2: A = -i(σz + μσx), B = -i(σx - μσz).
    let mu = 1.0 / 2f64.sqrt();
    let (a, b) = mu_perturbation(&sys, mu);
    let expected_a = CMatrix::from_rows(&[
        vec![c(0.0, -1.0), c(0.0, -mu)],
        vec![c(0.0, -mu), c(0.0, 1.0)],
    ])
    .unwrap();
    let expected_b = CMatrix::from_rows(&[
        vec![c(0.0, mu), c(0.0, -1.0)],
        vec![c(0.0, -1.0), c(0.0, -mu)],
    ])
    .unwrap();
    assert!(a.matrix().sub(&expected_a).frobenius_norm() < 1e-14);
    assert!(b.matrix().sub(&expected_b).frobenius_norm() < 1e-14);

    // Skewness holds for arbitrary μ.
    let (a, b) = mu_perturbation(&sys, 0.8317);
    assert!(a.matrix().add(&a.matrix().dagger()).frobenius_norm() < 1e-14);
    assert!(b.matrix().add(&b.matrix().dagger()).frobenius_norm() < 1e-14);
}

#[test]
fn best_rational_matches_brute_force() {
    let mut r = rng(251);
    for _ in 0..200 {
        let x: f64 = r.gen_range(0.01..10.0);
        for qmax in [10u64, 100, 997] {
            let (p, q, err) = best_rational(x, qmax);
            assert!(q >= 1 && q <= qmax);
            assert!((x - p as f64 / q as f64).abs() - err < 1e-15);
            // Exhaustive oracle over all denominators.
            let mut best = f64::INFINITY;
            for qq in 1..=qmax {
                let pp = (x * qq as f64).round();
                best = best.min((x - pp / qq as f64).abs());
            }
            assert!(
                err <= best + 1e-12,
                "x={x}, qmax={qmax}: cf gave {err}, brute force {best}"
            );
        }
    }
}

#[test]
fn chambrion_flags_equally_spaced_oscillator_spectrum() {
    let sys = systems::truncated_oscillator(6).unwrap();
    let a = SkewHermitian::from_hermitian(sys.drift());
    let b = SkewHermitian::from_hermitian(&sys.controls()[0]);
    let report = chambrion_check(&a, &b, 100, 1e-9).unwrap();
    assert!(report.resonance_found);
    assert!(report.heuristic);
    assert_eq!(report.gaps.len(), 5);
    for g in &report.gaps {
        assert!((g - 1.0).abs() < 1e-12);
    }
    let (_, _, p, q) = report.resonant_pair.unwrap();
    assert_eq!((p, q), (1, 1));
}

#[test]
fn chambrion_passes_sqrt2_spectrum() {
    let a = SkewHermitian::from_hermitian(&CMatrix::diag(&[
        c(0.0, 0.0),
        c(1.0, 0.0),
        c(1.0 + 2f64.sqrt(), 0.0),
    ]));
    let b = SkewHermitian::from_hermitian(&sigma_x().direct_sum(&CMatrix::identity(1)));
    let report = chambrion_check(&a, &b, 50, 1e-9).unwrap();
    assert!(!report.resonance_found);
}

#[test]
fn chambrion_rejects_degenerate_spectrum() {
    let a = SkewHermitian::from_hermitian(&CMatrix::diag(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]));
    let b = SkewHermitian::from_hermitian(&sigma_x().direct_sum(&CMatrix::identity(1)));
    assert!(matches!(
        chambrion_check(&a, &b, 50, 1e-9),
        Err(CtrlError::DegenerateSpectrum { .. })
    ));
}

#[test]
fn chambrion_perturbed_oscillator_passes_heuristic() {
    let sys = systems::truncated_oscillator(6).unwrap();
    let (a, b) = mu_perturbation(&sys, 1.0 / 5f64.sqrt());
    let report = chambrion_check(&a, &b, 100, 1e-9).unwrap();
    assert!(!report.resonance_found, "gaps: {:?}", report.gaps);
    assert!(
        report.min_coupling > 1e-6,
        "min coupling {}",
        report.min_coupling
    );
    assert_eq!(report.couplings.len(), 5);
}

#[test]
fn chambrion_resonance_is_scale_invariant() {
    let mut r = rng(257);
    for _ in 0..10 {
        let diag: Vec<Complex64> = {
            let mut vals: Vec<f64> = (0..5).map(|_| r.gen_range(0.0..4.0)).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            vals.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            vals.iter().map(|&v| c(v, 0.0)).collect()
        };
        if diag.len() < 3 {
            continue;
        }
        let n = diag.len();
        let a1 = SkewHermitian::from_hermitian(&CMatrix::diag(&diag));
        let scaled: Vec<Complex64> = diag.iter().map(|&v| v * 3.7).collect();
        let a2 = SkewHermitian::from_hermitian(&CMatrix::diag(&scaled));
        let b = SkewHermitian::from_hermitian(&CMatrix::from_fn(n, |i, j| {
            if i.abs_diff(j) == 1 {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        }));
        let r1 = chambrion_check(&a1, &b, 40, 1e-7).unwrap();
        let r2 = chambrion_check(&a2, &b, 40, 1e-7).unwrap();
        assert_eq!(r1.resonance_found, r2.resonance_found);
    }
}
