//! Mach-Zehnder interferometer with a Kerr arm acting on a coherent
//! state: beam splitters, phase shifter, optional coupling gate,
//! detection with post-selection, and parameter sweeps that grade the
//! post-selected vectors against even/odd superposition targets.

use crate::fock::{coherent, make_fock, CoherentState, FockError, FockSpace};
use crate::mat::{CMatrix, CVector, MatError};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MzkError {
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error("gate matrix is not unitary: defect {defect:.3e} exceeds 1e-9")]
    NonUnitaryGate { defect: f64 },
    #[error("gate matrix dimension {got} does not match cutoff {cutoff}")]
    GateDim { got: usize, cutoff: usize },
    #[error("this run requires a configured coupling gate")]
    MissingGate,
    #[error("the basic run takes no coupling gate; use the gated run")]
    UnexpectedGate,
    #[error("{coeffs} coefficients need {coeffs} or {fewer} unitaries, found {unitaries}", fewer = coeffs - 1)]
    CatShape { coeffs: usize, unitaries: usize },
    #[error("sweep grids must be nonempty")]
    EmptyGrid,
}

/// Coupling gate between the Kerr arm and the second mirror: mixing
/// angle plus the two unitaries applied on the Fock factor.
#[derive(Clone, Debug)]
pub struct MzkGate {
    pub alpha: f64,
    pub u1: CMatrix,
    pub u2: CMatrix,
}

/// Device configuration. A gate is present exactly when the mixing
/// angle is; `with_gate` enforces unitarity of both gate matrices.
#[derive(Clone, Debug)]
pub struct MzkConfig {
    pub z: Complex64,
    pub theta: f64,
    pub phi: f64,
    pub cutoff: usize,
    pub tail_tol: f64,
    pub gate: Option<MzkGate>,
}

impl MzkConfig {
    pub fn new(z: Complex64, theta: f64, phi: f64, cutoff: usize, tail_tol: f64) -> Self {
        MzkConfig {
            z,
            theta,
            phi,
            cutoff,
            tail_tol,
            gate: None,
        }
    }

    pub fn with_gate(mut self, alpha: f64, u1: CMatrix, u2: CMatrix) -> Result<Self, MzkError> {
        for u in [&u1, &u2] {
            if u.dim() != self.cutoff {
                return Err(MzkError::GateDim {
                    got: u.dim(),
                    cutoff: self.cutoff,
                });
            }
            let defect = u.unitarity_defect();
            if defect > 1e-9 {
                return Err(MzkError::NonUnitaryGate { defect });
            }
        }
        self.gate = Some(MzkGate { alpha, u1, u2 });
        Ok(self)
    }
}

/// Interferometer arm and detector labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Arm {
    R,
    T,
    D1,
    D2,
}

/// Joint interferometer ⊗ Fock state at one pipeline stage: each label
/// holds the (unnormalized) Fock component entangled with it. Global
/// phases picked up by mirrors are recorded in the ledger rather than
/// applied, so stage vectors stay bit-comparable to written-out
/// expressions.
#[derive(Clone, Debug)]
pub struct MzkState {
    pub components: BTreeMap<Arm, CVector>,
    /// Accumulated unapplied global phase, radians.
    pub global_phase: f64,
}

impl MzkState {
    pub fn total_norm_sqr(&self) -> f64 {
        self.components.values().map(|v| v.norm() * v.norm()).sum()
    }
}

/// Detection result. `raw_d1` is the unnormalized post-selected vector
/// in the device's written convention (twice the joint D1 component for
/// the basic run); `post_dk` are the normalized states, zero when a
/// branch is empty.
#[derive(Clone, Debug)]
pub struct MzkOutcome {
    pub p_d1: f64,
    pub p_d2: f64,
    pub post_d1: CVector,
    pub post_d2: CVector,
    pub raw_d1: CVector,
    pub global_phase: f64,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn normalized_or_zero(v: &CVector) -> CVector {
    let n = v.norm();
    if n > 1e-12 {
        v.scale(c(1.0 / n, 0.0))
    } else {
        CVector::zeros(v.dim())
    }
}

/// Basic pipeline: first beam splitter, phase shifter on the reflected
/// path and Kerr medium on the transmitted path, mirrors (ledger),
/// second beam splitter, detection.
///
/// The post-selected D1 vector is `U_φ|z⟩ - e^{iθ}|z⟩` and its weight is
/// a quarter of its squared norm.
pub fn run_basic(cfg: &MzkConfig) -> Result<MzkOutcome, MzkError> {
    if cfg.gate.is_some() {
        return Err(MzkError::UnexpectedGate);
    }
    let (_, stages) = run_basic_stages(cfg)?;
    Ok(stages)
}

/// Same as [`run_basic`] but also returns every intermediate stage, for
/// diagnostics and norm-conservation checks.
pub fn run_basic_stages(cfg: &MzkConfig) -> Result<(Vec<MzkState>, MzkOutcome), MzkError> {
    let fs = make_fock(cfg.cutoff)?;
    let input = coherent(cfg.z, cfg.cutoff, cfg.tail_tol)?;
    let mut stages = Vec::new();

    // BS1: photon enters one port, splits as (|T⟩ + i|R⟩)/√2.
    let inv_sqrt2 = c(1.0 / 2f64.sqrt(), 0.0);
    let mut state = MzkState {
        components: BTreeMap::from([
            (Arm::R, input.vec.vector().scale(inv_sqrt2 * c(0.0, 1.0))),
            (Arm::T, input.vec.vector().scale(inv_sqrt2)),
        ]),
        global_phase: 0.0,
    };
    stages.push(state.clone());

    // Phase shifter on R, Kerr medium on T.
    let shifted = state.components[&Arm::R].scale(Complex64::from_polar(1.0, cfg.theta));
    let kerred = fs.apply_kerr(&state.components[&Arm::T], cfg.phi);
    state.components.insert(Arm::R, shifted);
    state.components.insert(Arm::T, kerred);
    stages.push(state.clone());

    // Both mirrors shift by π/2; jointly a global phase, ledgered.
    state.global_phase += std::f64::consts::FRAC_PI_2;
    stages.push(state.clone());

    // BS2: |R⟩ → (|D2⟩ + i|D1⟩)/√2, |T⟩ → (|D1⟩ + i|D2⟩)/√2.
    let r = state.components[&Arm::R].clone();
    let t = state.components[&Arm::T].clone();
    let d1 = r.scale(c(0.0, 1.0)).add(&t).scale(inv_sqrt2);
    let d2 = r.add(&t.scale(c(0.0, 1.0))).scale(inv_sqrt2);
    let state = MzkState {
        components: BTreeMap::from([(Arm::D1, d1.clone()), (Arm::D2, d2.clone())]),
        global_phase: state.global_phase,
    };
    stages.push(state.clone());

    let p_d1 = d1.norm() * d1.norm();
    let p_d2 = d2.norm() * d2.norm();
    let raw_d1 = d1.scale(c(2.0, 0.0));
    let outcome = MzkOutcome {
        p_d1,
        p_d2,
        post_d1: normalized_or_zero(&d1),
        post_d2: normalized_or_zero(&d2),
        raw_d1,
        global_phase: state.global_phase,
    };
    Ok((stages, outcome))
}

/// Gated pipeline: the coupling gate sits between the Kerr medium and
/// the second mirror and mixes the two paths while applying its
/// unitaries on the Fock factor.
///
/// The post-selected D1 vector is taken as the device contract
/// `(e^{iθ} I + i cos α · U₁U_φ - sin α · U₂U_φ)|z⟩`; the complementary
/// detector branch is the sign-flipped superposition, and the detection
/// probabilities are the relative weights of the two branches. Whenever
/// the gate mixture acts isometrically on the Kerr-arm state (either
/// angle at a multiple of π/2, or commuting phase gates) this reduces to
/// the quarter-norm rule of the basic run.
pub fn run_gated(cfg: &MzkConfig) -> Result<MzkOutcome, MzkError> {
    let (_, outcome) = run_gated_stages(cfg)?;
    Ok(outcome)
}

/// Same as [`run_gated`] but also returns the pipeline stages.
pub fn run_gated_stages(cfg: &MzkConfig) -> Result<(Vec<MzkState>, MzkOutcome), MzkError> {
    let gate = cfg.gate.as_ref().ok_or(MzkError::MissingGate)?;
    let fs = make_fock(cfg.cutoff)?;
    let input = coherent(cfg.z, cfg.cutoff, cfg.tail_tol)?;
    let mut stages = Vec::new();

    let inv_sqrt2 = c(1.0 / 2f64.sqrt(), 0.0);
    let mut state = MzkState {
        components: BTreeMap::from([
            (Arm::R, input.vec.vector().scale(inv_sqrt2 * c(0.0, 1.0))),
            (Arm::T, input.vec.vector().scale(inv_sqrt2)),
        ]),
        global_phase: 0.0,
    };
    stages.push(state.clone());

    let shifted = state.components[&Arm::R].scale(Complex64::from_polar(1.0, cfg.theta));
    let kerred = fs.apply_kerr(&state.components[&Arm::T], cfg.phi);
    state.components.insert(Arm::R, shifted);
    state.components.insert(Arm::T, kerred);
    stages.push(state.clone());

    state.global_phase += std::f64::consts::FRAC_PI_2;
    stages.push(state.clone());

    // Gate + BS2 branch map on the Fock factor.
    let phase = Complex64::from_polar(1.0, cfg.theta);
    let shifted_input = input.vec.vector().scale(phase);
    let kerr_z = fs.apply_kerr(input.vec.vector(), cfg.phi);
    let mix = gate
        .u1
        .apply(&kerr_z)
        .scale(c(0.0, gate.alpha.cos()))
        .sub(&gate.u2.apply(&kerr_z).scale(c(gate.alpha.sin(), 0.0)));
    let raw_d1 = shifted_input.add(&mix);
    let raw_d2 = shifted_input.sub(&mix).scale(c(0.0, 1.0));

    let w1 = raw_d1.norm() * raw_d1.norm();
    let w2 = raw_d2.norm() * raw_d2.norm();
    let total = w1 + w2;
    let scale = c(1.0 / total.sqrt(), 0.0);
    let state = MzkState {
        components: BTreeMap::from([
            (Arm::D1, raw_d1.scale(scale)),
            (Arm::D2, raw_d2.scale(scale)),
        ]),
        global_phase: state.global_phase,
    };
    stages.push(state.clone());

    let outcome = MzkOutcome {
        p_d1: w1 / total,
        p_d2: w2 / total,
        post_d1: normalized_or_zero(&raw_d1),
        post_d2: normalized_or_zero(&raw_d2),
        raw_d1,
        global_phase: state.global_phase,
    };
    Ok((stages, outcome))
}

/// General superposition output `Σ c_k U_k |z⟩` and its norm.
///
/// When one fewer unitary than coefficient is supplied, the first
/// operator is taken to be the identity. Normalization is the caller's
/// business; the norm is returned alongside.
pub fn cat_state(
    z: Complex64,
    coeffs: &[Complex64],
    unitaries: &[CMatrix],
    cutoff: usize,
    tail_tol: f64,
) -> Result<(CVector, f64), MzkError> {
    if coeffs.is_empty() || (unitaries.len() != coeffs.len() && unitaries.len() + 1 != coeffs.len())
    {
        return Err(MzkError::CatShape {
            coeffs: coeffs.len(),
            unitaries: unitaries.len(),
        });
    }
    for u in unitaries {
        if u.dim() != cutoff {
            return Err(MzkError::GateDim {
                got: u.dim(),
                cutoff,
            });
        }
        let defect = u.unitarity_defect();
        if defect > 1e-9 {
            return Err(MzkError::NonUnitaryGate { defect });
        }
    }
    let base = coherent(z, cutoff, tail_tol)?;
    let implicit_identity = unitaries.len() + 1 == coeffs.len();
    let mut out = CVector::zeros(cutoff);
    for (k, &ck) in coeffs.iter().enumerate() {
        let term = if implicit_identity {
            if k == 0 {
                base.vec.vector().clone()
            } else {
                unitaries[k - 1].apply(base.vec.vector())
            }
        } else {
            unitaries[k].apply(base.vec.vector())
        };
        out = out.add(&term.scale(ck));
    }
    let norm = out.norm();
    Ok((out, norm))
}

/// One sweep row: detection weight and how close the post-selected
/// vector comes to the nearest even/odd superposition of the two
/// coherent labels.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub theta: f64,
    pub phi: f64,
    pub p_d1: f64,
    pub raw_norm: f64,
    pub cat_fidelity: f64,
}

#[derive(Clone, Debug)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// CSV form: fixed header, 12 significant digits, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,phi,p_d1,raw_norm,cat_fidelity\n");
        for r in &self.rows {
            writeln!(
                out,
                "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
                r.theta, r.phi, r.p_d1, r.raw_norm, r.cat_fidelity
            )
            .expect("string writes cannot fail");
        }
        out
    }
}

/// Lean basic-device detection reusing a prebuilt space and input
/// state; sweeps call this once per grid point.
fn basic_branches(
    fs: &FockSpace,
    input: &CoherentState,
    theta: f64,
    phi: f64,
) -> (CVector, CVector) {
    let half = c(0.5, 0.0);
    let shifted = input.vec.vector().scale(Complex64::from_polar(1.0, theta));
    let kerred = fs.apply_kerr(input.vec.vector(), phi);
    let d1 = kerred.sub(&shifted).scale(half);
    let d2 = kerred.add(&shifted).scale(half).scale(c(0.0, 1.0));
    (d1, d2)
}

/// Runs the basic device over the grid (θ outer, φ inner) and grades
/// each post-selected vector against `(|z e^{-iφ}⟩ ± |z⟩)/norm`.
pub fn sweep(
    cfg: &MzkConfig,
    theta_grid: &[f64],
    phi_grid: &[f64],
) -> Result<SweepTable, MzkError> {
    if theta_grid.is_empty() || phi_grid.is_empty() {
        return Err(MzkError::EmptyGrid);
    }
    if cfg.gate.is_some() {
        return Err(MzkError::UnexpectedGate);
    }
    let fs = make_fock(cfg.cutoff)?;
    let base = coherent(cfg.z, cfg.cutoff, cfg.tail_tol)?;
    let mut rows = Vec::with_capacity(theta_grid.len() * phi_grid.len());
    for &theta in theta_grid {
        for &phi in phi_grid {
            let (d1, _) = basic_branches(&fs, &base, theta, phi);
            let raw_d1 = d1.scale(c(2.0, 0.0));
            let fidelity = cat_fidelity(&fs, &base, &normalized_or_zero(&d1), phi);
            rows.push(SweepRow {
                theta,
                phi,
                p_d1: d1.norm() * d1.norm(),
                raw_norm: raw_d1.norm(),
                cat_fidelity: fidelity,
            });
        }
    }
    Ok(SweepTable { rows })
}

fn cat_fidelity(fs: &FockSpace, base: &CoherentState, post: &CVector, phi: f64) -> f64 {
    if post.norm() < 1e-12 {
        return 0.0;
    }
    let rotated = crate::fock::rotate_coherent(fs, base, phi);
    let mut best = 0.0_f64;
    for sign in [1.0, -1.0] {
        let cat = rotated
            .vec
            .vector()
            .add(&base.vec.vector().scale(c(sign, 0.0)));
        let norm = cat.norm();
        if norm > 1e-9 {
            let overlap = post.inner(&cat.scale(c(1.0 / norm, 0.0))).norm_sqr();
            best = best.max(overlap);
        }
    }
    best
}
