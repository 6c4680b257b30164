//! Scenario files: JSON with complex numbers encoded as `[re, im]`
//! pairs, a single system source (inline matrices or a builder), an
//! optional numerics block, and per-command task blocks.

use num_complex::Complex64;
use qctrl_core::lie::{ControlSystem, StructureConstants};
use qctrl_core::mat::CMatrix;
use qctrl_core::mzk::MzkConfig;
use qctrl_core::systems;
use qctrl_core::NumericsConfig;
use serde::Deserialize;

use crate::error::CliError;

/// Complex scalar wire form `[re, im]`.
#[derive(Debug, Clone, Copy, Deserialize)]
pub struct Cpx(pub f64, pub f64);

impl From<Cpx> for Complex64 {
    fn from(value: Cpx) -> Self {
        Complex64::new(value.0, value.1)
    }
}

pub type MatrixIn = Vec<Vec<Cpx>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub system: Option<SystemSpec>,
    #[serde(default)]
    pub numerics: NumericsOverride,
    /// State vector for the cyclicity test.
    #[serde(default)]
    pub state: Option<Vec<Cpx>>,
    /// Perturbation strength for the resonance test pair.
    #[serde(default)]
    pub mu: Option<f64>,
    /// Abstract algebra for coadjoint analyses.
    #[serde(default)]
    pub algebra: Option<AlgebraSpec>,
    /// Dual-algebra covector for coadjoint analyses.
    #[serde(default)]
    pub covector: Option<Vec<f64>>,
    /// Algebra elements whose character values are requested.
    #[serde(default)]
    pub zeta: Option<Vec<Vec<f64>>>,
    /// Interferometer block.
    #[serde(default)]
    pub mzk: Option<MzkSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    /// Inline row-major matrices.
    Matrices {
        drift: MatrixIn,
        controls: Vec<MatrixIn>,
    },
    /// Truncated harmonic oscillator on `levels` levels.
    TruncatedOscillator { levels: usize },
    /// Spin-j pair (drift Jz, control Jx); `j` is a half-integer.
    Spin { j: f64 },
    /// Tensor-product Pauli sums: each term is `[string, coefficient]`
    /// with the string over I, X, Y, Z (one character per qubit).
    Pauli {
        #[serde(default)]
        drift: Vec<(String, f64)>,
        controls: Vec<Vec<(String, f64)>>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum AlgebraSpec {
    #[serde(rename = "kind")]
    Named(String),
    #[serde(rename = "tensor")]
    Tensor(Vec<Vec<Vec<f64>>>),
}

/// Partial numerics override; unset fields keep their defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsOverride {
    pub rank_tol: Option<f64>,
    pub hermiticity_tol: Option<f64>,
    pub unitarity_tol: Option<f64>,
    pub residual_tol: Option<f64>,
    pub resonance_tol: Option<f64>,
    pub denom_bound: Option<u64>,
    pub state_samples: Option<usize>,
    pub seed: Option<u64>,
    pub tail_tol: Option<f64>,
}

impl NumericsOverride {
    pub fn apply(&self, base: NumericsConfig) -> NumericsConfig {
        NumericsConfig {
            rank_tol: self.rank_tol.unwrap_or(base.rank_tol),
            hermiticity_tol: self.hermiticity_tol.unwrap_or(base.hermiticity_tol),
            unitarity_tol: self.unitarity_tol.unwrap_or(base.unitarity_tol),
            residual_tol: self.residual_tol.unwrap_or(base.residual_tol),
            resonance_tol: self.resonance_tol.unwrap_or(base.resonance_tol),
            denom_bound: self.denom_bound.unwrap_or(base.denom_bound),
            state_samples: self.state_samples.unwrap_or(base.state_samples),
            seed: self.seed.unwrap_or(base.seed),
            tail_tol: self.tail_tol.unwrap_or(base.tail_tol),
        }
    }

    pub fn has_seed(&self) -> bool {
        self.seed.is_some()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MzkSpec {
    pub z: Cpx,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
    pub cutoff: usize,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub gate_u1: Option<GateSpec>,
    #[serde(default)]
    pub gate_u2: Option<GateSpec>,
    #[serde(default)]
    pub theta_grid: Option<GridSpec>,
    #[serde(default)]
    pub phi_grid: Option<GridSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum GateSpec {
    /// Kerr-type diagonal `diag(e^{-i φ n})`.
    Kerr { kerr_phi: f64 },
    /// Full matrix.
    Matrix(MatrixIn),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Explicit(Vec<f64>),
    Linspace { start: f64, stop: f64, count: usize },
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        match self {
            GridSpec::Explicit(v) => {
                if v.is_empty() {
                    return Err(CliError::input("grid must be nonempty"));
                }
                Ok(v.clone())
            }
            GridSpec::Linspace { start, stop, count } => {
                if *count == 0 {
                    return Err(CliError::input("grid count must be positive"));
                }
                if *count == 1 {
                    return Ok(vec![*start]);
                }
                let step = (stop - start) / (*count as f64 - 1.0);
                Ok((0..*count).map(|k| start + step * k as f64).collect())
            }
        }
    }
}

pub fn load(path: &std::path::Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{} line {}: {}", path.display(), e.line(), e)))
}

fn to_matrix(m: &MatrixIn) -> Result<CMatrix, CliError> {
    let rows: Vec<Vec<Complex64>> = m
        .iter()
        .map(|row| row.iter().map(|&x| x.into()).collect())
        .collect();
    CMatrix::from_rows(&rows).map_err(CliError::input)
}

fn pauli_sum(terms: &[(String, f64)], dim_hint: Option<usize>) -> Result<CMatrix, CliError> {
    let width = terms
        .first()
        .map(|(s, _)| s.len())
        .or_else(|| dim_hint.map(|d| d.trailing_zeros() as usize));
    let width = width.ok_or_else(|| CliError::input("empty Pauli sum needs sized context"))?;
    if width == 0 {
        return Err(CliError::input("Pauli strings must be nonempty"));
    }
    let dim = 1usize << width;
    let mut acc = CMatrix::zeros(dim);
    for (s, coeff) in terms {
        if s.len() != width {
            return Err(CliError::input(format!(
                "Pauli strings must share one length, found {s:?}"
            )));
        }
        let mut term = CMatrix::identity(1);
        for ch in s.chars() {
            let factor = match ch {
                'I' => CMatrix::identity(2),
                'X' => qctrl_core::mat::pauli::sigma_x(),
                'Y' => qctrl_core::mat::pauli::sigma_y(),
                'Z' => qctrl_core::mat::pauli::sigma_z(),
                other => {
                    return Err(CliError::input(format!(
                        "unknown Pauli letter {other:?} in {s:?}"
                    )))
                }
            };
            term = kron(&term, &factor);
        }
        acc = acc.add(&term.scale(Complex64::new(*coeff, 0.0)));
    }
    Ok(acc)
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (na, nb) = (a.dim(), b.dim());
    CMatrix::from_fn(na * nb, |i, j| a[(i / nb, j / nb)] * b[(i % nb, j % nb)])
}

impl Scenario {
    pub fn control_system(&self, cfg: &NumericsConfig) -> Result<ControlSystem, CliError> {
        let spec = self
            .system
            .as_ref()
            .ok_or_else(|| CliError::input("scenario has no system block"))?;
        match spec {
            SystemSpec::Matrices { drift, controls } => {
                let drift = to_matrix(drift)?;
                let controls = controls
                    .iter()
                    .map(to_matrix)
                    .collect::<Result<Vec<_>, _>>()?;
                ControlSystem::new(drift, controls, cfg.hermiticity_tol).map_err(CliError::input)
            }
            SystemSpec::TruncatedOscillator { levels } => {
                systems::truncated_oscillator(*levels).map_err(CliError::input)
            }
            SystemSpec::Spin { j } => {
                let two_j = (2.0 * j).round();
                if two_j < 1.0 || (2.0 * j - two_j).abs() > 1e-12 {
                    return Err(CliError::input(format!(
                        "spin j must be a positive half-integer, got {j}"
                    )));
                }
                Ok(systems::spin(two_j as u32))
            }
            SystemSpec::Pauli { drift, controls } => {
                if controls.is_empty() {
                    return Err(CliError::input("pauli system needs at least one control"));
                }
                let width_source = controls
                    .iter()
                    .flatten()
                    .chain(drift.iter())
                    .next()
                    .ok_or_else(|| CliError::input("pauli system has no terms"))?;
                let dim = 1usize << width_source.0.len();
                let drift = if drift.is_empty() {
                    CMatrix::zeros(dim)
                } else {
                    pauli_sum(drift, Some(dim))?
                };
                let controls = controls
                    .iter()
                    .map(|terms| pauli_sum(terms, Some(dim)))
                    .collect::<Result<Vec<_>, _>>()?;
                ControlSystem::new(drift, controls, cfg.hermiticity_tol).map_err(CliError::input)
            }
        }
    }

    pub fn structure_constants(&self) -> Result<Option<StructureConstants>, CliError> {
        let Some(spec) = &self.algebra else {
            return Ok(None);
        };
        let sc = match spec {
            AlgebraSpec::Named(name) => match name.as_str() {
                "heisenberg" => StructureConstants::heisenberg(),
                "oscillator" => StructureConstants::oscillator(),
                other => {
                    return Err(CliError::input(format!(
                        "unknown algebra {other:?}; expected \"heisenberg\" or \"oscillator\""
                    )))
                }
            },
            AlgebraSpec::Tensor(t) => {
                StructureConstants::from_tensor(t).map_err(CliError::input)?
            }
        };
        Ok(Some(sc))
    }

    pub fn mzk_config(&self, cfg: &NumericsConfig) -> Result<MzkConfig, CliError> {
        let spec = self
            .mzk
            .as_ref()
            .ok_or_else(|| CliError::input("scenario has no mzk block"))?;
        let base = MzkConfig::new(
            spec.z.into(),
            spec.theta,
            spec.phi,
            spec.cutoff,
            cfg.tail_tol,
        );
        match (&spec.alpha, &spec.gate_u1, &spec.gate_u2) {
            (None, None, None) => Ok(base),
            (Some(alpha), Some(g1), Some(g2)) => {
                let u1 = build_gate(g1, spec.cutoff)?;
                let u2 = build_gate(g2, spec.cutoff)?;
                base.with_gate(*alpha, u1, u2).map_err(CliError::input)
            }
            _ => Err(CliError::input(
                "alpha, gate_u1, and gate_u2 must be given together",
            )),
        }
    }
}

fn build_gate(spec: &GateSpec, cutoff: usize) -> Result<CMatrix, CliError> {
    match spec {
        GateSpec::Kerr { kerr_phi } => {
            let fs = qctrl_core::fock::make_fock(cutoff).map_err(CliError::input)?;
            Ok(fs.kerr_unitary(*kerr_phi))
        }
        GateSpec::Matrix(m) => to_matrix(m),
    }
}
