//! Error classification driving the exit codes: input problems (bad
//! files, malformed blocks, precondition violations) exit 2; numeric
//! failures of an otherwise well-posed analysis (non-saturation, tail
//! guards, eigensolver trouble) exit 3. A verdict of No is a successful
//! analysis and exits 0 like any other.

use qctrl_core::ctrl::CtrlError;
use qctrl_core::fock::FockError;
use qctrl_core::lie::LieError;
use qctrl_core::mat::MatError;
use qctrl_core::mzk::MzkError;
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numeric(String),
}

impl CliError {
    pub fn input(msg: impl fmt::Display) -> Self {
        CliError::Input(msg.to_string())
    }

    pub fn numeric(msg: impl fmt::Display) -> Self {
        CliError::Numeric(msg.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => m,
        }
    }
}

fn mat_is_numeric(e: &MatError) -> bool {
    matches!(e, MatError::EigNotConverged { .. })
}

pub fn classify_lie(e: LieError) -> CliError {
    match &e {
        LieError::NotSaturated | LieError::BasisNotClosed { .. } => CliError::numeric(e),
        LieError::Mat(m) if mat_is_numeric(m) => CliError::numeric(e),
        _ => CliError::input(e),
    }
}

pub fn classify_ctrl(e: CtrlError) -> CliError {
    match &e {
        CtrlError::DegenerateSpectrum { .. } => CliError::numeric(e),
        CtrlError::Mat(m) if mat_is_numeric(m) => CliError::numeric(e),
        CtrlError::Lie(LieError::NotSaturated | LieError::BasisNotClosed { .. }) => {
            CliError::numeric(e)
        }
        _ => CliError::input(e),
    }
}

pub fn classify_mzk(e: MzkError) -> CliError {
    match &e {
        MzkError::Fock(FockError::CutoffTooSmall { .. }) => CliError::numeric(e),
        MzkError::Mat(m) if mat_is_numeric(m) => CliError::numeric(e),
        _ => CliError::input(e),
    }
}
