//! `qctrl`: scenario-driven controllability analysis and interferometer
//! simulation. One scenario file per invocation; results go to stdout
//! as a structured text report or as JSON with `--json`.

mod error;
mod report;
mod scenario;

use clap::{Args, Parser, Subcommand, ValueEnum};
use error::{classify_ctrl, classify_lie, classify_mzk, CliError};
use qctrl_core::ctrl::{
    chambrion_check, cyclic, mu_perturbation, operator_verdict_from_closure,
    pure_state_verdict_from_closure, verdict_from_closure, Outcome, Verdict, VerdictKind,
};
use qctrl_core::lie::{
    character_value, coadjoint_isotropy, lie_closure, structure_constants, CoadjointPoint, LieBasis,
};
use qctrl_core::mat::{CVector, SkewHermitian, StateVector};
use qctrl_core::mzk::{run_basic, run_gated, sweep, MzkOutcome};
use qctrl_core::NumericsConfig;
use report::{complex_pairs, verdict_body, Report};
use scenario::Scenario;
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "qctrl",
    version,
    about = "Controllability analysis and Kerr-interferometer simulation for finite quantum control systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the dynamical Lie algebra closure and structure constants.
    Closure {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run one controllability test.
    Test {
        which: Which,
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Simulate the interferometer: a single run or a parameter sweep.
    Mzk {
        mode: MzkMode,
        scenario: PathBuf,
        /// Write sweep output to this CSV file instead of the report.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Coadjoint isotropy, orbit dimension, and character values.
    Coadjoint {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Emit the report as JSON.
    #[arg(long)]
    json: bool,
    /// Override the sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the rank tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Cap the closure dimension.
    #[arg(long)]
    max_dim: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Which {
    Operator,
    Pure,
    Vn,
    Cyclic,
    Chambrion,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum MzkMode {
    Run,
    Sweep,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(rendered) => {
            print!("{rendered}");
        }
        Err(e) => {
            eprintln!("qctrl: error: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Closure { scenario, common } => {
            let sc = scenario::load(&scenario)?;
            let (cfg, overrides) = resolve_numerics(&sc, &common);
            let body = cmd_closure(&sc, &cfg, common.max_dim)?;
            Ok(render(&sc, "closure", overrides, &cfg, body, common.json))
        }
        Command::Test {
            which,
            scenario,
            common,
        } => {
            let sc = scenario::load(&scenario)?;
            let (cfg, overrides) = resolve_numerics(&sc, &common);
            let body = cmd_test(&sc, &cfg, which, common.max_dim)?;
            let name = match which {
                Which::Operator => "test operator",
                Which::Pure => "test pure",
                Which::Vn => "test vn",
                Which::Cyclic => "test cyclic",
                Which::Chambrion => "test chambrion",
            };
            Ok(render(&sc, name, overrides, &cfg, body, common.json))
        }
        Command::Mzk {
            mode,
            scenario,
            csv,
            common,
        } => {
            let sc = scenario::load(&scenario)?;
            let (cfg, overrides) = resolve_numerics(&sc, &common);
            let body = match mode {
                MzkMode::Run => cmd_mzk_run(&sc, &cfg)?,
                MzkMode::Sweep => cmd_mzk_sweep(&sc, &cfg, csv.as_deref())?,
            };
            let name = match mode {
                MzkMode::Run => "mzk run",
                MzkMode::Sweep => "mzk sweep",
            };
            Ok(render(&sc, name, overrides, &cfg, body, common.json))
        }
        Command::Coadjoint { scenario, common } => {
            let sc = scenario::load(&scenario)?;
            let (cfg, overrides) = resolve_numerics(&sc, &common);
            let body = cmd_coadjoint(&sc, &cfg)?;
            Ok(render(&sc, "coadjoint", overrides, &cfg, body, common.json))
        }
    }
}

fn render(
    sc: &Scenario,
    command: &str,
    overrides: Vec<String>,
    cfg: &NumericsConfig,
    body: Value,
    as_json: bool,
) -> String {
    let report = Report::new(&sc.name, command, overrides, cfg, body);
    if as_json {
        report.render_json()
    } else {
        report.render_text()
    }
}

/// Numerics resolution order: scenario block over defaults, then the
/// QCTRL_SEED fallback when neither the scenario nor a flag pins a
/// seed, then explicit flags. Applied overrides are recorded.
fn resolve_numerics(sc: &Scenario, common: &Common) -> (NumericsConfig, Vec<String>) {
    let mut cfg = sc.numerics.apply(NumericsConfig::default());
    let mut overrides = Vec::new();
    if !sc.numerics.has_seed() && common.seed.is_none() {
        if let Ok(text) = std::env::var("QCTRL_SEED") {
            if let Ok(value) = text.parse::<u64>() {
                cfg.seed = value;
                overrides.push(format!("QCTRL_SEED={value}"));
            }
        }
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
        overrides.push(format!("--seed {seed}"));
    }
    if let Some(tol) = common.tol {
        cfg.rank_tol = tol;
        overrides.push(format!("--tol {tol}"));
    }
    if let Some(cap) = common.max_dim {
        overrides.push(format!("--max-dim {cap}"));
    }
    (cfg, overrides)
}

fn closure_for(
    sc: &Scenario,
    cfg: &NumericsConfig,
    max_dim: Option<usize>,
) -> Result<LieBasis, CliError> {
    let sys = sc.control_system(cfg)?;
    lie_closure(&sys, cfg, max_dim).map_err(classify_lie)
}

fn cmd_closure(
    sc: &Scenario,
    cfg: &NumericsConfig,
    max_dim: Option<usize>,
) -> Result<Value, CliError> {
    let basis = closure_for(sc, cfg, max_dim)?;
    let constants = structure_constants(&basis, cfg.residual_tol).map_err(classify_lie)?;
    Ok(json!({
        "algebra_dim": basis.dim_algebra(),
        "space_dim": basis.space_dim(),
        "saturated": basis.saturated(),
        "generators_included": basis.generators_included(),
        "structure_residual": constants.residual(),
        "jacobi_defect": constants.jacobi_defect(),
    }))
}

fn cmd_test(
    sc: &Scenario,
    cfg: &NumericsConfig,
    which: Which,
    max_dim: Option<usize>,
) -> Result<Value, CliError> {
    match which {
        Which::Vn => {
            let basis = closure_for(sc, cfg, max_dim)?;
            let v = verdict_from_closure(&basis, cfg).map_err(classify_ctrl)?;
            Ok(verdict_body(&v))
        }
        Which::Operator => {
            let basis = closure_for(sc, cfg, max_dim)?;
            Ok(verdict_body(&operator_verdict_from_closure(&basis, cfg)))
        }
        Which::Pure => {
            let basis = closure_for(sc, cfg, max_dim)?;
            let v = pure_state_verdict_from_closure(&basis, cfg, None).map_err(classify_ctrl)?;
            Ok(verdict_body(&v))
        }
        Which::Cyclic => {
            let state = sc
                .state
                .as_ref()
                .ok_or_else(|| CliError::input("cyclic test needs a \"state\" block"))?;
            let raw = CVector::new(state.iter().map(|&x| x.into()).collect());
            let psi = StateVector::normalize(&raw).map_err(CliError::input)?;
            let basis = closure_for(sc, cfg, max_dim)?;
            let v = cyclic(&psi, &basis, cfg.rank_tol, cfg);
            Ok(verdict_body(&v))
        }
        Which::Chambrion => {
            let sys = sc.control_system(cfg)?;
            let (a, b) = match sc.mu {
                Some(mu) => mu_perturbation(&sys, mu),
                None => (
                    SkewHermitian::from_hermitian(sys.drift()),
                    SkewHermitian::from_hermitian(&sys.controls()[0]),
                ),
            };
            let report = chambrion_check(&a, &b, cfg.denom_bound, cfg.resonance_tol)
                .map_err(classify_ctrl)?;
            // Condition satisfied means no low-rational gap ratio and all
            // consecutive couplings bounded away from zero.
            let outcome = if !report.resonance_found && report.min_coupling > cfg.rank_tol {
                Outcome::Yes
            } else {
                Outcome::No
            };
            let mut verdict = Verdict {
                kind: VerdictKind::ChambrionApprox,
                outcome,
                evidence: Default::default(),
                tolerances_used: cfg.clone(),
            };
            verdict
                .evidence
                .insert("resonance_found".into(), f64::from(report.resonance_found));
            verdict
                .evidence
                .insert("min_coupling".into(), report.min_coupling);
            verdict
                .evidence
                .insert("denom_bound".into(), report.denom_bound as f64);
            verdict.evidence.insert("heuristic".into(), 1.0);
            if let Some(mu) = sc.mu {
                verdict.evidence.insert("mu".into(), mu);
            }
            let mut body = verdict_body(&verdict);
            body["gaps"] = json!(report.gaps);
            body["couplings"] = Value::Array(
                report
                    .couplings
                    .iter()
                    .map(|c| json!([c.re, c.im]))
                    .collect(),
            );
            if let Some((i, j, p, q)) = report.resonant_pair {
                body["resonant_pair"] = json!({"gap_i": i, "gap_j": j, "p": p, "q": q});
            }
            Ok(body)
        }
    }
}

fn outcome_value(outcome: &MzkOutcome, gated: bool) -> Value {
    json!({
        "mode": if gated { "gated" } else { "basic" },
        "p_d1": outcome.p_d1,
        "p_d2": outcome.p_d2,
        "raw_d1_norm": outcome.raw_d1.norm(),
        "global_phase": outcome.global_phase,
        "raw_d1": complex_pairs(&outcome.raw_d1),
        "post_d1": complex_pairs(&outcome.post_d1),
        "post_d2": complex_pairs(&outcome.post_d2),
    })
}

fn cmd_mzk_run(sc: &Scenario, cfg: &NumericsConfig) -> Result<Value, CliError> {
    let mzk_cfg = sc.mzk_config(cfg)?;
    let gated = mzk_cfg.gate.is_some();
    let outcome = if gated {
        run_gated(&mzk_cfg).map_err(classify_mzk)?
    } else {
        run_basic(&mzk_cfg).map_err(classify_mzk)?
    };
    Ok(outcome_value(&outcome, gated))
}

fn cmd_mzk_sweep(
    sc: &Scenario,
    cfg: &NumericsConfig,
    csv_path: Option<&std::path::Path>,
) -> Result<Value, CliError> {
    let spec = sc
        .mzk
        .as_ref()
        .ok_or_else(|| CliError::input("scenario has no mzk block"))?;
    let thetas = spec
        .theta_grid
        .as_ref()
        .ok_or_else(|| CliError::input("sweep needs a theta_grid"))?
        .points()?;
    let phis = spec
        .phi_grid
        .as_ref()
        .ok_or_else(|| CliError::input("sweep needs a phi_grid"))?
        .points()?;
    let mzk_cfg = sc.mzk_config(cfg)?;
    let table = sweep(&mzk_cfg, &thetas, &phis).map_err(classify_mzk)?;
    let csv = table.to_csv();
    let mut body = json!({
        "rows": table.rows.len(),
        "theta_points": thetas.len(),
        "phi_points": phis.len(),
    });
    match csv_path {
        Some(path) => {
            std::fs::write(path, &csv)
                .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
            body["csv_path"] = json!(path.display().to_string());
        }
        None => {
            body["csv"] = json!(csv);
        }
    }
    Ok(body)
}

fn cmd_coadjoint(sc: &Scenario, cfg: &NumericsConfig) -> Result<Value, CliError> {
    let constants = match sc.structure_constants()? {
        Some(direct) => direct,
        None => {
            // Fall back to the closure of the scenario's matrix system.
            let basis = closure_for(sc, cfg, None)?;
            structure_constants(&basis, cfg.residual_tol).map_err(classify_lie)?
        }
    };
    let mu = sc
        .covector
        .as_ref()
        .ok_or_else(|| CliError::input("coadjoint analysis needs a \"covector\" block"))?
        .clone();
    let point = CoadjointPoint::new(constants, mu).map_err(CliError::input)?;
    let (isotropy, orbit_dim) = coadjoint_isotropy(&point, cfg.rank_tol);
    let mut body = json!({
        "algebra_dim": point.algebra().dim_algebra(),
        "isotropy_dim": isotropy.len(),
        "orbit_dim": orbit_dim,
        "isotropy_basis": isotropy,
    });
    if let Some(zetas) = &sc.zeta {
        let mut values = Vec::new();
        for zeta in zetas {
            let value = character_value(&point, zeta, cfg.rank_tol).map_err(CliError::input)?;
            values.push(json!([value.re, value.im]));
        }
        body["character_values"] = Value::Array(values);
    }
    Ok(body)
}
