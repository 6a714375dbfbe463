//! `rweyl`: config-driven experiment runner. Each subcommand reads one TOML
//! config, runs a pipeline from the core crate, and writes machine-readable
//! reports (JSON / CSV / two-column plot data) into the output directory.
//!
//! Exit codes: 0 success, 2 invalid config, 3 violated assumption
//! (non-invariant symbol, non-elliptic symbol, unsupported geometry),
//! 4 numerical failure, 1 I/O failure.

mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use sha2::{Digest, Sha256};

use reduced_weyl::group_actions::{
    hessian_identity_check, sample_regular_zero_level, symmetry_identity_residual, GroupAction,
    PhasePoint,
};
use reduced_weyl::oscillatory::convergence_report;
use reduced_weyl::reduced_volume::{reduced_volume_mc, reduced_volume_quadrature};
use reduced_weyl::representations::{CharacterSystem, IrrepLabel, SquareGrid};
use reduced_weyl::rng::SampleRng;
use reduced_weyl::spectra::{counting_function, model_spectrum, CountingSample};
use reduced_weyl::symbols::invariance_residual;
use reduced_weyl::weyl::{compare, fit, predict, FitMode};

use config::ExperimentConfig;
use report::{num_field, Csv, Json, Provenance};

#[derive(Parser)]
#[command(name = "rweyl", about = "Reduced Weyl-law experiment runner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML).
    config: PathBuf,
    /// Overrides the seed in the config's [mc] section.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: current directory).
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Predicted counting coefficient and exponent per character.
    Predict(Common),
    /// Counting-function samples per character (CSV).
    Count(Common),
    /// Prediction vs fitted counts, with plot data.
    Compare(Common),
    /// Reduced-volume Monte Carlo and quadrature estimates.
    Volume(Common),
    /// Residual maxima of the geometric identities.
    Identities(Common),
    /// Stationary-phase convergence table (CSV).
    Oscillatory(Common),
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Assumption(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn assumption(e: reduced_weyl::Error) -> Self {
        use reduced_weyl::Error as E;
        match e {
            E::Numerical(m) => CliError::Numerical(m),
            E::Convergence(m) => CliError::Numerical(m),
            other => CliError::Assumption(other.to_string()),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Assumption(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, fn(&ExperimentConfig, &Provenance, &Path) -> Result<(), CliError>) =
        match &cli.command {
            Command::Predict(c) => (c, run_predict),
            Command::Count(c) => (c, run_count),
            Command::Compare(c) => (c, run_compare),
            Command::Volume(c) => (c, run_volume),
            Command::Identities(c) => (c, run_identities),
            Command::Oscillatory(c) => (c, run_oscillatory),
        };
    match execute(common, run) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (label, msg) = match &e {
                CliError::Config(m) => ("config error", m),
                CliError::Assumption(m) => ("assumption violated", m),
                CliError::Numerical(m) => ("numerical failure", m),
                CliError::Io(m) => ("io error", m),
            };
            eprintln!("rweyl: {label}: {msg}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(
    common: &Common,
    run: fn(&ExperimentConfig, &Provenance, &Path) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let raw = std::fs::read(&common.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", common.config.display())))?;
    let text = String::from_utf8(raw.clone())
        .map_err(|_| CliError::Config("config is not valid UTF-8".into()))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let (Some(seed), Some(mc)) = (common.seed, cfg.mc.as_mut()) {
        mc.seed = seed;
    }
    let seed = common.seed.or(cfg.mc.as_ref().map(|m| m.seed)).unwrap_or(0);
    let provenance = Provenance {
        config_sha256: hex(&Sha256::digest(&raw)),
        seed,
        versions: format!(
            "reduced-weyl/{};rweyl/{}",
            reduced_weyl::VERSION,
            env!("CARGO_PKG_VERSION")
        ),
    };
    std::fs::create_dir_all(&common.out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", common.out_dir.display())))?;
    run(&cfg, &provenance, &common.out_dir)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    println!("{}", path.display());
    Ok(())
}

/// Filesystem-safe character tag for per-character artifacts.
fn label_slug(chi: IrrepLabel) -> String {
    match chi {
        IrrepLabel::So2(m) => format!("m{m}"),
        IrrepLabel::So3(l) => format!("l{l}"),
        IrrepLabel::FiniteRow(r) => format!("chi{r}"),
    }
}

/// The symbol must actually commute with the group before any prediction is
/// meaningful; sampled residual > tolerance is an assumption violation.
fn check_invariance(
    cfg: &ExperimentConfig,
    action: &GroupAction,
    seed: u64,
) -> Result<(), CliError> {
    let symbol = cfg.symbol()?;
    let residual = invariance_residual(&symbol, action, 512, seed ^ 0x1a7);
    if residual > 1e-8 {
        return Err(CliError::Assumption(format!(
            "symbol is not invariant under the group action (residual {residual:.3e})"
        )));
    }
    Ok(())
}

fn quadrature_volume(cfg: &ExperimentConfig) -> Result<(f64, f64), CliError> {
    let action = cfg.action()?;
    let est = reduced_volume_quadrature(
        &action,
        &cfg.symbol()?,
        &cfg.domain()?,
        1.0,
        cfg.quadrature_resolution(),
    )
    .map_err(CliError::assumption)?;
    Ok((est.value, est.refinement_delta))
}

fn prediction_json(chi: IrrepLabel, p: &reduced_weyl::weyl::WeylPrediction) -> Json {
    Json::obj([
        ("character", Json::Str(chi.to_string())),
        ("coefficient", Json::Num(p.coefficient)),
        ("exponent", Json::Num(p.exponent)),
        ("remainder_exponent", Json::Num(p.remainder_exponent)),
    ])
}

fn run_predict(cfg: &ExperimentConfig, prov: &Provenance, out: &Path) -> Result<(), CliError> {
    let action = cfg.action()?;
    check_invariance(cfg, &action, prov.seed)?;
    let (volume, delta) = quadrature_volume(cfg)?;
    let labels = cfg.labels(&action)?;
    let symbol = cfg.symbol()?;
    let domain = cfg.domain()?;
    let mut predictions = Vec::new();
    for &chi in &labels {
        let p = predict(&action, chi, &symbol, &domain, volume).map_err(CliError::assumption)?;
        predictions.push(prediction_json(chi, &p));
    }
    let mc_json = match &cfg.mc {
        Some(mc) => {
            let est = reduced_volume_mc(&action, &symbol, &domain, 1.0, mc.samples, prov.seed)
                .map_err(CliError::assumption)?;
            mc_estimate_json(&est)
        }
        None => Json::Null,
    };
    let mut fields: Vec<(String, Json)> = prov
        .fields()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    fields.push(("predictions".into(), Json::Arr(predictions)));
    fields.push((
        "volume".into(),
        Json::obj([
            (
                "quadrature",
                Json::obj([
                    ("refinement_delta", Json::Num(delta)),
                    ("value", Json::Num(volume)),
                ]),
            ),
            ("mc", mc_json),
        ]),
    ));
    write_file(out, &format!("{}.json", cfg.stem("predict")), &Json::obj(fields).render())
}

fn mc_estimate_json(est: &reduced_weyl::reduced_volume::MCEstimate) -> Json {
    Json::obj([
        ("low_confidence", Json::Bool(est.low_confidence)),
        ("n_samples", Json::Int(est.n_samples as i64)),
        ("seed", Json::Int(est.seed as i64)),
        ("stderr", Json::Num(est.stderr)),
        ("value", Json::Num(est.value)),
    ])
}

/// Counting samples for every configured character, respecting the FD
/// validity ceiling.
fn gather_counts(
    cfg: &ExperimentConfig,
) -> Result<Vec<(IrrepLabel, Vec<CountingSample>)>, CliError> {
    let action = cfg.action()?;
    let labels = cfg.labels(&action)?;
    let source = cfg.spectrum_source(&action)?;
    let grid = cfg.lambda_grid()?;
    let ceiling = source.validity_ceiling();
    let lambda_max = grid.last().copied().unwrap().min(ceiling);
    let grid: Vec<f64> = grid.into_iter().filter(|&l| l <= ceiling).collect();
    if grid.is_empty() {
        return Err(CliError::Config(format!(
            "every lambda grid point lies above the FD validity ceiling {ceiling:.3e}"
        )));
    }
    let mut out = Vec::new();
    for &chi in &labels {
        let eigs = model_spectrum(&source, chi, lambda_max).map_err(CliError::assumption)?;
        out.push((chi, counting_function(&eigs, &grid, chi)));
    }
    Ok(out)
}

fn run_count(cfg: &ExperimentConfig, prov: &Provenance, out: &Path) -> Result<(), CliError> {
    let counts = gather_counts(cfg)?;
    let mut csv = Csv::new(prov, &["character", "lambda", "count"]);
    for (chi, samples) in &counts {
        for s in samples {
            csv.row(&[chi.to_string(), num_field(s.lambda), s.count.to_string()]);
        }
    }
    write_file(out, &format!("{}.csv", cfg.stem("counts")), &csv.finish())
}

fn run_compare(cfg: &ExperimentConfig, prov: &Provenance, out: &Path) -> Result<(), CliError> {
    let action = cfg.action()?;
    check_invariance(cfg, &action, prov.seed)?;
    let tol = cfg
        .tolerances
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [tolerances] section".into()))?;
    let (volume, _) = quadrature_volume(cfg)?;
    let symbol = cfg.symbol()?;
    let domain = cfg.domain()?;
    let counts = gather_counts(cfg)?;
    let stem = cfg.stem("compare");

    let mut reports = Vec::new();
    for (chi, samples) in &counts {
        let p = predict(&action, *chi, &symbol, &domain, volume).map_err(CliError::assumption)?;
        let f = fit(samples, FitMode::FreeExponent).map_err(CliError::assumption)?;
        let r = compare(&p, &f, tol.coefficient_rel, tol.exponent_abs);
        reports.push(Json::obj([
            ("character", Json::Str(chi.to_string())),
            (
                "fitted",
                Json::obj([
                    ("coefficient", Json::Num(r.fitted_coefficient)),
                    ("exponent", Json::Num(r.fitted_exponent)),
                    (
                        "window",
                        Json::Arr(vec![Json::Num(r.window.0), Json::Num(r.window.1)]),
                    ),
                ]),
            ),
            ("pass", Json::Bool(r.pass)),
            (
                "predicted",
                Json::obj([
                    ("coefficient", Json::Num(r.predicted_coefficient)),
                    ("exponent", Json::Num(r.predicted_exponent)),
                ]),
            ),
            (
                "rel_err",
                Json::obj([
                    ("coefficient", Json::Num(r.rel_err_coefficient)),
                    ("exponent", Json::Num(r.rel_err_exponent)),
                ]),
            ),
        ]));

        // Two-column plot data: measured counts and the predicted power law
        // on the same λ grid.
        let mut measured = String::new();
        let mut predicted = String::new();
        for s in samples {
            measured.push_str(&format!("{} {}\n", num_field(s.lambda), s.count));
            predicted.push_str(&format!(
                "{} {}\n",
                num_field(s.lambda),
                num_field(p.coefficient * s.lambda.powf(p.exponent))
            ));
        }
        let slug = label_slug(*chi);
        write_file(out, &format!("{stem}_counts_{slug}.dat"), &measured)?;
        write_file(out, &format!("{stem}_prediction_{slug}.dat"), &predicted)?;
    }

    let mut fields: Vec<(String, Json)> = prov
        .fields()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    fields.push(("reports".into(), Json::Arr(reports)));
    write_file(out, &format!("{stem}.json"), &Json::obj(fields).render())
}

fn run_volume(cfg: &ExperimentConfig, prov: &Provenance, out: &Path) -> Result<(), CliError> {
    let action = cfg.action()?;
    check_invariance(cfg, &action, prov.seed)?;
    let mc = cfg
        .mc
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [mc] section".into()))?;
    let symbol = cfg.symbol()?;
    let domain = cfg.domain()?;
    let est = reduced_volume_mc(&action, &symbol, &domain, 1.0, mc.samples, prov.seed)
        .map_err(CliError::assumption)?;
    let (qvalue, qdelta) = quadrature_volume(cfg)?;
    let mut fields: Vec<(String, Json)> = prov
        .fields()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    fields.push(("mc".into(), mc_estimate_json(&est)));
    fields.push((
        "quadrature".into(),
        Json::obj([
            ("refinement_delta", Json::Num(qdelta)),
            ("value", Json::Num(qvalue)),
        ]),
    ));
    fields.push((
        "agreement_sigma".into(),
        Json::Num((est.value - qvalue).abs() / est.stderr.max(1e-300)),
    ));
    write_file(out, &format!("{}.json", cfg.stem("volume")), &Json::obj(fields).render())
}

/// Rotation by `t` about the axis `w` (|w| = 1) in R³, as a dense matrix.
fn rotation_about(w: &DVector<f64>, t: f64) -> DMatrix<f64> {
    let axis = nalgebra::Unit::new_normalize(nalgebra::Vector3::new(w[0], w[1], w[2]));
    let r = nalgebra::Rotation3::from_axis_angle(&axis, t);
    DMatrix::from_fn(3, 3, |i, j| r[(i, j)])
}

fn run_identities(cfg: &ExperimentConfig, prov: &Provenance, out: &Path) -> Result<(), CliError> {
    let ids = cfg
        .identities
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [identities] section".into()))?;
    let action = cfg.action()?;
    if action.is_finite() {
        return Err(CliError::Config(
            "identities needs a continuous group for the zero-level residuals".into(),
        ));
    }
    check_invariance(cfg, &action, prov.seed)?;

    // ⟨Ax,Bξ⟩ = ⟨Bx,Aξ⟩ over sampled regular zero-level points.
    let samples = sample_regular_zero_level(
        &action,
        &cfg.domain()?,
        &cfg.symbol()?,
        1.0,
        ids.zero_level_points,
        prov.seed,
    )
    .map_err(CliError::assumption)?;
    let roch2_max = samples
        .iter()
        .map(|s| symmetry_identity_residual(&action, &s.point))
        .fold(0.0f64, f64::max);

    // Transversal-Hessian identities over random SO(3) fixed-point pairs
    // (x and ξ along a common axis, k a rotation about that axis).
    let so3 = GroupAction::standard_so3(3).map_err(CliError::assumption)?;
    let mut d_dev_max = 0.0f64;
    let mut uv_max = 0.0f64;
    for idx in 0..ids.fixed_point_pairs as u64 {
        let mut rng = SampleRng::new(prov.seed ^ 0x50_3, idx);
        let w = DVector::from_vec(rng.unit_vector(3));
        let a = rng.uniform_in(0.2, 2.0);
        let b = rng.uniform_in(-2.0, 2.0);
        let z = PhasePoint { x: &w * a, xi: &w * b };
        let k = rotation_about(&w, rng.uniform_in(0.1, 6.0));
        let rep = hessian_identity_check(&so3, &z, &k).map_err(CliError::assumption)?;
        d_dev_max = d_dev_max.max((rep.d_det - 1.0).abs());
        uv_max = uv_max.max(rep.uv_a).max(rep.uv_b).max(rep.uv_d).max(rep.uv_e);
    }

    // Isotypic projector algebra for C₄ on a centered square lattice.
    let step = std::f64::consts::FRAC_PI_2;
    let c4 = GroupAction::finite(
        2,
        (0..4)
            .map(|j| reduced_weyl::group_actions::rotation_in_plane(2, 0, 1, j as f64 * step))
            .collect(),
    )
    .map_err(CliError::assumption)?;
    let sys = CharacterSystem::new(&c4).map_err(CliError::assumption)?;
    let chars = sys.characters(0);
    let grid = SquareGrid::new(ids.grid_m.unwrap_or(6), ids.grid_h.unwrap_or(0.1));
    let mut rng = SampleRng::new(prov.seed ^ 0xc4, 0);
    let field: Vec<num_complex::Complex64> = (0..grid.len())
        .map(|_| num_complex::Complex64::new(rng.normal(), rng.normal()))
        .collect();
    let mut idem_max = 0.0f64;
    let mut ortho_max = 0.0f64;
    let mut total = vec![num_complex::Complex64::new(0.0, 0.0); grid.len()];
    for &chi in &chars {
        let p1 = sys.project_isotypic(chi, &field, &grid).map_err(CliError::assumption)?;
        let p2 = sys.project_isotypic(chi, &p1, &grid).map_err(CliError::assumption)?;
        idem_max = idem_max
            .max(p1.iter().zip(&p2).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
        for &chi2 in &chars {
            if chi2 != chi {
                let cross = sys
                    .project_isotypic(chi2, &p1, &grid)
                    .map_err(CliError::assumption)?;
                ortho_max =
                    ortho_max.max(cross.iter().map(|v| v.norm()).fold(0.0, f64::max));
            }
        }
        for (t, v) in total.iter_mut().zip(&p1) {
            *t += v;
        }
    }
    let complete_max = total
        .iter()
        .zip(&field)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);

    let mut fields: Vec<(String, Json)> = prov
        .fields()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    fields.push((
        "residual_maxima".into(),
        Json::obj([
            ("d_det_deviation", Json::Num(d_dev_max)),
            ("projector_completeness", Json::Num(complete_max)),
            ("projector_idempotency", Json::Num(idem_max)),
            ("projector_orthogonality", Json::Num(ortho_max)),
            ("roch2", Json::Num(roch2_max)),
            ("uv", Json::Num(uv_max)),
        ]),
    ));
    fields.push((
        "sample_sizes".into(),
        Json::obj([
            ("fixed_point_pairs", Json::Int(ids.fixed_point_pairs as i64)),
            ("projector_grid_nodes", Json::Int(grid.len() as i64)),
            ("zero_level_points", Json::Int(ids.zero_level_points as i64)),
        ]),
    ));
    write_file(out, &format!("{}.json", cfg.stem("identities")), &Json::obj(fields).render())
}

fn run_oscillatory(cfg: &ExperimentConfig, prov: &Provenance, out: &Path) -> Result<(), CliError> {
    let action = cfg.action()?;
    let (amp, mu_list, m) = cfg.amplitude()?;
    let report = convergence_report(&action, IrrepLabel::So2(m), &amp, &mu_list)
        .map_err(CliError::assumption)?;
    let mut csv = Csv::new(
        prov,
        &["mu", "I_real", "I_imag", "leading", "abs_error", "empirical_order"],
    );
    for (i, row) in report.rows.iter().enumerate() {
        let order = if i == 0 {
            String::new()
        } else {
            num_field(report.empirical_orders[i - 1])
        };
        csv.row(&[
            num_field(row.mu),
            num_field(row.i_value.re),
            num_field(row.i_value.im),
            num_field(row.leading),
            num_field(row.abs_error),
            order,
        ]);
    }
    write_file(out, &format!("{}.csv", cfg.stem("oscillatory")), &csv.finish())
}
