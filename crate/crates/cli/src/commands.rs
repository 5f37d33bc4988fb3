//! Command implementations shared by main.rs and the integration tests.
//!
//! Exit-code contract: 0 success, 2 config error, 3 analytic refusal (the
//! requested object provably does not exist), 4 numerical non-convergence.

use crate::config::{ExperimentConfig, Format, LoadedConfig};
use crate::output::{csv, json_document, num, Artifact, Metadata};
use sdelab_core::{
    classify, classify_saddle_node, density, ensemble_run, ldp, scale, ClassifyError, DensityError,
    Interval, LdpError, ModelKind, ModelSpec, ScaleError, SimError,
};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("analytically invalid request: {0}")]
    Refusal(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Refusal(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        CliError::Refusal(e.to_string())
    }
}

impl From<ScaleError> for CliError {
    fn from(e: ScaleError) -> Self {
        match e {
            ScaleError::Quadrature(q) => CliError::Numerical(q.to_string()),
            ScaleError::ReferenceOutsideInterval { .. }
            | ScaleError::PointOutsideInterval { .. }
            | ScaleError::BadGrid => CliError::Config(e.to_string()),
            _ => CliError::Refusal(e.to_string()),
        }
    }
}

impl From<DensityError> for CliError {
    fn from(e: DensityError) -> Self {
        match e {
            DensityError::NonIntegrable { .. }
            | DensityError::NotGranted { .. }
            | DensityError::NoDensityOnSupport { .. } => CliError::Refusal(e.to_string()),
            DensityError::OutsideWindow(_) => CliError::Config(e.to_string()),
            DensityError::Scale(s) => s.into(),
            DensityError::Bracket(_) | DensityError::Quadrature(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

impl From<LdpError> for CliError {
    fn from(e: LdpError) -> Self {
        match e {
            LdpError::Domain(d) => CliError::Config(d),
            LdpError::Quadrature(q) => CliError::Numerical(q.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidConfig { .. } => CliError::Config(e.to_string()),
            SimError::UnsupportedModel { .. } => CliError::Refusal(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Regime report: existence, blow-up, absorption, stability, stationary
    /// densities, quasi-stationary behavior.
    Classify,
    /// Tabulate the scale quantities G, p, v and classify the boundaries.
    Scale,
    /// Normalized stationary density profile with its shape scalars.
    Density,
    /// Quasipotential and small-noise absorption-time asymptotics.
    Ldp,
    /// Euler-Maruyama ensemble: survivor histograms, absorption times,
    /// terminal labels.
    Simulate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Scale => "scale",
            Command::Density => "density",
            Command::Ldp => "ldp",
            Command::Simulate => "simulate",
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("report types serialize infallibly")
}

/// Run one command against a loaded config and return its artifacts.
pub fn run_command(command: Command, loaded: &LoadedConfig) -> Result<Vec<Artifact>, CliError> {
    let cfg = &loaded.config;
    let seed = cfg.sim.as_ref().map(|s| s.cfg.master_seed);
    let mut meta = Metadata::new(command.name(), loaded.sha256.clone(), seed);
    let format = cfg.format.unwrap_or(Format::Csv);
    match command {
        Command::Classify => cmd_classify(cfg, &meta),
        Command::Scale => cmd_scale(cfg, &meta, format),
        Command::Density => cmd_density(cfg, &meta, format),
        Command::Ldp => cmd_ldp(cfg, &meta),
        Command::Simulate => cmd_simulate(cfg, &mut meta, format),
    }
}

fn cmd_classify(cfg: &ExperimentConfig, meta: &Metadata) -> Result<Vec<Artifact>, CliError> {
    let model = cfg.model()?;
    let report = if model.kind() == ModelKind::SaddleNode {
        classify_saddle_node(model.a(), model.sigma(), model.alpha())?
    } else {
        classify(model)?
    };
    Ok(vec![Artifact::Json {
        name: "classify.json".into(),
        value: json_document(meta, to_json(&report)),
    }])
}

fn cmd_scale(cfg: &ExperimentConfig, meta: &Metadata, format: Format) -> Result<Vec<Artifact>, CliError> {
    let model = cfg.model()?;
    let block = cfg
        .scale
        .as_ref()
        .ok_or_else(|| CliError::Config("config is missing the `scale` block".into()))?;
    let c = block.reference.unwrap_or_else(|| scale::default_reference(block.interval));
    let grid = block.grid.values()?;
    let table = scale::scale_table(model, block.interval, c, &grid)?;
    if format == Format::Json {
        return Ok(vec![Artifact::Json {
            name: "scale.json".into(),
            value: json_document(meta, to_json(&table)),
        }]);
    }
    let rows: Vec<Vec<String>> = table
        .grid
        .iter()
        .zip(table.g_vals.iter())
        .zip(table.p_vals.iter().zip(table.v_vals.iter()))
        .map(|((x, g), (p, v))| vec![num(*x), num(*g), num(*p), num(*v)])
        .collect();
    Ok(vec![
        Artifact::Csv {
            name: "scale.csv".into(),
            body: csv(meta, &["x", "G", "p", "v"], &rows),
        },
        Artifact::Json {
            name: "boundary.json".into(),
            value: json_document(meta, to_json(&table.boundary)),
        },
    ])
}

/// Interval between the singular points (or around the start of the
/// half-line) on which a density would live if it existed.
fn natural_support(model: &ModelSpec) -> Interval {
    match model.kind() {
        ModelKind::SaddleNode if model.a() > 0.0 => {
            let r = model.a().sqrt();
            Interval::new(-r, r)
        }
        ModelKind::SaddleNode => Interval::real_line(),
        _ => Interval::new(0.0, f64::INFINITY),
    }
}

fn cmd_density(cfg: &ExperimentConfig, meta: &Metadata, format: Format) -> Result<Vec<Artifact>, CliError> {
    let model = cfg.model()?;
    let default_block = crate::config::DensityBlock::default();
    let block = cfg.density.as_ref().unwrap_or(&default_block);
    let support: Interval = match block.support {
        Some(iv) => iv,
        None => match density::granted_supports(model).first() {
            Some(iv) => *iv,
            None => {
                // Nothing is granted; probe the natural support so the error
                // names the non-integrable endpoint.
                density::normalize_density(model, natural_support(model))?;
                return Err(CliError::Refusal(
                    "no stationary density is granted for this model".into(),
                ));
            }
        },
    };
    let profile = density::density_profile(model, support, block.points)?;
    let thresholds = density::p_bifurcation_points(model);
    let scalars = serde_json::json!({
        "support": profile.support,
        "z": profile.z,
        "mode": profile.mode,
        "mean": profile.mean,
        "second_moment": profile.second_moment,
        "shape": profile.shape,
        "p_bifurcations": thresholds,
    });
    if format == Format::Json {
        return Ok(vec![Artifact::Json {
            name: "density.json".into(),
            value: json_document(meta, serde_json::json!({ "profile": to_json(&profile), "p_bifurcations": thresholds })),
        }]);
    }
    let rows: Vec<Vec<String>> = profile
        .grid
        .iter()
        .zip(profile.values.iter())
        .map(|(x, d)| vec![num(*x), num(*d)])
        .collect();
    Ok(vec![
        Artifact::Csv {
            name: "density.csv".into(),
            body: csv(meta, &["x", "density"], &rows),
        },
        Artifact::Json {
            name: "density_scalars.json".into(),
            value: json_document(meta, scalars),
        },
    ])
}

fn cmd_ldp(cfg: &ExperimentConfig, meta: &Metadata) -> Result<Vec<Artifact>, CliError> {
    let block = cfg
        .ldp
        .as_ref()
        .ok_or_else(|| CliError::Config("config is missing the `ldp` block".into()))?;
    let u0 = ldp::quasipotential_at_zero(block.lambda, block.mu, block.kappa, block.alpha)?;
    let u_x = match block.x {
        Some(x) => Some(ldp::quasipotential(block.lambda, block.mu, block.kappa, block.alpha, x)?),
        None => None,
    };
    let expansion = ldp::exponential_rate_expansion(block.lambda, block.mu, block.kappa, block.alpha);
    let regime = match block.c {
        Some(c) => Some(to_json(&ldp::asymptotic_regime(block.mu, block.kappa, c)?)),
        None => None,
    };
    let payload = serde_json::json!({
        "lambda": block.lambda,
        "mu": block.mu,
        "kappa": block.kappa,
        "alpha": block.alpha,
        "u0": u0,
        "u_at_x": u_x,
        "rate_expansion": expansion,
        "regime": regime,
    });
    Ok(vec![Artifact::Json {
        name: "ldp.json".into(),
        value: json_document(meta, payload),
    }])
}

fn cmd_simulate(cfg: &ExperimentConfig, meta: &mut Metadata, format: Format) -> Result<Vec<Artifact>, CliError> {
    let model: &ModelSpec = cfg.model()?;
    let block = cfg
        .sim
        .as_ref()
        .ok_or_else(|| CliError::Config("config is missing the `sim` block".into()))?;
    meta.notes.push(format!(
        "initial condition: {}",
        serde_json::to_string(&block.initial).expect("initial serializes")
    ));
    let stats = ensemble_run(model, block.initial, &block.cfg)?;

    let times = stats.absorption_times();
    let n_abs = times.len();
    let censored = 1.0 - n_abs as f64 / block.cfg.n_particles as f64;
    let (mean, stderr) = if n_abs > 0 {
        let m = times.iter().sum::<f64>() / n_abs as f64;
        let var = times.iter().map(|t| (t - m).powi(2)).sum::<f64>() / (n_abs as f64 - 1.0).max(1.0);
        (Some(m), Some(var.sqrt() / (n_abs as f64).sqrt()))
    } else {
        (None, None)
    };
    let summary = serde_json::json!({
        "n_particles": block.cfg.n_particles,
        "counts": stats.counts,
        "absorption": {
            "n_absorbed": n_abs,
            "mean_time": mean,
            "stderr": stderr,
            "censored_fraction": censored,
            "biased_low": censored > 0.5,
        },
    });
    if format == Format::Json {
        return Ok(vec![Artifact::Json {
            name: "simulate.json".into(),
            value: json_document(
                meta,
                serde_json::json!({ "summary": summary, "histograms": to_json(&stats.histograms) }),
            ),
        }]);
    }

    let mut hist_rows = Vec::new();
    for h in &stats.histograms {
        for (i, mass) in h.masses.iter().enumerate() {
            hist_rows.push(vec![
                num(h.time),
                num(h.bin_edges[i]),
                num(h.bin_edges[i + 1]),
                num(*mass),
                h.survivor_count.to_string(),
            ]);
        }
    }
    let time_rows: Vec<Vec<String>> = stats
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| vec![i.to_string(), num(o.time), format!("{:?}", o.label)])
        .collect();
    Ok(vec![
        Artifact::Csv {
            name: "histograms.csv".into(),
            body: csv(meta, &["snapshot_time", "bin_lo", "bin_hi", "mass", "survivor_count"], &hist_rows),
        },
        Artifact::Csv {
            name: "absorption_times.csv".into(),
            body: csv(meta, &["particle_index", "time", "label"], &time_rows),
        },
        Artifact::Json {
            name: "summary.json".into(),
            value: json_document(meta, summary),
        },
    ])
}
