//! `stit`: simulate, render and analyse STIT tessellations.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use stit_core::exact::{tau, v_w_isotropic, variance_exact, xi_variance};
use stit_core::harness::{geometry_property_suite, render, RenderFormat, WindowConfig};
use stit_core::mnw::TessellationJson;
use stit_core::rng::stream;
use stit_core::{
    run_experiment, run_mnw, ExperimentConfig, ExperimentKind, HyperplaneMeasureSpec, MeasureKind, Tessellation,
};

#[derive(Parser)]
#[command(name = "stit", version, about = "STIT tessellations in bounded windows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Measure {
    Isotropic,
    AxisAligned,
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    Variance,
    Xi,
    Vw,
    Tau,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one tessellation and write it as JSON.
    Simulate {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_enum, default_value = "isotropic")]
        measure: Measure,
        /// `box:<side>` or `ball:<radius>`.
        #[arg(long, default_value = "box:1")]
        window: String,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a simulated tessellation as SVG (d = 2) or OBJ (d = 3).
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "svg")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate an exact quantity for the setting of an experiment config.
    Exact {
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// Experiment TOML; supplies dimension, measure, window, functional,
        /// time and integrator settings.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Time argument of the time change.
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        /// Window scale of the time change.
        #[arg(long, default_value_t = 64.0)]
        r: f64,
    },
    /// Run a named experiment and write its results.
    Experiment {
        name: String,
        /// TOML config; the shipped config for the experiment otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Worker threads; all cores when absent. Results do not depend on it.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the randomized geometry invariants.
    Properties {
        #[arg(long, default_value_t = 10_000)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// The shipped configuration for each experiment (2D for the constants).
fn builtin_config(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::MeanSurface => include_str!("../../../configs/mean_surface.toml"),
        ExperimentKind::VarianceExact => include_str!("../../../configs/variance_exact.toml"),
        ExperimentKind::Martingale => include_str!("../../../configs/martingale.toml"),
        ExperimentKind::IncrementClt => include_str!("../../../configs/increment_clt.toml"),
        ExperimentKind::TotalLength2d => include_str!("../../../configs/total_length_2d.toml"),
        ExperimentKind::NonGaussian => include_str!("../../../configs/non_gaussian.toml"),
        ExperimentKind::Scaling => include_str!("../../../configs/scaling.toml"),
        ExperimentKind::IsotropicConstants => include_str!("../../../configs/isotropic_constants_2d.toml"),
    }
}

fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ExperimentConfig::from_toml(&text)?)
}

fn simulate(dim: usize, measure: Measure, window: &str, t: f64, seed: u64) -> Result<Tessellation> {
    let spec = match measure {
        Measure::Isotropic => HyperplaneMeasureSpec::isotropic(dim)?,
        Measure::AxisAligned => HyperplaneMeasureSpec::axis_aligned(dim),
    };
    let window = window.parse::<WindowConfig>()?.build(dim)?;
    let mut rng = stream(seed, "simulate", 0);
    Ok(run_mnw(window, &spec, t, &mut rng)?.with_seed(seed))
}

fn exact(quantity: Quantity, config: Option<&Path>, s: f64, r: f64) -> Result<serde_json::Value> {
    if let Quantity::Tau = quantity {
        return Ok(json!({ "quantity": "tau", "s": s, "r": r, "value": tau(s, r)? }));
    }
    let Some(path) = config else {
        bail!("--config is required for this quantity");
    };
    let cfg = read_config(path)?;
    let d = cfg.dimension;
    let spec = cfg.measure.to_spec(d)?;
    let window = cfg.window.build(d)?;
    let phi = &cfg.functional;
    Ok(match quantity {
        Quantity::Variance => {
            let mut ic = cfg.integrator.clone();
            ic.epsilon = 0.0;
            let v = variance_exact(&spec, &window, cfg.time.t, phi, &ic)?;
            json!({ "quantity": "variance", "t": cfg.time.t, "result": v })
        }
        Quantity::Xi => json!({ "quantity": "xi", "result": xi_variance(&spec, &window, phi, &cfg.integrator)? }),
        Quantity::Vw => {
            if spec.kind() != MeasureKind::Isotropic {
                bail!("the closed form for V_W needs an isotropic measure; run the isotropic_constants experiment instead");
            }
            let v = v_w_isotropic(d, window.volume(), phi.zeta_square_mean(d)) * spec.scale().powi(2 - d as i32);
            json!({ "quantity": "vw", "value": v })
        }
        Quantity::Tau => unreachable!(),
    })
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate {
            dim,
            measure,
            window,
            t,
            seed,
            out,
        } => {
            let state = simulate(dim, measure, &window, t, seed)?;
            emit(out.as_deref(), &serde_json::to_string_pretty(&state.to_json())?)?;
        }
        Command::Render { input, format, out } => {
            let text = fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let state: Tessellation = serde_json::from_str::<TessellationJson>(&text)?.into();
            emit(out.as_deref(), &render(&state, format.parse::<RenderFormat>()?)?)?;
        }
        Command::Exact { quantity, config, s, r } => {
            println!("{}", serde_json::to_string_pretty(&exact(quantity, config.as_deref(), s, r)?)?);
        }
        Command::Experiment {
            name,
            config,
            out,
            workers,
        } => {
            let kind: ExperimentKind = name.parse()?;
            let cfg = match config {
                Some(p) => read_config(&p)?,
                None => ExperimentConfig::from_toml(builtin_config(kind))?,
            };
            if cfg.experiment != kind {
                bail!("config describes `{}`, not `{}`", cfg.experiment, kind);
            }
            let res = run_experiment(&cfg, workers)?;
            res.write_to(&out)?;
            for t in &res.tests {
                let tag = match (t.informational, t.passed) {
                    (true, _) => "INFO",
                    (false, true) => "PASS",
                    (false, false) => "FAIL",
                };
                println!("{tag} {}: {}", t.name, t.detail);
            }
            println!(
                "{} {} in {:.1}s, results in {}",
                kind,
                if res.passed() { "passed" } else { "failed" },
                res.elapsed.as_secs_f64(),
                out.display()
            );
            if !res.passed() {
                std::process::exit(1);
            }
        }
        Command::Properties { cases, seed } => {
            let outcomes = geometry_property_suite(cases, seed);
            for o in &outcomes {
                println!(
                    "{} {}: {} failures in {} cases, max error {:.2e} (tolerance {:.0e})",
                    if o.passed() { "PASS" } else { "FAIL" },
                    o.name,
                    o.failures,
                    o.cases,
                    o.max_error,
                    o.tolerance
                );
            }
            if !outcomes.iter().all(|o| o.passed()) {
                std::process::exit(1);
            }
        }
    }
    Ok(())
}
