use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use releq_core::builtins::builtin_config;
use releq_core::config::SystemConfig;
use releq_core::dynamics::verify_relative_equilibrium;
use releq_core::linalg::Vector;
use releq_core::pipeline::{run_pipeline, PipelineOptions, Stage};
use releq_core::report::{AnalysisReport, Format};
use releq_core::system::Model;

/// Relative equilibria near a symmetric equilibrium of a Hamiltonian system.
#[derive(Parser, Debug)]
#[command(name = "releq", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// System description in TOML.
    #[arg(long, global = true, conflicts_with = "builtin")]
    config: Option<PathBuf>,
    /// Builtin system, optionally followed by parameter overrides, e.g. "spherical_pendulum phi=0".
    #[arg(long, global = true)]
    builtin: Option<String>,
    /// Override a parameter or analysis option (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Seed for all sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: text or json.
    #[arg(long, global = true, default_value = "text")]
    format: String,
    #[command(flatten)]
    tol: TolFlags,
}

#[derive(Args, Debug)]
struct TolFlags {
    #[arg(long, global = true)]
    tol_structural: Option<f64>,
    #[arg(long, global = true)]
    tol_origin: Option<f64>,
    #[arg(long, global = true)]
    tol_invariance: Option<f64>,
    #[arg(long, global = true)]
    tol_kernel: Option<f64>,
    #[arg(long, global = true)]
    tol_definiteness: Option<f64>,
    #[arg(long, global = true)]
    tol_det_polish: Option<f64>,
    #[arg(long, global = true)]
    tol_dip: Option<f64>,
    #[arg(long, global = true)]
    tol_branch: Option<f64>,
    #[arg(long, global = true)]
    tol_flow: Option<f64>,
    #[arg(long, global = true)]
    tol_trust_region: Option<f64>,
    #[arg(long, global = true)]
    tol_cluster: Option<f64>,
    #[arg(long, global = true)]
    tol_orbit_rank: Option<f64>,
}

impl TolFlags {
    fn pairs(&self) -> Vec<(&'static str, f64)> {
        [
            ("structural", self.tol_structural),
            ("origin", self.tol_origin),
            ("invariance", self.tol_invariance),
            ("kernel", self.tol_kernel),
            ("definiteness", self.tol_definiteness),
            ("det_polish", self.tol_det_polish),
            ("dip", self.tol_dip),
            ("branch", self.tol_branch),
            ("flow", self.tol_flow),
            ("trust_region", self.tol_trust_region),
            ("cluster", self.tol_cluster),
            ("orbit_rank", self.tol_orbit_rank),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect()
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the symplectic form, the action and the invariance of h.
    Validate,
    /// Find critical velocities in the search box.
    Velocities,
    /// Lower bounds on the number of relative equilibria per root.
    Counts {
        #[arg(long)]
        root: Option<usize>,
    },
    /// Finite-difference checks of the reduction at each root.
    Reduce {
        #[arg(long)]
        root: Option<usize>,
        #[arg(long, default_value_t = 5)]
        probes: usize,
    },
    /// Continue branches from each root and print per-sample tables.
    Branches {
        /// Index into the sorted root list.
        #[arg(long)]
        root: Option<usize>,
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Flow test of a single point against a velocity.
    Verify {
        /// Comma separated point.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        point: Vec<f64>,
        /// Comma separated velocity.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        velocity: Vec<f64>,
        #[arg(long = "time", default_value_t = 1.0)]
        t_end: f64,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// The full pipeline.
    Analyze,
}

fn load(global: &Global) -> anyhow::Result<Model> {
    let mut config = match (&global.config, &global.builtin) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            SystemConfig::parse(&text).with_context(|| format!("in {}", path.display()))?
        }
        (None, Some(spec)) => {
            let mut words = spec.split_whitespace();
            let name = words.next().context("empty --builtin")?;
            let mut config = builtin_config(name)?;
            for kv in words {
                apply(&mut config, kv)?;
            }
            config
        }
        (None, None) => bail!("one of --config or --builtin is required"),
    };
    for kv in &global.set {
        apply(&mut config, kv)?;
    }
    for (k, v) in global.tol.pairs() {
        config.set(&format!("tol.{k}"), &v.to_string())?;
    }
    if let Some(seed) = global.seed {
        config.analysis.seed = seed;
    }
    Ok(Model::from_config(config)?)
}

fn apply(config: &mut SystemConfig, kv: &str) -> anyhow::Result<()> {
    let (k, v) = kv
        .split_once('=')
        .with_context(|| format!("expected KEY=VALUE, got `{kv}`"))?;
    config.set(k.trim(), v.trim())?;
    Ok(())
}

fn sample_table(report: &AnalysisReport) -> String {
    let mut s =
        String::from("\nroot branch r energy velocity multiplier grad_residual flow_residual\n");
    for (i, r) in report.roots.iter().enumerate() {
        for (k, b) in r.branches.iter().enumerate() {
            for x in &b.samples {
                let vel: Vec<String> = x.velocity.iter().map(|v| format!("{v:.12}")).collect();
                let flow = x
                    .flow
                    .as_ref()
                    .map_or("-".into(), |f| format!("{:.3e}", f.extrapolated_residual));
                let _ = writeln!(
                    s,
                    "{i} {k} {:.6} {:.12e} {} {:.12} {:.3e} {flow}",
                    x.r,
                    x.energy,
                    vel.join(","),
                    x.multiplier,
                    x.grad_residual
                );
            }
        }
    }
    s
}

fn run(cli: Cli) -> anyhow::Result<(String, bool)> {
    let format: Format = cli.global.format.parse()?;
    let mut model = load(&cli.global)?;
    let mut opts = PipelineOptions::default();
    match &cli.command {
        Command::Verify {
            point,
            velocity,
            t_end,
            dt,
        } => {
            if point.len() != model.dim() || velocity.len() != model.dim_g() {
                bail!(
                    "point needs {} entries and velocity {}",
                    model.dim(),
                    model.dim_g()
                );
            }
            let dt = dt.unwrap_or(model.options().flow_dt);
            let tol = model.tol().flow;
            let check = verify_relative_equilibrium(
                &model,
                &Vector::from_vec(point.clone()),
                velocity,
                *t_end,
                dt,
                tol,
            )?;
            let out = match format {
                Format::Json => serde_json::to_string_pretty(&check)? + "\n",
                Format::Text => format!(
                    "flow residual {:.3e} (raw {:.3e}), energy drift {:.3e}, noether {:.3e}: {}\n",
                    check.extrapolated_residual,
                    check.raw_residual,
                    check.energy_drift,
                    check.noether_residual,
                    if check.pass { "ok" } else { "FAILED" }
                ),
            };
            return Ok((out, check.pass));
        }
        Command::Validate => opts.stage = Stage::Validate,
        Command::Velocities => opts.stage = Stage::Velocities,
        Command::Counts { root } => {
            opts.stage = Stage::Counts;
            opts.root = *root;
        }
        Command::Reduce { root, probes } => {
            opts.stage = Stage::Reduce;
            opts.root = *root;
            opts.lemma_probes = *probes;
        }
        Command::Branches { root, r_max, step } => {
            opts.stage = Stage::Branches;
            opts.root = *root;
            let a = &mut model.config.analysis;
            if let Some(r) = r_max {
                a.r_max = *r;
            }
            if let Some(h) = step {
                a.step = *h;
            }
        }
        Command::Analyze => {}
    }
    let report = run_pipeline(&model, &opts);
    let mut out = report.emit(format);
    if matches!(cli.command, Command::Branches { .. }) && format == Format::Text {
        out.push_str(&sample_table(&report));
    }
    Ok((out, report.passed()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_path = cli.global.out.clone();
    match run(cli) {
        Ok((text, pass)) => {
            let written = match &out_path {
                Some(p) => {
                    std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))
                }
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
