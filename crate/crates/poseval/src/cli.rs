//! Command-line interface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::Result;
use crate::run;

#[derive(Debug, Parser)]
#[command(name = "poseval", version, about = "Pose-error metrics, AP/AR evaluation and process simulation")]
pub struct Cli {
    /// TOML run configuration; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed for scene generation, noise and process simulation.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write into an existing output directory.
    #[arg(long, global = true)]
    pub force: bool,
    /// Reject unknown object ids (default).
    #[arg(long, global = true, conflicts_with = "lenient")]
    pub strict: bool,
    /// Drop instances with unknown object ids and report how many.
    #[arg(long, global = true)]
    pub lenient: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct InputArgs {
    /// Directory of PLY object models.
    #[arg(long, value_name = "DIR")]
    pub models: Option<PathBuf>,
    /// Scene-GT file, or a directory searched for scene_gt.json files.
    #[arg(long, value_name = "PATH")]
    pub gt: Option<PathBuf>,
    /// Estimate CSV file.
    #[arg(long, value_name = "FILE")]
    pub estimates: Option<PathBuf>,
    /// Dataset manifest; use with --variant and --split.
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub split: Option<String>,
    /// Output directory; must not exist unless --force is given.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// AP/AR, error distribution, per-axis statistics and confidence sweep.
    Evaluate(InputArgs),
    /// AP/AR over a grid of confidence thresholds.
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        /// Number of thresholds i/N, i = 0..N-1.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// MDE of every matched estimate and per-axis error statistics.
    Distribution(InputArgs),
    /// Synthetic scenes and perturbed estimates in the dataset formats.
    Perturb {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        scenes: Option<usize>,
        #[arg(long)]
        parts: Option<usize>,
    },
    /// Pick-and-place process simulation; replays estimates when --estimates is given.
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        replications: Option<usize>,
    },
}

impl Command {
    fn input(&self) -> &InputArgs {
        match self {
            Self::Evaluate(i) | Self::Distribution(i) => i,
            Self::Sweep { input, .. } | Self::Perturb { input, .. } | Self::Simulate { input, .. } => input,
        }
    }
}

impl Cli {
    /// The configuration file (or defaults) with command-line overrides applied.
    pub fn resolved_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if let Some(jobs) = self.jobs {
            cfg.jobs = jobs;
        }
        if self.strict {
            cfg.strict = true;
        }
        if self.lenient {
            cfg.strict = false;
        }
        let input = self.command.input();
        let paths = &mut cfg.paths;
        for (slot, flag) in [
            (&mut paths.models, &input.models),
            (&mut paths.ground_truth, &input.gt),
            (&mut paths.estimates, &input.estimates),
            (&mut paths.manifest, &input.manifest),
        ] {
            if flag.is_some() {
                slot.clone_from(flag);
            }
        }
        if input.variant.is_some() {
            paths.variant.clone_from(&input.variant);
        }
        if input.split.is_some() {
            paths.split.clone_from(&input.split);
        }
        match &self.command {
            Command::Sweep { resolution: Some(r), .. } => cfg.eval.sweep_resolution = *r,
            Command::Perturb { scenes, parts, .. } => {
                if let Some(s) = scenes {
                    cfg.scene.scenes = *s;
                }
                if let Some(p) = parts {
                    cfg.scene.parts_per_scene = *p;
                }
            }
            Command::Simulate { replications: Some(r), .. } => cfg.simulate.replications = *r,
            _ => {}
        }
        cfg.resolve()
    }

    pub fn run(&self) -> Result<String> {
        let cfg = self.resolved_config()?;
        let out = &self.command.input().out;
        match &self.command {
            Command::Evaluate(_) => run::cmd_evaluate(&cfg, out, self.force),
            Command::Sweep { .. } => run::cmd_sweep(&cfg, out, self.force),
            Command::Distribution(_) => run::cmd_distribution(&cfg, out, self.force),
            Command::Perturb { .. } => run::cmd_perturb(&cfg, out, self.force),
            Command::Simulate { .. } => run::cmd_simulate(&cfg, out, self.force),
        }
    }
}
