use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use ildars::harness::{
    default_max_range, enumerate_combos, rank, rank_and_report, run, run_experiment_detailed, ComboFilter, RankKey,
    RunConfig,
};
use ildars::records::{write_clusters, write_measurements, write_wall_estimates};
use ildars::ErrorConfig;

#[derive(Parser)]
#[command(name = "ildars", version, about = "Indoor localization experiments over all algorithm combinations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded experiments and write ranking reports.
    Run(RunArgs),
    /// List the valid algorithm combinations.
    Combos {
        /// Comma-separated token filter, e.g. `I,A,N`.
        #[arg(long)]
        combos: Option<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 500)]
    experiments: usize,
    #[arg(long, default_value_t = 20)]
    senders: usize,
    /// Side of the cube room in meters.
    #[arg(long, default_value_t = 2.0)]
    room_side: f64,
    /// Von Mises concentration of direction errors.
    #[arg(long, default_value_t = ildars::simulation::DEFAULT_KAPPA)]
    kappa: f64,
    /// Standard deviation of the path-length difference error in meters.
    #[arg(long, default_value_t = ildars::simulation::DEFAULT_DELTA_SIGMA)]
    delta_sigma: f64,
    /// Fraction of reflections attached to the wrong direct signal.
    #[arg(long, default_value_t = ildars::simulation::DEFAULT_MISASSIGN_RATE)]
    misassign_rate: f64,
    /// Inversion clustering distance threshold.
    #[arg(long, default_value_t = ildars::clustering::DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Sender range bounding gnomonic arcs [default: room space diagonal].
    #[arg(long, conflicts_with = "unbounded_arcs")]
    max_range: Option<f64>,
    /// Use unbounded gnomonic arcs.
    #[arg(long)]
    unbounded_arcs: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated token filter, e.g. `I,A,N`.
    #[arg(long)]
    combos: Option<String>,
    #[arg(long, default_value = "ildars-out")]
    out: PathBuf,
    /// Also write every offset to offsets.csv.
    #[arg(long)]
    dump_offsets: bool,
    /// Disable all measurement errors.
    #[arg(long)]
    zero_error: bool,
    /// Write measurements, clusters and wall estimates of experiment 0.
    #[arg(long)]
    audit: bool,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let filter = self.combos.as_deref().map(ComboFilter::parse).transpose()?;
        let error = if self.zero_error {
            ErrorConfig::zero_error(0)
        } else {
            ErrorConfig {
                kappa: self.kappa,
                delta_sigma: self.delta_sigma,
                misassign_rate: self.misassign_rate,
                rng_seed: 0,
            }
        };
        let gnomonic_max_range = if self.unbounded_arcs {
            None
        } else {
            Some(self.max_range.unwrap_or_else(|| default_max_range(self.room_side)))
        };
        let cfg = RunConfig {
            n_experiments: self.experiments,
            n_senders: self.senders,
            room_side: self.room_side,
            error,
            inversion_threshold: self.threshold,
            gnomonic_max_range,
            master_seed: self.seed,
            combos: enumerate_combos(filter.as_ref()),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn audit(cfg: &RunConfig, out: &Path) -> Result<()> {
    let dir = out.join("audit");
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let run = run_experiment_detailed(cfg, 0)?;
    let mut files = vec![("measurements.txt".to_string(), write_measurements(&run.measurements))];
    for (method, clusters) in &run.clusterings {
        files.push((format!("clusters_{method:?}.txt").to_lowercase(), write_clusters(clusters)));
    }
    for ((method, selection), cal) in &run.calibrations {
        let name = format!("walls_{method:?}_{selection:?}.txt").to_lowercase();
        files.push((name, write_wall_estimates(&cal.estimates)));
    }
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn run_command(args: &RunArgs) -> Result<()> {
    let cfg = args.config()?;
    let records = run(&cfg)?;
    let stats = rank_and_report(&cfg, &records, &args.out, args.dump_offsets)?;
    if args.audit {
        audit(&cfg, &args.out)?;
    }
    println!(
        "{} experiments, {} combinations, reports in {}",
        cfg.n_experiments,
        cfg.combos.len(),
        args.out.display()
    );
    println!("best by median offset:");
    for s in rank(&stats, RankKey::Median).iter().take(5) {
        println!(
            "  {}  median {:.4} m  mean {:.4} m  failed {}",
            s.combo,
            s.get(RankKey::Median),
            s.get(RankKey::Mean),
            s.n_failed
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run_command(args),
        Command::Combos { combos } => combos
            .as_deref()
            .map(ComboFilter::parse)
            .transpose()
            .map_err(Into::into)
            .map(|f| {
                for c in enumerate_combos(f.as_ref()) {
                    println!("{c}");
                }
            }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
