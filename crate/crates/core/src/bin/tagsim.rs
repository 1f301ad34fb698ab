use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tagsim::config::{Backhaul, ConfigSource, ScenarioConfig};
use tagsim::sim::TraceOptions;
use tagsim::sweep::{run_sweep, write_outputs, SweepOptions};
use tagsim::{Error, Result};

#[derive(Parser)]
#[command(
    name = "tagsim",
    version,
    about = "Batteryless RFID sensing pipeline simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write CSV results.
    Run(RunArgs),
    /// Parse and validate a configuration, then print it fully resolved.
    Validate(ConfigArgs),
    /// Print the default configuration for a backhaul.
    Defaults {
        #[arg(long, default_value = "mmwave")]
        backhaul: Backhaul,
    },
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    backhaul: Option<Backhaul>,
    /// Comma-separated network sizes, e.g. `1,10,50`.
    #[arg(long)]
    pairs: Option<String>,
    #[arg(long)]
    payload: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<u32>,
    /// Any other setting, as `key=value`. May be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output directory; defaults to `results/<timestamp>`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trace_snr: bool,
    #[arg(long)]
    trace_alloc: bool,
    /// Worker threads; 0 uses every CPU.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ScenarioConfig> {
        let mut sources = Vec::new();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            sources.push(ConfigSource::parse(&path.display().to_string(), &text)?);
        }
        let mut pairs: Vec<(String, String)> = Vec::new();
        if let Some(b) = self.backhaul {
            pairs.push(("backhaul".into(), b.to_string()));
        }
        if let Some(p) = &self.pairs {
            pairs.push(("n_pairs_list".into(), p.clone()));
        }
        if let Some(p) = self.payload {
            pairs.push(("payload_bytes".into(), p.to_string()));
        }
        if let Some(s) = self.seed {
            pairs.push(("root_seed".into(), s.to_string()));
        }
        if let Some(r) = self.runs {
            pairs.push(("runs_per_point".into(), r.to_string()));
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("--set expects key=value, got `{kv}`"))
            })?;
            pairs.push((k.trim().into(), v.trim().into()));
        }
        sources.push(ConfigSource::overrides("command line", pairs));
        ScenarioConfig::resolve(&sources)
    }
}

fn run(args: RunArgs) -> Result<()> {
    let cfg = args.config.resolve()?;
    let out = args.out.unwrap_or_else(|| {
        let stamp = chrono::Local::now().format("%Y%m%d-%H%M%S");
        PathBuf::from("results").join(stamp.to_string())
    });
    let opts = SweepOptions {
        jobs: args.jobs,
        trace: TraceOptions {
            snr: args.trace_snr,
            alloc: args.trace_alloc,
        },
    };
    let result = run_sweep(&cfg, opts)?;
    let files = write_outputs(&out, &cfg, &result)?;
    for s in &result.summary {
        let mean = s
            .mean_td_ms
            .map_or("nan".to_string(), |m| format!("{m:.3}"));
        eprintln!(
            "{} n={:<4} payload={} mean T_D={} ms loss={:.3}",
            s.backhaul, s.n_pairs, s.payload_bytes, mean, s.loss_ratio
        );
    }
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Run(args) => run(args),
        Command::Validate(args) => args.resolve().map(|cfg| print!("{}", cfg.to_text())),
        Command::Defaults { backhaul } => {
            print!("{}", ScenarioConfig::defaults_for(backhaul).to_text());
            Ok(())
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
