use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use cellfree::config::Preset;
use cellfree::harness::run_experiment;
use cellfree::io::{parse_config, summary_text, write_results};

#[derive(Debug, Parser)]
#[command(about = "Pilot assignment and SE simulation for cell-free massive MIMO")]
struct Args {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// proposed, random, scalable or all.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    aps: Option<usize>,
    #[arg(long)]
    ues: Option<usize>,
    #[arg(long)]
    pilots: Option<usize>,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, default_value = "desk", value_parser = ["desk", "paper"])]
    preset: String,
}

fn run(args: Args) -> cellfree::Result<()> {
    let preset: Preset = args.preset.parse().expect("clap restricts the preset");
    let mut overrides: Vec<(&str, String)> = Vec::new();
    if let Some(s) = args.scheme {
        overrides.push(("scheme", s));
    }
    let numeric = [
        ("n_aps", args.aps),
        ("n_ues", args.ues),
        ("n_pilots", args.pilots),
        ("n_instances", args.instances),
        ("n_realizations", args.realizations),
    ];
    for (key, v) in numeric {
        if let Some(v) = v {
            overrides.push((key, v.to_string()));
        }
    }
    if let Some(s) = args.seed {
        overrides.push(("seed", s.to_string()));
    }
    let config = parse_config(args.config.as_deref(), preset, &overrides)?;
    let report = run_experiment(&config)?;
    write_results(&report, &args.out)?;
    print!("{}", summary_text(&report));
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
